//! Scalar auxiliary problems: the closed-form Nagumo front, half-line
//! saddle connections by shooting, and their weighted energies.

mod analytic;
mod functional;
mod ode;
mod shooting;

pub use analytic::{analytic_front, AnalyticFront};
pub use functional::{evaluate_half_line_functional, reflection_competitor, reflection_margin, FunctionalKind};
pub use ode::Dopri5;
pub use shooting::{intersections, shoot_heteroclinic, Heteroclinic, ScalarWaveProblem, EPS_SCAN, SHOOT_SPACING};
