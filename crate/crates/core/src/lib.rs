//! Traveling fronts and pulses of the FitzHugh-Nagumo system
//!
//! `u_t = u_xx + (f(u) - v)/d`, `v_t = v_xx + u - γv`, `f(u) = u(u-β)(1-u)`,
//!
//! computed by constrained minimization of an exponentially weighted energy,
//! refined by Newton's method on the traveling-wave boundary value problem,
//! and cross-checked by direct time integration.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod roots;
pub mod scalar;
pub mod sim;
pub mod wave;
pub mod weighted;

pub use error::{Error, Result};
