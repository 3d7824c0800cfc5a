use fhn_core::model::Cubic;
use fhn_core::weighted::{
    apply_splits, best_splits, normalized_j, project_admissible, AdmissibleKind, AdmissibleSpec, NonlocalOperator,
    Profile, WeightedGrid,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = AdmissibleKind> {
    prop_oneof![Just(AdmissibleKind::Front), Just(AdmissibleKind::Pulse), Just(AdmissibleKind::SingleSignChange)]
}

fn spec(k: AdmissibleKind) -> AdmissibleSpec {
    AdmissibleSpec::new(k, -0.05, 1.01, 0.96).unwrap()
}

fn cost(u: &[f64], p: &[f64], w: &[f64]) -> f64 {
    (0..u.len()).map(|i| w[i] * (u[i] - p[i]).powi(2)).sum()
}

fn bump(g: &WeightedGrid, a: f64, m: f64, s: f64) -> Vec<f64> {
    g.nodes().iter().map(|z| a * (-((z - m) / s).powi(2)).exp()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn projection_is_idempotent_and_admissible(k in kind(), u in vec(-0.5f64..1.5, 1..40), seed in vec(0.1f64..10.0, 40)) {
        let s = spec(k);
        let w = &seed[..u.len()];
        let p = project_admissible(&u, w, &s);
        prop_assert!(s.contains(&p));
        prop_assert_eq!(project_admissible(&p, w, &s), p.clone());
        prop_assert!(p.iter().all(|x| *x >= s.lower && *x <= s.upper));
    }

    #[test]
    fn projection_beats_every_split(k in kind(), u in vec(-0.5f64..1.5, 1..30), seed in vec(0.1f64..10.0, 30), a in 0usize..31, b in 0usize..31) {
        let s = spec(k);
        let n = u.len();
        let w = &seed[..n];
        let (k1, k2) = (a.min(b).min(n), a.max(b).min(n));
        let (_, _, best) = best_splits(&u, w, &s);
        let other = apply_splits(&u, &s, k1, k2);
        prop_assert!(best <= cost(&u, &other, w) + 1e-15);
        prop_assert_eq!(best, cost(&u, &project_admissible(&u, w, &s), w));
    }

    #[test]
    fn nonlocal_operator_is_linear_and_order_preserving(c in 0.5f64..20.0, gamma in 1.0f64..60.0, a in -1.0f64..1.0, m in -5.0f64..5.0, t in 0.1f64..2.0) {
        let g = WeightedGrid::with_spacing(-20.0, 15.0, 0.05).unwrap();
        let op = NonlocalOperator::new(g, c, gamma).unwrap();
        let u = bump(&g, 1.0, m, t);
        let w = bump(&g, a, -m, 1.0);
        let lu = op.apply(&u).unwrap();
        let lw = op.apply(&w).unwrap();
        let sum: Vec<f64> = u.iter().zip(&w).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let ls = op.apply(&sum).unwrap();
        for i in 0..g.n {
            prop_assert!((ls[i] - (2.0 * lu[i] - 3.0 * lw[i])).abs() <= 1e-12);
            prop_assert!(lu[i] >= -1e-15, "nonnegative input gave {}", lu[i]);
        }
    }

    #[test]
    fn normalized_energy_ignores_translation(beta in 0.1f64..0.49, c in 1.0f64..30.0, shift in -100i32..100) {
        let g = WeightedGrid::with_spacing(-25.0, 15.0, 0.05).unwrap();
        let f = Cubic::canonical(beta);
        let u = Profile::from_fn(g, |z| 0.5 - 0.5 * (z / 0.4).tanh());
        let kappa = 1e-5 * c * c;
        let base = normalized_j(&u, c, kappa, 50.0, &f).unwrap();
        let a = shift as f64 * g.h;
        let moved = Profile::new(g.shifted(a), u.values.clone()).unwrap();
        let r = normalized_j(&moved, c, kappa, 50.0, &f).unwrap();
        prop_assert!((r - base).abs() <= 1e-9 * base.abs().max(1e-9), "{} vs {}", r, base);
    }
}
