use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};

use sixvertex::asymptotics::{fit_free_energy, fit_kappa, GExponent};
use sixvertex::lattice::{enumerate_dfs, transfer_matrix_zn, transfer_matrix_zn_with};
use sixvertex::orthopoly::norms_from_moments;
use sixvertex::specfun::MomentSequence;
use sixvertex::{Execution, Phase, PhaseParams, PrecisionContext, Weights};

fn rational() -> impl Strategy<Value = Rational> {
    (1i64..=60, 1i64..=15).prop_map(|(p, q)| Rational::from((p, q)))
}

fn weights() -> impl Strategy<Value = Weights<Rational>> {
    (rational(), rational(), rational()).prop_map(|(a, b, c)| Weights::new(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_is_scale_invariant_and_symmetric(w in weights(), s in rational()) {
        let delta = w.delta();
        prop_assert_eq!(w.scaled(&s).unwrap().delta(), delta.clone());
        prop_assert_eq!(w.swap_ab().delta(), delta);
    }

    #[test]
    fn classification_follows_delta(w in weights()) {
        let class = w.classify(&PrecisionContext::default());
        let d = class.delta;
        let expected = if d == 1 {
            Phase::CriticalFd
        } else if d == -1 {
            Phase::CriticalAfd
        } else if d > 1 {
            Phase::Ferroelectric
        } else if d < -1 {
            Phase::Antiferroelectric
        } else {
            Phase::Disordered
        };
        prop_assert_eq!(class.phase, expected);
        prop_assert!(!class.borderline);
    }

    #[test]
    fn partition_function_is_homogeneous(w in weights(), s in rational(), n in 1usize..=5) {
        let z = transfer_matrix_zn(n, &w).unwrap();
        let zs = transfer_matrix_zn(n, &w.scaled(&s).unwrap()).unwrap();
        let factor = Rational::from((&s).pow((n * n) as u32));
        prop_assert_eq!(zs, z * factor);
    }

    #[test]
    fn partition_function_is_symmetric_in_a_b(w in weights(), n in 1usize..=6) {
        prop_assert_eq!(transfer_matrix_zn(n, &w).unwrap(), transfer_matrix_zn(n, &w.swap_ab()).unwrap());
    }

    #[test]
    fn enumeration_matches_transfer_matrix(w in weights(), n in 1usize..=5) {
        let (dfs, _) = enumerate_dfs(n, &w).unwrap();
        prop_assert_eq!(dfs, transfer_matrix_zn(n, &w).unwrap());
    }

    #[test]
    fn sequential_and_parallel_agree(w in weights(), n in 1usize..=7) {
        let seq = transfer_matrix_zn_with(n, &w, Execution::Sequential).unwrap();
        let par = transfer_matrix_zn_with(n, &w, Execution::default()).unwrap();
        prop_assert_eq!(seq, par);
    }
}

fn noncritical_params() -> impl Strategy<Value = PhaseParams> {
    prop_oneof![
        (0.05f64..1.5, -0.95f64..0.95).prop_map(|(g, s)| PhaseParams::from_f64(Phase::Disordered, s * g, g).unwrap()),
        (0.1f64..2.0, 1.05f64..3.0).prop_map(|(g, s)| PhaseParams::from_f64(Phase::Ferroelectric, s * g, g).unwrap()),
        (0.1f64..2.0, -0.95f64..0.95).prop_map(|(g, s)| PhaseParams::from_f64(Phase::Antiferroelectric, s * g, g).unwrap()),
        (1.05f64..6.0).prop_map(|a| PhaseParams::from_f64(Phase::CriticalFd, a, 0.0).unwrap()),
        (-0.95f64..0.95).prop_map(|a| PhaseParams::from_f64(Phase::CriticalAfd, a, 0.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_norms_are_positive(p in noncritical_params()) {
        let ctx = PrecisionContext::default().for_hankel(12);
        let m = MomentSequence::weight(&p, 22, &ctx).unwrap();
        let ns = norms_from_moments(&m, 12, &ctx).unwrap();
        prop_assert_eq!(ns.len(), 12);
        prop_assert!(ns.norms.iter().all(|h| *h > 0));
    }

    #[test]
    fn fits_recover_synthetic_coefficients(
        log_f in -2.0f64..2.0,
        kappa in -1.0f64..1.0,
        log_g in -1.0f64..1.0,
        log_c in -1.0f64..1.0,
    ) {
        let bits = 256;
        let x = |v: f64| Float::with_val(bits, v);
        // log Z_n = n^2 log F + n log G + kappa log n + log C, exactly.
        let series: Vec<(usize, Float)> = (1..=30usize)
            .map(|n| {
                let nf = x(n as f64);
                let v = x(log_f) * (n * n) as u32 + x(log_g) * n as u32 + x(kappa) * nf.ln() + x(log_c);
                (n, v)
            })
            .collect();
        let fit = fit_kappa(&series, &x(log_f), Some(&x(log_g)), GExponent::N, None).unwrap();
        prop_assert!((fit.extrapolated.to_f64() - kappa).abs() < 1e-60);
        prop_assert!((fit.intercept.unwrap().to_f64() - log_c).abs() < 1e-60);
        prop_assert!(fit.residual_norm.to_f64() < 1e-60);

        // Without the log term the second difference is exact.
        let quadratic: Vec<(usize, Float)> = (1..=30usize)
            .map(|n| (n, x(log_f) * (n * n) as u32 + x(log_g) * n as u32 + x(log_c)))
            .collect();
        let f = fit_free_energy(&quadratic, None).unwrap();
        prop_assert!((f.extrapolated.to_f64() - log_f).abs() < 1e-60);
        prop_assert!(f.residual_norm.to_f64() < 1e-60);
    }
}
