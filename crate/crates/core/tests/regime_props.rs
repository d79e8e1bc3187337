use isoweight::regime::{
    ckn_thresholds, classify, l_one, l_star_exact_nonpos_k, l_upper, Certificate, Orientation, Params, Verdict,
};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = u32> {
    2u32..=6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn l_one_below_l_upper(k in 0.0f64..6.0, dim in dims()) {
        prop_assert!(l_one(k, dim).unwrap() <= l_upper(k, dim).unwrap() + 1e-12);
    }

    #[test]
    fn nonpositive_k_thresholds(dim in dims(), kf in 0.01f64..0.99, lf in 0.0f64..1.0) {
        let n = f64::from(dim);
        let k = -kf * (n - 1.0);
        let exact = l_star_exact_nonpos_k(k, dim).unwrap();
        let upper = l_upper(k, dim).unwrap();
        prop_assert!(exact <= upper + 1e-12);
        // below the exact threshold the ball is optimal
        let l = -n + 1e-6 + lf * (exact + n - 1e-6);
        if let Ok(p) = Params::standard(k, l, dim) {
            prop_assert_eq!(classify(&p).verdict, Verdict::RadialOptimal);
        }
        // above l_upper the first mode is unstable and the ball is not optimal
        let p = Params::standard(k, upper + 0.01 + 3.0 * lf, dim).unwrap();
        let r = classify(&p);
        prop_assert!(r.first_mode_unstable);
        prop_assert!(matches!(r.verdict, Verdict::SymmetryBroken | Verdict::ZeroInfimum));
    }

    #[test]
    fn classify_is_total_and_consistent(k in -0.99f64..5.0, l in -1.99f64..8.0) {
        let p = Params::standard(k, l, 2).unwrap();
        let r = classify(&p);
        match r.verdict {
            Verdict::Unknown => prop_assert!(r.certifying_condition.is_none()),
            Verdict::ZeroInfimum => {
                prop_assert_eq!(r.certifying_condition, Some(Certificate::Positivity));
                prop_assert!(k < l / 2.0);
            }
            Verdict::SymmetryBroken => {
                prop_assert_eq!(r.certifying_condition, Some(Certificate::Necessity));
                prop_assert!(r.first_mode_unstable);
            }
            Verdict::RadialOptimal => prop_assert!(!r.first_mode_unstable),
        }
    }

    #[test]
    fn line_rule(k in 0.01f64..5.0, l in -0.99f64..5.0) {
        let r = classify(&Params::standard(k, l, 1).unwrap());
        if k >= l + 1.0 {
            prop_assert_eq!(r.verdict, Verdict::RadialOptimal);
        } else {
            prop_assert_eq!(r.verdict, Verdict::SymmetryBroken);
        }
    }

    #[test]
    fn inverted_matches_dual(dim in dims(), kf in 0.05f64..4.0, lf in 0.05f64..6.0) {
        let n = f64::from(dim);
        let k = -(n - 1.0) - kf;
        let l = -n - lf;
        let inv = Params::new(k, l, dim).unwrap();
        prop_assert_eq!(inv.orientation, Orientation::Inverted);
        let std = Params::standard(-k - 2.0 * n + 2.0, -l - 2.0 * n, dim).unwrap();
        let a = classify(&inv);
        let b = classify(&std);
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.first_mode_unstable, b.first_mode_unstable);
        let renamed = b.certifying_condition.map(|c| match c {
            Certificate::I => Certificate::J,
            Certificate::Ii => Certificate::Jj,
            Certificate::Iii => Certificate::Jjj,
            Certificate::Iv => Certificate::Jv,
            other => other,
        });
        prop_assert_eq!(a.certifying_condition, renamed);
    }

    #[test]
    fn ckn_threshold_orderings(dim in dims(), pf in 0.01f64..0.99, qf in 0.01f64..0.99) {
        let n = f64::from(dim);
        let p = 1.0 + pf * (n - 1.0);
        let q = p + qf * (n * p / (n - p) - p);
        let t = ckn_thresholds(p, q, dim).unwrap();
        prop_assert!(t.a1.max(0.0) < t.a2 && t.a2 < 1.0);
        if let Some(a3) = t.a3 { prop_assert!(t.a2 < a3); }
        if let Some(a4) = t.a4 { prop_assert!(t.a2 < a4); }
        prop_assert!(t.a_star > 1.0 - n / p);
    }
}
