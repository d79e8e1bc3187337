mod common;

use isoweight::geometry::StarShape;
use isoweight::rearrange::{hardy_littlewood_check, lower_weight_comparison, schwarz_symmetrize};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetrization_commutes_with_monotone_maps(seed in any::<u64>(), l in -1.5f64..2.0, three in any::<bool>()) {
        let dim = if three { 3 } else { 2 };
        let mut rng = common::rng(seed);
        let f = common::random_function(&mut rng, dim, 31, 24);
        let squared_first = schwarz_symmetrize(&f.map(|v| v * v).unwrap(), l).unwrap();
        let squared_after = schwarz_symmetrize(&f, l).unwrap().map(|v| v * v);
        for t in [0.01, 0.1, 0.3, 0.6] {
            let a = squared_first.distribution(t);
            let b = squared_after.distribution(t);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn hardy_littlewood(seed in any::<u64>(), l in -1.5f64..2.0, three in any::<bool>()) {
        let dim = if three { 3 } else { 2 };
        let mut rng = common::rng(seed);
        let u = common::random_function(&mut rng, dim, 21, 16);
        let v = common::random_function(&mut rng, dim, 21, 16);
        let c = hardy_littlewood_check(&u, &v, l).unwrap();
        prop_assert!(c.lhs <= c.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn lower_weight_volume_grows_under_symmetrization(seed in any::<u64>(), l in -0.5f64..3.0, gap in 0.1f64..1.4) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 2, 256, 0.2);
        let c = lower_weight_comparison(&shape, l, l - gap).unwrap();
        prop_assert!(c.lhs <= c.rhs * (1.0 + 1e-12));
    }
}

#[test]
fn centered_ball_is_the_equality_case() {
    let ball = StarShape::ball(2, 1.7).unwrap();
    let c = lower_weight_comparison(&ball, 1.0, -0.5).unwrap();
    assert!((c.lhs - c.rhs).abs() <= 1e-12 * c.rhs);
}
