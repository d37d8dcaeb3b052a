//! Property tests of the public building blocks.

use ibt_core::factor::Pos;
use ibt_core::limits::Norming;
use ibt_core::parallel::chunks;
use ibt_core::stats::empirical_cf;
use ibt_core::{make_beta_icf, IbtError, IbtMap, SquarePoint, StableParams};
use proptest::prelude::*;

proptest! {
    #[test]
    fn stable_cf_is_a_characteristic_function(p in 1.05f64..=2.0, a in 0.01f64..5.0, b in -1.0f64..=1.0, t in -10.0f64..10.0) {
        let sp = StableParams::new(p, a, b).unwrap();
        let z = sp.char_fn(t);
        prop_assert!(z.norm() <= 1.0 + 1e-15);
        let w = sp.char_fn(-t);
        prop_assert!((z - w.conj()).norm() < 1e-14);
        prop_assert_eq!(sp.char_fn(0.0).re, 1.0);
    }

    #[test]
    fn stable_params_reject_out_of_range(p in 0.0f64..1.0, b in 1.01f64..3.0) {
        prop_assert!(StableParams::new(p, 1.0, 0.0).is_err());
        prop_assert!(StableParams::new(1.5, 1.0, b).is_err());
        prop_assert!(StableParams::new(1.5, -b, 0.0).is_err());
    }

    #[test]
    fn chunks_tile_the_range(n in 0usize..5000, size in 1usize..700) {
        let c = chunks(n, size);
        let mut next = 0;
        for &(start, len) in &c {
            prop_assert_eq!(start, next);
            prop_assert!(len >= 1 && len <= size);
            next += len;
        }
        prop_assert_eq!(next, n);
    }

    #[test]
    fn pos_round_trips(x in 0.0f64..=1.0) {
        let p = Pos::from_x(x);
        prop_assert_eq!(p.x(), x);
        prop_assert!(p.offset() <= 0.5);
    }

    #[test]
    fn norming_increases(n in 3usize..1_000_000, e in 0.5f64..0.9) {
        for norm in [Norming::Sqrt, Norming::SqrtNLogN, Norming::Power { exponent: e }] {
            prop_assert!(norm.factor(n + 1) > norm.factor(n));
        }
    }

    #[test]
    fn symmetric_samples_have_real_cf(xs in proptest::collection::vec(-50.0f64..50.0, 1..40), t in -3.0f64..3.0) {
        let sym: Vec<f64> = xs.iter().flat_map(|&x| [x, -x]).collect();
        let z = empirical_cf(&sym, &[t])[0];
        prop_assert!(z.im.abs() < 1e-12);
        prop_assert!(z.norm() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn baker_map_stays_in_the_square(a0 in 0.3f64..3.0, a1 in 0.3f64..3.0, x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let m = IbtMap::new(&make_beta_icf(a0, a1).unwrap()).unwrap();
        match m.step(SquarePoint::new(x, y).unwrap()) {
            Ok(q) => prop_assert!((0.0..=1.0).contains(&q.x) && (0.0..=1.0).contains(&q.y)),
            Err(IbtError::NearCut { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
