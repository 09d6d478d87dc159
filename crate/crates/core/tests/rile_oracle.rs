mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use scale_bench::scales::{manifesto_rile, registry, rile_class, rile_score, stance_bin, LabelSource};
use scale_bench::{RileClass, RileTally, StanceBin};

fn exact(t: &RileTally) -> BigRational {
    BigRational::new(
        BigInt::from(t.right) - BigInt::from(t.left),
        BigInt::from(t.right + t.left + t.other),
    )
}

fn dist(a: f64, q: &BigRational) -> BigRational {
    let a = BigRational::from_float(a).unwrap();
    let d = a - q;
    if d < BigRational::from_integer(0.into()) {
        -d
    } else {
        d
    }
}

/// `v` is a nearest double to `q`.
fn correctly_rounded(v: f64, q: &BigRational) -> bool {
    let here = dist(v, q);
    here <= dist(v.next_up(), q) && here <= dist(v.next_down(), q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn f64_score_is_the_correctly_rounded_rational(r in 0u64..1_000_000, l in 0u64..1_000_000, o in 0u64..1_000_000) {
        let t = RileTally::new(r, l, o);
        prop_assume!(t.total() > 0);
        let v = rile_score::<f64>(&t).unwrap().value();
        prop_assert!(correctly_rounded(v, &exact(&t)), "{t:?} -> {v}");
    }

    #[test]
    fn f32_score_is_close_to_the_rational(r in 0u64..10_000, l in 0u64..10_000, o in 0u64..10_000) {
        let t = RileTally::new(r, l, o);
        prop_assume!(t.total() > 0);
        let v = rile_score::<f32>(&t).unwrap().value() as f64;
        let q = exact(&t);
        let err = dist(v, &q);
        prop_assert!(err <= BigRational::new(1.into(), BigInt::from(1u64 << 23)));
    }

    #[test]
    fn manifesto_rile_matches_a_recount(picks in prop::collection::vec(0usize..143, 1..300)) {
        let codes: Vec<&str> = picks.iter().map(|&i| registry::CATEGORIES[i].code).collect();
        let m = common::manifesto("m", "X", 2000, &codes);
        let (mut r, mut l) = (0i64, 0i64);
        for c in &codes {
            let major = c.split('.').next().unwrap();
            if registry::RILE_RIGHT.contains(&major) { r += 1; }
            if registry::RILE_LEFT.contains(&major) { l += 1; }
        }
        let expected = BigRational::new(BigInt::from(r - l), BigInt::from(codes.len()));
        let got = manifesto_rile::<f64>(&m, LabelSource::Gold).unwrap().value();
        prop_assert!(correctly_rounded(got, &expected));
        for s in &m.statements {
            let class = rile_class(&s.code);
            let major = s.code.major();
            prop_assert_eq!(class == RileClass::Right, registry::RILE_RIGHT.contains(&major.as_str()));
        }
    }

    #[test]
    fn stance_bins_follow_half_open_intervals(v in -1.0f64..=1.0) {
        let b = stance_bin(v).unwrap();
        let expected = if v < -0.6 {
            StanceBin::HardLeft
        } else if v < -0.2 {
            StanceBin::CentreLeft
        } else if v < 0.2 {
            StanceBin::Centrist
        } else if v < 0.6 {
            StanceBin::CentreRight
        } else {
            StanceBin::HardRight
        };
        prop_assert_eq!(b, expected);
    }
}

#[test]
fn spec_examples() {
    let v = |r, l, o| rile_score::<f64>(&RileTally::new(r, l, o)).unwrap().value();
    assert_eq!(v(30, 10, 60), 0.2);
    assert_eq!(v(0, 5, 0), -1.0);
    assert_eq!(v(4, 4, 2), 0.0);
    assert!(rile_score::<f64>(&RileTally::new(0, 0, 0)).is_err());
}

#[test]
fn boundary_values() {
    let cases = [
        (-1.0, StanceBin::HardLeft),
        (-0.6, StanceBin::CentreLeft),
        (-0.2, StanceBin::Centrist),
        (0.0, StanceBin::Centrist),
        (0.2, StanceBin::CentreRight),
        (0.6, StanceBin::HardRight),
        (1.0, StanceBin::HardRight),
    ];
    for (v, b) in cases {
        assert_eq!(stance_bin(v).unwrap(), b, "{v}");
    }
    assert!(stance_bin(1.0000001).is_err());
    assert!(stance_bin(f64::NAN).is_err());
}
