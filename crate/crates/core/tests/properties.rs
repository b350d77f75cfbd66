//! Property-based invariants: gauge axioms on random bodies and vectors,
//! translation invariance of the exact solver, format round-trips.

mod common;

use latcover_core::boost::normalize_instance;
use latcover_core::boost::CvpInstance;
use latcover_core::io::{instance_from_json, instance_to_json, norm_from_json, norm_to_json};
use latcover_core::lattice::{exact_cvp, Lattice, TargetPoint};
use latcover_core::linalg::{add, norm2, scale};
use latcover_core::norms::NormBody;
use latcover_core::{Rat, Real};
use proptest::prelude::*;

fn arb_lp_body(n: usize) -> impl Strategy<Value = NormBody> {
    (1.0f64..4.0).prop_map(move |p| NormBody::lp(n, p).unwrap())
}

fn arb_vec(n: usize) -> impl Strategy<Value = Vec<Real>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_a_norm_on_samples(body in arb_lp_body(3), x in arb_vec(3), y in arb_vec(3), lam in -3.0f64..3.0) {
        let gx = body.gauge(&x).unwrap();
        let gy = body.gauge(&y).unwrap();
        // homogeneity
        let gs = body.gauge(&scale(&x, lam)).unwrap();
        prop_assert!((gs - lam.abs() * gx).abs() <= 1e-9 * (1.0 + gs));
        // symmetry
        let gn = body.gauge(&scale(&x, -1.0)).unwrap();
        prop_assert!((gn - gx).abs() <= 1e-9 * (1.0 + gx));
        // subadditivity
        let gsum = body.gauge(&add(&x, &y)).unwrap();
        prop_assert!(gsum <= gx + gy + 1e-9);
        // sandwich consistency
        let (r, big_r) = body.sandwich().unwrap();
        prop_assert!(gx <= norm2(&x) / r + 1e-9);
        prop_assert!(gx >= norm2(&x) / big_r - 1e-9);
    }

    #[test]
    fn exact_cvp_translation_invariant(
        seed in 0u64..1000,
        p in prop::sample::select(vec![1.0f64, 2.0, 3.0]),
        w in prop::collection::vec(-3i64..=3, 2),
    ) {
        let mut rng = latcover_core::rng::SplitMix64::new(seed);
        let lattice = common::random_lattice(&mut rng, 2, 5);
        let target = common::random_target(&mut rng, 2, 2);
        let norm = NormBody::lp(2, p).unwrap();
        let d1 = exact_cvp(&lattice, &target, &norm).unwrap().distance;
        let shift = lattice.vector_int(&w);
        let shifted = TargetPoint::new(
            target.coords.iter().zip(&shift).map(|(t, s)| t + Rat::from_integer(s.clone())).collect(),
        );
        let d2 = exact_cvp(&lattice, &shifted, &norm).unwrap().distance;
        prop_assert!((d1 - d2).abs() <= 1e-7 * (1.0 + d1));
    }

    #[test]
    fn norm_descriptor_roundtrip(body in arb_lp_body(3), x in arb_vec(3)) {
        let j = norm_to_json(&body).unwrap();
        let back = norm_from_json(&j).unwrap();
        prop_assert_eq!(body.gauge(&x).unwrap().to_bits(), back.gauge(&x).unwrap().to_bits());
    }

    #[test]
    fn instance_roundtrip_preserves_solutions(seed in 0u64..500) {
        let mut rng = latcover_core::rng::SplitMix64::new(seed);
        let inst = CvpInstance {
            lattice: common::random_lattice(&mut rng, 2, 4),
            target: common::random_target(&mut rng, 2, 2),
            norm: NormBody::lp(2, 2.0).unwrap(),
            epsilon: 0.25,
        };
        let j = instance_to_json(&inst, None).unwrap();
        let back = instance_from_json(&j).unwrap();
        let a = exact_cvp(&inst.lattice, &inst.target, &inst.norm).unwrap();
        let b = exact_cvp(&back.lattice, &back.target, &back.norm).unwrap();
        prop_assert_eq!(a.coeffs, b.coeffs);
        prop_assert_eq!(a.distance.to_bits(), b.distance.to_bits());
    }

    #[test]
    fn normalization_preserves_the_argmin(seed in 0u64..300) {
        let mut rng = latcover_core::rng::SplitMix64::new(seed);
        let inst = CvpInstance {
            lattice: common::random_lattice(&mut rng, 2, 4),
            target: common::random_target(&mut rng, 2, 2),
            norm: NormBody::lp(2, 1.5).unwrap(),
            epsilon: 0.25,
        };
        let ni = normalize_instance(&inst, 1.0).unwrap();
        let orig = exact_cvp(&inst.lattice, &inst.target, &inst.norm).unwrap();
        let norm_side = exact_cvp(&ni.lattice, &TargetPoint::new(ni.target.clone()), &ni.norm).unwrap();
        prop_assert_eq!(&orig.coeffs, &norm_side.coeffs);
        // distances scale by unit_scale
        prop_assert!((norm_side.distance - orig.distance * ni.unit_scale).abs() <= 1e-6 * (1.0 + norm_side.distance));
    }
}
