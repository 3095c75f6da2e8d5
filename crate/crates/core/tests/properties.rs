mod common;

use common::*;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

use spreadlab_core::discrepancy::DiMethod;
use spreadlab_core::exact::{integer, rational};
use spreadlab_core::io::{from_json, instance_doc, to_json, InstanceDoc};
use spreadlab_core::laczkovich::{build_ab, claim_check, random_cube_union, random_test_set, IntBox, TestSet};
use spreadlab_core::measure::scale_measure;
use spreadlab_core::{
    bottleneck_distance, discrepancy_distance, discrepancy_distance_with, feasible_coupling,
    verify_coupling, AtomicMeasure, Certificate, DomainKind, Grid, GridMeasure, Mollifier, Relation,
};

fn kind(torus: bool) -> DomainKind {
    if torus {
        DomainKind::Torus
    } else {
        DomainKind::Box
    }
}

fn pair(seed: u64, dim: usize, n: usize, torus: bool) -> (AtomicMeasure, AtomicMeasure) {
    let mut r = rng(seed);
    let d = domain(dim, kind(torus), 2);
    (random_unit_measure(&d, n, &mut r), random_unit_measure(&d, n, &mut r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tra_is_symmetric(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=7, torus in any::<bool>()) {
        let (a, b) = pair(seed, dim, n, torus);
        prop_assert_eq!(bottleneck_distance(&a, &b).unwrap().value, bottleneck_distance(&b, &a).unwrap().value);
    }

    #[test]
    fn tra_satisfies_triangle_inequality(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=6) {
        let mut r = rng(seed);
        let d = torus(dim, 2);
        let (a, b, c) = (
            random_unit_measure(&d, n, &mut r),
            random_unit_measure(&d, n, &mut r),
            random_unit_measure(&d, n, &mut r),
        );
        let ab = bottleneck_distance(&a, &b).unwrap().value.value();
        let bc = bottleneck_distance(&b, &c).unwrap().value.value();
        let ac = bottleneck_distance(&a, &c).unwrap().value.value();
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn tra_commutes_with_scaling(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=6, p in 1i64..=5, q in 1i64..=5) {
        let (a, b) = pair(seed, dim, n, true);
        let t = rational(p, q);
        let scaled = bottleneck_distance(&a.scaled(&t).unwrap(), &b.scaled(&t).unwrap()).unwrap().value;
        prop_assert_eq!(scaled, bottleneck_distance(&a, &b).unwrap().value.scaled(&t));
    }

    #[test]
    fn flow_values_match_oracles(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=6, torus in any::<bool>()) {
        let (a, b) = pair(seed, dim, n, torus);
        let tra = bottleneck_distance(&a, &b).unwrap();
        prop_assert_eq!(tra.value.squared(), &permutation_oracle(&a, &b));
        for method in [DiMethod::Enumeration, DiMethod::Cut] {
            let di = discrepancy_distance_with(&a, &b, method).unwrap();
            prop_assert_eq!(di.value.squared(), &subset_oracle(&a, &b));
        }
    }

    #[test]
    fn weighted_duality_and_certificates(seed in any::<u64>(), dim in 1usize..=2, n1 in 1usize..=6, n2 in 1usize..=6) {
        let mut r = rng(seed);
        let d = torus(dim, 2);
        let total = integer(3);
        let a = random_weighted_measure(&d, n1, &total, &mut r);
        let b = random_weighted_measure(&d, n2, &total, &mut r);
        let tra = bottleneck_distance(&a, &b).unwrap();
        let di = discrepancy_distance(&a, &b).unwrap();
        prop_assert_eq!(&tra.value, &di.value);
        prop_assert_eq!(di.value.squared(), &subset_oracle(&a, &b));
        prop_assert!(verify_coupling(&tra.witness).is_exact());
        if let Some(cert) = &di.certificate_below {
            let relation = Relation::Radius(cert.radius.clone().unwrap());
            prop_assert!(!cert.replay(&a, &b, &relation).unwrap().holds);
        }
    }

    #[test]
    fn probe_returns_exactly_one_certificate(seed in any::<u64>(), n in 1usize..=6, k in 0i64..=16) {
        let (a, b) = pair(seed, 2, n, true);
        let relation = Relation::radius(&rational(k, 8)).unwrap();
        match feasible_coupling(&a, &b, &relation).unwrap() {
            Certificate::Coupling(c) => {
                let report = verify_coupling(&c);
                prop_assert!(report.is_exact());
                prop_assert!(report.support_radius.squared() <= &(rational(k, 8) * rational(k, 8)));
            }
            Certificate::Violating(v) => prop_assert!(!v.replay(&a, &b, &relation).unwrap().holds),
        }
    }

    #[test]
    fn scaling_is_a_group_action(seed in any::<u64>(), dim in 1usize..=3, p in 1i64..=6, q in 1i64..=6, u in 1i64..=6, w in 1i64..=6) {
        let (a, _) = pair(seed, dim, 5, true);
        let (s, t) = (rational(p, q), rational(u, w));
        let twice = scale_measure(&scale_measure(&a, &s).unwrap(), &t).unwrap();
        prop_assert_eq!(twice, scale_measure(&a, &(&s * &t)).unwrap());
    }

    #[test]
    fn mollification_preserves_mass(seed in any::<u64>(), dim in 1usize..=2, power in 1u32..=3, k in 1usize..=6) {
        let mut r = rng(seed);
        let d = torus(dim, 4);
        let nu = random_weighted_measure(&d, 6, &integer(5), &mut r);
        let grid = Grid::cubic(d, 32).unwrap();
        let m = Mollifier::new(k as f64 * 0.25, power).unwrap();
        let smooth = m.apply_atoms(&nu, &grid).unwrap();
        prop_assert!((smooth.total_mass() - 5.0).abs() <= 5.0 * 1e-10);
        let again = m.apply_measure(&GridMeasure::deposit(&nu, &grid).unwrap()).unwrap();
        prop_assert!((again.total_mass() - 5.0).abs() <= 5.0 * 1e-10);
    }

    #[test]
    fn instances_round_trip_through_json(seed in any::<u64>(), dim in 1usize..=3, n in 1usize..=8, torus in any::<bool>()) {
        let mut r = rng(seed);
        let d = domain(dim, kind(torus), 3);
        let nu = random_weighted_measure(&d, n, &rational(7, 3), &mut r);
        let text = to_json(&instance_doc(&nu, None)).unwrap();
        let back = from_json::<InstanceDoc>(&text).unwrap().into_instance().unwrap();
        prop_assert_eq!(back.measure, nu);
    }

    #[test]
    fn claim_holds_on_random_sets(seed in any::<u64>(), dim in 1usize..=3, m in 1u64..=7) {
        let v = random_test_set(dim, m, &mut rng(seed));
        prop_assert!(claim_check(&v, m).unwrap().pass);
    }

    #[test]
    fn boundary_is_subadditive_and_translation_invariant(seed in any::<u64>(), dim in 1usize..=3, shift in prop::collection::vec(-9i64..=9, 3)) {
        let mut r = rng(seed);
        let u = random_cube_union(dim, 2, 8, &mut r).unwrap();
        let v = random_cube_union(dim, 2, 8, &mut r).unwrap();
        prop_assert!(u.union(&v).boundary_area() <= u.boundary_area() + v.boundary_area());
        let moved = u.translated(&shift[..dim]);
        prop_assert_eq!(moved.boundary_area(), u.boundary_area());
        prop_assert_eq!(moved.volume(), u.volume());
    }

    #[test]
    fn build_ab_is_monotone(seed in any::<u64>(), dim in 1usize..=3, m in 1u64..=5) {
        let mut r = rng(seed);
        let small = random_test_set(dim, m, &mut r);
        let extra = TestSet::boxes(dim, vec![{
            let lo: Vec<i64> = (0..dim).map(|_| r.random_range(-10..10)).collect();
            let hi = lo.iter().map(|l| l + r.random_range(0..5)).collect();
            IntBox::new(lo, hi).unwrap()
        }]);
        let large = small.union(&extra);
        let (a1, b1) = build_ab(&small, m).unwrap();
        let (a2, b2) = build_ab(&large, m).unwrap();
        prop_assert!(a1.is_subset(&a2) && b1.is_subset(&b2) && a1.is_subset(&b1));
    }
}

#[test]
fn identical_measures_are_at_distance_zero() {
    let (a, _) = pair(3, 2, 6, true);
    let tra = bottleneck_distance(&a, &a).unwrap();
    assert!(tra.value.is_zero());
    assert!(discrepancy_distance(&a, &a).unwrap().is_zero());
    let _: BigRational = permutation_oracle(&a, &a);
}
