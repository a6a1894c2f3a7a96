use circdiam_core::circuits::predicted_wedge_circuits;
use circdiam_core::constructions::{perturb, wedge};
use circdiam_core::walks::StepError;
use circdiam_core::{
    circuit_distance, emit_hpoly, enumerate_circuits, int, is_circuit, max_step, parse_hpoly, rat,
    validate_walk, Distance, HPolyhedron, RVector, Rational, SearchConfig, WalkMode,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn any_rows() -> impl Strategy<Value = (usize, Vec<(RVector, Rational)>)> {
    (1usize..=4).prop_flat_map(|d| {
        let row = (prop::collection::vec(rational(), d), rational())
            .prop_map(|(a, b)| (RVector::new(a), b));
        (Just(d), prop::collection::vec(row, 1..=8))
    })
}

/// A valid polyhedron in dimension 2 or 3 with the origin in its interior:
/// random integer rows with negative right-hand sides, redundant rows dropped.
fn polyhedron() -> impl Strategy<Value = HPolyhedron> {
    (2usize..=3)
        .prop_flat_map(|d| {
            let row = (prop::collection::vec(-3i64..=3, d), 1i64..=4);
            (Just(d), prop::collection::vec(row, d + 1..=7))
        })
        .prop_filter_map("not a valid polyhedron", |(d, rows)| {
            let rows: Vec<(RVector, Rational)> = rows
                .into_iter()
                .filter(|(a, _)| a.iter().any(|&x| x != 0))
                .map(|(a, b)| (RVector::from_ints(&a), int(-b)))
                .collect();
            let p = HPolyhedron::from_rows(d, rows).ok()?;
            let drop = p.validate().violating_rows();
            let p = if drop.is_empty() {
                p
            } else {
                p.without_rows(&drop).ok()?
            };
            p.validate().is_valid().then_some(p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hpoly_round_trip((d, rows) in any_rows()) {
        let p = HPolyhedron::from_rows(d, rows).unwrap();
        let text = emit_hpoly(&p);
        let q = parse_hpoly(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(emit_hpoly(&q), text);
    }

    #[test]
    fn circuits_are_primitive_canonical_circuits(p in polyhedron()) {
        let cs = enumerate_circuits(&p);
        prop_assert!(cs.windows(2).all(|w| w[0] < w[1]));
        for c in &cs {
            let g = c.direction();
            prop_assert!(is_circuit(&p, g).unwrap());
            prop_assert!(g.iter().all(|x| x.is_integer()));
            prop_assert!(g.iter().find(|x| !x.is_zero()).unwrap().is_positive());
        }
    }

    #[test]
    fn vertices_are_feasible_with_full_rank(p in polyhedron()) {
        for v in p.vertices() {
            prop_assert!(p.is_feasible(&v.point).unwrap());
            prop_assert_eq!(p.active_rank(&v.point).unwrap(), p.dim());
            prop_assert_eq!(p.active_set(&v.point).unwrap(), v.active.clone());
        }
    }

    #[test]
    fn maximal_steps_stop_at_the_boundary(p in polyhedron()) {
        let overshoot = Rational::one() + rat(1, 1000);
        for v in p.vertices() {
            for c in p.circuits() {
                for g in c.signed() {
                    match max_step(&p, &v.point, &g).unwrap() {
                        Ok((y, alpha)) => {
                            prop_assert!(alpha.is_positive());
                            prop_assert!(p.is_feasible(&y).unwrap());
                            let beyond = v.point.add_scaled(&(&alpha * &overshoot), &g);
                            prop_assert!(!p.is_feasible(&beyond).unwrap());
                        }
                        Err(StepError::UnboundedDirection) => {
                            prop_assert!(p.a().rows().iter().all(|a| !a.dot(&g).is_negative()));
                        }
                        Err(StepError::BlockedDirection) => {}
                    }
                }
            }
        }
    }

    /// Stepping back along `-g` from a landing point returns to the start.
    #[test]
    fn maximal_steps_reverse(p in polyhedron()) {
        for v in p.vertices() {
            for c in p.circuits() {
                for g in c.signed() {
                    let Ok((y, _)) = max_step(&p, &v.point, &g).unwrap() else { continue };
                    let leaves = v.active.iter().any(|&i| p.row(i).dot(&g).is_positive());
                    if leaves {
                        let (back, _) = max_step(&p, &y, &g.neg()).unwrap().unwrap();
                        prop_assert_eq!(back, v.point.clone());
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_keeps_circuits(p in polyhedron(), seed in 0u64..1000) {
        let eps = rat(1, 64);
        let q = perturb(&p, &eps, seed).unwrap();
        prop_assert_eq!(enumerate_circuits(&q), enumerate_circuits(&p));
        prop_assert!(q.validate().is_valid());
        for i in 0..p.num_rows() {
            prop_assert!((q.rhs(i) - p.rhs(i)).abs() < eps);
        }
    }

    #[test]
    fn wedge_circuits_are_predicted(p in polyhedron(), k in 0usize..8, s in 1i64..=5, t in 1i64..=5) {
        let k = k % p.num_rows();
        let slope = rat(s, t);
        let w = wedge(&p, k, &slope).unwrap();
        prop_assert_eq!(enumerate_circuits(&w.poly), predicted_wedge_circuits(&p, k, &slope).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circuit_distance_is_at_most_edge_distance(p in polyhedron(), a in 0usize..64, b in 0usize..64) {
        let n = p.vertices().len();
        let (a, b) = (a % n, b % n);
        let de = p.combinatorial_distance(a, b).unwrap();
        let cfg = SearchConfig::with_depth(de.max(1));
        let r = circuit_distance(&p, &p.vertices()[a].point, &p.vertices()[b].point, &cfg).unwrap();
        let dc = r.distance.exact().unwrap();
        prop_assert!(dc <= de);
        prop_assert_eq!(r.distance, Distance::Exact(dc));
        let walk = r.walk.unwrap();
        prop_assert_eq!(walk.len(), dc);
        if dc > 0 {
            let again = validate_walk(&p, &walk.points, WalkMode::Maximal).unwrap();
            prop_assert_eq!(again, walk);
        }
    }
}
