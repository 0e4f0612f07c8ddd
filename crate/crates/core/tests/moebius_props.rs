use num_bigint::BigInt;
use num_rational::BigRational;
use pgrowth::moebius::{ccw, Arc, ArcSet, GroupElement, Orientation, ProjPoint};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = ProjPoint> {
    prop_oneof![
        1 => Just(ProjPoint::Infinity),
        12 => (-12i64..=12, 1i64..=4).prop_map(|(p, q)| ProjPoint::ratio(p, q)),
    ]
}

fn element() -> impl Strategy<Value = GroupElement> {
    (-5i64..=5, -5i64..=5, -5i64..=5, -5i64..=5)
        .prop_filter_map("positive determinant", |(a, b, c, d)| GroupElement::new(a, b, c, d).ok())
}

fn arc_set() -> impl Strategy<Value = ArcSet> {
    prop_oneof![
        1 => Just(ArcSet::full()),
        1 => Just(ArcSet::empty()),
        8 => proptest::collection::vec((point(), point()), 1..4).prop_map(|pairs| {
            ArcSet::from_arcs(pairs.into_iter().map(|(a, b)| {
                if a == b { Arc::punctured(a) } else { Arc::new(a, b).unwrap() }
            }))
        }),
    ]
}

/// Probe points that separate every cell of the common refinement of
/// `sets`: the breakpoints, points a hair to either side, gap midpoints,
/// points past the extremes and infinity.
fn probes(sets: &[&ArcSet]) -> Vec<ProjPoint> {
    let mut finite: Vec<BigRational> = sets
        .iter()
        .flat_map(|s| s.boundary())
        .filter_map(|p| p.as_rational().cloned())
        .collect();
    finite.sort();
    finite.dedup();
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let mut out = vec![ProjPoint::Infinity, ProjPoint::zero()];
    let (lo, hi) = match (finite.first(), finite.last()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => (BigRational::from_integer(0.into()), BigRational::from_integer(0.into())),
    };
    out.push(ProjPoint::Finite(lo - BigRational::from_integer(1000.into())));
    out.push(ProjPoint::Finite(hi + BigRational::from_integer(1000.into())));
    for w in finite.windows(2) {
        out.push(ProjPoint::Finite((&w[0] + &w[1]) / BigRational::from_integer(2.into())));
    }
    for r in finite {
        out.push(ProjPoint::Finite(&r - &eps));
        out.push(ProjPoint::Finite(&r + &eps));
        out.push(ProjPoint::Finite(r));
    }
    out
}

fn near(s: &ArcSet, p: &ProjPoint) -> bool {
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    match p {
        ProjPoint::Finite(r) => {
            s.contains(&ProjPoint::Finite(r - &eps)) || s.contains(&ProjPoint::Finite(r + &eps))
        }
        ProjPoint::Infinity => {
            let big = BigRational::from_integer(1_000_000.into());
            s.contains(&ProjPoint::Finite(big.clone())) || s.contains(&ProjPoint::Finite(-big))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn action_is_a_left_action(g in element(), h in element(), p in point()) {
        prop_assert_eq!(g.compose(&h).act(&p), g.act(&h.act(&p)));
        prop_assert_eq!(g.invert().act(&g.act(&p)), p);
        prop_assert!(g.compose(&g.invert()).is_identity());
    }

    #[test]
    fn composition_is_associative(f in element(), g in element(), h in element()) {
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
    }

    #[test]
    fn canonical_form_ignores_scaling(g in element(), k in 2i64..6) {
        let [a, b, c, d] = g.entries().clone();
        let scaled = GroupElement::new(a * k, b * k, c * k, d * k).unwrap();
        prop_assert_eq!(&scaled, &g);
        let text = g.to_string();
        prop_assert_eq!(text.parse::<GroupElement>().unwrap(), g);
    }

    #[test]
    fn orientation_is_preserved(g in element(), p in point(), q in point(), r in point()) {
        prop_assert_eq!(ccw(&g.act(&p), &g.act(&q), &g.act(&r)), ccw(&p, &q, &r));
        prop_assert_eq!(ccw(&q, &p, &r), ccw(&p, &q, &r).reversed());
        if ccw(&p, &q, &r) != Orientation::Degenerate {
            prop_assert_eq!(ccw(&q, &r, &p), ccw(&p, &q, &r));
        }
    }

    #[test]
    fn set_operations_match_membership(s in arc_set(), t in arc_set()) {
        let union = s.union(&t);
        let inter = s.intersect(&t);
        let diff = s.difference(&t);
        for p in probes(&[&s, &t]) {
            let (a, b) = (s.contains(&p), t.contains(&p));
            prop_assert_eq!(union.contains(&p), a || b, "union at {}", p);
            prop_assert_eq!(inter.contains(&p), a && b, "intersection at {}", p);
            prop_assert_eq!(diff.contains(&p), a && !t.closure_contains(&p), "difference at {}", p);
        }
    }

    #[test]
    fn coverage_matches_membership(s in arc_set(), t in arc_set()) {
        let pts = probes(&[&s, &t]);
        let oracle = pts.iter().all(|p| !t.contains(p) || s.contains(p));
        prop_assert_eq!(s.covers(&t), oracle);
        let closure_oracle = pts
            .iter()
            .all(|p| !(t.contains(p) || near(&t, p)) || s.contains(p));
        prop_assert_eq!(s.covers_closure(&t), closure_oracle);
        if let Some(cell) = s.first_uncovered(&t, false) {
            prop_assert!(t.contains(cell.probe()) && !s.contains(cell.probe()));
        }
    }

    #[test]
    fn images_transport_membership(s in arc_set(), g in element()) {
        let image = s.image(&g);
        let pre = s.preimage(&g);
        for p in probes(&[&s, &pre]) {
            prop_assert_eq!(image.contains(&g.act(&p)), s.contains(&p));
            prop_assert_eq!(pre.contains(&p), s.contains(&g.act(&p)));
        }
    }

    #[test]
    fn complement_partitions_the_circle(s in arc_set()) {
        let c = s.complement();
        for p in probes(&[&s]) {
            let outside = c.interior.contains(&p) || c.points.contains(&p);
            prop_assert_eq!(outside, !s.contains(&p));
        }
    }

    #[test]
    fn closures_disjoint_matches_probes(s in arc_set(), t in arc_set()) {
        let meet = probes(&[&s, &t])
            .iter()
            .any(|p| s.closure_contains(p) && t.closure_contains(p));
        prop_assert_eq!(s.closures_disjoint(&t), !meet);
    }

    #[test]
    fn serde_round_trip(s in arc_set()) {
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<ArcSet>(&json).unwrap(), s);
    }
}
