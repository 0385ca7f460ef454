use cocycle_lab::entropy::*;
use cocycle_lab::fixtures;
use cocycle_lab::measures::MarkovMeasure;
use cocycle_lab::shadowing::{random_pseudo_orbit, shadow, verify_shadowing, PseudoOrbit, ShadowingParams};
use cocycle_lab::shift_space::{bowen_distance, distance, ShiftSpace, SymbolPoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

fn point() -> impl Strategy<Value = SymbolPoint> {
    (word(0..4), word(1..6), -5i64..5, word(1..4)).prop_map(|(l, c, k, r)| {
        let l = if l.is_empty() { vec![0] } else { l };
        SymbolPoint::eventually_periodic(l, c, k, r).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(p in point()) {
        let back = SymbolPoint::parse(&p.to_text().unwrap()).unwrap();
        prop_assert_eq!(back.window(-30, 30), p.window(-30, 30));
    }

    #[test]
    fn metric_is_an_ultrametric(x in point(), y in point(), z in point()) {
        let d = |a: &SymbolPoint, b: &SymbolPoint| distance(a, b, 40).value;
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y).max(d(&y, &z)));
    }

    #[test]
    fn bowen_distance_grows_with_n(x in point(), y in point(), n in 1usize..20) {
        let a = bowen_distance(&x, &y, n, 40).value;
        let b = bowen_distance(&x, &y, n + 1, 40).value;
        prop_assert!(a <= b);
        prop_assert!(distance(&x.shifted(n as i64), &y.shifted(n as i64), 40).value <= b);
    }

    #[test]
    fn cylinder_weights_are_consistent(p0 in 0.01f64..0.99, p1 in 0.01f64..0.99, w in word(1..8)) {
        let mu = MarkovMeasure::new(2, vec![p0, 1.0 - p0, p1, 1.0 - p1], None).unwrap();
        let parent = mu.cylinder_weight(&w);
        let kids: f64 = (0..2u8).map(|s| { let mut v = w.clone(); v.push(s); mu.cylinder_weight(&v) }).sum();
        prop_assert!((parent - kids).abs() < 1e-12);
        let left: f64 = (0..2u8).map(|s| { let mut v = vec![s]; v.extend(&w); mu.cylinder_weight(&v) }).sum();
        prop_assert!((parent - left).abs() < 1e-12);
    }

    #[test]
    fn log_norm_is_subadditive(x in point(), m in 1usize..15, n in 1usize..15) {
        let c = fixtures::triangular_cocycle();
        let whole = (m + n) as f64 * c.finite_time_mle(&x, m + n).unwrap();
        let head = n as f64 * c.finite_time_mle(&x, n).unwrap();
        let tail = m as f64 * c.finite_time_mle(&x.shifted(n as i64), m).unwrap();
        prop_assert!(whole <= head + tail + 1e-9);
    }

    #[test]
    fn pseudo_orbits_are_shadowed(seed in any::<u64>(), w in 1usize..4, count in 1usize..5, golden in any::<bool>()) {
        let space = if golden { ShiftSpace::golden_mean() } else { ShiftSpace::full(2) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let po = random_pseudo_orbit(&space, count, 1..=10, w, &mut rng).unwrap();
        let z = shadow(&po, &space).unwrap();
        let rep = verify_shadowing(&z, &po, ShadowingParams::canonical()).unwrap();
        prop_assert!(rep.passes, "margin {}", rep.worst_margin);
        let back = PseudoOrbit::from_json(&po.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.total_length(), po.total_length());
    }

    #[test]
    fn counts_are_monotone(pts in prop::collection::vec(point(), 1..12), n in 1usize..10) {
        let fam = PointFamily::Points(pts);
        let coarse = separated_count(&fam, n, 0.5).unwrap();
        let fine = separated_count(&fam, n, 0.25).unwrap();
        let longer = separated_count(&fam, n + 1, 0.5).unwrap();
        prop_assert!(coarse <= fine && coarse <= longer);
        let r = spanning_count(&fam, n, 0.5).unwrap();
        prop_assert!(r <= coarse && coarse <= spanning_count(&fam, n, 0.25).unwrap());
    }

    #[test]
    fn estimates_are_ordered(pts in prop::collection::vec(point(), 1..16), horizon in 6usize..16) {
        let fam = PointFamily::Points(pts);
        let rep = entropy_suite(&fam, 0.5, horizon).unwrap();
        prop_assert!(rep.holds, "{:?}", rep.checks);
    }

    #[test]
    fn periodic_orbits_have_small_entropy(w in word(1..6)) {
        let fam = PointFamily::periodic_orbit(&w).unwrap();
        let top = topological_entropy(&fam, 24, 0.5).unwrap();
        prop_assert!(top.value.abs() < 0.1);
        let rep = entropy_suite(&fam, 0.5, 24).unwrap();
        prop_assert!(rep.invariant && rep.holds, "{:?}", rep.checks);
    }
}
