use cocycle_lab::fixtures;
use cocycle_lab::lyapunov_metric::{k_epsilon, GlobalSplitting, LyapunovNormContext};
use cocycle_lab::measures::*;
use cocycle_lab::shift_space::ShiftSpace;

#[test]
fn typical_points_keep_returning() {
    let mu = fixtures::bernoulli(0.5);
    let spec = RecurrenceSetSpec { partition: CylinderPartition::new(0, 0), gamma: Gamma::Whole, s: 50, rho: 0.5 };
    let members = (0..200u64)
        .filter(|&seed| recurrence_membership(&spec, &mu.sample_point(10_010, seed), 10_000).unwrap().is_member())
        .count();
    assert!(members >= 190, "{members}/200");
}

#[test]
fn separated_set_inside_a_regular_set() {
    let p0 = 0.1;
    let mu = fixtures::bernoulli(p0);
    let split = GlobalSplitting::diagonal(fixtures::test_cocycle_exponent(p0)).unwrap();
    let ctx = LyapunovNormContext::new(0.1);
    let level = 40.0;
    let regular = {
        let (split, ctx) = (split.clone(), ctx.clone());
        move |x: &cocycle_lab::shift_space::SymbolPoint| {
            Ok(k_epsilon(&ctx, &split, &fixtures::test_cocycle(), x)? <= level)
        }
    };
    let gamma = Gamma::predicate("K <= 40", regular);
    let params = SeparatedSetParams::new(1.0, 0.1, 0.5, 10, 64, 3);
    let e = katok_separated_sets(&ShiftSpace::full(2), &mu, &gamma, &params).unwrap();
    assert!(!e.points.is_empty());
    for x in &e.points {
        assert!(k_epsilon(&ctx, &split, &fixtures::test_cocycle(), x).unwrap() <= level);
    }
    assert!(e.certificate.returns_to_gamma && e.certificate.separated);
}
