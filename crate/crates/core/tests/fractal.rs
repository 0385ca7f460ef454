use cocycle_lab::entropy::{bowen_hausdorff_estimate, PointFamily};
use cocycle_lab::fixtures;
use cocycle_lab::fractal::*;

const BALL: f64 = 0.125;

fn light_delta(depth: usize) -> FractalScheme {
    let p = choose_parameters(
        &fixtures::test_cocycle(),
        &fixtures::full_shift(),
        &fixtures::delta(1),
        &fixtures::delta(0),
        0.01,
        None,
        &ParamConfig::default(),
    )
    .unwrap();
    build_scheme(&fixtures::full_shift(), &p, &BuildConfig::light(depth, 4)).unwrap()
}

#[test]
fn tiny_scheme_shape() {
    let s = fixtures::tiny_scheme();
    assert_eq!(s.checkpoints, vec![9, 26]);
    assert_eq!(s.point_count(2), Some(64));
    assert!(s.counts_hold());
    assert!(s.block_sets.iter().all(|b| b.certificate.passes()));
    let e = enumerate_points(&s, 2, 4, 1 << 20).unwrap();
    assert_eq!(e.len(), 64);
}

#[test]
fn light_delta_scheme_diverges() {
    let s = light_delta(4);
    let z = construct_point(&s, &vec![vec![0]; 4]).unwrap();
    let d = divergence_checkpoints(&fixtures::test_cocycle(), &z, &s, 4).unwrap();
    assert_eq!(d.verdict, Irregularity::MlIrregular);
    assert!(d.checks.iter().all(|c| c.holds));
    assert!((d.report.values[0] - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn one_checkpoint_is_undetermined() {
    let s = light_delta(3);
    let z = construct_point(&s, &vec![vec![0]; 3]).unwrap();
    let d = divergence_checkpoints(&fixtures::test_cocycle(), &z, &s, 1).unwrap();
    assert_eq!(d.verdict, Irregularity::Undetermined);
    assert!(d.gap().is_none());
}

#[test]
fn equal_measures_are_not_irregular() {
    let mu = fixtures::delta(1);
    let cfg = ParamConfig { force: true, epsilon: Some(0.01), ..ParamConfig::default() };
    let p = choose_parameters(&fixtures::test_cocycle(), &fixtures::full_shift(), &mu, &mu, 0.01, None, &cfg).unwrap();
    let s = build_scheme(&fixtures::full_shift(), &p, &BuildConfig::light(4, 4)).unwrap();
    let z = construct_point(&s, &vec![vec![0]; 4]).unwrap();
    let d = divergence_checkpoints(&fixtures::test_cocycle(), &z, &s, 4).unwrap();
    assert_eq!(d.verdict, Irregularity::NotIrregular);
}

#[test]
fn ball_at_checkpoint_has_point_mass() {
    let s = fixtures::tiny_scheme();
    let e = enumerate_points(&s, 2, 4, 1 << 20).unwrap();
    let q = &e.points[5];
    // At n = t_1 with radius 1/2 the ball pins exactly the level-1 choice.
    let b = omega_ball_bound_on(&s, &e, 1, q, s.t(1), 0.5).unwrap();
    assert_eq!(b.j, 0);
    let want = 1.0 / s.point_count(1).unwrap() as f64;
    assert!((b.mass - want).abs() < 1e-12 && (b.level_bound - want).abs() < 1e-12);
    assert!(b.holds);
}

#[test]
fn ball_away_from_the_support_is_empty() {
    let s = fixtures::tiny_scheme();
    let e = enumerate_points(&s, 2, 4, 1 << 20).unwrap();
    let far = cocycle_lab::shift_space::SymbolPoint::periodic(&[0, 1]).unwrap();
    // Blocks are Katok blocks of the near-constant measures; 0101… is none of them.
    assert!(!e.windows.iter().any(|w| w[4..16] == far.window(0, 11)[..]));
    let b = omega_ball_bound_on(&s, &e, 1, &far, 12, BALL).unwrap();
    assert_eq!(b.mass, 0.0);
    assert!(b.holds);
}

#[test]
fn bridge_zone_uses_last_slot() {
    let s = fixtures::tiny_scheme();
    let e = enumerate_points(&s, 2, 4, 1 << 20).unwrap();
    let n = s.t(2) - 1;
    let b = omega_ball_bound_on(&s, &e, 1, &e.points[0], n, BALL).unwrap();
    assert!(b.bridge_zone);
    assert_eq!(b.j, s.level(2).repeats - 1);
    assert!(b.holds);
}

#[test]
fn tiny_scheme_certificates() {
    let s = fixtures::tiny_scheme();
    let gamma = s.params.gamma;
    let edp = edp_lower_bound(&s, gamma, BALL, 2, 1, 1 << 20).unwrap();
    assert_eq!(edp.status, CertificateStatus::Certified, "{:?}", edp.status);
    assert_eq!(edp.violations, 0);
    assert!((edp.s - (s.params.h_star - 5.0 * gamma)).abs() < 1e-15);
    let pk = packing_lower_bound(&s, gamma, BALL, 2, 1 << 20).unwrap();
    assert_eq!(pk.status, CertificateStatus::Certified);
    assert!(pk.value().unwrap() >= edp.value().unwrap());

    let e = enumerate_points(&s, 2, 4, 1 << 20).unwrap();
    let sweep = ball_sweep(&s, &e, BALL, 1).unwrap();
    assert_eq!(sweep.level_violations, 0);
    assert!(sweep.exp_checked && sweep.exp_violations == 0);

    // Every cover of T_K by balls centered in it weighs at least 1 at s.
    let fam = PointFamily::Points(e.points.clone());
    let cover = bowen_hausdorff_estimate(&fam, edp.s, 1, BALL, s.t(2) - 1).unwrap();
    assert!(cover.value >= edp.s, "{} < {}", cover.value, edp.s);
    assert!(cover.weight.unwrap() >= 1.0 - 1e-12);
}

#[test]
fn large_gamma_is_trivial() {
    let s = fixtures::tiny_scheme();
    let edp = edp_lower_bound(&s, s.params.h_star / 5.0 + 1e-9, BALL, 2, 1, 1 << 20).unwrap();
    assert_eq!(edp.status, CertificateStatus::Trivial);
    assert_eq!(edp.value(), Some(0.0));
}

#[test]
fn duplicated_block_is_refused() {
    let mut s = fixtures::tiny_scheme();
    let b = s.levels[0].blocks[0].clone();
    s.levels[0].blocks[1] = b;
    let edp = edp_lower_bound(&s, s.params.gamma, BALL, 2, 1, 1 << 20).unwrap();
    assert!(matches!(edp.status, CertificateStatus::Refused(_)), "{:?}", edp.status);
    assert!(!edp.distinct.holds);
}

#[test]
fn explicit_three_levels_enumerate() {
    let mut build = BuildConfig::full(3, NkRule::Explicit(vec![1, 2, 1]));
    build.block_cap = Some(2);
    let base = fixtures::tiny_scheme();
    let s = build_scheme(&fixtures::full_shift(), &base.params, &build).unwrap();
    assert_eq!(s.point_count(3), Some(16));
    let e = enumerate_points(&s, 3, 2, 1 << 20).unwrap();
    assert_eq!(e.len(), 16);
    assert!(distinctness(&s, &e, BALL).unwrap().holds);
    assert!(support_check(&s, &e).unwrap().holds);
}

#[test]
fn enumeration_budget_is_enforced() {
    let s = fixtures::tiny_scheme();
    assert!(enumerate_points(&s, 2, 4, 10).is_err());
}

#[test]
fn scheme_json_round_trip() {
    let s = fixtures::tiny_scheme();
    let text = serde_json::to_string(&s).unwrap();
    let back: FractalScheme = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}

#[test]
fn light_schemes_have_no_edp_bound() {
    let s = light_delta(3);
    assert!(edp_lower_bound(&s, 0.01, BALL, 3, 1, 1 << 20).is_err());
}
