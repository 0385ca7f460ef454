use cocycle_lab_bench::Workloads;

#[test]
fn workloads_give_known_values() {
    let w = Workloads::new();
    let chi = cocycle_lab::fixtures::test_cocycle_exponent(0.1);
    assert!((w.measure_mle(4) - chi).abs() < 0.05);
    assert!(w.orbit_mle(20_000) > 0.9);
    assert_eq!(w.spectrum(1_000).len(), 2);
    assert!(w.shadowing(20, 1) > 0.0);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((w.topological(24) - phi.ln()).abs() < 0.02);
    assert!(w.cover(24) > 0.0);
    assert!((w.katok(12) - cocycle_lab::suite::BERNOULLI_01_ENTROPY).abs() < 0.2);
    assert!(w.lyapunov_k(0.1) >= 1.0);
    assert!(w.edp() > 0.0);
}
