//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 2 and 4 are red at the stated tolerances (see the decisions
//! ledger); the target reports them without failing the build. Every other
//! criterion must pass.

use std::io::Write;

use cocycle_lab::suite;

const KNOWN_RED: [u32; 2] = [2, 4];

#[test]
fn acceptance() {
    let outcomes = suite::run_all();
    // Straight to stdout so the lines survive the test harness capture.
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{o}").unwrap();
    }
    drop(out);
    let unexpected: Vec<u32> = outcomes.iter().filter(|o| !o.pass && !KNOWN_RED.contains(&o.id)).map(|o| o.id).collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
