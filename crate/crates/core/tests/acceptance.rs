//! Acceptance suite: runs every numbered criterion at full strength and
//! prints one pass/fail line per criterion. All tolerances are pinned in
//! the verification library (`harness::verify`); rational-backend checks
//! demand exact equality.

use std::time::Instant;

use dtasep::harness::report::CheckResult;
use dtasep::harness::verify::{self, Level, StabilizationLog};

fn report(criterion: &str, checks: &[CheckResult], started: Instant) -> bool {
    let pass = checks.iter().all(|c| c.pass);
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "{status} {criterion} ({} checks, {:.1}s)",
        checks.len(),
        started.elapsed().as_secs_f64()
    );
    for c in checks {
        if !c.pass {
            println!("    failed: {} (worst diff {:.3e})", c.name, c.abs_diff);
        }
    }
    pass
}

const SEED: u64 = 20240817;

#[test]
fn criterion_01_and_12_theorem_end_to_end_with_stabilization() {
    let started = Instant::now();
    let mut stab = StabilizationLog::default();
    let checks = verify::criterion_01_theorem(Level::Full, SEED, &mut stab);
    let ok1 = report("criterion 1: Theorem end-to-end (both routes, both backends)", &checks, started);
    assert!(
        started.elapsed().as_secs_f64() < 60.0,
        "criterion 1 exceeded its 60 s budget"
    );
    let started12 = Instant::now();
    let c12 = verify::criterion_12_stabilization(&stab);
    let ok12 = report(
        "criterion 12: Fredholm window stabilization (criterion-1 instances)",
        std::slice::from_ref(&c12),
        started12,
    );
    assert!(ok1 && ok12);
}

#[test]
fn criterion_02_unordered_q_continuation() {
    let started = Instant::now();
    let mut stab = StabilizationLog::default();
    let mut checks = verify::criterion_02_unordered(Level::Full, SEED, &mut stab);
    checks.push(verify::criterion_12_stabilization(&stab));
    assert!(report("criterion 2: unordered-q continuation (hitting route)", &checks, started));
}

#[test]
fn criterion_03_drsk_bijection() {
    let started = Instant::now();
    let checks = verify::criterion_03_drsk();
    assert!(report("criterion 3: dRSK bijection (exhaustive 2^12 + example)", &checks, started));
}

#[test]
fn criterion_04_dual_cauchy() {
    let started = Instant::now();
    let checks = verify::criterion_04_dual_cauchy(Level::Full, SEED);
    assert!(report("criterion 4: dual Cauchy identity", &checks, started));
}

#[test]
fn criterion_05_link_and_intertwining() {
    let started = Instant::now();
    let checks = verify::criterion_05_link_identities(Level::Full);
    assert!(report("criterion 5: Lambda inverse + intertwining", &checks, started));
}

#[test]
fn criterion_06_biorthogonality() {
    let started = Instant::now();
    let checks = verify::criterion_06_biorthogonality(Level::Full);
    assert!(report("criterion 6: biorthogonality and overlap matrix", &checks, started));
}

#[test]
fn criterion_07_g_identity() {
    let started = Instant::now();
    let checks = verify::criterion_07_g_identity(Level::Full);
    assert!(report("criterion 7: G identity (sum = hitting, all cases)", &checks, started));
}

#[test]
fn criterion_08_bvp() {
    let started = Instant::now();
    let checks = verify::criterion_08_bvp(Level::Full);
    assert!(report("criterion 8: boundary value problem residuals", &checks, started));
}

#[test]
fn criterion_09_route_equality() {
    let started = Instant::now();
    let checks = verify::criterion_09_route_equality(Level::Full, SEED);
    assert!(report("criterion 9: kernel route equality", &checks, started));
}

#[test]
fn criterion_10_monte_carlo() {
    let started = Instant::now();
    let checks = verify::criterion_10_monte_carlo(Level::Full, SEED);
    let ok = report("criterion 10: Monte Carlo consistency (1e5 replicas)", &checks, started);
    assert!(
        started.elapsed().as_secs_f64() < 30.0,
        "criterion 10 exceeded its 30 s budget"
    );
    assert!(ok);
}

#[test]
fn criterion_11_det_equality() {
    let started = Instant::now();
    let checks = verify::criterion_11_det_equality(Level::Full, SEED);
    assert!(report("criterion 11: determinant-product identity", &checks, started));
}

#[test]
fn module_invariants_not_covered_by_criteria() {
    let started = Instant::now();
    let mut checks = Vec::new();
    checks.extend(verify::invariants_combinatorics(SEED));
    checks.extend(verify::invariants_drsk());
    checks.extend(verify::invariants_dynamics(SEED));
    checks.extend(verify::invariants_operators(SEED));
    checks.extend(verify::invariants_dpp(SEED));
    checks.extend(verify::invariants_hitting(SEED));
    assert!(report("module invariants (full manifest)", &checks, started));
}
