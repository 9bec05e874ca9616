//! Acceptance gate: one test per shipped guarantee, at full sweep sizes
//! (samples = 100, coordinate bound 50, heavy instances included,
//! seed 42). Each test prints a PASS line with the check's summary or
//! fails with its counterexample detail.

use extlat::battery::{run_named_check, BatteryConfig};
use extlat::extension::an_example;
use extlat::jsonio::CheckStatus;
use extlat::p1ext::ProjPoint;
use extlat::rational::Z;

const LOG_TOL: f64 = 1e-9;

fn gate(criterion: usize, name: &str) {
    let cfg = BatteryConfig::default();
    let report = run_named_check(name, &cfg).expect("check name is registered");
    let detail = serde_json::to_string(&report.detail).unwrap();
    match report.status {
        CheckStatus::Pass => println!("PASS {criterion:>2} {name}: {detail}"),
        _ => panic!("FAIL {criterion:>2} {name}: {detail}"),
    }
}

#[test]
fn c01_quotient_family_sizes() {
    // The log form with the pinned tolerance, on top of the exact check.
    for n in 1..=8u64 {
        let adm = an_example(n as usize);
        let c = extlat::extension::class_of(&adm, &Default::default()).unwrap();
        let size = c.size();
        let want = 0.5 * (n as f64).ln();
        assert!(
            (size.value - want).abs() <= LOG_TOL && size.abs_error <= LOG_TOL,
            "size of the rank-{n} example: got {} want {want}",
            size.value
        );
    }
    gate(1, "quotient-family-sizes");
}

#[test]
fn c02_cyclotomic_pairings() {
    gate(2, "cyclotomic-pairings");
}

#[test]
fn c03_permutohedron_cells() {
    gate(3, "permutohedron-cells");
}

#[test]
fn c04_transference_bounds() {
    gate(4, "transference-bounds");
}

#[test]
fn c05_hom_size_bound() {
    gate(5, "hom-size-bound");
}

#[test]
fn c06_plane_extensions() {
    // Pinned log tolerance along the standard point family.
    for n in 2..=50i64 {
        let p = ProjPoint::new(Z::from(1), Z::from(n)).unwrap();
        let size = p.size();
        let want = (n as f64).ln();
        assert!(
            (size.value - want).abs() <= LOG_TOL && size.abs_error <= LOG_TOL,
            "size at (1:{n}): got {} want {want}",
            size.value
        );
    }
    gate(6, "plane-extensions");
}

#[test]
fn c07_reduction_constants() {
    gate(7, "reduction-constants");
}

#[test]
fn c08_scalar_extension_criterion() {
    gate(8, "scalar-extension-criterion");
}

#[test]
fn c09_duality_and_splitting() {
    gate(9, "duality-and-splitting");
}

#[test]
fn c10_enumeration_oracles() {
    gate(10, "enumeration-oracles");
}

#[test]
fn c11_field_invariants() {
    gate(11, "field-invariants");
}

#[test]
fn c12_base_change_invariance() {
    gate(12, "base-change-invariance");
}
