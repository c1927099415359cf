macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(classical_bounds, "classical_bounds.rs");
example!(scenario_encoding, "scenario_encoding.rs");
example!(quantum_models, "quantum_models.rs");
example!(condition_solve, "condition_solve.rs");
example!(seesaw_search, "seesaw_search.rs");
example!(sos_certificate, "sos_certificate.rs");
example!(network_sweep, "network_sweep.rs");
example!(single_copy_limit, "single_copy_limit.rs");

#[test]
fn classical_bounds_example() {
    let table = classical_bounds::run_example().unwrap();
    assert_eq!(&table[..4], &[(2, 2), (3, 6), (4, 12), (5, 30)]);
}

#[test]
fn scenario_encoding_example() {
    let dump = scenario_encoding::run_example().unwrap();
    assert_eq!(dump.signs.len(), 4);
    assert!(dump.signs.iter().all(|row| row[0] == 1));
}

#[test]
fn quantum_models_example() {
    let beta = quantum_models::run_example().unwrap();
    assert!((beta - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn condition_solve_example() {
    let out = condition_solve::run_example().unwrap();
    assert!(out[0].is_optimal());
    assert_eq!(out.len(), 3);
}

#[test]
fn seesaw_search_example() {
    let report = seesaw_search::run_example().unwrap();
    assert!(report.best_beta <= 4.0 * 3f64.sqrt() + 1e-7);
}

#[test]
fn sos_certificate_example() {
    let (optimal, random) = sos_certificate::run_example().unwrap();
    assert!(optimal.certified);
    assert!(!random.certified && random.gamma > 0.0);
}

#[test]
fn network_sweep_example() {
    let rows = network_sweep::run_example().unwrap();
    assert!(rows.iter().all(|r| r.ratio > 1.0));
}

#[test]
fn single_copy_limit_example() {
    let out = single_copy_limit::run_example().unwrap();
    assert!(out.iter().all(|(_, beta)| *beta < 16.0));
}
