//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Criteria run concurrently and report in order.

use willis_laminate::validation::{self, CriterionReport, ValidationConfig};

type Criterion = fn(&ValidationConfig) -> CriterionReport;

const CRITERIA: [Criterion; 9] = [
    validation::static_limit,
    validation::floquet_diagnostics,
    validation::three_method_agreement,
    validation::text_anchored_values,
    validation::willis_correlation,
    validation::symmetry_null,
    validation::asymmetry,
    validation::impedance_phase,
    validation::oracle_suite,
];

fn main() {
    // libtest flags such as --list are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let cfg = ValidationConfig::default();
    let reports: Vec<CriterionReport> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA.iter().map(|f| s.spawn(|| f(&cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    for r in &reports {
        println!("{r}");
        for note in &r.notes {
            println!("    note: {note}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
