// Seesaw maximization from seeded random observables.

use chainlock::seesaw::{seesaw_optimize, SeesawConfig, SeesawReport};
use chainlock::soscert::tsirelson_ceiling;

pub fn run_example() -> chainlock::Result<SeesawReport> {
    let n = 3;
    let config = SeesawConfig {
        restarts: 6,
        seed: 42,
        ..SeesawConfig::default()
    };
    let report = seesaw_optimize(n, &config)?;
    println!(
        "best beta {:.6} (restart {}), ceiling {:.6}",
        report.best_beta,
        report.best_restart,
        tsirelson_ceiling(n)
    );
    for (r, beta) in report.restart_betas.iter().enumerate() {
        let sweeps = report.restart_trace(r).count() - 1;
        println!("restart {r}: {beta:.6} after {sweeps} sweeps");
    }
    Ok(report)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
