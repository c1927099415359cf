// Four sources with one Bell pair per source against two pairs per source.

use chainlock::seesaw::{seesaw_optimize, SeesawConfig};
use chainlock::soscert::tsirelson_ceiling;

pub fn run_example() -> chainlock::Result<Vec<(usize, f64)>> {
    let n = 4;
    let mut out = Vec::new();
    for m in [1, 2] {
        let config = SeesawConfig {
            restarts: 8,
            qubits_per_half: Some(m),
            ..SeesawConfig::default()
        };
        let report = seesaw_optimize(n, &config)?;
        println!(
            "{m} pair(s) per source: best beta {:.6} (ceiling {})",
            report.best_beta,
            tsirelson_ceiling(n)
        );
        out.push((m, report.best_beta));
    }
    Ok(out)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
