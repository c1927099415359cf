// Classical bound against the quantum ceiling for growing chains, as CSV.

use chainlock::cli::{run_sweep, sweep_csv, SweepRow};
use chainlock::soscert::CERTIFY_TOL;

pub fn run_example() -> chainlock::Result<Vec<SweepRow>> {
    let rows = run_sweep(2, 8, CERTIFY_TOL)?;
    print!("{}", sweep_csv(&rows));
    Ok(rows)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
