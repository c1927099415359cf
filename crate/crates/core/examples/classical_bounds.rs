// Classical bound of the chain functional: closed form, edge-assignment
// scan and the full deterministic-strategy search.

use chainlock::nlocal::{alpha_bruteforce, alpha_closed_form, lhv_exhaustive_max};

pub fn run_example() -> chainlock::Result<Vec<(usize, u64)>> {
    let mut table = Vec::new();
    for n in 2..=12 {
        let closed = alpha_closed_form(n)?;
        let scan = alpha_bruteforce(n)?;
        println!("n = {n:2}  alpha = {closed:5}  scan = {:5}", scan.value);
        assert_eq!(closed, scan.value);
        table.push((n, closed));
    }
    for n in 2..=3 {
        let report = lhv_exhaustive_max(n)?;
        println!(
            "n = {n}: best deterministic strategy reaches {} ({:?})",
            report.alpha_bruteforce, report.witness
        );
    }
    Ok(table)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
