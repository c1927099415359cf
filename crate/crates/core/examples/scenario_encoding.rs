// Sign rows and Bob input combinations that index the terms of the
// functional.

use chainlock::scenario::ScenarioDump;
use chainlock::{build_encoding, BobInputMap, ChainScenario};

pub fn run_example() -> chainlock::Result<ScenarioDump> {
    let n = 3;
    let scenario = ChainScenario::new(n)?;
    println!(
        "{} sources, {} central parties, {} terms",
        scenario.n(),
        scenario.central_parties(),
        scenario.terms()
    );
    let enc = build_encoding(n)?;
    let map = BobInputMap::new(n)?;
    for i in 0..enc.terms() {
        println!("term {}: signs {:?}, Bob inputs {:?}", i + 1, enc.row(i), map.row(i));
    }
    let dump = ScenarioDump::new(n)?;
    println!("{}", serde_json::to_string(&dump)?);
    Ok(dump)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
