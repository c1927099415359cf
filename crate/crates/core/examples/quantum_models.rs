// The optimal bilocal model: correlators from both evaluators, the value of
// the functional and a JSON round trip.

use chainlock::constructions::optimal_model;
use chainlock::qcore::{beta_quantum, correlator_contracted, correlator_dense, Evaluator, QuantumModel};
use chainlock::{build_encoding, BobInputMap};

pub fn run_example() -> chainlock::Result<f64> {
    let model = optimal_model(2)?;
    for x in 1..=2 {
        for y in 1..=2u8 {
            for z in 1..=2 {
                let dense = correlator_dense(&model, x, &[y], z)?;
                let contracted = correlator_contracted(&model, x, &[y], z)?;
                println!("<A{x} B{y} C{z}> = {dense:+.6} (contracted {contracted:+.6})");
            }
        }
    }
    let enc = build_encoding(2)?;
    let map = BobInputMap::new(2)?;
    let value = beta_quantum(&model, &enc, &map, Evaluator::Auto)?;
    println!("beta = {:.9}, terms = {:?}", value.beta, value.terms);

    let restored = QuantumModel::from_json(&model.to_json()?)?;
    assert_eq!(restored, model);
    Ok(value.beta)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
