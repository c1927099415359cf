// Bob observables fitted to the optimality condition for anticommuting edge
// observables, with the residual of every term.

use chainlock::constructions::{construct_model, Construction};

pub fn run_example() -> chainlock::Result<Vec<Construction>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let c = construct_model(n)?;
        println!(
            "n = {n} ({:?}): beta = {:.6} of {:.6}, max residual {:.3e}",
            c.recipe.bob_rule,
            c.beta,
            c.recipe.expected_beta,
            c.max_residual()
        );
        out.push(c);
    }
    Ok(out)
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
