// Certificates for an optimal and a random model.

use chainlock::constructions::optimal_model;
use chainlock::seesaw::random_model;
use chainlock::soscert::{certify, CertificateReport, CERTIFY_TOL};

pub fn run_example() -> chainlock::Result<(CertificateReport, CertificateReport)> {
    let optimal = certify(&optimal_model(2)?, CERTIFY_TOL)?;
    let random = certify(&random_model(2, 5)?, CERTIFY_TOL)?;
    for (name, r) in [("optimal", &optimal), ("random", &random)] {
        println!(
            "{name}: beta {:.6}, tau {:.6}, gap {:.2e}, max residual {:.2e}, certified {}",
            r.beta,
            r.tau,
            r.gamma,
            r.max_residual(),
            r.certified
        );
    }
    Ok((optimal, random))
}

fn main() -> chainlock::Result<()> {
    run_example().map(|_| ())
}
