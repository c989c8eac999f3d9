//! Limit-measure mass of a pre-image `A^-1 C`, analytically and by Monte Carlo.
//!
//! `cargo run --release --example limit_measure`

use heavytail::measure::{mu_preimage, mu_set_mc, McConfig};
use heavytail::{LimitMeasure, MarginalModel, Matrix, Result, RiskSet};

fn main() -> Result<()> {
    let a = Matrix::from_rows(&[
        vec![1.0, 1.0, 0.0],
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
    ])?;
    let model = MarginalModel::iid(1.0, vec![1.0; 3])?;
    let set = RiskSet::upper_orthant(&[1.0; 3])?;
    // two columns already cover all three rows, so i = 3 has no finite tau
    for i in 1..=2 {
        let mu = LimitMeasure::new(&model, i)?;
        let exact = mu_preimage(&mu, &a, &set, &McConfig::default())?;
        let mc = mu_set_mc(&mu, &a, &set, 400_000, 7)?;
        println!(
            "mu_{i}: {:.6} ({}), Monte Carlo {:.4} +- {:.4}",
            exact.mass,
            exact.method.label(),
            mc.mass,
            mc.stderr
        );
    }
    Ok(())
}
