//! Critical indices and `tau^(k,i)` for a 4x4 matrix where two agents share no object.
//!
//! `cargo run --example tau_table`

use heavytail::tau::{critical_index, tau_matrix};
use heavytail::{Matrix, Result};

fn main() -> Result<()> {
    let a = Matrix::from_rows(&[
        vec![1.0, 1.0, 1.0, 0.0],
        vec![1.0, 1.0, 0.0, 1.0],
        vec![1.0, 0.0, 1.0, 1.0],
        vec![0.0, 1.0, 1.0, 1.0],
    ])?;
    println!("k  i_k  cover         tau^(k,1..4)");
    for k in 1..=a.rows() {
        let (ik, cert) = critical_index(&a, k)?;
        let taus: Vec<String> = (1..=a.cols())
            .map(|i| tau_matrix(&a, k, i).map(|t| t.to_string()))
            .collect::<Result<_>>()?;
        println!(
            "{k}  {ik}    {:<12}  {}",
            format!("{:?}", cert.columns),
            taus.join(" ")
        );
    }
    Ok(())
}
