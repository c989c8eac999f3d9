//! Exact law of the critical index for a random one-hot network where agent `r`
//! never holds object `r`.
//!
//! `cargo run --example partition`

use heavytail::network::build_onehot_law;
use heavytail::{Exclusion, Result};

fn main() -> Result<()> {
    let (q, d) = (5, 3);
    let law = build_onehot_law(q, d, Exclusion::OwnIndex)?;
    println!("{} equally likely networks", law.support_size());
    for k in 1..=q {
        let report = law.partition(k)?;
        let masses: Vec<String> = report.masses.iter().map(|m| m.to_string()).collect();
        println!(
            "k={k}: P(i_k = 1..{d}) = [{}], i_star = {}",
            masses.join(", "),
            report.i_star
        );
    }
    Ok(())
}
