//! Draws from the dependent three-object model and compares the joint tail
//! with its closed form.
//!
//! `cargo run --release --example dependent_sampler`

use heavytail::{mc, MarginalModel, Result};

fn main() -> Result<()> {
    let model = MarginalModel::dependent(1.0, vec![1.0, 2.0, 3.0], 1.0, 1.0)?;
    let n = 2_000_000u64;
    for t in [2.0, 5.0, 10.0, 20.0] {
        let hits = mc::count_hits(
            n,
            9,
            || vec![0.0; 3],
            |rng, z| {
                model.sample_into(rng, z);
                z.iter().all(|v| *v > t)
            },
        );
        let p = mc::Proportion::from_counts(hits, n);
        println!(
            "t={t:>4}: sampled {:.6} +- {:.6}, exact {:.6}",
            p.p_hat,
            p.stderr,
            model.exact_joint_tail(t)?
        );
    }
    for i in 1..=3 {
        let law = model.order_stat_tail(i)?;
        println!("P(Z^({i}) > t) ~ {} t^-{}", law.constant, law.exponent);
    }
    Ok(())
}
