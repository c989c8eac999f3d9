//! Full tail expansion for the 27-matrix law, including a set whose leading
//! term sits above the smallest critical index.
//!
//! `cargo run --release --example expansion`

use heavytail::measure::McConfig;
use heavytail::{evaluate, expansion, leading_order, network, Result};

fn main() -> Result<()> {
    let sc = network::scenario("taylor27")?;
    let (model, law) = (&sc.network.margins, &sc.network.law);
    for ns in &sc.sets {
        let exp = expansion(model, law, &ns.set, 3, &McConfig::default())?;
        println!(
            "set {}: i_star = {}, iota_bar = {:?}",
            ns.label, exp.i_star, exp.iota_bar
        );
        for t in &exp.terms {
            println!(
                "  i={} P(i_3 = i)={:.4} {:.6} t^-{} ({})",
                t.i,
                t.partition_mass,
                t.coefficient,
                t.exponent,
                t.method.label()
            );
        }
        let (e, c) = leading_order(&exp)?;
        let at = evaluate(&exp, 100.0)?;
        println!(
            "  leading {c:.6} t^-{e}; at t=100 full {:.6e}, leading {:.6e}",
            at.full, at.leading
        );
        if !exp.checks.is_empty() {
            println!("  refined order valid: {}", exp.refined_valid);
        }
    }
    Ok(())
}
