//! Monte Carlo tail probabilities against the expansion over a grid of `t`.
//!
//! `cargo run --release --example simulate`

use heavytail::network;
use heavytail::simulate::{ratio_csv, ratio_table, stratified_tail};
use heavytail::Result;

fn main() -> Result<()> {
    let sc = network::scenario("example-3-8")?;
    let (model, law, set) = (&sc.network.margins, &sc.network.law, &sc.sets[0].set);
    let rows = ratio_table(model, law, set, &[5.0, 10.0, 20.0, 50.0], 1_000_000, 42)?;
    print!("{}", ratio_csv(&rows));

    let sc = network::scenario("taylor27")?;
    let strata = stratified_tail(
        &sc.network.margins,
        &sc.network.law,
        &sc.sets[0].set,
        10.0,
        200_000,
        42,
    )?;
    for s in &strata {
        println!(
            "stratum i={}: mass {}, weighted estimate {:.5}",
            s.i, s.mass, s.estimate.p_hat
        );
    }
    Ok(())
}
