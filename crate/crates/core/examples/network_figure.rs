//! Leading constants of the five-agent portfolio network and the data behind
//! its independent-versus-dependent comparison, written as CSV to a directory.
//!
//! `cargo run --release --example network_figure -- [out_dir]`

use std::path::PathBuf;

use heavytail::measure::McConfig;
use heavytail::network::{self, figure3_csv, figure3_data};
use heavytail::Result;

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    for name in ["det-independent", "det-dependent"] {
        let sc = network::scenario(name)?;
        for r in network::leading_constants(&sc, &McConfig::default())? {
            println!("{name} {}: {} t^-{}", r.label, r.constant, r.exponent);
        }
    }
    for alpha in [1.0, 2.0] {
        let path = out.join(format!("fig3_alpha{alpha}.csv"));
        std::fs::write(&path, figure3_csv(&figure3_data(alpha)?))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
