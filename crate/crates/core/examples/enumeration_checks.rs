//! Closed-form usage constants of the one-hot networks against exact enumeration.
//!
//! `cargo run --example enumeration_checks`

use heavytail::network::{prop41_report, prop42_report};
use heavytail::Result;

fn main() -> Result<()> {
    for report in [
        prop41_report(4, 3)?,
        prop41_report(5, 3)?,
        prop42_report(4, 1)?,
        prop42_report(5, 2)?,
    ] {
        println!("{}", report.to_text());
    }
    Ok(())
}
