//! Minimal library usage: verify the bundled presets at a small cutoff
//! and print the text reports.
//!
//! Run with `cargo run --release --example smoke`.

use basmajian_core::identity::verify;
use basmajian_core::presets;

fn main() -> basmajian_core::Result<()> {
    for name in ["ex51", "ex52", "veronese3"] {
        let rep = presets::by_name(name).unwrap()?.with_cutoff(8);
        let report = verify(&rep)?;
        println!("== {name} ==");
        print!("{}", report.to_text());
    }
    Ok(())
}
