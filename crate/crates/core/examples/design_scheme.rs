//! Builds the full-size scheme (512-point signal set, searched 16-state code)
//! and prints its distance profile.

use std::time::Instant;

use tcm_noma::harness::{design_lc_tcm, design_tcm, SimConfig};

fn main() -> tcm_noma::Result<()> {
    let cfg = SimConfig::default();
    let start = Instant::now();
    let tcm = design_tcm(&cfg)?;
    println!("designed scheme ({:.1?})\n{}", start.elapsed(), tcm.summary());
    let lc = design_lc_tcm(&cfg)?;
    println!("lattice scheme\n{}", lc.summary());
    Ok(())
}
