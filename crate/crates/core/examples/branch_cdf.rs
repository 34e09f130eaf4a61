//! Distribution of the number of qualified branches per unit in the
//! two-layer decoder, for two radius settings.

use tcm_noma::decoder::branch_cdf;
use tcm_noma::harness::{Scheme, SimConfig, Simulator};

fn main() -> tcm_noma::Result<()> {
    for a in [4.0, 6.0] {
        let mut cfg = SimConfig::default();
        cfg.decoder.radius_a = a;
        cfg.sim.frame_bits = 200;
        cfg.sim.max_frames = 2;
        cfg.sim.batch = 2;
        let sim = Simulator::new(&cfg, Scheme::TcmNoma)?;
        let r = sim.run_point(0, 12.0)?;
        let counts = r.stats.qualified_counts();
        let cdf = branch_cdf(&counts);
        let median = cdf.iter().find(|(_, p)| *p >= 0.5).map_or(0, |x| x.0);
        println!("a={a}: {} units, median {median}, max {}", counts.len(), cdf.last().map_or(0, |x| x.0));
    }
    Ok(())
}
