//! A short BER sweep for all three schemes with CSV output.

use tcm_noma::harness::{run_sweep, summary, write_csv, Scheme, SimConfig};

fn main() -> tcm_noma::Result<()> {
    let mut cfg = SimConfig::default();
    cfg.sim.frame_bits = 200;
    cfg.sim.ebn0_db = vec![10.0, 12.0];
    cfg.sim.max_frames = 8;
    cfg.sim.batch = 4;
    let mut records = Vec::new();
    for scheme in [Scheme::TcmNoma, Scheme::LcTcm, Scheme::Ofdma] {
        records.extend(run_sweep(&cfg, scheme)?.into_iter().map(|p| p.record));
    }
    print!("{}", summary(&records));
    let path = std::env::temp_dir().join("tcm_noma_ber.csv");
    write_csv(&records, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
