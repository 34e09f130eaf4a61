use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tcm_noma::harness::{self, Scheme, SimConfig, Simulator};
use tcm_noma::Error;

#[derive(Parser)]
#[command(name = "tcm-noma", version, about = "TCM-NOMA link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep and write CSV reports.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Schemes to simulate (tcm-noma, ofdma, lc-tcm).
        #[arg(long, value_delimiter = ',', default_value = "tcm-noma")]
        scheme: Vec<String>,
        /// Eb/N0 points in dB, overriding the config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ebn0: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the signal set, partition tree, labeling and code, and export them.
    Design {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: Option<&Path>) -> tcm_noma::Result<SimConfig> {
    match path {
        Some(p) => SimConfig::load(p),
        None => Ok(SimConfig::default()),
    }
}

fn simulate(
    config: Option<&Path>,
    schemes: &[String],
    ebn0: Option<Vec<f64>>,
    seed: Option<u64>,
    out: &Path,
) -> tcm_noma::Result<()> {
    let mut cfg = load(config)?;
    if let Some(e) = ebn0 {
        cfg.sim.ebn0_db = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let schemes: Vec<Scheme> = schemes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.toml"), cfg.to_toml())?;
    let mut records = Vec::new();
    for scheme in schemes {
        let sim = Simulator::new(&cfg, scheme)?;
        for (i, point) in sim.run()?.into_iter().enumerate() {
            eprintln!(
                "{scheme} {:.2} dB: {} errors / {} bits in {} frames",
                point.record.ebn0_db, point.record.errors, point.record.bits, point.frames
            );
            if !point.stats.units.is_empty() {
                let stem = format!("branch_cdf_{scheme}_{i}");
                harness::write_branch_cdf(&point.stats.qualified_counts(), &out.join(format!("{stem}.csv")))?;
                harness::write_branch_cdf(&point.stats.qualified_raw_counts(), &out.join(format!("{stem}_raw.csv")))?;
            }
            records.push(point.record);
        }
    }
    harness::write_csv(&records, &out.join("ber.csv"))?;
    let summary = harness::summary(&records);
    std::fs::write(out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn design(config: Option<&Path>, out: &Path) -> tcm_noma::Result<()> {
    let cfg = load(config)?;
    let d = harness::design_tcm(&cfg)?;
    for path in d.export(out)? {
        eprintln!("wrote {}", path.display());
    }
    print!("{}", d.summary());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate {
            config,
            scheme,
            ebn0,
            seed,
            out,
        } => simulate(config.as_deref(), &scheme, ebn0, seed, &out),
        Command::Design { config, out } => design(config.as_deref(), &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
