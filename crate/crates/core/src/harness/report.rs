//! CSV output and text summaries.

use std::fmt::Write as _;
use std::path::Path;

use super::sweep::BerRecord;
use crate::decoder::branch_cdf;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv(records: &[BerRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Config("no records to report".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|x| x.map_err(csv_err)).collect()
}

/// Writes `c_tilde,prob` rows of the empirical CDF of `counts`.
pub fn write_branch_cdf(counts: &[usize], path: &Path) -> Result<()> {
    if counts.is_empty() {
        return Err(Error::Config("no branch counts recorded".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["c_tilde", "prob"]).map_err(csv_err)?;
    for (c, p) in branch_cdf(counts) {
        w.write_record([c.to_string(), p.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Eb/N0 values where the BER ordering of schemes `a` and `b` flips,
/// interpolated linearly in log BER between adjacent common points.
pub fn crossovers(records: &[BerRecord], a: &str, b: &str) -> Vec<f64> {
    let mut pairs: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.scheme == a)
        .filter_map(|ra| {
            records
                .iter()
                .find(|rb| rb.scheme == b && rb.ebn0_db == ra.ebn0_db)
                .map(|rb| (ra.ebn0_db, ra.ber, rb.ber))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let floor = 1e-12f64;
    let diff = |p: &(f64, f64, f64)| p.1.max(floor).ln() - p.2.max(floor).ln();
    pairs
        .windows(2)
        .filter_map(|w| {
            let (d0, d1) = (diff(&w[0]), diff(&w[1]));
            if d0 == 0.0 {
                Some(w[0].0)
            } else if d0.signum() != d1.signum() && d1 != 0.0 {
                Some(w[0].0 + (w[1].0 - w[0].0) * d0 / (d0 - d1))
            } else {
                None
            }
        })
        .collect()
}

/// Human-readable table of records plus crossover points per scheme pair.
pub fn summary(records: &[BerRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>8} {:>10} {:>8} {:>11} {:>23}", "scheme", "ebn0_db", "bits", "errors", "ber", "95% interval");
    for r in records {
        let _ = writeln!(
            s,
            "{:<10} {:>8.2} {:>10} {:>8} {:>11.3e} [{:>9.3e}, {:>9.3e}]",
            r.scheme, r.ebn0_db, r.bits, r.errors, r.ber, r.ci_lo, r.ci_hi
        );
    }
    let mut schemes: Vec<&str> = records.iter().map(|r| r.scheme.as_str()).collect();
    schemes.dedup();
    schemes.sort_unstable();
    schemes.dedup();
    for (i, a) in schemes.iter().enumerate() {
        for b in &schemes[i + 1..] {
            let x = crossovers(records, a, b);
            if x.is_empty() {
                let _ = writeln!(s, "{a} vs {b}: no crossover");
            } else {
                let list: Vec<String> = x.iter().map(|v| format!("{v:.2} dB")).collect();
                let _ = writeln!(s, "{a} vs {b}: crossover at {}", list.join(", "));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::Scheme;

    fn rec(s: Scheme, e: f64, errors: u64) -> BerRecord {
        BerRecord::new(s, e, 10_000, errors, "abc")
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ber.csv");
        let recs = vec![rec(Scheme::TcmNoma, 8.0, 123), rec(Scheme::Ofdma, 8.5, 7)];
        write_csv(&recs, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), recs);
        let header = std::fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("scheme,ebn0_db,bits,errors,ber,ci_lo,ci_hi,config_hash\n"));
        assert!(write_csv(&[], &path).is_err());
    }

    #[test]
    fn cdf_csv_monotone() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cdf.csv");
        write_branch_cdf(&[4, 1, 9, 4, 2], &path).unwrap();
        let mut r = csv::Reader::from_path(&path).unwrap();
        assert_eq!(r.headers().unwrap(), vec!["c_tilde", "prob"]);
        let probs: Vec<f64> = r.records().map(|x| x.unwrap()[1].parse().unwrap()).collect();
        assert!(probs.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*probs.last().unwrap(), 1.0);
    }

    #[test]
    fn crossover_interpolates() {
        let recs = vec![
            rec(Scheme::TcmNoma, 8.0, 1000),
            rec(Scheme::TcmNoma, 10.0, 10),
            rec(Scheme::Ofdma, 8.0, 100),
            rec(Scheme::Ofdma, 10.0, 100),
        ];
        let x = crossovers(&recs, "tcm-noma", "ofdma");
        assert_eq!(x.len(), 1);
        assert!((x[0] - 9.0).abs() < 1e-9);
        assert!(summary(&recs).contains("crossover at 9.00 dB"));
    }
}
