//! Result files.
//!
//! * `<id>.csv`: one row per (architecture, power) with the header in [`CSV_HEADER`].
//!   Floats use the shortest decimal that parses back to the same value.
//! * `<id>.meta.json`: scenario echo, seed, drop and redraw counts, content hash
//!   of the CSV, timestamp.
//! * `<id>_cdf.csv`: pooled per-user rates at the distribution powers.
//! * `<id>_summary.txt`: crossing power for every architecture pair.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use dualsat_core::architectures::Architecture;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::crossing::find_crossing;
use crate::error::{HarnessError, Result};
use crate::scenario::Scenario;
use crate::sweep::{ArchStats, SweepResults};

pub const CSV_HEADER: [&str; 9] = [
    "scenario_id",
    "architecture",
    "p_tot_dbw",
    "drops",
    "se_mean",
    "se_stderr",
    "jain_mean",
    "pe_mean",
    "unavailable_frac",
];

pub const CDF_HEADER: [&str; 4] = ["scenario_id", "architecture", "p_tot_dbw", "rate"];

/// A parsed results row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario_id: String,
    pub architecture: Architecture,
    pub p_tot_dbw: f64,
    pub drops: usize,
    pub se_mean: f64,
    pub se_stderr: f64,
    pub jain_mean: f64,
    pub pe_mean: f64,
    pub unavailable_frac: f64,
}

impl CsvRow {
    pub fn from_stats(scenario_id: &str, s: &ArchStats) -> Self {
        Self {
            scenario_id: scenario_id.to_string(),
            architecture: s.architecture,
            p_tot_dbw: s.p_tot_dbw,
            drops: s.drops,
            se_mean: s.se_mean,
            se_stderr: s.se_stderr,
            jain_mean: s.jain_mean,
            pe_mean: s.pe_mean,
            unavailable_frac: s.unavailable_frac,
        }
    }

    fn record(&self) -> [String; 9] {
        [
            self.scenario_id.clone(),
            self.architecture.tag().to_string(),
            self.p_tot_dbw.to_string(),
            self.drops.to_string(),
            self.se_mean.to_string(),
            self.se_stderr.to_string(),
            self.jain_mean.to_string(),
            self.pe_mean.to_string(),
            self.unavailable_frac.to_string(),
        ]
    }
}

pub fn emit_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn csv_bytes(rows: &[CsvRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf).expect("writing to memory cannot fail");
    buf
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| HarnessError::Format(format!("missing column `{}`", CSV_HEADER[i])))?;
    raw.parse()
        .map_err(|_| HarnessError::Format(format!("column `{}`: cannot parse `{raw}`", CSV_HEADER[i])))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Format(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let arch: String = field(&rec, 1)?;
        rows.push(CsvRow {
            scenario_id: field(&rec, 0)?,
            architecture: arch
                .parse()
                .map_err(|_| HarnessError::Format(format!("unknown architecture `{arch}`")))?,
            p_tot_dbw: field(&rec, 2)?,
            drops: field(&rec, 3)?,
            se_mean: field(&rec, 4)?,
            se_stderr: field(&rec, 5)?,
            jain_mean: field(&rec, 6)?,
            pe_mean: field(&rec, 7)?,
            unavailable_frac: field(&rec, 8)?,
        });
    }
    Ok(rows)
}

/// SHA-256 over the git blob framing `blob <len>\0<bytes>`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    format!("sha256:{}", hex::encode(h.finalize()))
}

#[derive(Debug, Serialize)]
struct ArchitectureMeta {
    tag: &'static str,
    label: &'static str,
    upper_bound: bool,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    scenario_id: &'a str,
    master_seed: u64,
    drops_per_point: usize,
    power_points: usize,
    resampled_drops: usize,
    resampled: &'a [(usize, usize, usize)],
    csv_file: String,
    content_hash: String,
    generated_at: String,
    tool_version: &'static str,
    architectures: Vec<ArchitectureMeta>,
    scenario: &'a Scenario,
}

pub fn metadata_json(results: &SweepResults, csv_file: &str, csv: &[u8]) -> String {
    let s = &results.scenario;
    let meta = Metadata {
        scenario_id: &s.scenario_id,
        master_seed: s.sweep.seed,
        drops_per_point: s.sweep.drops,
        power_points: results.powers.len(),
        resampled_drops: results.resampled.len(),
        resampled: &results.resampled,
        csv_file: csv_file.to_string(),
        content_hash: content_hash(csv),
        generated_at: chrono::Utc::now().to_rfc3339(),
        tool_version: env!("CARGO_PKG_VERSION"),
        architectures: results
            .architectures
            .iter()
            .map(|a| ArchitectureMeta {
                tag: a.tag(),
                label: a.label(),
                upper_bound: !a.is_realizable(),
            })
            .collect(),
        scenario: s,
    };
    serde_json::to_string_pretty(&meta).expect("metadata serializes")
}

pub fn cdf_bytes(results: &SweepResults) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CDF_HEADER).expect("in-memory write");
    for &arch in &results.architectures {
        for p in results.cdf_power_indices() {
            let mut rates = results.rate_samples(arch, p).unwrap_or_default();
            rates.sort_by(f64::total_cmp);
            for r in rates {
                w.write_record([
                    results.scenario.scenario_id.as_str(),
                    arch.tag(),
                    &results.powers[p].to_string(),
                    &r.to_string(),
                ])
                .expect("in-memory write");
            }
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Crossing of every ordered architecture pair present in `rows`.
pub fn crossings(rows: &[CsvRow]) -> Vec<(Architecture, Architecture, Option<f64>)> {
    let mut archs: Vec<Architecture> = Vec::new();
    for r in rows {
        if !archs.contains(&r.architecture) {
            archs.push(r.architecture);
        }
    }
    let curve = |a: Architecture| -> (Vec<f64>, Vec<f64>) {
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.architecture == a)
            .map(|r| (r.p_tot_dbw, r.se_mean))
            .collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        pts.into_iter().unzip()
    };
    let mut out = Vec::new();
    for (i, &a) in archs.iter().enumerate() {
        for &b in &archs[i + 1..] {
            let (pa, sa) = curve(a);
            let (pb, sb) = curve(b);
            let x = if pa == pb { find_crossing(&pa, &sa, &sb) } else { None };
            out.push((a, b, x));
        }
    }
    out
}

pub fn summary_text(rows: &[CsvRow]) -> String {
    let mut s = String::from("# spectral-efficiency crossings (dBW)\n");
    for (a, b, x) in crossings(rows) {
        match x {
            Some(x) => s.push_str(&format!("{a} vs {b}: {x}\n")),
            None => s.push_str(&format!("{a} vs {b}: none\n")),
        }
    }
    s
}

/// Paths of the files written by [`write_results`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub metadata: PathBuf,
    pub cdf: PathBuf,
    pub summary: PathBuf,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub fn results_rows(results: &SweepResults) -> Vec<CsvRow> {
    results
        .rows()
        .iter()
        .map(|s| CsvRow::from_stats(&results.scenario.scenario_id, s))
        .collect()
}

pub fn write_results(results: &SweepResults, dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let id = &results.scenario.scenario_id;
    let rows = results_rows(results);
    let csv = csv_bytes(&rows);
    let files = OutputFiles {
        csv: dir.join(format!("{id}.csv")),
        metadata: dir.join(format!("{id}.meta.json")),
        cdf: dir.join(format!("{id}_cdf.csv")),
        summary: dir.join(format!("{id}_summary.txt")),
    };
    write(&files.csv, &csv)?;
    write(
        &files.metadata,
        metadata_json(results, &format!("{id}.csv"), &csv).as_bytes(),
    )?;
    write(&files.cdf, &cdf_bytes(results))?;
    write(&files.summary, summary_text(&rows).as_bytes())?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(arch: Architecture, p: f64, se: f64) -> CsvRow {
        CsvRow {
            scenario_id: "t".into(),
            architecture: arch,
            p_tot_dbw: p,
            drops: 3,
            se_mean: se,
            se_stderr: 0.1 / 3.0,
            jain_mean: f64::NAN,
            pe_mean: se / 7.0,
            unavailable_frac: 2.0 / 3.0,
        }
    }

    #[test]
    fn empty_results_give_header_only() {
        assert_eq!(
            String::from_utf8(csv_bytes(&[])).unwrap(),
            "scenario_id,architecture,p_tot_dbw,drops,se_mean,se_stderr,jain_mean,pe_mean,unavailable_frac\n"
        );
    }

    #[test]
    fn parse_back_is_exact() {
        let rows = vec![
            row(Architecture::Coordinated, -2.5, 0.1 + 0.2),
            row(Architecture::Cognitive, 1e-7, 1e300),
        ];
        let back = parse_csv(csv_bytes(&rows).as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.se_mean.to_bits(), b.se_mean.to_bits());
            assert_eq!(a.se_stderr.to_bits(), b.se_stderr.to_bits());
            assert_eq!(a.pe_mean.to_bits(), b.pe_mean.to_bits());
            assert!(b.jain_mean.is_nan());
            assert_eq!(a.p_tot_dbw, b.p_tot_dbw);
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn hash_uses_blob_framing() {
        // Known SHA-256 of "blob 0\0".
        assert_eq!(
            content_hash(b""),
            "sha256:473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }

    #[test]
    fn summary_lists_pairs() {
        let rows = vec![
            row(Architecture::Coordinated, 0.0, 0.0),
            row(Architecture::Coordinated, 10.0, 10.0),
            row(Architecture::Cognitive, 0.0, 10.0),
            row(Architecture::Cognitive, 10.0, 0.0),
        ];
        assert_eq!(
            summary_text(&rows),
            "# spectral-efficiency crossings (dBW)\ncoordinated vs cognitive: 5\n"
        );
    }
}
