//! Experiment output: one JSONL file of per-trial records, CSV summaries and
//! a JSON summary. Every file carries the tool version and the SHA-256 of
//! the canonical JSON form of the configuration, and nothing else that could
//! vary between runs, so identical inputs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiment::{ConstantsSummary, ExperimentRun, GapSummary, TailSummary};
use crate::lattice::Point;
use crate::stats::MeanCi;

pub const TOOL: &str = "fpp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Io(e.to_string()))
}

/// Hex SHA-256 of the compact JSON encoding of `config`.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let digest = Sha256::digest(json(config)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize)]
pub struct Header<'a, C> {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'a str,
    pub config_hash: String,
    pub config: &'a C,
}

impl<'a, C: Serialize> Header<'a, C> {
    pub fn new(kind: &'a str, config: &'a C) -> Result<Self> {
        Ok(Header { tool: TOOL, version: VERSION, kind, config_hash: config_hash(config)?, config })
    }
}

/// Header line followed by one line per record.
pub fn write_jsonl<C: Serialize, T: Serialize>(mut out: impl Write, header: &Header<C>, records: &[T]) -> Result<()> {
    writeln!(out, "{}", json(&serde_json::json!({ "header": header }))?)?;
    for r in records {
        writeln!(out, "{}", json(r)?)?;
    }
    Ok(())
}

/// A CSV table: column names and rows of already formatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table { name, columns: columns.to_vec(), rows: vec![] }
    }
}

/// Writes `table` with two leading columns, `tool_version` and
/// `config_hash`.
pub fn write_csv(out: impl Write, table: &Table, hash: &str) -> Result<()> {
    let err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let version = format!("{TOOL} {VERSION}");
    w.write_record(["tool_version", "config_hash"].iter().chain(&table.columns)).map_err(err)?;
    for row in &table.rows {
        w.write_record([version.as_str(), hash].into_iter().chain(row.iter().map(String::as_str))).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{}", x + 0.0)
    }
}

fn point(p: &Point) -> String {
    p.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn ci(c: &MeanCi) -> [String; 3] {
    [num(c.mean), num(c.lo), num(c.hi)]
}

/// Summaries that know how to lay themselves out as CSV tables.
pub trait Tabular {
    fn tables(&self) -> Vec<Table>;
}

impl Tabular for GapSummary {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "gap_summary",
            &[
                "n",
                "target",
                "norm",
                "trials",
                "finite_trials",
                "mu_hat",
                "mu_lo",
                "mu_hi",
                "mu_dir_hat",
                "mu_dir_lo",
                "mu_dir_hi",
                "gap_hat",
                "gap_sd",
                "gap_lo",
                "gap_hi",
                "ordered_frequency",
                "hop_excess",
                "pattern_rate",
                "boundary_contact_rate",
                "delta",
                "hop_ratio",
                "hop_ratio_lo",
                "hop_ratio_hi",
                "premise_frequency",
                "gap_event_frequency",
            ],
        );
        for s in &self.scales {
            let mut head = vec![
                s.n.to_string(),
                point(&s.target),
                s.norm.to_string(),
                s.trials.to_string(),
                s.finite_trials.to_string(),
            ];
            head.extend(ci(&s.mu_hat));
            head.extend(ci(&s.mu_dir_hat));
            head.extend([num(s.gap_hat.mean), num(s.gap_hat.sd), num(s.gap_hat.lo), num(s.gap_hat.hi)]);
            head.extend([
                num(s.ordered_frequency),
                num(s.hop_excess.mean),
                num(s.pattern_rate.mean),
                num(s.boundary_contact_rate),
            ]);
            for sh in &s.shifts {
                let mut row = head.clone();
                row.push(num(sh.delta));
                row.extend(ci(&sh.hop_ratio));
                row.extend([num(sh.premise_frequency), num(sh.gap_event_frequency)]);
                t.rows.push(row);
            }
            if s.shifts.is_empty() {
                head.extend(std::iter::repeat(String::new()).take(6));
                t.rows.push(head);
            }
        }
        vec![t]
    }
}

impl Tabular for TailSummary {
    fn tables(&self) -> Vec<Table> {
        let mut rows = Table::new(
            "tail_summary",
            &[
                "level",
                "target",
                "norm",
                "hop_excess",
                "trials",
                "unreachable",
                "successes",
                "frequency",
                "standard_error",
                "upper_bound",
                "boundary_contact_rate",
            ],
        );
        for r in &self.rows {
            rows.rows.push(vec![
                r.level.to_string(),
                point(&r.target),
                r.norm.to_string(),
                num(self.hop_excess),
                r.trials.to_string(),
                r.unreachable.to_string(),
                r.successes.to_string(),
                num(r.frequency),
                num(r.standard_error),
                r.upper_bound.map(num).unwrap_or_default(),
                num(r.boundary_contact_rate),
            ]);
        }
        let mut fit = Table::new("tail_fit", &["hop_excess", "alpha1", "alpha2", "points", "non_increasing"]);
        let (a1, a2, k) = match &self.fit {
            Some(f) => (num(f.alpha1), num(f.alpha2), f.points.to_string()),
            None => (String::new(), String::new(), "0".into()),
        };
        fit.rows.push(vec![num(self.hop_excess), a1, a2, k, self.non_increasing.to_string()]);
        vec![rows, fit]
    }
}

impl Tabular for ConstantsSummary {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "constants_summary",
            &[
                "n",
                "target",
                "trials",
                "finite_trials",
                "mu_hat",
                "mu_lo",
                "mu_hi",
                "mu_dir_hat",
                "mu_dir_lo",
                "mu_dir_hi",
                "ordered_frequency",
                "boundary_contact_rate",
                "subadditive_vs_half",
            ],
        );
        for r in &self.rows {
            let sub = self
                .subadditivity
                .iter()
                .find(|s| s.doubled == r.n)
                .map(|s| s.consistent.to_string())
                .unwrap_or_default();
            let mut row = vec![r.n.to_string(), point(&r.target), r.trials.to_string(), r.finite_trials.to_string()];
            row.extend(ci(&r.mu_hat));
            row.extend(ci(&r.mu_dir_hat));
            row.extend([num(r.ordered_frequency), num(r.boundary_contact_rate), sub]);
            t.rows.push(row);
        }
        vec![t]
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `<kind>_trials.jsonl`, `<kind>_summary.json` and one CSV per
/// table into `dir`; returns the paths written.
pub fn write_run<C: Serialize, S: Serialize + Tabular>(
    dir: &Path,
    kind: &str,
    config: &C,
    run: &ExperimentRun<S>,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let header = Header::new(kind, config)?;
    let mut written = vec![];

    let path = dir.join(format!("{kind}_trials.jsonl"));
    let mut out = create(&path)?;
    write_jsonl(&mut out, &header, &run.trials)?;
    out.flush()?;
    written.push(path);

    let path = dir.join(format!("{kind}_summary.json"));
    let mut out = create(&path)?;
    let body = serde_json::to_string_pretty(&serde_json::json!({ "header": header, "summary": run.summary }))
        .map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{body}")?;
    out.flush()?;
    written.push(path);

    for table in run.summary.tables() {
        let path = dir.join(format!("{}.csv", table.name));
        let mut out = create(&path)?;
        write_csv(&mut out, &table, &header.config_hash)?;
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}
