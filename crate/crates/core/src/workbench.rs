//! Batch experiments and the append-only results ledger.
//!
//! The ledger is JSON Lines, one [`LedgerRecord`] per grid point, with a
//! fixed field order so that load → write reproduces the file byte for byte.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize};

use crate::bounds::{bound_report, serialize_big, BoundReport, BoundStatus};
use crate::error::{Error, Result};
use crate::family::{GroundSize, Prime, SetFamily};
use crate::profile::{verify_family, IntersectionProfile};
use crate::search::{certify, max_family_with, SearchBudget, SearchOptions, SearchOutcome};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Parameter(format!("unknown table format {other:?}"))),
        }
    }
}

/// A grid of search points. Profile templates may contain `{p}`, which is
/// expanded over `ps`; templates without it yield one point per `n`.
#[derive(Clone, Debug, Default)]
pub struct ExperimentSpec {
    pub ns: Vec<usize>,
    pub ps: Vec<u32>,
    pub profiles: Vec<String>,
    pub budget: SearchBudget,
    pub canonical: bool,
    pub ledger: PathBuf,
    pub format: TableFormat,
}

impl ExperimentSpec {
    /// Expands the grid, checking every template instantiates.
    pub fn points(&self) -> Result<Vec<(GroundSize, IntersectionProfile)>> {
        if self.ns.is_empty() || self.profiles.is_empty() {
            return Err(Error::Parameter("experiment grid is empty".into()));
        }
        let mut profiles = Vec::new();
        for t in &self.profiles {
            if t.contains("{p}") {
                if self.ps.is_empty() {
                    return Err(Error::Parameter(format!(
                        "template {t:?} needs at least one p"
                    )));
                }
                for &p in &self.ps {
                    profiles.push(IntersectionProfile::instantiate(t, Some(p))?);
                }
            } else {
                profiles.push(IntersectionProfile::instantiate(t, None)?);
            }
        }
        let mut points = Vec::new();
        for &n in &self.ns {
            let g = GroundSize::new(n)?;
            for prof in &profiles {
                points.push((g, prof.clone()));
            }
        }
        Ok(points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerBound {
    pub name: String,
    #[serde(serialize_with = "serialize_big", deserialize_with = "deserialize_big")]
    pub value: BigUint,
    pub status: BoundStatus,
}

fn deserialize_big<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Int(u64),
        Text(String),
    }
    match Num::deserialize(d)? {
        Num::Int(v) => Ok(BigUint::from(v)),
        Num::Text(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

/// One ledger line. Field order here is the on-disk order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRecord {
    pub schema_version: u32,
    pub timestamp: String,
    pub tool_version: String,
    pub n: usize,
    pub p: Option<u32>,
    pub profile: String,
    pub max_size: usize,
    pub exhausted: bool,
    pub witness: Option<Vec<Vec<usize>>>,
    pub bounds: Vec<LedgerBound>,
    pub nodes_visited: u64,
}

impl LedgerRecord {
    pub fn new(n: GroundSize, profile: &IntersectionProfile, outcome: &SearchOutcome, report: &BoundReport) -> Self {
        LedgerRecord {
            schema_version: SCHEMA_VERSION,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            tool_version: TOOL_VERSION.to_owned(),
            n: n.get(),
            p: profile.modulus().map(Prime::get),
            profile: profile.to_string(),
            max_size: outcome.max_size,
            exhausted: outcome.exhausted,
            witness: outcome.witness.as_ref().map(SetFamily::to_lists),
            bounds: report
                .entries
                .iter()
                .map(|e| LedgerBound {
                    name: e.name.clone(),
                    value: e.value.clone(),
                    status: e.status,
                })
                .collect(),
            nodes_visited: outcome.nodes_visited,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("ledger record serializes")
    }

    /// Smallest theorem bound recorded with this point.
    pub fn tightest(&self) -> Option<(&str, &BigUint)> {
        self.bounds
            .iter()
            .filter(|b| b.status == BoundStatus::Theorem)
            .min_by(|a, b| a.value.cmp(&b.value))
            .map(|b| (b.name.as_str(), &b.value))
    }

    /// Re-verifies the witness and audits `max_size` against the bounds
    /// recomputed now.
    pub fn audit(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::parse(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        let n = GroundSize::new(self.n)?;
        let profile: IntersectionProfile = self.profile.parse()?;
        if profile.to_string() != self.profile {
            return Err(Error::parse(format!(
                "profile {:?} is not in canonical form ({profile})",
                self.profile
            )));
        }
        if profile.modulus().map(Prime::get) != self.p {
            return Err(Error::parse(format!(
                "p = {:?} disagrees with profile {profile}",
                self.p
            )));
        }
        match &self.witness {
            Some(lists) => {
                let family = SetFamily::from_lists(n.get(), lists)?;
                if family.len() != self.max_size {
                    return Err(Error::Verification(format!(
                        "witness has {} members but max_size is {}",
                        family.len(),
                        self.max_size
                    )));
                }
                verify_family(&family, &profile).into_result()?;
            }
            None if self.max_size >= profile.k() => {
                return Err(Error::Verification(format!(
                    "max_size {} recorded without a witness",
                    self.max_size
                )));
            }
            None => {}
        }
        let report = bound_report(n.get() as u64, None, &profile)?;
        if let Some(t) = report.tightest_usize() {
            if self.witness.is_some() && self.max_size > t {
                return Err(Error::Verification(format!(
                    "max_size {} exceeds the {} bound {t}",
                    self.max_size,
                    report.tightest_name().unwrap_or("tightest")
                )));
            }
        }
        Ok(())
    }
}

/// Records plus the lines skipped in lenient mode.
#[derive(Clone, Debug, Default)]
pub struct LedgerLoad {
    pub records: Vec<LedgerRecord>,
    /// `(line, reason)` for every rejected line.
    pub skipped: Vec<(usize, String)>,
}

pub fn read_ledger<R: BufRead>(reader: R, lenient: bool) -> Result<LedgerLoad> {
    let mut out = LedgerLoad::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<LedgerRecord>(&line)
            .map_err(|e| Error::parse(e.to_string()))
            .and_then(|r| r.audit().map(|_| r))
            .map_err(|e| e.at_line(lineno));
        match parsed {
            Ok(r) => out.records.push(r),
            Err(e) if lenient => out.skipped.push((lineno, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn ledger_load(path: &Path, lenient: bool) -> Result<LedgerLoad> {
    read_ledger(BufReader::new(File::open(path)?), lenient)
}

pub fn write_ledger<W: Write>(mut w: W, records: &[LedgerRecord]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.to_json_line())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends records to `path`, creating it if needed.
pub struct LedgerWriter {
    out: BufWriter<File>,
}

impl LedgerWriter {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LedgerWriter {
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, record: &LedgerRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_json_line())?;
        self.out.flush()?;
        Ok(())
    }
}

/// Runs every grid point in order, appending each certified result to the
/// ledger as soon as it is known.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<LedgerRecord>> {
    run_experiment_with(spec, |_| {})
}

/// As [`run_experiment`], calling `progress` after each record is written.
pub fn run_experiment_with(
    spec: &ExperimentSpec,
    mut progress: impl FnMut(&LedgerRecord),
) -> Result<Vec<LedgerRecord>> {
    let points = spec.points()?;
    let mut writer = LedgerWriter::open(&spec.ledger)?;
    let opts = SearchOptions {
        budget: spec.budget.clone(),
        canonical: spec.canonical,
        ..Default::default()
    };
    let mut records = Vec::with_capacity(points.len());
    for (n, profile) in points {
        let report = bound_report(n.get() as u64, None, &profile)?;
        let outcome = max_family_with(n, &profile, &opts)?;
        if !certify(&outcome, &profile) {
            return Err(Error::Invariant(format!(
                "witness for n = {n}, {profile} failed certification"
            )));
        }
        let record = LedgerRecord::new(n, &profile, &outcome, &report);
        writer.append(&record)?;
        progress(&record);
        records.push(record);
    }
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub p: Option<u32>,
    pub profile: String,
    pub max_size: usize,
    pub exhausted: bool,
    pub bound: Option<String>,
    pub bound_name: Option<String>,
    /// `bound − max_size` against the tightest theorem bound.
    pub gap: Option<String>,
}

pub fn summary_rows(records: &[LedgerRecord]) -> Vec<SummaryRow> {
    records
        .iter()
        .map(|r| {
            let tight = r.tightest();
            let gap = tight.map(|(_, b)| {
                let m = BigUint::from(r.max_size);
                if *b >= m {
                    (b - m).to_string()
                } else {
                    format!("-{}", m - b)
                }
            });
            SummaryRow {
                n: r.n,
                p: r.p,
                profile: r.profile.clone(),
                max_size: r.max_size,
                exhausted: r.exhausted,
                bound: tight.map(|(_, b)| b.to_string()),
                bound_name: tight.map(|(name, _)| name.to_owned()),
                gap,
            }
        })
        .collect()
}

pub fn summary_table(records: &[LedgerRecord], format: TableFormat) -> Result<String> {
    let rows = summary_rows(records);
    match format {
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::Parameter(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "p", "profile", "max_size", "exhausted", "bound", "bound_name", "gap"])
                .map_err(csv_err)?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.p.map(|p| p.to_string()).unwrap_or_default(),
                    r.profile.clone(),
                    r.max_size.to_string(),
                    r.exhausted.to_string(),
                    r.bound.clone().unwrap_or_default(),
                    r.bound_name.clone().unwrap_or_default(),
                    r.gap.clone().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parameter(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parameter(e.to_string())
}

/// Integer gap of a row, when the bound fits a machine word.
pub fn gap_of(record: &LedgerRecord) -> Option<i64> {
    let (_, b) = record.tightest()?;
    Some(b.to_i64()? - record.max_size as i64)
}
