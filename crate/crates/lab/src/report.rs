//! Report rows, plot data, and the files they are written to.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use randset_core::measure::EmpiricalLaw;

pub const CSV_HEADER: &str = "experiment,params,statistic,value,ci_lo,ci_hi,verdict";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub params: String,
    pub statistic: String,
    pub value: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    /// `pass`, `fail`, `inconclusive`, or `info` for rows without a verdict.
    pub verdict: String,
}

impl ReportRow {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(number).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.experiment,
            self.params,
            self.statistic,
            number(self.value),
            opt(self.ci_lo),
            opt(self.ci_hi),
            self.verdict
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(f.len() == 7, "expected 7 columns in `{line}`");
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse()?))
            }
        };
        Ok(ReportRow {
            experiment: f[0].into(),
            params: f[1].into(),
            statistic: f[2].into(),
            value: f[3].parse()?,
            ci_lo: opt(f[4])?,
            ci_hi: opt(f[5])?,
            verdict: f[6].into(),
        })
    }
}

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
pub fn number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn pass_if(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

/// `x,y,stderr` series for plotting.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotData {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

impl PlotData {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,stderr\n");
        for (x, y, e) in &self.points {
            let _ = writeln!(out, "{x},{y},{e}");
        }
        out
    }
}

/// Everything an experiment produces before it touches the disk.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub plots: Vec<PlotData>,
    pub laws: Vec<(String, EmpiricalLaw)>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn row(&self, statistic: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.statistic == statistic)
    }

    pub fn law(&self, label: &str) -> Option<&EmpiricalLaw> {
        self.laws.iter().find(|(l, _)| l == label).map(|(_, law)| law)
    }
}

pub fn rows_csv(rows: &[ReportRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Writes `<exp>.csv`, `<exp>.json`, `<exp>_<plot>.plot.csv`,
/// `<exp>_<label>.law` and any extra files into `dir`. Returns the paths.
pub fn write_outcome(dir: &Path, experiment: &str, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put(format!("{experiment}.csv"), &rows_csv(&outcome.rows))?;
    put(format!("{experiment}.json"), &(serde_json::to_string_pretty(&outcome.rows)? + "\n"))?;
    for p in &outcome.plots {
        put(format!("{experiment}_{}.plot.csv", p.name), &p.to_csv())?;
    }
    for (label, law) in &outcome.laws {
        put(format!("{experiment}_{label}.law"), &law.to_text())?;
    }
    for (name, body) in &outcome.files {
        put(name.clone(), body)?;
    }
    Ok(written)
}

/// Concatenates the rows of every report CSV in `dir` (sorted by file name)
/// into `summary.csv`.
pub fn aggregate(dir: &Path) -> Result<Vec<ReportRow>> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.file_name().is_some_and(|n| n != "summary.csv"))
        .collect();
    names.sort();
    let mut rows = Vec::new();
    for path in names {
        let text = fs::read_to_string(&path)?;
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            continue;
        }
        for line in lines.filter(|l| !l.is_empty()) {
            rows.push(ReportRow::from_csv(line).with_context(|| format!("in {}", path.display()))?);
        }
    }
    fs::write(dir.join("summary.csv"), rows_csv(&rows))?;
    Ok(rows)
}
