use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::random_sets::SetSampler;
use crate::rng::stream;

use super::pattern::{discretize, CellPattern};

/// Counts of cell patterns over `(0, t)` with `n` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    n: usize,
    t: f64,
    counts: BTreeMap<CellPattern, u64>,
    total: u64,
}

impl EmpiricalLaw {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "need at least one cell"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        Ok(EmpiricalLaw {
            n,
            t,
            counts: BTreeMap::new(),
            total: 0,
        })
    }

    /// `count` copies of a single pattern.
    pub fn point_mass(t: f64, pattern: CellPattern, count: u64) -> Result<Self> {
        let mut law = Self::new(pattern.len(), t)?;
        law.add_count(pattern, count)?;
        Ok(law)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cell_width(&self) -> f64 {
        self.t / self.n as f64
    }

    pub fn add(&mut self, pattern: CellPattern) -> Result<()> {
        self.add_count(pattern, 1)
    }

    pub fn add_count(&mut self, pattern: CellPattern, count: u64) -> Result<()> {
        if pattern.len() != self.n {
            return Err(Error::GridMismatch(format!(
                "pattern has {} cells, law has {}",
                pattern.len(),
                self.n
            )));
        }
        if count == 0 {
            return Ok(());
        }
        self.total = self.total.checked_add(count).ok_or(Error::CountOverflow)?;
        *self.counts.entry(pattern).or_insert(0) += count;
        Ok(())
    }

    pub fn check_same_grid(&self, other: &EmpiricalLaw) -> Result<()> {
        if self.n != other.n || self.t != other.t {
            return Err(Error::GridMismatch(format!(
                "(n={}, t={}) vs (n={}, t={})",
                self.n, self.t, other.n, other.t
            )));
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &EmpiricalLaw) -> Result<()> {
        self.check_same_grid(other)?;
        for (p, &c) in &other.counts {
            self.add_count(p.clone(), c)?;
        }
        Ok(())
    }

    pub fn count(&self, pattern: &CellPattern) -> u64 {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    pub fn mass(&self, pattern: &CellPattern) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(pattern) as f64 / self.total as f64
    }

    /// Count of the all-zero pattern.
    pub fn empty_count(&self) -> u64 {
        self.count(&CellPattern::zeros(self.n).expect("n > 0"))
    }

    pub fn empty_mass(&self) -> f64 {
        self.mass(&CellPattern::zeros(self.n).expect("n > 0"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellPattern, u64)> + '_ {
        self.counts.iter().map(|(p, &c)| (p, c))
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn in_support(&self, pattern: &CellPattern) -> bool {
        self.counts.contains_key(pattern)
    }

    /// Law of the first `cells` cells, on `(0, cells * width)`.
    pub fn left_marginal(&self, cells: usize) -> Result<EmpiricalLaw> {
        let mut out = EmpiricalLaw::new(cells, self.cell_width() * cells as f64)?;
        for (p, c) in self.iter() {
            out.add_count(p.split(cells)?.0, c)?;
        }
        Ok(out)
    }

    /// Law of the last `n - cells` cells, shifted to start at 0.
    pub fn right_marginal(&self, cells: usize) -> Result<EmpiricalLaw> {
        let rest = self.n - cells;
        let mut out = EmpiricalLaw::new(rest, self.cell_width() * rest as f64)?;
        for (p, c) in self.iter() {
            out.add_count(p.split(cells)?.1, c)?;
        }
        Ok(out)
    }

    /// Text form: header `n=..,t=..,total=..`, then `hex,count` sorted by pattern.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={},t={},total={}\n", self.n, self.t, self.total);
        for (p, c) in self.iter() {
            writeln!(out, "{},{}", p.to_hex(), c).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty law file".into()))?;
        let mut n = None;
        let mut t = None;
        let mut total = None;
        for field in header.split(',') {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
            let bad = || Error::Parse(format!("bad header value `{field}`"));
            match k.trim() {
                "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
                "t" => t = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
                "total" => total = Some(v.trim().parse::<u64>().map_err(|_| bad())?),
                _ => return Err(Error::Parse(format!("unknown header key `{k}`"))),
            }
        }
        let (n, t, total) = match (n, t, total) {
            (Some(n), Some(t), Some(total)) => (n, t, total),
            _ => return Err(Error::Parse("header needs n, t and total".into())),
        };
        let mut law = EmpiricalLaw::new(n, t)?;
        for line in lines {
            let (hex, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad law line `{line}`")))?;
            let c: u64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad count in `{line}`")))?;
            law.add_count(CellPattern::from_hex(n, hex.trim())?, c)?;
        }
        if law.total != total {
            return Err(Error::Parse(format!("header total {total} but counts sum to {}", law.total)));
        }
        Ok(law)
    }
}

/// Law of `C1 u (C2 + s)` for independent `C1 ~ left`, `C2 ~ right`. Counts
/// multiply, so the total is `left.total * right.total`.
pub fn product_law(left: &EmpiricalLaw, right: &EmpiricalLaw) -> Result<EmpiricalLaw> {
    let (wl, wr) = (left.cell_width(), right.cell_width());
    if (wl - wr).abs() > 1e-12 * wl.max(wr) {
        return Err(Error::GridMismatch(format!("cell widths {wl} and {wr} differ")));
    }
    let mut out = EmpiricalLaw::new(left.n + right.n, left.t + right.t)?;
    for (p, a) in left.iter() {
        for (q, b) in right.iter() {
            out.add_count(p.concat(q), a.checked_mul(b).ok_or(Error::CountOverflow)?)?;
        }
    }
    Ok(out)
}

/// Law of samples `range` of `sampler` (sample `i` uses substream `i` of `seed`).
pub fn estimate_law_range(
    sampler: &dyn SetSampler,
    n: usize,
    seed: u64,
    range: Range<u64>,
) -> Result<EmpiricalLaw> {
    let mut law = EmpiricalLaw::new(n, sampler.horizon())?;
    for i in range {
        let c = sampler.sample_with(&mut stream(seed, i))?;
        law.add(discretize(&c, n)?)?;
    }
    Ok(law)
}

pub fn estimate_law(sampler: &dyn SetSampler, n: usize, samples: u64, seed: u64) -> Result<EmpiricalLaw> {
    if samples == 0 {
        return Err(invalid("N", "need at least one sample"));
    }
    estimate_law_range(sampler, n, seed, 0..samples)
}
