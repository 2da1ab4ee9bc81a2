use std::cmp::Ordering;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::random_sets::SetSample;

/// Occupancy of `n` equal cells of `(0, t)`; cell `k` is bit `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellPattern {
    n: usize,
    words: Vec<u64>,
}

impl CellPattern {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "a pattern needs at least one cell"));
        }
        Ok(CellPattern {
            n,
            words: vec![0; n.div_ceil(64)],
        })
    }

    pub fn from_cells(n: usize, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut p = Self::zeros(n)?;
        for k in cells {
            if k >= n {
                return Err(invalid("cells", format!("cell {k} out of range for n = {n}")));
            }
            p.set(k);
        }
        Ok(p)
    }

    /// Pattern of at most 64 cells from the low bits of `bits`.
    pub fn from_u64(n: usize, bits: u64) -> Result<Self> {
        if n > 64 || (n < 64 && bits >> n != 0) {
            return Err(invalid("bits", format!("{bits:#x} does not fit in {n} cells")));
        }
        let mut p = Self::zeros(n)?;
        p.words[0] = bits;
        Ok(p)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_cells(n, 0..n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize) -> bool {
        k < self.n && self.words[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn set(&mut self, k: usize) {
        assert!(k < self.n, "cell {k} out of range");
        self.words[k / 64] |= 1 << (k % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// True for the pattern of the empty set.
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&k| self.get(k))
    }

    /// Low 64 cells as an integer.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    pub fn is_subset_of(&self, other: &CellPattern) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &CellPattern) -> CellPattern {
        assert_eq!(self.n, other.n);
        CellPattern {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &CellPattern) -> CellPattern {
        assert_eq!(self.n, other.n);
        CellPattern {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// `self` on the first cells followed by `right`.
    pub fn concat(&self, right: &CellPattern) -> CellPattern {
        let mut out = CellPattern::zeros(self.n + right.n).expect("n > 0");
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for k in right.ones() {
            out.set(self.n + k);
        }
        out
    }

    /// The first `at` cells and the remaining `n - at` cells.
    pub fn split(&self, at: usize) -> Result<(CellPattern, CellPattern)> {
        if at == 0 || at >= self.n {
            return Err(invalid("at", format!("split point {at} must lie in 1..{}", self.n)));
        }
        let left = CellPattern::from_cells(at, self.ones().filter(|&k| k < at))?;
        let right = CellPattern::from_cells(self.n - at, self.ones().filter(|&k| k >= at).map(|k| k - at))?;
        Ok((left, right))
    }

    /// Block `b` of cells, `b * width .. (b + 1) * width`.
    pub fn block(&self, b: usize, width: usize) -> CellPattern {
        let lo = b * width;
        CellPattern::from_cells(width, self.ones().filter(|&k| k >= lo && k < lo + width).map(|k| k - lo))
            .expect("block inside pattern")
    }

    /// Merge groups of `factor` adjacent cells; a group is occupied if any of
    /// its cells is.
    pub fn coarsen(&self, factor: usize) -> Result<CellPattern> {
        if factor == 0 || self.n % factor != 0 {
            return Err(invalid("factor", format!("{factor} does not divide {}", self.n)));
        }
        CellPattern::from_cells(self.n / factor, self.ones().map(|k| k / factor))
    }

    /// Hex digits of the pattern read as a binary number, most significant
    /// first, `ceil(n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nib = (self.words[d / 16] >> ((d % 16) * 4)) & 0xf;
                char::from_digit(nib as u32, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut p = Self::zeros(n)?;
        let bad = || Error::Parse(format!("bad pattern `{hex}` for {n} cells"));
        if hex.is_empty() || hex.len() > n.div_ceil(4) {
            return Err(bad());
        }
        for (d, c) in hex.chars().rev().enumerate() {
            let nib = c.to_digit(16).ok_or_else(bad)? as u64;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let k = 4 * d + b;
                    if k >= n {
                        return Err(bad());
                    }
                    p.set(k);
                }
            }
        }
        Ok(p)
    }
}

impl Ord for CellPattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for CellPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Cell index of a point; cell `k` is `(k w, (k+1) w]`, and 0 goes to cell 0.
pub(crate) fn cell_of(x: f64, width: f64, n: usize) -> usize {
    let k = (x / width).ceil() as i64 - 1;
    k.clamp(0, n as i64 - 1) as usize
}

/// Cell pattern of a sample. Points on a cell boundary count for the left cell.
pub fn discretize(c: &SetSample, n: usize) -> Result<CellPattern> {
    let mut p = CellPattern::zeros(n)?;
    let width = c.horizon() / n as f64;
    if !(c.resolution() < width) {
        return Err(Error::ResolutionTooCoarse {
            resolution: c.resolution(),
            cell_width: width,
        });
    }
    for &x in c.points() {
        p.set(cell_of(x, width, n));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_sets::{rescale, PointKind};
    use proptest::prelude::*;

    fn set(t: f64, pts: &[f64]) -> SetSample {
        SetSample::uniform(t, 1e-9, pts.to_vec(), PointKind::Isolated).unwrap()
    }

    #[test]
    fn discretize_examples() {
        assert!(discretize(&set(1.0, &[]), 8).unwrap().is_empty());
        let n = 8;
        let p = discretize(&set(1.0, &[0.5 + 1.0 / (4.0 * n as f64)]), n).unwrap();
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![n / 2]);
        let fill: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
        let c = SetSample::uniform(1.0, 1e-3, fill, PointKind::Fill).unwrap();
        assert_eq!(discretize(&c, 16).unwrap(), CellPattern::full(16).unwrap());
    }

    #[test]
    fn boundary_points_go_left() {
        let p = discretize(&set(1.0, &[0.0, 0.25, 1.0]), 4).unwrap();
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn coarse_samples_are_rejected() {
        let c = SetSample::uniform(1.0, 0.2, vec![0.5], PointKind::Fill).unwrap();
        assert!(matches!(discretize(&c, 8), Err(Error::ResolutionTooCoarse { .. })));
        assert!(discretize(&c, 0).is_err());
    }

    #[test]
    fn hex_form() {
        let p = CellPattern::from_cells(8, [0, 3, 7]).unwrap();
        assert_eq!(p.to_hex(), "89");
        assert_eq!(CellPattern::from_hex(8, "89").unwrap(), p);
        assert_eq!(CellPattern::zeros(12).unwrap().to_hex(), "000");
        assert!(CellPattern::from_hex(6, "40").is_err());
        assert!(CellPattern::from_hex(8, "g1").is_err());
        let wide = CellPattern::from_cells(256, [0, 100, 255]).unwrap();
        assert_eq!(CellPattern::from_hex(256, &wide.to_hex()).unwrap(), wide);
    }

    #[test]
    fn ordering_is_numeric() {
        let a = CellPattern::from_cells(70, [65]).unwrap();
        let b = CellPattern::from_cells(70, [0, 1, 2, 63]).unwrap();
        assert!(b < a);
    }

    #[test]
    fn concat_and_split() {
        let l = CellPattern::from_cells(3, [1]).unwrap();
        let r = CellPattern::from_cells(5, [0, 4]).unwrap();
        let c = l.concat(&r);
        assert_eq!(c.ones().collect::<Vec<_>>(), vec![1, 3, 7]);
        assert_eq!(c.split(3).unwrap(), (l, r));
    }

    fn arb_set() -> impl Strategy<Value = SetSample> {
        proptest::collection::btree_set(0u32..=4096, 0..40).prop_map(|s| {
            let pts: Vec<f64> = s.into_iter().map(|k| f64::from(k) / 4096.0).collect();
            set(1.0, &pts)
        })
    }

    proptest! {
        #[test]
        fn discretize_is_monotone(a in arb_set(), b in arb_set()) {
            let mut pts: Vec<f64> = a.points().iter().chain(b.points()).copied().collect();
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let u = set(1.0, &pts);
            for n in [1usize, 4, 16, 64, 128] {
                prop_assert!(discretize(&a, n).unwrap().is_subset_of(&discretize(&u, n).unwrap()));
            }
        }

        #[test]
        fn coarsening_commutes_with_discretize(a in arb_set(), k in 0u32..6) {
            let n = 1usize << k;
            let fine = discretize(&a, 2 * n).unwrap();
            prop_assert_eq!(fine.coarsen(2).unwrap(), discretize(&a, n).unwrap());
            let doubled = rescale(&a, 2.0).unwrap();
            prop_assert_eq!(discretize(&doubled, n).unwrap(), discretize(&a, n).unwrap());
        }

        #[test]
        fn hex_round_trips(cells in proptest::collection::btree_set(0usize..200, 0..30), n in 200usize..260) {
            let p = CellPattern::from_cells(n, cells).unwrap();
            prop_assert_eq!(CellPattern::from_hex(n, &p.to_hex()).unwrap(), p);
        }
    }
}
