use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::{discretize, CellPattern, Diagnostic, Verdict};
use crate::random_sets::{derived_set, time_reverse, SetSample};

use super::ops::ElementarySet;
use super::vector::{vector_measure, PatternVector, VectorMeasure};

/// The map `C -> C'` seen on patterns: for each supported pattern, the
/// pattern of its set of accumulation points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivedStructure {
    map: BTreeMap<CellPattern, CellPattern>,
}

impl DerivedStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `pattern -> derived`; a second, different value for the same
    /// pattern is an error, since the map would then not be a function of
    /// the pattern at this resolution.
    pub fn insert(&mut self, pattern: CellPattern, derived: CellPattern) -> Result<()> {
        if derived.len() != pattern.len() || !derived.is_subset_of(&pattern) {
            return Err(Error::GridMismatch(format!(
                "derived pattern {} is not inside {}",
                derived.to_hex(),
                pattern.to_hex()
            )));
        }
        match self.map.get(&pattern) {
            Some(d) if *d != derived => Err(Error::SupportMismatch(format!(
                "pattern {} has derived patterns {} and {}; refine the grid",
                pattern.to_hex(),
                d.to_hex(),
                derived.to_hex()
            ))),
            _ => {
                self.map.insert(pattern, derived);
                Ok(())
            }
        }
    }

    /// Structure read off flagged samples on `n` cells.
    pub fn from_samples<'a>(samples: impl IntoIterator<Item = &'a SetSample>, n: usize) -> Result<Self> {
        let mut s = Self::new();
        for c in samples {
            s.insert(discretize(c, n)?, discretize(&derived_set(c)?, n)?)?;
        }
        Ok(s)
    }

    /// Every pattern of `patterns` taken as a finite set (empty derived set).
    pub fn finite<'a>(patterns: impl IntoIterator<Item = &'a CellPattern>) -> Result<Self> {
        let mut s = Self::new();
        for p in patterns {
            s.insert(p.clone(), CellPattern::zeros(p.len())?)?;
        }
        Ok(s)
    }

    pub fn get(&self, p: &CellPattern) -> Option<&CellPattern> {
        self.map.get(p)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Structure of concatenations: `(C1 u (s + C2))' = C1' u (s + C2')`.
    pub fn concat(&self, right: &DerivedStructure) -> DerivedStructure {
        let mut map = BTreeMap::new();
        for (p, d) in &self.map {
            for (q, e) in &right.map {
                map.insert(p.concat(q), d.concat(e));
            }
        }
        DerivedStructure { map }
    }

    fn lookup(&self, p: &CellPattern) -> Result<&CellPattern> {
        self.map
            .get(p)
            .ok_or_else(|| Error::SupportMismatch(format!("no derived pattern for {}", p.to_hex())))
    }
}

/// `{|psi|'}^2`: the image of `|psi|^2` under `C -> C'`.
pub fn derived_measure(psi: &PatternVector, structure: &DerivedStructure) -> Result<VectorMeasure> {
    let m = vector_measure(psi);
    let mut out = VectorMeasure::new(m.n(), m.t());
    for (p, mass) in m.iter() {
        out.add(structure.lookup(p)?.clone(), mass);
    }
    Ok(out)
}

/// `Q'_{t,E}`: keeps amplitudes of patterns whose derived pattern lies in `E`.
pub fn project_qprime_e(psi: &PatternVector, e: &ElementarySet, structure: &DerivedStructure) -> Result<PatternVector> {
    if e.n() != psi.n() {
        return Err(Error::GridMismatch(format!("E has {} cells, vector has {}", e.n(), psi.n())));
    }
    for (p, _) in psi.reference().iter() {
        structure.lookup(p)?;
    }
    Ok(psi.map(|p, a| {
        if e.contains(structure.get(p).expect("checked")) {
            a
        } else {
            num_complex::Complex64::ZERO
        }
    }))
}

/// Orientation counts of one ensemble of flagged sets; mergeable, so the
/// ensemble can be tallied in pieces.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Profile {
    pub samples: u64,
    pub derived: u64,
    pub second: u64,
    pub left: u64,
    pub right: u64,
    pub max_left: u64,
    pub max_right: u64,
}

impl Profile {
    pub fn add(&mut self, c: &SetSample) -> Result<()> {
        self.samples += 1;
        let d = derived_set(c)?;
        if !d.is_empty() {
            self.derived += 1;
            if !derived_set(&d)?.is_empty() {
                self.second += 1;
            }
        }
        let (l, r) = (c.left_limit_count() as u64, c.right_limit_count() as u64);
        self.left += l;
        self.right += r;
        self.max_left = self.max_left.max(l);
        self.max_right = self.max_right.max(r);
        Ok(())
    }

    pub fn merge(&mut self, o: &Profile) {
        self.samples += o.samples;
        self.derived += o.derived;
        self.second += o.second;
        self.left += o.left;
        self.right += o.right;
        self.max_left = self.max_left.max(o.max_left);
        self.max_right = self.max_right.max(o.max_right);
    }
}

/// Running tally behind [`asymmetry_statistic`]: the profile of the samples,
/// the profile of their time reversals, and the first two moments of the
/// per-sample difference between left-limit and right-limit counts. All
/// fields are integers, so merging is exact in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AsymmetryTally {
    pub forward: Profile,
    pub reversed: Profile,
    sum_d: i64,
    sum_d2: u64,
}

impl AsymmetryTally {
    pub fn add(&mut self, c: &SetSample) -> Result<()> {
        self.forward.add(c)?;
        self.reversed.add(&time_reverse(c))?;
        let d = c.left_limit_count() as i64 - c.right_limit_count() as i64;
        self.sum_d += d;
        self.sum_d2 += (d * d) as u64;
        Ok(())
    }

    pub fn merge(&mut self, o: &AsymmetryTally) {
        self.forward.merge(&o.forward);
        self.reversed.merge(&o.reversed);
        self.sum_d += o.sum_d;
        self.sum_d2 += o.sum_d2;
    }

    /// The statistic described at [`asymmetry_statistic`].
    pub fn diagnostic(&self) -> Result<Diagnostic> {
        let (fwd, rev) = (&self.forward, &self.reversed);
        let n = fwd.samples;
        if n == 0 {
            return Err(Error::InsufficientData("no samples".into()));
        }
        let nf = n as f64;
        let mean = self.sum_d as f64 / nf;
        let var = if n > 1 {
            ((self.sum_d2 as f64 - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        // counts are integers; one unit in one sample is the finest detectable spread
        let se = var.sqrt().max(1.0 / nf) / nf.sqrt();
        let z = mean / se;
        let (second_lo, second_hi) = wilson(fwd.second, n);
        let verdict = if z > 5.0 && second_lo > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let frac = |k: u64| k as f64 / nf;
        let mut d = Diagnostic::new("asymmetry", z, 5.0, verdict)
            .with_extra("derived_nonempty", frac(fwd.derived))
            .with_extra("second_derived_nonempty", frac(fwd.second))
            .with_extra("second_derived_ci_lo", second_lo)
            .with_extra("second_derived_ci_hi", second_hi)
            .with_extra("left_limits_mean", frac(fwd.left))
            .with_extra("right_limits_mean", frac(fwd.right))
            .with_extra("max_right_limits", fwd.max_right as f64)
            .with_extra("reversed_left_limits_mean", frac(rev.left))
            .with_extra("reversed_right_limits_mean", frac(rev.right))
            .with_extra("reversed_max_left_limits", rev.max_left as f64)
            .with_extra("reversed_second_derived_nonempty", frac(rev.second));
        d.n_a = n;
        d.n_b = n;
        Ok(d)
    }
}

/// 99% Wilson interval for `k` successes out of `n`.
fn wilson(k: u64, n: u64) -> (f64, f64) {
    let (z, nf) = (2.575_829_303_548_901, n as f64);
    let ph = k as f64 / nf;
    let centre = ph + z * z / (2.0 * nf);
    let half = z * (ph * (1.0 - ph) / nf + z * z / (4.0 * nf * nf)).sqrt();
    let den = 1.0 + z * z / nf;
    let lo = if k == 0 { 0.0 } else { ((centre - half) / den).max(0.0) };
    let hi = if k == n { 1.0 } else { ((centre + half) / den).min(1.0) };
    (lo, hi)
}

/// Orientation fingerprint of a sample of flagged sets against its time
/// reversal.
///
/// The statistic is the z-score of the mean per-sample difference between
/// left-limit and right-limit counts; under reversal the difference changes
/// sign, so a law invariant under reversal has mean zero. The verdict is
/// `pass` (asymmetric) when the z-score exceeds 5 and the frequency of a
/// nonempty second derived set has a 99% interval excluding 0.
pub fn asymmetry_statistic(samples: &[SetSample]) -> Result<Diagnostic> {
    let mut tally = AsymmetryTally::default();
    for c in samples {
        tally.add(c)?;
    }
    tally.diagnostic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vector::tests::{full_law, random_vector};
    use crate::countable::{JumpSetSampler, LadderSpec, RateFunction, Site};
    use crate::random_sets::{PointKind, SetSampler, Side};
    use crate::rng::stream;

    #[test]
    fn finite_structure_makes_q_prime_trivial() {
        let r = full_law(6, 1.0, 5, 9);
        let psi = random_vector(r.clone(), &[(0.5, 0.1), (-1.0, 0.3), (0.2, -0.8)]);
        let s = DerivedStructure::finite(r.iter().map(|(p, _)| p)).unwrap();
        for bits in [0u64, 0b11, 0b101010] {
            let e = ElementarySet::from_mask(CellPattern::from_u64(6, bits).unwrap());
            assert_eq!(project_qprime_e(&psi, &e, &s).unwrap(), psi);
        }
        let m = derived_measure(&psi, &s).unwrap();
        assert_eq!(m.iter().count(), 1);
        assert!((m.mass(&CellPattern::zeros(6).unwrap()) - psi.norm_sqr()).abs() < 1e-12);
    }

    fn staircase() -> (PatternVector, DerivedStructure) {
        let r = full_law(4, 1.0, 3, 7);
        let mut s = DerivedStructure::new();
        for (p, _) in r.iter() {
            // the lowest occupied cell plays the accumulation point
            let d = match p.ones().next() {
                Some(k) if p.count_ones() > 1 => CellPattern::from_cells(4, [k]).unwrap(),
                _ => CellPattern::zeros(4).unwrap(),
            };
            s.insert(p.clone(), d).unwrap();
        }
        (random_vector(r, &[(0.5, 0.1), (-1.0, 0.3), (0.2, -0.8), (0.9, 0.0)]), s)
    }

    #[test]
    fn q_prime_examples() {
        let (psi, s) = staircase();
        assert_eq!(project_qprime_e(&psi, &ElementarySet::full(4).unwrap(), &s).unwrap(), psi);
        let m = derived_measure(&psi, &s).unwrap();
        assert!((m.total() - psi.norm_sqr()).abs() < 1e-12);
        let e = ElementarySet::from_cells(4, [0]).unwrap();
        let q = project_qprime_e(&psi, &e, &s).unwrap();
        let expect = m.mass_where(|d| e.contains(d));
        assert!((q.norm_sqr() - expect).abs() < 1e-12);
        assert!(project_qprime_e(&psi, &e, &DerivedStructure::new()).is_err());
    }

    #[test]
    fn q_prime_factors_over_cuts() {
        let (psi, s) = staircase();
        let joint = psi.tensor(&psi).unwrap();
        let js = s.concat(&s);
        for (a, b) in [(0b0001u64, 0b0000u64), (0b0011, 0b0101), (0b1111, 0b0010)] {
            let ea = ElementarySet::from_mask(CellPattern::from_u64(4, a).unwrap());
            let eb = ElementarySet::from_mask(CellPattern::from_u64(4, b).unwrap());
            let lhs = project_qprime_e(&joint, &ea.concat(&eb), &js).unwrap();
            let rhs = project_qprime_e(&psi, &ea, &s).unwrap().tensor(&project_qprime_e(&psi, &eb, &s).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn conflicting_structure_is_rejected() {
        let mut s = DerivedStructure::new();
        let p = CellPattern::from_u64(4, 0b11).unwrap();
        s.insert(p.clone(), CellPattern::from_u64(4, 0b01).unwrap()).unwrap();
        assert!(s.insert(p.clone(), CellPattern::from_u64(4, 0b10).unwrap()).is_err());
        assert!(s.insert(p, CellPattern::from_u64(4, 0b100).unwrap()).is_err());
    }

    #[test]
    fn structure_from_samples() {
        let c = SetSample::new(1.0, 1e-6, vec![0.1, 0.3, 0.6], vec![PointKind::Isolated, PointKind::LEFT_LIMIT, PointKind::Isolated]).unwrap();
        let s = DerivedStructure::from_samples([&c], 4).unwrap();
        assert_eq!(s.get(&CellPattern::from_u64(4, 0b0111).unwrap()), Some(&CellPattern::from_u64(4, 0b0010).unwrap()));
        let bare = SetSample::from_line("1 0.001 0.5").unwrap();
        assert!(matches!(DerivedStructure::from_samples([&bare], 4), Err(Error::MissingFlags { .. })));
    }

    fn jump_samples(spec: LadderSpec, n: u64) -> Vec<SetSample> {
        let s = JumpSetSampler::new(spec, RateFunction::default(), Site::integer(0), 2.0).unwrap();
        (0..n).map(|i| s.sample_with(&mut stream(40, i)).unwrap()).collect()
    }

    #[test]
    fn ladder2_is_asymmetric() {
        let d = asymmetry_statistic(&jump_samples(LadderSpec::ladder2(40).unwrap(), 2000)).unwrap();
        assert!(d.passed(), "{:?}", d);
        assert_eq!(d.extra("max_right_limits"), Some(0.0));
        assert_eq!(d.extra("reversed_max_left_limits"), Some(0.0));
        assert!(d.extra("second_derived_ci_lo").unwrap() > 0.0);
    }

    #[test]
    fn ladder1_has_no_second_derived_set() {
        let d = asymmetry_statistic(&jump_samples(LadderSpec::ladder1(40).unwrap(), 2000)).unwrap();
        assert_eq!(d.extra("second_derived_nonempty"), Some(0.0));
        assert_eq!(d.verdict, Verdict::Fail);
        assert!(d.statistic > 5.0);
    }

    #[test]
    fn reversal_symmetric_samples_are_not_flagged() {
        let both = PointKind::Accumulation { rank: 2, side: Side::Both };
        let c = SetSample::new(1.0, 1e-6, vec![0.5], vec![both]).unwrap();
        let d = asymmetry_statistic(&vec![c; 500]).unwrap();
        assert_eq!(d.statistic, 0.0);
        assert_eq!(d.verdict, Verdict::Fail);
        assert!(asymmetry_statistic(&[]).is_err());
    }
}
