use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{product_law, CellPattern, EmpiricalLaw};

/// A vector of `L2(P)` for an empirical reference law `P`: one complex
/// amplitude per supported pattern, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternVector {
    reference: Arc<EmpiricalLaw>,
    amps: BTreeMap<CellPattern, Complex64>,
}

impl PatternVector {
    pub fn new(reference: Arc<EmpiricalLaw>, amps: BTreeMap<CellPattern, Complex64>) -> Result<Self> {
        if let Some(p) = amps.keys().find(|p| !reference.in_support(p)) {
            return Err(Error::SupportMismatch(format!(
                "pattern {} has an amplitude but no reference mass",
                p.to_hex()
            )));
        }
        let amps = amps.into_iter().filter(|(_, a)| *a != Complex64::ZERO).collect();
        Ok(PatternVector { reference, amps })
    }

    pub fn zero(reference: Arc<EmpiricalLaw>) -> Self {
        PatternVector {
            reference,
            amps: BTreeMap::new(),
        }
    }

    /// Amplitudes `f(C)` on the support of the reference.
    pub fn from_fn(reference: Arc<EmpiricalLaw>, mut f: impl FnMut(&CellPattern) -> Complex64) -> Self {
        let amps = reference
            .iter()
            .map(|(p, _)| (p.clone(), f(p)))
            .filter(|(_, a)| *a != Complex64::ZERO)
            .collect();
        PatternVector { reference, amps }
    }

    pub fn reference(&self) -> &Arc<EmpiricalLaw> {
        &self.reference
    }

    pub fn n(&self) -> usize {
        self.reference.n()
    }

    pub fn amplitude(&self, p: &CellPattern) -> Complex64 {
        self.amps.get(p).copied().unwrap_or(Complex64::ZERO)
    }

    /// Nonzero amplitudes in pattern order.
    pub fn iter(&self) -> impl Iterator<Item = (&CellPattern, Complex64)> + '_ {
        self.amps.iter().map(|(p, a)| (p, *a))
    }

    /// Same reference, amplitudes mapped pattern by pattern.
    pub fn map(&self, mut f: impl FnMut(&CellPattern, Complex64) -> Complex64) -> PatternVector {
        let amps = self
            .amps
            .iter()
            .map(|(p, a)| (p.clone(), f(p, *a)))
            .filter(|(_, a)| *a != Complex64::ZERO)
            .collect();
        PatternVector {
            reference: self.reference.clone(),
            amps,
        }
    }

    fn check_reference(&self, other: &PatternVector) -> Result<()> {
        if Arc::ptr_eq(&self.reference, &other.reference) || self.reference == other.reference {
            Ok(())
        } else {
            Err(Error::SupportMismatch("vectors are taken relative to different references".into()))
        }
    }

    /// `<self, other> = sum self(C) conj(other(C)) P(C)`.
    pub fn inner(&self, other: &PatternVector) -> Result<Complex64> {
        self.check_reference(other)?;
        Ok(self
            .amps
            .iter()
            .filter_map(|(p, a)| other.amps.get(p).map(|b| a * b.conj() * self.reference.mass(p)))
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|(p, a)| a.norm_sqr() * self.reference.mass(p)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> PatternVector {
        self.map(|_, a| a * c)
    }

    pub fn add(&self, other: &PatternVector) -> Result<PatternVector> {
        self.check_reference(other)?;
        let mut amps = self.amps.clone();
        for (p, b) in &other.amps {
            *amps.entry(p.clone()).or_insert(Complex64::ZERO) += b;
        }
        amps.retain(|_, a| *a != Complex64::ZERO);
        Ok(PatternVector {
            reference: self.reference.clone(),
            amps,
        })
    }

    pub fn sub(&self, other: &PatternVector) -> Result<PatternVector> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// The same element of the Hilbert space written relative to `new_ref`:
    /// amplitudes are multiplied by `sqrt(P_old / P_new)`.
    pub fn change_of_measure(&self, new_ref: Arc<EmpiricalLaw>) -> Result<PatternVector> {
        same_support(&self.reference, &new_ref)?;
        let amps = self
            .amps
            .iter()
            .map(|(p, a)| (p.clone(), a * (self.reference.mass(p) / new_ref.mass(p)).sqrt()))
            .collect();
        Ok(PatternVector { reference: new_ref, amps })
    }

    /// `psi_L (x) psi_R` relative to the product of the two references.
    pub fn tensor(&self, right: &PatternVector) -> Result<PatternVector> {
        let reference = Arc::new(product_law(&self.reference, &right.reference)?);
        let mut amps = BTreeMap::new();
        for (p, a) in &self.amps {
            for (q, b) in &right.amps {
                amps.insert(p.concat(q), a * b);
            }
        }
        Ok(PatternVector { reference, amps })
    }

    /// Amplitudes multiplied by `sqrt(P(C))`: coordinates in an orthonormal
    /// basis indexed by the supported patterns.
    pub fn counting_frame(&self) -> BTreeMap<CellPattern, Complex64> {
        self.amps
            .iter()
            .map(|(p, a)| (p.clone(), a * self.reference.mass(p).sqrt()))
            .collect()
    }

    /// Inverse of [`PatternVector::counting_frame`]. Coordinates off the
    /// support must vanish up to `tol` times the norm.
    pub fn from_counting_frame(
        reference: Arc<EmpiricalLaw>,
        coords: impl IntoIterator<Item = (CellPattern, Complex64)>,
        tol: f64,
    ) -> Result<PatternVector> {
        let mut amps = BTreeMap::new();
        let mut outside = 0.0;
        let mut total = 0.0;
        for (p, c) in coords {
            total += c.norm_sqr();
            let m = reference.mass(&p);
            if m > 0.0 {
                if c != Complex64::ZERO {
                    amps.insert(p, c / m.sqrt());
                }
            } else {
                outside += c.norm_sqr();
            }
        }
        if outside.sqrt() > tol * total.sqrt().max(f64::MIN_POSITIVE) {
            return Err(Error::SupportMismatch(format!(
                "result carries weight {:.3e} outside the reference support",
                outside.sqrt()
            )));
        }
        Ok(PatternVector { reference, amps })
    }

    /// Lines `reference=<label>` then `hex,re,im` per nonzero amplitude.
    pub fn to_text(&self, reference_label: &str) -> String {
        let mut out = format!("reference={reference_label}\n");
        for (p, a) in &self.amps {
            let _ = writeln!(out, "{},{:e},{:e}", p.to_hex(), a.re, a.im);
        }
        out
    }

    /// Parses [`PatternVector::to_text`] output against an already loaded
    /// reference; returns the label as well.
    pub fn from_text(text: &str, reference: Arc<EmpiricalLaw>) -> Result<(String, PatternVector)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty vector file".into()))?;
        let label = head
            .strip_prefix("reference=")
            .ok_or_else(|| Error::Parse(format!("expected `reference=...`, got `{head}`")))?
            .to_string();
        let mut amps = BTreeMap::new();
        for line in lines {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("expected `hex,re,im`, got `{line}`")));
            }
            let p = CellPattern::from_hex(reference.n(), f[0])?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
            amps.insert(p, Complex64::new(num(f[1])?, num(f[2])?));
        }
        Ok((label, PatternVector::new(reference, amps)?))
    }
}

fn same_support(a: &EmpiricalLaw, b: &EmpiricalLaw) -> Result<()> {
    a.check_same_grid(b)?;
    let sa = a.iter().map(|(p, _)| p);
    let sb = b.iter().map(|(p, _)| p);
    if a.support_size() != b.support_size() || !sa.zip(sb).all(|(x, y)| x == y) {
        return Err(Error::SupportMismatch("references are not equivalent".into()));
    }
    Ok(())
}

/// `v_t`: amplitude `1 / sqrt(P(empty))` on the empty pattern.
pub fn unit_v(reference: Arc<EmpiricalLaw>) -> Result<PatternVector> {
    let p0 = reference.empty_mass();
    if p0 <= 0.0 {
        return Err(Error::NoAtom);
    }
    let empty = CellPattern::zeros(reference.n())?;
    let mut amps = BTreeMap::new();
    amps.insert(empty, Complex64::new(1.0 / p0.sqrt(), 0.0));
    Ok(PatternVector { reference, amps })
}

/// A finite measure on cell patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMeasure {
    n: usize,
    t: f64,
    mass: BTreeMap<CellPattern, f64>,
}

impl VectorMeasure {
    pub fn new(n: usize, t: f64) -> Self {
        VectorMeasure {
            n,
            t,
            mass: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn add(&mut self, p: CellPattern, m: f64) {
        if m != 0.0 {
            *self.mass.entry(p).or_insert(0.0) += m;
        }
    }

    pub fn mass(&self, p: &CellPattern) -> f64 {
        self.mass.get(p).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellPattern, f64)> + '_ {
        self.mass.iter().map(|(p, m)| (p, *m))
    }

    /// Mass of `{C : pred(C)}`.
    pub fn mass_where(&self, mut pred: impl FnMut(&CellPattern) -> bool) -> f64 {
        self.mass.iter().filter(|(p, _)| pred(p)).map(|(_, m)| m).sum()
    }

    pub fn product(&self, right: &VectorMeasure) -> VectorMeasure {
        let mut out = VectorMeasure::new(self.n + right.n, self.t + right.t);
        for (p, a) in &self.mass {
            for (q, b) in &right.mass {
                out.add(p.concat(q), a * b);
            }
        }
        out
    }

    /// Image measure under `f`.
    pub fn pushforward(&self, mut f: impl FnMut(&CellPattern) -> CellPattern) -> VectorMeasure {
        let mut out = VectorMeasure::new(self.n, self.t);
        for (p, m) in &self.mass {
            out.add(f(p), *m);
        }
        out
    }

    /// Largest pattern-wise difference of masses.
    pub fn max_difference(&self, other: &VectorMeasure) -> f64 {
        let keys = self.mass.keys().chain(other.mass.keys());
        keys.map(|p| (self.mass(p) - other.mass(p)).abs()).fold(0.0, f64::max)
    }
}

/// `|psi|^2`: mass `|psi(C)|^2 P(C)` on each pattern.
pub fn vector_measure(psi: &PatternVector) -> VectorMeasure {
    let r = psi.reference();
    let mut out = VectorMeasure::new(r.n(), r.t());
    for (p, a) in psi.iter() {
        out.add(p.clone(), a.norm_sqr() * r.mass(p));
    }
    out
}
