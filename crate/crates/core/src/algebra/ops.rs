use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::measure::{CellPattern, EmpiricalLaw};
use crate::rng::seeded;

use super::vector::PatternVector;

/// Largest grid on which operators are applied densely.
pub const MAX_DENSE_CELLS: usize = 20;

pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;

const SUPPORT_TOL: f64 = 1e-12;

/// A union of cell-aligned intervals of `(0, t)`, stored as its cell mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySet {
    mask: CellPattern,
}

impl ElementarySet {
    pub fn empty(n: usize) -> Result<Self> {
        Ok(ElementarySet {
            mask: CellPattern::zeros(n)?,
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        Ok(ElementarySet {
            mask: CellPattern::full(n)?,
        })
    }

    pub fn from_cells(n: usize, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        Ok(ElementarySet {
            mask: CellPattern::from_cells(n, cells)?,
        })
    }

    pub fn from_mask(mask: CellPattern) -> Self {
        ElementarySet { mask }
    }

    /// Union of the intervals `(a, b)`; every endpoint must be a cell boundary.
    pub fn from_intervals(n: usize, t: f64, intervals: &[(f64, f64)]) -> Result<Self> {
        let w = t / n as f64;
        let boundary = |x: f64| -> Result<usize> {
            let k = (x / w).round();
            if !(0.0..=n as f64).contains(&k) || (x - k * w).abs() > 1e-9 * w.max(1.0) {
                return Err(invalid("E", format!("{x} is not a cell boundary of the {n}-cell grid")));
            }
            Ok(k as usize)
        };
        let mut mask = CellPattern::zeros(n)?;
        for &(a, b) in intervals {
            let (lo, hi) = (boundary(a)?, boundary(b)?);
            if lo > hi {
                return Err(invalid("E", format!("interval ({a}, {b}) is reversed")));
            }
            (lo..hi).for_each(|k| mask.set(k));
        }
        Ok(ElementarySet { mask })
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &CellPattern {
        &self.mask
    }

    pub fn contains(&self, p: &CellPattern) -> bool {
        p.is_subset_of(&self.mask)
    }

    pub fn intersection(&self, other: &ElementarySet) -> ElementarySet {
        ElementarySet {
            mask: self.mask.intersection(&other.mask),
        }
    }

    pub fn union(&self, other: &ElementarySet) -> ElementarySet {
        ElementarySet {
            mask: self.mask.union(&other.mask),
        }
    }

    /// `E1 u (s + E2)` on the concatenated grid.
    pub fn concat(&self, right: &ElementarySet) -> ElementarySet {
        ElementarySet {
            mask: self.mask.concat(&right.mask),
        }
    }

    /// `t - E`.
    pub fn reversed(&self) -> ElementarySet {
        let n = self.n();
        ElementarySet {
            mask: CellPattern::from_cells(n, self.mask.ones().map(|k| n - 1 - k)).expect("same size"),
        }
    }
}

/// `Q_{t,E}`: keeps the amplitudes of patterns inside `E`.
pub fn project_q_e(psi: &PatternVector, e: &ElementarySet) -> Result<PatternVector> {
    if e.n() != psi.n() {
        return Err(Error::GridMismatch(format!("E has {} cells, vector has {}", e.n(), psi.n())));
    }
    Ok(psi.map(|p, a| if e.contains(p) { a } else { Complex64::ZERO }))
}

/// `Q_t = Q_{t, empty}`.
pub fn project_q(psi: &PatternVector) -> Result<PatternVector> {
    project_q_e(psi, &ElementarySet::empty(psi.n())?)
}

/// `U_{t,p}`: amplitude times `p^|C|`, `|C|` the number of occupied cells.
pub fn op_u_p(psi: &PatternVector, p: f64) -> Result<PatternVector> {
    check_p(p)?;
    Ok(psi.map(|c, a| a * p.powi(c.count_ones() as i32)))
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(invalid("p", format!("must lie in (0, 1], got {p}")))
    }
}

/// A multiplicative unit on a grid of cell width `width`: on each cell the
/// normalized block `(alpha, beta)` (empty, occupied) in the counting frame,
/// times the phase `exp(i lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    width: f64,
    alpha: Complex64,
    beta: Complex64,
    phase: f64,
}

impl UnitVector {
    pub fn new(width: f64, alpha: Complex64, beta: Complex64, phase: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("width", format!("must be positive, got {width}")));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("u", format!("block norm^2 is {norm}, not 1")));
        }
        if !phase.is_finite() {
            return Err(invalid("phase", "must be finite"));
        }
        Ok(UnitVector {
            width,
            alpha,
            beta,
            phase,
        })
    }

    /// `v`: all weight on the empty pattern.
    pub fn v(width: f64) -> Result<Self> {
        Self::new(width, Complex64::ONE, Complex64::ZERO, 0.0)
    }

    /// The real unit with `<u_t, v_t> = exp(-gamma t)`.
    pub fn with_gamma(gamma: f64, width: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be nonnegative, got {gamma}")));
        }
        let a = (-gamma * width).exp();
        Self::new(width, Complex64::new(a, 0.0), Complex64::new((1.0 - a * a).max(0.0).sqrt(), 0.0), 0.0)
    }

    pub fn with_phase(self, phase: f64) -> Result<Self> {
        Self::new(self.width, self.alpha, self.beta, phase)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn block(&self) -> (Complex64, Complex64) {
        (self.alpha, self.beta)
    }

    /// Counting-frame amplitude of `u_t` on a pattern, `t = width * len`.
    pub fn coordinate(&self, p: &CellPattern) -> Complex64 {
        let k = p.count_ones() as i32;
        let m = p.len() as i32 - k;
        let t = self.width * p.len() as f64;
        self.alpha.powi(m) * self.beta.powi(k) * Complex64::from_polar(1.0, self.phase * t)
    }

    /// `<u_t, other_t>` on `cells` cells, from the per-cell factors.
    pub fn inner(&self, other: &UnitVector, cells: usize) -> Complex64 {
        let block = self.alpha * other.alpha.conj() + self.beta * other.beta.conj();
        let t = self.width * cells as f64;
        block.powi(cells as i32) * Complex64::from_polar(1.0, (self.phase - other.phase) * t)
    }

    /// `u_t` relative to `reference`; fails when `u_t` has weight off the
    /// reference support.
    pub fn to_vector(&self, reference: Arc<EmpiricalLaw>) -> Result<PatternVector> {
        let n = reference.n();
        check_dense(n)?;
        let coords = (0..1u64 << n).map(|b| {
            let p = CellPattern::from_u64(n, b).expect("fits");
            let c = self.coordinate(&p);
            (p, c)
        });
        PatternVector::from_counting_frame(reference, coords, SUPPORT_TOL)
    }

    fn dense_block(&self, m: usize) -> Vec<Complex64> {
        (0..1u64 << m)
            .map(|b| self.alpha.powi(m as i32 - b.count_ones() as i32) * self.beta.powi(b.count_ones() as i32))
            .collect()
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_CELLS {
        return Err(invalid("n", format!("{n} cells exceed the dense limit {MAX_DENSE_CELLS}")));
    }
    Ok(())
}

fn dense(psi: &PatternVector) -> Result<Vec<Complex64>> {
    check_dense(psi.n())?;
    let mut x = vec![Complex64::ZERO; 1 << psi.n()];
    for (p, c) in psi.counting_frame() {
        x[p.low_word() as usize] = c;
    }
    Ok(x)
}

fn undense(reference: Arc<EmpiricalLaw>, x: &[Complex64]) -> Result<PatternVector> {
    let n = reference.n();
    let coords = x
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::ZERO)
        .map(|(b, c)| (CellPattern::from_u64(n, b as u64).expect("fits"), *c));
    PatternVector::from_counting_frame(reference, coords, SUPPORT_TOL)
}

/// `((1-p) Q_u + p 1)^{(x) blocks}` applied in place to counting-frame
/// coordinates over all `2^cells` patterns.
pub(crate) fn apply_u_p_n_u(x: &mut [Complex64], cells: usize, p: f64, blocks: usize, u: &UnitVector) {
    let m = cells / blocks;
    let ub = u.dense_block(m);
    let size = 1usize << m;
    let mut buf = vec![Complex64::ZERO; size];
    for j in 0..blocks {
        let shift = j * m;
        let mask = (size - 1) << shift;
        for base in (0..x.len()).filter(|i| i & mask == 0) {
            let mut s = Complex64::ZERO;
            for (c, slot) in buf.iter_mut().enumerate() {
                *slot = x[base | (c << shift)];
                s += *slot * ub[c].conj();
            }
            for (c, v) in buf.iter().enumerate() {
                x[base | (c << shift)] = v * p + ub[c] * s * (1.0 - p);
            }
        }
    }
}

fn check_blocks(cells: usize, blocks: usize) -> Result<()> {
    if blocks == 0 || cells % blocks != 0 {
        return Err(Error::GridMismatch(format!("{blocks} blocks do not divide {cells} cells")));
    }
    Ok(())
}

/// `U_{t,p,n,u} = ((1-p) Q_{t/n,u} + p 1_{t/n})^{(x) n}` with `n = blocks`.
pub fn op_u_p_n_u(psi: &PatternVector, p: f64, blocks: usize, u: &UnitVector) -> Result<PatternVector> {
    check_p(p)?;
    check_blocks(psi.n(), blocks)?;
    let w = psi.reference().cell_width();
    if (u.width() - w).abs() > 1e-12 * w {
        return Err(Error::GridMismatch(format!("unit width {} vs cell width {w}", u.width())));
    }
    let mut x = dense(psi)?;
    apply_u_p_n_u(&mut x, psi.n(), p, blocks, u);
    undense(psi.reference().clone(), &x)
}

/// Operator norm of a self-adjoint map on `C^dim`, by power iteration on its
/// square from a fixed random start.
pub fn self_adjoint_norm(dim: usize, mut apply: impl FnMut(&[Complex64]) -> Vec<Complex64>) -> Result<f64> {
    let mut rng = seeded(0x5eed_0f_a5);
    let mut x: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut x);
    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        let y = apply(&x);
        let lambda = norm2(&y);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        if (lambda - prev).abs() <= POWER_TOL {
            return Ok(lambda);
        }
        prev = lambda;
        x = apply(&y);
        normalize(&mut x);
        if x.iter().all(|c| *c == Complex64::ZERO) {
            return Ok(0.0);
        }
    }
    Err(invalid("power_iteration", format!("no convergence in {POWER_MAX_ITER} steps")))
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let n = norm2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|c| *c /= n);
    }
}

fn dense_unit(u: &UnitVector, cells: usize) -> Vec<Complex64> {
    (0..1u64 << cells)
        .map(|b| u.coordinate(&CellPattern::from_u64(cells, b).expect("fits")))
        .collect()
}

/// `||Q_{t,u} - Q_{t,v}||` on the full `cells`-cell grid, computed numerically.
pub fn norm_q_diff(u: &UnitVector, v: &UnitVector, cells: usize) -> Result<f64> {
    check_dense(cells)?;
    if (u.width() - v.width()).abs() > 1e-12 * u.width() {
        return Err(Error::GridMismatch("units on different grids".into()));
    }
    let (du, dv) = (dense_unit(u, cells), dense_unit(v, cells));
    for d in [&du, &dv] {
        if (norm2(d) - 1.0).abs() > 1e-9 {
            return Err(invalid("u", "unit vectors must be normalized"));
        }
    }
    self_adjoint_norm(du.len(), |x| {
        let su: Complex64 = x.iter().zip(&du).map(|(a, b)| a * b.conj()).sum();
        let sv: Complex64 = x.iter().zip(&dv).map(|(a, b)| a * b.conj()).sum();
        du.iter().zip(&dv).map(|(a, b)| a * su - b * sv).collect()
    })
}

/// `||U_{t,p,n,u} - U_{t,p,n,v}||` on the full `cells`-cell grid.
pub fn norm_u_diff(p: f64, blocks: usize, u: &UnitVector, v: &UnitVector, cells: usize) -> Result<f64> {
    check_p(p)?;
    check_dense(cells)?;
    check_blocks(cells, blocks)?;
    self_adjoint_norm(1 << cells, |x| {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        apply_u_p_n_u(&mut a, cells, p, blocks, u);
        apply_u_p_n_u(&mut b, cells, p, blocks, v);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vector::tests::{full_law, law, random_vector};
    use crate::algebra::vector::{unit_v, vector_measure};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::Rng;

    fn close_vec(a: &PatternVector, b: &PatternVector, tol: f64) -> bool {
        a.sub(b).unwrap().norm() <= tol
    }

    fn psi8() -> PatternVector {
        random_vector(full_law(8, 1.0, 37, 23), &[(0.3, -1.0), (2.0, 0.5), (-0.7, 0.2), (0.1, 0.9), (1.3, 0.0)])
    }

    #[test]
    fn elementary_sets_need_aligned_endpoints() {
        let e = ElementarySet::from_intervals(8, 1.0, &[(0.0, 0.25), (0.5, 0.625)]).unwrap();
        assert_eq!(e.mask().ones().collect::<Vec<_>>(), vec![0, 1, 4]);
        assert!(ElementarySet::from_intervals(8, 1.0, &[(0.1, 0.5)]).is_err());
        assert_eq!(ElementarySet::from_intervals(8, 1.0, &[(0.0, 1.0)]).unwrap(), ElementarySet::full(8).unwrap());
        assert_eq!(e.reversed().mask().ones().collect::<Vec<_>>(), vec![3, 6, 7]);
    }

    #[test]
    fn projection_examples() {
        let psi = psi8();
        assert_eq!(project_q_e(&psi, &ElementarySet::full(8).unwrap()).unwrap(), psi);
        let q = project_q(&psi).unwrap();
        let v = unit_v(psi.reference().clone()).unwrap();
        let expected = v.scale(psi.inner(&v).unwrap());
        assert!(close_vec(&q, &expected, 1e-12));
        assert!(project_q_e(&psi, &ElementarySet::full(4).unwrap()).is_err());
    }

    #[test]
    fn projection_expectation_matches_exhaustive_sum() {
        let psi = psi8();
        let m = vector_measure(&psi);
        for bits in [0u64, 0b1, 0b1010_0101, 0b1111_0000, 0xff] {
            let e = ElementarySet::from_mask(CellPattern::from_u64(8, bits).unwrap());
            let lhs = project_q_e(&psi, &e).unwrap().inner(&psi).unwrap();
            let mut rhs = 0.0;
            for b in 0..256u64 {
                if b & !bits == 0 {
                    rhs += m.mass(&CellPattern::from_u64(8, b).unwrap());
                }
            }
            assert!((lhs.re - rhs).abs() < 1e-12 && lhs.im.abs() < 1e-12);
        }
    }

    #[test]
    fn u_p_examples() {
        let psi = psi8();
        assert_eq!(op_u_p(&psi, 1.0).unwrap(), psi);
        let lhs = op_u_p(&op_u_p(&psi, 0.7).unwrap(), 0.4).unwrap();
        assert!(close_vec(&lhs, &op_u_p(&psi, 0.28).unwrap(), 1e-12));
        let v = unit_v(psi.reference().clone()).unwrap();
        assert_eq!(op_u_p(&v, 0.3).unwrap(), v);
        assert!(op_u_p(&psi, 0.0).is_err() && op_u_p(&psi, 1.5).is_err());
        assert!(op_u_p(&psi, 0.5).unwrap().norm() < psi.norm());
    }

    #[test]
    fn u_p_n_v_counts_occupied_blocks() {
        let psi = psi8();
        let v = UnitVector::v(psi.reference().cell_width()).unwrap();
        for blocks in [1, 2, 4, 8] {
            let out = op_u_p_n_u(&psi, 0.3, blocks, &v).unwrap();
            for (c, a) in psi.iter() {
                let occupied = (0..blocks).filter(|&b| !c.block(b, 8 / blocks).is_empty()).count();
                assert!((out.amplitude(c) - a * 0.3f64.powi(occupied as i32)).norm() < 1e-12);
            }
        }
        let full = op_u_p_n_u(&psi, 0.3, 8, &v).unwrap();
        assert!(close_vec(&full, &op_u_p(&psi, 0.3).unwrap(), 1e-12));
        let u = UnitVector::with_gamma(0.7, 1.0 / 8.0).unwrap();
        assert!(close_vec(&op_u_p_n_u(&psi, 1.0, 4, &u).unwrap(), &psi, 1e-12));
        assert!(op_u_p_n_u(&psi, 0.5, 3, &u).is_err());
    }

    #[test]
    fn u_p_n_v_entries_decrease_in_n() {
        // diagonal in the pattern basis; entries p^(occupied blocks) decrease as blocks refine
        let cells = 8;
        let v = UnitVector::v(1.0 / 8.0).unwrap();
        for b in 0..256u64 {
            let mut prev = f64::INFINITY;
            for blocks in [1, 2, 4, 8] {
                let mut x = vec![Complex64::ZERO; 256];
                x[b as usize] = Complex64::ONE;
                apply_u_p_n_u(&mut x, cells, 0.6, blocks, &v);
                assert!(x.iter().enumerate().all(|(i, c)| i == b as usize || *c == Complex64::ZERO));
                let e = x[b as usize].re;
                assert!(e <= prev + 1e-15);
                prev = e;
            }
            assert!((prev - 0.6f64.powi(b.count_ones() as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn units_are_multiplicative() {
        let w = 0.125;
        let u = UnitVector::with_gamma(0.9, w).unwrap().with_phase(1.7).unwrap();
        let (a, b) = (full_law(3, 3.0 * w, 3, 5), full_law(2, 2.0 * w, 5, 3));
        let left = u.to_vector(a.clone()).unwrap();
        let right = u.to_vector(b.clone()).unwrap();
        let joint = u.to_vector(left.tensor(&right).unwrap().reference().clone()).unwrap();
        assert!(close_vec(&left.tensor(&right).unwrap(), &joint, 1e-12));
        assert!((left.norm() - 1.0).abs() < 1e-12);
        let v = UnitVector::v(w).unwrap();
        let g = u.inner(&v, 5);
        let direct = joint.inner(&v.to_vector(joint.reference().clone()).unwrap()).unwrap();
        assert!((g - direct).norm() < 1e-12);
        assert!((g.norm() - (-0.9f64 * 5.0 * w).exp()).abs() < 1e-12);
        // a thin reference cannot carry u
        assert!(u.to_vector(law(3, 3.0 * w, &[(0, 1), (1, 1)])).is_err());
        assert!(UnitVector::new(w, Complex64::ONE, Complex64::ONE, 0.0).is_err());
    }

    #[test]
    fn q_difference_examples() {
        let w = 0.25;
        let v = UnitVector::v(w).unwrap();
        assert!(norm_q_diff(&v, &v, 4).unwrap() < 1e-9);
        let u = UnitVector::with_gamma(0.5, w).unwrap();
        let got = norm_q_diff(&u, &v, 4).unwrap();
        assert!((got - (1.0 - (-1.0f64).exp()).sqrt()).abs() < 1e-9, "{got}");
        assert!((got - 0.795_060).abs() < 1e-6);
        let far = UnitVector::with_gamma(40.0, w).unwrap();
        assert!(norm_q_diff(&far, &v, 4).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn q_difference_matches_closed_form_on_random_units() {
        let mut rng = seeded(77);
        for _ in 0..100 {
            let cells = rng.random_range(1..=8usize);
            let t: f64 = rng.random_range(0.05..3.0);
            let gamma: f64 = rng.random_range(0.0..2.0);
            let w = t / cells as f64;
            let u = UnitVector::with_gamma(gamma, w).unwrap();
            let got = norm_q_diff(&u, &UnitVector::v(w).unwrap(), cells).unwrap();
            let want = (1.0 - (-2.0 * gamma * t).exp()).sqrt();
            assert!((got - want).abs() < 1e-9, "gamma {gamma} t {t}: {got} vs {want}");
        }
    }

    /// Dense matrix of `U_{t,p,n,u}` from its action on basis vectors.
    fn matrix(cells: usize, p: f64, blocks: usize, u: &UnitVector) -> DMatrix<Complex64> {
        let d = 1 << cells;
        DMatrix::from_fn(d, d, |i, j| {
            let mut x = vec![Complex64::ZERO; d];
            x[j] = Complex64::ONE;
            apply_u_p_n_u(&mut x, cells, p, blocks, u);
            x[i]
        })
    }

    #[test]
    fn power_iteration_agrees_with_dense_svd() {
        let cells = 6;
        let w = 1.0 / 6.0;
        let mut rng = seeded(3);
        for _ in 0..10 {
            let gamma: f64 = rng.random_range(0.0..2.0);
            let p: f64 = rng.random_range(0.05..1.0);
            let blocks = [1, 2, 3, 6][rng.random_range(0..4usize)];
            let (u, v) = (UnitVector::with_gamma(gamma, w).unwrap(), UnitVector::v(w).unwrap());
            let m = matrix(cells, p, blocks, &u) - matrix(cells, p, blocks, &v);
            assert!((&m - m.adjoint()).norm() < 1e-12);
            let want = m.singular_values().max();
            let got = norm_u_diff(p, blocks, &u, &v, cells).unwrap();
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn u_difference_respects_the_bound() {
        let mut rng = seeded(12);
        for _ in 0..40 {
            let cells = 8;
            let t: f64 = rng.random_range(0.1..2.0);
            let w = t / cells as f64;
            let gamma: f64 = rng.random_range(0.0..2.0);
            let p: f64 = rng.random_range(0.05..1.0);
            let blocks = [1, 2, 4, 8][rng.random_range(0..4usize)];
            let u = UnitVector::with_gamma(gamma, w).unwrap();
            let got = norm_u_diff(p, blocks, &u, &UnitVector::v(w).unwrap(), cells).unwrap();
            let bound = (1.0 - (-2.0 * gamma * t * (1.0 - p)).exp()).sqrt();
            assert!(got <= bound + 1e-9, "gamma {gamma} p {p} blocks {blocks}: {got} > {bound}");
        }
    }

    proptest! {
        #[test]
        fn projections_are_idempotent_self_adjoint_and_multiplicative(
            e1 in 0u64..256, e2 in 0u64..256,
            c in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12),
            d in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12),
        ) {
            let r = full_law(8, 1.0, 37, 23);
            let (psi, phi) = (random_vector(r.clone(), &c), random_vector(r, &d));
            let a = ElementarySet::from_mask(CellPattern::from_u64(8, e1).unwrap());
            let b = ElementarySet::from_mask(CellPattern::from_u64(8, e2).unwrap());
            let qa = project_q_e(&psi, &a).unwrap();
            prop_assert_eq!(&project_q_e(&qa, &a).unwrap(), &qa);
            let l = qa.inner(&phi).unwrap();
            let r = psi.inner(&project_q_e(&phi, &a).unwrap()).unwrap();
            prop_assert!((l - r).norm() < 1e-12 * (1.0 + l.norm()));
            let ab = project_q_e(&project_q_e(&psi, &b).unwrap(), &a).unwrap();
            prop_assert_eq!(ab, project_q_e(&psi, &a.intersection(&b)).unwrap());
        }

        #[test]
        fn projections_factor_over_cuts(
            e1 in 0u64..8, e2 in 0u64..32,
            c in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
            d in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        ) {
            let psi1 = random_vector(full_law(3, 0.375, 3, 5), &c);
            let psi2 = random_vector(full_law(5, 0.625, 7, 3), &d);
            let a = ElementarySet::from_mask(CellPattern::from_u64(3, e1).unwrap());
            let b = ElementarySet::from_mask(CellPattern::from_u64(5, e2).unwrap());
            let lhs = project_q_e(&psi1.tensor(&psi2).unwrap(), &a.concat(&b)).unwrap();
            let rhs = project_q_e(&psi1, &a).unwrap().tensor(&project_q_e(&psi2, &b).unwrap()).unwrap();
            prop_assert!(close_vec(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn u_p_is_a_positive_contraction(
            p in 0.01f64..1.0,
            c in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12),
        ) {
            let psi = random_vector(full_law(8, 1.0, 11, 13), &c);
            let out = op_u_p(&psi, p).unwrap();
            prop_assert!(out.norm() <= psi.norm() + 1e-12);
            let q = out.inner(&psi).unwrap();
            prop_assert!(q.re >= -1e-12 && q.im.abs() < 1e-9 * (1.0 + q.re));
        }
    }
}
