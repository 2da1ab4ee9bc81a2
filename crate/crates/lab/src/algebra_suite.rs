//! Exact identities of the finite Hilbert-space model, checked on random
//! references, vectors and units. Every row reports a maximum residual.

use std::sync::Arc;

use anyhow::{bail, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use randset_core::algebra::{
    norm_q_diff, norm_u_diff, op_u_p, project_q, project_q_e, unit_v, vector_measure, ElementarySet, PatternVector,
    UnitVector,
};
use randset_core::measure::{CellPattern, EmpiricalLaw};
use randset_core::rng::{child_seed, stream, SimRng};

use crate::report::{pass_if, ReportRow};

pub const MAX_ALGEBRA_CELLS: usize = 12;
pub const EXACT_TOL: f64 = 1e-10;
pub const ENUMERATION_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-9;
/// Largest grid on which the operator norms are computed.
const NORM_CELLS: usize = 8;
const BOUND_CELLS: usize = 8;

/// Law on `n` cells with every pattern present, random counts in `1..=50`.
fn full_support_law(n: usize, t: f64, rng: &mut SimRng) -> Result<Arc<EmpiricalLaw>> {
    let mut law = EmpiricalLaw::new(n, t)?;
    for b in 0..1u64 << n {
        law.add_count(CellPattern::from_u64(n, b)?, rng.random_range(1..=50))?;
    }
    Ok(Arc::new(law))
}

fn random_vector(reference: Arc<EmpiricalLaw>, rng: &mut SimRng) -> PatternVector {
    PatternVector::from_fn(reference, |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_set(n: usize, rng: &mut SimRng) -> ElementarySet {
    ElementarySet::from_mask(CellPattern::from_cells(n, (0..n).filter(|_| rng.random_bool(0.5))).expect("in range"))
}

/// Largest amplitude difference, pattern by pattern.
fn max_diff(x: &PatternVector, y: &PatternVector) -> f64 {
    let mut worst = 0.0f64;
    for (p, a) in x.iter() {
        worst = worst.max((a - y.amplitude(p)).norm());
    }
    for (p, b) in y.iter() {
        worst = worst.max((x.amplitude(p) - b).norm());
    }
    worst
}

fn rel(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / (1.0 + y.norm())
}

#[derive(Default)]
struct Max(f64);

impl Max {
    fn see(&mut self, x: f64) {
        self.0 = if x.is_nan() { f64::NAN } else { self.0.max(x) };
    }
}

pub fn verify_algebra(n: usize, trials: u64, seed: u64) -> Result<Vec<ReportRow>> {
    if !(2..=MAX_ALGEBRA_CELLS).contains(&n) {
        bail!("algebra suite needs 2 <= cells <= {MAX_ALGEBRA_CELLS}, got {n}");
    }
    if trials == 0 {
        bail!("trials must be at least 1");
    }
    let (nl, nr) = (n / 2, n - n / 2);
    let mut tensor_v = Max::default();
    let mut tensor_inner = Max::default();
    let mut q_full = Max::default();
    let mut q_empty = Max::default();
    let mut q_lattice = Max::default();
    let mut q_e_enumeration = Max::default();
    let mut semigroup = Max::default();
    let mut unitarity = Max::default();
    let mut atom = Max::default();
    for k in 0..trials {
        let mut rng = stream(child_seed(seed, 0), k);
        let w: f64 = rng.random_range(0.05..0.5);
        let left = full_support_law(nl, w * nl as f64, &mut rng)?;
        let right = full_support_law(nr, w * nr as f64, &mut rng)?;
        let whole = Arc::new(randset_core::measure::product_law(&left, &right)?);

        let v = unit_v(whole.clone())?;
        let vv = unit_v(left.clone())?.tensor(&unit_v(right.clone())?)?;
        tensor_v.see(max_diff(&v, &vv));

        let (a, b) = (random_vector(left.clone(), &mut rng), random_vector(right.clone(), &mut rng));
        let (c, d) = (random_vector(left.clone(), &mut rng), random_vector(right.clone(), &mut rng));
        let lhs = a.tensor(&b)?.inner(&c.tensor(&d)?)?;
        tensor_inner.see(rel(lhs, a.inner(&c)? * b.inner(&d)?));

        let reference = full_support_law(n, w * n as f64, &mut rng)?;
        let psi = random_vector(reference.clone(), &mut rng);
        q_full.see(max_diff(&project_q_e(&psi, &ElementarySet::full(n)?)?, &psi));
        q_empty.see(max_diff(&project_q_e(&psi, &ElementarySet::empty(n)?)?, &project_q(&psi)?));
        let (e1, e2) = (random_set(n, &mut rng), random_set(n, &mut rng));
        let twice = project_q_e(&project_q_e(&psi, &e2)?, &e1)?;
        q_lattice.see(max_diff(&twice, &project_q_e(&psi, &e1.intersection(&e2))?));

        // <Q_E psi, psi> against the sum over every pattern inside E
        let lhs = project_q_e(&psi, &e1)?.inner(&psi)?;
        let mask = e1.mask().low_word();
        let mut sum = 0.0;
        for bits in 0..1u64 << n {
            if bits & !mask == 0 {
                let p = CellPattern::from_u64(n, bits)?;
                sum += psi.amplitude(&p).norm_sqr() * reference.mass(&p);
            }
        }
        q_e_enumeration.see(rel(lhs, Complex64::new(sum, 0.0)));

        let (p1, p2) = (rng.random_range(0.01..=1.0), rng.random_range(0.01..=1.0));
        semigroup.see(max_diff(&op_u_p(&op_u_p(&psi, p2)?, p1)?, &op_u_p(&psi, p1 * p2)?));

        let other = full_support_law(n, w * n as f64, &mut rng)?;
        let phi = random_vector(reference.clone(), &mut rng);
        let before = psi.inner(&phi)?;
        let after = psi.change_of_measure(other.clone())?.inner(&phi.change_of_measure(other)?)?;
        unitarity.see(rel(after, before));

        let v = unit_v(reference)?;
        let overlap = psi.inner(&v)?.norm_sqr();
        let empty = vector_measure(&psi).mass(&CellPattern::zeros(n)?);
        atom.see((overlap - empty).abs() / (1.0 + empty));
    }

    // operator norms: closed form for Q, bound for U
    let cells = n.min(NORM_CELLS);
    let mut q_diff = Max::default();
    for k in 0..trials {
        let mut rng = stream(child_seed(seed, 1), k);
        let gamma: f64 = rng.random_range(0.0..3.0);
        let t: f64 = rng.random_range(0.05..3.0);
        let w = t / cells as f64;
        let got = norm_q_diff(&UnitVector::with_gamma(gamma, w)?, &UnitVector::v(w)?, cells)?;
        q_diff.see((got - (1.0 - (-2.0 * gamma * t).exp()).sqrt()).abs());
    }
    let bound_cells = n.min(BOUND_CELLS);
    let divisors: Vec<usize> = (1..=bound_cells).filter(|b| bound_cells % b == 0).collect();
    let mut violations = 0u64;
    let mut excess = Max(f64::NEG_INFINITY);
    let draws = 10 * trials;
    for k in 0..draws {
        let mut rng = stream(child_seed(seed, 2), k);
        let gamma: f64 = rng.random_range(0.0..3.0);
        let p: f64 = rng.random_range(0.01..=1.0);
        let t: f64 = rng.random_range(0.05..3.0);
        let blocks = divisors[rng.random_range(0..divisors.len())];
        let w = t / bound_cells as f64;
        let got = norm_u_diff(p, blocks, &UnitVector::with_gamma(gamma, w)?, &UnitVector::v(w)?, bound_cells)?;
        let bound = (1.0 - (-2.0 * gamma * t * (1.0 - p)).exp()).sqrt();
        if got > bound + NORM_TOL {
            violations += 1;
        }
        excess.see(got - bound);
    }

    let row = |statistic: &str, value: f64, tol: f64| ReportRow {
        experiment: "algebra".into(),
        params: String::new(),
        statistic: statistic.into(),
        value,
        ci_lo: None,
        ci_hi: Some(tol),
        verdict: pass_if(value <= tol),
    };
    Ok(vec![
        row("tensor_v", tensor_v.0, EXACT_TOL),
        row("tensor_inner", tensor_inner.0, EXACT_TOL),
        row("q_full", q_full.0, EXACT_TOL),
        row("q_empty", q_empty.0, EXACT_TOL),
        row("q_lattice", q_lattice.0, EXACT_TOL),
        row("q_e_enumeration", q_e_enumeration.0, ENUMERATION_TOL),
        row("u_semigroup", semigroup.0, EXACT_TOL),
        row("unitarity", unitarity.0, EXACT_TOL),
        row("atom", atom.0, EXACT_TOL),
        row("q_diff", q_diff.0, NORM_TOL),
        row("u_bound_excess", excess.0, NORM_TOL),
        row("u_bound_violations", violations as f64, 0.0),
    ])
}
