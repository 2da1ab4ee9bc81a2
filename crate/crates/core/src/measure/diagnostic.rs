use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::law::EmpiricalLaw;
use super::pattern::CellPattern;
use super::stats::{chi2_sf, fisher_two_sided, pooled_goodness_of_fit, weighted_auc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One pattern of a two-law comparison. `ratio` is the ratio of relative
/// frequencies A/B, absent when B never saw the pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailRow {
    pub pattern: String,
    pub count_a: u64,
    pub count_b: u64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub n_a: u64,
    pub n_b: u64,
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default)]
    pub extras: BTreeMap<String, f64>,
    #[serde(default)]
    pub detail: Vec<DetailRow>,
}

impl Diagnostic {
    pub fn new(name: &str, statistic: f64, threshold: f64, verdict: Verdict) -> Self {
        Diagnostic {
            name: name.to_string(),
            statistic,
            threshold,
            verdict,
            n_a: 0,
            n_b: 0,
            p_value: None,
            note: None,
            extras: BTreeMap::new(),
            detail: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.get(key).copied()
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostics serialize")
    }

    pub const CSV_HEADER: &'static str = "name,statistic,threshold,verdict,n_a,n_b,p_value";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.name,
            self.statistic,
            self.threshold,
            self.verdict,
            self.n_a,
            self.n_b,
            self.p_value.map(|p| p.to_string()).unwrap_or_default()
        )
    }
}

fn detail_rows(a: &EmpiricalLaw, b: &EmpiricalLaw) -> Vec<DetailRow> {
    let keys: BTreeSet<&CellPattern> = a.iter().map(|(p, _)| p).chain(b.iter().map(|(p, _)| p)).collect();
    keys.into_iter()
        .map(|p| {
            let (x, y) = (a.count(p), b.count(p));
            let ratio = (y > 0).then(|| (x as f64 / a.total() as f64) / (y as f64 / b.total() as f64));
            DetailRow {
                pattern: p.to_hex(),
                count_a: x,
                count_b: y,
                ratio,
            }
        })
        .collect()
}

fn nonempty(law: &EmpiricalLaw, side: &str) -> Result<()> {
    if law.total() == 0 {
        return Err(Error::InsufficientData(format!("law {side} has no samples")));
    }
    Ok(())
}

/// Finite-resolution check that two laws are mutually absolutely continuous.
///
/// A pattern seen on one side only is tested when its pooled expected count
/// on the other side is at least 5; patterns below that are undersampled and
/// excluded. Each tested pattern gets a two-sided Fisher exact test, with a
/// Bonferroni correction over all patterns whose expected count is at least
/// 5 on both sides. The statistic is the number of patterns whose ratio is
/// statistically infinite; the check passes when there are none. A pass can
/// only fail to falsify equivalence, it cannot certify it.
pub fn equivalence_diagnostic(a: &EmpiricalLaw, b: &EmpiricalLaw, alpha: f64) -> Result<Diagnostic> {
    a.check_same_grid(b)?;
    nonempty(a, "A")?;
    nonempty(b, "B")?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0,1), got {alpha}")));
    }
    let (na, nb) = (a.total(), b.total());
    let share_a = na as f64 / (na + nb) as f64;
    let detail = detail_rows(a, b);
    let expected = |r: &DetailRow| {
        let m = (r.count_a + r.count_b) as f64;
        (m * share_a, m * (1.0 - share_a))
    };
    let family = detail
        .iter()
        .filter(|r| {
            let (ea, eb) = expected(r);
            ea >= 5.0 && eb >= 5.0
        })
        .count()
        .max(1);
    let mut flagged = 0usize;
    let mut excluded = 0usize;
    let mut min_p = 1.0f64;
    let mut max_ratio = 1.0f64;
    for r in &detail {
        let (ea, eb) = expected(r);
        let one_sided = (r.count_a == 0) != (r.count_b == 0);
        if !one_sided {
            if let Some(q) = r.ratio {
                max_ratio = max_ratio.max(q.max(1.0 / q));
            }
            continue;
        }
        let e_missing = if r.count_a == 0 { ea } else { eb };
        if e_missing < 5.0 {
            excluded += 1;
            continue;
        }
        let p = (fisher_two_sided(r.count_a, na, r.count_b, nb) * family as f64).min(1.0);
        min_p = min_p.min(p);
        if p < alpha {
            flagged += 1;
        }
    }
    let verdict = if flagged == 0 { Verdict::Pass } else { Verdict::Fail };
    let mut d = Diagnostic::new("equivalence", flagged as f64, 0.0, verdict)
        .with_extra("alpha", alpha)
        .with_extra("max_ratio", max_ratio)
        .with_extra("excluded_patterns", excluded as f64)
        .with_extra("tested_family", family as f64)
        .with_extra("support_a", a.support_size() as f64)
        .with_extra("support_b", b.support_size() as f64);
    d.n_a = na;
    d.n_b = nb;
    d.p_value = Some(min_p);
    d.detail = detail;
    Ok(d)
}

/// Support of `product_law(left, right)` against the support of `joint`, on
/// the grid of `joint` cut after `left.n()` cells.
///
/// A pattern in one support only counts against the pair when its absence
/// on the other side is improbable: `exp(-N_joint m)` for a product pattern
/// of mass `m` missing from the joint sample, `exp(-N_marg x / N_joint)` for
/// a joint pattern seen `x` times whose left or right half no marginal sample
/// produced. Both are Bonferroni-corrected over the union of the supports.
/// The statistic is the number of such patterns.
pub fn support_diagnostic(
    left: &EmpiricalLaw,
    right: &EmpiricalLaw,
    joint: &EmpiricalLaw,
    alpha: f64,
) -> Result<Diagnostic> {
    nonempty(left, "L")?;
    nonempty(right, "R")?;
    nonempty(joint, "joint")?;
    if left.n() + right.n() != joint.n() {
        return Err(Error::GridMismatch(format!(
            "{} + {} cells do not make {}",
            left.n(),
            right.n(),
            joint.n()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0,1), got {alpha}")));
    }
    let cut = left.n();
    let nj = joint.total() as f64;
    let n_marg = left.total().min(right.total()) as f64;
    let product_mass = |p: &CellPattern| -> Result<f64> {
        let (l, r) = p.split(cut)?;
        Ok(left.mass(&l) * right.mass(&r))
    };
    let mut union: BTreeSet<CellPattern> = joint.iter().map(|(p, _)| p.clone()).collect();
    for (l, _) in left.iter() {
        for (r, _) in right.iter() {
            union.insert(l.concat(r));
        }
    }
    let k = union.len() as f64;
    let (mut joint_only, mut product_only, mut flagged) = (0usize, 0usize, 0usize);
    let mut min_p = 1.0f64;
    for p in &union {
        let x = joint.count(p);
        let m = product_mass(p)?;
        let raw = match (x > 0, m > 0.0) {
            (true, false) => {
                joint_only += 1;
                (-n_marg * x as f64 / nj).exp()
            }
            (false, true) => {
                product_only += 1;
                (-nj * m).exp()
            }
            _ => continue,
        };
        let q = (raw * k).min(1.0);
        min_p = min_p.min(q);
        if q < alpha {
            flagged += 1;
        }
    }
    let verdict = if flagged == 0 { Verdict::Pass } else { Verdict::Fail };
    let mut d = Diagnostic::new("support", flagged as f64, 0.0, verdict)
        .with_extra("alpha", alpha)
        .with_extra("joint_support", joint.support_size() as f64)
        .with_extra("product_support", (union.len() - joint_only) as f64)
        .with_extra("joint_only", joint_only as f64)
        .with_extra("product_only", product_only as f64);
    d.n_a = left.total().min(right.total());
    d.n_b = joint.total();
    d.p_value = Some(min_p);
    Ok(d)
}

/// Two-sample chi-square homogeneity test on patterns; patterns with pooled
/// expected count below 5 in either sample are merged into one bin.
pub fn two_sample_chi_square(a: &EmpiricalLaw, b: &EmpiricalLaw, alpha: f64) -> Result<Diagnostic> {
    a.check_same_grid(b)?;
    nonempty(a, "A")?;
    nonempty(b, "B")?;
    let (na, nb) = (a.total() as f64, b.total() as f64);
    let share_a = na / (na + nb);
    let detail = detail_rows(a, b);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut rest = (0.0, 0.0);
    for r in &detail {
        let m = (r.count_a + r.count_b) as f64;
        let cell = (r.count_a as f64, r.count_b as f64);
        if m * share_a < 5.0 || m * (1.0 - share_a) < 5.0 {
            rest.0 += cell.0;
            rest.1 += cell.1;
        } else {
            bins.push(cell);
        }
    }
    if rest.0 + rest.1 > 0.0 {
        let m = rest.0 + rest.1;
        if (m * share_a < 5.0 || m * (1.0 - share_a) < 5.0) && !bins.is_empty() {
            let smallest = (0..bins.len())
                .min_by(|&i, &j| (bins[i].0 + bins[i].1).total_cmp(&(bins[j].0 + bins[j].1)))
                .unwrap();
            bins[smallest].0 += rest.0;
            bins[smallest].1 += rest.1;
        } else {
            bins.push(rest);
        }
    }
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let m = x + y;
            let (ea, eb) = (m * share_a, m * (1.0 - share_a));
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    let df = bins.len().saturating_sub(1) as f64;
    let p = chi2_sf(stat, df);
    let verdict = if p >= alpha { Verdict::Pass } else { Verdict::Fail };
    let mut d = Diagnostic::new("chi_square_two_sample", stat, alpha, verdict)
        .with_extra("df", df)
        .with_extra("bins", bins.len() as f64);
    d.n_a = a.total();
    d.n_b = b.total();
    d.p_value = Some(p);
    d.detail = detail;
    Ok(d)
}

/// Box-count slope of one pattern: occupied blocks of `b` cells against the
/// block size, for each `b` in `block_sizes` (in cells), fitted by least
/// squares in log-log. `None` for the empty pattern.
pub fn pattern_slope(p: &CellPattern, block_sizes: &[usize]) -> Option<f64> {
    if p.is_empty() || block_sizes.len() < 2 {
        return None;
    }
    let mut xs = Vec::with_capacity(block_sizes.len());
    let mut ys = Vec::with_capacity(block_sizes.len());
    for &b in block_sizes {
        let occupied = p.coarsen(b).ok()?.count_ones();
        xs.push(-(b as f64).ln());
        ys.push((occupied as f64).ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityOptions {
    /// Block sizes in cells for the per-pattern slope.
    pub block_sizes: Vec<usize>,
    pub auc_threshold: f64,
    pub min_nonempty: u64,
}

impl Default for SingularityOptions {
    fn default() -> Self {
        SingularityOptions {
            block_sizes: vec![1, 4, 16],
            auc_threshold: 0.95,
            min_nonempty: 100,
        }
    }
}

/// Separability of two laws conditioned on nonempty patterns, by a threshold
/// classifier on the per-pattern box-count slope. The statistic is
/// `max(AUC, 1 - AUC)`; a pass means "consistent with singular". The shared
/// mass at the empty pattern is reported alongside, since two such laws are
/// never singular outright.
pub fn singularity_diagnostic(a: &EmpiricalLaw, b: &EmpiricalLaw, opts: &SingularityOptions) -> Result<Diagnostic> {
    a.check_same_grid(b)?;
    let slopes = |law: &EmpiricalLaw| -> Result<Vec<(f64, u64)>> {
        law.iter()
            .filter(|(p, _)| !p.is_empty())
            .map(|(p, c)| {
                pattern_slope(p, &opts.block_sizes)
                    .map(|s| (s, c))
                    .ok_or_else(|| invalid("block_sizes", format!("must divide {} cells", law.n())))
            })
            .collect()
    };
    let (sa, sb) = (slopes(a)?, slopes(b)?);
    let na: u64 = sa.iter().map(|&(_, c)| c).sum();
    let nb: u64 = sb.iter().map(|&(_, c)| c).sum();
    if na < opts.min_nonempty || nb < opts.min_nonempty {
        return Err(Error::InsufficientData(format!(
            "nonempty samples {na} and {nb}, need {} per side",
            opts.min_nonempty
        )));
    }
    let auc = weighted_auc(&sa, &sb);
    let stat = auc.max(1.0 - auc);
    let verdict = if stat >= opts.auc_threshold { Verdict::Pass } else { Verdict::Fail };
    let mean = |s: &[(f64, u64)], n: u64| s.iter().map(|&(v, c)| v * c as f64).sum::<f64>() / n as f64;
    let mut d = Diagnostic::new("singularity", stat, opts.auc_threshold, verdict)
        .with_extra("auc", auc)
        .with_extra("atom_a", a.empty_mass())
        .with_extra("atom_b", b.empty_mass())
        .with_extra("shared_atom", a.empty_mass().min(b.empty_mass()))
        .with_extra("mean_slope_a", mean(&sa, na))
        .with_extra("mean_slope_b", mean(&sb, nb));
    d.n_a = na;
    d.n_b = nb;
    Ok(d)
}

/// Checks that a pattern law looks like the cell occupancy of a Poisson point
/// process of intensity `mu`: the number of occupied cells against
/// Binomial(n, 1 - exp(-mu t / n)), and independence of the two cells in each
/// disjoint adjacent pair (pooled 2x2 table). The two p-values are combined by
/// Bonferroni; the statistic is the smaller adjusted p-value.
pub fn poisson_block_check(law: &EmpiricalLaw, mu: f64, alpha: f64) -> Result<Diagnostic> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(invalid("mu", format!("must be nonnegative, got {mu}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0,1), got {alpha}")));
    }
    nonempty(law, "")?;
    let n = law.n();
    let total = law.total() as f64;
    let q = 1.0 - (-mu * law.t() / n as f64).exp();

    let mut observed = vec![0.0; n + 1];
    let mut table = [[0.0f64; 2]; 2];
    for (p, c) in law.iter() {
        observed[p.count_ones() as usize] += c as f64;
        for i in 0..n / 2 {
            table[p.get(2 * i) as usize][p.get(2 * i + 1) as usize] += c as f64;
        }
    }
    let expected: Vec<f64> = (0..=n)
        .map(|k| {
            let lp = statrs::function::factorial::ln_binomial(n as u64, k as u64)
                + if k > 0 { k as f64 * q.ln() } else { 0.0 }
                + if k < n { (n - k) as f64 * (-q).ln_1p() } else { 0.0 };
            if q == 0.0 {
                if k == 0 { total } else { 0.0 }
            } else if q == 1.0 {
                if k == n { total } else { 0.0 }
            } else {
                total * lp.exp()
            }
        })
        .collect();
    let (chi_count, df_count) = pooled_goodness_of_fit(&observed, &expected);
    let p_count = if df_count == 0 {
        if chi_count.is_finite() && chi_count < 1e-9 { 1.0 } else { 0.0 }
    } else {
        chi2_sf(chi_count, df_count as f64)
    };

    let [[a, b], [c, d]] = table;
    let m = a + b + c + d;
    let margins = (a + b) * (c + d) * (a + c) * (b + d);
    let chi_pairs = if margins > 0.0 { m * (a * d - b * c).powi(2) / margins } else { 0.0 };
    let p_pairs = if margins > 0.0 { chi2_sf(chi_pairs, 1.0) } else { 1.0 };

    let adjusted = (2.0 * p_count.min(p_pairs)).min(1.0);
    let verdict = if adjusted >= alpha { Verdict::Pass } else { Verdict::Fail };
    let mut diag = Diagnostic::new("poisson_block", adjusted, alpha, verdict)
        .with_extra("mu", mu)
        .with_extra("q", q)
        .with_extra("chi2_count", chi_count)
        .with_extra("df_count", df_count as f64)
        .with_extra("p_count", p_count)
        .with_extra("chi2_pairs", chi_pairs)
        .with_extra("p_pairs", p_pairs);
    diag.n_a = law.total();
    diag.p_value = Some(adjusted);
    Ok(diag)
}

/// Intensity whose Poisson process has the same empty-set mass as `law`.
pub fn intensity_from_atom(law: &EmpiricalLaw) -> Result<f64> {
    let m = law.empty_mass();
    if m <= 0.0 {
        return Err(Error::NoAtom);
    }
    Ok(-m.ln() / law.t())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::{Distribution, Poisson};

    fn pat(n: usize, cells: &[usize]) -> CellPattern {
        CellPattern::from_cells(n, cells.iter().copied()).unwrap()
    }

    fn law(n: usize, rows: &[(&[usize], u64)]) -> EmpiricalLaw {
        let mut l = EmpiricalLaw::new(n, 1.0).unwrap();
        for (cells, c) in rows {
            l.add_count(pat(n, cells), *c).unwrap();
        }
        l
    }

    /// Cell occupancy of a homogeneous Poisson process, drawn directly.
    fn poisson_law(mu_t: f64, n: usize, samples: u64, seed: u64) -> EmpiricalLaw {
        let mut l = EmpiricalLaw::new(n, 1.0).unwrap();
        let pois = Poisson::new(mu_t).unwrap();
        for i in 0..samples {
            let mut rng = stream(seed, i);
            let k: f64 = pois.sample(&mut rng);
            let cells: Vec<usize> = (0..k as usize).map(|_| rng.random_range(0..n)).collect();
            l.add(pat(n, &cells)).unwrap();
        }
        l
    }

    #[test]
    fn identical_laws_are_equivalent() {
        let a = law(4, &[(&[], 500), (&[1], 300), (&[0, 3], 200)]);
        let d = equivalence_diagnostic(&a, &a, 0.001).unwrap();
        assert!(d.passed());
        assert_eq!(d.extra("max_ratio"), Some(1.0));
        assert!(d.detail.iter().all(|r| r.ratio == Some(1.0)));
        let sum_a: u64 = d.detail.iter().map(|r| r.count_a).sum();
        assert_eq!(sum_a, a.total());
    }

    #[test]
    fn point_mass_is_not_equivalent() {
        let a = law(4, &[(&[], 500), (&[1], 300), (&[0, 3], 200)]);
        let b = law(4, &[(&[], 1000)]);
        let d = equivalence_diagnostic(&a, &b, 0.001).unwrap();
        assert_eq!(d.verdict, Verdict::Fail);
        assert_eq!(d.statistic, 2.0);
        let rev = equivalence_diagnostic(&b, &a, 0.001).unwrap();
        assert_eq!(rev.verdict, d.verdict);
        assert_eq!(rev.statistic, d.statistic);
    }

    #[test]
    fn rare_patterns_are_excluded() {
        let a = law(4, &[(&[], 995), (&[2], 5)]);
        let b = law(4, &[(&[], 1000)]);
        let d = equivalence_diagnostic(&a, &b, 0.001).unwrap();
        assert!(d.passed());
        assert_eq!(d.extra("excluded_patterns"), Some(1.0));
    }

    #[test]
    fn support_of_independent_halves() {
        let half = law(2, &[(&[], 500), (&[1], 500)]);
        let joint = law(4, &[(&[], 250), (&[1], 250), (&[3], 250), (&[1, 3], 250)]);
        let d = support_diagnostic(&half, &half, &joint, 0.001).unwrap();
        assert!(d.passed());
        assert_eq!(d.extra("product_support"), Some(4.0));

        // perfectly coupled halves miss half of the product support
        let coupled = law(4, &[(&[], 500), (&[1, 3], 500)]);
        let d = support_diagnostic(&half, &half, &coupled, 0.001).unwrap();
        assert_eq!(d.verdict, Verdict::Fail);
        assert_eq!(d.statistic, 2.0);

        // a joint pattern whose half never appears in 1000 marginal draws
        let extra = law(4, &[(&[], 240), (&[1], 250), (&[3], 250), (&[1, 3], 250), (&[0], 10)]);
        let d = support_diagnostic(&half, &half, &extra, 0.001).unwrap();
        assert_eq!(d.statistic, 1.0);
        assert_eq!(d.extra("joint_only"), Some(1.0));
        // seen once, the same pattern is within sampling error
        let once = law(4, &[(&[], 249), (&[1], 250), (&[3], 250), (&[1, 3], 250), (&[0], 1)]);
        assert!(support_diagnostic(&half, &half, &once, 0.001).unwrap().passed());
        assert!(support_diagnostic(&half, &half, &half, 0.001).is_err());
    }

    #[test]
    fn grids_must_match() {
        let a = law(4, &[(&[], 1)]);
        let b = law(8, &[(&[], 1)]);
        assert!(matches!(equivalence_diagnostic(&a, &b, 0.01), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn chi_square_accepts_identical_and_rejects_shifted() {
        let a = law(2, &[(&[], 500), (&[0], 300), (&[1], 200)]);
        assert!(two_sample_chi_square(&a, &a, 0.001).unwrap().passed());
        let b = law(2, &[(&[], 200), (&[0], 300), (&[1], 500)]);
        assert!(!two_sample_chi_square(&a, &b, 0.001).unwrap().passed());
    }

    #[test]
    fn slope_of_simple_patterns() {
        let full = CellPattern::full(64).unwrap();
        assert!((pattern_slope(&full, &[1, 4, 16]).unwrap() - 1.0).abs() < 1e-12);
        let single = pat(64, &[17]);
        assert!(pattern_slope(&single, &[1, 4, 16]).unwrap().abs() < 1e-12);
        assert!(pattern_slope(&CellPattern::zeros(64).unwrap(), &[1, 2]).is_none());
    }

    #[test]
    fn singularity_of_identical_laws_fails() {
        let a = law(16, &[(&[], 50), (&[1, 2, 3, 9], 100), (&[4], 80)]);
        let d = singularity_diagnostic(&a, &a, &SingularityOptions::default()).unwrap();
        assert!((d.extra("auc").unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(d.verdict, Verdict::Fail);
        assert!(d.extra("shared_atom").unwrap() > 0.0);
        let small = law(16, &[(&[1], 10)]);
        assert!(matches!(
            singularity_diagnostic(&small, &a, &SingularityOptions::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn singularity_separates_sparse_from_dense() {
        let a = law(64, &[(&[5], 200)]);
        let b = law(64, &[(&(0..64).collect::<Vec<_>>(), 200)]);
        let d = singularity_diagnostic(&a, &b, &SingularityOptions::default()).unwrap();
        assert_eq!(d.statistic, 1.0);
        assert!(d.passed());
    }

    #[test]
    fn poisson_check_on_empty_point_mass() {
        let e = law(16, &[(&[], 1000)]);
        assert!(poisson_block_check(&e, 0.0, 0.01).unwrap().passed());
        assert!(poisson_block_check(&e, -1.0, 0.01).is_err());
    }

    #[test]
    fn poisson_check_accepts_poisson_process() {
        let l = poisson_law(2.0, 16, 100_000, 12);
        let mu = intensity_from_atom(&l).unwrap();
        assert!((mu - 2.0).abs() < 0.05, "{mu}");
        let d = poisson_block_check(&l, 2.0, 0.01).unwrap();
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn poisson_check_rejects_clustered_cells() {
        // occupied cells always come in adjacent pairs
        let mut l = EmpiricalLaw::new(16, 1.0).unwrap();
        for i in 0..10_000u64 {
            let mut rng = stream(3, i);
            let cells = if rng.random::<f64>() < 0.6 { vec![] } else {
                let k = 2 * rng.random_range(0..8);
                vec![k, k + 1]
            };
            l.add(pat(16, &cells)).unwrap();
        }
        let mu = intensity_from_atom(&l).unwrap();
        assert!(!poisson_block_check(&l, mu, 0.01).unwrap().passed());
    }

    #[test]
    fn diagnostic_serializes() {
        let d = Diagnostic::new("x", 1.5, 2.0, Verdict::Pass).with_extra("k", 3.0);
        let back: Diagnostic = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.csv_row(), "x,1.5,2,pass,0,0,");
    }
}
