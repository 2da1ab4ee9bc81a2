//! Small-sample test primitives shared by the diagnostics.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// Upper tail `Pr[X >= x]` of a chi-square variable with `df` degrees of freedom.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if df <= 0.0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).expect("positive df").sf(x)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Two-sided Fisher exact p-value for the table `[x, na - x; y, nb - y]`:
/// total probability of tables with the same margins that are no more likely
/// than the observed one.
pub fn fisher_two_sided(x: u64, na: u64, y: u64, nb: u64) -> f64 {
    assert!(x <= na && y <= nb);
    let m = x + y;
    let n = na + nb;
    if m == 0 || m == n {
        return 1.0;
    }
    let denom = ln_choose(n, m);
    let lp = |k: u64| ln_choose(na, k) + ln_choose(nb, m - k) - denom;
    let lo = m.saturating_sub(nb);
    let hi = m.min(na);
    let observed = lp(x);
    let cut = observed + 1e-7;
    let mut p = 0.0;
    for k in lo..=hi {
        let l = lp(k);
        if l <= cut {
            p += l.exp();
        }
    }
    p.min(1.0)
}

/// `Pr[A > B] + Pr[A = B] / 2` for weighted samples `(value, weight)`.
pub fn weighted_auc(a: &[(f64, u64)], b: &[(f64, u64)]) -> f64 {
    let wa: f64 = a.iter().map(|&(_, w)| w as f64).sum();
    let wb: f64 = b.iter().map(|&(_, w)| w as f64).sum();
    if wa == 0.0 || wb == 0.0 {
        return 0.5;
    }
    let mut all: Vec<(f64, f64, f64)> = a
        .iter()
        .map(|&(v, w)| (v, w as f64, 0.0))
        .chain(b.iter().map(|&(v, w)| (v, 0.0, w as f64)))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut below_b = 0.0;
    let mut acc = 0.0;
    let mut i = 0;
    while i < all.len() {
        let v = all[i].0;
        let (mut ta, mut tb) = (0.0, 0.0);
        while i < all.len() && all[i].0 == v {
            ta += all[i].1;
            tb += all[i].2;
            i += 1;
        }
        acc += ta * (below_b + 0.5 * tb);
        below_b += tb;
    }
    acc / (wa * wb)
}

/// Pearson statistic and degrees of freedom for observed vs expected counts,
/// after merging adjacent bins until each expected count is at least 5.
pub fn pooled_goodness_of_fit(observed: &[f64], expected: &[f64]) -> (f64, usize) {
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&oi, &ei) in observed.iter().zip(expected) {
        o += oi;
        e += ei;
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if o > 0.0 || e > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    let stat = bins
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    (stat, bins.len().saturating_sub(1))
}
