//! Closed range of an alpha-stable subordinator.
//!
//! Jumps of size at least `eps` arrive as a Poisson stream with Pareto(alpha)
//! sizes; all smaller jumps are replaced by their compensating drift. In the
//! range this turns into an alternation of short drift segments (filled in
//! with fill points) and open gaps (the big jumps). Because only the range is
//! kept, the scale constant of the Levy measure drops out: the length of a
//! drift segment is exponential with mean `eps * alpha / (1 - alpha)`.

use rand_distr::{Distribution, Exp1, Open01};

use crate::error::{invalid, Result};
use crate::rng::{seeded, SimRng};

use super::sample::{PointKind, SetSample, SetSampler};

/// Default jump cutoff relative to the horizon.
pub const DEFAULT_RELATIVE_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorParams {
    index: f64,
    jump_cutoff: f64,
}

impl SubordinatorParams {
    pub fn new(index: f64, jump_cutoff: f64) -> Result<Self> {
        if !(index > 0.0 && index < 1.0) {
            return Err(invalid("alpha", format!("index must lie in (0,1), got {index}")));
        }
        if !(jump_cutoff > 0.0 && jump_cutoff.is_finite()) {
            return Err(invalid("jump_cutoff", format!("must be positive, got {jump_cutoff}")));
        }
        Ok(SubordinatorParams { index, jump_cutoff })
    }

    /// Index `alpha` with the default cutoff `1e-6 * t`.
    pub fn with_default_cutoff(index: f64, t: f64) -> Result<Self> {
        Self::new(index, DEFAULT_RELATIVE_CUTOFF * t)
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn jump_cutoff(&self) -> f64 {
        self.jump_cutoff
    }

    /// Mean length of the drift segment between consecutive big jumps.
    pub fn mean_segment(&self) -> f64 {
        self.jump_cutoff * self.index / (1.0 - self.index)
    }
}

pub fn sample_subordinator_range(t: f64, params: SubordinatorParams, seed: u64) -> Result<SetSample> {
    subordinator_range_with(t, params, &mut seeded(seed))
}

pub fn subordinator_range_with(t: f64, params: SubordinatorParams, rng: &mut SimRng) -> Result<SetSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let eps = params.jump_cutoff;
    let alpha = params.index;
    let mean_seg = params.mean_segment();
    let mut points = vec![0.0];
    let mut pos = 0.0f64;
    loop {
        let e: f64 = Exp1.sample(rng);
        let seg = mean_seg * e;
        let end = (pos + seg).min(t);
        // fill the drift segment at spacing <= eps
        let pieces = ((end - pos) / eps).ceil() as usize;
        for k in 1..=pieces {
            let x = if k == pieces { end } else { pos + (end - pos) * k as f64 / pieces as f64 };
            if x > *points.last().unwrap() {
                points.push(x);
            }
        }
        pos += seg;
        if pos >= t {
            break;
        }
        let u: f64 = Open01.sample(rng);
        pos += eps * u.powf(-1.0 / alpha);
        if pos > t {
            break;
        }
        if pos > *points.last().unwrap() {
            points.push(pos);
        }
    }
    let kinds = vec![PointKind::Fill; points.len()];
    Ok(SetSample::from_parts(t, eps, points, kinds))
}

/// Range of the subordinator on `[0, t]`, as a [`SetSampler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorSampler {
    pub t: f64,
    pub params: SubordinatorParams,
}

impl SetSampler for SubordinatorSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample> {
        subordinator_range_with(self.t, self.params, rng)
    }
}

/// Gaps of the range strictly longer than `min_gap`, i.e. the big jumps that
/// landed inside `[0, t]`.
pub fn gaps_longer_than(sample: &SetSample, min_gap: f64) -> Vec<f64> {
    sample
        .points()
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > min_gap)
        .collect()
}

/// Rank-size regression: slope of `log(rank)` against `log(size)` over the
/// values in `[lo, hi]`, where ranks are taken in the whole list sorted in
/// decreasing order. For a tail `Pr[X > x] ~ x^-alpha` the slope is `-alpha`.
pub fn rank_size_slope(values: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let (xs, ys): (Vec<f64>, Vec<f64>) = v
        .iter()
        .enumerate()
        .filter(|(_, &x)| x >= lo && x <= hi)
        .map(|(i, &x)| (x.ln(), ((i + 1) as f64).ln()))
        .unzip();
    if xs.len() < 3 {
        return None;
    }
    Some(ols_slope(&xs, &ys))
}

pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn rejects_bad_index() {
        assert!(SubordinatorParams::new(0.0, 1e-6).is_err());
        assert!(SubordinatorParams::new(1.0, 1e-6).is_err());
        assert!(SubordinatorParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn always_contains_zero_and_stays_in_range() {
        for a in [0.25, 0.5, 0.75] {
            let p = SubordinatorParams::with_default_cutoff(a, 1.0).unwrap();
            for seed in 0..20 {
                let s = sample_subordinator_range(1.0, p, seed).unwrap();
                assert_eq!(s.points()[0], 0.0);
                assert!(*s.points().last().unwrap() <= 1.0);
                assert!(s.points().windows(2).all(|w| w[0] < w[1]));
                assert!(s.kinds().iter().all(|&k| k == PointKind::Fill));
                assert_eq!(s.resolution(), 1e-6);
            }
        }
    }

    #[test]
    fn gap_tail_slope_matches_index() {
        // Pr[gap > x] ~ x^-alpha for alpha = 0.5
        let alpha = 0.5;
        let p = SubordinatorParams::with_default_cutoff(alpha, 1.0).unwrap();
        let eps = p.jump_cutoff();
        let mut gaps = Vec::new();
        for i in 0..200 {
            let s = subordinator_range_with(1.0, p, &mut stream(9, i)).unwrap();
            gaps.extend(gaps_longer_than(&s, eps));
        }
        let slope = rank_size_slope(&gaps, 10.0 * eps, 1e-3).unwrap();
        assert!((slope + alpha).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn rank_size_of_exact_power_law() {
        // deterministic quantiles of a Pareto(0.7) tail
        let n = 10_000;
        let v: Vec<f64> = (1..=n).map(|r| (r as f64 / n as f64).powf(-1.0 / 0.7)).collect();
        let slope = rank_size_slope(&v, 1.0, f64::INFINITY).unwrap();
        assert!((slope + 0.7).abs() < 1e-9, "{slope}");
    }
}
