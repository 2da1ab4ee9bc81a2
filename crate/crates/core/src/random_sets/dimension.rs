use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::stream;

use super::sample::SetSample;
use super::subordinator::ols_slope;

const BOOTSTRAP_ROUNDS: u64 = 200;
const BOOTSTRAP_SEED: u64 = 0x626f_7863_6f75_6e74;

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub stderr: f64,
    pub scales: Vec<f64>,
    /// Mean number of occupied boxes at each scale.
    pub counts: Vec<f64>,
}

/// Geometric ladder of box sizes (ratio 2) from `t / 16` down to the last
/// size still at least `16 * resolution`.
pub fn default_scales(t: f64, resolution: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = t / 16.0;
    while s >= 16.0 * resolution {
        out.push(s);
        s /= 2.0;
    }
    out
}

/// Number of boxes `[k s, (k+1) s)` that contain a point, for each scale `s`.
pub fn box_counts(sample: &SetSample, scales: &[f64]) -> Vec<u64> {
    scales
        .iter()
        .map(|&s| {
            let mut count = 0u64;
            let mut last = u64::MAX;
            for &x in sample.points() {
                let b = (x / s).floor() as u64;
                if b != last {
                    count += 1;
                    last = b;
                }
            }
            count
        })
        .collect()
}

/// Slope of `log(count)` against `log(1 / scale)`. `None` when a count is 0.
pub fn fit_box_dimension(scales: &[f64], counts: &[f64]) -> Option<f64> {
    if scales.len() < 2 || counts.iter().any(|&c| !(c > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    Some(ols_slope(&xs, &ys))
}

/// Box-counting dimension of a sample ensemble, fitted on the mean counts.
/// The standard error comes from a fixed-seed bootstrap over samples.
pub fn estimate_box_dimension(samples: &[SetSample], scales: &[f64]) -> Result<DimensionEstimate> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    if scales.len() < 2 {
        return Err(invalid("scales", format!("need at least 2 box sizes, got {}", scales.len())));
    }
    if scales.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(invalid("scales", "box sizes must be strictly decreasing"));
    }
    let finest = scales[scales.len() - 1];
    if let Some(s) = samples.iter().find(|s| s.resolution() >= finest) {
        return Err(Error::ScaleBelowResolution {
            scale: finest,
            resolution: s.resolution(),
        });
    }
    let per_sample: Vec<Vec<u64>> = samples.iter().map(|s| box_counts(s, scales)).collect();
    let mean = |idx: &mut dyn Iterator<Item = usize>| -> Vec<f64> {
        let mut acc = vec![0.0; scales.len()];
        let mut n = 0usize;
        for i in idx {
            for (a, &c) in acc.iter_mut().zip(&per_sample[i]) {
                *a += c as f64;
            }
            n += 1;
        }
        acc.iter().map(|a| a / n as f64).collect()
    };
    let counts = mean(&mut (0..samples.len()));
    let value = fit_box_dimension(scales, &counts)
        .ok_or_else(|| Error::InsufficientData("every sample is empty at some scale".into()))?;

    let m = samples.len();
    let mut reps = Vec::with_capacity(BOOTSTRAP_ROUNDS as usize);
    for b in 0..BOOTSTRAP_ROUNDS {
        let mut rng = stream(BOOTSTRAP_SEED ^ m as u64, b);
        let draw: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        if let Some(v) = fit_box_dimension(scales, &mean(&mut draw.into_iter())) {
            reps.push(v);
        }
    }
    let stderr = if reps.len() > 1 {
        let mu = reps.iter().sum::<f64>() / reps.len() as f64;
        (reps.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (reps.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(DimensionEstimate {
        value: value.clamp(0.0, 1.0),
        stderr,
        scales: scales.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_sets::sample::PointKind;
    use crate::random_sets::subordinator::{subordinator_range_with, SubordinatorParams};

    #[test]
    fn default_scale_ladder() {
        let s = default_scales(1.0, 1e-6);
        assert_eq!(s[0], 1.0 / 16.0);
        assert!(s.windows(2).all(|w| w[1] == w[0] / 2.0));
        assert!(*s.last().unwrap() >= 16e-6);
        assert!(s.last().unwrap() / 2.0 < 16e-6);
    }

    #[test]
    fn singleton_has_dimension_zero() {
        let c = SetSample::uniform(1.0, 1e-6, vec![0.3], PointKind::Isolated).unwrap();
        let d = estimate_box_dimension(&[c], &default_scales(1.0, 1e-6)).unwrap();
        assert!(d.value.abs() < 1e-12);
        assert_eq!(d.stderr, 0.0);
    }

    #[test]
    fn full_interval_has_dimension_one() {
        let n = 100_000;
        let pts: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        let c = SetSample::uniform(1.0, 1e-5, pts, PointKind::Fill).unwrap();
        let d = estimate_box_dimension(&[c], &default_scales(1.0, 1e-5)).unwrap();
        assert!((d.value - 1.0).abs() < 1e-3, "{}", d.value);
    }

    #[test]
    fn rejects_bad_scale_lists() {
        let c = SetSample::uniform(1.0, 1e-3, vec![0.5], PointKind::Isolated).unwrap();
        assert!(estimate_box_dimension(&[], &[0.1, 0.05]).is_err());
        assert!(estimate_box_dimension(&[c.clone()], &[0.1]).is_err());
        assert!(estimate_box_dimension(&[c.clone()], &[0.05, 0.1]).is_err());
        assert!(matches!(
            estimate_box_dimension(&[c], &[0.1, 1e-3]),
            Err(Error::ScaleBelowResolution { .. })
        ));
    }

    #[test]
    fn subordinator_range_dimension() {
        let p = SubordinatorParams::with_default_cutoff(0.5, 1.0).unwrap();
        let samples: Vec<SetSample> = (0..200)
            .map(|i| subordinator_range_with(1.0, p, &mut stream(77, i)).unwrap())
            .collect();
        let d = estimate_box_dimension(&samples, &default_scales(1.0, p.jump_cutoff())).unwrap();
        assert!((d.value - 0.5).abs() < 0.05, "{d:?}");
        assert!(d.stderr > 0.0 && d.stderr < 0.05);
    }
}
