use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Result};
use crate::rng::SimRng;

use super::sample::{PointKind, SetSample, SetSampler};

/// Homogeneous Poisson points of intensity `mu` on `[0, t]`. Its hitting law
/// is multiplicative: `Pr[Z n I = empty] = exp(-mu |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonPointSampler {
    pub t: f64,
    pub mu: f64,
}

impl PoissonPointSampler {
    pub fn new(t: f64, mu: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("must be positive, got {mu}")));
        }
        Ok(PoissonPointSampler { t, mu })
    }
}

impl SetSampler for PoissonPointSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample> {
        let k: f64 = Poisson::new(self.mu * self.t).expect("positive mean").sample(rng);
        let mut points: Vec<f64> = (0..k as u64).map(|_| rng.random::<f64>() * self.t).collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        SetSample::uniform(self.t, self.t * 1e-12, points, PointKind::Isolated)
    }
}
