use rand_distr::StandardNormal;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng::{seeded, SimRng};

use super::sample::{PointKind, SetSample, SetSampler};

/// Proximity coefficient used when none is given: a step is hit when an
/// endpoint lies within `0.5 * sqrt(dt)` of the level.
pub const DEFAULT_BAND: f64 = 0.5;

/// A path on the uniform grid `0, dt, ..., t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    dt: f64,
    values: Vec<f64>,
}

impl PathSample {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        if values.is_empty() {
            return Err(invalid("values", "a path needs at least one grid point"));
        }
        Ok(PathSample { dt, values })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.dt)
    }
}

/// Number of grid steps for horizon `t` and requested step `dt`; the step is
/// then shrunk to `t / steps` so the grid ends exactly at `t`.
fn grid(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if dt > t {
        return Err(invalid("dt", format!("step {dt} exceeds horizon {t}")));
    }
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, t / steps as f64))
}

/// Standard Brownian motion started at 0, Gaussian increments of variance `dt`.
pub fn sample_brownian_path(t: f64, dt: f64, seed: u64) -> Result<PathSample> {
    brownian_path_with(t, dt, &mut seeded(seed))
}

pub fn brownian_path_with(t: f64, dt: f64, rng: &mut SimRng) -> Result<PathSample> {
    let (steps, dt) = grid(t, dt)?;
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = 0.0f64;
    values.push(x);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        values.push(x);
    }
    PathSample::new(dt, values)
}

#[inline]
fn step_hits(v0: f64, v1: f64, tol: f64) -> bool {
    (v0 <= 0.0 && v1 >= 0.0) || (v0 >= 0.0 && v1 <= 0.0) || v0.abs() <= tol || v1.abs() <= tol
}

/// Grid approximation of `{s : path(s) = a}`.
///
/// A step contributes its midpoint (as a fill point) when the path changes
/// side of `a` across it, or when an endpoint lies within `band * sqrt(dt)`
/// of `a`. The result has resolution `dt`.
pub fn extract_level_set(path: &PathSample, a: f64, band: f64) -> Result<SetSample> {
    if !(band >= 0.0) {
        return Err(invalid("band", format!("must be nonnegative, got {band}")));
    }
    let dt = path.dt();
    let tol = band * dt.sqrt();
    let points: Vec<f64> = path
        .values()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| step_hits(w[0] - a, w[1] - a, tol))
        .map(|(k, _)| (k as f64 + 0.5) * dt)
        .collect();
    let horizon = path.horizon().max(dt);
    SetSample::uniform(horizon, dt, points, PointKind::Fill)
}

/// Level set of a fresh Brownian path, generated step by step without storing
/// the path. Draws the same normals in the same order as
/// [`sample_brownian_path`] followed by [`extract_level_set`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianLevelSampler {
    pub t: f64,
    pub level: f64,
    pub dt: f64,
    pub band: f64,
}

impl BrownianLevelSampler {
    pub fn new(t: f64, level: f64, dt: f64, band: f64) -> Result<Self> {
        grid(t, dt)?;
        if !(band >= 0.0) {
            return Err(invalid("band", format!("must be nonnegative, got {band}")));
        }
        if !level.is_finite() {
            return Err(invalid("a", "level must be finite"));
        }
        Ok(BrownianLevelSampler { t, level, dt, band })
    }

    /// True when the path never comes near the level; cheaper than a full sample.
    pub fn misses_with(&self, rng: &mut SimRng) -> bool {
        let (steps, dt) = grid(self.t, self.dt).expect("validated");
        let sd = dt.sqrt();
        let tol = self.band * sd;
        let mut v0 = -self.level;
        for _ in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            let v1 = v0 + sd * z;
            if step_hits(v0, v1, tol) {
                return false;
            }
            v0 = v1;
        }
        true
    }
}

impl SetSampler for BrownianLevelSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample> {
        let (steps, dt) = grid(self.t, self.dt)?;
        let sd = dt.sqrt();
        let tol = self.band * sd;
        let mut points = Vec::new();
        let mut x = 0.0f64;
        for k in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            let next = x + sd * z;
            if step_hits(x - self.level, next - self.level, tol) {
                points.push((k as f64 + 0.5) * dt);
            }
            x = next;
        }
        SetSample::uniform(self.t, dt, points, PointKind::Fill)
    }
}
