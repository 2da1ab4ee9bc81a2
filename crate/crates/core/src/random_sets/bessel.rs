//! Zero sets of Bessel processes of dimension `delta` in `(0, 2)`.
//!
//! Sampling runs in two stages. The first hitting time of 0 from `a > 0` is
//! found on a time grid for the squared Bessel process `X = R^2` started at
//! `a^2`. After that the zero set is the closed range of a stable subordinator
//! of index `1 - delta / 2`, shifted to start at the hitting time.
//!
//! Two grid schemes are available for the first stage. `Euler` is plain
//! Euler-Maruyama on `dX = delta dt + 2 sqrt(X+) dW`, clamped at 0, with a hit
//! whenever a step ends at or below 0. `Exact` draws each step from the
//! noncentral chi-square transition law and then decides whether the bridge
//! between the two grid values touched 0, using
//! `Pr[hit | r0, r1] = 1 - I_mu(z) / I_-mu(z)`, `z = r0 r1 / dt`,
//! `mu = 1 - delta / 2`. Euler over-counts hits at every fixed step size.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{invalid, Result};
use crate::rng::{seeded, SimRng};

use super::sample::{PointKind, SetSample, SetSampler};
use super::subordinator::{subordinator_range_with, SubordinatorParams, DEFAULT_RELATIVE_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BesselScheme {
    #[default]
    Exact,
    Euler,
}

impl std::str::FromStr for BesselScheme {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BesselScheme::Exact),
            "euler" => Ok(BesselScheme::Euler),
            _ => Err(invalid("scheme", format!("expected `exact` or `euler`, got `{s}`"))),
        }
    }
}

/// Probability that a Bessel bridge of index `-mu` over one step, with
/// `z = r0 r1 / dt`, touches 0.
pub fn bridge_hit_probability(mu: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z >= 12.0 {
        // (2/pi) sin(mu pi) K_mu(z) / I_-mu(z) from the large-z expansions
        let (mut k_sum, mut i_sum, mut term) = (1.0, 1.0, 1.0);
        for j in 1..=8 {
            let jf = j as f64;
            term *= (4.0 * mu * mu - (2.0 * jf - 1.0).powi(2)) / (jf * 8.0 * z);
            k_sum += term;
            i_sum += if j % 2 == 1 { -term } else { term };
        }
        let s = (mu * std::f64::consts::PI).sin();
        return 2.0 * s * (-2.0 * z).exp() * k_sum / i_sum;
    }
    (1.0 - bessel_i(mu, z) / bessel_i(-mu, z)).clamp(0.0, 1.0)
}

/// Modified Bessel function `I_nu(z)` for `nu > -1` and moderate `z`, by its
/// power series.
fn bessel_i(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = ((0.5 * z).ln() * nu - statrs::function::gamma::ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselZeroSampler {
    pub t: f64,
    pub a: f64,
    pub delta: f64,
    pub dt: f64,
    /// Jump cutoff of the subordinator stage.
    pub jump_cutoff: f64,
    pub scheme: BesselScheme,
}

impl BesselZeroSampler {
    pub fn new(t: f64, a: f64, delta: f64, dt: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 2.0) {
            return Err(invalid("delta", format!("must lie in (0,2), got {delta}")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(invalid("a", format!("must be nonnegative, got {a}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        if !(dt > 0.0 && dt <= t) {
            return Err(invalid("dt", format!("must lie in (0, t], got {dt}")));
        }
        Ok(BesselZeroSampler {
            t,
            a,
            delta,
            dt,
            jump_cutoff: DEFAULT_RELATIVE_CUTOFF * t,
            scheme: BesselScheme::default(),
        })
    }

    pub fn with_jump_cutoff(mut self, eps: f64) -> Result<Self> {
        SubordinatorParams::new(self.index(), eps)?;
        self.jump_cutoff = eps;
        Ok(self)
    }

    pub fn with_scheme(mut self, scheme: BesselScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Index `1 - delta/2` of the subordinator whose range is the zero set.
    pub fn index(&self) -> f64 {
        1.0 - self.delta / 2.0
    }

    /// First time the squared Bessel process from `a^2` reaches 0, or `None`
    /// if it stays positive up to the horizon.
    pub fn hitting_time_with(&self, rng: &mut SimRng) -> Option<f64> {
        if self.a == 0.0 {
            return Some(0.0);
        }
        let steps = (self.t / self.dt - 1e-9).ceil().max(1.0) as usize;
        let dt = self.t / steps as f64;
        let x0 = self.a * self.a;
        match self.scheme {
            BesselScheme::Euler => self.euler_hit(x0, steps, dt, rng),
            BesselScheme::Exact => self.exact_hit(x0, steps, dt, rng),
        }
    }

    fn euler_hit(&self, mut x: f64, steps: usize, dt: f64, rng: &mut SimRng) -> Option<f64> {
        let sd = dt.sqrt();
        for k in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            let next = x + self.delta * dt + 2.0 * x.max(0.0).sqrt() * sd * z;
            if next <= 0.0 {
                // linear interpolation of the crossing inside the step
                let frac = x / (x - next);
                return Some((k as f64 + frac) * dt);
            }
            x = next;
        }
        None
    }

    fn exact_hit(&self, mut x: f64, steps: usize, dt: f64, rng: &mut SimRng) -> Option<f64> {
        let mu = self.index();
        let half_delta = 0.5 * self.delta;
        for k in 0..steps {
            // X(t+dt) = 2 dt Gamma(delta/2 + N), N ~ Poisson(X(t) / (2 dt))
            let lam = x / (2.0 * dt);
            let n = if lam > 0.0 {
                Poisson::new(lam).expect("positive mean").sample(rng)
            } else {
                0.0
            };
            let g: f64 = Gamma::new(half_delta + n, 1.0).expect("positive shape").sample(rng);
            let next = 2.0 * dt * g;
            let u: f64 = rng.random();
            if u < bridge_hit_probability(mu, (x * next).sqrt() / dt) {
                return Some((k as f64 + 0.5) * dt);
            }
            x = next;
        }
        None
    }
}

impl SetSampler for BesselZeroSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample> {
        let params = SubordinatorParams::new(self.index(), self.jump_cutoff)?;
        let Some(hit) = self.hitting_time_with(rng) else {
            return SetSample::empty(self.t, self.jump_cutoff);
        };
        let rest = self.t - hit;
        if rest <= 0.0 {
            return SetSample::empty(self.t, self.jump_cutoff);
        }
        let tail = subordinator_range_with(rest, params, rng)?;
        let mut points = Vec::with_capacity(tail.len());
        for &x in tail.points() {
            let y = (hit + x).min(self.t);
            if points.last().map_or(true, |&l| y > l) {
                points.push(y);
            }
        }
        let kinds = vec![PointKind::Fill; points.len()];
        Ok(SetSample::from_parts(self.t, self.jump_cutoff, points, kinds))
    }
}

pub fn sample_bessel_zero_set(t: f64, a: f64, delta: f64, dt: f64, seed: u64) -> Result<SetSample> {
    BesselZeroSampler::new(t, a, delta, dt)?.sample_with(&mut seeded(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use statrs::distribution::{ContinuousCDF, Gamma};

    /// `T_a` from `a` equals `a^2 / (2 G)` with `G ~ Gamma(1 - delta/2, 1)`.
    fn empty_probability(a: f64, t: f64, delta: f64) -> f64 {
        Gamma::new(1.0 - delta / 2.0, 1.0).unwrap().cdf(a * a / (2.0 * t))
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(BesselZeroSampler::new(1.0, 1.0, 0.0, 1e-3).is_err());
        assert!(BesselZeroSampler::new(1.0, 1.0, 2.0, 1e-3).is_err());
        assert!(BesselZeroSampler::new(1.0, -1.0, 1.0, 1e-3).is_err());
        assert!(sample_bessel_zero_set(1.0, 1.0, 2.5, 1e-3, 0).is_err());
    }

    #[test]
    fn start_at_zero_contains_zero() {
        for seed in 0..10 {
            let z = sample_bessel_zero_set(1.0, 0.0, 1.0, 1e-3, seed).unwrap();
            assert_eq!(z.points()[0], 0.0);
        }
    }

    #[test]
    fn short_horizon_gives_empty_set() {
        let z = sample_bessel_zero_set(1e-3, 5.0, 1.0, 1e-4, 1).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn oracle_reduces_to_reflection_principle() {
        use statrs::distribution::Normal;
        let p = empty_probability(1.0, 1.0, 1.0);
        let q = 2.0 * Normal::standard().cdf(1.0) - 1.0;
        assert!((p - q).abs() < 1e-9, "{p} vs {q}");
    }

    #[test]
    fn bridge_probability_for_reflected_brownian_motion() {
        // delta = 1: |B| bridge touches 0 with probability 2 e^{-2z} / (1 + e^{-2z})
        for z in [1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 29.0] {
            let e = (-2.0f64 * z).exp();
            let p = bridge_hit_probability(0.5, z);
            assert!((p - 2.0 * e / (1.0 + e)).abs() < 1e-12, "z {z}: {p}");
        }
        assert_eq!(bridge_hit_probability(0.25, 0.0), 1.0);
        assert!(bridge_hit_probability(0.25, 40.0) < 1e-34);
    }

    #[test]
    fn bridge_probability_decreases_with_distance() {
        for mu in [0.1, 0.25, 0.75, 0.9] {
            let ps: Vec<f64> = (1..60).map(|k| bridge_hit_probability(mu, k as f64 * 0.5)).collect();
            assert!(ps.windows(2).all(|w| w[1] <= w[0]), "mu {mu}");
            // leading term 2 sin(mu pi) e^{-2z}
            let z: f64 = 12.0;
            let lead = 2.0 * (mu * std::f64::consts::PI).sin() * (-2.0 * z).exp();
            assert!((bridge_hit_probability(mu, z) / lead - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn parses_scheme_names() {
        assert_eq!("exact".parse::<BesselScheme>().unwrap(), BesselScheme::Exact);
        assert_eq!("euler".parse::<BesselScheme>().unwrap(), BesselScheme::Euler);
        assert!("milstein".parse::<BesselScheme>().is_err());
    }

    #[test]
    fn euler_scheme_hits_too_often() {
        let n = 100_000u64;
        let s = BesselZeroSampler::new(1.0, 1.0, 1.0, 1e-2).unwrap().with_scheme(BesselScheme::Euler);
        let misses = (0..n)
            .filter(|&i| s.hitting_time_with(&mut stream(6, i)).is_none())
            .count();
        let p = empty_probability(1.0, 1.0, 1.0);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((misses as f64 / n as f64) < p - 5.0 * se, "{}", misses as f64 / n as f64);
    }

    #[test]
    fn empty_probability_matches_hitting_law() {
        let n = 20_000u64;
        for delta in [0.5, 1.0, 1.5] {
            let s = BesselZeroSampler::new(1.0, 1.0, delta, 1e-2).unwrap();
            let misses = (0..n)
                .filter(|&i| s.hitting_time_with(&mut stream(4, i)).is_none())
                .count();
            let p_hat = misses as f64 / n as f64;
            let p = empty_probability(1.0, 1.0, delta);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((p_hat - p).abs() < 3.0 * se, "delta {delta}: {p_hat} vs {p}");
        }
    }
}
