use crate::error::{invalid, Result};
use crate::measure::{Diagnostic, Verdict};

use super::ladder::{spacing, LadderSpec, Site};

pub const DEFAULT_MAX_CANDIDATES: usize = 64;

/// Jump rates on a ladder set.
///
/// The successor gets `successor_scale / (s+ - s)`. The `j`-th tail
/// candidate (canonical order, `j >= 2` counting the successor as `j = 1`)
/// gets `tail_scale * 2^-j`, for at most `max_candidates` candidates. With the
/// defaults the tail sums to at most 1/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunction {
    pub successor_scale: f64,
    pub tail_scale: f64,
    pub max_candidates: usize,
}

impl Default for RateFunction {
    fn default() -> Self {
        RateFunction {
            successor_scale: 1.0,
            tail_scale: 0.5,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl RateFunction {
    pub fn new(successor_scale: f64, tail_scale: f64, max_candidates: usize) -> Result<Self> {
        if !(successor_scale > 0.0 && successor_scale.is_finite()) {
            return Err(invalid("successor_scale", format!("must be positive, got {successor_scale}")));
        }
        if !(tail_scale > 0.0 && tail_scale.is_finite()) {
            return Err(invalid("tail_scale", format!("must be positive, got {tail_scale}")));
        }
        if max_candidates == 0 || max_candidates > 1000 {
            return Err(invalid("max_candidates", format!("must lie in 1..=1000, got {max_candidates}")));
        }
        Ok(RateFunction {
            successor_scale,
            tail_scale,
            max_candidates,
        })
    }

    pub fn successor_rate(&self, spec: &LadderSpec, s: &Site) -> f64 {
        self.successor_scale / spacing(s, &spec.successor(s))
    }

    /// Rate of the `j`-th point in the canonical enumeration, `j >= 2`.
    pub fn tail_weight(&self, j: usize) -> f64 {
        self.tail_scale * 0.5f64.powi(j as i32)
    }

    /// Upper bound of the total tail rate, used to uniformize big jumps.
    pub fn tail_bound(&self) -> f64 {
        self.tail_scale * (0.5 - 0.5f64.powi(self.max_candidates as i32 + 1))
    }

    pub fn tail_sum(&self, spec: &LadderSpec, s: &Site) -> f64 {
        let c = spec.tail_candidates(s, self.max_candidates).len();
        (2..c + 2).map(|j| self.tail_weight(j)).sum()
    }

    /// `lambda(s, s')`.
    pub fn rate(&self, spec: &LadderSpec, s: &Site, target: &Site) -> f64 {
        let succ = spec.successor(s);
        if *target == succ {
            return self.successor_rate(spec, s);
        }
        spec.tail_candidates(s, self.max_candidates)
            .iter()
            .position(|c| c == target)
            .map_or(0.0, |i| self.tail_weight(i + 2))
    }
}

/// Checks the set and rate conditions at every resolved point of `[0, horizon]`:
/// 1-periodicity, closedness at resolved limit points, positivity of rates
/// exactly on `(s, s+1]`, the successor rate `1 / (s+ - s)` and a tail sum
/// of at most 1. Violations are reported, not raised; the first one is kept
/// in the diagnostic note.
pub fn validate_spec(spec: &LadderSpec, rates: &RateFunction, horizon: f64) -> Diagnostic {
    let points = spec.resolved_points(horizon);
    let mut violations = 0u64;
    let mut first: Option<String> = None;
    let mut fail = |msg: String| {
        violations += 1;
        if first.is_none() {
            first = Some(msg);
        }
    };
    let mut max_tail = 0.0f64;
    for s in &points {
        // (a) periodicity and closedness
        let up = s.shifted(1);
        if !spec.is_resolved(&up) || spacing(s, &up) != 1.0 {
            fail(format!("(a) periodicity at {s}"));
        }
        if s.k() > 0 && s.exponents().len() < spec.levels() && s.level() < spec.depth() {
            // s is the limit of (k, exps ++ [m]) as m grows; the deepest
            // resolved term must lead straight back to s
            let mut deeper = s.exponents().to_vec();
            deeper.push(spec.depth());
            let approach = Site::with(s.k(), &deeper);
            if spec.next_resolved(&approach).0 != *s {
                fail(format!("(a) closedness at {s}"));
            }
        }
        // (b) positivity exactly on (s, s+1]
        let succ = spec.successor(s);
        let cands = spec.tail_candidates(s, rates.max_candidates);
        for c in std::iter::once(&succ).chain(cands.iter()) {
            let r = rates.rate(spec, s, c);
            if !(r > 0.0) || !(c > s && c.fixed() <= up.fixed()) {
                fail(format!("(b) lambda({s}, {c}) = {r}"));
            }
        }
        let beyond = spec.successor(&up);
        if rates.rate(spec, s, &beyond) != 0.0 || rates.rate(spec, s, s) != 0.0 {
            fail(format!("(b) nonzero rate outside (s, s+1] at {s}"));
        }
        // (c) successor rate and tail bound
        let want = 1.0 / spacing(s, &succ);
        let got = rates.successor_rate(spec, s);
        if (got - want).abs() > 1e-12 * want {
            fail(format!("(c) lambda({s}, {succ}) = {got}, need {want}"));
        }
        let tail = rates.tail_sum(spec, s);
        max_tail = max_tail.max(tail);
        if tail > 1.0 {
            fail(format!("(c) tail sum {tail} at {s}"));
        }
    }
    let verdict = if violations == 0 { Verdict::Pass } else { Verdict::Fail };
    let mut d = Diagnostic::new("validate_spec", violations as f64, 0.0, verdict)
        .with_extra("checked_points", points.len() as f64)
        .with_extra("max_tail_sum", max_tail)
        .with_extra("depth", spec.depth() as f64)
        .with_extra("levels", spec.levels() as f64);
    d.note = first;
    d
}
