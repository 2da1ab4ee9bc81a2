//! The ladder sets `S_K`: all `k - (2^-e1 + ... + 2^-ej)` with `j <= K`,
//! `1 <= e1 < ... < ej`, `k >= 1`, together with the nonnegative integers.
//! `S_1` has the integers as its only accumulation points; in `S_2` the
//! points `k - 2^-l` are accumulation points of rank 1 and the integers of
//! rank 2.
//!
//! Points are stored as a [`Site`] code and compared in 64-bit fixed point, so
//! successor and limit computations are exact down to depth 63.

use std::fmt;

use crate::error::{invalid, Error, Result};

pub const MAX_LEVELS: usize = 3;
pub const MAX_DEPTH: u8 = 62;
pub const DEFAULT_DEPTH: u8 = 40;

const ONE: u128 = 1 << 64;

/// Point `k - sum 2^-e` of a ladder set; integers have no exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Site {
    k: u64,
    len: u8,
    exps: [u8; MAX_LEVELS],
}

impl Site {
    pub fn integer(k: u64) -> Site {
        Site {
            k,
            len: 0,
            exps: [0; MAX_LEVELS],
        }
    }

    pub(crate) fn with(k: u64, exps: &[u8]) -> Site {
        let mut s = Site::integer(k);
        s.exps[..exps.len()].copy_from_slice(exps);
        s.len = exps.len() as u8;
        s
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.len as usize]
    }

    pub fn is_integer(&self) -> bool {
        self.len == 0
    }

    /// Largest exponent; 0 for integers.
    pub fn level(&self) -> u8 {
        self.exponents().last().copied().unwrap_or(0)
    }

    /// Value times `2^64`.
    pub fn fixed(&self) -> u128 {
        let frac: u128 = self.exponents().iter().map(|&e| ONE >> e).sum();
        (self.k as u128) * ONE - frac
    }

    pub fn value(&self) -> f64 {
        self.fixed() as f64 / ONE as f64
    }

    /// The same point one period later.
    pub fn shifted(&self, periods: u64) -> Site {
        Site {
            k: self.k + periods,
            ..*self
        }
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.fixed().cmp(&other.fixed())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Fixed-point gap `b - a` as a float.
pub fn spacing(a: &Site, b: &Site) -> f64 {
    (b.fixed() - a.fixed()) as f64 / ONE as f64
}

/// A ladder set `S_K` with refinement depth `L`: a point is resolved when all
/// of its exponents are at most `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderSpec {
    levels: usize,
    depth: u8,
}

impl LadderSpec {
    pub fn new(levels: usize, depth: u8) -> Result<Self> {
        if levels == 0 || levels > MAX_LEVELS {
            return Err(invalid("levels", format!("must lie in 1..={MAX_LEVELS}, got {levels}")));
        }
        if (depth as usize) < levels || depth > MAX_DEPTH {
            return Err(invalid(
                "depth",
                format!("must lie in {levels}..={MAX_DEPTH} to resolve any point of (0,1), got {depth}"),
            ));
        }
        Ok(LadderSpec { levels, depth })
    }

    pub fn ladder1(depth: u8) -> Result<Self> {
        Self::new(1, depth)
    }

    pub fn ladder2(depth: u8) -> Result<Self> {
        Self::new(2, depth)
    }

    pub fn by_name(name: &str, depth: u8) -> Result<Self> {
        match name {
            "ladder1" => Self::ladder1(depth),
            "ladder2" => Self::ladder2(depth),
            "ladder3" => Self::new(3, depth),
            _ => Err(invalid("spec", format!("unknown set `{name}`"))),
        }
    }

    /// Depth whose finest spacing `2^-L` is the largest one below `tol`.
    pub fn depth_for_tolerance(tol: f64) -> Result<u8> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid("snap_tol", format!("must lie in (0,1), got {tol}")));
        }
        let d = (-tol.log2()).floor() as i64 + 1;
        Ok(d.clamp(1, MAX_DEPTH as i64) as u8)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn name(&self) -> String {
        format!("ladder{}", self.levels)
    }

    pub fn is_resolved(&self, s: &Site) -> bool {
        s.len as usize <= self.levels && s.exponents().iter().all(|&e| e <= self.depth)
    }

    /// Least element of `S` above `s`, resolved or not.
    pub fn successor(&self, s: &Site) -> Site {
        let exps = s.exponents();
        let (k, mut next): (u64, Vec<u8>) = if exps.is_empty() {
            (s.k + 1, Vec::new())
        } else {
            let mut v = exps.to_vec();
            *v.last_mut().unwrap() += 1;
            (s.k, v)
        };
        while next.len() < self.levels {
            let e = next.last().copied().unwrap_or(0) + 1;
            next.push(e);
        }
        Site::with(k, &next)
    }

    /// Least resolved element above `s`, and the number of exponents dropped
    /// from the true successor to reach it. A nonzero count means the step
    /// passes an infinite run of unresolved points; the count is the rank of
    /// the limit point reached.
    pub fn next_resolved(&self, s: &Site) -> (Site, u8) {
        let succ = self.successor(s);
        let keep = succ.exponents().iter().take_while(|&&e| e <= self.depth).count();
        let dropped = (succ.len as usize - keep) as u8;
        (Site::with(succ.k, &succ.exponents()[..keep]), dropped)
    }

    /// Resolved points of `S ∩ (lo, hi]` whose level is exactly `m`, in
    /// increasing order.
    fn level_points(&self, m: u8, lo: u128, hi: u128, out: &mut Vec<Site>) {
        let start = out.len();
        let mut push = |exps: &[u8]| {
            let frac: u128 = exps.iter().map(|&e| ONE >> e).sum();
            // unique k with k - frac in (lo, hi], if any (hi - lo <= 1)
            let k = (hi + frac) / ONE;
            let v = k * ONE - frac;
            if k >= 1 && v > lo && v <= hi {
                out.push(Site::with(k as u64, exps));
            }
        };
        if m == 0 {
            let mut k = lo / ONE + 1;
            while k * ONE <= hi {
                out.push(Site::integer(k as u64));
                k += 1;
            }
        } else {
            // subsets of {1..m} containing m, of size <= levels
            let mut stack: Vec<u8> = Vec::new();
            fn rec(stack: &mut Vec<u8>, from: u8, m: u8, room: usize, push: &mut dyn FnMut(&[u8])) {
                let mut full = stack.clone();
                full.push(m);
                push(&full);
                if room == 0 {
                    return;
                }
                for e in from..m {
                    stack.push(e);
                    rec(stack, e + 1, m, room - 1, push);
                    stack.pop();
                }
            }
            rec(&mut stack, 1, m, self.levels - 1, &mut push);
        }
        out[start..].sort();
    }

    /// First `limit` resolved points of `S ∩ (s+, s+1]` in the canonical
    /// order: by level, then by value. This order reaches every point after
    /// finitely many steps, which an increasing enumeration cannot do once
    /// the interval contains accumulation points.
    pub fn tail_candidates(&self, s: &Site, limit: usize) -> Vec<Site> {
        let lo = self.successor(s).fixed();
        let hi = s.fixed() + ONE;
        let mut out = Vec::new();
        for m in 0..=self.depth {
            if out.len() >= limit {
                break;
            }
            self.level_points(m, lo, hi, &mut out);
        }
        out.truncate(limit);
        out
    }

    /// Site code of a resolved point given as a number.
    pub fn site_of(&self, a: f64) -> Result<Site> {
        if !(a >= 0.0 && a.is_finite() && a < 1e15) {
            return Err(Error::StartNotInSet(a));
        }
        let k = a.ceil();
        let frac = k - a;
        if frac == 0.0 {
            return Ok(Site::integer(k as u64));
        }
        let scaled = frac * 2f64.powi(64);
        if scaled.fract() != 0.0 {
            return Err(Error::StartNotInSet(a));
        }
        let bits = scaled as u128;
        let exps: Vec<u8> = (1..=64u8).filter(|&e| bits >> (64 - e) & 1 == 1).collect();
        let site = Site::with(k as u64, &exps[..exps.len().min(MAX_LEVELS)]);
        if exps.len() > self.levels || !self.is_resolved(&site) || site.fixed() != bits_value(k as u64, bits) {
            return Err(Error::StartNotInSet(a));
        }
        Ok(site)
    }

    /// All resolved points in `[0, horizon]`, increasing.
    pub fn resolved_points(&self, horizon: f64) -> Vec<Site> {
        let mut out = vec![Site::integer(0)];
        loop {
            let (next, _) = self.next_resolved(out.last().unwrap());
            if next.value() > horizon {
                break;
            }
            out.push(next);
        }
        out
    }
}

fn bits_value(k: u64, frac_bits: u128) -> u128 {
    (k as u128) * ONE - frac_bits
}
