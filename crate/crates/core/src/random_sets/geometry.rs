use crate::error::{invalid, Error, Result};

use super::sample::{PointKind, SetSample};

/// Hausdorff distance between two finite samples on a common horizon.
///
/// Exactly one empty argument yields the horizon (the diameter of `[0, t]`);
/// two empty arguments are at distance 0.
pub fn hausdorff_distance(c1: &SetSample, c2: &SetSample) -> Result<f64> {
    if c1.horizon() != c2.horizon() {
        return Err(Error::HorizonMismatch(c1.horizon(), c2.horizon()));
    }
    match (c1.is_empty(), c2.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(c1.horizon()),
        _ => {}
    }
    Ok(directed(c1.points(), c2.points()).max(directed(c2.points(), c1.points())))
}

/// `sup_{x in a} dist(x, b)` for sorted, nonempty lists.
fn directed(a: &[f64], b: &[f64]) -> f64 {
    let mut j = 0;
    let mut worst = 0.0f64;
    for &x in a {
        while j + 1 < b.len() && b[j + 1] <= x {
            j += 1;
        }
        let mut d = (x - b[j]).abs();
        if j + 1 < b.len() {
            d = d.min((b[j + 1] - x).abs());
        }
        worst = worst.max(d);
    }
    worst
}

/// `R_lambda(C) = lambda * C` on `[0, lambda * t]`; resolution scales with it.
pub fn rescale(c: &SetSample, lambda: f64) -> Result<SetSample> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let points: Vec<f64> = c.points().iter().map(|&x| x * lambda).collect();
    Ok(SetSample::from_parts(
        c.horizon() * lambda,
        c.resolution() * lambda,
        points,
        c.kinds().to_vec(),
    ))
}

/// `C -> t - C`. Accumulation points keep their rank and switch side.
pub fn time_reverse(c: &SetSample) -> SetSample {
    let t = c.horizon();
    let mut points = Vec::with_capacity(c.len());
    let mut kinds = Vec::with_capacity(c.len());
    for (x, k) in c.iter().rev() {
        points.push(t - x);
        kinds.push(match k {
            PointKind::Accumulation { rank, side } => PointKind::Accumulation {
                rank,
                side: side.reversed(),
            },
            other => other,
        });
    }
    // t - x can collide after rounding when two points are within an ulp.
    dedup_sorted(&mut points, &mut kinds);
    SetSample::from_parts(t, c.resolution(), points, kinds)
}

/// Set of accumulation points, read off the structure flags.
///
/// Isolated points drop out, rank-`r` accumulation points survive with rank
/// `r - 1` (rank 1 becomes isolated), fill points survive as fill.
pub fn derived_set(c: &SetSample) -> Result<SetSample> {
    let mut points = Vec::new();
    let mut kinds = Vec::new();
    for (i, (x, k)) in c.iter().enumerate() {
        let kept = match k {
            PointKind::Unflagged => return Err(Error::MissingFlags { index: i }),
            PointKind::Isolated => None,
            PointKind::Fill => Some(PointKind::Fill),
            PointKind::Accumulation { rank: 1, .. } => Some(PointKind::Isolated),
            PointKind::Accumulation { rank, side } => Some(PointKind::Accumulation { rank: rank - 1, side }),
        };
        if let Some(kind) = kept {
            points.push(x);
            kinds.push(kind);
        }
    }
    Ok(SetSample::from_parts(c.horizon(), c.resolution(), points, kinds))
}

pub(crate) fn dedup_sorted(points: &mut Vec<f64>, kinds: &mut Vec<PointKind>) {
    let mut w = 0;
    for r in 0..points.len() {
        if w > 0 && points[r] <= points[w - 1] {
            kinds[w - 1] = stronger(kinds[w - 1], kinds[r]);
            continue;
        }
        points[w] = points[r];
        kinds[w] = kinds[r];
        w += 1;
    }
    points.truncate(w);
    kinds.truncate(w);
}

fn stronger(a: PointKind, b: PointKind) -> PointKind {
    fn order(k: PointKind) -> u16 {
        match k {
            PointKind::Unflagged => 0,
            PointKind::Isolated => 1,
            PointKind::Accumulation { rank, .. } => 1 + rank as u16,
            PointKind::Fill => u16::MAX,
        }
    }
    if order(b) > order(a) {
        b
    } else {
        a
    }
}
