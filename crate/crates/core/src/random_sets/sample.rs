use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::rng::{seeded, SimRng};

/// Side from which an accumulation point is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl Side {
    pub fn reversed(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Both => Side::Both,
        }
    }

    fn letter(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
            Side::Both => 'b',
        }
    }
}

/// Structure tag attached to every point of a [`SetSample`].
///
/// `rank` is the Cantor-Bendixson rank of an accumulation point: rank 1 is a
/// limit of isolated points, rank 2 a limit of rank-1 points, and so on.
/// `Fill` points stand for a dense sub-segment of an uncountable set, so each
/// of them is an accumulation point of every order. `Unflagged` marks points
/// read from a bare list; structural operations reject them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Isolated,
    Accumulation { rank: u8, side: Side },
    Fill,
    Unflagged,
}

impl PointKind {
    pub const LEFT_LIMIT: PointKind = PointKind::Accumulation {
        rank: 1,
        side: Side::Left,
    };

    pub fn is_left_limit(self) -> bool {
        matches!(
            self,
            PointKind::Accumulation {
                side: Side::Left | Side::Both,
                ..
            }
        )
    }

    pub fn is_right_limit(self) -> bool {
        matches!(
            self,
            PointKind::Accumulation {
                side: Side::Right | Side::Both,
                ..
            }
        )
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PointKind::Isolated => f.write_str("i"),
            PointKind::Fill => f.write_str("f"),
            PointKind::Unflagged => f.write_str("u"),
            PointKind::Accumulation {
                rank: 1,
                side: Side::Left,
            } => f.write_str("a"),
            PointKind::Accumulation { rank, side } => write!(f, "a{}{}", rank, side.letter()),
        }
    }
}

impl FromStr for PointKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown point flag `{s}`"));
        match s {
            "i" => Ok(PointKind::Isolated),
            "f" => Ok(PointKind::Fill),
            "u" => Ok(PointKind::Unflagged),
            "a" => Ok(PointKind::LEFT_LIMIT),
            _ => {
                let rest = s.strip_prefix('a').ok_or_else(bad)?;
                let (digits, side) = rest.split_at(rest.len().saturating_sub(1));
                let rank: u8 = digits.parse().map_err(|_| bad())?;
                if rank == 0 {
                    return Err(bad());
                }
                let side = match side {
                    "l" => Side::Left,
                    "r" => Side::Right,
                    "b" => Side::Both,
                    _ => return Err(bad()),
                };
                Ok(PointKind::Accumulation { rank, side })
            }
        }
    }
}

/// A sampled closed subset of `[0, horizon]`, stored as a strictly increasing
/// point list with one [`PointKind`] per point. The empty list is the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSample {
    horizon: f64,
    resolution: f64,
    points: Vec<f64>,
    kinds: Vec<PointKind>,
}

impl SetSample {
    pub fn new(horizon: f64, resolution: f64, points: Vec<f64>, kinds: Vec<PointKind>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive, got {horizon}")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(invalid("resolution", format!("must be positive, got {resolution}")));
        }
        if points.len() != kinds.len() {
            return Err(invalid(
                "kinds",
                format!("{} flags for {} points", kinds.len(), points.len()),
            ));
        }
        if let Some(w) = points.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(invalid("points", format!("not strictly increasing at index {}", w + 1)));
        }
        if let Some(&x) = points.iter().find(|&&x| !(0.0..=horizon).contains(&x)) {
            return Err(invalid("points", format!("{x} outside [0, {horizon}]")));
        }
        Ok(SetSample {
            horizon,
            resolution,
            points,
            kinds,
        })
    }

    pub fn empty(horizon: f64, resolution: f64) -> Result<Self> {
        Self::new(horizon, resolution, Vec::new(), Vec::new())
    }

    /// Every point tagged with the same kind.
    pub fn uniform(horizon: f64, resolution: f64, points: Vec<f64>, kind: PointKind) -> Result<Self> {
        let kinds = vec![kind; points.len()];
        Self::new(horizon, resolution, points, kinds)
    }

    /// Construction without re-validating; callers guarantee the invariants.
    pub(crate) fn from_parts(horizon: f64, resolution: f64, points: Vec<f64>, kinds: Vec<PointKind>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(points.len(), kinds.len());
        SetSample {
            horizon,
            resolution,
            points,
            kinds,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kinds(&self) -> &[PointKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (f64, PointKind)> + ExactSizeIterator + '_ {
        self.points.iter().copied().zip(self.kinds.iter().copied())
    }

    pub fn left_limit_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_left_limit()).count()
    }

    pub fn right_limit_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_right_limit()).count()
    }

    /// Line form: `horizon resolution time:flag time:flag ...`.
    pub fn to_line(&self) -> String {
        let mut out = format!("{} {}", self.horizon, self.resolution);
        for (x, k) in self.iter() {
            out.push(' ');
            out.push_str(&format!("{x}:{k}"));
        }
        out
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut fields = line.split_whitespace();
        let mut number = |what: &str| -> Result<f64> {
            let s = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
        };
        let horizon = number("horizon")?;
        let resolution = number("resolution")?;
        let mut points = Vec::new();
        let mut kinds = Vec::new();
        for field in fields {
            let (x, k) = match field.split_once(':') {
                Some((x, k)) => (x, k.parse()?),
                None => (field, PointKind::Unflagged),
            };
            points.push(x.parse::<f64>().map_err(|_| Error::Parse(format!("bad point `{x}`")))?);
            kinds.push(k);
        }
        Self::new(horizon, resolution, points, kinds)
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    time: f64,
    flag: String,
}

#[derive(Serialize, Deserialize)]
struct SetSampleRepr {
    horizon: f64,
    resolution: f64,
    points: Vec<PointRepr>,
}

impl Serialize for SetSample {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SetSampleRepr {
            horizon: self.horizon,
            resolution: self.resolution,
            points: self
                .iter()
                .map(|(time, k)| PointRepr {
                    time,
                    flag: k.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetSample {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SetSampleRepr::deserialize(deserializer)?;
        let mut points = Vec::with_capacity(repr.points.len());
        let mut kinds = Vec::with_capacity(repr.points.len());
        for p in repr.points {
            points.push(p.time);
            kinds.push(p.flag.parse().map_err(D::Error::custom)?);
        }
        SetSample::new(repr.horizon, repr.resolution, points, kinds).map_err(D::Error::custom)
    }
}

/// A seeded source of random closed sets on a fixed horizon.
///
/// Implementations must be pure functions of their parameters and the
/// generator state they are handed.
pub trait SetSampler: Sync {
    fn horizon(&self) -> f64;

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample>;

    fn sample(&self, seed: u64) -> Result<SetSample> {
        self.sample_with(&mut seeded(seed))
    }
}
