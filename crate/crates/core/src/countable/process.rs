use std::fmt;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::measure::{estimate_law, EmpiricalLaw};
use crate::random_sets::{PointKind, SetSample, SetSampler, Side};
use crate::rng::{seeded, SimRng};

use super::ladder::{spacing, LadderSpec, Site};
use super::rates::RateFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpKind {
    Small,
    Big,
    Snap,
}

impl fmt::Display for JumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JumpKind::Small => "small",
            JumpKind::Big => "big",
            JumpKind::Snap => "snap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub from: Site,
    pub to: Site,
    pub kind: JumpKind,
    /// Rank of the accumulation point reached by a snap; 0 otherwise.
    pub rank: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpTrajectory {
    pub start: Site,
    pub events: Vec<JumpEvent>,
    pub final_state: Site,
    pub horizon: f64,
    pub resolution: f64,
}

impl JumpTrajectory {
    /// `X(time)`, right-continuous.
    pub fn state_at(&self, time: f64) -> Site {
        let i = self.events.partition_point(|e| e.time <= time);
        if i == 0 {
            self.start
        } else {
            self.events[i - 1].to
        }
    }

    pub fn count(&self, kind: JumpKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time,from,to,kind")?;
        for e in &self.events {
            writeln!(w, "{},{},{},{}", e.time, e.from, e.to, e.kind)?;
        }
        Ok(())
    }
}

/// Runs the jump process from `a` up to time `t`.
///
/// Small jumps and the tail are simulated with a single uniformized clock of
/// rate `lambda(s, s+) + tail_bound`; a tail event picks the `j`-th canonical
/// candidate with probability proportional to its weight and is void when
/// that candidate does not exist. When the successor is below the depth
/// limit the whole run up to the next resolved point is collapsed into one
/// snap whose duration is the mean of the skipped exponential sum; a big
/// jump inside the run is decided by thinning against that duration.
pub fn simulate_trajectory(
    spec: &LadderSpec,
    rates: &RateFunction,
    a: Site,
    t: f64,
    seed: u64,
) -> Result<JumpTrajectory> {
    trajectory_with(spec, rates, a, t, &mut seeded(seed))
}

pub fn trajectory_with(
    spec: &LadderSpec,
    rates: &RateFunction,
    a: Site,
    t: f64,
    rng: &mut SimRng,
) -> Result<JumpTrajectory> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !spec.is_resolved(&a) {
        return Err(Error::StartNotInSet(a.value()));
    }
    let tail_rate = rates.tail_bound();
    let mut events = Vec::new();
    let mut now = 0.0f64;
    let mut s = a;
    let push = |events: &mut Vec<JumpEvent>, time: f64, from: Site, to: Site, kind: JumpKind, rank: u8| {
        let last = events.last().map_or(0.0, |e: &JumpEvent| e.time);
        let time = if time > last { time } else { last.next_up() };
        events.push(JumpEvent {
            time,
            from,
            to,
            kind,
            rank,
        });
        time
    };
    loop {
        let succ = spec.successor(&s);
        if spec.is_resolved(&succ) {
            let small = rates.successor_rate(spec, &s);
            let total = small + tail_rate;
            let e: f64 = Exp1.sample(rng);
            let time = now + e / total;
            if time > t {
                break;
            }
            let u: f64 = rng.random::<f64>() * total;
            if u < small {
                now = push(&mut events, time, s, succ, JumpKind::Small, 0);
                s = succ;
            } else {
                now = time;
                if let Some(to) = pick_tail(spec, rates, &s, u - small) {
                    now = push(&mut events, time, s, to, JumpKind::Big, 0);
                    s = to;
                }
            }
        } else {
            let (target, rank) = spec.next_resolved(&s);
            let run = spacing(&s, &target) / rates.successor_scale;
            let fire = 1.0 - (-tail_rate * run).exp();
            if rng.random::<f64>() < fire {
                let time = now + rng.random::<f64>() * run;
                if time > t {
                    break;
                }
                let u = rng.random::<f64>() * tail_rate;
                if let Some(to) = pick_tail(spec, rates, &s, u) {
                    now = push(&mut events, time, s, to, JumpKind::Big, 0);
                    s = to;
                    continue;
                }
            }
            let time = now + run;
            if time > t {
                break;
            }
            now = push(&mut events, time, s, target, JumpKind::Snap, rank);
            s = target;
        }
    }
    Ok(JumpTrajectory {
        start: a,
        events,
        final_state: s,
        horizon: t,
        resolution: 2f64.powi(-(spec.depth() as i32)),
    })
}

/// Tail candidate selected by `u` in `[0, tail_bound)`, or `None` for a void
/// event.
fn pick_tail(spec: &LadderSpec, rates: &RateFunction, s: &Site, mut u: f64) -> Option<Site> {
    let mut j = 2;
    while j < rates.max_candidates + 2 {
        let w = rates.tail_weight(j);
        if u < w {
            break;
        }
        u -= w;
        j += 1;
    }
    if j >= rates.max_candidates + 2 {
        return None;
    }
    spec.tail_candidates(s, j - 1).get(j - 2).copied()
}

/// Closure of the jump times: small and big jumps are isolated, snaps are
/// accumulation points of their rank, approached from the left.
pub fn extract_jump_set(traj: &JumpTrajectory) -> Result<SetSample> {
    let points: Vec<f64> = traj.events.iter().map(|e| e.time).collect();
    let kinds = traj
        .events
        .iter()
        .map(|e| match e.kind {
            JumpKind::Snap => PointKind::Accumulation {
                rank: e.rank.max(1),
                side: Side::Left,
            },
            _ => PointKind::Isolated,
        })
        .collect();
    SetSample::new(traj.horizon, traj.resolution, points, kinds)
}

/// Jump-time set of the process, as a [`SetSampler`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSetSampler {
    pub spec: LadderSpec,
    pub rates: RateFunction,
    pub start: Site,
    pub t: f64,
}

impl JumpSetSampler {
    pub fn new(spec: LadderSpec, rates: RateFunction, start: Site, t: f64) -> Result<Self> {
        if !spec.is_resolved(&start) {
            return Err(Error::StartNotInSet(start.value()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        Ok(JumpSetSampler { spec, rates, start, t })
    }
}

impl SetSampler for JumpSetSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> Result<SetSample> {
        extract_jump_set(&trajectory_with(&self.spec, &self.rates, self.start, self.t, rng)?)
    }
}

pub fn jump_set_law(
    spec: &LadderSpec,
    rates: &RateFunction,
    a: Site,
    t: f64,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<EmpiricalLaw> {
    let sampler = JumpSetSampler::new(*spec, *rates, a, t)?;
    estimate_law(&sampler, n, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_sets::{derived_set, time_reverse};
    use crate::rng::stream;

    fn l1() -> LadderSpec {
        LadderSpec::ladder1(40).unwrap()
    }

    fn l2() -> LadderSpec {
        LadderSpec::ladder2(40).unwrap()
    }

    #[test]
    fn event_structure() {
        let r = RateFunction::default();
        for spec in [l1(), l2()] {
            for seed in 0..50 {
                let a = Site::integer(seed % 3);
                let tr = simulate_trajectory(&spec, &r, a, 3.0, seed).unwrap();
                assert_eq!(tr.state_at(0.0), a);
                let mut prev = a;
                let mut last = 0.0;
                for e in &tr.events {
                    assert!(e.time > last && e.time <= 3.0);
                    assert_eq!(e.from, prev);
                    assert!(e.to > e.from && e.to.fixed() <= e.from.shifted(1).fixed());
                    match e.kind {
                        JumpKind::Small => assert_eq!(e.to, spec.successor(&e.from)),
                        JumpKind::Big => assert!(e.to > spec.successor(&e.from)),
                        JumpKind::Snap => assert_eq!((e.to, e.rank), spec.next_resolved(&e.from)),
                    }
                    assert!(spec.is_resolved(&e.to));
                    prev = e.to;
                    last = e.time;
                }
                assert_eq!(tr.final_state, prev);
                assert_eq!(tr.state_at(3.0), prev);
            }
        }
    }

    #[test]
    fn rejects_points_outside_the_set() {
        let r = RateFunction::default();
        let shallow = LadderSpec::ladder1(5).unwrap();
        let deep = LadderSpec::ladder1(10).unwrap().site_of(1.0 - 2f64.powi(-8)).unwrap();
        assert!(simulate_trajectory(&shallow, &r, deep, 1.0, 0).is_err());
        assert!(simulate_trajectory(&l1(), &r, Site::integer(0), 0.0, 0).is_err());
    }

    #[test]
    fn drift_is_between_one_and_two() {
        // mean displacement grows linearly with slope in [1, 2]
        let r = RateFunction::default();
        let n = 10_000u64;
        let mean_at = |t: f64| {
            (0..n)
                .map(|i| trajectory_with(&l1(), &r, Site::integer(0), t, &mut stream(31, i)).unwrap().final_state.value())
                .sum::<f64>()
                / n as f64
        };
        let (m2, m6) = (mean_at(2.0), mean_at(6.0));
        let slope = (m6 - m2) / 4.0;
        assert!((1.0..=2.0).contains(&slope), "slope {slope}");
    }

    #[test]
    fn csv_dump() {
        let tr = simulate_trajectory(&l1(), &RateFunction::default(), Site::integer(0), 1.0, 4).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time,from,to,kind"));
        assert_eq!(lines.count(), tr.events.len());
    }

    #[test]
    fn jump_sets_examples() {
        let empty = JumpTrajectory {
            start: Site::integer(0),
            events: vec![],
            final_state: Site::integer(0),
            horizon: 1.0,
            resolution: 1e-12,
        };
        assert!(extract_jump_set(&empty).unwrap().is_empty());
        let one = JumpTrajectory {
            events: vec![JumpEvent {
                time: 0.3,
                from: Site::integer(0),
                to: Site::integer(1),
                kind: JumpKind::Big,
                rank: 0,
            }],
            final_state: Site::integer(1),
            ..empty
        };
        let c = extract_jump_set(&one).unwrap();
        assert_eq!(c.points(), &[0.3]);
        assert_eq!(c.kinds(), &[PointKind::Isolated]);
    }

    #[test]
    fn accumulation_is_left_sided_only() {
        let s = JumpSetSampler::new(l1(), RateFunction::default(), Site::integer(0), 2.0).unwrap();
        for i in 0..10_000 {
            let c = s.sample_with(&mut stream(2, i)).unwrap();
            assert_eq!(c.right_limit_count(), 0);
            let snaps = c.kinds().iter().filter(|k| matches!(k, PointKind::Accumulation { .. })).count();
            assert_eq!(c.left_limit_count(), snaps);
            let r = time_reverse(&c);
            assert_eq!((r.left_limit_count(), r.right_limit_count()), (0, snaps));
        }
    }

    #[test]
    fn second_derived_set_separates_the_ladders() {
        let r = RateFunction::default();
        let second = |spec: LadderSpec, i: u64| {
            let c = JumpSetSampler::new(spec, r, Site::integer(0), 2.0)
                .unwrap()
                .sample_with(&mut stream(8, i))
                .unwrap();
            !derived_set(&derived_set(&c).unwrap()).unwrap().is_empty()
        };
        assert!((0..2000).all(|i| !second(l1(), i)));
        let hits = (0..2000).filter(|&i| second(l2(), i)).count();
        assert!(hits > 100, "{hits}");
    }

    #[test]
    fn empty_set_has_positive_mass() {
        // no jump before t happens with probability at least e^-(2 + 1/4) t
        let law = jump_set_law(&l1(), &RateFunction::default(), Site::integer(0), 0.5, 8, 20_000, 6).unwrap();
        let p = law.empty_mass();
        let se = (p * (1.0 - p) / 20_000.0).sqrt();
        assert!(p - 3.0 * se > 0.0, "{p}");
    }

    #[test]
    fn periodic_starts_share_support() {
        let r = RateFunction::default();
        let a = jump_set_law(&l1(), &r, Site::integer(0), 1.0, 8, 20_000, 1).unwrap();
        let b = jump_set_law(&l1(), &r, Site::integer(1), 1.0, 8, 20_000, 1).unwrap();
        // integer starts are shifts of each other; with common streams the laws agree exactly
        assert_eq!(a.to_text().lines().skip(1).collect::<Vec<_>>(), b.to_text().lines().skip(1).collect::<Vec<_>>());
    }
}
