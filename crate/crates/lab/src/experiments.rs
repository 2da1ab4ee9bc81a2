//! Experiment dispatch. Each experiment turns a config into an [`Outcome`];
//! nothing touches the disk until the whole outcome has been computed.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};

use randset_core::algebra::AsymmetryTally;
use randset_core::countable::{JumpSetSampler, LadderSpec, RateFunction};
use randset_core::measure::{
    equivalence_diagnostic, intensity_from_atom, poisson_block_check, singularity_diagnostic, two_sample_chi_square,
    support_diagnostic, CellPattern, Diagnostic, EmpiricalLaw, SingularityOptions,
};
use randset_core::random_sets::{
    box_counts, default_scales, estimate_box_dimension, gaps_longer_than, rank_size_slope, rescale, BesselScheme,
    BesselZeroSampler, BrownianLevelSampler, PoissonPointSampler, SetSample, SetSampler, SubordinatorParams,
    SubordinatorSampler,
};
use randset_core::rng::{child_seed, stream, SimRng};

use crate::algebra_suite::verify_algebra;
use crate::config::ExperimentConfig;
use crate::parallel::Pool;
use crate::report::{pass_if, write_outcome, Outcome, PlotData, ReportRow};

pub const EXPERIMENTS: &[&str] = &[
    "atom-mass", "dimension", "gap-tail", "scale", "equiv", "split", "sing", "poisson", "asym", "sample", "law",
    "algebra",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Brownian,
    Bessel,
    Jump,
    Subordinator,
    Poisson,
}

impl FromStr for Family {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "brownian" => Family::Brownian,
            "bessel" => Family::Bessel,
            "jump" => Family::Jump,
            "subordinator" => Family::Subordinator,
            "poisson" => Family::Poisson,
            _ => bail!("unknown family `{s}`"),
        })
    }
}

/// Per-side parameters; the rest comes from the config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub t: f64,
    pub a: f64,
    pub delta: f64,
    pub start: f64,
    pub dt: f64,
}

impl Params {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Params {
            t: cfg.positive("t")?,
            a: cfg.get("a")?,
            delta: cfg.get("delta")?,
            start: cfg.get("start")?,
            dt: cfg.positive("dt")?,
        })
    }
}

pub fn ladder(cfg: &ExperimentConfig) -> Result<LadderSpec> {
    let depth = match cfg.get_opt::<f64>("snap_tol")? {
        Some(tol) => LadderSpec::depth_for_tolerance(tol)?,
        None => cfg.get("depth")?,
    };
    Ok(LadderSpec::by_name(cfg.raw("spec").unwrap_or("ladder1"), depth)?)
}

fn subordinator_index(cfg: &ExperimentConfig, delta: f64) -> Result<f64> {
    Ok(cfg.get_opt("index")?.unwrap_or(1.0 - delta / 2.0))
}

pub fn build_sampler(cfg: &ExperimentConfig, family: Family, p: Params) -> Result<Box<dyn SetSampler>> {
    Ok(match family {
        Family::Brownian => Box::new(BrownianLevelSampler::new(p.t, p.a, p.dt, cfg.get("band")?)?),
        Family::Bessel => {
            let scheme: BesselScheme = cfg.get("scheme")?;
            Box::new(BesselZeroSampler::new(p.t, p.a, p.delta, p.dt)?.with_scheme(scheme))
        }
        Family::Jump => {
            let spec = ladder(cfg)?;
            let start = spec.site_of(p.start)?;
            Box::new(JumpSetSampler::new(spec, RateFunction::default(), start, p.t)?)
        }
        Family::Subordinator => {
            let params = SubordinatorParams::with_default_cutoff(subordinator_index(cfg, p.delta)?, p.t)?;
            Box::new(SubordinatorSampler { t: p.t, params })
        }
        Family::Poisson => {
            let mu: f64 = cfg.get("mu").context("the poisson family needs `mu`")?;
            Box::new(PoissonPointSampler::new(p.t, mu)?)
        }
    })
}

/// `lambda * C` for `C` drawn from `inner`, reported on the horizon `t`.
pub struct RescaledSampler {
    pub inner: Box<dyn SetSampler>,
    pub lambda: f64,
    pub t: f64,
}

impl SetSampler for RescaledSampler {
    fn horizon(&self) -> f64 {
        self.t
    }

    fn sample_with(&self, rng: &mut SimRng) -> randset_core::Result<SetSample> {
        rescale(&self.inner.sample_with(rng)?, self.lambda)
    }
}

struct Rows {
    experiment: String,
    digest: String,
    out: Outcome,
}

impl Rows {
    fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        Rows {
            experiment: experiment.to_string(),
            digest: cfg.digest(),
            out: Outcome::default(),
        }
    }

    fn push(&mut self, statistic: &str, value: f64, ci: Option<(f64, f64)>, verdict: String) {
        self.out.rows.push(ReportRow {
            experiment: self.experiment.clone(),
            params: self.digest.clone(),
            statistic: statistic.to_string(),
            value,
            ci_lo: ci.map(|c| c.0),
            ci_hi: ci.map(|c| c.1),
            verdict,
        });
    }

    fn info(&mut self, statistic: &str, value: f64) {
        self.push(statistic, value, None, "info".into());
    }

    fn diagnostic(&mut self, statistic: &str, d: &Diagnostic) {
        self.push(statistic, d.statistic, None, d.verdict.to_string());
        if let Some(p) = d.p_value {
            self.info(&format!("{statistic}_p_value"), p);
        }
    }
}

/// Checks everything that can be checked without sampling.
fn validate(cfg: &ExperimentConfig) -> Result<String> {
    let exp = cfg.experiment()?;
    if !EXPERIMENTS.contains(&exp.as_str()) {
        bail!("unknown experiment `{exp}`; expected one of {}", EXPERIMENTS.join(", "));
    }
    cfg.seed()?;
    cfg.samples()?;
    cfg.workers()?;
    let cells: usize = cfg.get("cells")?;
    if cells == 0 {
        bail!("cells must be at least 1");
    }
    let alpha: f64 = cfg.get("alpha")?;
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("alpha must lie in (0,1), got {alpha}");
    }
    cfg.get::<Family>("family")?;
    Params::from_config(cfg)?;
    Ok(exp)
}

/// Computes the outcome of the configured experiment without writing files.
pub fn compute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let exp = validate(cfg)?;
    let pool = Pool::new(cfg.workers()?)?;
    let mut rows = Rows::new(&exp, cfg);
    match exp.as_str() {
        "atom-mass" => atom_mass(cfg, &pool, &mut rows)?,
        "dimension" => dimension(cfg, &pool, &mut rows)?,
        "gap-tail" => gap_tail(cfg, &pool, &mut rows)?,
        "scale" => scale(cfg, &pool, &mut rows)?,
        "equiv" => equiv(cfg, &pool, &mut rows)?,
        "split" => split(cfg, &pool, &mut rows)?,
        "sing" => sing(cfg, &pool, &mut rows)?,
        "poisson" => poisson(cfg, &pool, &mut rows)?,
        "asym" => asym(cfg, &pool, &mut rows)?,
        "sample" => sample(cfg, &pool, &mut rows)?,
        "law" => law(cfg, &pool, &mut rows)?,
        "algebra" => {
            let n: usize = cfg.get("cells")?;
            rows.out.rows = verify_algebra(n, cfg.get("trials")?, cfg.seed()?)?
                .into_iter()
                .map(|mut r| {
                    r.params = rows.digest.clone();
                    r
                })
                .collect();
        }
        _ => unreachable!("validated"),
    }
    Ok(rows.out)
}

/// Runs the configured experiment and writes its report files to the
/// configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let out = compute(cfg)?;
    write_outcome(&cfg.out_dir(), &cfg.experiment()?, &out)?;
    Ok(out.rows)
}

fn family_and_params(cfg: &ExperimentConfig) -> Result<(Family, Params)> {
    Ok((cfg.get("family")?, Params::from_config(cfg)?))
}

fn atom_mass(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let (n, seed) = (cfg.samples()?, cfg.seed()?);
    let empties = if family == Family::Brownian {
        let s = BrownianLevelSampler::new(p.t, p.a, p.dt, cfg.get("band")?)?;
        pool.count(n, |i| Ok(s.misses_with(&mut stream(seed, i))))?
    } else {
        let s = build_sampler(cfg, family, p)?;
        pool.count(n, |i| Ok(s.sample_with(&mut stream(seed, i))?.is_empty()))?
    };
    let est = empties as f64 / n as f64;
    let se = (est * (1.0 - est) / n as f64).sqrt();
    let oracle = match family {
        Family::Brownian => Some(2.0 * Normal::standard().cdf(p.a.abs() / p.t.sqrt()) - 1.0),
        Family::Bessel => {
            let shape = 1.0 - p.delta / 2.0;
            Some(Gamma::new(shape, 1.0)?.cdf(p.a * p.a / (2.0 * p.t)))
        }
        Family::Poisson => Some((-cfg.get::<f64>("mu")? * p.t).exp()),
        Family::Subordinator => Some(0.0),
        Family::Jump => None,
    };
    let ci = Some((est - 3.0 * se, est + 3.0 * se));
    match oracle {
        Some(o) => {
            rows.push("empty_mass", est, ci, pass_if((est - o).abs() <= 3.0 * se));
            rows.info("oracle", o);
        }
        None => rows.push("empty_mass", est, ci, pass_if(est - 3.0 * se > 0.0)),
    }
    rows.info("stderr", se);
    rows.info("samples", n as f64);
    Ok(())
}

fn draw_samples(pool: &Pool, sampler: &dyn SetSampler, n: u64, seed: u64) -> Result<Vec<SetSample>> {
    pool.map(n, |i| Ok(sampler.sample_with(&mut stream(seed, i))?))
}

fn dimension(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let sampler = build_sampler(cfg, family, p)?;
    let samples = draw_samples(pool, sampler.as_ref(), cfg.samples()?, cfg.seed()?)?;
    let resolution = samples.iter().map(SetSample::resolution).fold(0.0, f64::max);
    let scales = default_scales(p.t, resolution);
    let est = estimate_box_dimension(&samples, &scales)?;
    let oracle = match family {
        Family::Subordinator => subordinator_index(cfg, p.delta)?,
        Family::Bessel => 1.0 - p.delta / 2.0,
        Family::Brownian => 0.5,
        Family::Jump | Family::Poisson => 0.0,
    };
    let tol: f64 = cfg.get("tol")?;
    rows.push(
        "box_dimension",
        est.value,
        Some((est.value - 2.0 * est.stderr, est.value + 2.0 * est.stderr)),
        pass_if((est.value - oracle).abs() <= tol),
    );
    rows.info("oracle", oracle);
    rows.info("stderr", est.stderr);
    let counts: Vec<Vec<u64>> = samples.iter().map(|s| box_counts(s, &scales)).collect();
    let m = counts.len() as f64;
    let mut plot = PlotData {
        name: "fit".into(),
        points: Vec::new(),
    };
    for (j, s) in scales.iter().enumerate() {
        let mean = est.counts[j];
        let var = counts.iter().map(|c| (c[j] as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        plot.points.push((-s.ln(), mean.ln(), var.sqrt() / (mean * m.sqrt())));
    }
    rows.out.plots.push(plot);
    Ok(())
}

fn gap_tail(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let p = Params::from_config(cfg)?;
    let index = subordinator_index(cfg, p.delta)?;
    let params = SubordinatorParams::with_default_cutoff(index, p.t)?;
    let sampler = SubordinatorSampler { t: p.t, params };
    let eps = params.jump_cutoff();
    let samples = draw_samples(pool, &sampler, cfg.samples()?, cfg.seed()?)?;
    let mut gaps: Vec<f64> = samples.iter().flat_map(|s| gaps_longer_than(s, eps)).collect();
    let (lo, hi) = (10.0 * eps, p.t * 1e-3);
    let slope = rank_size_slope(&gaps, lo, hi).ok_or_else(|| anyhow!("fewer than 3 gaps in [{lo}, {hi}]"))?;
    let tol: f64 = cfg.get("tol")?;
    rows.push("rank_size_slope", slope, None, pass_if((slope + index).abs() <= tol));
    rows.info("oracle", -index);
    rows.info("gaps", gaps.len() as f64);
    gaps.sort_by(|a, b| b.total_cmp(a));
    let points = gaps
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= lo && g <= hi)
        .map(|(i, &g)| (g.ln(), ((i + 1) as f64).ln(), 0.0))
        .collect();
    rows.out.plots.push(PlotData {
        name: "rank_size".into(),
        points,
    });
    Ok(())
}

fn scale(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    if !matches!(family, Family::Brownian | Family::Bessel) {
        bail!("the scale experiment needs the brownian or bessel family");
    }
    let lambda = cfg.positive("lambda")?;
    let reps: u64 = cfg.get("reps")?;
    if reps == 0 {
        bail!("reps must be at least 1");
    }
    let min_pass: u64 = cfg.get_opt("min_pass")?.unwrap_or((0.9 * reps as f64).ceil() as u64);
    let (n, cells, alpha, seed) = (cfg.samples()?, cfg.get::<usize>("cells")?, cfg.get::<f64>("alpha")?, cfg.seed()?);
    let small = Params {
        t: p.t / lambda,
        a: p.a / lambda.sqrt(),
        dt: p.dt / lambda,
        ..p
    };
    let left = RescaledSampler {
        inner: build_sampler(cfg, family, small)?,
        lambda,
        t: p.t,
    };
    let right = build_sampler(cfg, family, p)?;
    let mut kept = 0;
    for k in 0..reps {
        let a = pool.sampler_law(&left, cells, n, child_seed(seed, 2 * k))?;
        let b = pool.sampler_law(right.as_ref(), cells, n, child_seed(seed, 2 * k + 1))?;
        let d = two_sample_chi_square(&a, &b, alpha)?;
        kept += d.passed() as u64;
        rows.push(&format!("chi_square_rep{k}"), d.statistic, None, d.verdict.to_string());
        rows.info(&format!("p_value_rep{k}"), d.p_value.unwrap_or(f64::NAN));
        rows.out.laws.push((format!("rep{k}_rescaled"), a));
        rows.out.laws.push((format!("rep{k}_direct"), b));
    }
    rows.push("not_rejected", kept as f64, None, pass_if(kept >= min_pass));
    rows.info("min_pass", min_pass as f64);
    Ok(())
}

/// The two sides of a comparison: levels for brownian and bessel sets, starts
/// for jump sets.
fn second_params(cfg: &ExperimentConfig, family: Family, p: Params) -> Result<Params> {
    Ok(match family {
        Family::Brownian | Family::Bessel => Params { a: cfg.get("a2")?, ..p },
        Family::Jump => Params {
            start: cfg.get("start2")?,
            ..p
        },
        Family::Subordinator | Family::Poisson => bail!("equiv compares brownian, bessel or jump sets"),
    })
}

fn equiv(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let q = second_params(cfg, family, p)?;
    let control = cfg.raw("control").unwrap_or("empty");
    if control != "empty" && control != "none" {
        bail!("control must be `empty` or `none`, got `{control}`");
    }
    let (n, cells, alpha, seed) = (cfg.samples()?, cfg.get::<usize>("cells")?, cfg.get::<f64>("alpha")?, cfg.seed()?);
    let sa = build_sampler(cfg, family, p)?;
    let sb = build_sampler(cfg, family, q)?;
    let a = pool.sampler_law(sa.as_ref(), cells, n, child_seed(seed, 0))?;
    let b = pool.sampler_law(sb.as_ref(), cells, n, child_seed(seed, 1))?;
    let d = equivalence_diagnostic(&a, &b, alpha)?;
    rows.diagnostic("equivalence", &d);
    rows.info("support_a", a.support_size() as f64);
    rows.info("support_b", b.support_size() as f64);
    if control == "empty" {
        let c = EmpiricalLaw::point_mass(p.t, CellPattern::zeros(cells)?, a.total())?;
        let dc = equivalence_diagnostic(&a, &c, alpha)?;
        rows.push("control_equivalence", dc.statistic, None, dc.verdict.to_string());
        rows.push("control_detected", dc.statistic, None, pass_if(!dc.passed()));
        rows.out.laws.push(("control".into(), c));
    }
    rows.out.laws.push(("a".into(), a));
    rows.out.laws.push(("b".into(), b));
    Ok(())
}

fn split(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let (n, cells, alpha, seed) = (cfg.samples()?, cfg.get::<usize>("cells")?, cfg.get::<f64>("alpha")?, cfg.seed()?);
    let cut: usize = cfg.get_opt("split_cells")?.unwrap_or(cells / 2);
    if cut == 0 || cut >= cells {
        bail!("split_cells must lie in 1..{cells}, got {cut}");
    }
    let width = p.t / cells as f64;
    let (tl, tr) = (width * cut as f64, width * (cells - cut) as f64);
    let whole = build_sampler(cfg, family, p)?;
    let left = build_sampler(cfg, family, Params { t: tl, ..p })?;
    let right = build_sampler(cfg, family, Params { t: tr, ..p })?;
    let joint = pool.sampler_law(whole.as_ref(), cells, n, child_seed(seed, 0))?;
    let (sl, sr) = (child_seed(seed, 1), child_seed(seed, 2));
    let paired = pool.law(cells, p.t, n, |i| {
        let l = discretize_on(&left.sample_with(&mut stream(sl, i))?, cut)?;
        let r = discretize_on(&right.sample_with(&mut stream(sr, i))?, cells - cut)?;
        Ok(l.concat(&r))
    })?;
    let lm = paired.left_marginal(cut)?;
    let rm = paired.right_marginal(cut)?;
    let d = support_diagnostic(&lm, &rm, &joint, alpha)?;
    rows.diagnostic("support", &d);
    rows.info("joint_support", joint.support_size() as f64);
    rows.info("product_support", d.extra("product_support").unwrap_or(f64::NAN));
    rows.info("joint_only", d.extra("joint_only").unwrap_or(f64::NAN));
    rows.info("product_only", d.extra("product_only").unwrap_or(f64::NAN));
    // the paired sample against the joint one, pattern by pattern; stricter
    // than support equality, since it also flags large finite ratios
    let e = equivalence_diagnostic(&paired, &joint, alpha)?;
    rows.info("paired_flagged_patterns", e.statistic);
    rows.out.laws.push(("joint".into(), joint));
    rows.out.laws.push(("paired".into(), paired));
    Ok(())
}

fn discretize_on(c: &SetSample, n: usize) -> Result<CellPattern> {
    Ok(randset_core::measure::discretize(c, n)?)
}

fn sing(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    if family != Family::Bessel {
        bail!("the sing experiment compares bessel zero sets");
    }
    let q = Params {
        delta: cfg.get("delta2")?,
        ..p
    };
    let (n, cells, seed) = (cfg.samples()?, cfg.get::<usize>("cells")?, cfg.seed()?);
    let cap = n.saturating_mul(100).saturating_add(1000);
    let sa = build_sampler(cfg, family, p)?;
    let sb = build_sampler(cfg, family, q)?;
    let (a, da) = pool.law_until_nonempty(sa.as_ref(), cells, n, child_seed(seed, 0), cap)?;
    let (b, db) = pool.law_until_nonempty(sb.as_ref(), cells, n, child_seed(seed, 1), cap)?;
    let opts = SingularityOptions {
        block_sizes: cfg.list("block_sizes")?,
        auc_threshold: cfg.get("auc_threshold")?,
        ..SingularityOptions::default()
    };
    let d = singularity_diagnostic(&a, &b, &opts)?;
    rows.diagnostic("auc", &d);
    let (ma, mb) = (a.empty_mass(), b.empty_mass());
    rows.info("atom_a", ma);
    rows.info("atom_b", mb);
    rows.push("shared_atom", ma.min(mb), None, pass_if(ma > 0.0 && mb > 0.0));
    rows.info("draws_a", da as f64);
    rows.info("draws_b", db as f64);
    rows.out.laws.push(("a".into(), a));
    rows.out.laws.push(("b".into(), b));
    Ok(())
}

fn poisson(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let (n, cells, alpha, seed) = (cfg.samples()?, cfg.get::<usize>("cells")?, cfg.get::<f64>("alpha")?, cfg.seed()?);
    let sampler = build_sampler(cfg, family, p)?;
    let law = pool.sampler_law(sampler.as_ref(), cells, n, seed)?;
    let (mu, fitted) = match cfg.get_opt::<f64>("mu")? {
        Some(mu) => (mu, false),
        None => (intensity_from_atom(&law)?, true),
    };
    let d = poisson_block_check(&law, mu, alpha)?;
    rows.diagnostic("poisson_block", &d);
    rows.info(if fitted { "mu_fitted" } else { "mu" }, mu);
    rows.out.laws.push(("law".into(), law));
    Ok(())
}

fn asym(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    if family != Family::Jump {
        bail!("the asym experiment needs the jump family");
    }
    let sampler = build_sampler(cfg, family, p)?;
    let (n, seed) = (cfg.samples()?, cfg.seed()?);
    let parts = pool.batches(0, n, |lo, hi| {
        let mut tally = AsymmetryTally::default();
        for i in lo..hi {
            tally.add(&sampler.sample_with(&mut stream(seed, i))?)?;
        }
        Ok(tally)
    })?;
    let mut tally = AsymmetryTally::default();
    for t in &parts {
        tally.merge(t);
    }
    let d = tally.diagnostic()?;
    let x = |k: &str| d.extra(k).unwrap_or(f64::NAN);
    rows.push("asymmetry_z", d.statistic, None, pass_if(d.statistic > 5.0));
    let lo = x("second_derived_ci_lo");
    rows.push(
        "second_derived_nonempty",
        x("second_derived_nonempty"),
        Some((lo, x("second_derived_ci_hi"))),
        pass_if(lo > 0.0),
    );
    rows.push("max_right_limits", x("max_right_limits"), None, pass_if(x("max_right_limits") == 0.0));
    rows.push(
        "reversed_max_left_limits",
        x("reversed_max_left_limits"),
        None,
        pass_if(x("reversed_max_left_limits") == 0.0),
    );
    for k in ["derived_nonempty", "left_limits_mean", "right_limits_mean", "reversed_right_limits_mean"] {
        rows.info(k, x(k));
    }
    rows.push("verdict", d.statistic, None, d.verdict.to_string());
    Ok(())
}

fn sample(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let sampler = build_sampler(cfg, family, p)?;
    let n = cfg.samples()?;
    let samples = draw_samples(pool, sampler.as_ref(), n, cfg.seed()?)?;
    let mut text = String::new();
    for s in &samples {
        let _ = writeln!(text, "{}", s.to_line());
    }
    let empty = samples.iter().filter(|s| s.is_empty()).count();
    rows.info("samples", n as f64);
    rows.info("empty_fraction", empty as f64 / n as f64);
    rows.out.files.push(("samples.txt".into(), text));
    Ok(())
}

fn law(cfg: &ExperimentConfig, pool: &Pool, rows: &mut Rows) -> Result<()> {
    let (family, p) = family_and_params(cfg)?;
    let sampler = build_sampler(cfg, family, p)?;
    let law = pool.sampler_law(sampler.as_ref(), cfg.get("cells")?, cfg.samples()?, cfg.seed()?)?;
    rows.info("total", law.total() as f64);
    rows.info("support_size", law.support_size() as f64);
    rows.info("empty_mass", law.empty_mass());
    rows.out.laws.push(("law".into(), law));
    Ok(())
}
