//! Monte Carlo harness: time constants, the directed/undirected gap, and
//! the tail of the minimal geodesic length.
//!
//! Every trial samples its own environment from `(seed, trial_id)` on the
//! box `[-m, z + m]` with `m = ceil(rho |z|_1)` and runs a fixed set of hard
//! checks; any failure aborts the run with [`Error::Assertion`]. Trials run
//! in parallel and are reported in trial-id order.

use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::chain_with_base;
use crate::directed::{directed_argmin_invariance_check, directed_time};
use crate::distribution::{
    check_useful, ratio_from_f64, ratio_to_f64, CriticalConstants, DistributionSpec, Rational, UsefulFlags,
};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::geodesic::geodesic_time;
use crate::lattice::{l1_norm, BoxLattice, Point};
use crate::pattern::{occurrence_length_bound, Pattern};
use crate::stats::{binomial_se, fit_exponential, mean_ci, ExpFit, MeanCi};
use crate::weight::{Ticks, Weight};

/// Resolution of the band half-width search for the default pattern.
pub const PATTERN_RESOLUTION: f64 = 1e-9;
const BOUNDARY_WARNING_RATE: f64 = 0.01;

fn default_direction() -> Vec<f64> {
    vec![1.0, 1.0]
}
fn default_scales() -> Vec<u64> {
    vec![10, 20, 40]
}
fn default_norms() -> Vec<u64> {
    vec![20, 40, 80, 160]
}
fn default_hop_excess() -> f64 {
    0.05
}
fn default_trials() -> u64 {
    100
}
fn default_margin() -> f64 {
    0.5
}
fn default_invariance_limit() -> usize {
    8
}
fn default_confidence() -> f64 {
    0.95
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    /// Direction `x >= 0`, one entry per dimension.
    #[serde(default = "default_direction")]
    pub direction: Vec<f64>,
    /// Scales `n`; targets are `floor(n x)`.
    #[serde(default = "default_scales")]
    pub scales: Vec<u64>,
    /// Target norms `|z|_1` for the tail experiment.
    #[serde(default = "default_norms")]
    pub norms: Vec<u64>,
    /// Shifts added to every edge, in the law's units. Defaults to
    /// `{1/4, 1/2, 1} (b - a)` for the two smallest support points.
    #[serde(default)]
    pub shifts: Option<Vec<Rational>>,
    /// Relative hop excess `h` in `|gamma|_e >= (1 + h) |z|_1` and in the
    /// tail event `L <= (1 + h) |z|_1`.
    #[serde(default = "default_hop_excess")]
    pub hop_excess: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Box margin as a fraction of `|z|_1`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Largest `|y|_1` for the per-trial directed argmin check (0 disables).
    #[serde(default = "default_invariance_limit")]
    pub invariance_limit: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            direction: default_direction(),
            scales: default_scales(),
            norms: default_norms(),
            shifts: None,
            hop_excess: default_hop_excess(),
            trials: default_trials(),
            seed: 0,
            margin: default_margin(),
            invariance_limit: default_invariance_limit(),
            confidence: default_confidence(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub experiment: ExperimentParams,
    /// Overrides the built-in critical probabilities.
    #[serde(default)]
    pub critical: Option<CriticalConstants>,
}

impl ExperimentConfig {
    pub fn new(distribution: DistributionSpec, experiment: ExperimentParams) -> Self {
        ExperimentConfig { distribution, experiment, critical: None }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.experiment.direction.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.experiment;
        let bad = |m: String| Err(Error::Config(m));
        if p.direction.len() < 2 {
            return bad(format!("direction needs at least 2 entries, got {}", p.direction.len()));
        }
        if p.direction.iter().any(|&c| !(c >= 0.0 && c.is_finite())) || p.direction.iter().all(|&c| c == 0.0) {
            return bad(format!("direction {:?} must be nonnegative and nonzero", p.direction));
        }
        if p.trials == 0 {
            return bad("trials must be positive".into());
        }
        if p.trials > u32::MAX as u64 {
            return bad("too many trials".into());
        }
        if !(p.hop_excess > 0.0 && p.hop_excess.is_finite()) {
            return bad(format!("hop excess {} must be positive", p.hop_excess));
        }
        if !(p.margin >= 0.0 && p.margin.is_finite()) {
            return bad(format!("margin {} must be >= 0", p.margin));
        }
        if !(p.confidence > 0.0 && p.confidence < 1.0) {
            return bad(format!("confidence {} must lie in (0, 1)", p.confidence));
        }
        if let Some(shifts) = &p.shifts {
            if shifts.iter().any(|s| *s.0.numer() <= 0) {
                return bad("shifts must be positive".into());
            }
        }
        Ok(())
    }

    /// Shifts in use, explicit or default.
    pub fn shifts(&self) -> Result<Vec<Ratio<i64>>> {
        if let Some(s) = &self.experiment.shifts {
            return Ok(s.iter().map(|r| r.0).collect());
        }
        let pts = self.distribution.finite_support_points();
        let unit = if pts.len() >= 2 { ratio_from_f64(pts[1] - pts[0])? } else { Ratio::from_integer(1) };
        Ok([Ratio::new(1, 4), Ratio::new(1, 2), Ratio::from_integer(1)].iter().map(|&f| f * unit).collect())
    }

    pub fn critical_constants(&self) -> Option<CriticalConstants> {
        self.critical.clone().or_else(|| CriticalConstants::for_dimension(self.dim()))
    }

    pub fn useful_flags(&self) -> Option<UsefulFlags> {
        self.critical_constants().map(|c| check_useful(&self.distribution, &c))
    }
}

/// `floor(n x)`.
pub fn scaled_target(direction: &[f64], n: f64) -> Point {
    direction.iter().map(|&c| (n * c).floor() as i64).collect()
}

/// `floor(L x / |x|_1)`.
pub fn target_with_norm(direction: &[f64], norm: u64) -> Point {
    let s: f64 = direction.iter().sum();
    scaled_target(direction, norm as f64 / s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftOutcome {
    pub delta: f64,
    pub hops: usize,
    /// `|gamma_delta|_e >= (1 + h) |z|_1`.
    pub premise: bool,
    /// `t <= tdir - delta h |z|_1`.
    pub gap_event: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial_id: u64,
    /// Scale `n` or target norm, depending on the experiment.
    pub level: u64,
    pub target: Point,
    pub norm: u64,
    pub reachable: bool,
    /// `None` when infinite.
    pub t: Option<f64>,
    pub t_dir: Option<f64>,
    pub hops: usize,
    pub hops_shifted: Vec<ShiftOutcome>,
    pub pattern_count: usize,
    /// `None` when the chain was not run or did not apply.
    pub chain_verified: Option<bool>,
    pub touched_boundary: bool,
}

struct TrialContext {
    spec: Arc<DistributionSpec>,
    per_unit: u64,
    seed: u64,
    margin: f64,
    hop_excess: f64,
    shifts: Vec<Ratio<i64>>,
    directed: bool,
    pattern: Option<Pattern>,
    invariance_limit: usize,
    direction: Vec<f64>,
}

struct Job {
    level: u64,
    target: Point,
    trial_id: u64,
}

fn assertion(trial_id: u64, what: impl std::fmt::Display) -> Error {
    Error::Assertion(format!("trial {trial_id}: {what}"))
}

fn finite_value<W: Weight>(env: &Environment<W>, w: W) -> Option<f64> {
    w.is_finite().then(|| env.value(w))
}

fn run_trial<W: Weight>(ctx: &TrialContext, job: &Job) -> Result<TrialOutcome> {
    let z = &job.target;
    let norm = l1_norm(z) as u64;
    let m = (ctx.margin * norm as f64).ceil() as i64;
    let lattice = BoxLattice::new(z.iter().map(|_| -m).collect(), z.iter().map(|&c| c + m).collect())?;
    let env = Environment::<W>::sample(ctx.spec.clone(), lattice, ctx.per_unit, ctx.seed, job.trial_id)?;
    let origin = vec![0; z.len()];
    let id = job.trial_id;

    let geo = geodesic_time(&env, &origin, z)?;
    let mut out = TrialOutcome {
        trial_id: id,
        level: job.level,
        target: z.clone(),
        norm,
        reachable: geo.reachable,
        t: finite_value(&env, geo.time),
        t_dir: None,
        hops: geo.min_hops,
        hops_shifted: vec![],
        pattern_count: 0,
        chain_verified: None,
        touched_boundary: geo.touched_boundary,
    };

    if let Some(path) = &geo.geodesic {
        if (out.hops as u64) < norm {
            return Err(assertion(id, format!("geodesic has {} edges, fewer than |z|_1 = {norm}", out.hops)));
        }
        if let Some(p) = &ctx.pattern {
            out.pattern_count = p.count_occurrences(&env, path).count;
        }
        if !occurrence_length_bound(path, out.pattern_count) {
            return Err(assertion(
                id,
                format!("{} occurrences along a geodesic with {} edges", out.pattern_count, out.hops),
            ));
        }
        let t_path = env.path_time(path)?;
        if !t_path.same(geo.time) {
            return Err(assertion(id, "geodesic time differs from the time of its path"));
        }
        for &delta in &ctx.shifts {
            let shifted = env.shift(delta)?;
            let lhs = shifted.path_time(path)?;
            let rhs = t_path.plus(env.encode(delta)?.times(path.edge_count() as u64));
            if !lhs.same(rhs) {
                return Err(assertion(id, format!("shift identity fails for delta = {delta}")));
            }
        }
    }

    if !ctx.directed {
        return Ok(out);
    }
    let t_dir = directed_time(&env, z)?.time;
    out.t_dir = finite_value(&env, t_dir);
    if !geo.time.at_most(t_dir) {
        return Err(assertion(id, format!("t = {:?} exceeds tdir = {:?}", out.t, out.t_dir)));
    }

    let mut verified = true;
    let mut applicable = false;
    for &delta in &ctx.shifts {
        let shifted = env.shift(delta)?;
        let report = chain_with_base(&env, &shifted, delta, z, ctx.hop_excess, geo.time, t_dir)?;
        if let Some(f) = report.failure() {
            return Err(assertion(id, format!("inequality chain, delta = {delta}: {f}")));
        }
        applicable |= report.applicable;
        verified &= report.verified();
        out.hops_shifted.push(ShiftOutcome {
            delta: ratio_to_f64(delta),
            hops: report.hops_shifted,
            premise: report.premise,
            gap_event: report.applicable && report.conclusion,
        });
    }
    if applicable {
        out.chain_verified = Some(verified);
    }

    if ctx.invariance_limit > 0 && !ctx.shifts.is_empty() {
        let k = (norm as usize).min(ctx.invariance_limit) as u64;
        let y = target_with_norm(&ctx.direction, k);
        let inv = directed_argmin_invariance_check(&env, ctx.shifts[0], &y, ctx.invariance_limit)?;
        if !inv.holds() {
            return Err(assertion(id, format!("directed argmin changes under the shift at {y:?}")));
        }
    }
    Ok(out)
}

fn run_jobs<W: Weight>(ctx: &TrialContext, jobs: &[Job]) -> Result<Vec<TrialOutcome>> {
    let results: Vec<Result<TrialOutcome>> = jobs.par_iter().map(|j| run_trial::<W>(ctx, j)).collect();
    results.into_iter().collect()
}

fn run_all(ctx: &TrialContext, jobs: &[Job]) -> Result<Vec<TrialOutcome>> {
    if ctx.spec.is_exact() {
        run_jobs::<Ticks>(ctx, jobs)
    } else {
        run_jobs::<f64>(ctx, jobs)
    }
}

fn context(config: &ExperimentConfig, directed: bool, shifts: Vec<Ratio<i64>>) -> Result<TrialContext> {
    config.validate()?;
    let spec = &config.distribution;
    let per_unit = if spec.is_exact() { spec.ticks_per_unit(&shifts)? } else { 1 };
    let p = &config.experiment;
    Ok(TrialContext {
        spec: Arc::new(spec.clone()),
        per_unit,
        seed: p.seed,
        margin: p.margin,
        hop_excess: p.hop_excess,
        shifts,
        directed,
        pattern: Pattern::for_law(spec, config.dim(), PATTERN_RESOLUTION)?,
        invariance_limit: if directed { p.invariance_limit } else { 0 },
        direction: p.direction.clone(),
    })
}

/// Trial ids carry the level index in their upper half.
fn jobs_for(index: usize, level: u64, target: &Point, trials: u64) -> Vec<Job> {
    (0..trials).map(|k| Job { level, target: target.clone(), trial_id: ((index as u64) << 32) | k }).collect()
}

fn fraction(it: impl Iterator<Item = bool>) -> f64 {
    let (mut yes, mut all) = (0usize, 0usize);
    for b in it {
        all += 1;
        yes += b as usize;
    }
    if all == 0 {
        f64::NAN
    } else {
        yes as f64 / all as f64
    }
}

fn boundary_warning(rate: f64, label: &str) -> Option<String> {
    (rate > BOUNDARY_WARNING_RATE)
        .then(|| format!("{label}: {:.1}% of geodesics touch the box boundary; increase the margin", 100.0 * rate))
}

/// A finished experiment: per-trial records and the summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRun<S> {
    pub trials: Vec<TrialOutcome>,
    pub summary: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftSummary {
    pub delta: f64,
    /// Mean of `|gamma_delta|_e / |z|_1`.
    pub hop_ratio: MeanCi,
    pub premise_frequency: f64,
    pub gap_event_frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleSummary {
    pub n: u64,
    pub target: Point,
    pub norm: u64,
    pub trials: usize,
    /// Trials with finite `t` and `tdir`; the means below use only these.
    pub finite_trials: usize,
    pub mu_hat: MeanCi,
    pub mu_dir_hat: MeanCi,
    /// Mean of `(tdir - t) / |z|_1`.
    pub gap_hat: MeanCi,
    /// Fraction of trials with `t <= tdir`.
    pub ordered_frequency: f64,
    /// Mean of `|gamma_-|_e / |z|_1 - 1`.
    pub hop_excess: MeanCi,
    /// Mean pattern occurrences per unit of `|z|_1`.
    pub pattern_rate: MeanCi,
    pub shifts: Vec<ShiftSummary>,
    pub boundary_contact_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSummary {
    pub hop_excess: f64,
    pub useful: Option<UsefulFlags>,
    pub scales: Vec<ScaleSummary>,
    pub warnings: Vec<String>,
}

fn finite_pairs<'a>(ts: &'a [&'a TrialOutcome]) -> impl Iterator<Item = (f64, f64, &'a TrialOutcome)> + 'a {
    ts.iter().filter_map(|o| Some((o.t?, o.t_dir?, *o)))
}

fn summarize_scale(n: u64, trials: &[&TrialOutcome], shifts: &[Ratio<i64>], level: f64) -> ScaleSummary {
    let first = trials[0];
    let norm = first.norm as f64;
    let pairs: Vec<(f64, f64, &TrialOutcome)> = finite_pairs(trials).collect();
    let col = |f: &dyn Fn(&(f64, f64, &TrialOutcome)) -> f64| -> MeanCi {
        mean_ci(&pairs.iter().map(f).collect::<Vec<_>>(), level)
    };
    let shift_rows = shifts
        .iter()
        .enumerate()
        .map(|(k, &delta)| {
            let rows: Vec<&ShiftOutcome> = pairs.iter().map(|p| &p.2.hops_shifted[k]).collect();
            ShiftSummary {
                delta: ratio_to_f64(delta),
                hop_ratio: mean_ci(&rows.iter().map(|r| r.hops as f64 / norm).collect::<Vec<_>>(), level),
                premise_frequency: fraction(rows.iter().map(|r| r.premise)),
                gap_event_frequency: fraction(rows.iter().map(|r| r.gap_event)),
            }
        })
        .collect();
    ScaleSummary {
        n,
        target: first.target.clone(),
        norm: first.norm,
        trials: trials.len(),
        finite_trials: pairs.len(),
        mu_hat: col(&|p| p.0 / n as f64),
        mu_dir_hat: col(&|p| p.1 / n as f64),
        gap_hat: col(&|p| (p.1 - p.0) / norm),
        ordered_frequency: fraction(pairs.iter().map(|p| p.0 <= p.1)),
        hop_excess: col(&|p| p.2.hops as f64 / norm - 1.0),
        pattern_rate: col(&|p| p.2.pattern_count as f64 / norm),
        shifts: shift_rows,
        boundary_contact_rate: fraction(trials.iter().map(|o| o.touched_boundary)),
    }
}

fn group(trials: &[TrialOutcome], levels: usize, per_level: usize) -> Vec<Vec<&TrialOutcome>> {
    (0..levels).map(|i| trials[i * per_level..(i + 1) * per_level].iter().collect()).collect()
}

fn scale_levels(config: &ExperimentConfig) -> Result<Vec<(u64, Point)>> {
    config
        .experiment
        .scales
        .iter()
        .map(|&n| {
            let z = scaled_target(&config.experiment.direction, n as f64);
            if l1_norm(&z) == 0 {
                return Err(Error::Config(format!("scale {n} gives the target 0")));
            }
            Ok((n, z))
        })
        .collect()
}

/// For each scale `n`: `t`, `tdir`, the shifted geodesic lengths and the
/// inequality chain on every trial.
pub fn run_gap_experiment(
    config: &ExperimentConfig,
    progress: impl Fn(&str) + Sync,
) -> Result<ExperimentRun<GapSummary>> {
    let shifts = config.shifts()?;
    let ctx = context(config, true, shifts.clone())?;
    let levels = scale_levels(config)?;
    let per = config.experiment.trials as usize;
    let mut trials = Vec::with_capacity(levels.len() * per);
    for (i, (n, z)) in levels.iter().enumerate() {
        progress(&format!("gap: n = {n}, target {z:?}, {per} trials"));
        trials.extend(run_all(&ctx, &jobs_for(i, *n, z, config.experiment.trials))?);
    }
    let scales: Vec<ScaleSummary> = group(&trials, levels.len(), per)
        .iter()
        .zip(&levels)
        .map(|(ts, (n, _))| summarize_scale(*n, ts, &shifts, config.experiment.confidence))
        .collect();

    let useful = config.useful_flags();
    let mut warnings: Vec<String> =
        scales.iter().filter_map(|s| boundary_warning(s.boundary_contact_rate, &format!("n = {}", s.n))).collect();
    match useful {
        Some(f) if !f.useful => warnings.push("the law is not useful; no strict gap is expected".into()),
        None => warnings.push(format!("no critical probabilities known for d = {}", config.dim())),
        _ => {}
    }
    Ok(ExperimentRun {
        trials,
        summary: GapSummary { hop_excess: config.experiment.hop_excess, useful, scales, warnings },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub level: u64,
    pub target: Point,
    pub norm: u64,
    pub trials: usize,
    pub unreachable: usize,
    pub successes: usize,
    pub frequency: f64,
    pub standard_error: f64,
    /// One-sided 95% upper bound, reported when no trial succeeded.
    pub upper_bound: Option<f64>,
    pub boundary_contact_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailSummary {
    pub hop_excess: f64,
    pub useful: Option<UsefulFlags>,
    pub rows: Vec<TailRow>,
    /// Fit of `frequency ~ alpha1 exp(-alpha2 |z|_1)` over rows with
    /// positive frequency.
    pub fit: Option<ExpFit>,
    /// Frequencies never rise by more than one standard error of the
    /// difference between consecutive norms.
    pub non_increasing: bool,
    pub warnings: Vec<String>,
}

/// Frequency of `{z reachable and L(0, z) <= (1 + h) |z|_1}` per norm.
pub fn run_tail_experiment(
    config: &ExperimentConfig,
    progress: impl Fn(&str) + Sync,
) -> Result<ExperimentRun<TailSummary>> {
    let ctx = context(config, false, vec![])?;
    let p = &config.experiment;
    let mut norms = p.norms.clone();
    norms.sort_unstable();
    let levels: Vec<(u64, Point)> = norms
        .iter()
        .map(|&l| {
            let z = target_with_norm(&p.direction, l);
            if l1_norm(&z) == 0 {
                return Err(Error::Config(format!("norm {l} gives the target 0")));
            }
            Ok((l, z))
        })
        .collect::<Result<_>>()?;
    let per = p.trials as usize;
    let mut trials = Vec::with_capacity(levels.len() * per);
    for (i, (l, z)) in levels.iter().enumerate() {
        progress(&format!("tail: |z|_1 = {l}, target {z:?}, {per} trials"));
        trials.extend(run_all(&ctx, &jobs_for(i, *l, z, p.trials))?);
    }
    let rows: Vec<TailRow> = group(&trials, levels.len(), per)
        .iter()
        .zip(&levels)
        .map(|(ts, (l, z))| {
            let norm = l1_norm(z) as u64;
            let bound = (1.0 + p.hop_excess) * norm as f64;
            let successes = ts.iter().filter(|o| o.reachable && o.hops as f64 <= bound).count();
            let freq = successes as f64 / ts.len() as f64;
            TailRow {
                level: *l,
                target: z.clone(),
                norm,
                trials: ts.len(),
                unreachable: ts.iter().filter(|o| !o.reachable).count(),
                successes,
                frequency: freq,
                standard_error: binomial_se(freq, ts.len()),
                upper_bound: (successes == 0).then(|| 1.0 - 0.05f64.powf(1.0 / ts.len() as f64)),
                boundary_contact_rate: fraction(ts.iter().map(|o| o.touched_boundary)),
            }
        })
        .collect();
    let fit = fit_exponential(&rows.iter().map(|r| (r.norm as f64, r.frequency, r.trials)).collect::<Vec<_>>());
    let non_increasing = rows.windows(2).all(|w| {
        let se = (w[0].standard_error.powi(2) + w[1].standard_error.powi(2)).sqrt();
        w[1].frequency <= w[0].frequency + se
    });

    let useful = config.useful_flags();
    let mut warnings: Vec<String> =
        rows.iter().filter_map(|r| boundary_warning(r.boundary_contact_rate, &format!("|z|_1 = {}", r.norm))).collect();
    match useful {
        Some(f) if !(f.useful_pc && f.finite_mass_supercritical) => {
            warnings.push("the law is not useful with supercritical finite mass; no decay is expected".into())
        }
        None => warnings.push(format!("no critical probabilities known for d = {}", config.dim())),
        _ => {}
    }
    if fit.is_none() {
        warnings.push("fewer than two levels with positive frequency; no fit".into());
    }
    Ok(ExperimentRun {
        trials,
        summary: TailSummary { hop_excess: p.hop_excess, useful, rows, fit, non_increasing, warnings },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsRow {
    pub n: u64,
    pub target: Point,
    pub trials: usize,
    pub finite_trials: usize,
    pub mu_hat: MeanCi,
    pub mu_dir_hat: MeanCi,
    pub ordered_frequency: f64,
    pub boundary_contact_rate: f64,
}

/// `mean t(0, 2n x)/(2n) <= mean t(0, n x)/n` up to overlap of the
/// confidence intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubadditivityCheck {
    pub n: u64,
    pub doubled: u64,
    pub consistent: bool,
    pub consistent_directed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsSummary {
    pub mean_weight: f64,
    pub rows: Vec<ConstantsRow>,
    pub subadditivity: Vec<SubadditivityCheck>,
    pub warnings: Vec<String>,
}

/// `t(0, nx)/n` and `tdir(0, nx)/n` for each scale.
pub fn estimate_time_constants(
    config: &ExperimentConfig,
    progress: impl Fn(&str) + Sync,
) -> Result<ExperimentRun<ConstantsSummary>> {
    let mut ctx = context(config, true, vec![])?;
    ctx.invariance_limit = 0;
    let levels = scale_levels(config)?;
    let per = config.experiment.trials as usize;
    let mut trials = Vec::with_capacity(levels.len() * per);
    for (i, (n, z)) in levels.iter().enumerate() {
        progress(&format!("constants: n = {n}, target {z:?}, {per} trials"));
        trials.extend(run_all(&ctx, &jobs_for(i, *n, z, config.experiment.trials))?);
    }
    let level = config.experiment.confidence;
    let rows: Vec<ConstantsRow> = group(&trials, levels.len(), per)
        .iter()
        .zip(&levels)
        .map(|(ts, (n, z))| {
            let pairs: Vec<(f64, f64, &TrialOutcome)> = finite_pairs(ts).collect();
            ConstantsRow {
                n: *n,
                target: z.clone(),
                trials: ts.len(),
                finite_trials: pairs.len(),
                mu_hat: mean_ci(&pairs.iter().map(|p| p.0 / *n as f64).collect::<Vec<_>>(), level),
                mu_dir_hat: mean_ci(&pairs.iter().map(|p| p.1 / *n as f64).collect::<Vec<_>>(), level),
                ordered_frequency: fraction(pairs.iter().map(|p| p.0 <= p.1)),
                boundary_contact_rate: fraction(ts.iter().map(|o| o.touched_boundary)),
            }
        })
        .collect();
    let subadditivity = rows
        .iter()
        .flat_map(|a| rows.iter().filter(move |b| b.n == 2 * a.n).map(move |b| (a, b)))
        .map(|(a, b)| SubadditivityCheck {
            n: a.n,
            doubled: b.n,
            consistent: b.mu_hat.lo <= a.mu_hat.hi,
            consistent_directed: b.mu_dir_hat.lo <= a.mu_dir_hat.hi,
        })
        .collect();
    let mean_weight = config.distribution.mean();
    let mut warnings: Vec<String> =
        rows.iter().filter_map(|r| boundary_warning(r.boundary_contact_rate, &format!("n = {}", r.n))).collect();
    if !mean_weight.is_finite() {
        warnings.push("E[T(e)] is infinite; the time constants need not exist".into());
    }
    Ok(ExperimentRun { trials, summary: ConstantsSummary { mean_weight, rows, subadditivity, warnings } })
}
