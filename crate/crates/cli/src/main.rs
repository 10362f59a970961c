//! `fpp`: sample environments, compute passage times, check the hard
//! assertions and run the gap, tail and time-constant experiments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fpp_core::distribution::Rational;
use fpp_core::experiment::{estimate_time_constants, run_gap_experiment, run_tail_experiment, PATTERN_RESOLUTION};
use fpp_core::lattice::l1_norm;
use fpp_core::pattern::{certify_delta, max_safe_delta, PatternEvent, FULL_CORNER_LIMIT};
use fpp_core::report::{write_csv, write_jsonl, write_run, Header, Table};
use fpp_core::{
    directed_time, geodesic_time, verify_inequality_chain, BoxLattice, Environment, Error, ExperimentConfig, Pattern,
    Point, Ticks, Weight,
};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "fpp", version, about = "First-passage percolation on boxes of Z^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Undirected and directed passage time from the origin to one target.
    Geodesic(PointArgs),
    /// Directed passage time from the origin to one target.
    Directed(PointArgs),
    /// Run the hard-assertion suite.
    Verify(VerifyArgs),
    /// Gap between undirected and directed passage times across scales.
    Gap(ExperimentArgs),
    /// Frequency of short geodesics across target norms.
    Tail(ExperimentArgs),
    /// Time constant estimates across scales.
    Constants(ExperimentArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// TOML file with a `[distribution]` table and optional `[experiment]`
    /// and `[critical]` tables.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Box margin as a fraction of the target's l1 norm.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
struct Overrides {
    /// Scales n; targets are floor(n x).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    /// Shifts added to every edge, e.g. `1/4,1/2,1`.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    shifts: Option<Vec<Rational>>,
    /// Relative hop excess.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    direction: Option<Vec<f64>>,
    /// Target norms for the tail experiment.
    #[arg(long, value_delimiter = ',')]
    norms: Option<Vec<u64>>,
    /// Largest target norm for the per-trial directed argmin check.
    #[arg(long)]
    oracle_limit: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    /// Target point, comma separated, with nonnegative coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    target: Vec<i64>,
    /// Also write the vertices of the optimal paths.
    #[arg(long)]
    paths: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    overrides: Overrides,
    /// Ladder length of the pattern to audit instead of the law's default.
    #[arg(long)]
    ell: Option<usize>,
    /// Lower band of the pattern.
    #[arg(long, requires = "ell")]
    a: Option<f64>,
    /// Upper band of the pattern.
    #[arg(long, requires = "ell")]
    b: Option<f64>,
    /// Apply the shift to every other edge slot only.
    #[arg(long, hide = true)]
    corrupt_shift: bool,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(anyhow::Error),
    Assertion(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Assertion(m)) => Failure::Assertion(m.clone()),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

/// Everything that determines a run; serialized into every output header.
#[derive(Serialize)]
struct RunConfig<'a> {
    subcommand: &'a str,
    command: &'a Command,
    resolved: &'a ExperimentConfig,
}

fn load(common: &Common, overrides: &Overrides) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&common.spec).with_context(|| format!("reading {}", common.spec.display()))?;
    let mut config =
        ExperimentConfig::from_toml(&text).with_context(|| format!("parsing {}", common.spec.display()))?;
    let p = &mut config.experiment;
    if let Some(s) = common.seed {
        p.seed = s;
    }
    if let Some(r) = common.rho {
        p.margin = r;
    }
    let o = overrides.clone();
    if let Some(v) = o.n_list {
        p.scales = v;
    }
    if let Some(v) = o.shifts {
        p.shifts = Some(v);
    }
    if let Some(v) = o.delta {
        p.hop_excess = v;
    }
    if let Some(v) = o.trials {
        p.trials = v;
    }
    if let Some(v) = o.direction {
        p.direction = v;
    }
    if let Some(v) = o.norms {
        p.norms = v;
    }
    if let Some(v) = o.oracle_limit {
        p.invariance_limit = v;
    }
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn per_unit(config: &ExperimentConfig) -> fpp_core::Result<u64> {
    let spec = &config.distribution;
    if spec.is_exact() {
        spec.ticks_per_unit(&config.shifts()?)
    } else {
        Ok(1)
    }
}

/// The environment of trial 0 around `target`, as the experiments sample it.
fn sample_env<W: Weight>(config: &ExperimentConfig, target: &[i64]) -> fpp_core::Result<Environment<W>> {
    let m = (config.experiment.margin * l1_norm(target) as f64).ceil() as i64;
    let lattice = BoxLattice::new(target.iter().map(|_| -m).collect(), target.iter().map(|&c| c + m).collect())?;
    Environment::sample(Arc::new(config.distribution.clone()), lattice, per_unit(config)?, config.experiment.seed, 0)
}

#[derive(Serialize)]
struct PointRecord {
    target: Point,
    norm: i64,
    reachable: bool,
    t: Option<f64>,
    hops: Option<usize>,
    touched_boundary: Option<bool>,
    t_dir: Option<f64>,
    geodesic: Option<Vec<Point>>,
    directed_geodesic: Option<Vec<Point>>,
}

fn point_record<W: Weight>(
    config: &ExperimentConfig,
    target: &[i64],
    undirected: bool,
) -> fpp_core::Result<PointRecord> {
    let env = sample_env::<W>(config, target)?;
    let finite = |w: W| w.is_finite().then(|| env.value(w));
    let dir = directed_time(&env, target)?;
    let mut rec = PointRecord {
        target: target.to_vec(),
        norm: l1_norm(target),
        reachable: dir.time.is_finite(),
        t: None,
        hops: None,
        touched_boundary: None,
        t_dir: finite(dir.time),
        geodesic: None,
        directed_geodesic: dir.time.is_finite().then(|| dir.geodesic.vertices().to_vec()),
    };
    if undirected {
        let geo = geodesic_time(&env, &vec![0; target.len()], target)?;
        rec.reachable = geo.reachable;
        rec.t = finite(geo.time);
        rec.hops = geo.reachable.then_some(geo.min_hops);
        rec.touched_boundary = Some(geo.touched_boundary);
        rec.geodesic = geo.geodesic.map(|p| p.vertices().to_vec());
    }
    Ok(rec)
}

fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

const COORDS: [&str; 8] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"];

fn cmd_point(kind: &str, args: &PointArgs, command: &Command) -> Result<(), Failure> {
    let config = load(&args.common, &Overrides::default())?;
    let target = &args.target;
    if target.is_empty() || target.iter().any(|&c| c < 0) {
        return Err(Failure::Usage(anyhow::anyhow!("target {target:?} must have nonnegative coordinates")));
    }
    if args.paths && target.len() > COORDS.len() {
        return Err(Failure::Usage(anyhow::anyhow!("--paths supports at most {} dimensions", COORDS.len())));
    }
    let undirected = kind == "geodesic";
    let rec = if config.distribution.is_exact() {
        point_record::<Ticks>(&config, target, undirected)?
    } else {
        point_record::<f64>(&config, target, undirected)?
    };

    let run = RunConfig { subcommand: kind, command, resolved: &config };
    let header = Header::new(kind, &run)?;
    let out = &args.common.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let path = out.join(format!("{kind}.jsonl"));
    let mut w = create(&path)?;
    write_jsonl(&mut w, &header, std::slice::from_ref(&rec))?;
    w.flush().context("writing records")?;

    let target_cell = target.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    let table = if undirected {
        Table {
            name: "geodesic",
            columns: vec!["seed", "target", "norm", "reachable", "t", "t_dir", "hops", "touched_boundary"],
            rows: vec![vec![
                config.experiment.seed.to_string(),
                target_cell,
                rec.norm.to_string(),
                rec.reachable.to_string(),
                cell(rec.t),
                cell(rec.t_dir),
                cell(rec.hops),
                cell(rec.touched_boundary),
            ]],
        }
    } else {
        Table {
            name: "directed",
            columns: vec!["seed", "target", "norm", "t_dir"],
            rows: vec![vec![config.experiment.seed.to_string(), target_cell, rec.norm.to_string(), cell(rec.t_dir)]],
        }
    };
    let path = out.join(format!("{kind}.csv"));
    let mut w = create(&path)?;
    write_csv(&mut w, &table, &header.config_hash)?;
    w.flush().context("writing table")?;

    if args.paths {
        let mut columns = vec!["path", "step"];
        columns.extend(&COORDS[..target.len()]);
        let mut rows = vec![];
        for (name, vertices) in [("geodesic", &rec.geodesic), ("directed", &rec.directed_geodesic)] {
            for (i, v) in vertices.iter().flatten().enumerate() {
                let mut row = vec![name.to_string(), i.to_string()];
                row.extend(v.iter().map(i64::to_string));
                rows.push(row);
            }
        }
        let path = out.join(format!("{kind}_path.csv"));
        let mut w = create(&path)?;
        write_csv(&mut w, &Table { name: "path", columns, rows }, &header.config_hash)?;
        w.flush().context("writing paths")?;
    }

    match (rec.t, rec.t_dir) {
        (Some(t), Some(td)) => eprintln!("{kind}: t = {t}, tdir = {td}, hops = {}", cell(rec.hops)),
        (None, Some(td)) => eprintln!("{kind}: tdir = {td}"),
        _ => eprintln!("{kind}: target unreachable"),
    }
    Ok(())
}

#[derive(Serialize)]
struct Step {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn band_audit(ell: usize, a: f64, b: f64, dim: usize) -> fpp_core::Result<Step> {
    let delta = max_safe_delta(ell, a, b, dim, PATTERN_RESOLUTION)?;
    let long_enough = ell as f64 > 2.0 * a / (b - a);
    let pattern = Pattern::bands(ell, a, b, delta, dim)?;
    let certified = if delta == 0.0 {
        Some(true)
    } else if pattern.edges().len() <= FULL_CORNER_LIMIT {
        Some(certify_delta(ell, a, b, delta, dim)?)
    } else {
        None
    };
    let passed = (delta > 0.0) == long_enough && certified != Some(false);
    let audit = match certified {
        Some(true) if delta > 0.0 => "all corners certified",
        Some(true) => "empty band",
        Some(false) => "corner audit failed",
        None => "worst corner only",
    };
    Ok(Step {
        name: "pattern",
        passed,
        detail: format!("ell = {ell}, a = {a}, b = {b}, max_safe_delta = {delta}, {audit}"),
    })
}

fn pattern_step(args: &VerifyArgs, config: &ExperimentConfig) -> anyhow::Result<Step> {
    let dim = config.dim();
    if let Some(ell) = args.ell {
        let pts = config.distribution.finite_support_points();
        let a = args.a.or(pts.first().copied()).context("--a is required for a law without finite support")?;
        let b = args.b.or(pts.get(1).copied()).context("--b is required for a law with one finite support point")?;
        return Ok(band_audit(ell, a, b, dim)?);
    }
    Ok(match Pattern::for_law(&config.distribution, dim, PATTERN_RESOLUTION)? {
        None => Step { name: "pattern", passed: true, detail: "no pattern for a single support point".into() },
        Some(p) => match *p.event() {
            PatternEvent::Bands { a, b, .. } => band_audit(p.ell(), a, b, dim)?,
            PatternEvent::Infinite { a_prime } => {
                let ok = p.in_h(&p.centre_assignment())?;
                Step { name: "pattern", passed: ok, detail: format!("detour unique optimum with a' = {a_prime}: {ok}") }
            }
        },
    })
}

fn chain_step<W: Weight>(config: &ExperimentConfig, corrupt: bool) -> fpp_core::Result<Step> {
    let p = &config.experiment;
    let n = p.scales.first().copied().unwrap_or(1);
    let target = fpp_core::experiment::scaled_target(&p.direction, n as f64);
    let env = sample_env::<W>(config, &target)?;
    let mut failures = vec![];
    for delta in config.shifts()? {
        let shifted = if corrupt { env.shift_where(delta, |s| s % 2 == 0)? } else { env.shift(delta)? };
        let report = verify_inequality_chain(&env, &shifted, delta, &target, p.hop_excess)?;
        if let Some(f) = report.failure() {
            failures.push(format!("delta = {delta}: {f}"));
        }
    }
    Ok(Step {
        name: "inequality chain",
        passed: failures.is_empty(),
        detail: failures.into_iter().next().unwrap_or_else(|| format!("all links hold at target {target:?}")),
    })
}

fn cmd_verify(args: &VerifyArgs, command: &Command) -> Result<(), Failure> {
    let config = load(&args.common, &args.overrides)?;
    let mut steps = vec![pattern_step(args, &config)?];
    steps.push(if config.distribution.is_exact() {
        chain_step::<Ticks>(&config, args.corrupt_shift)?
    } else {
        chain_step::<f64>(&config, args.corrupt_shift)?
    });
    steps.push(match run_gap_experiment(&config, |m| eprintln!("{m}")) {
        Ok(run) => {
            let checked = run.trials.iter().filter(|t| t.chain_verified.is_some()).count();
            Step {
                name: "sampled trials",
                passed: true,
                detail: format!("{} trials, chain applicable on {checked}", run.trials.len()),
            }
        }
        Err(Error::Assertion(m)) => Step { name: "sampled trials", passed: false, detail: m },
        Err(e) => return Err(e.into()),
    });

    let run = RunConfig { subcommand: "verify", command, resolved: &config };
    let header = Header::new("verify", &run)?;
    let passed = steps.iter().all(|s| s.passed);
    let out = &args.common.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("verify.json");
    let mut w = create(&path)?;
    let body = serde_json::json!({ "header": header, "passed": passed, "steps": steps });
    writeln!(w, "{}", serde_json::to_string_pretty(&body).context("encoding report")?).context("writing report")?;
    w.flush().context("writing report")?;

    for s in &steps {
        println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
    }
    match steps.iter().find(|s| !s.passed) {
        Some(s) => Err(Failure::Assertion(format!("{}: {}", s.name, s.detail))),
        None => Ok(()),
    }
}

fn cmd_experiment(kind: &str, args: &ExperimentArgs, command: &Command) -> Result<(), Failure> {
    let config = load(&args.common, &args.overrides)?;
    let run_config = RunConfig { subcommand: kind, command, resolved: &config };
    let progress = |m: &str| eprintln!("{m}");
    let out = &args.common.out;
    let (written, warnings) = match kind {
        "gap" => {
            let run = run_gap_experiment(&config, progress)?;
            (write_run(out, kind, &run_config, &run)?, run.summary.warnings)
        }
        "tail" => {
            let run = run_tail_experiment(&config, progress)?;
            (write_run(out, kind, &run_config, &run)?, run.summary.warnings)
        }
        _ => {
            let run = estimate_time_constants(&config, progress)?;
            (write_run(out, kind, &run_config, &run)?, run.summary.warnings)
        }
    };
    for w in warnings {
        eprintln!("warning: {w}");
    }
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = &cli.command;
    let result = match command {
        Command::Geodesic(a) => cmd_point("geodesic", a, command),
        Command::Directed(a) => cmd_point("directed", a, command),
        Command::Verify(a) => cmd_verify(a, command),
        Command::Gap(a) => cmd_experiment("gap", a, command),
        Command::Tail(a) => cmd_experiment("tail", a, command),
        Command::Constants(a) => cmd_experiment("constants", a, command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(m)) => {
            eprintln!("assertion failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
