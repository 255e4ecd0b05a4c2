//! Command-line driver: TOML run configuration, orchestration of a backend plus
//! level-set analysis, and artifact emission.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axisym::{GridFn, GridSpec};
use crate::error::{Error, Result};
use crate::exact::extinction_time;
use crate::flow::{
    estimate_extinction, evolve_snapshots, extract_zero_level, profile_error, sphere_trace, svg_overlay, ellipse_trace,
    Evolver, FlowReport, LevelCurve, PdeEvolver,
};
use crate::game::{play_named, GameParams, GameSolver, StrategyI, StrategyII, DEFAULT_DIRS, DEFAULT_REFINE};
use crate::hgroup::HPoint;
use crate::pde::PdeParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Game,
    Pde,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "game" => Ok(Self::Game),
            "pde" => Ok(Self::Pde),
            other => Err(Error::Config(format!("unknown backend `{other}`, expected game or pde"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn parse_formats(s: &str) -> Result<Vec<Format>> {
    s.split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(|f| match f {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        })
        .collect()
}

/// Initial level-set function, truncated at `M` as `min{·, M}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Initial {
    /// `min{G(p) - radius⁴, M}`.
    Sphere { radius: f64, truncation: f64 },
    /// `min{scale·G((0,0,center_z)⁻¹·p) + offset, M}`.
    GaugeOffset { scale: f64, offset: f64, center_z: f64, truncation: f64 },
    File { path: PathBuf },
}

impl Initial {
    /// Parses `sphere R`, `gauge-offset SCALE OFFSET CENTER_Z` or `file PATH`.
    pub fn parse(text: &str, truncation: Option<f64>) -> Result<Self> {
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::Config("`initial` is empty".into()))?;
        let nums = |words: std::str::SplitWhitespace, n: usize| -> Result<Vec<f64>> {
            let v: Vec<&str> = words.collect();
            if v.len() != n {
                return Err(Error::Config(format!("`initial = {text}`: expected {n} numbers after `{kind}`")));
            }
            v.iter()
                .map(|w| w.parse::<f64>().map_err(|e| Error::Config(format!("`initial`: `{w}`: {e}"))))
                .collect()
        };
        let init = match kind {
            "sphere" => {
                let v = nums(words, 1)?;
                let radius = v[0];
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(Error::Config(format!("`initial`: radius must be positive, got {radius}")));
                }
                Initial::Sphere { radius, truncation: truncation.unwrap_or(10.0 * radius.powi(4)) }
            }
            "gauge-offset" => {
                let v = nums(words, 3)?;
                if !(v[0] > 0.0) {
                    return Err(Error::Config(format!("`initial`: scale must be positive, got {}", v[0])));
                }
                let truncation = truncation.unwrap_or(10.0 * v[1].abs().max(1.0));
                Initial::GaugeOffset { scale: v[0], offset: v[1], center_z: v[2], truncation }
            }
            "file" => {
                let rest: Vec<&str> = words.collect();
                if rest.is_empty() {
                    return Err(Error::Config("`initial = file` needs a path".into()));
                }
                Initial::File { path: PathBuf::from(rest.join(" ")) }
            }
            other => return Err(Error::Config(format!("unknown initial field kind `{other}`"))),
        };
        match init {
            Initial::Sphere { truncation: m, .. } | Initial::GaugeOffset { truncation: m, .. } if !(m > 0.0) => {
                Err(Error::Config(format!("`truncation` must be positive, got {m}")))
            }
            other => Ok(other),
        }
    }

    /// Samples the field; the ring must already sit in the truncated region.
    pub fn sample(&self, grid: &GridShape) -> Result<GridFn> {
        let spec_with = |far| GridSpec::new(grid.r_max, grid.z_min, grid.z_max, grid.nr, grid.nz, far);
        let sampled = match *self {
            Initial::Sphere { radius, truncation } => {
                let r4 = radius.powi(4);
                GridFn::from_fn(spec_with(truncation)?, |r, z| (r.powi(4) + 16.0 * z * z - r4).min(truncation))
            }
            Initial::GaugeOffset { scale, offset, center_z, truncation } => GridFn::from_fn(spec_with(truncation)?, |r, z| {
                (scale * (r.powi(4) + 16.0 * (z - center_z).powi(2)) + offset).min(truncation)
            }),
            Initial::File { ref path } => return GridFn::read(path),
        };
        sampled.map_err(|e| Error::Config(format!("initial field does not fit the grid: {e}")))
    }

    pub fn sphere_radius(&self) -> Option<f64> {
        match *self {
            Initial::Sphere { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

/// Node layout without the far field, which comes from the initial field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridShape {
    #[serde(default = "defaults::r_max")]
    pub r_max: f64,
    #[serde(default = "defaults::z_min")]
    pub z_min: f64,
    #[serde(default = "defaults::z_max")]
    pub z_max: f64,
    #[serde(default = "defaults::nr")]
    pub nr: usize,
    #[serde(default = "defaults::nz")]
    pub nz: usize,
}

impl Default for GridShape {
    fn default() -> Self {
        Self { r_max: defaults::r_max(), z_min: defaults::z_min(), z_max: defaults::z_max(), nr: defaults::nr(), nz: defaults::nz() }
    }
}

mod defaults {
    pub fn r_max() -> f64 {
        2.0
    }
    pub fn z_min() -> f64 {
        -2.0
    }
    pub fn z_max() -> f64 {
        2.0
    }
    pub fn nr() -> usize {
        161
    }
    pub fn nz() -> usize {
        321
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    initial: String,
    backend: Option<String>,
    eps: Option<f64>,
    dirs: Option<usize>,
    refine: Option<u32>,
    reg: Option<f64>,
    dt: Option<f64>,
    horizon: f64,
    truncation: Option<f64>,
    snapshots: Option<Vec<f64>>,
    out: Option<PathBuf>,
    formats: Option<Vec<String>>,
    #[serde(default)]
    grid: GridShape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BackendParams {
    Game(GameParams),
    Pde(PdeParams),
}

/// A validated run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridShape,
    pub initial: Initial,
    pub backend: BackendParams,
    pub horizon: f64,
    pub snapshots: Vec<f64>,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

/// Overrides from the command line, applied before validation.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub backend: Option<BackendKind>,
    pub eps: Option<f64>,
    pub dirs: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, ov: &Overrides) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let grid = raw.grid;
    GridSpec::new(grid.r_max, grid.z_min, grid.z_max, grid.nr, grid.nz, 0.0).map_err(|e| Error::Config(format!("[grid]: {e}")))?;
    let initial = Initial::parse(&raw.initial, raw.truncation)?;
    let horizon = raw.horizon;
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("`horizon` must be nonnegative, got {horizon}")));
    }
    let kind = match ov.backend {
        Some(k) => k,
        None => raw.backend.as_deref().unwrap_or("game").parse()?,
    };
    let spec = GridSpec::new(grid.r_max, grid.z_min, grid.z_max, grid.nr, grid.nz, 0.0)?;
    let backend = match kind {
        BackendKind::Game => {
            let eps = ov.eps.or(raw.eps).ok_or_else(|| Error::Config("missing key `eps` for the game backend".into()))?;
            let dirs = ov.dirs.or(raw.dirs).unwrap_or(DEFAULT_DIRS);
            let refine = raw.refine.unwrap_or(DEFAULT_REFINE);
            BackendParams::Game(GameParams::new(eps, dirs, refine, horizon).map_err(|e| Error::Config(e.to_string()))?)
        }
        BackendKind::Pde => {
            let reg = raw.reg.unwrap_or_else(|| PdeParams::default_reg(&spec));
            let dt = raw.dt.unwrap_or_else(|| PdeParams::safe_dt(&spec));
            BackendParams::Pde(PdeParams::new(reg, dt, horizon).map_err(|e| Error::Config(e.to_string()))?)
        }
    };
    let mut snapshots = raw.snapshots.unwrap_or_else(|| vec![0.0, horizon]);
    if let Some(&t) = snapshots.iter().find(|&&t| t > horizon * (1.0 + 1e-12) || t < 0.0) {
        return Err(Error::Config(format!("snapshot time {t} is outside [0, horizon = {horizon}]")));
    }
    snapshots.sort_by(f64::total_cmp);
    snapshots.dedup();
    let formats = match (&ov.formats, raw.formats) {
        (Some(f), _) => f.clone(),
        (None, Some(f)) => parse_formats(&f.join(","))?,
        (None, None) => vec![Format::Json],
    };
    Ok(RunConfig { grid, initial, backend, horizon, snapshots, out: ov.out.clone().or(raw.out), formats })
}

impl RunConfig {
    pub fn evolver(&self, spec: GridSpec) -> Result<Box<dyn Evolver>> {
        Ok(match self.backend {
            BackendParams::Game(p) => Box::new(GameSolver::new(spec, p)?),
            BackendParams::Pde(p) => Box::new(PdeEvolver { params: p }),
        })
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: FlowReport,
    pub snapshots: Vec<(f64, GridFn)>,
}

/// Number of extra evenly spaced probe times used to bracket the extinction time.
const EXTINCTION_PROBES: usize = 16;

/// Runs the backend, records the configured snapshots and estimates extinction
/// (and, for spheres, the profile error at the last nonempty snapshot).
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let u0 = config.initial.sample(&config.grid)?;
    let ev = config.evolver(u0.spec)?;
    let mut schedule: Vec<f64> = config.snapshots.clone();
    schedule.extend((1..=EXTINCTION_PROBES).map(|k| config.horizon * k as f64 / EXTINCTION_PROBES as f64));
    schedule.sort_by(f64::total_cmp);
    schedule.dedup_by(|a, b| ev.steps_for(*a) == ev.steps_for(*b));
    let all = evolve_snapshots(ev.as_ref(), &u0, &schedule)?;
    let extinction = estimate_extinction(&all, Some(ev.as_ref()))?;
    let mut snapshots: Vec<(f64, GridFn)> = Vec::new();
    for &t in &config.snapshots {
        let n = ev.steps_for(t);
        let (time, u) = all.iter().find(|(s, _)| ev.steps_for(*s) == n).cloned().expect("every snapshot is scheduled");
        if snapshots.last().is_none_or(|(s, _)| *s < time) {
            snapshots.push((time, u));
        }
    }
    let curves: Vec<LevelCurve> = snapshots.iter().map(|(_, u)| extract_zero_level(u)).collect();
    let mut report = FlowReport::new(snapshots.iter().map(|(t, _)| *t).collect(), curves)?;
    report.extinction_estimate = extinction;
    if let Some(r0) = config.initial.sphere_radius() {
        let t_ext = extinction_time(r0)?;
        report.profile_error = report
            .times
            .iter()
            .zip(&report.curves)
            .rev()
            .find(|(t, c)| **t < t_ext && !c.is_empty())
            .map(|(t, c)| profile_error(c, *t, r0))
            .transpose()?;
    }
    Ok(RunOutput { report, snapshots })
}

/// Writes the report and per-snapshot grids, curves and an SVG overlay into `dir`.
pub fn write_outputs(out: &RunOutput, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("report.json".into(), out.report.to_json()?)?;
    for (k, ((_, u), curve)) in out.snapshots.iter().zip(&out.report.curves).enumerate() {
        for f in &config.formats {
            match f {
                Format::Csv => {
                    put(format!("field_{k:03}.csv"), u.to_csv())?;
                    put(format!("curve_{k:03}.csv"), curve.to_csv())?;
                }
                Format::Json => {
                    put(format!("field_{k:03}.json"), u.to_json()?)?;
                    put(format!("curve_{k:03}.json"), serde_json::to_string(curve)?)?;
                }
                Format::Svg => {}
            }
        }
    }
    if config.formats.contains(&Format::Svg) {
        let mut refs = Vec::new();
        if let Some(r0) = config.initial.sphere_radius() {
            refs.push(sphere_trace(r0, 400));
            let t_ext = extinction_time(r0)?;
            if let Some((t, _)) = out.report.times.iter().zip(&out.report.curves).rev().find(|(t, c)| **t < t_ext && !c.is_empty()) {
                let lambda = (r0.powi(4) - 12.0 * t * t).sqrt();
                refs.push(ellipse_trace(&crate::exact::EllipsoidProfile::new(t_ext)?, 400).scaled(lambda, lambda));
            }
        }
        let g = &config.grid;
        put("overlay.svg".into(), svg_overlay(&out.report.curves, &refs, g.r_max, g.z_min, g.z_max))?;
    }
    Ok(written)
}

#[derive(Parser, Debug)]
#[command(name = "heisenflow", version, about = "Horizontal mean curvature flow in the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    dirs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long)]
    format: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", self.config.display())))?;
        let ov = Overrides {
            backend: self.backend.as_deref().map(str::parse).transpose()?,
            eps: self.eps,
            dirs: self.dirs,
            out: self.out.clone(),
            formats: self.format.as_deref().map(parse_formats).transpose()?,
        };
        parse_config_with(&text, &ov)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the algebraic identity suites on seeded random samples.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evolve the configured field and write snapshots.
    Evolve(RunArgs),
    /// Report the extinction time against r²/√12.
    Extinction(RunArgs),
    /// Report the normalized-profile error of the last nonempty snapshot.
    Profile(RunArgs),
    /// Play one game trajectory in 3D coordinates.
    Play {
        /// Starting point `p1,p2,p3`.
        #[arg(long, default_value = "0,0,0")]
        start: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// gauge, random, or angle:<radians>.
        #[arg(long, default_value = "gauge")]
        player_one: String,
        /// max, min, plus, minus or random.
        #[arg(long, default_value = "max")]
        player_two: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve two initial fields and check that their order is preserved.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Initial field expected to stay below, in the `initial` syntax.
        #[arg(long)]
        lower: String,
        /// Initial field expected to stay above.
        #[arg(long)]
        upper: String,
    },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn parse_point(s: &str) -> Result<HPoint> {
    let v: Vec<f64> = s
        .split(',')
        .map(|w| w.trim().parse::<f64>().map_err(|e| Error::Config(format!("--start `{w}`: {e}"))))
        .collect::<Result<_>>()?;
    if v.len() != 3 {
        return Err(Error::Config("--start needs three comma-separated numbers".into()));
    }
    Ok(HPoint::new(v[0], v[1], v[2]))
}

fn parse_strategies(one: &str, two: &str) -> Result<(StrategyI, StrategyII)> {
    let si = match one {
        "gauge" => StrategyI::Gauge,
        "random" => StrategyI::Random,
        s if s.starts_with("angle:") => {
            StrategyI::Angle(s[6..].parse().map_err(|e| Error::Config(format!("--player-one `{s}`: {e}")))?)
        }
        other => return Err(Error::Config(format!("unknown strategy `{other}` for player one"))),
    };
    let sii = match two {
        "max" => StrategyII::Max,
        "min" => StrategyII::Min,
        "plus" => StrategyII::Plus,
        "minus" => StrategyII::Minus,
        "random" => StrategyII::Random,
        other => return Err(Error::Config(format!("unknown strategy `{other}` for player two"))),
    };
    Ok((si, sii))
}

/// Result of the `validate` suites: one `(name, worst value, tolerance)` per check.
pub fn validation_suite(seed: u64) -> Vec<(&'static str, f64, f64)> {
    use crate::exact::exact_residual;
    use crate::fdcheck::{max_rel_error, two_point_derivs, FIRST_STEP, SECOND_STEP};
    use crate::hgroup::{f_derivs, g_derivs};
    use rand::RngExt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = |rng: &mut ChaCha8Rng| HPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let mut residual: f64 = 0.0;
    for _ in 0..10_000 {
        let p = pt(&mut rng);
        residual = residual.max(exact_residual(p, rng.random_range(0.0..1.0)).abs());
    }
    let (mut fd, mut anti): (f64, f64) = (0.0, 0.0);
    let f = |p: HPoint, q: HPoint| q.inv().mul(p).gauge4();
    let g = |p: HPoint, q: HPoint| p.mul(q.inv()).gauge4();
    for _ in 0..1000 {
        let (p, q) = (pt(&mut rng), pt(&mut rng));
        fd = fd.max(max_rel_error(&f_derivs(p, q), &two_point_derivs(&f, p, q, FIRST_STEP, SECOND_STEP)));
        let gd = g_derivs(p, q);
        fd = fd.max(max_rel_error(&gd, &two_point_derivs(&g, p, q, FIRST_STEP, SECOND_STEP)));
        anti = anti.max((gd.x1p + gd.x1q).abs()).max((gd.x2p + gd.x2q).abs());
    }
    vec![
        ("exact-solution residual", residual, 1e-9),
        ("derivative formulas vs finite differences", fd, 1e-6),
        ("gradient antisymmetry of g", anti, 1e-12),
    ]
}

fn dispatch(cli: Cli, stdout: &mut String) -> Result<i32> {
    match cli.command {
        Command::Validate { seed } => {
            let mut ok = true;
            for (name, worst, tol) in validation_suite(seed) {
                let pass = worst <= tol;
                ok &= pass;
                let _ = writeln!(stdout, "{} {name}: worst {worst:e} (tolerance {tol:e})", if pass { "PASS" } else { "FAIL" });
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Evolve(args) => {
            let config = args.load()?;
            let out = run(&config)?;
            let _ = writeln!(stdout, "{}", out.report.to_json()?);
            if let Some(dir) = &config.out {
                for p in write_outputs(&out, &config, dir)? {
                    let _ = writeln!(stdout, "wrote {}", p.display());
                }
            }
            Ok(0)
        }
        Command::Extinction(args) => {
            let config = args.load()?;
            let out = run(&config)?;
            let _ = writeln!(stdout, "extinction_estimate = {}", fmt_opt(out.report.extinction_estimate));
            if let Some(r0) = config.initial.sphere_radius() {
                let _ = writeln!(stdout, "reference r^2/sqrt(12) = {}", extinction_time(r0)?);
            }
            Ok(0)
        }
        Command::Profile(args) => {
            let config = args.load()?;
            if config.initial.sphere_radius().is_none() {
                return Err(Error::Config("profile needs a sphere initial field".into()));
            }
            let out = run(&config)?;
            let _ = writeln!(stdout, "profile_error = {}", fmt_opt(out.report.profile_error));
            Ok(0)
        }
        Command::Play { start, eps, steps, player_one, player_two, seed, out } => {
            let p0 = parse_point(&start)?;
            let (si, sii) = parse_strategies(&player_one, &player_two)?;
            let params = GameParams::new(eps, DEFAULT_DIRS, 0, steps as f64 * eps * eps * (1.0 + 1e-12))
                .map_err(|e| Error::Config(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let traj = play_named(p0, &params, si, sii, &mut rng);
            let json = traj.to_json()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &json)?;
                    let _ = writeln!(stdout, "wrote {}", path.display());
                }
                None => {
                    let _ = writeln!(stdout, "{json}");
                }
            }
            Ok(0)
        }
        Command::Compare { run: args, lower, upper } => {
            let config = args.load()?;
            let lo = Initial::parse(&lower, None)?.sample(&config.grid)?;
            let hi = Initial::parse(&upper, None)?.sample(&config.grid)?;
            let ev = config.evolver(lo.spec)?;
            let a = evolve_snapshots(ev.as_ref(), &lo, &config.snapshots)?;
            let b = evolve_snapshots(ev.as_ref(), &hi, &config.snapshots)?;
            let mut ok = true;
            for ((t, x), (_, y)) in a.iter().zip(&b) {
                let worst = x.values().iter().zip(y.values()).map(|(p, q)| p - q).fold(f64::NEG_INFINITY, f64::max);
                ok &= worst <= 0.0;
                let _ = writeln!(stdout, "t = {t}: max(lower - upper) = {worst}");
            }
            let _ = writeln!(stdout, "{}", if ok { "ordering preserved" } else { "ordering violated" });
            Ok(if ok { 0 } else { 3 })
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = String::new();
    let code = match dispatch(cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    print!("{stdout}");
    code
}
