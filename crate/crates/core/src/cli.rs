//! Command-line driver: JSON run configurations, orchestration and CSV output.
//!
//! All quantities crossing this interface are SI: separations and positions in
//! metres, wavenumbers in 1/m, stresses in Pa. Exit codes: 0 success, 2 schema,
//! validation or I/O problems, 3 numerical failure, 4 failed verification.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;
use thiserror::Error;

use crate::error::Error;
use crate::materials::Material;
use crate::modes::Mode;
use crate::quadrature::QuadSpec;
use crate::stress::{force_adaptive, force_on_grid, stress_in_plate, stress_profile, ForceKind, PlateSystem};
use crate::verify::{self, Check, VerifyOptions};

/// Largest speed accepted from a configuration.
pub const BETA_MAX: f64 = 0.99;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CASIMIR_SHEAR_THREADS";

pub const FORCE_HEADER: [&str; 6] = ["a_m", "beta", "F_Pa", "F_dimensionless", "quad_error", "imag_residual"];
pub const PROFILE_HEADER: [&str; 5] = ["x_m", "sigma_xx", "sigma_yy", "sigma_zz", "offdiag_max"];
pub const VERIFY_HEADER: [&str; 6] = ["id", "name", "passed", "measured", "threshold", "detail"];
pub const ERROR_HEADER: [&str; 3] = ["error_kind", "path", "message"];

/// Configurations shipped with the crate, embedded at build time.
pub const SHIPPED_CONFIGS: [(&str, &str); 10] = [
    ("mirror", include_str!("../configs/mirror.json")),
    ("gold_drude", include_str!("../configs/gold_drude.json")),
    ("gold_plasma", include_str!("../configs/gold_plasma.json")),
    ("dielectric_eps2", include_str!("../configs/dielectric_eps2.json")),
    ("silicon_lorentz", include_str!("../configs/silicon_lorentz.json")),
    ("magnetodielectric", include_str!("../configs/magnetodielectric.json")),
    ("sweep_beta_mirror", include_str!("../configs/sweep_beta_mirror.json")),
    ("sweep_separation_gold", include_str!("../configs/sweep_separation_gold.json")),
    ("profile_eps2_drude", include_str!("../configs/profile_eps2_drude.json")),
    ("green_dump_gold", include_str!("../configs/green_dump_gold.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Plate separation `a` [m].
    pub separation: f64,
    #[serde(default)]
    pub beta: f64,
    pub plate1: Material,
    pub plate2: Material,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub green_dump: Option<GreenDumpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Beta,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepSpec {
    /// Sample points, endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == n {
                    return self.stop;
                }
                let (k, m) = (i as f64, (n - 1) as f64);
                let t = k / m;
                match self.spacing {
                    Spacing::Linear => (self.start * (m - k) + self.stop * k) / m,
                    Spacing::Log => (self.start.ln() + t * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }
}

/// Either explicit positions or `count` evenly spaced gap points.
///
/// Negative positions lie inside plate 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl ProfileSpec {
    pub fn positions(&self, a: f64) -> Vec<f64> {
        match (&self.x_m, self.count) {
            (Some(xs), _) => xs.clone(),
            (None, n) => {
                let n = n.unwrap_or(9);
                (0..n).map(|i| a * (i as f64 + 0.5) / n as f64).collect()
            }
        }
    }
}

fn yes() -> bool {
    true
}

/// Green tensor dump between the plates: one row per `(κ, u, v)` mode [1/m].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenDumpSpec {
    /// Field point [m].
    pub x: f64,
    /// Source point [m].
    pub x_p: f64,
    pub modes: Vec<[f64; 3]>,
    #[serde(default = "yes")]
    pub regularized: bool,
}

impl RunConfig {
    pub fn system(&self) -> PlateSystem {
        PlateSystem::new(self.plate1, self.plate2, self.separation, self.beta)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let a = self.separation;
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid("/separation", a, "separation must be positive"));
        }
        check_beta("/beta", self.beta)?;
        for (plate, m) in [("plate1", &self.plate1), ("plate2", &self.plate2)] {
            for (part, r) in [("electric", &m.electric), ("magnetic", &m.magnetic)] {
                if let Err((field, value)) = r.validate() {
                    return Err(invalid(
                        &format!("/{plate}/{part}/{field}"),
                        value,
                        "parameter out of range",
                    ));
                }
            }
        }
        if let Err((field, value)) = self.quad.validate() {
            return Err(invalid(&format!("/quad/{field}"), value, "quadrature setting out of range"));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(p) = &self.profile {
            p.validate(a)?;
        }
        if let Some(g) = &self.green_dump {
            g.validate(a)?;
        }
        if let Some(path) = &self.output {
            check_writable("/output", path)?;
        }
        Ok(())
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(invalid("/sweep/count", self.count as f64, "a sweep needs at least 2 points"));
        }
        for (name, x) in [("start", self.start), ("stop", self.stop)] {
            let path = format!("/sweep/{name}");
            match self.parameter {
                SweepParameter::Beta => check_beta(&path, x)?,
                SweepParameter::Separation => {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(invalid(&path, x, "separation must be positive"));
                    }
                }
            }
            if self.spacing == Spacing::Log && !(x > 0.0) {
                return Err(invalid(&path, x, "log spacing needs positive endpoints"));
            }
        }
        Ok(())
    }
}

impl ProfileSpec {
    fn validate(&self, a: f64) -> Result<(), CliError> {
        if let Some(n) = self.count {
            if self.x_m.is_some() {
                return Err(invalid("/profile/count", n as f64, "give either x_m or count"));
            }
            if n == 0 {
                return Err(invalid("/profile/count", 0.0, "count must be positive"));
            }
        }
        for (i, &x) in self.x_m.iter().flatten().enumerate() {
            if !(x.is_finite() && x != 0.0 && x < a) {
                return Err(invalid(
                    &format!("/profile/x_m/{i}"),
                    x,
                    "positions must lie in the gap (0, a) or inside plate 1 (x < 0)",
                ));
            }
        }
        Ok(())
    }
}

impl GreenDumpSpec {
    fn validate(&self, a: f64) -> Result<(), CliError> {
        for (name, x) in [("x", self.x), ("x_p", self.x_p)] {
            if !(x.is_finite() && (0.0..=a).contains(&x)) {
                return Err(invalid(&format!("/green_dump/{name}"), x, "position must lie in [0, a]"));
            }
        }
        for (i, [kappa, u, v]) in self.modes.iter().enumerate() {
            if !(kappa.is_finite() && *kappa > 0.0) {
                return Err(invalid(&format!("/green_dump/modes/{i}/0"), *kappa, "kappa must be positive"));
            }
            if !(u.is_finite() && v.is_finite()) || (*u == 0.0 && *v == 0.0) {
                return Err(invalid(&format!("/green_dump/modes/{i}/1"), *u, "(u, v) must be finite and nonzero"));
            }
        }
        Ok(())
    }
}

fn check_beta(path: &str, beta: f64) -> Result<(), CliError> {
    if beta.is_finite() && (0.0..=BETA_MAX).contains(&beta) {
        Ok(())
    } else {
        Err(invalid(path, beta, "beta must lie in [0, 0.99]"))
    }
}

fn check_writable(pointer: &str, path: &Path) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ok = parent.is_dir() && !path.is_dir() && fs::metadata(parent).map(|m| !m.permissions().readonly()).unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation {
            pointer: pointer.into(),
            value: path.display().to_string(),
            message: "output path is not writable".into(),
        })
    }
}

fn invalid(pointer: &str, value: f64, message: &str) -> CliError {
    CliError::Validation {
        pointer: pointer.into(),
        value: format!("{value:e}"),
        message: message.into(),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid value {value} at {pointer}: {message}")]
    Validation {
        pointer: String,
        value: String,
        message: String,
    },
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Numerics(#[from] Error),
    #[error("{failed} of {total} verification checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Validation { .. } | CliError::Io { .. } => 2,
            CliError::Numerics(_) => 3,
            CliError::Verification { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema { .. } => "SchemaError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Io { .. } => "IoError",
            CliError::Numerics(e) => e.kind(),
            CliError::Verification { .. } => "VerificationFailure",
        }
    }

    /// JSON pointer into the configuration, when the error has one.
    pub fn pointer(&self) -> &str {
        match self {
            CliError::Schema { pointer, .. } | CliError::Validation { pointer, .. } => pointer,
            _ => "",
        }
    }

    /// Machine-readable error record.
    pub fn to_table(&self) -> Table {
        Table {
            header: ERROR_HEADER.iter().map(|h| h.to_string()).collect(),
            rows: vec![vec![self.kind().into(), self.pointer().into(), self.to_string()]],
        }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parses and validates a configuration given either as a file path or as inline JSON.
pub fn parse_config(source: &str) -> Result<RunConfig, CliError> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Io {
            path: source.into(),
            message: e.to_string(),
        })?
    };
    let cfg = parse_config_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Strict deserialization only; no range checks.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })
}

/// Shipped configurations as plate systems, for the reality and sign checks.
pub fn shipped_systems() -> Vec<(String, PlateSystem)> {
    SHIPPED_CONFIGS
        .iter()
        .map(|(name, text)| {
            let cfg = parse_config_str(text).unwrap_or_else(|e| panic!("shipped config {name}: {e}"));
            (name.to_string(), cfg.system())
        })
        .collect()
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Shortest round-trip representation.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn force_row(s: &PlateSystem, f: &crate::stress::ForceResult) -> Vec<String> {
    vec![
        num(s.a),
        num(s.beta),
        num(f.f_pa),
        num(f.dimensionless),
        num(f.quad_error),
        num(f.imag_residual),
    ]
}

pub fn run_force(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = cfg.system();
    let (f, _) = force_adaptive(&s, ForceKind::Moving, &cfg.quad)?;
    let mut t = Table::new(&FORCE_HEADER);
    t.rows.push(force_row(&s, &f));
    Ok(t)
}

/// β sweeps share the grid adapted at the first point; separation sweeps adapt at each point.
pub fn run_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let Some(sweep) = &cfg.sweep else {
        return Err(CliError::Schema {
            pointer: "/sweep".into(),
            message: "the sweep command needs a sweep block".into(),
        });
    };
    let base = cfg.system();
    let mut t = Table::new(&FORCE_HEADER);
    let mut grid = None;
    for x in sweep.values() {
        let s = match sweep.parameter {
            SweepParameter::Beta => base.with_beta(x),
            SweepParameter::Separation => PlateSystem { a: x, ..base },
        };
        let f = match (&grid, sweep.parameter) {
            (Some(g), SweepParameter::Beta) => force_on_grid(&s, ForceKind::Moving, g)?,
            _ => {
                let (f, g) = force_adaptive(&s, ForceKind::Moving, &cfg.quad)?;
                grid = Some(g);
                f
            }
        };
        t.rows.push(force_row(&s, &f));
    }
    Ok(t)
}

pub fn run_stress_profile(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = cfg.system();
    let xs = cfg
        .profile
        .clone()
        .unwrap_or(ProfileSpec { x_m: None, count: None })
        .positions(s.a);
    let gap: Vec<f64> = xs.iter().cloned().filter(|&x| x > 0.0).collect();
    let mut gap_results = stress_profile(&gap, &s, &cfg.quad)?.into_iter();
    let mut t = Table::new(&PROFILE_HEADER);
    for &x in &xs {
        let r = if x > 0.0 {
            gap_results.next().expect("one result per gap point")
        } else {
            stress_in_plate(x, &s, &cfg.quad)?
        };
        t.rows.push(vec![
            num(x),
            num(r.sigma[(0, 0)]),
            num(r.sigma[(1, 1)]),
            num(r.sigma[(2, 2)]),
            num(r.offdiag_max()),
        ]);
    }
    Ok(t)
}

pub fn green_dump_header() -> Vec<String> {
    const AXES: [&str; 3] = ["x", "y", "z"];
    let mut h: Vec<String> = ["kappa", "u", "v", "beta", "x", "x_p"].map(String::from).to_vec();
    for i in AXES {
        for j in AXES {
            for part in ["re", "im"] {
                h.push(format!("g_{i}{j}_{part}"));
            }
        }
    }
    h
}

/// Green tensor between the plates [m], direct form.
pub fn run_green_dump(cfg: &RunConfig) -> Result<Table, CliError> {
    let Some(spec) = &cfg.green_dump else {
        return Err(CliError::Schema {
            pointer: "/green_dump".into(),
            message: "the green-dump command needs a green_dump block".into(),
        });
    };
    let s = cfg.system();
    let a = s.a;
    let mut t = Table {
        header: green_dump_header(),
        rows: Vec::new(),
    };
    for &[kappa, u, v] in &spec.modes {
        let mode = Mode::new(kappa * a, u * a, v * a, s.beta)?;
        let g = s.cavity(&mode)?.green_direct(spec.x / a, spec.x_p / a, spec.regularized)?;
        let mut row = vec![num(kappa), num(u), num(v), num(s.beta), num(spec.x), num(spec.x_p)];
        for i in 0..3 {
            for j in 0..3 {
                let z = g.matrix[(i, j)] * a;
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        t.rows.push(row);
    }
    Ok(t)
}

pub fn verify_options(cfg: Option<&RunConfig>) -> VerifyOptions {
    let mut opts = VerifyOptions {
        shipped: shipped_systems(),
        ..VerifyOptions::default()
    };
    if let Some(c) = cfg {
        opts.quad = c.quad;
        opts.shipped.push(("config".into(), c.system()));
    }
    opts
}

pub fn verify_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&VERIFY_HEADER);
    for c in checks {
        t.rows.push(vec![
            c.id.to_string(),
            c.name.into(),
            c.passed.to_string(),
            num(c.measured),
            num(c.threshold),
            c.detail.clone(),
        ]);
    }
    t
}

pub fn run_verify(cfg: Option<&RunConfig>) -> (Table, Vec<Check>) {
    let checks = verify::run_all(&verify_options(cfg));
    (verify_table(&checks), checks)
}

#[derive(Debug, Parser)]
#[command(name = "casimir-shear", version, about = "Casimir stress between plates in shear motion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub quad_rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub quad_max_level: Option<u32>,
    /// Run on a single thread.
    #[arg(long, global = true)]
    pub serial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Force per unit area for one configuration.
    Force,
    /// Force over a range of beta or separation.
    Sweep,
    /// Stress tensor at a set of positions.
    StressProfile,
    /// Green tensor entries for a list of modes.
    GreenDump,
    /// Run the acceptance checks.
    Verify,
}

/// Config with command-line overrides applied, validated.
pub fn load_config(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    let Some(src) = &cli.config else {
        if cli.command == Command::Verify {
            return Ok(None);
        }
        return Err(CliError::Schema {
            pointer: "/".into(),
            message: "--config is required".into(),
        });
    };
    let mut cfg = parse_config(src)?;
    if let Some(t) = cli.quad_rel_tol {
        cfg.quad.rel_tol = t;
    }
    if let Some(l) = cli.quad_max_level {
        cfg.quad.max_level = l;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    cfg.validate()?;
    Ok(Some(cfg))
}

fn thread_count(serial: bool) -> Result<usize, CliError> {
    if serial {
        return Ok(1);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Validation {
                pointer: format!("${THREADS_ENV}"),
                value: v,
                message: "thread cap must be a positive integer".into(),
            }),
        },
        Err(_) => Ok(0),
    }
}

/// Result of one invocation: the CSV to emit and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub code: i32,
    pub destination: Option<PathBuf>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
}

pub fn execute(cli: &Cli) -> Outcome {
    let destination = cli.output.clone();
    let failure = |e: CliError, destination: Option<PathBuf>| Outcome {
        csv: e.to_table().to_csv(),
        code: e.exit_code(),
        destination,
        notes: vec![format!("error: {e}")],
    };
    let cfg = match load_config(cli) {
        Ok(c) => c,
        Err(e) => return failure(e, destination),
    };
    let destination = cfg.as_ref().and_then(|c| c.output.clone()).or(destination);
    let pool = match thread_count(cli.serial).and_then(|n| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError::Io {
            path: "thread pool".into(),
            message: e.to_string(),
        })
    }) {
        Ok(p) => p,
        Err(e) => return failure(e, destination),
    };
    let result = pool.install(|| -> Result<(Table, Vec<String>, i32), CliError> {
        match cli.command {
            Command::Verify => {
                let (t, checks) = run_verify(cfg.as_ref());
                let failed = checks.iter().filter(|c| !c.passed).count();
                let mut notes: Vec<String> = checks.iter().map(Check::summary).collect();
                let code = if failed > 0 {
                    let e = CliError::Verification {
                        failed,
                        total: checks.len(),
                    };
                    notes.push(e.to_string());
                    e.exit_code()
                } else {
                    0
                };
                Ok((t, notes, code))
            }
            cmd => {
                let cfg = cfg.as_ref().expect("config loaded for non-verify commands");
                let t = match cmd {
                    Command::Force => run_force(cfg)?,
                    Command::Sweep => run_sweep(cfg)?,
                    Command::StressProfile => run_stress_profile(cfg)?,
                    Command::GreenDump => run_green_dump(cfg)?,
                    Command::Verify => unreachable!(),
                };
                Ok((t, Vec::new(), 0))
            }
        }
    });
    match result {
        Ok((t, notes, code)) => Outcome {
            csv: t.to_csv(),
            code,
            destination,
            notes,
        },
        Err(e) => failure(e, destination),
    }
}

/// Parses arguments, runs, writes output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = execute(&cli);
    for n in &out.notes {
        eprintln!("{n}");
    }
    match &out.destination {
        Some(p) => {
            if let Err(e) = fs::write(p, &out.csv) {
                eprintln!("error: cannot write {}: {e}", p.display());
                print!("{}", out.csv);
                return 2;
            }
        }
        None => print!("{}", out.csv),
    }
    out.code
}
