//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input validation, 2 no sign change in
//! the shooting bracket, 3 solver non-convergence, 4 verification failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::geometry::io::{read_profile_csv, read_profile_json, write_profile_csv};
use crate::geometry::{GeometryError, ProfileCurve, RadialDensity};
use crate::reilly::{
    circle_lambda1_numeric, minkowski_identity_residual, sphere_ambient_bound, verify_equality_case, EqualityOptions,
    ReillyError, ReillyReport, SphereSubmanifold,
};
use crate::shrinker::{shoot_torus, ScanPoint, ShooterConfig, ShrinkerError};
use crate::spectral::{
    assemble_spectrum, second_solution_check, solve_all_modes, solve_modes, verify_coordinate_eigenfunctions,
    CoordinateResiduals, ModeSpectrum, SecondSolution, SpectralError, SpectrumReport, SturmOperator,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const TOOL: &str = "shrinkspec";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_SIGN_CHANGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Shrinker(#[from] ShrinkerError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Reilly(#[from] ReillyError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Shrinker(ShrinkerError::NoSignChange { .. }) => EXIT_NO_SIGN_CHANGE,
            CliError::Shrinker(ShrinkerError::NoConvergence(_))
            | CliError::Shrinker(ShrinkerError::Geometry(GeometryError::NoConvergence { .. }))
            | CliError::Geometry(GeometryError::NoConvergence { .. })
            | CliError::Spectral(SpectralError::EigensolverFailure { .. })
            | CliError::Reilly(ReillyError::Spectral(SpectralError::EigensolverFailure { .. })) => EXIT_NO_CONVERGENCE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "shrinkspec", version, about = "Self-shrinker tori, drift-Laplacian spectra and Reilly-type bounds")]
pub struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    ShotTorus,
    RoundTorus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityChoice {
    Gaussian,
    Constant,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ShooterArgs {
    /// Shrinker constant C (< 0).
    #[arg(long = "c", default_value_t = -1.0, allow_hyphen_values = true)]
    pub c: f64,
    /// Lower end of the r0 bracket (default 0.2·√(2/−C)).
    #[arg(long)]
    pub r_lo: Option<f64>,
    /// Upper end of the r0 bracket (default 1.3·√(2/−C)).
    #[arg(long)]
    pub r_hi: Option<f64>,
    /// RK4 step (default 1e−3·√(2/−C)).
    #[arg(long)]
    pub h_ode: Option<f64>,
    /// Number of r0 samples in the bracket scan.
    #[arg(long)]
    pub scan_samples: Option<usize>,
}

impl ShooterArgs {
    fn config(&self, exec: Execution) -> Result<ShooterConfig, CliError> {
        if !(self.c < 0.0) {
            return Err(CliError::Usage(format!("C must be negative for shrinkers (got {})", self.c)));
        }
        let mut cfg = ShooterConfig::for_c(self.c);
        if let Some(v) = self.r_lo {
            cfg.bracket.0 = v;
        }
        if let Some(v) = self.r_hi {
            cfg.bracket.1 = v;
        }
        if let Some(v) = self.h_ode {
            cfg.h_ode = v;
        }
        if let Some(v) = self.scan_samples {
            cfg.scan_samples = v;
        }
        cfg.exec = exec;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shoot the symmetric shrinker torus and write its profile.
    ShootTorus {
        #[command(flatten)]
        shooter: ShooterArgs,
        /// Number of profile nodes (even).
        #[arg(long, default_value_t = 1024)]
        n: usize,
        /// Profile output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the miss-function scan as CSV (r0, miss).
        #[arg(long)]
        emit_scan: Option<PathBuf>,
    },
    /// Spectrum of the drift Laplacian on the torus generated by a profile.
    Spectrum {
        /// Profile file (CSV s,rho,z,alpha or JSON).
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = DensityChoice::Gaussian)]
        density: DensityChoice,
        /// Gaussian constant C.
        #[arg(long = "c", default_value_t = -1.0, allow_hyphen_values = true)]
        c: f64,
        /// Additive constant a of ψ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value_t = 10)]
        j_max: usize,
        /// Eigenvalues at or below this count as zero (default 1e−6·|C|).
        #[arg(long)]
        zero_tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-mode eigenfunction CSV files (s, phi).
        #[arg(long)]
        dump_eigenfunctions: Option<PathBuf>,
    },
    /// Full pipeline: surface, spectrum, bounds and identities.
    Verify {
        #[arg(long, value_enum, default_value_t = SurfaceKind::ShotTorus)]
        surface: SurfaceKind,
        #[command(flatten)]
        shooter: ShooterArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value_t = 10)]
        j_max: usize,
        #[arg(long)]
        zero_tol: Option<f64>,
        /// Center radius of the round torus.
        #[arg(long, default_value_t = 2.0)]
        torus_r0: f64,
        /// Tube radius of the round torus.
        #[arg(long, default_value_t = 1.0)]
        torus_r: f64,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Bound for a latitude parallel of the round sphere.
    SphereCheck {
        /// Sphere radius.
        #[arg(long = "R", default_value_t = 1.0)]
        big_r: f64,
        /// Euclidean radius of the parallel.
        #[arg(long = "r")]
        r: f64,
        /// Dimension of the parallel.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Nodes for the numerical circle eigenvalue.
        #[arg(long, default_value_t = 2048)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Periodic Sturm–Liouville eigenvalues from a CSV table (s, p, q).
    SlSolve {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 10)]
        j_max: usize,
        /// Period (default N·h from the s column).
        #[arg(long)]
        period: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::ShootTorus { shooter, n, out, format, emit_scan } => {
            cmd_shoot_torus(&shooter.config(exec)?, n, out.as_deref(), format, emit_scan.as_deref())
        }
        Command::Spectrum { profile, density, c, a, k_max, j_max, zero_tol, format, out, dump_eigenfunctions } => {
            let cfg = SpectrumConfig {
                profile,
                density,
                c,
                a,
                k_max,
                j_max,
                zero_tol: zero_tol.unwrap_or(1e-6 * c.abs()),
                format,
            };
            cmd_spectrum(&cfg, exec, out.as_deref(), dump_eigenfunctions.as_deref())
        }
        Command::Verify { surface, shooter, a, n, k_max, j_max, zero_tol, torus_r0, torus_r, out, format } => {
            let shooter_cfg = shooter.config(exec)?;
            let cfg = RunConfig {
                surface,
                c: shooter.c,
                a,
                n,
                k_max,
                j_max,
                zero_tol: zero_tol.unwrap_or(1e-6 * shooter.c.abs()),
                shooter: shooter_cfg,
                round_torus: (torus_r0, torus_r),
                format,
            };
            cmd_verify(&cfg, exec, out.as_deref())
        }
        Command::SphereCheck { big_r, r, dim, nodes, format } => cmd_sphere_check(big_r, r, dim, nodes, format),
        Command::SlSolve { table, j_max, period, format, out } => {
            cmd_sl_solve(&table, j_max, period, format, exec, out.as_deref())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.map_or("<stdout>".into(), |p| p.display().to_string()), source }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(io_err(path))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(io_err(None))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a C,
    #[serde(flatten)]
    report: R,
}

fn envelope<C: Serialize, R: Serialize>(config: &C, report: R) -> Envelope<'_, C, R> {
    Envelope { tool: TOOL, version: VERSION, config, report }
}

pub fn cmd_shoot_torus(
    cfg: &ShooterConfig,
    n: usize,
    out: Option<&Path>,
    format: Format,
    emit_scan: Option<&Path>,
) -> Result<(), CliError> {
    let shot = shoot_torus(cfg, n)?;
    if let Some(path) = emit_scan {
        write_scan(path, &shot.scan)?;
    }
    match format {
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            write_profile_csv(&shot.curve, &mut buf)?;
            emit(out, &String::from_utf8(buf).expect("csv is utf-8"))?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct ShotConfig<'a> {
                shooter: &'a ShooterConfig,
                n: usize,
            }
            emit(out, &to_json(&envelope(&ShotConfig { shooter: cfg, n }, &shot)))?;
        }
    }
    eprintln!(
        "shoot-torus: r0 = {:.12}, length = {:.12}, closure = {:.3e}, shrinker residual = {:.3e}, fitted C = {:.10}",
        shot.r0,
        2.0 * shot.half_length,
        shot.closure_defect,
        shot.residual.max_residual,
        shot.residual.fitted_c
    );
    Ok(())
}

fn write_scan(path: &Path, scan: &[ScanPoint]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["r0", "miss"]).map_err(|e| CliError::Usage(e.to_string()))?;
    for p in scan {
        let miss = p.miss.map_or_else(|| "nan".to_string(), |m| format!("{m:e}"));
        w.write_record([format!("{:e}", p.r0), miss]).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.flush().map_err(io_err(Some(path)))
}

fn read_profile(path: &Path) -> Result<ProfileCurve, CliError> {
    let reader = open(path)?;
    let curve = if path.extension().is_some_and(|e| e == "json") {
        read_profile_json(reader)
    } else {
        read_profile_csv(reader)
    };
    curve.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumConfig {
    pub profile: PathBuf,
    pub density: DensityChoice,
    #[serde(rename = "C")]
    pub c: f64,
    pub a: f64,
    pub k_max: usize,
    pub j_max: usize,
    pub zero_tol: f64,
    pub format: Format,
}

fn write_spectrum_csv(report: &SpectrumReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &report.entries {
        w.serialize(e).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn spectrum_text(report: &SpectrumReport, limit: usize) -> String {
    let mut s = format!(
        "lambda1 = {:.10} at (k = {}, j = {})\n{:>16} {:>4} {:>4} {:>5} {:>7}\n",
        report.lambda1, report.lambda1_k, report.lambda1_j, "value", "k", "j", "mult", "nodal"
    );
    for e in report.entries.iter().take(limit) {
        s.push_str(&format!("{:>16.10} {:>4} {:>4} {:>5} {:>7}\n", e.value, e.k, e.j, e.multiplicity, e.nodal_domains));
    }
    for w in &report.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn dump_eigenfunctions(dir: &Path, curve_spacing: f64, modes: &[ModeSpectrum]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(Some(dir)))?;
    for m in modes {
        let k = m.k.unwrap_or(0);
        for (j, phi) in m.eigenfunctions.iter().enumerate() {
            let path = dir.join(format!("mode_k{k}_j{j}.csv"));
            let mut w = csv::Writer::from_writer(create(&path)?);
            w.write_record(["s", "phi"]).map_err(|e| CliError::Usage(e.to_string()))?;
            for (i, v) in phi.iter().enumerate() {
                w.write_record([format!("{:e}", i as f64 * curve_spacing), format!("{v:e}")])
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            w.flush().map_err(io_err(Some(&path)))?;
        }
    }
    Ok(())
}

pub fn cmd_spectrum(
    cfg: &SpectrumConfig,
    exec: Execution,
    out: Option<&Path>,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    let curve = read_profile(&cfg.profile)?;
    let density = match cfg.density {
        DensityChoice::Gaussian => {
            if !(cfg.c < 0.0) {
                return Err(CliError::Usage(format!("C must be negative for shrinkers (got {})", cfg.c)));
            }
            RadialDensity::gaussian_at_origin(cfg.a, cfg.c)
        }
        DensityChoice::Constant => RadialDensity::constant(cfg.a),
    };
    let modes = solve_all_modes(&curve, &density, cfg.k_max, cfg.j_max, exec)?;
    let report = assemble_spectrum(&modes, cfg.zero_tol)?;
    if let Some(dir) = dump {
        dump_eigenfunctions(dir, curve.spacing(), &modes)?;
    }
    let text = match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                spectrum: &'a SpectrumReport,
                modes: &'a [ModeSpectrum],
            }
            to_json(&envelope(cfg, Body { spectrum: &report, modes: &modes }))
        }
        Format::Csv => write_spectrum_csv(&report)?,
        Format::Text => spectrum_text(&report, 20),
    };
    emit(out, &text)
}

/// Resolved configuration of a `verify` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub surface: SurfaceKind,
    #[serde(rename = "C")]
    pub c: f64,
    pub a: f64,
    pub n: usize,
    pub k_max: usize,
    pub j_max: usize,
    pub zero_tol: f64,
    pub shooter: ShooterConfig,
    pub round_torus: (f64, f64),
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Reported but not required for this surface.
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub lambda1: f64,
    pub lambda1_k: usize,
    pub lambda1_j: usize,
    pub reilly: ReillyReport,
    pub minkowski_residual: f64,
    pub coordinate_residuals: Option<CoordinateResiduals>,
    pub second_solution: SecondSolution,
    pub checks: Vec<CheckRow>,
    pub spectrum: SpectrumReport,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

fn row(name: &'static str, ok: bool, detail: String) -> CheckRow {
    CheckRow { name, status: if ok { Status::Pass } else { Status::Fail }, detail }
}

/// Ladder index pattern of the `k = 0` nodal counts: `1, 2, 2, 4, 4, …`.
pub fn sturm_pattern(j: usize) -> usize {
    if j == 0 {
        1
    } else {
        2 * j.div_ceil(2)
    }
}

pub fn run_verify(cfg: &RunConfig, exec: Execution) -> Result<VerifyReport, CliError> {
    let (curve, density, is_shrinker) = match cfg.surface {
        SurfaceKind::ShotTorus => {
            let shot = shoot_torus(&cfg.shooter, cfg.n)?;
            (shot.curve, RadialDensity::gaussian_at_origin(cfg.a, cfg.c), true)
        }
        SurfaceKind::RoundTorus => {
            let (r0, r) = cfg.round_torus;
            (ProfileCurve::round_torus(r0, r, cfg.n)?, RadialDensity::constant(cfg.a), false)
        }
    };
    let modes = solve_all_modes(&curve, &density, cfg.k_max, cfg.j_max, exec)?;
    let spectrum = assemble_spectrum(&modes, cfg.zero_tol)?;
    let opts = EqualityOptions::default();
    let reilly = verify_equality_case(&curve, &density, &spectrum, &opts)?;
    let center = reilly.diagnostics.center;
    let minkowski_residual = minkowski_identity_residual(&curve, &density, &center)?;
    let lambda1 = spectrum.lambda1;
    let mut checks = Vec::new();

    checks.push(row(
        "Reilly inequality",
        reilly.inequality_holds,
        format!("lambda1 = {:.8} <= bound = {:.8}", lambda1, reilly.bound),
    ));
    if is_shrinker {
        let target = -cfg.c;
        let ok = reilly.equality && (lambda1 - target).abs() <= 1e-3 * target;
        checks.push(row(
            "equality lambda1 = -C",
            ok,
            format!("lambda1 = {:.8}, -C = {}, gap = {:.2e}", lambda1, target, reilly.relative_gap),
        ));
        let eps = 1e-3 * cfg.c.abs();
        checks.push(row(
            "lambda1 sandwich",
            lambda1 >= target / 2.0 - eps && lambda1 <= target + eps,
            format!("{:.8} in [{}, {}]", lambda1, target / 2.0, target),
        ));
    } else {
        checks.push(CheckRow {
            name: "equality lambda1 = -C",
            status: Status::Info,
            detail: format!("equality flag {} (gap {:.4})", reilly.equality, reilly.relative_gap),
        });
    }
    checks.push(row("Minkowski identity", minkowski_residual < 1e-6, format!("residual {minkowski_residual:.2e}")));

    let coordinate_residuals = if is_shrinker {
        let res = verify_coordinate_eigenfunctions(&curve, &density)?;
        checks.push(row(
            "coordinate eigenfunctions",
            res.rho_residual < 1e-3 && res.z_residual < 1e-3,
            format!("rho {:.2e}, z {:.2e}", res.rho_residual, res.z_residual),
        ));
        Some(res)
    } else {
        None
    };

    let k0 = &modes[0];
    let realizers = spectrum.lambda1_realizers(1e-3);
    let ladder_ok = k0.nodal_counts.iter().enumerate().all(|(j, &c)| c == sturm_pattern(j));
    let nodal_ok = k0.nodal_counts[0] == 1 && ladder_ok && realizers.iter().all(|e| e.nodal_domains == 2);
    checks.push(row(
        "nodal domains",
        nodal_ok,
        format!(
            "ground 1, lambda1 realizers {:?}, k=0 ladder {:?}",
            realizers.iter().map(|e| (e.k, e.j, e.nodal_domains)).collect::<Vec<_>>(),
            k0.nodal_counts
        ),
    ));

    // The k = 0 eigenfunction carrying the z-coordinate (the larger overlap among j = 1, 2).
    let op0 = SturmOperator::build(&curve, &density, 0)?;
    let overlap = |j: usize| op0.inner(&k0.eigenfunctions[j], curve.z()).abs();
    let jz = if k0.len() > 2 && overlap(2) > overlap(1) { 2 } else { 1 };
    let mu = k0.eigenvalues[jz];
    let second_solution = second_solution_check(&op0, mu, &k0.eigenfunctions[jz])?;
    let partner = if jz == 1 { k0.eigenvalues.get(2) } else { k0.eigenvalues.get(1) };
    let degenerate = partner.is_some_and(|m| (m - mu).abs() <= 1e-3 * mu);
    checks.push(row(
        "second solution Wronskian",
        second_solution.wronskian_drift < 1e-6,
        format!("drift {:.2e}", second_solution.wronskian_drift),
    ));
    let periodic = second_solution.periodicity_defect() < 1e-3;
    checks.push(CheckRow {
        name: "second solution periodicity",
        status: match (degenerate, periodic) {
            (true, true) => Status::Pass,
            (true, false) => Status::Fail,
            (false, _) => Status::Info,
        },
        detail: format!(
            "j = {jz}, mu = {:.8}, {} pair; |zeta(L)-1| = {:.2e}, |zeta'(L)| = {:.2e}",
            mu,
            if degenerate { "degenerate" } else { "simple" },
            second_solution.zeta_defect,
            second_solution.zeta_prime_defect
        ),
    });

    Ok(VerifyReport {
        lambda1,
        lambda1_k: spectrum.lambda1_k,
        lambda1_j: spectrum.lambda1_j,
        reilly,
        minkowski_residual,
        coordinate_residuals,
        second_solution,
        checks,
        spectrum,
    })
}

fn verify_text(report: &VerifyReport) -> String {
    let mut s = format!(
        "lambda1 = {:.10} at (k = {}, j = {}), bound = {:.10}\n",
        report.lambda1, report.lambda1_k, report.lambda1_j, report.reilly.bound
    );
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        };
        s.push_str(&format!("{tag}  {:<30} {}\n", c.name, c.detail));
    }
    s
}

pub fn cmd_verify(cfg: &RunConfig, exec: Execution, out: Option<&Path>) -> Result<(), CliError> {
    let report = run_verify(cfg, exec)?;
    let json = to_json(&envelope(cfg, &report));
    if let Some(path) = out {
        emit(Some(path), &json)?;
    }
    match cfg.format {
        Format::Json => emit(None, &json)?,
        Format::Text | Format::Csv => emit(None, &verify_text(&report))?,
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

#[derive(Debug, Serialize)]
struct SphereCheckReport {
    bound: f64,
    lambda1: f64,
    lambda1_numeric: Option<f64>,
    equality_defect: f64,
    equality: bool,
}

pub fn cmd_sphere_check(big_r: f64, r: f64, dim: usize, nodes: usize, format: Format) -> Result<(), CliError> {
    let b = sphere_ambient_bound(dim, big_r, &SphereSubmanifold::LatitudeParallel { r })?;
    let lambda1 = b.lambda1.expect("parallels carry a closed-form eigenvalue");
    let lambda1_numeric =
        if dim == 1 { Some(circle_lambda1_numeric(std::f64::consts::TAU * r, nodes)?) } else { None };
    let mut defect = (b.bound - lambda1).abs();
    if let Some(l) = lambda1_numeric {
        defect = defect.max((b.bound - l).abs());
    }
    let report =
        SphereCheckReport { bound: b.bound, lambda1, lambda1_numeric, equality_defect: defect, equality: defect < 1e-10 };
    #[derive(Serialize)]
    struct SphereConfig {
        #[serde(rename = "R")]
        big_r: f64,
        r: f64,
        dim: usize,
        nodes: usize,
    }
    let text = match format {
        Format::Json => to_json(&envelope(&SphereConfig { big_r, r, dim, nodes }, &report)),
        _ => format!(
            "bound = {:.12}\nlambda1 = {:.12}{}\nequality: {} (defect {:.2e})\n",
            report.bound,
            report.lambda1,
            lambda1_numeric.map_or(String::new(), |l| format!(" (numeric {l:.12})")),
            if report.equality { "PASS" } else { "FAIL" },
            defect
        ),
    };
    emit(None, &text)?;
    if report.equality {
        Ok(())
    } else {
        Err(CliError::Verification(format!("bound and lambda1 differ by {defect:e}")))
    }
}

#[derive(Debug, serde::Deserialize)]
struct TableRow {
    s: f64,
    p: f64,
    q: f64,
}

pub fn cmd_sl_solve(
    table: &Path,
    j_max: usize,
    period: Option<f64>,
    format: Format,
    exec: Execution,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(table)?);
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<TableRow>().enumerate() {
        rows.push(rec.map_err(|e| CliError::Usage(format!("{}: row {}: {e}", table.display(), i + 1)))?);
    }
    if rows.len() < 3 {
        return Err(CliError::Usage(format!("{}: need at least 3 rows", table.display())));
    }
    let n = rows.len();
    let h = rows[1].s - rows[0].s;
    for (i, w) in rows.windows(2).enumerate() {
        if ((w[1].s - w[0].s) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(CliError::Usage(format!("{}: s column not uniform at row {}", table.display(), i + 2)));
        }
    }
    let period = period.unwrap_or(h * n as f64);
    let op = SturmOperator::from_tables(rows.iter().map(|r| r.p).collect(), rows.iter().map(|r| r.q).collect(), period)?;
    let ms = solve_modes(&op, j_max, exec)?;
    #[derive(Serialize)]
    struct SlConfig<'a> {
        table: &'a Path,
        j_max: usize,
        period: f64,
        nodes: usize,
    }
    let text = match format {
        Format::Json => to_json(&envelope(&SlConfig { table, j_max, period, nodes: n }, &ms)),
        Format::Csv => {
            let mut s = String::from("j,eigenvalue,nodal_domains\n");
            for (j, (v, c)) in ms.eigenvalues.iter().zip(&ms.nodal_counts).enumerate() {
                s.push_str(&format!("{j},{v:e},{c}\n"));
            }
            s
        }
        Format::Text => ms.eigenvalues.iter().enumerate().map(|(j, v)| format!("{j:>4} {v:.12}\n")).collect(),
    };
    emit(out, &text)
}
