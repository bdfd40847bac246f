//! Command-line front end: plot-ready spectra, moment reports, trajectory
//! dumps, asymptote fits and cross sections for hydrogen dipole noise.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dipole_noise::bohm::{sample_qeh, trajectory, RngStreamSpec};
use dipole_noise::error::Error as LibError;
use dipole_noise::export::{
    lines_csv, lines_json, report_json, spectrum_csv, spectrum_json, Metadata,
};
use dipole_noise::hydrogen::HydrogenState;
use dipole_noise::observables::{
    compare_theories, cross_section, fit_asymptote, AsymptoteFit, ALPHA_QED,
};
use dipole_noise::qm::{line_spectrum, moment_qm, tail_coeff_qm};
use dipole_noise::sqm::{moment_sqm, spectral_mc, Moment, SpectralFunction};
use dipole_noise::QuadSpec;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const UNITS_SPECTRUM: &str = "e2a02_per_omega0";

#[derive(Parser)]
#[command(
    name = "dipole-noise",
    version,
    about = "Hydrogen dipole noise spectra: trajectory vs conventional quantum mechanics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noise spectral function of one state on a frequency grid
    Spectrum(SpectrumArgs),
    /// Moment sum rules and theory comparison for one state
    Moments(MomentsArgs),
    /// Discrete bound-bound line spectrum of the conventional theory
    Lines(LinesArgs),
    /// Bohmian trajectory sample in Cartesian coordinates
    Trajectories(TrajArgs),
    /// Power-law tail: fitted (trajectory theory) or modeled (conventional)
    Asymptote(AsymptoteArgs),
    /// Total absorption cross-section 8 pi^2 alpha omega S(omega)
    CrossSection(CrossSectionArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Closed Bessel-K forms
    Closed,
    /// General integral representation by adaptive quadrature
    Quad,
    /// Monte Carlo histogram over a quantum-equilibrium ensemble
    Mc,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Closed => write!(f, "closed"),
            Method::Quad => write!(f, "quad"),
            Method::Mc => write!(f, "mc"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Theory {
    Sqm,
    Qm,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SpectrumArgs {
    /// State as n,l,m
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    /// Grid minimum (omega0 units)
    #[arg(long, default_value_t = 1e-2)]
    omega_min: f64,
    /// Grid maximum (omega0 units)
    #[arg(long, default_value_t = 1e2)]
    omega_max: f64,
    /// Grid size; for --method mc these are bin edges (points-1 bins)
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Logarithmic grid spacing
    #[arg(long, default_value_t = true)]
    log_spacing: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ensemble size for --method mc
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Relative tolerance for --method quad
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Subdivision budget for --method quad
    #[arg(long, default_value_t = 2000)]
    max_subdivisions: usize,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    #[arg(long, value_enum, default_value_t = Theory::Both)]
    theory: Theory,
    /// Report a single moment order instead of the full comparison
    #[arg(long)]
    moment_k: Option<u32>,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct LinesArgs {
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    /// Bound-state truncation of the transition sum
    #[arg(long, default_value_t = 20)]
    n_max: u32,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct TrajArgs {
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.5)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct AsymptoteArgs {
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    #[arg(long, value_enum)]
    theory: Theory,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CrossSectionArgs {
    #[arg(long, value_parser = parse_state)]
    state: HydrogenState,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    #[arg(long)]
    omega: f64,
    /// Fine-structure constant
    #[arg(long, default_value_t = ALPHA_QED)]
    alpha: f64,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

fn parse_state(s: &str) -> Result<HydrogenState, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected n,l,m".into());
    }
    let n: u32 = parts[0].trim().parse().map_err(|_| "bad n")?;
    let l: u32 = parts[1].trim().parse().map_err(|_| "bad l")?;
    let m: i32 = parts[2].trim().parse().map_err(|_| "bad m")?;
    HydrogenState::new(n, l, m).map_err(|e| e.to_string())
}

/// Errors sorted into the exit-code contract.
enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Quadrature { .. } | LibError::InsufficientCoverage(_) => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("write failed: {e}"))
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Lines(a) => cmd_lines(a),
        Command::Trajectories(a) => cmd_trajectories(a),
        Command::Asymptote(a) => cmd_asymptote(a),
        Command::CrossSection(a) => cmd_cross_section(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn open_output(path: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn grid(lo: f64, hi: f64, points: usize, log_spacing: bool) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage("need at least 2 grid points".into()));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Usage("need 0 < omega_min < omega_max".into()));
    }
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            if log_spacing {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect())
}

fn base_meta(state: &HydrogenState) -> Metadata {
    let mut meta = Metadata::new();
    meta.push(
        "state",
        format!("{},{},{}", state.n(), state.l(), state.m()),
    );
    meta.push("version", VERSION);
    meta
}

fn cmd_spectrum(a: SpectrumArgs) -> CliResult {
    let mut meta = base_meta(&a.state);
    meta.push("units", UNITS_SPECTRUM);

    let sf = if a.state.m() == 0 {
        meta.push("method", "delta");
        SpectralFunction::delta_only(&a.state)?
    } else {
        // S(n,l,-m) = S(n,l,m): evaluate through the positive-m builder
        let st = HydrogenState::new(a.state.n(), a.state.l(), a.state.m_abs() as i32)
            .expect("reflected state is valid");
        meta.push("method", a.method.to_string());
        let grid = grid(a.omega_min, a.omega_max, a.points, a.log_spacing)?;
        match a.method {
            Method::Closed => SpectralFunction::closed_form(&st, &grid)?,
            Method::Quad => {
                if a.rel_tol <= 0.0 || !a.rel_tol.is_finite() || a.max_subdivisions < 1 {
                    return Err(CliError::Usage(
                        "need rel_tol > 0 and max_subdivisions >= 1".into(),
                    ));
                }
                let quad = QuadSpec::new(a.rel_tol, 1e-14, a.max_subdivisions);
                SpectralFunction::general(&st, &grid, &quad)?
            }
            Method::Mc => {
                if a.samples < 1 {
                    return Err(CliError::Usage("--samples must be >= 1".into()));
                }
                meta.push("seed", a.seed);
                meta.push("samples", a.samples);
                let ens = sample_qeh(&st, a.samples, RngStreamSpec::new(a.seed));
                spectral_mc(&st, &grid, &ens)?
            }
        }
    };
    let mut out = open_output(&a.output)?;
    match a.format {
        Format::Csv => spectrum_csv(&sf, &meta, &mut out)?,
        Format::Json => spectrum_json(&sf, &meta, &mut out)?,
    }
    Ok(())
}

/// The single-moment report of `moments --moment-k`.
#[derive(serde::Serialize)]
struct SingleMomentReport {
    k: u32,
    sqm: Option<Moment>,
    qm: Option<f64>,
    note: Option<&'static str>,
}

fn cmd_moments(a: MomentsArgs) -> CliResult {
    let mut meta = base_meta(&a.state);
    meta.push("units_gamma0", "e2a02");
    meta.push("units_gamma2", "e4_per_mu_a0");
    let mut out = open_output(&a.output)?;

    if let Some(k) = a.moment_k {
        let report = if k % 2 == 1 {
            SingleMomentReport {
                k,
                sqm: Some(Moment::Value(0.0)),
                qm: Some(0.0),
                note: Some("odd moments vanish: S(omega) is even in omega"),
            }
        } else {
            let sqm = match a.theory {
                Theory::Qm => None,
                _ => Some(moment_sqm(&a.state, k)?),
            };
            let qm = match a.theory {
                Theory::Sqm => None,
                _ => Some(moment_qm(&a.state, k)?),
            };
            SingleMomentReport {
                k,
                sqm,
                qm,
                note: None,
            }
        };
        match a.format {
            Format::Json => report_json(&report, &meta, &mut out)?,
            Format::Csv => {
                meta.write_csv_prologue(&mut out)?;
                writeln!(out, "key,value")?;
                writeln!(out, "k,{}", report.k)?;
                match report.sqm {
                    Some(Moment::Value(v)) => writeln!(out, "sqm,{v}")?,
                    Some(Moment::Divergent) => writeln!(out, "sqm,divergent")?,
                    None => {}
                }
                if let Some(v) = report.qm {
                    writeln!(out, "qm,{v}")?;
                }
                if let Some(note) = report.note {
                    writeln!(out, "note,{note}")?;
                }
            }
        }
        return Ok(());
    }

    let cmp = compare_theories(&a.state, 20, &QuadSpec::default())?;
    match a.format {
        Format::Json => report_json(&cmp, &meta, &mut out)?,
        Format::Csv => {
            meta.write_csv_prologue(&mut out)?;
            writeln!(out, "key,value")?;
            writeln!(out, "gamma0,{}", cmp.report.gamma0)?;
            match cmp.report.gamma2_sqm {
                Moment::Value(v) => writeln!(out, "gamma2_sqm,{v}")?,
                Moment::Divergent => writeln!(out, "gamma2_sqm,divergent")?,
            }
            writeln!(out, "gamma2_qm,{}", cmp.report.gamma2_qm)?;
            writeln!(out, "gamma2_qm_numeric,{}", cmp.report.gamma2_qm_numeric)?;
            writeln!(out, "sqm_exponent,{}", cmp.sqm_exponent)?;
            writeln!(out, "qm_exponent,{}", cmp.qm_exponent)?;
            if let Some(semi) = cmp.semiclassical {
                writeln!(out, "semiclassical_ratio,{}", semi.ratio_qm_over_sqm)?;
            }
        }
    }
    Ok(())
}

fn cmd_lines(a: LinesArgs) -> CliResult {
    let ls = line_spectrum(&a.state, a.n_max)?;
    let mut meta = base_meta(&a.state);
    meta.push("n_max", a.n_max);
    meta.push("units", "e2a02");
    let mut out = open_output(&a.output)?;
    match a.format {
        Format::Csv => lines_csv(&ls, &meta, &mut out)?,
        Format::Json => lines_json(&ls, &meta, &mut out)?,
    }
    Ok(())
}

fn cmd_trajectories(a: TrajArgs) -> CliResult {
    if a.dt <= 0.0 || a.t_max < 0.0 || a.count < 1 {
        return Err(CliError::Usage(
            "need count >= 1, dt > 0 and t_max >= 0".into(),
        ));
    }
    let ens = sample_qeh(&a.state, a.count, RngStreamSpec::new(a.seed));
    let mut meta = base_meta(&a.state);
    meta.push("seed", a.seed);
    meta.push("count", a.count);
    meta.push("units", "a0_and_inverse_omega0");
    let mut out = open_output(&a.output)?;
    meta.write_csv_prologue(&mut out)?;
    writeln!(out, "id,t,x,y,z")?;
    let steps = (a.t_max / a.dt).floor() as usize;
    for (id, ic) in ens.points.iter().enumerate() {
        for j in 0..=steps {
            let t = j as f64 * a.dt;
            let (r, theta, phi) = trajectory(&a.state, ic, t)?;
            let (st, ct) = (theta.sin(), theta.cos());
            let (x, y, z) = (r * st * phi.cos(), r * st * phi.sin(), r * ct);
            writeln!(out, "{id},{t},{x},{y},{z}")?;
        }
    }
    Ok(())
}

/// Asymptote report: fitted for the trajectory theory, tail model for the
/// conventional theory.
#[derive(serde::Serialize)]
struct AsymptoteReport {
    theory: &'static str,
    exponent: f64,
    coefficient: f64,
    fit: Option<AsymptoteFit>,
}

fn cmd_asymptote(a: AsymptoteArgs) -> CliResult {
    let mut out = open_output(&a.output)?;
    let meta = base_meta(&a.state);
    let mut reports = Vec::new();
    if matches!(a.theory, Theory::Sqm | Theory::Both) {
        if a.state.m() == 0 {
            return Err(CliError::Usage(
                "m = 0 trajectory spectra are a delta line; no power-law tail to fit".into(),
            ));
        }
        let window = (1e3f64, 1e5f64);
        let grid: Vec<f64> = (0..50)
            .map(|i| window.0 * (window.1 / window.0).powf(i as f64 / 49.0))
            .collect();
        let st_abs = HydrogenState::new(a.state.n(), a.state.l(), a.state.m_abs() as i32)?;
        let sf = match SpectralFunction::closed_form(&st_abs, &grid) {
            Ok(sf) => sf,
            Err(LibError::UnsupportedState(_)) => {
                SpectralFunction::general(&st_abs, &grid, &QuadSpec::default())?
            }
            Err(e) => return Err(e.into()),
        };
        let fit = fit_asymptote(&sf, window)?;
        reports.push(AsymptoteReport {
            theory: "sqm",
            exponent: fit.fitted_exponent,
            coefficient: fit.fitted_coefficient,
            fit: Some(fit),
        });
    }
    if matches!(a.theory, Theory::Qm | Theory::Both) {
        let (coeff, exp) = tail_coeff_qm(&a.state)?;
        reports.push(AsymptoteReport {
            theory: "qm",
            exponent: -exp,
            coefficient: coeff,
            fit: None,
        });
    }
    report_json(&reports, &meta, &mut out)?;
    Ok(())
}

fn cmd_cross_section(a: CrossSectionArgs) -> CliResult {
    if a.omega < 0.0 {
        return Err(CliError::Usage("--omega must be >= 0".into()));
    }
    let s_value = if a.state.m() == 0 {
        if a.omega == 0.0 {
            return Err(CliError::Usage(
                "m = 0 spectra are a delta line at omega = 0; the continuous part is zero".into(),
            ));
        }
        0.0
    } else {
        let st_abs = HydrogenState::new(a.state.n(), a.state.l(), a.state.m_abs() as i32)?;
        match a.method {
            Method::Closed => dipole_noise::sqm::spectral_closed(&st_abs, a.omega)?,
            Method::Quad => {
                dipole_noise::sqm::spectral_general(&st_abs, a.omega, &QuadSpec::default())?
            }
            Method::Mc => {
                return Err(CliError::Usage(
                    "cross-section needs a deterministic method (closed or quad)".into(),
                ))
            }
        }
    };
    let sigma = cross_section(s_value, a.omega, a.alpha);
    let mut out = open_output(&a.output)?;
    let mut meta = base_meta(&a.state);
    meta.push("alpha", a.alpha);
    meta.push("units", "a0^2");
    #[derive(serde::Serialize)]
    struct CrossSectionReport {
        omega: f64,
        spectral_value: f64,
        sigma: f64,
    }
    report_json(
        &CrossSectionReport {
            omega: a.omega,
            spectral_value: s_value,
            sigma,
        },
        &meta,
        &mut out,
    )?;
    Ok(())
}
