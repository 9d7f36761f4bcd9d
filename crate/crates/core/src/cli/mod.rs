//! Command-line front end.
//!
//! Every run is described by a [`RunConfig`]; [`execute`] turns it into the
//! output bytes, so identical flags always give identical bytes.

mod tokens;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use tokens::{parse_lattice, parse_list, parse_real, parse_real_list, parse_spin, RealList};

use crate::degeneration::{
    format_sig17, geometric_range, neck_sweep, stretch_family, theorem1_schedule, trend,
    write_family_csv, FamilyPoint, ModelMetric, Trend,
};
use crate::error::{Error, Result};
use crate::exact_spectra::{sphere_spectrum, torus_spectrum, Lattice2, SpinStructure2};
use crate::inequality_audit::{
    ammann_report, baer_check_with_tol, corollary1_demo, liyau_floor_report,
    liyau_laplace_report, AuditReport, DEFAULT_REL_TOL,
};
use crate::rayleigh_certifier::{certify_bulb_plateau, Certificate};
use crate::warped_dirac::{default_kmax, warped_spectrum, WarpProfile, WarpShape};

/// Version of every JSON document written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Default directory for output files when `--output` is relative or absent.
pub const OUTPUT_DIR_ENV: &str = "DIRAC_SPECTRA_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Dirac spectra of flat tori, spheres and warped tori; collapse families,
/// residual certificates and inequality audits.
#[derive(Debug, Clone, Parser)]
#[command(name = "dirac-spectra", version)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout if absent (relative paths resolve against
    /// $DIRAC_SPECTRA_OUTPUT_DIR when set).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Relative slack for audit verdicts.
    #[arg(long, global = true, value_parser = parse_real, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Spectra of D².
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Degenerating families and the collapse schedule.
    #[command(subcommand)]
    Degenerate(DegenerateCmd),
    /// Residual certificate for a plateau eigenvalue of a bulb dumbbell.
    Certify(CertifyArgs),
    /// Inequality evaluators and checks.
    #[command(subcommand)]
    Audit(AuditCmd),
}

#[derive(Debug, Clone, Subcommand)]
pub enum SpectrumCmd {
    /// Flat torus.
    Torus {
        #[arg(long, value_parser = parse_lattice, allow_hyphen_values = true)]
        lattice: [f64; 4],
        #[arg(long, value_parser = parse_spin, default_value = "0,0")]
        spin: SpinStructure2,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        cutoff: f64,
    },
    /// Round sphere.
    Sphere {
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 0)]
        kmax: u32,
    },
    /// Warped torus from a profile file.
    Warped {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_parser = parse_spin, default_value = "0,0")]
        spin: SpinStructure2,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        /// θ-mode cutoff; chosen from --window when absent.
        #[arg(long)]
        kmax: Option<usize>,
        /// Spectral window for the automatic mode cutoff.
        #[arg(long, value_parser = parse_real, default_value = "100")]
        window: f64,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum DegenerateCmd {
    /// Stretched tori, geometrically spaced parameters.
    Stretch {
        #[arg(long, value_parser = parse_spin, default_value = "0,0")]
        spin: SpinStructure2,
        #[arg(long, value_parser = parse_real)]
        a_start: f64,
        #[arg(long, value_parser = parse_real)]
        a_end: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Neck-radius sweep of a dumbbell profile.
    Neck {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_parser = parse_real_list)]
        radii: RealList,
        #[arg(long, value_parser = parse_spin, default_value = "0,1")]
        spin: SpinStructure2,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        kmax: usize,
    },
    /// Collapse schedule for one p.
    Schedule {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, value_parser = parse_spin, default_value = "0,0")]
        spin: SpinStructure2,
        #[arg(long, value_parser = parse_real, default_value = "0")]
        base_volume: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub delta: f64,
    /// Plateau eigenvalue ±1/c of one of the bulbs.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub target: f64,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, value_parser = parse_spin, default_value = "0,1")]
    pub spin: SpinStructure2,
}

#[derive(Debug, Clone, Subcommand)]
pub enum AuditCmd {
    /// λ₁(D²)·Area ≥ 4π.
    Baer {
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_parser = parse_real)]
        area: f64,
    },
    /// (n²/4)·Vol(Sⁿ)^{2/n}.
    Ammann {
        #[arg(long)]
        dim: u32,
    },
    /// Witnesses against λ₁⁺·Area ≥ c·V_c on stretched tori.
    Corollary1 {
        #[arg(long, value_parser = parse_spin, default_value = "0,0")]
        spin: SpinStructure2,
        #[arg(long, value_parser = parse_real_list)]
        c_list: RealList,
        #[arg(long, value_parser = parse_real, default_value = "2")]
        a_min: f64,
        #[arg(long, value_parser = parse_real)]
        a_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Vol(Sⁿ).
    LiyauFloor {
        #[arg(long)]
        dim: u32,
    },
    /// n·V_c^{2/n}.
    LiyauLaplace {
        #[arg(long)]
        dim: u32,
        #[arg(long, value_parser = parse_real)]
        vc: f64,
    },
}

impl RunConfig {
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(args)
    }

    /// Short name used for default output file names.
    pub fn command_name(&self) -> &'static str {
        match &self.command {
            Command::Spectrum(SpectrumCmd::Torus { .. }) => "spectrum-torus",
            Command::Spectrum(SpectrumCmd::Sphere { .. }) => "spectrum-sphere",
            Command::Spectrum(SpectrumCmd::Warped { .. }) => "spectrum-warped",
            Command::Degenerate(DegenerateCmd::Stretch { .. }) => "degenerate-stretch",
            Command::Degenerate(DegenerateCmd::Neck { .. }) => "degenerate-neck",
            Command::Degenerate(DegenerateCmd::Schedule { .. }) => "degenerate-schedule",
            Command::Certify(_) => "certify",
            Command::Audit(AuditCmd::Baer { .. }) => "audit-baer",
            Command::Audit(AuditCmd::Ammann { .. }) => "audit-ammann",
            Command::Audit(AuditCmd::Corollary1 { .. }) => "audit-corollary1",
            Command::Audit(AuditCmd::LiyauFloor { .. }) => "audit-liyau-floor",
            Command::Audit(AuditCmd::LiyauLaplace { .. }) => "audit-liyau-laplace",
        }
    }

    /// Where the output goes: `None` means stdout.
    pub fn output_path(&self, env_dir: Option<&Path>) -> Option<PathBuf> {
        match (&self.output, env_dir) {
            (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
            (Some(p), _) => Some(p.clone()),
            (None, Some(d)) => {
                Some(d.join(format!("{}.{}", self.command_name(), self.format.extension())))
            }
            (None, None) => None,
        }
    }
}

/// Result of [`execute`]: the document and an optional one-line summary for stderr.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub bytes: Vec<u8>,
    pub summary: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(kind: &str, body: T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        body,
    })?;
    out.push(b'\n');
    Ok(out)
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig17).unwrap_or_default()
}

fn read_profile(path: &Path) -> Result<WarpProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::invalid(format!("cannot read profile {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("bad profile {}: {e}", path.display())))
}

/// Runs the command and renders its output.
pub fn execute(cfg: &RunConfig) -> Result<Rendered> {
    let fmt = cfg.format;
    let mut summary = None;
    let bytes = match &cfg.command {
        Command::Spectrum(SpectrumCmd::Torus { lattice, spin, cutoff }) => {
            let lat = Lattice2::new([lattice[0], lattice[1]], [lattice[2], lattice[3]])?;
            let slice = torus_spectrum(&lat, *spin, *cutoff)?;
            match fmt {
                Format::Json => json("torus_spectrum", &slice)?,
                Format::Csv => csv_rows(
                    &["value", "multiplicity"],
                    slice
                        .entries
                        .iter()
                        .map(|e| vec![format_sig17(e.value), e.multiplicity.to_string()]),
                )?,
            }
        }
        Command::Spectrum(SpectrumCmd::Sphere { dim, kmax }) => {
            let s = sphere_spectrum(*dim, *kmax)?;
            match fmt {
                Format::Json => json("sphere_spectrum", &s)?,
                Format::Csv => csv_rows(
                    &["k", "d2_value", "multiplicity", "d2_multiplicity"],
                    s.levels.iter().map(|l| {
                        vec![
                            l.k.to_string(),
                            format_sig17(l.d2_value),
                            l.multiplicity.to_string(),
                            l.d2_multiplicity.to_string(),
                        ]
                    }),
                )?,
            }
        }
        Command::Spectrum(SpectrumCmd::Warped { profile, spin, grid, kmax, window }) => {
            let p = read_profile(profile)?;
            if !(*window > 0.0) {
                return Err(Error::invalid("window must be positive"));
            }
            let k = kmax.unwrap_or_else(|| default_kmax(&p, *spin, *window));
            let r = warped_spectrum(&p, *spin, *grid, k)?;
            #[derive(Serialize)]
            struct Body<'a> {
                profile: &'a WarpProfile,
                lambda1_plus: Option<f64>,
                kernel_dim: usize,
                #[serde(flatten)]
                result: &'a crate::warped_dirac::EigenResult,
            }
            match fmt {
                Format::Json => json(
                    "warped_spectrum",
                    Body {
                        profile: &p,
                        lambda1_plus: r.lambda1_plus(),
                        kernel_dim: r.kernel_dim(),
                        result: &r,
                    },
                )?,
                Format::Csv => csv_rows(
                    &["d2_value", "nu", "index", "residual"],
                    r.d2_values.iter().zip(&r.provenance).zip(&r.residuals).map(
                        |((v, m), res)| {
                            vec![
                                format_sig17(*v),
                                format_sig17(m.nu),
                                m.index.to_string(),
                                format_sig17(*res),
                            ]
                        },
                    ),
                )?,
            }
        }
        Command::Degenerate(DegenerateCmd::Stretch { spin, a_start, a_end, steps }) => {
            let a = geometric_range(*a_start, *a_end, *steps)?;
            let fam = stretch_family(*spin, &a)?;
            let t = product_trend(&fam);
            summary = Some(format!("product trend: {}", trend_name(t)));
            family_output(fmt, "stretch_family", &fam, t, spin)?
        }
        Command::Degenerate(DegenerateCmd::Neck { profile, radii, spin, grid, kmax }) => {
            let p = read_profile(profile)?;
            let sweep = neck_sweep(&p, &radii.0, *spin, *grid, *kmax)?;
            summary = Some(format!(
                "lambda1_plus trend as the neck shrinks: {}",
                trend_name(sweep.lambda1_trend)
            ));
            match fmt {
                Format::Json => json("neck_sweep", &sweep)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_family_csv(&sweep.family(), &mut buf)?;
                    buf
                }
            }
        }
        Command::Degenerate(DegenerateCmd::Schedule { p, dim, spin, base_volume }) => {
            let s = theorem1_schedule(*p, *base_volume, *dim, *spin)?;
            match fmt {
                Format::Json => json("theorem1_schedule", &s)?,
                Format::Csv => {
                    let a = match &s.model_metric {
                        ModelMetric::Torus { a, .. } => Some(*a),
                        ModelMetric::Symbolic { .. } => None,
                    };
                    csv_rows(
                        &["p", "dim", "a_p", "L", "epsilon", "eta", "interval_lo", "interval_hi", "volume_bound"],
                        [vec![
                            s.p.to_string(),
                            s.dim.to_string(),
                            opt(a),
                            format_sig17(s.l),
                            format_sig17(s.epsilon),
                            opt(s.eta),
                            format_sig17(s.interval[0]),
                            format_sig17(s.interval[1]),
                            format_sig17(s.volume_bound),
                        ]],
                    )?
                }
            }
        }
        Command::Certify(args) => {
            let cert = run_certify(args)?;
            summary = Some(format!(
                "eigenvalue within {} of {}: {}",
                cert.residual,
                cert.lambda,
                if cert.sound { "confirmed" } else { "NOT confirmed" }
            ));
            match fmt {
                Format::Json => json("certificate", &cert)?,
                Format::Csv => csv_rows(
                    &["lambda", "residual", "delta", "energy_bound", "nearest_eigenvalue", "sound"],
                    [vec![
                        format_sig17(cert.lambda),
                        format_sig17(cert.residual),
                        opt(cert.delta),
                        opt(cert.energy_bound),
                        format_sig17(cert.nearest_eigenvalue),
                        cert.sound.to_string(),
                    ]],
                )?,
            }
        }
        Command::Audit(a) => {
            let reports = run_audit(a, cfg.rel_tol)?;
            match fmt {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Body<'a> {
                        reports: &'a [AuditReport],
                    }
                    json("audit", Body { reports: &reports })?
                }
                Format::Csv => csv_rows(
                    &["check", "lhs", "relation", "rhs", "verdict", "witness", "note", "warning"],
                    reports.iter().map(|r| {
                        vec![
                            r.check.clone(),
                            format_sig17(r.lhs),
                            serde_plain(&r.relation),
                            format_sig17(r.rhs),
                            serde_plain(&r.verdict),
                            opt(r.witness),
                            r.note.clone().unwrap_or_default(),
                            r.warning.clone().unwrap_or_default(),
                        ]
                    }),
                )?,
            }
        }
    };
    Ok(Rendered { bytes, summary })
}

fn serde_plain<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn trend_name(t: Trend) -> String {
    serde_plain(&t)
}

fn product_trend(fam: &[FamilyPoint]) -> Trend {
    trend(&fam.iter().map(|p| p.product).collect::<Vec<_>>(), 0.0)
}

fn family_output(
    fmt: Format,
    kind: &str,
    fam: &[FamilyPoint],
    t: Trend,
    spin: &SpinStructure2,
) -> Result<Vec<u8>> {
    match fmt {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                spin: &'a SpinStructure2,
                points: &'a [FamilyPoint],
                product_trend: Trend,
            }
            json(kind, Body { spin, points: fam, product_trend: t })
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_family_csv(fam, &mut buf)?;
            Ok(buf)
        }
    }
}

fn run_certify(args: &CertifyArgs) -> Result<Certificate> {
    let p = read_profile(&args.profile)?;
    let b = match p.shape() {
        WarpShape::BulbDumbbell(b) => *b,
        _ => return Err(Error::invalid("certify needs a bulb_dumbbell profile")),
    };
    if args.spin.eps2() != 1 {
        return Err(Error::invalid(
            "plateau spinors live in half-integer theta modes; use a spin with e2 = 1",
        ));
    }
    let mut choice = None;
    for (bulb, c) in [(0, b.c1), (1, b.c2)] {
        for positive in [true, false] {
            let lam = if positive { 1.0 / c } else { -1.0 / c };
            if (args.target - lam).abs() <= 1e-9 * lam.abs() && choice.is_none() {
                choice = Some((bulb, positive));
            }
        }
    }
    let (bulb, positive) = choice.ok_or_else(|| {
        Error::invalid(format!(
            "target {} is not a plateau eigenvalue; choose one of ±{} or ±{}",
            args.target,
            1.0 / b.c1,
            1.0 / b.c2
        ))
    })?;
    certify_bulb_plateau(&p, bulb, positive, args.delta, args.spin.eps1() == 1, args.grid, None)
}

fn run_audit(a: &AuditCmd, rel_tol: f64) -> Result<Vec<AuditReport>> {
    Ok(match a {
        AuditCmd::Baer { lambda, area } => vec![baer_check_with_tol(*lambda, *area, rel_tol)?],
        AuditCmd::Ammann { dim } => vec![ammann_report(*dim)?],
        AuditCmd::LiyauFloor { dim } => vec![liyau_floor_report(*dim)?],
        AuditCmd::LiyauLaplace { dim, vc } => vec![liyau_laplace_report(*dim, *vc)?],
        AuditCmd::Corollary1 { spin, c_list, a_min, a_max, steps } => {
            if !(*a_max > *a_min) {
                return Err(Error::invalid("a-max must exceed a-min"));
            }
            let a = geometric_range(*a_min, *a_max, *steps)?;
            corollary1_demo(*spin, &a, &c_list.0)?
        }
    })
}

/// Parses arguments, runs, writes the output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let text = e.render().to_string();
                eprintln!("{}", text.lines().next().unwrap_or("error: bad arguments"));
                return 2;
            }
            let _ = e.print();
            return 0;
        }
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match run(&cfg, env_dir.as_deref()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Executes `cfg` and writes to the resolved output location.
pub fn run(cfg: &RunConfig, env_dir: Option<&Path>) -> Result<()> {
    let out = execute(cfg)?;
    match cfg.output_path(env_dir) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, &out.bytes)?;
            if let Some(s) = &out.summary {
                eprintln!("{s}");
            }
            eprintln!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(&out.bytes)?;
            if let Some(s) = &out.summary {
                eprintln!("{s}");
            }
        }
    }
    Ok(())
}
