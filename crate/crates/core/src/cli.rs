//! Command-line front end.
//!
//! Every run prints a header echoing the resolved configuration followed by a
//! table. JSON output is `{"config": {...}, "rows": [...]}`; CSV output starts
//! with `# key=value` comment lines, then a header row and the data rows.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraint::{degeneracy, degeneracy_formula, DEFAULT_SVD_TOL};
use crate::error::Error;
use crate::gamma::GammaSet;
use crate::gas::{number_density_finite_t, number_density_t0, FiniteTOptions, GasState, Species, Spin};
use crate::mode::{energy, is_strong_field, ModeSpec};
use crate::sign::Sign;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rarita",
    version,
    about = "Spin-3/2 Landau levels and magnetized Fermi gas densities"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Seed for randomized draws.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Gauss per unit of field (mass² in natural units). Adds a `b_gauss` column.
    #[arg(long, global = true)]
    pub gauss_per_msq: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energies per (n, p_z). CSV columns: n, pz, energy, strong_field.
    Spectrum(SpectrumArgs),
    /// Constraint nullity per level over random draws of p_z in [0, 3m] and
    /// |q|B in [0.05, 0.5]m². CSV columns: n, nullity, formula, match,
    /// nullity_min, nullity_max, sigma_kept_min, sigma_dropped_max,
    /// ill_conditioned.
    Degeneracy(DegeneracyArgs),
    /// Run the self-check suites. CSV columns: name, cases, max_residual,
    /// threshold, pass. Exit code 2 if any suite fails.
    Verify(VerifyArgs),
    /// Number densities per (μ, B) for spin 3/2 and spin 1/2. CSV columns:
    /// mu, b_field, b_gauss, density_spin_three_halves, density_spin_half.
    Gas(GasArgs),
}

#[derive(Debug, Args)]
#[group(id = "field", required = true, multiple = false, args = ["qb", "b_field"])]
pub struct FieldArg {
    /// |q|B in units of m² (charge folded in).
    #[arg(long)]
    pub qb: Option<f64>,
    /// B in units of m²; combined with --charge.
    #[arg(long)]
    pub b_field: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n_max: u32,
    /// Comma-separated p_z grid; may be empty.
    #[arg(long, required = true, num_args = 0.., value_delimiter = ',', allow_negative_numbers = true)]
    pub pz: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// |q|.
    #[arg(long, default_value_t = 1.0)]
    pub charge: f64,
    #[command(flatten)]
    pub field: FieldArg,
}

#[derive(Debug, Args)]
pub struct DegeneracyArgs {
    #[arg(long)]
    pub n_max: u32,
    /// Charge sign, +1 or -1.
    #[arg(long, default_value_t = -1, allow_negative_numbers = true, value_parser = parse_sign)]
    pub eps_q: i64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub draws: u32,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Relative singular-value cut.
    #[arg(long, default_value_t = DEFAULT_SVD_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Flip the sign of one gamma matrix before running (fault injection).
    #[arg(long, hide = true)]
    pub corrupt_gamma: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GasArgs {
    /// Comma-separated chemical potentials.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub mu: Vec<f64>,
    /// Comma-separated field strengths B.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub b_field: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// |q|.
    #[arg(long, default_value_t = 1.0)]
    pub charge: f64,
    #[arg(long, default_value_t = 0.0)]
    pub temp: f64,
    /// Relative tolerance of the finite-temperature sums.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Report particle minus antiparticle density (T > 0 only).
    #[arg(long)]
    pub antiparticles: bool,
}

fn parse_sign(s: &str) -> Result<i64, String> {
    match s.trim_start_matches('+') {
        "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("expected +1 or -1, got {s}")),
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

fn from_error(e: Error) -> Outcome {
    let code = match e {
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    };
    Outcome {
        code,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    if let Some(g) = cli.gauss_per_msq {
        if !(g > 0.0 && g.is_finite()) {
            return Outcome::usage("error: --gauss-per-msq must be positive\n");
        }
    }
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum(&cli, a),
        Command::Degeneracy(a) => degeneracy_table(&cli, a),
        Command::Verify(a) => verify_report(&cli, a),
        Command::Gas(a) => gas(&cli, a),
    };
    match result {
        Ok(o) => o,
        Err(e) => from_error(e),
    }
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    config: &'a C,
    rows: &'a [R],
}

fn render<C: Serialize, R: Serialize>(format: Format, config: &C, rows: &[R]) -> Result<String, Error> {
    let io = |e: &dyn std::fmt::Display| Error::domain(format!("serialization failed: {e}"));
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Report { config, rows }).map_err(|e| io(&e))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = String::new();
            if let serde_json::Value::Object(map) = serde_json::to_value(config).map_err(|e| io(&e))? {
                for (k, v) in map {
                    let v = match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    };
                    out.push_str(&format!("# {k}={v}\n"));
                }
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| io(&e))?;
            }
            let bytes = w.into_inner().map_err(|e| io(&e))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
            Ok(out)
        }
    }
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

#[derive(Serialize)]
struct SpectrumConfig {
    command: &'static str,
    format: Format,
    n_max: u32,
    pz: Vec<f64>,
    mass: f64,
    charge: f64,
    b_field: f64,
    qb: f64,
    gauss_per_msq: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub pz: f64,
    pub energy: f64,
    pub strong_field: bool,
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<Outcome, Error> {
    let (b_field, qb) = match (a.field.qb, a.field.b_field) {
        (Some(qb), _) => (qb / a.charge, qb),
        (None, Some(b)) => (b, b * a.charge),
        (None, None) => unreachable!("clap enforces the field group"),
    };
    for pz in a.pz.iter().copied().chain([0.0]) {
        ModeSpec::new(0, Sign::Plus, Sign::Plus, a.charge, b_field, a.mass, 0.0, pz)?;
    }
    let mut rows = Vec::new();
    for n in 0..=a.n_max {
        for &pz in &a.pz {
            rows.push(SpectrumRow {
                n,
                pz,
                energy: energy(n, pz, a.mass, qb),
                strong_field: is_strong_field(n, a.mass, a.charge, b_field),
            });
        }
    }
    let config = SpectrumConfig {
        command: "spectrum",
        format: cli.format,
        n_max: a.n_max,
        pz: a.pz.clone(),
        mass: a.mass,
        charge: a.charge,
        b_field,
        qb,
        gauss_per_msq: cli.gauss_per_msq,
    };
    Ok(ok(render(cli.format, &config, &rows)?))
}

#[derive(Serialize)]
struct DegeneracyConfig {
    command: &'static str,
    format: Format,
    seed: u64,
    n_max: u32,
    eps: i64,
    eps_q: i64,
    draws: u32,
    mass: f64,
    pz_range: [f64; 2],
    qb_range: [f64; 2],
    tol: f64,
}

#[derive(Debug, Serialize)]
pub struct DegeneracyRow {
    pub n: u32,
    /// Most frequent nullity over the well-conditioned draws.
    pub nullity: Option<usize>,
    pub formula: u32,
    /// Every draw was well conditioned and equal to the formula.
    #[serde(rename = "match")]
    pub matches: bool,
    pub nullity_min: Option<usize>,
    pub nullity_max: Option<usize>,
    /// Smallest singular value kept in the rank, over all draws.
    pub sigma_kept_min: Option<f64>,
    /// Largest singular value dropped as null, over all draws.
    pub sigma_dropped_max: Option<f64>,
    /// Draws rejected as ill-conditioned.
    pub ill_conditioned: u32,
}

fn degeneracy_table(cli: &Cli, a: &DegeneracyArgs) -> Result<Outcome, Error> {
    if !(a.mass > 0.0 && a.mass.is_finite()) {
        return Err(Error::domain("mass must be positive"));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Error::domain("--tol must lie in (0, 1)"));
    }
    let eps_q = Sign::from_i64(a.eps_q).expect("validated by parser");
    let pz_range = [0.0, 3.0 * a.mass];
    let qb_range = [0.05 * a.mass * a.mass, 0.5 * a.mass * a.mass];
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut rows = Vec::new();
    for n in 0..=a.n_max {
        let mut nullities = Vec::new();
        let mut kept: Vec<f64> = Vec::new();
        let mut dropped: Vec<f64> = Vec::new();
        let mut ill = 0;
        for _ in 0..a.draws {
            let pz = rng.gen_range(pz_range[0]..=pz_range[1]);
            let qb = rng.gen_range(qb_range[0]..=qb_range[1]);
            let py = rng.gen_range(-1.0..=1.0);
            let mode = ModeSpec::with_qb(n, Sign::Plus, eps_q, qb, a.mass, py, pz)?;
            match degeneracy(&mode, a.tol) {
                Ok(r) => {
                    nullities.push(r.nullity);
                    kept.extend(r.rank.checked_sub(1).map(|i| r.singular_values[i]));
                    dropped.extend(r.singular_values.get(r.rank).copied());
                }
                Err(Error::IllConditioned { .. }) => ill += 1,
                Err(e) => return Err(e),
            }
        }
        let formula = degeneracy_formula(i64::from(n))?;
        let mode_value = most_frequent(&nullities);
        rows.push(DegeneracyRow {
            n,
            nullity: mode_value,
            formula,
            matches: ill == 0 && nullities.iter().all(|&k| k == formula as usize),
            nullity_min: nullities.iter().copied().min(),
            nullity_max: nullities.iter().copied().max(),
            sigma_kept_min: kept.iter().copied().reduce(f64::min),
            sigma_dropped_max: dropped.iter().copied().reduce(f64::max),
            ill_conditioned: ill,
        });
    }
    for r in rows.iter().filter(|r| r.ill_conditioned > 0) {
        eprintln!("warning: n={} had {} ill-conditioned draws", r.n, r.ill_conditioned);
    }
    let config = DegeneracyConfig {
        command: "degeneracy",
        format: cli.format,
        seed: cli.seed,
        n_max: a.n_max,
        eps: 1,
        eps_q: a.eps_q,
        draws: a.draws,
        mass: a.mass,
        pz_range,
        qb_range,
        tol: a.tol,
    };
    Ok(ok(render(cli.format, &config, &rows)?))
}

/// Smallest among the most frequent values.
fn most_frequent(xs: &[usize]) -> Option<usize> {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    sorted
        .chunk_by(|a, b| a == b)
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .map(|c| c[0])
}

#[derive(Serialize)]
struct VerifyConfig {
    command: &'static str,
    format: Format,
    seed: u64,
    all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrupt_gamma: Option<usize>,
}

fn verify_report(cli: &Cli, a: &VerifyArgs) -> Result<Outcome, Error> {
    let mut gammas = GammaSet::dirac();
    if let Some(mu) = a.corrupt_gamma {
        if mu > 3 {
            return Err(Error::domain("--corrupt-gamma takes an index 0..=3"));
        }
        gammas = gammas.with_corrupted_sign(mu);
    }
    let report = verify::run_with(cli.seed, &gammas)?;
    let config = VerifyConfig {
        command: "verify",
        format: cli.format,
        seed: cli.seed,
        all_pass: report.all_pass,
        corrupt_gamma: a.corrupt_gamma,
    };
    let stdout = render(cli.format, &config, &report.suites)?;
    let code = if report.all_pass { EXIT_OK } else { EXIT_VERIFY };
    let stderr = report
        .suites
        .iter()
        .filter(|s| !s.pass)
        .map(|s| {
            format!(
                "FAIL {}: max residual {:e} > {:e}\n",
                s.name, s.max_residual, s.threshold
            )
        })
        .collect();
    Ok(Outcome { code, stdout, stderr })
}

#[derive(Serialize)]
struct GasConfig {
    command: &'static str,
    format: Format,
    mu: Vec<f64>,
    b_field: Vec<f64>,
    mass: f64,
    charge: f64,
    temp: f64,
    tol: f64,
    antiparticles: bool,
    gauss_per_msq: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct GasRow {
    pub mu: f64,
    pub b_field: f64,
    pub b_gauss: Option<f64>,
    pub density_spin_three_halves: f64,
    pub density_spin_half: f64,
}

fn gas(cli: &Cli, a: &GasArgs) -> Result<Outcome, Error> {
    if a.antiparticles && a.temp == 0.0 {
        return Err(Error::domain("--antiparticles needs --temp > 0"));
    }
    let density = |spin: Spin, mu: f64, b: f64| -> Result<f64, Error> {
        let state = GasState::new(mu, a.temp, b, Species::new("cli", a.mass, a.charge, spin))?;
        if a.temp > 0.0 {
            number_density_finite_t(
                &state,
                FiniteTOptions {
                    tol: a.tol,
                    antiparticles: a.antiparticles,
                },
            )
        } else {
            number_density_t0(&state)
        }
    };
    let mut rows = Vec::new();
    for &mu in &a.mu {
        for &b in &a.b_field {
            rows.push(GasRow {
                mu,
                b_field: b,
                b_gauss: cli.gauss_per_msq.map(|g| g * b),
                density_spin_three_halves: density(Spin::ThreeHalves, mu, b)?,
                density_spin_half: density(Spin::Half, mu, b)?,
            });
        }
    }
    let config = GasConfig {
        command: "gas",
        format: cli.format,
        mu: a.mu.clone(),
        b_field: a.b_field.clone(),
        mass: a.mass,
        charge: a.charge,
        temp: a.temp,
        tol: a.tol,
        antiparticles: a.antiparticles,
        gauss_per_msq: cli.gauss_per_msq,
    };
    Ok(ok(render(cli.format, &config, &rows)?))
}
