//! Command-line front end for the `micromorph` library.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use micromorph::bvp1d::{
    self, convergence_study, log_space, macro_stiffness, solve_spec, sweep_lc,
};
use micromorph::constitutive::{reuss_kappa_e, reuss_kappa_micro, reuss_mu_e, reuss_mu_micro};
use micromorph::modes::{mode_report, redundancy_classify};
use micromorph::{
    BcKind, DerivedModuli, Error, GammaSpec, ModeBc, ModelKind, ProblemSpec, TestKind, Vec3,
};
use serde::Serialize;

pub mod identities;
pub mod params;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(s) | CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFINITE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "micromorph",
    version,
    about = "Generalized continua: identities, homogenization, stripe solves, L_c sweeps and zero-energy modes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the tensor and field identity suite.
    Identities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Reuss-homogenized moduli, or invert them.
    Homogenize {
        #[arg(long)]
        params: Option<PathBuf>,
        /// Recover the meso (`e`) or micro moduli from macro values.
        #[arg(long, value_enum, requires = "mu_macro")]
        invert: Option<Invert>,
        #[arg(long)]
        mu_macro: Option<f64>,
        #[arg(long)]
        kappa_macro: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Solve one stripe problem; writes the profile CSV.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        bc: BcKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Apparent stiffness over a log-spaced L_c grid.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        /// One or more models, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        model: Vec<ModelKind>,
        /// One or more boundary conditions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        bc: Vec<BcKind>,
        /// Smallest L_c; defaults to 1e-3·h.
        #[arg(long)]
        lc_min: Option<f64>,
        /// Largest L_c; defaults to 1e3·h.
        #[arg(long)]
        lc_max: Option<f64>,
        #[arg(long, default_value_t = 13)]
        lc_points: usize,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh convergence of the apparent stiffness.
    Converge {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        bc: BcKind,
        #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
        levels: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Zero-energy mode kernel under a boundary condition on a flat face.
    Modes {
        #[arg(long)]
        model: ModelKind,
        /// Couple modulus; only its sign matters.
        #[arg(long, default_value_t = 1.0)]
        mu_c: f64,
        #[arg(long, default_value = "none")]
        bc: ModeBc,
        /// Outward unit normal of the face, `x,y,z`.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, -1.0, 0.0])]
        normal: Vec<f64>,
        /// A point on the face, `x,y,z`.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, -0.5, 0.0])]
        point: Vec<f64>,
        /// Also classify redundancy of the energy terms.
        #[arg(long)]
        redundancy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    #[arg(long, default_value = "shear")]
    test: TestKind,
    #[arg(long)]
    params: Option<PathBuf>,
    /// Overrides L_c from the parameter file.
    #[arg(long)]
    lc: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Accepted for interface uniformity; stripe solves are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemArgs {
    fn spec(&self, model: ModelKind, bc: BcKind) -> CliResult<ProblemSpec> {
        let mut p = params::load(self.params.as_deref())?;
        if let Some(lc) = self.lc {
            p = p.with_lc(lc);
        }
        Ok(ProblemSpec {
            h: self.h,
            gamma: self.gamma,
            n: self.n,
            ..ProblemSpec::new(model, self.test, bc, p)
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Invert {
    E,
    Micro,
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json(out: Option<&Path>, value: &impl Serialize) -> CliResult<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, identities::Ops::default())
}

/// As [`run`], with substitutable operations for the identity suite.
pub fn run_with<I, T>(args: I, ops: identities::Ops) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, ops) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command, ops: identities::Ops) -> CliResult<i32> {
    match cmd {
        Command::Identities { seed, json, out } => cmd_identities(seed, json, out.as_deref(), ops),
        Command::Homogenize {
            params,
            invert,
            mu_macro,
            kappa_macro,
            json,
        } => cmd_homogenize(params.as_deref(), invert, mu_macro, kappa_macro, json),
        Command::Solve {
            problem,
            model,
            bc,
            out,
            json,
        } => cmd_solve(&problem.spec(model, bc)?, out.as_deref(), json),
        Command::Sweep {
            problem,
            model,
            bc,
            lc_min,
            lc_max,
            lc_points,
            jobs,
            out,
        } => cmd_sweep(
            &problem,
            &model,
            &bc,
            lc_min,
            lc_max,
            lc_points,
            jobs,
            out.as_deref(),
        ),
        Command::Converge {
            problem,
            model,
            bc,
            levels,
            out,
            json,
        } => cmd_converge(&problem.spec(model, bc)?, &levels, out.as_deref(), json),
        Command::Modes {
            model,
            mu_c,
            bc,
            normal,
            point,
            redundancy,
            out,
        } => cmd_modes(model, mu_c, bc, &normal, &point, redundancy, out.as_deref()),
    }
}

fn cmd_identities(
    seed: u64,
    json: bool,
    out: Option<&Path>,
    ops: identities::Ops,
) -> CliResult<i32> {
    let report = identities::run_suite(seed, ops);
    if json {
        write_json(out, &report)?;
    } else {
        sink(out)?.write_all(report.to_text().as_bytes())?;
    }
    Ok(match report.first_failure() {
        None => EXIT_OK,
        Some(f) => {
            eprintln!(
                "error: identity `{}` failed (worst residual {:.3e})",
                f.name, f.worst
            );
            EXIT_ERROR
        }
    })
}

fn cmd_homogenize(
    path: Option<&Path>,
    invert: Option<Invert>,
    mu_macro: Option<f64>,
    kappa_macro: Option<f64>,
    json: bool,
) -> CliResult<i32> {
    let p = params::load(path)?;
    let Some(mode) = invert else {
        let d = DerivedModuli::from_moduli(&p.validated()?)?;
        if json {
            write_json(None, &d)?;
        } else {
            let rows = [
                ("mu_macro", d.mu_macro),
                ("kappa_macro", d.kappa_macro),
                ("lambda_macro", d.lambda_macro),
                ("M_e", d.m_e),
                ("M_micro", d.m_micro),
                ("M_macro", d.m_macro),
                ("mu_bar", d.mu_bar),
                ("M_bar", d.m_bar),
            ];
            for (k, v) in rows {
                println!("{k} {}", fmt_f64(v));
            }
        }
        return Ok(EXIT_OK);
    };
    let mu_macro =
        mu_macro.ok_or_else(|| CliError::Usage("--invert requires --mu-macro".into()))?;
    let mut rows = Vec::new();
    let (mu, kappa) = match mode {
        Invert::E => (
            ("mu_e", reuss_mu_e(p.mu_micro, mu_macro)),
            kappa_macro.map(|k| ("kappa_e", reuss_kappa_e(p.kappa_micro(), k))),
        ),
        Invert::Micro => (
            ("mu_micro", reuss_mu_micro(p.mu_e, mu_macro)),
            kappa_macro.map(|k| ("kappa_micro", reuss_kappa_micro(p.kappa_e(), k))),
        ),
    };
    rows.push(mu);
    rows.extend(kappa);
    let mut code = EXIT_OK;
    let mut map = serde_json::Map::new();
    for (k, r) in rows {
        let text = match r {
            Ok(v) => fmt_f64(v),
            Err(Error::InfiniteModulus(_)) => {
                code = EXIT_INFINITE;
                "inf".to_string()
            }
            Err(e) => return Err(e.into()),
        };
        if json {
            map.insert(k.to_string(), serde_json::Value::String(text));
        } else {
            println!("{k} {text}");
        }
    }
    if json {
        write_json(None, &map)?;
    }
    Ok(code)
}

#[derive(Serialize)]
struct SolveSummary {
    model: String,
    test: String,
    bc: String,
    l_c: f64,
    h: f64,
    gamma: f64,
    n: usize,
    stiffness: f64,
    macro_stiffness: Option<f64>,
    energy_total: f64,
    residual: f64,
}

fn cmd_solve(spec: &ProblemSpec, out: Option<&Path>, json: bool) -> CliResult<i32> {
    let sol = solve_spec(spec)?;
    let summary = SolveSummary {
        model: spec.model.to_string(),
        test: spec.test.to_string(),
        bc: spec.bc.to_string(),
        l_c: spec.params.l_c,
        h: spec.h,
        gamma: spec.gamma,
        n: spec.n,
        stiffness: bvp1d::apparent_stiffness(&sol, spec),
        macro_stiffness: macro_stiffness(&spec.params, spec.test).ok(),
        energy_total: sol.energy_total,
        residual: sol.residual,
    };
    let mut w = csv::Writer::from_writer(sink(out)?);
    let mut header = vec!["x2".to_string()];
    header.extend(sol.profiles.iter().map(|p| p.name.clone()));
    w.write_record(&header)?;
    for (i, x) in sol.grid.iter().enumerate() {
        let mut rec = vec![fmt_f64(*x)];
        rec.extend(sol.profiles.iter().map(|p| fmt_f64(p.values[i])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    drop(w);
    if json {
        let text =
            serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.to_string()))?;
        if out.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    } else {
        let line = format!("stiffness {}", fmt_f64(summary.stiffness));
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    problem: &ProblemArgs,
    models: &[ModelKind],
    bcs: &[BcKind],
    lc_min: Option<f64>,
    lc_max: Option<f64>,
    points: usize,
    jobs: Option<usize>,
    out: Option<&Path>,
) -> CliResult<i32> {
    let lo = lc_min.unwrap_or(1e-3 * problem.h);
    let hi = lc_max.unwrap_or(1e3 * problem.h);
    if !(lo > 0.0 && hi >= lo) || points == 0 {
        return Err(CliError::Usage(
            "need 0 < --lc-min ≤ --lc-max and --lc-points ≥ 1".into(),
        ));
    }
    let grid = log_space(lo, hi, points);
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["model", "test", "bc", "L_c", "stiffness"])?;
    let mut failures = Vec::new();
    for &model in models {
        for &bc in bcs {
            let curve = sweep_lc(&problem.spec(model, bc)?, &grid, jobs)?;
            for row in &curve.rows {
                let s = match &row.stiffness {
                    Ok(v) => fmt_f64(*v),
                    Err(e) => {
                        failures.push(format!("{model} {bc} L_c = {}: {e}", row.l_c));
                        "nan".to_string()
                    }
                };
                w.write_record([
                    model.to_string(),
                    problem.test.to_string(),
                    bc.to_string(),
                    fmt_f64(row.l_c),
                    s,
                ])?;
            }
        }
    }
    w.flush()?;
    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        for f in &failures {
            eprintln!("error: {f}");
        }
        Ok(EXIT_ERROR)
    }
}

#[derive(Serialize)]
struct ConvergenceJson {
    reference: &'static str,
    levels: Vec<usize>,
    stiffness: Vec<f64>,
    error: Vec<Option<f64>>,
    orders: Vec<f64>,
    mean_order: Option<f64>,
}

fn cmd_converge(
    spec: &ProblemSpec,
    levels: &[usize],
    out: Option<&Path>,
    json: bool,
) -> CliResult<i32> {
    let t = convergence_study(spec, levels)?;
    if json {
        let j = ConvergenceJson {
            reference: t.reference,
            levels: t.rows.iter().map(|r| r.n).collect(),
            stiffness: t.rows.iter().map(|r| r.stiffness).collect(),
            error: t.rows.iter().map(|r| r.error).collect(),
            orders: t.orders.clone(),
            mean_order: t.mean_order(),
        };
        write_json(out, &j)?;
        return Ok(EXIT_OK);
    }
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["n", "stiffness", "error", "order", "reference"])?;
    for (i, r) in t.rows.iter().enumerate() {
        let order = i
            .checked_sub(1)
            .and_then(|k| t.orders.get(k))
            .map_or(String::new(), |q| fmt_f64(*q));
        w.write_record([
            r.n.to_string(),
            fmt_f64(r.stiffness),
            r.error.map_or(String::new(), fmt_f64),
            order,
            t.reference.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RedundancyJson {
    redundant: bool,
    first_controls_all: bool,
    second_controls_all: bool,
}

#[derive(Serialize)]
struct ModesJson {
    #[serde(flatten)]
    report: micromorph::ModeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    redundancy: Option<RedundancyJson>,
}

fn cmd_modes(
    model: ModelKind,
    mu_c: f64,
    bc: ModeBc,
    normal: &[f64],
    point: &[f64],
    redundancy: bool,
    out: Option<&Path>,
) -> CliResult<i32> {
    if !(mu_c >= 0.0) {
        return Err(CliError::Usage("--mu-c must be ≥ 0".into()));
    }
    let gamma = GammaSpec::new(
        Vec3::from_column_slice(point),
        Vec3::from_column_slice(normal),
    )?;
    let report = mode_report(model, mu_c > 0.0, bc, &gamma);
    let redundancy = if redundancy {
        let r = redundancy_classify(model, mu_c > 0.0)?;
        Some(RedundancyJson {
            redundant: r.redundant,
            first_controls_all: r.first_controls_all,
            second_controls_all: r.second_controls_all,
        })
    } else {
        None
    };
    write_json(out, &ModesJson { report, redundancy })?;
    Ok(EXIT_OK)
}
