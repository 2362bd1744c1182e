//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numeric failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis::{self, GridSpec, Model, Quantity, SurfaceGrid};
use crate::bures_model::{self, InverseTemps2, InverseTemps3};
use crate::error::Error;
use crate::output::{self, CsvTable, Series};
use crate::quadrature::Tolerance;
use crate::selftest::{self, Hooks};
use crate::semiclassical::{self, LagrangeMultipliers};
use crate::specfun::{self, BesselOrder, ModelDimension};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spin-thermo", version, about = "Thermodynamics of spin systems: Brillouin/Bures curves, surfaces and checks")]
struct Cli {
    #[command(flatten)]
    tolerance: ToleranceArgs,

    /// Record wall-clock duration in output metadata (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Subdivision budget per one-dimensional integral.
    #[arg(long, global = true, default_value_t = 2000)]
    max_subdivisions: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single function and print the result.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Sample a quantity over a (beta1, beta2) grid.
    #[command(allow_negative_numbers = true)]
    Surface(SurfaceArgs),
    /// Brillouin versus Bures magnetization curves and their largest gap.
    #[command(allow_negative_numbers = true)]
    Fig1(Fig1Args),
    /// Compare the two reduced three-observable integrands against full ball quadrature.
    #[command(name = "reduced-forms", visible_alias = "eq15-report", allow_negative_numbers = true)]
    ReducedForms(ReducedFormsArgs),
    /// Find multipliers reproducing given mean values.
    #[command(allow_negative_numbers = true)]
    Fit(FitArgs),
    /// Run the invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Function {
    Brillouin,
    Alternative,
    Dvector,
    Langevin,
    Quaternionic,
    MagnetizationSlope,
    HeatCapacity,
    BesselI,
    BesselRatio,
    BesselJ0,
    SemiclassicalMean,
    SemiclassicalMoments,
    BuresPartition,
    BuresMoments,
    ClosedMean,
    BuresMean3,
}

#[derive(Debug, Args)]
struct EvalArgs {
    function: Function,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dimension: Option<u32>,
    /// Bessel order, e.g. `2`, `1/2` or `-0.5`.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    beta3: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Bures,
    Semiclassical,
    Difference,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bures => Model::Bures,
            ModelArg::Semiclassical => Model::Semiclassical,
            ModelArg::Difference => Model::Difference,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuantityArg {
    Mean1,
    Mean2,
    Var1,
    Var2,
    Cov,
    Partition,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Mean1 => Quantity::Mean1,
            QuantityArg::Mean2 => Quantity::Mean2,
            QuantityArg::Var1 => Quantity::Var1,
            QuantityArg::Var2 => Quantity::Var2,
            QuantityArg::Cov => Quantity::Cov,
            QuantityArg::Partition => Quantity::Partition,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    model: ModelArg,
    quantity: QuantityArg,
    #[arg(long, default_value_t = -5.0)]
    min1: f64,
    #[arg(long, default_value_t = 5.0)]
    max1: f64,
    #[arg(long, default_value_t = 41)]
    steps1: usize,
    #[arg(long, default_value_t = -5.0)]
    min2: f64,
    #[arg(long, default_value_t = 5.0)]
    max2: f64,
    #[arg(long, default_value_t = 41)]
    steps2: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Fig1Args {
    #[arg(long)]
    output_dir: PathBuf,
    /// Curves are sampled on [-beta_max, beta_max].
    #[arg(long, default_value_t = 5.0)]
    beta_max: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
}

#[derive(Debug, Args)]
struct ReducedFormsArgs {
    #[arg(long, default_value_t = 0.0)]
    beta1: f64,
    #[arg(long, default_value_t = 0.0)]
    beta2: f64,
    #[arg(long, default_value_t = 1.0)]
    beta3: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitModel {
    Bures,
    Semiclassical,
}

#[derive(Debug, Args)]
struct FitArgs {
    model: FitModel,
    #[arg(long)]
    mean1: f64,
    #[arg(long)]
    mean2: f64,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, hide = true)]
    inject_ratio_perturbation: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Numeric(Error),
    /// Output was written but some points failed.
    Partial(String),
    /// Self-test reported failing checks.
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(..) => EXIT_USAGE,
            Failure::Numeric(_) | Failure::Partial(_) | Failure::Checks => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> Option<String> {
        match self {
            Failure::Usage(m) => Some(m.clone()),
            Failure::Io(p, e) => Some(format!("{}: {e}", p.display())),
            Failure::Numeric(e) => Some(e.to_string()),
            Failure::Partial(m) => Some(m.clone()),
            Failure::Checks => None,
        }
    }
}

type CmdResult = Result<(), Failure>;

struct Context<'a> {
    tol: Tolerance,
    tol_args: &'a ToleranceArgs,
    timing: bool,
    started: Instant,
}

impl Context<'_> {
    fn metadata(&self, command: &str, parameters: Map<String, Value>) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(command));
        m.insert("parameters".into(), Value::Object(parameters));
        m.insert(
            "tolerance".into(),
            json!({
                "absolute": self.tol_args.abs_tol,
                "relative": self.tol_args.rel_tol,
                "max_subdivisions": self.tol_args.max_subdivisions,
            }),
        );
        if self.timing {
            m.insert(
                "wall_clock_seconds".into(),
                json!(self.started.elapsed().as_secs_f64()),
            );
        }
        m
    }
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.to_path_buf(), e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn need<T>(value: Option<T>, flag: &str, function: Function) -> Result<T, Failure> {
    value.ok_or_else(|| {
        let name = function.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        Failure::Usage(format!("eval {name} requires --{flag}"))
    })
}

fn parse_order(text: &str) -> Result<BesselOrder, Failure> {
    let bad = || Failure::Usage(format!("invalid Bessel order '{text}'"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i32 = n.trim().parse().map_err(|_| bad())?;
        let d: i32 = d.trim().parse().map_err(|_| bad())?;
        return Ok(BesselOrder::new(n, d)?);
    }
    let v: f64 = text.trim().parse().map_err(|_| bad())?;
    let twice = 2.0 * v;
    if twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
        return Err(bad());
    }
    Ok(BesselOrder::from_twice(twice as i32)?)
}

fn fmt15(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

fn cmd_eval(args: &EvalArgs, ctx: &Context, out: &mut dyn Write) -> CmdResult {
    let f = args.function;
    let beta = || need(args.beta, "beta", f);
    let dim = || -> Result<ModelDimension, Failure> {
        Ok(ModelDimension::new(need(args.dimension, "dimension", f)?)?)
    };
    let lams = || -> Result<LagrangeMultipliers, Failure> {
        Ok(LagrangeMultipliers::new(need(args.lambda1, "lambda1", f)?, need(args.lambda2, "lambda2", f)?)?)
    };
    let temps2 = || -> Result<InverseTemps2, Failure> {
        Ok(InverseTemps2::new(need(args.beta1, "beta1", f)?, need(args.beta2, "beta2", f)?)?)
    };
    let temps3 = || -> Result<InverseTemps3, Failure> {
        Ok(InverseTemps3::new(
            need(args.beta1, "beta1", f)?,
            need(args.beta2, "beta2", f)?,
            need(args.beta3, "beta3", f)?,
        )?)
    };

    let values: Vec<(&str, f64)> = match f {
        Function::Brillouin => vec![("brillouin", specfun::brillouin(beta()?))],
        Function::Alternative => vec![("alternative", specfun::quantum_alternative(beta()?)?)],
        Function::Langevin => vec![("langevin", specfun::langevin(beta()?)?)],
        Function::Quaternionic => vec![("quaternionic", specfun::quaternionic(beta()?)?)],
        Function::Dvector => vec![("magnetization", specfun::magnetization(dim()?, beta()?)?.value())],
        Function::MagnetizationSlope => {
            vec![("slope", specfun::magnetization_slope(dim()?, beta()?)?)]
        }
        Function::HeatCapacity => vec![("heat_capacity", specfun::heat_capacity(dim()?, beta()?)?)],
        Function::BesselI => {
            let order = parse_order(&need(args.order.clone(), "order", f)?)?;
            vec![("bessel_i", specfun::bessel_i(order, need(args.x, "x", f)?)?)]
        }
        Function::BesselRatio => {
            let order = parse_order(&need(args.order.clone(), "order", f)?)?;
            vec![("bessel_ratio", specfun::bessel_ratio(order, need(args.x, "x", f)?)?)]
        }
        Function::BesselJ0 => vec![("bessel_j0", specfun::bessel_j0(need(args.x, "x", f)?)?)],
        Function::SemiclassicalMean => {
            let (m1, m2) = semiclassical::mean(&lams()?);
            vec![("mean1", m1), ("mean2", m2)]
        }
        Function::SemiclassicalMoments => {
            let m = semiclassical::moments(&lams()?);
            vec![
                ("mean1", m.mean1),
                ("mean2", m.mean2),
                ("var1", m.var1),
                ("var2", m.var2),
                ("cov", m.cov),
            ]
        }
        Function::BuresPartition => {
            let r = bures_model::partition_2(&temps2()?, &ctx.tol)?;
            vec![("partition", r.converged_value()?), ("error_estimate", r.error_estimate)]
        }
        Function::BuresMoments => {
            let m = bures_model::moments_2(&temps2()?, &ctx.tol)?;
            vec![
                ("mean1", m.mean1),
                ("mean2", m.mean2),
                ("var1", m.var1),
                ("var2", m.var2),
                ("cov", m.cov),
                ("partition", m.partition),
            ]
        }
        Function::ClosedMean => {
            let (m1, m2) = bures_model::closed_mean_2(&temps2()?)?;
            vec![("mean1", m1), ("mean2", m2)]
        }
        Function::BuresMean3 => {
            let s = bures_model::mean_3(&temps3()?, &ctx.tol)?.as_array();
            vec![("mean1", s[0]), ("mean2", s[1]), ("mean3", s[2])]
        }
    };

    let text = if values.len() == 1 {
        format!("{}\n", fmt15(values[0].1))
    } else {
        values
            .iter()
            .map(|(k, v)| format!("{k} {}\n", fmt15(*v)))
            .collect()
    };
    write_output(None, &text, out)
}

fn grid_json(spec: &GridSpec) -> Value {
    serde_json::to_value(spec).unwrap_or(Value::Null)
}

fn surface_document(grid: &SurfaceGrid, format: Format, ctx: &Context) -> Result<String, Failure> {
    let mut params = Map::new();
    params.insert("model".into(), json!(grid.model.name()));
    params.insert("quantity".into(), json!(grid.quantity.name()));
    params.insert("format".into(), json!(if format == Format::Csv { "csv" } else { "json" }));
    let mut meta = ctx.metadata("surface", params);
    meta.insert("max_quadrature_error".into(), json!(grid.max_quadrature_error()));
    meta.insert(
        "failures".into(),
        serde_json::to_value(&grid.failures).unwrap_or(Value::Null),
    );

    match format {
        Format::Json => {
            let values: Vec<Option<f64>> = grid
                .values
                .iter()
                .map(|v| v.is_finite().then_some(*v))
                .collect();
            let doc = json!({
                "metadata": Value::Object(meta),
                "spec": grid_json(&grid.spec),
                "values": values,
            });
            Ok(output::render_json(&doc)?)
        }
        Format::Csv => {
            let mut table = CsvTable::new(&["beta1", "beta2", "value"]);
            for (k, v) in &meta {
                table.comment(format!("{k}: {v}"));
            }
            table.comment(format!("spec: {}", grid_json(&grid.spec)));
            for (idx, v) in grid.values.iter().enumerate() {
                let (b1, b2) = grid.spec.point(idx);
                table.push_row(vec![b1, b2, *v]);
            }
            Ok(table.render())
        }
    }
}

fn cmd_surface(args: &SurfaceArgs, ctx: &Context, out: &mut dyn Write) -> CmdResult {
    let spec = GridSpec::new(
        (args.min1, args.max1, args.steps1),
        (args.min2, args.max2, args.steps2),
    )?;
    let grid = analysis::surface(args.model.into(), args.quantity.into(), &spec, &ctx.tol)?;
    let text = surface_document(&grid, args.format, ctx)?;
    write_output(args.output.as_deref(), &text, out)?;
    if grid.is_complete() {
        Ok(())
    } else {
        Err(Failure::Partial(format!(
            "{} of {} grid points failed; see metadata",
            grid.failures.len(),
            grid.values.len()
        )))
    }
}

pub const FIG1_CURVE_FILE: &str = "fig1_curve.csv";
pub const FIG1_EXTREMUM_FILE: &str = "fig1_extremum.json";
pub const FIG1_PLOT_FILE: &str = "fig1.svg";

fn cmd_fig1(args: &Fig1Args, ctx: &Context) -> CmdResult {
    if !(args.beta_max > 0.0 && args.beta_max <= bures_model::MAX_BETA_2) || args.points < 2 {
        return Err(Failure::Usage(format!(
            "fig1 needs 0 < --beta-max <= {} and --points >= 2",
            bures_model::MAX_BETA_2
        )));
    }
    let n = args.points - 1;
    let betas: Vec<f64> = (0..=n)
        .map(|i| args.beta_max * (2.0 * i as f64 - n as f64) / n as f64)
        .collect();
    let curve = analysis::curve_difference(&betas)?;
    let extremum = analysis::find_max_difference()?;

    let mut params = Map::new();
    params.insert("beta_max".into(), json!(args.beta_max));
    params.insert("points".into(), json!(args.points));
    let meta = ctx.metadata("fig1", params);

    let mut table = CsvTable::new(&["beta", "brillouin", "alternative", "difference"]);
    for (k, v) in &meta {
        table.comment(format!("{k}: {v}"));
    }
    for p in &curve {
        table.push_row(vec![p.beta, p.brillouin, p.alternative, p.difference()]);
    }

    let report = json!({
        "metadata": Value::Object(meta),
        "spec": {"scan": [0.1, 5.0], "scan_points": 51, "bracket_width": 1e-9},
        "report": extremum,
    });

    let brillouin: Vec<(f64, f64)> = curve.iter().map(|p| (p.beta, p.brillouin)).collect();
    let alternative: Vec<(f64, f64)> = curve.iter().map(|p| (p.beta, p.alternative)).collect();
    let svg = output::svg_plot(
        &[
            Series {
                label: "tanh β",
                color: "#1f77b4",
                points: &brillouin,
            },
            Series {
                label: "I₂(β)/I₁(β)",
                color: "#d62728",
                points: &alternative,
            },
        ],
        "β",
        "−E",
    );

    let dir = &args.output_dir;
    fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.clone(), e))?;
    let mut sink = std::io::sink();
    write_output(Some(&dir.join(FIG1_CURVE_FILE)), &table.render(), &mut sink)?;
    write_output(
        Some(&dir.join(FIG1_EXTREMUM_FILE)),
        &output::render_json(&report)?,
        &mut sink,
    )?;
    write_output(Some(&dir.join(FIG1_PLOT_FILE)), &svg, &mut sink)
}

fn cmd_reduced_forms(args: &ReducedFormsArgs, ctx: &Context, out: &mut dyn Write) -> CmdResult {
    let temps = InverseTemps3::new(args.beta1, args.beta2, args.beta3)?;
    let report = bures_model::compare_reduced_forms(&temps, &ctx.tol)?;
    let mut params = Map::new();
    params.insert("beta1".into(), json!(args.beta1));
    params.insert("beta2".into(), json!(args.beta2));
    params.insert("beta3".into(), json!(args.beta3));
    let doc = json!({
        "metadata": Value::Object(ctx.metadata("reduced-forms", params)),
        "spec": {"integrands": ["paper", "direct", "full3d"], "reference": "full3d"},
        "report": report,
    });
    write_output(args.output.as_deref(), &output::render_json(&doc)?, out)
}

fn cmd_fit(args: &FitArgs, ctx: &Context, out: &mut dyn Write) -> CmdResult {
    let (names, fitted) = match args.model {
        FitModel::Semiclassical => {
            let l = semiclassical::fit(args.mean1, args.mean2)?;
            (("lambda1", "lambda2"), (l.lambda1, l.lambda2))
        }
        FitModel::Bures => {
            let b = analysis::fit_bures(args.mean1, args.mean2, &ctx.tol)?;
            (("beta1", "beta2"), (b.beta1, b.beta2))
        }
    };
    let text = format!(
        "{} {}\n{} {}\n",
        names.0,
        fmt15(fitted.0),
        names.1,
        fmt15(fitted.1)
    );
    write_output(None, &text, out)
}

fn perturbed_ratio(order: BesselOrder, x: f64) -> crate::Result<f64> {
    Ok(specfun::bessel_ratio(order, x)? * (1.0 + 1e-3))
}

fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> CmdResult {
    let hooks = if args.inject_ratio_perturbation {
        Hooks {
            ratio: perturbed_ratio,
        }
    } else {
        Hooks::default()
    };
    let report = selftest::run(&hooks);
    write_output(None, &report.table(), out)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let text = e.render().to_string();
            if informational {
                let _ = stdout.write_all(text.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(text.as_bytes());
            return EXIT_USAGE;
        }
    };
    let started = Instant::now();
    let tol = match Tolerance::new(
        cli.tolerance.abs_tol,
        cli.tolerance.rel_tol,
        cli.tolerance.max_subdivisions,
    ) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let ctx = Context {
        tol,
        tol_args: &cli.tolerance,
        timing: cli.timing,
        started,
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &ctx, stdout),
        Command::Surface(a) => cmd_surface(a, &ctx, stdout),
        Command::Fig1(a) => cmd_fig1(a, &ctx),
        Command::ReducedForms(a) => cmd_reduced_forms(a, &ctx, stdout),
        Command::Fit(a) => cmd_fit(a, &ctx, stdout),
        Command::Selftest(a) => cmd_selftest(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if let Some(m) = f.message() {
                let _ = writeln!(stderr, "error: {}", m.replace('\n', " "));
            }
            f.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
