mod error;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use steklov_core::cheeger::{
    cheeger_enumerate, cheeger_parametric_cut, higher_order_constants_with, CheegerResult, HigherOrderMode, Ratio,
};
use steklov_core::dtn::{blowup_convergence, dirichlet_laplacian_spectrum, dtn_spectrum};
use steklov_core::exhaustion::{
    exhaust_cheeger, exhaust_higher, exhaust_spectrum, graph_eigen_limit, recurrence_test, ExhaustionConfig,
    ExhaustionTable, FamilySpec, Status, DEFAULT_DEPTH, DEFAULT_TOL,
};
use steklov_core::io::{format_f64, load_graph, parse_graph, resolve_window, to_json_string, LoadedGraph};
use steklov_core::suite::{run_suite, SuiteOptions};
use steklov_core::{make_window, Domain};

use error::CliError;
use report::{ReportBuilder, RunReport};

const TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "steklov", version, about = "Steklov spectra, Cheeger constants and recurrence on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DtN and Dirichlet spectra of a window, with optional blow-up spectra.
    Spectrum(SpectrumArgs),
    /// Cheeger constants of a window.
    Cheeger(CheegerArgs),
    /// Limits along an exhaustion of a graph family.
    Exhaust(ExhaustArgs),
    /// Capacity-based recurrence test; shorthand for `exhaust --quantity recurrence`.
    Recurrence(RecurrenceArgs),
    /// Runs the identity and inequality suite on fixtures and random windows.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct WindowArgs {
    /// Graph file (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// `all`, `file`, an inclusive label range `a..b`, or a list `a,b,c`.
    #[arg(long, default_value = "file")]
    window: String,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: WindowArgs,
    /// Blow-up parameter r.
    #[arg(long)]
    blowup: Option<f64>,
    /// Geometric schedule `r0:r1:factor`.
    #[arg(long, conflicts_with = "blowup")]
    schedule: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Enum,
    Cut,
    Auto,
}

#[derive(Args)]
struct CheegerArgs {
    #[command(flatten)]
    input: WindowArgs,
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Sigma,
    Cheeger,
    Higher,
    Lambda,
    Recurrence,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family as inline JSON or a path to a JSON file.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Vertex budget; overrides the environment.
    #[arg(long)]
    budget: Option<usize>,
    /// Also write the convergence table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExhaustArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct RecurrenceArgs {
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FixtureMode {
    Include,
    Only,
    Skip,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_enum, default_value_t = FixtureMode::Include)]
    fixtures: FixtureMode,
    #[arg(long, default_value_t = 3)]
    k_max: usize,
    /// Directory for replayable graph files of failing instances.
    #[arg(long, default_value = "verify-failures")]
    dump_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let outcome = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(echo, &args),
        Command::Cheeger(args) => cmd_cheeger(echo, &args),
        Command::Exhaust(args) => cmd_exhaust(echo, &args.family, args.quantity, args.k),
        Command::Recurrence(args) => cmd_exhaust(echo, &args.family, Quantity::Recurrence, 1),
        Command::Verify(args) => cmd_verify(echo, &args),
    };
    match outcome.and_then(|r| emit(&r).map(|_| r)) {
        Ok(report) if report.budget_exceeded => ExitCode::from(3),
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(report: &RunReport) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", to_json_string(report)?)?;
    Ok(())
}

fn load(builder: &mut ReportBuilder, path: &Path) -> Result<LoadedGraph, CliError> {
    let text = builder.read_input(path)?;
    parse_graph(&text).map_err(|source| CliError::Graph {
        path: path.display().to_string(),
        source,
    })
}

fn parse_schedule(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("schedule must be r0:r1:factor with 0 < r0 ≤ r1 and factor > 1, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [r0, r1, factor] = parts[..] else {
        return Err(bad());
    };
    if !(r0 > 0.0 && r1 >= r0 && factor > 1.0 && r1.is_finite()) {
        return Err(bad());
    }
    let mut schedule = Vec::new();
    let mut r = r0;
    while r <= r1 * (1.0 + 1e-12) {
        schedule.push(r);
        r *= factor;
    }
    Ok(schedule)
}

fn cmd_spectrum(echo: Vec<String>, args: &SpectrumArgs) -> Result<RunReport, CliError> {
    let mut builder = ReportBuilder::new(echo);
    let loaded = load(&mut builder, &args.input.graph)?;
    let members = resolve_window(&args.input.window, &loaded)?;
    let window = make_window(&loaded.domain, &members)?;
    let sigma = dtn_spectrum(&window)?;
    let lambda_d = dirichlet_laplacian_spectrum(&window)?;
    for (k, &s) in sigma.iter().enumerate() {
        builder.check_le(format!("sigma_{}_nonnegative", k + 1), 0.0, s, TOL);
        builder.check_le(format!("sigma_{}_at_most_one", k + 1), s, 1.0, TOL);
        if let Some(&l) = lambda_d.get(k) {
            builder.check_le(format!("sigma_{}_ge_lambda_D", k + 1), l, s, TOL);
        }
    }
    let schedule = match (&args.blowup, &args.schedule) {
        (Some(r), _) => Some(vec![*r]),
        (None, Some(spec)) => Some(parse_schedule(spec)?),
        (None, None) => None,
    };
    let blowup = schedule.map(|s| blowup_convergence(&window, &s)).transpose()?;
    builder.finish(json!({
        "window": window_summary(&loaded.domain, &members, &window),
        "sigma": sigma,
        "lambdaD": lambda_d,
        "blowup": blowup,
    }))
}

fn window_summary(domain: &Domain, members: &[usize], window: &steklov_core::Window<'_>) -> serde_json::Value {
    json!({
        "members": members.iter().map(|&x| domain.name(x).into_owned()).collect::<Vec<_>>(),
        "size": window.len(),
        "boundary": window.boundary_len(),
        "collar": window.collar_len(),
    })
}

#[derive(Serialize)]
struct Named {
    #[serde(flatten)]
    result: CheegerResult,
    witness_labels: Vec<Vec<String>>,
}

fn named(domain: &Domain, result: CheegerResult) -> Named {
    let witness_labels = result
        .witness
        .iter()
        .map(|set| set.iter().map(|&x| domain.name(x).into_owned()).collect())
        .collect();
    Named { result, witness_labels }
}

fn cmd_cheeger(echo: Vec<String>, args: &CheegerArgs) -> Result<RunReport, CliError> {
    let mut builder = ReportBuilder::new(echo);
    let loaded = load(&mut builder, &args.input.graph)?;
    let members = resolve_window(&args.input.window, &loaded)?;
    let window = make_window(&loaded.domain, &members)?;
    let domain = &loaded.domain;
    if args.order == 1 {
        let (h, h_j) = match args.method {
            MethodArg::Enum => cheeger_enumerate(&window)?,
            MethodArg::Cut => (
                cheeger_parametric_cut(&window, Ratio::Classical)?,
                cheeger_parametric_cut(&window, Ratio::Jammes)?,
            ),
            MethodArg::Auto => steklov_core::cheeger_auto(&window)?,
        };
        builder.check_le("h_J_ge_h", h.value, h_j.value, 0.0);
        let sigma = dtn_spectrum(&window)?;
        builder.check_le("sandwich_lower", h.value * h_j.value / 2.0, sigma[0], TOL);
        builder.check_le("sandwich_upper", sigma[0], h_j.value, TOL);
        return builder.finish(json!({
            "window": window_summary(domain, &members, &window),
            "order": 1,
            "h": named(domain, h),
            "h_J": named(domain, h_j),
            "sigma_1": sigma[0],
        }));
    }
    let mode = match args.method {
        MethodArg::Enum => HigherOrderMode::Exact,
        MethodArg::Cut => HigherOrderMode::Heuristic,
        MethodArg::Auto => HigherOrderMode::Auto,
    };
    let (h_k, h_j_k) = higher_order_constants_with(&window, args.order, mode)?;
    let sigma = dtn_spectrum(&window)?;
    let sigma_k = sigma[args.order - 1];
    // reported, not enforced: adjacent parts can push σ_k above h_J^k
    let slack = h_j_k.value - sigma_k;
    builder.push(format!("sigma_{0}_le_h_J^{0}", args.order), slack + TOL >= 0.0, slack, false);
    builder.check_le(format!("sigma_{0}_le_2h_J^{0}", args.order), sigma_k, 2.0 * h_j_k.value, TOL);
    let k6 = (args.order as f64).powi(6);
    let c_hat = (h_k.value > 0.0 && h_k.value.is_finite()).then(|| sigma_k * k6 / h_k.value);
    builder.finish(json!({
        "window": window_summary(domain, &members, &window),
        "order": args.order,
        "h_k": named(domain, h_k),
        "h_J^k": named(domain, h_j_k),
        "sigma_k": sigma_k,
        "c_hat": c_hat,
    }))
}

fn load_family(builder: &mut ReportBuilder, family: &str) -> Result<FamilySpec, CliError> {
    let trimmed = family.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        builder.read_input(Path::new(trimmed))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("family: {e}")))
}

fn write_csv(path: &Path, table: &ExhaustionTable) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["radius".to_string(), "size".to_string()];
    header.extend(table.columns.iter().cloned());
    writer.write_record(&header)?;
    for row in &table.rows {
        let mut record = vec![row.radius.to_string(), row.size.to_string()];
        record.extend(row.values.iter().map(|&v| format_f64(v)));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn cmd_exhaust(echo: Vec<String>, args: &FamilyArgs, quantity: Quantity, k: usize) -> Result<RunReport, CliError> {
    let mut builder = ReportBuilder::new(echo);
    let spec = load_family(&mut builder, &args.family)?;
    let family = spec.build(|path| load_graph(path).map(|g| g.domain))?;
    if let FamilySpec::FiniteFile { path } = &spec {
        builder.read_input(Path::new(path))?;
    }
    let mut config = ExhaustionConfig {
        tol: args.tol,
        depth_max: args.depth,
        step: args.step,
        ..ExhaustionConfig::default()
    };
    if let Some(b) = args.budget {
        config.vertex_budget = b;
    }
    let family = family.as_ref();
    let (table, verdict) = match quantity {
        Quantity::Sigma => (exhaust_spectrum(family, k, &config)?, None),
        Quantity::Cheeger => (exhaust_cheeger(family, &config)?, None),
        Quantity::Higher => (exhaust_higher(family, k, &config)?, None),
        Quantity::Lambda => (graph_eigen_limit(family, k, &config)?, None),
        Quantity::Recurrence => {
            let report = recurrence_test(family, args.tol, &config)?;
            (report.table, Some(report.verdict))
        }
    };
    // the exhaustion itself aborts on a monotonicity violation
    builder.push("monotone", true, 0.0, true);
    let soft = quantity == Quantity::Higher;
    for v in &table.violations {
        builder.push(v.clone(), false, f64::NAN, !soft);
    }
    if let Some(path) = &args.csv {
        write_csv(path, &table)?;
    }
    let budget_exceeded = table.status == Status::BudgetExceeded;
    let mut report = builder.finish(json!({
        "quantity": match quantity {
            Quantity::Sigma => "sigma",
            Quantity::Cheeger => "cheeger",
            Quantity::Higher => "higher",
            Quantity::Lambda => "lambda",
            Quantity::Recurrence => "recurrence",
        },
        "k": k,
        "config": config,
        "verdict": verdict,
        "table": table,
    }))?;
    report.budget_exceeded = budget_exceeded;
    Ok(report)
}

fn cmd_verify(echo: Vec<String>, args: &VerifyArgs) -> Result<RunReport, CliError> {
    let mut builder = ReportBuilder::new(echo);
    let options = SuiteOptions {
        seed: args.seed,
        count: if args.fixtures == FixtureMode::Only { 0 } else { args.count },
        k_max: args.k_max,
        fixtures: args.fixtures != FixtureMode::Skip,
        dump_dir: Some(args.dump_dir.clone()),
        ..SuiteOptions::default()
    };
    let report = run_suite(&options)?;
    for (name, tally) in &report.tallies {
        builder.push(name.clone(), tally.failed == 0, tally.min_slack, tally.hard);
    }
    builder.finish(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        assert_eq!(parse_schedule("1:8:2").unwrap(), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(parse_schedule("1:1048576:1024").unwrap(), vec![1.0, 1024.0, 1048576.0]);
        assert!(parse_schedule("1:8").is_err());
        assert!(parse_schedule("1:8:1").is_err());
        assert!(parse_schedule("0:8:2").is_err());
    }
}
