//! Command-line front end: every library operation behind a subcommand, with
//! reproducible seeds and machine-readable JSON/CSV output.

mod output;
mod xcheck;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{to_csv, to_json, CsvRow, OutputRecord, Value, TOOL_VERSION};
use rgg1d::montecarlo::{estimate, Statistic};
use rgg1d::recursions::Pmf;
use rgg1d::{analytic, experiments, recursions, Error, ModelParams, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Exponential,
    DoubleExponential,
    Truncated,
    Gstar,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Placement rate lambda (1/length).
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Cutoff range r.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Number of nodes n.
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Truncation point T (truncated and G* models).
    #[arg(long = "T", global = true)]
    t: Option<f64>,
    /// Placement model for simulation commands.
    #[arg(long, global = true, value_enum)]
    model: Option<Model>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Seed of the reproducible random stream (64-bit unsigned).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Series truncation tolerance for limit computations.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(
    name = "rgg1d",
    version,
    about = "Exact distributions and seeded Monte Carlo validation for 1-D exponential random geometric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form finite-n quantities.
    Exact {
        #[command(subcommand)]
        what: ExactCmd,
    },
    /// Large-n limits of probabilities and distributions.
    Limit {
        #[command(subcommand)]
        what: LimitCmd,
    },
    /// Exact distribution of the number of components.
    Components,
    /// Distribution of redundant nodes, conditioned on connectivity.
    Redundant,
    /// Monte Carlo estimate of a per-configuration statistic.
    Simulate {
        /// Statistic label, e.g. connectivity, num_holes, span,
        /// degree_count_beyond_r:2, size_m_count:1, spacing:3.
        #[arg(long)]
        statistic: String,
        /// Accept-reject on the network being connected.
        #[arg(long)]
        condition_connected: bool,
        /// Explicit parent count for the G* model (default floor(n/p)).
        #[arg(long)]
        parent_n: Option<u64>,
    },
    /// Connectivity threshold sweep over (n, a) at cutoff a * delta(n).
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        a_values: Vec<f64>,
    },
    /// Strong-law trajectories along single growing sample paths.
    Trajectory {
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<u64>,
        #[arg(long, default_value_t = 20)]
        num_seeds: u64,
    },
    /// Kolmogorov-Smirnov fit of the normalized span to the Gumbel law.
    SpanKs {
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Disconnection of the graph restricted to its first k_n ordered points.
    Restricted {
        #[arg(long)]
        a: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<u64>,
    },
    /// Run the analytic-vs-Monte-Carlo cross-validation suite.
    Xcheck,
}

#[derive(Debug, Subcommand)]
enum ExactCmd {
    /// P(connected) of the exponential model.
    Connectivity,
    /// P(connected) of the double-exponential model.
    DoubleExp,
    /// Mean and variance of hole count and total hole length.
    Holes,
    /// Moment generating functions of hole length and hole count.
    Transforms {
        #[arg(long)]
        theta: f64,
    },
    /// Limiting expected number of degree-k nodes beyond r.
    DegreeLimit,
    /// Asymptotic equal-tail confidence interval for the span.
    SpanInterval {
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Debug, Subcommand)]
enum LimitCmd {
    /// Limit of the connectivity probability.
    Pc,
    /// Limiting distribution (or one entry) of the trailing node count.
    Tail {
        #[arg(long)]
        s: Option<u64>,
    },
    /// Limiting distribution of the number of components.
    Components,
    /// Limiting distribution of the number of size-m components.
    SizeM {
        #[arg(long)]
        m: u64,
    },
}

const DEFAULT_SAMPLES: u64 = 100_000;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_TOL: f64 = 1e-10;

/// Parses `argv`, runs the command, writes the output, and returns the exit
/// code: 0 on success, 1 on usage or validation errors, 2 on xcheck failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    setup_threads();
    let (record, rows, exit_code) = match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let rendered = match cli.opts.format {
        Format::Json => to_json(&record),
        Format::Csv => to_csv(&rows),
    };
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{rendered}"),
    }
    exit_code
}

#[cfg(feature = "parallel")]
fn setup_threads() {
    // caps the worker count; results never depend on it
    if let Some(k) = std::env::var("RGG1D_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&k| k >= 1)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn setup_threads() {}

struct Ctx<'a> {
    opts: &'a GlobalOpts,
}

impl Ctx<'_> {
    fn n(&self) -> Result<u64> {
        self.opts
            .n
            .ok_or_else(|| Error::Domain("--n is required for this command".into()))
    }
    fn lambda(&self) -> Result<f64> {
        self.opts
            .lambda
            .ok_or_else(|| Error::Domain("--lambda is required for this command".into()))
    }
    fn r(&self) -> Result<f64> {
        self.opts
            .r
            .ok_or_else(|| Error::Domain("--r is required for this command".into()))
    }
    fn t(&self) -> Result<f64> {
        self.opts
            .t
            .ok_or_else(|| Error::Domain("--T is required for this command".into()))
    }
    fn samples(&self) -> u64 {
        self.opts.samples.unwrap_or(DEFAULT_SAMPLES)
    }
    fn seed(&self) -> u64 {
        self.opts.seed.unwrap_or(DEFAULT_SEED)
    }
    fn tol(&self) -> f64 {
        self.opts.tol.unwrap_or(DEFAULT_TOL)
    }
    fn model(&self) -> Model {
        self.opts.model.unwrap_or(Model::Exponential)
    }

    fn build_params(&self, parent_n: Option<u64>) -> Result<ModelParams> {
        let (n, lambda, r) = (self.n()?, self.lambda()?, self.r()?);
        match self.model() {
            Model::Exponential => ModelParams::exponential(n, lambda, r),
            Model::DoubleExponential => ModelParams::double_exponential(n, lambda, r),
            Model::Truncated => ModelParams::truncated(n, lambda, r, self.t()?),
            Model::Gstar => match parent_n {
                Some(parent) => ModelParams::gstar_with_parent(n, lambda, r, parent),
                None => ModelParams::gstar(n, lambda, r, self.t()?),
            },
        }
    }

    fn echo(&self, fields: &[EchoField]) -> Result<Value> {
        let mut entries = Vec::new();
        for field in fields {
            match field {
                EchoField::N => entries.push(("n".into(), Value::UInt(self.n()?))),
                EchoField::Lambda => entries.push(("lambda".into(), Value::Num(self.lambda()?))),
                EchoField::R => entries.push(("r".into(), Value::Num(self.r()?))),
                EchoField::T => entries.push(("T".into(), Value::Num(self.t()?))),
                EchoField::Model => entries.push((
                    "model".into(),
                    Value::Text(
                        match self.model() {
                            Model::Exponential => "exponential",
                            Model::DoubleExponential => "double_exponential",
                            Model::Truncated => "truncated",
                            Model::Gstar => "gstar",
                        }
                        .into(),
                    ),
                )),
                EchoField::Samples => entries.push(("samples".into(), Value::UInt(self.samples()))),
                EchoField::Tol => entries.push(("tol".into(), Value::Num(self.tol()))),
            }
        }
        Ok(Value::Map(entries))
    }
}

enum EchoField {
    N,
    Lambda,
    R,
    T,
    Model,
    Samples,
    Tol,
}

fn pmf_value(pmf: &Pmf) -> Value {
    Value::map(vec![
        ("label", Value::Text(pmf.label().to_string())),
        ("support", Value::uints(pmf.support().iter().copied())),
        ("probs", Value::nums(pmf.probs().iter().copied())),
        ("mean", Value::Num(pmf.mean())),
        ("total", Value::Num(pmf.total())),
    ])
}

fn pmf_rows(pmf: &Pmf, name: &str, ctx: &Ctx<'_>) -> Vec<CsvRow> {
    pmf.support()
        .iter()
        .zip(pmf.probs())
        .map(|(&k, &p)| CsvRow {
            statistic: format!("{name}:{k}"),
            n: ctx.opts.n,
            lambda: ctx.opts.lambda,
            r: ctx.opts.r,
            t: ctx.opts.t,
            value: p,
            ..CsvRow::default()
        })
        .collect()
}

fn record(command: &str, params: Value, results: Value, seed: Option<u64>) -> OutputRecord {
    OutputRecord {
        command: command.to_string(),
        params,
        results,
        seed,
        tool_version: TOOL_VERSION,
    }
}

type CommandOutput = (OutputRecord, Vec<CsvRow>, i32);

fn dispatch(cli: &Cli) -> Result<CommandOutput> {
    let ctx = Ctx { opts: &cli.opts };
    match &cli.command {
        Command::Exact { what } => exact(&ctx, what),
        Command::Limit { what } => limit(&ctx, what),
        Command::Components => components(&ctx),
        Command::Redundant => redundant(&ctx),
        Command::Simulate {
            statistic,
            condition_connected,
            parent_n,
        } => simulate(&ctx, statistic, *condition_connected, *parent_n),
        Command::Sweep { n_values, a_values } => sweep(&ctx, n_values, a_values),
        Command::Trajectory {
            n_values,
            num_seeds,
        } => trajectory(&ctx, n_values, *num_seeds),
        Command::SpanKs { threshold } => span_ks(&ctx, *threshold),
        Command::Restricted { a, n_values } => restricted(&ctx, *a, n_values),
        Command::Xcheck => run_xcheck(&ctx),
    }
}

fn exact(ctx: &Ctx<'_>, what: &ExactCmd) -> Result<CommandOutput> {
    use EchoField as F;
    match what {
        ExactCmd::Connectivity => {
            let p = analytic::connectivity_prob(ctx.n()?, ctx.lambda()?, ctx.r()?)?;
            let rows = vec![CsvRow {
                statistic: "p_connected".into(),
                n: ctx.opts.n,
                lambda: ctx.opts.lambda,
                r: ctx.opts.r,
                value: p,
                ..CsvRow::default()
            }];
            Ok((
                record(
                    "exact connectivity",
                    ctx.echo(&[F::N, F::Lambda, F::R])?,
                    Value::map(vec![("p_connected", Value::Num(p))]),
                    None,
                ),
                rows,
                0,
            ))
        }
        ExactCmd::DoubleExp => {
            let p = analytic::double_exp_connectivity_prob(ctx.n()?, ctx.lambda()?, ctx.r()?)?;
            let rows = vec![CsvRow {
                statistic: "p_connected_double_exp".into(),
                n: ctx.opts.n,
                lambda: ctx.opts.lambda,
                r: ctx.opts.r,
                value: p,
                ..CsvRow::default()
            }];
            Ok((
                record(
                    "exact double-exp",
                    ctx.echo(&[F::N, F::Lambda, F::R])?,
                    Value::map(vec![("p_connected", Value::Num(p))]),
                    None,
                ),
                rows,
                0,
            ))
        }
        ExactCmd::Holes => {
            let (n, lambda, r) = (ctx.n()?, ctx.lambda()?, ctx.r()?);
            let length = analytic::hole_length_moments(n, lambda, r)?;
            let count = analytic::hole_count_moments(n, lambda, r)?;
            let results = Value::map(vec![
                (
                    "hole_length",
                    Value::map(vec![
                        ("mean", Value::Num(length.mean)),
                        ("variance", Value::Num(length.variance)),
                    ]),
                ),
                (
                    "hole_count",
                    Value::map(vec![
                        ("mean", Value::Num(count.mean)),
                        ("variance", Value::Num(count.variance)),
                    ]),
                ),
            ]);
            let mk = |stat: &str, value: f64| CsvRow {
                statistic: stat.into(),
                n: Some(n),
                lambda: Some(lambda),
                r: Some(r),
                value,
                ..CsvRow::default()
            };
            let rows = vec![
                mk("hole_length_mean", length.mean),
                mk("hole_length_variance", length.variance),
                mk("hole_count_mean", count.mean),
                mk("hole_count_variance", count.variance),
            ];
            Ok((
                record(
                    "exact holes",
                    ctx.echo(&[F::N, F::Lambda, F::R])?,
                    results,
                    None,
                ),
                rows,
                0,
            ))
        }
        ExactCmd::Transforms { theta } => {
            let (n, lambda, r) = (ctx.n()?, ctx.lambda()?, ctx.r()?);
            let length = analytic::hole_length_mgf(n, lambda, r, *theta)?;
            let count = analytic::hole_count_mgf(n, lambda, r, *theta)?;
            let results = Value::map(vec![
                ("theta", Value::Num(*theta)),
                ("hole_length_mgf", Value::Num(length)),
                ("hole_count_mgf", Value::Num(count)),
            ]);
            let mk = |stat: String, value: f64| CsvRow {
                statistic: stat,
                n: Some(n),
                lambda: Some(lambda),
                r: Some(r),
                value,
                ..CsvRow::default()
            };
            let rows = vec![
                mk(format!("hole_length_mgf:{theta}"), length),
                mk(format!("hole_count_mgf:{theta}"), count),
            ];
            Ok((
                record(
                    "exact transforms",
                    ctx.echo(&[F::N, F::Lambda, F::R])?,
                    results,
                    None,
                ),
                rows,
                0,
            ))
        }
        ExactCmd::DegreeLimit => {
            let v = analytic::degree_count_limit(ctx.lambda()?, ctx.r()?)?;
            let rows = vec![CsvRow {
                statistic: "degree_count_limit".into(),
                lambda: ctx.opts.lambda,
                r: ctx.opts.r,
                value: v,
                ..CsvRow::default()
            }];
            Ok((
                record(
                    "exact degree-limit",
                    ctx.echo(&[F::Lambda, F::R])?,
                    Value::map(vec![("degree_count_limit", Value::Num(v))]),
                    None,
                ),
                rows,
                0,
            ))
        }
        ExactCmd::SpanInterval { alpha } => {
            let (n, lambda) = (ctx.n()?, ctx.lambda()?);
            let (low, high) = analytic::span_confidence_interval(n, lambda, *alpha)?;
            let results = Value::map(vec![
                ("alpha", Value::Num(*alpha)),
                ("low", Value::Num(low)),
                ("high", Value::Num(high)),
            ]);
            let mk = |stat: String, value: f64| CsvRow {
                statistic: stat,
                n: Some(n),
                lambda: Some(lambda),
                value,
                ..CsvRow::default()
            };
            let rows = vec![
                mk(format!("span_interval_low:{alpha}"), low),
                mk(format!("span_interval_high:{alpha}"), high),
            ];
            Ok((
                record(
                    "exact span-interval",
                    ctx.echo(&[F::N, F::Lambda])?,
                    results,
                    None,
                ),
                rows,
                0,
            ))
        }
    }
}

fn limit(ctx: &Ctx<'_>, what: &LimitCmd) -> Result<CommandOutput> {
    use EchoField as F;
    let (lambda, r, tol) = (ctx.lambda()?, ctx.r()?, ctx.tol());
    match what {
        LimitCmd::Pc => {
            let lim = analytic::connectivity_prob_limit(lambda, r, tol)?;
            let results = Value::map(vec![
                ("p_connected_limit", Value::Num(lim.value)),
                ("tail_bound", Value::Num(lim.tail_bound)),
                ("terms_used", Value::UInt(lim.terms_used)),
            ]);
            let rows = vec![CsvRow {
                statistic: "p_connected_limit".into(),
                lambda: Some(lambda),
                r: Some(r),
                value: lim.value,
                ..CsvRow::default()
            }];
            Ok((
                record(
                    "limit pc",
                    ctx.echo(&[F::Lambda, F::R, F::Tol])?,
                    results,
                    None,
                ),
                rows,
                0,
            ))
        }
        LimitCmd::Tail { s } => match s {
            Some(s) => {
                let p = recursions::tail_node_count_prob(*s, lambda, r, tol)?;
                let results =
                    Value::map(vec![("s", Value::UInt(*s)), ("probability", Value::Num(p))]);
                let rows = vec![CsvRow {
                    statistic: format!("tail_node_count:{s}"),
                    lambda: Some(lambda),
                    r: Some(r),
                    value: p,
                    ..CsvRow::default()
                }];
                Ok((
                    record(
                        "limit tail",
                        ctx.echo(&[F::Lambda, F::R, F::Tol])?,
                        results,
                        None,
                    ),
                    rows,
                    0,
                ))
            }
            None => {
                let pmf = recursions::tail_node_count_pmf(lambda, r, tol)?;
                let rows = pmf_rows(&pmf, "tail_node_count", ctx);
                Ok((
                    record(
                        "limit tail",
                        ctx.echo(&[F::Lambda, F::R, F::Tol])?,
                        pmf_value(&pmf),
                        None,
                    ),
                    rows,
                    0,
                ))
            }
        },
        LimitCmd::Components => {
            let pmf = recursions::component_pmf_limit(lambda, r, tol)?;
            let rows = pmf_rows(&pmf, "component_count_limit", ctx);
            Ok((
                record(
                    "limit components",
                    ctx.echo(&[F::Lambda, F::R, F::Tol])?,
                    pmf_value(&pmf),
                    None,
                ),
                rows,
                0,
            ))
        }
        LimitCmd::SizeM { m } => {
            let pmf = recursions::size_m_component_pmf_limit(*m, lambda, r, tol)?;
            let rows = pmf_rows(&pmf, &format!("size_{m}_count_limit"), ctx);
            Ok((
                record(
                    "limit size-m",
                    ctx.echo(&[F::Lambda, F::R, F::Tol])?,
                    pmf_value(&pmf),
                    None,
                ),
                rows,
                0,
            ))
        }
    }
}

fn components(ctx: &Ctx<'_>) -> Result<CommandOutput> {
    let pmf = recursions::component_pmf(ctx.n()?, ctx.lambda()?, ctx.r()?)?;
    let rows = pmf_rows(&pmf, "component_count", ctx);
    Ok((
        record(
            "components",
            ctx.echo(&[EchoField::N, EchoField::Lambda, EchoField::R])?,
            pmf_value(&pmf),
            None,
        ),
        rows,
        0,
    ))
}

fn redundant(ctx: &Ctx<'_>) -> Result<CommandOutput> {
    let pmf = recursions::redundant_pmf(ctx.n()?, ctx.lambda()?, ctx.r()?)?;
    let rows = pmf_rows(&pmf, "redundant", ctx);
    Ok((
        record(
            "redundant",
            ctx.echo(&[EchoField::N, EchoField::Lambda, EchoField::R])?,
            pmf_value(&pmf),
            None,
        ),
        rows,
        0,
    ))
}

fn simulate(
    ctx: &Ctx<'_>,
    statistic: &str,
    condition_connected: bool,
    parent_n: Option<u64>,
) -> Result<CommandOutput> {
    let stat: Statistic = statistic.parse()?;
    let params = ctx.build_params(parent_n)?;
    let est = estimate(
        &params,
        stat,
        ctx.samples(),
        ctx.seed(),
        condition_connected,
    )?;
    let results = Value::map(vec![
        ("statistic", Value::Text(est.statistic.clone())),
        ("mean", Value::Num(est.mean)),
        ("stderr", Value::Num(est.stderr)),
        ("num_samples", Value::UInt(est.num_samples)),
        ("attempts", Value::UInt(est.attempts)),
        ("condition_connected", Value::Bool(condition_connected)),
    ]);
    let rows = vec![CsvRow {
        statistic: est.statistic.clone(),
        n: ctx.opts.n,
        lambda: ctx.opts.lambda,
        r: ctx.opts.r,
        t: ctx.opts.t,
        value: est.mean,
        stderr: Some(est.stderr),
        seed: Some(est.seed),
        ..CsvRow::default()
    }];
    Ok((
        record(
            "simulate",
            ctx.echo(&[
                EchoField::Model,
                EchoField::N,
                EchoField::Lambda,
                EchoField::R,
                EchoField::Samples,
            ])?,
            results,
            Some(est.seed),
        ),
        rows,
        0,
    ))
}

fn sweep(ctx: &Ctx<'_>, n_values: &[u64], a_values: &[f64]) -> Result<CommandOutput> {
    let (lambda, t) = (ctx.lambda()?, ctx.t()?);
    let rows_data =
        experiments::threshold_sweep(lambda, t, n_values, a_values, ctx.samples(), ctx.seed())?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for row in &rows_data {
        items.push(Value::map(vec![
            ("model", Value::Text(row.model.into())),
            ("n", Value::UInt(row.n)),
            ("a", Value::Num(row.a)),
            ("cutoff", Value::Num(row.cutoff)),
            ("estimate", Value::Num(row.estimate)),
            ("stderr", Value::Num(row.stderr)),
            ("prediction", Value::Num(row.prediction)),
            ("seed", Value::UInt(row.seed)),
        ]));
        rows.push(CsvRow {
            statistic: format!("p_connected:{}", row.model),
            n: Some(row.n),
            lambda: Some(lambda),
            r: Some(row.cutoff),
            t: Some(t),
            a: Some(row.a),
            value: row.estimate,
            stderr: Some(row.stderr),
            seed: Some(row.seed),
        });
        rows.push(CsvRow {
            statistic: format!("prediction:{}", row.model),
            n: Some(row.n),
            lambda: Some(lambda),
            r: Some(row.cutoff),
            t: Some(t),
            a: Some(row.a),
            value: row.prediction,
            stderr: None,
            seed: Some(row.seed),
        });
    }
    Ok((
        record(
            "sweep",
            ctx.echo(&[EchoField::Lambda, EchoField::T, EchoField::Samples])?,
            Value::map(vec![("rows", Value::List(items))]),
            Some(ctx.seed()),
        ),
        rows,
        0,
    ))
}

fn trajectory(ctx: &Ctx<'_>, n_values: &[u64], num_seeds: u64) -> Result<CommandOutput> {
    let params = match ctx.model() {
        Model::Exponential => ModelParams::exponential(2, ctx.lambda()?, 0.0)?,
        Model::DoubleExponential => ModelParams::double_exponential(2, ctx.lambda()?, 0.0)?,
        Model::Truncated => ModelParams::truncated(2, ctx.lambda()?, 0.0, ctx.t()?)?,
        Model::Gstar => ModelParams::gstar(2, ctx.lambda()?, 0.0, ctx.t()?)?,
    };
    let table = experiments::strong_law_trajectory(&params, n_values, num_seeds, ctx.seed())?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for row in &table.rows {
        items.push(Value::map(vec![
            ("seed", Value::UInt(row.seed)),
            ("n", Value::UInt(row.n)),
            ("conn_distance", Value::Num(row.conn_distance)),
            ("largest_nn_distance", Value::Num(row.largest_nn_distance)),
            ("conn_over_log", Value::Num(row.conn_over_log)),
            ("conn_liminf_ratio", Value::Num(row.conn_liminf_ratio)),
            ("scaled_conn", Value::Num(row.scaled_conn)),
            ("scaled_nn", Value::Num(row.scaled_nn)),
        ]));
        for (stat, value) in [
            ("conn_distance", row.conn_distance),
            ("largest_nn_distance", row.largest_nn_distance),
            ("conn_over_log", row.conn_over_log),
            ("conn_liminf_ratio", row.conn_liminf_ratio),
            ("scaled_conn", row.scaled_conn),
            ("scaled_nn", row.scaled_nn),
        ] {
            rows.push(CsvRow {
                statistic: stat.into(),
                n: Some(row.n),
                lambda: ctx.opts.lambda,
                t: ctx.opts.t,
                value,
                seed: Some(row.seed),
                ..CsvRow::default()
            });
        }
    }
    Ok((
        record(
            "trajectory",
            ctx.echo(&[EchoField::Model, EchoField::Lambda])?,
            Value::map(vec![
                ("model", Value::Text(table.model.into())),
                ("rows", Value::List(items)),
            ]),
            Some(ctx.seed()),
        ),
        rows,
        0,
    ))
}

fn span_ks(ctx: &Ctx<'_>, threshold: Option<f64>) -> Result<CommandOutput> {
    let threshold = threshold.unwrap_or(experiments::DEFAULT_KS_THRESHOLD);
    let result = experiments::span_gumbel_ks(
        ctx.n()?,
        ctx.lambda()?,
        ctx.samples(),
        ctx.seed(),
        threshold,
    )?;
    let results = Value::map(vec![
        ("ks_statistic", Value::Num(result.ks_statistic)),
        ("threshold", Value::Num(result.threshold)),
        ("pass", Value::Bool(result.pass)),
        ("num_samples", Value::UInt(result.num_samples)),
    ]);
    let rows = vec![CsvRow {
        statistic: "span_gumbel_ks".into(),
        n: ctx.opts.n,
        lambda: ctx.opts.lambda,
        value: result.ks_statistic,
        seed: Some(result.seed),
        ..CsvRow::default()
    }];
    Ok((
        record(
            "span-ks",
            ctx.echo(&[EchoField::N, EchoField::Lambda, EchoField::Samples])?,
            results,
            Some(result.seed),
        ),
        rows,
        0,
    ))
}

fn restricted(ctx: &Ctx<'_>, a: f64, n_values: &[u64]) -> Result<CommandOutput> {
    let (lambda, r) = (ctx.lambda()?, ctx.r()?);
    let rows_data = experiments::restricted_graph_experiment(
        lambda,
        r,
        a,
        n_values,
        ctx.samples(),
        ctx.seed(),
    )?;
    if rows_data.iter().any(|row| !row.hypothesis_ok) {
        eprintln!(
            "warning: a = {a} does not exceed 1/(lambda r) = {}; the almost-sure \
             connectivity statement does not apply",
            1.0 / (lambda * r)
        );
    }
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for row in &rows_data {
        items.push(Value::map(vec![
            ("n", Value::UInt(row.n)),
            ("k_n", Value::UInt(row.k_n)),
            ("estimate", Value::Num(row.estimate)),
            ("stderr", Value::Num(row.stderr)),
            ("union_bound", Value::Num(row.union_bound)),
            ("hypothesis_ok", Value::Bool(row.hypothesis_ok)),
            ("seed", Value::UInt(row.seed)),
        ]));
        rows.push(CsvRow {
            statistic: "p_restricted_disconnected".into(),
            n: Some(row.n),
            lambda: Some(lambda),
            r: Some(r),
            a: Some(a),
            value: row.estimate,
            stderr: Some(row.stderr),
            seed: Some(row.seed),
            ..CsvRow::default()
        });
        rows.push(CsvRow {
            statistic: "union_bound".into(),
            n: Some(row.n),
            lambda: Some(lambda),
            r: Some(r),
            a: Some(a),
            value: row.union_bound,
            stderr: None,
            seed: Some(row.seed),
            ..CsvRow::default()
        });
    }
    Ok((
        record(
            "restricted",
            ctx.echo(&[EchoField::Lambda, EchoField::R, EchoField::Samples])?,
            Value::map(vec![("a", Value::Num(a)), ("rows", Value::List(items))]),
            Some(ctx.seed()),
        ),
        rows,
        0,
    ))
}

fn run_xcheck(ctx: &Ctx<'_>) -> Result<CommandOutput> {
    let report = xcheck::run(ctx.seed(), ctx.samples())?;
    let mut comparison_items = Vec::new();
    let mut rows = Vec::new();
    for c in &report.comparisons {
        comparison_items.push(Value::map(vec![
            ("name", Value::Text(c.name.clone())),
            ("exact", Value::Num(c.exact)),
            ("mc_mean", Value::Num(c.mc_mean)),
            ("mc_stderr", Value::Num(c.mc_stderr)),
            ("z", Value::Num(c.z)),
            ("pass", Value::Bool(c.pass)),
        ]));
        rows.push(CsvRow {
            statistic: format!("z:{}", c.name),
            value: c.z,
            stderr: Some(c.mc_stderr),
            seed: Some(report.seed),
            ..CsvRow::default()
        });
    }
    let mut invariant_items = Vec::new();
    for inv in &report.invariants {
        invariant_items.push(Value::map(vec![
            ("name", Value::Text(inv.name.clone())),
            ("deviation", Value::Num(inv.deviation)),
            ("pass", Value::Bool(inv.pass)),
        ]));
        rows.push(CsvRow {
            statistic: format!("invariant:{}", inv.name),
            value: if inv.pass { 1.0 } else { 0.0 },
            seed: Some(report.seed),
            ..CsvRow::default()
        });
    }
    rows.push(CsvRow {
        statistic: "max_abs_z".into(),
        value: report.max_abs_z,
        seed: Some(report.seed),
        ..CsvRow::default()
    });
    let results = Value::map(vec![
        ("samples", Value::UInt(report.samples)),
        ("max_abs_z", Value::Num(report.max_abs_z)),
        ("z_threshold", Value::Num(xcheck::Z_THRESHOLD)),
        (
            "note",
            Value::Text(
                "per-comparison two-sided false-alarm at |z|<=4 is ~6e-5; \
                 Bonferroni over the suite keeps the family rate near 1e-3"
                    .into(),
            ),
        ),
        ("all_pass", Value::Bool(report.all_pass)),
        ("comparisons", Value::List(comparison_items)),
        ("invariants", Value::List(invariant_items)),
    ]);
    let exit = if report.all_pass { 0 } else { 2 };
    Ok((
        record(
            "xcheck",
            ctx.echo(&[EchoField::Samples])?,
            results,
            Some(report.seed),
        ),
        rows,
        exit,
    ))
}
