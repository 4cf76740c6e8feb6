//! `ordstat` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse or validation
//! error, 3 unsupported shape, 4 numerical non-convergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordstat::apps::{simulate_outputs, MsGsc, MsGscConfig, OutageConvention};
use ordstat::density::{format_value, tabulate, GridAxis, JointDensity, Table};
use ordstat::distributions::{parse_distribution, Distribution};
use ordstat::exact_exp::ExactExp;
use ordstat::generic_joint::{GenericConfig, GenericJoint};
use ordstat::ilt::IltConfig;
use ordstat::mc_oracle::{sample_partial_sums, BinSpec, EmpiricalDensity, SampleSpec};
use ordstat::partition::{Case, Partition, Theorem, TheoremShape};
use ordstat::verify::{self, Suite, VerifyConfig};
use ordstat::Error;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "ordstat", version, about = "Joint densities of partial sums of ordered random variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a density at one point (`--at`) or on a grid (`--grid`).
    Eval(EvalArgs),
    /// Evaluate a density on a grid and write CSV.
    Tabulate(EvalArgs),
    /// Run the verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// MS-GSC combiner output cdf or stage probabilities.
    Msgsc(MsgscArgs),
    /// Draw Monte Carlo group sums, raw or as a histogram.
    Sample(SampleArgs),
}

#[derive(Args, Clone)]
struct Selector {
    /// Theorem shape T1..T6.
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<Theorem>,
    /// Position case a..d of the separated rank (T5 only).
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    /// Number of variables.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Number of best ranks used; defaults to K.
    #[arg(long = "Ks")]
    ks: Option<usize>,
    /// Separated rank (T2, T5) or head length (T3, T6).
    #[arg(long)]
    m: Option<usize>,
    /// Explicit grouping, e.g. `K=4;Ks=3;groups=[1][2-3]`.
    #[arg(long, conflicts_with = "theorem")]
    partition: Option<String>,
    /// `exp:<mean>`, `halfnormal:<sigma>` or `uniform:<width>`.
    #[arg(long, default_value = "exp:1")]
    dist: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathChoice {
    /// Closed forms for exponential variables, numeric otherwise.
    Auto,
    Exact,
    Numeric,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    selector: Selector,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// One `start:end:count` axis per coordinate; repeat for 2-D.
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    path: PathChoice,
    /// Target digits of the numerical inverse transform (4..=12).
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run; all when omitted.
    #[arg(long, value_parser = parse_suite)]
    suite: Vec<Suite>,
    /// Deepest nest for the integral identities.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "max-k", default_value_t = 4)]
    max_k: usize,
    /// Monte Carlo draws per shape.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Random configurations per check.
    #[arg(long, default_value_t = 20)]
    configs: usize,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionChoice {
    FullSum,
    Outage,
}

#[derive(Args)]
struct MsgscArgs {
    /// Number of diversity paths.
    #[arg(long = "L")]
    l: usize,
    /// Output SNR threshold.
    #[arg(long = "gamma-t")]
    gamma_t: f64,
    #[arg(long, default_value = "exp:1")]
    dist: String,
    #[arg(long, value_enum, default_value = "full-sum")]
    convention: ConventionChoice,
    /// Report the probability of stage `m` instead of the output cdf.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    at: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// Add simulated cdf values from this many draws.
    #[arg(long)]
    simulate: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    selector: Selector,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// One `start:end:count` bin axis per coordinate; raw draws otherwise.
    #[arg(long)]
    bins: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Io(std::io::Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedShape(_) | Error::UnsupportedOrdering(_) => 3,
        Error::IltNonConvergence { .. } | Error::Quadrature { .. } => 4,
        _ => 2,
    }
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_point(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad coordinate `{v}`"))))
        .collect()
}

fn require(v: Option<usize>, flag: &str) -> Result<usize, Error> {
    v.ok_or_else(|| Error::Parse(format!("--{flag} is required")))
}

impl Selector {
    fn partition(&self) -> Result<Partition, Error> {
        match &self.partition {
            Some(p) => Partition::parse(p),
            None => self.shape()?.partition(),
        }
    }

    fn shape(&self) -> Result<TheoremShape, Error> {
        if let Some(p) = &self.partition {
            return Partition::parse(p)?.classify();
        }
        let theorem = self.theorem.ok_or_else(|| Error::Parse("either --theorem or --partition is required".into()))?;
        let k = require(self.k, "K")?;
        let ks = self.ks.unwrap_or(k);
        let m = match (theorem, self.m, self.case) {
            (Theorem::T1 | Theorem::T4, _, _) => None,
            (Theorem::T5, None, Some(case)) => Some(match case {
                Case::A => 1,
                Case::C => ks.saturating_sub(1),
                Case::D => ks,
                Case::B => return Err(Error::Parse("case b needs --m".into())),
            }),
            (_, m, _) => Some(require(m, "m")?),
        };
        if let (Some(case), Some(m)) = (self.case, m) {
            if theorem != Theorem::T5 {
                return Err(Error::Parse("--case applies to T5 only".into()));
            }
            let actual = if ks == 2 && m == 1 { Case::D } else { Case::of(m, ks).map_err(|e| Error::Parse(e.to_string()))? };
            if actual != case {
                return Err(Error::Parse(format!("m = {m} with Ks = {ks} is case {actual}, not case {case}")));
            }
        }
        TheoremShape::new(theorem, k, ks, m).map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::Parse(msg),
            other => other,
        })
    }

    fn dist(&self) -> Result<Arc<dyn Distribution>, Error> {
        parse_distribution(&self.dist)
    }
}

fn is_exponential(dist: &dyn Distribution) -> bool {
    dist.name().starts_with("exp:")
}

fn density_for(sel: &Selector, path: PathChoice, digits: Option<u32>) -> Result<(JointDensity, TheoremShape), Error> {
    let shape = sel.shape()?;
    let dist = sel.dist()?;
    let exact = match path {
        PathChoice::Auto => is_exponential(dist.as_ref()),
        PathChoice::Exact => {
            if !is_exponential(dist.as_ref()) {
                return Err(Error::Parse("the exact path needs an exponential distribution".into()));
            }
            true
        }
        PathChoice::Numeric => false,
    };
    let d = if exact {
        ExactExp::new(dist.mean())?.density(&shape)?
    } else {
        let mut cfg = GenericConfig::default();
        if let Some(d) = digits {
            cfg.ilt = IltConfig::with_digits(d);
        }
        GenericJoint::new(dist)?.with_config(cfg).density(&shape)?
    };
    Ok((d, shape))
}

fn shape_text(s: &TheoremShape) -> String {
    let mut t = format!("{} K={} Ks={}", s.theorem, s.k, s.ks);
    if let Some(m) = s.m {
        t += &format!(" m={m}");
    }
    if s.swapped {
        t += " swapped";
    }
    t
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn base_metadata() -> Vec<(String, String)> {
    vec![
        ("command".into(), command_line()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
    ]
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, std::io::Error> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_axes(specs: &[String]) -> Result<Vec<GridAxis>, Error> {
    specs.iter().map(|g| GridAxis::parse(g)).collect()
}

fn cmd_eval(args: &EvalArgs, require_grid: bool) -> Result<(), Failure> {
    let (density, shape) = density_for(&args.selector, args.path, args.digits)?;
    let mut meta = base_metadata();
    meta.push(("shape".into(), shape_text(&shape)));
    meta.push(("coordinates".into(), density.meta.grouping.clone()));
    meta.push(("distribution".into(), density.meta.distribution.clone()));
    meta.push(("path".into(), density.meta.path.to_string()));
    if let Some(d) = args.digits {
        meta.push(("ilt_digits".into(), d.to_string()));
    }
    let names: Vec<&str> = ["x", "y"][..density.dim().min(2)].to_vec();
    match (&args.at, args.grid.is_empty()) {
        (Some(_), false) => Err(Error::Parse("use either --at or --grid".into()).into()),
        (Some(at), true) if !require_grid => {
            let z = parse_point(at)?;
            if z.len() != density.dim() {
                return Err(Error::Parse(format!("--at needs {} coordinates, got {}", density.dim(), z.len())).into());
            }
            let v = density.evaluate(&z)?;
            match &args.output {
                Some(_) => {
                    let mut row = z.clone();
                    row.push(v);
                    let mut columns: Vec<String> = names.iter().map(|s| s.to_string()).collect();
                    columns.push("value".into());
                    Table { columns, rows: vec![row] }.write_csv(open_output(&args.output)?, &meta)?;
                }
                None => println!("{}", format_value(v)),
            }
            Ok(())
        }
        (_, false) => {
            let axes = parse_axes(&args.grid)?;
            if axes.len() != density.dim() {
                return Err(Error::Parse(format!("--grid needs {} axes, got {}", density.dim(), axes.len())).into());
            }
            let table = tabulate(|z| density.evaluate(z), &axes, &names)?;
            table.write_csv(open_output(&args.output)?, &meta)?;
            Ok(())
        }
        _ => Err(Error::Parse(if require_grid { "--grid is required" } else { "--at or --grid is required" }.into()).into()),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.depth == 0 || args.depth > 4 {
        return Err(Error::Parse(format!("--depth must lie in 1..=4, got {}", args.depth)).into());
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        depth: args.depth,
        max_k: args.max_k,
        mc_samples: args.samples,
        configs: args.configs,
        ..VerifyConfig::default()
    };
    let suites: Vec<Suite> = if args.suite.is_empty() { Suite::ALL.to_vec() } else { args.suite.clone() };
    let report = verify::run(&cfg, &suites);
    let mut out = open_output(&args.output)?;
    out.write_all(report.to_json().as_bytes())?;
    out.flush()?;
    eprint!("{}", report.summary());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_msgsc(args: &MsgscArgs) -> Result<(), Failure> {
    let dist = parse_distribution(&args.dist)?;
    let convention = match args.convention {
        ConventionChoice::FullSum => OutageConvention::FullSum,
        ConventionChoice::Outage => OutageConvention::Outage,
    };
    let cfg = MsGscConfig::new(args.l, args.gamma_t, dist.mean())
        .map_err(|e| Error::Parse(e.to_string()))?
        .with_convention(convention);
    let ms = if is_exponential(dist.as_ref()) { MsGsc::exact(cfg)? } else { MsGsc::generic(cfg, dist.clone())? };
    let xs: Vec<f64> = match (&args.at, &args.grid) {
        (Some(at), None) => parse_point(at)?,
        (None, Some(g)) => GridAxis::parse(g)?.points(),
        _ => return Err(Error::Parse("exactly one of --at or --grid is required".into()).into()),
    };
    let mut columns = vec!["x".to_string(), "value".to_string()];
    let simulated = match args.simulate {
        Some(n) if args.m.is_none() => {
            columns.push("simulated".into());
            columns.push("sigma".into());
            let mut out = simulate_outputs(&cfg, dist.as_ref(), n, args.seed);
            out.sort_unstable_by(f64::total_cmp);
            Some(out)
        }
        Some(_) => return Err(Error::Parse("--simulate applies to the output cdf only".into()).into()),
        None => None,
    };
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = match args.m {
            Some(m) => ms.stage_probability(m, x)?,
            None => ms.output_cdf(x)?,
        };
        let mut row = vec![x, v];
        if let Some(s) = &simulated {
            let p = s.partition_point(|&o| o < x) as f64 / s.len() as f64;
            row.push(p);
            row.push((p * (1.0 - p) / s.len() as f64).sqrt());
        }
        rows.push(row);
    }
    let mut meta = base_metadata();
    meta.push(("distribution".into(), dist.name()));
    meta.push(("convention".into(), format!("{convention:?}")));
    if args.simulate.is_some() {
        meta.push(("seed".into(), args.seed.to_string()));
    }
    Table { columns, rows }.write_csv(open_output(&args.output)?, &meta)?;
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> Result<(), Failure> {
    let partition = args.selector.partition()?;
    let dist = args.selector.dist()?;
    let spec = SampleSpec::new(dist.clone(), partition.clone(), args.samples, args.seed)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let samples = sample_partial_sums(&spec);
    let mut meta = base_metadata();
    meta.push(("partition".into(), partition.to_string()));
    meta.push(("distribution".into(), dist.name()));
    meta.push(("seed".into(), args.seed.to_string()));
    let table = if args.bins.is_empty() {
        let columns = (1..=samples.dim).map(|i| format!("g{i}")).collect();
        Table { columns, rows: samples.rows().map(|r| r.to_vec()).collect() }
    } else {
        let axes = parse_axes(&args.bins)?;
        let bins = BinSpec::uniform(&axes.iter().map(|a| (a.start, a.end, a.count)).collect::<Vec<_>>())?;
        let h = EmpiricalDensity::from_samples(&samples, bins).map_err(|e| Error::Parse(e.to_string()))?;
        meta.push(("outside".into(), h.outside.to_string()));
        h.to_table()
    };
    table.write_csv(open_output(&args.output)?, &meta)?;
    Ok(())
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("ORDSTAT_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Parse(format!("ORDSTAT_THREADS must be a count, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Parse(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().map_err(Failure::from).and_then(|_| match &cli.command {
        Command::Eval(a) => cmd_eval(a, false),
        Command::Tabulate(a) => cmd_eval(a, true),
        Command::Verify(a) => cmd_verify(a),
        Command::Msgsc(a) => cmd_msgsc(a),
        Command::Sample(a) => cmd_sample(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
