use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evidential::explain::{check_ci, Explainer, LogBase, Negligible, RelevanceParams, SensitivityMethod};
use evidential::io::{self, serialize_report, BeliefRow, Format, Report};
use evidential::{Error, ValuationNetwork};

/// Belief-function inference and explanation over valuation networks.
#[derive(Debug, Parser)]
#[command(name = "evidential", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the marginal bba on one or more variables.
    Marginal {
        #[command(flatten)]
        common: Common,
        /// Comma-separated variable names.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        /// Evidence ids to leave out.
        #[arg(long, value_delimiter = ',')]
        exclude_evidence: Vec<String>,
    },
    /// Print bel and pl of subsets of one variable's frame.
    Query {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        /// Brace lists separated by semicolons, e.g. "{0,1};{2,3}".
        #[arg(long)]
        subsets: String,
        #[arg(long, value_delimiter = ',')]
        exclude_evidence: Vec<String>,
    },
    /// How each piece of evidence moves bel and pl of the given subsets.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        #[arg(long)]
        subsets: String,
        /// Evidence ids to report on; all evidence by default.
        #[arg(long, value_delimiter = ',')]
        evidence: Vec<String>,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Discount step for the numeric method.
        #[arg(long, required_if_eq("method", "numeric"))]
        delta: Option<f64>,
    },
    /// Information content contributed by each piece of evidence.
    Info {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = Base::Ten)]
        base: Base,
        /// Also report the joint contribution of these evidence ids.
        #[arg(long, value_delimiter = ',')]
        subset_of_evidence: Option<Vec<String>>,
    },
    /// Greedy selection of the most informative evidence.
    Relevant {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        /// Smallest worthwhile increase in information.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Read epsilon as an absolute amount instead of a fraction of the
        /// information selected so far.
        #[arg(long)]
        absolute: bool,
        #[arg(long, default_value_t = 0.1)]
        prune_ratio: f64,
        #[arg(long, value_enum, default_value_t = Base::Ten)]
        base: Base,
    },
    /// Test conditional independence of two variable sets given a third.
    CheckCi {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        left: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        right: Vec<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check a network file and list its diagnostics.
    Validate {
        /// Network file, or `@captain` for the bundled example.
        #[arg(long)]
        network: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Network file, or `@captain` for the bundled example.
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Removal,
    Numeric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
    #[value(name = "10")]
    Ten,
}

impl From<Base> for LogBase {
    fn from(b: Base) -> Self {
        match b {
            Base::E => LogBase::E,
            Base::Two => LogBase::Two,
            Base::Ten => LogBase::Ten,
        }
    }
}

/// Exit status 2: the input could not be read or is not a valid network.
/// Exit status 3: the network loaded but the query failed.
enum Failure {
    Input(String),
    Query(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Query(e)
    }
}

fn read_network(path: &PathBuf) -> Result<(ValuationNetwork, Vec<evidential::network::Diagnostic>), Failure> {
    let text = if path.as_os_str() == "@captain" {
        io::captain_document().to_string()
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?
    };
    io::load_network(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<ValuationNetwork, Failure> {
    let (net, warnings) = read_network(path)?;
    for w in warnings {
        eprintln!("{w}");
    }
    Ok(net)
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Marginal {
            common,
            target,
            exclude_evidence,
        } => {
            let net = load(&common.network)?;
            let m = net.marginal(&strs(&target), &strs(&exclude_evidence))?;
            Ok(serialize_report(Report::Mass(&m), common.format.into()))
        }
        Command::Query {
            common,
            target,
            subsets,
            exclude_evidence,
        } => {
            let net = load(&common.network)?;
            let m = net.marginal(&[&target], &strs(&exclude_evidence))?;
            let rows = io::parse_subsets(m.domain(), &subsets)?
                .into_iter()
                .map(|s| BeliefRow::new(&m, s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(serialize_report(Report::Beliefs(&rows), common.format.into()))
        }
        Command::Sensitivity {
            common,
            target,
            subsets,
            evidence,
            method,
            delta,
        } => {
            let net = load(&common.network)?;
            let ex = Explainer::new(&net, &target)?;
            let queries = io::parse_subsets(ex.domain(), &subsets)?;
            let method = match method {
                Method::Exact => SensitivityMethod::Exact,
                Method::Removal => SensitivityMethod::Removal,
                Method::Numeric => SensitivityMethod::Numeric {
                    delta: delta.expect("clap requires --delta"),
                },
            };
            let report = ex.sensitivity_report(&strs(&evidence), &queries, method)?;
            Ok(serialize_report(Report::Sensitivity(&report), common.format.into()))
        }
        Command::Info {
            common,
            target,
            base,
            subset_of_evidence,
        } => {
            let net = load(&common.network)?;
            let ex = Explainer::new(&net, &target)?.with_base(base.into());
            let subset = subset_of_evidence.as_deref().map(strs);
            let report = ex.info_report(subset.as_deref())?;
            Ok(serialize_report(Report::Info(&report), common.format.into()))
        }
        Command::Relevant {
            common,
            target,
            epsilon,
            absolute,
            prune_ratio,
            base,
        } => {
            let net = load(&common.network)?;
            let ex = Explainer::new(&net, &target)?.with_base(base.into());
            let params = RelevanceParams {
                epsilon: if absolute {
                    Negligible::Absolute(epsilon)
                } else {
                    Negligible::Relative(epsilon)
                },
                prune_ratio,
            };
            let result = ex.stepwise_relevant(params)?;
            Ok(serialize_report(Report::Relevance(&result), common.format.into()))
        }
        Command::CheckCi {
            common,
            given,
            left,
            right,
            tol,
        } => {
            let net = load(&common.network)?;
            let result = check_ci(&net, &strs(&left), &strs(&right), &strs(&given), tol)?;
            Ok(serialize_report(Report::Ci(&result), common.format.into()))
        }
        Command::Validate { network } => {
            let (_, warnings) = read_network(&network)?;
            let mut out = String::new();
            for w in &warnings {
                out.push_str(&format!("{w}\n"));
            }
            out.push_str("ok\n");
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Query(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
