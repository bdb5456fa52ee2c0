//! `cikit`: command-line front end for conditional-independence relations.
//!
//! Exit status: 0 on success or a passed verification, 1 when a violation
//! or counterexample is found, 2 on parse and usage errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cikit::format::{
    parse_covariance, parse_graph, parse_relation, parse_triple, write_graph, write_relation,
};
use cikit::gaussian::DEFAULT_EPS;
use cikit::verify::{run_claim, verify_instance, Claim, Instance, Strategy};
use cikit::{
    bidirected_graph_of, check_gaussian_duality, close, is_closed, undirected_graph_of,
    GaussianModel, Graph, Mode, Rule, VerificationReport,
};

const ALL_RULES: &str = "D,U,C,L,I,M,P,R,DT,DDT";

#[derive(Parser)]
#[command(
    name = "cikit",
    version,
    about = "Conditional-independence relations, graphs and Gaussian models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Close a relation under Horn rules.
    Close {
        relation: PathBuf,
        /// Comma-separated rules; `L` means both localizability directions.
        #[arg(long, default_value = "D,U,C")]
        rules: String,
        #[command(flatten)]
        out: Out,
    },
    /// Write the dual relation, replacing each conditioning set C by V\ABC.
    Dual {
        relation: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Report, for each rule, whether the relation is closed under it.
    Check {
        relation: PathBuf,
        #[arg(long, default_value = ALL_RULES)]
        rules: String,
        #[command(flatten)]
        out: Out,
    },
    /// Write the undirected (un) or bidirected (bi) graph of a relation.
    ExtractGraph {
        relation: PathBuf,
        #[arg(long, default_value = "un")]
        mode: Mode,
        /// Append a 0/1 adjacency matrix.
        #[arg(long)]
        adjacency: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Write the separation relation of a graph, or answer one query.
    Separation {
        graph: PathBuf,
        /// A triple `A ; B ; S` to test instead of listing all separations.
        #[arg(long)]
        query: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Extract the CI relation of a Gaussian covariance matrix.
    Gaussian {
        covariance: PathBuf,
        /// Threshold on absolute partial correlations.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Use the inverse matrix instead.
        #[arg(long)]
        inverse: bool,
        /// Check that the inverse's relation is the dual, instead of
        /// writing the relation.
        #[arg(long)]
        duality: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Run a named verifier; exhaustive where small enough, else sampled.
    Verify {
        claim: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Check a single relation instead of a population.
        #[arg(long)]
        relation: Option<PathBuf>,
        /// Graph for single-instance Markov claims.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Covariance file for single-instance Gaussian claims.
        #[arg(long)]
        covariance: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Hunt for counterexamples by seeded sampling.
    Search {
        claim: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 4)]
        p: usize,
    },
}

#[derive(Args)]
struct Out {
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Require an exhaustive population.
    #[arg(long)]
    exhaustive: bool,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    out: Out,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> cikit::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Out, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rules(list: &str) -> Result<Vec<Rule>, Failure> {
    Rule::parse_list(list).map_err(|e| usage(format!("--rules: {e}")))
}

fn claim(id: &str) -> Result<Claim, Failure> {
    id.parse().map_err(|e: cikit::Error| usage(e.to_string()))
}

fn report_output(report: &VerificationReport, run: &RunArgs) -> CliResult {
    let text = if run.json {
        format!("{:#}\n", report.to_json())
    } else {
        report.to_string()
    };
    emit(&run.out, &text)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn model(path: &Path, eps: f64) -> Result<GaussianModel, Failure> {
    let file = load(path, parse_covariance)?;
    GaussianModel::from_file(&file, eps).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Close {
            relation,
            rules: list,
            out,
        } => {
            let l = load(&relation, parse_relation)?;
            let closed = close(&l, &rules(&list)?).map_err(|e| usage(format!("--rules: {e}")))?;
            emit(&out, &write_relation(&closed))?;
            Ok(0)
        }
        Command::Dual { relation, out } => {
            let l = load(&relation, parse_relation)?;
            emit(&out, &write_relation(&l.dual()))?;
            Ok(0)
        }
        Command::Check {
            relation,
            rules: list,
            out,
        } => {
            let l = load(&relation, parse_relation)?;
            let mut text = String::new();
            let mut violated = false;
            for rule in rules(&list)? {
                match is_closed(&l, rule) {
                    None => {
                        let _ = writeln!(text, "{rule}: closed");
                    }
                    Some(v) => {
                        violated = true;
                        let _ = writeln!(text, "{rule}: violated\n  {}", v.display(l.ground()));
                    }
                }
            }
            emit(&out, &text)?;
            Ok(u8::from(violated))
        }
        Command::ExtractGraph {
            relation,
            mode,
            adjacency,
            out,
        } => {
            let l = load(&relation, parse_relation)?;
            let g = match mode {
                Mode::Undirected => undirected_graph_of(&l),
                Mode::Bidirected => bidirected_graph_of(&l),
            };
            let mut text = write_graph(&g);
            if adjacency {
                text.push_str(&g.adjacency_matrix());
            }
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Separation { graph, query, out } => {
            let g: Graph = load(&graph, parse_graph)?;
            match query {
                Some(q) => {
                    let t =
                        parse_triple(g.ground(), &q).map_err(|e| usage(format!("--query: {e}")))?;
                    let verdict = if g.separates_triple(&t) {
                        "separated"
                    } else {
                        "not separated"
                    };
                    emit(&out, &format!("({}): {verdict}\n", t.display(g.ground())))?;
                }
                None => emit(&out, &write_relation(&g.separation_relation()))?,
            }
            Ok(0)
        }
        Command::Gaussian {
            covariance,
            eps,
            inverse,
            duality,
            out,
        } => {
            let mut m = model(&covariance, eps)?;
            if inverse {
                m = m
                    .inverse()
                    .map_err(|e| usage(format!("{}: {e}", covariance.display())))?;
            }
            if duality {
                let report = check_gaussian_duality(&m)
                    .map_err(|e| usage(format!("{}: {e}", covariance.display())))?;
                emit(&out, &report.to_string())?;
                return Ok(if report.passed() { 0 } else { 1 });
            }
            let (rel, notes) = m.relation_with_warnings();
            for note in notes {
                eprintln!("warning: {note}");
            }
            emit(&out, &write_relation(&rel))?;
            Ok(0)
        }
        Command::Verify {
            claim: id,
            run,
            p,
            relation,
            graph,
            covariance,
            eps,
        } => {
            let claim = claim(&id)?;
            if relation.is_some() || graph.is_some() || covariance.is_some() {
                let l = relation
                    .as_deref()
                    .map(|f| load(f, parse_relation))
                    .transpose()?;
                let g = graph.as_deref().map(|f| load(f, parse_graph)).transpose()?;
                let m = covariance.as_deref().map(|f| model(f, eps)).transpose()?;
                let report = verify_instance(
                    claim,
                    Instance {
                        relation: l.as_ref(),
                        graph: g.as_ref(),
                        model: m.as_ref(),
                    },
                )
                .map_err(|e| usage(e.to_string()))?;
                return report_output(&report, &run);
            }
            let strategy = if run.exhaustive {
                Strategy::Exhaustive
            } else {
                Strategy::Auto
            };
            let report = run_claim(claim, p, run.budget, run.seed, strategy)
                .map_err(|e| usage(e.to_string()))?;
            report_output(&report, &run)
        }
        Command::Search { claim: id, run, p } => {
            let claim = claim(&id)?;
            let strategy = if run.exhaustive {
                Strategy::Exhaustive
            } else {
                Strategy::Sampled
            };
            let report = run_claim(claim, p, run.budget, run.seed, strategy)
                .map_err(|e| usage(e.to_string()))?;
            report_output(&report, &run)
        }
    }
}

/// Caps the worker pool at `CIKIT_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("CIKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            usage(format!(
                "CIKIT_THREADS: expected a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("CIKIT_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
