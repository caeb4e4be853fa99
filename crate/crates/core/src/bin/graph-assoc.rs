use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use graph_assoc::report::{
    cmd_classify, cmd_fan, cmd_moduli, cmd_verify, FanOptions, ModuliOptions, Report, ReportError,
    Status, VerifyTarget, WeightSource,
};

#[derive(Parser)]
#[command(
    name = "graph-assoc",
    version,
    about = "Toric graph associahedra and weighted stable curves"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Value of eps used when displaying weights, e.g. 1/100.
    #[arg(long, global = true)]
    eps: Option<BigRational>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a graph is an iterated cone over a discrete set.
    Classify {
        /// Graph, e.g. `cone^2(D2)`, `P4`, or `@edges.txt`.
        graph: String,
    },
    /// Build the graph associahedral fan.
    Fan {
        graph: String,
        /// Also compute the f-vector.
        #[arg(long)]
        f_vector: bool,
        /// Include every ray and maximal cone.
        #[arg(long)]
        json: bool,
        /// Subdivide same-size tubes in a random order drawn from this seed.
        #[arg(long)]
        seed_order: Option<u64>,
    },
    /// Run the consistency checks on one graph or on all small connected graphs.
    Verify {
        #[arg(required_unless_present = "all_up_to", conflicts_with = "all_up_to")]
        graph: Option<String>,
        /// Check every connected graph with at most this many vertices.
        #[arg(long)]
        all_up_to: Option<usize>,
    },
    /// Enumerate stable trees and nodal divisors.
    Moduli {
        /// Iterated cone whose explicit weights are used.
        #[arg(required_unless_present = "weights", conflicts_with = "weights")]
        graph: Option<String>,
        /// Weight vector, e.g. `1,1-3e,4e,4e,e,e`.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        max_vertices: Option<usize>,
        /// List the nodal divisors.
        #[arg(long)]
        divisors: bool,
    },
}

fn run(cli: &Cli) -> Result<Report, ReportError> {
    let eps = cli.eps.as_ref();
    match &cli.command {
        Command::Classify { graph } => cmd_classify(graph, eps),
        Command::Fan {
            graph,
            f_vector,
            json,
            seed_order,
        } => cmd_fan(
            graph,
            FanOptions {
                f_vector: *f_vector,
                full: *json,
                seed: *seed_order,
            },
        ),
        Command::Verify { graph, all_up_to } => match (graph, all_up_to) {
            (Some(g), _) => cmd_verify(VerifyTarget::Graph(g)),
            (None, Some(m)) => cmd_verify(VerifyTarget::AllUpTo(*m)),
            (None, None) => unreachable!("clap requires one of them"),
        },
        Command::Moduli {
            graph,
            weights,
            max_vertices,
            divisors,
        } => {
            let source = match (graph, weights) {
                (Some(g), _) => WeightSource::Graph(g),
                (None, Some(w)) => WeightSource::Weights(w),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let opts = ModuliOptions {
                max_vertices: *max_vertices,
                divisors: *divisors,
            };
            cmd_moduli(source, opts, eps)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if report.status == Status::Fail {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
