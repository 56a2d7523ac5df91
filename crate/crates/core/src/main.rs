use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use eudsplit::collate::CollationPolicy;
use eudsplit::conllu::{write_conllu, EmptyNodePolicy};
use eudsplit::metrics::{DegreeStats, EvalReport};
use eudsplit::pipeline::{self, Diagnostics, PipelineError, RunConfig, DEFAULT_SEED};
use eudsplit::split::{Mode, SplitConfig, TreeKind};
use eudsplit::synthetic;

#[derive(Parser)]
#[command(
    name = "eudsplit",
    version,
    about = "Split enhanced UD graphs into trees and back"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Splitting behaviour.
    #[arg(long, global = true, default_value = "faithful", value_parser = parse_mode)]
    mode: Mode,
    /// Trees to produce or collate, in priority order.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        default_value = "basic,relative,conjunct,control"
    )]
    trees: Vec<TreeKind>,
    /// Handling of empty nodes in the input.
    #[arg(long, global = true, default_value = "drop", value_parser = parse_empty)]
    empty_nodes: EmptyNodePolicy,
    /// Keep root arcs only for tokens with no other head.
    #[arg(long, global = true)]
    drop_extra_roots: bool,
    /// Only add non-basic arcs that differ from the basic tree.
    #[arg(long, global = true)]
    restrict: bool,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_empty(s: &str) -> Result<EmptyNodePolicy, String> {
    s.parse()
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write one CoNLL-U file per tree type, plus repairs.tsv.
    Split { input: PathBuf, outdir: PathBuf },
    /// Turn a tree file into a label file.
    Encode { input: PathBuf, output: PathBuf },
    /// Turn a label file into a tree file.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// CoNLL-U file providing the columns other than HEAD/DEPREL.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Merge tree files into the DEPS column of the original file.
    Collate {
        original: PathBuf,
        output: PathBuf,
        /// Directory holding <tree>.conllu for every tree in --trees.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Score predictions against gold, as GOLD PRED pairs.
    Eval {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Split, encode, decode and collate gold files, then score them.
    Roundtrip {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// In-degree histogram and edge coverage.
    Stats {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Train the frequency baseline and score it on a test file.
    Baseline {
        train: PathBuf,
        test: PathBuf,
        /// Where to write the predicted CoNLL-U.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a template-generated corpus to standard output.
    Synth {
        #[arg(long, default_value_t = 25)]
        count: usize,
    },
}

impl Opts {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            split: SplitConfig::with_mode(self.mode),
            policy: CollationPolicy {
                tree_order: self.trees.clone(),
                drop_extra_roots: self.drop_extra_roots,
                restrict_to_phenomenon: self.restrict,
            },
            empty_nodes: self.empty_nodes,
            seed: self.seed,
        }
    }
}

fn print_report(report: &EvalReport, format: Format) {
    match format {
        Format::Json => println!("{}", report.to_json()),
        _ => print!("{}", report),
    }
}

fn print_stats(stats: &DegreeStats, format: Format) {
    match format {
        Format::Text => print!("{}", stats),
        Format::Json => println!("{}", stats.to_json()),
        Format::Csv => print!("{}", stats.to_csv()),
    }
}

fn print_diagnostics(diag: &Diagnostics, format: Format) {
    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&diag.0).expect("counters serialize")
        );
    }
}

fn require_exists(path: &Path) -> Result<(), PipelineError> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::Io {
            path: path.to_owned(),
            source: io::Error::new(io::ErrorKind::NotFound, "no such file"),
        })
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = cli.opts.run_config();
    cfg.validate()?;
    let format = cli.opts.format;

    match cli.command {
        Command::Split { input, outdir } => {
            require_exists(&input)?;
            let (_, diag) = pipeline::cmd_split(&input, &outdir, &cfg)?;
            print_diagnostics(&diag, format);
        }
        Command::Encode { input, output } => {
            require_exists(&input)?;
            let diag = pipeline::cmd_encode(&input, &output, &cfg)?;
            print_diagnostics(&diag, format);
        }
        Command::Decode {
            input,
            output,
            reference,
        } => {
            require_exists(&input)?;
            let diag = pipeline::cmd_decode(&input, reference.as_deref(), &output, &cfg)?;
            print_diagnostics(&diag, format);
        }
        Command::Collate {
            original,
            output,
            dir,
        } => {
            require_exists(&original)?;
            let trees: Vec<(TreeKind, PathBuf)> = cfg
                .policy
                .tree_order
                .iter()
                .map(|&k| (k, dir.join(format!("{}.conllu", k))))
                .collect();
            for (_, path) in &trees {
                require_exists(path)?;
            }
            let diag = pipeline::cmd_collate(&trees, &original, &output, &cfg)?;
            print_diagnostics(&diag, format);
        }
        Command::Eval { files } => {
            if files.len() % 2 != 0 {
                return Err(PipelineError::Config("eval expects GOLD PRED pairs".into()));
            }
            let pairs: Vec<(PathBuf, PathBuf)> = files
                .chunks(2)
                .map(|p| (p[0].clone(), p[1].clone()))
                .collect();
            print_report(&pipeline::cmd_eval(&pairs, &cfg)?, format);
        }
        Command::Roundtrip { inputs } => {
            print_report(&pipeline::cmd_roundtrip(&inputs, &cfg)?, format);
        }
        Command::Stats { inputs } => {
            print_stats(&pipeline::cmd_stats(&inputs, &cfg)?, format);
        }
        Command::Baseline {
            train,
            test,
            output,
        } => {
            let report = pipeline::cmd_baseline(&train, &test, output.as_deref(), &cfg)?;
            print_report(&report, format);
        }
        Command::Synth { count } => {
            let corpus = synthetic::corpus(count, cfg.seed);
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write_conllu(&corpus, &mut out)
                .and_then(|_| out.flush())
                .map_err(|source| PipelineError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();

    if let Some(jobs) = cli.opts.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            error!("cannot configure {} worker threads: {}", jobs, e);
            return ExitCode::FAILURE;
        }
    }

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}
