use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pilqaoa::bench::{
    gen_dataset, run_benchmark, run_forgetting, run_p_sweep, write_bench, write_forgetting, write_json, DatasetGrid,
    ExperimentConfig, MANIFEST_FILE,
};
use pilqaoa::graph::{DatasetSpec, Family, Graph};
use pilqaoa::trainer::train;
use pilqaoa::{Error, Method};

#[derive(Parser)]
#[command(name = "pilqaoa", version, about = "Incremental-learning QAOA for MaxCut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs and a manifest with exact optima.
    GenDataset {
        /// Dataset grid (JSON). Defaults to the full sandbox grid.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "dataset")]
        out: PathBuf,
    },
    /// Repeated PIL and standard runs on every configured instance.
    Bench(RunArgs),
    /// Replay grown-graph parameters on the original graph.
    Forgetting(RunArgs),
    /// The benchmark once per depth in `p_list`.
    PSweep(RunArgs),
    /// Train one instance and print its report as JSON.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Graph file in the text format.
        #[arg(long, conflicts_with = "family")]
        graph: Option<PathBuf>,
        /// Generate the instance instead of reading it.
        #[arg(long, value_enum, requires = "n")]
        family: Option<FamilyArg>,
        #[arg(long)]
        n: Option<usize>,
        /// Edge probability for `random`.
        #[arg(long)]
        ep: Option<f64>,
        /// Degree for `regular`.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        weighted: bool,
        #[arg(long, default_value_t = 0)]
        graph_seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    Regular,
    Complete,
}

/// Experiment config file plus command-line overrides.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel runs; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn config(&self) -> pilqaoa::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::read(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = self.method {
            cfg.methods = vec![m];
        }
        if let Some(p) = self.p {
            cfg.p = p;
            cfg.p_list = vec![p];
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        Ok(cfg)
    }
}

fn report_failures(failed: usize, total: usize) -> ExitCode {
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: {failed} of {total} runs failed");
        ExitCode::FAILURE
    }
}

fn write_run_config(cfg: &ExperimentConfig) -> pilqaoa::Result<()> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    write_json(&cfg.out.join("config.json"), cfg)
}

fn solve_graph(
    graph: &Option<PathBuf>,
    family: Option<FamilyArg>,
    n: Option<usize>,
    ep: Option<f64>,
    d: Option<usize>,
    weighted: bool,
    graph_seed: u64,
) -> pilqaoa::Result<Graph> {
    if let Some(path) = graph {
        return Graph::read(path);
    }
    let (Some(family), Some(n)) = (family, n) else {
        return Err(Error::Argument("solve needs --graph or --family with --n".into()));
    };
    let family = match family {
        FamilyArg::Random => Family::Random {
            ep: ep.ok_or_else(|| Error::Argument("--family random needs --ep".into()))?,
        },
        FamilyArg::Regular => Family::Regular {
            d: d.ok_or_else(|| Error::Argument("--family regular needs --d".into()))?,
        },
        FamilyArg::Complete => Family::Complete,
    };
    DatasetSpec {
        family,
        n,
        weighted,
        seed: graph_seed,
    }
    .generate()
}

fn run(cli: Cli) -> pilqaoa::Result<ExitCode> {
    match cli.command {
        Command::GenDataset { config, seed, out } => {
            let mut grid = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    serde_json::from_str::<DatasetGrid>(&text)?
                }
                None => DatasetGrid::sandbox(0),
            };
            if let Some(seed) = seed {
                grid.seed = seed;
            }
            let manifest = gen_dataset(&grid, &out)?;
            println!(
                "wrote {} graphs ({} skipped) and {}",
                manifest.entries.len(),
                manifest.skipped.len(),
                out.join(MANIFEST_FILE).display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => {
            let cfg = args.config()?;
            let results = run_benchmark(&cfg)?;
            write_run_config(&cfg)?;
            write_bench(&cfg.out, "bench", &results)?;
            println!("wrote {}", cfg.out.join("bench.csv").display());
            Ok(report_failures(results.failed(), results.runs.len()))
        }
        Command::PSweep(args) => {
            let cfg = args.config()?;
            let results = run_p_sweep(&cfg)?;
            write_run_config(&cfg)?;
            write_bench(&cfg.out, "p_sweep", &results)?;
            println!("wrote {}", cfg.out.join("p_sweep.csv").display());
            Ok(report_failures(results.failed(), results.runs.len()))
        }
        Command::Forgetting(args) => {
            let cfg = args.config()?;
            let results = run_forgetting(&cfg)?;
            write_run_config(&cfg)?;
            write_forgetting(&cfg.out, &results)?;
            println!("wrote {}", cfg.out.join("forgetting.csv").display());
            let failed = results.runs.iter().filter(|r| r.error.is_some()).count();
            Ok(report_failures(failed, results.runs.len()))
        }
        Command::Solve {
            run,
            graph,
            family,
            n,
            ep,
            d,
            weighted,
            graph_seed,
        } => {
            let cfg = run.config()?;
            let g = solve_graph(&graph, family, n, ep, d, weighted, graph_seed)?;
            let method = run.method.unwrap_or(Method::Pil);
            let report = train(method, &g, &cfg.train_config(cfg.p, cfg.seed))?;
            if let Some(out) = &run.out {
                std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
                write_json(&out.join("solve.json"), &report)?;
            }
            let text = serde_json::to_string_pretty(&report)?;
            // A closed pipe (`| head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::PhaseFailed { completed, .. } = &e {
                eprintln!("{} phases completed before the failure", completed.len());
            }
            ExitCode::from(2)
        }
    }
}
