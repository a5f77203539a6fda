use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecs_cli::report::{self, ConjectureResults};
use ecs_cli::service;
use ecs_core::dump::StrategyDump;
use ecs_core::solver::{chi_sweep, default_k_max};
use ecs_core::sweeps::{self, ValueCache};
use ecs_core::tables::{self, Suite};
use ecs_core::{parse_graph_spec, CanonicalizationPolicy, Error, Game, SolverOptions, VariantConfig};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_BIND: u8 = 4;

/// Exact solver for eternal vertex coloring games.
#[derive(Parser)]
#[command(name = "ecs", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Abort a solve after this many states.
    #[arg(long, global = true, env = "ECS_BUDGET")]
    budget: Option<usize>,
    /// Disable vertex symmetry reduction.
    #[arg(long, global = true)]
    no_orbit: bool,
    /// Disable color relabeling.
    #[arg(long, global = true)]
    no_color_canon: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep k and report the smallest value Alice wins.
    Chi {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "a")]
        variant: String,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        /// Defaults to max degree plus two.
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Solve a single (graph, k, variant) instance.
    Solve {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "a")]
        variant: String,
        /// Write the solved status table in the binary strategy format.
        #[arg(long)]
        dump_strategy: Option<PathBuf>,
    },
    /// Run the built-in table of expected values.
    Tables {
        #[arg(long, default_value = "paper")]
        suite: Suite,
    },
    /// Search small connected graphs for counterexamples.
    Conjectures {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Only run the named checks (low-values, or a relation name).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Also compare K1,n with Kn,n for n up to this bound.
        #[arg(long, num_args = 0..=1, default_missing_value = "6")]
        hereditary: Option<usize>,
    },
    /// Start the HTTP play service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        /// Static files served at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Exit(u8, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::IllegalMove(_) | Error::Terminal | Error::MalformedKey(_) | Error::UnknownState => EXIT_MISMATCH,
        _ => EXIT_USAGE,
    }
}

impl Global {
    fn options(&self, default_budget: usize) -> SolverOptions {
        SolverOptions {
            policy: CanonicalizationPolicy { color_relabel: !self.no_color_canon, orbit_reduce: !self.no_orbit },
            budget: self.budget.unwrap_or(default_budget),
        }
    }

    fn emit(&self, json: serde_json::Value, text: String) {
        let mut out = std::io::stdout().lock();
        let _ = match self.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&json).expect("serializable")),
            Format::Text => write!(out, "{text}"),
        };
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Chi { graph, variant, k_min, k_max } => {
            let graph = parse_graph_spec(&graph)?;
            let cfg: VariantConfig = variant.parse()?;
            let k_max = k_max.unwrap_or_else(|| default_k_max(&graph));
            if k_min > k_max {
                return Err(Failure::Exit(EXIT_USAGE, format!("--k-min {k_min} exceeds --k-max {k_max}")));
            }
            let r = chi_sweep(&graph, &cfg, k_min, k_max, &g.options(ecs_core::solver::DEFAULT_BUDGET))?;
            g.emit(report::chi_json(&r), report::chi_text(&r));
            Ok(if r.any_aborted() { EXIT_BUDGET } else { 0 })
        }
        Command::Solve { graph, k, variant, dump_strategy } => {
            let game = Game::new(parse_graph_spec(&graph)?, k, variant.parse()?)?;
            let solved = ecs_core::solve(&game, &g.options(ecs_core::solver::DEFAULT_BUDGET))?;
            let violations = solved.verify();
            if let Some(path) = dump_strategy {
                let file = std::fs::File::create(&path)
                    .map_err(|e| Failure::Exit(EXIT_MISMATCH, format!("cannot write {}: {e}", path.display())))?;
                StrategyDump::from_solved(&solved)
                    .write_to(std::io::BufWriter::new(file))
                    .map_err(|e| Failure::Exit(EXIT_MISMATCH, format!("cannot write {}: {e}", path.display())))?;
            }
            g.emit(report::solve_json(&solved, violations), report::solve_text(&solved, violations));
            Ok(if violations == 0 { 0 } else { EXIT_MISMATCH })
        }
        Command::Tables { suite } => {
            let entries = tables::suite_entries(suite)?;
            let verbose = g.format == Format::Text;
            let r = tables::run_suite(&entries, &g.options(ecs_core::solver::DEFAULT_BUDGET), |row| {
                if verbose && !row.pass {
                    eprintln!("mismatch: {} ({}; computed {:?})", row.id, row.expected, row.chi);
                }
            })?;
            let name = match suite {
                Suite::Paper => "paper",
                Suite::PaperFast => "paper-fast",
            };
            g.emit(report::tables_json(name, &r), report::tables_text(&r));
            Ok(if r.failed == 0 { 0 } else { EXIT_MISMATCH })
        }
        Command::Conjectures { max_n, only, hereditary } => {
            if !(1..=7).contains(&max_n) {
                return Err(Failure::Exit(EXIT_USAGE, format!("--max-n must be between 1 and 7, got {max_n}")));
            }
            let wanted = |name: &str| only.is_empty() || only.iter().any(|o| o == name);
            let opts = g.options(ecs_core::solver::DEFAULT_BUDGET);
            let low_values = if wanted("low-values") { Some(sweeps::low_value_sweep(max_n, &opts)?) } else { None };
            let graphs = sweeps::connected_graphs_up_to(max_n)?;
            let mut cache = ValueCache::new(&opts);
            let mut pairs = Vec::new();
            for check in sweeps::conjectures() {
                if wanted(check.name) {
                    pairs.push(sweeps::check_pair(&check, &graphs, &mut cache)?);
                }
            }
            let hereditary = hereditary.map(|n| sweeps::hereditary_pairs(n, &mut cache)).transpose()?;
            let results = ConjectureResults { max_n, low_values, pairs, hereditary };
            g.emit(report::conjectures_json(&results), report::conjectures_text(&results));
            Ok(0)
        }
        Command::Serve { bind, ui_dir } => serve(&bind, ui_dir, g.options(service::SERVICE_BUDGET)),
    }
}

fn serve(bind: &str, ui_dir: Option<PathBuf>, opts: SolverOptions) -> Result<u8, Failure> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Exit(EXIT_BIND, e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| Failure::Exit(EXIT_BIND, format!("cannot bind {bind}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_or(bind.to_string(), |a| a.to_string()));
        let app = service::router(service::AppState::new(opts), ui_dir);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::Exit(EXIT_MISMATCH, e.to_string()))?;
        Ok(0)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
