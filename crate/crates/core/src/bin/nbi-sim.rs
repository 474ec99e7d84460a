use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scfdma_nbi::harness::{
    emit_csv, emit_gini_csv, emit_success_csv, emit_summary, gini_experiment, parse_config,
    parse_ebn0_grid, preset, run_scenario, write_csv, ScenarioConfig, PRESET_NAMES,
};
use scfdma_nbi::Error;

const DESK_N: usize = 128;
const FULL_N: usize = 512;

#[derive(Parser)]
#[command(name = "nbi-sim", version, about = "Monte-Carlo BER experiments for sparse NBI recovery in SC-FDMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a scenario file and emit CSV.
    Run {
        /// Preset name or path to a scenario file.
        #[arg(long)]
        scenario: String,
        /// Eb/N0 grid as start:stop:step or a comma list.
        #[arg(long)]
        ebn0: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of subcarriers.
        #[arg(long)]
        n: Option<usize>,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the full 512-subcarrier configuration.
        #[arg(long)]
        full_scale: bool,
        /// Write zero wall times so repeated runs are byte-identical.
        #[arg(long)]
        deterministic: bool,
    },
    /// List the built-in presets.
    ListScenarios,
    /// Gini index of raw, windowed and Haar-transformed off-grid NBI.
    Gini {
        /// Source counts as lo..hi (inclusive) or a comma list.
        #[arg(long, default_value = "1..8")]
        sources: String,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = FULL_N)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_sources(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Config {
        field: "sources".into(),
        reason: format!("cannot parse '{s}'"),
    };
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
    }
}

fn load_scenario(name: &str, n: Option<usize>) -> Result<ScenarioConfig, Error> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{name}: {e}")))?;
        let mut cfg = parse_config(&text, n.unwrap_or(DESK_N))?;
        if let Some(n) = n {
            cfg = cfg.with_n(n);
        }
        Ok(cfg)
    } else {
        preset(name, n.unwrap_or(DESK_N))
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => write_csv(text, p),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_gini(sources: &[usize], runs: usize, n: usize, seed: u64, out: Option<&Path>) -> Result<(), Error> {
    let recs = gini_experiment(n, sources, runs, seed)?;
    emit(&emit_gini_csv(&recs), out)
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::ListScenarios => {
            for (name, about) in PRESET_NAMES {
                println!("{name:<7} {about}");
            }
            Ok(())
        }
        Command::Gini {
            sources,
            runs,
            n,
            seed,
            out,
        } => run_gini(&parse_sources(&sources)?, runs, n, seed, out.as_deref()),
        Command::Run {
            scenario,
            ebn0,
            trials,
            seed,
            n,
            out,
            full_scale,
            deterministic,
        } => {
            let n = if full_scale { Some(FULL_N) } else { n };
            if scenario == "gini" {
                return run_gini(&(1..=8).collect::<Vec<_>>(), trials.unwrap_or(1000), n.unwrap_or(FULL_N), seed.unwrap_or(1), out.as_deref());
            }
            let mut cfg = load_scenario(&scenario, n)?;
            if let Some(g) = ebn0 {
                cfg.ebn0_db = parse_ebn0_grid(&g)?;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate()?;
            let result = run_scenario(&cfg)?;
            let csv = if result.success.is_empty() {
                emit_csv(&result.records, deterministic)
            } else {
                emit_success_csv(&result.success, deterministic)
            };
            if out.is_some() && !result.records.is_empty() {
                print!("{}", emit_summary(&result.records));
            } else if !result.records.is_empty() {
                eprint!("{}", emit_summary(&result.records));
            }
            emit(&csv, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
