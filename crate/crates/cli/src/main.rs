mod files;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bmn_core::analyzer::{positions_csv, trace_csv, trace_match};
use bmn_core::backward::{backward_search, explore_predecessors, BackwardSearchConfig};
use bmn_core::cycles::{scan_balanced_entries, verify_loop, LoopReport};
use bmn_core::factory::{findings_line, run_factory, FactoryConfig, FactoryOutcome};
use bmn_core::simulator::{check_composition, run_batch, SimConfig};
use bmn_core::stats::fit_exponential;
use bmn_core::{Deck, Error, GameState, Player, Settings};

use files::{read_seed_decks, write_file, write_findings, StatsFile, TraceMeta};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files; exit status 1.
    Usage(String),
    /// The input was fine but the claimed property does not hold; exit status 2.
    Verification(String),
}

impl CliError {
    fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Usage(format!("{}: {err}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Verification(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> CliError {
        match err {
            Error::Terminated { .. }
            | Error::BudgetExceeded(_)
            | Error::LoopMismatch(_)
            | Error::SeedTerminates => CliError::Verification(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bmn",
    version,
    about = "Beggar-My-Neighbour engine, simulator and loop search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match from the given decks
    Play(PlayArgs),
    /// Monte Carlo batch over uniform deals
    Simulate(SimulateArgs),
    /// Loop verification and balanced-entry scanning
    #[command(subcommand)]
    Loops(LoopsCommand),
    /// Enumerate predecessor states
    Backward(BackwardArgs),
    /// Search for a complete non-terminating configuration
    Factory(FactoryArgs),
}

fn parse_setting(s: &str) -> Result<Settings, String> {
    let (n, r) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N,R but got {s:?}"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad N in {s:?}"))?;
    let r: u8 = r.trim().parse().map_err(|_| format!("bad R in {s:?}"))?;
    Settings::new(n, r).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI but got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad LO in {s:?}"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad HI in {s:?}"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct DeckArgs {
    /// Deck of player A, top card first, e.g. "[1CC]" or 1CC
    #[arg(long)]
    deck_a: String,
    /// Deck of player B
    #[arg(long)]
    deck_b: String,
    /// Player who leads the first trick
    #[arg(long, default_value = "A")]
    leader: Player,
}

impl DeckArgs {
    fn state(&self, settings: Option<&Settings>) -> Result<GameState, CliError> {
        let parse = |label: &str, text: &str| {
            match settings {
                Some(s) => Deck::parse_for(text, s),
                None => Deck::parse(text),
            }
            .map_err(|e| CliError::Usage(format!("deck {label}: {e}")))
        };
        let state = GameState::new(parse("A", &self.deck_a)?, parse("B", &self.deck_b)?, self.leader);
        state.check_playable()?;
        Ok(state)
    }
}

fn checked_state(decks: &DeckArgs, settings: &Settings, allow_partial: bool) -> Result<GameState, CliError> {
    let state = decks.state(Some(settings))?;
    if !allow_partial {
        check_composition(settings, &state)?;
    }
    Ok(state)
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long, value_parser = parse_setting)]
    setting: Settings,
    #[command(flatten)]
    decks: DeckArgs,
    #[arg(long, default_value_t = 1_000_000)]
    max_tricks: u64,
    /// Accept decks that do not form the full (N,R) deck
    #[arg(long)]
    allow_partial: bool,
    /// Per-trick CSV trace; metadata goes to FILE.meta.toml
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Special-card positions per trick
    #[arg(long)]
    positions: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_setting)]
    setting: Settings,
    #[arg(long)]
    matches: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = bmn_core::simulator::DEFAULT_BATCH_MAX_TRICKS)]
    max_tricks: u64,
    /// Index states during every match instead of re-running overruns
    #[arg(long)]
    detect_loops: bool,
    /// Stats file (TOML)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Histogram CSV
    #[arg(long)]
    hist: Option<PathBuf>,
    /// Exponential fit range, e.g. 10,100
    #[arg(long, value_parser = parse_range)]
    fit: Option<(u64, u64)>,
}

#[derive(Subcommand)]
enum LoopsCommand {
    /// Detect the loop and list its states
    Verify(LoopArgs),
    /// List the balanced states of the loop, standardised so that A leads
    Scan(ScanArgs),
}

#[derive(Args)]
struct LoopArgs {
    #[command(flatten)]
    decks: DeckArgs,
    /// Restricts card ranks to 1..=R when given
    #[arg(long, value_parser = parse_setting)]
    setting: Option<Settings>,
    #[arg(long, default_value_t = 1_000_000)]
    max_tricks: u64,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    decks: DeckArgs,
    #[arg(long, value_parser = parse_setting)]
    setting: Settings,
    #[arg(long, default_value_t = 1_000_000)]
    max_tricks: u64,
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args)]
struct BackwardArgs {
    #[command(flatten)]
    decks: DeckArgs,
    #[arg(long, value_parser = parse_setting)]
    setting: Option<Settings>,
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: usize,
    /// Only list states with equal deck sizes, standardised so that A leads
    #[arg(long)]
    find_balanced: bool,
    /// Stop at the first balanced state
    #[arg(long, requires = "find_balanced")]
    stop_on_balanced: bool,
    /// Seed the search with every state of the loop reached from the decks
    #[arg(long)]
    from_loop: bool,
}

#[derive(Args)]
struct FactoryArgs {
    #[arg(long, value_parser = parse_setting)]
    setting: Settings,
    /// File holding deck A and deck B on two lines; defaults to [1CC] / [C1C]
    #[arg(long)]
    seed_decks: Option<PathBuf>,
    /// Rounds, the seed check counting as the first
    #[arg(long)]
    budget: u64,
    #[arg(long)]
    rng_seed: u64,
    /// Findings file
    #[arg(long)]
    out: PathBuf,
    /// Append to the findings file instead of replacing it
    #[arg(long)]
    append: bool,
    #[arg(long, default_value_t = 1500)]
    capacity: usize,
    #[arg(long, default_value_t = 100_000)]
    trick_cap: u64,
}

fn cmd_play(args: &PlayArgs) -> Result<(), CliError> {
    let s = &args.setting;
    let state = checked_state(&args.decks, s, args.allow_partial)?;
    let trace = trace_match(&state, args.max_tricks)?;
    println!("{}", trace.outcome);
    if let Some(path) = &args.trace {
        write_file(path, &trace_csv(&trace.records))?;
        let meta = TraceMeta::new(s.n_total(), s.max_rank(), &state, args.max_tricks, &trace.outcome);
        let mut meta_path = path.clone().into_os_string();
        meta_path.push(".meta.toml");
        write_file(
            Path::new(&meta_path),
            &toml::to_string(&meta).expect("serializable"),
        )?;
    }
    if let Some(path) = &args.positions {
        write_file(path, &positions_csv(&trace.records))?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = SimConfig {
        settings: args.setting,
        matches: args.matches,
        seed: args.seed,
        max_tricks: args.max_tricks,
        detect_loops: args.detect_loops,
        workers: args.workers,
    };
    let summary = run_batch(&config)?;
    let fit = match args.fit {
        Some((lo, hi)) => Some(fit_exponential(&summary.histogram, lo, hi)?),
        None => None,
    };
    print!("{}", summary.to_kv_text());
    if let Some(f) = &fit {
        println!("lambda={:.6}", f.lambda);
        println!("r_squared={:.6}", f.r_squared);
        println!("p_geometric={:.6}", f.p_geometric);
    }
    if let Some(path) = &args.out {
        write_file(path, &StatsFile::new(&config, &summary, fit.as_ref()).to_toml())?;
    }
    if let Some(path) = &args.hist {
        write_file(path, &summary.histogram_csv())?;
    }
    Ok(())
}

fn cmd_loops(cmd: &LoopsCommand) -> Result<(), CliError> {
    match cmd {
        LoopsCommand::Verify(args) => {
            let state = args.decks.state(args.setting.as_ref())?;
            let report = verify_loop(&state, args.max_tricks)?;
            println!("Looped transient={} period={}", report.transient, report.period);
            for (i, s) in report.states_in_loop.iter().enumerate() {
                println!("trick={} {}", report.transient + i as u64, s);
            }
        }
        LoopsCommand::Scan(args) => {
            let state = checked_state(&args.decks, &args.setting, args.allow_partial)?;
            let report = verify_loop(&state, args.max_tricks)?;
            let entries = scan_balanced_entries(&report, &args.setting);
            let listing = LoopReport {
                balanced_entries: report
                    .balanced_entries
                    .iter()
                    .filter(|e| entries.contains(&e.state))
                    .cloned()
                    .collect(),
                ..report
            };
            print!("{listing}");
        }
    }
    Ok(())
}

fn cmd_backward(args: &BackwardArgs) -> Result<(), CliError> {
    let state = args.decks.state(args.setting.as_ref())?;
    let seeds = if args.from_loop {
        verify_loop(&state, 1_000_000)?.states_in_loop
    } else {
        vec![state]
    };
    let config = BackwardSearchConfig {
        max_depth: args.depth,
        max_nodes: args.max_nodes,
        stop_on_balanced: args.stop_on_balanced,
    };
    if args.find_balanced {
        for s in backward_search(&seeds, &config) {
            println!("{s}");
        }
    } else {
        for d in explore_predecessors(&seeds, &config) {
            println!("depth={} {}", d.depth, d.state);
        }
    }
    Ok(())
}

fn cmd_factory(args: &FactoryArgs) -> Result<(), CliError> {
    let mut config = FactoryConfig::new(args.setting, args.budget, args.rng_seed);
    if let Some(path) = &args.seed_decks {
        config.seed_state = read_seed_decks(path)?;
    }
    config.checkpoint_capacity = args.capacity;
    config.nontermination_trick_cap = args.trick_cap;
    let run = run_factory(&config)?;
    let line = match &run.outcome {
        FactoryOutcome::Complete { state, report } => findings_line(&args.setting, state, report),
        FactoryOutcome::Partial { best } => format!(
            "# partial {} A={} B={} score={} depth={}",
            args.setting, best.state.deck_a, best.state.deck_b, best.score, best.depth
        ),
    };
    println!("{line}");
    println!("rounds={} checkpoints={}", run.rounds, run.checkpoints_created);
    write_findings(&args.out, &line, args.append)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Play(args) => cmd_play(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Loops(cmd) => cmd_loops(cmd),
        Command::Backward(args) => cmd_backward(args),
        Command::Factory(args) => cmd_factory(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
