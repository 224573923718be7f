use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bmn_core::simulator::SimConfig;
use bmn_core::stats::{DurationSummary, ExponentialFit};
use bmn_core::{Deck, GameState, MatchOutcome, Player};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub version: String,
    pub config: ConfigEcho,
    pub summary: SummaryEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n_total: usize,
    pub max_rank: u8,
    pub matches: u64,
    pub seed: u64,
    pub max_tricks: u64,
    pub detect_loops: bool,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEcho {
    pub matches: u64,
    pub terminated: u64,
    pub loops: u64,
    pub budget_exceeded: u64,
    pub min: u64,
    pub max: u64,
    pub mode: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub variance_to_mean: f64,
    pub wins_a_pct: f64,
    pub wins_b_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEcho {
    pub lo: u64,
    pub hi: u64,
    pub lambda: f64,
    pub r_squared: f64,
    pub p_geometric: f64,
    pub bins_used: usize,
}

impl StatsFile {
    pub fn new(config: &SimConfig, summary: &DurationSummary, fit: Option<&ExponentialFit>) -> StatsFile {
        StatsFile {
            version: VERSION.to_string(),
            config: ConfigEcho {
                n_total: config.settings.n_total(),
                max_rank: config.settings.max_rank(),
                matches: config.matches,
                seed: config.seed,
                max_tricks: config.max_tricks,
                detect_loops: config.detect_loops,
                workers: config.workers,
            },
            summary: SummaryEcho {
                matches: summary.matches,
                terminated: summary.terminated,
                loops: summary.loop_count,
                budget_exceeded: summary.budget_exceeded_count,
                min: summary.min,
                max: summary.max,
                mode: summary.mode,
                mean: summary.mean,
                std_dev: summary.std_dev,
                variance_to_mean: summary.variance_to_mean,
                wins_a_pct: summary.wins_a_pct,
                wins_b_pct: summary.wins_b_pct,
            },
            fit: fit.map(|f| FitEcho {
                lo: f.fit_range.0,
                hi: f.fit_range.1,
                lambda: f.lambda,
                r_squared: f.r_squared,
                p_geometric: f.p_geometric,
                bins_used: f.bins_used,
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("stats file serializes")
    }
}

/// Sidecar written next to a trace so that it can be regenerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub version: String,
    pub n_total: usize,
    pub max_rank: u8,
    pub deck_a: String,
    pub deck_b: String,
    pub leader: String,
    pub max_tricks: u64,
    pub outcome: String,
}

impl TraceMeta {
    pub fn new(
        n_total: usize,
        max_rank: u8,
        state: &GameState,
        max_tricks: u64,
        outcome: &MatchOutcome,
    ) -> TraceMeta {
        TraceMeta {
            version: VERSION.to_string(),
            n_total,
            max_rank,
            deck_a: state.deck_a.to_string(),
            deck_b: state.deck_b.to_string(),
            leader: state.leader.to_string(),
            max_tricks,
            outcome: outcome.to_string(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_findings(path: &Path, line: &str, append: bool) -> Result<(), CliError> {
    let mut file = fs::OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{line}").map_err(|e| CliError::io(path, e))
}

/// Two deck lines (A then B); blank lines and `#` comments are skipped. A leads.
pub fn read_seed_decks(path: &Path) -> Result<GameState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let [a, b] = lines[..] else {
        return Err(CliError::Usage(format!(
            "{}: expected two deck lines, found {}",
            path.display(),
            lines.len()
        )));
    };
    let parse = |s: &str| Deck::parse(s).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
    Ok(GameState::new(parse(a)?, parse(b)?, Player::A))
}
