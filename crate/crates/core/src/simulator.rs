//! Seeded Monte Carlo batches over uniformly shuffled deals.
//!
//! Match `i` of a batch draws its deal from a ChaCha8 generator seeded with
//! the batch seed and switched to stream `i`. The deal therefore depends only
//! on `(seed, i)`, never on the worker count or on scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{Deck, GameState, MatchOutcome, MatchRunner, Player, Settings};
use crate::error::{Error, Result};
use crate::stats::{DurationAccumulator, DurationSummary};

pub const DEFAULT_BATCH_MAX_TRICKS: u64 = 100_000;
/// Trick cap for the loop-detecting re-run of matches that overran the batch cap.
pub const RERUN_MAX_TRICKS: u64 = 1_000_000;

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub settings: Settings,
    pub matches: u64,
    pub seed: u64,
    pub max_tricks: u64,
    pub detect_loops: bool,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(settings: Settings, matches: u64, seed: u64) -> SimConfig {
        SimConfig {
            settings,
            matches,
            seed,
            max_tricks: DEFAULT_BATCH_MAX_TRICKS,
            detect_loops: false,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.matches == 0 {
            return Err(Error::InvalidConfig("matches must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1"));
        }
        if self.max_tricks == 0 {
            return Err(Error::InvalidConfig("max_tricks must be at least 1"));
        }
        Ok(())
    }
}

/// Checks that both decks together hold exactly the cards of the full deck.
pub fn check_composition(settings: &Settings, state: &GameState) -> Result<()> {
    let mut counts = [0usize; 10];
    for card in state.deck_a.iter().chain(state.deck_b.iter()) {
        counts[card.rank() as usize] += 1;
    }
    let mut problems = Vec::new();
    for (rank, &have) in counts.iter().enumerate() {
        let want = if rank <= settings.max_rank() as usize {
            settings.target_count(rank as u8)
        } else {
            0
        };
        if have != want {
            let name = if rank == 0 {
                "C".to_string()
            } else {
                rank.to_string()
            };
            problems.push(format!("{name}: {have} instead of {want}"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Composition {
            n_total: settings.n_total(),
            max_rank: settings.max_rank(),
            detail: problems.join(", "),
        })
    }
}

/// Generator for match `index` of a batch seeded with `seed`.
pub fn match_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Shuffles the full deck uniformly and gives the first half to A, who leads.
pub fn deal<R: Rng + ?Sized>(settings: &Settings, rng: &mut R) -> GameState {
    let mut cards = settings.full_deck();
    cards.shuffle(rng);
    let b: Vec<_> = cards.split_off(settings.n_total() / 2);
    GameState::new(Deck::from(cards), Deck::from(b), Player::A)
}

/// Initial state of match `index` in the batch described by `config`.
pub fn deal_for(config: &SimConfig, index: u64) -> GameState {
    deal(&config.settings, &mut match_rng(config.seed, index))
}

/// Plays match `index` exactly as [`run_batch`] does, including the re-run of overruns.
pub fn replay_match(config: &SimConfig, index: u64) -> MatchOutcome {
    let state = deal_for(config, index);
    let outcome = MatchRunner::new(state.clone(), config.detect_loops).run(config.max_tricks);
    match outcome {
        MatchOutcome::BudgetExceeded { .. } if !config.detect_loops => {
            MatchRunner::new(state, true).run(RERUN_MAX_TRICKS.max(config.max_tricks))
        }
        other => other,
    }
}

fn run_range(config: &SimConfig, range: std::ops::Range<u64>) -> DurationAccumulator {
    let mut acc = DurationAccumulator::new();
    for index in range {
        acc.push(&replay_match(config, index));
    }
    acc
}

/// Runs `config.matches` matches and summarizes their durations. The result
/// is bitwise identical for every worker count.
pub fn run_batch(config: &SimConfig) -> Result<DurationSummary> {
    config.validate()?;
    let chunks: Vec<_> = (0..config.matches)
        .step_by(CHUNK as usize)
        .map(|start| start..(start + CHUNK).min(config.matches))
        .collect();
    let acc = if config.workers == 1 {
        chunks
            .into_iter()
            .map(|r| run_range(config, r))
            .fold(DurationAccumulator::new(), DurationAccumulator::merge)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|_| Error::InvalidConfig("could not start worker threads"))?;
        pool.install(|| {
            chunks
                .into_par_iter()
                .map(|r| run_range(config, r))
                .reduce(DurationAccumulator::new, DurationAccumulator::merge)
        })
    };
    acc.summary()
}
