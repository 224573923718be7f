//! Loop verification and balanced-entry scanning.

use std::collections::HashSet;
use std::fmt;

use crate::engine::{play_match, trick_in_place, GameState, MatchOutcome, Settings};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedEntry {
    /// Trick index along the original match at which the state occurs.
    pub trick: u64,
    /// The state with the players relabelled so that A leads.
    pub state: GameState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopReport {
    pub transient: u64,
    pub period: u64,
    /// States after tricks `transient..transient + period`.
    pub states_in_loop: Vec<GameState>,
    pub balanced_entries: Vec<BalancedEntry>,
}

impl LoopReport {
    pub fn entry_state(&self) -> &GameState {
        &self.states_in_loop[0]
    }
}

impl fmt::Display for LoopReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transient={}", self.transient)?;
        writeln!(f, "period={}", self.period)?;
        for entry in &self.balanced_entries {
            writeln!(
                f,
                "trick={} A={} B={}",
                entry.trick, entry.state.deck_a, entry.state.deck_b
            )?;
        }
        Ok(())
    }
}

/// Detects a loop from `initial`, collects its states and checks that `period`
/// further tricks from the entry state return to it. Balanced entries are
/// those with both decks holding half of the cards in play.
pub fn verify_loop(initial: &GameState, max_tricks: u64) -> Result<LoopReport> {
    let (transient, period) = match play_match(initial, max_tricks, true)? {
        MatchOutcome::Looped { transient, period } => (transient, period),
        MatchOutcome::Terminated { winner, tricks } => return Err(Error::Terminated { winner, tricks }),
        MatchOutcome::BudgetExceeded { tricks_played } => return Err(Error::BudgetExceeded(tricks_played)),
    };
    let mut state = initial.clone();
    let mut pile = Vec::new();
    for _ in 0..transient {
        trick_in_place(&mut state, &mut pile);
    }
    let entry = state.clone();
    let mut states_in_loop = Vec::with_capacity(period as usize);
    for t in 0..period {
        states_in_loop.push(state.clone());
        let (_, terminal) = trick_in_place(&mut state, &mut pile);
        if terminal || (t + 1 < period && state == entry) {
            return Err(Error::LoopMismatch(transient + t + 1));
        }
    }
    if state != entry {
        return Err(Error::LoopMismatch(transient + period));
    }
    let total = initial.total_cards();
    let balanced_entries = balanced_in(&states_in_loop, transient, total);
    Ok(LoopReport {
        transient,
        period,
        states_in_loop,
        balanced_entries,
    })
}

fn balanced_in(states: &[GameState], offset: u64, total: usize) -> Vec<BalancedEntry> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if !total.is_multiple_of(2) {
        return out;
    }
    for (i, s) in states.iter().enumerate() {
        if s.deck_a.len() == total / 2 && s.deck_b.len() == total / 2 {
            let std = s.standardized();
            if seen.insert(std.canonical_encoding()) {
                out.push(BalancedEntry {
                    trick: offset + i as u64,
                    state: std,
                });
            }
        }
    }
    out
}

/// Loop states holding `N/2` cards per player, standardised so that A leads
/// and deduplicated, in loop order.
pub fn scan_balanced_entries(report: &LoopReport, settings: &Settings) -> Vec<GameState> {
    balanced_in(&report.states_in_loop, report.transient, settings.n_total())
        .into_iter()
        .map(|e| e.state)
        .collect()
}
