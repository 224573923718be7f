//! Per-trick instrumentation of a match: deck sizes, special-card positions,
//! mean separation and position entropy.

use std::fmt::Write as _;

use crate::engine::{Deck, GameState, MatchOutcome, MatchRunner, Step};
use crate::error::{Error, Result};

/// Lengths of the runs of ordinaries before the first special, between
/// consecutive specials and after the last one. A deck with `k` specials has `k + 1` intervals.
pub fn intervals(deck: &Deck) -> Vec<usize> {
    let mut out = Vec::with_capacity(deck.special_count() + 1);
    let mut run = 0;
    for card in deck.iter() {
        if card.is_special() {
            out.push(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    out.push(run);
    out
}

/// `(m - k) / (k + 1)` for a deck of `m` cards holding `k` specials.
pub fn mean_separation(deck: &Deck) -> Result<f64> {
    if deck.is_empty() {
        return Err(Error::EmptyDeck);
    }
    let m = deck.len();
    let k = deck.special_count();
    Ok((m - k) as f64 / (k + 1) as f64)
}

/// Shannon entropy (natural log) of the interval lengths normalised by the deck size.
pub fn position_entropy(deck: &Deck) -> Result<f64> {
    if deck.is_empty() {
        return Err(Error::EmptyDeck);
    }
    let m = deck.len() as f64;
    Ok(intervals(deck)
        .into_iter()
        .filter(|&l| l > 0)
        .map(|l| {
            let p = l as f64 / m;
            -p * p.ln()
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBounds {
    pub h_min: f64,
    pub h_max: f64,
}

/// `h_min = -(1 - k/m) ln(1 - k/m)` (all specials in one block) and `h_max = ln(k + 1)`.
///
/// `h_max` ignores that the intervals only carry a fraction `1 - k/m` of the
/// deck. With a single special the equal split can exceed `ln 2`; for example
/// `[CCCCCCCCC1CCCCCCCCCC]` has entropy about 0.706.
pub fn entropy_bounds(m: usize, k: usize) -> EntropyBounds {
    assert!(m >= 1 && k <= m, "entropy_bounds needs m >= 1 and k <= m");
    let s = 1.0 - k as f64 / m as f64;
    let h_min = if s > 0.0 { -s * s.ln() } else { 0.0 };
    let h_max = if k == 0 { 0.0 } else { ((k + 1) as f64).ln() };
    EntropyBounds { h_min, h_max }
}

/// Snapshot of the decks at a trick boundary; `trick` 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct TrickRecord {
    pub trick: u64,
    pub size_a: usize,
    pub size_b: usize,
    pub specials_a: usize,
    pub specials_b: usize,
    pub positions_a: Vec<usize>,
    pub positions_b: Vec<usize>,
    /// `None` for an empty deck.
    pub sep_a: Option<f64>,
    pub sep_b: Option<f64>,
    pub entropy_a: Option<f64>,
    pub entropy_b: Option<f64>,
}

impl TrickRecord {
    pub fn from_state(trick: u64, state: &GameState) -> TrickRecord {
        let (a, b) = (&state.deck_a, &state.deck_b);
        let positions_a = a.special_positions();
        let positions_b = b.special_positions();
        TrickRecord {
            trick,
            size_a: a.len(),
            size_b: b.len(),
            specials_a: positions_a.len(),
            specials_b: positions_b.len(),
            positions_a,
            positions_b,
            sep_a: mean_separation(a).ok(),
            sep_b: mean_separation(b).ok(),
            entropy_a: position_entropy(a).ok(),
            entropy_b: position_entropy(b).ok(),
        }
    }

    /// Sum of both players' position entropies, an empty deck counting as zero.
    pub fn total_entropy(&self) -> f64 {
        self.entropy_a.unwrap_or(0.0) + self.entropy_b.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchTrace {
    pub records: Vec<TrickRecord>,
    pub outcome: MatchOutcome,
}

/// Plays the match with loop detection and records every trick boundary.
/// The last record is the state at which the match stopped.
pub fn trace_match(initial: &GameState, max_tricks: u64) -> Result<MatchTrace> {
    initial.check_playable()?;
    let mut runner = MatchRunner::new(initial.clone(), true);
    let mut records = vec![TrickRecord::from_state(0, initial)];
    let outcome = loop {
        if runner.tricks >= max_tricks {
            break MatchOutcome::BudgetExceeded {
                tricks_played: runner.tricks,
            };
        }
        let step = runner.step();
        records.push(TrickRecord::from_state(runner.tricks, &runner.state));
        if let Step::Done(outcome) = step {
            break outcome;
        }
    };
    Ok(MatchTrace { records, outcome })
}

pub const TRACE_HEADER: &str = "trick,size_a,size_b,specials_a,specials_b,sep_a,sep_b,entropy_a,entropy_b";
pub const POSITIONS_HEADER: &str = "trick,positions_a,positions_b";

fn opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

pub fn trace_csv(records: &[TrickRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.trick,
            r.size_a,
            r.size_b,
            r.specials_a,
            r.specials_b,
            opt(r.sep_a),
            opt(r.sep_b),
            opt(r.entropy_a),
            opt(r.entropy_b)
        );
    }
    out
}

fn join(positions: &[usize]) -> String {
    positions
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn positions_csv(records: &[TrickRecord]) -> String {
    let mut out = String::from(POSITIONS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.trick,
            join(&r.positions_a),
            join(&r.positions_b)
        );
    }
    out
}
