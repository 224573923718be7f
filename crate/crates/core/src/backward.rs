//! Predecessor enumeration for the trick map and bounded backward search.
//!
//! A non-terminal trick always ends with a special of rank `t` answered by
//! `t` ordinaries, and its pile sits at the bottom of the winner's deck in
//! play order. Undoing a trick therefore means choosing how many bottom
//! cards of the winner's deck formed the pile and who led it, replaying the
//! pile to attribute every card, and pushing the cards back onto the tops.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::engine::{play_trick, Card, Deck, GameState, Player};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorCandidate {
    pub state: GameState,
    pub pile_length: usize,
    pub prior_leader: Player,
}

/// True when `pile` ends with a special of rank `t >= 1` followed by exactly `t` ordinaries.
fn ends_with_closing_block(pile: &[Card]) -> bool {
    let trailing = pile.iter().rev().take_while(|c| !c.is_special()).count();
    trailing >= 1 && trailing < pile.len() && pile[pile.len() - 1 - trailing].rank() as usize == trailing
}

/// Replays `pile` as one trick led by `leader`. Returns who played each card
/// when the trick ends exactly on the last card with `winner`.
fn attribute(pile: &[Card], leader: Player, winner: Player) -> Option<Vec<Player>> {
    let mut owners = Vec::with_capacity(pile.len());
    let mut mover = leader;
    let mut challenge: Option<(Player, u8)> = None;
    for (i, card) in pile.iter().enumerate() {
        owners.push(mover);
        if card.is_special() {
            challenge = Some((mover, card.rank()));
            mover = mover.other();
        } else if let Some((challenger, remaining)) = challenge.as_mut() {
            *remaining -= 1;
            if *remaining == 0 {
                return (i + 1 == pile.len() && *challenger == winner).then_some(owners);
            }
        } else {
            mover = mover.other();
        }
    }
    None
}

/// Every non-terminal trick-boundary state whose next trick produces `target`.
/// Candidates are verified by playing the trick forward and are unique.
pub fn enumerate_predecessors(target: &GameState) -> Vec<PredecessorCandidate> {
    let winner = target.leader;
    let loser = winner.other();
    let winner_cards: Vec<Card> = target.deck(winner).iter().collect();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    if target.deck(loser).is_empty() {
        return out;
    }
    for len in 2..=winner_cards.len() {
        let split = winner_cards.len() - len;
        let pile = &winner_cards[split..];
        if !ends_with_closing_block(pile) {
            continue;
        }
        for leader in [Player::A, Player::B] {
            let Some(owners) = attribute(pile, leader, winner) else {
                continue;
            };
            let mut rebuilt = GameState::new(Deck::new(), Deck::new(), leader);
            for (card, owner) in pile.iter().zip(&owners) {
                rebuilt.deck_mut(*owner).push_bottom(*card);
            }
            rebuilt
                .deck_mut(winner)
                .extend_bottom(winner_cards[..split].iter().copied());
            rebuilt.deck_mut(loser).extend_bottom(target.deck(loser).iter());

            let verified = play_trick(&rebuilt)
                .map(|r| !r.terminal && r.next_state == *target)
                .unwrap_or(false);
            debug_assert!(
                verified,
                "reconstructed predecessor does not replay to the target"
            );
            if verified && seen.insert(rebuilt.canonical_encoding(), ()).is_none() {
                out.push(PredecessorCandidate {
                    state: rebuilt,
                    pile_length: len,
                    prior_leader: leader,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackwardSearchConfig {
    pub max_depth: u32,
    pub max_nodes: usize,
    pub stop_on_balanced: bool,
}

impl Default for BackwardSearchConfig {
    fn default() -> Self {
        BackwardSearchConfig {
            max_depth: 8,
            max_nodes: 1_000_000,
            stop_on_balanced: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveredState {
    pub state: GameState,
    /// Number of tricks from this state forward to the nearest seed.
    pub depth: u32,
}

fn balanced(state: &GameState) -> bool {
    state.deck_a.len() == state.deck_b.len()
}

/// Breadth-first predecessor tree over the seeds, deduplicated by canonical
/// encoding, in discovery order. Each level is expanded in parallel and merged
/// in frontier order, so the result does not depend on the thread count.
pub fn explore_predecessors(seeds: &[GameState], config: &BackwardSearchConfig) -> Vec<DiscoveredState> {
    let mut index: HashMap<Vec<u8>, ()> = HashMap::new();
    let mut found: Vec<DiscoveredState> = Vec::new();
    let mut frontier: Vec<GameState> = Vec::new();
    let stop = |found: &[DiscoveredState]| {
        config.stop_on_balanced && found.last().is_some_and(|d| balanced(&d.state))
    };
    for seed in seeds {
        if found.len() >= config.max_nodes {
            return found;
        }
        if index.insert(seed.canonical_encoding(), ()).is_none() {
            found.push(DiscoveredState {
                state: seed.clone(),
                depth: 0,
            });
            frontier.push(seed.clone());
            if stop(&found) {
                return found;
            }
        }
    }
    for depth in 1..=config.max_depth {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<Vec<PredecessorCandidate>> =
            frontier.par_iter().map(enumerate_predecessors).collect();
        let mut next = Vec::new();
        for candidate in expanded.into_iter().flatten() {
            if found.len() >= config.max_nodes {
                return found;
            }
            if index.insert(candidate.state.canonical_encoding(), ()).is_none() {
                found.push(DiscoveredState {
                    state: candidate.state.clone(),
                    depth,
                });
                next.push(candidate.state);
                if stop(&found) {
                    return found;
                }
            }
        }
        frontier = next;
    }
    found
}

/// Balanced states (equal deck sizes) in the predecessor tree of the seeds,
/// standardised so that A leads and deduplicated.
pub fn backward_search(seeds: &[GameState], config: &BackwardSearchConfig) -> Vec<GameState> {
    let mut seen = HashMap::new();
    explore_predecessors(seeds, config)
        .into_iter()
        .filter(|d| balanced(&d.state))
        .map(|d| d.state.standardized())
        .filter(|s| seen.insert(s.canonical_encoding(), ()).is_none())
        .collect()
}
