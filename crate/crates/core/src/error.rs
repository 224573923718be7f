use thiserror::Error;

use crate::engine::Player;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid settings ({n_total},{max_rank}): {reason}")]
    InvalidSettings {
        n_total: usize,
        max_rank: u8,
        reason: &'static str,
    },

    #[error("malformed deck string: unexpected character {found:?} at offset {offset}")]
    MalformedDeck { found: char, offset: usize },

    #[error("card rank {rank} at offset {offset} exceeds the maximum rank {max_rank}")]
    RankOutOfRange { rank: u8, offset: usize, max_rank: u8 },

    #[error("state is not playable: deck {0:?} is empty")]
    Unplayable(Player),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("deck is empty")]
    EmptyDeck,

    #[error("summary requires at least one match outcome")]
    EmptyInput,

    #[error(
        "exponential fit needs at least 2 bins with count >= {min_count} in [{lo}, {hi}], found {found}"
    )]
    InsufficientBins {
        lo: u64,
        hi: u64,
        min_count: u64,
        found: usize,
    },

    #[error("fitted decay rate {0} is not positive")]
    NonPositiveRate(f64),

    #[error("match terminated after {tricks} tricks (winner {winner:?})")]
    Terminated { winner: Player, tricks: u64 },

    #[error("no loop found within {0} tricks")]
    BudgetExceeded(u64),

    #[error("loop re-verification failed at trick {0}")]
    LoopMismatch(u64),

    #[error("seed configuration is not provably non-terminating")]
    SeedTerminates,

    #[error("composition does not match the ({n_total},{max_rank}) deck: {detail}")]
    Composition {
        n_total: usize,
        max_rank: u8,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
