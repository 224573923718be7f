use std::fmt;

use crate::error::{Error, Result};

/// Suits per rank; every special rank appears exactly this many times in a full deck.
pub const SUITS: usize = 4;

/// Largest special rank expressible in the single-character deck notation.
pub const MAX_RANK_LIMIT: u8 = 9;

/// A card reduced to its rank. Rank 0 is an ordinary card, ranks 1..=9 are specials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Card(u8);

impl Card {
    pub const ORDINARY: Card = Card(0);

    /// Panics if `rank` exceeds [`MAX_RANK_LIMIT`].
    pub fn new(rank: u8) -> Card {
        assert!(rank <= MAX_RANK_LIMIT, "card rank {rank} out of range");
        Card(rank)
    }

    pub fn special(rank: u8) -> Card {
        assert!(rank >= 1, "special cards have rank >= 1");
        Card::new(rank)
    }

    #[inline]
    pub fn rank(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_special(self) -> bool {
        self.0 != 0
    }

    pub fn to_char(self) -> char {
        if self.0 == 0 {
            'C'
        } else {
            char::from(b'0' + self.0)
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// The (N, R) setting: `n_total` cards, four suits, special ranks `1..=max_rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Settings {
    n_total: usize,
    max_rank: u8,
}

impl Settings {
    pub fn new(n_total: usize, max_rank: u8) -> Result<Settings> {
        let invalid = |reason| Error::InvalidSettings {
            n_total,
            max_rank,
            reason,
        };
        if max_rank == 0 || max_rank > MAX_RANK_LIMIT {
            return Err(invalid("max rank must lie in 1..=9"));
        }
        if n_total < 2 || !n_total.is_multiple_of(2) {
            return Err(invalid("card count must be even and at least 2"));
        }
        if SUITS * max_rank as usize > n_total {
            return Err(invalid("not enough cards for four suits of every special rank"));
        }
        Ok(Settings { n_total, max_rank })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn max_rank(&self) -> u8 {
        self.max_rank
    }

    pub fn suits(&self) -> usize {
        SUITS
    }

    pub fn special_count(&self) -> usize {
        SUITS * self.max_rank as usize
    }

    pub fn ordinary_count(&self) -> usize {
        self.n_total - self.special_count()
    }

    /// Number of cards of `rank` in a full deck (0 for ranks above the setting).
    pub fn target_count(&self, rank: u8) -> usize {
        match rank {
            0 => self.ordinary_count(),
            r if r <= self.max_rank => SUITS,
            _ => 0,
        }
    }

    /// Full deck in a fixed canonical order: ordinaries first, then ranks ascending.
    pub fn full_deck(&self) -> Vec<Card> {
        let mut cards = vec![Card::ORDINARY; self.ordinary_count()];
        for rank in 1..=self.max_rank {
            cards.extend(std::iter::repeat_n(Card(rank), SUITS));
        }
        cards
    }
}

impl fmt::Display for Settings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_total, self.max_rank)
    }
}
