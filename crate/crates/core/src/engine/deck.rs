use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use super::card::{Card, Settings, MAX_RANK_LIMIT};
use crate::error::{Error, Result};

/// An ordered pile of cards; index 0 is the top of the deck.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Deck {
    cards: VecDeque<Card>,
}

impl Deck {
    pub fn new() -> Deck {
        Deck::default()
    }

    /// Parses the bracketed deck notation, e.g. `"[C1CC2]"` or `"1CC, 2C"`.
    ///
    /// Brackets are optional, commas and whitespace are ignored, and the
    /// leftmost card is the top of the deck.
    pub fn parse(text: &str) -> Result<Deck> {
        parse_cards(text, MAX_RANK_LIMIT)
    }

    /// Like [`Deck::parse`], additionally rejecting ranks above the setting's maximum.
    pub fn parse_for(text: &str, settings: &Settings) -> Result<Deck> {
        parse_cards(text, settings.max_rank())
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Card> + ExactSizeIterator + '_ {
        self.cards.iter().copied()
    }

    pub fn get(&self, index: usize) -> Option<Card> {
        self.cards.get(index).copied()
    }

    pub fn top(&self) -> Option<Card> {
        self.cards.front().copied()
    }

    pub fn pop_top(&mut self) -> Option<Card> {
        self.cards.pop_front()
    }

    pub fn push_top(&mut self, card: Card) {
        self.cards.push_front(card);
    }

    pub fn push_bottom(&mut self, card: Card) {
        self.cards.push_back(card);
    }

    pub fn extend_bottom<I: IntoIterator<Item = Card>>(&mut self, cards: I) {
        self.cards.extend(cards);
    }

    pub fn insert(&mut self, index: usize, card: Card) {
        self.cards.insert(index, card);
    }

    pub fn remove(&mut self, index: usize) -> Option<Card> {
        self.cards.remove(index)
    }

    pub fn set(&mut self, index: usize, card: Card) {
        self.cards[index] = card;
    }

    /// Inserts `fragment` so that its first card lands at `index`.
    pub fn insert_fragment(&mut self, index: usize, fragment: &Deck) {
        for (offset, card) in fragment.iter().enumerate() {
            self.cards.insert(index + offset, card);
        }
    }

    /// Removes and returns the bottom `n` cards, top-most first.
    pub fn split_off_bottom(&mut self, n: usize) -> Deck {
        let at = self.cards.len() - n;
        Deck {
            cards: self.cards.split_off(at),
        }
    }

    pub fn count_rank(&self, rank: u8) -> usize {
        self.cards.iter().filter(|c| c.rank() == rank).count()
    }

    pub fn special_count(&self) -> usize {
        self.cards.iter().filter(|c| c.is_special()).count()
    }

    /// 1-based positions (from the top) of the special cards.
    pub fn special_positions(&self) -> Vec<usize> {
        self.cards
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_special())
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn max_rank(&self) -> u8 {
        self.cards.iter().map(|c| c.rank()).max().unwrap_or(0)
    }

    pub fn as_slices(&self) -> (&[Card], &[Card]) {
        self.cards.as_slices()
    }
}

fn parse_cards(text: &str, max_rank: u8) -> Result<Deck> {
    let mut cards = VecDeque::with_capacity(text.len());
    for (offset, ch) in text.char_indices() {
        match ch {
            'C' => cards.push_back(Card::ORDINARY),
            '1'..='9' => {
                let rank = ch as u8 - b'0';
                if rank > max_rank {
                    return Err(Error::RankOutOfRange {
                        rank,
                        offset,
                        max_rank,
                    });
                }
                cards.push_back(Card::new(rank));
            }
            '[' | ']' | ',' => {}
            c if c.is_whitespace() => {}
            found => return Err(Error::MalformedDeck { found, offset }),
        }
    }
    Ok(Deck { cards })
}

impl FromStr for Deck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Deck> {
        Deck::parse(s)
    }
}

impl fmt::Display for Deck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for card in &self.cards {
            write!(f, "{card}")?;
        }
        f.write_str("]")
    }
}

impl FromIterator<Card> for Deck {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> Deck {
        Deck {
            cards: iter.into_iter().collect(),
        }
    }
}

impl From<Vec<Card>> for Deck {
    fn from(cards: Vec<Card>) -> Deck {
        Deck { cards: cards.into() }
    }
}

/// Formats a deck in the bracketed notation.
pub fn format_deck(deck: &Deck) -> String {
    deck.to_string()
}

/// Parses a deck string; see [`Deck::parse`].
pub fn parse_deck(text: &str) -> Result<Deck> {
    Deck::parse(text)
}
