//! Adaptive insertion search for non-terminating configurations.
//!
//! Starting from a small looping seed, each round picks a checkpoint, a
//! strategy, a pattern and a target deck, then tries to insert one generated
//! fragment so that the match still provably loops. Successful insertions
//! become new checkpoints. The search halts once the composition matches the
//! full `(N, R)` deck.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycles::{verify_loop, LoopReport};
use crate::engine::{play_match, Card, Deck, GameState, MatchOutcome, Player, Settings};
use crate::error::{Error, Result};

/// Signed deficit per card type, indexed by rank (0 = ordinary): target count
/// minus the count over both decks. Positive means cards are still missing.
pub fn missing(deck_a: &Deck, deck_b: &Deck, settings: &Settings) -> Vec<i64> {
    (0..=settings.max_rank())
        .map(|r| {
            let have = deck_a.count_rank(r) + deck_b.count_rank(r);
            settings.target_count(r) as i64 - have as i64
        })
        .collect()
}

/// `N - sum |missing(j)|`; equals `N` exactly when the composition is complete.
pub fn score(deck_a: &Deck, deck_b: &Deck, settings: &Settings) -> i64 {
    settings.n_total() as i64
        - missing(deck_a, deck_b, settings)
            .iter()
            .map(|d| d.abs())
            .sum::<i64>()
}

/// Looping seed made of `copies` side-by-side `[1CC]`/`[C1C]` blocks.
pub fn building_block(copies: usize) -> GameState {
    GameState::parse(&"1CC".repeat(copies), &"C1C".repeat(copies)).expect("valid block")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    LowRankFirst,
    HighRankFirst,
    OrdinariesFirst,
    SpecialsFirst,
    BalancedFill,
    ClusterSpecials,
    DisperseSpecials,
    Rank1Blocks,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::LowRankFirst,
        Strategy::HighRankFirst,
        Strategy::OrdinariesFirst,
        Strategy::SpecialsFirst,
        Strategy::BalancedFill,
        Strategy::ClusterSpecials,
        Strategy::DisperseSpecials,
        Strategy::Rank1Blocks,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Strategy::LowRankFirst => "low-rank-first",
            Strategy::HighRankFirst => "high-rank-first",
            Strategy::OrdinariesFirst => "ordinaries-first",
            Strategy::SpecialsFirst => "specials-first",
            Strategy::BalancedFill => "balanced-fill",
            Strategy::ClusterSpecials => "cluster-specials",
            Strategy::DisperseSpecials => "disperse-specials",
            Strategy::Rank1Blocks => "rank1-blocks",
        }
    }

    pub fn patterns(self) -> &'static [InsertionPattern] {
        use InsertionPattern::*;
        match self {
            Strategy::ClusterSpecials => &[Single, Pairs, Triplets, Mixed7, Mixed10],
            Strategy::DisperseSpecials => &[Single, Triplets, Interleaved, Mixed7, Mixed10, Burst5],
            Strategy::Rank1Blocks => &[RankTerminated, Single, Burst5, Burst7, Burst10, Triplets],
            _ => &InsertionPattern::ALL,
        }
    }

    /// Card types (0 = ordinary) in the order this strategy fills them.
    fn priority<R: Rng + ?Sized>(self, deficits: &[i64], rng: &mut R) -> Vec<u8> {
        let max_rank = (deficits.len() - 1) as u8;
        let mut specials: Vec<u8> = (1..=max_rank).collect();
        let by_deficit = |v: &mut Vec<u8>| v.sort_by_key(|&r| std::cmp::Reverse(deficits[r as usize]));
        match self {
            Strategy::LowRankFirst => specials.push(0),
            Strategy::HighRankFirst => {
                specials.reverse();
                specials.push(0);
            }
            Strategy::OrdinariesFirst => specials.insert(0, 0),
            Strategy::SpecialsFirst | Strategy::ClusterSpecials => {
                specials.shuffle(rng);
                by_deficit(&mut specials);
                specials.push(0);
            }
            Strategy::DisperseSpecials => {
                specials.shuffle(rng);
                specials.push(0);
            }
            Strategy::BalancedFill => {
                // the type with the most cards still missing goes first, so all
                // types approach their final counts together
                specials.push(0);
                specials.shuffle(rng);
                by_deficit(&mut specials);
            }
            Strategy::Rank1Blocks => specials = vec![1, 0],
        }
        specials
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Strategy, String> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.id() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InsertionPattern {
    Single,
    Pairs,
    Triplets,
    Burst5,
    Burst7,
    Burst10,
    Interleaved,
    RankTerminated,
    Mixed7,
    Mixed10,
}

impl InsertionPattern {
    pub const ALL: [InsertionPattern; 10] = [
        InsertionPattern::Single,
        InsertionPattern::Pairs,
        InsertionPattern::Triplets,
        InsertionPattern::Burst5,
        InsertionPattern::Burst7,
        InsertionPattern::Burst10,
        InsertionPattern::Interleaved,
        InsertionPattern::RankTerminated,
        InsertionPattern::Mixed7,
        InsertionPattern::Mixed10,
    ];

    pub fn id(self) -> &'static str {
        match self {
            InsertionPattern::Single => "single",
            InsertionPattern::Pairs => "pairs",
            InsertionPattern::Triplets => "triplets",
            InsertionPattern::Burst5 => "burst5",
            InsertionPattern::Burst7 => "burst7",
            InsertionPattern::Burst10 => "burst10",
            InsertionPattern::Interleaved => "interleaved",
            InsertionPattern::RankTerminated => "rank-terminated",
            InsertionPattern::Mixed7 => "mixed7",
            InsertionPattern::Mixed10 => "mixed10",
        }
    }

    /// Templates led by card type `t`; `x` marks the primary special and `y`
    /// a second special of another rank.
    fn templates(self, t: u8) -> &'static [&'static str] {
        use InsertionPattern::*;
        if t == 0 {
            return match self {
                Single => &["C"],
                Pairs => &["CC"],
                Triplets => &["CCC"],
                Burst5 => &["CCCCC"],
                Burst7 => &["CCCCCCC"],
                Burst10 => &["CCCCCCCCCC"],
                _ => &[],
            };
        }
        match self {
            Single => &["x"],
            Pairs => &["xx", "Cx", "xC"],
            Triplets => &["CxC", "CCx", "xCC"],
            Interleaved => &["CxCxC"],
            RankTerminated => &["CCx", "CCCx", "CCCCx"],
            Mixed7 => &["CCCxCCC", "CxC", "CCxCC", "CxxC"],
            Mixed10 => &["CCCCxCCCCC", "CCxCCyCC"],
            Burst5 | Burst7 | Burst10 => &[],
        }
    }
}

impl fmt::Display for InsertionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

fn has_adjacent_specials(fragment: &Deck) -> bool {
    let cards: Vec<Card> = fragment.iter().collect();
    cards.windows(2).any(|w| w[0].is_special() && w[1].is_special())
}

fn allowed(fragment: &Deck, deficits: &[i64]) -> bool {
    let ordinary_ok = deficits[0] >= 0;
    (0..deficits.len() as u8).all(|r| {
        let used = fragment.count_rank(r) as i64;
        used == 0
            || if r == 0 {
                ordinary_ok
            } else {
                deficits[r as usize] >= used
            }
    })
}

/// Fragments for one round, in the order they should be tried. Special ranks
/// follow the strategy's priority and are limited to deficient ranks with
/// enough missing copies; types already in excess never appear.
pub fn generate_sequences<R: Rng + ?Sized>(
    strategy: Strategy,
    pattern: InsertionPattern,
    deficits: &[i64],
    rng: &mut R,
) -> Vec<Deck> {
    let order = strategy.priority(deficits, rng);
    let specials: Vec<u8> = order.iter().copied().filter(|&r| r != 0).collect();
    let mut out: Vec<Deck> = Vec::new();
    let push = |d: Deck, out: &mut Vec<Deck>| {
        if allowed(&d, deficits) && !out.contains(&d) {
            out.push(d);
        }
    };
    for &t in &order {
        for template in pattern.templates(t) {
            let seconds: Vec<u8> = if template.contains('y') {
                specials.iter().copied().filter(|&r| r != t).collect()
            } else {
                vec![t]
            };
            for &y in &seconds {
                let fragment: Deck = template
                    .chars()
                    .map(|c| match c {
                        'x' => Card::new(t),
                        'y' => Card::new(y),
                        _ => Card::ORDINARY,
                    })
                    .collect();
                push(fragment, &mut out);
            }
        }
    }
    match strategy {
        Strategy::ClusterSpecials => out.sort_by_key(|f| !has_adjacent_specials(f)),
        Strategy::DisperseSpecials => out.retain(|f| !has_adjacent_specials(f)),
        _ => {}
    }
    out
}

/// Proven loop within `trick_cap` tricks, with its verified report.
/// Terminated and unfinished matches both count as failures.
pub fn test_nontermination(state: &GameState, trick_cap: u64) -> Option<LoopReport> {
    verify_loop(state, trick_cap).ok()
}

fn proves_loop(state: &GameState, trick_cap: u64) -> bool {
    matches!(
        play_match(state, trick_cap, true),
        Ok(MatchOutcome::Looped { .. })
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub state: GameState,
    pub depth: u32,
    pub score: i64,
    /// `None` for the seed.
    pub strategy: Option<Strategy>,
    pub age: u64,
}

impl Checkpoint {
    fn rank_key(&self) -> (i64, u32, u64) {
        (self.score, self.depth, self.age)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasMode {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoryConfig {
    pub settings: Settings,
    pub seed_state: GameState,
    /// Rounds, counting the seed verification as the first.
    pub budget: u64,
    pub checkpoint_capacity: usize,
    pub restart_interval: u64,
    pub restart_probability: f64,
    pub escape_threshold: u32,
    pub nontermination_trick_cap: u64,
    pub rng_seed: u64,
}

impl FactoryConfig {
    pub fn new(settings: Settings, budget: u64, rng_seed: u64) -> FactoryConfig {
        FactoryConfig {
            settings,
            seed_state: building_block(1),
            budget,
            checkpoint_capacity: 1500,
            restart_interval: 50,
            restart_probability: 0.2,
            escape_threshold: 5,
            nontermination_trick_cap: 100_000,
            rng_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactoryOutcome {
    Complete { state: GameState, report: LoopReport },
    Partial { best: Checkpoint },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoryRun {
    pub outcome: FactoryOutcome,
    pub rounds: u64,
    pub checkpoints_created: u64,
}

const MAX_POSITIONS: usize = 40;

struct Search<'a> {
    config: &'a FactoryConfig,
    rng: ChaCha8Rng,
    frontier: Vec<Checkpoint>,
    next_age: u64,
    streak: (Option<u64>, u32),
}

impl Search<'_> {
    fn select(&mut self) -> usize {
        let best = (0..self.frontier.len())
            .max_by_key(|&i| self.frontier[i].rank_key())
            .expect("frontier is never empty");
        let age = self.frontier[best].age;
        self.streak = match self.streak {
            (Some(prev), n) if prev == age => (Some(age), n + 1),
            _ => (Some(age), 1),
        };
        if self.streak.1 > self.config.escape_threshold {
            self.streak = (None, 0);
            return self.rng.random_range(0..self.frontier.len());
        }
        best
    }

    fn positions(&mut self, state: &GameState, bias: BiasMode) -> Vec<(Player, usize)> {
        let side = |p: Player, rng: &mut ChaCha8Rng| {
            let mut v: Vec<(Player, usize)> = (0..=state.deck(p).len()).map(|i| (p, i)).collect();
            v.shuffle(rng);
            v
        };
        let mut out = match bias {
            BiasMode::A => side(Player::A, &mut self.rng),
            BiasMode::B => side(Player::B, &mut self.rng),
            BiasMode::Both => {
                let a = side(Player::A, &mut self.rng);
                let b = side(Player::B, &mut self.rng);
                let mut merged = Vec::with_capacity(a.len() + b.len());
                let (mut ia, mut ib) = (a.into_iter(), b.into_iter());
                loop {
                    match (ia.next(), ib.next()) {
                        (None, None) => break,
                        (x, y) => merged.extend(x.into_iter().chain(y)),
                    }
                }
                merged
            }
        };
        out.truncate(MAX_POSITIONS);
        out
    }

    fn checkpoint(&mut self, state: GameState, parent: &Checkpoint, strategy: Strategy) -> Checkpoint {
        self.next_age += 1;
        Checkpoint {
            score: score(&state.deck_a, &state.deck_b, &self.config.settings),
            state,
            depth: parent.depth + 1,
            strategy: Some(strategy),
            age: self.next_age,
        }
    }

    fn store(&mut self, cp: Checkpoint) {
        self.frontier.push(cp);
        if self.frontier.len() > self.config.checkpoint_capacity {
            let worst = (0..self.frontier.len())
                .min_by_key(|&i| (self.frontier[i].score, self.frontier[i].age))
                .expect("nonempty");
            self.frontier.swap_remove(worst);
        }
    }

    fn try_insertions(
        &mut self,
        parent: &Checkpoint,
        strategy: Strategy,
        bias: BiasMode,
    ) -> Option<GameState> {
        let settings = &self.config.settings;
        let deficits = missing(&parent.state.deck_a, &parent.state.deck_b, settings);
        let pattern = *strategy.patterns().choose(&mut self.rng).expect("nonempty");
        let fragments = generate_sequences(strategy, pattern, &deficits, &mut self.rng);
        let cap = self.config.nontermination_trick_cap;
        for fragment in &fragments {
            for (player, index) in self.positions(&parent.state, bias) {
                let mut candidate = parent.state.clone();
                candidate.deck_mut(player).insert_fragment(index, fragment);
                if proves_loop(&candidate, cap) {
                    return Some(candidate);
                }
            }
        }
        if deficits.iter().any(|&d| d < 0) {
            return self.try_corrections(parent, &deficits, strategy);
        }
        None
    }

    fn try_corrections(
        &mut self,
        parent: &Checkpoint,
        deficits: &[i64],
        strategy: Strategy,
    ) -> Option<GameState> {
        let replacements = strategy.priority(deficits, &mut self.rng);
        let replacements: Vec<u8> = replacements
            .into_iter()
            .filter(|&r| deficits[r as usize] > 0)
            .collect();
        let mut ops: Vec<(Player, usize, Option<u8>)> = Vec::new();
        for player in [Player::A, Player::B] {
            for (i, card) in parent.state.deck(player).iter().enumerate() {
                if deficits[card.rank() as usize] < 0 {
                    ops.push((player, i, None));
                    ops.extend(replacements.iter().map(|&r| (player, i, Some(r))));
                }
            }
        }
        ops.shuffle(&mut self.rng);
        ops.truncate(MAX_POSITIONS);
        let cap = self.config.nontermination_trick_cap;
        for (player, index, replacement) in ops {
            let mut candidate = parent.state.clone();
            let deck = candidate.deck_mut(player);
            match replacement {
                Some(r) => deck.set(index, Card::new(r)),
                None => {
                    deck.remove(index);
                }
            }
            if candidate.is_playable() && proves_loop(&candidate, cap) {
                return Some(candidate);
            }
        }
        None
    }
}

/// Runs the search. Fails when the seed does not provably loop or holds ranks above `R`.
pub fn run_factory(config: &FactoryConfig) -> Result<FactoryRun> {
    let settings = &config.settings;
    if config.budget == 0 || config.checkpoint_capacity == 0 {
        return Err(Error::InvalidConfig(
            "budget and checkpoint capacity must be at least 1",
        ));
    }
    let seed = &config.seed_state;
    if seed.deck_a.max_rank().max(seed.deck_b.max_rank()) > settings.max_rank() {
        return Err(Error::Composition {
            n_total: settings.n_total(),
            max_rank: settings.max_rank(),
            detail: "seed holds a rank above the maximum".into(),
        });
    }
    if !seed.is_playable() || !proves_loop(seed, config.nontermination_trick_cap) {
        return Err(Error::SeedTerminates);
    }
    let seed_cp = Checkpoint {
        score: score(&seed.deck_a, &seed.deck_b, settings),
        state: seed.clone(),
        depth: 0,
        strategy: None,
        age: 0,
    };
    let complete = |state: &GameState| -> Result<FactoryOutcome> {
        let report = verify_loop(state, config.nontermination_trick_cap)?;
        Ok(FactoryOutcome::Complete {
            state: state.clone(),
            report,
        })
    };
    if seed_cp.score == settings.n_total() as i64 {
        return Ok(FactoryRun {
            outcome: complete(seed)?,
            rounds: 1,
            checkpoints_created: 0,
        });
    }

    let mut search = Search {
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        frontier: vec![seed_cp.clone()],
        next_age: 0,
        streak: (None, 0),
    };
    let mut best = seed_cp.clone();
    let mut rounds = 1;
    while rounds < config.budget {
        rounds += 1;
        if rounds % config.restart_interval == 0 && search.rng.random_bool(config.restart_probability) {
            search.frontier = vec![seed_cp.clone()];
            search.streak = (None, 0);
        }
        let chosen = search.select();
        let parent = search.frontier[chosen].clone();
        let strategy = *Strategy::ALL.choose(&mut search.rng).expect("nonempty");
        let bias = *[BiasMode::A, BiasMode::B, BiasMode::Both]
            .choose(&mut search.rng)
            .expect("nonempty");
        let Some(state) = search.try_insertions(&parent, strategy, bias) else {
            continue;
        };
        let cp = search.checkpoint(state, &parent, strategy);
        if cp.score == settings.n_total() as i64 {
            return Ok(FactoryRun {
                outcome: complete(&cp.state)?,
                rounds,
                checkpoints_created: search.next_age,
            });
        }
        if cp.rank_key() > best.rank_key() {
            best = cp.clone();
        }
        search.store(cp);
    }
    Ok(FactoryRun {
        outcome: FactoryOutcome::Partial { best },
        rounds,
        checkpoints_created: search.next_age,
    })
}

/// One findings line: `(N,R) A=[..] B=[..] transient=T period=P`.
pub fn findings_line(settings: &Settings, state: &GameState, report: &LoopReport) -> String {
    format!(
        "{} A={} B={} transient={} period={}",
        settings, state.deck_a, state.deck_b, report.transient, report.period
    )
}
