//! Coalitions as bitmasks over the player set, and ordered collections of
//! them.
//!
//! Player `i` corresponds to bit `i` in the order of the game's player list.
//! All iteration over the coalition lattice is in ascending mask order, which
//! keeps every derived object (Gram rows, searches, reports) deterministic.

use crate::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// Maximum player count supported by the dense worth table.
pub const MAX_PLAYERS: usize = 16;

/// A coalition of players inside an `n`-player game.
///
/// The empty coalition is representable (some geometric identities need it)
/// but rejected by every game operation that requires a nonempty argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    mask: u32,
    n: u8,
}

impl Coalition {
    /// Coalition from a raw bitmask. Fails if the mask has bits at or above
    /// position `n`.
    pub fn new(mask: u32, n: usize) -> Result<Self> {
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n, MAX_PLAYERS));
        }
        if mask >= (1u32 << n) {
            return Err(Error::MaskOutOfRange { mask, n });
        }
        Ok(Coalition { mask, n: n as u8 })
    }

    /// The empty coalition in an `n`-player context.
    pub fn empty(n: usize) -> Self {
        Coalition { mask: 0, n: n as u8 }
    }

    /// The grand coalition of all `n` players.
    pub fn grand(n: usize) -> Self {
        Coalition { mask: ((1u64 << n) - 1) as u32, n: n as u8 }
    }

    /// Coalition containing exactly the given players (bit indices).
    pub fn of_players(players: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &p in players {
            if p >= n {
                return Err(Error::MaskOutOfRange { mask: 1 << p, n });
            }
            mask |= 1 << p;
        }
        Coalition::new(mask, n)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Player count of the ambient game.
    pub fn player_count(&self) -> usize {
        self.n as usize
    }

    /// Number of members.
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_grand(&self) -> bool {
        self.mask == Coalition::grand(self.n as usize).mask
    }

    /// Proper: nonempty and not the grand coalition.
    pub fn is_proper(&self) -> bool {
        !self.is_empty() && !self.is_grand()
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.n as usize && self.mask & (1 << player) != 0
    }

    /// Members in ascending player order.
    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..self.n as usize).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn intersection(&self, other: Coalition) -> Coalition {
        debug_assert_eq!(self.n, other.n);
        Coalition { mask: self.mask & other.mask, n: self.n }
    }

    pub fn union(&self, other: Coalition) -> Coalition {
        debug_assert_eq!(self.n, other.n);
        Coalition { mask: self.mask | other.mask, n: self.n }
    }

    pub fn complement(&self) -> Coalition {
        Coalition { mask: Coalition::grand(self.n as usize).mask & !self.mask, n: self.n }
    }

    pub fn is_subset_of(&self, other: Coalition) -> bool {
        self.mask & !other.mask == 0
    }

    /// Render against a list of player names, comma-joined in list order.
    pub fn label(&self, players: &[String]) -> String {
        let names: Vec<&str> = self.players().map(|i| players[i].as_str()).collect();
        names.join(",")
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Fallback rendering when no player names are at hand: bit indices.
        let ids: Vec<String> = self.players().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// All nonempty coalitions of an `n`-player game, ascending by mask.
pub fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    let top = (1u64 << n) as u32;
    (1..top).map(move |mask| Coalition { mask, n: n as u8 })
}

/// All proper coalitions (nonempty, not grand), ascending by mask.
pub fn proper_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    all_coalitions(n).filter(|s| !s.is_grand())
}

/// A duplicate-free set of coalitions, iterated in ascending mask order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoalitionCollection {
    members: BTreeSet<Coalition>,
}

impl CoalitionCollection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Coalition) -> bool {
        self.members.insert(s)
    }

    pub fn contains(&self, s: &Coalition) -> bool {
        self.members.contains(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = &Coalition> {
        self.members.iter()
    }

    pub fn to_vec(&self) -> Vec<Coalition> {
        self.members.iter().copied().collect()
    }

    /// Rejects the empty coalition and mixed player counts; deduplicates
    /// silently.
    pub fn from_coalitions<I: IntoIterator<Item = Coalition>>(iter: I) -> Result<Self> {
        let mut members = BTreeSet::new();
        let mut n: Option<usize> = None;
        for s in iter {
            if s.is_empty() {
                return Err(Error::EmptyCoalition);
            }
            match n {
                None => n = Some(s.player_count()),
                Some(n) if n != s.player_count() => {
                    return Err(Error::MixedPlayerCounts(n, s.player_count()));
                }
                _ => {}
            }
            members.insert(s);
        }
        Ok(CoalitionCollection { members })
    }
}

impl FromIterator<Coalition> for CoalitionCollection {
    fn from_iter<I: IntoIterator<Item = Coalition>>(iter: I) -> Self {
        CoalitionCollection { members: iter.into_iter().collect() }
    }
}

impl IntoIterator for CoalitionCollection {
    type Item = Coalition;
    type IntoIter = std::collections::btree_set::IntoIter<Coalition>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

impl<'a> IntoIterator for &'a CoalitionCollection {
    type Item = &'a Coalition;
    type IntoIter = std::collections::btree_set::Iter<'a, Coalition>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
