//! Games, preimputations, side payments, excesses, and domination.

use crate::coalition::{all_coalitions, Coalition, CoalitionCollection, MAX_PLAYERS};
use crate::{Error, Result, TAU_EQ};
use serde::Deserialize;
use std::collections::BTreeMap;

/// A transferable-utility game: an ordered player list and a worth for every
/// nonempty coalition. Immutable after construction; the empty coalition has
/// implicit worth 0 and is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    /// Dense table indexed by coalition mask; entry 0 is unused.
    worth: Vec<f64>,
}

impl Game {
    /// Build a game from explicit per-coalition worths. Coalitions absent
    /// from the map default to worth 0.
    pub fn new(players: Vec<String>, worths: &BTreeMap<u32, f64>) -> Result<Self> {
        let n = players.len();
        if n == 0 {
            return Err(Error::Parse("player list is empty".into()));
        }
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n, MAX_PLAYERS));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &players {
            if !seen.insert(name.clone()) {
                return Err(Error::Parse(format!("duplicate player name: {name}")));
            }
        }
        let size = 1usize << n;
        let mut worth = vec![0.0; size];
        for (&mask, &v) in worths {
            if mask == 0 || mask as usize >= size {
                return Err(Error::MaskOutOfRange { mask, n });
            }
            if !v.is_finite() {
                return Err(Error::Parse(format!("worth of coalition mask {mask:#b} is not finite")));
            }
            worth[mask as usize] = v;
        }
        Ok(Game { players, worth })
    }

    /// Convenience constructor with players named by index and worths listed
    /// as `(mask, worth)` pairs.
    pub fn from_worths(n: usize, worths: &[(u32, f64)]) -> Result<Self> {
        let players = (0..n).map(|i| format!("p{i}")).collect();
        let map: BTreeMap<u32, f64> = worths.iter().copied().collect();
        Game::new(players, &map)
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    /// Worth of a nonempty coalition.
    pub fn worth(&self, s: Coalition) -> f64 {
        debug_assert_eq!(s.player_count(), self.player_count());
        debug_assert!(!s.is_empty());
        self.worth[s.mask() as usize]
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::grand(self.player_count())
    }

    /// Worth of the grand coalition.
    pub fn grand_worth(&self) -> f64 {
        self.worth(self.grand_coalition())
    }

    /// All nonempty coalitions, ascending by mask.
    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> {
        all_coalitions(self.player_count())
    }

    /// All proper coalitions (the grand coalition excluded), ascending by mask.
    pub fn proper_coalitions(&self) -> impl Iterator<Item = Coalition> {
        let n = self.player_count();
        all_coalitions(n).filter(|s| !s.is_grand())
    }

    /// Validate a payment vector as a preimputation under the default
    /// equality tolerance.
    pub fn preimputation(&self, pay: Vec<f64>) -> Result<Preimputation> {
        self.preimputation_with_tol(pay, TAU_EQ)
    }

    /// Validate a payment vector as a preimputation: right length and
    /// coordinate sum equal to the grand worth within `tol`.
    pub fn preimputation_with_tol(&self, pay: Vec<f64>, tol: f64) -> Result<Preimputation> {
        if pay.len() != self.player_count() {
            return Err(Error::LengthMismatch { expected: self.player_count(), got: pay.len() });
        }
        let sum: f64 = pay.iter().sum();
        let expected = self.grand_worth();
        if (sum - expected).abs() > tol {
            return Err(Error::NotEfficient { sum, expected, tol });
        }
        Ok(Preimputation { pay })
    }

    /// True iff `vec` has the right length and sums to the grand worth
    /// within the default tolerance.
    pub fn is_preimputation(&self, vec: &[f64]) -> Result<bool> {
        if vec.len() != self.player_count() {
            return Err(Error::LengthMismatch { expected: self.player_count(), got: vec.len() });
        }
        let sum: f64 = vec.iter().sum();
        Ok((sum - self.grand_worth()).abs() <= TAU_EQ)
    }

    /// Excess of `s` at `x`: the worth of `s` minus its payment.
    pub fn excess(&self, s: Coalition, x: &Preimputation) -> Result<f64> {
        if s.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        Ok(self.worth(s) - x.payment(s))
    }

    /// Coalitions with strictly positive excess at `x`. Empty exactly when
    /// `x` lies in the core.
    pub fn region_of(&self, x: &Preimputation) -> CoalitionCollection {
        self.coalitions()
            .filter(|&s| self.worth(s) - x.payment(s) > 0.0)
            .collect()
    }

    /// Domination of `y` by `x` via `s`: `x` is affordable to `s` and pays
    /// every member strictly more. Comparisons are exact on the stored
    /// doubles.
    pub fn dominates(&self, x: &Preimputation, y: &Preimputation, s: Coalition) -> Result<bool> {
        if s.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        if x.payment(s) > self.worth(s) {
            return Ok(false);
        }
        Ok(s.players().all(|i| x.pay[i] > y.pay[i]))
    }

    /// Subgame induced by a nonempty coalition: its members become the new
    /// player set and worths restrict to subcoalitions.
    pub fn subgame(&self, t: Coalition) -> Result<Game> {
        if t.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        let members: Vec<usize> = t.players().collect();
        let players: Vec<String> = members.iter().map(|&i| self.players[i].clone()).collect();
        let k = members.len();
        let mut worth = vec![0.0; 1usize << k];
        for sub in 1..(1u32 << k) {
            let mut mask = 0u32;
            for (j, &orig) in members.iter().enumerate() {
                if sub & (1 << j) != 0 {
                    mask |= 1 << orig;
                }
            }
            worth[sub as usize] = self.worth[mask as usize];
        }
        Ok(Game { players, worth })
    }

    /// Render a coalition with this game's player names.
    pub fn label(&self, s: Coalition) -> String {
        s.label(&self.players)
    }
}

/// A payment vector distributing exactly the grand worth.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimputation {
    pay: Vec<f64>,
}

impl Preimputation {
    /// Skip the efficiency check. For internal construction of vectors whose
    /// sum is preserved by algebra (projections, translations).
    pub(crate) fn new_unchecked(pay: Vec<f64>) -> Self {
        Preimputation { pay }
    }

    pub fn coords(&self) -> &[f64] {
        &self.pay
    }

    pub fn len(&self) -> usize {
        self.pay.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pay.is_empty()
    }

    /// Payment of a coalition: the coordinate sum over its members.
    pub fn payment(&self, s: Coalition) -> f64 {
        s.players().map(|i| self.pay[i]).sum()
    }

    /// Translate by a side payment.
    pub fn translate(&self, sigma: &SidePayment) -> Preimputation {
        debug_assert_eq!(self.pay.len(), sigma.delta.len());
        let pay = self.pay.iter().zip(&sigma.delta).map(|(a, b)| a + b).collect();
        Preimputation { pay }
    }

    /// Euclidean distance to another payment vector.
    pub fn distance(&self, other: &Preimputation) -> f64 {
        self.pay
            .iter()
            .zip(&other.pay)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A zero-sum transfer vector: the translation space of preimputations.
#[derive(Debug, Clone, PartialEq)]
pub struct SidePayment {
    delta: Vec<f64>,
}

impl SidePayment {
    /// Validate under the default zero-sum tolerance.
    pub fn new(delta: Vec<f64>) -> Result<Self> {
        let sum: f64 = delta.iter().sum();
        if sum.abs() > TAU_EQ {
            return Err(Error::NotEfficient { sum, expected: 0.0, tol: TAU_EQ });
        }
        Ok(SidePayment { delta })
    }

    pub(crate) fn new_unchecked(delta: Vec<f64>) -> Self {
        SidePayment { delta }
    }

    pub fn zero(n: usize) -> Self {
        SidePayment { delta: vec![0.0; n] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.delta
    }

    /// Aggregate transfer received by a coalition.
    pub fn payment(&self, s: Coalition) -> f64 {
        s.players().map(|i| self.delta[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.delta.iter().map(|d| d * d).sum::<f64>().sqrt()
    }
}

/// A parsed game together with any warnings raised while reading it.
#[derive(Debug, Clone)]
pub struct GameLoad {
    pub game: Game,
    /// One entry per coalition that was absent from the input and defaulted
    /// to worth 0.
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<u32>,
    players: Vec<String>,
    worth: BTreeMap<String, f64>,
}

/// Parse the game JSON format:
/// `{"players": ["a","b"], "worth": {"a": 0, "a,b": 1.0}}`.
///
/// Keys are comma-joined player names, order-insensitive within a key.
/// Coalitions absent from `worth` default to 0 and are reported as warnings.
pub fn game_from_json(text: &str) -> Result<GameLoad> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid game JSON: {e}")))?;
    let n = file.players.len();
    if n == 0 {
        return Err(Error::Parse("player list is empty".into()));
    }
    if n > MAX_PLAYERS {
        return Err(Error::TooManyPlayers(n, MAX_PLAYERS));
    }

    let mut index = BTreeMap::new();
    for (i, name) in file.players.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Parse("empty player name".into()));
        }
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::Parse(format!("duplicate player name: {name}")));
        }
    }

    let mut worths: BTreeMap<u32, f64> = BTreeMap::new();
    for (key, &value) in &file.worth {
        let mut mask = 0u32;
        for part in key.split(',') {
            let part = part.trim();
            let Some(&i) = index.get(part) else {
                return Err(Error::Parse(format!("unknown player {part:?} in coalition key {key:?}")));
            };
            let bit = 1u32 << i;
            if mask & bit != 0 {
                return Err(Error::Parse(format!("duplicate player {part:?} in coalition key {key:?}")));
            }
            mask |= bit;
        }
        if mask == 0 {
            return Err(Error::Parse(format!("empty coalition key {key:?}")));
        }
        if worths.insert(mask, value).is_some() {
            return Err(Error::Parse(format!("coalition key {key:?} repeats an earlier coalition")));
        }
    }

    let mut warnings = Vec::new();
    for s in all_coalitions(n) {
        if !worths.contains_key(&s.mask()) {
            warnings.push(format!(
                "coalition {} missing from input, worth defaults to 0",
                s.label(&file.players)
            ));
        }
    }

    let game = Game::new(file.players, &worths)?;
    Ok(GameLoad { game, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::symmetric_three_player;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn coalition(mask: u32, n: usize) -> Coalition {
        Coalition::new(mask, n).unwrap()
    }

    // Three-player games used across the crate's tests:
    // pairs 0.8 and grand worth 1 (empty core), pairs 0.6 (full-dimensional
    // core), pairs 2/3 (core is the single point (1/3, 1/3, 1/3)).

    #[test]
    fn excess_examples() {
        let wide = symmetric_three_player(0.8);
        let x = wide.preimputation(vec![0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(wide.excess(coalition(0b011, 3), &x).unwrap(), 0.0);

        let bal = symmetric_three_player(0.6);
        let x = bal.preimputation(vec![1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(bal.excess(coalition(0b110, 3), &x).unwrap(), 0.6);

        // Efficiency forces zero excess for the grand coalition.
        let x = bal.preimputation(vec![0.25, 0.4, 0.35]).unwrap();
        assert_abs_diff_eq!(bal.excess(bal.grand_coalition(), &x).unwrap(), 0.0, epsilon = 1e-12);

        assert!(matches!(
            bal.excess(Coalition::empty(3), &x),
            Err(Error::EmptyCoalition)
        ));
    }

    #[test]
    fn region_examples() {
        let bal = symmetric_three_player(0.6);
        let x = bal.preimputation(vec![1.0, 0.0, 0.0]).unwrap();
        let region = bal.region_of(&x);
        assert_eq!(region.to_vec(), vec![coalition(0b110, 3)]);

        let bary = bal.preimputation(vec![1.0 / 3.0; 3]).unwrap();
        assert!(bal.region_of(&bary).is_empty());

        let wide = symmetric_three_player(0.8);
        let bary = wide.preimputation(vec![1.0 / 3.0; 3]).unwrap();
        let masks: Vec<u32> = wide.region_of(&bary).iter().map(|s| s.mask()).collect();
        assert_eq!(masks, vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn domination_examples() {
        let wide = symmetric_three_player(0.8);
        let x = wide.preimputation(vec![0.5, 0.3, 0.2]).unwrap();
        let y = wide.preimputation(vec![0.2, 0.2, 0.6]).unwrap();
        let ab = coalition(0b011, 3);
        assert!(wide.dominates(&x, &y, ab).unwrap());
        // Nothing dominates itself: improvement is strict.
        assert!(!wide.dominates(&x, &x, ab).unwrap());

        let bal = symmetric_three_player(0.6);
        let x = bal.preimputation(vec![1.0, 0.0, 0.0]).unwrap();
        let proj = bal.preimputation(vec![0.4, 0.3, 0.3]).unwrap();
        assert!(bal.dominates(&proj, &x, coalition(0b110, 3)).unwrap());
    }

    #[test]
    fn preimputation_checks() {
        let wide = symmetric_three_player(0.8);
        assert!(wide.is_preimputation(&[1.0 / 3.0; 3]).unwrap());
        assert!(!wide.is_preimputation(&[1.0, 1.0, 1.0]).unwrap());
        assert!(wide.is_preimputation(&[0.4, 0.3, 0.3]).unwrap());
        assert!(wide.is_preimputation(&[0.4, 0.3]).is_err());
        assert!(wide.preimputation(vec![1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn domination_implies_nonnegative_excess() {
        // If x dominates y via S then x(S) <= v(S), i.e. the excess of S at
        // x is nonnegative.
        let games = [
            symmetric_three_player(0.8),
            symmetric_three_player(0.6),
            Game::from_worths(3, &[(0b011, 0.9), (0b100, 0.3), (0b111, 1.0)]).unwrap(),
        ];
        for game in &games {
            let xs = [
                game.preimputation(vec![0.5, 0.3, 0.2]).unwrap(),
                game.preimputation(vec![0.2, 0.2, 0.6]).unwrap(),
                game.preimputation(vec![-0.1, 0.4, 0.7]).unwrap(),
            ];
            for x in &xs {
                for y in &xs {
                    for s in game.coalitions() {
                        if game.dominates(x, y, s).unwrap() {
                            assert!(game.excess(s, x).unwrap() >= 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subgame_restricts_worths() {
        let game = symmetric_three_player(0.8);
        let sub = game.subgame(coalition(0b011, 3)).unwrap();
        assert_eq!(sub.player_count(), 2);
        assert_eq!(sub.players(), &["p0".to_string(), "p1".to_string()]);
        assert_abs_diff_eq!(sub.grand_worth(), 0.8);
        assert_abs_diff_eq!(sub.worth(coalition(0b01, 2)), 0.0);
    }

    #[test]
    fn json_roundtrip_with_defaults() {
        let text = r#"{"players": ["a", "b", "c"],
                       "worth": {"a,b": 0.8, "b,a,c": 1.0}}"#;
        let load = game_from_json(text).unwrap();
        assert_eq!(load.game.player_count(), 3);
        assert_abs_diff_eq!(load.game.worth(coalition(0b011, 3)), 0.8);
        assert_abs_diff_eq!(load.game.grand_worth(), 1.0);
        // Five of the seven coalitions were left to the 0 default.
        assert_eq!(load.warnings.len(), 5);
    }

    #[test]
    fn json_rejects_bad_keys() {
        assert!(game_from_json(r#"{"players": ["a"], "worth": {"a,a": 1.0}}"#).is_err());
        assert!(game_from_json(r#"{"players": ["a"], "worth": {"b": 1.0}}"#).is_err());
        assert!(game_from_json(r#"{"players": ["a", "a"], "worth": {}}"#).is_err());
        assert!(game_from_json(r#"{"players": ["a", "b"], "worth": {"a,b": 1.0, "b,a": 1.0}}"#).is_err());
    }

    #[test]
    fn all_core_types_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Game>();
        assert_send_sync::<Preimputation>();
        assert_send_sync::<SidePayment>();
        assert_send_sync::<Coalition>();
        assert_send_sync::<CoalitionCollection>();
    }

    proptest! {
        // Translating by a side payment shifts every excess by the payment
        // of the coalition under the transfer.
        #[test]
        fn excess_translation(
            pay in proptest::collection::vec(-2.0f64..2.0, 2..=6),
            raw in proptest::collection::vec(-1.0f64..1.0, 2..=6),
        ) {
            let n = pay.len().min(raw.len());
            let pay = &pay[..n];
            let raw = &raw[..n];
            let game = Game::from_worths(n, &[(Coalition::grand(n).mask(), pay.iter().sum())]).unwrap();
            let x = game.preimputation(pay.to_vec()).unwrap();
            // Center the raw vector to make it a side payment.
            let mean = raw.iter().sum::<f64>() / n as f64;
            let sigma = SidePayment::new_unchecked(raw.iter().map(|r| r - mean).collect());
            let y = x.translate(&sigma);
            for s in game.coalitions() {
                let lhs = game.excess(s, &y).unwrap();
                let rhs = game.excess(s, &x).unwrap() - sigma.payment(s);
                prop_assert!((lhs - rhs).abs() <= 1e-9);
            }
        }
    }
}
