//! Exchange markets with linear utilities and the games they generate.
//!
//! A market pools the endowments of a coalition and reallocates them to
//! maximize total utility. With linear utilities the optimum assigns each
//! commodity's pooled quantity to a member with the largest coefficient, so
//! coalition worths are exact closed forms. The generated games are totally
//! balanced, which makes them a reliable source of games with nonempty
//! cores.

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::game::{Game, Preimputation};
use crate::solutions::{failure, FailureReport};
use crate::{Error, Result, Tolerances};
use serde::Deserialize;
use std::collections::BTreeMap;

/// A linear-utility exchange market: per-player endowment and utility
/// coefficient vectors over a common commodity space.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    players: Vec<String>,
    commodities: usize,
    endowments: Vec<Vec<f64>>,
    utility_coeffs: Vec<Vec<f64>>,
}

impl Market {
    pub fn new(
        players: Vec<String>,
        commodities: usize,
        endowments: Vec<Vec<f64>>,
        utility_coeffs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = players.len();
        if n == 0 {
            return Err(Error::Parse("player list is empty".into()));
        }
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n, MAX_PLAYERS));
        }
        if endowments.len() != n || utility_coeffs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: endowments.len().min(utility_coeffs.len()) });
        }
        for vec in endowments.iter().chain(&utility_coeffs) {
            if vec.len() != commodities {
                return Err(Error::LengthMismatch { expected: commodities, got: vec.len() });
            }
            if vec.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Parse("endowments and utilities must be finite and nonnegative".into()));
            }
        }
        Ok(Market { players, commodities, endowments, utility_coeffs })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn commodities(&self) -> usize {
        self.commodities
    }

    pub fn endowment(&self, player: usize) -> &[f64] {
        &self.endowments[player]
    }

    pub fn utility_coeffs(&self, player: usize) -> &[f64] {
        &self.utility_coeffs[player]
    }

    /// Worth of a coalition: pooled endowment of each commodity times the
    /// best utility coefficient among the members.
    fn coalition_worth(&self, s: Coalition) -> f64 {
        (0..self.commodities)
            .map(|g| {
                let pooled: f64 = s.players().map(|i| self.endowments[i][g]).sum();
                let best = s
                    .players()
                    .map(|i| self.utility_coeffs[i][g])
                    .fold(0.0f64, f64::max);
                pooled * best
            })
            .sum()
    }

    /// The game generated by the market over the same player list.
    pub fn market_game(&self) -> Game {
        let n = self.player_count();
        let worths: BTreeMap<u32, f64> = crate::coalition::all_coalitions(n)
            .map(|s| (s.mask(), self.coalition_worth(s)))
            .collect();
        Game::new(self.players.clone(), &worths).expect("market game is well-formed")
    }
}

/// Failure of the market at a payment vector: validates the vector as a
/// preimputation of the generated game and delegates to the game-level
/// failure. Market games are balanced, so the empty-core error cannot
/// occur for valid inputs.
pub fn market_failure(market: &Market, pay: &[f64], tol: Tolerances) -> Result<FailureReport> {
    let game = market.market_game();
    let x: Preimputation = game
        .preimputation_with_tol(pay.to_vec(), tol.eq)
        .map_err(|_| Error::NotPreimputation(format!("{pay:?}")))?;
    failure(&game, &x, tol)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<u32>,
    players: Vec<String>,
    commodities: usize,
    endowments: BTreeMap<String, Vec<f64>>,
    utilities: BTreeMap<String, Vec<f64>>,
}

/// Parse the market JSON format:
/// `{"players":["a","b"], "commodities": 1,
///   "endowments": {"a":[1],"b":[1]}, "utilities": {"a":[2],"b":[1]}}`.
pub fn market_from_json(text: &str) -> Result<Market> {
    let file: MarketFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("invalid market JSON: {e}")))?;
    let mut endowments = Vec::with_capacity(file.players.len());
    let mut utilities = Vec::with_capacity(file.players.len());
    for name in &file.players {
        let Some(e) = file.endowments.get(name) else {
            return Err(Error::Parse(format!("player {name:?} has no endowment entry")));
        };
        let Some(u) = file.utilities.get(name) else {
            return Err(Error::Parse(format!("player {name:?} has no utility entry")));
        };
        endowments.push(e.clone());
        utilities.push(u.clone());
    }
    for key in file.endowments.keys().chain(file.utilities.keys()) {
        if !file.players.contains(key) {
            return Err(Error::Parse(format!("entry for unknown player {key:?}")));
        }
    }
    Market::new(file.players, file.commodities, endowments, utilities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_trader_market() -> Market {
        Market::new(
            vec!["a".into(), "b".into()],
            1,
            vec![vec![1.0], vec![1.0]],
            vec![vec![2.0], vec![1.0]],
        )
        .unwrap()
    }

    #[test]
    fn two_trader_worths() {
        let game = two_trader_market().market_game();
        let a = Coalition::new(0b01, 2).unwrap();
        let b = Coalition::new(0b10, 2).unwrap();
        assert_abs_diff_eq!(game.worth(a), 2.0);
        assert_abs_diff_eq!(game.worth(b), 1.0);
        assert_abs_diff_eq!(game.grand_worth(), 4.0);
    }

    #[test]
    fn singletons_cannot_trade() {
        let market = Market::new(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![vec![1.0, 0.5], vec![0.0, 2.0], vec![1.5, 1.0]],
            vec![vec![1.0, 3.0], vec![2.0, 0.5], vec![0.0, 1.0]],
        )
        .unwrap();
        let game = market.market_game();
        for (i, mask) in [(0usize, 0b001u32), (1, 0b010), (2, 0b100)] {
            let own: f64 = market
                .endowment(i)
                .iter()
                .zip(market.utility_coeffs(i))
                .map(|(a, c)| a * c)
                .sum();
            assert_abs_diff_eq!(game.worth(Coalition::new(mask, 3).unwrap()), own);
        }
    }

    #[test]
    fn three_trader_two_commodity_worths() {
        let market = Market::new(
            vec!["a".into(), "b".into(), "c".into()],
            2,
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let game = market.market_game();
        let worth =
            |mask: u32| game.worth(Coalition::new(mask, 3).unwrap());
        assert_abs_diff_eq!(worth(0b001), 1.0);
        assert_abs_diff_eq!(worth(0b010), 1.0);
        assert_abs_diff_eq!(worth(0b100), 2.0);
        assert_abs_diff_eq!(worth(0b011), 4.0);
        assert_abs_diff_eq!(worth(0b101), 4.0);
        assert_abs_diff_eq!(worth(0b110), 4.0);
        assert_abs_diff_eq!(worth(0b111), 8.0);
    }

    #[test]
    fn market_failure_cases() {
        let market = two_trader_market();
        let tol = Tolerances::default();

        // Core of the generated game: payments at least (2, 1), summing 4.
        let report = market_failure(&market, &[3.0, 1.0], tol).unwrap();
        assert_abs_diff_eq!(report.value, 0.0, epsilon = 1e-9);

        let report = market_failure(&market, &[4.0, 0.0], tol).unwrap();
        assert_abs_diff_eq!(report.value, 2.0f64.sqrt(), epsilon = 1e-9);
        for (got, want) in report.nearest_point.coords().iter().zip([3.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }

        let report = market_failure(&market, &[2.5, 1.5], tol).unwrap();
        assert!(report.value < 0.0);

        assert!(matches!(
            market_failure(&market, &[1.0, 1.0], tol),
            Err(Error::NotPreimputation(_))
        ));
    }

    #[test]
    fn json_parsing() {
        let market = market_from_json(
            r#"{"players":["a","b"], "commodities": 1,
                "endowments": {"a":[1],"b":[1]}, "utilities": {"a":[2],"b":[1]}}"#,
        )
        .unwrap();
        assert_eq!(market, two_trader_market());

        assert!(market_from_json(
            r#"{"players":["a"], "commodities": 1,
                "endowments": {}, "utilities": {"a":[1]}}"#
        )
        .is_err());
        assert!(market_from_json(
            r#"{"players":["a"], "commodities": 1,
                "endowments": {"a":[1],"b":[2]}, "utilities": {"a":[1]}}"#
        )
        .is_err());
        assert!(market_from_json(
            r#"{"players":["a"], "commodities": 2,
                "endowments": {"a":[1]}, "utilities": {"a":[1,2]}}"#
        )
        .is_err());
    }
}
