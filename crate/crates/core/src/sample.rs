//! Deterministic generators for games, preimputations, collections, and
//! markets. Used by the test suites and benchmarks; handy for quick
//! experiments as well.

use crate::coalition::{proper_coalitions, Coalition, CoalitionCollection};
use crate::game::{Game, Preimputation};
use crate::geometry::{GramExtension, GramState};
use crate::market::Market;
use crate::solver::is_balanced_game;
use crate::Tolerances;
use rand::Rng;

/// Three-player game with singleton worths 0, all pairs worth `pair_worth`,
/// and grand worth 1. Sweeping `pair_worth` moves the game across the
/// balancedness threshold: 0.6 has a full-dimensional core, 2/3 a
/// single-point core, 0.8 an empty core.
pub fn symmetric_three_player(pair_worth: f64) -> Game {
    Game::from_worths(
        3,
        &[(0b011, pair_worth), (0b101, pair_worth), (0b110, pair_worth), (0b111, 1.0)],
    )
    .expect("static game is well-formed")
}

/// Additive game: every coalition is worth the sum of its members' weights.
pub fn additive_game(weights: &[f64]) -> Game {
    let n = weights.len();
    let worths: Vec<(u32, f64)> = crate::coalition::all_coalitions(n)
        .map(|s| (s.mask(), s.players().map(|i| weights[i]).sum()))
        .collect();
    Game::from_worths(n, &worths).expect("additive game is well-formed")
}

/// Game with proper worths drawn uniformly from `[0, 1]` and grand worth
/// drawn uniformly from `[0, 2]`.
pub fn random_game<R: Rng>(n: usize, rng: &mut R) -> Game {
    let mut worths: Vec<(u32, f64)> = proper_coalitions(n)
        .map(|s| (s.mask(), rng.random_range(0.0..1.0)))
        .collect();
    worths.push((Coalition::grand(n).mask(), rng.random_range(0.0..2.0)));
    Game::from_worths(n, &worths).expect("random game is well-formed")
}

/// Balanced game by construction: proper worths drawn uniformly from
/// `[0, 1]`, then the grand worth set to the maximal balanced-collection
/// worth plus a uniform `[0, 0.5]` slack.
pub fn random_balanced_game<R: Rng>(n: usize, rng: &mut R) -> Game {
    let game = random_game(n, rng);
    let report = is_balanced_game(&game, Tolerances::default());
    let slack = rng.random_range(0.0..0.5);
    let mut worths: Vec<(u32, f64)> =
        game.proper_coalitions().map(|s| (s.mask(), game.worth(s))).collect();
    worths.push((Coalition::grand(n).mask(), report.max_balanced_worth + slack));
    Game::from_worths(n, &worths).expect("balanced game is well-formed")
}

/// Random preimputation: coordinates drawn uniformly from `[-1, 1]` and
/// shifted to distribute the grand worth exactly.
pub fn random_preimputation<R: Rng>(game: &Game, rng: &mut R) -> Preimputation {
    let n = game.player_count();
    let mut pay: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let shift = (game.grand_worth() - pay.iter().sum::<f64>()) / n as f64;
    for p in pay.iter_mut() {
        *p += shift;
    }
    game.preimputation(pay).expect("shifted vector is efficient")
}

/// Random independent collection of proper coalitions with exactly `size`
/// members, built by rejection with a Gram-Schmidt independence check.
pub fn random_independent_collection<R: Rng>(
    n: usize,
    size: usize,
    rng: &mut R,
) -> CoalitionCollection {
    assert!(size < n, "independent collections have at most n - 1 members");
    let pool: Vec<Coalition> = proper_coalitions(n).collect();
    loop {
        let mut state = GramState::new(n);
        let mut guard = 0;
        while state.len() < size && guard < 200 {
            guard += 1;
            let s = pool[rng.random_range(0..pool.len())];
            if state.collection().contains(&s) {
                continue;
            }
            if let Ok(GramExtension::Extended(next)) = state.update(s) {
                state = next;
            }
        }
        if state.len() == size {
            return state.collection().iter().copied().collect();
        }
    }
}

/// Random linear market: `n` traders, `m` commodities, endowments uniform
/// in `[0, 2]`, utility coefficients uniform in `[0, 2]`.
pub fn random_market<R: Rng>(n: usize, m: usize, rng: &mut R) -> Market {
    let players = (0..n).map(|i| format!("p{i}")).collect();
    let endowments =
        (0..n).map(|_| (0..m).map(|_| rng.random_range(0.0..2.0)).collect()).collect();
    let utility_coeffs =
        (0..n).map(|_| (0..m).map(|_| rng.random_range(0.0..2.0)).collect()).collect();
    Market::new(players, m, endowments, utility_coeffs).expect("random market is well-formed")
}
