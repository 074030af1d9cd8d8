//! Market-game generation against a grid oracle, and total balancedness.

use coreproj::coalition::Coalition;
use coreproj::sample::random_market;
use coreproj::solver::is_balanced_game;
use coreproj::{Market, Tolerances};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Grid oracle for a coalition's worth. Linear utilities make the total
/// utility separable across commodities (the objective is a sum of
/// per-commodity terms and the feasibility constraints are per-commodity),
/// so each commodity's pooled quantity is allocated independently over a
/// simplex grid with 64 subdivisions.
fn grid_worth(market: &Market, s: Coalition) -> f64 {
    const STEPS: usize = 64;
    let members: Vec<usize> = s.players().collect();
    let mut total = 0.0;
    for g in 0..market.commodities() {
        let pooled: f64 = members.iter().map(|&i| market.endowment(i)[g]).sum();
        if pooled == 0.0 {
            continue;
        }
        let coeffs: Vec<f64> = members.iter().map(|&i| market.utility_coeffs(i)[g]).collect();
        // Enumerate compositions of STEPS into |S| parts.
        let mut best = f64::NEG_INFINITY;
        let mut counts = vec![0usize; members.len()];
        fn walk(
            counts: &mut Vec<usize>,
            pos: usize,
            remaining: usize,
            coeffs: &[f64],
            pooled: f64,
            best: &mut f64,
        ) {
            if pos == counts.len() - 1 {
                counts[pos] = remaining;
                let value: f64 = counts
                    .iter()
                    .zip(coeffs)
                    .map(|(&k, c)| c * pooled * k as f64 / STEPS as f64)
                    .sum();
                if value > *best {
                    *best = value;
                }
                return;
            }
            for k in 0..=remaining {
                counts[pos] = k;
                walk(counts, pos + 1, remaining - k, coeffs, pooled, best);
            }
        }
        walk(&mut counts, 0, STEPS, &coeffs, pooled, &mut best);
        total += best;
    }
    total
}

#[test]
fn analytic_worths_match_grid_oracle() {
    let mut rng = StdRng::seed_from_u64(401);
    for _ in 0..100 {
        let n = rng.random_range(2..=4usize);
        let m = rng.random_range(1..=3usize);
        let market = random_market(n, m, &mut rng);
        let game = market.market_game();
        for s in game.coalitions() {
            let grid = grid_worth(&market, s);
            // Linear objectives peak at grid vertices, so the grid value
            // matches the closed form up to roundoff.
            assert!(
                (game.worth(s) - grid).abs() <= 1e-9 + game.worth(s).abs() * 1e-12,
                "worth mismatch on {s}: analytic {} vs grid {grid}",
                game.worth(s)
            );
        }
    }
}

#[test]
fn generated_games_are_totally_balanced() {
    let mut rng = StdRng::seed_from_u64(402);
    let tol = Tolerances::default();
    for _ in 0..30 {
        let n = rng.random_range(2..=5usize);
        let m = rng.random_range(1..=3usize);
        let game = random_market(n, m, &mut rng).market_game();
        for t in game.coalitions() {
            let sub = game.subgame(t).unwrap();
            assert!(
                is_balanced_game(&sub, tol).balanced,
                "subgame on {t} is unbalanced"
            );
        }
    }
}

#[test]
fn worths_are_superadditive_on_disjoint_coalitions() {
    let mut rng = StdRng::seed_from_u64(403);
    for _ in 0..50 {
        let n = rng.random_range(2..=5usize);
        let m = rng.random_range(1..=3usize);
        let game = random_market(n, m, &mut rng).market_game();
        for s in game.proper_coalitions() {
            for t in game.proper_coalitions() {
                if s.intersection(t).is_empty() {
                    let joint = game.worth(s.union(t));
                    assert!(joint >= game.worth(s) + game.worth(t) - 1e-9);
                }
            }
        }
    }
}
