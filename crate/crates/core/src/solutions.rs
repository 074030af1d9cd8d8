//! Solution concepts built on the core projection: the signed failure
//! measure, the least-core, the Chebyshev core, and the optimal
//! reallocation.

use crate::coalition::{Coalition, CoalitionCollection};
use crate::game::{Game, Preimputation, SidePayment};
use crate::geometry::eta_norm_sq;
use crate::lp::{solve_lp, LinearProgram};
use crate::projection::project_single;
use crate::solver::{in_core, is_balanced_game, project_onto_core};
use crate::{Error, Result, Tolerances};

/// Signed distance from a preimputation to the core boundary.
///
/// Positive outside the core (the distance to the nearest core element),
/// zero on the boundary, negative strictly inside (minus the distance to
/// the nearest constraint hyperplane).
#[derive(Debug, Clone, PartialEq)]
pub struct FailureReport {
    pub value: f64,
    /// Nearest core element (outside) or nearest boundary hyperplane
    /// projection (inside).
    pub nearest_point: Preimputation,
    /// Side payment carrying `x` to the nearest point.
    pub reallocation: SidePayment,
    /// Per-coalition decomposition of the reallocation.
    pub items: Vec<ReallocationItem>,
}

/// One line of the reallocation decomposition: collect
/// `(|S|/n) · gamma` from every player and hand `gamma` to each member of
/// the coalition.
#[derive(Debug, Clone, PartialEq)]
pub struct ReallocationItem {
    pub coalition: Coalition,
    pub gamma: f64,
    pub collect_per_player: f64,
    pub give_per_member: f64,
}

fn items_from_gamma<'a, I>(n: usize, gamma: I) -> Vec<ReallocationItem>
where
    I: IntoIterator<Item = (&'a Coalition, &'a f64)>,
{
    gamma
        .into_iter()
        .map(|(&coalition, &g)| ReallocationItem {
            coalition,
            gamma: g,
            collect_per_player: coalition.size() as f64 / n as f64 * g,
            give_per_member: g,
        })
        .collect()
}

/// The failure of the game at `x`: signed distance to the core boundary,
/// together with the nearest point and the side payment reaching it.
/// Undefined for unbalanced games (the boundary is empty).
pub fn failure(game: &Game, x: &Preimputation, tol: Tolerances) -> Result<FailureReport> {
    if !is_balanced_game(game, tol).balanced {
        return Err(Error::EmptyCore);
    }
    let n = game.player_count();
    if in_core(game, x, tol) {
        // Inside: the nearest boundary point lies on the facet whose scaled
        // excess is largest (least negative). Ties resolve to the smallest
        // mask.
        let mut best: Option<(Coalition, f64)> = None;
        for s in game.proper_coalitions() {
            let scaled = (game.worth(s) - x.payment(s)) / eta_norm_sq(s).sqrt();
            match best {
                None => best = Some((s, scaled)),
                Some((_, b)) if scaled > b => best = Some((s, scaled)),
                _ => {}
            }
        }
        let Some((facet, value)) = best else {
            // Single-player game: the core is all of the preimputation
            // space and there is no proper constraint to measure against.
            return Err(Error::NoOptimum("undefined for a single player"));
        };
        let proj = project_single(game, facet, x)?;
        let items = items_from_gamma(n, proj.gamma.iter());
        return Ok(FailureReport {
            value,
            nearest_point: proj.point,
            reallocation: proj.side_payment,
            items,
        });
    }
    let proj = project_onto_core(game, x, tol)?;
    let items = items_from_gamma(n, proj.gamma.iter());
    Ok(FailureReport {
        value: proj.distance,
        nearest_point: proj.point,
        reallocation: proj.side_payment,
        items,
    })
}

/// The least-core level and one of its elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastCoreReport {
    /// Minimal uniform excess bound: negative for games with a
    /// full-dimensional core, positive for unbalanced games.
    pub epsilon0: f64,
    pub optimizer: Preimputation,
    /// Proper coalitions whose excess at the optimizer attains the bound.
    pub tight: CoalitionCollection,
}

fn min_max_excess_lp(game: &Game, scale: impl Fn(Coalition) -> f64) -> Result<(Vec<f64>, f64)> {
    let n = game.player_count();
    // Variables: the payment vector, then the level t; minimize t.
    let mut objective = vec![0.0; n + 1];
    objective[n] = -1.0;
    let mut lp = LinearProgram::maximize(objective);
    let mut row = vec![1.0; n];
    row.push(0.0);
    lp = lp.with_eq(row, game.grand_worth());
    for s in game.proper_coalitions() {
        let mut row = vec![0.0; n + 1];
        for i in s.players() {
            row[i] = -1.0;
        }
        row[n] = -scale(s);
        lp = lp.with_le(row, -game.worth(s));
    }
    let (solution, _) = solve_lp(&lp)?.require_optimal()?;
    let t = solution[n];
    let mut pay = solution;
    pay.truncate(n);
    // Remove the simplex's rounding drift so the optimizer is an exact
    // preimputation.
    let shift = (game.grand_worth() - pay.iter().sum::<f64>()) / n as f64;
    for p in pay.iter_mut() {
        *p += shift;
    }
    Ok((pay, t))
}

/// The least-core: minimize the maximal excess over proper coalitions.
/// Defined for unbalanced games as well (the level is positive there).
pub fn least_core(game: &Game) -> Result<LeastCoreReport> {
    let (pay, t) = min_max_excess_lp(game, |_| 1.0)?;
    let optimizer = Preimputation::new_unchecked(pay);
    let tight = game
        .proper_coalitions()
        .filter(|&s| (game.worth(s) - optimizer.payment(s) - t).abs() <= 1e-7)
        .collect();
    Ok(LeastCoreReport { epsilon0: t, optimizer, tight })
}

/// Membership in the eps-core: every proper coalition's excess at most
/// `eps` (within the equality tolerance).
pub fn epsilon_core_contains(game: &Game, eps: f64, x: &Preimputation, tol: Tolerances) -> bool {
    game.proper_coalitions()
        .all(|s| game.worth(s) - x.payment(s) <= eps + tol.eq)
}

/// The Chebyshev-core level and one of its elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevReport {
    /// Minimal uniform bound on the normal-rescaled excesses; equals the
    /// negated failure of the optimizer.
    pub value: f64,
    pub optimizer: Preimputation,
    /// Proper coalitions whose rescaled excess attains the bound.
    pub tight: CoalitionCollection,
}

/// The Chebyshev core: minimize the maximal excess rescaled by the
/// constraint-normal norm. Never empty, defined for every game.
pub fn chebyshev_core(game: &Game) -> Result<ChebyshevReport> {
    let (pay, t) = min_max_excess_lp(game, |s| eta_norm_sq(s).sqrt())?;
    let optimizer = Preimputation::new_unchecked(pay);
    let tight = game
        .proper_coalitions()
        .filter(|&s| {
            let scaled = (game.worth(s) - optimizer.payment(s)) / eta_norm_sq(s).sqrt();
            (scaled - t).abs() <= 1e-7
        })
        .collect();
    Ok(ChebyshevReport { value: t, optimizer, tight })
}

/// The optimal reallocation and its per-coalition decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Reallocation {
    pub side_payment: SidePayment,
    pub items: Vec<ReallocationItem>,
}

/// The shortest side payment carrying `x` into the core: the side payment
/// of the core projection, zero when `x` is already a core element.
pub fn optimal_reallocation(game: &Game, x: &Preimputation, tol: Tolerances) -> Result<Reallocation> {
    let proj = project_onto_core(game, x, tol)?;
    let items = items_from_gamma(game.player_count(), proj.gamma.iter());
    Ok(Reallocation { side_payment: proj.side_payment, items })
}
