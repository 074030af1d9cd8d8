//! Game balancedness, core membership, and the projection of a
//! preimputation onto the core.
//!
//! The core projection searches collections of coalitions breadth-first by
//! cardinality, starting from the subcollections of the region of `x`
//! (coalitions with positive excess). Each candidate carries an
//! incrementally extended orthonormal basis, so dependence pruning costs a
//! single Gram-Schmidt step. A candidate is reaching when its projection
//! satisfies every coalition; the first level with reaching candidates
//! keeps the one of smallest projection distance.
//!
//! The region alone is not always enough: a constraint can be active at
//! the true projection while its excess at `x` is nonpositive, leaving it
//! outside the region entirely (projecting onto a violated constraint can
//! push a previously satisfied coalition below its worth). The search
//! therefore widens to all proper coalitions when the regional pool
//! exhausts, and [`project_onto_core`] certifies its answer against the
//! optimality condition: the applied side payment must be a nonnegative
//! combination of constraint normals active at the projected point.

use crate::coalition::{Coalition, CoalitionCollection};
use crate::game::{Game, Preimputation};
use crate::geometry::{normal_vector, GramExtension, GramState};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::projection::{project_collection, ProjectionResult};
use crate::{Error, Result, Tolerances};
use std::collections::BTreeMap;

/// Balancedness of a game: whether the grand coalition is an optimal
/// organization, the best balanced-collection worth, and the weights
/// achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancednessReport {
    pub balanced: bool,
    pub max_balanced_worth: f64,
    /// Positive weights of a balanced collection attaining the maximum.
    pub witness: BTreeMap<Coalition, f64>,
}

/// Balancedness via the weight-maximization program: maximize the total
/// weighted worth over nonnegative weights on proper coalitions whose
/// indicator combination is the all-ones vector. The game is balanced
/// exactly when the optimum does not exceed the grand worth.
pub fn is_balanced_game(game: &Game, tol: Tolerances) -> BalancednessReport {
    let n = game.player_count();
    if n == 1 {
        // No proper coalitions: the singleton game is trivially balanced
        // and the grand coalition itself is the only organization.
        let mut witness = BTreeMap::new();
        witness.insert(game.grand_coalition(), 1.0);
        return BalancednessReport {
            balanced: true,
            max_balanced_worth: game.grand_worth(),
            witness,
        };
    }
    let members: Vec<Coalition> = game.proper_coalitions().collect();
    let objective: Vec<f64> = members.iter().map(|&s| game.worth(s)).collect();
    let mut lp = LinearProgram::maximize(objective).nonnegative();
    for i in 0..n {
        let row: Vec<f64> =
            members.iter().map(|s| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        lp = lp.with_eq(row, 1.0);
    }
    let outcome = solve_lp(&lp).expect("balancedness LP is well-formed");
    let (solution, value) = match outcome {
        LpOutcome::Optimal { solution, value } => (solution, value),
        // Weights 1/|partition| on any partition are feasible, so this
        // cannot happen for n >= 2.
        _ => unreachable!("balancedness LP is feasible and bounded"),
    };
    let witness: BTreeMap<Coalition, f64> = members
        .into_iter()
        .zip(solution)
        .filter(|(_, w)| *w > crate::TAU_POS)
        .collect();
    BalancednessReport {
        balanced: value <= game.grand_worth() + tol.eq,
        max_balanced_worth: value,
        witness,
    }
}

/// Coalitions paid exactly their worth by every core element, the grand
/// coalition always included. Each proper coalition is tested by maximizing
/// its payment over the core.
pub fn exact_coalitions(game: &Game, tol: Tolerances) -> Result<CoalitionCollection> {
    if !is_balanced_game(game, tol).balanced {
        return Err(Error::EmptyCore);
    }
    let n = game.player_count();
    let mut exact = CoalitionCollection::new();
    exact.insert(game.grand_coalition());
    for s in game.proper_coalitions() {
        let objective: Vec<f64> = (0..n).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        let mut lp = LinearProgram::maximize(objective).with_eq(vec![1.0; n], game.grand_worth());
        for t in game.proper_coalitions() {
            let row: Vec<f64> =
                (0..n).map(|i| if t.contains(i) { -1.0 } else { 0.0 }).collect();
            lp = lp.with_le(row, -game.worth(t));
        }
        let (_, best) = solve_lp(&lp)
            .expect("exact-coalition LP is well-formed")
            .require_optimal()?;
        if best <= game.worth(s) + tol.face {
            exact.insert(s);
        }
    }
    Ok(exact)
}

/// Core membership: no coalition's excess exceeds the face tolerance.
/// Scans all coalitions.
pub fn in_core(game: &Game, x: &Preimputation, tol: Tolerances) -> bool {
    game.coalitions().all(|s| game.worth(s) - x.payment(s) <= tol.face)
}

/// Result of the reaching-collection search.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachingSearchResult {
    pub collection: CoalitionCollection,
    pub projection: ProjectionResult,
    /// Number of independent candidate collections whose projection was
    /// evaluated.
    pub explored: usize,
}

/// One frontier node of the breadth-first search: the candidate collection
/// (as pool indices) plus its incrementally built orthonormal basis.
struct Node {
    gram: GramState,
    last_idx: usize,
}

/// How the breadth-first search decides when to stop.
enum SearchMode {
    /// Stop after the first cardinality level containing a reaching
    /// collection, keeping its distance minimum.
    FirstLevel,
    /// Keep searching until the incumbent minimum is certified optimal
    /// (or every level is exhausted), then return the global minimum.
    CertifiedMinimum,
}

/// Breadth-first search over subcollections of `pool` by cardinality.
/// Candidates are generated in lexicographic mask-sequence order, so
/// distance ties resolve to the lexicographically smallest collection.
fn search_reaching(
    game: &Game,
    x: &Preimputation,
    pool: &[Coalition],
    tol: Tolerances,
    mode: SearchMode,
) -> (Option<(CoalitionCollection, ProjectionResult)>, usize) {
    let n = game.player_count();
    let max_size = pool.len().min(n.saturating_sub(1));
    let mut explored = 0usize;
    let mut best: Option<(CoalitionCollection, ProjectionResult)> = None;

    let mut frontier: Vec<Node> = Vec::new();
    for (idx, &s) in pool.iter().enumerate() {
        match GramState::new(n).update(s) {
            Ok(GramExtension::Extended(gram)) => frontier.push(Node { gram, last_idx: idx }),
            Ok(GramExtension::Dependent) | Err(_) => {}
        }
    }

    let mut level = 1usize;
    while !frontier.is_empty() && level <= max_size {
        let mut improved = false;
        for node in &frontier {
            let q: CoalitionCollection = node.gram.collection().iter().copied().collect();
            let Ok(result) = project_collection(game, &q, x) else { continue };
            explored += 1;
            if in_core(game, &result.point, tol) {
                let better = match &best {
                    None => true,
                    Some((_, incumbent)) => result.distance < incumbent.distance,
                };
                if better {
                    best = Some((q, result));
                    improved = true;
                }
            }
        }
        match mode {
            SearchMode::FirstLevel => {
                if best.is_some() {
                    return (best, explored);
                }
            }
            SearchMode::CertifiedMinimum => {
                if improved {
                    if let Some((_, incumbent)) = &best {
                        if certified_optimal(game, incumbent, tol) {
                            return (best, explored);
                        }
                    }
                }
            }
        }
        // Expand: append pool members beyond the node's last index, keeping
        // only extensions whose normal is independent of the node's span.
        let mut next = Vec::new();
        for node in &frontier {
            for (idx, &s) in pool.iter().enumerate().skip(node.last_idx + 1) {
                match node.gram.update(s) {
                    Ok(GramExtension::Extended(gram)) => {
                        next.push(Node { gram, last_idx: idx })
                    }
                    Ok(GramExtension::Dependent) | Err(_) => {}
                }
            }
        }
        frontier = next;
        level += 1;
    }
    (best, explored)
}

/// The search of the first reaching cardinality level: candidates start
/// from the subcollections of the region of `x`, explored breadth-first;
/// among the reaching collections of the first successful level the one of
/// minimal projection distance wins, ties resolved lexicographically.
///
/// When no subcollection of the region reaches the core (the projection
/// must tighten constraints that were still satisfied at `x`), the
/// candidate pool widens to all proper coalitions.
pub fn minimal_reaching_collection(
    game: &Game,
    x: &Preimputation,
    tol: Tolerances,
) -> Result<ReachingSearchResult> {
    if !is_balanced_game(game, tol).balanced {
        return Err(Error::EmptyCore);
    }
    if in_core(game, x, tol) {
        return Err(Error::AlreadyInCore);
    }
    let pool = game.region_of(x).to_vec();
    let (best, explored) = search_reaching(game, x, &pool, tol, SearchMode::FirstLevel);
    if let Some((collection, projection)) = best {
        return Ok(ReachingSearchResult { collection, projection, explored });
    }
    let full_pool: Vec<Coalition> = game.proper_coalitions().collect();
    let (best, widened) = search_reaching(game, x, &full_pool, tol, SearchMode::FirstLevel);
    match best {
        Some((collection, projection)) => Ok(ReachingSearchResult {
            collection,
            projection,
            explored: explored + widened,
        }),
        None => Err(Error::SearchExhausted),
    }
}

/// Certify that a candidate projection is the core projection: the applied
/// side payment must be a nonnegative combination of the normals of
/// constraints active at the projected point. The cheap sufficient check is
/// nonnegativity of the candidate's own coefficients; the general check is
/// a feasibility program over the full active set.
fn certified_optimal(game: &Game, r: &ProjectionResult, tol: Tolerances) -> bool {
    let slack = 1e-9 * (1.0 + r.gamma.values().fold(0.0f64, |m, g| m.max(g.abs())));
    if r.gamma.values().all(|&g| g >= -slack) {
        return true;
    }
    let active: Vec<Coalition> = game
        .proper_coalitions()
        .filter(|&s| (game.worth(s) - r.point.payment(s)).abs() <= tol.face)
        .collect();
    if active.is_empty() {
        return false;
    }
    let n = game.player_count();
    let mut lp = LinearProgram::maximize(vec![0.0; active.len()]).nonnegative();
    for i in 0..n {
        let row: Vec<f64> = active.iter().map(|&s| normal_vector(s).coords()[i]).collect();
        lp = lp.with_eq(row, r.side_payment.coords()[i]);
    }
    matches!(solve_lp(&lp), Ok(LpOutcome::Optimal { .. }))
}

/// Projection of a preimputation onto the core: the unique nearest core
/// element. Preimputations already in the core project onto themselves.
pub fn project_onto_core(
    game: &Game,
    x: &Preimputation,
    tol: Tolerances,
) -> Result<ProjectionResult> {
    if !is_balanced_game(game, tol).balanced {
        return Err(Error::EmptyCore);
    }
    if in_core(game, x, tol) {
        return Ok(ProjectionResult {
            point: x.clone(),
            gamma: BTreeMap::new(),
            side_payment: crate::game::SidePayment::zero(x.len()),
            distance: 0.0,
            collection: CoalitionCollection::new(),
        });
    }
    let pool = game.region_of(x).to_vec();
    let (best, _) = search_reaching(game, x, &pool, tol, SearchMode::FirstLevel);
    if let Some((_, projection)) = best {
        if certified_optimal(game, &projection, tol) {
            return Ok(projection);
        }
    }
    // The regional first level missed the nearest core point (or could not
    // certify it). Search all proper coalitions, stopping as soon as the
    // incumbent minimum certifies; the global reaching minimum is the
    // projection in any case.
    let full_pool: Vec<Coalition> = game.proper_coalitions().collect();
    let (best, _) = search_reaching(game, x, &full_pool, tol, SearchMode::CertifiedMinimum);
    match best {
        Some((_, projection)) => Ok(projection),
        None => Err(Error::SearchExhausted),
    }
}
