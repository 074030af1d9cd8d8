//! Shared brute-force oracles for the integration suites.
//!
//! Everything here recomputes projections from first principles, on purpose
//! through a different route than the library: equality-constrained least
//! squares over coalition *indicator* rows, solved with plain Gaussian
//! elimination. No Gram matrices of constraint normals, no Cholesky, no
//! incremental bases.

#![allow(dead_code)]

use coreproj::coalition::{proper_coalitions, Coalition};
use coreproj::Game;

/// Gaussian elimination with partial pivoting; `None` when a pivot falls
/// below `tol`.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let k = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..k {
        let mut piv = col;
        for row in col + 1..k {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() <= tol {
            return None;
        }
        m.swap(piv, col);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..=k {
                m[row][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = m[i][k];
        for j in i + 1..k {
            sum -= m[i][j] * x[j];
        }
        x[i] = sum / m[i][i];
    }
    Some(x)
}

/// Upper bound on KKT rows (grand coalition plus tight constraints).
const MAXK: usize = 8;

/// Projection onto the affine set where every `masks[i]` coalition is paid
/// exactly `rhs[i]`, by the KKT normal equations over indicator rows
/// (entries are intersection sizes), written into `y`. Returns `false`
/// when the rows are dependent. Allocation-free.
fn indicator_project_into(masks: &[u32], rhs: &[f64], x: &[f64], y: &mut [f64]) -> bool {
    let k = masks.len();
    debug_assert!(k <= MAXK);
    let mut m = [[0.0f64; MAXK + 1]; MAXK];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = (masks[i] & masks[j]).count_ones() as f64;
        }
        let mut pay = 0.0;
        let mut mm = masks[i];
        while mm != 0 {
            pay += x[mm.trailing_zeros() as usize];
            mm &= mm - 1;
        }
        m[i][k] = rhs[i] - pay;
    }
    for col in 0..k {
        let mut piv = col;
        for row in col + 1..k {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() <= 1e-7 {
            return false;
        }
        m.swap(piv, col);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for j in col..=k {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    let mut lambda = [0.0f64; MAXK];
    for i in (0..k).rev() {
        let mut sum = m[i][k];
        for j in i + 1..k {
            sum -= m[i][j] * lambda[j];
        }
        lambda[i] = sum / m[i][i];
    }
    y.copy_from_slice(x);
    for (i, &mask) in masks.iter().enumerate() {
        let mut mm = mask;
        while mm != 0 {
            y[mm.trailing_zeros() as usize] += lambda[i];
            mm &= mm - 1;
        }
    }
    true
}

/// Projection of `x` onto the affine set where every coalition of `tight`
/// is paid exactly its worth (and the total stays the grand worth).
/// `None` when the constraint rows are dependent.
pub fn indicator_projection(game: &Game, tight: &[Coalition], x: &[f64]) -> Option<Vec<f64>> {
    let n = game.player_count();
    let masks: Vec<u32> = std::iter::once(((1u64 << n) - 1) as u32)
        .chain(tight.iter().map(|s| s.mask()))
        .collect();
    let rhs: Vec<f64> = std::iter::once(game.grand_worth())
        .chain(tight.iter().map(|&s| game.worth(s)))
        .collect();
    let mut y = vec![0.0; n];
    indicator_project_into(&masks, &rhs, x, &mut y).then_some(y)
}

pub fn max_proper_excess(game: &Game, y: &[f64]) -> f64 {
    game.proper_coalitions()
        .map(|s| game.worth(s) - s.players().map(|i| y[i]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn in_core_slice(game: &Game, y: &[f64], tol: f64) -> bool {
    max_proper_excess(game, y) <= tol
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Visit every subset of `0..pool` with 1..=max_size elements, in
/// lexicographic order.
pub fn for_each_combination(pool: usize, max_size: usize, mut f: impl FnMut(&[usize])) {
    let mut stack: Vec<usize> = Vec::new();
    fn recurse(
        pool: usize,
        max_size: usize,
        start: usize,
        stack: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        for i in start..pool {
            stack.push(i);
            f(stack);
            if stack.len() < max_size {
                recurse(pool, max_size, i + 1, stack, f);
            }
            stack.pop();
        }
    }
    recurse(pool, max_size, 0, &mut stack, &mut f);
}

/// Brute-force core projection: project onto every tight set of at most
/// `n - 1` proper coalitions, keep the in-core projections, and return the
/// closest. `None` when no projection lands in the core (empty core).
///
/// Tight sets containing a hyperplane farther from `x` than the incumbent
/// minimum are skipped: the distance to an intersection is at least the
/// distance to each member hyperplane, so the bound is sound.
pub fn oracle_core_projection(game: &Game, x: &[f64], face_tol: f64) -> Option<(Vec<f64>, f64)> {
    if in_core_slice(game, x, face_tol) {
        return Some((x.to_vec(), 0.0));
    }
    let n = game.player_count();
    let full = ((1u64 << n) - 1) as u32;
    let pool: Vec<Coalition> = proper_coalitions(n).collect();
    let worths: Vec<f64> = (0..=full)
        .map(|mask| if mask == 0 { 0.0 } else { game.worth(Coalition::new(mask, n).unwrap()) })
        .collect();
    // Distance from x to each coalition's hyperplane: |e_S(x)| / ||eta_S||.
    let hyperplane_dist: Vec<f64> = pool
        .iter()
        .map(|&s| {
            let excess = game.worth(s) - s.players().map(|i| x[i]).sum::<f64>();
            let size = s.size() as f64;
            let norm_sq = size * (n as f64 - size) / n as f64;
            excess.abs() / norm_sq.sqrt()
        })
        .collect();

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut best_dist = f64::INFINITY;
    let mut masks = [0u32; MAXK];
    let mut rhs = [0.0f64; MAXK];
    masks[0] = full;
    rhs[0] = game.grand_worth();
    let mut y = vec![0.0f64; n];
    // Payments of all coalitions at y, filled by subset-sum recurrence.
    let mut pay = vec![0.0f64; (full + 1) as usize];

    for_each_combination(pool.len(), n - 1, |indices| {
        let bound = indices.iter().map(|&i| hyperplane_dist[i]).fold(0.0, f64::max);
        if bound >= best_dist {
            return;
        }
        let k = indices.len() + 1;
        for (slot, &i) in indices.iter().enumerate() {
            masks[slot + 1] = pool[i].mask();
            rhs[slot + 1] = worths[pool[i].mask() as usize];
        }
        if !indicator_project_into(&masks[..k], &rhs[..k], x, &mut y) {
            return;
        }
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            pay[mask as usize] = pay[(mask & (mask - 1)) as usize] + y[low];
            if mask != full && worths[mask as usize] - pay[mask as usize] > face_tol {
                return;
            }
        }
        let d = distance(x, &y);
        if d < best_dist {
            best_dist = d;
            best = Some((y.clone(), d));
        }
    });
    best
}

/// All vertices of the core: in-core points cut out by `n - 1` independent
/// tight constraints, deduplicated.
pub fn oracle_core_vertices(game: &Game, face_tol: f64) -> Vec<Vec<f64>> {
    let n = game.player_count();
    let pool: Vec<Coalition> = proper_coalitions(n).collect();
    let origin = vec![game.grand_worth() / n as f64; n];
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for_each_combination(pool.len(), n - 1, |indices| {
        if indices.len() != n - 1 {
            return;
        }
        let tight: Vec<Coalition> = indices.iter().map(|&i| pool[i]).collect();
        let Some(y) = indicator_projection(game, &tight, &origin) else { return };
        if !in_core_slice(game, &y, face_tol) {
            return;
        }
        if vertices.iter().all(|v| distance(v, &y) > 1e-7) {
            vertices.push(y);
        }
    });
    vertices
}
