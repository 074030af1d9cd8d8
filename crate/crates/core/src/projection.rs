//! Projectors onto intersections of coalition constraint hyperplanes.
//!
//! For an independent collection the projection of a preimputation onto the
//! affine subspace where every member is paid exactly its worth has the
//! closed form `x + Σ γ_S η_S`, with the coefficients solving the Gram
//! system `G γ = e(x)`. The module implements that solve (Cholesky), the
//! Cramer determinant-ratio variant, the dual-basis form `x + Σ e_S(x) h_S`,
//! and an orthonormal-basis form; all four must agree to high precision and
//! the test suites hold them to it.

use crate::coalition::{Coalition, CoalitionCollection};
use crate::dense;
use crate::game::{Game, Preimputation, SidePayment};
use crate::geometry::{
    dependent_error, dual_basis, eta_inner, eta_norm_sq, gram_matrix, is_independent,
    normal_vector, GramState,
};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A projection onto a constraint intersection: the projected point, the
/// coefficients on the constraint normals, the side payment applied, its
/// norm, and the collection that was projected onto.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: Preimputation,
    pub gamma: BTreeMap<Coalition, f64>,
    pub side_payment: SidePayment,
    pub distance: f64,
    pub collection: CoalitionCollection,
}

impl ProjectionResult {
    /// The identity projection at `x` (empty collection).
    fn identity(x: &Preimputation) -> Self {
        ProjectionResult {
            point: x.clone(),
            gamma: BTreeMap::new(),
            side_payment: SidePayment::zero(x.len()),
            distance: 0.0,
            collection: CoalitionCollection::new(),
        }
    }

    /// Assemble a result from per-coalition coefficients: the side payment
    /// is the coefficient combination of the constraint normals.
    fn from_gamma(x: &Preimputation, coalitions: &[Coalition], gamma: Vec<f64>) -> Self {
        let n = x.len();
        let mut delta = vec![0.0; n];
        for (&s, &g) in coalitions.iter().zip(&gamma) {
            for (di, ei) in delta.iter_mut().zip(normal_vector(s).coords()) {
                *di += g * ei;
            }
        }
        let side_payment = SidePayment::new_unchecked(delta);
        let point = x.translate(&side_payment);
        let distance = side_payment.norm();
        ProjectionResult {
            point,
            gamma: coalitions.iter().copied().zip(gamma).collect(),
            side_payment,
            distance,
            collection: coalitions.iter().copied().collect(),
        }
    }
}

fn require_proper(s: Coalition) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    if s.is_grand() {
        return Err(Error::GrandCoalition(s.to_string()));
    }
    Ok(())
}

/// Excesses of the collection members at `x`, in ascending mask order.
fn excess_vector(game: &Game, coalitions: &[Coalition], x: &Preimputation) -> Vec<f64> {
    coalitions.iter().map(|&s| game.worth(s) - x.payment(s)).collect()
}

/// Ensure `q` is independent, reporting a dependent subset otherwise.
fn require_independent(q: &CoalitionCollection) -> Result<()> {
    if !is_independent(q)? {
        return Err(dependent_error(q));
    }
    Ok(())
}

/// Projection onto the single hyperplane of a proper coalition:
/// `x + (e_S(x)/‖η_S‖²) η_S`. When the excess is positive the projection
/// dominates `x` via `s`.
pub fn project_single(game: &Game, s: Coalition, x: &Preimputation) -> Result<ProjectionResult> {
    require_proper(s)?;
    let gamma = game.excess(s, x)? / eta_norm_sq(s);
    Ok(ProjectionResult::from_gamma(x, &[s], vec![gamma]))
}

/// Sign test for where the single-hyperplane projection lands relative to
/// another constraint: nonnegative exactly when the projection onto the
/// hyperplane of `s` pays `t` at least its worth.
pub fn chi_single(game: &Game, s: Coalition, t: Coalition, x: &Preimputation) -> Result<f64> {
    require_proper(s)?;
    let e_s = game.excess(s, x)?;
    let e_t = game.excess(t, x)?;
    Ok(e_s * eta_inner(s, t) - e_t * eta_norm_sq(s))
}

/// Projection onto the intersection of an independent collection's
/// hyperplanes, coefficients solved by Cholesky on the Gram system.
/// An empty collection projects onto the whole preimputation space, i.e.
/// returns `x` itself.
pub fn project_collection(
    game: &Game,
    q: &CoalitionCollection,
    x: &Preimputation,
) -> Result<ProjectionResult> {
    if q.is_empty() {
        return Ok(ProjectionResult::identity(x));
    }
    require_independent(q)?;
    let gram = gram_matrix(q)?;
    let l = gram.cholesky().ok_or_else(|| dependent_error(q))?;
    let e = excess_vector(game, gram.coalitions(), x);
    let gamma = dense::cholesky_solve(&l, &e);
    Ok(ProjectionResult::from_gamma(x, gram.coalitions(), gamma))
}

/// Projection coefficients by Cramer's rule: each one is the ratio of the
/// Gram determinant with the matching column replaced by the excess vector
/// to the Gramian itself. Kept as an independent cross-check of the
/// Cholesky solve.
pub fn gamma_cramer(
    game: &Game,
    q: &CoalitionCollection,
    x: &Preimputation,
) -> Result<BTreeMap<Coalition, f64>> {
    require_independent(q)?;
    let gram = gram_matrix(q)?;
    let det = gram.determinant();
    let e = excess_vector(game, gram.coalitions(), x);
    let k = gram.order();
    let mut gamma = BTreeMap::new();
    for (j, &s) in gram.coalitions().iter().enumerate() {
        let mut replaced: Vec<Vec<f64>> = gram.entries().to_vec();
        for i in 0..k {
            replaced[i][j] = e[i];
        }
        gamma.insert(s, dense::determinant(&replaced) / det);
    }
    Ok(gamma)
}

/// Projection via the dual basis: `x + Σ e_S(x) h_S`. The coefficients on
/// the normals are recovered through biorthogonality, pairing the side
/// payment with each dual vector.
pub fn project_collection_dual(
    game: &Game,
    q: &CoalitionCollection,
    x: &Preimputation,
) -> Result<ProjectionResult> {
    if q.is_empty() {
        return Ok(ProjectionResult::identity(x));
    }
    require_independent(q)?;
    let basis = dual_basis(q)?;
    let n = x.len();
    let mut delta = vec![0.0; n];
    for (&s, h) in basis.coalitions().iter().zip(basis.vectors()) {
        let e = game.worth(s) - x.payment(s);
        for (di, hi) in delta.iter_mut().zip(h.coords()) {
            *di += e * hi;
        }
    }
    let gamma: Vec<f64> = basis
        .vectors()
        .iter()
        .map(|h| h.coords().iter().zip(&delta).map(|(a, b)| a * b).sum())
        .collect();
    let side_payment = SidePayment::new_unchecked(delta);
    let point = x.translate(&side_payment);
    let distance = side_payment.norm();
    Ok(ProjectionResult {
        point,
        gamma: basis.coalitions().iter().copied().zip(gamma).collect(),
        side_payment,
        distance,
        collection: basis.coalitions().iter().copied().collect(),
    })
}

/// Projection via an orthonormal basis of the normals' span: anchor at a
/// point of the target subspace (the dual projection of the barycenter),
/// then subtract the span component of `x` minus the anchor. Coefficients
/// come from back-substitution against the triangular factor implied by the
/// basis.
pub fn project_collection_qr(
    game: &Game,
    q: &CoalitionCollection,
    x: &Preimputation,
) -> Result<ProjectionResult> {
    if q.is_empty() {
        return Ok(ProjectionResult::identity(x));
    }
    require_independent(q)?;
    let state = GramState::from_collection(q)?;
    let coalitions = state.collection().to_vec();
    let n = x.len();

    // Any point of the target subspace anchors the affine projection; the
    // barycenter's projection is a convenient deterministic choice.
    let barycenter = Preimputation::new_unchecked(vec![game.grand_worth() / n as f64; n]);
    let anchor = project_collection_dual(game, q, &barycenter)?.point;

    let diff: Vec<f64> = x.coords().iter().zip(anchor.coords()).map(|(a, b)| a - b).collect();
    // Coefficients of (x - anchor) in the orthonormal basis.
    let coeffs: Vec<f64> = state
        .basis()
        .iter()
        .map(|v| v.iter().zip(&diff).map(|(a, b)| a * b).sum())
        .collect();
    let mut delta = vec![0.0; n];
    for (c, v) in coeffs.iter().zip(state.basis()) {
        for (di, vi) in delta.iter_mut().zip(v) {
            *di -= c * vi;
        }
    }

    // Back-substitute R gamma = -coeffs, where R[i][j] = v_i's payment of
    // the j-th coalition (upper triangular by construction).
    let k = coalitions.len();
    let mut gamma = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = -coeffs[i];
        for j in i + 1..k {
            let r_ij: f64 = coalitions[j].players().map(|p| state.basis()[i][p]).sum();
            sum -= r_ij * gamma[j];
        }
        let r_ii: f64 = coalitions[i].players().map(|p| state.basis()[i][p]).sum();
        gamma[i] = sum / r_ii;
    }

    let side_payment = SidePayment::new_unchecked(delta);
    let point = x.translate(&side_payment);
    let distance = side_payment.norm();
    Ok(ProjectionResult {
        point,
        gamma: coalitions.iter().copied().zip(gamma).collect(),
        side_payment,
        distance,
        collection: coalitions.into_iter().collect(),
    })
}

/// Excess of `t` at the projection onto the collection's intersection,
/// evaluated without forming the projected point:
/// `e_T(x) - Σ γ_S ⟨η_S, η_T⟩`. Nonpositive exactly when the projection
/// satisfies `t`.
pub fn excess_after_projection(
    game: &Game,
    q: &CoalitionCollection,
    t: Coalition,
    x: &Preimputation,
) -> Result<f64> {
    if t.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    require_independent(q)?;
    let gram = gram_matrix(q)?;
    let l = gram.cholesky().ok_or_else(|| dependent_error(q))?;
    let e = excess_vector(game, gram.coalitions(), x);
    let gamma = dense::cholesky_solve(&l, &e);
    let mut excess = game.excess(t, x)?;
    for (&s, g) in gram.coalitions().iter().zip(&gamma) {
        excess -= g * eta_inner(s, t);
    }
    Ok(excess)
}
