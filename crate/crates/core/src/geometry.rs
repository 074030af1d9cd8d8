//! Hyperplane normals of coalition constraints and the linear algebra built
//! on them: Gram matrices, independence tests, balancedness certificates,
//! dual bases, and the incrementally maintained Gramian.
//!
//! The normal of the constraint `x(S) = v(S)` inside the preimputation
//! space is `1^S - (|S|/n) 1^N`. Its inner products are rational with
//! denominator `n` and are computed combinatorially, never by forming the
//! vectors.

use crate::coalition::{Coalition, CoalitionCollection};
use crate::dense;
use crate::game::SidePayment;
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::{Error, Result, TAU_POS, TAU_RANK};
use std::collections::BTreeMap;

/// The normal vector of a coalition constraint: a side payment pointing in
/// the direction that increases the coalition's payment fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalVector {
    coalition: Coalition,
    coords: Vec<f64>,
}

impl NormalVector {
    pub fn coalition(&self) -> Coalition {
        self.coalition
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Zero for the empty and grand coalitions.
    pub fn is_zero(&self) -> bool {
        self.coalition.is_empty() || self.coalition.is_grand()
    }

    pub fn into_side_payment(self) -> SidePayment {
        SidePayment::new_unchecked(self.coords)
    }
}

/// The constraint normal of `s`: coordinate `1 - |S|/n` for members,
/// `-|S|/n` otherwise. Zero for the empty and grand coalitions.
pub fn normal_vector(s: Coalition) -> NormalVector {
    let n = s.player_count();
    let share = s.size() as f64 / n as f64;
    let coords = (0..n)
        .map(|i| if s.contains(i) { 1.0 - share } else { -share })
        .collect();
    NormalVector { coalition: s, coords }
}

/// Inner product of two constraint normals, computed combinatorially:
/// `|S ∩ T| - |S||T|/n`.
pub fn eta_inner(s: Coalition, t: Coalition) -> f64 {
    debug_assert_eq!(s.player_count(), t.player_count());
    let n = s.player_count() as f64;
    let joint = s.intersection(t).size() as f64;
    (joint * n - s.size() as f64 * t.size() as f64) / n
}

/// Squared norm of a constraint normal: `|S|(n - |S|)/n`.
pub fn eta_norm_sq(s: Coalition) -> f64 {
    eta_inner(s, s)
}

/// Gram matrix of the constraint normals of a collection, rows and columns
/// in ascending mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    coalitions: Vec<Coalition>,
    entries: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn order(&self) -> usize {
        self.coalitions.len()
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn determinant(&self) -> f64 {
        dense::determinant(&self.entries)
    }

    pub(crate) fn cholesky(&self) -> Option<Vec<Vec<f64>>> {
        dense::cholesky(&self.entries, TAU_RANK * TAU_RANK)
    }
}

fn check_proper_members(q: &CoalitionCollection) -> Result<()> {
    if q.is_empty() {
        return Err(Error::EmptyCollection);
    }
    for s in q {
        if s.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        if s.is_grand() {
            return Err(Error::GrandCoalition(s.to_string()));
        }
    }
    Ok(())
}

/// Gram matrix of a nonempty collection of proper coalitions.
pub fn gram_matrix(q: &CoalitionCollection) -> Result<GramMatrix> {
    check_proper_members(q)?;
    let coalitions = q.to_vec();
    let k = coalitions.len();
    let mut entries = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let g = eta_inner(coalitions[i], coalitions[j]);
            entries[i][j] = g;
            entries[j][i] = g;
        }
    }
    Ok(GramMatrix { coalitions, entries })
}

/// Whether the constraint normals of `q` are linearly independent.
///
/// Collections larger than `n - 1` are rejected immediately: the side-payment
/// space has dimension `n - 1`, so they cannot be independent.
pub fn is_independent(q: &CoalitionCollection) -> Result<bool> {
    check_proper_members(q)?;
    let n = q.iter().next().unwrap().player_count();
    if q.len() > n - 1 {
        return Ok(false);
    }
    Ok(gram_matrix(q)?.determinant() > TAU_RANK)
}

/// Positive balancing weights for `q` if any exist.
///
/// Solved as a linear program maximizing the minimum weight subject to the
/// balance equalities; the collection is balanced exactly when the optimum
/// is strictly positive. The grand coalition is a legitimate member here.
pub fn is_balanced_collection(q: &CoalitionCollection) -> Option<BTreeMap<Coalition, f64>> {
    if q.is_empty() {
        return None;
    }
    let members = q.to_vec();
    let n = members[0].player_count();
    let k = members.len();
    // Variables: one weight per coalition, then the minimum weight t.
    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for i in 0..n {
        let mut row = vec![0.0; k + 1];
        for (j, s) in members.iter().enumerate() {
            if s.contains(i) {
                row[j] = 1.0;
            }
        }
        lp = lp.with_eq(row, 1.0);
    }
    for j in 0..k {
        let mut row = vec![0.0; k + 1];
        row[j] = -1.0;
        row[k] = 1.0;
        lp = lp.with_le(row, 0.0);
        lp = lp.with_bounds(j, Some(0.0), None);
    }
    let outcome = solve_lp(&lp).expect("balancedness LP is well-formed");
    match outcome {
        LpOutcome::Optimal { solution, value } if value > TAU_POS => {
            Some(members.into_iter().zip(solution).collect())
        }
        _ => None,
    }
}

/// A side payment strictly benefiting every coalition of `q`, if one exists.
///
/// Such a witness exists exactly when `q` contains no balanced
/// subcollection. The witness cone is normalized by the box `|σ_i| <= 1`.
pub fn unbalanced_witness(q: &CoalitionCollection) -> Option<SidePayment> {
    if q.is_empty() {
        return None;
    }
    let members = q.to_vec();
    let n = members[0].player_count();
    // Variables: the side payment coordinates, then the slack level t.
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    lp = lp.with_eq({
        let mut row = vec![1.0; n];
        row.push(0.0);
        row
    }, 0.0);
    for s in &members {
        let mut row = vec![0.0; n + 1];
        for i in s.players() {
            row[i] = -1.0;
        }
        row[n] = 1.0;
        lp = lp.with_le(row, 0.0);
    }
    for i in 0..n {
        lp = lp.with_bounds(i, Some(-1.0), Some(1.0));
    }
    let outcome = solve_lp(&lp).expect("witness LP is well-formed");
    match outcome {
        LpOutcome::Optimal { mut solution, value } if value > TAU_POS => {
            solution.truncate(n);
            Some(SidePayment::new_unchecked(solution))
        }
        _ => None,
    }
}

/// The dual basis of a collection's constraint normals: side payments
/// biorthogonal to them.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBasis {
    coalitions: Vec<Coalition>,
    vectors: Vec<SidePayment>,
}

impl DualBasis {
    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn vectors(&self) -> &[SidePayment] {
        &self.vectors
    }

    pub fn vector_for(&self, s: Coalition) -> Option<&SidePayment> {
        self.coalitions.iter().position(|&c| c == s).map(|i| &self.vectors[i])
    }
}

/// Dual basis of an independent collection, obtained by solving the Gram
/// system against identity columns (no explicit inverse is formed).
pub fn dual_basis(q: &CoalitionCollection) -> Result<DualBasis> {
    let gram = gram_matrix(q)?;
    let k = gram.order();
    let n = gram.coalitions()[0].player_count();
    let Some(l) = gram.cholesky() else {
        return Err(dependent_error(q));
    };
    let normals: Vec<NormalVector> =
        gram.coalitions().iter().map(|&s| normal_vector(s)).collect();
    let mut vectors = Vec::with_capacity(k);
    for j in 0..k {
        let mut unit = vec![0.0; k];
        unit[j] = 1.0;
        let coeffs = dense::cholesky_solve(&l, &unit);
        let mut h = vec![0.0; n];
        for (c, eta) in coeffs.iter().zip(&normals) {
            for (hi, ei) in h.iter_mut().zip(eta.coords()) {
                *hi += c * ei;
            }
        }
        vectors.push(SidePayment::new_unchecked(h));
    }
    Ok(DualBasis { coalitions: gram.coalitions.clone(), vectors })
}

/// Build the dependent-collection error, identifying a dependent prefix of
/// the collection when one is cheap to find.
pub(crate) fn dependent_error(q: &CoalitionCollection) -> Error {
    let members = q.to_vec();
    if members.is_empty() {
        return Error::DependentCollection { subset: Vec::new() };
    }
    let n = members[0].player_count();
    let mut state = GramState::new(n);
    for (idx, &s) in members.iter().enumerate() {
        match state.update(s) {
            Ok(GramExtension::Extended(next)) => state = next,
            Ok(GramExtension::Dependent) => {
                let subset = members[..=idx].iter().map(|c| c.to_string()).collect();
                return Error::DependentCollection { subset };
            }
            Err(_) => break,
        }
    }
    Error::DependentCollection { subset: Vec::new() }
}

/// Incrementally maintained orthonormal basis and Gramian of an independent
/// collection. Values are immutable; [`GramState::update`] returns a new
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct GramState {
    n: usize,
    collection: Vec<Coalition>,
    basis: Vec<Vec<f64>>,
    gramian: f64,
}

/// Outcome of extending a [`GramState`] by one coalition.
#[derive(Debug, Clone, PartialEq)]
pub enum GramExtension {
    /// The coalition's normal was independent of the current span.
    Extended(GramState),
    /// The normal lies in the current span; the state is unchanged.
    Dependent,
}

impl GramState {
    /// Empty collection: Gramian 1, empty basis.
    pub fn new(n: usize) -> Self {
        GramState { n, collection: Vec::new(), basis: Vec::new(), gramian: 1.0 }
    }

    pub fn collection(&self) -> &[Coalition] {
        &self.collection
    }

    /// Orthonormal basis vectors of the span, in insertion order.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Determinant of the Gram matrix of the current collection.
    pub fn gramian(&self) -> f64 {
        self.gramian
    }

    pub fn len(&self) -> usize {
        self.collection.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collection.is_empty()
    }

    /// One Gram-Schmidt step: orthogonalize the normal of `s` against the
    /// basis. If the residual survives, the collection, basis, and Gramian
    /// grow; otherwise `s` is reported dependent and nothing changes.
    pub fn update(&self, s: Coalition) -> Result<GramExtension> {
        if s.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        if s.is_grand() {
            return Err(Error::GrandCoalition(s.to_string()));
        }
        if self.collection.contains(&s) {
            return Err(Error::DuplicateCoalition(s.to_string()));
        }
        let mut w = normal_vector(s).coords().to_vec();
        for v in &self.basis {
            // For unit side payments v, the projection coefficient of the
            // normal onto v is just v's payment of s.
            let coeff: f64 = s.players().map(|i| v[i]).sum();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= coeff * vi;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= TAU_RANK {
            return Ok(GramExtension::Dependent);
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        let payment: f64 = s.players().map(|i| w[i]).sum();
        let mut next = self.clone();
        next.collection.push(s);
        next.gramian *= payment * payment;
        next.basis.push(w);
        Ok(GramExtension::Extended(next))
    }

    /// Fold a whole collection (ascending mask order) into a state.
    /// Errors with the dependent prefix if the collection is dependent.
    pub fn from_collection(q: &CoalitionCollection) -> Result<GramState> {
        check_proper_members(q)?;
        let n = q.iter().next().unwrap().player_count();
        let mut state = GramState::new(n);
        for &s in q {
            match state.update(s)? {
                GramExtension::Extended(next) => state = next,
                GramExtension::Dependent => return Err(dependent_error(q)),
            }
        }
        Ok(state)
    }
}
