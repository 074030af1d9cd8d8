//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Every linear program in this crate is tiny (at most a few dozen rows at
//! desk scale), so the solver favors robustness and determinism over speed:
//! dense tableau, Bland's rule throughout, and no external dependencies.
//! Identical inputs produce bit-identical outputs.

use crate::{Error, Result};

/// Pivot tolerance of the simplex.
pub const TAU_LP: f64 = 1e-9;

/// A linear program in the form
/// `maximize c·x  subject to  A_eq x = b_eq, A_le x <= b_le, bounds`.
///
/// Bounds are optional per-variable lower/upper pairs; a variable with no
/// bounds is free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl LinearProgram {
    /// Program maximizing `objective` with no constraints and free variables.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, eq: Vec::new(), le: Vec::new(), bounds: vec![(None, None); n] }
    }

    pub fn with_eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq.push((row, rhs));
        self
    }

    pub fn with_le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.le.push((row, rhs));
        self
    }

    pub fn with_bounds(mut self, var: usize, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.bounds[var] = (lower, upper);
        self
    }

    /// Set a lower bound of zero on every variable.
    pub fn nonnegative(mut self) -> Self {
        for b in &mut self.bounds {
            b.0 = Some(0.0);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let check_row = |row: &[f64], rhs: f64| -> Result<()> {
            if row.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "constraint row has length {}, expected {n}",
                    row.len()
                )));
            }
            if !rhs.is_finite() || row.iter().any(|c| !c.is_finite()) {
                return Err(Error::MalformedProgram("non-finite coefficient".into()));
            }
            Ok(())
        };
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedProgram("non-finite objective coefficient".into()));
        }
        for (row, rhs) in self.eq.iter().chain(&self.le) {
            check_row(row, *rhs)?;
        }
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!(
                "bounds list has length {}, expected {n}",
                self.bounds.len()
            )));
        }
        for (lo, hi) in &self.bounds {
            if lo.is_some_and(|v| !v.is_finite()) || hi.is_some_and(|v| !v.is_finite()) {
                return Err(Error::MalformedProgram("non-finite bound".into()));
            }
        }
        Ok(())
    }
}

/// Result of [`solve_lp`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { solution: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpOutcome::Optimal { solution, value } => Some((solution, *value)),
            _ => None,
        }
    }

    /// Unwrap an optimum, converting the other outcomes into errors.
    pub fn require_optimal(self) -> Result<(Vec<f64>, f64)> {
        match self {
            LpOutcome::Optimal { solution, value } => Ok((solution, value)),
            LpOutcome::Infeasible => Err(Error::NoOptimum("infeasible")),
            LpOutcome::Unbounded => Err(Error::NoOptimum("unbounded")),
        }
    }
}

/// How an original variable is represented in standard form.
enum VarMap {
    /// `x = offset + x_std`
    Shifted { idx: usize, offset: f64 },
    /// `x = offset - x_std`
    Flipped { idx: usize, offset: f64 },
    /// `x = x_pos - x_neg`
    Split { pos: usize, neg: usize },
}

/// Solve a linear program with the two-phase dense simplex.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.objective.len();

    // Standard form: every variable nonnegative, every row an equality.
    // Rows are sparse (index, coefficient) lists tagged with needs-slack.
    type StdRow = (Vec<(usize, f64)>, f64, bool);
    let mut maps = Vec::with_capacity(n);
    let mut n_std = 0usize;
    let mut rows: Vec<StdRow> = Vec::new();

    for (lo, hi) in &lp.bounds {
        match (lo, hi) {
            (Some(l), Some(u)) => {
                if u < l {
                    return Ok(LpOutcome::Infeasible);
                }
                let idx = n_std;
                n_std += 1;
                maps.push(VarMap::Shifted { idx, offset: *l });
                rows.push((vec![(idx, 1.0)], u - l, false));
            }
            (Some(l), None) => {
                let idx = n_std;
                n_std += 1;
                maps.push(VarMap::Shifted { idx, offset: *l });
            }
            (None, Some(u)) => {
                let idx = n_std;
                n_std += 1;
                maps.push(VarMap::Flipped { idx, offset: *u });
            }
            (None, None) => {
                let pos = n_std;
                let neg = n_std + 1;
                n_std += 2;
                maps.push(VarMap::Split { pos, neg });
            }
        }
    }

    let translate_row = |row: &[f64], rhs: f64| -> (Vec<(usize, f64)>, f64) {
        let mut out = Vec::new();
        let mut b = rhs;
        for (j, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match &maps[j] {
                VarMap::Shifted { idx, offset } => {
                    out.push((*idx, c));
                    b -= c * offset;
                }
                VarMap::Flipped { idx, offset } => {
                    out.push((*idx, -c));
                    b -= c * offset;
                }
                VarMap::Split { pos, neg } => {
                    out.push((*pos, c));
                    out.push((*neg, -c));
                }
            }
        }
        (out, b)
    };

    for (row, rhs) in &lp.eq {
        let (r, b) = translate_row(row, *rhs);
        rows.push((r, b, true));
    }
    for (row, rhs) in &lp.le {
        let (r, b) = translate_row(row, *rhs);
        rows.push((r, b, false));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|(_, _, is_eq)| !is_eq).count();
    let art_start = n_std + n_slack;
    let width = art_start + m;

    // Tableau: m rows of [std | slack | artificial | rhs], rhs kept >= 0.
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_no = 0usize;
    for (i, (entries, rhs, is_eq)) in rows.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        for &(j, c) in entries {
            row[j] += c;
        }
        if !is_eq {
            row[n_std + slack_no] = 1.0;
            slack_no += 1;
        }
        row[width] = *rhs;
        if row[width] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        row[art_start + i] = 1.0;
        tab.push(row);
        basis.push(art_start + i);
    }

    // Phase 1: maximize minus the sum of artificials.
    let mut phase1_cost = vec![0.0; width];
    for c in phase1_cost.iter_mut().skip(art_start) {
        *c = -1.0;
    }
    let feasible = run_simplex(&mut tab, &mut basis, &phase1_cost, width, width);
    match feasible {
        SimplexEnd::Optimal { value } => {
            if value < -TAU_LP {
                return Ok(LpOutcome::Infeasible);
            }
        }
        // Phase 1 is bounded below by zero, so this cannot happen.
        SimplexEnd::Unbounded => unreachable!("phase 1 objective is bounded"),
    }

    // Drive remaining artificials out of the basis; rows that cannot pivot
    // are redundant and get dropped.
    let mut row_idx = 0;
    while row_idx < tab.len() {
        if basis[row_idx] >= art_start {
            let pivot_col = (0..art_start)
                .find(|&j| tab[row_idx][j].abs() > TAU_LP);
            match pivot_col {
                Some(col) => pivot(&mut tab, &mut basis, row_idx, col, width),
                None => {
                    tab.remove(row_idx);
                    basis.remove(row_idx);
                    continue;
                }
            }
        }
        row_idx += 1;
    }

    // Phase 2 over the original objective, artificial columns removed.
    for row in &mut tab {
        let rhs = row[width];
        row.truncate(art_start);
        row.push(rhs);
    }
    let mut cost = vec![0.0; art_start];
    for (j, &c) in lp.objective.iter().enumerate() {
        match &maps[j] {
            VarMap::Shifted { idx, .. } => cost[*idx] += c,
            VarMap::Flipped { idx, .. } => cost[*idx] -= c,
            VarMap::Split { pos, neg } => {
                cost[*pos] += c;
                cost[*neg] -= c;
            }
        }
    }
    match run_simplex(&mut tab, &mut basis, &cost, art_start, art_start) {
        SimplexEnd::Unbounded => return Ok(LpOutcome::Unbounded),
        SimplexEnd::Optimal { .. } => {}
    }

    // Read the standard solution off the basis and map it back.
    let mut std_solution = vec![0.0; art_start];
    for (i, &b) in basis.iter().enumerate() {
        if b < art_start {
            std_solution[b] = tab[i][art_start];
        }
    }
    let mut solution = vec![0.0; n];
    for (j, map) in maps.iter().enumerate() {
        solution[j] = match map {
            VarMap::Shifted { idx, offset } => offset + std_solution[*idx],
            VarMap::Flipped { idx, offset } => offset - std_solution[*idx],
            VarMap::Split { pos, neg } => std_solution[*pos] - std_solution[*neg],
        };
    }
    let value = lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { solution, value })
}

enum SimplexEnd {
    Optimal { value: f64 },
    Unbounded,
}

/// Bland-rule simplex over the current tableau. `enterable` limits the
/// columns allowed to enter the basis; `rhs_col` is the index of the
/// right-hand side.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    enterable: usize,
    rhs_col: usize,
) -> SimplexEnd {
    // Reduced-cost row z_j = c_B B^{-1} A_j - c_j and objective value.
    let mut z = vec![0.0; rhs_col + 1];
    for j in 0..=rhs_col {
        let mut sum = if j < cost.len() { -cost[j] } else { 0.0 };
        for (i, row) in tab.iter().enumerate() {
            let cb = if basis[i] < cost.len() { cost[basis[i]] } else { 0.0 };
            sum += cb * row[j];
        }
        z[j] = sum;
    }

    loop {
        // Bland: the lowest-index improving column enters.
        let entering = (0..enterable).find(|&j| z[j] < -TAU_LP);
        let Some(col) = entering else {
            return SimplexEnd::Optimal { value: z[rhs_col] };
        };

        // Ratio test; ties broken by the lowest basic-variable index.
        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[col] > TAU_LP {
                let ratio = row[rhs_col] / row[col];
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - TAU_LP || (ratio <= br + TAU_LP && basis[i] < basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        let Some((row_i, _)) = leaving else {
            return SimplexEnd::Unbounded;
        };

        pivot_with_z(tab, basis, &mut z, row_i, col, rhs_col);
    }
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row_i: usize, col: usize, rhs_col: usize) {
    let p = tab[row_i][col];
    for v in tab[row_i].iter_mut() {
        *v /= p;
    }
    for i in 0..tab.len() {
        if i == row_i {
            continue;
        }
        let factor = tab[i][col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..=rhs_col {
            tab[i][j] -= factor * tab[row_i][j];
        }
        // Clamp tiny residue on the pivot column itself.
        tab[i][col] = 0.0;
    }
    basis[row_i] = col;
}

fn pivot_with_z(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    z: &mut [f64],
    row_i: usize,
    col: usize,
    rhs_col: usize,
) {
    pivot(tab, basis, row_i, col, rhs_col);
    let factor = z[col];
    if factor != 0.0 {
        for j in 0..=rhs_col {
            z[j] -= factor * tab[row_i][j];
        }
        z[col] = 0.0;
    }
}
