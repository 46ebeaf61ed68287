//! Exact small-scale solvers for the criticality machinery.
//!
//! [`min_norm_point`] computes the criticality measure: the minimum of
//! `||sum_i alpha_i g_i||` over the standard simplex. A point is Pareto
//! critical exactly when this minimum is zero. The solver enumerates all
//! nonempty support sets, solves the equality-constrained least squares on
//! each, and keeps nonnegative candidates — exact for the `k <= 12` regime,
//! with no iteration tolerances. (Wolfe's algorithm is the drop-in
//! replacement when `k` grows beyond enumeration range.)
//!
//! [`lp_solve`] is a dense two-phase simplex with Bland's anti-cycling rule,
//! used to classify KKT multiplier sets (interior vs zero-component).

use crate::linalg::{self, Matrix};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("min-norm point needs at least one vector")]
    Empty,
    #[error("min-norm enumeration supports at most 12 vectors, got {0}")]
    TooManyVectors(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
}

/// Minimum-norm point in the convex hull of the input vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormResult {
    /// `min ||sum_i alpha_i g_i||` over the simplex.
    pub omega: f64,
    /// A minimizer, in the standard simplex of dimension `k`.
    pub alpha: Vec<f64>,
    /// Indices (0-based) of the strictly positive components of `alpha`.
    pub support: Vec<usize>,
}

const LS_RTOL: f64 = 1e-10;

/// Exact global minimizer of `||sum alpha_i g_i||` over the standard simplex.
///
/// Support sets are enumerated by size, then lexicographically; on each set
/// the affine minimizer comes from a minimum-norm least-squares solve
/// (rank-deficient sets included), and candidates with negative weights are
/// discarded — their optimum lives on a smaller support that is enumerated
/// separately. Ties go to the earlier (smaller, lexicographically first)
/// support.
pub fn min_norm_point(gradients: &[Vec<f64>]) -> Result<MinNormResult, SolverError> {
    let k = gradients.len();
    if k == 0 {
        return Err(SolverError::Empty);
    }
    if k > 12 {
        return Err(SolverError::TooManyVectors(k));
    }
    let n = gradients[0].len();
    if gradients.iter().any(|g| g.len() != n) {
        return Err(SolverError::DimensionMismatch(
            "gradient vectors have mixed lengths".into(),
        ));
    }

    let mut best: Option<MinNormResult> = None;
    let mut subset = Vec::with_capacity(k);
    for size in 1..=k {
        subset.clear();
        subset.extend(0..size);
        loop {
            if let Some(cand) = candidate_for_support(gradients, &subset) {
                let better = match &best {
                    None => true,
                    Some(b) => cand.omega < b.omega - 1e-12 * b.omega.max(1.0),
                };
                if better {
                    best = Some(cand);
                }
            }
            if !next_combination(&mut subset, k) {
                break;
            }
        }
    }
    Ok(best.expect("at least one singleton support always yields a candidate"))
}

/// Affine minimizer restricted to `support`; `None` when a weight is negative.
fn candidate_for_support(gradients: &[Vec<f64>], support: &[usize]) -> Option<MinNormResult> {
    let k = gradients.len();
    let s = support.len();
    let mut alpha = vec![0.0; k];
    if s == 1 {
        alpha[support[0]] = 1.0;
    } else {
        // alpha_last = 1 - sum of the rest turns the constraint into an
        // unconstrained least squares over the gradient differences.
        let last = support[s - 1];
        let cols: Vec<Vec<f64>> = support[..s - 1]
            .iter()
            .map(|&i| {
                gradients[i]
                    .iter()
                    .zip(&gradients[last])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let v = Matrix::from_cols(&cols);
        let rhs: Vec<f64> = gradients[last].iter().map(|g| -g).collect();
        let beta = linalg::lstsq_min_norm(&v, &rhs, LS_RTOL);
        let mut sum = 0.0;
        for (j, &i) in support[..s - 1].iter().enumerate() {
            alpha[i] = beta[j];
            sum += beta[j];
        }
        alpha[last] = 1.0 - sum;
        if alpha.iter().any(|&a| a < -1e-9) {
            return None;
        }
        // Clamp roundoff-negative weights and renormalize onto the simplex.
        for a in alpha.iter_mut() {
            if *a < 0.0 {
                *a = 0.0;
            }
        }
        let total: f64 = alpha.iter().sum();
        for a in alpha.iter_mut() {
            *a /= total;
        }
    }
    let n = gradients[0].len();
    let mut combo = vec![0.0; n];
    for (a, g) in alpha.iter().zip(gradients) {
        if *a != 0.0 {
            for (c, gi) in combo.iter_mut().zip(g) {
                *c += a * gi;
            }
        }
    }
    let omega = linalg::norm2(&combo);
    let support = alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(i, _)| i)
        .collect();
    Some(MinNormResult { omega, alpha, support })
}

/// Advance `subset` to the next lexicographic size-|subset| combination of
/// `{0..k}`; returns false after the last one.
fn next_combination(subset: &mut [usize], k: usize) -> bool {
    let s = subset.len();
    let mut i = s;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if subset[i] < k - (s - i) {
            subset[i] += 1;
            for j in i + 1..s {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
}

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// `c . x` at the optimum (meaningful only when `status == Optimal`).
    pub objective: f64,
    pub solution: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

/// Maximize `c . x` subject to `a_eq x = b_eq` and `a_ineq x <= b_ineq`,
/// variables free.
///
/// Two-phase dense simplex with Bland's rule (deterministic, cycle-free).
/// Free variables are split internally; constraint activity at the optimum is
/// satisfied within `1e-9` scaled by the right-hand side.
pub fn lp_solve(
    c: &[f64],
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
    a_ineq: &[Vec<f64>],
    b_ineq: &[f64],
) -> Result<LpResult, SolverError> {
    let nv = c.len();
    if a_eq.len() != b_eq.len() || a_ineq.len() != b_ineq.len() {
        return Err(SolverError::DimensionMismatch(
            "constraint matrix and rhs row counts differ".into(),
        ));
    }
    for row in a_eq.iter().chain(a_ineq.iter()) {
        if row.len() != nv {
            return Err(SolverError::DimensionMismatch(format!(
                "constraint row has {} entries, expected {}",
                row.len(),
                nv
            )));
        }
    }

    let me = a_eq.len();
    let mi = a_ineq.len();
    let m = me + mi;
    // Columns: x+ (nv), x- (nv), slacks (mi).
    let ncols = 2 * nv + mi;

    if m == 0 {
        // No constraints: optimal iff the objective is identically zero.
        let status = if c.iter().all(|&ci| ci == 0.0) {
            LpStatus::Optimal
        } else {
            LpStatus::Unbounded
        };
        return Ok(LpResult { status, objective: 0.0, solution: vec![0.0; nv] });
    }

    let mut rows = vec![vec![0.0; ncols]; m];
    let mut rhs = vec![0.0; m];
    for (i, (row, b)) in a_eq.iter().zip(b_eq).enumerate() {
        for j in 0..nv {
            rows[i][j] = row[j];
            rows[i][nv + j] = -row[j];
        }
        rhs[i] = *b;
    }
    for (i, (row, b)) in a_ineq.iter().zip(b_ineq).enumerate() {
        for j in 0..nv {
            rows[me + i][j] = row[j];
            rows[me + i][nv + j] = -row[j];
        }
        rows[me + i][2 * nv + i] = 1.0;
        rhs[me + i] = *b;
    }
    // Phase 1 wants nonnegative right-hand sides.
    for i in 0..m {
        if rhs[i] < 0.0 {
            for v in rows[i].iter_mut() {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
        }
    }

    let mut tab = Tableau::new(rows, rhs, ncols);
    let feas_tol = 1e-9 * tab.rhs.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    if !tab.phase_one(feas_tol)? {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            objective: 0.0,
            solution: vec![0.0; nv],
        });
    }
    // Phase 2 minimizes -(c . x) over the split variables.
    let mut cost = vec![0.0; tab.ncols];
    for j in 0..nv {
        cost[j] = -c[j];
        cost[nv + j] = c[j];
    }
    let bounded = tab.phase_two(&cost)?;
    if !bounded {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            objective: 0.0,
            solution: vec![0.0; nv],
        });
    }
    let y = tab.primal_values();
    let solution: Vec<f64> = (0..nv).map(|j| y[j] - y[nv + j]).collect();
    let objective = linalg::dot(c, &solution);
    Ok(LpResult { status: LpStatus::Optimal, objective, solution })
}

struct Tableau {
    /// `m x (ncols + artificials)` coefficient rows.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Structural columns (excludes artificials).
    ncols: usize,
}

impl Tableau {
    fn new(mut rows: Vec<Vec<f64>>, rhs: Vec<f64>, ncols: usize) -> Self {
        let m = rows.len();
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend((0..m).map(|a| if a == i { 1.0 } else { 0.0 }));
        }
        let basis = (0..m).map(|i| ncols + i).collect();
        Tableau { rows, rhs, basis, ncols }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..self.rows[i].len() {
                let delta = f * self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            self.rows[i][col] = 0.0;
            self.rhs[i] -= f * self.rhs[row];
        }
        self.basis[row] = col;
    }

    /// Bland's rule simplex on the given cost vector (minimization over the
    /// current columns). Returns false on unboundedness.
    fn run_simplex(&mut self, cost: &[f64], active_cols: usize) -> Result<bool, SolverError> {
        for _ in 0..MAX_PIVOTS {
            // Reduced costs: c_j - c_B B^{-1} A_j, computed from the tableau.
            let mut entering = None;
            for j in 0..active_cols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost.get(j).copied().unwrap_or(0.0);
                for (i, &bi) in self.basis.iter().enumerate() {
                    let cb = cost.get(bi).copied().unwrap_or(0.0);
                    if cb != 0.0 {
                        red -= cb * self.rows[i][j];
                    }
                }
                if red < -PIVOT_TOL {
                    entering = Some(j);
                    break; // Bland: smallest improving index.
                }
            }
            let Some(col) = entering else { return Ok(true) };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = ratio < best_ratio - 1e-12
                        || (ratio < best_ratio + 1e-12
                            && leave.is_some_and(|l| self.basis[i] < self.basis[l]));
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(row) = leave else { return Ok(false) };
            self.pivot(row, col);
        }
        Err(SolverError::IterationLimit)
    }

    /// Minimize the artificial sum; true when a feasible basis was reached.
    fn phase_one(&mut self, feas_tol: f64) -> Result<bool, SolverError> {
        let m = self.rows.len();
        let total_cols = self.ncols + m;
        let mut cost = vec![0.0; total_cols];
        for j in self.ncols..total_cols {
            cost[j] = 1.0;
        }
        let bounded = self.run_simplex(&cost, total_cols)?;
        debug_assert!(bounded, "phase 1 objective is bounded below by zero");
        let obj: f64 = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= self.ncols)
            .map(|(i, _)| self.rhs[i])
            .sum();
        if obj > feas_tol {
            return Ok(false);
        }
        // Drive remaining artificials out of the basis; rows that offer no
        // structural pivot are redundant and dropped.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.ncols {
                let col = (0..self.ncols).find(|&j| self.rows[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        Ok(true)
    }

    fn phase_two(&mut self, cost: &[f64]) -> Result<bool, SolverError> {
        self.run_simplex(cost, self.ncols)
    }

    fn primal_values(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.ncols {
                y[b] = self.rhs[i];
            }
        }
        y
    }
}

// ---------------------------------------------------------------------------
// Verification oracle
// ---------------------------------------------------------------------------

/// Brute-force oracle for [`min_norm_point`], independent of the support
/// enumeration above. Used by tests and the CLI self-test; not a production
/// code path.
pub mod oracle {
    /// Minimum of `||sum alpha_i g_i||` over a refining grid on the simplex.
    ///
    /// `omega^2 = alpha' G alpha` is convex (Gram matrices are PSD), so
    /// shrinking the search box around the best grid point loses nothing:
    /// the returned value matches a dense simplex enumeration at the final
    /// resolution. Refinement stops once the local step is at most
    /// `final_step`.
    pub fn min_norm_over_simplex_grid(gradients: &[Vec<f64>], final_step: f64) -> f64 {
        let k = gradients.len();
        let n = gradients[0].len();
        if k == 1 {
            return gradients[0].iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        // Gram matrix of the gradients; omega^2(alpha) = alpha' G alpha.
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                gram[i][j] = (0..n).map(|t| gradients[i][t] * gradients[j][t]).sum();
            }
        }
        let omega2 = |alpha: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..k {
                if alpha[i] == 0.0 {
                    continue;
                }
                for j in 0..k {
                    acc += alpha[i] * gram[i][j] * alpha[j];
                }
            }
            acc
        };

        let d = k - 1;
        let mut lo = vec![0.0; d];
        let mut hi = vec![1.0; d];
        let mut h = 0.02_f64;
        let mut best_val = f64::INFINITY;
        let mut best_beta = vec![0.0; d];
        loop {
            let counts: Vec<usize> = (0..d)
                .map(|i| ((hi[i] - lo[i]) / h).round() as usize + 1)
                .collect();
            let mut idx = vec![0usize; d];
            let mut alpha = vec![0.0; k];
            'grid: loop {
                let mut sum = 0.0;
                for i in 0..d {
                    alpha[i] = lo[i] + idx[i] as f64 * h;
                    sum += alpha[i];
                }
                if sum <= 1.0 + 1e-12 {
                    alpha[d] = (1.0 - sum).max(0.0);
                    let v = omega2(&alpha);
                    if v < best_val {
                        best_val = v;
                        best_beta = alpha[..d].to_vec();
                    }
                }
                let mut i = 0;
                loop {
                    if i == d {
                        break 'grid;
                    }
                    idx[i] += 1;
                    if idx[i] < counts[i] {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
            }
            if h <= final_step {
                break;
            }
            let next_h = (h / 5.0).max(final_step / 1.0000001);
            for i in 0..d {
                lo[i] = (best_beta[i] - 3.0 * h).max(0.0);
                hi[i] = (best_beta[i] + 3.0 * h).min(1.0);
            }
            h = next_h;
        }
        best_val.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn triangle_center_is_critical() {
        // Gradients of the three paraboloids at (0,0).
        let g = vec![vec![-2.0, 2.0], vec![0.0, -2.0], vec![2.0, 2.0]];
        let r = min_norm_point(&g).unwrap();
        assert!(r.omega <= 1e-12);
        assert_close(r.alpha[0], 0.25, 1e-10);
        assert_close(r.alpha[1], 0.5, 1e-10);
        assert_close(r.alpha[2], 0.25, 1e-10);
        assert_eq!(r.support, vec![0, 1, 2]);
    }

    #[test]
    fn bottom_edge_drops_second_objective() {
        // At (0,-1) the second coordinate forces alpha_2 = 0.
        let g = vec![vec![-2.0, 0.0], vec![0.0, -4.0], vec![2.0, 0.0]];
        let r = min_norm_point(&g).unwrap();
        assert!(r.omega <= 1e-12);
        assert_eq!(r.alpha, vec![0.5, 0.0, 0.5]);
        assert_eq!(r.support, vec![0, 2]);
    }

    #[test]
    fn far_point_minimizes_at_a_vertex() {
        // At (3,0) the hull of {(4,2),(6,-2),(8,2)} misses the origin; the
        // nearest point is the vertex (4,2) at distance 2*sqrt(5).
        let g = vec![vec![4.0, 2.0], vec![6.0, -2.0], vec![8.0, 2.0]];
        let r = min_norm_point(&g).unwrap();
        assert_close(r.omega, 2.0 * 5.0_f64.sqrt(), 1e-12);
        assert_eq!(r.alpha, vec![1.0, 0.0, 0.0]);
        assert_eq!(r.support, vec![0]);
    }

    #[test]
    fn single_gradient() {
        let r = min_norm_point(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!(r.omega, 0.0);
        assert_eq!(r.alpha, vec![1.0]);
        let r = min_norm_point(&[vec![3.0, 4.0]]).unwrap();
        assert_close(r.omega, 5.0, 1e-15);
    }

    #[test]
    fn input_validation() {
        assert_eq!(min_norm_point(&[]), Err(SolverError::Empty));
        let many = vec![vec![1.0]; 13];
        assert_eq!(min_norm_point(&many), Err(SolverError::TooManyVectors(13)));
    }

    #[test]
    fn omega_invariant_under_permutation() {
        let g = vec![vec![1.0, 0.5], vec![-0.5, -1.0], vec![0.25, 0.75]];
        let base = min_norm_point(&g).unwrap();
        let perm = [2usize, 0, 1];
        let gp: Vec<Vec<f64>> = perm.iter().map(|&i| g[i].clone()).collect();
        let r = min_norm_point(&gp).unwrap();
        assert_close(r.omega, base.omega, 1e-9);
        for (pos, &orig) in perm.iter().enumerate() {
            assert_close(r.alpha[pos], base.alpha[orig], 1e-9);
        }
    }

    #[test]
    fn matches_refining_grid_oracle() {
        let cases = vec![
            vec![vec![4.0, 2.0], vec![6.0, -2.0], vec![8.0, 2.0]],
            vec![vec![-2.0, 2.0], vec![0.0, -2.0], vec![2.0, 2.0]],
            vec![vec![1.0, 2.0, -1.0], vec![0.5, -0.5, 0.25]],
            vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-0.2, 0.1], vec![2.0, 0.3]],
        ];
        for g in cases {
            let fast = min_norm_point(&g).unwrap().omega;
            let slow = oracle::min_norm_over_simplex_grid(&g, 1e-3);
            assert!(
                (fast - slow).abs() <= 2e-3,
                "omega {fast} vs oracle {slow} for {g:?}"
            );
            assert!(fast <= slow + 1e-12, "exact solver must not exceed the grid");
        }
    }

    #[test]
    fn lp_single_variable_forced() {
        // maximize t subject to a1 = 1, a1 >= t  =>  t* = 1.
        let r = lp_solve(
            &[0.0, 1.0],                       // variables (a1, t)
            &[vec![1.0, 0.0]],                 // a1 = 1
            &[1.0],
            &[vec![-1.0, 1.0]],                // t - a1 <= 0
            &[0.0],
        )
        .unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_close(r.objective, 1.0, 1e-9);
    }

    #[test]
    fn lp_box_maximum() {
        // maximize x subject to x <= 3, x >= 0.
        let r = lp_solve(&[1.0], &[], &[], &[vec![1.0], vec![-1.0]], &[3.0, 0.0]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_close(r.objective, 3.0, 1e-9);
        assert_close(r.solution[0], 3.0, 1e-9);
    }

    #[test]
    fn lp_interior_multiplier_at_triangle_center() {
        // maximize t s.t. Df(0,0)' a = 0, sum a = 1, a_i >= t. The unique
        // feasible multiplier is (1/4, 1/2, 1/4), so t* = 1/4.
        let r = lp_solve(
            &[0.0, 0.0, 0.0, 1.0], // (a1, a2, a3, t)
            &[
                vec![-2.0, 0.0, 2.0, 0.0],
                vec![2.0, -2.0, 2.0, 0.0],
                vec![1.0, 1.0, 1.0, 0.0],
            ],
            &[0.0, 0.0, 1.0],
            &[
                vec![-1.0, 0.0, 0.0, 1.0],
                vec![0.0, -1.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0, 1.0],
            ],
            &[0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_close(r.objective, 0.25, 1e-9);
        assert_close(r.solution[0], 0.25, 1e-9);
        assert_close(r.solution[1], 0.5, 1e-9);
        assert_close(r.solution[2], 0.25, 1e-9);
    }

    #[test]
    fn lp_detects_infeasible_and_unbounded() {
        // x <= -1 and x >= 0 cannot hold together.
        let r = lp_solve(&[1.0], &[], &[], &[vec![1.0], vec![-1.0]], &[-1.0, 0.0]).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        // maximize x with only x >= 0.
        let r = lp_solve(&[1.0], &[], &[], &[vec![-1.0]], &[0.0]).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn lp_dimension_mismatch() {
        let err = lp_solve(&[1.0, 2.0], &[vec![1.0]], &[0.0], &[], &[]).unwrap_err();
        assert!(matches!(err, SolverError::DimensionMismatch(_)));
    }

    #[test]
    fn criticality_agrees_with_lp_feasibility() {
        // omega == 0 iff the simplex-combination LP is feasible.
        let cases = vec![
            (vec![vec![-2.0, 2.0], vec![0.0, -2.0], vec![2.0, 2.0]], true),
            (vec![vec![4.0, 2.0], vec![6.0, -2.0], vec![8.0, 2.0]], false),
            (vec![vec![1.0, 0.0], vec![-1.0, 0.0]], true),
            (vec![vec![1.0, 0.0], vec![2.0, 0.0]], false),
        ];
        for (g, expect_critical) in cases {
            let omega = min_norm_point(&g).unwrap().omega;
            let k = g.len();
            let n = g[0].len();
            let mut a_eq: Vec<Vec<f64>> = (0..n)
                .map(|j| (0..k).map(|i| g[i][j]).collect())
                .collect();
            a_eq.push(vec![1.0; k]);
            let mut b_eq = vec![0.0; n];
            b_eq.push(1.0);
            let a_ineq: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
                .collect();
            let b_ineq = vec![0.0; k];
            let lp = lp_solve(&vec![0.0; k], &a_eq, &b_eq, &a_ineq, &b_ineq).unwrap();
            let feasible = lp.status == LpStatus::Optimal;
            assert_eq!(feasible, expect_critical);
            assert_eq!(omega <= 1e-9, expect_critical, "omega = {omega}");
        }
    }
}
