//! The KKT system at a point: residuals, derivatives, and classification.
//!
//! With `k` objectives over `R^n`, the criticality conditions form the system
//!
//! ```text
//!   F(x, alpha) = ( sum_i alpha_i grad f_i(x),  sum_i alpha_i - 1 )
//! ```
//!
//! Eliminating `alpha_k = 1 - sum_{i<k} alpha_i` gives the reduced system
//! `Ftilde: R^n x closure(Delta^{k-1}) -> R^n` whose zero set over the open
//! reduced simplex, `M`, carries the interior part of the critical set:
//! `P_int = pr_x(M)`. Its derivatives are
//!
//! ```text
//!   D_x Ftilde = sum_i alpha_i H_i(x) + (1 - sum alpha_i) H_k(x)
//!   D_a Ftilde = ( grad f_1 - grad f_k | ... | grad f_{k-1} - grad f_k )
//! ```
//!
//! [`diagnose`] bundles the per-point questions: how critical (min-norm
//! criticality measure, scaled by the largest gradient norm), which class
//! (a strictly positive multiplier exists — interior — or every multiplier
//! has a zero component — zero edge), the Jacobian rank, the dimension of the
//! multiplier solution set, and degeneracy of `D_x Ftilde`.

use crate::expr::{EvalError, Problem};
use crate::hierarchy::{self, SubproblemId};
use crate::linalg::{self, Matrix};
use crate::solvers::{self, LpStatus, SolverError};
use std::fmt;
use thiserror::Error;

/// Floor for the gradient scale in `omega / max_i ||grad f_i||`. Where all
/// gradients (nearly) vanish — single-objective minimizers, common stationary
/// points — the ratio would demand `omega` below roundoff; the floor turns
/// the test into an absolute one (`omega <= eps_crit * 1e-3`) exactly there
/// while leaving normally-scaled points scale-free.
const SCALE_FLOOR: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum KktError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("multiplier is not in the standard simplex: {0}")]
    InvalidMultiplier(String),
    #[error("D_x Ftilde is numerically singular at this point (degenerate set)")]
    Degenerate,
    #[error("point is not Pareto critical at the configured tolerance")]
    NotCritical,
    #[error("no subproblem of size rank+1 passes the criticality and rank tests")]
    NoSubsetFound,
}

/// Shared numeric knobs. Every rank decision that feeds a classification uses
/// the single `rank_rtol`, so the dichotomies stay mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Scaled criticality threshold: flagged critical iff
    /// `omega / max(||grad f_i||) <= eps_crit`.
    pub eps_crit: f64,
    /// Interior classification: `t* > tau_int`.
    pub tau_int: f64,
    /// Zero-edge classification: `t* < tau_zero`; between the two thresholds
    /// a point is reported as boundary-ambiguous rather than silently binned.
    pub tau_zero: f64,
    /// Relative tolerance for all numerical ranks.
    pub rank_rtol: f64,
    /// Newton residual target for manifold tracing.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Radius below which traced points are considered duplicates.
    pub dedup_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_crit: 1e-6,
            tau_int: 1e-6,
            tau_zero: 1e-9,
            rank_rtol: 1e-8,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            dedup_radius: 1e-6,
        }
    }
}

/// A KKT multiplier: a point of the standard simplex in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    alpha: Vec<f64>,
}

impl Multiplier {
    /// Validates nonnegativity (roundoff-level violations are clamped) and
    /// the unit sum (within 1e-9).
    pub fn new(mut alpha: Vec<f64>) -> Result<Self, KktError> {
        if alpha.is_empty() {
            return Err(KktError::InvalidMultiplier("empty".into()));
        }
        for a in alpha.iter_mut() {
            if *a < 0.0 {
                if *a < -1e-9 {
                    return Err(KktError::InvalidMultiplier(format!(
                        "negative component {a}"
                    )));
                }
                *a = 0.0;
            }
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(KktError::InvalidMultiplier(format!("components sum to {sum}")));
        }
        for a in alpha.iter_mut() {
            *a /= sum;
        }
        Ok(Multiplier { alpha })
    }

    /// Lift a reduced multiplier `(alpha_1..alpha_{k-1})` with
    /// `alpha_k = 1 - sum`.
    pub fn from_reduced(reduced: &[f64]) -> Result<Self, KktError> {
        let mut alpha = reduced.to_vec();
        alpha.push(1.0 - reduced.iter().sum::<f64>());
        Multiplier::new(alpha)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    /// The reduced view: first `k-1` components.
    pub fn reduced(&self) -> Vec<f64> {
        self.alpha[..self.alpha.len() - 1].to_vec()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn min_component(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Multiplier-based class of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NotCritical,
    /// A strictly positive multiplier exists (`t* > tau_int`).
    Interior,
    /// Every multiplier has a zero component (`t* < tau_zero`).
    ZeroEdge,
    /// `t*` falls between the two thresholds; deliberately not binned.
    BoundaryAmbiguous,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::NotCritical => "not-critical",
            Classification::Interior => "interior",
            Classification::ZeroEdge => "zero-edge",
            Classification::BoundaryAmbiguous => "ambiguous",
        };
        f.write_str(s)
    }
}

impl Classification {
    pub fn parse(s: &str) -> Option<Classification> {
        match s {
            "not-critical" => Some(Classification::NotCritical),
            "interior" => Some(Classification::Interior),
            "zero-edge" => Some(Classification::ZeroEdge),
            "ambiguous" => Some(Classification::BoundaryAmbiguous),
            _ => None,
        }
    }
}

/// Everything [`diagnose`] knows about one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDiagnostics {
    pub x: Vec<f64>,
    /// Criticality measure scaled by the largest gradient norm at `x`.
    pub omega: f64,
    pub classification: Classification,
    /// A multiplier witnessing the classification (absent when not critical).
    pub witness: Option<Multiplier>,
    /// Optimum of `max t s.t. Df' alpha = 0, sum alpha = 1, alpha_i >= t`
    /// over the multiplier solution set; NaN when not critical.
    pub tstar: f64,
    /// Numerical rank of the `k x n` Jacobian of the objectives.
    pub jac_rank: usize,
    /// Dimension of the solution set of the stacked linear system
    /// `(Df' ; 1') alpha = (0; 1)`; equals `k - 1 - jac_rank` at critical
    /// points by rank-nullity.
    pub multiplier_dim: usize,
    /// Whether `D_x Ftilde(x, witness)` has rank at most `n - 1`.
    pub degenerate: bool,
}

// ---------------------------------------------------------------------------
// Residuals and derivatives
// ---------------------------------------------------------------------------

/// The full KKT residual: `n` gradient-combination entries, then the simplex
/// defect `sum alpha_i - 1`. Accepts any weight vector, simplex member or not.
pub fn residual_f(p: &Problem, x: &[f64], alpha: &[f64]) -> Result<Vec<f64>, EvalError> {
    debug_assert_eq!(alpha.len(), p.num_objectives());
    let n = p.dim();
    let mut out = vec![0.0; n + 1];
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            let g = p.gradient(i, x)?;
            for (o, gi) in out[..n].iter_mut().zip(&g) {
                *o += a * gi;
            }
        }
    }
    out[n] = alpha.iter().sum::<f64>() - 1.0;
    Ok(out)
}

/// The reduced residual `Ftilde(x, alpha_reduced)`; agrees with the first `n`
/// entries of [`residual_f`] under the `alpha_k = 1 - sum` lift.
pub fn residual_ftilde(
    p: &Problem,
    x: &[f64],
    alpha_reduced: &[f64],
) -> Result<Vec<f64>, EvalError> {
    let k = p.num_objectives();
    debug_assert_eq!(alpha_reduced.len(), k - 1);
    let n = p.dim();
    let gk = p.gradient(k - 1, x)?;
    let mut out = gk.clone();
    for (i, &a) in alpha_reduced.iter().enumerate() {
        if a != 0.0 {
            let g = p.gradient(i, x)?;
            for j in 0..n {
                out[j] += a * (g[j] - gk[j]);
            }
        }
    }
    Ok(out)
}

/// `D_x Ftilde`: the multiplier-weighted Hessian sum, an `n x n` matrix.
pub fn d_x_ftilde(p: &Problem, x: &[f64], alpha_reduced: &[f64]) -> Result<Matrix, EvalError> {
    let k = p.num_objectives();
    debug_assert_eq!(alpha_reduced.len(), k - 1);
    let n = p.dim();
    let mut out = Matrix::zeros(n, n);
    let wk = 1.0 - alpha_reduced.iter().sum::<f64>();
    for (i, w) in alpha_reduced
        .iter()
        .copied()
        .chain(std::iter::once(wk))
        .enumerate()
    {
        if w == 0.0 {
            continue;
        }
        let h = p.hessian(i, x)?;
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] += w * h[a][b];
            }
        }
    }
    Ok(out)
}

/// `D_alpha Ftilde`: gradient differences as columns, `n x (k-1)`.
pub fn d_alpha_ftilde(p: &Problem, x: &[f64]) -> Result<Matrix, EvalError> {
    let k = p.num_objectives();
    let gk = p.gradient(k - 1, x)?;
    let cols: Result<Vec<Vec<f64>>, EvalError> = (0..k - 1)
        .map(|i| {
            let g = p.gradient(i, x)?;
            Ok(g.iter().zip(&gk).map(|(a, b)| a - b).collect())
        })
        .collect();
    Ok(Matrix::from_cols(&cols?))
}

/// The full derivative `D Ftilde = (D_x | D_alpha)`, `n x (n+k-1)`.
pub fn d_ftilde(p: &Problem, x: &[f64], alpha_reduced: &[f64]) -> Result<Matrix, EvalError> {
    Ok(d_x_ftilde(p, x, alpha_reduced)?.hstack(&d_alpha_ftilde(p, x)?))
}

/// The `(n+1) x k` stacked multiplier system `(Df' ; 1')`, whose solution set
/// against `(0,..,0,1)` is the affine set of (unconstrained-sign) multipliers.
pub fn stacked_multiplier_system(gradients: &[Vec<f64>]) -> Matrix {
    let k = gradients.len();
    let n = gradients[0].len();
    let mut b = Matrix::zeros(n + 1, k);
    for (i, g) in gradients.iter().enumerate() {
        for j in 0..n {
            b[(j, i)] = g[j];
        }
    }
    for i in 0..k {
        b[(n, i)] = 1.0;
    }
    b
}

// ---------------------------------------------------------------------------
// Diagnosis
// ---------------------------------------------------------------------------

/// Full per-point diagnosis; see [`PointDiagnostics`].
///
/// The criticality measure comes from the exact min-norm solver. When the
/// point passes the criticality threshold, the classifier maximizes the
/// smallest multiplier component over the affine solution set of the stacked
/// system — parameterized on its kernel, so grid points that satisfy the KKT
/// equalities only to within `eps_crit` are still classified against the
/// nearby multiplier set instead of being reported LP-infeasible.
pub fn diagnose(p: &Problem, x: &[f64], tol: &Tolerances) -> Result<PointDiagnostics, KktError> {
    let k = p.num_objectives();
    let n = p.dim();
    let gradients = p.gradients(x)?;
    let scale = gradients
        .iter()
        .map(|g| linalg::norm2(g))
        .fold(0.0_f64, f64::max);
    let denom = scale.max(SCALE_FLOOR);

    let mn = solvers::min_norm_point(&gradients)?;
    let omega = mn.omega / denom;

    let jac = Matrix::from_rows(&gradients);
    let jac_rank = linalg::rank(&jac, tol.rank_rtol);
    let stacked = stacked_multiplier_system(&gradients);
    let multiplier_dim = k - linalg::rank(&stacked, tol.rank_rtol);

    if omega > tol.eps_crit {
        return Ok(PointDiagnostics {
            x: x.to_vec(),
            omega,
            classification: Classification::NotCritical,
            witness: None,
            tstar: f64::NAN,
            jac_rank,
            multiplier_dim,
            degenerate: false,
        });
    }

    // Affine description of the multiplier set: particular solution plus the
    // kernel of the stacked system.
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    let alpha_ls = linalg::lstsq_min_norm(&stacked, &rhs, tol.rank_rtol);
    let kernel = linalg::nullspace(&stacked, tol.rank_rtol);

    let (tstar, alpha_best) = if kernel.is_empty() {
        let t = alpha_ls.iter().copied().fold(f64::INFINITY, f64::min);
        (t, alpha_ls.clone())
    } else {
        // max t  s.t.  alpha_ls_i + (V z)_i >= t  over (z, t).
        let d = kernel.len();
        let mut c = vec![0.0; d + 1];
        c[d] = 1.0;
        let mut a_ineq = Vec::with_capacity(k);
        for i in 0..k {
            let mut row = vec![0.0; d + 1];
            for (j, v) in kernel.iter().enumerate() {
                row[j] = -v[i];
            }
            row[d] = 1.0;
            a_ineq.push(row);
        }
        let b_ineq: Vec<f64> = alpha_ls.clone();
        let lp = solvers::lp_solve(&c, &[], &[], &a_ineq, &b_ineq)?;
        debug_assert_eq!(lp.status, LpStatus::Optimal, "interior LP is always feasible/bounded");
        let z = &lp.solution[..d];
        let mut alpha = alpha_ls.clone();
        for (j, v) in kernel.iter().enumerate() {
            for i in 0..k {
                alpha[i] += z[j] * v[i];
            }
        }
        (lp.objective, alpha)
    };

    let classification = if tstar > tol.tau_int {
        Classification::Interior
    } else if tstar < tol.tau_zero {
        Classification::ZeroEdge
    } else {
        Classification::BoundaryAmbiguous
    };

    // The LP vertex can carry roundoff-negative components; fall back to the
    // min-norm alpha if the witness cannot be normalized onto the simplex.
    let witness = Multiplier::new(
        alpha_best
            .iter()
            .map(|&a| if a.abs() < 1e-12 { 0.0 } else { a.max(0.0) })
            .collect(),
    )
    .or_else(|_| Multiplier::new(mn.alpha.clone()))?;

    let dx = d_x_ftilde(p, x, &witness.reduced())?;
    let degenerate = linalg::rank(&dx, tol.rank_rtol) <= n.saturating_sub(1);

    Ok(PointDiagnostics {
        x: x.to_vec(),
        omega,
        classification,
        witness: Some(witness),
        tstar,
        jac_rank,
        multiplier_dim,
        degenerate,
    })
}

/// Orthonormal basis of the projection of `ker D Ftilde(x, alpha)` onto the
/// parameter space.
///
/// Requires `D_x Ftilde` to be invertible at the rank tolerance; kernel
/// vectors `(v_x, v_a)` then satisfy `v_x = -(D_x Ftilde)^{-1} D_a Ftilde v_a`
/// (the implicit-function relation), so the projection is the column span of
/// that map. At a degenerate point this returns [`KktError::Degenerate`].
pub fn tangent_space(
    p: &Problem,
    x: &[f64],
    alpha: &Multiplier,
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>, KktError> {
    let n = p.dim();
    let reduced = alpha.reduced();
    let dx = d_x_ftilde(p, x, &reduced)?;
    if linalg::rank(&dx, tol.rank_rtol) < n {
        return Err(KktError::Degenerate);
    }
    let da = d_alpha_ftilde(p, x)?;
    let mut map_cols = Vec::with_capacity(da.cols());
    for j in 0..da.cols() {
        let col = da.col(j);
        let neg: Vec<f64> = col.iter().map(|v| -v).collect();
        let sol = linalg::solve(&dx, &neg, tol.rank_rtol).map_err(|_| KktError::Degenerate)?;
        map_cols.push(sol);
    }
    if map_cols.is_empty() {
        return Ok(Vec::new());
    }
    let map = Matrix::from_cols(&map_cols);
    let qr = linalg::qr_pivoted(&map);
    let r = linalg::rank(&map, tol.rank_rtol);
    let mut basis = Vec::with_capacity(r);
    for c in 0..r {
        let mut v = qr.q.col(c);
        let lead = v
            .iter()
            .copied()
            .fold(0.0_f64, |m, t| if t.abs() > m.abs() { t } else { m });
        if lead < 0.0 {
            for t in v.iter_mut() {
                *t = -*t;
            }
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Find an index set `I` with `|I| = jac_rank + 1` such that `x` is critical
/// for the subproblem on `I` and the subproblem Jacobian keeps the rank.
///
/// Subsets are tried in lexicographic order; when `x` is classified zero-edge
/// the first passing subset whose subproblem classification is also zero-edge
/// is preferred. (The constructive alternative — iteratively dropping an
/// index with a vanishing multiplier while preserving rank — scales better
/// but exhaustive search is exact at this problem size.)
pub fn decompose_at(
    p: &Problem,
    x: &[f64],
    tol: &Tolerances,
) -> Result<SubproblemId, KktError> {
    let diag = diagnose(p, x, tol)?;
    decompose_with_diagnostics(p, &diag, tol)
}

/// [`decompose_at`] when a diagnosis for `x` is already available.
pub fn decompose_with_diagnostics(
    p: &Problem,
    diag: &PointDiagnostics,
    tol: &Tolerances,
) -> Result<SubproblemId, KktError> {
    if diag.classification == Classification::NotCritical {
        return Err(KktError::NotCritical);
    }
    let k = p.num_objectives();
    let x = &diag.x;
    let size = diag.jac_rank + 1;
    debug_assert!(size <= k, "critical points have jac_rank <= k-1");
    let gradients = p.gradients(x)?;

    let mut passing: Vec<Vec<usize>> = Vec::new();
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let sub_grads: Vec<Vec<f64>> = subset.iter().map(|&i| gradients[i].clone()).collect();
        let scale = sub_grads
            .iter()
            .map(|g| linalg::norm2(g))
            .fold(0.0_f64, f64::max)
            .max(SCALE_FLOOR);
        let mn = solvers::min_norm_point(&sub_grads)?;
        if mn.omega / scale <= tol.eps_crit {
            let sub_rank = linalg::rank(&Matrix::from_rows(&sub_grads), tol.rank_rtol);
            if sub_rank == diag.jac_rank {
                passing.push(subset.clone());
            }
        }
        if !next_subset(&mut subset, k) {
            break;
        }
    }
    if passing.is_empty() {
        return Err(KktError::NoSubsetFound);
    }
    if diag.classification == Classification::ZeroEdge {
        for cand in &passing {
            let id = SubproblemId::new(cand.clone()).expect("subset indices are valid");
            let sub = hierarchy::subproblem(p, &id).expect("subset indices are valid");
            let sub_diag = diagnose(&sub, x, tol)?;
            if sub_diag.classification == Classification::ZeroEdge {
                return Ok(id);
            }
        }
    }
    Ok(SubproblemId::new(passing[0].clone()).expect("subset indices are valid"))
}

fn next_subset(subset: &mut [usize], k: usize) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_problem;

    const TRIANGLE: &str = "\
vars: x1 x2
objective: (x1 - 1)^2 + (x2 + 1)^2
objective: x1^2 + (x2 - 1)^2
objective: (x1 + 1)^2 + (x2 + 1)^2
";

    // D_x Ftilde loses rank at the origin for alpha = 1/3.
    const DEGENERATE: &str = "\
vars: x1 x2
objective: -2*x1*x2 - 2*x1^2 - 2*x2 + x2^2
objective: x1*x2 + x1^2 + x2
";

    // P is a cross: the real line times {0} union {0} times [-1,1].
    const CROSS: &str = "\
vars: x1 x2
objective: x1^2 + (x2 - 1)^2
objective: x1^2 + (x2 + 1)^2
objective: x2^2
";

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_vec_close(a: &[f64], b: &[f64], eps: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= eps, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn residual_f_examples() {
        let p = parse_problem(TRIANGLE).unwrap();
        let r = residual_f(&p, &[0.0, 0.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_vec_close(&r, &[0.0, 0.0, 0.0], 1e-14);
        let r = residual_f(&p, &[0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_vec_close(&r, &[-2.0, 2.0, 0.0], 1e-14);
        let r = residual_f(&p, &[0.7, -0.3], &[0.0, 0.0, 0.0]).unwrap();
        assert_vec_close(&r, &[0.0, 0.0, -1.0], 1e-14);
    }

    #[test]
    fn reduced_residual_examples() {
        let p = parse_problem(DEGENERATE).unwrap();
        // (0,0,1/3) lies on the manifold.
        let r = residual_ftilde(&p, &[0.0, 0.0], &[1.0 / 3.0]).unwrap();
        assert_vec_close(&r, &[0.0, 0.0], 1e-14);
        // alpha = 0 leaves the gradient of f2.
        let r = residual_ftilde(&p, &[0.0, 0.0], &[0.0]).unwrap();
        assert_vec_close(&r, &[0.0, 1.0], 1e-14);
    }

    #[test]
    fn reduced_residual_matches_lifted_full_residual() {
        let p = parse_problem(TRIANGLE).unwrap();
        let points = [
            ([0.3, -0.4], [0.2, 0.5]),
            ([-1.5, 0.9], [0.0, 0.7]),
            ([0.0, 0.0], [0.9, 0.05]),
        ];
        for (x, red) in points {
            let lift = Multiplier::from_reduced(&red).unwrap();
            let full = residual_f(&p, &x, lift.as_slice()).unwrap();
            let tilde = residual_ftilde(&p, &x, &red).unwrap();
            assert_vec_close(&tilde, &full[..2], 1e-14);
        }
    }

    #[test]
    fn weighted_hessian_examples() {
        let p = parse_problem(DEGENERATE).unwrap();
        let m = d_x_ftilde(&p, &[0.0, 0.0], &[1.0 / 3.0]).unwrap();
        assert!((m[(0, 0)]).abs() < 1e-12);
        assert!((m[(0, 1)]).abs() < 1e-12);
        assert!((m[(1, 0)]).abs() < 1e-12);
        assert!((m[(1, 1)] - 2.0 / 3.0).abs() < 1e-12);

        let t = parse_problem(TRIANGLE).unwrap();
        let m = d_x_ftilde(&t, &[0.4, -1.2], &[0.3, 0.3]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 2.0 } else { 0.0 };
                assert!((m[(a, b)] - want).abs() < 1e-14);
            }
        }

        // Pure-f3 weighting in the cross problem picks out its Hessian.
        let c = parse_problem(CROSS).unwrap();
        let m = d_x_ftilde(&c, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((m[(0, 0)]).abs() < 1e-14 && (m[(1, 1)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_difference_columns() {
        let p = parse_problem(DEGENERATE).unwrap();
        let m = d_alpha_ftilde(&p, &[0.0, 0.0]).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert!((m[(0, 0)]).abs() < 1e-14 && (m[(1, 0)] + 3.0).abs() < 1e-14);

        let t = parse_problem(TRIANGLE).unwrap();
        let m = d_alpha_ftilde(&t, &[0.0, 0.0]).unwrap();
        assert_vec_close(&m.col(0), &[-4.0, 0.0], 1e-14);
        assert_vec_close(&m.col(1), &[-2.0, -4.0], 1e-14);
    }

    #[test]
    fn diagnose_triangle_center() {
        let p = parse_problem(TRIANGLE).unwrap();
        let d = diagnose(&p, &[0.0, 0.0], &tol()).unwrap();
        assert_eq!(d.classification, Classification::Interior);
        assert!((d.tstar - 0.25).abs() < 1e-9, "tstar = {}", d.tstar);
        assert_vec_close(d.witness.as_ref().unwrap().as_slice(), &[0.25, 0.5, 0.25], 1e-9);
        assert_eq!(d.jac_rank, 2);
        assert_eq!(d.multiplier_dim, 0);
        assert!(!d.degenerate);
    }

    #[test]
    fn diagnose_triangle_bottom_edge() {
        let p = parse_problem(TRIANGLE).unwrap();
        let d = diagnose(&p, &[0.0, -1.0], &tol()).unwrap();
        assert_eq!(d.classification, Classification::ZeroEdge);
        assert!(d.tstar.abs() < 1e-9);
        assert!(d.witness.as_ref().unwrap().as_slice()[1].abs() < 1e-9);
        assert_eq!(d.jac_rank, 2);
    }

    #[test]
    fn diagnose_cross_fixture() {
        let p = parse_problem(CROSS).unwrap();
        // Horizontal branch away from the origin: unique multiplier (0,0,1).
        let d = diagnose(&p, &[0.5, 0.0], &tol()).unwrap();
        assert_eq!(d.classification, Classification::ZeroEdge);
        assert_vec_close(d.witness.as_ref().unwrap().as_slice(), &[0.0, 0.0, 1.0], 1e-9);
        // Center: one-parameter multiplier family, best minimum 1/3.
        let d = diagnose(&p, &[0.0, 0.0], &tol()).unwrap();
        assert_eq!(d.classification, Classification::Interior);
        assert!((d.tstar - 1.0 / 3.0).abs() < 1e-9, "tstar = {}", d.tstar);
        assert_eq!(d.multiplier_dim, 1);
        // Segment endpoints are zero-edge.
        for x2 in [1.0, -1.0] {
            let d = diagnose(&p, &[0.0, x2], &tol()).unwrap();
            assert_eq!(d.classification, Classification::ZeroEdge, "at (0,{x2})");
        }
        // Not critical off the cross.
        let d = diagnose(&p, &[0.5, 0.5], &tol()).unwrap();
        assert_eq!(d.classification, Classification::NotCritical);
        assert!(d.witness.is_none() && d.tstar.is_nan());
    }

    #[test]
    fn diagnose_degenerate_fixture() {
        let p = parse_problem(DEGENERATE).unwrap();
        let d = diagnose(&p, &[0.0, 0.0], &tol()).unwrap();
        assert!(d.omega < 1e-9);
        assert_vec_close(
            d.witness.as_ref().unwrap().as_slice(),
            &[1.0 / 3.0, 2.0 / 3.0],
            1e-9,
        );
        assert!(d.degenerate, "D_x Ftilde((0,0), 1/3) has rank 1");
        let dx = d_x_ftilde(&p, &[0.0, 0.0], &[1.0 / 3.0]).unwrap();
        assert_eq!(linalg::rank(&dx, tol().rank_rtol), 1);
    }

    #[test]
    fn rank_nullity_relation_on_critical_points() {
        let p = parse_problem(CROSS).unwrap();
        let k = p.num_objectives();
        for x in [[0.0, 0.0], [0.0, 0.5], [0.7, 0.0], [0.0, 1.0]] {
            let d = diagnose(&p, &x, &tol()).unwrap();
            assert_ne!(d.classification, Classification::NotCritical);
            assert_eq!(d.multiplier_dim, k - 1 - d.jac_rank, "at {x:?}");
        }
    }

    #[test]
    fn tangent_space_spans_plane_at_triangle_center() {
        let p = parse_problem(TRIANGLE).unwrap();
        let alpha = Multiplier::new(vec![0.25, 0.5, 0.25]).unwrap();
        let basis = tangent_space(&p, &[0.0, 0.0], &alpha, &tol()).unwrap();
        assert_eq!(basis.len(), 2);
        // Oracle: project the explicit kernel of the 2x4 full derivative
        // onto x; every projected kernel vector must lie in the returned
        // span (here all of R^2, since D_x = 2I and D_a has rank 2).
        let full = d_ftilde(&p, &[0.0, 0.0], &alpha.reduced()).unwrap();
        let kernel = linalg::nullspace(&full, 1e-8);
        assert_eq!(kernel.len(), 2);
        for v in &kernel {
            let proj = &v[..2];
            let mut resid: Vec<f64> = proj.to_vec();
            for b in &basis {
                let c = linalg::dot(proj, b);
                for (r, bi) in resid.iter_mut().zip(b) {
                    *r -= c * bi;
                }
            }
            assert!(
                linalg::norm2(&resid) <= 1e-8,
                "projected kernel vector escapes the tangent span"
            );
        }
    }

    #[test]
    fn tangent_space_on_cross_segment() {
        let p = parse_problem(CROSS).unwrap();
        let d = diagnose(&p, &[0.0, 0.5], &tol()).unwrap();
        let basis = tangent_space(&p, &[0.0, 0.5], d.witness.as_ref().unwrap(), &tol()).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0][0].abs() < 1e-6, "direction should align with (0,1)");
        assert!((basis[0][1].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tangent_space_rejects_degenerate_point() {
        let p = parse_problem(CROSS).unwrap();
        let alpha = Multiplier::new(vec![0.0, 0.0, 1.0]).unwrap();
        let err = tangent_space(&p, &[0.0, 0.0], &alpha, &tol()).unwrap_err();
        assert_eq!(err, KktError::Degenerate);
    }

    #[test]
    fn decompose_triangle_edge_point() {
        let p = parse_problem(TRIANGLE).unwrap();
        let id = decompose_at(&p, &[0.0, -1.0], &tol()).unwrap();
        assert_eq!(id.indices(), &[0, 1, 2], "k = rank+1 forces the full set");
    }

    #[test]
    fn decompose_rejects_noncritical() {
        let p = parse_problem(TRIANGLE).unwrap();
        let err = decompose_at(&p, &[3.0, 3.0], &tol()).unwrap_err();
        assert_eq!(err, KktError::NotCritical);
    }

    #[test]
    fn multiplier_validation() {
        assert!(Multiplier::new(vec![0.5, 0.5]).is_ok());
        assert!(Multiplier::new(vec![0.6, 0.6]).is_err());
        assert!(Multiplier::new(vec![-0.1, 1.1]).is_err());
        let m = Multiplier::from_reduced(&[0.25, 0.5]).unwrap();
        assert_vec_close(m.as_slice(), &[0.25, 0.5, 0.25], 1e-15);
    }
}
