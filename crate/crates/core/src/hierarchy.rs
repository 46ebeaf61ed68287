//! Subproblems and set-level structure: containment, decomposition, covers.
//!
//! For an index set `I` the subproblem keeps only the objectives in `I`. Its
//! critical set is always contained in the full one (pad the multiplier with
//! zeros), criticality decomposes into subproblems whose size is tied to the
//! Jacobian rank, and the zero-edge portion of the critical set is covered by
//! the subproblems of size `m = max rank over the flagged set`.
//!
//! "Edge points" here are the zero-edge classified nodes — the necessary
//! condition for edge membership. True edge membership (tangent-cone
//! asymmetry) has no robust grid test, so reports label these as candidates
//! and the covering statements are checked against them.

use crate::expr::Problem;
use crate::kkt::{self, Classification, KktError, Tolerances};
use crate::linalg;
use crate::scan::{self, GridSpec, PointIndex, ScanError, ScanResult};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HierarchyError {
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("operation needs a nonempty scan")]
    EmptyScan,
    #[error(transparent)]
    Kkt(#[from] KktError),
    #[error(transparent)]
    Scan(#[from] ScanError),
}

/// A nonempty sorted subset of the objective indices (0-based in code; the
/// textual form is 1-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubproblemId {
    indices: Vec<usize>,
}

impl SubproblemId {
    pub fn new(mut indices: Vec<usize>) -> Result<Self, HierarchyError> {
        if indices.is_empty() {
            return Err(HierarchyError::InvalidSubset("empty subset".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(HierarchyError::InvalidSubset("repeated index".into()));
        }
        Ok(SubproblemId { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// All subsets of `{0..k}` of the given size, lexicographically.
    pub fn all_of_size(k: usize, size: usize) -> Vec<SubproblemId> {
        let mut out = Vec::new();
        if size == 0 || size > k {
            return out;
        }
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            out.push(SubproblemId { indices: subset.clone() });
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if subset[i] < k - (size - i) {
                    subset[i] += 1;
                    for j in i + 1..size {
                        subset[j] = subset[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return out;
            }
        }
    }
}

impl fmt::Display for SubproblemId {
    /// 1-based set notation, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// The subproblem keeping only the objectives in `id`, order preserved.
pub fn subproblem(p: &Problem, id: &SubproblemId) -> Result<Problem, HierarchyError> {
    let k = p.num_objectives();
    if let Some(&bad) = id.indices.iter().find(|&&i| i >= k) {
        return Err(HierarchyError::InvalidSubset(format!(
            "index {} out of range for {k} objectives",
            bad + 1
        )));
    }
    let objectives = id.indices.iter().map(|&i| p.objectives()[i].clone()).collect();
    let name = p.name.as_ref().map(|n| format!("{n} restricted to {id}"));
    Problem::new(p.dim(), objectives, name).map_err(|e| HierarchyError::InvalidSubset(e.to_string()))
}

/// Containment check for one subproblem: every point flagged critical for the
/// subproblem on the window must be critical for the full problem.
#[derive(Debug, Clone)]
pub struct ContainmentReport {
    pub subset: SubproblemId,
    /// Number of subproblem-critical grid nodes examined.
    pub checked: usize,
    /// Largest full-problem scaled criticality measure over those nodes.
    pub max_full_omega: f64,
    /// Largest scaled norm of the full KKT residual under the zero-padded
    /// subproblem witness.
    pub max_padded_residual: f64,
    /// Indices (into the subproblem scan) where full-problem criticality
    /// exceeded `eps_crit`. Empty when containment holds on the grid.
    pub violations: Vec<usize>,
}

pub fn check_containment(
    p: &Problem,
    id: &SubproblemId,
    window: &GridSpec,
    tol: &Tolerances,
) -> Result<ContainmentReport, HierarchyError> {
    let sub = subproblem(p, id)?;
    let sub_scan = scan::grid_scan(&sub, window, tol)?;
    let mut max_full_omega: f64 = 0.0;
    let mut max_padded_residual: f64 = 0.0;
    let mut violations = Vec::new();
    for (i, pt) in sub_scan.points.iter().enumerate() {
        let full = kkt::diagnose(p, &pt.x, tol)?;
        max_full_omega = max_full_omega.max(full.omega);
        if full.classification == Classification::NotCritical {
            violations.push(i);
        }
        if let Some(w) = &pt.witness {
            // Pad the subproblem multiplier with zeros on the dropped
            // objectives; the full residual must stay at criticality scale.
            let k = p.num_objectives();
            let mut padded = vec![0.0; k];
            for (pos, &obj) in id.indices.iter().enumerate() {
                padded[obj] = w.as_slice()[pos];
            }
            let resid = kkt::residual_f(p, &pt.x, &padded).map_err(KktError::from)?;
            let scale = p
                .gradients(&pt.x)
                .map_err(KktError::from)?
                .iter()
                .map(|g| linalg::norm2(g))
                .fold(1e-3_f64, f64::max);
            max_padded_residual = max_padded_residual.max(linalg::norm2(&resid) / scale);
        }
    }
    Ok(ContainmentReport {
        subset: id.clone(),
        checked: sub_scan.points.len(),
        max_full_omega,
        max_padded_residual,
        violations,
    })
}

/// Assignment of every flagged point to a rank-matched subproblem.
#[derive(Debug, Clone)]
pub struct DecompositionCover {
    /// Distinct subsets used, sorted by (size, lexicographic).
    pub subsets: Vec<SubproblemId>,
    /// Per flagged point (same order as the scan), the subset it was
    /// assigned to; `|I| = jac_rank + 1` holds for each.
    pub assignment: Vec<SubproblemId>,
}

pub fn decomposition_cover(
    p: &Problem,
    scan_result: &ScanResult,
    tol: &Tolerances,
) -> Result<DecompositionCover, HierarchyError> {
    if scan_result.points.is_empty() {
        return Err(HierarchyError::EmptyScan);
    }
    let mut assignment = Vec::with_capacity(scan_result.points.len());
    for pt in &scan_result.points {
        let id = kkt::decompose_with_diagnostics(p, pt, tol)?;
        debug_assert_eq!(id.len(), pt.jac_rank + 1);
        assignment.push(id);
    }
    let mut subsets: Vec<SubproblemId> = assignment.to_vec();
    subsets.sort_by(|a, b| (a.len(), a.indices()).cmp(&(b.len(), b.indices())));
    subsets.dedup();
    Ok(DecompositionCover { subsets, assignment })
}

/// How one zero-edge point is covered.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCoverage {
    /// Index into the scan's flagged points.
    pub point: usize,
    /// Indices into [`CoverReport::subsets`] whose critical set passes within
    /// grid tolerance.
    pub subsets: Vec<usize>,
    /// Objectives whose own gradient vanishes at the point (the single-
    /// objective escape of the covering statement).
    pub singletons: Vec<usize>,
}

/// Edge-covering report: every zero-edge node against the critical sets of
/// all size-`m` subproblems.
#[derive(Debug, Clone)]
pub struct CoverReport {
    /// Max Jacobian rank over the flagged set.
    pub m: usize,
    /// Subsets examined (size `m`, or singletons when `m = 0`).
    pub subsets: Vec<SubproblemId>,
    /// Flagged nodes of each subset's scan, parallel to `subsets`.
    pub subset_points: Vec<Vec<Vec<f64>>>,
    /// Indices of zero-edge classified points in the scan.
    pub edge_points: Vec<usize>,
    pub coverage: Vec<EdgeCoverage>,
    /// Edge points covered by no subset and no vanishing single gradient.
    pub uncovered: Vec<usize>,
}

pub fn edge_cover(
    p: &Problem,
    scan_result: &ScanResult,
    window: &GridSpec,
    tol: &Tolerances,
) -> Result<CoverReport, HierarchyError> {
    if scan_result.points.is_empty() {
        return Err(HierarchyError::EmptyScan);
    }
    let k = p.num_objectives();
    let m = scan_result.points.iter().map(|pt| pt.jac_rank).max().unwrap_or(0);
    // m = 0 means every gradient vanishes on the flagged set; the cover then
    // degenerates to single-objective critical points.
    let size = if m == 0 { 1 } else { m };
    let subsets = SubproblemId::all_of_size(k, size);

    let mut subset_points = Vec::with_capacity(subsets.len());
    let mut indices = Vec::with_capacity(subsets.len());
    for id in &subsets {
        let sub = subproblem(p, id)?;
        let sub_scan = scan::grid_scan(&sub, window, tol)?;
        let pts: Vec<Vec<f64>> = sub_scan.points.into_iter().map(|d| d.x).collect();
        indices.push(PointIndex::new(&pts, window.step()));
        subset_points.push(pts);
    }

    let reach = 1.5 * window.step();
    let mut edge_points = Vec::new();
    let mut coverage = Vec::new();
    let mut uncovered = Vec::new();
    for (pi, pt) in scan_result.points.iter().enumerate() {
        if pt.classification != Classification::ZeroEdge {
            continue;
        }
        edge_points.push(pi);
        let covering: Vec<usize> = indices
            .iter()
            .enumerate()
            .filter(|(_, idx)| idx.any_within(&pt.x, reach))
            .map(|(s, _)| s)
            .collect();
        let gradients = p.gradients(&pt.x).map_err(KktError::from)?;
        let singletons: Vec<usize> = gradients
            .iter()
            .enumerate()
            .filter(|(_, g)| linalg::norm2(g) <= tol.eps_crit)
            .map(|(i, _)| i)
            .collect();
        if covering.is_empty() && singletons.is_empty() {
            uncovered.push(pi);
        }
        coverage.push(EdgeCoverage { point: pi, subsets: covering, singletons });
    }
    Ok(CoverReport { m, subsets, subset_points, edge_points, coverage, uncovered })
}
