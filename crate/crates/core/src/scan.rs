//! Global set computation: grid scanning, manifold tracing, components.
//!
//! The grid scan is the ground truth: it runs the full per-point diagnosis at
//! every node and keeps the critical ones. Newton continuation over the
//! multiplier simplex ([`trace_manifold`]) is the fast path and doubles as an
//! isolator for the interior part `P_int` — it walks the zero set of the
//! reduced KKT system over the *open* simplex, so branches that only carry
//! boundary multipliers are invisible to it by construction. The scan stays
//! authoritative because continuation provably misses `P \ closure(P_int)`
//! when the Jacobian regularity assumption fails.

use crate::expr::Problem;
use crate::kkt::{self, Classification, KktError, PointDiagnostics, Tolerances};
use crate::linalg;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScanError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid has {nodes} nodes, exceeding the cap of {cap}")]
    GridCapExceeded { nodes: usize, cap: usize },
    #[error("manifold tracing needs at least two objectives")]
    NeedTwoObjectives,
    #[error("grid dimension {grid} does not match problem dimension {problem}")]
    DimensionMismatch { grid: usize, problem: usize },
    #[error(transparent)]
    Kkt(#[from] KktError),
}

pub const DEFAULT_NODE_CAP: usize = 10_000_000;

/// Axis-aligned evaluation lattice: closed per-dimension ranges and one step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    ranges: Vec<(f64, f64)>,
    step: f64,
    cap: usize,
}

impl GridSpec {
    pub fn new(ranges: Vec<(f64, f64)>, step: f64) -> Result<Self, ScanError> {
        if ranges.is_empty() {
            return Err(ScanError::InvalidGrid("no ranges given".into()));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(ScanError::InvalidGrid(format!("step {step} must be positive")));
        }
        for &(lo, hi) in &ranges {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(ScanError::InvalidGrid(format!("bad range {lo}:{hi}")));
            }
        }
        Ok(GridSpec { ranges, step, cap: DEFAULT_NODE_CAP })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    /// Nodes per dimension: `lo, lo+h, ...` up to `hi` (inclusive within a
    /// relative slack so that decimal windows keep their endpoints).
    pub fn counts(&self) -> Vec<usize> {
        self.ranges
            .iter()
            .map(|&(lo, hi)| ((hi - lo) / self.step + 1e-9).floor() as usize + 1)
            .collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.counts().iter().product()
    }

    /// Decode a flat index to coordinates; the first dimension varies
    /// slowest, so ascending flat order is lexicographic coordinate order.
    pub fn node(&self, mut idx: usize) -> Vec<f64> {
        let counts = self.counts();
        let mut x = vec![0.0; self.dim()];
        for d in (0..self.dim()).rev() {
            let i = idx % counts[d];
            idx /= counts[d];
            x[d] = self.ranges[d].0 + i as f64 * self.step;
        }
        x
    }

    /// Diameter of the window (diagonal length).
    pub fn diameter(&self) -> f64 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

/// Flagged critical nodes of one grid scan, in lexicographic node order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: GridSpec,
    pub points: Vec<PointDiagnostics>,
    /// FNV-1a hash of the canonical problem text.
    pub problem_hash: String,
    pub tolerances: Tolerances,
}

/// Run the full diagnosis on every grid node, keeping critical ones.
///
/// Nodes are independent work items evaluated in parallel; the result order
/// is the deterministic node order, never completion order.
pub fn grid_scan(p: &Problem, grid: &GridSpec, tol: &Tolerances) -> Result<ScanResult, ScanError> {
    if grid.dim() != p.dim() {
        return Err(ScanError::DimensionMismatch { grid: grid.dim(), problem: p.dim() });
    }
    let total = grid.total_nodes();
    if total > grid.cap {
        return Err(ScanError::GridCapExceeded { nodes: total, cap: grid.cap });
    }
    let diags: Result<Vec<Option<PointDiagnostics>>, KktError> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = grid.node(idx);
            let d = kkt::diagnose(p, &x, tol)?;
            Ok((d.classification != Classification::NotCritical).then_some(d))
        })
        .collect();
    let points: Vec<PointDiagnostics> = diags?.into_iter().flatten().collect();
    Ok(ScanResult {
        grid: grid.clone(),
        points,
        problem_hash: problem_hash(p),
        tolerances: *tol,
    })
}

/// FNV-1a over the canonical rendering; stable across runs and platforms.
pub fn problem_hash(p: &Problem) -> String {
    let text = crate::expr::render_problem(p);
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

// ---------------------------------------------------------------------------
// Manifold tracing
// ---------------------------------------------------------------------------

/// One Newton attempt record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// Reduced multiplier (`k-1` components) of the simplex node.
    pub alpha: Vec<f64>,
    /// Final iterate: a root of the reduced system when `converged`.
    pub x: Vec<f64>,
    pub converged: bool,
    pub iters: usize,
    /// A singular `D_x Ftilde` was hit (degenerate-set encounter).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub entries: Vec<TraceEntry>,
    pub simplex_step: f64,
}

impl TraceResult {
    pub fn converged(&self) -> impl Iterator<Item = &TraceEntry> {
        self.entries.iter().filter(|e| e.converged)
    }
}

enum Attempt {
    Converged { x: Vec<f64>, iters: usize },
    Stalled { x: Vec<f64>, iters: usize, degenerate: bool },
}

/// Newton-trace the reduced KKT system over a grid on the open multiplier
/// simplex.
///
/// Simplex nodes sit on the half-offset lattice `alpha_i = (j + 1/2) h`, so
/// every component — including the implied last one — keeps a margin of half
/// a step to the boundary. For each node, Newton iterations
/// `x <- x - (D_x Ftilde)^{-1} Ftilde` run from the caller's seeds plus the
/// previous node's solutions. Converged iterates are deduplicated and
/// recorded; failed attempts stay in the result with their flags, since
/// singular Jacobians mark the degenerate set. The union of converged points
/// approximates `P_int`.
pub fn trace_manifold(
    p: &Problem,
    window: &GridSpec,
    simplex_step: f64,
    base_seeds: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<TraceResult, ScanError> {
    let k = p.num_objectives();
    if k < 2 {
        return Err(ScanError::NeedTwoObjectives);
    }
    if window.dim() != p.dim() {
        return Err(ScanError::DimensionMismatch { grid: window.dim(), problem: p.dim() });
    }
    if !(simplex_step > 0.0 && simplex_step < 1.0) {
        return Err(ScanError::InvalidGrid(format!(
            "simplex step {simplex_step} must lie in (0,1)"
        )));
    }
    let d = k - 1;
    let margin = simplex_step / 2.0;
    let max_step = 10.0 * window.diameter();

    let mut entries = Vec::new();
    let mut prev_solutions: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; d];
    'nodes: loop {
        let alpha: Vec<f64> = idx
            .iter()
            .map(|&j| (j as f64 + 0.5) * simplex_step)
            .collect();
        let sum: f64 = alpha.iter().sum();
        if sum <= 1.0 - margin {
            let mut converged: Vec<(Vec<f64>, usize)> = Vec::new();
            let mut failed: Vec<(Vec<f64>, usize, bool)> = Vec::new();
            for seed in prev_solutions.iter().chain(base_seeds.iter()) {
                match newton(p, seed, &alpha, max_step, tol)? {
                    Attempt::Converged { x, iters } => converged.push((x, iters)),
                    Attempt::Stalled { x, iters, degenerate } => {
                        failed.push((x, iters, degenerate))
                    }
                }
            }
            converged.sort_by(|a, b| lex_cmp(&a.0, &b.0));
            dedup_by_radius(&mut converged, tol.dedup_radius, |e| &e.0);
            failed.sort_by(|a, b| lex_cmp(&a.0, &b.0));
            dedup_by_radius(&mut failed, tol.dedup_radius, |e| &e.0);
            prev_solutions = converged.iter().map(|(x, _)| x.clone()).collect();
            for (x, iters) in converged {
                entries.push(TraceEntry {
                    alpha: alpha.clone(),
                    x,
                    converged: true,
                    iters,
                    degenerate: false,
                });
            }
            for (x, iters, degenerate) in failed {
                entries.push(TraceEntry {
                    alpha: alpha.clone(),
                    x,
                    converged: false,
                    iters,
                    degenerate,
                });
            }
        }
        // Advance the lattice index (last coordinate fastest); a coordinate
        // beyond the simplex resets and carries.
        let mut pos = d;
        loop {
            if pos == 0 {
                break 'nodes;
            }
            pos -= 1;
            idx[pos] += 1;
            if (idx[pos] as f64 + 0.5) * simplex_step < 1.0 {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(TraceResult { entries, simplex_step })
}

fn newton(
    p: &Problem,
    seed: &[f64],
    alpha_reduced: &[f64],
    max_step: f64,
    tol: &Tolerances,
) -> Result<Attempt, ScanError> {
    let mut x = seed.to_vec();
    for it in 0..=tol.newton_max_iter {
        let resid = kkt::residual_ftilde(p, &x, alpha_reduced).map_err(KktError::from)?;
        if linalg::norm2(&resid) <= tol.newton_tol {
            return Ok(Attempt::Converged { x, iters: it });
        }
        if it == tol.newton_max_iter {
            break;
        }
        let jac = kkt::d_x_ftilde(p, &x, alpha_reduced).map_err(KktError::from)?;
        let neg: Vec<f64> = resid.iter().map(|r| -r).collect();
        let step = match linalg::solve(&jac, &neg, tol.rank_rtol) {
            Ok(s) => s,
            Err(_) => return Ok(Attempt::Stalled { x, iters: it, degenerate: true }),
        };
        if linalg::norm2(&step) > max_step {
            return Ok(Attempt::Stalled { x, iters: it, degenerate: false });
        }
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += si;
        }
    }
    Ok(Attempt::Stalled { x, iters: tol.newton_max_iter, degenerate: false })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn dedup_by_radius<T>(items: &mut Vec<T>, radius: f64, coords: impl Fn(&T) -> &Vec<f64>) {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    items.retain(|item| {
        let x = coords(item);
        let dup = kept
            .iter()
            .any(|y| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= radius));
        if !dup {
            kept.push(x.clone());
        }
        !dup
    });
}

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

/// Union-find over grid adjacency: nodes are neighbors iff their Chebyshev
/// distance is at most `2 h` (next-nearest lattice neighbors, with roundoff
/// slack). Components are returned sorted by smallest member index, members
/// ascending.
///
/// The radius matches the `2 h` set-fidelity scale used everywhere else for
/// grid-vs-analytic comparisons. A tighter `1.5 h` (diagonal-only) radius
/// permanently severs zero-width pinch points of the critical set: where a
/// region narrows to a single lattice point its nearest flagged neighbors sit
/// at Chebyshev distance exactly `2 h` at every resolution, splitting one
/// connected region into artifacts.
pub fn connected_components(result: &ScanResult) -> Vec<Vec<usize>> {
    let pts: Vec<&[f64]> = result.points.iter().map(|p| p.x.as_slice()).collect();
    if pts.is_empty() {
        return Vec::new();
    }
    let h = result.grid.step();
    let n = result.grid.dim();
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let origin = result.grid.ranges();
    for (i, x) in pts.iter().enumerate() {
        let key: Vec<i64> = (0..n)
            .map(|d| ((x[d] - origin[d].0) / h).round() as i64)
            .collect();
        cells.entry(key).or_default().push(i);
    }
    let mut dsu = Dsu::new(pts.len());
    let mut offsets = vec![vec![0i64; n]];
    for d in 0..n {
        let mut next = Vec::new();
        for o in offsets {
            for delta in [-2i64, -1, 0, 1, 2] {
                let mut o2 = o.clone();
                o2[d] = delta;
                next.push(o2);
            }
        }
        offsets = next;
    }
    let limit = (2.0 + 1e-6) * h;
    for (key, members) in &cells {
        for off in &offsets {
            let nkey: Vec<i64> = key.iter().zip(off).map(|(a, b)| a + b).collect();
            if let Some(others) = cells.get(&nkey) {
                for &i in members {
                    for &j in others {
                        if i < j {
                            let cheb = pts[i]
                                .iter()
                                .zip(pts[j])
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0_f64, f64::max);
                            if cheb <= limit {
                                dsu.union(i, j);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..pts.len() {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    for c in comps.iter_mut() {
        c.sort_unstable();
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Spatial index over a point cloud for Chebyshev-ball membership queries.
pub struct PointIndex {
    cell: f64,
    map: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<Vec<f64>>,
}

impl PointIndex {
    pub fn new(points: &[Vec<f64>], cell: f64) -> Self {
        let mut map: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, x) in points.iter().enumerate() {
            let key: Vec<i64> = x.iter().map(|v| (v / cell).floor() as i64).collect();
            map.entry(key).or_default().push(i);
        }
        PointIndex { cell, map, points: points.to_vec() }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Is any indexed point within Chebyshev distance `r` of `x`?
    pub fn any_within(&self, x: &[f64], r: f64) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let reach = (r / self.cell).ceil() as i64 + 1;
        let base: Vec<i64> = x.iter().map(|v| (v / self.cell).floor() as i64).collect();
        let n = x.len();
        let mut offset = vec![-reach; n];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(a, b)| a + b).collect();
            if let Some(members) = self.map.get(&key) {
                for &i in members {
                    let cheb = self.points[i]
                        .iter()
                        .zip(x)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0_f64, f64::max);
                    if cheb <= r {
                        return true;
                    }
                }
            }
            let mut d = n;
            loop {
                if d == 0 {
                    return false;
                }
                d -= 1;
                offset[d] += 1;
                if offset[d] <= reach {
                    break;
                }
                offset[d] = -reach;
            }
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

    const DEGENERATE: &str = "\
vars: x1 x2
objective: -2*x1*x2 - 2*x1^2 - 2*x2 + x2^2
objective: x1*x2 + x1^2 + x2
";

    const CROSS: &str = "\
vars: x1 x2
objective: x1^2 + (x2 - 1)^2
objective: x1^2 + (x2 + 1)^2
objective: x2^2
";

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn in_triangle(x: &[f64]) -> bool {
        // Corners (-1,-1), (1,-1), (0,1): x2 >= -1, x2 <= 1 - 2 x1, x2 <= 1 + 2 x1.
        let slack = 1e-9;
        x[1] >= -1.0 - slack && x[1] <= 1.0 - 2.0 * x[0] + slack && x[1] <= 1.0 + 2.0 * x[0] + slack
    }

    #[test]
    fn grid_nodes_are_lexicographically_ordered() {
        let g = GridSpec::new(vec![(-1.0, 1.0), (0.0, 0.5)], 0.5).unwrap();
        assert_eq!(g.counts(), vec![5, 2]);
        let nodes: Vec<Vec<f64>> = (0..g.total_nodes()).map(|i| g.node(i)).collect();
        for w in nodes.windows(2) {
            assert_eq!(lex_cmp(&w[0], &w[1]), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn grid_cap_is_enforced() {
        let p = parse_problem(TRIANGLE).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.05)
            .unwrap()
            .with_cap(10);
        match grid_scan(&p, &g, &tol()) {
            Err(ScanError::GridCapExceeded { nodes, cap }) => {
                assert_eq!((nodes, cap), (6561, 10));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn triangle_scan_matches_geometry() {
        let p = parse_problem(TRIANGLE).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.25).unwrap();
        let scan = grid_scan(&p, &g, &tol()).unwrap();
        assert!(!scan.points.is_empty());
        for pt in &scan.points {
            assert!(in_triangle(&pt.x), "flagged point {:?} outside triangle", pt.x);
            assert!(pt.omega <= tol().eps_crit);
        }
        // All three corners are lattice points and must be flagged.
        for corner in [[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]] {
            assert!(
                scan.points
                    .iter()
                    .any(|pt| pt.x.iter().zip(&corner).all(|(a, b)| (a - b).abs() < 1e-9)),
                "corner {corner:?} missing"
            );
        }
        // Flagged points arrive sorted by coordinates.
        for w in scan.points.windows(2) {
            assert_eq!(lex_cmp(&w[0].x, &w[1].x), std::cmp::Ordering::Less);
        }
        assert_eq!(connected_components(&scan).len(), 1);
    }

    #[test]
    fn scans_are_deterministic() {
        let p = parse_problem(TRIANGLE).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.25).unwrap();
        let a = grid_scan(&p, &g, &tol()).unwrap();
        let b = grid_scan(&p, &g, &tol()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_scan_has_no_components() {
        let p = parse_problem(TRIANGLE).unwrap();
        let g = GridSpec::new(vec![(5.0, 6.0), (5.0, 6.0)], 0.25).unwrap();
        let scan = grid_scan(&p, &g, &tol()).unwrap();
        assert!(scan.points.is_empty());
        assert!(connected_components(&scan).is_empty());
    }

    #[test]
    fn trace_requires_two_objectives() {
        let p = parse_problem("vars: x1\nobjective: x1^2").unwrap();
        let g = GridSpec::new(vec![(-1.0, 1.0)], 0.5).unwrap();
        let err = trace_manifold(&p, &g, 0.25, &[vec![0.0]], &tol()).unwrap_err();
        assert_eq!(err, ScanError::NeedTwoObjectives);
    }

    #[test]
    fn trace_fills_triangle_interior() {
        let p = parse_problem(TRIANGLE).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.25).unwrap();
        let seeds = vec![vec![0.0, 0.0]];
        let trace = trace_manifold(&p, &g, 0.1, &seeds, &tol()).unwrap();
        let conv: Vec<&TraceEntry> = trace.converged().collect();
        assert!(!conv.is_empty());
        for e in &conv {
            assert!(in_triangle(&e.x), "traced point {:?} escapes the triangle", e.x);
            // Quadratics converge in one Newton step from anywhere.
            assert!(e.iters <= 2);
        }
        // Every converged point is the weighted-centroid solution of its
        // multiplier: x = a1*(1,-1) + a2*(0,1) + a3*(-1,-1).
        for e in &conv {
            let a3 = 1.0 - e.alpha[0] - e.alpha[1];
            let want = [e.alpha[0] - a3, -e.alpha[0] + e.alpha[1] - a3];
            for (got, w) in e.x.iter().zip(want) {
                assert!((got - w).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn trace_flags_degenerate_jacobian() {
        // At alpha = 1/3 the weighted Hessian is singular everywhere, so every
        // attempt at that node must carry the degeneracy flag (seeds on the
        // solution line itself still converge - the residual is already zero).
        let p = parse_problem(DEGENERATE).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.25).unwrap();
        let step = 2.0 / 9.0; // half-offset lattice hits alpha = 1.5 * 2/9 = 1/3
        let seeds = vec![vec![0.3, 0.4], vec![-0.5, 0.7]];
        let trace = trace_manifold(&p, &g, step, &seeds, &tol()).unwrap();
        let at_third: Vec<&TraceEntry> = trace
            .entries
            .iter()
            .filter(|e| (e.alpha[0] - 1.0 / 3.0).abs() < 1e-12)
            .collect();
        assert!(!at_third.is_empty());
        assert!(
            at_third.iter().any(|e| e.degenerate),
            "expected degeneracy flags at alpha = 1/3"
        );
    }

    #[test]
    fn trace_on_cross_recovers_only_the_open_segment() {
        let p = parse_problem(CROSS).unwrap();
        let g = GridSpec::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 0.25).unwrap();
        let seeds: Vec<Vec<f64>> = (-2..=2)
            .flat_map(|a| (-2..=2).map(move |b| vec![a as f64, b as f64]))
            .collect();
        let trace = trace_manifold(&p, &g, 0.05, &seeds, &tol()).unwrap();
        let mut seen_any = false;
        for e in trace.converged() {
            seen_any = true;
            assert!(e.x[0].abs() < 1e-8, "traced point off the segment: {:?}", e.x);
            assert!(e.x[1].abs() < 1.0 + 1e-8);
        }
        assert!(seen_any);
    }

    #[test]
    fn components_bridge_pinch_gaps_but_not_more() {
        // A region pinching to a single lattice node leaves its neighbors at
        // Chebyshev distance exactly 2h; such nodes must stay connected.
        // Anything further apart is a genuine separation.
        let g = GridSpec::new(vec![(-1.0, 1.0), (-1.0, 1.0)], 0.05).unwrap();
        let mk = |coords: &[[f64; 2]]| ScanResult {
            grid: g.clone(),
            points: coords
                .iter()
                .map(|c| crate::kkt::PointDiagnostics {
                    x: c.to_vec(),
                    omega: 0.0,
                    classification: crate::kkt::Classification::Interior,
                    witness: None,
                    tstar: 0.5,
                    jac_rank: 1,
                    multiplier_dim: 0,
                    degenerate: false,
                })
                .collect(),
            problem_hash: String::new(),
            tolerances: Tolerances::default(),
        };
        let pinched = mk(&[[0.0, 0.0], [0.05, 0.1], [0.1, 0.1]]);
        assert_eq!(connected_components(&pinched).len(), 1);
        let split = mk(&[[0.0, 0.0], [0.15, 0.0]]);
        assert_eq!(connected_components(&split).len(), 2);
    }

    #[test]
    fn point_index_chebyshev_queries() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let idx = PointIndex::new(&pts, 0.5);
        assert!(idx.any_within(&[0.2, -0.2], 0.25));
        assert!(!idx.any_within(&[0.5, 0.5], 0.4));
        assert!(idx.any_within(&[0.7, 0.8], 0.31));
        assert!(!idx.any_within(&[0.7, 0.8], 0.29));
    }
}
