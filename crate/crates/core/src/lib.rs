//! Pareto critical sets of smooth unconstrained multiobjective problems.
//!
//! A point `x` is *Pareto critical* for objectives `f_1, ..., f_k` when some
//! convex combination of the gradients vanishes:
//!
//! ```text
//!   sum_i alpha_i grad f_i(x) = 0,   alpha_i >= 0,   sum_i alpha_i = 1.
//! ```
//!
//! The weights `alpha` are the KKT multipliers of `x`. This crate computes the
//! Pareto critical set `P` of a problem on a window, classifies each critical
//! point by its multipliers (strictly positive multiplier exists: "interior";
//! every multiplier has a zero component: "zero edge"), and relates the edge of
//! `P` to the critical sets of subproblems that keep only a subset of the
//! objectives.
//!
//! Pipeline, bottom to top:
//!
//! * [`expr`] — problem files, expression trees, exact gradients and Hessians
//!   via second-order forward-mode duals;
//! * [`linalg`] — dense column-pivoted QR, numerical rank, nullspaces, solves;
//! * [`solvers`] — exact min-norm point over the simplex (the criticality
//!   measure) and a dense two-phase simplex LP (multiplier classification);
//! * [`kkt`] — the KKT system `F` and its reduced form, point diagnostics,
//!   tangent spaces, per-point subproblem decomposition;
//! * [`scan`] — grid scans (the brute-force oracle), Newton continuation over
//!   the multiplier simplex, connected components;
//! * [`hierarchy`] — subproblem enumeration, containment checks, decomposition
//!   covers and edge covering reports.

pub mod expr;
pub mod hierarchy;
pub mod kkt;
pub mod linalg;
pub mod scan;
pub mod solvers;

pub use expr::{parse_problem, render_problem, Expr, Problem};
pub use kkt::{diagnose, Classification, Multiplier, PointDiagnostics, Tolerances};
pub use scan::{grid_scan, GridSpec, ScanResult};
