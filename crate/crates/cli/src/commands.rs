//! Subcommand definitions and dispatch.

use crate::csvio;
use crate::svg;
use crate::CliError;
use clap::{Args, Parser, Subcommand};
use critset_core::expr::{parse_problem, render_problem, Problem};
use critset_core::hierarchy::{self, SubproblemId};
use critset_core::kkt::{self, Tolerances};
use critset_core::scan::{self, GridSpec, ScanError, ScanResult};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "critset",
    version,
    about = "Pareto critical sets of smooth multiobjective problems",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Grid-scan a window and write the flagged critical points as CSV.
    Scan(ScanArgs),
    /// Diagnose a single point or a CSV of points.
    Classify(ClassifyArgs),
    /// Newton-trace the critical manifold over the multiplier simplex.
    Trace(TraceArgs),
    /// List subproblems, print one, or scan one.
    Subproblems(SubproblemsArgs),
    /// Scan, then cover the zero-edge candidates by subproblem scans.
    Edge(EdgeArgs),
    /// Render scan (+ optional edge cover) output as a deterministic SVG.
    Plot(PlotArgs),
    /// Run the built-in property suites.
    Selftest(SelftestArgs),
}

/// Numeric knobs shared by the computing subcommands.
#[derive(Args, Clone)]
pub struct TolArgs {
    /// Scaled criticality threshold.
    #[arg(long = "eps", default_value_t = 1e-6, value_name = "EPS")]
    pub eps: f64,
    /// Relative tolerance for numerical ranks.
    #[arg(long = "rank-rtol", default_value_t = 1e-8, value_name = "R")]
    pub rank_rtol: f64,
    /// Interior classification threshold on the multiplier LP optimum.
    #[arg(long = "tau-int", default_value_t = 1e-6, value_name = "T1")]
    pub tau_int: f64,
    /// Zero-edge classification threshold.
    #[arg(long = "tau-zero", default_value_t = 1e-9, value_name = "T0")]
    pub tau_zero: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        if !(self.tau_zero > 0.0 && self.tau_zero < self.tau_int) {
            return Err(CliError::Input(format!(
                "need 0 < tau-zero < tau-int, got {} and {}",
                self.tau_zero, self.tau_int
            )));
        }
        if !(self.eps > 0.0) || !(self.rank_rtol > 0.0) {
            return Err(CliError::Input("eps and rank-rtol must be positive".into()));
        }
        Ok(Tolerances {
            eps_crit: self.eps,
            tau_int: self.tau_int,
            tau_zero: self.tau_zero,
            rank_rtol: self.rank_rtol,
            ..Tolerances::default()
        })
    }
}

#[derive(Args)]
pub struct ScanArgs {
    /// Problem file.
    pub problem: PathBuf,
    /// Window per dimension, e.g. `-2:2,-2:2`.
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI[,LO:HI...]")]
    pub range: String,
    /// Grid step.
    #[arg(long, value_name = "H")]
    pub step: f64,
    /// Output CSV path.
    #[arg(long, default_value = "points.csv", value_name = "PATH")]
    pub out: PathBuf,
    /// Worker threads for the scan (default: all cores).
    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct ClassifyArgs {
    pub problem: PathBuf,
    /// A single point, e.g. `0.5,-1`.
    #[arg(long, allow_hyphen_values = true, value_name = "X1,..,XN", conflicts_with = "points")]
    pub point: Option<String>,
    /// CSV whose first n columns are coordinates (optional `x1,..` header).
    #[arg(long, value_name = "PATH")]
    pub points: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct TraceArgs {
    pub problem: PathBuf,
    /// Window per dimension (seed box and divergence guard).
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI[,LO:HI...]")]
    pub range: String,
    /// Step of the grid on the reduced multiplier simplex.
    #[arg(long = "simplex-step", value_name = "S")]
    pub simplex_step: f64,
    #[arg(long, default_value = "trace.csv", value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct SubproblemsArgs {
    pub problem: PathBuf,
    /// 1-based objective indices, e.g. `1,3`. Without it, list all subsets.
    #[arg(long, value_name = "I,J,..")]
    pub subset: Option<String>,
    /// Scan window for the chosen subproblem (with --step).
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI[,LO:HI...]")]
    pub range: Option<String>,
    #[arg(long, value_name = "H")]
    pub step: Option<f64>,
    #[arg(long, default_value = "subproblem.csv", value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct EdgeArgs {
    pub problem: PathBuf,
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI[,LO:HI...]")]
    pub range: String,
    #[arg(long, value_name = "H")]
    pub step: f64,
    /// Output prefix: writes `<PREFIX>.csv` and `<PREFIX>.json`.
    #[arg(long, default_value = "edge", value_name = "PREFIX")]
    pub out: PathBuf,
    #[arg(long, value_name = "J")]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Scan CSV (from `scan` or `edge`).
    #[arg(long, value_name = "PATH")]
    pub scan: PathBuf,
    /// Edge-cover JSON (from `edge`) for subset coloring.
    #[arg(long, value_name = "PATH")]
    pub cover: Option<PathBuf>,
    /// Plot window; defaults to the cover's window or the data bounds.
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI,LO:HI")]
    pub range: Option<String>,
    /// Node size; defaults to the cover's step or the smallest data gap.
    #[arg(long, value_name = "H")]
    pub step: Option<f64>,
    #[arg(long, default_value = "plot.svg", value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SelftestArgs {
    /// Seed for the randomized property suites.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Subproblems(a) => cmd_subproblems(a),
        Command::Edge(a) => cmd_edge(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Selftest(a) => {
            if crate::selftest::run(a.seed) {
                Ok(())
            } else {
                Err(CliError::Numeric("selftest failed".into()))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn load_problem(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut p = parse_problem(&text)
        .map_err(|e| CliError::Input(format!("{}:{e}", path.display())))?;
    p.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Ok(p)
}

pub fn parse_range(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| CliError::Input(format!("range `{part}` is not LO:HI")))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad range bound `{lo}`")))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad range bound `{hi}`")))?;
        out.push((lo, hi));
    }
    Ok(out)
}

fn make_grid(ranges: Vec<(f64, f64)>, step: f64) -> Result<GridSpec, CliError> {
    GridSpec::new(ranges, step).map_err(|e| CliError::Input(e.to_string()))
}

fn scan_error(e: ScanError) -> CliError {
    match e {
        ScanError::InvalidGrid(_)
        | ScanError::GridCapExceeded { .. }
        | ScanError::NeedTwoObjectives
        | ScanError::DimensionMismatch { .. } => CliError::Input(e.to_string()),
        ScanError::Kkt(_) => CliError::Numeric(e.to_string()),
    }
}

fn run_with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            if j == 0 {
                return Err(CliError::Input("--jobs must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Input(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_scan(a: ScanArgs) -> Result<(), CliError> {
    let p = load_problem(&a.problem)?;
    let grid = make_grid(parse_range(&a.range)?, a.step)?;
    let tol = a.tol.tolerances()?;
    let result =
        run_with_jobs(a.jobs, || scan::grid_scan(&p, &grid, &tol))?.map_err(scan_error)?;
    write_file(&a.out, &csvio::scan_csv(p.dim(), &result.points))?;
    eprintln!(
        "scanned {} nodes, flagged {} critical points -> {}",
        grid.total_nodes(),
        result.points.len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<(), CliError> {
    let p = load_problem(&a.problem)?;
    let tol = a.tol.tolerances()?;
    let points: Vec<Vec<f64>> = match (&a.point, &a.points) {
        (Some(spec), None) => vec![csvio::parse_point_rows(spec, p.dim())?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Input("empty --point".into()))?],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            csvio::parse_point_rows(&text, p.dim())?
        }
        _ => {
            return Err(CliError::Input(
                "classify needs exactly one of --point or --points".into(),
            ))
        }
    };
    let mut diags = Vec::with_capacity(points.len());
    for x in &points {
        diags.push(kkt::diagnose(&p, x, &tol).map_err(|e| CliError::Numeric(e.to_string()))?);
    }
    let csv = csvio::scan_csv(p.dim(), &diags);
    match &a.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_trace(a: TraceArgs) -> Result<(), CliError> {
    let p = load_problem(&a.problem)?;
    // The window only shapes the seed lattice and the divergence guard; its
    // grid step is immaterial here.
    let window = make_grid(parse_range(&a.range)?, 1.0)?;
    let tol = a.tol.tolerances()?;
    let seeds = coarse_seeds(window.ranges(), 5);
    let trace = scan::trace_manifold(&p, &window, a.simplex_step, &seeds, &tol)
        .map_err(scan_error)?;
    write_file(
        &a.out,
        &csvio::trace_csv(p.num_objectives(), p.dim(), &trace.entries),
    )?;
    eprintln!(
        "traced {} entries ({} converged) -> {}",
        trace.entries.len(),
        trace.converged().count(),
        a.out.display()
    );
    Ok(())
}

/// Evenly spaced seed lattice over the window, `per_dim` points per axis.
pub fn coarse_seeds(ranges: &[(f64, f64)], per_dim: usize) -> Vec<Vec<f64>> {
    let n = ranges.len();
    let mut seeds = vec![Vec::new()];
    for d in 0..n {
        let (lo, hi) = ranges[d];
        let mut next = Vec::new();
        for seed in &seeds {
            for i in 0..per_dim {
                let t = i as f64 / (per_dim - 1) as f64;
                let mut s = seed.clone();
                s.push(lo + t * (hi - lo));
                next.push(s);
            }
        }
        seeds = next;
    }
    seeds
}

fn cmd_subproblems(a: SubproblemsArgs) -> Result<(), CliError> {
    let p = load_problem(&a.problem)?;
    let k = p.num_objectives();
    let Some(subset) = &a.subset else {
        for size in 1..=k {
            for id in SubproblemId::all_of_size(k, size) {
                println!("size {size}: {id}");
            }
        }
        return Ok(());
    };
    let indices: Result<Vec<usize>, CliError> = subset
        .split(',')
        .map(|t| {
            let i: usize = t
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad objective index `{t}`")))?;
            if i == 0 || i > k {
                return Err(CliError::Input(format!(
                    "objective index {i} out of range 1..={k}"
                )));
            }
            Ok(i - 1)
        })
        .collect();
    let id = SubproblemId::new(indices?).map_err(|e| CliError::Input(e.to_string()))?;
    let sub = hierarchy::subproblem(&p, &id).map_err(|e| CliError::Input(e.to_string()))?;
    match (&a.range, a.step) {
        (Some(range), Some(step)) => {
            let grid = make_grid(parse_range(range)?, step)?;
            let tol = a.tol.tolerances()?;
            let result = run_with_jobs(a.jobs, || scan::grid_scan(&sub, &grid, &tol))?
                .map_err(scan_error)?;
            write_file(&a.out, &csvio::scan_csv(sub.dim(), &result.points))?;
            eprintln!(
                "subproblem {id}: flagged {} points -> {}",
                result.points.len(),
                a.out.display()
            );
        }
        (None, None) => print!("{}", render_problem(&sub)),
        _ => {
            return Err(CliError::Input(
                "subproblem scans need both --range and --step".into(),
            ))
        }
    }
    Ok(())
}

// -------------------------- edge cover JSON --------------------------------

#[derive(Serialize, Deserialize)]
pub struct CoverJson {
    /// Max Jacobian rank over the flagged points.
    pub m: usize,
    pub window: Vec<Vec<f64>>,
    pub step: f64,
    /// 1-based objective index sets, in lexicographic rank order.
    pub subsets: Vec<Vec<usize>>,
    pub edge_points: Vec<Vec<f64>>,
    pub coverage: Vec<CoverageJson>,
    pub uncovered: Vec<Vec<f64>>,
    /// Flagged nodes of each subset's scan, parallel to `subsets`.
    pub subset_points: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
pub struct CoverageJson {
    pub point: Vec<f64>,
    /// Ranks into `subsets` whose critical set covers this point.
    pub subsets: Vec<usize>,
    /// 1-based objectives whose own gradient vanishes here.
    pub singletons: Vec<usize>,
}

fn cmd_edge(a: EdgeArgs) -> Result<(), CliError> {
    let p = load_problem(&a.problem)?;
    let grid = make_grid(parse_range(&a.range)?, a.step)?;
    let tol = a.tol.tolerances()?;
    let (scan_result, report) = run_with_jobs(a.jobs, || -> Result<_, CliError> {
        let scan_result = scan::grid_scan(&p, &grid, &tol).map_err(scan_error)?;
        if scan_result.points.is_empty() {
            return Ok((scan_result, None));
        }
        let report = hierarchy::edge_cover(&p, &scan_result, &grid, &tol)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok((scan_result, Some(report)))
    })??;

    let csv_path = a.out.with_extension("csv");
    let json_path = a.out.with_extension("json");
    write_file(&csv_path, &csvio::scan_csv(p.dim(), &scan_result.points))?;

    let window: Vec<Vec<f64>> = grid.ranges().iter().map(|&(lo, hi)| vec![lo, hi]).collect();
    let json = match report {
        None => CoverJson {
            m: 0,
            window,
            step: grid.step(),
            subsets: Vec::new(),
            edge_points: Vec::new(),
            coverage: Vec::new(),
            uncovered: Vec::new(),
            subset_points: Vec::new(),
        },
        Some(r) => CoverJson {
            m: r.m,
            window,
            step: grid.step(),
            subsets: r
                .subsets
                .iter()
                .map(|s| s.indices().iter().map(|i| i + 1).collect())
                .collect(),
            edge_points: r
                .edge_points
                .iter()
                .map(|&i| scan_result.points[i].x.clone())
                .collect(),
            coverage: r
                .coverage
                .iter()
                .map(|c| CoverageJson {
                    point: scan_result.points[c.point].x.clone(),
                    subsets: c.subsets.clone(),
                    singletons: c.singletons.iter().map(|i| i + 1).collect(),
                })
                .collect(),
            uncovered: r
                .uncovered
                .iter()
                .map(|&i| scan_result.points[i].x.clone())
                .collect(),
            subset_points: r.subset_points,
        },
    };
    let body = serde_json::to_string_pretty(&json)
        .map_err(|e| CliError::Numeric(format!("JSON encoding failed: {e}")))?;
    write_file(&json_path, &format!("{body}\n"))?;
    eprintln!(
        "edge cover: m={}, {} subsets, {} edge candidates, {} uncovered -> {}, {}",
        json.m,
        json.subsets.len(),
        json.edge_points.len(),
        json.uncovered.len(),
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.scan)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.scan.display())))?;
    let points = csvio::parse_scan_csv(&text)?;
    if points.iter().any(|p| p.x.len() != 2) {
        return Err(CliError::Input("plot supports 2-dimensional scans only".into()));
    }
    let cover_json: Option<CoverJson> = match &a.cover {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Some(
                serde_json::from_str(&body)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };

    let window = match &a.range {
        Some(r) => {
            let ranges = parse_range(r)?;
            if ranges.len() != 2 {
                return Err(CliError::Input("plot --range needs two dimensions".into()));
            }
            [(ranges[0].0, ranges[0].1), (ranges[1].0, ranges[1].1)]
        }
        None => match &cover_json {
            Some(c) if c.window.len() == 2 => {
                [(c.window[0][0], c.window[0][1]), (c.window[1][0], c.window[1][1])]
            }
            _ => data_window(&points),
        },
    };
    let step = a
        .step
        .or(cover_json.as_ref().map(|c| c.step))
        .unwrap_or_else(|| infer_step(&points));

    let coloring = cover_json.as_ref().map(|c| svg::CoverColoring {
        labels: c
            .subsets
            .iter()
            .map(|s| {
                let inner: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect(),
        edge_memberships: c
            .coverage
            .iter()
            .map(|cov| (cov.point.clone(), cov.subsets.clone()))
            .collect(),
    });
    let title = a
        .scan
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scan".into());
    let spec = svg::PlotSpec {
        window,
        step,
        points: &points,
        cover: coloring.as_ref(),
        title: &title,
    };
    write_file(&a.out, &svg::render(&spec))?;
    Ok(())
}

fn data_window(points: &[csvio::CsvPoint]) -> [(f64, f64); 2] {
    if points.is_empty() {
        return [(0.0, 1.0), (0.0, 1.0)];
    }
    let mut w = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for p in points {
        for d in 0..2 {
            w[d].0 = w[d].0.min(p.x[d]);
            w[d].1 = w[d].1.max(p.x[d]);
        }
    }
    for d in &mut w {
        let pad = (d.1 - d.0).max(1.0) * 0.05;
        d.0 -= pad;
        d.1 += pad;
    }
    w
}

/// Smallest positive gap between consecutive sorted coordinates.
fn infer_step(points: &[csvio::CsvPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for d in 0..2 {
        let mut vals: Vec<f64> = points.iter().map(|p| p.x[d]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in vals.windows(2) {
            let gap = w[1] - w[0];
            if gap > 1e-12 {
                best = best.min(gap);
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        1.0
    }
}

// ---------------------------------------------------------------------------

/// Re-export for integration tests: scan a problem text on a window.
pub fn scan_text(
    text: &str,
    ranges: Vec<(f64, f64)>,
    step: f64,
    tol: &Tolerances,
) -> Result<(Problem, ScanResult), CliError> {
    let p = parse_problem(text).map_err(|e| CliError::Input(e.to_string()))?;
    let grid = make_grid(ranges, step)?;
    let result = scan::grid_scan(&p, &grid, tol).map_err(scan_error)?;
    Ok((p, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("-2:2").unwrap(), vec![(-2.0, 2.0)]);
        assert_eq!(
            parse_range("-2:2,-1:3.5").unwrap(),
            vec![(-2.0, 2.0), (-1.0, 3.5)]
        );
        assert!(parse_range("2").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn coarse_seed_lattice_covers_corners() {
        let seeds = coarse_seeds(&[(-1.0, 1.0), (0.0, 2.0)], 3);
        assert_eq!(seeds.len(), 9);
        assert!(seeds.contains(&vec![-1.0, 0.0]));
        assert!(seeds.contains(&vec![1.0, 2.0]));
        assert!(seeds.contains(&vec![0.0, 1.0]));
    }
}
