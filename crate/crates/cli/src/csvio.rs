//! CSV in/out. Numbers use Rust's shortest round-trip decimal formatting,
//! which is locale-independent; booleans are `true`/`false`.

use crate::CliError;
use critset_core::kkt::{Classification, PointDiagnostics};
use critset_core::scan::TraceEntry;

/// Header + rows for scan/classify output:
/// `x1,...,xn,omega,class,tstar,jac_rank,mult_dim,degenerate`.
pub fn scan_csv(n: usize, points: &[PointDiagnostics]) -> String {
    let mut out = String::new();
    for j in 1..=n {
        out.push_str(&format!("x{j},"));
    }
    out.push_str("omega,class,tstar,jac_rank,mult_dim,degenerate\n");
    for pt in points {
        for v in &pt.x {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            pt.omega, pt.classification, pt.tstar, pt.jac_rank, pt.multiplier_dim, pt.degenerate
        ));
    }
    out
}

/// `alpha_1..alpha_{k-1},x1..xn,converged,iters,degenerate`.
pub fn trace_csv(k: usize, n: usize, entries: &[TraceEntry]) -> String {
    let mut out = String::new();
    for j in 1..k {
        out.push_str(&format!("alpha_{j},"));
    }
    for j in 1..=n {
        out.push_str(&format!("x{j},"));
    }
    out.push_str("converged,iters,degenerate\n");
    for e in entries {
        for a in &e.alpha {
            out.push_str(&format!("{a},"));
        }
        for v in &e.x {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{},{},{}\n", e.converged, e.iters, e.degenerate));
    }
    out
}

/// A row read back from a scan CSV (only what plotting needs).
#[derive(Debug, Clone)]
pub struct CsvPoint {
    pub x: Vec<f64>,
    pub class: Classification,
}

/// Parse a scan CSV: coordinates are the `x*` columns, the class column is
/// named `class`. Extra columns are ignored.
pub fn parse_scan_csv(text: &str) -> Result<Vec<CsvPoint>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Input("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().take_while(|c| c.starts_with('x')).count();
    if n == 0 {
        return Err(CliError::Input("CSV header has no coordinate columns".into()));
    }
    let class_idx = cols.iter().position(|c| *c == "class");
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < n {
            return Err(CliError::Input(format!(
                "CSV row {} has {} fields, expected at least {n}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut x = Vec::with_capacity(n);
        for f in &fields[..n] {
            x.push(f.parse::<f64>().map_err(|_| {
                CliError::Input(format!("CSV row {}: bad number `{f}`", lineno + 2))
            })?);
        }
        let class = match class_idx {
            Some(ci) => Classification::parse(fields.get(ci).copied().unwrap_or(""))
                .ok_or_else(|| {
                    CliError::Input(format!("CSV row {}: unknown class", lineno + 2))
                })?,
            None => Classification::Interior,
        };
        points.push(CsvPoint { x, class });
    }
    Ok(points)
}

/// Parse points for `classify --points`: one `x1,..,xn` row per line, with
/// an optional header row starting with `x1`.
pub fn parse_point_rows(text: &str, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || (lineno == 0 && t.starts_with("x1")) {
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        if fields.len() < n {
            return Err(CliError::Input(format!(
                "point row {} has {} fields, expected {n}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut x = Vec::with_capacity(n);
        for f in &fields[..n] {
            x.push(f.trim().parse::<f64>().map_err(|_| {
                CliError::Input(format!("point row {}: bad number `{f}`", lineno + 1))
            })?);
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_csv_round_trips_through_parser() {
        use critset_core::expr::parse_problem;
        use critset_core::kkt::{diagnose, Tolerances};
        let p = parse_problem(crate::fixtures::by_name("triangle").unwrap()).unwrap();
        let d = diagnose(&p, &[0.0, 0.0], &Tolerances::default()).unwrap();
        let csv = scan_csv(2, &[d]);
        assert!(csv.starts_with("x1,x2,omega,class,tstar,jac_rank,mult_dim,degenerate\n"));
        let pts = parse_scan_csv(&csv).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].class, Classification::Interior);
        assert_eq!(pts[0].x, vec![0.0, 0.0]);
    }

    #[test]
    fn point_rows_accept_optional_header() {
        let rows = parse_point_rows("x1,x2\n0.5,1\n-1,0.25\n", 2).unwrap();
        assert_eq!(rows, vec![vec![0.5, 1.0], vec![-1.0, 0.25]]);
        assert!(parse_point_rows("0.5\n", 2).is_err());
    }
}
