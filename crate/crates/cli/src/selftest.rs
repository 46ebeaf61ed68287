//! Built-in property suites: derivative checks against finite differences,
//! solver cross-validation against independent oracles, and parser
//! round-trips, all on the embedded fixture problems with a seeded RNG.

use crate::fixtures::FIXTURES;
use critset_core::expr::{parse_problem, render_problem, Problem};
use critset_core::linalg::{self, Matrix};
use critset_core::solvers::{self, oracle, LpStatus};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Run all suites; prints one line per suite and returns overall success.
pub fn run(seed: u64) -> bool {
    let mut ok = true;
    ok &= report("parse/render round-trip", round_trip());
    ok &= report("gradients vs finite differences", gradients_vs_fd(seed));
    ok &= report("hessians vs finite differences", hessians_vs_fd(seed));
    ok &= report("min-norm vs simplex-grid oracle", min_norm_vs_oracle(seed));
    ok &= report("min-norm vs LP feasibility", min_norm_vs_lp(seed));
    ok &= report("LP vs vertex enumeration", lp_vs_enumeration(seed));
    ok
}

fn report(name: &str, result: Result<(), String>) -> bool {
    match result {
        Ok(()) => {
            println!("selftest {name}: ok");
            true
        }
        Err(msg) => {
            println!("selftest {name}: FAIL ({msg})");
            false
        }
    }
}

fn problems() -> Vec<(&'static str, Problem)> {
    FIXTURES
        .iter()
        .map(|(name, text)| (*name, parse_problem(text).expect("fixtures parse")))
        .collect()
}

fn round_trip() -> Result<(), String> {
    for (name, text) in FIXTURES {
        let p1 = parse_problem(text).map_err(|e| format!("{name}: {e}"))?;
        let p2 = parse_problem(&render_problem(&p1)).map_err(|e| format!("{name}: {e}"))?;
        if p1 != p2 {
            return Err(format!("{name}: structure changed across render/parse"));
        }
    }
    Ok(())
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn gradients_vs_fd(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    for (name, p) in problems() {
        for _ in 0..100 {
            let x = random_point(&mut rng, p.dim());
            for i in 0..p.num_objectives() {
                let g = p.gradient(i, &x).map_err(|e| e.to_string())?;
                let mut xp = x.clone();
                let mut worst = 0.0_f64;
                let mut scale = 1.0_f64;
                for j in 0..p.dim() {
                    xp[j] = x[j] + h;
                    let fp = p.eval(i, &xp).map_err(|e| e.to_string())?;
                    xp[j] = x[j] - h;
                    let fm = p.eval(i, &xp).map_err(|e| e.to_string())?;
                    xp[j] = x[j];
                    worst = worst.max((g[j] - (fp - fm) / (2.0 * h)).abs());
                    scale = scale.max(g[j].abs());
                }
                if worst / scale > 1e-6 {
                    return Err(format!(
                        "{name} objective {} at {x:?}: rel err {}",
                        i + 1,
                        worst / scale
                    ));
                }
            }
        }
    }
    Ok(())
}

fn hessians_vs_fd(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let h = 1e-4;
    for (name, p) in problems() {
        let n = p.dim();
        for _ in 0..100 {
            let x = random_point(&mut rng, n);
            for i in 0..p.num_objectives() {
                let hess = p.hessian(i, &x).map_err(|e| e.to_string())?;
                let mut worst = 0.0_f64;
                let mut scale = 1.0_f64;
                let mut xt = x.clone();
                let f = |xt: &mut Vec<f64>, a: usize, da: f64, b: usize, db: f64| {
                    xt[a] += da;
                    xt[b] += db;
                    let v = p.eval(i, xt).expect("fixtures evaluate everywhere");
                    xt[a] -= da;
                    xt[b] -= db;
                    v
                };
                for a in 0..n {
                    for b in 0..n {
                        let fd = (f(&mut xt, a, h, b, h) - f(&mut xt, a, h, b, -h)
                            - f(&mut xt, a, -h, b, h)
                            + f(&mut xt, a, -h, b, -h))
                            / (4.0 * h * h);
                        worst = worst.max((hess[a][b] - fd).abs());
                        scale = scale.max(hess[a][b].abs());
                    }
                }
                if worst / scale > 1e-4 {
                    return Err(format!(
                        "{name} objective {} at {x:?}: rel err {}",
                        i + 1,
                        worst / scale
                    ));
                }
            }
        }
    }
    Ok(())
}

fn random_bundle(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let k = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=3);
    (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn min_norm_vs_oracle(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bf03635);
    for case in 0..200 {
        let g = random_bundle(&mut rng);
        let fast = solvers::min_norm_point(&g).map_err(|e| e.to_string())?.omega;
        let slow = oracle::min_norm_over_simplex_grid(&g, 1e-3);
        if (fast - slow).abs() > 2e-3 {
            return Err(format!("case {case}: omega {fast} vs oracle {slow}"));
        }
    }
    Ok(())
}

fn min_norm_vs_lp(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545f491);
    for case in 0..200 {
        let g = random_bundle(&mut rng);
        let k = g.len();
        let n = g[0].len();
        let omega = solvers::min_norm_point(&g).map_err(|e| e.to_string())?.omega;
        let mut a_eq: Vec<Vec<f64>> =
            (0..n).map(|j| (0..k).map(|i| g[i][j]).collect()).collect();
        a_eq.push(vec![1.0; k]);
        let mut b_eq = vec![0.0; n];
        b_eq.push(1.0);
        let a_ineq: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
            .collect();
        let lp = solvers::lp_solve(&vec![0.0; k], &a_eq, &b_eq, &a_ineq, &vec![0.0; k])
            .map_err(|e| e.to_string())?;
        let feasible = lp.status == LpStatus::Optimal;
        let critical = omega <= 1e-7;
        if feasible != critical {
            return Err(format!("case {case}: omega {omega} but LP {:?}", lp.status));
        }
    }
    Ok(())
}

fn lp_vs_enumeration(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x94d049bb);
    for case in 0..50 {
        let nv = rng.gen_range(2..=6);
        let mut a: Vec<Vec<f64>> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        for j in 0..nv {
            let mut lo = vec![0.0; nv];
            lo[j] = -1.0;
            a.push(lo);
            b.push(0.0);
            let mut hi = vec![0.0; nv];
            hi[j] = 1.0;
            a.push(hi);
            b.push(rng.gen_range(1.0..5.0));
        }
        for _ in 0..3 {
            a.push((0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect());
            b.push(rng.gen_range(0.5..5.0));
        }
        let c: Vec<f64> = (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lp = solvers::lp_solve(&c, &[], &[], &a, &b).map_err(|e| e.to_string())?;
        if lp.status != LpStatus::Optimal {
            return Err(format!("case {case}: expected optimal, got {:?}", lp.status));
        }
        let mut best = f64::NEG_INFINITY;
        let m = a.len();
        let mut subset: Vec<usize> = (0..nv).collect();
        loop {
            let rows: Vec<Vec<f64>> = subset.iter().map(|&i| a[i].clone()).collect();
            let rhs: Vec<f64> = subset.iter().map(|&i| b[i]).collect();
            if let Ok(x) = linalg::solve(&Matrix::from_rows(&rows), &rhs, 1e-10) {
                if a.iter().zip(&b).all(|(r, bi)| linalg::dot(r, &x) <= bi + 1e-7) {
                    best = best.max(linalg::dot(&c, &x));
                }
            }
            let s = subset.len();
            let mut i = s;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if subset[i] < m - (s - i) {
                    subset[i] += 1;
                    for j in i + 1..s {
                        subset[j] = subset[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        if (lp.objective - best).abs() > 1e-6 * best.abs().max(1.0) {
            return Err(format!(
                "case {case}: simplex {} vs enumeration {best}",
                lp.objective
            ));
        }
    }
    Ok(())
}
