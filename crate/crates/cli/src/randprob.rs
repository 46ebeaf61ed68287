//! Seeded random problem generation for property suites.

use critset_core::expr::{Expr, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn c(v: f64) -> Expr {
    Expr::Const(v)
}

fn var(i: usize) -> Expr {
    Expr::Var(i)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::Add(Box::new(a), Box::new(b))
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::Sub(Box::new(a), Box::new(b))
}

/// A random strictly convex quadratic problem: each objective is
/// `(x - c)' A (x - c)` with `A = L L' + 0.3 I` positive definite and a
/// center inside `[-1.2, 1.2]^n`, so critical sets stay bounded and inside
/// the usual scan windows.
pub fn random_quadratic(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Problem {
    let mut objectives = Vec::with_capacity(k);
    for _ in 0..k {
        // A = L L^T + 0.3 I with L lower triangular.
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                l[i][j] = rng.gen_range(-1.0..1.0);
            }
        }
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                for t in 0..n {
                    a[i][j] += l[i][t] * l[j][t];
                }
                if i == j {
                    a[i][j] += 0.3;
                }
            }
        }
        let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.2..1.2)).collect();
        // sum_{i,j} a_ij (x_i - c_i)(x_j - c_j)
        let diff = |i: usize| sub(var(i), c(center[i]));
        let mut expr: Option<Expr> = None;
        for i in 0..n {
            for j in 0..n {
                if a[i][j] == 0.0 {
                    continue;
                }
                let term = mul(c(a[i][j]), mul(diff(i), diff(j)));
                expr = Some(match expr {
                    None => term,
                    Some(e) => add(e, term),
                });
            }
        }
        objectives.push(expr.expect("n >= 1"));
    }
    Problem::new(n, objectives, None).expect("generated problem is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn generated_quadratics_have_psd_hessians() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let p = random_quadratic(&mut rng, 2, 3);
            for i in 0..3 {
                let h = p.hessian(i, &[0.3, -0.4]).unwrap();
                // 2x2 PD check: positive diagonal, positive determinant.
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                assert!(h[0][0] > 0.0 && det > 0.0);
                // Quadratic: Hessian constant.
                let h2 = p.hessian(i, &[-1.0, 1.5]).unwrap();
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((h[a][b] - h2[a][b]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
