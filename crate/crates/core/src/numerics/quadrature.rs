//! Gauss–Jacobi rules (Golub–Welsch) and the composite schemes built on them.

use crate::error::{Error, Result};
use crate::numerics::gamma::gamma;
use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::OnceLock;

/// Nodes/weights on [−1, 1] for the weight (1−t)^a (1+t)^b.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if a <= -1.0 {
            return Err(Error::NonIntegrable(a));
        }
        if b <= -1.0 {
            return Err(Error::NonIntegrable(b));
        }
        let ab = a + b;
        let mut j = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            j[(k, k)] = if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
            if k + 1 < n {
                let m = kf + 1.0;
                let s = 2.0 * m + ab;
                let b2 = if k == 0 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                j[(k, k + 1)] = b2.sqrt();
                j[(k + 1, k)] = b2.sqrt();
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(ab + 2.0)?;
        let eig = SymmetricEigen::new(j);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn legendre(n: usize) -> Self {
        Self::jacobi(n, 0.0, 0.0).expect("Legendre weight is integrable")
    }
}

fn legendre20() -> &'static GaussRule {
    static R: OnceLock<GaussRule> = OnceLock::new();
    R.get_or_init(|| GaussRule::legendre(20))
}

const BASE_NODES: usize = 48;

/// ∫_a^b f(x) (x−a)^α (b−x)^β dx with `g` the smooth factor.
fn jacobi_panel(g: &dyn Fn(f64) -> f64, a: f64, b: f64, alpha: f64, beta: f64) -> Result<f64> {
    let rule = GaussRule::jacobi(BASE_NODES, beta, alpha)?;
    let h = 0.5 * (b - a);
    let s: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(t, w)| w * g(a + h * (1.0 + t)))
        .sum();
    Ok(h.powf(1.0 + alpha + beta) * s)
}

/// ∫_a^b f(x) dx for f behaving like (x−a)^α at a and (b−x)^β at b.
/// Returns (value, error estimate); the estimate is the discrepancy between
/// the single Gauss–Jacobi panel and the two half-interval panels.
pub fn quadrature(f: &dyn Fn(f64) -> f64, interval: (f64, f64), exponents: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = interval;
    let (alpha, beta) = exponents;
    for e in [alpha, beta] {
        if e <= -1.0 {
            return Err(Error::NonIntegrable(e));
        }
    }
    let g = |x: f64| f(x) / ((x - a).powf(alpha) * (b - x).powf(beta));
    let whole = jacobi_panel(&g, a, b, alpha, beta)?;
    let m = 0.5 * (a + b);
    let gl = |x: f64| f(x) / (x - a).powf(alpha);
    let gr = |x: f64| f(x) / (b - x).powf(beta);
    let halves = jacobi_panel(&gl, a, m, alpha, 0.0)? + jacobi_panel(&gr, m, b, 0.0, beta)?;
    Ok((halves, (whole - halves).abs()))
}

/// Composite 20-point Gauss–Legendre over consecutive breakpoints, `panels`
/// equal sub-panels per segment.
pub fn gauss_legendre_composite(f: &dyn Fn(f64) -> f64, breaks: &[f64], panels: usize) -> f64 {
    let rule = legendre20();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let half = 0.5 * h;
            let mid = lo + half;
            total += half
                * rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(t, wt)| wt * f(mid + half * t))
                    .sum::<f64>();
        }
    }
    total
}

/// ∫_0^b f for integrands that are sums of powers x^{α + ...} near 0 with
/// leading exponent `alpha` > −1: geometric mesh toward 0 plus a Gauss–Jacobi
/// cap on the innermost cell.
pub fn graded_from_zero(f: &dyn Fn(f64) -> f64, b: f64, alpha: f64, floor: f64) -> Result<f64> {
    if alpha <= -1.0 {
        return Err(Error::NonIntegrable(alpha));
    }
    const RATIO: f64 = 0.2;
    let mut breaks = vec![b];
    let mut x = b;
    while x > floor {
        x *= RATIO;
        breaks.push(x);
    }
    breaks.reverse();
    let eps = breaks[0];
    let cap = {
        let rule = GaussRule::jacobi(12, 0.0, alpha)?;
        let h = 0.5 * eps;
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| {
                let xx = h * (1.0 + t);
                w * f(xx) / xx.powf(alpha)
            })
            .sum();
        h.powf(1.0 + alpha) * s
    };
    Ok(cap + gauss_legendre_composite(f, &breaks, 1))
}

/// Adaptive bisection with 20-point Gauss–Legendre panels.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let l = gauss_legendre_composite(f, &[a, m], 1);
        let r = gauss_legendre_composite(f, &[m, b], 1);
        // the roundoff floor keeps unattainable tolerances from recursing to full depth
        let floor = 64.0 * f64::EPSILON * (l.abs() + r.abs());
        if depth == 0 || (l + r - whole).abs() <= tol.max(floor) {
            return l + r;
        }
        rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
    }
    let whole = gauss_legendre_composite(f, &[a, b], 1);
    rec(f, a, b, whole, tol, 40)
}
