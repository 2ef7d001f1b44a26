//! Beckner's sharp fractional Sobolev inequality on S^n for zonal functions,
//! and the assembled right-hand side of the ball trace inequality.

use crate::constants::{sphere_area, GammaParams};
use crate::error::{Error, Result};
use crate::geometry::ModelGeometry;
use crate::numerics::gamma::{gamma_ratio, ln_gamma_signed};
use crate::numerics::quadrature::{adaptive, GaussRule};
use crate::solver::gjms_multiplier;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest degree `extremal_zonal` will expand to.
pub const MAX_DEGREE: usize = 200;
/// Nodes beyond the top degree; the projected functions are analytic on [−1, 1].
const PROJECTION_EXTRA: usize = 60;
const TAIL_TOL: f64 = 1e-10;

/// Zonal function on S^n, Σ c_ℓ Y_ℓ(cos θ) with Y_ℓ the Gegenbauer polynomial
/// C_ℓ^{(n−1)/2} scaled to unit L²(S^n) norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalFunction {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

fn lambda(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// 1/‖C_ℓ^λ(cos θ)‖_{L²(S^n)} for ℓ = 0..=l_max.
fn basis_scales(n: usize, l_max: usize) -> Vec<f64> {
    let lam = lambda(n);
    let area = sphere_area(n - 1);
    let lg = |x: f64| ln_gamma_signed(x).expect("positive argument").log_abs;
    (0..=l_max)
        .map(|l| {
            let lf = l as f64;
            // ∫_{-1}^{1} (C_ℓ^λ)² (1−x²)^{λ−1/2} dx
            let log_h = PI.ln() + (1.0 - 2.0 * lam) * 2f64.ln() + lg(lf + 2.0 * lam)
                - lg(lf + 1.0)
                - (lf + lam).ln()
                - 2.0 * lg(lam);
            (area * log_h.exp()).sqrt().recip()
        })
        .collect()
}

/// Y_0(x), …, Y_{l_max}(x).
fn basis_values(n: usize, scales: &[f64], x: f64) -> Vec<f64> {
    let lam = lambda(n);
    let mut c = Vec::with_capacity(scales.len());
    c.push(1.0);
    if scales.len() > 1 {
        c.push(2.0 * lam * x);
    }
    for l in 1..scales.len().saturating_sub(1) {
        let lf = l as f64;
        c.push((2.0 * (lf + lam) * x * c[l] - (lf + 2.0 * lam - 1.0) * c[l - 1]) / (lf + 1.0));
    }
    c.iter().zip(scales).map(|(a, s)| a * s).collect()
}

impl ZonalFunction {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("zonal functions need n ≥ 2, got {n}")));
        }
        Ok(Self { n, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Seeded random polynomial of degree `degree`, coefficients in [−1, 1].
    pub fn random(n: usize, degree: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::new(n, (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    pub fn eval(&self, cos_theta: f64) -> f64 {
        let scales = basis_scales(self.n, self.degree());
        basis_values(self.n, &scales, cos_theta).iter().zip(&self.coeffs).map(|(y, c)| y * c).sum()
    }

    /// c_ℓ = ∫ f Y_ℓ dσ by Gauss–Jacobi quadrature in x = cos θ.
    pub fn project(n: usize, f: &dyn Fn(f64) -> f64, l_max: usize) -> Result<Self> {
        let a = lambda(n) - 0.5;
        let rule = GaussRule::jacobi(l_max + PROJECTION_EXTRA, a, a)?;
        let scales = basis_scales(n, l_max);
        let area = sphere_area(n - 1);
        let mut coeffs = vec![0.0; l_max + 1];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let fx = f(*x);
            for (c, y) in coeffs.iter_mut().zip(basis_values(n, &scales, *x)) {
                *c += area * w * fx * y;
            }
        }
        Self::new(n, coeffs)
    }

    /// ∫ f P_γ f dσ on the round sphere.
    pub fn energy(&self, gamma: f64) -> Result<f64> {
        let mut e = 0.0;
        for (l, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                e += gjms_multiplier(&ModelGeometry::ball(self.n, l)?, gamma)? * c * c;
            }
        }
        Ok(e)
    }

    /// ∫ |f|^p dσ, cells split at the sign changes of f.
    pub fn lp_integral(&self, p: f64) -> Result<f64> {
        let scales = basis_scales(self.n, self.degree());
        let f = |t: f64| -> f64 {
            basis_values(self.n, &scales, t.cos()).iter().zip(&self.coeffs).map(|(y, c)| y * c).sum()
        };
        const SAMPLES: usize = 400;
        let mut breaks = vec![0.0];
        let mut prev = (0.0, f(0.0));
        for i in 1..=SAMPLES {
            let t = PI * i as f64 / SAMPLES as f64;
            let ft = f(t);
            if prev.1 * ft < 0.0 {
                let (mut lo, mut hi) = (prev.0, t);
                let flo = prev.1;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) * flo > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                breaks.push(0.5 * (lo + hi));
            }
            prev = (t, ft);
        }
        breaks.push(PI);
        let sin_pow = self.n as f64 - 1.0;
        let g = |t: f64| f(t).abs().powf(p) * t.sin().powf(sin_pow);
        let scale = self.coeffs.iter().map(|c| c * c).sum::<f64>().powf(p / 2.0).max(f64::MIN_POSITIVE);
        let total: f64 = breaks.windows(2).map(|w| adaptive(&g, w[0], w[1], 1e-14 * scale)).sum();
        if total == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(sphere_area(self.n - 1) * total)
    }
}

/// Exponent p = 2n/(n − 2γ) of Beckner's inequality and its outer power 2/p.
pub fn beckner_exponents(n: usize, gamma: f64) -> (f64, f64) {
    let nf = n as f64;
    (2.0 * nf / (nf - 2.0 * gamma), (nf - 2.0 * gamma) / nf)
}

/// Γ((n+2γ)/2)/Γ((n−2γ)/2)·ω_n^{2γ/n}·‖f‖_p², the sharp lower bound.
pub fn beckner_lhs(f: &ZonalFunction, gamma: f64) -> Result<f64> {
    let nf = f.n as f64;
    if !(gamma > 0.0 && gamma < nf / 2.0) {
        return Err(Error::ShiftedOrderOutOfRange(gamma));
    }
    let (p, outer) = beckner_exponents(f.n, gamma);
    let constant = gamma_ratio((nf + 2.0 * gamma) / 2.0, (nf - 2.0 * gamma) / 2.0)? * sphere_area(f.n).powf(2.0 * gamma / nf);
    Ok(constant * f.lp_integral(p)?.powf(outer))
}

/// ∫ f P_γ f / (sharp constant · ‖f‖_p²); ≥ 1 with equality on extremals.
pub fn beckner_ratio(f: &ZonalFunction, gamma: f64) -> Result<f64> {
    if f.coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(f.energy(gamma)? / beckner_lhs(f, gamma)?)
}

/// (1 − t cos θ)^{(2γ−n)/2}, the extremal with interior parameter t.
pub fn extremal_zonal(n: usize, gamma: f64, t_param: f64) -> Result<ZonalFunction> {
    if !(0.0..1.0).contains(&t_param) {
        return Err(Error::InvalidParams(format!("t_param = {t_param} outside [0, 1)")));
    }
    let e = (2.0 * gamma - n as f64) / 2.0;
    let f = |x: f64| (1.0 - t_param * x).powf(e);
    let full = ZonalFunction::project(n, &f, MAX_DEGREE)?;
    let norm = full.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    // smallest L whose discarded tail is below tolerance
    let mut tail = 0.0;
    let mut keep = 0;
    for l in (0..=MAX_DEGREE).rev() {
        tail += full.coeffs[l] * full.coeffs[l];
        if tail.sqrt() > TAIL_TOL * norm {
            keep = l;
            break;
        }
    }
    if keep + 5 > MAX_DEGREE {
        return Err(Error::TruncationInsufficient { degree: MAX_DEGREE, tail: tail.sqrt() / norm });
    }
    let mut coeffs = full.coeffs[..=keep].to_vec();
    // exact zeros for the constant case
    if t_param == 0.0 {
        coeffs.truncate(1);
    }
    ZonalFunction::new(n, coeffs)
}

/// Σ_j ς_j·(Beckner lower bound of B_{2j}-datum j at order |γ − 2j|).
/// `data[j]` is the datum read by the j-th paired operator (f's then φ's
/// in summand order); `None` entries are zero.
pub fn ball_trace_rhs(data: &[Option<ZonalFunction>], params: &GammaParams, varsigma: &[f64]) -> Result<f64> {
    if data.len() != params.floor_g + 1 || varsigma.len() != data.len() {
        return Err(Error::InvalidParams(format!("expected {} data and constants", params.floor_g + 1)));
    }
    let mut total = 0.0;
    for (j, d) in data.iter().enumerate() {
        let Some(f) = d else { continue };
        let order = params.mu(j).abs();
        if !(order > 0.0 && order < params.nf() / 2.0) {
            return Err(Error::ShiftedOrderOutOfRange(order));
        }
        total += varsigma[j] * beckner_lhs(f, order)?;
    }
    Ok(total)
}

/// Σ_j ς_j ∫ F_j P_{|γ−2j|} F_j, the spectral side the trace RHS bounds from below.
pub fn ball_trace_energy(data: &[Option<ZonalFunction>], params: &GammaParams, varsigma: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (j, d) in data.iter().enumerate() {
        if let Some(f) = d {
            total += varsigma[j] * f.energy(params.mu(j).abs())?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let f = |x: f64| 3.0 * x * x - 1.0;
        let z = ZonalFunction::project(3, &f, 6).unwrap();
        assert!(z.coeffs[1].abs() < 1e-13 && z.coeffs[3..].iter().all(|c| c.abs() < 1e-13));
        for x in [-0.9, 0.1, 0.7] {
            assert!((z.eval(x) - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_is_extremal() {
        let z = ZonalFunction::new(4, vec![2.5]).unwrap();
        assert!((beckner_ratio(&z, 0.7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_multiply_to_two() {
        let (p, o) = beckner_exponents(5, 1.3);
        assert!((p * o - 2.0).abs() < 1e-15);
    }
}
