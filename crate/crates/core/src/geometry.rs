//! Per-mode radial form of the hyperbolic Laplacian on the two models:
//! Δ₊ = A(ρ)ρ²∂² + B(ρ)ρ∂ + C(ρ) with A, B, C rational in ρ.

use crate::error::{Error, Result};
use crate::numerics::TruncatedSeries;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Halfspace,
    BallGeodesic,
    /// Ball with ρ = (1−|w|²)/2; not even in ρ, experimental.
    BallLiteral,
}

impl GeometryKind {
    pub fn is_geodesic(self) -> bool {
        !matches!(self, GeometryKind::BallLiteral)
    }

    pub fn is_ball(self) -> bool {
        !matches!(self, GeometryKind::Halfspace)
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::Halfspace => "halfspace",
            GeometryKind::BallGeodesic => "ball",
            GeometryKind::BallLiteral => "ball-literal",
        })
    }
}

/// Polynomial quotient num/den, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Coefficients of p(x0 + h) in powers of h.
pub(crate) fn taylor_shift(p: &[f64], x0: f64) -> Vec<f64> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            c[k] += x0 * c[k + 1];
        }
    }
    c
}

impl Rational {
    pub fn poly(num: Vec<f64>) -> Self {
        Self { num, den: vec![1.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.num, x) / horner(&self.den, x)
    }

    /// Expansion in h = x − x0 through h^order.
    pub fn taylor(&self, x0: f64, order: usize) -> Result<TruncatedSeries> {
        let pad = |p: Vec<f64>| {
            let mut p = p;
            p.resize(order + 1, 0.0);
            p.truncate(order + 1);
            TruncatedSeries::power(p)
        };
        let num = pad(taylor_shift(&self.num, x0));
        let den = pad(taylor_shift(&self.den, x0));
        num.div(&den)
    }

    pub fn series(&self, order: usize) -> Result<TruncatedSeries> {
        self.taylor(0.0, order)
    }
}

/// Coefficient series of a radial operator A ρ²∂² + B ρ∂ + C about ρ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub n: usize,
    pub a: TruncatedSeries,
    pub b: TruncatedSeries,
    pub c: TruncatedSeries,
}

const LEADING_TOL: f64 = 1e-12;

impl RadialOperator {
    /// Every asymptotically hyperbolic radial operator has A(0) = 1,
    /// B(0) = 1 − n, C(0) = 0; the exact indicial factorization relies on it.
    pub fn new(n: usize, a: TruncatedSeries, b: TruncatedSeries, c: TruncatedSeries) -> Result<Self> {
        let nf = n as f64;
        if (a.coeffs[0] - 1.0).abs() > LEADING_TOL
            || (b.coeffs[0] - (1.0 - nf)).abs() > LEADING_TOL
            || c.coeffs[0].abs() > LEADING_TOL
        {
            return Err(Error::InvalidParams("operator is not asymptotically hyperbolic at ρ = 0".into()));
        }
        Ok(Self { n, a, b, c })
    }

    pub fn order(&self) -> usize {
        self.a.order().min(self.b.order()).min(self.c.order())
    }

    /// Coefficient of ρ^{α+i} in Δ̃₊ρ^α for i ≥ 1.
    pub fn k(&self, i: usize, alpha: f64) -> f64 {
        self.a.coeffs[i] * alpha * (alpha - 1.0) + self.b.coeffs[i] * alpha + self.c.coeffs[i]
    }

    /// True when no odd power of ρ appears in A, B, C.
    pub fn is_even(&self) -> bool {
        [&self.a, &self.b, &self.c]
            .iter()
            .all(|s| s.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0))
    }

    /// The same operator written in ρ̂ where ρ = φ(ρ̂), φ(0) = 0, φ'(0) > 0.
    /// With q = φ/(ρ̂φ'): Â = Aq², B̂ = Aq² + Aq·ρ̂q' + (B − A)q, Ĉ = C.
    pub fn change_variable(&self, phi: &TruncatedSeries) -> Result<Self> {
        let order = self.order().min(phi.order());
        if phi.coeffs[0] != 0.0 || !(phi.coeffs[1] > 0.0) {
            return Err(Error::Composition);
        }
        let phi = phi.truncate(order + 1);
        let a = self.a.compose(&phi)?.truncate(order);
        let b = self.b.compose(&phi)?.truncate(order);
        let c = self.c.compose(&phi)?.truncate(order);
        // φ/ρ̂ and φ' as power series
        let ratio = TruncatedSeries::power(phi.coeffs[1..].to_vec()).truncate(order);
        let dphi = TruncatedSeries::power(
            (1..phi.coeffs.len()).map(|m| m as f64 * phi.coeffs[m]).collect(),
        )
        .truncate(order);
        let q = ratio.div(&dphi)?;
        let rho_dq = TruncatedSeries::power((0..=order).map(|m| m as f64 * q.coeffs[m]).collect());
        let aq = a.mul(&q)?;
        let a_hat = aq.mul(&q)?;
        let b_hat = a_hat.add(&aq.mul(&rho_dq)?)?.add(&b.sub(&a)?.mul(&q)?)?;
        Self::new(self.n, a_hat, b_hat, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelGeometry {
    pub kind: GeometryKind,
    pub n: usize,
    /// |ξ| on the halfspace, spherical-harmonic degree ℓ on the ball.
    pub mode: f64,
}

impl ModelGeometry {
    pub fn new(kind: GeometryKind, n: usize, mode: f64) -> Result<Self> {
        if !(mode >= 0.0) || !mode.is_finite() {
            return Err(Error::InvalidParams(format!("mode {mode} must be finite and ≥ 0")));
        }
        if kind.is_ball() && mode.fract() != 0.0 {
            return Err(Error::InvalidParams(format!("ball degree {mode} must be an integer")));
        }
        if n < 1 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        Ok(Self { kind, n, mode })
    }

    pub fn halfspace(n: usize, xi: f64) -> Result<Self> {
        Self::new(GeometryKind::Halfspace, n, xi)
    }

    pub fn ball(n: usize, ell: usize) -> Result<Self> {
        Self::new(GeometryKind::BallGeodesic, n, ell as f64)
    }

    pub fn ball_literal(n: usize, ell: usize) -> Result<Self> {
        Self::new(GeometryKind::BallLiteral, n, ell as f64)
    }

    /// ℓ(ℓ + n − 1)
    pub fn big_l(&self) -> f64 {
        self.mode * (self.mode + self.n as f64 - 1.0)
    }

    /// Exact rational A, B, C.
    pub fn coefficients(&self) -> [Rational; 3] {
        let nf = self.n as f64;
        match self.kind {
            GeometryKind::Halfspace => [
                Rational::poly(vec![1.0]),
                Rational::poly(vec![1.0 - nf]),
                Rational::poly(vec![0.0, 0.0, -self.mode * self.mode]),
            ],
            GeometryKind::BallGeodesic => {
                // D = 1 − r²/4;  B = ((1−n)D − (n/2)r²)/D,  C = −L r²/D²
                let d = vec![1.0, 0.0, -0.25];
                let d2 = vec![1.0, 0.0, -0.5, 0.0, 0.0625];
                [
                    Rational::poly(vec![1.0]),
                    Rational { num: vec![1.0 - nf, 0.0, -(1.0 - nf) / 4.0 - nf / 2.0], den: d },
                    Rational { num: vec![0.0, 0.0, -self.big_l()], den: d2 },
                ]
            }
            GeometryKind::BallLiteral => [
                Rational::poly(vec![1.0, -2.0]),
                Rational::poly(vec![1.0 - nf, nf - 3.0]),
                Rational { num: vec![0.0, 0.0, -self.big_l()], den: vec![1.0, -2.0] },
            ],
        }
    }

    pub fn operator_series(&self, order: usize) -> Result<RadialOperator> {
        let [a, b, c] = self.coefficients();
        RadialOperator::new(self.n, a.series(order)?, b.series(order)?, c.series(order)?)
    }

    /// (A, B, C) expanded in h = ρ − ρ0.
    pub fn coefficients_at(&self, rho0: f64, order: usize) -> Result<[TruncatedSeries; 3]> {
        let [a, b, c] = self.coefficients();
        Ok([a.taylor(rho0, order)?, b.taylor(rho0, order)?, c.taylor(rho0, order)?])
    }

    /// Radial density of dvol_{g₊} per unit-normalized boundary mode.
    pub fn measure(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        let base = rho.powf(-nf - 1.0);
        match self.kind {
            GeometryKind::Halfspace => base,
            GeometryKind::BallGeodesic => base * (1.0 - rho * rho / 4.0).powi(self.n as i32),
            GeometryKind::BallLiteral => base * (1.0 - 2.0 * rho).powf((nf - 1.0) / 2.0),
        }
    }

    /// Right end of the radial coordinate range (center of the ball).
    pub fn rho_max(&self) -> f64 {
        match self.kind {
            GeometryKind::Halfspace => f64::INFINITY,
            GeometryKind::BallGeodesic => 2.0,
            GeometryKind::BallLiteral => 0.5,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_shift_cubic() {
        // (1 + h)^3 about x0 = 1 of x^3
        let c = taylor_shift(&[0.0, 0.0, 0.0, 1.0], 1.0);
        assert_eq!(c, vec![1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn ball_geodesic_is_even() {
        let op = ModelGeometry::ball(3, 2).unwrap().operator_series(12).unwrap();
        assert!(op.is_even());
        // B = (1−n) − (n/2) r²(1 + r²/4 + …)
        assert!((op.b.coeffs[2] + 1.5).abs() < 1e-15);
        assert!((op.b.coeffs[4] + 0.375).abs() < 1e-15);
        assert!((op.c.coeffs[2] + 8.0).abs() < 1e-15);
    }

    #[test]
    fn literal_first_order_term() {
        let op = ModelGeometry::ball_literal(4, 0).unwrap().operator_series(6).unwrap();
        assert!(!op.is_even());
        for &alpha in &[0.3, 1.7] {
            assert!((op.k(1, alpha) + alpha * (2.0 * alpha + 1.0 - 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn taylor_at_point_matches_eval() {
        let g = ModelGeometry::ball(5, 3).unwrap();
        let [_, b, c] = g.coefficients();
        let (x0, h) = (0.7, 0.01);
        let s = b.taylor(x0, 20).unwrap();
        assert!((s.eval(h) - b.eval(x0 + h)).abs() < 1e-14);
        let s = c.taylor(x0, 20).unwrap();
        assert!((s.eval(h) - c.eval(x0 + h)).abs() < 1e-12);
    }

    #[test]
    fn identity_change_of_variable() {
        let op = ModelGeometry::ball(3, 1).unwrap().operator_series(10).unwrap();
        let mut x = vec![0.0; 12];
        x[1] = 1.0;
        let same = op.change_variable(&TruncatedSeries::power(x)).unwrap();
        for (p, q) in same.b.coeffs.iter().zip(&op.b.coeffs) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn ball_literal_is_rescaled_flat_ball() {
        // the literal chart agrees with the geodesic one after ρ = r/(1 + r/2)²
        let g = ModelGeometry::ball(3, 2).unwrap();
        let lit = ModelGeometry::ball_literal(3, 2).unwrap();
        let op_lit = lit.operator_series(14).unwrap();
        // r as a series in ρ: invert ρ(r) = r(1 + r/2)^{-2}
        let rho_of_r = TruncatedSeries::power(vec![1.0, 1.0, 0.25]).truncate(13).powf(-1.0).unwrap();
        let mut c = vec![0.0];
        c.extend(rho_of_r.truncate(13).coeffs);
        let rho_of_r = TruncatedSeries::power(c);
        let r_of_rho = rho_of_r.revert().unwrap();
        let back = g.operator_series(14).unwrap().change_variable(&r_of_rho).unwrap();
        for m in 0..10 {
            assert!((back.a.coeffs[m] - op_lit.a.coeffs[m]).abs() < 1e-10, "A_{m}");
            assert!((back.b.coeffs[m] - op_lit.b.coeffs[m]).abs() < 1e-10, "B_{m}");
            assert!((back.c.coeffs[m] - op_lit.c.coeffs[m]).abs() < 1e-10, "C_{m}");
        }
    }
}
