//! Dense truncated series  Σ c_m ρ^{offset + m·step},  m = 0..=order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const LADDER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub offset: f64,
    pub step: f64,
    pub coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(offset: f64, step: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { offset, step, coeffs }
    }

    /// Power series in ρ (offset 0, unit step).
    pub fn power(coeffs: Vec<f64>) -> Self {
        Self::new(0.0, 1.0, coeffs)
    }

    pub fn zeros(offset: f64, step: f64, order: usize) -> Self {
        Self::new(offset, step, vec![0.0; order + 1])
    }

    pub fn monomial(offset: f64, step: f64, order: usize, c: f64) -> Self {
        let mut s = Self::zeros(offset, step, order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn exponent(&self, m: usize) -> f64 {
        self.offset + m as f64 * self.step
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, 0.0);
        Self::new(self.offset, self.step, c)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    fn same_ladder(&self, other: &Self) -> Result<()> {
        if (self.offset - other.offset).abs() > LADDER_TOL || (self.step - other.step).abs() > LADDER_TOL {
            return Err(Error::IncompatibleLadder(self.offset, other.offset));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ladder(other)?;
        let order = self.order().min(other.order());
        let c = (0..=order).map(|m| self.coeffs[m] + other.coeffs[m]).collect();
        Ok(Self::new(self.offset, self.step, c))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.offset, self.step, self.coeffs.iter().map(|c| a * c).collect())
    }

    /// Multiply by the monomial a·ρ^p.
    pub fn scale_shift(&self, a: f64, p: f64) -> Self {
        let mut s = self.scale(a);
        s.offset += p;
        s
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if (self.step - other.step).abs() > LADDER_TOL {
            return Err(Error::IncompatibleLadder(self.step, other.step));
        }
        let order = self.order().min(other.order());
        let mut c = vec![0.0; order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Ok(Self::new(self.offset + other.offset, self.step, c))
    }

    /// Σ (α + m·step) c_m ρ^{α + m·step − 1}
    pub fn differentiate(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| self.exponent(m) * c)
            .collect();
        Self::new(self.offset - 1.0, self.step, c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xs = x.powf(self.step);
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * xs + c;
        }
        if self.offset == 0.0 {
            acc
        } else {
            acc * x.powf(self.offset)
        }
    }

    fn require_power(&self) -> Result<()> {
        if self.offset != 0.0 {
            return Err(Error::Composition);
        }
        Ok(())
    }

    /// 1/self for a power series with nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        self.require_power()?;
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::Composition);
        }
        let n = self.order();
        let mut r = vec![0.0; n + 1];
        r[0] = 1.0 / a0;
        for m in 1..=n {
            let s: f64 = (1..=m).map(|k| self.coeffs[k] * r[m - k]).sum();
            r[m] = -s / a0;
        }
        Ok(Self::new(0.0, self.step, r))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.reciprocal()?)
    }

    pub fn exp(&self) -> Result<Self> {
        self.require_power()?;
        let n = self.order();
        let mut f = vec![0.0; n + 1];
        f[0] = self.coeffs[0].exp();
        for m in 1..=n {
            let s: f64 = (1..=m).map(|k| k as f64 * self.coeffs[k] * f[m - k]).sum();
            f[m] = s / m as f64;
        }
        Ok(Self::new(0.0, self.step, f))
    }

    pub fn ln(&self) -> Result<Self> {
        self.require_power()?;
        let g0 = self.coeffs[0];
        if g0 <= 0.0 {
            return Err(Error::Composition);
        }
        let n = self.order();
        let mut f = vec![0.0; n + 1];
        f[0] = g0.ln();
        for m in 1..=n {
            let s: f64 = (1..m).map(|k| k as f64 * f[k] * self.coeffs[m - k]).sum();
            f[m] = (m as f64 * self.coeffs[m] - s) / (m as f64 * g0);
        }
        Ok(Self::new(0.0, self.step, f))
    }

    pub fn powf(&self, a: f64) -> Result<Self> {
        self.ln()?.scale(a).exp()
    }

    /// outer ∘ inner, both power series, inner(0) = 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.require_power()?;
        inner.require_power()?;
        if inner.coeffs[0] != 0.0 || (self.step - 1.0).abs() > LADDER_TOL {
            return Err(Error::Composition);
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::zeros(0.0, inner.step, order);
        for a in self.coeffs.iter().take(order + 1).rev() {
            acc = acc.mul(&inner)?;
            acc.coeffs[0] += a;
        }
        Ok(acc)
    }

    /// Compositional inverse of a power series g with g(0) = 0, g'(0) ≠ 0.
    pub fn revert(&self) -> Result<Self> {
        self.require_power()?;
        if self.coeffs[0] != 0.0 || self.order() < 1 || self.coeffs[1] == 0.0 {
            return Err(Error::Composition);
        }
        let n = self.order();
        let g1 = self.coeffs[1];
        let mut tail = self.clone();
        tail.coeffs[0] = 0.0;
        tail.coeffs[1] = 0.0;
        let mut x = Self::zeros(0.0, self.step, n);
        x.coeffs[1] = 1.0;
        // h = (x − Σ_{m≥2} g_m h^m)/g_1; each pass fixes one more coefficient
        let mut h = x.scale(1.0 / g1);
        for _ in 0..n {
            h = x.sub(&tail.compose(&h)?)?.scale(1.0 / g1);
        }
        Ok(h)
    }
}
