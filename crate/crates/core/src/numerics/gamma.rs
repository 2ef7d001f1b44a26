//! Gamma function helpers. Everything goes through `libm` (fdlibm/musl ports),
//! which gives signed log-Gamma directly via `lgamma_r`.

use crate::error::{Error, Result};

const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogGamma {
    pub log_abs: f64,
    pub sign: f64,
}

impl SignedLogGamma {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

pub fn is_pole(x: f64) -> bool {
    x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL
}

fn check(x: f64) -> Result<()> {
    if is_pole(x) || !x.is_finite() {
        Err(Error::Pole(x))
    } else {
        Ok(())
    }
}

pub fn ln_gamma_signed(x: f64) -> Result<SignedLogGamma> {
    check(x)?;
    let (log_abs, s) = libm::lgamma_r(x);
    Ok(SignedLogGamma {
        log_abs,
        sign: if s < 0 { -1.0 } else { 1.0 },
    })
}

pub fn gamma(x: f64) -> Result<f64> {
    check(x)?;
    Ok(libm::tgamma(x))
}

/// Γ(a)/Γ(b). Direct quotient while both values are representable, signed
/// log difference otherwise.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    check(a)?;
    check(b)?;
    if a == b {
        return Ok(1.0);
    }
    if a.abs() < 150.0 && b.abs() < 150.0 {
        let (ga, gb) = (libm::tgamma(a), libm::tgamma(b));
        if ga.is_finite() && gb.is_finite() && ga != 0.0 && gb != 0.0 {
            return Ok(ga / gb);
        }
    }
    let la = ln_gamma_signed(a)?;
    let lb = ln_gamma_signed(b)?;
    Ok(la.sign * lb.sign * (la.log_abs - lb.log_abs).exp())
}

/// Reciprocal Gamma, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ratio_examples() {
        assert!((gamma_ratio(5.0, 3.0).unwrap() - 12.0).abs() < 1e-13);
        // Γ(−1/2) = −2√π, Γ(1/2) = √π
        assert!((gamma_ratio(-0.5, 0.5).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(gamma_ratio(2.7, 2.7).unwrap(), 1.0);
    }

    #[test]
    fn poles_rejected() {
        assert_eq!(gamma_ratio(0.0, 1.0), Err(Error::Pole(0.0)));
        assert!(gamma_ratio(1.0, -3.0).is_err());
        assert!(gamma(-2.0 + 1e-14).is_err());
        assert!(gamma(-2.0 + 1e-6).is_ok());
    }

    #[test]
    fn sign_alternates_on_negative_axis() {
        for m in 0..6 {
            let x = -(m as f64) - 0.5;
            let s = ln_gamma_signed(x).unwrap();
            let expected = if m % 2 == 0 { -1.0 } else { 1.0 };
            assert_eq!(s.sign, expected, "x = {x}");
            let direct = gamma(x).unwrap();
            assert!((s.value() - direct).abs() <= 1e-13 * direct.abs());
        }
    }

    #[test]
    fn reflection_formula() {
        for &x in &[0.13, 0.5, 0.77, 1.3, 2.45] {
            let lhs = gamma(x).unwrap() * gamma(1.0 - x).unwrap();
            let rhs = PI / (PI * x).sin();
            assert!((lhs - rhs).abs() < 1e-13 * rhs.abs());
        }
    }

    #[test]
    fn large_arguments_use_logs() {
        // Γ(200.5)/Γ(199.5) = 199.5
        let r = gamma_ratio(200.5, 199.5).unwrap();
        assert!((r - 199.5).abs() < 1e-10 * 199.5);
    }
}
