use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// a + ε·b with ε² = 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpsJet {
    pub val: f64,
    pub dval: f64,
}

pub const VANISH_REL: f64 = 1e-9;

impl EpsJet {
    pub const fn new(val: f64, dval: f64) -> Self {
        Self { val, dval }
    }

    pub const fn constant(val: f64) -> Self {
        Self { val, dval: 0.0 }
    }

    pub fn scale(self, a: f64) -> Self {
        Self::new(a * self.val, a * self.dval)
    }
}

impl Add for EpsJet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.val + o.val, self.dval + o.dval)
    }
}

impl Sub for EpsJet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.val - o.val, self.dval - o.dval)
    }
}

impl Neg for EpsJet {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.val, -self.dval)
    }
}

impl Mul for EpsJet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.val * o.val, self.val * o.dval + self.dval * o.val)
    }
}

/// lim_{ε→0} num(ε)/den(ε), judging "≈ 0" against the inputs' own magnitude.
pub fn eps_limit_quotient(num: EpsJet, den: EpsJet) -> Result<f64> {
    let scale = num.val.abs().max(num.dval.abs()).max(den.val.abs()).max(den.dval.abs());
    eps_limit_quotient_scaled(num, den, scale)
}

/// As [`eps_limit_quotient`] with an explicit magnitude for the vanishing test;
/// callers that know the size of the data feeding the jets pass it here.
pub fn eps_limit_quotient_scaled(num: EpsJet, den: EpsJet, scale: f64) -> Result<f64> {
    let thresh = VANISH_REL * scale;
    if den.val.abs() > thresh {
        return Ok(num.val / den.val);
    }
    if num.val.abs() > thresh {
        return Err(Error::Indeterminate(num.val));
    }
    if den.dval == 0.0 {
        return Err(Error::Indeterminate(num.val));
    }
    Ok(num.dval / den.dval)
}
