//! Closed-form constants as functions of (n, γ, j): product forms (read off the
//! indicial action of Δ̃ on ladder atoms) alongside their Gamma closed forms.

use crate::error::{Error, Result};
use crate::numerics::gamma::{factorial, gamma, gamma_ratio, rgamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest admissible distance of γ from an integer.
pub const INTEGER_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub n: usize,
    pub gamma: f64,
    pub floor_g: usize,
    pub frac_g: f64,
    pub k: usize,
}

impl GammaParams {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("dimension n = {n} must be at least 3")));
        }
        if !(gamma > 0.0 && gamma < n as f64 / 2.0) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} outside (0, n/2) for n = {n}")));
        }
        let floor_g = gamma.floor();
        let frac_g = gamma - floor_g;
        if frac_g < INTEGER_GAP || frac_g > 1.0 - INTEGER_GAP {
            return Err(Error::InvalidParams(format!("gamma = {gamma} is an integer")));
        }
        let floor_g = floor_g as usize;
        Ok(Self { n, gamma, floor_g, frac_g, k: floor_g + 1 })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// ⌊γ/2⌋
    pub fn half_floor(&self) -> usize {
        (self.gamma / 2.0).floor() as usize
    }

    /// Number of φ-type Dirichlet data, ⌊γ⌋ − ⌊γ/2⌋.
    pub fn n_phi(&self) -> usize {
        self.floor_g - self.half_floor()
    }

    /// μ_J = γ − 2J
    pub fn mu(&self, big_j: usize) -> f64 {
        self.gamma - 2.0 * big_j as f64
    }

    /// (δ² − μ_J²) for the even-ladder atom ρ^{2p}, δ = 2p − γ; the integer
    /// factor is formed exactly so annihilated rungs give an exact zero.
    pub fn even_diag(&self, p: usize, big_j: usize) -> f64 {
        4.0 * (p as f64 - big_j as f64) * (p as f64 + big_j as f64 - self.gamma)
    }

    /// Same on the shifted ladder ρ^{2[γ]+2p}, δ = 2p + [γ] − ⌊γ⌋.
    pub fn shifted_diag(&self, p: usize, big_j: usize) -> f64 {
        let int_part = p as i64 - self.floor_g as i64 + big_j as i64;
        4.0 * int_part as f64 * (p as f64 + self.frac_g - big_j as f64)
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j > self.floor_g {
            return Err(Error::IndexOutOfRange { j, max: self.floor_g });
        }
        Ok(())
    }
}

/// c_μ fixing P_μ = c_μ S(n/2 + μ); normalized by the classical
/// Dirichlet-to-Neumann constant (Caffarelli–Silvestre).
pub fn scattering_normalization(mu: f64) -> Result<f64> {
    Ok(2f64.powf(2.0 * mu) * gamma_ratio(mu, -mu)?)
}

/// The alternative c_μ = 2^μ Γ(μ)/Γ(−μ); differs from the above by 2^{−μ}.
pub fn scattering_normalization_printed(mu: f64) -> Result<f64> {
    Ok(2f64.powf(mu) * gamma_ratio(mu, -mu)?)
}

/// ω_n = |S^n| = 2π^{(n+1)/2}/Γ((n+1)/2)
pub fn sphere_area(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h).expect("positive argument")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConstants {
    pub b_2j: f64,
    pub b_2j_shifted: f64,
    pub pi_j: f64,
    pub c_gamma_j: f64,
    pub d_gamma_j: f64,
}

pub fn ladder_constants(p: &GammaParams, j: usize) -> Result<LadderConstants> {
    p.check_j(j)?;
    Ok(LadderConstants {
        b_2j: b_even(p, j),
        b_2j_shifted: b_shifted(p, j),
        pi_j: pi_product(p, j),
        c_gamma_j: c_gamma_j(p, j)?,
        d_gamma_j: d_gamma_j(p, j)?,
    })
}

/// b_{2j} = Π_{ℓ<j} (μ_j² − μ_ℓ²)(μ_j² − μ_{⌊γ⌋−ℓ}²)
pub fn b_even(p: &GammaParams, j: usize) -> f64 {
    (0..j).map(|l| p.even_diag(j, l) * p.even_diag(j, p.floor_g - l)).product()
}

pub fn b_even_gamma_form(p: &GammaParams, j: usize) -> Result<f64> {
    let (jf, fl, fr, g) = (j as f64, p.floor_g as f64, p.frac_g, p.gamma);
    Ok(16f64.powi(j as i32)
        * factorial(j)
        * gamma_ratio(jf + 1.0 - fr, 1.0 - fr)?
        * gamma_ratio(g + 1.0 - jf, g + 1.0 - 2.0 * jf)?
        * gamma(fl + 1.0 - jf)?
        * rgamma(fl + 1.0 - 2.0 * jf))
}

/// b_{2j+2[γ]} = Π_{ℓ≤j}(δ² − μ_ℓ²) Π_{ℓ<j}(δ² − μ_{⌊γ⌋−ℓ}²), δ the shifted rung j.
pub fn b_shifted(p: &GammaParams, j: usize) -> f64 {
    let a: f64 = (0..=j).map(|l| p.shifted_diag(j, l)).product();
    let b: f64 = (0..j).map(|l| p.shifted_diag(j, p.floor_g - l)).product();
    a * b
}

pub fn b_shifted_gamma_form(p: &GammaParams, j: usize) -> Result<f64> {
    let (jf, fl, fr) = (j as f64, p.floor_g as f64, p.frac_g);
    Ok(-(4f64.powi(2 * j as i32 + 1))
        * factorial(j)
        * gamma_ratio(jf + 1.0 + fr, fr)?
        * gamma(fl + 1.0 - jf)?
        * rgamma(fl - 2.0 * jf)
        * gamma_ratio(fl + 1.0 - jf - fr, fl + 1.0 - 2.0 * jf - fr)?)
}

/// π_j = Π_{J≠j} (μ_J² − μ_j²), the leading action of the complementary
/// factor product on the rung annihilated by (Δ̃ − μ_j²).
pub fn pi_product(p: &GammaParams, j: usize) -> f64 {
    let mj = p.mu(j);
    (0..=p.floor_g)
        .filter(|&i| i != j)
        .map(|i| {
            let mi = p.mu(i);
            (mi - mj) * (mi + mj)
        })
        .product()
}

/// Γ(γ−j+1) Γ(j+1) Γ(j+⌊γ⌋−γ+1) Γ(⌊γ⌋−j+1), the numerator shared by σ, ς, π.
fn shared_numerator(p: &GammaParams, j: usize) -> Result<f64> {
    let (jf, fl, g) = (j as f64, p.floor_g as f64, p.gamma);
    Ok(gamma(g - jf + 1.0)? * factorial(j) * gamma(jf + fl - g + 1.0)? * factorial(p.floor_g - j))
}

pub fn pi_gamma_form(p: &GammaParams, j: usize) -> Result<f64> {
    let mu = p.mu(j);
    Ok(4f64.powi(p.floor_g as i32) * shared_numerator(p, j)? * rgamma(mu + 1.0) * rgamma(1.0 - mu))
}

/// c_{γ,j} = 1/c_{γ−2j} = 2^{4j−2γ} Γ(2j−γ)/Γ(γ−2j)
pub fn c_gamma_j(p: &GammaParams, j: usize) -> Result<f64> {
    Ok(1.0 / scattering_normalization(p.mu(j))?)
}

pub fn c_gamma_j_printed(p: &GammaParams, j: usize) -> Result<f64> {
    let mu = p.mu(j);
    Ok(2f64.powf(-mu) * gamma_ratio(-mu, mu)?)
}

/// Order of the φ-family operator, ⌊γ⌋ − [γ] − 2j.
pub fn phi_order(p: &GammaParams, j: usize) -> f64 {
    p.floor_g as f64 - p.frac_g - 2.0 * j as f64
}

/// d_{γ,j} = 1/c_{⌊γ⌋−[γ]−2j}
pub fn d_gamma_j(p: &GammaParams, j: usize) -> Result<f64> {
    Ok(1.0 / scattering_normalization(phi_order(p, j))?)
}

pub fn d_gamma_j_printed(p: &GammaParams, j: usize) -> Result<f64> {
    let nu = phi_order(p, j);
    Ok(2f64.powf(-nu) * gamma_ratio(-nu, nu)?)
}

/// σ_{j,γ} exactly as displayed with the Dirichlet form.
pub fn sigma_theorem(p: &GammaParams, j: usize) -> Result<f64> {
    p.check_j(j)?;
    let mu = p.mu(j);
    let num = 2.0 * shared_numerator(p, j)?;
    Ok(if j <= p.half_floor() {
        num / (gamma(mu)? * gamma(1.0 - mu)?)
    } else {
        num / (gamma(mu + 1.0)? * gamma(-mu)?)
    })
}

/// 2|γ − 2j| π_j (product form of π_j).
pub fn sigma_from_pi(p: &GammaParams, j: usize) -> Result<f64> {
    p.check_j(j)?;
    Ok(2.0 * p.mu(j).abs() * pi_product(p, j))
}

/// 2^{−n} π_j (2γ − 4j), as written in the proof of the main identity.
pub fn sigma_proof_variant(p: &GammaParams, j: usize) -> Result<f64> {
    p.check_j(j)?;
    Ok(2f64.powi(-(p.n as i32)) * pi_product(p, j) * 2.0 * p.mu(j))
}

/// ς_{j,γ} exactly as displayed with the trace inequality.
pub fn varsigma_theorem(p: &GammaParams, j: usize) -> Result<f64> {
    p.check_j(j)?;
    let a = p.mu(j).abs();
    Ok(2f64.powf(1.0 - a) * shared_numerator(p, j)? / (gamma(a)? * gamma(a + 1.0)?))
}

/// ς_{j,γ} consistent with the scattering normalization: 2^{1−2|μ_j|}·(…).
pub fn varsigma(p: &GammaParams, j: usize) -> Result<f64> {
    Ok(varsigma_theorem(p, j)? * 2f64.powf(-p.mu(j).abs()))
}

/// −c_{γ,j}σ_j for j ≤ ⌊γ/2⌋, −d_{γ,⌊γ⌋−j}σ_j above; `printed` selects the
/// alternative c/d normalization.
pub fn varsigma_from_sigma(p: &GammaParams, j: usize, sigma: f64, printed: bool) -> Result<f64> {
    p.check_j(j)?;
    let c = if j <= p.half_floor() {
        if printed { c_gamma_j_printed(p, j)? } else { c_gamma_j(p, j)? }
    } else if printed {
        d_gamma_j_printed(p, p.floor_g - j)?
    } else {
        d_gamma_j(p, p.floor_g - j)?
    };
    Ok(-c * sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub c_gamma: f64,
    pub c_gamma_printed: f64,
    /// Γ((n+2γ)/2)/Γ((n−2γ)/2)
    pub beckner_gamma_factor: f64,
    /// ω_n^{2γ/n}
    pub beckner_area_factor: f64,
    pub omega_n: f64,
}

impl SpectralConstants {
    pub fn beckner_const(&self) -> f64 {
        self.beckner_gamma_factor * self.beckner_area_factor
    }
}

pub fn spectral_constants(p: &GammaParams) -> Result<SpectralConstants> {
    let (n, g) = (p.nf(), p.gamma);
    let omega_n = sphere_area(p.n);
    Ok(SpectralConstants {
        c_gamma: scattering_normalization(g)?,
        c_gamma_printed: scattering_normalization_printed(g)?,
        beckner_gamma_factor: gamma_ratio((n + 2.0 * g) / 2.0, (n - 2.0 * g) / 2.0)?,
        beckner_area_factor: omega_n.powf(2.0 * g / n),
        omega_n,
    })
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub j: usize,
    pub b_2j: f64,
    pub b_2j_gamma_form: f64,
    pub b_2j_shifted: f64,
    pub b_2j_shifted_gamma_form: f64,
    pub pi_j: f64,
    pub pi_j_gamma_form: f64,
    pub c_gamma_j: f64,
    pub c_gamma_j_printed: f64,
    pub d_gamma_j: f64,
    pub d_gamma_j_printed: f64,
    pub sigma_j: f64,
    pub sigma_j_from_pi: f64,
    pub sigma_j_proof_variant: f64,
    pub varsigma_j: f64,
    pub varsigma_j_printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub params: GammaParams,
    pub rows: Vec<ConstantsRow>,
    pub spectral: SpectralConstants,
}

pub fn constants_table(p: &GammaParams) -> Result<ConstantsTable> {
    let rows = (0..=p.floor_g)
        .map(|j| {
            Ok(ConstantsRow {
                j,
                b_2j: b_even(p, j),
                b_2j_gamma_form: b_even_gamma_form(p, j)?,
                b_2j_shifted: b_shifted(p, j),
                b_2j_shifted_gamma_form: b_shifted_gamma_form(p, j)?,
                pi_j: pi_product(p, j),
                pi_j_gamma_form: pi_gamma_form(p, j)?,
                c_gamma_j: c_gamma_j(p, j)?,
                c_gamma_j_printed: c_gamma_j_printed(p, j)?,
                d_gamma_j: d_gamma_j(p, j)?,
                d_gamma_j_printed: d_gamma_j_printed(p, j)?,
                sigma_j: sigma_theorem(p, j)?,
                sigma_j_from_pi: sigma_from_pi(p, j)?,
                sigma_j_proof_variant: sigma_proof_variant(p, j)?,
                varsigma_j: varsigma(p, j)?,
                varsigma_j_printed: varsigma_theorem(p, j)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsTable { params: *p, rows, spectral: spectral_constants(p)? })
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn gp(n: usize, g: f64) -> GammaParams {
        GammaParams::new(n, g).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GammaParams::new(3, 2.0).is_err());
        assert!(GammaParams::new(3, 1.6).is_err());
        assert!(GammaParams::new(2, 0.5).is_err());
        let p = gp(5, 2.3);
        assert_eq!((p.floor_g, p.k, p.half_floor(), p.n_phi()), (2, 3, 1, 1));
    }

    #[test]
    fn empty_products() {
        let p = gp(3, 0.5);
        assert_eq!(b_even(&p, 0), 1.0);
        assert_eq!(pi_product(&p, 0), 1.0);
        assert_eq!(b_even(&gp(3, 1.3), 0), 1.0);
    }

    #[test]
    fn b2_vanishes_at_three_halves() {
        assert_eq!(b_even(&gp(4, 1.5), 1), 0.0);
        assert_eq!(b_even_gamma_form(&gp(4, 1.5), 1).unwrap(), 0.0);
    }

    #[test]
    fn half_gamma_values() {
        let p = gp(3, 0.5);
        assert!((sigma_theorem(&p, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sigma_from_pi(&p, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((varsigma_theorem(&p, 0).unwrap() - SQRT_2).abs() < 1e-14);
        // the classical sharp trace constant 2^{1−2γ}Γ(1−γ)/Γ(γ) = 1 at γ = 1/2
        assert!((varsigma(&p, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((c_gamma_j_printed(&p, 0).unwrap() + SQRT_2).abs() < 1e-14);
        assert!((c_gamma_j(&p, 0).unwrap() + 1.0).abs() < 1e-14);
        let s = spectral_constants(&p).unwrap();
        assert!((s.c_gamma_printed + 1.0 / SQRT_2).abs() < 1e-14);
        assert!((s.c_gamma + 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_examples() {
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        let s = spectral_constants(&gp(4, 0.5)).unwrap();
        assert!((s.beckner_gamma_factor - 1.5).abs() < 1e-14);
    }

    #[test]
    fn classical_trace_constant_for_small_gamma() {
        for &g in &[0.1, 0.25, 0.6, 0.9] {
            let p = gp(3, g);
            let classical = 2f64.powf(1.0 - 2.0 * g) * gamma_ratio(1.0 - g, g).unwrap();
            assert!(rel_diff(varsigma(&p, 0).unwrap(), classical) < 1e-13);
        }
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(
            ladder_constants(&gp(3, 1.3), 2).unwrap_err(),
            Error::IndexOutOfRange { j: 2, max: 1 }
        );
    }
}
