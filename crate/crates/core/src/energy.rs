//! Per-mode Dirichlet problem, the weighted Dirichlet form and the trace gap.
//!
//! Bulk pairings are evaluated in the invariant form
//! ∫ U L_{2k}V ρ^{1−2[γ]} dvol_{ρ²g₊} = ∫ u L⁺v dvol_{g₊}, u = ρ^{n/2−γ}U,
//! with U = Ũ + Pχ: Ũ the Poisson extension of the data, P a finite two-ladder
//! polynomial with vanishing data and χ a polynomial cutoff. L⁺ kills Ũ, so
//! every bulk integral lives on the support of χ: on (0, a] the product L⁺P
//! is taken as an exact series, on [a, b] pointwise by Taylor-mode
//! differentiation.

use crate::constants::{
    c_gamma_j, c_gamma_j_printed, d_gamma_j, d_gamma_j_printed, phi_order, sigma_from_pi, sigma_proof_variant,
    sigma_theorem, varsigma_from_sigma, GammaParams,
};
use crate::error::{Error, Result};
use crate::expansion::{apply_l2k, boundary_operator, default_order, BoundaryIndex, Ladder, TwoBranchSeries};
use crate::geometry::{taylor_shift, ModelGeometry, RadialOperator};
use crate::numerics::quadrature::{gauss_legendre_composite, graded_from_zero};
use crate::solver::{branch_order, gjms_multiplier, poisson_mode, RadialSolution};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    /// f_j = B_{2j}U, j ≤ ⌊γ/2⌋
    pub f: Vec<f64>,
    /// φ_j = B_{2j+2[γ]}U, j < ⌊γ⌋ − ⌊γ/2⌋
    pub phi: Vec<f64>,
}

impl BoundaryData {
    pub fn zeros(p: &GammaParams) -> Self {
        Self { f: vec![0.0; p.half_floor() + 1], phi: vec![0.0; p.n_phi()] }
    }

    pub fn random(p: &GammaParams, rng: &mut impl Rng) -> Self {
        let mut d = Self::zeros(p);
        d.f.iter_mut().chain(d.phi.iter_mut()).for_each(|x| *x = rng.gen_range(-1.0..1.0));
        d
    }

    pub fn check(&self, p: &GammaParams) -> Result<()> {
        if self.f.len() != p.half_floor() + 1 || self.phi.len() != p.n_phi() {
            return Err(Error::InvalidParams(format!(
                "expected {} f-data and {} φ-data, got {} and {}",
                p.half_floor() + 1,
                p.n_phi(),
                self.f.len(),
                self.phi.len()
            )));
        }
        Ok(())
    }

    /// The datum carried by summand J.
    pub fn coefficient(&self, p: &GammaParams, big_j: usize) -> f64 {
        if big_j <= p.half_floor() {
            self.f[big_j]
        } else {
            self.phi[p.floor_g - big_j]
        }
    }
}

/// (operator reading the datum of summand j, its Neumann-type partner).
/// The F-branch of summand j sits on the first rung, the G-branch on the second.
pub fn pairing(p: &GammaParams, j: usize) -> (BoundaryIndex, BoundaryIndex) {
    if j <= p.half_floor() {
        (BoundaryIndex::even(j), BoundaryIndex::shifted(p.floor_g - j))
    } else {
        (BoundaryIndex::shifted(p.floor_g - j), BoundaryIndex::even(j))
    }
}

/// χ ≡ 1 on [0, a], 0 beyond b, and 1 − S_N((ρ−a)/(b−a)) in between, S_N the
/// C^N smoothstep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub a: f64,
    pub b: f64,
    pub smoothness: usize,
    poly: Vec<f64>,
}

impl Cutoff {
    pub fn new(a: f64, b: f64, smoothness: usize) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::InvalidParams(format!("cutoff needs 0 < a < b, got ({a}, {b})")));
        }
        let n = smoothness;
        let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        let mut poly = vec![0.0; 2 * n + 2];
        poly[0] = 1.0;
        for i in 0..=n {
            let c = binom(n + i, i) * binom(2 * n + 1, n - i) * if i % 2 == 0 { 1.0 } else { -1.0 };
            poly[n + 1 + i] -= c;
        }
        Ok(Self { a, b, smoothness, poly })
    }

    pub fn eval(&self, rho: f64) -> f64 {
        if rho <= self.a {
            1.0
        } else if rho >= self.b {
            0.0
        } else {
            let x = (rho - self.a) / (self.b - self.a);
            self.poly.iter().rev().fold(0.0, |acc, c| acc * x + c)
        }
    }

    /// Taylor coefficients in h = ρ − ρ0.
    pub fn taylor(&self, rho0: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        if rho0 <= self.a || rho0 >= self.b {
            out[0] = self.eval(rho0);
            return out;
        }
        let len = self.b - self.a;
        let shifted = taylor_shift(&self.poly, (rho0 - self.a) / len);
        for (j, c) in shifted.iter().enumerate().take(order + 1) {
            out[j] = c / len.powi(j as i32);
        }
        out
    }
}

fn mul_trunc(x: &[f64], y: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    for (i, a) in x.iter().enumerate().take(order + 1) {
        for (j, b) in y.iter().enumerate().take(order + 1 - i) {
            out[i + j] += a * b;
        }
    }
    out
}

fn deriv(x: &[f64]) -> Vec<f64> {
    x.iter().enumerate().skip(1).map(|(m, c)| m as f64 * c).collect()
}

/// Taylor coefficients of ρ^e about ρ0.
fn power_taylor(e: f64, rho0: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut c = rho0.powf(e);
    for j in 0..=order {
        out.push(c);
        c *= (e - j as f64) / ((j + 1) as f64 * rho0);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// An admissible profile U = Ũ(data) + P·χ. `extra` must have vanishing data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub data: BoundaryData,
    pub extra: Option<TwoBranchSeries>,
}

impl Profile {
    pub fn extension(data: BoundaryData) -> Self {
        Self { data, extra: None }
    }
}

/// Values of the paired boundary operators, indexed by j = 0..=⌊γ⌋.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub data: Vec<f64>,
    pub partner: Vec<f64>,
}

/// σ_j and ς_j used to close the Dirichlet form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceConstants {
    pub label: String,
    pub sigma: Vec<f64>,
    pub varsigma: Vec<f64>,
}

impl TraceConstants {
    fn build(p: &GammaParams, label: &str, sigma: impl Fn(usize) -> Result<f64>, printed: bool) -> Result<Self> {
        let sigma = (0..=p.floor_g).map(sigma).collect::<Result<Vec<_>>>()?;
        let varsigma = sigma
            .iter()
            .enumerate()
            .map(|(j, &s)| varsigma_from_sigma(p, j, s, printed))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { label: label.into(), sigma, varsigma })
    }

    /// σ as stated with the Dirichlet form; ς = −c_{γ,j}σ with the
    /// Neumann-consistent c_{γ,j}.
    pub fn theorem(p: &GammaParams) -> Result<Self> {
        Self::build(p, "theorem", |j| sigma_theorem(p, j), false)
    }

    /// σ = 2|μ_j|π_j with π_j in product form, i.e. 4^{⌊γ⌋}·σ_theorem.
    pub fn from_pi(p: &GammaParams) -> Result<Self> {
        Self::build(p, "2|mu|pi", |j| sigma_from_pi(p, j), false)
    }

    /// 2^{−n}π_j(2γ − 4j).
    pub fn proof_variant(p: &GammaParams) -> Result<Self> {
        Self::build(p, "2^-n", |j| sigma_proof_variant(p, j), false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionFamily {
    /// B_{2γ−2j}Ũ = c_{γ,j} P_{γ−2j} B_{2j}Ũ
    F,
    /// B_{2⌊γ⌋−2j}Ũ = d_{γ,j} P_{⌊γ⌋−[γ]−2j} B_{2j+2[γ]}Ũ
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub family: ExtensionFamily,
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Same identity with the printed c_{γ,j}/d_{γ,j}.
    pub residual_printed: f64,
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    let s = a.abs().max(b.abs()).max(scale);
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Everything per (geometry, mode, n, γ) that does not depend on the data.
#[derive(Debug, Clone)]
pub struct ModeContext {
    pub params: GammaParams,
    pub geom: ModelGeometry,
    pub op: RadialOperator,
    pub order: usize,
    /// Poisson solution of summand J at s = n/2 + |μ_J|.
    pub summands: Vec<RadialSolution>,
    /// GJMS multiplier of order |μ_J|.
    pub multipliers: Vec<f64>,
    pub cutoff: Cutoff,
}

const FLOOR_REL: f64 = 1e-12;
const TRANSITION_PANELS: usize = 8;

impl ModeContext {
    pub fn new(geom: ModelGeometry, params: GammaParams) -> Result<Self> {
        Self::with_order(geom, params, None)
    }

    /// `order` overrides the series truncation (capped at the Frobenius order).
    pub fn with_order(geom: ModelGeometry, params: GammaParams, order: Option<usize>) -> Result<Self> {
        if geom.n != params.n {
            return Err(Error::InvalidParams(format!("geometry n = {} but γ given for n = {}", geom.n, params.n)));
        }
        let p = params;
        let order = order.unwrap_or(default_order(&p) + 2 * p.k + 16).min(branch_order(geom.kind));
        if order < 2 * p.k + 2 {
            return Err(Error::OrderExhausted { needed: 2 * p.k + 2, have: order });
        }
        let op = geom.operator_series(order)?;
        let summands = (0..=p.floor_g)
            .map(|j| poisson_mode(&geom, p.nf() / 2.0 + p.mu(j).abs()))
            .collect::<Result<Vec<_>>>()?;
        let multipliers = (0..=p.floor_g)
            .map(|j| gjms_multiplier(&geom, p.mu(j).abs()))
            .collect::<Result<Vec<_>>>()?;
        let rho_match = summands.iter().map(|s| s.rho_match).fold(f64::INFINITY, f64::min);
        let b = (0.9 * rho_match).min(0.6);
        let cutoff = Cutoff::new(0.4 * b, b, 2 * p.k - 1)?;
        Ok(Self { params: p, geom, op, order, summands, multipliers, cutoff })
    }

    /// Ũ near the boundary as a two-ladder series.
    pub fn extension_series(&self, data: &BoundaryData) -> Result<TwoBranchSeries> {
        let p = &self.params;
        data.check(p)?;
        let mut u = TwoBranchSeries::zeros(*p, self.order);
        for (big_j, sol) in self.summands.iter().enumerate() {
            let c = data.coefficient(p, big_j);
            let (home, partner) = pairing(p, big_j);
            let (fc, gc) = sol.branch_coeffs();
            for (idx, coeffs) in [(home, fc.to_vec()), (partner, gc)] {
                let ladder = u.ladder_mut(idx.ladder);
                let start = 2 * idx.j;
                for (m, x) in coeffs.iter().enumerate() {
                    if start + m > self.order {
                        break;
                    }
                    ladder[start + m] += c * x;
                }
            }
        }
        Ok(u)
    }

    /// U near the boundary (valid where χ ≡ 1).
    pub fn series(&self, u: &Profile) -> Result<TwoBranchSeries> {
        let s = self.extension_series(&u.data)?;
        Ok(match &u.extra {
            Some(e) => s.add(&e.truncate(self.order)),
            None => s,
        })
    }

    /// A random P with vanishing data: free rungs up to ⌊γ⌋ + 2 on both ladders.
    pub fn random_extra(&self, rng: &mut impl Rng) -> TwoBranchSeries {
        let p = &self.params;
        let mut e = TwoBranchSeries::zeros(*p, self.order);
        for q in (p.half_floor() + 1)..=(p.floor_g + 2) {
            e.even[2 * q] = rng.gen_range(-1.0..1.0);
        }
        for q in p.n_phi()..=(p.floor_g + 2) {
            e.shifted[2 * q] = rng.gen_range(-1.0..1.0);
        }
        e
    }

    pub fn random_profile(&self, rng: &mut impl Rng) -> Profile {
        Profile { data: BoundaryData::random(&self.params, rng), extra: Some(self.random_extra(rng)) }
    }

    /// Ũ·ρ^{γ−n/2}-free evaluation: Σ c_J (ρ^{γ−|μ|}F_J + S_J ρ^{γ+|μ|}G_J).
    fn extension_normalized(&self, data: &BoundaryData, rho: f64) -> f64 {
        let p = &self.params;
        self.summands
            .iter()
            .enumerate()
            .map(|(big_j, sol)| {
                let (home, partner) = pairing(p, big_j);
                let (fc, gc) = sol.branch_coeffs();
                data.coefficient(p, big_j)
                    * (rho.powf(home.exponent(p)) * horner(fc, rho) + rho.powf(partner.exponent(p)) * horner(&gc, rho))
            })
            .sum()
    }

    fn extra_normalized(&self, e: &TwoBranchSeries, rho: f64) -> f64 {
        horner(&e.even, rho) + rho.powf(2.0 * self.params.frac_g) * horner(&e.shifted, rho)
    }

    /// U(ρ) for ρ ≤ b.
    pub fn eval(&self, u: &Profile, rho: f64) -> f64 {
        let w = u.extra.as_ref().map_or(0.0, |e| self.extra_normalized(e, rho) * self.cutoff.eval(rho));
        self.extension_normalized(&u.data, rho) + w
    }

    /// (L⁺w)(ρ) for w = ρ^{n/2−γ}Pχ, by Taylor-mode differentiation.
    pub fn l_plus_at(&self, e: &TwoBranchSeries, rho: f64) -> Result<f64> {
        let p = &self.params;
        let order = 2 * p.k + 2;
        let base = p.nf() / 2.0 - p.gamma;
        let mut w = vec![0.0; order + 1];
        for (ladder, shift) in [(Ladder::Even, 0.0), (Ladder::Shifted, 2.0 * p.frac_g)] {
            for (m, c) in e.ladder(ladder).iter().enumerate() {
                if *c != 0.0 {
                    let t = power_taylor(base + shift + m as f64, rho, order);
                    w.iter_mut().zip(t).for_each(|(x, y)| *x += c * y);
                }
            }
        }
        let mut w = mul_trunc(&w, &self.cutoff.taylor(rho, order), order);
        let [a, b, c] = self.geom.coefficients_at(rho, order)?;
        let r = [rho, 1.0];
        let r2 = mul_trunc(&r, &r, 2);
        let p2 = mul_trunc(&a.coeffs, &r2, order);
        let p1 = mul_trunc(&b.coeffs, &r, order);
        let nn = p.nf() * p.nf() / 4.0;
        for big_j in 0..=p.floor_g {
            let cur = w.len() - 1;
            let (d1, d2) = (deriv(&w), deriv(&deriv(&w)));
            let m2 = p.mu(big_j).powi(2);
            w = (0..=cur - 2)
                .map(|i| {
                    let mut acc = (nn - m2) * w[i];
                    for t in 0..=i {
                        acc += p2[t] * d2[i - t] + p1[t] * d1[i - t] + c.coeffs[t] * w[i - t];
                    }
                    -acc
                })
                .collect();
        }
        Ok(w[0])
    }

    fn bulk_parts(&self, u: &Profile, v: &Profile, with_extension: bool) -> Result<f64> {
        let Some(ev) = &v.extra else { return Ok(0.0) };
        let p = &self.params;
        let cut = &self.cutoff;
        let l2k = apply_l2k(ev, &self.op)?;
        let nf = p.nf();
        let u_norm = |rho: f64| {
            let w = u.extra.as_ref().map_or(0.0, |e| self.extra_normalized(e, rho) * cut.eval(rho));
            w + if with_extension { self.extension_normalized(&u.data, rho) } else { 0.0 }
        };
        // ρ^{n+1}·dvol density, smooth and → 1 at the boundary
        let density = |rho: f64| self.geom.measure(rho) * rho.powf(nf + 1.0);
        let inner = |rho: f64| {
            let lw = horner(&l2k.even, rho) + rho.powf(2.0 * p.frac_g) * horner(&l2k.shifted, rho);
            u_norm(rho) * lw * rho.powf(1.0 - 2.0 * p.frac_g) * density(rho)
        };
        let near = graded_from_zero(&inner, cut.a, 1.0 - 2.0 * p.frac_g, FLOOR_REL * cut.a)?;
        let err = std::cell::RefCell::new(None);
        let outer = |rho: f64| match self.l_plus_at(ev, rho) {
            Ok(l) => u_norm(rho) * rho.powf(nf / 2.0 - p.gamma) * l * self.geom.measure(rho),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let far = gauss_legendre_composite(&outer, &[cut.a, cut.b], TRANSITION_PANELS);
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(near + far),
        }
    }

    /// ∫ U L_{2k}V ρ^{1−2[γ]} dvol_{ρ²g₊}.
    pub fn bulk(&self, u: &Profile, v: &Profile) -> Result<f64> {
        self.bulk_parts(u, v, true)
    }

    /// ∫ (u − ũ) L⁺ (v − ṽ) dvol_{g₊}.
    pub fn a1(&self, u: &Profile, v: &Profile) -> Result<f64> {
        self.bulk_parts(u, v, false)
    }

    pub fn boundary_values(&self, u: &Profile) -> Result<BoundaryValues> {
        let s = self.series(u)?;
        let p = &self.params;
        let mut bv = BoundaryValues { data: vec![], partner: vec![] };
        for j in 0..=p.floor_g {
            let (d, n) = pairing(p, j);
            bv.data.push(boundary_operator(&s, d, &self.op)?);
            bv.partner.push(boundary_operator(&s, n, &self.op)?);
        }
        Ok(bv)
    }

    /// Q(U, V) = bulk − Σ σ_j B_data U · B_partner V.
    pub fn dirichlet_form(&self, u: &Profile, v: &Profile, sigma: &[f64]) -> Result<f64> {
        let (bu, bv) = (self.boundary_values(u)?, self.boundary_values(v)?);
        let boundary: f64 = (0..sigma.len()).map(|j| sigma[j] * bu.data[j] * bv.partner[j]).sum();
        Ok(self.bulk(u, v)? - boundary)
    }

    pub fn energy(&self, u: &Profile, sigma: &[f64]) -> Result<f64> {
        self.dirichlet_form(u, u, sigma)
    }

    /// Σ ς_j B_data U · P_{|μ_j|} B_data U.
    pub fn trace_term(&self, u: &Profile, varsigma: &[f64]) -> Result<f64> {
        let b = self.boundary_values(u)?;
        Ok((0..varsigma.len()).map(|j| varsigma[j] * self.multipliers[j] * b.data[j] * b.data[j]).sum())
    }

    /// E(U) − Σ ς_j B U · P B U.
    pub fn trace_gap(&self, u: &Profile, k: &TraceConstants) -> Result<f64> {
        Ok(self.energy(u, &k.sigma)? - self.trace_term(u, &k.varsigma)?)
    }

    /// Bulk(U, V) against A₁(U−Ũ, V−Ṽ) + σ-terms + ς-terms.
    pub fn main_identity(&self, u: &Profile, v: &Profile, k: &TraceConstants) -> Result<IdentityCheck> {
        let (bu, bv) = (self.boundary_values(u)?, self.boundary_values(v)?);
        let lhs = self.bulk(u, v)?;
        let a1 = self.a1(u, v)?;
        let terms: Vec<f64> = (0..=self.params.floor_g)
            .flat_map(|j| {
                [
                    k.sigma[j] * bu.data[j] * bv.partner[j],
                    k.varsigma[j] * self.multipliers[j] * bu.data[j] * bv.data[j],
                ]
            })
            .collect();
        let rhs = a1 + terms.iter().sum::<f64>();
        let scale = terms.iter().fold(lhs.abs().max(a1.abs()), |m, t| m.max(t.abs()));
        Ok(IdentityCheck { lhs, rhs, residual: rel(lhs, rhs, scale) })
    }

    /// Both identity families on Ũ(data), with the data round trip folded
    /// into the f/φ checks' scale.
    pub fn extension_residual(&self, data: &BoundaryData) -> Result<Vec<ExtensionCheck>> {
        let p = &self.params;
        let u = self.extension_series(data)?;
        let b = |idx| boundary_operator(&u, idx, &self.op);
        let mut out = vec![];
        for j in 0..=p.half_floor() {
            let lhs = b(BoundaryIndex::shifted(p.floor_g - j))?;
            let base = self.multipliers[j] * b(BoundaryIndex::even(j))?;
            let rhs = c_gamma_j(p, j)? * base;
            let printed = c_gamma_j_printed(p, j)? * base;
            out.push(ExtensionCheck {
                family: ExtensionFamily::F,
                j,
                lhs,
                rhs,
                residual: rel(lhs, rhs, 0.0),
                residual_printed: rel(lhs, printed, 0.0),
            });
        }
        for j in 0..p.n_phi() {
            let lhs = b(BoundaryIndex::even(p.floor_g - j))?;
            let m = gjms_multiplier(&self.geom, phi_order(p, j))?;
            let base = m * b(BoundaryIndex::shifted(j))?;
            let rhs = d_gamma_j(p, j)? * base;
            let printed = d_gamma_j_printed(p, j)? * base;
            out.push(ExtensionCheck {
                family: ExtensionFamily::Phi,
                j,
                lhs,
                rhs,
                residual: rel(lhs, rhs, 0.0),
                residual_printed: rel(lhs, printed, 0.0),
            });
        }
        Ok(out)
    }

    /// ∫ w² dvol_{g₊} for the perturbation part.
    pub fn weighted_norm_sq(&self, e: &TwoBranchSeries) -> Result<f64> {
        let p = &self.params;
        let cut = &self.cutoff;
        let f = |rho: f64| {
            let w = self.extra_normalized(e, rho) * cut.eval(rho);
            w * w * rho.powf(-2.0 * p.gamma - 1.0) * self.geom.measure(rho) * rho.powf(p.nf() + 1.0)
        };
        let lead = e.even.iter().position(|c| *c != 0.0).map_or(f64::INFINITY, |m| m as f64);
        let lead_s = e.shifted.iter().position(|c| *c != 0.0).map_or(f64::INFINITY, |m| m as f64 + 2.0 * p.frac_g);
        let alpha = 2.0 * lead.min(lead_s) - 2.0 * p.gamma - 1.0;
        if !alpha.is_finite() {
            return Err(Error::ZeroFunction);
        }
        Ok(graded_from_zero(&f, cut.a, alpha, FLOOR_REL * cut.a)?
            + gauss_legendre_composite(&f, &[cut.a, cut.b], TRANSITION_PANELS))
    }

    /// min over trial perturbations (zero data) of E(W)/‖w‖².
    pub fn lambda1_probe(&self, trials: &[TwoBranchSeries]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for e in trials {
            let w = Profile { data: BoundaryData::zeros(&self.params), extra: Some(e.clone()) };
            let zero = vec![0.0; self.params.floor_g + 1];
            best = best.min(self.energy(&w, &zero)? / self.weighted_norm_sq(e)?);
        }
        Ok(best)
    }
}
