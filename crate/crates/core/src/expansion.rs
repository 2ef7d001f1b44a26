//! Two-ladder boundary expansions and the boundary operators acting on them.
//!
//! A mode profile U is stored as two coefficient arrays,
//! U = Σ e_m ρ^m + ρ^{2[γ]} Σ s_m ρ^m. The shifted Laplacian is always applied
//! to the conjugate u = ρ^{n/2−γ}U, so the exponent of slot m on the even
//! ladder is n/2 − γ + m and δ = α − n/2 = m − γ there.

use crate::constants::GammaParams;
use crate::error::{Error, Result};
use crate::geometry::RadialOperator;
use crate::numerics::{eps_limit_quotient_scaled, EpsJet, TruncatedSeries};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ladder {
    Even,
    Shifted,
}

/// Index of a boundary operator: B_{2j} (even) or B_{2j+2[γ]} (shifted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryIndex {
    pub ladder: Ladder,
    pub j: usize,
}

impl BoundaryIndex {
    pub fn even(j: usize) -> Self {
        Self { ladder: Ladder::Even, j }
    }

    pub fn shifted(j: usize) -> Self {
        Self { ladder: Ladder::Shifted, j }
    }

    /// The power of ρ the operator reads off.
    pub fn exponent(&self, p: &GammaParams) -> f64 {
        match self.ladder {
            Ladder::Even => 2.0 * self.j as f64,
            Ladder::Shifted => 2.0 * self.j as f64 + 2.0 * p.frac_g,
        }
    }

    /// Indices whose normalizing constant vanishes and which need the
    /// ε-regularization and jet subtraction.
    pub fn is_high(&self, p: &GammaParams) -> bool {
        match self.ladder {
            Ladder::Even => 2 * self.j > p.floor_g,
            Ladder::Shifted => 2 * self.j >= p.floor_g,
        }
    }
}

impl fmt::Display for BoundaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ladder {
            Ladder::Even => write!(f, "B_{}", 2 * self.j),
            Ladder::Shifted => write!(f, "B_{}+2[g]", 2 * self.j),
        }
    }
}

pub fn default_order(p: &GammaParams) -> usize {
    2 * p.floor_g + 8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBranchSeries {
    pub params: GammaParams,
    pub even: Vec<f64>,
    pub shifted: Vec<f64>,
}

impl TwoBranchSeries {
    pub fn zeros(params: GammaParams, order: usize) -> Self {
        Self { params, even: vec![0.0; order + 1], shifted: vec![0.0; order + 1] }
    }

    /// c·ρ^{2p} (even) or c·ρ^{2[γ]+2p} (shifted).
    pub fn atom(params: GammaParams, order: usize, ladder: Ladder, p: usize, c: f64) -> Self {
        let mut s = Self::zeros(params, order);
        s.ladder_mut(ladder)[2 * p] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.even.len() - 1
    }

    pub fn ladder(&self, l: Ladder) -> &[f64] {
        match l {
            Ladder::Even => &self.even,
            Ladder::Shifted => &self.shifted,
        }
    }

    pub fn ladder_mut(&mut self, l: Ladder) -> &mut Vec<f64> {
        match l {
            Ladder::Even => &mut self.even,
            Ladder::Shifted => &mut self.shifted,
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.even.resize(order + 1, 0.0);
        s.shifted.resize(order + 1, 0.0);
        s
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order().min(other.order());
        let z = |a: &[f64], b: &[f64]| (0..=order).map(|m| f(a[m], b[m])).collect();
        Self { params: self.params, even: z(&self.even, &other.even), shifted: z(&self.shifted, &other.shifted) }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            params: self.params,
            even: self.even.iter().map(|x| c * x).collect(),
            shifted: self.shifted.iter().map(|x| c * x).collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.even.iter().chain(&self.shifted).fold(0.0, |a, c| a.max(c.abs()))
    }

    /// True when no odd slot on either ladder is populated.
    pub fn is_step_two(&self) -> bool {
        self.even.iter().chain(&self.shifted).enumerate().all(|(i, c)| {
            let m = i % self.even.len();
            m % 2 == 0 || *c == 0.0
        })
    }

    pub fn as_series(&self) -> (TruncatedSeries, TruncatedSeries) {
        (
            TruncatedSeries::new(0.0, 1.0, self.even.clone()),
            TruncatedSeries::new(2.0 * self.params.frac_g, 1.0, self.shifted.clone()),
        )
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let (e, s) = self.as_series();
        e.eval(rho) + s.eval(rho)
    }

    /// Multiply both ladders by a power series in ρ.
    pub fn mul_power_series(&self, f: &TruncatedSeries) -> Result<Self> {
        if f.offset != 0.0 || f.step != 1.0 {
            return Err(Error::Composition);
        }
        let (e, s) = self.as_series();
        let f = f.truncate(self.order());
        Ok(Self { params: self.params, even: e.mul(&f)?.coeffs, shifted: s.mul(&f)?.coeffs })
    }
}

/// Ladder arrays carrying an ε-jet per slot.
#[derive(Debug, Clone)]
struct JetLadders {
    even: Vec<EpsJet>,
    shifted: Vec<EpsJet>,
}

impl JetLadders {
    fn from(u: &TwoBranchSeries) -> Self {
        let c = |v: &[f64]| v.iter().map(|&x| EpsJet::constant(x)).collect();
        Self { even: c(&u.even), shifted: c(&u.shifted) }
    }

    fn ladder(&self, l: Ladder) -> &[EpsJet] {
        match l {
            Ladder::Even => &self.even,
            Ladder::Shifted => &self.shifted,
        }
    }
}

/// (δ² − μ_J²) at slot m with the integer factor formed exactly.
fn diag(p: &GammaParams, l: Ladder, m: usize, big_j: usize) -> f64 {
    let (mf, jf) = (m as f64, 2.0 * big_j as f64);
    match l {
        Ladder::Even => (mf - jf) * (mf + jf - 2.0 * p.gamma),
        Ladder::Shifted => {
            let int_part = m as i64 - 2 * p.floor_g as i64 + 2 * big_j as i64;
            int_part as f64 * (mf + 2.0 * p.frac_g - jf)
        }
    }
}

fn base_exponent(p: &GammaParams, l: Ladder) -> f64 {
    let b = p.nf() / 2.0 - p.gamma;
    match l {
        Ladder::Even => b,
        Ladder::Shifted => b + 2.0 * p.frac_g,
    }
}

fn check_order(op: &RadialOperator, order: usize) -> Result<()> {
    if op.order() < order {
        return Err(Error::OrderExhausted { needed: order, have: op.order() });
    }
    Ok(())
}

/// One ladder of (Δ̃₊ − μ²) u, with diagonal `d(m)` and optional ε on the diagonal.
fn apply_on_ladder(
    op: &RadialOperator,
    x: &[EpsJet],
    alpha0: f64,
    d: impl Fn(usize) -> f64,
    eps: bool,
) -> Vec<EpsJet> {
    (0..x.len())
        .map(|m| {
            let mut acc = x[m].scale(d(m));
            if eps {
                acc.dval += x[m].val;
            }
            for i in 1..=m {
                let xi = x[m - i];
                if xi.val == 0.0 && xi.dval == 0.0 {
                    continue;
                }
                acc = acc + xi.scale(op.k(i, alpha0 + (m - i) as f64));
            }
            acc
        })
        .collect()
}

fn apply_factor_jet(op: &RadialOperator, p: &GammaParams, x: &JetLadders, big_j: usize, eps: bool) -> JetLadders {
    JetLadders {
        even: apply_on_ladder(op, &x.even, base_exponent(p, Ladder::Even), |m| diag(p, Ladder::Even, m, big_j), eps),
        shifted: apply_on_ladder(
            op,
            &x.shifted,
            base_exponent(p, Ladder::Shifted),
            |m| diag(p, Ladder::Shifted, m, big_j),
            eps,
        ),
    }
}

fn strip(x: &[EpsJet]) -> Vec<f64> {
    x.iter().map(|j| j.val).collect()
}

/// (Δ̃₊ − μ_J²) acting on u = ρ^{n/2−γ}U, returned in the same U-normalization.
pub fn apply_factor(u: &TwoBranchSeries, op: &RadialOperator, big_j: usize) -> Result<TwoBranchSeries> {
    check_order(op, u.order())?;
    let out = apply_factor_jet(op, &u.params, &JetLadders::from(u), big_j, false);
    Ok(TwoBranchSeries { params: u.params, even: strip(&out.even), shifted: strip(&out.shifted) })
}

/// Δ̃₊ = Δ₊ + n²/4 acting on u = ρ^{n/2−γ}U, in the U-normalization.
pub fn apply_shifted_laplacian(u: &TwoBranchSeries, op: &RadialOperator) -> Result<TwoBranchSeries> {
    check_order(op, u.order())?;
    let p = u.params;
    let x = JetLadders::from(u);
    let delta = |l: Ladder, m: usize| base_exponent(&p, l) + m as f64 - p.nf() / 2.0;
    let run = |l: Ladder| {
        strip(&apply_on_ladder(op, x.ladder(l), base_exponent(&p, l), |m| delta(l, m).powi(2), false))
    };
    let out = TwoBranchSeries { params: p, even: run(Ladder::Even), shifted: run(Ladder::Shifted) };
    if op.is_even() && u.is_step_two() {
        assert!(out.is_step_two(), "an even operator populated an odd slot");
    }
    Ok(out)
}

/// L⁺ = Π_{J=0}^{⌊γ⌋} −(Δ̃₊ − μ_J²) acting on u = ρ^{n/2−γ}U, U-normalized.
/// The factors commute; applying them in increasing J on the even ladder and
/// decreasing J on the shifted one makes every annihilated rung exactly zero.
pub fn apply_l_plus(u: &TwoBranchSeries, op: &RadialOperator) -> Result<TwoBranchSeries> {
    check_order(op, u.order())?;
    let p = u.params;
    let x = JetLadders::from(u);
    let sign = if p.k % 2 == 0 { 1.0 } else { -1.0 };
    let run = |l: Ladder, js: Vec<usize>| {
        let mut v = x.ladder(l).to_vec();
        for big_j in js {
            v = apply_on_ladder(op, &v, base_exponent(&p, l), |m| diag(&p, l, m, big_j), false);
        }
        strip(&v).into_iter().map(|c| sign * c).collect::<Vec<f64>>()
    };
    Ok(TwoBranchSeries {
        params: p,
        even: run(Ladder::Even, (0..=p.floor_g).collect()),
        shifted: run(Ladder::Shifted, (0..=p.floor_g).rev().collect()),
    })
}

/// L_{2k}U = ρ^{−n/2+γ−2k} L⁺(ρ^{n/2−γ}U): the L⁺ series shifted down by 2k
/// slots, after checking that nothing below ρ^{2k} survived.
pub fn apply_l2k(u: &TwoBranchSeries, op: &RadialOperator) -> Result<TwoBranchSeries> {
    let p = u.params;
    let two_k = 2 * p.k;
    if u.order() < two_k + 2 {
        return Err(Error::OrderExhausted { needed: two_k + 2, have: u.order() });
    }
    let l = apply_l_plus(u, op)?;
    let scale = l.norm_inf().max(u.norm_inf());
    for (ladder, shift) in [(Ladder::Even, 0.0), (Ladder::Shifted, 2.0 * p.frac_g)] {
        for (m, c) in l.ladder(ladder).iter().enumerate().take(two_k) {
            // exponents below 2k − 2[γ]·[shifted] would make L_{2k}U singular
            if shift + (m as f64) < two_k as f64 - 1e-12 && c.abs() > CANCEL_REL * scale {
                return Err(Error::DivergingCoefficient { exponent: shift + m as f64 - two_k as f64, magnitude: c.abs() });
            }
        }
    }
    let down = |v: &[f64]| v[two_k..].to_vec();
    Ok(TwoBranchSeries { params: p, even: down(&l.even), shifted: down(&l.shifted) })
}

/// Factor list of the (possibly ε-regularized) preliminary operator.
struct Plan {
    factors: Vec<usize>,
    eps_slot: Option<usize>,
}

fn plan(p: &GammaParams, idx: BoundaryIndex) -> Plan {
    let (j, fl) = (idx.j, p.floor_g);
    let top = (fl + 1 - j.min(fl + 1))..=fl;
    let top: Vec<usize> = if j == 0 { vec![] } else { top.collect() };
    match (idx.ladder, idx.is_high(p)) {
        (Ladder::Even, false) => Plan { factors: (0..j).chain(top).collect(), eps_slot: None },
        (Ladder::Shifted, false) => Plan { factors: (0..=j).chain(top).collect(), eps_slot: None },
        (Ladder::Even, true) => Plan {
            factors: (0..j).chain(top.into_iter().filter(|&l| l != j)).collect(),
            eps_slot: Some(j),
        },
        (Ladder::Shifted, true) => Plan {
            factors: (0..=j).filter(|&l| l != fl - j).chain(top).collect(),
            eps_slot: Some(fl - j),
        },
    }
}

/// Largest admissible value of j for either ladder.
fn check_index(p: &GammaParams, idx: BoundaryIndex) -> Result<()> {
    if idx.j > p.floor_g {
        return Err(Error::IndexOutOfRange { j: idx.j, max: p.floor_g });
    }
    Ok(())
}

/// Relative size below which a coefficient that must cancel counts as zero.
const CANCEL_REL: f64 = 1e-9;

/// The jet J_+^{2m}U (even atoms, `Ladder::Even`) or J_−^{2m}U (shifted atoms).
pub fn boundary_jet(u: &TwoBranchSeries, ladder: Ladder, m: usize, op: &RadialOperator) -> Result<TwoBranchSeries> {
    let mut acc = TwoBranchSeries::zeros(u.params, u.order());
    for i in 0..=m {
        let c = boundary_operator(&u.sub(&acc), BoundaryIndex { ladder, j: i }, op)?;
        acc.ladder_mut(ladder)[2 * i] += c;
    }
    Ok(acc)
}

/// B_{2j}U or B_{2j+2[γ]}U for a mode profile U, per the ε/jet recipe.
pub fn boundary_operator(u: &TwoBranchSeries, idx: BoundaryIndex, op: &RadialOperator) -> Result<f64> {
    let p = u.params;
    check_index(&p, idx)?;
    let target = 2 * idx.j;
    if u.order() < target + 2 {
        return Err(Error::OrderExhausted { needed: target + 2, have: u.order() });
    }
    check_order(op, u.order())?;

    let high = idx.is_high(&p);
    let input = if high {
        let (other, m) = match idx.ladder {
            Ladder::Even => (Ladder::Shifted, p.floor_g - idx.j),
            Ladder::Shifted => (Ladder::Even, p.floor_g - idx.j),
        };
        u.sub(&boundary_jet(u, other, m, op)?)
    } else {
        u.clone()
    };
    // only slots up to the read-off one matter
    let input = input.truncate(target + 1);

    let pl = plan(&p, idx);
    let mut x = JetLadders::from(&input);
    let mut den = EpsJet::constant(1.0);
    for &big_j in &pl.factors {
        x = apply_factor_jet(op, &p, &x, big_j, false);
        den = den * EpsJet::constant(diag(&p, idx.ladder, target, big_j));
    }
    if let Some(big_j) = pl.eps_slot {
        x = apply_factor_jet(op, &p, &x, big_j, true);
        den = den * EpsJet::new(diag(&p, idx.ladder, target, big_j), 1.0);
    }

    let num = x.ladder(idx.ladder)[target];
    let scale = input.norm_inf().max(u.norm_inf()) * den.val.abs().max(den.dval.abs()).max(1.0);
    let scale = x
        .even
        .iter()
        .chain(&x.shifted)
        .fold(scale, |s, c| s.max(c.val.abs()).max(c.dval.abs()));

    // every slot below the read-off exponent carries a negative power of ρ
    let e = idx.exponent(&p);
    let two_frac = 2.0 * p.frac_g;
    for (ladder, shift) in [(Ladder::Even, 0.0), (Ladder::Shifted, two_frac)] {
        for (m, c) in x.ladder(ladder).iter().enumerate() {
            let exponent = shift + m as f64;
            if exponent < e - 1e-12 {
                let mag = c.val.abs().max(c.dval.abs());
                if mag > CANCEL_REL * scale {
                    return Err(Error::DivergingCoefficient { exponent: exponent - e, magnitude: mag });
                }
            }
        }
    }
    eps_limit_quotient_scaled(num, den, scale)
}

/// The first ⌊γ⌋+1 rungs of each ladder recovered purely from boundary
/// operators, extracting in increasing exponent order.
pub fn reconstruct(u: &TwoBranchSeries, op: &RadialOperator) -> Result<TwoBranchSeries> {
    let p = u.params;
    let mut acc = TwoBranchSeries::zeros(p, u.order());
    for j in 0..=p.floor_g {
        for ladder in [Ladder::Even, Ladder::Shifted] {
            let c = boundary_operator(&u.sub(&acc), BoundaryIndex { ladder, j }, op)?;
            acc.ladder_mut(ladder)[2 * j] = c;
        }
    }
    Ok(acc)
}

/// φ with ρ = φ(ρ̂) for ρ̂ = e^{τ(ρ)}ρ.
pub fn inverse_defining_map(tau: &TruncatedSeries, order: usize) -> Result<TruncatedSeries> {
    if tau.offset != 0.0 || tau.step != 1.0 {
        return Err(Error::Composition);
    }
    let e = tau.truncate(order).exp()?;
    let mut c = vec![0.0];
    c.extend(e.coeffs.iter().take(order));
    TruncatedSeries::power(c).revert()
}

/// Re-expand U in powers of ρ̂ = e^τ ρ; τ must be even in ρ.
pub fn change_defining_function(u: &TwoBranchSeries, tau: &TruncatedSeries) -> Result<TwoBranchSeries> {
    if tau.coeffs.iter().skip(1).step_by(2).any(|&c| c != 0.0) {
        return Err(Error::InvalidParams("τ must be even in ρ".into()));
    }
    let order = u.order();
    let phi = inverse_defining_map(tau, order + 1)?;
    // ψ = φ/ρ̂
    let psi = TruncatedSeries::power(phi.coeffs[1..].to_vec()).truncate(order);
    let phi = phi.truncate(order);
    let even = TruncatedSeries::power(u.even.clone()).compose(&phi)?;
    let shifted = TruncatedSeries::power(u.shifted.clone())
        .compose(&phi)?
        .mul(&psi.powf(2.0 * u.params.frac_g)?)?;
    Ok(TwoBranchSeries { params: u.params, even: even.coeffs, shifted: shifted.coeffs })
}

/// Both sides of B̂U = e^{(−n/2+γ)τ₀ − Eτ₀} B(e^{(n/2−γ)τ}U), E the read-off
/// exponent and τ₀ = τ(0): (left computed in ρ̂, right in ρ).
pub fn covariance_sides(
    u: &TwoBranchSeries,
    idx: BoundaryIndex,
    op: &RadialOperator,
    tau: &TruncatedSeries,
) -> Result<(f64, f64)> {
    let p = u.params;
    let order = u.order();
    let phi = inverse_defining_map(tau, order + 1)?;
    let op_hat = op.change_variable(&phi)?;
    let lhs = boundary_operator(&change_defining_function(u, tau)?, idx, &op_hat)?;
    let w = p.nf() / 2.0 - p.gamma;
    let weight = tau.truncate(order).scale(w).exp()?;
    let inner = boundary_operator(&u.mul_power_series(&weight)?, idx, op)?;
    let tau0 = tau.coeffs[0];
    Ok((lhs, (-(w + idx.exponent(&p)) * tau0).exp() * inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ModelGeometry;

    fn setup(n: usize, g: f64) -> (GammaParams, RadialOperator, usize) {
        let p = GammaParams::new(n, g).unwrap();
        let order = default_order(&p);
        let op = ModelGeometry::halfspace(n, 1.3).unwrap().operator_series(order).unwrap();
        (p, op, order)
    }

    #[test]
    fn flat_laplacian_on_power() {
        let p = GammaParams::new(3, 0.6).unwrap();
        let op = ModelGeometry::halfspace(3, 0.0).unwrap().operator_series(6).unwrap();
        let u = TwoBranchSeries::atom(p, 6, Ladder::Even, 1, 1.0);
        let out = apply_shifted_laplacian(&u, &op).unwrap();
        // α − n/2 = 2 − γ
        assert!((out.even[2] - (2.0 - 0.6f64).powi(2)).abs() < 1e-14);
        assert_eq!(out.even.iter().filter(|c| **c != 0.0).count(), 1);
    }

    #[test]
    fn unit_frequency_adds_shifted_term() {
        let p = GammaParams::new(3, 0.6).unwrap();
        let op = ModelGeometry::halfspace(3, 1.0).unwrap().operator_series(6).unwrap();
        let u = TwoBranchSeries::atom(p, 6, Ladder::Shifted, 0, 1.0);
        let out = apply_shifted_laplacian(&u, &op).unwrap();
        assert_eq!(out.shifted[2], -1.0);
    }

    #[test]
    fn b0_is_restriction() {
        let (p, op, order) = setup(5, 2.3);
        let mut u = TwoBranchSeries::zeros(p, order);
        u.even[0] = 0.7;
        u.even[2] = -1.1;
        u.shifted[0] = 3.0;
        assert!((boundary_operator(&u, BoundaryIndex::even(0), &op).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn atoms_are_read_off() {
        for &(n, g) in &[(3, 0.4), (4, 1.3), (5, 2.3), (8, 3.5)] {
            let (p, op, order) = setup(n, g);
            for j in 0..=p.floor_g {
                for ladder in [Ladder::Even, Ladder::Shifted] {
                    let u = TwoBranchSeries::atom(p, order, ladder, j, 1.7);
                    let v = boundary_operator(&u, BoundaryIndex { ladder, j }, &op).unwrap();
                    assert!((v - 1.7).abs() < 1e-10, "n={n} γ={g} j={j} {ladder:?}: {v}");
                }
            }
        }
    }

    #[test]
    fn ladders_annihilate_each_other() {
        let (p, op, order) = setup(8, 3.5);
        for m in 0..=p.floor_g {
            for j in 0..=p.floor_g {
                let se = TwoBranchSeries::atom(p, order, Ladder::Shifted, m, 1.0);
                assert!(boundary_operator(&se, BoundaryIndex::even(j), &op).unwrap().abs() < 1e-10);
                let ev = TwoBranchSeries::atom(p, order, Ladder::Even, m, 1.0);
                assert!(boundary_operator(&ev, BoundaryIndex::shifted(j), &op).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_tau_scales_atoms() {
        let p = GammaParams::new(5, 1.3).unwrap();
        let u = TwoBranchSeries::atom(p, 10, Ladder::Even, 2, 1.0);
        let c = 0.3;
        let mut t = vec![0.0; 11];
        t[0] = c;
        let uh = change_defining_function(&u, &TruncatedSeries::power(t)).unwrap();
        assert!((uh.even[4] - (-4.0 * c).exp()).abs() < 1e-14);
    }

    #[test]
    fn identity_change_of_defining_function() {
        let (p, _, order) = setup(5, 2.3);
        let mut u = TwoBranchSeries::zeros(p, order);
        u.even[2] = 1.0;
        u.shifted[4] = -2.0;
        let back = change_defining_function(&u, &TruncatedSeries::zeros(0.0, 1.0, order)).unwrap();
        assert_eq!(back, u);
    }
}
