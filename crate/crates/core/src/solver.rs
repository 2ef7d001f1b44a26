//! Per-mode Poisson problem (Δ̃₊ − μ²)V = 0 with V = ρ^{n/2−μ}F + ρ^{n/2+μ}G,
//! F|_M = 1, and the scattering eigenvalue S = G|_M.

use crate::error::{Error, Result};
use crate::geometry::{GeometryKind, ModelGeometry, RadialOperator};
use crate::numerics::gamma::gamma_ratio;
use crate::numerics::TruncatedSeries;
use serde::{Deserialize, Serialize};

/// Frobenius terms kept on each boundary branch; the matching point sits at
/// 1/3 of the convergence radius for the geodesic variables and 3/4 for the
/// literal ball variable.
pub fn branch_order(kind: GeometryKind) -> usize {
    match kind {
        GeometryKind::Halfspace => 40,
        GeometryKind::BallGeodesic => 64,
        GeometryKind::BallLiteral => 200,
    }
}
const CENTER_ORDER: usize = 120;
const RESONANCE_TOL: f64 = 1e-8;
const MAX_COND: f64 = 1e10;

/// Where the boundary pair is matched to the regular/decaying solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Interior {
    /// Halfspace or |ξ| = 0: nothing beyond the boundary pair.
    None,
    /// Ball: Σ a_m t^{ℓ+2m} about the center, scaled to equal F + S·G.
    Center { series: TruncatedSeries },
    /// Halfspace: decaying solution integrated in from y_∞.
    Decaying { y_inf: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub geom: ModelGeometry,
    pub s: f64,
    pub mu: f64,
    /// ρ^{n/2−μ}·(1 + …)
    pub f_branch: TruncatedSeries,
    /// ρ^{n/2+μ}·(1 + …)
    pub g_branch: TruncatedSeries,
    /// (F|_M, G|_M) with F|_M = 1.
    pub connection: (f64, f64),
    pub interior: Interior,
    /// Matching point in the boundary variable.
    pub rho_match: f64,
}

impl RadialSolution {
    pub fn scattering(&self) -> f64 {
        self.connection.1
    }

    /// The two branches' power-series parts, F and S·G without the ρ powers.
    pub fn branch_coeffs(&self) -> (&[f64], Vec<f64>) {
        let s = self.scattering();
        (&self.f_branch.coeffs, self.g_branch.coeffs.iter().map(|c| s * c).collect())
    }

    /// V and dV/dρ near the boundary from the Frobenius pair.
    pub fn eval_boundary(&self, rho: f64) -> (f64, f64) {
        let s = self.scattering();
        let v = self.f_branch.eval(rho) + s * self.g_branch.eval(rho);
        let d = self.f_branch.differentiate().eval(rho) + s * self.g_branch.differentiate().eval(rho);
        (v, d)
    }

    /// V and its first two ρ-derivatives, using whichever representation
    /// converges at ρ. On the halfspace the boundary pair is used throughout;
    /// its two branches grow like e^{|ξ|y} while V decays, so relative accuracy
    /// degrades like ε·e^{2|ξ|y}.
    pub fn eval_derivs(&self, rho: f64) -> (f64, f64, f64) {
        let s = self.scattering();
        let boundary = |rho: f64| {
            let (f1, g1) = (self.f_branch.differentiate(), self.g_branch.differentiate());
            (
                self.f_branch.eval(rho) + s * self.g_branch.eval(rho),
                f1.eval(rho) + s * g1.eval(rho),
                f1.differentiate().eval(rho) + s * g1.differentiate().eval(rho),
            )
        };
        match &self.interior {
            Interior::Center { series } if rho > self.rho_match => {
                let (t, dt, d2t) = ball_t_of_rho(self.geom.kind, rho);
                let s1 = series.differentiate();
                let (v, vt, vtt) = (series.eval(t), s1.eval(t), s1.differentiate().eval(t));
                (v, vt * dt, vtt * dt * dt + vt * d2t)
            }
            _ => boundary(rho),
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.eval_derivs(rho).0
    }

    /// Pointwise residual of (Δ̃₊ − μ²)V relative to |V|.
    pub fn equation_residual(&self, rho: f64) -> Result<f64> {
        let [a, b, c] = self.geom.coefficients();
        let (v, d1, d2) = self.eval_derivs(rho);
        let n = self.geom.n as f64;
        let lhs = a.eval(rho) * rho * rho * d2
            + b.eval(rho) * rho * d1
            + (c.eval(rho) + n * n / 4.0 - self.mu * self.mu) * v;
        let scale = v.abs().max((rho * rho * d2).abs()).max((rho * d1).abs());
        Ok(lhs.abs() / scale)
    }
}

/// t = |w| and its first two derivatives in the ball's boundary variable.
fn ball_t_of_rho(kind: GeometryKind, rho: f64) -> (f64, f64, f64) {
    match kind {
        // r = 2(1−t)/(1+t)
        GeometryKind::BallGeodesic => {
            let t = (2.0 - rho) / (2.0 + rho);
            (t, -4.0 / (2.0 + rho).powi(2), 8.0 / (2.0 + rho).powi(3))
        }
        // ρ = (1−t²)/2
        _ => {
            let t = (1.0 - 2.0 * rho).sqrt();
            (t, -1.0 / t, -1.0 / t.powi(3))
        }
    }
}

/// Power-series coefficients c_m (c_0 = 1) of the branch ρ^{n/2 + sign·μ}Σc_mρ^m.
pub fn frobenius_branch(op: &RadialOperator, mu: f64, sign: f64, order: usize) -> Result<Vec<f64>> {
    if op.order() < order {
        return Err(Error::OrderExhausted { needed: order, have: op.order() });
    }
    let alpha0 = op.n as f64 / 2.0 + sign * mu;
    let mut c = vec![0.0; order + 1];
    c[0] = 1.0;
    for m in 1..=order {
        let rhs: f64 = -(1..=m).map(|i| op.k(i, alpha0 + (m - i) as f64) * c[m - i]).sum::<f64>();
        let d = m as f64 * (m as f64 + 2.0 * sign * mu);
        if d.abs() < RESONANCE_TOL {
            // integer gap between the indices; fine only if nothing feeds it
            let scale = c[..m].iter().fold(1.0f64, |a, x| a.max(x.abs()));
            if rhs.abs() > 1e-10 * scale {
                return Err(Error::Resonance(mu));
            }
            c[m] = 0.0;
        } else {
            c[m] = rhs / d;
        }
    }
    Ok(c)
}

/// Interior series about the ball center, a_0 = 1, in powers t^{ℓ+2m}.
fn center_series(n: usize, ell: usize, mu: f64, order: usize) -> TruncatedSeries {
    let (nf, l) = (n as f64, ell as f64);
    let big_l = l * (l + nf - 1.0);
    let lambda = mu * mu - nf * nf / 4.0;
    let e = |m: usize| l + 2.0 * m as f64;
    let ee = |x: f64| x * (x - 1.0) + nf * x - big_l;
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    for m in 1..=order {
        let mut rhs = a[m - 1] * (-2.0 * ee(e(m - 1)) + 2.0 * (nf - 1.0) * e(m - 1) - 4.0 * lambda);
        if m >= 2 {
            rhs += a[m - 2] * (ee(e(m - 2)) - 2.0 * (nf - 1.0) * e(m - 2));
        }
        a[m] = -rhs / ee(e(m));
    }
    // spread onto a unit-step ladder in t starting at t^ℓ
    let mut c = vec![0.0; 2 * order + 1];
    for (m, am) in a.iter().enumerate() {
        c[2 * m] = *am;
    }
    TruncatedSeries::new(l, 1.0, c)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParams(format!("μ = {mu} must be positive")));
    }
    if (mu - mu.round()).abs() < RESONANCE_TOL {
        return Err(Error::Resonance(mu));
    }
    Ok(())
}

/// Solve [f g; f' g'] (a, b) = (v, v') and return b/a after a conditioning check.
fn match_pair(f: (f64, f64), g: (f64, f64), v: (f64, f64), at: f64) -> Result<f64> {
    // column-scale before judging conditioning
    let (sf, sg) = (f.0.abs().max(f.1.abs()), g.0.abs().max(g.1.abs()));
    let m = nalgebra::Matrix2::new(f.0 / sf, g.0 / sg, f.1 / sf, g.1 / sg);
    let svd = m.svd(false, false);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if smin == 0.0 || smax / smin > MAX_COND {
        return Err(Error::MatchingSingular(at));
    }
    let x = m.lu().solve(&nalgebra::Vector2::new(v.0, v.1)).ok_or(Error::MatchingSingular(at))?;
    Ok((x[1] / sg) / (x[0] / sf))
}

pub fn poisson_mode(geom: &ModelGeometry, s: f64) -> Result<RadialSolution> {
    let n = geom.n as f64;
    let mu = s - n / 2.0;
    check_mu(mu)?;
    let order = branch_order(geom.kind);
    let op = geom.operator_series(order)?;
    let fc = frobenius_branch(&op, mu, -1.0, order)?;
    let gc = frobenius_branch(&op, mu, 1.0, order)?;
    let f_branch = TruncatedSeries::new(n / 2.0 - mu, 1.0, fc);
    let g_branch = TruncatedSeries::new(n / 2.0 + mu, 1.0, gc);
    let pair_at = |rho: f64| {
        let (df, dg) = (f_branch.differentiate(), g_branch.differentiate());
        ((f_branch.eval(rho), df.eval(rho)), (g_branch.eval(rho), dg.eval(rho)))
    };

    let (scat, interior, rho_match) = match geom.kind {
        GeometryKind::Halfspace if geom.mode == 0.0 => (0.0, Interior::None, f64::INFINITY),
        GeometryKind::Halfspace => {
            let k = geom.mode;
            let (y_m, y_inf) = (1.0 / k, 40.0 / k);
            let start = bessel_k_asymptotic(geom.n, mu, k, y_inf);
            let v = integrate_mode(geom, mu, y_inf, start, y_m, 1e-13)?;
            let (f, g) = pair_at(y_m);
            (match_pair(f, g, v, y_m)?, Interior::Decaying { y_inf }, y_m)
        }
        GeometryKind::BallGeodesic | GeometryKind::BallLiteral => {
            let t_m = 0.5;
            let rho_m = match geom.kind {
                GeometryKind::BallGeodesic => 2.0 * (1.0 - t_m) / (1.0 + t_m),
                _ => (1.0 - t_m * t_m) / 2.0,
            };
            let (f, g) = pair_at(rho_m);
            let center = center_series(geom.n, geom.mode as usize, mu, CENTER_ORDER);
            let (_, dt, _) = ball_t_of_rho(geom.kind, rho_m);
            let v = (center.eval(t_m), center.differentiate().eval(t_m) * dt);
            let scat = match_pair(f, g, v, rho_m)?;
            // rescale the center series to F + S·G
            let amp = (f.0 + scat * g.0) / v.0;
            (scat, Interior::Center { series: center.scale(amp) }, rho_m)
        }
    };
    Ok(RadialSolution {
        geom: *geom,
        s,
        mu,
        f_branch,
        g_branch,
        connection: (1.0, scat),
        interior,
        rho_match,
    })
}

pub fn scattering_eigenvalue(geom: &ModelGeometry, s: f64) -> Result<f64> {
    Ok(poisson_mode(geom, s)?.scattering())
}

/// Spectral multiplier of the order-2γ_eff GJMS operator on the mode.
pub fn gjms_multiplier(geom: &ModelGeometry, gamma_eff: f64) -> Result<f64> {
    if geom.kind.is_ball() {
        let b = geom.mode + geom.n as f64 / 2.0;
        gamma_ratio(b + gamma_eff, b - gamma_eff)
    } else if geom.mode == 0.0 {
        Ok(if gamma_eff > 0.0 { 0.0 } else { f64::INFINITY })
    } else {
        Ok(geom.mode.powf(2.0 * gamma_eff))
    }
}

/// −2^{2γ−1}Γ(γ)/Γ(1−γ)·lim y^{1−2γ}∂_y U for U = y^{γ−n/2}𝒫(n/2+γ)1,
/// read from the Frobenius data (γ ∈ (0,1)): the limit is 2γ·S.
pub fn neumann_constant(sol: &RadialSolution, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) || (sol.mu - gamma).abs() > 1e-14 {
        return Err(Error::InvalidParams("classical extension needs μ = γ ∈ (0,1)".into()));
    }
    // U = F(y) + y^{2γ}·S·G(y); F = 1 + O(y²) contributes y^{2−2γ} → 0
    let limit = 2.0 * gamma * sol.g_branch.coeffs[0] * sol.scattering();
    Ok(-(2f64.powf(2.0 * gamma - 1.0)) * gamma_ratio(gamma, 1.0 - gamma)? * limit)
}

/// y^{(n−1)/2}e^{−k(y−y₀)}Σ a_m (ky)^{−m}, the large-y form of y^{n/2}K_μ(ky)
/// up to a constant, with its derivative, at y₀.
fn bessel_k_asymptotic(n: usize, mu: f64, k: f64, y0: f64) -> (f64, f64) {
    let z = k * y0;
    let (mut term, mut sum, mut dsum) = (1.0, 1.0, 0.0);
    for m in 1..60 {
        let mf = m as f64;
        term *= (4.0 * mu * mu - (2.0 * mf - 1.0).powi(2)) / (8.0 * mf * z);
        sum += term;
        dsum += -mf / y0 * term;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    let pre = y0.powf((n as f64 - 1.0) / 2.0);
    let v = pre * sum;
    let d = ((n as f64 - 1.0) / (2.0 * y0) - k) * v + pre * dsum;
    (v, d)
}

const TAYLOR_ORDER: usize = 30;

/// Integrate (Δ̃₊ − μ²)v = 0 from `x0` to `x1` with Taylor steps; the
/// coefficient expansions come straight from the rational A, B, C.
pub fn integrate_mode(geom: &ModelGeometry, mu: f64, x0: f64, v0: (f64, f64), x1: f64, tol: f64) -> Result<(f64, f64)> {
    let nf = geom.n as f64;
    let shift = nf * nf / 4.0 - mu * mu;
    let (mut x, mut v, mut dv) = (x0, v0.0, v0.1);
    let dir = (x1 - x0).signum();
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Integration("too many steps".into()));
        }
        let [a, b, c] = geom.coefficients_at(x, TAYLOR_ORDER)?;
        // P2 = A·(x+h)², P1 = B·(x+h), P0 = C + n²/4 − μ²
        let lin = TruncatedSeries::power({
            let mut l = vec![0.0; TAYLOR_ORDER + 1];
            l[0] = x;
            l[1] = 1.0;
            l
        });
        let p2 = a.mul(&lin)?.mul(&lin)?;
        let p1 = b.mul(&lin)?;
        let mut p0 = c.clone();
        p0.coeffs[0] += shift;
        let mut w = vec![0.0; TAYLOR_ORDER + 1];
        w[0] = v;
        w[1] = dv;
        for j in 0..TAYLOR_ORDER - 1 {
            let mut acc = 0.0;
            for i in 0..=j {
                acc += p0.coeffs[i] * w[j - i];
                acc += p1.coeffs[i] * (j - i + 1) as f64 * w[j - i + 1];
                if i >= 1 {
                    acc += p2.coeffs[i] * ((j - i + 2) * (j - i + 1)) as f64 * w[j - i + 2];
                }
            }
            w[j + 2] = -acc / (p2.coeffs[0] * ((j + 2) * (j + 1)) as f64);
        }
        let scale = v.abs().max(dv.abs() * x.abs().max(1e-300)).max(1e-300);
        let mut h = 0.5 * x.abs();
        for j in [TAYLOR_ORDER - 1, TAYLOR_ORDER] {
            if w[j] != 0.0 {
                h = h.min(0.8 * (tol * scale / w[j].abs()).powf(1.0 / j as f64));
            }
        }
        h = h.min((x1 - x).abs());
        let hs = h * dir;
        let (mut nv, mut ndv, mut pw) = (0.0, 0.0, 1.0);
        for j in 0..=TAYLOR_ORDER {
            nv += w[j] * pw;
            if j + 1 <= TAYLOR_ORDER {
                ndv += (j + 1) as f64 * w[j + 1] * pw;
            }
            pw *= hs;
        }
        v = nv;
        dv = ndv;
        x += hs;
        if (x1 - x).abs() < 1e-15 * x1.abs() {
            x = x1;
        }
    }
    Ok((v, dv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::scattering_normalization;
    use crate::numerics::gamma::gamma;

    #[test]
    fn zero_frequency_is_pure_power() {
        let g = ModelGeometry::halfspace(3, 0.0).unwrap();
        let sol = poisson_mode(&g, 2.0).unwrap();
        assert_eq!(sol.scattering(), 0.0);
        assert!(sol.f_branch.coeffs[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn halfspace_recurrence_matches_closed_form() {
        let (k, mu) = (1.7, 0.35);
        let op = ModelGeometry::halfspace(4, k).unwrap().operator_series(12).unwrap();
        let c = frobenius_branch(&op, mu, -1.0, 12).unwrap();
        let mut a = 1.0;
        for m in 1..=6 {
            let mf = m as f64;
            a *= k * k / (4.0 * mf * (mf - mu));
            assert!((c[2 * m] - a).abs() < 1e-14 * a.abs());
            assert_eq!(c[2 * m - 1], 0.0);
        }
    }

    #[test]
    fn halfspace_scattering_closed_form() {
        for &(n, mu, k) in &[(3, 0.5, 1.0), (3, 0.25, 2.0), (5, 1.3, 0.7), (5, 2.3, 1.5)] {
            let s = scattering_eigenvalue(&ModelGeometry::halfspace(n, k).unwrap(), n as f64 / 2.0 + mu).unwrap();
            let exact = (k / 2.0).powf(2.0 * mu) * gamma(-mu).unwrap() / gamma(mu).unwrap();
            assert!((s - exact).abs() < 1e-10 * exact.abs(), "{n} {mu} {k}: {s} vs {exact}");
        }
    }

    #[test]
    fn ball_spherical_mode() {
        let g = ModelGeometry::ball(3, 0).unwrap();
        let s = scattering_eigenvalue(&g, 2.0).unwrap();
        let p = scattering_normalization(0.5).unwrap() * s;
        assert!((p - 1.0).abs() < 1e-10, "{p}");
    }

    #[test]
    fn multiplier_examples() {
        let b = ModelGeometry::ball(3, 1).unwrap();
        assert!((gjms_multiplier(&b, 0.5).unwrap() - 2.0).abs() < 1e-14);
        let h = ModelGeometry::halfspace(3, 2.0).unwrap();
        assert!((gjms_multiplier(&h, 0.75).unwrap() - 2f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn resonant_orders_rejected() {
        let g = ModelGeometry::ball(3, 0).unwrap();
        assert!(matches!(poisson_mode(&g, 2.5), Err(Error::Resonance(_))));
    }
}
