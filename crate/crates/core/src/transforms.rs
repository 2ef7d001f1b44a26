//! The Möbius map ℳ from the upper halfspace to the ball, its boundary
//! restriction 𝒞 (inverse stereographic projection), Jacobians, and pointwise
//! checks of the isometry and of conformal covariance at j = 0.

use crate::error::{Error, Result};
use crate::geometry::ModelGeometry;
use crate::numerics::gamma::{gamma, gamma_ratio};
use crate::sobolev::ZonalFunction;
use crate::solver::gjms_multiplier;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// ℳ(x, y) = (2x, 1 − |x|² − y²)/((1+y)² + |x|²).
pub fn mobius(x: &[f64], y: f64) -> Vec<f64> {
    let d = (1.0 + y).powi(2) + norm_sq(x);
    let mut w: Vec<f64> = x.iter().map(|v| 2.0 * v / d).collect();
    w.push((1.0 - norm_sq(x) - y * y) / d);
    w
}

/// ℳ⁻¹(w) = (2w', 1 − |w|²)/((1 + w_{n+1})² + |w'|²); ℳ has the same form in
/// both directions.
pub fn mobius_inverse(w: &[f64]) -> (Vec<f64>, f64) {
    let (wp, last) = w.split_at(w.len() - 1);
    let d = (1.0 + last[0]).powi(2) + norm_sq(wp);
    (wp.iter().map(|v| 2.0 * v / d).collect(), (1.0 - norm_sq(w)) / d)
}

/// 𝒞(x) = ℳ(x, 0).
pub fn cayley(x: &[f64]) -> Vec<f64> {
    mobius(x, 0.0)
}

/// Derivative matrix of ℳ, (n+1)×(n+1), columns (∂_{x_1}, …, ∂_{x_n}, ∂_y).
fn mobius_derivative(x: &[f64], y: f64) -> DMatrix<f64> {
    let n = x.len();
    let d = (1.0 + y).powi(2) + norm_sq(x);
    let top = 1.0 - norm_sq(x) - y * y;
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = if i == j { 2.0 / d } else { 0.0 } - 4.0 * x[i] * x[j] / (d * d);
        }
        m[(i, n)] = -4.0 * x[i] * (1.0 + y) / (d * d);
        m[(n, i)] = -2.0 * x[i] / d - 2.0 * top * x[i] / (d * d);
    }
    m[(n, n)] = -2.0 * y / d - 2.0 * top * (1.0 + y) / (d * d);
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    /// (1−|w|²)/2 against 2y/((1+y)²+|x|²)
    pub defining_function: (f64, f64),
    /// |det Dℳ| against (2/((1+y)²+|x|²))^{n+1}
    pub j_mobius: (f64, f64),
    /// √det(D𝒞ᵀD𝒞) against (2/(1+|x|²))^n
    pub j_cayley: (f64, f64),
}

fn rel(p: (f64, f64)) -> f64 {
    let s = p.0.abs().max(p.1.abs());
    if s == 0.0 {
        0.0
    } else {
        (p.0 - p.1).abs() / s
    }
}

impl JacobianReport {
    pub fn max_residual(&self) -> f64 {
        rel(self.defining_function).max(rel(self.j_mobius)).max(rel(self.j_cayley))
    }
}

pub fn jacobian_identities(x: &[f64], y: f64) -> JacobianReport {
    let n = x.len();
    let d = (1.0 + y).powi(2) + norm_sq(x);
    let w = mobius(x, y);
    let dm = mobius_derivative(x, y);
    let dc = mobius_derivative(x, 0.0).columns(0, n).into_owned();
    let gram = dc.transpose() * &dc;
    JacobianReport {
        defining_function: ((1.0 - norm_sq(&w)) / 2.0, 2.0 * y / d),
        j_mobius: (dm.determinant().abs(), (2.0 / d).powi(n as i32 + 1)),
        j_cayley: (gram.determinant().sqrt(), (2.0 / (1.0 + norm_sq(x))).powi(n as i32)),
    }
}

/// v(w) = c₀ + c₁w_{n+1} + c₂|w|² + c₃w₁w_{n+1}, with closed-form ball Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPolynomial {
    pub c: [f64; 4],
}

impl BallPolynomial {
    pub fn eval(&self, w: &[f64]) -> f64 {
        let last = w[w.len() - 1];
        self.c[0] + self.c[1] * last + self.c[2] * norm_sq(w) + self.c[3] * w[0] * last
    }

    /// Δ_𝔹v = ((1−|w|²)²/4)Δv + ((n−1)(1−|w|²)/2)⟨w, ∇v⟩ in dimension n+1.
    pub fn ball_laplacian(&self, w: &[f64]) -> f64 {
        let dim = w.len();
        let n = (dim - 1) as f64;
        let last = w[dim - 1];
        let flat = 2.0 * dim as f64 * self.c[2];
        // ⟨w, ∇v⟩ = c₁w_{n+1} + 2c₂|w|² + 2c₃w₁w_{n+1}
        let radial = self.c[1] * last + 2.0 * self.c[2] * norm_sq(w) + 2.0 * self.c[3] * w[0] * last;
        let s = 1.0 - norm_sq(w);
        s * s / 4.0 * flat + (n - 1.0) * s / 2.0 * radial
    }
}

const FD_STEP: f64 = 1e-3;

/// 4th-order central first and second differences, Richardson-extrapolated.
fn fd_derivs(f: &dyn Fn(f64) -> f64, t: f64) -> (f64, f64) {
    let stencil = |h: f64| {
        let (p2, p1, z, m1, m2) = (f(t + 2.0 * h), f(t + h), f(t), f(t - h), f(t - 2.0 * h));
        ((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h), (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h))
    };
    let (a, b) = (stencil(FD_STEP), stencil(FD_STEP / 2.0));
    ((16.0 * b.0 - a.0) / 15.0, (16.0 * b.1 - a.1) / 15.0)
}

/// max over samples of |(Δ_𝔹v)∘ℳ − Δ_ℍ(v∘ℳ)|, the right side by finite
/// differences. Samples must map to |w| ≤ 0.9.
pub fn isometry_check(v: &BallPolynomial, samples: &[(Vec<f64>, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in samples {
        let w = mobius(x, *y);
        if 1.0 - norm_sq(&w).sqrt() < 0.1 - 1e-12 {
            return Err(Error::InvalidParams("isometry samples must stay 0.1 inside the ball".into()));
        }
        let n = x.len();
        let mut flat = 0.0;
        for i in 0..n {
            let f = |t: f64| {
                let mut xx = x.clone();
                xx[i] = t;
                v.eval(&mobius(&xx, *y))
            };
            flat += fd_derivs(&f, x[i]).1;
        }
        let fy = |t: f64| v.eval(&mobius(x, t));
        let (dy, dyy) = fd_derivs(&fy, *y);
        let halfspace = y * y * (flat + dyy) - (n as f64 - 1.0) * y * dy;
        worst = worst.max((halfspace - v.ball_laplacian(&w)).abs());
    }
    Ok(worst)
}

/// ₂F₁(a, b; c; z) for z ≤ 0 via the Pfaff transformation.
fn hyp2f1_negative(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z > 0.0 {
        return Err(Error::InvalidParams(format!("hypergeometric argument {z} must be ≤ 0")));
    }
    let w = z / (z - 1.0);
    let (a2, b2) = (c - a, b);
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..100_000 {
        let kf = k as f64;
        term *= (a2 + kf) * (b2 + kf) / ((c + kf) * (kf + 1.0)) * w;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Ok((1.0 - z).powf(-b) * sum);
        }
    }
    Err(Error::Integration("hypergeometric series failed to converge".into()))
}

/// (−Δ_x)^γ (1+|x|²)^{−a} on ℝⁿ at radius r.
pub fn fractional_laplacian_bubble(n: usize, gamma_: f64, a: f64, r: f64) -> Result<f64> {
    let h = n as f64 / 2.0;
    let pre = 2f64.powf(2.0 * gamma_) * gamma_ratio(gamma_ + a, a)? * gamma_ratio(gamma_ + h, h)?;
    Ok(pre * hyp2f1_negative(gamma_ + a, gamma_ + h, h, -r * r)?)
}

/// Monomial coefficients of Σ c_ℓ Y_ℓ(s).
fn zonal_monomials(f: &ZonalFunction) -> Vec<f64> {
    let deg = f.degree();
    // interpolation at deg+1 equispaced nodes is exact; the degrees used are small
    let nodes: Vec<f64> = (0..=deg).map(|i| if deg == 0 { 0.0 } else { -1.0 + 2.0 * i as f64 / deg as f64 }).collect();
    let vals: Vec<f64> = nodes.iter().map(|&s| f.eval(s)).collect();
    let vander = DMatrix::from_fn(deg + 1, deg + 1, |i, j| nodes[i].powi(j as i32));
    let sol = vander.lu().solve(&nalgebra::DVector::from_vec(vals)).expect("distinct nodes");
    sol.iter().copied().collect()
}

/// Conformal weight exponents (J_𝒞 power inside, J_𝒞 power outside, J_ℳ
/// power) of the j = 0 covariance displays.
pub fn weight_exponents(n: usize, gamma_: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    ((nf - 2.0 * gamma_) / (2.0 * nf), -(nf + 2.0 * gamma_) / (2.0 * nf), (nf - 2.0 * gamma_) / (2.0 * nf + 2.0))
}

/// max over boundary points x of the relative residual of
/// (P_γF)∘𝒞 = J_𝒞^{−(n+2γ)/2n}(−Δ)^γ(J_𝒞^{(n−2γ)/2n}F∘𝒞), together with the
/// restriction instance B₀^𝔹U = J_𝒞^{(−n+2γ)/2n}B₀^ℍ(J_ℳ^{(n−2γ)/(2n+2)}U∘ℳ).
pub fn covariance_check_b0(f: &ZonalFunction, gamma_: f64, points: &[Vec<f64>]) -> Result<f64> {
    let n = f.n;
    let nf = n as f64;
    if !(gamma_ > 0.0 && gamma_ < nf / 2.0) {
        return Err(Error::ShiftedOrderOutOfRange(gamma_));
    }
    let (inner, outer, jm) = weight_exponents(n, gamma_);
    let a0 = nf * inner;
    // F(s) with s = 2u − 1, u = 1/(1+r²): polynomial in u
    let mono = zonal_monomials(f);
    let mut in_u = vec![0.0; mono.len()];
    for (k, c) in mono.iter().enumerate() {
        // (2u − 1)^k
        for i in 0..=k {
            let binom = gamma(k as f64 + 1.0)? / (gamma(i as f64 + 1.0)? * gamma((k - i) as f64 + 1.0)?);
            in_u[i] += c * binom * 2f64.powi(i as i32) * if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    let mut worst: f64 = 0.0;
    for x in points {
        if x.len() != n {
            return Err(Error::InvalidParams(format!("boundary point must have {n} coordinates")));
        }
        let r2 = norm_sq(x);
        let s = cayley(x)[n];
        let jc = 2.0 / (1.0 + r2);
        let mut lhs = 0.0;
        for (l, c) in f.coeffs.iter().enumerate() {
            if *c != 0.0 {
                let mut basis = ZonalFunction::new(n, vec![0.0; l + 1])?;
                basis.coeffs[l] = 1.0;
                lhs += gjms_multiplier(&ModelGeometry::ball(n, l)?, gamma_)? * c * basis.eval(s);
            }
        }
        let mut frac = 0.0;
        for (m, q) in in_u.iter().enumerate() {
            if *q != 0.0 {
                frac += q * 2f64.powf(a0) * fractional_laplacian_bubble(n, gamma_, a0 + m as f64, r2.sqrt())?;
            }
        }
        let rhs = jc.powf(nf * outer) * frac;
        let scale = lhs.abs().max(rhs.abs()).max(f.coeffs.iter().fold(0.0, |a: f64, c| a.max(c.abs())));
        worst = worst.max((lhs - rhs).abs() / scale);

        // restriction instance, U(w) = F(w_{n+1}) extended to the ball
        let u_at = |w: &[f64]| f.eval(w[n]);
        let jm_boundary = jc.powi(n as i32 + 1);
        let b_half = jm_boundary.powf(jm) * u_at(&mobius(x, 0.0));
        let b_ball = jc.powi(n as i32).powf(-inner) * b_half;
        let r = (b_ball - u_at(&cayley(x))).abs() / u_at(&cayley(x)).abs().max(1.0);
        worst = worst.max(r);
    }
    Ok(worst)
}
