use gjms_lab::constants::{spectral_constants, varsigma, GammaParams};
use gjms_lab::geometry::ModelGeometry;
use gjms_lab::solver::gjms_multiplier;
use gjms_lab::sobolev::{ball_trace_energy, ball_trace_rhs, beckner_lhs, beckner_ratio, extremal_zonal, ZonalFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn extremal_coefficients_decay_geometrically() {
    let t: f64 = 0.3;
    let f = extremal_zonal(3, 0.75, t).unwrap();
    assert!(f.degree() > 10);
    assert!(f.coeffs.iter().all(|c| *c > 0.0));
    // 1 − t·x ∝ 1 − 2sx + s² with t = 2s/(1 + s²): Gegenbauer generating function in s
    let rate = t / (1.0 + (1.0 - t * t).sqrt());
    let ratios: Vec<f64> = f.coeffs.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.iter().all(|r| *r < t), "{ratios:?}");
    let tail = ratios[ratios.len() - 4];
    assert!((tail / rate - 1.0).abs() < 0.1, "{tail} vs {rate}");
}

#[test]
fn extremal_evaluates_back() {
    // the tail cut is in L²; at the poles Y_ℓ(±1) grows like ℓ^{(n−1)/2}, so keep t moderate
    for (n, g, t) in [(3, 0.75, 0.3), (4, 1.4, 0.5), (5, 2.3, 0.4)] {
        let f = extremal_zonal(n, g, t).unwrap();
        let e = (2.0 * g - n as f64) / 2.0;
        for i in 0..20 {
            let x = (std::f64::consts::PI * i as f64 / 19.0).cos();
            let want = (1.0 - t * x).powf(e);
            assert!((f.eval(x) - want).abs() <= 1e-8 * want.abs(), "n={n} x={x}: {:e}", (f.eval(x) - want).abs() / want.abs());
        }
    }
}

#[test]
fn zero_parameter_is_a_constant() {
    let f = extremal_zonal(4, 1.4, 0.0).unwrap();
    assert_eq!(f.coeffs.len(), 1);
}

#[test]
fn extremals_attain_and_others_exceed() {
    for (n, g) in [(3, 0.75), (4, 1.4), (5, 2.3)] {
        for t in [0.0, 0.3, 0.6] {
            let r = beckner_ratio(&extremal_zonal(n, g, t).unwrap(), g).unwrap();
            assert!((r - 1.0).abs() <= 1e-6, "n={n} γ={g} t={t}: {r}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let f = ZonalFunction::random(n, 4, &mut rng).unwrap();
        assert!(beckner_ratio(&f, g).unwrap() > 1.0);
    }
}

#[test]
fn sharp_constant_is_the_constant_mode_multiplier() {
    for (n, g) in [(3, 0.75), (4, 0.5), (5, 2.3), (8, 3.5)] {
        let p = GammaParams::new(n, g).unwrap();
        let b = spectral_constants(&p).unwrap().beckner_gamma_factor;
        let m = gjms_multiplier(&ModelGeometry::ball(n, 0).unwrap(), g).unwrap();
        assert!((b - m).abs() <= 1e-13 * m.abs(), "n={n} γ={g}: {b} vs {m}");
    }
}

#[test]
fn single_datum_collapses_the_trace_sum() {
    let p = GammaParams::new(5, 2.3).unwrap();
    let vs: Vec<f64> = (0..=p.floor_g).map(|j| varsigma(&p, j).unwrap()).collect();
    let f = extremal_zonal(5, p.mu(1).abs(), 0.4).unwrap();
    let mut data = vec![None; p.floor_g + 1];
    data[1] = Some(f.clone());
    let rhs = ball_trace_rhs(&data, &p, &vs).unwrap();
    assert_eq!(rhs, vs[1] * beckner_lhs(&f, p.mu(1).abs()).unwrap());
    // an extremal datum attains the bound
    let e = ball_trace_energy(&data, &p, &vs).unwrap();
    assert!((e - rhs).abs() <= 1e-6 * rhs.abs());
}

#[test]
fn constant_data_reduce_to_the_multiplier() {
    let p = GammaParams::new(4, 1.4).unwrap();
    let vs: Vec<f64> = (0..=p.floor_g).map(|j| varsigma(&p, j).unwrap()).collect();
    let data: Vec<_> = (0..=p.floor_g).map(|_| Some(ZonalFunction::new(4, vec![1.0]).unwrap())).collect();
    let rhs = ball_trace_rhs(&data, &p, &vs).unwrap();
    let e = ball_trace_energy(&data, &p, &vs).unwrap();
    assert!((rhs - e).abs() <= 1e-12 * e.abs());
}
