use gjms_lab::constants::{c_gamma_j, GammaParams};
use gjms_lab::energy::{BoundaryData, ModeContext, Profile, TraceConstants};
use gjms_lab::expansion::{
    apply_factor, apply_l2k, apply_l_plus, boundary_operator, default_order, BoundaryIndex, Ladder, TwoBranchSeries,
};
use gjms_lab::geometry::ModelGeometry;
use gjms_lab::solver::gjms_multiplier;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(geom: ModelGeometry, g: f64) -> ModeContext {
    let n = geom.n;
    ModeContext::new(geom, GammaParams::new(n, g).unwrap()).unwrap()
}

fn single(p: &GammaParams, big_j: usize) -> BoundaryData {
    let mut d = BoundaryData::zeros(p);
    if big_j <= p.half_floor() {
        d.f[big_j] = 1.0;
    } else {
        d.phi[p.floor_g - big_j] = 1.0;
    }
    d
}

/// Every listed boundary operator of Ũ: (index, value).
fn read_all(c: &ModeContext, u: &TwoBranchSeries) -> Vec<(BoundaryIndex, f64)> {
    let p = &c.params;
    (0..=p.floor_g)
        .flat_map(|j| [BoundaryIndex::even(j), BoundaryIndex::shifted(j)])
        .map(|idx| (idx, boundary_operator(u, idx, &c.op).unwrap()))
        .collect()
}

#[test]
fn poisson_summands_are_annihilated() {
    for (geom, g) in [
        (ModelGeometry::halfspace(3, 1.0).unwrap(), 0.6),
        (ModelGeometry::ball(4, 2).unwrap(), 1.4),
        (ModelGeometry::ball(5, 5).unwrap(), 2.3),
    ] {
        let c = ctx(geom, g);
        for big_j in 0..=c.params.floor_g {
            let u = c.extension_series(&single(&c.params, big_j)).unwrap();
            let scale = u.norm_inf().max(1.0);
            let own = apply_factor(&u, &c.op, big_j).unwrap();
            assert!(own.norm_inf() <= 1e-10 * scale, "γ={g} J={big_j}: {:e}", own.norm_inf() / scale);
            // the full product multiplies the rounding of the kept rungs by ~m^{2k}
            if c.params.k <= 2 {
                let l = apply_l2k(&u, &c.op).unwrap();
                assert!(l.norm_inf() <= 1e-10 * scale, "γ={g} J={big_j}: {:e}", l.norm_inf() / scale);
            }
        }
    }
}

#[test]
fn shifted_atom_is_an_indicial_root() {
    let p = GammaParams::new(3, 0.7).unwrap();
    let order = default_order(&p);
    let op = ModelGeometry::halfspace(3, 0.0).unwrap().operator_series(order).unwrap();
    let u = TwoBranchSeries::atom(p, order, Ladder::Shifted, 0, 1.0);
    let l = apply_l2k(&u, &op).unwrap();
    assert_eq!(l.norm_inf(), 0.0);
}

#[test]
fn l_plus_is_the_factor_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (geom, g) in [(ModelGeometry::halfspace(5, 1.5).unwrap(), 1.3), (ModelGeometry::ball(5, 3).unwrap(), 2.3)] {
        let p = GammaParams::new(geom.n, g).unwrap();
        let order = default_order(&p);
        let op = geom.operator_series(order).unwrap();
        let mut u = TwoBranchSeries::zeros(p, order);
        for m in (0..=order).step_by(2) {
            u.even[m] = rng.gen_range(-1.0..1.0);
        }
        let mut composed = u.clone();
        for big_j in 0..=p.floor_g {
            composed = apply_factor(&composed, &op, big_j).unwrap();
        }
        let composed = composed.scale(if p.k % 2 == 0 { 1.0 } else { -1.0 });
        let direct = apply_l_plus(&u, &op).unwrap();
        let scale = direct.norm_inf().max(1.0);
        assert!(direct.sub(&composed).norm_inf() <= 1e-12 * scale, "γ={g}");
    }
}

#[test]
fn extension_reproduces_its_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (geom, g) in [
        (ModelGeometry::halfspace(3, 2.0).unwrap(), 0.75),
        (ModelGeometry::ball(4, 6).unwrap(), 1.4),
        (ModelGeometry::ball(8, 1).unwrap(), 3.5),
    ] {
        let c = ctx(geom, g);
        let p = c.params;
        let data = BoundaryData::random(&p, &mut rng);
        let u = c.extension_series(&data).unwrap();
        for big_j in 0..=p.floor_g {
            let (home, _) = gjms_lab::energy::pairing(&p, big_j);
            let got = boundary_operator(&u, home, &c.op).unwrap();
            let want = data.coefficient(&p, big_j);
            assert!((got - want).abs() <= 1e-8, "γ={g} {home}: {got} vs {want}");
        }
    }
}

#[test]
fn zero_data_gives_zero() {
    let c = ctx(ModelGeometry::ball(5, 4).unwrap(), 2.3);
    let zero = BoundaryData::zeros(&c.params);
    assert_eq!(c.extension_series(&zero).unwrap().norm_inf(), 0.0);
    assert!(c.extension_residual(&zero).unwrap().iter().all(|r| r.residual == 0.0));
    let k = TraceConstants::from_pi(&c.params).unwrap();
    assert_eq!(c.trace_gap(&Profile::extension(zero), &k).unwrap(), 0.0);
}

#[test]
fn unit_datum_reads_back_alone() {
    let c = ctx(ModelGeometry::ball(3, 0).unwrap(), 0.5);
    let u = c.extension_series(&single(&c.params, 0)).unwrap();
    for (idx, v) in read_all(&c, &u) {
        if idx == BoundaryIndex::even(0) {
            assert!((v - 1.0).abs() <= 1e-8);
        } else if idx != BoundaryIndex::shifted(0) {
            assert!(v.abs() <= 1e-8, "{idx}: {v}");
        }
    }
}

#[test]
fn single_datum_on_the_ball_scatters_to_the_multiplier() {
    for (n, g) in [(3, 0.6), (4, 1.4), (5, 2.3)] {
        let c = ctx(ModelGeometry::ball(n, 0).unwrap(), g);
        let p = c.params;
        let u = c.extension_series(&single(&p, 0)).unwrap();
        let top = boundary_operator(&u, BoundaryIndex::shifted(p.floor_g), &c.op).unwrap();
        let want = c_gamma_j(&p, 0).unwrap() * gjms_multiplier(&c.geom, g).unwrap();
        assert!((top - want).abs() <= 1e-6 * want.abs(), "n={n} γ={g}: {top} vs {want}");
    }
}

#[test]
fn extension_identities_on_the_acceptance_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for l in 0..=6 {
        let c = ctx(ModelGeometry::ball(5, l).unwrap(), 2.3);
        let data = BoundaryData::random(&c.params, &mut rng);
        for r in c.extension_residual(&data).unwrap() {
            assert!(r.residual <= 1e-6, "ℓ={l} {:?} j={}: {:e}", r.family, r.j, r.residual);
        }
    }
}

#[test]
fn extension_attains_the_trace_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (geom, g) in [(ModelGeometry::halfspace(3, 1.0).unwrap(), 0.6), (ModelGeometry::ball(4, 2).unwrap(), 1.4)] {
        let c = ctx(geom, g);
        let k = TraceConstants::from_pi(&c.params).unwrap();
        let u = Profile::extension(BoundaryData::random(&c.params, &mut rng));
        let e = c.energy(&u, &k.sigma).unwrap();
        let t = c.trace_term(&u, &k.varsigma).unwrap();
        assert!((e - t).abs() <= 1e-6 * e.abs(), "γ={g}: E={e} trace={t}");
    }
}

#[test]
fn identity_on_a_pure_bump_is_the_bulk() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (geom, g) in [(ModelGeometry::halfspace(3, 0.5).unwrap(), 0.75), (ModelGeometry::ball(5, 1).unwrap(), 2.3)] {
        let c = ctx(geom, g);
        let k = TraceConstants::theorem(&c.params).unwrap();
        let w = Profile { data: BoundaryData::zeros(&c.params), extra: Some(c.random_extra(&mut rng)) };
        let bv = c.boundary_values(&w).unwrap();
        assert!(bv.data.iter().all(|x| x.abs() <= 1e-10));
        let id = c.main_identity(&w, &w, &k).unwrap();
        assert!(id.residual <= 1e-6, "γ={g}: {:e}", id.residual);
        assert!((c.bulk(&w, &w).unwrap() - c.a1(&w, &w).unwrap()).abs() <= 1e-6 * id.lhs.abs());
    }
}

#[test]
fn two_to_the_minus_n_does_not_close() {
    let c = ctx(ModelGeometry::halfspace(3, 1.0).unwrap(), 0.6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (u, v) = (c.random_profile(&mut rng), c.random_profile(&mut rng));
    let good = c.main_identity(&u, &v, &TraceConstants::theorem(&c.params).unwrap()).unwrap();
    let bad = c.main_identity(&u, &v, &TraceConstants::proof_variant(&c.params).unwrap()).unwrap();
    assert!(good.residual <= 1e-6, "{:e}", good.residual);
    assert!(bad.residual > 1e-2, "{:e}", bad.residual);
}

#[test]
fn lambda1_is_positive() {
    for (geom, g) in [(ModelGeometry::halfspace(3, 1.0).unwrap(), 0.5), (ModelGeometry::ball(4, 0).unwrap(), 1.4)] {
        let c = ctx(geom, g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials: Vec<_> = (0..20).map(|_| c.random_extra(&mut rng)).collect();
        let lam = c.lambda1_probe(&trials).unwrap();
        assert!(lam > 0.0 && lam.is_finite(), "γ={g}: {lam}");
    }
}
