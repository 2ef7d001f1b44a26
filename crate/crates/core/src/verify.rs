//! Verification suites over a (geometry, n, γ, mode) grid, producing flat
//! check records and a summary report.
//!
//! Every grid point seeds its own generator from the run seed and the point's
//! id, so results do not depend on scheduling; records are sorted by id.

use crate::constants::{
    b_even, b_even_gamma_form, b_shifted, b_shifted_gamma_form, pi_gamma_form, pi_product, rel_diff,
    scattering_normalization, scattering_normalization_printed, sigma_from_pi, sigma_theorem, spectral_constants,
    varsigma, varsigma_from_sigma, GammaParams,
};
use crate::energy::{BoundaryData, BoundaryValues, ModeContext, Profile, TraceConstants};
use crate::error::{Error, Result};
use crate::expansion::TwoBranchSeries;
use crate::geometry::{GeometryKind, ModelGeometry};
use crate::sobolev::{beckner_ratio, extremal_zonal, ZonalFunction};
use crate::solver::{gjms_multiplier, neumann_constant, poisson_mode};
use crate::transforms::{
    covariance_check_b0, isometry_check, jacobian_identities, mobius_inverse, weight_exponents, BallPolynomial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;
/// γ closer than this to an integer is rejected by the grid.
pub const GRID_INTEGER_GAP: f64 = 1e-3;
pub const THREADS_ENV: &str = "GJMS_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Constants,
    Neumann,
    Scattering,
    Extension,
    Symmetry,
    Trace,
    Identity,
    Beckner,
    Transforms,
    Lambda1,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Constants,
        Suite::Neumann,
        Suite::Scattering,
        Suite::Extension,
        Suite::Symmetry,
        Suite::Trace,
        Suite::Identity,
        Suite::Beckner,
        Suite::Transforms,
        Suite::Lambda1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Constants => "constants",
            Suite::Neumann => "neumann",
            Suite::Scattering => "scattering",
            Suite::Extension => "extension",
            Suite::Symmetry => "symmetry",
            Suite::Trace => "trace",
            Suite::Identity => "identity",
            Suite::Beckner => "beckner",
            Suite::Transforms => "transforms",
            Suite::Lambda1 => "lambda1",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub geometries: Vec<GeometryKind>,
    pub ns: Vec<usize>,
    pub gammas: Vec<f64>,
    /// Ball degrees 0..=lmax.
    pub lmax: usize,
    /// Halfspace frequencies |ξ|.
    pub xis: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
    pub order: Option<usize>,
    pub experimental: bool,
    /// Random pairs per grid point for the symmetry suite.
    pub pairs: usize,
    /// Random pairs per grid point for the main identity.
    pub identity_pairs: usize,
    /// Bumps per grid point for the trace suite.
    pub bumps: usize,
    pub lambda1_trials: usize,
    pub zonal_samples: usize,
    pub transform_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            geometries: vec![GeometryKind::Halfspace, GeometryKind::BallGeodesic],
            ns: vec![3],
            gammas: vec![0.4, 0.75, 1.3, 2.25],
            lmax: 6,
            xis: vec![0.5, 1.0, 2.0],
            tol: 1e-6,
            seed: 42,
            order: None,
            experimental: false,
            pairs: 50,
            identity_pairs: 5,
            bumps: 20,
            lambda1_trials: 20,
            zonal_samples: 30,
            transform_points: 50,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.geometries.contains(&GeometryKind::BallLiteral) && !self.experimental {
            return bad("geometry ball-literal requires --experimental".into());
        }
        if self.ns.is_empty() || self.gammas.is_empty() || self.geometries.is_empty() {
            return bad("empty grid".into());
        }
        if let Some(n) = self.ns.iter().find(|&&n| n < 3) {
            return bad(format!("n = {n} must be at least 3"));
        }
        for &g in &self.gammas {
            if !(g > 0.0 && g.is_finite()) {
                return bad(format!("gamma = {g} must be positive"));
            }
            let d = (g - g.round()).abs();
            if d < GRID_INTEGER_GAP {
                return bad(format!("gamma = {g} lies within {GRID_INTEGER_GAP} of an integer"));
            }
        }
        if let Some(x) = self.xis.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return bad(format!("|xi| = {x} must be positive"));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol = {} must be positive", self.tol));
        }
        if self.points().is_empty() {
            return bad("no (n, gamma) pair satisfies gamma < n/2".into());
        }
        Ok(())
    }

    /// Valid (n, γ) pairs of the grid.
    pub fn points(&self) -> Vec<GammaParams> {
        self.ns
            .iter()
            .flat_map(|&n| self.gammas.iter().filter_map(move |&g| GammaParams::new(n, g).ok()))
            .collect()
    }

    /// (n, γ) pairs dropped because γ ≥ n/2.
    pub fn skipped(&self) -> Vec<String> {
        self.ns
            .iter()
            .flat_map(|&n| {
                self.gammas
                    .iter()
                    .filter(move |&&g| GammaParams::new(n, g).is_err())
                    .map(move |g| format!("n={n} gamma={g}: gamma >= n/2"))
            })
            .collect()
    }

    fn modes(&self, n: usize) -> Result<Vec<ModelGeometry>> {
        let mut out = vec![];
        for &kind in &self.geometries {
            match kind {
                GeometryKind::Halfspace => {
                    for &xi in &self.xis {
                        out.push(ModelGeometry::halfspace(n, xi)?);
                    }
                }
                _ => {
                    for l in 0..=self.lmax {
                        out.push(ModelGeometry::new(kind, n, l as f64)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check_id: String,
    pub geometry: Option<String>,
    pub n: usize,
    pub gamma: Option<f64>,
    pub j: Option<usize>,
    pub mode: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub provenance_note: String,
}

/// A reported quantity that is not a pass/fail check: alternative
/// normalizations, discrepancy confirmations, probe outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub key: String,
    pub value: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
    pub records: Vec<CheckRecord>,
    pub findings: Vec<Finding>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: VerifyConfig,
    pub skipped: Vec<String>,
    pub suites: Vec<SuiteReport>,
    pub findings: Vec<Finding>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteReport::ok)
    }
}

/// FNV-1a; stable across platforms and releases, unlike std's hasher.
fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn rng_for(seed: u64, id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stable_hash(id))
}

/// Where a check sits in the grid.
#[derive(Debug, Clone)]
struct Site {
    suite: Suite,
    prefix: String,
    geometry: Option<String>,
    n: usize,
    gamma: Option<f64>,
    mode: Option<f64>,
    tol: f64,
}

impl Site {
    fn new(suite: Suite, n: usize, gamma: Option<f64>, geom: Option<&ModelGeometry>, tol: f64) -> Self {
        let mut prefix = format!("{suite}/n{n}");
        if let Some(g) = gamma {
            prefix += &format!("/g{g:.4}");
        }
        if let Some(m) = geom {
            prefix += &format!("/{}/m{:08.4}", m.kind, m.mode);
        }
        Self {
            suite,
            prefix,
            geometry: geom.map(|m| m.kind.to_string()),
            n,
            gamma,
            mode: geom.map(|m| m.mode),
            tol,
        }
    }

    fn id(&self, name: &str) -> String {
        format!("{}/{name}", self.prefix)
    }

    fn record(&self, name: &str, j: Option<usize>, lhs: f64, rhs: f64, residual: f64, note: &str) -> CheckRecord {
        CheckRecord {
            suite: self.suite,
            check_id: match j {
                Some(j) => self.id(&format!("{name}/j{j}")),
                None => self.id(name),
            },
            geometry: self.geometry.clone(),
            n: self.n,
            gamma: self.gamma,
            j,
            mode: self.mode,
            lhs,
            rhs,
            residual,
            tol: self.tol,
            pass: residual <= self.tol,
            provenance_note: note.into(),
        }
    }

    /// lhs against rhs, relative to max(|lhs|, |rhs|, floor).
    fn compare(&self, name: &str, j: Option<usize>, lhs: f64, rhs: f64, floor: f64, note: &str) -> CheckRecord {
        let s = lhs.abs().max(rhs.abs()).max(floor);
        let r = if s == 0.0 { 0.0 } else { (lhs - rhs).abs() / s };
        self.record(name, j, lhs, rhs, if r.is_nan() { f64::INFINITY } else { r }, note)
    }

    /// Passes iff value > 0 (independent of tol); residual is the relative shortfall.
    fn positive(&self, name: &str, j: Option<usize>, value: f64, scale: f64, note: &str) -> CheckRecord {
        let mut r = self.record(name, j, value, 0.0, (-value).max(0.0) / scale.abs().max(f64::MIN_POSITIVE), note);
        r.pass = value > 0.0;
        r
    }

    fn failure(&self, name: &str, e: &Error) -> CheckRecord {
        let mut r = self.record(name, None, f64::NAN, f64::NAN, f64::INFINITY, &format!("error: {e}"));
        r.pass = false;
        r
    }
}

/// Per grid point output: records plus named alternative residuals that are
/// max-reduced into findings.
#[derive(Default)]
struct Partial {
    records: Vec<CheckRecord>,
    alternates: Vec<(String, f64)>,
}

impl Partial {
    fn guard(site: &Site, name: &str, f: impl FnOnce(&mut Partial) -> Result<()>) -> Partial {
        let mut p = Partial::default();
        if let Err(e) = f(&mut p) {
            p.records.push(site.failure(name, &e));
        }
        p
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&t| t > 0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.or(env).unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))
}

fn finish(suite: Suite, parts: Vec<Partial>, notes: &[(&str, &str)]) -> SuiteReport {
    let mut records = vec![];
    let mut alt: Vec<(String, f64)> = vec![];
    for p in parts {
        records.extend(p.records);
        for (k, v) in p.alternates {
            match alt.iter_mut().find(|(a, _)| *a == k) {
                Some(slot) => slot.1 = if v.is_nan() || slot.1.is_nan() { f64::NAN } else { slot.1.max(v) },
                None => alt.push((k, v)),
            }
        }
    }
    records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    alt.sort_by(|a, b| a.0.cmp(&b.0));
    let failed = records.iter().filter(|r| !r.pass).count();
    let findings = alt
        .into_iter()
        .map(|(key, value)| {
            let note = notes.iter().find(|(k, _)| *k == key).map_or("", |(_, n)| n).to_string();
            Finding { key: format!("{suite}/{key}"), value: Some(value), note }
        })
        .collect();
    SuiteReport {
        suite,
        passed: records.len() - failed,
        failed,
        max_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
        records,
        findings,
    }
}

/// Grid of (geometry mode, γ) contexts for the energy-type suites.
fn contexts(cfg: &VerifyConfig) -> Result<Vec<(ModelGeometry, GammaParams)>> {
    let mut out = vec![];
    for p in cfg.points() {
        for g in cfg.modes(p.n)? {
            out.push((g, p));
        }
    }
    Ok(out)
}

fn random_bump(ctx: &ModeContext, rng: &mut impl Rng) -> TwoBranchSeries {
    // rungs ≥ ⌊γ⌋ + 1 on both ladders: every boundary operator vanishes
    let p = &ctx.params;
    let mut e = TwoBranchSeries::zeros(*p, ctx.order);
    for q in p.k..=(p.k + 1) {
        e.even[2 * q] = rng.gen_range(-1.0..1.0);
        e.shifted[2 * q] = rng.gen_range(-1.0..1.0);
    }
    e
}

fn per_context(
    cfg: &VerifyConfig,
    suite: Suite,
    body: impl Fn(&Site, &ModeContext, &mut ChaCha8Rng, &mut Partial) -> Result<()> + Sync,
) -> Result<Vec<Partial>> {
    let grid = contexts(cfg)?;
    Ok(grid
        .par_iter()
        .map(|(geom, p)| {
            let site = Site::new(suite, p.n, Some(p.gamma), Some(geom), cfg.tol);
            Partial::guard(&site, "setup", |out| {
                let ctx = ModeContext::with_order(*geom, *p, cfg.order)?;
                let mut rng = rng_for(cfg.seed, &site.prefix);
                body(&site, &ctx, &mut rng, out)
            })
        })
        .collect())
}

fn run_constants(cfg: &VerifyConfig) -> SuiteReport {
    let parts = cfg
        .points()
        .par_iter()
        .map(|p| {
            let site = Site::new(Suite::Constants, p.n, Some(p.gamma), None, cfg.tol);
            Partial::guard(&site, "setup", |out| {
                let note = "product form vs Gamma closed form";
                for j in 0..=p.half_floor() {
                    out.records.push(site.compare("b-even", Some(j), b_even(p, j), b_even_gamma_form(p, j)?, 0.0, note));
                }
                for j in 0..p.n_phi() {
                    let r = site.compare("b-shifted", Some(j), b_shifted(p, j), b_shifted_gamma_form(p, j)?, 0.0, note);
                    out.records.push(r);
                }
                for j in 0..=p.floor_g {
                    out.records.push(site.compare("pi", Some(j), pi_product(p, j), pi_gamma_form(p, j)?, 0.0, note));
                    let s = sigma_theorem(p, j)?;
                    let flux = 2.0 * p.mu(j).abs() * pi_gamma_form(p, j)?;
                    out.records.push(site.compare("sigma", Some(j), s, flux, 0.0, "sigma display vs 2|gamma-2j| pi_j"));
                    let vs = varsigma(p, j)?;
                    let from = varsigma_from_sigma(p, j, flux, false)?;
                    out.records.push(site.compare("varsigma", Some(j), vs, from, 0.0, "varsigma display vs -c 2|gamma-2j| pi_j"));
                    let ratio = sigma_from_pi(p, j)? / s / 4f64.powi(p.floor_g as i32);
                    out.alternates.push(("sigma-4-power-ratio-deviation".into(), (ratio - 1.0).abs()));
                }
                Ok(())
            })
        })
        .collect();
    finish(
        Suite::Constants,
        parts,
        &[(
            "sigma-4-power-ratio-deviation",
            "max |2|gamma-2j|pi_j / (4^floor(gamma) sigma_display) - 1|; zero confirms the display drops exactly 4^floor(gamma)",
        )],
    )
}

fn run_neumann(cfg: &VerifyConfig) -> SuiteReport {
    let parts = cfg
        .points()
        .into_iter()
        .filter(|p| p.gamma < 1.0)
        .flat_map(|p| cfg.xis.iter().map(move |&xi| (p, xi)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(p, xi)| {
            let geom = ModelGeometry::halfspace(p.n, xi).expect("validated");
            let site = Site::new(Suite::Neumann, p.n, Some(p.gamma), Some(&geom), cfg.tol);
            Partial::guard(&site, "neumann", |out| {
                let sol = poisson_mode(&geom, p.nf() / 2.0 + p.gamma)?;
                let lhs = neumann_constant(&sol, p.gamma)?;
                let rhs = xi.powf(2.0 * p.gamma);
                out.records.push(site.compare("neumann", None, lhs, rhs, 0.0, "weighted Neumann limit vs |xi|^(2 gamma)"));
                Ok(())
            })
        })
        .collect();
    finish(Suite::Neumann, parts, &[])
}

fn run_scattering(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = contexts(cfg)?
        .par_iter()
        .map(|(geom, p)| {
            let site = Site::new(Suite::Scattering, p.n, Some(p.gamma), Some(geom), cfg.tol);
            Partial::guard(&site, "scattering", |out| {
                let s = poisson_mode(geom, p.nf() / 2.0 + p.gamma)?.scattering();
                let m = gjms_multiplier(geom, p.gamma)?;
                let lhs = scattering_normalization(p.gamma)? * s;
                out.records.push(site.compare("multiplier", None, lhs, m, 0.0, "c_gamma S(n/2+gamma) vs spectral multiplier"));
                if m != 0.0 {
                    let ratio = scattering_normalization_printed(p.gamma)? * s / m;
                    out.alternates.push(("printed-c-ratio-deviation".into(), (ratio - 2f64.powf(-p.gamma)).abs()));
                }
                Ok(())
            })
        })
        .collect();
    Ok(finish(
        Suite::Scattering,
        parts,
        &[(
            "printed-c-ratio-deviation",
            "max |c_printed S / multiplier - 2^-gamma|; zero confirms the printed c_gamma is off by exactly 2^-gamma",
        )],
    ))
}

fn run_extension(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = per_context(cfg, Suite::Extension, |site, ctx, rng, out| {
        let data = BoundaryData::random(&ctx.params, rng);
        for c in ctx.extension_residual(&data)? {
            let name = match c.family {
                crate::energy::ExtensionFamily::F => "f-family",
                crate::energy::ExtensionFamily::Phi => "phi-family",
            };
            out.records.push(site.record(name, Some(c.j), c.lhs, c.rhs, c.residual, "boundary operator vs c P B"));
            out.alternates.push(("printed-constants-residual".into(), c.residual_printed));
        }
        Ok(())
    })?;
    Ok(finish(
        Suite::Extension,
        parts,
        &[("printed-constants-residual", "max residual with the printed c_{gamma,j}, d_{gamma,j}")],
    ))
}

fn alternates(p: &GammaParams) -> Result<[TraceConstants; 2]> {
    Ok([TraceConstants::from_pi(p)?, TraceConstants::proof_variant(p)?])
}

fn run_symmetry(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = per_context(cfg, Suite::Symmetry, |site, ctx, rng, out| {
        let thm = TraceConstants::theorem(&ctx.params)?;
        let alt = alternates(&ctx.params)?;
        for i in 0..cfg.pairs {
            let (u, v) = (ctx.random_profile(rng), ctx.random_profile(rng));
            // the bulk parts do not depend on σ
            let (buv, bvu) = (ctx.bulk(&u, &v)?, ctx.bulk(&v, &u)?);
            let (bu, bv) = (ctx.boundary_values(&u)?, ctx.boundary_values(&v)?);
            let sym = |k: &TraceConstants| -> Result<(f64, f64, f64)> {
                let q = |bulk: f64, x: &BoundaryValues, y: &BoundaryValues| {
                    bulk - (0..k.sigma.len()).map(|j| k.sigma[j] * x.data[j] * y.partner[j]).sum::<f64>()
                };
                let (a, b) = (q(buv, &bu, &bv), q(bvu, &bv, &bu));
                Ok((a, b, (a - b).abs() / a.abs().max(1.0)))
            };
            let (a, b, r) = sym(&thm)?;
            out.records.push(site.record(&format!("pair{i:03}"), None, a, b, r, "Q(U,V) vs Q(V,U), theorem sigma"));
            for k in &alt {
                out.alternates.push((format!("residual-sigma-{}", k.label), sym(k)?.2));
            }
        }
        Ok(())
    })?;
    Ok(finish(
        Suite::Symmetry,
        parts,
        &[
            ("residual-sigma-2|mu|pi", "max symmetry residual with sigma_j = 2|gamma-2j| pi_j"),
            ("residual-sigma-2^-n", "max symmetry residual with sigma_j = 2^-n pi_j (2 gamma - 4j)"),
        ],
    ))
}

fn run_trace(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = per_context(cfg, Suite::Trace, |site, ctx, rng, out| {
        let k = TraceConstants::theorem(&ctx.params)?;
        let data = BoundaryData::random(&ctx.params, rng);
        let ext = Profile::extension(data.clone());
        let e0 = ctx.energy(&ext, &k.sigma)?;
        let t0 = ctx.trace_term(&ext, &k.varsigma)?;
        out.records.push(site.compare("equality", None, e0, t0, 0.0, "E(U~) vs trace term"));
        for i in 0..cfg.bumps {
            let eta = random_bump(ctx, rng);
            let u = Profile { data: data.clone(), extra: Some(eta.clone()) };
            let gap = ctx.trace_gap(&u, &k)?;
            let e = ctx.energy(&u, &k.sigma)?;
            out.records.push(site.positive(&format!("bump{i:02}"), None, gap, e, "gap(U~ + eta) > 0"));
            let bump = Profile { data: BoundaryData::zeros(&ctx.params), extra: Some(eta) };
            let a1 = ctx.a1(&bump, &bump)?;
            out.records.push(site.compare(
                &format!("additivity{i:02}"),
                None,
                e,
                e0 + a1,
                0.0,
                "E(U~ + eta) vs E(U~) + A1(eta, eta)",
            ));
        }
        Ok(())
    })?;
    Ok(finish(Suite::Trace, parts, &[]))
}

fn run_identity(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = per_context(cfg, Suite::Identity, |site, ctx, rng, out| {
        let thm = TraceConstants::theorem(&ctx.params)?;
        let alt = alternates(&ctx.params)?;
        for i in 0..cfg.identity_pairs {
            let (u, v) = (ctx.random_profile(rng), ctx.random_profile(rng));
            let c = ctx.main_identity(&u, &v, &thm)?;
            out.records.push(site.record(&format!("pair{i:02}"), None, c.lhs, c.rhs, c.residual, "bulk vs A1 + boundary sums, theorem sigma"));
            for k in &alt {
                out.alternates.push((format!("residual-sigma-{}", k.label), ctx.main_identity(&u, &v, k)?.residual));
            }
        }
        Ok(())
    })?;
    Ok(finish(
        Suite::Identity,
        parts,
        &[
            ("residual-sigma-2|mu|pi", "max identity residual with sigma_j = 2|gamma-2j| pi_j"),
            ("residual-sigma-2^-n", "max identity residual with sigma_j = 2^-n pi_j (2 gamma - 4j)"),
        ],
    ))
}

fn run_beckner(cfg: &VerifyConfig) -> SuiteReport {
    let parts = cfg
        .points()
        .par_iter()
        .map(|p| {
            let site = Site::new(Suite::Beckner, p.n, Some(p.gamma), None, cfg.tol);
            Partial::guard(&site, "beckner", |out| {
                for t in [0.0, 0.3, 0.6] {
                    let r = beckner_ratio(&extremal_zonal(p.n, p.gamma, t)?, p.gamma)?;
                    out.records.push(site.compare(&format!("extremal-t{t:.1}"), None, r, 1.0, 0.0, "extremal ratio = 1"));
                }
                let mut rng = rng_for(cfg.seed, &site.prefix);
                for i in 0..cfg.zonal_samples {
                    let degree = rng.gen_range(1..=cfg.lmax.max(1));
                    let r = beckner_ratio(&ZonalFunction::random(p.n, degree, &mut rng)?, p.gamma)?;
                    let mut rec = site.record(&format!("random{i:02}"), None, r, 1.0, (1.0 - r).max(0.0), "ratio >= 1");
                    rec.pass = rec.residual <= cfg.tol;
                    out.records.push(rec);
                }
                let sc = spectral_constants(p)?;
                let m0 = gjms_multiplier(&ModelGeometry::ball(p.n, 0)?, p.gamma)?;
                out.records.push(site.compare("sharp-constant", None, sc.beckner_gamma_factor, m0, 0.0, "Gamma factor vs l=0 multiplier"));
                Ok(())
            })
        })
        .collect();
    finish(Suite::Beckner, parts, &[])
}

fn run_transforms(cfg: &VerifyConfig) -> SuiteReport {
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut parts: Vec<Partial> = ns
        .par_iter()
        .map(|&n| {
            let site = Site::new(Suite::Transforms, n, None, None, cfg.tol);
            Partial::guard(&site, "transforms", |out| {
                let mut rng = rng_for(cfg.seed, &site.prefix);
                for i in 0..cfg.transform_points {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let y = rng.gen_range(0.05..3.0);
                    let r = jacobian_identities(&x, y);
                    let mut rec = site.record(&format!("jacobian{i:02}"), None, r.j_mobius.0, r.j_mobius.1, r.max_residual(), "Jacobians and defining function vs closed forms");
                    rec.pass = rec.residual <= cfg.tol;
                    out.records.push(rec);
                }
                // samples mapped from |w| ≤ 0.9
                let samples: Vec<(Vec<f64>, f64)> = (0..10)
                    .map(|_| {
                        let w: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let r = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                        let target = 0.9 * rng.gen_range(0.0f64..1.0).powf(1.0 / (n as f64 + 1.0));
                        mobius_inverse(&w.iter().map(|v| v * target / r).collect::<Vec<_>>())
                    })
                    .collect();
                for (i, c) in [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.3, -0.7, 0.5, 1.1]]
                    .into_iter()
                    .enumerate()
                {
                    let v = BallPolynomial { c };
                    let r = isometry_check(&v, &samples)?;
                    out.records.push(site.record(&format!("isometry{i}"), None, r, 0.0, r, "Laplacian of pullback vs pullback of Laplacian"));
                }
                Ok(())
            })
        })
        .collect();
    parts.par_extend(cfg.points().par_iter().map(|p| {
        let site = Site::new(Suite::Transforms, p.n, Some(p.gamma), None, cfg.tol);
        Partial::guard(&site, "covariance", |out| {
            let (inner, _, jm) = weight_exponents(p.n, p.gamma);
            let (a, b) = (jm * (p.nf() + 1.0), inner * p.nf());
            out.records.push(site.compare("weights", None, a, b, 0.0, "J_M power on the boundary vs J_C power"));
            let mut rng = rng_for(cfg.seed, &site.prefix);
            let points: Vec<Vec<f64>> = (0..5).map(|_| (0..p.n).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
            for d in 0..=3 {
                let f = ZonalFunction::random(p.n, d, &mut rng)?;
                let r = covariance_check_b0(&f, p.gamma, &points)?;
                out.records.push(site.record(&format!("covariance-deg{d}"), None, r, 0.0, r, "j = 0 covariance under the Cayley map"));
            }
            Ok(())
        })
    }));
    finish(Suite::Transforms, parts, &[])
}

fn run_lambda1(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let parts = per_context(cfg, Suite::Lambda1, |site, ctx, rng, out| {
        let trials: Vec<_> = (0..cfg.lambda1_trials).map(|_| ctx.random_extra(rng)).collect();
        let m = ctx.lambda1_probe(&trials)?;
        out.records.push(site.positive("rayleigh-min", None, m, 1.0, "min E(W)/|w|^2 over zero-data trials"));
        Ok(())
    })?;
    Ok(finish(Suite::Lambda1, parts, &[]))
}

fn dispatch(cfg: &VerifyConfig, suite: Suite) -> Result<SuiteReport> {
    Ok(match suite {
        Suite::Constants => run_constants(cfg),
        Suite::Neumann => run_neumann(cfg),
        Suite::Scattering => run_scattering(cfg)?,
        Suite::Extension => run_extension(cfg)?,
        Suite::Symmetry => run_symmetry(cfg)?,
        Suite::Trace => run_trace(cfg)?,
        Suite::Identity => run_identity(cfg)?,
        Suite::Beckner => run_beckner(cfg),
        Suite::Transforms => run_transforms(cfg),
        Suite::Lambda1 => run_lambda1(cfg)?,
    })
}

/// Runs one suite; parallelism is capped by `GJMS_LAB_THREADS` if set.
pub fn run_verify(cfg: &VerifyConfig, suite: Suite) -> Result<SuiteReport> {
    cfg.validate()?;
    pool(None)?.install(|| dispatch(cfg, suite))
}

/// Outcome of the literal-ball probe at (n, γ, ℓ) = (3, 0.75, 2).
fn literal_probe() -> Vec<Finding> {
    let p = GammaParams::new(3, 0.75).expect("valid");
    let (geom, geod) = (ModelGeometry::ball_literal(3, 2).expect("valid"), ModelGeometry::ball(3, 2).expect("valid"));
    let s = |g: &ModelGeometry| poisson_mode(g, p.nf() / 2.0 + p.gamma).map(|m| m.scattering());
    let scattering = match (s(&geom), s(&geod)) {
        (Ok(a), Ok(b)) => Finding {
            key: "ball-literal/scattering".into(),
            value: Some(rel_diff(a, b)),
            note: "relative difference of S(n/2+gamma) between the literal and geodesic ball variables".into(),
        },
        (Err(e), _) | (_, Err(e)) => Finding { key: "ball-literal/scattering".into(), value: None, note: format!("error: {e}") },
    };
    let ext = ModeContext::new(geom, p).and_then(|ctx| {
        let mut d = BoundaryData::zeros(&p);
        d.f[0] = 1.0;
        ctx.extension_residual(&d)
    });
    let extension = match ext {
        Ok(c) => Finding {
            key: "ball-literal/extension".into(),
            value: c.iter().map(|x| x.residual).reduce(f64::max),
            note: "extension identity residual in the literal variable".into(),
        },
        Err(e) => Finding {
            key: "ball-literal/extension".into(),
            value: None,
            note: format!("boundary operators undefined in the literal variable (odd rungs): {e}"),
        },
    };
    vec![scattering, extension]
}

/// Every suite on the configured grid, plus the discrepancy findings.
pub fn run_report(cfg: &VerifyConfig) -> Result<Report> {
    cfg.validate()?;
    pool(None)?.install(|| {
        let suites = Suite::ALL.iter().map(|&s| dispatch(cfg, s)).collect::<Result<Vec<_>>>()?;
        let mut findings: Vec<Finding> = suites.iter().flat_map(|s| s.findings.clone()).collect();
        findings.extend(literal_probe());
        Ok(Report { schema_version: SCHEMA_VERSION, config: cfg.clone(), skipped: cfg.skipped(), suites, findings })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_needs_experimental() {
        let cfg = VerifyConfig { geometries: vec![GeometryKind::BallLiteral], ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(VerifyConfig { experimental: true, ..cfg }.validate().is_ok());
    }

    #[test]
    fn near_integer_gamma_rejected() {
        let cfg = VerifyConfig { gammas: vec![1.0005], ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn out_of_range_gamma_is_skipped() {
        let cfg = VerifyConfig::default();
        assert_eq!(cfg.points().len(), 3);
        assert_eq!(cfg.skipped().len(), 1);
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(stable_hash(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(stable_hash("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
