//! One line per acceptance criterion. Criteria 1, 5 and 7 fail as stated:
//! the displayed σ_j drops a factor 4^⌊γ⌋ against 2|γ−2j|π_j, and only the
//! latter closes the Dirichlet form once ⌊γ⌋ ≥ 1. Those three are checked
//! to fail in exactly that pattern; any other failure exits nonzero.

use gjms_lab::geometry::GeometryKind;
use gjms_lab::verify::{run_report, run_verify, CheckRecord, SuiteReport, Suite, VerifyConfig, THREADS_ENV};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const HALFSPACE: GeometryKind = GeometryKind::Halfspace;
const BALL: GeometryKind = GeometryKind::BallGeodesic;

/// Check name without site prefix or /j suffix.
fn name(r: &CheckRecord) -> &str {
    let mut parts = r.check_id.rsplit('/');
    let last = parts.next().unwrap_or("");
    if last.starts_with('j') && last[1..].chars().all(|c| c.is_ascii_digit()) {
        parts.next().unwrap_or("")
    } else {
        last
    }
}

fn floor_g(r: &CheckRecord) -> usize {
    r.gamma.map_or(0, |g| g.floor() as usize)
}

fn finding(rep: &SuiteReport, key: &str) -> Option<f64> {
    rep.findings.iter().find(|f| f.key.ends_with(key)).and_then(|f| f.value)
}

/// Runs `suite` on every (n, γ-list) block and merges the reports.
fn run(base: &VerifyConfig, grid: &[(usize, &[f64])], suite: Suite) -> SuiteReport {
    let mut merged: Option<SuiteReport> = None;
    for (n, gammas) in grid {
        let cfg = VerifyConfig { ns: vec![*n], gammas: gammas.to_vec(), ..base.clone() };
        let rep = run_verify(&cfg, suite).unwrap_or_else(|e| panic!("{suite}: {e}"));
        merged = Some(match merged {
            None => rep,
            Some(mut m) => {
                m.records.extend(rep.records);
                for f in rep.findings {
                    match m.findings.iter_mut().find(|g| g.key == f.key) {
                        Some(g) => g.value = g.value.zip(f.value).map(|(a, b)| a.max(b)),
                        None => m.findings.push(f),
                    }
                }
                m
            }
        });
    }
    merged.expect("empty grid")
}

/// Failing records under per-check tolerances; `positive` checks keep their own verdict.
fn failures<'a>(rep: &'a SuiteReport, tol: impl Fn(&str) -> Option<f64>) -> Vec<&'a CheckRecord> {
    rep.records
        .iter()
        .filter(|r| match tol(name(r)) {
            Some(t) => !(r.residual <= t),
            None => !r.pass,
        })
        .collect()
}

enum Verdict {
    Pass,
    /// Fails, in the analysed pattern.
    Documented(String),
    Fail(String),
}

struct Line {
    id: usize,
    title: &'static str,
    verdict: Verdict,
    elapsed: Duration,
    budget: Duration,
    detail: String,
}

fn simple(fails: &[&CheckRecord], total: usize) -> (Verdict, String) {
    let worst = fails.iter().map(|r| r.check_id.as_str()).next().unwrap_or("");
    if fails.is_empty() {
        (Verdict::Pass, format!("{total} checks"))
    } else {
        (Verdict::Fail(format!("{} of {total} failed, first {worst}", fails.len())), String::new())
    }
}

/// Failures confined to ⌊γ⌋ ≥ 1 and the 2|γ−2j|π_j normalization closing everywhere.
fn sigma_pattern(rep: &SuiteReport, fails: &[&CheckRecord], tol: f64) -> (Verdict, String) {
    let total = rep.records.len();
    let closing = finding(rep, "residual-sigma-2|mu|pi").unwrap_or(f64::NAN);
    let proof = finding(rep, "residual-sigma-2^-n").unwrap_or(f64::NAN);
    let detail = format!("max residual: 2|mu|pi {closing:.2e}, 2^-n {proof:.2e}");
    if fails.is_empty() {
        return (Verdict::Pass, detail);
    }
    let stray = fails.iter().find(|r| floor_g(r) == 0);
    match stray {
        Some(r) => (Verdict::Fail(format!("failure at floor(gamma) = 0: {}", r.check_id)), detail),
        None if !(closing <= tol) => (Verdict::Fail("2|mu|pi does not close either".into()), detail),
        None => (
            Verdict::Documented(format!(
                "{} of {total} fail, all at floor(gamma) >= 1; sigma_j = 2|gamma-2j|pi_j closes, the 2^-n variant does not",
                fails.len()
            )),
            detail,
        ),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() -> ExitCode {
    // criterion 11 is single-threaded; keep every run comparable
    std::env::set_var(THREADS_ENV, "1");
    let base = VerifyConfig::default();
    let grid3: [(usize, &[f64]); 3] = [(3, &[0.6, 1.4]), (4, &[0.6, 1.4]), (5, &[2.3])];
    let both = VerifyConfig { geometries: vec![HALFSPACE, BALL], lmax: 8, ..base.clone() };
    let s = Duration::from_secs;
    let mut lines = vec![];

    // 1
    let cfg = VerifyConfig { tol: 1e-12, ..base.clone() };
    let g1: &[f64] = &[0.4, 0.75, 1.3, 1.5, 2.25, 2.6, 3.5];
    let (rep, t) = timed(|| run(&cfg, &[(3, g1), (5, g1), (8, g1)], Suite::Constants));
    let fails = failures(&rep, |_| Some(1e-12));
    let dev = finding(&rep, "sigma-4-power-ratio-deviation").unwrap_or(f64::NAN);
    let stray = fails.iter().find(|r| !matches!(name(r), "sigma" | "varsigma") || floor_g(r) == 0);
    let detail = format!("4^floor(gamma) ratio deviation {dev:.1e}");
    let verdict = match (fails.is_empty(), stray) {
        (true, _) => Verdict::Pass,
        (false, Some(r)) => Verdict::Fail(format!("unexpected failure {}", r.check_id)),
        (false, None) if dev <= 1e-12 => Verdict::Documented(format!(
            "{} of {} fail: displayed sigma/varsigma differ from the 2|gamma-2j|pi_j forms by exactly 4^floor(gamma); b, pi forms all agree",
            fails.len(),
            rep.records.len()
        )),
        (false, None) => Verdict::Fail("sigma mismatch is not a pure 4-power".into()),
    };
    lines.push(Line { id: 1, title: "constants consistency", verdict, elapsed: t, budget: s(1), detail });

    // 2
    let cfg = VerifyConfig { geometries: vec![HALFSPACE], tol: 1e-8, ..base.clone() };
    let (rep, t) = timed(|| run(&cfg, &[(3, &[0.25, 0.5, 0.75])], Suite::Neumann));
    let (verdict, detail) = simple(&failures(&rep, |_| Some(1e-8)), rep.records.len());
    lines.push(Line { id: 2, title: "classical Neumann constant", verdict, elapsed: t, budget: s(1), detail });

    // 3
    let cfg = VerifyConfig { geometries: vec![BALL], lmax: 8, tol: 1e-7, ..base.clone() };
    let (rep, t) = timed(|| run(&cfg, &grid3, Suite::Scattering));
    let (verdict, detail) = simple(&failures(&rep, |_| Some(1e-7)), rep.records.len());
    lines.push(Line { id: 3, title: "scattering vs multiplier", verdict, elapsed: t, budget: s(5), detail });

    // 4
    let (rep, t) = timed(|| run(&both, &grid3, Suite::Extension));
    let (verdict, mut detail) = simple(&failures(&rep, |_| Some(1e-6)), rep.records.len());
    if let Some(p) = finding(&rep, "printed-constants-residual") {
        detail += &format!("; printed c/d residual {p:.2e}");
    }
    lines.push(Line { id: 4, title: "extension identities", verdict, elapsed: t, budget: s(20), detail });

    // 5
    let (rep, t) = timed(|| run(&both, &grid3, Suite::Symmetry));
    let fails = failures(&rep, |_| Some(1e-6));
    let (verdict, detail) = sigma_pattern(&rep, &fails, 1e-6);
    lines.push(Line { id: 5, title: "symmetry of Q", verdict, elapsed: t, budget: s(20), detail });

    // 6
    let (rep, t) = timed(|| run(&both, &grid3, Suite::Trace));
    let fails = failures(&rep, |n| (!n.starts_with("bump")).then_some(1e-6));
    let (verdict, detail) = simple(&fails, rep.records.len());
    lines.push(Line { id: 6, title: "trace inequality", verdict, elapsed: t, budget: s(30), detail });

    // 7
    let (rep, t) = timed(|| run(&both, &grid3, Suite::Identity));
    let fails = failures(&rep, |_| Some(1e-6));
    let (verdict, detail) = sigma_pattern(&rep, &fails, 1e-6);
    lines.push(Line { id: 7, title: "main integral identity", verdict, elapsed: t, budget: s(30), detail });

    // 8
    let (rep, t) = timed(|| run(&base, &grid3, Suite::Beckner));
    let fails = failures(&rep, |n| match n {
        "sharp-constant" => Some(1e-13),
        n if n.starts_with("random") => Some(1e-8),
        _ => Some(1e-6),
    });
    let (verdict, detail) = simple(&fails, rep.records.len());
    lines.push(Line { id: 8, title: "Beckner inequality", verdict, elapsed: t, budget: s(10), detail });

    // 9
    let (rep, t) = timed(|| run(&base, &[(3, &[0.6]), (4, &[0.6]), (5, &[2.3])], Suite::Transforms));
    let fails = failures(&rep, |n| if n.starts_with("jacobian") { Some(1e-12) } else { Some(1e-6) });
    let (verdict, detail) = simple(&fails, rep.records.len());
    lines.push(Line { id: 9, title: "transforms", verdict, elapsed: t, budget: s(2), detail });

    // 10
    let (rep, t) = timed(|| run(&both, &grid3, Suite::Lambda1));
    let (verdict, detail) = simple(&failures(&rep, |_| None), rep.records.len());
    lines.push(Line { id: 10, title: "lambda_1 probe", verdict, elapsed: t, budget: s(10), detail });

    // 11
    let render = || serde_json::to_string_pretty(&run_report(&base).expect("report")).unwrap();
    let (a, t) = timed(render);
    let b = render();
    let verdict = if a == b { Verdict::Pass } else { Verdict::Fail("report output differs between runs".into()) };
    let detail = format!("{} bytes, identical: {}", a.len(), a == b);
    lines.push(Line { id: 11, title: "full report", verdict, elapsed: t, budget: s(60), detail });

    let mut unexpected = 0;
    for l in &lines {
        let slow = l.elapsed > l.budget;
        let (tag, why) = match &l.verdict {
            Verdict::Pass if !slow => ("PASS", String::new()),
            Verdict::Pass => ("FAIL", format!("over budget {:?}", l.budget)),
            Verdict::Documented(w) => ("FAIL", format!("expected: {w}")),
            Verdict::Fail(w) => ("FAIL", w.clone()),
        };
        if matches!(l.verdict, Verdict::Fail(_)) || slow {
            unexpected += 1;
        }
        println!(
            "criterion {:>2} {tag} {:<28} {:>7.2}s  {}{}{}",
            l.id,
            l.title,
            l.elapsed.as_secs_f64(),
            why,
            if why.is_empty() || l.detail.is_empty() { "" } else { " | " },
            l.detail
        );
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed outside the documented pattern");
        ExitCode::FAILURE
    }
}
