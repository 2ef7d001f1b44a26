//! `gjms-lab`: constants tables, verification suites and the summary report.
//!
//! Exit codes: 0 all checks pass, 1 some check failed (or a computation
//! errored), 2 invalid configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gjms_lab::constants::{constants_table, rel_diff, ConstantsTable, GammaParams};
use gjms_lab::geometry::GeometryKind;
use gjms_lab::verify::{run_report, run_verify, CheckRecord, Finding, Suite, VerifyConfig, GRID_INTEGER_GAP};
use gjms_lab::Error;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gjms-lab", version, about = "Per-mode checks of fractional GJMS boundary operators and sharp trace inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constants per (n, γ, j) with product-vs-closed-form residuals.
    Constants(Common),
    /// Run one verification suite over the grid.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Run every suite and print a summary with the discrepancy findings.
    Report(Common),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Geometry {
    Halfspace,
    Ball,
    BallLiteral,
    /// halfspace and ball
    Both,
}

#[derive(Args)]
struct Common {
    /// Dimension(s) of the boundary, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    n: Vec<usize>,
    /// γ values: comma separated, or a range a:b:step.
    #[arg(long, default_value = "0.4,0.75,1.3,2.25")]
    gamma: String,
    #[arg(long, value_enum, default_value_t = Geometry::Both)]
    geometry: Geometry,
    /// Largest spherical-harmonic degree on the ball.
    #[arg(long, default_value_t = 6)]
    lmax: usize,
    /// Halfspace frequencies |ξ|, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    xi: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override the boundary series truncation order.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    output: Output,
    /// Shorthand for --output json.
    #[arg(long)]
    json: bool,
    /// Write json/csv output to this file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Allow the non-admissible literal ball variable.
    #[arg(long)]
    experimental: bool,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(m) => Failure::Config(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn parse_gammas(s: &str) -> Result<Vec<f64>, Failure> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Failure::Config(format!("bad number '{t}' in --gamma")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Failure::Config(format!("bad range '{s}'")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| a + i as f64 * step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Failure::Config(format!("bad --gamma '{s}'"))),
    }
}

impl Common {
    fn output(&self) -> Output {
        if self.json {
            Output::Json
        } else {
            self.output
        }
    }

    fn config(&self) -> Result<VerifyConfig, Failure> {
        let geometries = match self.geometry {
            Geometry::Halfspace => vec![GeometryKind::Halfspace],
            Geometry::Ball => vec![GeometryKind::BallGeodesic],
            Geometry::BallLiteral => vec![GeometryKind::BallLiteral],
            Geometry::Both => vec![GeometryKind::Halfspace, GeometryKind::BallGeodesic],
        };
        let cfg = VerifyConfig {
            geometries,
            ns: self.n.clone(),
            gammas: parse_gammas(&self.gamma)?,
            lmax: self.lmax,
            xis: self.xi.clone(),
            tol: self.tol,
            seed: self.seed,
            order: self.order,
            experimental: self.experimental,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| Failure::Run(e.to_string()))
            }
        }
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(vec![]);
    let err = |e: csv::Error| Failure::Run(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Failure::Run(e.to_string()))?).map_err(|e| Failure::Run(e.to_string()))
}

fn records_csv(records: &[&CheckRecord]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in records {
        w.serialize(r).map_err(|e| Failure::Run(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Failure::Run(e.to_string()))?).map_err(|e| Failure::Run(e.to_string()))
}

fn to_json(v: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Run(e.to_string()))
}

/// Rows of one table as JSON objects with residual columns appended.
fn constants_rows(t: &ConstantsTable) -> Vec<Map<String, Value>> {
    let p = &t.params;
    t.rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("n".into(), json!(p.n));
            m.insert("gamma".into(), json!(p.gamma));
            if let Value::Object(fields) = json!(r) {
                m.extend(fields);
            }
            let flux = 2.0 * p.mu(r.j).abs() * r.pi_j_gamma_form;
            m.insert("b_2j_residual".into(), json!(rel_diff(r.b_2j, r.b_2j_gamma_form)));
            m.insert("b_2j_shifted_residual".into(), json!(rel_diff(r.b_2j_shifted, r.b_2j_shifted_gamma_form)));
            m.insert("pi_j_residual".into(), json!(rel_diff(r.pi_j, r.pi_j_gamma_form)));
            m.insert("sigma_j_vs_2mu_pi_residual".into(), json!(rel_diff(r.sigma_j, flux)));
            m
        })
        .collect()
}

fn run_constants(c: &Common) -> Result<bool, Failure> {
    let gammas = parse_gammas(&c.gamma)?;
    let mut tables = vec![];
    for &n in &c.n {
        for &g in &gammas {
            if (g - g.round()).abs() < GRID_INTEGER_GAP {
                return Err(Failure::Config(format!("gamma = {g} lies within {GRID_INTEGER_GAP} of an integer")));
            }
            if g >= n as f64 / 2.0 && gammas.len() > 1 {
                continue;
            }
            tables.push(constants_table(&GammaParams::new(n, g)?)?);
        }
    }
    if tables.is_empty() {
        return Err(Failure::Config("no (n, gamma) pair satisfies gamma < n/2".into()));
    }
    match c.output() {
        Output::Json => {
            let doc: Vec<Value> = tables
                .iter()
                .map(|t| json!({"n": t.params.n, "gamma": t.params.gamma, "spectral": t.spectral, "rows": constants_rows(t)}))
                .collect();
            c.emit(&to_json(&doc)?)?;
        }
        Output::Csv => {
            let rows: Vec<Map<String, Value>> = tables.iter().flat_map(constants_rows).collect();
            let header: Vec<String> = rows[0].keys().cloned().collect();
            let cells = rows
                .iter()
                .map(|r| header.iter().map(|k| r[k].to_string()).collect())
                .collect::<Vec<Vec<String>>>();
            c.emit(&csv_text(&header, &cells)?)?;
        }
        Output::Table => {
            let mut s = String::new();
            for t in &tables {
                let sp = &t.spectral;
                s += &format!(
                    "n = {}  gamma = {}  c_gamma = {:.12e}  (printed {:.12e})  beckner = {:.12e}\n",
                    t.params.n,
                    t.params.gamma,
                    sp.c_gamma,
                    sp.c_gamma_printed,
                    sp.beckner_const()
                );
                s += &format!(
                    "{:>2} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>9} {:>9}\n",
                    "j", "b_2j", "b_2j+2[g]", "pi_j", "c_gj", "d_gj", "sigma_j", "varsigma_j", "res_b", "res_pi"
                );
                for r in &t.rows {
                    s += &format!(
                        "{:>2} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>9.1e} {:>9.1e}\n",
                        r.j,
                        r.b_2j,
                        r.b_2j_shifted,
                        r.pi_j,
                        r.c_gamma_j,
                        r.d_gamma_j,
                        r.sigma_j,
                        r.varsigma_j,
                        rel_diff(r.b_2j, r.b_2j_gamma_form).max(rel_diff(r.b_2j_shifted, r.b_2j_shifted_gamma_form)),
                        rel_diff(r.pi_j, r.pi_j_gamma_form),
                    );
                }
                s.push('\n');
            }
            c.emit(&s)?;
        }
    }
    Ok(true)
}

fn record_line(r: &CheckRecord) -> String {
    format!(
        "{} {:<64} lhs={:>13.6e} rhs={:>13.6e} res={:>9.2e} tol={:.0e}\n",
        if r.pass { "PASS" } else { "FAIL" },
        r.check_id,
        r.lhs,
        r.rhs,
        r.residual,
        r.tol
    )
}

fn findings_text(f: &[Finding]) -> String {
    f.iter()
        .map(|x| {
            let v = x.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
            format!("  {:<40} {:>10}  {}\n", x.key, v, x.note)
        })
        .collect()
}

fn run_verify_cmd(suite: Suite, c: &Common) -> Result<bool, Failure> {
    let cfg = c.config()?;
    let r = run_verify(&cfg, suite)?;
    match c.output() {
        Output::Json => c.emit(&to_json(&r)?)?,
        Output::Csv => c.emit(&records_csv(&r.records.iter().collect::<Vec<_>>())?)?,
        Output::Table => {
            let mut s: String = r.records.iter().map(record_line).collect();
            s += &format!("\n{suite}: {} passed, {} failed, max residual {:.2e}\n", r.passed, r.failed, r.max_residual);
            if !r.findings.is_empty() {
                s += "findings:\n";
                s += &findings_text(&r.findings);
            }
            c.emit(&s)?;
        }
    }
    Ok(r.ok())
}

fn run_report_cmd(c: &Common) -> Result<bool, Failure> {
    let cfg = c.config()?;
    let r = run_report(&cfg)?;
    match c.output() {
        Output::Json => c.emit(&to_json(&r)?)?,
        Output::Csv => {
            let all: Vec<&CheckRecord> = r.suites.iter().flat_map(|s| &s.records).collect();
            c.emit(&records_csv(&all)?)?
        }
        Output::Table => {
            let mut s = String::new();
            for x in &r.suites {
                s += &format!(
                    "{:<11} {:>6} passed {:>6} failed   max residual {:.2e}\n",
                    x.suite.name(),
                    x.passed,
                    x.failed,
                    x.max_residual
                );
            }
            for k in &r.skipped {
                s += &format!("skipped: {k}\n");
            }
            s += "\nfindings:\n";
            s += &findings_text(&r.findings);
            c.emit(&s)?;
        }
    }
    Ok(r.ok())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Constants(c) => run_constants(c),
        Command::Verify { suite, common } => run_verify_cmd(*suite, common),
        Command::Report(c) => run_report_cmd(c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
    }
}
