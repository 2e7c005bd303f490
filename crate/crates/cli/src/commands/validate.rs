//! Oracle-versus-closed-form checks with a JSON report.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qmetro_core::correlations::{suggested_cutoff, OracleCheck, StateId};
use qmetro_core::fock::{Expectation, Observable};
use qmetro_core::gaussian::{
    phase_error_from_moments, phase_error_sq_expanded, protocol_moments, signal, snl_ratio, variance_number,
};
use qmetro_core::protocol::{fock_pipeline, run_fock, ProtocolConfig};
use qmetro_core::{Complex64, Error as CoreError};

use super::{protocol, sweep};
use crate::args::{Level, ValidateArgs};
use crate::error::CliError;
use crate::output::emit;

const SWEEP_HEADER: &str = include_str!("../../golden/sweep_header.csv");
const PROTOCOL_HEADER: &str = include_str!("../../golden/protocol_header.csv");
const SEED: u64 = 0x5eed_2014;

/// `Δ²φ(n̄, φ, η)` in expanded closed form.
pub type PhaseErrorSq = fn(f64, f64, f64) -> f64;

/// Closed forms under test. Swapping one out lets the suite check itself.
#[derive(Debug, Clone, Copy)]
pub struct Evaluators {
    pub phase_error_sq: PhaseErrorSq,
}

impl Default for Evaluators {
    fn default() -> Self {
        Self { phase_error_sq: phase_error_sq_expanded }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub level: &'static str,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn measured(suite: &'static str, name: String, deviation: f64, tolerance: f64, detail: String) -> Check {
    Check { suite, name, passed: deviation <= tolerance, deviation: Some(deviation), tolerance: Some(tolerance), detail }
}

fn errored(suite: &'static str, name: String, err: impl std::fmt::Display) -> Check {
    Check { suite, name, passed: false, deviation: None, tolerance: None, detail: err.to_string() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn table_suite(level: Level, checks: &mut Vec<Check>) {
    let mut cases: Vec<(StateId, f64, Option<usize>, f64)> = Vec::new();
    for n in [1.0f64, 2.0, 4.0] {
        for id in StateId::ALL.into_iter().filter(|id| id.has_oracle() && *id != StateId::Ecs) {
            let integral = n.fract() == 0.0;
            let valid = match id {
                StateId::Noon => integral,
                StateId::TwinFock => integral && (n as u64) % 2 == 0,
                _ => true,
            };
            if valid {
                cases.push((id, n, None, 1e-8));
            }
        }
    }
    if level == Level::Full {
        cases.push((StateId::Ecs, 20.0, Some(60), 1e-3));
    }
    for (id, n, cutoff, tol) in cases {
        let name = format!("{id} n_bar={n}");
        let check = cutoff
            .map_or_else(|| suggested_cutoff(id, n), Ok)
            .and_then(|c| OracleCheck::run(id, n, c));
        checks.push(match check {
            Ok(c) => measured(
                "table",
                name,
                c.max_deviation(),
                tol,
                format!("Q, J, F against the closed-form row at cutoff {}", c.cutoff),
            ),
            Err(e) => errored("table", name, e),
        });
    }
}

/// Runs the Fock pipeline at cutoff 60, retrying at 130 and then 260 on
/// truncation overflow.
fn fock_moments(r: f64, phi: f64, eta1: f64, eta2: f64) -> Result<OracleMoments, CoreError> {
    let mut cutoff = 60;
    loop {
        let config = ProtocolConfig::new(None, Some(r), phi, eta1, eta2)?.with_cutoff(cutoff);
        match fock_pipeline(&config) {
            Ok(run) => {
                let s = run.state.as_fock();
                return Ok(OracleMoments {
                    n: s.expectation(Observable::Number, 0)?.re,
                    n2: s.expectation(Observable::NumberSquared, 0)?.re,
                    factorial: s.expectation(Observable::FactorialSecond, 0)?.re,
                    a2: s.expectation(Observable::Quadrature2, 0)?,
                    cutoff,
                });
            }
            Err(CoreError::TruncationOverflow { .. }) if cutoff < 260 => cutoff = if cutoff < 130 { 130 } else { 260 },
            Err(e) => return Err(e),
        }
    }
}

struct OracleMoments {
    n: f64,
    n2: f64,
    factorial: f64,
    a2: Complex64,
    cutoff: usize,
}

fn engine_suite(level: Level, checks: &mut Vec<Check>) {
    let (rs, phis, etas): (&[f64], &[f64], Vec<(f64, f64)>) = match level {
        Level::Quick => (&[0.2, 0.5], &[0.05, 0.3], vec![(1.0, 1.0), (0.9, 0.9), (0.95, 0.8)]),
        Level::Full => (
            &[0.2, 0.5, 0.8814],
            &[0.0, 0.05, 0.3, 1.0],
            vec![(1.0, 1.0), (0.95, 0.95), (0.8, 0.8), (1.0, 0.9), (0.9, 1.0), (0.95, 0.8)],
        ),
    };
    for &r in rs {
        for &phi in phis {
            for &(eta1, eta2) in &etas {
                let name = format!("r={r} phi={phi} eta1={eta1} eta2={eta2}");
                let g = match protocol_moments(r, phi, eta1, eta2) {
                    Ok(g) => g,
                    Err(e) => {
                        checks.push(errored("engines", name, e));
                        continue;
                    }
                };
                let g_n2 = g.m_n * g.m_n + variance_number(&g).unwrap_or(f64::NAN);
                match fock_moments(r, phi, eta1, eta2) {
                    Ok(OracleMoments { n, n2, factorial, a2, cutoff }) => {
                        let a2_dev = (a2 - g.m_aa).norm() / g.m_aa.norm().max(1.0);
                        let dev = rel(n, g.m_n).max(rel(n2, g_n2)).max(a2_dev);
                        checks.push(measured(
                            "engines",
                            name.clone(),
                            dev,
                            1e-6,
                            format!("<n>, <n^2>, <a^2> of Gaussian moments against the Fock oracle at cutoff {cutoff}"),
                        ));
                        let wick = 2.0 * n * n + a2.norm_sqr();
                        checks.push(measured(
                            "engines",
                            format!("factorization {name}"),
                            rel(factorial, wick),
                            1e-6,
                            "<a+a+aa> = 2<n>^2 + |<a^2>|^2 on the oracle output".into(),
                        ));
                    }
                    Err(e) => checks.push(errored("engines", name, e)),
                }
            }
        }
    }
}

fn identity_suite(level: Level, ev: &Evaluators, checks: &mut Vec<Check>) {
    let samples = match level {
        Level::Quick => 25,
        Level::Full => 100,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut failure = None;
    for _ in 0..samples {
        let n = 10f64.powf(rng.random_range(-1.0..2.0));
        let phi = rng.random_range(0.01..FRAC_PI_2 - 0.01);
        let eta = rng.random_range(0.5..=1.0);
        match phase_error_from_moments(n, phi, eta) {
            Ok(routed) => {
                let dev = ((ev.phase_error_sq)(n, phi, eta).sqrt() - routed).abs() / routed;
                worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
            }
            Err(e) => failure = Some(e),
        }
    }
    let name = "phase-error identity: expanded closed form vs moment route".to_string();
    checks.push(match failure {
        Some(e) => errored("identities", name, e),
        None => measured(
            "identities",
            name,
            worst,
            1e-10,
            format!("{samples} seeded points, n_bar in [0.1, 100], phi in [0.01, pi/2-0.01], eta in [0.5, 1]"),
        ),
    });

    let mut worst = 0.0f64;
    for n in [0.01, 0.5, 1.0, 7.0, 1e3, 1e5] {
        for k in 0..=16 {
            let phi = k as f64 * FRAC_PI_2 / 16.0;
            worst = worst.max(rel(signal(n, phi, 1.0), 4.0 * n * (n + 1.0) * phi.sin().powi(2)));
        }
    }
    checks.push(measured(
        "identities",
        "lossless signal identity: S = 4n(n+1)sin^2(phi)".into(),
        worst,
        1e-12,
        "grid of n_bar and phi".into(),
    ));

    let ns: &[f64] = match level {
        Level::Quick => &[0.5, 1.0],
        Level::Full => &[0.5, 1.0, 2.0, 5.0],
    };
    for &n in ns {
        let name = format!("lossless limit n_bar={n}: dphi -> 1/sqrt(8n(n+1))");
        let config = ProtocolConfig::from_n_bar(n, 1e-4, 1.0).expect("valid configuration");
        checks.push(match run_fock(&config) {
            Ok(r) => match r.phase_error {
                Some(pe) => {
                    let limit = 1.0 / (8.0 * n * (n + 1.0)).sqrt();
                    measured(
                        "identities",
                        name,
                        (pe.value() - limit).abs() / limit,
                        1e-4,
                        "Fock error propagation at phi = 1e-4".into(),
                    )
                }
                None => errored("identities", name, "no phase estimate"),
            },
            Err(e) => errored("identities", name, e),
        });
    }

    for (n, eta, target) in [(1.5e4, 0.99, 5.0), (2e4, 0.95, 3.0)] {
        let name = format!("SNL ratio n_bar={n} eta={eta} ~ {target}");
        checks.push(match snl_ratio(n, 1e-3, eta) {
            Ok(ratio) => measured(
                "identities",
                name,
                (ratio - target).abs() / target,
                0.1,
                format!("ratio {ratio} at phi = 1e-3"),
            ),
            Err(e) => errored("identities", name, e),
        });
    }
}

fn schema_suite(checks: &mut Vec<Check>) {
    for (name, live, golden) in [
        ("sweep header", sweep::COLUMNS.join(","), SWEEP_HEADER),
        ("protocol header", protocol::COLUMNS.join(","), PROTOCOL_HEADER),
    ] {
        let passed = live == golden.trim_end();
        checks.push(Check {
            suite: "schema",
            name: name.into(),
            passed,
            deviation: None,
            tolerance: None,
            detail: if passed { "matches the golden copy".into() } else { format!("got `{live}`") },
        });
    }
}

pub fn run_suite(level: Level, ev: &Evaluators) -> Report {
    let mut checks = Vec::new();
    schema_suite(&mut checks);
    identity_suite(level, ev, &mut checks);
    table_suite(level, &mut checks);
    engine_suite(level, &mut checks);
    let failed = checks.iter().filter(|c| !c.passed).count();
    Report { level: level.name(), passed: failed == 0, total: checks.len(), failed, checks }
}

pub fn validate(args: &ValidateArgs) -> Result<Report, CliError> {
    let report = run_suite(args.level, &Evaluators::default());
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let dev = c.deviation.map_or(String::new(), |d| format!(" ({d:.2e} vs {:.0e})", c.tolerance.unwrap_or(0.0)));
        eprintln!("[{tag}] {}: {}{dev}", c.suite, c.name);
    }
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(&json, args.out.as_deref())?;
    if !report.passed {
        let names: Vec<String> = report.failures().map(|c| format!("{}: {}", c.suite, c.name)).collect();
        return Err(CliError::ValidationFailed(names.join("; ")));
    }
    Ok(report)
}
