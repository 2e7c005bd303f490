use std::f64::consts::FRAC_PI_2;

use qmetro_core::protocol::{Engine, ProtocolConfig};

use super::protocol::{Evaluation, SNL};
use crate::args::{SweepArgs, SweepEngine};
use crate::error::CliError;
use crate::output::Table;

/// Fixed sweep schema; `validate` checks it against a golden copy.
pub const COLUMNS: &[&str] = &["n_bar", "phi", "eta", "signal", "variance", "delta_phi", "snl", "snl_ratio"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_bar: Vec<f64>,
    pub phi: Vec<f64>,
    pub eta: Vec<f64>,
    pub engine: Engine,
    pub cutoff: Option<usize>,
}

fn parse_range(text: &str, flag: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("{flag} expects START:STOP:COUNT, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(CliError::Usage(format!("{flag}: COUNT must be at least 1")));
    }
    if count == 1 && start != stop {
        return Err(CliError::Usage(format!("{flag}: a single point needs START = STOP")));
    }
    Ok((start, stop, count))
}

/// `count` points from `start` to `stop` inclusive, evenly spaced in
/// `log10` when `log` is set. The endpoints are exact.
pub fn grid(start: f64, stop: f64, count: usize, log: bool) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let (a, b) = if log { (start.log10(), stop.log10()) } else { (start, stop) };
    (0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i == count - 1 {
                stop
            } else {
                let t = a + (b - a) * i as f64 / (count - 1) as f64;
                if log {
                    10f64.powf(t)
                } else {
                    t
                }
            }
        })
        .collect()
}

fn check_axis(name: &str, values: &[f64], ok: impl Fn(f64) -> bool, range: &str) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage(format!("{name} grid is empty")));
    }
    if let Some(v) = values.iter().find(|&&v| !ok(v)) {
        return Err(CliError::Usage(format!("{name} = {v} is outside {range}")));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Usage(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

impl SweepSpec {
    pub fn from_args(args: &SweepArgs) -> Result<Self, CliError> {
        let n_bar = if let Some(text) = &args.nbar_log {
            let (a, b, n) = parse_range(text, "--nbar-log")?;
            if !(a > 0.0 && b > 0.0) {
                return Err(CliError::Usage("--nbar-log bounds must be positive".into()));
            }
            grid(a, b, n, true)
        } else if let Some(text) = &args.nbar_lin {
            let (a, b, n) = parse_range(text, "--nbar-lin")?;
            grid(a, b, n, false)
        } else {
            args.n_bar.clone()
        };
        let spec = Self {
            n_bar,
            phi: args.phi.clone(),
            eta: args.eta.clone(),
            engine: match args.engine {
                SweepEngine::Gaussian => Engine::Gaussian,
                SweepEngine::Fock => Engine::Fock,
            },
            cutoff: args.cutoff,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_axis("n_bar", &self.n_bar, |v| v > 0.0 && v.is_finite(), "(0, inf)")?;
        check_axis("phi", &self.phi, |v| (0.0..=FRAC_PI_2).contains(&v), "[0, pi/2]")?;
        check_axis("eta", &self.eta, |v| v > 0.0 && v <= 1.0, "(0, 1]")
    }

    pub fn points(&self) -> usize {
        self.n_bar.len() * self.phi.len() * self.eta.len()
    }
}

/// Evaluates every grid point in lexicographic (n_bar, phi, eta) order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table, CliError> {
    spec.validate()?;
    let mut out = Table::new(COLUMNS);
    out.meta("command", "sweep")
        .meta("engine", spec.engine.name())
        .meta("snl", SNL.label())
        .meta("points", spec.points());
    if let Some(c) = spec.cutoff {
        out.meta("cutoff", c);
    }
    for &n in &spec.n_bar {
        for &phi in &spec.phi {
            for &eta in &spec.eta {
                let mut config = ProtocolConfig::from_n_bar(n, phi, eta)?.with_engine(spec.engine);
                if let Some(c) = spec.cutoff {
                    config = config.with_cutoff(c);
                }
                let eval = Evaluation::run(config).map_err(|e| match e {
                    CliError::Core(source) => {
                        CliError::AtPoint { at: format!("n_bar = {n}, phi = {phi}, eta = {eta}"), source }
                    }
                    other => other,
                })?;
                let p = eval.primary();
                out.push(vec![
                    n.into(),
                    phi.into(),
                    eta.into(),
                    p.signal.into(),
                    p.variance.into(),
                    eval.delta_phi().into(),
                    eval.snl().into(),
                    eval.snl_ratio().into(),
                ]);
            }
        }
    }
    Ok(out)
}

pub fn sweep(args: &SweepArgs) -> Result<Table, CliError> {
    run_sweep(&SweepSpec::from_args(args)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(10.0, 1e5, 5, true), vec![10.0, 100.0, 1000.0, 10000.0, 1e5]);
        assert_eq!(grid(1.0, 2.0, 3, false), vec![1.0, 1.5, 2.0]);
        assert_eq!(grid(3.0, 3.0, 1, true), vec![3.0]);
        assert!(parse_range("1:2", "--x").is_err());
        assert!(parse_range("1:2:0", "--x").is_err());
        assert!(parse_range("1:2:1", "--x").is_err());
    }

    #[test]
    fn axis_checks() {
        let spec = SweepSpec { n_bar: vec![1.0, 1.0], phi: vec![0.1], eta: vec![1.0], engine: Engine::Gaussian, cutoff: None };
        assert!(spec.validate().is_err());
        let spec = SweepSpec { n_bar: vec![1.0], phi: vec![0.1], eta: vec![0.0], ..spec };
        assert!(spec.validate().is_err());
        let spec = SweepSpec { eta: vec![0.9, 1.0], ..spec };
        assert!(spec.validate().is_ok());
    }
}
