use qmetro_core::correlations::{snl, SnlConvention};
use qmetro_core::gaussian::PhaseError;
use qmetro_core::protocol::{run_fock, run_gaussian, ComparisonReport, Engine, ProtocolConfig, ProtocolResult};
use qmetro_core::Error as CoreError;

use crate::args::ProtocolArgs;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Reference for `snl_ratio`.
pub const SNL: SnlConvention = SnlConvention::SingleMode;

pub const COLUMNS: &[&str] = &[
    "n_bar",
    "r",
    "phi",
    "eta1",
    "eta2",
    "engine",
    "signal",
    "variance",
    "delta_phi",
    "delta_phi_kind",
    "snl",
    "snl_ratio",
    "gaussian_signal",
    "gaussian_variance",
    "gaussian_delta_phi",
    "fock_signal",
    "fock_variance",
    "fock_delta_phi",
    "signal_rel_dev",
    "variance_rel_dev",
    "delta_phi_rel_dev",
    "cutoff",
    "final_deficit",
    "fock_status",
];

pub fn config_from_args(args: &ProtocolArgs) -> Result<ProtocolConfig, CliError> {
    let (eta1, eta2) = args.etas();
    let mut config = ProtocolConfig::new(args.n_bar, args.r, args.phi, eta1, eta2)?.with_engine(args.engine.into());
    if let Some(c) = args.cutoff {
        config = config.with_cutoff(c);
    }
    Ok(config)
}

/// Engine results for one configuration. In `both` mode a Fock run that
/// runs out of basis is reported, not fatal.
pub struct Evaluation {
    pub config: ProtocolConfig,
    pub gaussian: Option<ProtocolResult>,
    pub fock: Option<ProtocolResult>,
    pub fock_error: Option<CoreError>,
}

impl Evaluation {
    pub fn run(config: ProtocolConfig) -> Result<Self, CliError> {
        let gaussian = match config.engine {
            Engine::Fock => None,
            _ => Some(run_gaussian(&config)?),
        };
        let (fock, fock_error) = match config.engine {
            Engine::Gaussian => (None, None),
            Engine::Fock => (Some(run_fock(&config)?), None),
            Engine::Both => match run_fock(&config) {
                Ok(f) => (Some(f), None),
                Err(e @ CoreError::TruncationOverflow { .. }) => (None, Some(e)),
                Err(e) => return Err(e.into()),
            },
        };
        Ok(Self { config, gaussian, fock, fock_error })
    }

    /// The Gaussian result when present, else the Fock one.
    pub fn primary(&self) -> &ProtocolResult {
        self.gaussian.as_ref().or(self.fock.as_ref()).expect("at least one engine ran")
    }

    pub fn delta_phi(&self) -> Option<f64> {
        self.primary().phase_error.map(PhaseError::value)
    }

    pub fn snl(&self) -> f64 {
        snl(self.config.n_bar(), SNL).expect("n_bar is validated positive")
    }

    pub fn snl_ratio(&self) -> Option<f64> {
        self.delta_phi().map(|d| self.snl() / d)
    }
}

fn kind(pe: Option<PhaseError>) -> &'static str {
    match pe {
        Some(PhaseError::Finite(_)) => "finite",
        Some(PhaseError::LosslessLimit(_)) => "lossless-limit",
        None => "none",
    }
}

pub fn protocol(args: &ProtocolArgs) -> Result<Table, CliError> {
    let config = config_from_args(args)?;
    let eval = Evaluation::run(config)?;
    let primary = eval.primary();
    let cmp = match (&eval.gaussian, &eval.fock) {
        (Some(g), Some(f)) => Some(ComparisonReport::new(g, f)),
        _ => None,
    };

    let mut out = Table::new(COLUMNS);
    out.meta("command", "protocol").meta("snl", SNL.label()).meta("readout", "single-mode intensity");
    let g = eval.gaussian.as_ref();
    let f = eval.fock.as_ref();
    out.push(vec![
        config.n_bar().into(),
        config.r.into(),
        config.phi.into(),
        config.eta1.into(),
        config.eta2.into(),
        config.engine.name().into(),
        primary.signal.into(),
        primary.variance.into(),
        eval.delta_phi().into(),
        kind(primary.phase_error).into(),
        eval.snl().into(),
        eval.snl_ratio().into(),
        g.map(|r| r.signal).into(),
        g.map(|r| r.variance).into(),
        g.and_then(|r| r.phase_error).map(PhaseError::value).into(),
        f.map(|r| r.signal).into(),
        f.map(|r| r.variance).into(),
        f.and_then(|r| r.phase_error).map(PhaseError::value).into(),
        cmp.as_ref().map(|c| c.signal.rel).into(),
        cmp.as_ref().map(|c| c.variance.rel).into(),
        cmp.as_ref().and_then(|c| c.phase_error).map(|d| d.rel).into(),
        f.and_then(|r| r.cutoff).map_or(Cell::Missing, Cell::Count),
        f.map(|r| r.stages.last().map_or(0.0, |s| s.deficit)).into(),
        match (&eval.fock, &eval.fock_error) {
            (Some(_), _) => "ok".into(),
            (None, Some(e)) => format!("skipped: {e}").into(),
            (None, None) => "not run".into(),
        },
    ]);
    Ok(out)
}
