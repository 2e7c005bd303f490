//! The squeeze / phase / loss / anti-squeeze / loss / intensity pipeline.
//!
//! The vacuum is squeezed by `S(r)`, picks up `U(φ) = exp(iφ a†a)`, passes a
//! loss `η₁`, is anti-squeezed by `S†(r)` and passes a second loss `η₂`
//! before the photon number is read out. [`run_gaussian`] propagates second
//! moments; [`run_fock`] evolves the state itself on a truncated basis.
//! Phase errors come from error propagation `Δφ = ΔN / |∂<N>/∂φ|`.

use std::f64::consts::FRAC_PI_2;

use crate::fock::{
    squeezed_vacuum_tail, Expectation, FockState, MixedState, Modes, Observable, PhaseConvention, PureState,
};
use crate::gaussian::{
    self, n_bar_from_r, phase_error, protocol_moments, r_from_n_bar, variance_number, MomentVector, PhaseError,
};
use crate::numdiff::{differentiate, DEFAULT_STEP};
use crate::{Error, Result};

/// Largest trace deficit accepted at the end of a Fock run.
pub const MAX_FINAL_DEFICIT: f64 = 1e-8;
/// Tail weight targeted by [`default_cutoff`].
pub const CUTOFF_TAIL_TARGET: f64 = 1e-12;
/// Smallest tail weight [`default_cutoff`] will aim for.
const CUTOFF_TAIL_FLOOR: f64 = 1e-24;
/// Default-cutoff cap for density-matrix runs.
pub const MIXED_CUTOFF_CAP: usize = 128;
/// Default-cutoff cap for lossless (state-vector) runs.
pub const PURE_CUTOFF_CAP: usize = 2048;
/// Tolerance for `n̄ = sinh² r` when both are given.
const N_BAR_CONSISTENCY: f64 = 1e-10;
/// Relative agreement required between the Gaussian closed forms and the
/// composed affine maps.
const INTERNAL_AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Gaussian,
    Fock,
    Both,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Gaussian => "gaussian",
            Engine::Fock => "fock",
            Engine::Both => "both",
        }
    }

    fn runs_gaussian(self) -> bool {
        self != Engine::Fock
    }

    fn runs_fock(self) -> bool {
        self != Engine::Gaussian
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    /// Squeezing parameter; `n̄ = sinh² r`.
    pub r: f64,
    pub phi: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Fock cutoff; `None` selects [`default_cutoff`].
    pub cutoff: Option<usize>,
    pub engine: Engine,
}

impl ProtocolConfig {
    /// Exactly one of `n_bar`, `r` is required; if both are given they must
    /// agree to 1e-10 relative.
    pub fn new(n_bar: Option<f64>, r: Option<f64>, phi: f64, eta1: f64, eta2: f64) -> Result<Self> {
        let r = match (n_bar, r) {
            (None, None) => return Err(Error::InvalidInput("one of n_bar or r is required".into())),
            (Some(n), None) => {
                positive_finite(n, "n_bar")?;
                r_from_n_bar(n)
            }
            (None, Some(r)) => {
                positive_finite(r, "r")?;
                r
            }
            (Some(n), Some(r)) => {
                positive_finite(n, "n_bar")?;
                positive_finite(r, "r")?;
                let implied = n_bar_from_r(r);
                if (implied - n).abs() > N_BAR_CONSISTENCY * n.max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "n_bar = {n} is inconsistent with r = {r} (sinh²r = {implied})"
                    )));
                }
                r
            }
        };
        if !phi.is_finite() {
            return Err(Error::OutOfRange { name: "phi", value: phi, range: "finite reals" });
        }
        for (value, name) in [(eta1, "eta1"), (eta2, "eta2")] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange { name, value, range: "[0, 1]" });
            }
        }
        Ok(Self { r, phi, eta1, eta2, cutoff: None, engine: Engine::Both })
    }

    pub fn from_n_bar(n_bar: f64, phi: f64, eta: f64) -> Result<Self> {
        Self::new(Some(n_bar), None, phi, eta, eta)
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn n_bar(&self) -> f64 {
        n_bar_from_r(self.r)
    }

    pub fn is_lossless(&self) -> bool {
        self.eta1 == 1.0 && self.eta2 == 1.0
    }

    /// The common transmissivity when `η₁ = η₂`.
    pub fn equal_eta(&self) -> Option<f64> {
        (self.eta1 == self.eta2).then_some(self.eta1)
    }
}

fn positive_finite(value: f64, name: &'static str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::OutOfRange { name, value, range: "(0, ∞)" });
    }
    Ok(())
}

/// Cutoff policy for the Fock engine.
///
/// Starts at the smallest even value `≥ 8(n̄+1)` and grows until a squeezed
/// vacuum with the largest mean photon number met along the pipeline
/// (`max(n̄, predicted signal)`) loses at most [`CUTOFF_TAIL_TARGET`] to
/// truncation. Near a dark fringe the target tightens to `2.5e-17 · signal`:
/// a tail of weight `t` shifts output amplitudes by about `√t`, which moves a
/// signal `S` by `2√(tS)`. The result is capped at [`MIXED_CUTOFF_CAP`] for lossy runs
/// and [`PURE_CUTOFF_CAP`] for lossless ones; runs that need more fail the
/// stage deficit checks.
pub fn default_cutoff(config: &ProtocolConfig) -> Result<usize> {
    let n_bar = config.n_bar();
    let predicted = protocol_moments(config.r, config.phi, config.eta1, config.eta2)?.m_n;
    let worst = n_bar.max(predicted);
    let r_worst = r_from_n_bar(worst);
    let cap = if config.is_lossless() { PURE_CUTOFF_CAP } else { MIXED_CUTOFF_CAP };
    let start = (8.0 * (n_bar + 1.0)).ceil() as usize;
    let mut cutoff = start + start % 2;
    let target = (2.5e-17 * predicted).clamp(CUTOFF_TAIL_FLOOR, CUTOFF_TAIL_TARGET);
    while cutoff < cap && squeezed_vacuum_tail(r_worst, cutoff) > target {
        cutoff += 2;
    }
    Ok(cutoff.min(cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Gaussian,
    Fock,
}

/// Norm or trace deficit after one pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageDiagnostic {
    pub stage: &'static str,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub engine: EngineKind,
    pub moments: MomentVector,
    /// `<N>` at the detector.
    pub signal: f64,
    /// `Var(N)` at the detector.
    pub variance: f64,
    /// `<a†a†aa>` at the detector.
    pub factorial_second: f64,
    /// `None` when the Fock engine meets a fringe extremum (`φ = 0` without
    /// loss, or `φ = π/2`), where the finite-difference slope vanishes.
    pub phase_error: Option<PhaseError>,
    pub cutoff: Option<usize>,
    pub stages: Vec<StageDiagnostic>,
}

impl ProtocolResult {
    pub fn final_deficit(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.deficit)
    }
}

fn singular(config: &ProtocolConfig) -> Error {
    Error::SingularOperatingPoint(format!(
        "phi = {} with losses (eta1 = {}, eta2 = {}): the signal slope vanishes at the dark fringe \
         while loss noise does not, so the error-propagation phase error diverges",
        config.phi, config.eta1, config.eta2
    ))
}

/// Moment propagation through the composed affine maps.
///
/// With `η₁ = η₂` the closed-form signal and phase error are evaluated as
/// well, and any disagreement with the maps beyond 1e-10 relative (plus
/// the maps' own rounding budget, `1e-14 (1+2n̄)²`) is reported as an error.
pub fn run_gaussian(config: &ProtocolConfig) -> Result<ProtocolResult> {
    let moments = protocol_moments(config.r, config.phi, config.eta1, config.eta2)?;
    let variance = variance_number(&moments)?;
    let n_bar = config.n_bar();
    let rounding = 1e-14 * (1.0 + 2.0 * n_bar).powi(2);

    let phase_error = match config.equal_eta() {
        Some(eta) => {
            let closed = gaussian::signal(n_bar, config.phi, eta);
            if (moments.m_n - closed).abs() > INTERNAL_AGREEMENT * closed.abs().max(1.0) + rounding {
                return Err(Error::InvalidInput(format!(
                    "closed-form signal {closed} disagrees with propagated moments {}",
                    moments.m_n
                )));
            }
            if eta == 0.0 {
                return Err(Error::OutOfRange { name: "eta", value: eta, range: "(0, 1] for a phase estimate" });
            }
            let folded = fold_phase(config.phi);
            let err = phase_error(n_bar, folded, eta).map_err(|e| match e {
                Error::SingularOperatingPoint(_) => singular(config),
                other => other,
            })?;
            if let PhaseError::Finite(value) = err {
                let slope = gaussian::signal_derivative(n_bar, folded, eta).abs();
                let routed = variance.sqrt() / slope;
                // Var(N) carries |<a²>|² and <N>², each off by about
                // 2·|value|·rounding through the composed map.
                let var_rounding = rounding * (1.0 + 2.0 * moments.m_aa.norm() + 2.0 * moments.m_n);
                let budget = INTERNAL_AGREEMENT + 0.5 * var_rounding / variance.max(f64::MIN_POSITIVE);
                if slope > 0.0 && (routed - value).abs() > budget * value {
                    return Err(Error::InvalidInput(format!(
                        "closed-form phase error {value} disagrees with moment route {routed}"
                    )));
                }
            }
            err
        }
        None => {
            if fold_phase(config.phi) == 0.0 {
                return Err(singular(config));
            }
            let curve = |phi: f64| -> Result<(f64, f64)> {
                let m = protocol_moments(config.r, phi, config.eta1, config.eta2)?;
                Ok((m.m_n, variance_number(&m)?))
            };
            PhaseError::Finite(error_propagation(curve, config.phi, DEFAULT_STEP)?.delta_phi)
        }
    };
    Ok(ProtocolResult {
        engine: EngineKind::Gaussian,
        moments,
        signal: moments.m_n,
        variance,
        factorial_second: moments.factorial_second(),
        phase_error: Some(phase_error),
        cutoff: None,
        stages: Vec::new(),
    })
}

/// Maps `φ` onto `[0, π/2]`, where the closed forms are written. The
/// pipeline depends on `φ` only through `e^{±2iφ}` and is even in `φ`.
fn fold_phase(phi: f64) -> f64 {
    let m = phi.rem_euclid(std::f64::consts::PI);
    if m > FRAC_PI_2 {
        std::f64::consts::PI - m
    } else {
        m
    }
}

/// Final state of a Fock run.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Pure(PureState),
    Mixed(MixedState),
}

impl FinalState {
    pub fn as_fock(&self) -> &dyn FockState {
        match self {
            FinalState::Pure(s) => s,
            FinalState::Mixed(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockRun {
    pub state: FinalState,
    pub cutoff: usize,
    pub stages: Vec<StageDiagnostic>,
}

fn tag(stage: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::TruncationOverflow { deficit, limit, cutoff, .. } => Error::TruncationOverflow {
            stage: format!("{stage} (raise --cutoff)"),
            deficit,
            limit,
            cutoff,
        },
        other => other,
    }
}

/// Evolves the vacuum through the pipeline on a truncated basis.
///
/// Lossless runs stay with state vectors; otherwise the state becomes a
/// density matrix at the first loss.
pub fn fock_pipeline(config: &ProtocolConfig) -> Result<FockRun> {
    let cutoff = match config.cutoff {
        Some(c) => c,
        None => default_cutoff(config)?,
    };
    if cutoff < 2 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let mut stages = Vec::with_capacity(5);
    let mut record = |stage: &'static str, state: &dyn FockState| {
        stages.push(StageDiagnostic { stage, deficit: state.deficit().max(0.0) });
    };

    let vacuum = PureState::vacuum(Modes::Single, cutoff);
    let squeezed = vacuum.apply_squeeze(config.r).map_err(tag("squeeze"))?;
    record("squeeze", &squeezed);
    let shifted = squeezed.apply_phase(config.phi, PhaseConvention::SingleMode)?;
    record("phase", &shifted);

    let state = if config.is_lossless() {
        let out = shifted.apply_squeeze(-config.r).map_err(tag("anti-squeeze"))?;
        record("anti-squeeze", &out);
        FinalState::Pure(out)
    } else {
        let lossy = shifted.apply_loss(config.eta1, 0).map_err(tag("loss 1"))?;
        record("loss 1", &lossy);
        let back = lossy.apply_squeeze(-config.r).map_err(tag("anti-squeeze"))?;
        record("anti-squeeze", &back);
        let out = back.apply_loss(config.eta2, 0).map_err(tag("loss 2"))?;
        record("loss 2", &out);
        FinalState::Mixed(out)
    };
    let deficit = state.as_fock().deficit();
    if deficit > MAX_FINAL_DEFICIT {
        return Err(Error::TruncationOverflow {
            stage: "final state (raise --cutoff)".into(),
            deficit,
            limit: MAX_FINAL_DEFICIT,
            cutoff,
        });
    }
    Ok(FockRun { state, cutoff, stages })
}

/// Photon-number probabilities at the detector (unnormalized: they sum to
/// the final weight).
pub fn output_distribution(config: &ProtocolConfig) -> Result<Vec<f64>> {
    Ok(fock_pipeline(config)?.state.as_fock().populations())
}

struct FockMoments {
    moments: MomentVector,
    variance: f64,
    factorial_second: f64,
}

fn fock_moments(state: &dyn FockState) -> Result<FockMoments> {
    let m_n = state.expectation(Observable::Number, 0)?.re;
    let m_n2 = state.expectation(Observable::NumberSquared, 0)?.re;
    let m_aa = state.expectation(Observable::Quadrature2, 0)?;
    Ok(FockMoments {
        moments: MomentVector::new(m_aa, m_n),
        variance: m_n2 - m_n * m_n,
        factorial_second: m_n2 - m_n,
    })
}

/// The pipeline on the truncated Fock basis.
///
/// The phase error is obtained by [`error_propagation`] over repeated runs
/// at the same cutoff. It is `None` at a fringe extremum; `φ = 0` with loss
/// is an error.
pub fn run_fock(config: &ProtocolConfig) -> Result<ProtocolResult> {
    if fold_phase(config.phi) == 0.0 && !config.is_lossless() {
        return Err(singular(config));
    }
    let run = fock_pipeline(config)?;
    let m = fock_moments(run.state.as_fock())?;
    let fixed = ProtocolConfig { cutoff: Some(run.cutoff), ..*config };
    let phase_error = if fold_phase(config.phi) == 0.0 {
        None
    } else {
        let curve = |phi: f64| -> Result<(f64, f64)> {
            let r = fock_pipeline(&fixed.with_phi(phi))?;
            let m = fock_moments(r.state.as_fock())?;
            Ok((m.moments.m_n, m.variance))
        };
        match error_propagation(curve, config.phi, DEFAULT_STEP) {
            Ok(e) => Some(PhaseError::Finite(e.delta_phi)),
            Err(Error::VanishingDerivative { .. }) => None,
            Err(e) => return Err(e),
        }
    };
    Ok(ProtocolResult {
        engine: EngineKind::Fock,
        moments: m.moments,
        signal: m.moments.m_n,
        variance: m.variance,
        factorial_second: m.factorial_second,
        phase_error,
        cutoff: Some(run.cutoff),
        stages: run.stages,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPropagation {
    pub delta_phi: f64,
    pub signal: f64,
    pub variance: f64,
    pub slope: f64,
    pub refined: bool,
}

/// `Δφ = √Var / |∂S/∂φ|` from a curve `φ ↦ (S, Var)`.
///
/// The slope is a central difference with step-halving refinement. A slope
/// below 1e-12, or a signal difference across the stencil that is lost in
/// rounding, is reported as [`Error::VanishingDerivative`].
pub fn error_propagation<F>(mut curve: F, phi: f64, step: f64) -> Result<ErrorPropagation>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let stencil = differentiate(
        |p| {
            let (s, v) = curve(p)?;
            Ok(vec![s, v])
        },
        phi,
        step,
    )?;
    let slope = stencil.derivative[0];
    let signal = stencil.center[0];
    let variance = stencil.center[1];
    let scale = stencil
        .samples
        .iter()
        .map(|s| s[0].abs())
        .fold(signal.abs(), f64::max);
    let spread = (stencil.samples[3][0] - stencil.samples[0][0]).abs();
    if slope.abs() < 1e-12 || spread <= 64.0 * f64::EPSILON * scale {
        return Err(Error::VanishingDerivative { phi, derivative: slope });
    }
    if variance < 0.0 {
        return Err(Error::InvalidInput(format!("negative variance {variance} at phi = {phi}")));
    }
    Ok(ErrorPropagation {
        delta_phi: variance.sqrt() / slope.abs(),
        signal,
        variance,
        slope,
        refined: stencil.refined > 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub gaussian: f64,
    pub fock: f64,
    pub abs: f64,
    pub rel: f64,
}

impl Deviation {
    pub fn new(gaussian: f64, fock: f64) -> Self {
        let abs = (gaussian - fock).abs();
        Self { gaussian, fock, abs, rel: abs / gaussian.abs().max(1.0) }
    }
}

/// Side-by-side Gaussian and Fock results for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub signal: Deviation,
    pub variance: Deviation,
    pub m_aa_re: Deviation,
    pub m_aa_im: Deviation,
    pub phase_error: Option<Deviation>,
    pub cutoff: usize,
    pub stages: Vec<StageDiagnostic>,
}

impl ComparisonReport {
    pub fn new(gaussian: &ProtocolResult, fock: &ProtocolResult) -> Self {
        let phase_error = match (gaussian.phase_error, fock.phase_error) {
            (Some(g), Some(f)) => Some(Deviation::new(g.value(), f.value())),
            _ => None,
        };
        Self {
            signal: Deviation::new(gaussian.signal, fock.signal),
            variance: Deviation::new(gaussian.variance, fock.variance),
            m_aa_re: Deviation::new(gaussian.moments.m_aa.re, fock.moments.m_aa.re),
            m_aa_im: Deviation::new(gaussian.moments.m_aa.im, fock.moments.m_aa.im),
            phase_error,
            cutoff: fock.cutoff.unwrap_or(0),
            stages: fock.stages.clone(),
        }
    }

    /// Largest relative deviation over the moments (the phase error is a
    /// finite-difference quantity on the Fock side and is excluded).
    pub fn max_moment_rel(&self) -> f64 {
        [self.signal.rel, self.variance.rel, self.m_aa_re.rel, self.m_aa_im.rel]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn final_deficit(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.deficit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: ProtocolConfig,
    pub gaussian: Option<ProtocolResult>,
    pub fock: Option<ProtocolResult>,
    pub comparison: Option<ComparisonReport>,
}

/// Runs the engines selected in `config`.
pub fn run(config: &ProtocolConfig) -> Result<RunReport> {
    let gaussian = config.engine.runs_gaussian().then(|| run_gaussian(config)).transpose()?;
    let fock = config.engine.runs_fock().then(|| run_fock(config)).transpose()?;
    let comparison = match (&gaussian, &fock) {
        (Some(g), Some(f)) => Some(ComparisonReport::new(g, f)),
        _ => None,
    };
    Ok(RunReport { config: *config, gaussian, fock, comparison })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_squeezed_vacuum;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn config_validation() {
        let c = ProtocolConfig::new(Some(1.0), Some(1f64.asinh()), 0.1, 1.0, 1.0).unwrap();
        assert!((c.n_bar() - 1.0).abs() < 1e-15);
        assert!(ProtocolConfig::new(Some(1.0), Some(0.9), 0.1, 1.0, 1.0).is_err());
        assert!(ProtocolConfig::new(None, None, 0.1, 1.0, 1.0).is_err());
        assert!(ProtocolConfig::new(Some(0.0), None, 0.1, 1.0, 1.0).is_err());
        assert!(ProtocolConfig::new(Some(1.0), None, 0.1, 1.2, 1.0).is_err());
        assert!(ProtocolConfig::new(Some(1.0), None, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_examples() {
        let g = run_gaussian(&ProtocolConfig::from_n_bar(1.0, FRAC_PI_2, 1.0).unwrap()).unwrap();
        assert!((g.signal - 8.0).abs() < 1e-12);
        assert!((g.variance - 144.0).abs() < 1e-10);
        let dark = run_gaussian(&ProtocolConfig::from_n_bar(3.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(dark.signal.abs() < 1e-12 && dark.variance.abs() < 1e-12);
        assert!(dark.phase_error.unwrap().is_limit());
        assert!(matches!(
            run_gaussian(&ProtocolConfig::from_n_bar(1.0, 0.0, 0.9).unwrap()),
            Err(Error::SingularOperatingPoint(_))
        ));
    }

    #[test]
    fn unequal_losses_use_numeric_slope() {
        let c = ProtocolConfig::new(Some(1.0), None, 0.3, 0.9, 0.9).unwrap();
        let equal = run_gaussian(&c).unwrap().phase_error.unwrap().value();
        let nudged = ProtocolConfig::new(Some(1.0), None, 0.3, 0.9, 0.9 - 1e-13).unwrap();
        let numeric = run_gaussian(&nudged).unwrap().phase_error.unwrap().value();
        assert!(close(numeric, equal, 1e-7));
    }

    #[test]
    fn fock_lossless_returns_to_vacuum() {
        for r in [0.3, 0.8814] {
            let c = ProtocolConfig::new(None, Some(r), 0.0, 1.0, 1.0).unwrap().with_cutoff(60);
            let run = fock_pipeline(&c).unwrap();
            let FinalState::Pure(out) = run.state else { panic!("lossless run should stay pure") };
            let vac = PureState::vacuum(Modes::Single, 60);
            assert!(out.fidelity(&vac).unwrap() >= 1.0 - 1e-8);
            let res = run_fock(&c).unwrap();
            assert!(res.phase_error.is_none());
        }
    }

    #[test]
    fn fock_signal_at_bright_fringe() {
        let c = ProtocolConfig::from_n_bar(1.0, FRAC_PI_2, 1.0).unwrap();
        let res = run_fock(&c).unwrap();
        assert!((res.signal - 8.0).abs() < 1e-8, "{}", res.signal);
        assert!(res.cutoff.unwrap() > 128);
    }

    #[test]
    fn unequal_losses_match_oracle() {
        let c = ProtocolConfig::new(None, Some(0.5), 0.2, 0.95, 0.9).unwrap().with_cutoff(60);
        let report = run(&c).unwrap();
        let cmp = report.comparison.unwrap();
        assert!(cmp.max_moment_rel() < 1e-6, "{cmp:?}");
        let pe = cmp.phase_error.unwrap();
        assert!(pe.rel < 1e-6, "{pe:?}");
    }

    #[test]
    fn cross_engine_at_moderate_loss() {
        let c = ProtocolConfig::from_n_bar(1.0, 0.3, 0.9).unwrap();
        let report = run(&c).unwrap();
        assert!(report.comparison.unwrap().max_moment_rel() < 1e-6);
    }

    #[test]
    fn error_propagation_examples() {
        for (n, expected) in [(1.0, 0.25), (5.0, 1.0 / 240f64.sqrt())] {
            let curve = |phi: f64| -> Result<(f64, f64)> {
                Ok((gaussian::lossless_signal(n, phi), gaussian::lossless_variance(n, phi)))
            };
            let e = error_propagation(curve, 1e-4, DEFAULT_STEP).unwrap();
            assert!(close(e.delta_phi, expected, 1e-4));
        }
        let curve = |phi: f64| -> Result<(f64, f64)> {
            Ok((gaussian::lossless_signal(1.0, phi), gaussian::lossless_variance(1.0, phi)))
        };
        assert!(matches!(
            error_propagation(curve, FRAC_PI_2, DEFAULT_STEP),
            Err(Error::VanishingDerivative { .. })
        ));
    }

    #[test]
    fn loss_commutes_with_phase() {
        let psi = make_squeezed_vacuum(0.6, 0.0, 50).unwrap();
        let a = psi.apply_phase(0.37, PhaseConvention::SingleMode).unwrap().apply_loss(0.8, 0).unwrap();
        let b = psi.apply_loss(0.8, 0).unwrap().apply_phase(0.37, PhaseConvention::SingleMode).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
    }

    #[test]
    fn deficit_shrinks_with_cutoff() {
        let base = ProtocolConfig::from_n_bar(1.0, 0.4, 0.9).unwrap();
        let mut last = f64::INFINITY;
        for cutoff in [60, 70, 80, 90] {
            let res = run_fock(&base.with_cutoff(cutoff)).unwrap();
            let d = res.final_deficit();
            assert!(d <= last + 1e-15, "{cutoff}: {d} > {last}");
            last = d;
        }
    }

    #[test]
    fn default_cutoff_policy() {
        let c = ProtocolConfig::from_n_bar(1.0, 0.3, 0.9).unwrap();
        let cut = default_cutoff(&c).unwrap();
        assert!(cut >= 16 && cut % 2 == 0);
        assert!(squeezed_vacuum_tail(1f64.asinh(), cut) <= CUTOFF_TAIL_TARGET);
        let big = ProtocolConfig::from_n_bar(50.0, 0.3, 0.9).unwrap();
        assert_eq!(default_cutoff(&big).unwrap(), MIXED_CUTOFF_CAP);
    }
}
