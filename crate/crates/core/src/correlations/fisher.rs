//! Classical Fisher information of a measured probability curve.

use crate::numdiff::differentiate;
use crate::{Error, Result};

/// Outcomes below this probability at the operating point are skipped.
pub const MIN_PROBABILITY: f64 = 1e-12;
/// Slack for rounding noise in probabilities.
const NEGATIVE_TOL: f64 = 1e-12;
/// Allowed drift of the total probability across the stencil.
const NORMALIZATION_SPREAD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherEstimate {
    pub value: f64,
    /// Outcomes dropped because `p < MIN_PROBABILITY`.
    pub skipped_outcomes: usize,
    /// Total probability of the dropped outcomes.
    pub skipped_mass: f64,
    /// Outcomes whose derivative needed Richardson refinement.
    pub refined: usize,
}

/// `F(φ) = Σᵢ (∂pᵢ/∂φ)² / pᵢ` with derivatives from central differences.
///
/// `curve(φ)` returns the outcome probabilities. The total may differ from
/// one (truncation), but must not vary over the stencil by more than 1e-8.
pub fn classical_fisher<F>(curve: F, phi: f64, step: f64) -> Result<FisherEstimate>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let stencil = differentiate(curve, phi, step)?;
    let all = std::iter::once(&stencil.center).chain(stencil.samples.iter());
    let mut totals = Vec::with_capacity(5);
    for probs in all {
        for (outcome, &value) in probs.iter().enumerate() {
            if value < -NEGATIVE_TOL || !value.is_finite() {
                return Err(Error::NegativeProbability { outcome, value });
            }
        }
        totals.push(probs.iter().sum::<f64>());
    }
    let lo = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > NORMALIZATION_SPREAD {
        return Err(Error::InconsistentNormalization { spread: hi - lo });
    }

    let mut estimate = FisherEstimate { value: 0.0, skipped_outcomes: 0, skipped_mass: 0.0, refined: stencil.refined };
    for (&p, &dp) in stencil.center.iter().zip(&stencil.derivative) {
        if p < MIN_PROBABILITY {
            estimate.skipped_outcomes += 1;
            estimate.skipped_mass += p.max(0.0);
            continue;
        }
        estimate.value += dp * dp / p;
    }
    Ok(estimate)
}
