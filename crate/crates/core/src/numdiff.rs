//! Central differences with one level of Richardson refinement.
//!
//! A function `f: φ ↦ vector` is sampled at `φ ± h` and `φ ± h/2`. For each
//! component the two central estimates `D(h)` and `D(h/2)` are compared; if
//! they differ by more than [`REFINE_TOL`] relative, the extrapolated value
//! `(4 D(h/2) − D(h)) / 3` is used instead of `D(h/2)`.

use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const REFINE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub center: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Samples at `φ − h, φ − h/2, φ + h/2, φ + h`.
    pub samples: [Vec<f64>; 4],
    /// Number of components that needed Richardson refinement.
    pub refined: usize,
    pub step: f64,
}

/// Differentiates every component of `f` at `x`.
pub fn differentiate<F>(mut f: F, x: f64, step: f64) -> Result<Stencil>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::OutOfRange { name: "step", value: step, range: "(0, ∞)" });
    }
    let center = f(x)?;
    let samples = [f(x - step)?, f(x - 0.5 * step)?, f(x + 0.5 * step)?, f(x + step)?];
    if samples.iter().any(|s| s.len() != center.len()) {
        return Err(Error::InvalidInput("curve changed length across the stencil".into()));
    }
    let mut refined = 0;
    let derivative = (0..center.len())
        .map(|i| {
            let wide = (samples[3][i] - samples[0][i]) / (2.0 * step);
            let narrow = (samples[2][i] - samples[1][i]) / step;
            if (wide - narrow).abs() > REFINE_TOL * narrow.abs() {
                refined += 1;
                (4.0 * narrow - wide) / 3.0
            } else {
                narrow
            }
        })
        .collect();
    Ok(Stencil { center, derivative, samples, refined, step })
}

/// Scalar convenience wrapper around [`differentiate`].
pub fn derivative<F>(mut f: F, x: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok(differentiate(|t| Ok(vec![f(t)?]), x, step)?.derivative[0])
}
