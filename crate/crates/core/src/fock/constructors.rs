//! Standard probe states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Modes, PureState, MAX_NORM_DEFICIT};
use crate::{Error, Result};

/// Smallest `|α|²` accepted by [`make_ecs`]; below it the two branches are
/// indistinguishable and the normalization degenerates.
pub const ECS_MIN_INTENSITY: f64 = 1e-8;

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    amps
}

/// Coherent state `|α⟩`, `c_n = e^{-|α|²/2} αⁿ/√(n!)`.
pub fn make_coherent(alpha: Complex64, cutoff: usize) -> Result<PureState> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("coherent amplitude must be finite".into()));
    }
    PureState::from_parts(
        Modes::Single,
        cutoff,
        coherent_amplitudes(alpha, cutoff),
        "coherent state",
        MAX_NORM_DEFICIT,
    )
}

fn squeezed_amplitudes(r: f64, phi: f64, cutoff: usize) -> Vec<Complex64> {
    let mut amps = zeros(cutoff + 1);
    let t = r.tanh();
    let rotation = Complex64::from_polar(1.0, 2.0 * phi);
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    amps[0] = c;
    for j in 1..=cutoff / 2 {
        let ratio = -(((2 * j - 1) as f64) / ((2 * j) as f64)).sqrt() * t;
        c = c * rotation * ratio;
        amps[2 * j] = c;
    }
    amps
}

/// Single-mode squeezed vacuum `|s(r, φ)⟩`.
///
/// Only even levels are populated:
/// `c_{2j} = (-1)ʲ √((2j)!)/(2ʲ j!) · tanhʲ r / √(cosh r) · e^{2ijφ}`.
pub fn make_squeezed_vacuum(r: f64, phi: f64, cutoff: usize) -> Result<PureState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::OutOfRange { name: "r", value: r, range: "[0, ∞)" });
    }
    if cutoff < 2 {
        return Err(Error::InvalidInput(format!(
            "squeezed vacuum needs a cutoff of at least 2, got {cutoff}"
        )));
    }
    PureState::from_parts(
        Modes::Single,
        cutoff,
        squeezed_amplitudes(r, phi, cutoff),
        "squeezed vacuum",
        MAX_NORM_DEFICIT,
    )
}

/// Weight of `|s(r, ·)⟩` above `cutoff`, summed from the series until the
/// terms drop below machine precision.
pub fn squeezed_vacuum_tail(r: f64, cutoff: usize) -> f64 {
    let t2 = r.tanh().powi(2);
    let mut p = 1.0 / r.cosh();
    let mut j = 0usize;
    let mut tail = 0.0;
    loop {
        if 2 * j > cutoff {
            tail += p;
            if p < 1e-18 * tail.max(1e-300) || p == 0.0 {
                break;
            }
        }
        j += 1;
        p *= ((2 * j - 1) as f64) / ((2 * j) as f64) * t2;
        if j > 1_000_000 {
            break;
        }
    }
    tail
}

/// NOON state `(|n,0⟩ + |0,n⟩)/√2`.
pub fn make_noon(n: usize, cutoff: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::InvalidInput("NOON state needs at least one photon".into()));
    }
    if cutoff < n {
        return Err(Error::InvalidInput(format!("NOON state with n = {n} needs cutoff ≥ {n}, got {cutoff}")));
    }
    let d = cutoff + 1;
    let mut amps = zeros(d * d);
    amps[n * d] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[n] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::from_parts(Modes::Two, cutoff, amps, "NOON state", MAX_NORM_DEFICIT)
}

/// Twin Fock input `|n/2⟩ ⊗ |n/2⟩` (before any beam splitter).
pub fn make_twin_fock(n_half: usize, cutoff: usize) -> Result<PureState> {
    PureState::number2(n_half, n_half, cutoff)
}

/// Entangled coherent state `(|α⟩|0⟩ + |0⟩|α⟩)/N` with the exact
/// normalization `N² = 2 + 2e^{-|α|²}`.
pub fn make_ecs(alpha: Complex64, cutoff: usize) -> Result<PureState> {
    let intensity = alpha.norm_sqr();
    if !(intensity >= ECS_MIN_INTENSITY) || !intensity.is_finite() {
        return Err(Error::OutOfRange {
            name: "|alpha|^2",
            value: intensity,
            range: "[1e-8, ∞)",
        });
    }
    let norm = (2.0 + 2.0 * (-intensity).exp()).sqrt();
    let coh = coherent_amplitudes(alpha, cutoff);
    let d = cutoff + 1;
    let mut amps = zeros(d * d);
    for (n, c) in coh.iter().enumerate() {
        // |α⟩|0⟩ fills the first column, |0⟩|α⟩ the first row.
        amps[n * d] += c / norm;
        amps[n] += c / norm;
    }
    PureState::from_parts(Modes::Two, cutoff, amps, "entangled coherent state", MAX_NORM_DEFICIT)
}

/// Two-mode squeezed vacuum `Σ (tanh r)ⁿ / cosh r · |n, n⟩`.
pub fn make_tmsv(r: f64, cutoff: usize) -> Result<PureState> {
    if !r.is_finite() {
        return Err(Error::OutOfRange { name: "r", value: r, range: "(-∞, ∞)" });
    }
    let d = cutoff + 1;
    let mut amps = zeros(d * d);
    let t = r.tanh();
    let mut c = 1.0 / r.cosh();
    for n in 0..d {
        amps[n * d + n] = Complex64::new(c, 0.0);
        c *= t;
    }
    PureState::from_parts(Modes::Two, cutoff, amps, "two-mode squeezed vacuum", MAX_NORM_DEFICIT)
}
