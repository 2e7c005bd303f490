//! Expectation values and photon-number statistics.
//!
//! Expectations are conditional on the truncated space: raw traces are
//! divided by the state's weight, so a state that lost `1e-10` to truncation
//! still reports `⟨1⟩ = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockState, Modes};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `n = a†a`
    Number,
    /// `n²`
    NumberSquared,
    /// `n_a n_b` (two modes only; the mode argument is ignored)
    CrossNumber,
    /// `a²`
    Quadrature2,
    /// `a†a†aa = n(n−1)`
    FactorialSecond,
}

impl Observable {
    pub fn is_hermitian(self) -> bool {
        !matches!(self, Observable::Quadrature2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhotonDistribution {
    Single(Vec<f64>),
    /// `p[n_a][n_b]`
    Joint(DMatrix<f64>),
}

impl PhotonDistribution {
    pub fn total(&self) -> f64 {
        match self {
            PhotonDistribution::Single(p) => p.iter().sum(),
            PhotonDistribution::Joint(p) => p.iter().sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMoments {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub variance_n: f64,
    pub mean_a2: Complex64,
}

/// Per-mode number moments plus `⟨n_a n_b⟩` for two-mode states.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMoments {
    pub modes: Vec<ModeMoments>,
    pub cross_nn: Option<f64>,
}

impl ObservableMoments {
    /// `Cov[n_a, n_b]`, for two-mode states.
    pub fn covariance(&self) -> Option<f64> {
        self.cross_nn.map(|nn| nn - self.modes[0].mean_n * self.modes[1].mean_n)
    }
}

/// Per-basis-state photon numbers `(n_a, n_b)`; `n_b = 0` for one mode.
fn occupation(modes: Modes, cutoff: usize, idx: usize) -> (f64, f64) {
    match modes {
        Modes::Single => (idx as f64, 0.0),
        Modes::Two => ((idx / (cutoff + 1)) as f64, (idx % (cutoff + 1)) as f64),
    }
}

pub trait Expectation: FockState {
    /// Normalized expectation value; Hermitian observables have a zero
    /// imaginary part.
    fn expectation(&self, observable: Observable, mode: usize) -> Result<Complex64> {
        self.check_mode(mode)?;
        let weight = self.weight();
        if !(weight > 0.0) {
            return Err(Error::InvalidInput("state has zero weight".into()));
        }
        if observable == Observable::Quadrature2 {
            return Ok(self.raw_a2(mode) / weight);
        }
        if observable == Observable::CrossNumber && self.modes() != Modes::Two {
            return Err(Error::ModeMismatch { expected: 2, actual: 1 });
        }
        let (modes, cutoff) = (self.modes(), self.cutoff());
        let sum: f64 = self
            .populations()
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let (na, nb) = occupation(modes, cutoff, idx);
                let n = if mode == 0 { na } else { nb };
                let value = match observable {
                    Observable::Number => n,
                    Observable::NumberSquared => n * n,
                    Observable::CrossNumber => na * nb,
                    Observable::FactorialSecond => n * (n - 1.0),
                    Observable::Quadrature2 => unreachable!(),
                };
                p * value
            })
            .sum();
        Ok(Complex64::new(sum / weight, 0.0))
    }

    /// Photon-number probabilities, unnormalized (they sum to the weight).
    fn photon_number_distribution(&self) -> PhotonDistribution {
        let p = self.populations();
        match self.modes() {
            Modes::Single => PhotonDistribution::Single(p),
            Modes::Two => {
                let d = self.cutoff() + 1;
                PhotonDistribution::Joint(DMatrix::from_row_slice(d, d, &p))
            }
        }
    }

    /// Distribution of `n_a + n_b` (or of `n` for one mode), unnormalized.
    fn total_photon_distribution(&self) -> Vec<f64> {
        let c = self.cutoff();
        let p = self.populations();
        match self.modes() {
            Modes::Single => p,
            Modes::Two => {
                let d = c + 1;
                let mut out = vec![0.0; 2 * c + 1];
                for (idx, v) in p.into_iter().enumerate() {
                    out[idx / d + idx % d] += v;
                }
                out
            }
        }
    }

    fn observable_moments(&self) -> Result<ObservableMoments> {
        let modes = (0..self.modes().count())
            .map(|m| {
                let mean_n = self.expectation(Observable::Number, m)?.re;
                let mean_n2 = self.expectation(Observable::NumberSquared, m)?.re;
                Ok(ModeMoments {
                    mean_n,
                    mean_n2,
                    variance_n: mean_n2 - mean_n * mean_n,
                    mean_a2: self.expectation(Observable::Quadrature2, m)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cross_nn = match self.modes() {
            Modes::Two => Some(self.expectation(Observable::CrossNumber, 0)?.re),
            Modes::Single => None,
        };
        Ok(ObservableMoments { modes, cross_nn })
    }
}

impl<T: FockState + ?Sized> Expectation for T {}
