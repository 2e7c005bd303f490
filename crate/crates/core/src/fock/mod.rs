//! Exact one- and two-mode bosonic states on a truncated Fock basis.
//!
//! A state keeps every photon-number amplitude up to and including `cutoff`
//! in each mode. Two-mode amplitudes are stored row-major with the first
//! mode (`a`) as the slow index. Nothing is renormalized silently: a state
//! records the weight it lost to truncation, and constructors or operations
//! that would lose more than their stated budget return
//! [`Error::TruncationOverflow`].

mod constructors;
mod expm;
mod observables;
mod ops;

pub use constructors::{
    make_coherent, make_ecs, make_noon, make_squeezed_vacuum, make_tmsv, make_twin_fock,
    squeezed_vacuum_tail,
};
pub use observables::{Expectation, ModeMoments, Observable, ObservableMoments, PhotonDistribution};
pub use ops::PhaseConvention;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Truncation tolerance recorded for states whose measured deficit is smaller.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-10;
/// Largest norm deficit a constructor or channel accepts.
pub const MAX_NORM_DEFICIT: f64 = 1e-6;
/// Largest norm deficit accepted after a squeezing operation.
pub const MAX_SQUEEZE_DEFICIT: f64 = 1e-8;

/// Slack allowed above unit norm before a state is rejected outright.
const NORM_EXCESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modes {
    Single,
    Two,
}

impl Modes {
    pub fn count(self) -> usize {
        match self {
            Modes::Single => 1,
            Modes::Two => 2,
        }
    }

    fn dim(self, cutoff: usize) -> usize {
        match self {
            Modes::Single => cutoff + 1,
            Modes::Two => (cutoff + 1) * (cutoff + 1),
        }
    }
}

/// Behaviour shared by pure and mixed truncated states.
pub trait FockState {
    fn modes(&self) -> Modes;
    fn cutoff(&self) -> usize;
    /// `Σ|c|²` for pure states, the trace for mixed states.
    fn weight(&self) -> f64;
    fn truncation_tol(&self) -> f64;
    /// Unnormalized diagonal of the state in the product Fock basis.
    fn populations(&self) -> Vec<f64>;
    /// Unnormalized `Tr(ρ a_mode²)`.
    fn raw_a2(&self, mode: usize) -> Complex64;

    fn deficit(&self) -> f64 {
        1.0 - self.weight()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        let modes = self.modes().count();
        if mode >= modes {
            return Err(Error::ModeIndex { index: mode, modes });
        }
        Ok(())
    }
}

/// Pure state: a complex amplitude tensor of shape `(cutoff+1)` or
/// `(cutoff+1) × (cutoff+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    modes: Modes,
    cutoff: usize,
    amplitudes: Vec<Complex64>,
    truncation_tol: f64,
}

impl PureState {
    /// Wraps raw amplitudes, rejecting shape errors, norms above one and
    /// deficits beyond [`MAX_NORM_DEFICIT`].
    pub fn new(modes: Modes, cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_parts(modes, cutoff, amplitudes, "construction", MAX_NORM_DEFICIT)
    }

    /// Rescales arbitrary (nonzero) amplitudes to unit norm.
    pub fn normalized(modes: Modes, cutoff: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(modes, cutoff, amplitudes)
    }

    pub(crate) fn from_parts(
        modes: Modes,
        cutoff: usize,
        amplitudes: Vec<Complex64>,
        stage: &str,
        limit: f64,
    ) -> Result<Self> {
        let dim = modes.dim(cutoff);
        if amplitudes.len() != dim {
            return Err(Error::InvalidInput(format!(
                "expected {dim} amplitudes for {} mode(s) at cutoff {cutoff}, got {}",
                modes.count(),
                amplitudes.len()
            )));
        }
        let weight: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !weight.is_finite() || weight > 1.0 + NORM_EXCESS_TOL {
            return Err(Error::InvalidInput(format!("state norm² {weight} exceeds one")));
        }
        let deficit = (1.0 - weight).max(0.0);
        if deficit > limit {
            return Err(Error::TruncationOverflow {
                stage: stage.to_string(),
                deficit,
                limit,
                cutoff,
            });
        }
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
            truncation_tol: deficit.max(DEFAULT_TRUNCATION_TOL),
        })
    }

    pub fn vacuum(modes: Modes, cutoff: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); modes.dim(cutoff)];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            modes,
            cutoff,
            amplitudes,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        }
    }

    /// Single-mode number state `|n⟩`.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidInput(format!("|{n}⟩ does not fit below cutoff {cutoff}")));
        }
        let mut state = Self::vacuum(Modes::Single, cutoff);
        state.amplitudes.swap(0, n);
        Ok(state)
    }

    /// Two-mode number state `|n_a, n_b⟩`.
    pub fn number2(n_a: usize, n_b: usize, cutoff: usize) -> Result<Self> {
        if n_a.max(n_b) > cutoff {
            return Err(Error::InvalidInput(format!(
                "|{n_a},{n_b}⟩ does not fit below cutoff {cutoff}"
            )));
        }
        let mut state = Self::vacuum(Modes::Two, cutoff);
        state.amplitudes.swap(0, n_a * (cutoff + 1) + n_b);
        Ok(state)
    }

    /// `|ψ⟩ ⊗ |χ⟩` of two single-mode states with equal cutoffs.
    pub fn product(a: &PureState, b: &PureState) -> Result<Self> {
        for s in [a, b] {
            if s.modes != Modes::Single {
                return Err(Error::ModeMismatch { expected: 1, actual: s.modes.count() });
            }
        }
        if a.cutoff != b.cutoff {
            return Err(Error::CutoffMismatch(a.cutoff, b.cutoff));
        }
        let amplitudes = a
            .amplitudes
            .iter()
            .flat_map(|&x| b.amplitudes.iter().map(move |&y| x * y))
            .collect();
        Self::from_parts(Modes::Two, a.cutoff, amplitudes, "tensor product", MAX_NORM_DEFICIT)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Single-mode amplitude `⟨n|ψ⟩`; zero beyond the cutoff.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        match self.modes {
            Modes::Single if n <= self.cutoff => self.amplitudes[n],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Two-mode amplitude `⟨n_a, n_b|ψ⟩`; zero beyond the cutoff.
    pub fn amplitude2(&self, n_a: usize, n_b: usize) -> Complex64 {
        match self.modes {
            Modes::Two if n_a <= self.cutoff && n_b <= self.cutoff => {
                self.amplitudes[n_a * (self.cutoff + 1) + n_b]
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// `|⟨self|other⟩|²` without renormalization.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    fn check_compatible(&self, other: &PureState) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes.count(),
                actual: other.modes.count(),
            });
        }
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(())
    }

    pub fn to_mixed(&self) -> MixedState {
        let dim = self.amplitudes.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        MixedState {
            modes: self.modes,
            cutoff: self.cutoff,
            matrix,
            truncation_tol: self.truncation_tol,
        }
    }

    pub(crate) fn require_modes(&self, modes: Modes) -> Result<()> {
        if self.modes != modes {
            return Err(Error::ModeMismatch {
                expected: modes.count(),
                actual: self.modes.count(),
            });
        }
        Ok(())
    }
}

impl FockState for PureState {
    fn modes(&self) -> Modes {
        self.modes
    }

    fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn weight(&self) -> f64 {
        self.norm_sqr()
    }

    fn truncation_tol(&self) -> f64 {
        self.truncation_tol
    }

    fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    fn raw_a2(&self, mode: usize) -> Complex64 {
        let d = self.cutoff + 1;
        let mut acc = Complex64::new(0.0, 0.0);
        match self.modes {
            Modes::Single => {
                for n in 0..d.saturating_sub(2) {
                    acc += self.amplitudes[n].conj() * self.amplitudes[n + 2] * lowering2(n);
                }
            }
            Modes::Two => {
                for (idx, c) in self.amplitudes.iter().enumerate() {
                    let (na, nb) = (idx / d, idx % d);
                    let (n, shifted) = if mode == 0 { (na, na + 2) } else { (nb, nb + 2) };
                    if shifted >= d {
                        continue;
                    }
                    let target = if mode == 0 { shifted * d + nb } else { na * d + shifted };
                    acc += c.conj() * self.amplitudes[target] * lowering2(n);
                }
            }
        }
        acc
    }
}

/// `⟨n|a²|n+2⟩ = √((n+1)(n+2))`.
fn lowering2(n: usize) -> f64 {
    (((n + 1) * (n + 2)) as f64).sqrt()
}

/// Density matrix over the truncated product Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    modes: Modes,
    cutoff: usize,
    matrix: DMatrix<Complex64>,
    truncation_tol: f64,
}

impl MixedState {
    /// Validates shape, Hermiticity (1e-12 elementwise) and trace.
    /// Positivity is checked separately by [`MixedState::min_eigenvalue`].
    pub fn new(modes: Modes, cutoff: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = modes.dim(cutoff);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidInput(format!(
                "expected a {dim}×{dim} density matrix, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = hermiticity_error(&matrix);
        if asym > 1e-12 {
            return Err(Error::InvalidInput(format!("density matrix is not Hermitian (error {asym:.3e})")));
        }
        Self::from_parts(modes, cutoff, matrix, "construction", MAX_NORM_DEFICIT, DEFAULT_TRUNCATION_TOL)
    }

    pub(crate) fn from_parts(
        modes: Modes,
        cutoff: usize,
        matrix: DMatrix<Complex64>,
        stage: &str,
        limit: f64,
        inherited_tol: f64,
    ) -> Result<Self> {
        let trace = matrix.trace().re;
        if !trace.is_finite() || trace > 1.0 + NORM_EXCESS_TOL {
            return Err(Error::InvalidInput(format!("density matrix trace {trace} exceeds one")));
        }
        let deficit = (1.0 - trace).max(0.0);
        if deficit > limit {
            return Err(Error::TruncationOverflow {
                stage: stage.to_string(),
                deficit,
                limit,
                cutoff,
            });
        }
        Ok(Self {
            modes,
            cutoff,
            matrix,
            truncation_tol: deficit.max(inherited_tol),
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if self.modes != psi.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes.count(),
                actual: psi.modes.count(),
            });
        }
        if self.cutoff != psi.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, psi.cutoff));
        }
        let v = nalgebra::DVector::from_column_slice(&psi.amplitudes);
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// Largest elementwise difference to another density matrix.
    pub fn max_abs_diff(&self, other: &MixedState) -> Result<f64> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn require_modes(&self, modes: Modes) -> Result<()> {
        if self.modes != modes {
            return Err(Error::ModeMismatch {
                expected: modes.count(),
                actual: self.modes.count(),
            });
        }
        Ok(())
    }
}

impl From<&PureState> for MixedState {
    fn from(psi: &PureState) -> Self {
        psi.to_mixed()
    }
}

impl FockState for MixedState {
    fn modes(&self) -> Modes {
        self.modes
    }

    fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn weight(&self) -> f64 {
        self.trace()
    }

    fn truncation_tol(&self) -> f64 {
        self.truncation_tol
    }

    fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    fn raw_a2(&self, mode: usize) -> Complex64 {
        // Tr(ρ a²) = Σ ρ[k', k] ⟨k|a²|k'⟩ with k' = k shifted up by two in `mode`.
        let d = self.cutoff + 1;
        let mut acc = Complex64::new(0.0, 0.0);
        match self.modes {
            Modes::Single => {
                for n in 0..d.saturating_sub(2) {
                    acc += self.matrix[(n + 2, n)] * lowering2(n);
                }
            }
            Modes::Two => {
                for idx in 0..d * d {
                    let (na, nb) = (idx / d, idx % d);
                    let (n, shifted) = if mode == 0 { (na, na + 2) } else { (nb, nb + 2) };
                    if shifted >= d {
                        continue;
                    }
                    let target = if mode == 0 { shifted * d + nb } else { na * d + shifted };
                    acc += self.matrix[(target, idx)] * lowering2(n);
                }
            }
        }
        acc
    }
}

fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shape_and_norm_errors() {
        assert!(PureState::new(Modes::Single, 3, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        let too_big = vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)];
        assert!(PureState::new(Modes::Single, 1, too_big).is_err());
        let lossy = vec![Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(
            PureState::new(Modes::Single, 1, lossy),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn product_state_layout() {
        let one = PureState::number(1, 2).unwrap();
        let two = PureState::number(2, 2).unwrap();
        let psi = PureState::product(&one, &two).unwrap();
        assert_eq!(psi.amplitude2(1, 2), Complex64::new(1.0, 0.0));
        assert_eq!(psi.norm_sqr(), 1.0);
        assert_eq!(psi, PureState::number2(1, 2, 2).unwrap());
    }

    #[test]
    fn pure_to_mixed_is_rank_one() {
        let psi = PureState::normalized(
            Modes::Single,
            2,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0)],
        )
        .unwrap();
        let rho = psi.to_mixed();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.fidelity_with_pure(&psi).unwrap() - 1.0).abs() < 1e-14);
        assert!(rho.min_eigenvalue() > -1e-14);
        assert!(rho.hermiticity_error() < 1e-15);
    }

    #[test]
    fn mixed_state_validation() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.2);
        assert!(MixedState::new(Modes::Single, 1, m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.0, -0.2);
        assert!(MixedState::new(Modes::Single, 1, m).is_ok());
    }
}
