//! Unitaries, the amplitude-damping channel and photon-number projection.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::expm::{padding, squeeze_in_place};
use super::{FockState, MixedState, Modes, PureState, MAX_NORM_DEFICIT, MAX_SQUEEZE_DEFICIT};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// `e^{iφ a†a}` on a single mode.
    SingleMode,
    /// `e^{iφ (a†a − b†b)/2}` on two modes.
    RelativeHalf,
}

impl PhaseConvention {
    fn modes(self) -> Modes {
        match self {
            PhaseConvention::SingleMode => Modes::Single,
            PhaseConvention::RelativeHalf => Modes::Two,
        }
    }

    /// Eigenvalue of the generator on each basis state.
    fn generator_diagonal(self, cutoff: usize) -> Vec<f64> {
        let d = cutoff + 1;
        match self {
            PhaseConvention::SingleMode => (0..d).map(|n| n as f64).collect(),
            PhaseConvention::RelativeHalf => (0..d * d)
                .map(|idx| ((idx / d) as f64 - (idx % d) as f64) / 2.0)
                .collect(),
        }
    }
}

/// Binomial loss amplitudes `k[m][j] = √(C(m+j, j) (1−η)ʲ ηᵐ)` for
/// `m + j ≤ cutoff`, so that `Γ_j |m+j⟩ = k[m][j] |m⟩`.
fn kraus_coefficients(eta: f64, cutoff: usize) -> Vec<Vec<f64>> {
    let d = cutoff + 1;
    let mut ln_fact = vec![0.0f64; d];
    for n in 1..d {
        ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
    }
    (0..d)
        .map(|m| {
            (0..d - m)
                .map(|j| {
                    if eta == 1.0 {
                        return if j == 0 { 1.0 } else { 0.0 };
                    }
                    if eta == 0.0 {
                        return if m == 0 { 1.0 } else { 0.0 };
                    }
                    let ln_binom = ln_fact[m + j] - ln_fact[m] - ln_fact[j];
                    (0.5 * (ln_binom + j as f64 * (1.0 - eta).ln() + m as f64 * eta.ln())).exp()
                })
                .collect()
        })
        .collect()
}

/// `V = exp[iπ/4 (a†b + ab†)]` on the `total`-photon block, indexed by
/// `n_a`. The generator is real symmetric tridiagonal; going through its
/// eigenbasis keeps every block exactly unitary. Blocks are cached.
fn beam_splitter_block(total: usize) -> Arc<DMatrix<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DMatrix<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(block) = cache.lock().unwrap().get(&total) {
        return Arc::clone(block);
    }
    let block = Arc::new(beam_splitter_block_uncached(total));
    cache.lock().unwrap().insert(total, Arc::clone(&block));
    block
}

fn beam_splitter_block_uncached(total: usize) -> DMatrix<Complex64> {
    let dim = total + 1;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for na in 0..total {
        let v = (((na + 1) * (total - na)) as f64).sqrt();
        g[(na + 1, na)] = v;
        g[(na, na + 1)] = v;
    }
    let eig = nalgebra::SymmetricEigen::new(g);
    let q = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, FRAC_PI_4 * l)));
    &q * phases * q.transpose()
}

impl PureState {
    /// Diagonal phase shift; the convention must match the mode count.
    pub fn apply_phase(&self, phi: f64, convention: PhaseConvention) -> Result<PureState> {
        self.require_modes(convention.modes())?;
        let diag = convention.generator_diagonal(self.cutoff());
        let mut out = self.clone();
        for (c, g) in out.amplitudes.iter_mut().zip(diag) {
            *c *= Complex64::from_polar(1.0, phi * g);
        }
        Ok(out)
    }

    /// 50:50 beam splitter `V = exp[iπ/4 (a†b + ab†)]`.
    ///
    /// `V` conserves `n_a + n_b`, so it acts block by block. Output levels
    /// above the cutoff are dropped and show up as norm deficit.
    pub fn apply_beam_splitter(&self) -> Result<PureState> {
        self.require_modes(Modes::Two)?;
        let c = self.cutoff();
        let d = c + 1;
        let mut out = vec![ZERO; d * d];
        for total in 0..=2 * c {
            let lo = total.saturating_sub(c);
            let hi = total.min(c);
            let input: Vec<(usize, Complex64)> = (lo..=hi)
                .map(|na| (na, self.amplitudes[na * d + (total - na)]))
                .filter(|&(_, x)| x != ZERO)
                .collect();
            if input.is_empty() {
                continue;
            }
            let v = beam_splitter_block(total);
            for na in lo..=hi {
                out[na * d + (total - na)] = input.iter().map(|&(k, x)| v[(na, k)] * x).sum();
            }
        }
        PureState::from_parts(Modes::Two, c, out, "beam splitter", MAX_NORM_DEFICIT)
    }

    /// Single-mode squeezer `S(r) = exp[(r/2)(a² − a†²)]`; negative `r`
    /// gives `S†(|r|)`.
    ///
    /// The exponential is taken on a padded truncation and the result is cut
    /// back to the cutoff; the discarded weight must stay below
    /// [`MAX_SQUEEZE_DEFICIT`].
    pub fn apply_squeeze(&self, r: f64) -> Result<PureState> {
        self.require_modes(Modes::Single)?;
        let c = self.cutoff();
        let mut work = vec![ZERO; c + 1 + padding(c)];
        work[..=c].copy_from_slice(&self.amplitudes);
        squeeze_in_place(r, &mut work);
        work.truncate(c + 1);
        PureState::from_parts(Modes::Single, c, work, "squeeze", MAX_SQUEEZE_DEFICIT)
    }

    /// Amplitude damping of one mode; see [`MixedState::apply_loss`].
    pub fn apply_loss(&self, eta: f64, mode: usize) -> Result<MixedState> {
        self.to_mixed().apply_loss(eta, mode)
    }

    /// Restriction to `n_a + n_b = photons`, renormalized.
    pub fn project_total_photon(&self, photons: usize) -> Result<PureState> {
        self.require_modes(Modes::Two)?;
        let d = self.cutoff() + 1;
        let amps: Vec<Complex64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, &a)| if idx / d + idx % d == photons { a } else { ZERO })
            .collect();
        let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if weight <= 1e-12 {
            return Err(Error::EmptyProjection { photons, weight });
        }
        let scale = weight.sqrt();
        let amps = amps.into_iter().map(|a| a / scale).collect();
        PureState::from_parts(Modes::Two, self.cutoff(), amps, "projection", MAX_NORM_DEFICIT)
    }
}

/// Top-left `(cutoff+1)²` block of the squeezer computed on a padded space.
/// Column `k` holds `S(r)|k⟩` truncated to the cutoff.
pub(crate) fn squeeze_block(r: f64, cutoff: usize) -> DMatrix<Complex64> {
    let d = cutoff + 1;
    let work_dim = d + padding(cutoff);
    let mut block = DMatrix::from_element(d, d, ZERO);
    let mut work = vec![ZERO; work_dim];
    for k in 0..d {
        work.iter_mut().for_each(|x| *x = ZERO);
        work[k] = Complex64::new(1.0, 0.0);
        squeeze_in_place(r, &mut work);
        for n in 0..d {
            block[(n, k)] = work[n];
        }
    }
    block
}

impl MixedState {
    pub fn apply_phase(&self, phi: f64, convention: PhaseConvention) -> Result<MixedState> {
        self.require_modes(convention.modes())?;
        let phases: Vec<Complex64> = convention
            .generator_diagonal(self.cutoff())
            .into_iter()
            .map(|g| Complex64::from_polar(1.0, phi * g))
            .collect();
        let mut out = self.clone();
        let n = phases.len();
        for j in 0..n {
            for i in 0..n {
                out.matrix[(i, j)] *= phases[i] * phases[j].conj();
            }
        }
        Ok(out)
    }

    /// `S(r) ρ S(r)†` with the same padding and deficit rule as
    /// [`PureState::apply_squeeze`].
    pub fn apply_squeeze(&self, r: f64) -> Result<MixedState> {
        self.require_modes(Modes::Single)?;
        let block = squeeze_block(r, self.cutoff());
        self.conjugate_by(&block, "squeeze")
    }

    pub(crate) fn conjugate_by(&self, op: &DMatrix<Complex64>, stage: &str) -> Result<MixedState> {
        let matrix = op * &self.matrix * op.adjoint();
        MixedState::from_parts(
            self.modes(),
            self.cutoff(),
            matrix,
            stage,
            MAX_SQUEEZE_DEFICIT,
            self.truncation_tol(),
        )
    }

    /// Amplitude damping `σ = Σ_j Γ_j ρ Γ_j†` with
    /// `Γ_j = (1−η)^{j/2} η^{n/2} aʲ/√(j!)` acting on `mode`.
    ///
    /// The sum runs to `j = cutoff`; beyond that every `Γ_j` annihilates the
    /// truncated space, so the channel is exactly trace preserving here.
    pub fn apply_loss(&self, eta: f64, mode: usize) -> Result<MixedState> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange { name: "eta", value: eta, range: "[0, 1]" });
        }
        self.check_mode(mode)?;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let c = self.cutoff();
        let d = c + 1;
        let k = kraus_coefficients(eta, c);
        let rho = &self.matrix;
        let matrix = match self.modes() {
            Modes::Single => DMatrix::from_fn(d, d, |m1, m2| {
                let top = c - m1.max(m2);
                (0..=top)
                    .map(|j| rho[(m1 + j, m2 + j)] * (k[m1][j] * k[m2][j]))
                    .sum()
            }),
            Modes::Two => {
                let split = |idx: usize| if mode == 0 { (idx / d, idx % d) } else { (idx % d, idx / d) };
                let join = |lossy: usize, other: usize| {
                    if mode == 0 {
                        lossy * d + other
                    } else {
                        other * d + lossy
                    }
                };
                DMatrix::from_fn(d * d, d * d, |i1, i2| {
                    let (m1, o1) = split(i1);
                    let (m2, o2) = split(i2);
                    let top = c - m1.max(m2);
                    (0..=top)
                        .map(|j| rho[(join(m1 + j, o1), join(m2 + j, o2))] * (k[m1][j] * k[m2][j]))
                        .sum()
                })
            }
        };
        MixedState::from_parts(
            self.modes(),
            c,
            matrix,
            "loss",
            MAX_NORM_DEFICIT,
            self.truncation_tol(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_coherent, make_noon, make_squeezed_vacuum, Expectation, Observable};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phase_conventions() {
        let psi = PureState::number(2, 4).unwrap();
        assert_eq!(psi.apply_phase(0.0, PhaseConvention::SingleMode).unwrap(), psi);
        let rotated = psi.apply_phase(FRAC_PI_2, PhaseConvention::SingleMode).unwrap();
        assert!((rotated.amplitude(2) - c(-1.0, 0.0)).norm() < 1e-15);

        let n = 3;
        let phi = 0.37;
        let two = PureState::number2(n, 0, 4).unwrap();
        let shifted = two.apply_phase(phi, PhaseConvention::RelativeHalf).unwrap();
        let expected = Complex64::from_polar(1.0, phi * n as f64 / 2.0);
        assert!((shifted.amplitude2(n, 0) - expected).norm() < 1e-15);

        assert!(psi.apply_phase(0.1, PhaseConvention::RelativeHalf).is_err());
        assert!(two.apply_phase(0.1, PhaseConvention::SingleMode).is_err());
    }

    #[test]
    fn hong_ou_mandel() {
        let out = PureState::number2(1, 1, 2).unwrap().apply_beam_splitter().unwrap();
        let s = FRAC_1_SQRT_2;
        let target = PureState::new(
            Modes::Two,
            2,
            (0..9)
                .map(|idx| if idx == 6 || idx == 2 { c(s, 0.0) } else { c(0.0, 0.0) })
                .collect(),
        )
        .unwrap();
        assert!((out.fidelity(&target).unwrap() - 1.0).abs() < 1e-14);
        assert!(out.amplitude2(1, 1).norm() < 1e-15);
    }

    #[test]
    fn beam_splitter_keeps_vacuum() {
        let vac = PureState::vacuum(Modes::Two, 3);
        assert_eq!(vac.apply_beam_splitter().unwrap(), vac);
    }

    #[test]
    fn beam_splitter_on_coherent_input() {
        // V|α⟩|0⟩ = |α/√2⟩|iα/√2⟩ for V = exp[iπ/4 (a†b + ab†)].
        let alpha = c(1.3, 0.4);
        let cutoff = 30;
        let input = PureState::product(
            &make_coherent(alpha, cutoff).unwrap(),
            &PureState::vacuum(Modes::Single, cutoff),
        )
        .unwrap();
        let out = input.apply_beam_splitter().unwrap();
        let expected = PureState::product(
            &make_coherent(alpha * FRAC_1_SQRT_2, cutoff).unwrap(),
            &make_coherent(alpha * c(0.0, FRAC_1_SQRT_2), cutoff).unwrap(),
        )
        .unwrap();
        assert!((out.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeeze_matches_closed_form_and_inverts() {
        let r = 0.8;
        let cutoff = 80;
        let vac = PureState::vacuum(Modes::Single, cutoff);
        let squeezed = vac.apply_squeeze(r).unwrap();
        let reference = make_squeezed_vacuum(r, 0.0, cutoff).unwrap();
        let diff = squeezed
            .amplitudes()
            .iter()
            .zip(reference.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");

        assert_eq!(vac.apply_squeeze(0.0).unwrap(), vac);

        let back = reference.apply_squeeze(-r).unwrap();
        assert!(back.fidelity(&vac).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn squeeze_reports_overflow() {
        let vac = PureState::vacuum(Modes::Single, 10);
        assert!(matches!(vac.apply_squeeze(1.5), Err(Error::TruncationOverflow { .. })));
        let two = PureState::vacuum(Modes::Two, 4);
        assert!(matches!(two.apply_squeeze(0.1), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn loss_identity_and_full_damping() {
        let psi = make_squeezed_vacuum(0.5, 0.2, 30).unwrap();
        let rho = psi.to_mixed();
        assert_eq!(psi.apply_loss(1.0, 0).unwrap(), rho);

        let dead = psi.apply_loss(0.0, 0).unwrap();
        let vac = PureState::vacuum(Modes::Single, 30);
        assert!((dead.fidelity_with_pure(&vac).unwrap() - psi.norm_sqr()).abs() < 1e-14);

        assert!(psi.apply_loss(1.2, 0).is_err());
        assert!(psi.apply_loss(-0.1, 0).is_err());
        assert!(psi.apply_loss(0.5, 1).is_err());
    }

    #[test]
    fn loss_on_coherent_state_shrinks_amplitude() {
        let psi = make_coherent(c(1.0, 0.0), 40).unwrap();
        let out = psi.apply_loss(0.64, 0).unwrap();
        let target = make_coherent(c(0.8, 0.0), 40).unwrap();
        assert!(out.fidelity_with_pure(&target).unwrap() >= 1.0 - 1e-10);
        assert!((out.trace() - psi.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn two_mode_loss_acts_on_one_arm() {
        let noon = make_noon(2, 2).unwrap();
        let out = noon.apply_loss(0.5, 1).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-14);
        let n_a = out.expectation(Observable::Number, 0).unwrap().re;
        let n_b = out.expectation(Observable::Number, 1).unwrap().re;
        assert!((n_a - 1.0).abs() < 1e-14);
        assert!((n_b - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mixed_phase_and_squeeze_agree_with_pure() {
        let psi = make_squeezed_vacuum(0.4, 0.0, 40).unwrap();
        let via_pure = psi.apply_phase(0.3, PhaseConvention::SingleMode).unwrap().apply_squeeze(-0.4).unwrap();
        let via_mixed = psi
            .to_mixed()
            .apply_phase(0.3, PhaseConvention::SingleMode)
            .unwrap()
            .apply_squeeze(-0.4)
            .unwrap();
        assert!(via_mixed.max_abs_diff(&via_pure.to_mixed()).unwrap() < 1e-12);
    }

    #[test]
    fn loss_commutes_with_phase() {
        let psi = make_squeezed_vacuum(0.6, 0.0, 40).unwrap();
        let a = psi.apply_phase(0.7, PhaseConvention::SingleMode).unwrap().apply_loss(0.8, 0).unwrap();
        let b = psi
            .apply_loss(0.8, 0)
            .unwrap()
            .apply_phase(0.7, PhaseConvention::SingleMode)
            .unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
    }

    #[test]
    fn projection() {
        let r = 0.5;
        let sv = make_squeezed_vacuum(r, 0.0, 30).unwrap();
        let twin = PureState::product(&sv, &sv).unwrap();
        let projected = twin.project_total_photon(2).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((projected.amplitude2(2, 0).re + s).abs() < 1e-14);
        assert!((projected.amplitude2(0, 2).re + s).abs() < 1e-14);
        assert!(matches!(twin.project_total_photon(3), Err(Error::EmptyProjection { .. })));

        let noon = make_noon(4, 5).unwrap();
        assert_eq!(noon.project_total_photon(4).unwrap(), noon);
    }
}
