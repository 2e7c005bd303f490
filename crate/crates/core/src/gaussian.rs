//! Zero-mean single-mode Gaussian states as normal-ordered second moments.
//!
//! A state is tracked by `v = (<a²>, <a†²>, <a†a>)`. Squeezing, phase
//! rotation and loss act on `v` as affine maps `v ↦ M v + f`, and for a
//! Gaussian state every higher normal-ordered moment factorizes, so the
//! photon-number variance follows from `v` alone.
//!
//! Conventions: `S(r) = exp[(r/2)(a² − a†²)]`, `U(φ) = exp(iφ a†a)` and the
//! loss channel keeps a fraction `η` of the intensity. The anti-squeezing
//! step is `S(−r) = S†(r)`, and `n̄ = sinh² r`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const PAIRING_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(<a²>, <a†²>, <a†a>)` of a zero-mean Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentVector {
    pub m_aa: Complex64,
    pub m_adad: Complex64,
    pub m_n: f64,
}

impl MomentVector {
    pub const VACUUM: MomentVector = MomentVector { m_aa: ZERO, m_adad: ZERO, m_n: 0.0 };

    /// Conjugate-paired moments from `<a²>` and `<a†a>`.
    pub fn new(m_aa: Complex64, m_n: f64) -> Self {
        Self { m_aa, m_adad: m_aa.conj(), m_n }
    }

    /// Validates the pairing `<a†²> = <a²>*` and the uncertainty bound.
    pub fn from_components(m_aa: Complex64, m_adad: Complex64, m_n: f64) -> Result<Self> {
        let v = Self { m_aa, m_adad, m_n };
        let pairing = (m_adad - m_aa.conj()).norm();
        if pairing > PAIRING_TOL {
            return Err(Error::InvalidInput(format!(
                "<a†²> is not the conjugate of <a²> (mismatch {pairing:.3e})"
            )));
        }
        v.check_physical()?;
        Ok(v)
    }

    /// Squeezed vacuum `S(r)|0⟩`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        squeeze_map(r).apply(&Self::VACUUM)
    }

    /// `n(n+1) − |<a²>|²`, nonnegative for every physical Gaussian state.
    pub fn physicality_margin(&self) -> f64 {
        self.m_n * (self.m_n + 1.0) - self.m_aa.norm_sqr()
    }

    pub fn check_physical(&self) -> Result<()> {
        let margin = self.physicality_margin();
        let scale = (self.m_n * (self.m_n + 1.0)).max(1.0);
        if !(margin >= -PHYSICALITY_TOL * scale) || !(self.m_n >= -PHYSICALITY_TOL) {
            return Err(Error::UnphysicalMoments { margin });
        }
        Ok(())
    }

    pub fn to_vector(&self) -> Vector3<Complex64> {
        Vector3::new(self.m_aa, self.m_adad, c(self.m_n))
    }

    fn from_vector(v: &Vector3<Complex64>) -> Self {
        Self { m_aa: v[0], m_adad: v[1], m_n: v[2].re }
    }

    /// Largest componentwise difference to `other`.
    pub fn max_abs_diff(&self, other: &MomentVector) -> f64 {
        (self.m_aa - other.m_aa)
            .norm()
            .max((self.m_adad - other.m_adad).norm())
            .max((self.m_n - other.m_n).abs())
    }

    /// `<a†a†aa> = 2<a†a>² + |<a²>|²` (Gaussian factorization).
    pub fn factorial_second(&self) -> f64 {
        2.0 * self.m_n * self.m_n + (self.m_aa * self.m_adad).re
    }
}

/// `v ↦ matrix · v + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub matrix: Matrix3<Complex64>,
    pub translation: Vector3<Complex64>,
}

impl AffineMap {
    pub fn identity() -> Self {
        Self { matrix: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn apply(&self, v: &MomentVector) -> MomentVector {
        MomentVector::from_vector(&(self.matrix * v.to_vector() + self.translation))
    }

    /// The map that applies `self` first and `next` second.
    pub fn then(&self, next: &AffineMap) -> AffineMap {
        AffineMap {
            matrix: next.matrix * self.matrix,
            translation: next.matrix * self.translation + next.translation,
        }
    }

    /// How far the map is from sending conjugate-paired vectors to
    /// conjugate-paired vectors with a real photon number.
    ///
    /// Row 1 must be row 0 conjugated with the first two columns swapped,
    /// row 2 must be conjugate-symmetric in its first two entries with a real
    /// third entry, and the translation must be paired the same way.
    pub fn conjugation_error(&self) -> f64 {
        let m = &self.matrix;
        let t = &self.translation;
        [
            (m[(1, 0)] - m[(0, 1)].conj()).norm(),
            (m[(1, 1)] - m[(0, 0)].conj()).norm(),
            (m[(1, 2)] - m[(0, 2)].conj()).norm(),
            (m[(2, 1)] - m[(2, 0)].conj()).norm(),
            m[(2, 2)].im.abs(),
            (t[1] - t[0].conj()).norm(),
            t[2].im.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Squeezing `S(r)`; negative `r` gives `S†(|r|)`.
///
/// Rows `[c², s², −sinh 2r]`, `[s², c², −sinh 2r]`, `[−cs, −cs, cosh 2r]`
/// with translation `(−cs, −cs, s²)`, where `c = cosh r`, `s = sinh r`.
pub fn squeeze_map(r: f64) -> AffineMap {
    let (ch, sh) = (r.cosh(), r.sinh());
    let (c2, s2, cs) = (ch * ch, sh * sh, ch * sh);
    let (sh2, ch2) = ((2.0 * r).sinh(), (2.0 * r).cosh());
    AffineMap {
        matrix: Matrix3::new(
            c(c2), c(s2), c(-sh2),
            c(s2), c(c2), c(-sh2),
            c(-cs), c(-cs), c(ch2),
        ),
        translation: Vector3::new(c(-cs), c(-cs), c(s2)),
    }
}

/// Phase shift `U(φ) = exp(iφ a†a)`: `<a²>` picks up `e^{2iφ}`.
pub fn rotation_map(phi: f64) -> AffineMap {
    let mut matrix = Matrix3::zeros();
    matrix[(0, 0)] = Complex64::from_polar(1.0, 2.0 * phi);
    matrix[(1, 1)] = Complex64::from_polar(1.0, -2.0 * phi);
    matrix[(2, 2)] = c(1.0);
    AffineMap { matrix, translation: Vector3::zeros() }
}

/// Beam-splitter loss with transmissivity `η`.
pub fn loss_map(eta: f64) -> Result<AffineMap> {
    check_eta(eta, "eta")?;
    Ok(AffineMap { matrix: Matrix3::identity() * c(eta), translation: Vector3::zeros() })
}

fn check_eta(eta: f64, name: &'static str) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange { name, value: eta, range: "[0, 1]" });
    }
    Ok(())
}

fn check_finite(value: f64, name: &'static str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::OutOfRange { name, value, range: "finite reals" });
    }
    Ok(())
}

/// Squeeze, phase, loss `η₁`, anti-squeeze, loss `η₂`.
pub fn protocol_map(r: f64, phi: f64, eta1: f64, eta2: f64) -> Result<AffineMap> {
    check_finite(r, "r")?;
    check_finite(phi, "phi")?;
    check_eta(eta1, "eta1")?;
    check_eta(eta2, "eta2")?;
    Ok(squeeze_map(r)
        .then(&rotation_map(phi))
        .then(&loss_map(eta1)?)
        .then(&squeeze_map(-r))
        .then(&loss_map(eta2)?))
}

/// Output moments of the protocol started from the vacuum.
///
/// Rounding in the composed map grows like `cosh²(2r)`. A pure output sits
/// on the boundary `n(n+1) = |<a²>|²` and may land just outside it; within
/// that rounding budget `<a²>` is scaled back onto the boundary.
pub fn protocol_moments(r: f64, phi: f64, eta1: f64, eta2: f64) -> Result<MomentVector> {
    let m = protocol_map(r, phi, eta1, eta2)?.apply(&MomentVector::VACUUM);
    let margin = m.physicality_margin();
    let budget = 1e-13 * (1.0 + 2.0 * n_bar_from_r(r)).powi(2) * m.m_aa.norm().max(1.0);
    if margin < 0.0 && -margin <= budget && m.m_aa.norm() > 0.0 {
        let boundary = (m.m_n * (m.m_n + 1.0)).max(0.0).sqrt();
        return Ok(MomentVector::new(m.m_aa * (boundary / m.m_aa.norm()), m.m_n));
    }
    Ok(m)
}

pub fn n_bar_from_r(r: f64) -> f64 {
    r.sinh().powi(2)
}

pub fn r_from_n_bar(n_bar: f64) -> f64 {
    n_bar.sqrt().asinh()
}

/// Closed-form output moments for `η₁ = η₂ = η`:
///
/// `<a†a> = ηn̄[1 + η + 2ηn̄ − 2(n̄+1)η cos 2φ]`,
/// `<a²> = η√(n̄(n̄+1)) [ηn̄(2 − e^{−2iφ}) − η(n̄+1)e^{2iφ} + 1]`.
pub fn closed_form_moments(n_bar: f64, phi: f64, eta: f64) -> MomentVector {
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    let m_aa = eta
        * (n_bar * (n_bar + 1.0)).sqrt()
        * (eta * n_bar * (2.0 - e2.conj()) - eta * (n_bar + 1.0) * e2 + 1.0);
    MomentVector::new(m_aa, signal(n_bar, phi, eta))
}

/// Mean output photon number `S(n̄, φ, η) = ηn̄[1 + η + 2n̄η − 2(n̄+1)η cos 2φ]`.
///
/// Computed as `ηn̄[(1 − η) + 4η(n̄+1) sin²φ]`, which is the same polynomial
/// without the cancellation near `φ = 0`.
pub fn signal(n_bar: f64, phi: f64, eta: f64) -> f64 {
    eta * n_bar * ((1.0 - eta) + 4.0 * eta * (n_bar + 1.0) * phi.sin().powi(2))
}

/// `∂S/∂φ = 4η²n̄(n̄+1) sin 2φ`.
pub fn signal_derivative(n_bar: f64, phi: f64, eta: f64) -> f64 {
    4.0 * eta * eta * n_bar * (n_bar + 1.0) * (2.0 * phi).sin()
}

/// Lossless signal `4n̄(n̄+1) sin²φ`.
pub fn lossless_signal(n_bar: f64, phi: f64) -> f64 {
    4.0 * n_bar * (n_bar + 1.0) * phi.sin().powi(2)
}

/// Lossless variance `8n̄(n̄+1) sin²φ [1 + 2n̄ + 2n̄² − 2n̄(n̄+1) cos 2φ]`.
pub fn lossless_variance(n_bar: f64, phi: f64) -> f64 {
    let k = n_bar * (n_bar + 1.0);
    8.0 * k * phi.sin().powi(2) * (1.0 + 2.0 * k - 2.0 * k * (2.0 * phi).cos())
}

/// `1/√(8n̄(n̄+1))`, the lossless error at the dark fringe.
pub fn lossless_phase_error(n_bar: f64) -> f64 {
    1.0 / (8.0 * n_bar * (n_bar + 1.0)).sqrt()
}

/// Photon-number variance `<a†a>² + <a†a> + |<a²>|²` of a Gaussian state.
pub fn variance_number(moments: &MomentVector) -> Result<f64> {
    moments.check_physical()?;
    let m_n = moments.m_n;
    Ok(m_n * m_n + m_n + (moments.m_aa * moments.m_adad).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseError {
    Finite(f64),
    /// Analytic `φ → 0` limit, only available without loss.
    LosslessLimit(f64),
}

impl PhaseError {
    pub fn value(self) -> f64 {
        match self {
            PhaseError::Finite(v) | PhaseError::LosslessLimit(v) => v,
        }
    }

    pub fn is_limit(self) -> bool {
        matches!(self, PhaseError::LosslessLimit(_))
    }
}

fn check_phase_error_domain(n_bar: f64, phi: f64, eta: f64) -> Result<()> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::OutOfRange { name: "n_bar", value: n_bar, range: "(0, ∞)" });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange { name: "eta", value: eta, range: "(0, 1]" });
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(Error::OutOfRange { name: "phi", value: phi, range: "[0, π/2]" });
    }
    Ok(())
}

/// Error-propagation phase error `ΔS / |∂S/∂φ|` for equal losses.
///
/// Evaluated in the rearranged form
/// `Δ²φ = (c₀ + c₁u + c₂u²) / (64η³n̄(n̄+1)² u(1−u))` with `u = sin²φ`,
/// which avoids the cancellation between the constant and `cos 2φ`,
/// `cos 4φ` terms of the expanded expression at small `φ`
/// (see [`phase_error_sq_expanded`]). `u(1−u)` is taken as `sin²(2φ)/4`
/// so that it stays accurate next to `π/2` as well.
pub fn phase_error(n_bar: f64, phi: f64, eta: f64) -> Result<PhaseError> {
    check_phase_error_domain(n_bar, phi, eta)?;
    if phi == 0.0 {
        if eta == 1.0 {
            return Ok(PhaseError::LosslessLimit(lossless_phase_error(n_bar)));
        }
        return Err(Error::SingularOperatingPoint(format!(
            "phi = 0 with eta = {eta}: the signal slope vanishes while the loss-induced noise does not"
        )));
    }
    let u = phi.sin().powi(2);
    let n1 = n_bar + 1.0;
    let loss = 1.0 - eta;
    let c0 = loss * (1.0 + eta * loss * (1.0 + 2.0 * n_bar));
    let c1 = 4.0 * eta * n1 * (1.0 + eta + 4.0 * eta * n_bar * loss);
    let c2 = 32.0 * eta.powi(3) * n_bar * n1 * n1;
    let den = 16.0 * eta.powi(3) * n_bar * n1 * n1 * (2.0 * phi).sin().powi(2);
    Ok(PhaseError::Finite(((c0 + c1 * u + c2 * u * u) / den).sqrt()))
}

/// `Δ²φ` written term by term in the expanded trigonometric form, with the
/// `csc²(2φ) / (16η³n̄(n̄+1)²)` prefactor. No domain checks.
pub fn phase_error_sq_expanded(n_bar: f64, phi: f64, eta: f64) -> f64 {
    let (n, e) = (n_bar, eta);
    let bracket = e.powi(3) + 2.0 * e
        + 12.0 * e.powi(3) * n.powi(3)
        + 16.0 * e.powi(3) * n * n
        + 8.0 * e * e * n * n
        + 4.0 * e.powi(3) * n * (n + 1.0).powi(2) * (4.0 * phi).cos()
        + 6.0 * e.powi(3) * n
        - 2.0 * e * (n + 1.0) * (e + 4.0 * e * e * n * (2.0 * n + 1.0) + 4.0 * e * n + 1.0) * (2.0 * phi).cos()
        + 6.0 * e * e * n
        + 4.0 * e * n
        + 1.0;
    bracket / (2.0 * phi).sin().powi(2) / (16.0 * e.powi(3) * n * (n + 1.0).powi(2))
}

/// `Δφ` rebuilt from [`protocol_moments`], [`variance_number`] and
/// [`signal_derivative`], independent of the closed forms.
pub fn phase_error_from_moments(n_bar: f64, phi: f64, eta: f64) -> Result<f64> {
    check_phase_error_domain(n_bar, phi, eta)?;
    let moments = protocol_moments(r_from_n_bar(n_bar), phi, eta, eta)?;
    let slope = signal_derivative(n_bar, phi, eta).abs();
    if slope == 0.0 {
        return Err(Error::VanishingDerivative { phi, derivative: slope });
    }
    Ok(variance_number(&moments)?.sqrt() / slope)
}

/// Single-mode shot-noise limit `1/√(4n̄)` divided by [`phase_error`].
pub fn snl_ratio(n_bar: f64, phi: f64, eta: f64) -> Result<f64> {
    let err = phase_error(n_bar, phi, eta)?.value();
    Ok(1.0 / (4.0 * n_bar).sqrt() / err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn squeeze_map_examples() {
        let id = squeeze_map(0.0);
        assert_eq!(id.matrix, Matrix3::identity());
        assert_eq!(id.translation, Vector3::zeros());

        let v = squeeze_map(1f64.asinh()).apply(&MomentVector::VACUUM);
        assert!((v.m_aa - c(-SQRT_2)).norm() < 1e-15);
        assert!((v.m_adad - c(-SQRT_2)).norm() < 1e-15);
        assert!((v.m_n - 1.0).abs() < 1e-15);
        assert!(v.physicality_margin().abs() < 1e-14);
    }

    #[test]
    fn squeeze_inverse_and_group_law() {
        let v = MomentVector::new(Complex64::new(0.3, -0.2), 1.4);
        for r in [-1.1, 0.2, 0.8814] {
            let back = squeeze_map(r).then(&squeeze_map(-r)).apply(&v);
            assert!(back.max_abs_diff(&v) < 1e-12);
            let two = squeeze_map(r).then(&squeeze_map(0.5)).apply(&v);
            let once = squeeze_map(r + 0.5).apply(&v);
            assert!(two.max_abs_diff(&once) < 1e-12);
            assert!(squeeze_map(r).conjugation_error() == 0.0);
        }
    }

    #[test]
    fn rotation_and_loss_maps() {
        assert_eq!(rotation_map(0.0).matrix, Matrix3::identity());
        let half = rotation_map(FRAC_PI_2).matrix;
        for (i, expected) in [-1.0, -1.0, 1.0].into_iter().enumerate() {
            assert!((half[(i, i)] - c(expected)).norm() < 1e-15);
        }
        let v = MomentVector::new(Complex64::new(0.1, 0.7), 2.5);
        assert_eq!(rotation_map(0.37).apply(&v).m_n, 2.5);
        assert!(rotation_map(0.37).conjugation_error() < 1e-16);

        assert_eq!(loss_map(1.0).unwrap().matrix, Matrix3::identity());
        assert_eq!(loss_map(0.0).unwrap().apply(&v), MomentVector::VACUUM);
        let sq = MomentVector::new(c(-SQRT_2), 1.0);
        let lossy = loss_map(0.9).unwrap().apply(&sq);
        assert!((lossy.m_aa - c(-0.9 * SQRT_2)).norm() < 1e-15);
        assert!((lossy.m_n - 0.9).abs() < 1e-15);
        assert!(loss_map(1.1).is_err());
        assert!(loss_map(-0.1).is_err());
    }

    #[test]
    fn moment_vector_validation() {
        assert!(MomentVector::from_components(c(0.5), c(0.5), 1.0).is_ok());
        assert!(MomentVector::from_components(Complex64::new(0.5, 0.1), Complex64::new(0.5, 0.1), 1.0).is_err());
        assert!(matches!(
            MomentVector::from_components(c(2.0), c(2.0), 1.0),
            Err(Error::UnphysicalMoments { .. })
        ));
        assert!(variance_number(&MomentVector::new(c(2.0), 1.0)).is_err());
    }

    #[test]
    fn protocol_closed_forms() {
        assert_eq!(protocol_moments(0.7, 0.0, 1.0, 1.0).unwrap().max_abs_diff(&MomentVector::VACUUM) < 1e-12, true);
        for &n in &[0.5, 1.0, 2.0, 7.0] {
            let r = r_from_n_bar(n);
            for &phi in &[0.0, 0.05, 0.3, 1.0, FRAC_PI_2] {
                let lossless = protocol_moments(r, phi, 1.0, 1.0).unwrap();
                assert!(close(lossless.m_n, lossless_signal(n, phi), 1e-10));
                assert!(close(variance_number(&lossless).unwrap(), lossless_variance(n, phi), 1e-9));
                for &eta in &[1.0, 0.95, 0.8, 0.3] {
                    let numeric = protocol_moments(r, phi, eta, eta).unwrap();
                    let closed = closed_form_moments(n, phi, eta);
                    assert!(numeric.max_abs_diff(&closed) < 1e-9 * (1.0 + n * n), "{n} {phi} {eta}");
                    assert!(numeric.physicality_margin() > -1e-9);
                }
            }
        }
    }

    #[test]
    fn signal_examples() {
        assert!((signal(1.0, FRAC_PI_2, 1.0) - 8.0).abs() < 1e-14);
        assert_eq!(signal(3.0, 0.0, 1.0), 0.0);
        assert!((signal(1.0, FRAC_PI_2, 0.5) - 2.25).abs() < 1e-14);
        let expanded = |n: f64, phi: f64, eta: f64| {
            eta * n * (1.0 + eta + 2.0 * n * eta - 2.0 * (n + 1.0) * eta * (2.0 * phi).cos())
        };
        for &(n, phi, eta) in &[(1.0, 0.3, 0.9), (4.0, 1.1, 0.5), (0.2, 0.7, 1.0)] {
            assert!(close(signal(n, phi, eta), expanded(n, phi, eta), 1e-13));
        }
        for n in [0.1, 1.0, 10.0, 1e3] {
            for phi in [0.0, 1e-3, 0.4, FRAC_PI_4, 1.2] {
                assert!(close(signal(n, phi, 1.0), lossless_signal(n, phi), 1e-12));
            }
        }
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_number(&MomentVector::VACUUM).unwrap(), 0.0);
        let out = protocol_moments(1f64.asinh(), FRAC_PI_2, 1.0, 1.0).unwrap();
        assert!((variance_number(&out).unwrap() - 144.0).abs() < 1e-10);
        assert!((lossless_variance(1.0, FRAC_PI_2) - 144.0).abs() < 1e-12);
        let sq = MomentVector::squeezed_vacuum(1f64.asinh());
        assert!((variance_number(&sq).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn phase_error_limits_and_errors() {
        assert_eq!(phase_error(1.0, 0.0, 1.0).unwrap(), PhaseError::LosslessLimit(0.25));
        let v = phase_error(5.0, 1e-4, 1.0).unwrap().value();
        assert!(close(v, 1.0 / 240f64.sqrt(), 1e-6));
        assert!(matches!(phase_error(1.0, 0.0, 0.9), Err(Error::SingularOperatingPoint(_))));
        assert!(phase_error(0.0, 0.1, 0.9).is_err());
        assert!(phase_error(1.0, 0.1, 0.0).is_err());
        assert!(phase_error(1.0, -0.1, 1.0).is_err());
        assert!(phase_error(1.0, 1.6, 1.0).is_err());
        assert!(phase_error(1.0, FRAC_PI_2, 1.0).unwrap().value() > 1e6);
    }

    #[test]
    fn stable_and_expanded_forms_agree() {
        for &(n, phi, eta) in &[(2.0, 0.3, 0.9), (0.5, 1.0, 1.0), (40.0, 0.01, 0.6), (1e3, 0.2, 0.99)] {
            let stable = phase_error(n, phi, eta).unwrap().value().powi(2);
            assert!(close(stable, phase_error_sq_expanded(n, phi, eta), 1e-11));
        }
        let v = phase_error(2.0, 0.3, 0.9).unwrap().value().powi(2);
        assert!((v - 0.086_928_171_405_552_53).abs() < 1e-15);
    }

    #[test]
    fn phase_error_matches_moment_route() {
        for &(n, phi, eta) in &[(1.0, 0.3, 0.9), (3.0, 0.05, 0.8), (0.2, 1.2, 0.5), (50.0, 0.01, 1.0)] {
            let direct = phase_error(n, phi, eta).unwrap().value();
            let routed = phase_error_from_moments(n, phi, eta).unwrap();
            assert!(close(direct, routed, 1e-10), "{n} {phi} {eta}");
        }
    }

    #[test]
    fn headline_snl_ratios() {
        let five = snl_ratio(1.5e4, 1e-3, 0.99).unwrap();
        let three = snl_ratio(2e4, 1e-3, 0.95).unwrap();
        assert!((five - 4.939).abs() < 1e-3, "{five}");
        assert!((three - 3.015).abs() < 1e-3, "{three}");
        assert!((snl_ratio(1.0, 0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(snl_ratio(1.0, 0.1, 1e-6).unwrap() < 1e-2);
    }

    #[test]
    fn monotone_in_eta() {
        for n in [1.0, 100.0, 1e4] {
            for phi in [1e-3, 0.1, 0.7] {
                let mut last = f64::INFINITY;
                for k in 1..=20 {
                    let eta = k as f64 / 20.0;
                    let v = phase_error(n, phi, eta).unwrap().value();
                    assert!(v <= last * (1.0 + 1e-12));
                    last = v;
                }
            }
        }
    }
}
