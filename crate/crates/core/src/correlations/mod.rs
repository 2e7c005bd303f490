//! Photon-statistics figures of merit for interferometric probes.
//!
//! For a two-mode probe with phase generator `(n_a − n_b)/2` the quantum
//! Fisher information of a pure state is `Var(n_a − n_b)`, which splits into
//! the per-arm Mandel parameters and the inter-arm correlation `J`. For
//! path-symmetric probes this collapses to `n̄(1 + Q)(1 − J)`.

mod fisher;
mod table;

pub use fisher::{classical_fisher, FisherEstimate, MIN_PROBABILITY};
pub use table::{oracle_state, suggested_cutoff, table_row, OracleCheck, StateId, TableRow};

use crate::fock::{Expectation, FockState, Modes, Observable, PureState, MAX_NORM_DEFICIT};
use crate::{Error, Result};

/// `|J| ≤ 1` may be exceeded by this much through rounding.
pub const CAUCHY_SCHWARZ_TOL: f64 = 1e-10;

/// Mandel `Q = (Var n − <n>)/<n>`.
pub fn mandel_q(mean_n: f64, var_n: f64) -> Result<f64> {
    if !(mean_n > 0.0) {
        return Err(Error::UndefinedStatistic("Mandel Q"));
    }
    Ok((var_n - mean_n) / mean_n)
}

/// `J = Cov(n_a, n_b) / (Δn_a Δn_b)`, or `None` when either variance is zero.
pub fn mode_correlation_j(var_a: f64, var_b: f64, cov: f64) -> Option<f64> {
    if var_a <= 0.0 || var_b <= 0.0 {
        return None;
    }
    Some(cov / (var_a * var_b).sqrt())
}

/// Path-symmetric Fisher information `n̄(1 + Q)(1 − J)`.
pub fn qfi_path_symmetric(n_bar: f64, q: f64, j: f64) -> f64 {
    n_bar * (1.0 + q) * (1.0 - j)
}

/// Two-mode photon-number statistics and the derived figures of merit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeStatistics {
    pub mean_n_a: f64,
    pub mean_n_b: f64,
    pub var_n_a: f64,
    pub var_n_b: f64,
    pub cov_nn: f64,
    pub q_a: Option<f64>,
    pub q_b: Option<f64>,
    pub j: Option<f64>,
    /// `Var(n_a) + Var(n_b) − 2 Cov(n_a, n_b)`.
    pub qfi: f64,
}

impl ProbeStatistics {
    pub fn from_moments(mean_n_a: f64, mean_n_b: f64, var_n_a: f64, var_n_b: f64, cov_nn: f64) -> Self {
        Self {
            mean_n_a,
            mean_n_b,
            var_n_a,
            var_n_b,
            cov_nn,
            q_a: mandel_q(mean_n_a, var_n_a).ok(),
            q_b: mandel_q(mean_n_b, var_n_b).ok(),
            j: mode_correlation_j(var_n_a, var_n_b, cov_nn),
            qfi: var_n_a + var_n_b - 2.0 * cov_nn,
        }
    }

    /// Statistics of a two-mode state, pure or mixed.
    pub fn from_state<S: FockState + ?Sized>(state: &S) -> Result<Self> {
        if state.modes() != Modes::Two {
            return Err(Error::ModeMismatch { expected: 2, actual: 1 });
        }
        let m = state.observable_moments()?;
        let cov = m.covariance().expect("two-mode moments carry a cross term");
        Ok(Self::from_moments(
            m.modes[0].mean_n,
            m.modes[1].mean_n,
            m.modes[0].variance_n,
            m.modes[1].variance_n,
            cov,
        ))
    }

    pub fn n_bar(&self) -> f64 {
        self.mean_n_a + self.mean_n_b
    }

    /// Equal arm means and second moments within `tol` (relative).
    pub fn is_path_symmetric(&self, tol: f64) -> bool {
        let scale = self.n_bar().max(1.0);
        let second_a = self.var_n_a + self.mean_n_a * self.mean_n_a;
        let second_b = self.var_n_b + self.mean_n_b * self.mean_n_b;
        (self.mean_n_a - self.mean_n_b).abs() <= tol * scale
            && (second_a - second_b).abs() <= tol * second_a.abs().max(1.0)
    }

    /// `n̄(1 + Q_a)(1 − J)`, when both statistics are defined.
    pub fn qfi_path_symmetric(&self) -> Option<f64> {
        Some(qfi_path_symmetric(self.n_bar(), self.q_a?, self.j?))
    }
}

/// Diagonal phase generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `a†a` on one mode, `n_a + n_b` on two.
    Number,
    /// `n_a − n_b`
    Difference,
    /// `(n_a − n_b)/2`
    HalfDifference,
}

/// Pure-state quantum Fisher information `4 Var(G)` for `U = exp(iφG)`.
pub fn qfi_pure(state: &PureState, generator: Generator) -> Result<f64> {
    let deficit = state.deficit();
    if deficit > MAX_NORM_DEFICIT {
        return Err(Error::Unnormalized(deficit));
    }
    let d = state.cutoff() + 1;
    let eigen = |idx: usize| -> Result<f64> {
        Ok(match (state.modes(), generator) {
            (Modes::Single, Generator::Number) => idx as f64,
            (Modes::Single, _) => return Err(Error::ModeMismatch { expected: 2, actual: 1 }),
            (Modes::Two, Generator::Number) => (idx / d + idx % d) as f64,
            (Modes::Two, Generator::Difference) => (idx / d) as f64 - (idx % d) as f64,
            (Modes::Two, Generator::HalfDifference) => ((idx / d) as f64 - (idx % d) as f64) / 2.0,
        })
    };
    let weight = state.weight();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (idx, p) in state.populations().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let g = eigen(idx)?;
        m1 += p * g;
        m2 += p * g * g;
    }
    let (m1, m2) = (m1 / weight, m2 / weight);
    Ok(4.0 * (m2 - m1 * m1).max(0.0))
}

/// Shot-noise conventions: two-mode interferometer `1/√n̄`, or single-mode
/// `1/√(4n̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnlConvention {
    TwoMode,
    SingleMode,
}

impl SnlConvention {
    pub fn label(self) -> &'static str {
        match self {
            SnlConvention::TwoMode => "two-mode 1/sqrt(n)",
            SnlConvention::SingleMode => "single-mode 1/sqrt(4n)",
        }
    }
}

fn positive(value: f64, name: &'static str) -> Result<f64> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::OutOfRange { name, value, range: "(0, ∞)" });
    }
    Ok(value)
}

/// Cramér-Rao error `1/√F`.
pub fn cramer_rao(fisher: f64) -> Result<f64> {
    Ok(1.0 / positive(fisher, "fisher information")?.sqrt())
}

pub fn snl(n_bar: f64, convention: SnlConvention) -> Result<f64> {
    let n = positive(n_bar, "n_bar")?;
    Ok(match convention {
        SnlConvention::TwoMode => 1.0 / n.sqrt(),
        SnlConvention::SingleMode => 1.0 / (4.0 * n).sqrt(),
    })
}

/// Heisenberg limit `1/n̄`.
pub fn heisenberg(n_bar: f64) -> Result<f64> {
    Ok(1.0 / positive(n_bar, "n_bar")?)
}

/// Relative deviation `|a − b| / max(|b|, 1)`.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Mean photon number of mode `mode` using the normalized expectation.
pub fn mean_photons<S: FockState + ?Sized>(state: &S, mode: usize) -> Result<f64> {
    Ok(state.expectation(Observable::Number, mode)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_noon, make_squeezed_vacuum, make_tmsv};
    use num_complex::Complex64;

    #[test]
    fn mandel_q_examples() {
        assert_eq!(mandel_q(3.0, 3.0).unwrap(), 0.0);
        let n = 2.0;
        // one squeezed mode with mean n/2 has Var = 2(n/2)(n/2 + 1)
        let half = n / 2.0;
        assert!((mandel_q(half, 2.0 * half * (half + 1.0)).unwrap() - (n + 1.0)).abs() < 1e-14);
        assert_eq!(mandel_q(5.0, 0.0).unwrap(), -1.0);
        assert!(matches!(mandel_q(0.0, 0.0), Err(Error::UndefinedStatistic(_))));
    }

    #[test]
    fn mode_correlation_examples() {
        for n in 1..6 {
            let s = ProbeStatistics::from_state(&make_noon(n, n).unwrap()).unwrap();
            assert!((s.j.unwrap() + 1.0).abs() < 1e-14);
        }
        assert_eq!(mode_correlation_j(1.0, 2.0, 0.0), Some(0.0));
        let tmsv = ProbeStatistics::from_state(&make_tmsv(0.6, 80).unwrap()).unwrap();
        assert!((tmsv.j.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(mode_correlation_j(0.0, 1.0, 0.0), None);
    }

    #[test]
    fn qfi_examples() {
        let noon = make_noon(4, 4).unwrap();
        assert!((qfi_pure(&noon, Generator::HalfDifference).unwrap() - 16.0).abs() < 1e-12);
        assert!((qfi_pure(&noon, Generator::Difference).unwrap() - 64.0).abs() < 1e-12);
        let vac = PureState::vacuum(Modes::Two, 3);
        for g in [Generator::Number, Generator::Difference, Generator::HalfDifference] {
            assert_eq!(qfi_pure(&vac, g).unwrap(), 0.0);
        }
        let sq = make_squeezed_vacuum(1f64.asinh(), 0.0, 160).unwrap();
        assert!((qfi_pure(&sq, Generator::Number).unwrap() - 16.0).abs() < 1e-9);
        assert!(qfi_pure(&sq, Generator::Difference).is_err());

        let lossy = PureState::from_parts(
            Modes::Single,
            1,
            vec![Complex64::new(0.999, 0.0), Complex64::new(0.0, 0.0)],
            "test",
            1.0,
        )
        .unwrap();
        assert!(matches!(qfi_pure(&lossy, Generator::Number), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn path_symmetric_examples() {
        assert_eq!(qfi_path_symmetric(4.0, 0.0, 0.0), 4.0);
        assert_eq!(qfi_path_symmetric(2.0, 3.0, 0.0), 8.0);
        assert_eq!(qfi_path_symmetric(7.0, -1.0, 0.4), 0.0);
    }

    #[test]
    fn benchmarks() {
        assert_eq!(cramer_rao(16.0).unwrap(), 0.25);
        assert!((snl(1.5e4, SnlConvention::SingleMode).unwrap() - 4.082e-3).abs() < 1e-6);
        assert_eq!(snl(4.0, SnlConvention::TwoMode).unwrap(), 0.5);
        assert_eq!(heisenberg(4.0).unwrap(), 0.25);
        assert!(cramer_rao(0.0).is_err());
        assert!(snl(-1.0, SnlConvention::TwoMode).is_err());
        assert!(heisenberg(0.0).is_err());
    }
}
