//! Closed-form `(Q, J, F)` for standard path-symmetric probes, and the
//! matching truncated-Fock constructions used to check them.
//!
//! `n̄` is the total photon number inside the interferometer, except for the
//! two-mode squeezed vacuum whose row is written in terms of the mean photon
//! number per mode (`sinh² r`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{rel_dev, ProbeStatistics};
use crate::fock::{
    make_coherent, make_ecs, make_noon, make_squeezed_vacuum, make_tmsv, make_twin_fock, squeezed_vacuum_tail,
    FockState, PureState,
};
use crate::{Error, Result};

/// Truncated weight targeted by [`suggested_cutoff`].
const CUTOFF_TAIL: f64 = 1e-13;
const MAX_SUGGESTED_CUTOFF: usize = 4096;
/// The coherent-state row needs `e^{−n̄}` below this.
pub const ECS_OVERLAP_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateId {
    /// `V(|α⟩ ⊗ |0⟩)`
    Laser,
    Noon,
    /// `|s(r,0)⟩ ⊗ |s(r,0)⟩`
    TwinSqueezed,
    /// `V(|α⟩ ⊗ |s(r,0)⟩)` with equal intensities
    Caves,
    AmplifiedBell,
    /// `V|n/2, n/2⟩`
    TwinFock,
    Tmsv,
    Ecs,
}

impl StateId {
    pub const ALL: [StateId; 8] = [
        StateId::Laser,
        StateId::Noon,
        StateId::TwinSqueezed,
        StateId::Caves,
        StateId::AmplifiedBell,
        StateId::TwinFock,
        StateId::Tmsv,
        StateId::Ecs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateId::Laser => "laser",
            StateId::Noon => "noon",
            StateId::TwinSqueezed => "twin-squeezed",
            StateId::Caves => "caves",
            StateId::AmplifiedBell => "amplified-bell",
            StateId::TwinFock => "twin-fock",
            StateId::Tmsv => "tmsv",
            StateId::Ecs => "ecs",
        }
    }

    /// Whether a Fock construction exists for this row.
    pub fn has_oracle(self) -> bool {
        self != StateId::AmplifiedBell
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownState(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub state_id: StateId,
    pub n_bar: f64,
    pub q: f64,
    pub j: f64,
    pub qfi: f64,
}

/// Closed-form Mandel Q, mode correlation J and Fisher information.
pub fn table_row(state_id: StateId, n_bar: f64) -> Result<TableRow> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::OutOfRange { name: "n_bar", value: n_bar, range: "(0, ∞)" });
    }
    let n = n_bar;
    let (q, j, qfi) = match state_id {
        StateId::Laser => (0.0, 0.0, n),
        StateId::Noon => (n / 2.0 - 1.0, -1.0, n * n),
        StateId::TwinSqueezed => (n + 1.0, 0.0, n * n + 2.0 * n),
        StateId::Caves => {
            let root = (n * (n + 2.0)).sqrt();
            (
                (1.0 + 2.0 * n + root) / 4.0,
                (1.0 - root) / (5.0 + 2.0 * n + root),
                (2.0 * n + n * root + n * n) / 2.0,
            )
        }
        StateId::AmplifiedBell => (
            (5.0 * n - 11.0 / n + 2.0) / 8.0,
            -(n + 1.0).powi(2) / (5.0 * n * n + 10.0 * n - 11.0),
            (3.0 * n * n + 6.0 * n - 5.0) / 4.0,
        ),
        StateId::TwinFock => ((n / 2.0 - 1.0) / 2.0, -1.0, n * n / 2.0 + n),
        StateId::Tmsv => (n, 1.0, 0.0),
        StateId::Ecs => {
            let overlap = (-n).exp();
            if overlap >= ECS_OVERLAP_LIMIT {
                return Err(Error::OutOfRange {
                    name: "exp(-n_bar)",
                    value: overlap,
                    range: "[0, 1e-6) for the entangled coherent state row",
                });
            }
            (n / 2.0, -1.0 / (1.0 + 2.0 / n), n * n + n)
        }
    };
    Ok(TableRow { state_id, n_bar, q, j, qfi })
}

fn photon_count(n_bar: f64, even: bool, id: StateId) -> Result<usize> {
    let ok = n_bar.fract() == 0.0 && n_bar >= 1.0 && (!even || n_bar % 2.0 == 0.0);
    if !ok {
        let kind = if even { "an even integer" } else { "a positive integer" };
        return Err(Error::InvalidInput(format!("{id} needs n_bar to be {kind}, got {n_bar}")));
    }
    Ok(n_bar as usize)
}

/// Smallest `c` with Poisson(mean) weight above `c` at most `tol`.
fn poisson_cutoff(mean: f64, tol: f64) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    // log pmf, accumulated upward; the tail is summed from c+1 on.
    let ln_pmf = |k: usize| -> f64 {
        let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        -mean + k as f64 * mean.ln() - ln_fact
    };
    let mut c = mean.ceil() as usize;
    loop {
        if c > MAX_SUGGESTED_CUTOFF {
            return Err(Error::InvalidInput(format!("no cutoff below {MAX_SUGGESTED_CUTOFF} for mean {mean}")));
        }
        let mut p = ln_pmf(c + 1).exp();
        let mut tail = 0.0;
        let mut k = c + 1;
        while p > 1e-300 && p > 1e-18 * tail {
            tail += p;
            k += 1;
            p *= mean / k as f64;
        }
        if tail <= tol {
            return Ok(c);
        }
        c += 1;
    }
}

fn squeezed_cutoff(r: f64, tol: f64) -> Result<usize> {
    let mut c = 2;
    while squeezed_vacuum_tail(r, c) > tol {
        c += 2;
        if c > MAX_SUGGESTED_CUTOFF {
            return Err(Error::InvalidInput(format!("no cutoff below {MAX_SUGGESTED_CUTOFF} for r = {r}")));
        }
    }
    Ok(c)
}

fn squeeze_for(mean: f64) -> f64 {
    mean.sqrt().asinh()
}

/// A cutoff that keeps the oracle's truncated weight near `1e-13`.
pub fn suggested_cutoff(state_id: StateId, n_bar: f64) -> Result<usize> {
    table_row_domain(n_bar)?;
    match state_id {
        StateId::Laser | StateId::Ecs => poisson_cutoff(n_bar, CUTOFF_TAIL),
        StateId::Noon => photon_count(n_bar, false, state_id),
        StateId::TwinFock => photon_count(n_bar, true, state_id),
        StateId::TwinSqueezed => squeezed_cutoff(squeeze_for(n_bar / 2.0), CUTOFF_TAIL),
        StateId::Caves => {
            // the beam splitter can move every photon into one arm
            Ok(poisson_cutoff(n_bar / 2.0, CUTOFF_TAIL / 2.0)?
                + squeezed_cutoff(squeeze_for(n_bar / 2.0), CUTOFF_TAIL / 2.0)?)
        }
        StateId::Tmsv => {
            let t2 = n_bar / (n_bar + 1.0);
            let c = (CUTOFF_TAIL.ln() / t2.ln()).ceil() as usize;
            if c > MAX_SUGGESTED_CUTOFF {
                return Err(Error::InvalidInput(format!("no cutoff below {MAX_SUGGESTED_CUTOFF} for n_bar {n_bar}")));
            }
            Ok(c)
        }
        StateId::AmplifiedBell => Err(formula_only()),
    }
}

fn table_row_domain(n_bar: f64) -> Result<()> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::OutOfRange { name: "n_bar", value: n_bar, range: "(0, ∞)" });
    }
    Ok(())
}

fn formula_only() -> Error {
    Error::InvalidInput("amplified-bell is evaluated from its closed form only".into())
}

/// The in-interferometer probe state for a table row.
///
/// Parameters: laser `|α|² = n̄`; NOON `n = n̄`; twin squeezed
/// `sinh² r = n̄/2` per mode; Caves `α² = sinh² r = n̄/2` with `α` real and
/// squeezing phase 0; twin Fock `V|n̄/2, n̄/2⟩`; TMSV `sinh² r = n̄`;
/// ECS `|α|² = n̄`.
pub fn oracle_state(state_id: StateId, n_bar: f64, cutoff: usize) -> Result<PureState> {
    table_row_domain(n_bar)?;
    let real = |x: f64| Complex64::new(x, 0.0);
    match state_id {
        StateId::Laser => {
            let a = make_coherent(real(n_bar.sqrt()), cutoff)?;
            PureState::product(&a, &PureState::vacuum(crate::fock::Modes::Single, cutoff))?.apply_beam_splitter()
        }
        StateId::Noon => make_noon(photon_count(n_bar, false, state_id)?, cutoff),
        StateId::TwinSqueezed => {
            let s = make_squeezed_vacuum(squeeze_for(n_bar / 2.0), 0.0, cutoff)?;
            PureState::product(&s, &s)
        }
        StateId::Caves => {
            let a = make_coherent(real((n_bar / 2.0).sqrt()), cutoff)?;
            let s = make_squeezed_vacuum(squeeze_for(n_bar / 2.0), 0.0, cutoff)?;
            PureState::product(&a, &s)?.apply_beam_splitter()
        }
        StateId::TwinFock => make_twin_fock(photon_count(n_bar, true, state_id)? / 2, cutoff)?.apply_beam_splitter(),
        StateId::Tmsv => make_tmsv(squeeze_for(n_bar), cutoff),
        StateId::Ecs => make_ecs(real(n_bar.sqrt()), cutoff),
        StateId::AmplifiedBell => Err(formula_only()),
    }
}

/// Oracle statistics next to the closed-form row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    pub row: TableRow,
    pub stats: ProbeStatistics,
    pub cutoff: usize,
    pub deficit: f64,
    pub dev_q: Option<f64>,
    pub dev_j: Option<f64>,
    pub dev_qfi: f64,
}

impl OracleCheck {
    pub fn run(state_id: StateId, n_bar: f64, cutoff: usize) -> Result<Self> {
        let row = table_row(state_id, n_bar)?;
        let state = oracle_state(state_id, n_bar, cutoff)?;
        let stats = ProbeStatistics::from_state(&state)?;
        Ok(Self {
            row,
            stats,
            cutoff,
            deficit: state.deficit(),
            dev_q: stats.q_a.map(|q| rel_dev(q, row.q)),
            dev_j: stats.j.map(|j| rel_dev(j, row.j)),
            dev_qfi: rel_dev(stats.qfi, row.qfi),
        })
    }

    /// Largest deviation; an undefined oracle statistic counts as infinite.
    pub fn max_deviation(&self) -> f64 {
        [self.dev_q, self.dev_j, Some(self.dev_qfi)]
            .into_iter()
            .map(|d| d.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}
