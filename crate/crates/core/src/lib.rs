//! Numerical workbench for quantum-optical phase estimation.
//!
//! Two engines are provided:
//!
//! * [`fock`]: exact one- and two-mode states on a truncated Fock basis,
//!   with the standard probe constructors, passive/active linear optics and
//!   an amplitude-damping channel. It is slow but makes no Gaussian
//!   assumption, so it serves as the oracle for everything else.
//! * [`gaussian`]: zero-mean single-mode Gaussian states tracked through the
//!   normal-ordered second moments `(<a²>, <a†²>, <a†a>)` under affine maps.
//!
//! [`correlations`] turns photon-number statistics into Mandel Q, the mode
//! correlation J and Fisher information, and tabulates the closed forms for
//! the usual interferometric probe states. [`protocol`] drives the
//! squeeze / phase / loss / anti-squeeze / loss / intensity-readout pipeline
//! through both engines.

pub mod correlations;
mod error;
pub mod fock;
pub mod gaussian;
pub mod numdiff;
pub mod protocol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
