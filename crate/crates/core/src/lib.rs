//! Scattering of quantum light by a two-level atom coupled to a chiral-free
//! one-dimensional waveguide.
//!
//! * [`fock`]: single-photon wavepackets, closed-form spectra and the
//!   phase-space distributions of the scattered photon.
//! * [`coherent`]: mean-field dynamics of a coherent pulse (the atomic
//!   inversion `Sigma(t)`) and the photon densities it produces.
//! * [`fluctuations`]: second moments of the scattered photon numbers.
//! * [`oracle`]: a brute-force discretized waveguide used to cross-check the
//!   analytic results.

pub mod coherent;
pub mod error;
pub mod fluctuations;
pub mod fock;
pub mod grid;
pub mod oracle;
pub mod params;
pub mod quadrature;

pub use error::{Error, Result};
pub use grid::{Grid1D, Grid2D};
pub use params::SystemParams;

/// Output channel of the waveguide relative to the incident direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Forward-propagating (`l`) photons.
    Transmitted,
    /// Backward-propagating (`r`) photons.
    Reflected,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Transmitted => "transmitted",
            Side::Reflected => "reflected",
        }
    }
}
