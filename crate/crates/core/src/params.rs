//! Physical constants of the waveguide, the pulse and the two-level system.
//!
//! Unit convention: positions are measured in pulse widths `w`, momenta in
//! `1/w`, times in `w/v` and rates (`gamma`, `omega_a0`) in `v/w`. The default
//! constructor fixes `v = w = 1`, so plain numbers are already in these units.
//! [`SystemParams::with_scales`] allows other values of `v` and `w`; every
//! engine works internally with the reduced (dimensionless) combinations
//! returned by [`SystemParams::reduced`].
//!
//! The carrier frequency never appears: all observables depend only on the
//! detuning `omega_a0 = omega_a - omega_0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Safety factor applied to the relaxation condition `v(t - t0) + x0 >> w + v/gamma`.
pub const FAR_FIELD_MARGIN: f64 = 5.0;

/// Immutable parameter set shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    gamma: f64,
    g: f64,
    v: f64,
    w: f64,
    x0: f64,
    t0: f64,
    n0: f64,
    omega_a0: f64,
}

/// Parameters expressed in units of `w` and `v` (so `v = w = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced {
    pub gamma: f64,
    pub omega: f64,
    pub x0: f64,
    pub t0: f64,
    pub n0: f64,
}

impl Reduced {
    /// `g^2` in reduced units, from `gamma = 4 pi g^2 / v`.
    pub fn g_sq(&self) -> f64 {
        self.gamma / (4.0 * PI)
    }

    /// Time at which the pulse center reaches the atom.
    pub fn arrival_time(&self) -> f64 {
        self.t0 - self.x0
    }
}

/// Coupling constant `g` implied by the decay rate, `gamma = 4 pi g^2 / v`.
pub fn coupling_from_gamma(gamma: f64, v: f64) -> f64 {
    (gamma * v / (4.0 * PI)).sqrt()
}

/// Inverse of [`coupling_from_gamma`].
pub fn gamma_from_coupling(g: f64, v: f64) -> f64 {
    4.0 * PI * g * g / v
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {value}")))
    }
}

impl SystemParams {
    /// Builds a parameter set with `v = w = 1`.
    ///
    /// The coupling `g` is derived from `gamma` and is never an independent input.
    pub fn new(gamma: f64, omega_a0: f64, n0: f64, x0: f64, t0: f64) -> Result<Self> {
        Self::with_scales(gamma, omega_a0, n0, x0, t0, 1.0, 1.0)
    }

    /// Same as [`SystemParams::new`] with explicit group speed `v` and pulse width `w`.
    pub fn with_scales(gamma: f64, omega_a0: f64, n0: f64, x0: f64, t0: f64, v: f64, w: f64) -> Result<Self> {
        for (name, value) in [
            ("gamma", gamma),
            ("omega_a0", omega_a0),
            ("n0", n0),
            ("x0", x0),
            ("t0", t0),
            ("v", v),
            ("w", w),
        ] {
            check_finite(name, value)?;
        }
        if gamma < 0.0 {
            return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
        }
        if n0 < 0.0 {
            return Err(Error::domain(format!("n0 must be >= 0, got {n0}")));
        }
        if x0 >= 0.0 {
            return Err(Error::domain(format!(
                "x0 must be < 0 (pulse starts left of the atom), got {x0}"
            )));
        }
        if v <= 0.0 || w <= 0.0 {
            return Err(Error::domain(format!("v and w must be > 0, got v = {v}, w = {w}")));
        }
        Ok(Self {
            gamma,
            g: coupling_from_gamma(gamma, v),
            v,
            w,
            x0,
            t0,
            n0,
            omega_a0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn omega_a0(&self) -> f64 {
        self.omega_a0
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::with_scales(gamma, self.omega_a0, self.n0, self.x0, self.t0, self.v, self.w)
    }

    pub fn with_n0(&self, n0: f64) -> Result<Self> {
        Self::with_scales(self.gamma, self.omega_a0, n0, self.x0, self.t0, self.v, self.w)
    }

    pub fn with_omega_a0(&self, omega_a0: f64) -> Result<Self> {
        Self::with_scales(self.gamma, omega_a0, self.n0, self.x0, self.t0, self.v, self.w)
    }

    /// Time at which the pulse center reaches the atom, `t_e = t0 + |x0| / v`.
    pub fn arrival_time(&self) -> f64 {
        self.t0 + self.x0.abs() / self.v
    }

    /// Upper limit on the reflected photon number obtained from `<Sigma> < 2`.
    pub fn reflected_number_bound(&self) -> f64 {
        self.gamma * self.w / (2.0 * self.v)
    }

    pub fn reduced(&self) -> Reduced {
        Reduced {
            gamma: self.gamma * self.w / self.v,
            omega: self.omega_a0 * self.w / self.v,
            x0: self.x0 / self.w,
            t0: self.t0 * self.v / self.w,
            n0: self.n0,
        }
    }

    /// Converts a physical time to reduced units.
    pub fn reduce_time(&self, t: f64) -> f64 {
        t * self.v / self.w
    }

    /// Converts a reduced time back to physical units.
    pub fn expand_time(&self, s: f64) -> f64 {
        s * self.w / self.v
    }

    /// Whether the atom has had time to relax after the pulse passed, i.e.
    /// `v(t - t0) + x0 >= R (w + v/gamma)` with `R = FAR_FIELD_MARGIN`
    /// (`R w` alone for a decoupled atom).
    pub fn far_field_ok(&self, t: f64) -> bool {
        if !(t >= self.t0) {
            return false;
        }
        let travelled = self.v * (t - self.t0) + self.x0;
        let needed = if self.gamma > 0.0 {
            FAR_FIELD_MARGIN * (self.w + self.v / self.gamma)
        } else {
            FAR_FIELD_MARGIN * self.w
        };
        travelled >= needed
    }
}
