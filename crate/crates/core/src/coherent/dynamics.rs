//! Reduced-unit coefficients of the resonant operator
//! `L = d^2/dt^2 + (3G/2 + beta) d/dt + (G^2/2 + beta G + 4 g^2 p^2)`,
//! `beta = t - t_e`, shared by the `Sigma` solve and the fluctuation solves.

use std::f64::consts::PI;

use super::ode::{integrate, OdeTolerances};
use crate::error::Result;
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Dynamics {
    pub gamma: f64,
    pub omega: f64,
    pub te: f64,
    /// `4 g^2 p(t_e)^2`
    drive_peak: f64,
    /// `p(t_e)`
    p_peak: f64,
    pub g_sq: f64,
}

impl Dynamics {
    pub fn new(p: &SystemParams) -> Self {
        let r = p.reduced();
        let g_sq = r.g_sq();
        let p_peak = PI.powf(0.25) * (2.0 * r.n0).sqrt();
        Self {
            gamma: r.gamma,
            omega: r.omega,
            te: r.arrival_time(),
            drive_peak: 4.0 * g_sq * p_peak * p_peak,
            p_peak,
            g_sq,
        }
    }

    pub fn envelope(&self, s: f64) -> f64 {
        let z = s - self.te;
        self.p_peak * (-0.5 * z * z).exp()
    }

    /// `4 g^2 p(s)^2`
    pub fn drive(&self, s: f64) -> f64 {
        let z = s - self.te;
        self.drive_peak * (-z * z).exp()
    }

    /// Peak Rabi frequency `2 g p(t_e)`.
    pub fn rabi_peak(&self) -> f64 {
        self.drive_peak.sqrt()
    }

    /// Right-hand side of `L y = source` written as a first-order system.
    pub fn rhs(&self, s: f64, y: &[f64; 2], source: f64) -> [f64; 2] {
        let beta = s - self.te;
        let d = self.drive(s);
        [
            y[1],
            source - (1.5 * self.gamma + beta) * y[1] - (0.5 * self.gamma * self.gamma + beta * self.gamma + d) * y[0],
        ]
    }

    /// Solves `L y = scale * 4 g^2 p^2` from zero data at `times[0]`.
    pub fn solve_unit_source(&self, times: &[f64], scale: f64, tol: OdeTolerances) -> Result<Vec<[f64; 2]>> {
        integrate(|s, y| self.rhs(s, y, scale * self.drive(s)), [0.0, 0.0], times, tol)
    }
}
