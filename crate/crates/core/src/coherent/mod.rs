//! Coherent-pulse dynamics.
//!
//! A multimode coherent pulse drives the atom through its envelope `p(t)`.
//! The central quantity is `Sigma(t) = <sigma_z> + 1`; once it is known, the
//! mean reflected and transmitted densities and photon numbers follow from
//! retarded reads of `Sigma` and its derivative.
//!
//! Two solvers compute `Sigma`: a second-order ODE valid at zero detuning
//! ([`ResonantOde`]) and the general integro-differential form ([`Volterra`]).
//! Both are registered by name in a [`SolverRegistry`].

mod analysis;
pub(crate) mod dynamics;
pub mod ode;
mod solver;
mod volterra;

pub use analysis::{
    delta_sigma, dynamics_analysis, fit_log_linear, local_extrema, oscillation_decay_rate, oscillation_frequency,
    quasistationary_sigma, rabi_threshold_amplitude, rabi_threshold_n0, sign_changes, DynamicsAnalysis,
};
pub use solver::{ResonantOde, SigmaSolver, SolverRegistry, Volterra};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::SystemParams;
use crate::Side;

/// Envelope `p(t)` of the coherent pulse as seen by the atom.
#[derive(Debug, Clone, Copy)]
pub struct Envelope {
    amplitude: f64,
    x0: f64,
    t0: f64,
    v: f64,
    w: f64,
}

impl Envelope {
    pub fn new(p: &SystemParams) -> Self {
        Self {
            amplitude: PI.powf(0.25) * (2.0 * p.n0() / p.w()).sqrt(),
            x0: p.x0(),
            t0: p.t0(),
            v: p.v(),
            w: p.w(),
        }
    }

    pub fn peak(&self) -> f64 {
        self.amplitude
    }

    /// Time at which the envelope peaks.
    pub fn arrival_time(&self) -> f64 {
        self.t0 + self.x0.abs() / self.v
    }

    pub fn at(&self, t: f64) -> f64 {
        let z = (self.x0 + self.v * (t - self.t0)) / self.w;
        self.amplitude * (-0.5 * z * z).exp()
    }
}

/// `p(t)` for the pulse described by `params`.
pub fn envelope(t: f64, params: &SystemParams) -> f64 {
    Envelope::new(params).at(t)
}

/// Default end of a `Sigma` solve: arrival plus `6 w/v` for the pulse to
/// pass plus `10/gamma` for the atom to relax.
pub fn default_t_end(p: &SystemParams) -> f64 {
    let relax = if p.gamma() > 0.0 { 10.0 / p.gamma() } else { 0.0 };
    p.arrival_time() + 6.0 * p.w() / p.v() + relax
}

/// Uniform time grid from `t0` to `t_end` (default [`default_t_end`]).
pub fn time_grid(p: &SystemParams, t_end: Option<f64>, samples: usize) -> Result<Grid1D> {
    let end = t_end.unwrap_or_else(|| default_t_end(p));
    Grid1D::new(p.t0(), end, samples)
}

/// `Sigma(t)` and its derivative on a uniform time grid.
#[derive(Debug, Clone)]
pub struct SigmaTrajectory {
    pub times: Vec<f64>,
    pub sigma: Vec<f64>,
    pub dsigma: Vec<f64>,
    pub params: SystemParams,
    /// Registry name of the solver that produced the trajectory.
    pub solver: &'static str,
}

impl SigmaTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (a, b) = (self.t_start(), self.t_end());
        let slack = 1e-12 * (b - a);
        if !(t >= a - slack && t <= b + slack) {
            return Err(Error::domain(format!("time {t} outside trajectory [{a}, {b}]")));
        }
        let h = self.step();
        let n = self.times.len();
        let i = (((t - a) / h).floor().max(0.0) as usize).min(n - 2);
        Ok((i, ((t - self.times[i]) / h).clamp(0.0, 1.0)))
    }

    /// Cubic Hermite interpolation of `Sigma` using the stored derivative.
    pub fn sigma_at(&self, t: f64) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        let h = self.step();
        let (y0, y1) = (self.sigma[i], self.sigma[i + 1]);
        let (d0, d1) = (self.dsigma[i] * h, self.dsigma[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1)
    }

    /// Four-point cubic Lagrange interpolation of the derivative.
    pub fn dsigma_at(&self, t: f64) -> Result<f64> {
        let (i, _) = self.locate(t)?;
        let n = self.times.len();
        if n < 4 {
            let (i, s) = self.locate(t)?;
            return Ok(self.dsigma[i] * (1.0 - s) + self.dsigma[i + 1] * s);
        }
        let start = i.saturating_sub(1).min(n - 4);
        let h = self.step();
        let u = (t - self.times[start]) / h;
        let mut acc = 0.0;
        for j in 0..4 {
            let mut basis = 1.0;
            for m in 0..4 {
                if m != j {
                    basis *= (u - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += basis * self.dsigma[start + j];
        }
        Ok(acc)
    }
}

/// Solves for `Sigma` at zero detuning with the second-order ODE.
pub fn solve_sigma_resonant(p: &SystemParams, grid: &Grid1D) -> Result<SigmaTrajectory> {
    ResonantOde::default().solve(p, grid)
}

/// Solves for `Sigma` at any detuning with the integro-differential equation.
pub fn solve_sigma_detuned(p: &SystemParams, grid: &Grid1D) -> Result<SigmaTrajectory> {
    Volterra::default().solve(p, grid)
}

/// Mean photon density of the scattered coherent pulse at `(x, t)`.
///
/// The scattered part is a retarded read of the trajectory; a retarded time
/// outside the trajectory is a domain error rather than an extrapolation.
pub fn spatial_density_coherent(side: Side, x: f64, t: f64, traj: &SigmaTrajectory) -> Result<f64> {
    let p = &traj.params;
    let v = p.v();
    match side {
        Side::Transmitted => {
            let tr = t - x / v;
            let sigma = traj.sigma_at(tr)?;
            let dsigma = traj.dsigma_at(tr)?;
            let big_x = (x - p.x0() - v * (t - p.t0())) / p.w();
            let free = p.n0() / (PI.sqrt() * p.w()) * (-big_x * big_x).exp();
            Ok(free - p.gamma() / (4.0 * v) * sigma - dsigma / (2.0 * v))
        }
        Side::Reflected => Ok(p.gamma() / (4.0 * v) * traj.sigma_at(t + x / v)?),
    }
}

/// Mean reflected and transmitted photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumbers {
    pub n_r: f64,
    pub n_l: f64,
    /// Whether `t` satisfied the far-field condition; numbers computed before
    /// the atom relaxed are still returned but flagged.
    pub far_field: bool,
}

/// `N_r = (gamma/4) \int_{t0}^{t} Sigma` by the trapezoidal rule on the
/// trajectory grid, and `N_l = N0 - N_r`.
pub fn photon_numbers(traj: &SigmaTrajectory, t: f64) -> Result<PhotonNumbers> {
    let p = &traj.params;
    let integral = integrate_sigma(traj, t)?;
    let n_r = 0.25 * p.gamma() * integral;
    Ok(PhotonNumbers {
        n_r,
        n_l: p.n0() - n_r,
        far_field: p.far_field_ok(t),
    })
}

/// Trapezoidal `\int_{t_start}^{t} Sigma`, with the last partial interval
/// closed by interpolation.
pub(crate) fn integrate_sigma(traj: &SigmaTrajectory, t: f64) -> Result<f64> {
    let (i, s) = traj.locate(t)?;
    let h = traj.step();
    let full = crate::quadrature::trapezoid(&traj.sigma[..=i], h);
    if s == 0.0 {
        return Ok(full);
    }
    let tail = traj.sigma_at(t)?;
    Ok(full + 0.5 * s * h * (traj.sigma[i] + tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, n0: f64) -> SystemParams {
        SystemParams::new(gamma, 0.0, n0, -10.0, 0.0).unwrap()
    }

    #[test]
    fn envelope_peak_and_norm() {
        let p = params(1.0, 1.0);
        let e = Envelope::new(&p);
        assert!((e.at(10.0) - 1.8827925275534296).abs() < 1e-12);
        assert_eq!(e.arrival_time(), 10.0);
        assert_eq!(envelope(3.0, &params(1.0, 0.0)), 0.0);
        let f = |t: f64| e.at(t).powi(2);
        let breaks = crate::quadrature::breakpoints(0.0, 20.0, 1.0, &[]);
        let norm = crate::quadrature::integrate_real(&f, &breaks, Default::default()).unwrap();
        assert!((norm - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn default_end_covers_passage_and_relaxation() {
        let p = params(0.5, 1.0);
        assert_eq!(default_t_end(&p), 10.0 + 6.0 + 20.0);
        let g = time_grid(&p, None, 11).unwrap();
        assert_eq!(g.lo(), 0.0);
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let p = params(1.0, 1.0);
        let times: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let f = |t: f64| 0.1 * t * t * t - t * t + 2.0;
        let df = |t: f64| 0.3 * t * t - 2.0 * t;
        let traj = SigmaTrajectory {
            sigma: times.iter().map(|&t| f(t)).collect(),
            dsigma: times.iter().map(|&t| df(t)).collect(),
            times,
            params: p,
            solver: "test",
        };
        for t in [0.0, 0.3, 2.26, 4.9, 5.0] {
            assert!((traj.sigma_at(t).unwrap() - f(t)).abs() < 1e-12);
            assert!((traj.dsigma_at(t).unwrap() - df(t)).abs() < 1e-12);
        }
        assert!(traj.sigma_at(5.1).is_err());
        assert!(traj.sigma_at(-0.1).is_err());
    }
}
