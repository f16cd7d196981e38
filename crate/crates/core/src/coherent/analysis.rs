//! Local (frozen-envelope) analysis of the `Sigma` dynamics and fitting
//! helpers for oscillating trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Envelope, SigmaTrajectory};
use crate::params::SystemParams;

/// Roots of `lambda^2 + (3G/2) lambda + G^2/2 + 4 g^2 p^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsAnalysis {
    pub roots: [Complex64; 2],
    /// Complex roots, i.e. Rabi oscillations.
    pub oscillatory: bool,
    /// `-Re lambda` of the slowest mode (`3G/4` when oscillatory).
    pub decay_rate: f64,
}

/// Local relaxation modes of `Sigma` for a frozen envelope value `p`.
pub fn dynamics_analysis(params: &SystemParams, p: f64) -> DynamicsAnalysis {
    let gamma = params.gamma();
    let g = params.g();
    let b = 1.5 * gamma;
    let c = 0.5 * gamma * gamma + 4.0 * g * g * p * p;
    let disc = 0.25 * gamma * gamma - 16.0 * g * g * p * p;
    let centre = -0.5 * b;
    if disc < 0.0 {
        let im = 0.5 * (-disc).sqrt();
        DynamicsAnalysis {
            roots: [Complex64::new(centre, im), Complex64::new(centre, -im)],
            oscillatory: true,
            decay_rate: -centre,
        }
    } else {
        let half = 0.5 * disc.sqrt();
        // the product form keeps the small root accurate
        let big = centre - half;
        let small = if big != 0.0 { c / big } else { 0.0 };
        DynamicsAnalysis {
            roots: [Complex64::new(small, 0.0), Complex64::new(big, 0.0)],
            oscillatory: false,
            decay_rate: -small,
        }
    }
}

/// Envelope amplitude `p = pi g / 2v` above which the roots turn complex.
pub fn rabi_threshold_amplitude(params: &SystemParams) -> f64 {
    PI * params.g() / (2.0 * params.v())
}

/// Mean photon number whose peak envelope sits at the Rabi threshold.
pub fn rabi_threshold_n0(params: &SystemParams) -> f64 {
    PI.sqrt() * params.gamma() * params.w() / (32.0 * params.v())
}

/// Adiabatic value `Sigma_qs = (1 + G^2 / 8 g^2 p^2)^{-1}`.
pub fn quasistationary_sigma(params: &SystemParams, p: f64) -> f64 {
    let drive = 8.0 * params.g() * params.g() * p * p;
    if drive == 0.0 {
        return 0.0;
    }
    let gamma = params.gamma();
    drive / (drive + gamma * gamma)
}

/// Deviation of a trajectory from the instantaneous quasistationary value.
pub fn delta_sigma(traj: &SigmaTrajectory) -> Vec<f64> {
    let env = Envelope::new(&traj.params);
    traj.times
        .iter()
        .zip(&traj.sigma)
        .map(|(&t, &s)| s - quasistationary_sigma(&traj.params, env.at(t)))
        .collect()
}

/// Number of sign changes in a series; exact zeros are skipped.
pub fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Strict interior maxima and minima as `(time, value)`.
pub fn local_extrema(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if (b > a && b > c) || (b < a && b < c) {
            out.push((times[i], b));
        }
    }
    out
}

/// Least-squares line through `(x, y)`, returned as `(slope, intercept)`.
pub fn fit_log_linear(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn windowed_extrema(traj: &SigmaTrajectory, half_width: f64) -> Vec<(f64, f64)> {
    let te = traj.params.arrival_time();
    local_extrema(&traj.times, &delta_sigma(traj))
        .into_iter()
        .filter(|(t, _)| (t - te).abs() <= half_width)
        .collect()
}

/// Decay rate of the Rabi oscillation: a log-linear fit of `|delta Sigma|`
/// at its extrema within `half_width` of the pulse arrival. Needs at least
/// three extrema.
pub fn oscillation_decay_rate(traj: &SigmaTrajectory, half_width: f64) -> Option<f64> {
    let ext = windowed_extrema(traj, half_width);
    if ext.len() < 3 {
        return None;
    }
    let ts: Vec<f64> = ext.iter().map(|e| e.0).collect();
    let logs: Vec<f64> = ext.iter().map(|e| e.1.abs().ln()).collect();
    fit_log_linear(&ts, &logs).map(|(slope, _)| -slope)
}

/// Angular frequency of the Rabi oscillation from the mean spacing of the
/// extrema of `delta Sigma` within `half_width` of the pulse arrival.
pub fn oscillation_frequency(traj: &SigmaTrajectory, half_width: f64) -> Option<f64> {
    let ext = windowed_extrema(traj, half_width);
    if ext.len() < 3 {
        return None;
    }
    let span = ext[ext.len() - 1].0 - ext[0].0;
    let half_periods = (ext.len() - 1) as f64;
    Some(PI * half_periods / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64) -> SystemParams {
        SystemParams::new(gamma, 0.0, 1.0, -10.0, 0.0).unwrap()
    }

    #[test]
    fn threshold_splits_the_regimes() {
        let p = params(1.0);
        let pth = rabi_threshold_amplitude(&p);
        assert!(!dynamics_analysis(&p, 0.999 * pth).oscillatory);
        assert!(dynamics_analysis(&p, 1.001 * pth).oscillatory);
        let at = dynamics_analysis(&p, pth);
        for r in at.roots {
            assert!((r.re + 0.75).abs() < 1e-6 && r.im.abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn oscillatory_decay_is_three_quarters_gamma() {
        let p = params(2.0);
        let a = dynamics_analysis(&p, 10.0 * rabi_threshold_amplitude(&p));
        assert_eq!(a.decay_rate, 1.5);
    }

    #[test]
    fn roots_solve_the_quadratic() {
        let p = params(0.7);
        for amp in [0.0, 0.05, 0.5, 3.0] {
            let a = dynamics_analysis(&p, amp);
            for r in a.roots {
                let val = r * r + 1.5 * 0.7 * r + 0.245 + 4.0 * p.g() * p.g() * amp * amp;
                assert!(val.norm() < 1e-12);
            }
        }
        assert_eq!(dynamics_analysis(&p, 0.0).decay_rate, 0.35);
    }

    #[test]
    fn threshold_photon_number_matches_amplitude() {
        let p = params(3.0);
        let n = rabi_threshold_n0(&p);
        let peak = Envelope::new(&p.with_n0(n).unwrap()).peak();
        assert!((peak / rabi_threshold_amplitude(&p) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quasistationary_saturates_monotonically() {
        let p = params(1.0);
        let mut last = -1.0;
        for n0 in [0.0, 0.1, 1.0, 10.0, 1e3, 1e6] {
            let s = quasistationary_sigma(&p, Envelope::new(&p.with_n0(n0).unwrap()).peak());
            assert!(s > last && s < 1.0);
            last = s;
        }
        assert!(last > 0.99999);
    }

    #[test]
    fn sign_changes_skip_zeros() {
        assert_eq!(sign_changes(&[1.0, 0.0, -1.0, -2.0, 0.0, 3.0]), 2);
        assert_eq!(sign_changes(&[]), 0);
    }

    #[test]
    fn log_linear_fit_is_exact_for_lines() {
        let (s, c) = fit_log_linear(&[0.0, 1.0, 2.0], &[1.0, -1.0, -3.0]).unwrap();
        assert!((s + 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    }
}
