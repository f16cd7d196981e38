//! Photon-number fluctuations of the scattered coherent pulse.
//!
//! The second moment of the reflected number needs the two-time function
//! `S(tau, tau')`, `tau >= tau'`. For every `tau'` it is `Sigma(tau')` times
//! the response `Y(tau)` of the resonant operator `L` to the drive
//! `4 g^2 p^2`, started from zero at `tau'`. Each `tau'` is an independent
//! ODE solve; they run in parallel and are stored in a packed lower triangle.
//! The mixed moment of transmitted and reflected numbers needs
//! `<N_l Sigma>(tau)`, solved jointly with `Sigma` as one four-dimensional
//! system.

use rayon::prelude::*;

use crate::coherent::dynamics::Dynamics;
use crate::coherent::ode::{integrate, OdeTolerances};
use crate::coherent::{photon_numbers, ResonantOde, SigmaSolver, SigmaTrajectory};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::SystemParams;

/// Default number of `tau` samples.
pub const DEFAULT_TAU_SAMPLES: usize = 800;
/// Smallest accepted number of `tau` samples.
pub const MIN_TAU_SAMPLES: usize = 200;
/// Relative change between `M` and `M/2` above which statistics are flagged.
pub const RESOLUTION_LIMIT: f64 = 0.01;
/// Relative tolerance of the Poissonian classification.
pub const POISSON_TOLERANCE: f64 = 1e-6;

/// Packed lower-triangular `S[i][j] = S(tau_i, tau_j)`, `i >= j`, plus the
/// `<N_l Sigma>(tau_i)` series on the same grid.
#[derive(Debug, Clone)]
pub struct TwoTimeField {
    pub tau: Vec<f64>,
    packed: Vec<f64>,
    pub nl_sigma: Vec<f64>,
}

impl TwoTimeField {
    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// `S(tau_i, tau_j)` for `i >= j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(j <= i, "S is stored for tau >= tau' only");
        self.packed[Self::offset(i) + j]
    }

    /// Row `i`: `S(tau_i, tau_j)` for `j = 0..=i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let o = Self::offset(i);
        &self.packed[o..=o + i]
    }

    pub fn min_value(&self) -> f64 {
        self.packed.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn require_resonant(p: &SystemParams) -> Result<()> {
    if p.omega_a0() != 0.0 {
        return Err(Error::domain(
            "fluctuation statistics are defined at zero detuning only",
        ));
    }
    Ok(())
}

/// Fills the two-time field on `m` uniform samples spanning the trajectory,
/// together with the `<N_l Sigma>` series.
pub fn solve_two_time(traj: &SigmaTrajectory, m: usize, tol: OdeTolerances) -> Result<TwoTimeField> {
    let p = traj.params;
    require_resonant(&p)?;
    if m < MIN_TAU_SAMPLES {
        return Err(Error::domain(format!(
            "need at least {MIN_TAU_SAMPLES} tau samples, got {m}"
        )));
    }
    let grid = Grid1D::new(traj.t_start(), traj.t_end(), m)?;
    let tau = grid.to_vec();
    let reduced: Vec<f64> = tau.iter().map(|&t| p.reduce_time(t)).collect();
    let sigma_at: Vec<f64> = tau.iter().map(|&t| traj.sigma_at(t)).collect::<Result<_>>()?;
    let dyn_ = Dynamics::new(&p);

    let columns: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let scale = sigma_at[j];
            if scale == 0.0 || j + 1 == m {
                return Ok(vec![0.0; m - j]);
            }
            let ys = dyn_
                .solve_unit_source(&reduced[j..], 1.0, tol)
                .map_err(|e| Error::TwoTimeRow {
                    row: j,
                    source: Box::new(e),
                })?;
            Ok(ys.iter().map(|y| scale * y[0]).collect())
        })
        .collect::<Result<_>>()?;

    let mut packed = vec![0.0; m * (m + 1) / 2];
    for (j, col) in columns.iter().enumerate() {
        for (k, &value) in col.iter().enumerate() {
            let i = j + k;
            packed[TwoTimeField::offset(i) + j] = value;
        }
    }
    let nl_sigma = nl_sigma_on(&p, &reduced, tol)?;
    Ok(TwoTimeField { tau, packed, nl_sigma })
}

/// `<N_l Sigma>` on the trajectory's time grid, from
/// `L X = 4 g^2 p^2 (N0 + 1 - Sigma)` integrated together with `Sigma`
/// (zero value and slope at `t0`).
pub fn solve_nl_sigma(traj: &SigmaTrajectory, tol: OdeTolerances) -> Result<Vec<f64>> {
    let p = traj.params;
    let s: Vec<f64> = traj.times.iter().map(|&t| p.reduce_time(t)).collect();
    nl_sigma_on(&p, &s, tol)
}

fn nl_sigma_on(p: &SystemParams, s: &[f64], tol: OdeTolerances) -> Result<Vec<f64>> {
    require_resonant(p)?;
    let dyn_ = Dynamics::new(p);
    let n0 = p.n0();
    let rhs = |t: f64, y: &[f64; 4]| {
        let d = dyn_.drive(t);
        let a = dyn_.rhs(t, &[y[0], y[1]], d);
        let b = dyn_.rhs(t, &[y[2], y[3]], d * (n0 + 1.0 - y[0]));
        [a[0], a[1], b[0], b[1]]
    };
    Ok(integrate(rhs, [0.0; 4], s, tol)?.iter().map(|y| y[2]).collect())
}

/// Counting-statistics regime of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Sub,
    Poissonian,
    Super,
}

impl Classification {
    /// Poissonian within [`POISSON_TOLERANCE`]; a channel with zero mean
    /// counts as Poissonian.
    pub fn from_fano(fano: Option<f64>) -> Self {
        match fano {
            None => Classification::Poissonian,
            Some(f) if (f - 1.0).abs() <= POISSON_TOLERANCE => Classification::Poissonian,
            Some(f) if f < 1.0 => Classification::Sub,
            Some(_) => Classification::Super,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Classification::Sub => "sub",
            Classification::Poissonian => "poissonian",
            Classification::Super => "super",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStatistics {
    pub n_r: f64,
    pub n_l: f64,
    pub mean_sq_nr: f64,
    pub var_nr: f64,
    pub var_nl: f64,
    pub fano_r: Option<f64>,
    pub fano_l: Option<f64>,
    pub class_r: Classification,
    pub class_l: Classification,
    /// Largest relative change of a variance when every other `tau` sample is dropped.
    pub resolution_change: f64,
    /// `resolution_change <= RESOLUTION_LIMIT`.
    pub resolved: bool,
    /// The trajectory ends in the far field.
    pub far_field: bool,
}

fn trapezoid_nonuniform(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

struct Moments {
    mean_sq_nr: f64,
    var_nr: f64,
    var_nl: f64,
}

fn moments(field: &TwoTimeField, idx: &[usize], gamma: f64, n0: f64, n_r: f64) -> Moments {
    let tau: Vec<f64> = idx.iter().map(|&i| field.tau[i]).collect();
    let inner: Vec<f64> = idx
        .iter()
        .enumerate()
        .map(|(a, &i)| {
            let vals: Vec<f64> = idx[..=a].iter().map(|&j| field.get(i, j)).collect();
            trapezoid_nonuniform(&tau[..=a], &vals)
        })
        .collect();
    let double = trapezoid_nonuniform(&tau, &inner);
    let mean_sq_nr = 0.125 * gamma * gamma * double + n_r;
    let nls: Vec<f64> = idx.iter().map(|&i| field.nl_sigma[i]).collect();
    let cross = 0.25 * gamma * trapezoid_nonuniform(&tau, &nls);
    let n_l = n0 - n_r;
    // <N_l^2> - N_l^2 with <N_l^2> = N0^2 + N0 - 2 <N_l N_r> + <N_r^2>
    let var_nl = n0 + n_r * (n0 + n_l) - 2.0 * cross + mean_sq_nr;
    Moments {
        mean_sq_nr,
        var_nr: mean_sq_nr - n_r * n_r,
        var_nl,
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Means, variances, Fano factors and regimes of both channels at the end
/// of the two-time field.
pub fn photon_statistics(traj: &SigmaTrajectory, field: &TwoTimeField) -> Result<PhotonStatistics> {
    let p = traj.params;
    require_resonant(&p)?;
    if field.is_empty() || field.tau[field.len() - 1] != traj.t_end() || field.tau[0] != traj.t_start() {
        return Err(Error::Shape("two-time field does not span the trajectory".into()));
    }
    let t = traj.t_end();
    let numbers = photon_numbers(traj, t)?;
    let (n_r, n_l) = (numbers.n_r, numbers.n_l);
    let all: Vec<usize> = (0..field.len()).collect();
    let fine = moments(field, &all, p.gamma(), p.n0(), n_r);

    let mut half: Vec<usize> = (0..field.len()).step_by(2).collect();
    if *half.last().unwrap() != field.len() - 1 {
        half.push(field.len() - 1);
    }
    let coarse = moments(field, &half, p.gamma(), p.n0(), n_r);
    let resolution_change =
        relative_change(fine.var_nr, coarse.var_nr).max(relative_change(fine.var_nl, coarse.var_nl));

    let fano = |var: f64, mean: f64| if mean > 0.0 { Some(var / mean) } else { None };
    let fano_r = fano(fine.var_nr, n_r);
    let fano_l = fano(fine.var_nl, n_l);
    Ok(PhotonStatistics {
        n_r,
        n_l,
        mean_sq_nr: fine.mean_sq_nr,
        var_nr: fine.var_nr,
        var_nl: fine.var_nl,
        fano_r,
        fano_l,
        class_r: Classification::from_fano(fano_r),
        class_l: Classification::from_fano(fano_l),
        resolution_change,
        resolved: resolution_change <= RESOLUTION_LIMIT,
        far_field: numbers.far_field,
    })
}

/// Settings for [`statistics_for`].
#[derive(Debug, Clone, Copy)]
pub struct StatisticsOptions {
    pub tau_samples: usize,
    pub trajectory_samples: usize,
    pub t_end: Option<f64>,
    pub tol: OdeTolerances,
}

impl Default for StatisticsOptions {
    fn default() -> Self {
        Self {
            tau_samples: DEFAULT_TAU_SAMPLES,
            trajectory_samples: 4001,
            t_end: None,
            tol: OdeTolerances::default(),
        }
    }
}

/// Trajectory, two-time field and statistics for one parameter set.
pub fn statistics_for(
    p: &SystemParams,
    opts: StatisticsOptions,
) -> Result<(SigmaTrajectory, TwoTimeField, PhotonStatistics)> {
    let grid = crate::coherent::time_grid(p, opts.t_end, opts.trajectory_samples)?;
    let traj = ResonantOde {
        tol: opts.tol,
        fixed_substeps: None,
    }
    .solve(p, &grid)?;
    let field = solve_two_time(&traj, opts.tau_samples, opts.tol)?;
    let stats = photon_statistics(&traj, &field)?;
    Ok((traj, field, stats))
}
