use super::dynamics::Dynamics;
use super::ode::{integrate_fixed, OdeTolerances};
use super::volterra::march;
use super::SigmaTrajectory;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::params::SystemParams;

/// A method for computing `Sigma(t)` on a uniform grid starting at `t0`.
pub trait SigmaSolver: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    fn solve(&self, params: &SystemParams, grid: &Grid1D) -> Result<SigmaTrajectory>;
}

fn check_grid(p: &SystemParams, grid: &Grid1D) -> Result<()> {
    if grid.lo() != p.t0() {
        return Err(Error::domain(format!(
            "time grid must start at t0 = {}, got {}",
            p.t0(),
            grid.lo()
        )));
    }
    Ok(())
}

fn reduced_times(p: &SystemParams, grid: &Grid1D) -> Vec<f64> {
    grid.points().map(|t| p.reduce_time(t)).collect()
}

/// Runge–Kutta solve of `L Sigma = 4 g^2 p^2`. Zero detuning only.
///
/// Adaptive by default; `fixed_substeps` switches to that many fixed steps
/// per output interval (for convergence studies).
#[derive(Debug, Clone, Copy, Default)]
pub struct ResonantOde {
    pub tol: OdeTolerances,
    pub fixed_substeps: Option<usize>,
}

impl SigmaSolver for ResonantOde {
    fn name(&self) -> &'static str {
        "resonant-ode"
    }

    fn solve(&self, p: &SystemParams, grid: &Grid1D) -> Result<SigmaTrajectory> {
        if p.omega_a0() != 0.0 {
            return Err(Error::domain(
                "the resonant ODE needs omega_a0 = 0; use the volterra solver for detuned pulses",
            ));
        }
        check_grid(p, grid)?;
        let dyn_ = Dynamics::new(p);
        let times = reduced_times(p, grid);
        let ys = match self.fixed_substeps {
            Some(n) => integrate_fixed(|s, y| dyn_.rhs(s, y, dyn_.drive(s)), [0.0, 0.0], &times, n.max(1)),
            None => dyn_.solve_unit_source(&times, 1.0, self.tol)?,
        };
        let rate = p.v() / p.w();
        Ok(SigmaTrajectory {
            times: grid.to_vec(),
            sigma: ys.iter().map(|y| y[0]).collect(),
            dsigma: ys.iter().map(|y| y[1] * rate).collect(),
            params: *p,
            solver: self.name(),
        })
    }
}

/// Trapezoidal integro-differential solve, valid at any detuning.
///
/// The internal step is the largest divisor of the output spacing below
/// `min(0.02/G, 0.02 w/v, 0.2/|omega|, 0.01/Omega)`, where `Omega` is the peak
/// Rabi frequency. With `richardson` set, runs at `h` and `h/2` are combined
/// to cancel the leading `h^2` error term.
#[derive(Debug, Clone, Copy)]
pub struct Volterra {
    pub richardson: bool,
    /// Extra factor dividing the internal step (for convergence studies).
    pub refine: usize,
}

impl Default for Volterra {
    fn default() -> Self {
        Self {
            richardson: true,
            refine: 1,
        }
    }
}

impl Volterra {
    pub(crate) fn max_step(dyn_: &Dynamics) -> f64 {
        let mut h: f64 = 0.02;
        if dyn_.gamma > 0.0 {
            h = h.min(0.02 / dyn_.gamma);
        }
        if dyn_.omega != 0.0 {
            h = h.min(0.2 / dyn_.omega.abs());
        }
        if dyn_.rabi_peak() > 0.0 {
            h = h.min(0.01 / dyn_.rabi_peak());
        }
        h
    }
}

impl SigmaSolver for Volterra {
    fn name(&self) -> &'static str {
        "volterra"
    }

    fn solve(&self, p: &SystemParams, grid: &Grid1D) -> Result<SigmaTrajectory> {
        check_grid(p, grid)?;
        let dyn_ = Dynamics::new(p);
        let s0 = p.reduce_time(grid.lo());
        let spacing = p.reduce_time(grid.spacing());
        let stride = (spacing / Volterra::max_step(&dyn_)).ceil().max(1.0) as usize * self.refine.max(1);
        let total_steps = stride.saturating_mul(grid.len() - 1);
        const MAX_STEPS: usize = 200_000_000;
        if total_steps > MAX_STEPS / 2 {
            return Err(Error::StepBudget {
                t: grid.lo(),
                max_steps: MAX_STEPS,
            });
        }
        let h = spacing / stride as f64;
        let (mut sigma, mut dsigma) = march(&dyn_, s0, h, stride, grid.len());
        if self.richardson {
            let (fine_s, fine_d) = march(&dyn_, s0, 0.5 * h, 2 * stride, grid.len());
            for (c, f) in sigma.iter_mut().zip(&fine_s) {
                *c = (4.0 * f - *c) / 3.0;
            }
            for (c, f) in dsigma.iter_mut().zip(&fine_d) {
                *c = (4.0 * f - *c) / 3.0;
            }
        }
        let rate = p.v() / p.w();
        for d in &mut dsigma {
            *d *= rate;
        }
        Ok(SigmaTrajectory {
            times: grid.to_vec(),
            sigma,
            dsigma,
            params: *p,
            solver: self.name(),
        })
    }
}

/// Named collection of [`SigmaSolver`] strategies.
pub struct SolverRegistry {
    entries: Vec<Box<dyn SigmaSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Registry holding `resonant-ode` and `volterra` with default settings.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ResonantOde::default()));
        r.register(Box::new(Volterra::default()));
        r
    }

    /// Adds a solver, replacing any existing one with the same name.
    pub fn register(&mut self, solver: Box<dyn SigmaSolver>) {
        self.entries.retain(|s| s.name() != solver.name());
        self.entries.push(solver);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SigmaSolver> {
        self.entries.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    /// The solver a parameter set calls for when none is named: the ODE at
    /// zero detuning, the integro-differential form otherwise.
    pub fn for_params(&self, p: &SystemParams) -> Option<&dyn SigmaSolver> {
        self.get(if p.omega_a0() == 0.0 {
            "resonant-ode"
        } else {
            "volterra"
        })
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
