//! Scenario runners, registered by name. Each runner declares its options
//! and CSV schema; the command line is built from the registry.

use std::f64::consts::PI;

use rayon::prelude::*;
use wqed_core::coherent::{
    default_t_end, photon_numbers, quasistationary_sigma, spatial_density_coherent, time_grid, Envelope,
    SigmaTrajectory, SolverRegistry,
};
use wqed_core::fluctuations::{statistics_for, StatisticsOptions};
use wqed_core::fock::{self, DistributionField, FieldKind};
use wqed_core::oracle::{self, compare_report, evolve_discrete};
use wqed_core::{Grid1D, Grid2D, Side, SystemParams};

use crate::error::{CliError, CliResult};
use crate::settings::Settings;
use crate::table::{Cell, Table};

/// One command-line option of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct OptSpec {
    pub name: &'static str,
    pub help: &'static str,
    /// Empty means "unset"; the runner picks a derived value.
    pub default: &'static str,
    pub flag: bool,
}

const fn opt(name: &'static str, default: &'static str, help: &'static str) -> OptSpec {
    OptSpec {
        name,
        help,
        default,
        flag: false,
    }
}

/// Options shared by every scenario.
pub const COMMON: &[OptSpec] = &[
    opt("gamma", "1", "Decay rate into the waveguide"),
    opt("omega", "0", "Detuning omega_a - omega_0"),
    opt("n0", "1", "Mean photon number of a coherent pulse"),
    opt("x0", "-10", "Initial pulse center (must be negative)"),
    opt("t0", "0", "Initial time"),
    opt("v", "1", "Group speed"),
    opt("w", "1", "Pulse width"),
    OptSpec {
        name: "log",
        help: "Space lo:hi:count sweeps geometrically",
        default: "false",
        flag: true,
    },
];

/// A CSV produced by a scenario; `suffix` distinguishes multiple outputs.
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub table: Table,
}

impl Artifact {
    fn single(table: Table) -> Vec<Artifact> {
        vec![Artifact { suffix: None, table }]
    }
}

pub trait ScenarioRunner: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Column description shown in `--help`.
    fn schema(&self) -> &'static str;
    fn options(&self) -> Vec<OptSpec>;
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>>;
}

pub struct ScenarioRegistry {
    runners: Vec<Box<dyn ScenarioRunner>>,
}

impl ScenarioRegistry {
    pub fn empty() -> Self {
        Self { runners: Vec::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FockDist));
        r.register(Box::new(FockSpectrum));
        r.register(Box::new(FockDensity));
        r.register(Box::new(Sigma));
        r.register(Box::new(CoherentDensity));
        r.register(Box::new(PhotonNumberSweep));
        r.register(Box::new(Variances));
        r.register(Box::new(OracleCheck));
        r
    }

    pub fn register(&mut self, runner: Box<dyn ScenarioRunner>) {
        self.runners.retain(|r| r.name() != runner.name());
        self.runners.push(runner);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ScenarioRunner> {
        self.runners.iter().find(|r| r.name() == name).map(|r| r.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn ScenarioRunner> {
        self.runners.iter().map(|r| r.as_ref())
    }
}

fn params(s: &Settings) -> CliResult<SystemParams> {
    Ok(SystemParams::with_scales(
        s.f64("gamma")?,
        s.f64("omega")?,
        s.f64("n0")?,
        s.f64("x0")?,
        s.f64("t0")?,
        s.f64("v")?,
        s.f64("w")?,
    )?)
}

fn grid(s: &Settings, axis: &str) -> CliResult<Grid1D> {
    let lo = s.f64(&format!("{axis}-min"))?;
    let hi = s.f64(&format!("{axis}-max"))?;
    let n = s.usize(&format!("{axis}-count"))?;
    Ok(Grid1D::new(lo, hi, n)?)
}

fn grid_opts(axis: &'static str, lo: &'static str, hi: &'static str, n: &'static str) -> [OptSpec; 3] {
    let (min, max, count) = match axis {
        "x" => ("x-min", "x-max", "x-count"),
        _ => ("q-min", "q-max", "q-count"),
    };
    [
        opt(min, lo, "Lower end of the grid"),
        opt(max, hi, "Upper end of the grid"),
        opt(count, n, "Number of grid points"),
    ]
}

fn check_sweep(values: &[f64], key: &str) -> CliResult<()> {
    if values.is_empty() {
        return Err(CliError::input(format!("{key}: sweep must be non-empty")));
    }
    Ok(())
}

fn solve(p: &SystemParams, s: &Settings, t_end: Option<f64>) -> CliResult<SigmaTrajectory> {
    let registry = SolverRegistry::standard();
    let name = s.raw("solver").unwrap_or("auto");
    let solver = if name == "auto" {
        registry.for_params(p)
    } else {
        registry.get(name)
    }
    .ok_or_else(|| {
        CliError::input(format!(
            "unknown solver {name:?}; available: auto, {}",
            registry.names().join(", ")
        ))
    })?;
    let grid = time_grid(p, t_end, s.usize("samples")?)?;
    Ok(solver.solve(p, &grid)?)
}

const SOLVER_OPTS: [OptSpec; 2] = [
    opt("samples", "4001", "Trajectory samples"),
    opt("solver", "auto", "Excitation solver: auto, resonant-ode or volterra"),
];

struct FockDist;

impl ScenarioRunner for FockDist {
    fn name(&self) -> &'static str {
        "fock-dist"
    }
    fn about(&self) -> &'static str {
        "Phase-space distributions of a scattered single photon"
    }
    fn schema(&self) -> &'static str {
        "Writes <output>_transmitted and <output>_reflected, each with columns x,q,f (q varies fastest)."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![opt("t", "20", "Evaluation time")];
        o.extend(grid_opts("x", "-25", "25", "512"));
        o.extend(grid_opts("q", "-4", "4", "257"));
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let p = params(s)?;
        let phase = Grid2D::new(grid(s, "x")?, grid(s, "q")?);
        let t = s.f64("t")?;
        let mut out = Vec::new();
        for (kind, suffix) in [
            (FieldKind::Transmitted, "transmitted"),
            (FieldKind::Reflected, "reflected"),
        ] {
            let field = DistributionField::compute(kind, phase, t, &p)?;
            let mut table = Table::new(vec!["x", "q", "f"]);
            for (i, f) in field.values.iter().enumerate() {
                let (x, q) = phase.coords(i);
                table.push(vec![x, q, *f]);
            }
            out.push(Artifact {
                suffix: Some(suffix),
                table,
            });
        }
        Ok(out)
    }
}

struct FockSpectrum;

impl ScenarioRunner for FockSpectrum {
    fn name(&self) -> &'static str {
        "fock-spectrum"
    }
    fn about(&self) -> &'static str {
        "Transmitted and reflected single-photon spectra"
    }
    fn schema(&self) -> &'static str {
        "Columns gamma,q,n_free,n_l,n_r: one block per swept gamma, n_l transmitted and n_r reflected."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![opt("gamma-sweep", "", "Gamma values (lo:hi:count or a comma list)")];
        o.extend(grid_opts("q", "-4", "4", "801"));
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let gammas = s.sweep_or("gamma-sweep", "gamma")?;
        check_sweep(&gammas, "gamma-sweep")?;
        let q = grid(s, "q")?;
        let mut table = Table::new(vec!["gamma", "q", "n_free", "n_l", "n_r"]);
        for gamma in gammas {
            let p = base.with_gamma(gamma)?;
            let w = p.w();
            for qi in q.points() {
                let free = w * (-(qi * w) * (qi * w)).exp() / PI.sqrt();
                table.push(vec![
                    gamma,
                    qi,
                    free,
                    fock::spectral_density(Side::Transmitted, qi, &p),
                    fock::spectral_density(Side::Reflected, qi, &p),
                ]);
            }
        }
        Ok(Artifact::single(table))
    }
}

struct FockDensity;

impl ScenarioRunner for FockDensity {
    fn name(&self) -> &'static str {
        "fock-density"
    }
    fn about(&self) -> &'static str {
        "Spatial photon densities of a scattered single photon"
    }
    fn schema(&self) -> &'static str {
        "Columns gamma,x,rho_l,rho_r: transmitted and reflected densities at time t, one block per swept gamma."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![
            opt("gamma-sweep", "", "Gamma values (lo:hi:count or a comma list)"),
            opt("t", "20", "Evaluation time"),
        ];
        o.extend(grid_opts("x", "-25", "25", "501"));
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let gammas = s.sweep_or("gamma-sweep", "gamma")?;
        check_sweep(&gammas, "gamma-sweep")?;
        let xs = grid(s, "x")?.to_vec();
        let t = s.f64("t")?;
        let blocks = gammas
            .par_iter()
            .map(|&gamma| {
                let p = base.with_gamma(gamma)?;
                xs.par_iter()
                    .map(|&x| {
                        Ok(vec![
                            gamma,
                            x,
                            fock::spatial_density(Side::Transmitted, x, t, &p)?,
                            fock::spatial_density(Side::Reflected, x, t, &p)?,
                        ])
                    })
                    .collect::<wqed_core::Result<Vec<_>>>()
            })
            .collect::<wqed_core::Result<Vec<_>>>()?;
        let mut table = Table::new(vec!["gamma", "x", "rho_l", "rho_r"]);
        blocks.into_iter().flatten().for_each(|r| table.push(r));
        Ok(Artifact::single(table))
    }
}

struct Sigma;

impl ScenarioRunner for Sigma {
    fn name(&self) -> &'static str {
        "sigma"
    }
    fn about(&self) -> &'static str {
        "Atomic excitation dynamics under a coherent pulse"
    }
    fn schema(&self) -> &'static str {
        "Columns n0,t,p,sigma,dsigma,sigma_qs: pulse amplitude, Sigma, its time derivative and the \
         quasistationary value, one block per swept n0."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![
            opt("n0-sweep", "", "N0 values (lo:hi:count or a comma list)"),
            opt("t-end", "", "End of the trajectory (default: long after the pulse)"),
        ];
        o.extend(SOLVER_OPTS);
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let n0s = s.sweep_or("n0-sweep", "n0")?;
        check_sweep(&n0s, "n0-sweep")?;
        let t_end = s.opt_f64("t-end")?;
        let blocks = n0s
            .par_iter()
            .map(|&n0| {
                let p = base.with_n0(n0)?;
                let traj = solve(&p, s, t_end)?;
                let env = Envelope::new(&p);
                Ok(traj
                    .times
                    .iter()
                    .zip(traj.sigma.iter().zip(&traj.dsigma))
                    .map(|(&t, (&sg, &ds))| {
                        let amp = env.at(t);
                        vec![n0, t, amp, sg, ds, quasistationary_sigma(&p, amp)]
                    })
                    .collect::<Vec<_>>())
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut table = Table::new(vec!["n0", "t", "p", "sigma", "dsigma", "sigma_qs"]);
        blocks.into_iter().flatten().for_each(|r| table.push(r));
        Ok(Artifact::single(table))
    }
}

struct CoherentDensity;

impl ScenarioRunner for CoherentDensity {
    fn name(&self) -> &'static str {
        "coherent-density"
    }
    fn about(&self) -> &'static str {
        "Mean photon densities of a scattered coherent pulse"
    }
    fn schema(&self) -> &'static str {
        "Columns n0,x,rho_l,rho_r: right-moving and left-moving densities at time t, one block per swept n0. \
         The x range must lie within v (t - t0) of the atom."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![
            opt("n0-sweep", "", "N0 values (lo:hi:count or a comma list)"),
            opt("t", "20", "Evaluation time"),
        ];
        o.extend(grid_opts("x", "-15", "15", "301"));
        o.extend(SOLVER_OPTS);
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let n0s = s.sweep_or("n0-sweep", "n0")?;
        check_sweep(&n0s, "n0-sweep")?;
        let xg = grid(s, "x")?;
        let t = s.f64("t")?;
        let reach = xg.lo().abs().max(xg.hi().abs()) / base.v();
        let blocks = n0s
            .par_iter()
            .map(|&n0| {
                let p = base.with_n0(n0)?;
                let traj = solve(&p, s, Some(default_t_end(&p).max(t + reach)))?;
                xg.points()
                    .map(|x| {
                        Ok(vec![
                            n0,
                            x,
                            spatial_density_coherent(Side::Transmitted, x, t, &traj)?,
                            spatial_density_coherent(Side::Reflected, x, t, &traj)?,
                        ])
                    })
                    .collect::<CliResult<Vec<_>>>()
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut table = Table::new(vec!["n0", "x", "rho_l", "rho_r"]);
        blocks.into_iter().flatten().for_each(|r| table.push(r));
        Ok(Artifact::single(table))
    }
}

struct PhotonNumberSweep;

impl ScenarioRunner for PhotonNumberSweep {
    fn name(&self) -> &'static str {
        "photon-numbers"
    }
    fn about(&self) -> &'static str {
        "Mean transmitted and reflected photon numbers of a coherent pulse"
    }
    fn schema(&self) -> &'static str {
        "Columns n0,n_l,n_r,far_field: far_field is 1 when the atom had relaxed by the evaluation time."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![
            opt("n0-sweep", "", "N0 values (lo:hi:count or a comma list)"),
            opt("t", "", "Evaluation time (default: end of the trajectory)"),
        ];
        o.extend(SOLVER_OPTS);
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let n0s = s.sweep_or("n0-sweep", "n0")?;
        check_sweep(&n0s, "n0-sweep")?;
        let t = s.opt_f64("t")?;
        let rows = n0s
            .par_iter()
            .map(|&n0| {
                let p = base.with_n0(n0)?;
                let traj = solve(&p, s, t.map(|t| t.max(default_t_end(&p))))?;
                let n = photon_numbers(&traj, t.unwrap_or(traj.t_end()))?;
                Ok(vec![n0, n.n_l, n.n_r, if n.far_field { 1.0 } else { 0.0 }])
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut table = Table::new(vec!["n0", "n_l", "n_r", "far_field"]);
        rows.into_iter().for_each(|r| table.push(r));
        Ok(Artifact::single(table))
    }
}

struct Variances;

impl ScenarioRunner for Variances {
    fn name(&self) -> &'static str {
        "variances"
    }
    fn about(&self) -> &'static str {
        "Photon-number means and variances of a scattered coherent pulse (zero detuning)"
    }
    fn schema(&self) -> &'static str {
        "Columns n0,n_r,var_nr,n_l,var_nl, one row per swept n0."
    }
    fn options(&self) -> Vec<OptSpec> {
        vec![
            opt("n0-sweep", "", "N0 values (lo:hi:count or a comma list)"),
            opt("tau-samples", "800", "Two-time grid size"),
            opt("samples", "4001", "Trajectory samples"),
        ]
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let base = params(s)?;
        let n0s = s.sweep_or("n0-sweep", "n0")?;
        check_sweep(&n0s, "n0-sweep")?;
        let opts = StatisticsOptions {
            tau_samples: s.usize("tau-samples")?,
            trajectory_samples: s.usize("samples")?,
            ..StatisticsOptions::default()
        };
        let rows = n0s
            .par_iter()
            .map(|&n0| {
                let (_, _, st) = statistics_for(&base.with_n0(n0)?, opts)?;
                Ok(vec![n0, st.n_r, st.var_nr, st.n_l, st.var_nl])
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut table = Table::new(vec!["n0", "n_r", "var_nr", "n_l", "var_nl"]);
        rows.into_iter().for_each(|r| table.push(r));
        Ok(Artifact::single(table))
    }
}

struct OracleCheck;

impl ScenarioRunner for OracleCheck {
    fn name(&self) -> &'static str {
        "oracle-check"
    }
    fn about(&self) -> &'static str {
        "Compares the single-photon results with a discretized waveguide"
    }
    fn schema(&self) -> &'static str {
        "Columns observable,sup,l2,pass: relative errors of each observable and whether sup <= tolerance."
    }
    fn options(&self) -> Vec<OptSpec> {
        let mut o = vec![
            opt("t", "20", "Evaluation time"),
            opt("modes", "8192", "Lattice modes"),
            opt("cutoff", "32", "Momentum cutoff of the lattice, in units of 1/w"),
            opt("dt", "", "Integration step (default: derived from the lattice)"),
            opt("tolerance", "0.02", "Relative sup-error tolerance"),
            opt(
                "phase-count",
                "0",
                "Phase-space samples per axis (0 skips the distributions)",
            ),
        ];
        o.extend(grid_opts("q", "-3", "3", "241"));
        o.extend(grid_opts("x", "-25", "25", "501"));
        o
    }
    fn run(&self, s: &Settings) -> CliResult<Vec<Artifact>> {
        let p = params(s)?;
        let qg = grid(s, "q")?;
        let xg = grid(s, "x")?;
        let n = s.usize("phase-count")?;
        let phase = if n > 0 {
            Some(Grid2D::new(
                Grid1D::new(xg.lo(), xg.hi(), n)?,
                Grid1D::new(qg.lo(), qg.hi(), n)?,
            ))
        } else {
            None
        };
        let modes = s.usize("modes")?;
        if modes < oracle::MIN_MODES {
            return Err(CliError::input(format!("modes must be at least {}", oracle::MIN_MODES)));
        }
        let model = evolve_discrete(&p, modes, s.f64("cutoff")? / p.w(), s.f64("t")?, s.opt_f64("dt")?)?;
        let report = compare_report(&model, &qg, &xg, phase.as_ref(), s.f64("tolerance")?)?;
        let mut table = Table::new(vec!["observable", "sup", "l2", "pass"]);
        for e in &report.entries {
            table.push_cells(vec![
                Cell::Text(e.name.clone()),
                e.sup.into(),
                e.l2.into(),
                if e.pass { 1.0 } else { 0.0 }.into(),
            ]);
        }
        Ok(Artifact::single(table))
    }
}
