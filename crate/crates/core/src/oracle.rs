//! Brute-force reference: the waveguide discretized into a periodic lattice
//! of `N` forward (`l`) and `N` backward (`r`) modes, restricted to one
//! excitation. The state is the atom amplitude `c_e` plus one photon
//! amplitude per mode; the amplitude equations are linear and are stepped
//! with classical fourth-order Runge–Kutta.
//!
//! Mode `j` has momentum offset `q_j = -q_max + j dq`, `dq = 2 q_max / N`,
//! frequency `+v q_j` (forward) or `-v q_j` (backward) relative to the
//! carrier, and couples to the atom with strength `g sqrt(dq)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::params::SystemParams;
use crate::Side;

pub const MIN_MODES: usize = 1024;
pub const DEFAULT_MODES: usize = 8192;
/// Default lattice half-width, in units of `1/w`. The band edge shifts the
/// decay rate to [`cutoff_gamma`]; at `32/w` the shift stays near 1% for
/// `gamma w / v = 1`.
pub const DEFAULT_Q_MAX: f64 = 32.0;
/// Largest accepted `v q_max dt`.
pub const MAX_PHASE_STEP: f64 = 0.1;
/// Default `v q_max dt`.
pub const DEFAULT_PHASE_STEP: f64 = 0.05;
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub params: SystemParams,
    pub q: Vec<f64>,
    pub dq: f64,
    pub q_max: f64,
    pub t: f64,
    pub c_e: Complex64,
    pub c_l: Vec<Complex64>,
    pub c_r: Vec<Complex64>,
}

fn check_lattice(p: &SystemParams, n_modes: usize, q_max: f64) -> Result<()> {
    if n_modes < MIN_MODES {
        return Err(Error::domain(format!("need at least {MIN_MODES} modes, got {n_modes}")));
    }
    if !(q_max * p.w() >= 8.0) || !q_max.is_finite() {
        return Err(Error::domain(format!("q_max = {q_max} must be at least 8/w")));
    }
    Ok(())
}

impl DiscreteModel {
    fn empty(p: &SystemParams, n_modes: usize, q_max: f64) -> Result<Self> {
        check_lattice(p, n_modes, q_max)?;
        let dq = 2.0 * q_max / n_modes as f64;
        Ok(Self {
            params: *p,
            q: (0..n_modes).map(|j| -q_max + j as f64 * dq).collect(),
            dq,
            q_max,
            t: p.t0(),
            c_e: Complex64::new(0.0, 0.0),
            c_l: vec![Complex64::new(0.0, 0.0); n_modes],
            c_r: vec![Complex64::new(0.0, 0.0); n_modes],
        })
    }

    /// One forward-moving photon in the Gaussian wavepacket centered at `x0`.
    pub fn single_photon(p: &SystemParams, n_modes: usize, q_max: f64) -> Result<Self> {
        let mut m = Self::empty(p, n_modes, q_max)?;
        let (w, x0) = (p.w(), p.x0());
        let norm = w.sqrt() / PI.powf(0.25) * m.dq.sqrt();
        for (c, &q) in m.c_l.iter_mut().zip(&m.q) {
            *c = Complex64::from_polar(norm * (-0.5 * q * q * w * w).exp(), -q * x0);
        }
        let total = m.norm_sqr().sqrt();
        for c in &mut m.c_l {
            *c /= total;
        }
        Ok(m)
    }

    /// Excited atom in the photon vacuum.
    pub fn excited(p: &SystemParams, n_modes: usize, q_max: f64) -> Result<Self> {
        let mut m = Self::empty(p, n_modes, q_max)?;
        m.c_e = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        let field: f64 = self.c_l.iter().chain(&self.c_r).map(|c| c.norm_sqr()).sum();
        field + self.c_e.norm_sqr()
    }

    pub fn amplitudes(&self, side: Side) -> &[Complex64] {
        match side {
            Side::Transmitted => &self.c_l,
            Side::Reflected => &self.c_r,
        }
    }

    /// Largest step accepted by [`DiscreteModel::evolve`].
    pub fn max_dt(&self) -> f64 {
        MAX_PHASE_STEP / (self.params.v() * self.q_max)
    }

    pub fn default_dt(&self) -> f64 {
        DEFAULT_PHASE_STEP / (self.params.v() * self.q_max)
    }

    fn derivative(&self, state: &State, out: &mut State) {
        let p = &self.params;
        let v = p.v();
        let coupling = p.g() * self.dq.sqrt();
        let minus_i = Complex64::new(0.0, -1.0);
        let field_sum: Complex64 = state.l.iter().zip(&state.r).map(|(a, b)| a + b).sum();
        out.e = minus_i * (p.omega_a0() * state.e + coupling * field_sum);
        let drive = coupling * state.e;
        for (((ol, or), (&l, &r)), &q) in out
            .l
            .iter_mut()
            .zip(out.r.iter_mut())
            .zip(state.l.iter().zip(&state.r))
            .zip(&self.q)
        {
            *ol = minus_i * (v * q * l + drive);
            *or = minus_i * (-v * q * r + drive);
        }
    }

    /// Advances to `t_end` with fixed RK4 steps no longer than `dt`.
    pub fn evolve(&mut self, t_end: f64, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt > self.max_dt() * (1.0 + 1e-12) {
            return Err(Error::domain(format!("dt = {dt} must lie in (0, {}]", self.max_dt())));
        }
        if !(t_end >= self.t) {
            return Err(Error::domain(format!(
                "cannot evolve backwards from {} to {t_end}",
                self.t
            )));
        }
        let steps = ((t_end - self.t) / dt).ceil() as usize;
        if steps == 0 {
            return Ok(());
        }
        let h = (t_end - self.t) / steps as f64;
        let start_norm = self.norm_sqr();
        let n = self.len();
        let mut y = State {
            e: self.c_e,
            l: std::mem::take(&mut self.c_l),
            r: std::mem::take(&mut self.c_r),
        };
        let mut k = [State::zeros(n), State::zeros(n), State::zeros(n), State::zeros(n)];
        let mut tmp = State::zeros(n);
        for _ in 0..steps {
            self.derivative(&y, &mut k[0]);
            tmp.assign_axpy(&y, 0.5 * h, &k[0]);
            self.derivative(&tmp, &mut k[1]);
            tmp.assign_axpy(&y, 0.5 * h, &k[1]);
            self.derivative(&tmp, &mut k[2]);
            tmp.assign_axpy(&y, h, &k[2]);
            self.derivative(&tmp, &mut k[3]);
            y.rk4_update(h, &k);
        }
        self.c_e = y.e;
        self.c_l = y.l;
        self.c_r = y.r;
        self.t = t_end;
        let drift = (self.norm_sqr() - start_norm).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        Ok(())
    }

    /// Photon number per unit momentum on the lattice.
    pub fn lattice_spectrum(&self, side: Side) -> Vec<f64> {
        self.amplitudes(side).iter().map(|c| c.norm_sqr() / self.dq).collect()
    }

    fn check_q(&self, q: f64) -> Result<()> {
        let hi = self.q[self.len() - 1];
        if !(q >= self.q[0] && q <= hi) {
            return Err(Error::domain(format!(
                "q = {q} outside the lattice [{}, {hi}]",
                self.q[0]
            )));
        }
        Ok(())
    }

    /// Spectrum at arbitrary `q`, linearly interpolated between lattice modes.
    pub fn spectrum_at(&self, side: Side, q: f64) -> Result<f64> {
        self.check_q(q)?;
        let c = self.amplitudes(side);
        let u = (q - self.q[0]) / self.dq;
        let j = (u.floor() as usize).min(self.len() - 2);
        let s = u - j as f64;
        Ok(((1.0 - s) * c[j].norm_sqr() + s * c[j + 1].norm_sqr()) / self.dq)
    }

    /// Photon density `|psi(x)|^2` from the lattice Fourier sum.
    pub fn density_at(&self, side: Side, x: f64) -> f64 {
        let scale = (self.dq / (2.0 * PI)).sqrt();
        let psi: Complex64 = self
            .amplitudes(side)
            .iter()
            .zip(&self.q)
            .map(|(c, &q)| c * Complex64::from_polar(1.0, q * x))
            .sum();
        (psi * scale).norm_sqr()
    }

    /// Index range holding every amplitude above `1e-13` of the largest.
    fn support(&self, side: Side) -> (isize, isize) {
        let c = self.amplitudes(side);
        let peak = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let keep = |z: &Complex64| z.norm() > 1e-13 * peak;
        let lo = c.iter().position(keep).unwrap_or(0);
        let hi = c.iter().rposition(keep).unwrap_or(0);
        (lo as isize, hi as isize)
    }

    /// Distribution at half-lattice index `idx`: `q_j` for `idx = 2j`,
    /// `q_j + dq/2` for `idx = 2j + 1`. The lattice sum pairs modes placed
    /// symmetrically about that momentum.
    fn distribution_half_index(&self, side: Side, x: f64, idx: isize, support: (isize, isize)) -> f64 {
        let c = self.amplitudes(side);
        let (lo, hi) = support;
        // pairs (a, b) with a + b = idx and offset k = (a - b) dq
        let a_min = lo.max(idx - hi);
        let a_max = hi.min(idx - lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in a_min..=a_max {
            let b = idx - a;
            let phase = Complex64::from_polar(1.0, -((a - b) as f64) * self.dq * x);
            acc += phase * c[a as usize].conj() * c[b as usize];
        }
        acc.re / PI
    }

    fn distribution_interp(&self, side: Side, x: f64, q: f64, support: (isize, isize)) -> f64 {
        let h = 0.5 * self.dq;
        let u = (q - self.q[0]) / h;
        let last = 2 * (self.len() as isize - 1);
        let i = (u.floor().max(0.0) as isize).min(last - 1);
        let s = u - i as f64;
        let f0 = self.distribution_half_index(side, x, i, support);
        if s == 0.0 {
            return f0;
        }
        (1.0 - s) * f0 + s * self.distribution_half_index(side, x, i + 1, support)
    }

    /// Phase-space distribution at `(x, q)`, interpolated linearly in `q`
    /// between lattice and half-lattice points.
    pub fn distribution_at(&self, side: Side, x: f64, q: f64) -> Result<f64> {
        self.check_q(q)?;
        Ok(self.distribution_interp(side, x, q, self.support(side)))
    }
}

struct State {
    e: Complex64,
    l: Vec<Complex64>,
    r: Vec<Complex64>,
}

impl State {
    fn zeros(n: usize) -> Self {
        Self {
            e: Complex64::new(0.0, 0.0),
            l: vec![Complex64::new(0.0, 0.0); n],
            r: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn assign_axpy(&mut self, y: &State, a: f64, k: &State) {
        self.e = y.e + k.e * a;
        for (o, (yv, kv)) in self.l.iter_mut().zip(y.l.iter().zip(&k.l)) {
            *o = yv + kv * a;
        }
        for (o, (yv, kv)) in self.r.iter_mut().zip(y.r.iter().zip(&k.r)) {
            *o = yv + kv * a;
        }
    }

    fn rk4_update(&mut self, h: f64, k: &[State; 4]) {
        let w = h / 6.0;
        self.e += (k[0].e + k[1].e * 2.0 + k[2].e * 2.0 + k[3].e) * w;
        for i in 0..self.l.len() {
            self.l[i] += (k[0].l[i] + k[1].l[i] * 2.0 + k[2].l[i] * 2.0 + k[3].l[i]) * w;
            self.r[i] += (k[0].r[i] + k[1].r[i] * 2.0 + k[2].r[i] * 2.0 + k[3].r[i]) * w;
        }
    }
}

/// Evolves the single-photon wavepacket from `t0` to `t_end`.
pub fn evolve_discrete(
    p: &SystemParams,
    n_modes: usize,
    q_max: f64,
    t_end: f64,
    dt: Option<f64>,
) -> Result<DiscreteModel> {
    let mut m = DiscreteModel::single_photon(p, n_modes, q_max)?;
    let dt = dt.unwrap_or_else(|| m.default_dt());
    m.evolve(t_end, dt)?;
    Ok(m)
}

/// Excited-state population of an initially excited atom at each of `times`.
pub fn decay_series(p: &SystemParams, n_modes: usize, q_max: f64, times: &[f64], dt: Option<f64>) -> Result<Vec<f64>> {
    let mut m = DiscreteModel::excited(p, n_modes, q_max)?;
    let dt = dt.unwrap_or_else(|| m.default_dt());
    times
        .iter()
        .map(|&t| {
            m.evolve(t, dt)?;
            Ok(m.c_e.norm_sqr())
        })
        .collect()
}

/// Decay rate of the lattice model: the flat band `|q| < q_max` adds a real
/// self-energy of slope `gamma / (pi v q_max)`, which rescales the pole to
/// `gamma / (1 - gamma / (pi v q_max))`.
pub fn cutoff_gamma(p: &SystemParams, q_max: f64) -> f64 {
    p.gamma() / (1.0 - p.gamma() / (PI * p.v() * q_max))
}

/// Decay rate from a log-linear least-squares fit of a population series.
pub fn fit_decay_rate(times: &[f64], populations: &[f64]) -> Option<f64> {
    let logs: Vec<f64> = populations.iter().map(|p| p.ln()).collect();
    crate::coherent::fit_log_linear(times, &logs).map(|(slope, _)| -slope)
}

/// Observables sampled from an evolved model on caller grids.
#[derive(Debug, Clone)]
pub struct OracleObservables {
    pub q: Vec<f64>,
    pub n_l: Vec<f64>,
    pub n_r: Vec<f64>,
    pub x: Vec<f64>,
    pub rho_l: Vec<f64>,
    pub rho_r: Vec<f64>,
    /// `(transmitted, reflected)` distributions, x-major, when requested.
    pub distributions: Option<(Vec<f64>, Vec<f64>)>,
}

pub fn oracle_observables(
    model: &DiscreteModel,
    q_grid: &Grid1D,
    x_grid: &Grid1D,
    phase_space: Option<&Grid2D>,
) -> Result<OracleObservables> {
    let q = q_grid.to_vec();
    let x = x_grid.to_vec();
    let spectrum = |side| {
        q.iter()
            .map(|&qi| model.spectrum_at(side, qi))
            .collect::<Result<Vec<_>>>()
    };
    let n_l = spectrum(Side::Transmitted)?;
    let n_r = spectrum(Side::Reflected)?;
    let density = |side| x.par_iter().map(|&xi| model.density_at(side, xi)).collect::<Vec<_>>();
    let rho_l = density(Side::Transmitted);
    let rho_r = density(Side::Reflected);
    let distributions = match phase_space {
        None => None,
        Some(grid) => {
            model.check_q(grid.q.lo())?;
            model.check_q(grid.q.hi())?;
            let field = |side| -> Vec<f64> {
                let support = model.support(side);
                (0..grid.len())
                    .into_par_iter()
                    .map(|i| {
                        let (x, q) = grid.coords(i);
                        model.distribution_interp(side, x, q, support)
                    })
                    .collect()
            };
            Some((field(Side::Transmitted), field(Side::Reflected)))
        }
    };
    Ok(OracleObservables {
        q,
        n_l,
        n_r,
        x,
        rho_l,
        rho_r,
        distributions,
    })
}

/// Error of one observable, relative to the peak magnitude (sup norm) and
/// the norm (L2) of the analytic reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDiff {
    pub name: String,
    pub sup: f64,
    pub l2: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompareReport {
    pub entries: Vec<ObservableDiff>,
}

impl CompareReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn worst_sup(&self) -> f64 {
        self.entries.iter().map(|e| e.sup).fold(0.0, f64::max)
    }

    /// Adds one comparison; passes when the relative sup error is at most `tolerance`.
    pub fn add(&mut self, name: &str, analytic: &[f64], oracle: &[f64], tolerance: f64) -> Result<&ObservableDiff> {
        self.entries.push(compare(name, analytic, oracle, tolerance)?);
        Ok(self.entries.last().unwrap())
    }
}

pub fn compare(name: &str, analytic: &[f64], oracle: &[f64], tolerance: f64) -> Result<ObservableDiff> {
    if analytic.len() != oracle.len() || analytic.is_empty() {
        return Err(Error::Shape(format!(
            "{name}: {} analytic vs {} oracle samples",
            analytic.len(),
            oracle.len()
        )));
    }
    let peak = analytic.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let norm = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut sup = 0.0f64;
    let mut l2 = 0.0;
    for (a, o) in analytic.iter().zip(oracle) {
        let d = (a - o).abs();
        sup = sup.max(d);
        l2 += d * d;
    }
    let l2 = l2.sqrt();
    let (sup, l2) = if peak > 0.0 { (sup / peak, l2 / norm) } else { (sup, l2) };
    Ok(ObservableDiff {
        name: name.to_string(),
        sup,
        l2,
        pass: sup <= tolerance,
    })
}

/// Convenience bundle: analytic-versus-oracle comparison of spectra,
/// densities and (optionally) phase-space distributions.
pub fn compare_report(
    model: &DiscreteModel,
    q_grid: &Grid1D,
    x_grid: &Grid1D,
    phase_space: Option<&Grid2D>,
    tolerance: f64,
) -> Result<CompareReport> {
    let p = &model.params;
    let t = model.t;
    let obs = oracle_observables(model, q_grid, x_grid, phase_space)?;
    let mut report = CompareReport::default();
    let spec = |side| {
        obs.q
            .iter()
            .map(|&q| crate::fock::spectral_density(side, q, p))
            .collect::<Vec<_>>()
    };
    report.add("n_l", &spec(Side::Transmitted), &obs.n_l, tolerance)?;
    report.add("n_r", &spec(Side::Reflected), &obs.n_r, tolerance)?;
    let dens = |side| {
        obs.x
            .par_iter()
            .map(|&x| crate::fock::spatial_density(side, x, t, p))
            .collect::<Result<Vec<_>>>()
    };
    // each channel is compared where it physically lives
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..obs.x.len()).partition(|&i| obs.x[i] > 0.0);
    let pick = |v: &[f64], idx: &[usize]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    if !pos.is_empty() {
        report.add(
            "rho_l",
            &pick(&dens(Side::Transmitted)?, &pos),
            &pick(&obs.rho_l, &pos),
            tolerance,
        )?;
    }
    if !neg.is_empty() {
        report.add(
            "rho_r",
            &pick(&dens(Side::Reflected)?, &neg),
            &pick(&obs.rho_r, &neg),
            tolerance,
        )?;
    }
    if let (Some(grid), Some((f_l, f_r))) = (phase_space, &obs.distributions) {
        use crate::fock::{DistributionField, FieldKind};
        let a_l = DistributionField::compute(FieldKind::Transmitted, *grid, t, p)?;
        let a_r = DistributionField::compute(FieldKind::Reflected, *grid, t, p)?;
        let cells = |x_positive: bool| -> Vec<usize> {
            (0..grid.len())
                .filter(|&i| (grid.coords(i).0 > 0.0) == x_positive)
                .collect()
        };
        let (pos, neg) = (cells(true), cells(false));
        if !pos.is_empty() {
            report.add("f_l", &pick(&a_l.values, &pos), &pick(f_l, &pos), tolerance)?;
        }
        if !neg.is_empty() {
            report.add("f_r", &pick(&a_r.values, &neg), &pick(f_r, &neg), tolerance)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_pass_with_zero_error() {
        let d = compare("x", &[1.0, -2.0, 3.0], &[1.0, -2.0, 3.0], 0.0).unwrap();
        assert_eq!((d.sup, d.l2, d.pass), (0.0, 0.0, true));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(matches!(compare("x", &[1.0], &[1.0, 2.0], 0.1), Err(Error::Shape(_))));
    }

    #[test]
    fn lattice_preconditions() {
        let p = SystemParams::new(1.0, 0.0, 1.0, -10.0, 0.0).unwrap();
        assert!(DiscreteModel::single_photon(&p, 512, 16.0).is_err());
        assert!(DiscreteModel::single_photon(&p, 1024, 4.0).is_err());
        let mut m = DiscreteModel::single_photon(&p, 1024, 8.0).unwrap();
        assert!((m.norm_sqr() - 1.0).abs() < 1e-14);
        assert!(m.evolve(1.0, 0.1).is_err());
    }

    #[test]
    fn initial_distribution_matches_gaussian() {
        let p = SystemParams::new(1.0, 0.0, 1.0, -10.0, 0.0).unwrap();
        let m = DiscreteModel::single_photon(&p, 1024, 8.0).unwrap();
        for &(x, q) in &[(-10.0, 0.0), (-9.3, 0.41), (-11.0, -0.7)] {
            let exact = crate::fock::f_initial(x, q, &p);
            let got = m.distribution_at(Side::Transmitted, x, q).unwrap();
            assert!((got - exact).abs() < 0.01 / PI, "{x} {q}: {got} vs {exact}");
        }
        let rho = m.density_at(Side::Transmitted, -10.0);
        assert!((rho - 1.0 / PI.sqrt()).abs() < 1e-10);
    }
}
