//! Single-photon Fock-state observables.
//!
//! The incident photon is a Gaussian wavepacket of width `w` centered at
//! `x0`. After scattering, the transmitted (`l`) and reflected (`r`)
//! wavefunctions are the incident one multiplied by the single-photon
//! transmission and reflection amplitudes; every quantity here is a closed
//! form or a one-dimensional quadrature of those amplitudes. All integrals are
//! evaluated in reduced variables (`x/w`, `q w`, `t v/w`), which makes the
//! results invariant under a joint rescaling of `w`, `v` and the rates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::params::{Reduced, SystemParams};
use crate::quadrature::{breakpoints, integrate_panels, integrate_real, AdaptiveOptions, Feature, PANEL_NODES};
use crate::Side;

/// Gaussian truncation of the `k` integrals, in units of `1/w`.
const K_CUTOFF: f64 = 12.0;
/// Gaussian truncation of the `Phi` integral, in units of `1/w`.
const PHI_CUTOFF: f64 = 10.0;
/// Imaginary residue tolerated before a distribution sample is rejected.
pub const IMAG_TOLERANCE: f64 = 1e-9;
/// Magnitude below which a distribution sample counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-9;

fn sqrt_pi() -> f64 {
    PI.sqrt()
}

/// Reduced displacement of a transmitted sample from the freely moving pulse center.
fn transmitted_offset(x: f64, t: f64, p: &SystemParams) -> f64 {
    (x - p.x0() - p.v() * (t - p.t0())) / p.w()
}

/// Reduced mirror coordinate `X^r / w` of a reflected sample.
fn reflected_offset(x: f64, t: f64, p: &SystemParams) -> f64 {
    (x + p.x0() + p.v() * (t - p.t0())) / p.w()
}

/// Average phase-space distribution of the incident pulse at `t0`.
pub fn f_initial(x: f64, q: f64, p: &SystemParams) -> f64 {
    let xr = (x - p.x0()) / p.w();
    let qr = q * p.w();
    (-(xr * xr) - qr * qr).exp() / PI
}

/// Distribution of the pulse translated freely to time `t`.
pub fn f_free(x: f64, q: f64, t: f64, p: &SystemParams) -> f64 {
    let xr = transmitted_offset(x, t, p);
    let qr = q * p.w();
    (-(xr * xr) - qr * qr).exp() / PI
}

fn k_panels(offset: f64, poles: [f64; 2], scale: f64) -> Vec<f64> {
    // node spacing at most pi / (4 |X|) resolves the e^{-ikX} oscillation
    let spacing = (PI / (4.0 * offset.abs().max(1e-300))).min(0.25);
    let features = [
        Feature {
            center: poles[0],
            scale,
        },
        Feature {
            center: poles[1],
            scale,
        },
    ];
    breakpoints(-K_CUTOFF, K_CUTOFF, spacing * PANEL_NODES, &features)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOLERANCE {
        return Err(Error::NonReal { real: z.re, imag: z.im });
    }
    Ok(z.re)
}

const K_OPTS: AdaptiveOptions = AdaptiveOptions {
    abs_tol: 1e-10,
    max_depth: 40,
};

/// Distribution of the transmitted photon at `(x, q)`, time `t`.
///
/// Evaluated as the free distribution minus the scattering correction, so a
/// decoupled atom returns [`f_free`] exactly.
pub fn f_transmitted(x: f64, q: f64, t: f64, p: &SystemParams) -> Result<f64> {
    let r = p.reduced();
    let free = f_free(x, q, t, p);
    if r.gamma == 0.0 {
        return Ok(free);
    }
    let big_x = transmitted_offset(x, t, p);
    let qr = q * p.w();
    let a = r.omega - qr;
    let half_g = 0.5 * r.gamma;
    let integrand = |u: f64| {
        let s = Complex64::new(u, -r.gamma);
        let denom = a * a - s * s * 0.25;
        let num = Complex64::new(half_g, u) * half_g;
        Complex64::from_polar((-0.25 * u * u).exp(), -u * big_x) * num / denom
    };
    let breaks = k_panels(big_x, [-2.0 * a, 2.0 * a], r.gamma);
    let integral = integrate_panels(&integrand, &breaks, K_OPTS)?;
    let correction = integral * ((-qr * qr).exp() / (2.0 * PI * sqrt_pi()));
    Ok(free - real_part(correction)?)
}

/// Distribution of the reflected photon at `(x, q)`, time `t`. May be negative.
pub fn f_reflected(x: f64, q: f64, t: f64, p: &SystemParams) -> Result<f64> {
    let r = p.reduced();
    if r.gamma == 0.0 {
        return Ok(0.0);
    }
    let big_x = reflected_offset(x, t, p);
    let qr = q * p.w();
    let b = r.omega + qr;
    let integrand = |u: f64| {
        let s = Complex64::new(u, r.gamma);
        let denom = b * b - s * s * 0.25;
        Complex64::from_polar((-0.25 * u * u).exp(), -u * big_x) / denom
    };
    let breaks = k_panels(big_x, [-2.0 * b, 2.0 * b], r.gamma);
    let integral = integrate_panels(&integrand, &breaks, K_OPTS)?;
    let pref = r.gamma * r.gamma * (-qr * qr).exp() / (8.0 * PI * sqrt_pi());
    real_part(integral * pref)
}

/// `Phi(x) = \int dq exp(-iqx - q^2 w^2 / 2) / (omega_a0 - q v + i gamma/2)`.
///
/// Requires `gamma > 0`; otherwise the pole sits on the integration contour.
pub fn phi(x: f64, p: &SystemParams) -> Result<Complex64> {
    let r = p.reduced();
    if !(r.gamma > 0.0) {
        return Err(Error::domain("phi needs gamma > 0 (pole on the real axis)"));
    }
    Ok(phi_reduced(x / p.w(), &r)? / p.v())
}

fn phi_reduced(x: f64, r: &Reduced) -> Result<Complex64> {
    let pole = Complex64::new(r.omega, 0.5 * r.gamma);
    let integrand = |q: f64| Complex64::from_polar((-0.5 * q * q).exp(), -q * x) / (pole - q);
    let nodes_per_unit = x.abs().max(2.0);
    let breaks = breakpoints(
        -PHI_CUTOFF,
        PHI_CUTOFF,
        PANEL_NODES / nodes_per_unit,
        &[Feature {
            center: r.omega,
            scale: 0.5 * r.gamma,
        }],
    );
    integrate_panels(
        &integrand,
        &breaks,
        AdaptiveOptions {
            abs_tol: 1e-11,
            max_depth: 40,
        },
    )
}

/// Tabulated `Phi` on a uniform grid.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl PhiTable {
    pub fn build(grid: &Grid1D, p: &SystemParams) -> Result<Self> {
        let x = grid.to_vec();
        let values = x.par_iter().map(|&xi| phi(xi, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { x, values })
    }

    /// Largest `|Phi|` at the two ends of the table.
    pub fn edge_magnitude(&self) -> f64 {
        let first = self.values.first().map_or(0.0, |z| z.norm());
        let last = self.values.last().map_or(0.0, |z| z.norm());
        first.max(last)
    }
}

/// Average photon number per unit momentum after scattering.
pub fn spectral_density(side: Side, q: f64, p: &SystemParams) -> f64 {
    let r = p.reduced();
    let qr = q * p.w();
    let free = p.w() / sqrt_pi() * (-qr * qr).exp();
    let quarter_g2 = 0.25 * r.gamma * r.gamma;
    match side {
        Side::Transmitted => {
            if r.gamma == 0.0 {
                return free;
            }
            let a = r.omega - qr;
            free * (a * a / (a * a + quarter_g2))
        }
        Side::Reflected => {
            if r.gamma == 0.0 {
                return 0.0;
            }
            let b = r.omega + qr;
            free * (quarter_g2 / (b * b + quarter_g2))
        }
    }
}

/// Average photon density in coordinate space after scattering.
pub fn spatial_density(side: Side, x: f64, t: f64, p: &SystemParams) -> Result<f64> {
    let r = p.reduced();
    match side {
        Side::Transmitted => {
            let big_x = transmitted_offset(x, t, p);
            let gauss = (-0.5 * big_x * big_x).exp();
            let amp = if r.gamma == 0.0 {
                Complex64::new(gauss, 0.0)
            } else {
                let c = r.gamma / (2.0 * std::f64::consts::SQRT_2 * sqrt_pi());
                Complex64::new(gauss, 0.0) - Complex64::i() * c * phi_reduced(big_x, &r)?
            };
            Ok(amp.norm_sqr() / (sqrt_pi() * p.w()))
        }
        Side::Reflected => {
            if r.gamma == 0.0 {
                return Ok(0.0);
            }
            let big_x = reflected_offset(x, t, p);
            let val = phi_reduced(-big_x, &r)?.norm_sqr();
            Ok(r.gamma * r.gamma * val / (8.0 * PI * sqrt_pi() * p.w()))
        }
    }
}

/// Long-pulse (`gamma w / 2v >> 1`) limit of the transmitted density.
pub fn spatial_density_long_pulse(x: f64, t: f64, p: &SystemParams) -> Result<f64> {
    let r = p.reduced();
    if !(r.gamma > 0.0) {
        return Err(Error::domain("long-pulse limit needs gamma > 0"));
    }
    let big_x = transmitted_offset(x, t, p);
    let factor = Complex64::new(1.0, 0.0) - Complex64::new(1.0, -2.0 * r.omega / r.gamma).inv();
    Ok((-big_x * big_x).exp() * factor.norm_sqr() / (sqrt_pi() * p.w()))
}

/// Total photon number on one side: the spatial density integrated over the
/// whole line (the scattered fields are written in their asymptotic form, so
/// the result does not depend on `t`).
pub fn photon_number(side: Side, p: &SystemParams) -> Result<f64> {
    let r = p.reduced();
    if r.gamma == 0.0 {
        return Ok(match side {
            Side::Transmitted => 1.0,
            Side::Reflected => 0.0,
        });
    }
    // the scattered part trails the pulse with an exp(-gamma |X|) tail
    let tail = 12.0 + 40.0 / r.gamma;
    let mut base = (1.0 / r.gamma).clamp(1.0, 8.0);
    if r.omega != 0.0 {
        base = base.min((2.0 / r.omega.abs()).max(0.25));
    }
    let opts = AdaptiveOptions {
        abs_tol: 1e-10,
        max_depth: 40,
    };
    let centre = [Feature {
        center: 0.0,
        scale: 1.0,
    }];
    match side {
        Side::Transmitted => {
            let f = |big_x: f64| {
                let gauss = (-0.5 * big_x * big_x).exp();
                let c = r.gamma / (2.0 * std::f64::consts::SQRT_2 * sqrt_pi());
                let phi = phi_reduced(big_x, &r).unwrap_or(Complex64::new(f64::NAN, 0.0));
                (Complex64::new(gauss, 0.0) - Complex64::i() * c * phi).norm_sqr() / sqrt_pi()
            };
            let breaks = breakpoints(-tail, 12.0, base, &centre);
            integrate_real(&f, &breaks, opts)
        }
        Side::Reflected => {
            let f = |xr: f64| {
                let phi = phi_reduced(-xr, &r).unwrap_or(Complex64::new(f64::NAN, 0.0));
                r.gamma * r.gamma * phi.norm_sqr() / (8.0 * PI * sqrt_pi())
            };
            let breaks = breakpoints(-12.0, tail, base, &centre);
            integrate_real(&f, &breaks, opts)
        }
    }
}

/// Which distribution a [`DistributionField`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Incident,
    Transmitted,
    Reflected,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Incident => "incident",
            FieldKind::Transmitted => "transmitted",
            FieldKind::Reflected => "reflected",
        }
    }
}

/// Sampled phase-space distribution on a [`Grid2D`] (x-major). Values may be negative.
#[derive(Debug, Clone)]
pub struct DistributionField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub kind: FieldKind,
    pub t: f64,
}

impl DistributionField {
    /// Evaluates the distribution on every cell. Cells are independent and
    /// computed in parallel; the result is ordered by cell index.
    pub fn compute(kind: FieldKind, grid: Grid2D, t: f64, p: &SystemParams) -> Result<Self> {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (x, q) = grid.coords(i);
                match kind {
                    FieldKind::Incident => Ok(f_initial(x, q, p)),
                    FieldKind::Transmitted => f_transmitted(x, q, t, p),
                    FieldKind::Reflected => f_reflected(x, q, t, p),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, kind, t })
    }

    pub fn from_values(kind: FieldKind, grid: Grid2D, t: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.x.len(),
                grid.q.len()
            )));
        }
        Ok(Self { grid, values, kind, t })
    }

    pub fn at(&self, ix: usize, iq: usize) -> f64 {
        self.values[self.grid.index(ix, iq)]
    }

    /// Trapezoidal integral over x for every q sample.
    pub fn integrate_over_x(&self) -> Vec<f64> {
        let (nx, nq) = (self.grid.x.len(), self.grid.q.len());
        let hx = self.grid.x.spacing();
        (0..nq)
            .map(|iq| {
                let col: Vec<f64> = (0..nx).map(|ix| self.at(ix, iq)).collect();
                crate::quadrature::trapezoid(&col, hx)
            })
            .collect()
    }

    /// Trapezoidal integral over q for every x sample.
    pub fn integrate_over_q(&self) -> Vec<f64> {
        let nq = self.grid.q.len();
        let hq = self.grid.q.spacing();
        self.values
            .chunks(nq)
            .map(|row| crate::quadrature::trapezoid(row, hq))
            .collect()
    }

    pub fn total(&self) -> f64 {
        crate::quadrature::trapezoid(&self.integrate_over_q(), self.grid.x.spacing())
    }
}

/// Summary of the negative region of a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub min_value: f64,
    /// `(x index, q index)` of the minimum; ties go to the lowest indices.
    pub argmin: (usize, usize),
    pub argmin_coords: (f64, f64),
    /// Cells below `-ZERO_THRESHOLD`.
    pub negative_cells: usize,
}

/// Deterministic scan for negative cells. Values within [`ZERO_THRESHOLD`] of
/// zero count as zero.
pub fn negativity_scan(field: &DistributionField) -> Result<NegativityReport> {
    if field.values.is_empty() {
        return Err(Error::domain("negativity scan of an empty field"));
    }
    let mut best = 0usize;
    let mut negative = 0usize;
    for (i, &v) in field.values.iter().enumerate() {
        if v < field.values[best] {
            best = i;
        }
        if v < -ZERO_THRESHOLD {
            negative += 1;
        }
    }
    let nq = field.grid.q.len();
    Ok(NegativityReport {
        min_value: field.values[best],
        argmin: (best / nq, best % nq),
        argmin_coords: field.grid.coords(best),
        negative_cells: negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_params() -> SystemParams {
        SystemParams::new(1.0, 0.0, 1.0, -10.0, 0.0).unwrap()
    }

    #[test]
    fn initial_peak_and_width() {
        let p = base_params();
        assert!((f_initial(-10.0, 0.0, &p) - 1.0 / PI).abs() < 1e-15);
        assert!((f_initial(-9.0, 0.0, &p) - (-1.0f64).exp() / PI).abs() < 1e-15);
        assert_eq!(f_free(10.0, 0.3, 20.0, &p), f_initial(-10.0, 0.3, &p));
    }

    #[test]
    fn transmission_vanishes_on_resonance() {
        let p = base_params().with_omega_a0(0.7).unwrap();
        assert_eq!(spectral_density(Side::Transmitted, 0.7, &p), 0.0);
    }

    #[test]
    fn transmitted_spectrum_reference_value() {
        // (1/sqrt(pi)) e^{-1/4} [1 - 0.25 / (0.25 + 0.25)]
        let expected = (-0.25f64).exp() / PI.sqrt() * 0.5;
        let got = spectral_density(Side::Transmitted, 0.5, &base_params());
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.2197).abs() < 5e-5);
    }

    #[test]
    fn decoupled_atom_is_transparent() {
        let p = base_params().with_gamma(0.0).unwrap();
        for &(x, q) in &[(10.0, 0.0), (9.3, -1.2), (-4.0, 2.0)] {
            assert_eq!(f_transmitted(x, q, 20.0, &p).unwrap(), f_free(x, q, 20.0, &p));
            assert_eq!(f_reflected(x, q, 20.0, &p).unwrap(), 0.0);
        }
        assert_eq!(spectral_density(Side::Reflected, 0.1, &p), 0.0);
        assert!(phi(0.0, &p).is_err());
    }

    #[test]
    fn phi_is_imaginary_at_zero_detuning() {
        let p = base_params();
        for x in [-7.0, -1.5, 0.0, 0.4, 3.0, 12.0] {
            let z = phi(x, &p).unwrap();
            assert!(z.re.abs() < 1e-9, "x = {x}: {z}");
        }
    }

    #[test]
    fn phi_decays_ahead_of_the_pole() {
        let p = base_params();
        assert!(phi(30.0, &p).unwrap().norm() < 1e-8);
        // behind the pulse Phi carries the exp(gamma x / 2) emission tail
        let tail = phi(-30.0, &p).unwrap().norm();
        let estimate = 2.0 * PI * (-15.0f64 + 0.125).exp();
        assert!((tail / estimate - 1.0).abs() < 1e-6, "{tail} vs {estimate}");
    }

    #[test]
    fn negativity_scan_tie_breaks_low_index() {
        let grid = Grid2D::new(Grid1D::new(0.0, 1.0, 2).unwrap(), Grid1D::new(0.0, 1.0, 2).unwrap());
        let field =
            DistributionField::from_values(FieldKind::Reflected, grid, 0.0, vec![0.1, -0.5, -0.5, -5e-10]).unwrap();
        let rep = negativity_scan(&field).unwrap();
        assert_eq!(rep.argmin, (0, 1));
        assert_eq!(rep.min_value, -0.5);
        assert_eq!(rep.negative_cells, 2);
    }

    #[test]
    fn field_shape_is_checked() {
        let grid = Grid2D::new(Grid1D::new(0.0, 1.0, 2).unwrap(), Grid1D::new(0.0, 1.0, 3).unwrap());
        assert!(DistributionField::from_values(FieldKind::Incident, grid, 0.0, vec![0.0; 5]).is_err());
    }

    #[test]
    fn empty_field_is_rejected() {
        let grid = Grid2D::new(Grid1D::new(0.0, 1.0, 2).unwrap(), Grid1D::new(0.0, 1.0, 2).unwrap());
        let field = DistributionField {
            grid,
            values: vec![],
            kind: FieldKind::Incident,
            t: 0.0,
        };
        assert!(matches!(negativity_scan(&field), Err(Error::Domain(_))));
    }

    fn spectral_number(side: Side, p: &SystemParams) -> f64 {
        let f = |q: f64| spectral_density(side, q, p);
        let breaks = breakpoints(-10.0, 10.0, 1.0, &[]);
        integrate_real(&f, &breaks, AdaptiveOptions::default()).unwrap()
    }

    #[test]
    fn spatial_and_spectral_numbers_agree() {
        for (gamma, omega) in [(1.0, 0.0), (0.3, 0.5), (4.0, -1.0)] {
            let p = base_params().with_gamma(gamma).unwrap().with_omega_a0(omega).unwrap();
            let nl = photon_number(Side::Transmitted, &p).unwrap();
            let nr = photon_number(Side::Reflected, &p).unwrap();
            assert!((nl + nr - 1.0).abs() < 1e-8, "{gamma} {omega}: {}", nl + nr);
            assert!((nr - spectral_number(Side::Reflected, &p)).abs() < 1e-8);
        }
    }

    #[test]
    fn distribution_marginal_matches_spectrum() {
        let p = base_params();
        let t = 20.0;
        for q in [-0.8, 0.0, 0.35] {
            for side in [Side::Transmitted, Side::Reflected] {
                let f = |x: f64| match side {
                    Side::Transmitted => f_transmitted(x, q, t, &p).unwrap(),
                    Side::Reflected => f_reflected(x, q, t, &p).unwrap(),
                };
                let centre = if side == Side::Transmitted { 10.0 } else { -10.0 };
                let breaks = breakpoints(centre - 60.0, centre + 60.0, 1.0, &[]);
                let marginal = integrate_real(
                    &f,
                    &breaks,
                    AdaptiveOptions {
                        abs_tol: 1e-9,
                        max_depth: 30,
                    },
                )
                .unwrap();
                let expected = spectral_density(side, q, &p);
                assert!(
                    (marginal - expected).abs() < 1e-7,
                    "{side:?} q={q}: {marginal} vs {expected}"
                );
            }
        }
    }
}
