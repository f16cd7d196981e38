//! Composite Gauss–Legendre quadrature with local panel doubling.
//!
//! Integrands in this crate are smooth on the real axis but carry narrow
//! Lorentzian features from poles a distance `scale` off the axis. Panels are
//! graded geometrically around each feature so that the innermost panels are
//! no wider than the feature itself, then every panel is bisected until the
//! one-panel and two-half-panel estimates agree.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`, started at the Chebyshev guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let wgt = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = wgt;
            weights[n - 1 - i] = wgt;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F>(&self, f: &F, a: f64, b: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// The 16-point rule used by every panel.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Nodes per panel of [`gl16`].
pub const PANEL_NODES: f64 = 16.0;

/// A narrow integrand feature: a pole at `center + i*scale` (or its mirror).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub center: f64,
    pub scale: f64,
}

/// Panel boundaries on `[lo, hi]`: uniform panels of width at most
/// `base_width`, refined geometrically (widths `scale * 2^j`) around each
/// feature. Features with non-positive scale are ignored.
pub fn breakpoints(lo: f64, hi: f64, base_width: f64, features: &[Feature]) -> Vec<f64> {
    debug_assert!(hi > lo && base_width > 0.0);
    let panels = ((hi - lo) / base_width).ceil().max(1.0) as usize;
    let step = (hi - lo) / panels as f64;
    let mut pts: Vec<f64> = (0..=panels).map(|i| lo + i as f64 * step).collect();
    *pts.last_mut().unwrap() = hi;
    for f in features {
        if !(f.scale > 0.0) || !f.scale.is_finite() {
            continue;
        }
        let reach = 2.0 * step;
        if f.center < lo - reach || f.center > hi + reach {
            continue;
        }
        if f.center > lo && f.center < hi {
            pts.push(f.center);
        }
        let mut d = f.scale;
        while d < reach {
            for p in [f.center - d, f.center + d] {
                if p > lo && p < hi {
                    pts.push(p);
                }
            }
            d *= 2.0;
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_gap = 1e-13 * (hi - lo);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last <= min_gap => {}
            _ => out.push(p),
        }
    }
    if out.len() >= 2 && hi - out[out.len() - 2] <= min_gap {
        out.remove(out.len() - 2);
    }
    *out.last_mut().unwrap() = hi;
    out
}

/// Tolerances for [`integrate_panels`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Absolute tolerance for the whole integral; each panel gets a share
    /// proportional to its width.
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            max_depth: 40,
        }
    }
}

/// Integrates `f` over the panels defined by `breaks`, bisecting any panel
/// whose two-level estimates disagree by more than its tolerance share.
pub fn integrate_panels<F>(f: &F, breaks: &[f64], opts: AdaptiveOptions) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    assert!(breaks.len() >= 2, "need at least one panel");
    let total = breaks[breaks.len() - 1] - breaks[0];
    let rule = gl16();
    let mut acc = Complex64::new(0.0, 0.0);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let coarse = rule.integrate(f, a, b);
        acc += refine(f, rule, a, b, coarse, opts.abs_tol * (b - a) / total, 0, opts)?;
    }
    Ok(acc)
}

fn refine<F>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    coarse: Complex64,
    tol: f64,
    depth: u32,
    opts: AdaptiveOptions,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let fine = left + right;
    let discrepancy = (fine - coarse).norm();
    if discrepancy <= tol {
        return Ok(fine);
    }
    if depth >= opts.max_depth || !discrepancy.is_finite() {
        return Err(Error::Quadrature {
            lo: a,
            hi: b,
            estimate: fine.norm(),
            discrepancy,
            depth,
        });
    }
    let l = refine(f, rule, a, m, left, 0.5 * tol, depth + 1, opts)?;
    let r = refine(f, rule, m, b, right, 0.5 * tol, depth + 1, opts)?;
    Ok(l + r)
}

/// Real-valued convenience wrapper around [`integrate_panels`].
pub fn integrate_real<F>(f: &F, breaks: &[f64], opts: AdaptiveOptions) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let wrapped = |x: f64| Complex64::new(f(x), 0.0);
    Ok(integrate_panels(&wrapped, breaks, opts)?.re)
}

/// Composite trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            h * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}
