//! Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `times[0]` with `y(times[0]) = y0`,
/// returning the state at every entry of `times` (which must increase).
/// Steps are shortened so that each output time is hit exactly.
pub fn integrate<const N: usize, F>(f: F, y0: [f64; N], times: &[f64], tol: OdeTolerances) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }
    let mut t = times[0];
    let mut y = y0;
    out.push(y);
    let mut k0 = f(t, &y);
    let span = times[times.len() - 1] - t;
    let mut h = initial_step(span, times);
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::StepBudget {
                    t,
                    max_steps: tol.max_steps,
                });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t, h: step });
            }

            let mut k = [[0.0; N]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += step * a * kj[i];
                        }
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            // the 7th stage is evaluated at the fifth-order solution
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let b = A[6][j];
                for i in 0..N {
                    y_new[i] += step * b * kj[i];
                }
            }
            let mut err = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                let r = step * e / scale;
                err += r * r;
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepUnderflow { t, h: step });
            }

            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k0 = k[6];
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // do not let a short landing step shrink the working step
                h = if last { h.max(step * grow) } else { step * grow };
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Fixed-step variant of [`integrate`]: `substeps` equal fifth-order steps
/// per output interval, without error control.
pub fn integrate_fixed<const N: usize, F>(f: F, y0: [f64; N], times: &[f64], substeps: usize) -> Vec<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return out;
    }
    let mut y = y0;
    out.push(y);
    for pair in times.windows(2) {
        let h = (pair[1] - pair[0]) / substeps as f64;
        for n in 0..substeps {
            let t = pair[0] + n as f64 * h;
            let mut k = [[0.0; N]; 6];
            for s in 0..6 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    for i in 0..N {
                        ys[i] += h * A[s][j] * kj[i];
                    }
                }
                k[s] = f(t + C[s] * h, &ys);
            }
            for (j, kj) in k.iter().enumerate() {
                for i in 0..N {
                    y[i] += h * A[6][j] * kj[i];
                }
            }
        }
        out.push(y);
    }
    out
}

fn initial_step(span: f64, times: &[f64]) -> f64 {
    let first_gap = if times.len() > 1 { times[1] - times[0] } else { span };
    (span * 1e-3).min(first_gap).max(1e-10)
}
