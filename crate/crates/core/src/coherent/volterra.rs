//! Integro-differential solve for `Sigma` at arbitrary detuning:
//!
//! `Sigma' = -G Sigma - 4 g^2 p(t) Re J(t)`,
//! `J(t) = \int_{t0}^{t} exp[(-G/2 + i w)(t - t')] p(t') (Sigma(t') - 1) dt'`.
//!
//! The history integral is a trapezoidal sum. Because the kernel is an
//! exponential, the sum obeys a one-step recursion and the whole solve is
//! O(n). The trapezoidal corrector is linear in the new value, so it is
//! solved exactly instead of iterated.

use num_complex::Complex64;

use super::dynamics::Dynamics;

/// Values and slopes of `Sigma` at every `stride`-th step of size `h`
/// starting at `s0`, for `outputs` output points.
pub(crate) fn march(dyn_: &Dynamics, s0: f64, h: f64, stride: usize, outputs: usize) -> (Vec<f64>, Vec<f64>) {
    let lambda = Complex64::new(-0.5 * dyn_.gamma, dyn_.omega);
    let decay = (lambda * h).exp();
    let c4 = 4.0 * dyn_.g_sq;
    let half = 0.5 * h;

    let mut sigma = 0.0;
    let mut j = Complex64::new(0.0, 0.0);
    let mut p_n = dyn_.envelope(s0);
    let mut f_n = -dyn_.gamma * sigma - c4 * p_n * j.re;

    let mut out_s = Vec::with_capacity(outputs);
    let mut out_d = Vec::with_capacity(outputs);
    out_s.push(sigma);
    out_d.push(f_n);
    let steps = stride * (outputs - 1);
    for n in 0..steps {
        let s1 = s0 + (n + 1) as f64 * h;
        let p1 = dyn_.envelope(s1);
        let carried = decay * (j + half * p_n * (sigma - 1.0));
        let c = c4 * p1;
        let k = carried.re;
        let rhs = sigma + half * f_n + half * (-c * k + c * half * p1);
        let next = rhs / (1.0 + half * dyn_.gamma + half * half * c * p1);
        j = carried + half * p1 * (next - 1.0);
        sigma = next;
        p_n = p1;
        f_n = -dyn_.gamma * sigma - c * j.re;
        if (n + 1) % stride == 0 {
            out_s.push(sigma);
            out_d.push(f_n);
        }
    }
    (out_s, out_d)
}
