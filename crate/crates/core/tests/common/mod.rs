//! Reference integrators that share no code with the library quadrature.
#![allow(dead_code)]

/// Romberg integration of a smooth function on `[a, b]`: trapezoid sums with
/// repeated Richardson extrapolation, stopped when two diagonal entries agree
/// to `tol`.
pub fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_levels: usize) -> f64 {
    let mut prev: Vec<f64> = vec![0.5 * (b - a) * (f(a) + f(b))];
    let mut n = 1usize;
    for level in 1..max_levels {
        let h = (b - a) / (2 * n) as f64;
        let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * prev[0] + h * mid];
        let mut factor = 1.0;
        for k in 1..=level {
            factor *= 4.0;
            let r = row[k - 1] + (row[k - 1] - prev[k - 1]) / (factor - 1.0);
            row.push(r);
        }
        if level > 4 && (row[level] - prev[level - 1]).abs() < tol {
            return row[level];
        }
        prev = row;
        n *= 2;
    }
    panic!("romberg did not converge");
}

/// Nodes and weights of `n`-point Gauss–Hermite quadrature (weight `e^{-x^2}`).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pi4 = std::f64::consts::PI.powf(-0.25);
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // orthonormal Hermite recurrence
            let mut p1 = pi4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j + 1) as f64).sqrt() * p2 - (j as f64 / (j + 1) as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}
