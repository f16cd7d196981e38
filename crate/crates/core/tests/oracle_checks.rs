use std::f64::consts::PI;

use wqed_core::fock;
use wqed_core::oracle::*;
use wqed_core::{Grid1D, Side, SystemParams};

fn base_params() -> SystemParams {
    SystemParams::new(1.0, 0.0, 1.0, -10.0, 0.0).unwrap()
}

#[test]
fn free_packet_translates_rigidly() {
    let p = base_params().with_gamma(0.0).unwrap();
    let start = DiscreteModel::single_photon(&p, 1024, 8.0).unwrap();
    let m = evolve_discrete(&p, 1024, 8.0, 6.0, None).unwrap();
    for (a, b) in start.c_l.iter().zip(&m.c_l) {
        assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
    }
    for x in [-6.0, -4.0, -3.1, -1.0] {
        let moved = m.density_at(Side::Transmitted, x);
        let before = start.density_at(Side::Transmitted, x - 6.0);
        assert!((moved - before).abs() < 1e-8);
    }
    assert!((m.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn packet_before_arrival_matches_free_distribution() {
    let p = base_params();
    let m = evolve_discrete(&p, 2048, 16.0, 4.0, None).unwrap();
    let peak = 1.0 / PI;
    for &(x, q) in &[(-6.0, 0.0), (-5.5, 0.6), (-7.2, -0.9), (-6.0, 1.3)] {
        let exact = fock::f_free(x, q, 4.0, &p);
        let got = m.distribution_at(Side::Transmitted, x, q).unwrap();
        assert!((got - exact).abs() < 0.01 * peak, "{x} {q}: {got} vs {exact}");
    }
}

#[test]
fn distribution_integrates_to_spectrum() {
    let p = base_params();
    let m = evolve_discrete(&p, 1024, 8.0, 20.0, None).unwrap();
    // one full period of the lattice sum in x
    let period = PI / m.dq;
    let nx = 2048;
    let hx = period / nx as f64;
    for j in [400usize, 512, 530, 600] {
        for side in [Side::Transmitted, Side::Reflected] {
            let q = m.q[j];
            let integral: f64 = (0..nx)
                .map(|i| m.distribution_at(side, -0.5 * period + i as f64 * hx, q).unwrap())
                .sum::<f64>()
                * hx;
            let spectrum = m.lattice_spectrum(side)[j];
            assert!(
                (integral - spectrum).abs() < 1e-12,
                "{side:?} j={j}: {integral} vs {spectrum}"
            );
        }
    }
}

#[test]
fn momentum_sum_of_distribution_is_density() {
    let p = base_params();
    let m = evolve_discrete(&p, 1024, 8.0, 20.0, None).unwrap();
    for x in [8.0, 10.0, 11.5] {
        let h = 0.5 * m.dq;
        let sum: f64 = (0..2 * m.len() - 1)
            .map(|i| m.distribution_at(Side::Transmitted, x, m.q[0] + i as f64 * h).unwrap())
            .sum::<f64>()
            * h;
        let rho = m.density_at(Side::Transmitted, x);
        assert!(rho >= 0.0);
        assert!((sum - rho).abs() < 1e-3 * rho.max(1e-3), "{sum} vs {rho}");
    }
}

#[test]
fn decay_rate_at_default_lattice() {
    let p = base_params();
    let times: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
    let pops = decay_series(&p, DEFAULT_MODES, DEFAULT_Q_MAX, &times, None).unwrap();
    let rate = fit_decay_rate(&times, &pops).unwrap();
    assert!((rate / p.gamma() - 1.0).abs() < 0.02, "{rate}");
}

#[test]
fn narrow_band_decay_follows_cutoff_shift() {
    let p = base_params();
    let times: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
    let pops = decay_series(&p, 4096, 16.0, &times, None).unwrap();
    let rate = fit_decay_rate(&times, &pops).unwrap();
    assert!((rate / cutoff_gamma(&p, 16.0) - 1.0).abs() < 2e-3, "{rate}");
}

#[test]
fn transmitted_spectrum_matches_closed_form() {
    let p = base_params();
    let m = evolve_discrete(&p, DEFAULT_MODES, DEFAULT_Q_MAX, 20.0, None).unwrap();
    let free_peak = 1.0 / PI.sqrt();
    let worst = (0..=600)
        .map(|i| {
            let q = -3.0 + 0.01 * i as f64;
            (m.spectrum_at(Side::Transmitted, q).unwrap() - fock::spectral_density(Side::Transmitted, q, &p)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 0.01 * free_peak, "{}", worst / free_peak);
}

#[test]
fn lattice_spacing_is_not_the_limiting_error() {
    let p = base_params();
    let qs = Grid1D::new(-3.0, 3.0, 121).unwrap();
    let xs = Grid1D::new(-25.0, 25.0, 201).unwrap();
    let sup = |n| {
        let m = evolve_discrete(&p, n, 16.0, 20.0, None).unwrap();
        compare_report(&m, &qs, &xs, None, 1.0).unwrap().worst_sup()
    };
    assert!((sup(1024) - sup(2048)).abs() < 1e-4);
}

#[test]
fn narrow_band_lattice_fails_the_comparison() {
    let p = base_params();
    let m = evolve_discrete(&p, 1024, 8.0, 20.0, None).unwrap();
    let qs = Grid1D::new(-3.0, 3.0, 121).unwrap();
    let xs = Grid1D::new(-25.0, 25.0, 201).unwrap();
    let report = compare_report(&m, &qs, &xs, None, 0.02).unwrap();
    assert!(!report.pass());
    assert!(report.worst_sup() > 0.03);
}

#[test]
fn time_step_convergence_is_fourth_order() {
    let p = base_params();
    let run = |dt: f64| {
        let mut m = DiscreteModel::single_photon(&p, 1024, 8.0).unwrap();
        m.evolve(12.0, dt).unwrap();
        m
    };
    let base = 0.1 / 8.0;
    let reference = run(base / 8.0);
    let err = |m: &DiscreteModel| {
        m.c_l
            .iter()
            .zip(&reference.c_l)
            .chain(m.c_r.iter().zip(&reference.c_r))
            .map(|(a, b)| (a - b).norm())
            .fold((m.c_e - reference.c_e).norm(), f64::max)
    };
    let order = (err(&run(base)) / err(&run(base / 2.0))).log2();
    assert!((order - 4.0).abs() < 0.8, "order {order}");
}

#[test]
fn evolution_preserves_the_norm() {
    let m = evolve_discrete(&base_params(), 1024, 8.0, 20.0, None).unwrap();
    assert!((m.norm_sqr() - 1.0).abs() < 1e-10);
}
