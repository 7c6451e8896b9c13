//! Oracle cross-checks: grid propagation against the closed-form models and
//! the Hermite-basis closed form against grid propagation.

use std::f64::consts::PI;

use spinwave::constants::{HBAR, M_RB87};
use spinwave::models::{
    eta_harmonic_sag, eta_recoil, eta_release_bec, harmonic_trap_timescales, recoil_time, Kuhr, KuhrVariant,
    LinearForce, LinearForceForm, Timescale,
};
use spinwave::oracle::closed_form::{hermite_release_overlaps, hermite_release_thermal};
use spinwave::oracle::kuhr_exact::{k_time, kuhr_exact, OverlapMethod};
use spinwave::oracle::scenarios::{
    harmonic_sag_oracle, linear_force_oracle, product, recoil_oracle, release_bec_oracle, release_overlaps,
    release_thermal_oracle, Comparison, SagScenario,
};
use spinwave::oracle::{
    hermite_state, weighted_coherence, Grid1D, Potential, PropagationOptions, Propagator, StorageOperator,
    ThermalSpec,
};
use spinwave::physics::{differential_force, oscillator_length, thermal_velocity, transferred_radius};

const OMEGA: f64 = 2.0 * PI * 96.0;

fn a0() -> f64 {
    oscillator_length(M_RB87, OMEGA)
}

fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 * t_max / n as f64).collect()
}

#[test]
fn recoil_oracle_two_temperatures() {
    let k_r = 2.0 * PI / 1.247e-6;
    for temp in [0.2e-6, 2e-6] {
        let sv = thermal_velocity(temp, M_RB87);
        let tau = recoil_time(k_r, sv).finite().unwrap();
        let times = linspace(2.5 * tau, 25);
        let s = recoil_oracle(k_r, sv, M_RB87, &times).unwrap();
        let model: Vec<f64> = times.iter().map(|&t| eta_recoil(t, k_r, sv)).collect();
        let c = Comparison::new("recoil", times, s.eta_ratio(), model, 1e-3).unwrap();
        assert!(c.passes(1e-3), "T = {temp}: {}", c.max_rel_dev);
    }
}

#[test]
fn bec_release_oracle_various_waists() {
    let a0 = a0();
    for ratio in [0.5, 2.0, 8.0] {
        let w = ratio * a0;
        let times = linspace(4.0 / OMEGA, 16);
        let s = release_bec_oracle(a0, w, M_RB87, &times).unwrap();
        let model: Vec<f64> = times.iter().map(|&t| eta_release_bec(t, a0, w, OMEGA)).collect();
        let c = Comparison::new("release_bec", times, s.eta_ratio(), model, 1e-3).unwrap();
        assert!(c.passes(1e-3), "w/a0 = {ratio}: {}", c.max_rel_dev);
    }
}

#[test]
fn linear_force_oracle_matches_exact_form() {
    let w = 8e-6;
    let f = differential_force(M_RB87, 9.81, -0.8);
    let lf = LinearForce::new(w, 0.0, M_RB87, [0.0; 3], [f, 0.0, 0.0], LinearForceForm::Exact).unwrap();
    let tau = lf.tau_f_infinity().finite().unwrap();
    let times = linspace(2.5 * tau, 20);
    let (x, y) = linear_force_oracle(w, M_RB87, f, &times).unwrap();
    let oracle: Vec<f64> = x.eta_ratio().iter().zip(y.eta_ratio()).map(|(a, b)| a * b).collect();
    let model: Vec<f64> = times.iter().map(|&t| lf.eta(t)).collect();
    let c = Comparison::new("linear_force", times, oracle, model, 1e-3).unwrap();
    assert!(c.passes(1e-3), "{}", c.max_rel_dev);
}

#[test]
fn hermite_closed_form_matches_grid_up_to_n20() {
    let a0 = a0();
    for ratio in [2.0, 5.0, 7.3] {
        let w = ratio * a0;
        let times = linspace(3.0 / OMEGA, 12);
        let grid = release_overlaps(20, a0, w, 0.0, M_RB87, &times).unwrap();
        for (n, g) in grid.iter().enumerate() {
            let cf = hermite_release_overlaps(n, &times, a0, w, M_RB87).unwrap();
            // the grid carries the quantization length L, the closed form is per unit L
            let l = g.m0 / cf.m0;
            for i in 0..times.len() {
                let dq = (cf.q[i] * l - g.q[i]).norm() / g.q[i].norm();
                let dm = (cf.m_t[i] * l - g.m_t[i]).abs() / g.m_t[i];
                assert!(dq <= 1e-6 && dm <= 1e-6, "w/a0 = {ratio}, n = {n}, i = {i}: {dq:.2e} {dm:.2e}");
            }
        }
    }
}

#[test]
fn thermal_release_closed_form_matches_grid() {
    let a0 = a0();
    let w = 5.0 * a0;
    // n ≤ 37 keeps the closed form inside its default error bound
    let spec = ThermalSpec::from_ratio(4.0, OMEGA, 0, 1e-4).unwrap().with_minimal_n_max();
    let times = linspace(2.0 / OMEGA, 10);
    let (grid, _) = release_thermal_oracle(&spec, a0, w, M_RB87, &times).unwrap();
    let (cf, _) = hermite_release_thermal(&spec, &times, a0, w, M_RB87).unwrap();
    for (g, c) in grid.eta.iter().zip(&cf.eta) {
        assert!((g / c - 1.0).abs() < 1e-6, "{g} {c}");
    }
}

#[test]
fn efficiency_does_not_depend_on_box_length() {
    let a0 = a0();
    let w = 3.0 * a0;
    let times = [0.0, 1.0 / OMEGA, 3.0 / OMEGA];
    let run = |half: f64| {
        let g = Grid1D::covering(half, 12.0 / a0).unwrap();
        let p = Propagator::new(g.clone(), M_RB87, PropagationOptions::default()).unwrap();
        let s = hermite_state(0, a0, &g).unwrap();
        let o = p
            .overlaps(&s, &StorageOperator::gaussian(0.0, w), &Potential::Zero, &Potential::Zero, &times)
            .unwrap();
        weighted_coherence(&[o], &[1.0]).unwrap().eta_ratio()
    };
    let short = run(60.0 * a0);
    let long = run(150.0 * a0);
    for (a, b) in short.iter().zip(&long) {
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn harmonic_sag_oracle_within_raman_nath_window() {
    let temp = 0.2e-6;
    let w = 8e-6;
    let ratio = -0.8;
    let force = differential_force(M_RB87, 9.81, ratio);
    let sc = SagScenario {
        mass: M_RB87,
        omega: OMEGA,
        kappa_ratio: ratio,
        force,
        waist: w,
        temperature: temp,
        tail_bound: 1e-4,
    };
    let times = linspace(25e-6, 10);
    let (x, y) = harmonic_sag_oracle(&sc, &times).unwrap();
    let oracle = product(&x, &y).unwrap();
    let sigma_x = thermal_velocity(temp, M_RB87) / OMEGA;
    let w_r = transferred_radius(sigma_x, w);
    let kg = M_RB87 * OMEGA * OMEGA;
    let (tf, tk) = harmonic_trap_timescales(w_r, force, kg, ratio * kg).unwrap();
    let model: Vec<f64> = times.iter().map(|&t| eta_harmonic_sag(t, tf, tk)).collect();
    let c = Comparison::new("harmonic_sag", times, oracle.eta, model, 1e-2).unwrap();
    assert!(c.passes(0.03), "{}", c.max_rel_dev);
}

#[test]
fn identity_storage_with_equal_hamiltonians() {
    let a0 = a0();
    let g = Grid1D::covering(40.0 * a0, 12.0 / a0).unwrap();
    let p = Propagator::new(g.clone(), M_RB87, PropagationOptions::default()).unwrap();
    let v = Potential::harmonic(M_RB87 * OMEGA * OMEGA, 0.3 * a0);
    for n in [0, 3, 8] {
        let s = hermite_state(n, a0, &g).unwrap();
        let o = p.overlaps(&s, &StorageOperator::identity(), &v, &v, &[0.0, 1e-3, 5e-3]).unwrap();
        let e = weighted_coherence(&[o], &[1.0]).unwrap().eta_ratio();
        // FFT rounding accumulated over a few thousand steps
        for v in e {
            assert!((v - 1.0).abs() < 1e-10, "{v}");
        }
    }
}

#[test]
fn kuhr_sum_inside_window() {
    let wg = 1000.0;
    let wr = wg * (1.0 - 0.002);
    let beta = 0.05 / (HBAR * wg);
    let k = k_time(beta, wg, wr);
    let times = linspace(2.0 * k, 20);
    let r = kuhr_exact(beta, wg, wr, 400, &times, OverlapMethod::GridOverlap).unwrap();
    assert!(r.warnings.is_empty());
    let model = Kuhr::new(beta, wg * wg, wr * wr, 1.0, 1, KuhrVariant::KuhrIntermediate).unwrap();
    for (t, e) in times.iter().zip(r.series.eta_ratio()) {
        let m = model.eta(*t);
        assert!((e / m - 1.0).abs() < 0.01, "t/K = {}: {e} vs {m}", t / k);
    }
}

#[test]
fn kuhr_sum_revives_where_the_estimate_does_not() {
    // the diagonal terms rephase after 2π/(ω_g − ω_r); only the n' = n ± 2
    // sidebands keep |C| below one
    let wg = 1000.0;
    let wr = wg * (1.0 - 0.002);
    let beta = 0.05 / (HBAR * wg);
    let t_rev = 2.0 * PI / (wg - wr);
    let r = kuhr_exact(beta, wg, wr, 400, &[t_rev], OverlapMethod::Perturbative).unwrap();
    let eta = r.series.eta_ratio()[0];
    let eps = (1.0 - (wg / wr).sqrt()).powi(2) / 4.0;
    let mean_n2 = 2.0 / (beta * HBAR * wg).powi(2);
    assert!((1.0 - eta).abs() < 8.0 * eps * mean_n2, "{eta}");
    let model = Kuhr::new(beta, wg * wg, wr * wr, 1.0, 1, KuhrVariant::KuhrIntermediate).unwrap();
    assert!(model.eta(t_rev) < 1e-3);
}

#[test]
fn kuhr_window_violation_is_flagged() {
    let wg = 1000.0;
    let wr = 0.7 * wg;
    let beta = 0.05 / (HBAR * wg);
    let k = k_time(beta, wg, wr);
    let r = kuhr_exact(beta, wg, wr, 400, &[k], OverlapMethod::GridOverlap).unwrap();
    assert!(!r.warnings.is_empty());
}

#[test]
fn harmonic_sag_reduces_to_force_only_without_kappa() {
    // κ_r = κ_g leaves only the sag force; the in-trap motion over 10 µs is negligible
    let temp = 0.2e-6;
    let w = 8e-6;
    let force = differential_force(M_RB87, 9.81, -0.8);
    let sc = SagScenario {
        mass: M_RB87,
        omega: OMEGA,
        kappa_ratio: 1.0,
        force,
        waist: w,
        temperature: temp,
        tail_bound: 1e-4,
    };
    let times = linspace(10e-6, 4);
    let (x, y) = harmonic_sag_oracle(&sc, &times).unwrap();
    let sigma_x = thermal_velocity(temp, M_RB87) / OMEGA;
    let w_r = transferred_radius(sigma_x, w);
    let (tf, _) = harmonic_trap_timescales(w_r, force, 1.0, 1.0).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let m = eta_harmonic_sag(t, tf, Timescale::NoDecay);
        assert!((x.eta[i] * y.eta[i] / m - 1.0).abs() < 0.01, "{} {m}", x.eta[i] * y.eta[i]);
        assert!((y.eta[i] - 1.0).abs() < 1e-3);
    }
}
