//! Property-based checks of the model invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use spinwave::constants::{HBAR, M_RB87};
use spinwave::fit::{fit_decay, fit_tau_vs_temperature, FitModel, TemperaturePoint};
use spinwave::models::{
    compose, eta_harmonic_sag, eta_recoil, eta_release_bec, eta_release_thermal, Composition, DecayCurve, Kuhr,
    KuhrVariant, LinearForce, LinearForceForm, ReleaseDims, Timescale,
};
use spinwave::oracle::closed_form::hermite_release_closedform;
use spinwave::oracle::kuhr_exact::perturbative_overlaps;
use spinwave::oracle::ThermalSpec;
use spinwave::physics::{spin_wave_wavevector, BeamGeometry, Propagation};
use spinwave::ramsey::{ramsey_signal, RamseyConfig};
use spinwave::units::{angular_to_hz, au_to_si, hz_to_angular, si_to_au};

fn ts(v: Option<f64>) -> Timescale {
    v.map_or(Timescale::NoDecay, Timescale::Finite)
}

proptest! {
    #[test]
    fn recoil_is_a_bounded_decreasing_curve(k in 1e5f64..1e7, sv in 1e-4f64..1e-1, t1 in 0.0f64..1e-3, dt in 0.0f64..1e-3) {
        let a = eta_recoil(t1, k, sv);
        let b = eta_recoil(t1 + dt, k, sv);
        prop_assert!(a <= 1.0 && b >= 0.0 && b <= a);
        prop_assert_eq!(eta_recoil(0.0, k, sv), 1.0);
    }

    #[test]
    fn harmonic_sag_bounded_and_decreasing(
        tf in proptest::option::of(1e-6f64..1e-3),
        tk in proptest::option::of(1e-6f64..1e-3),
        t in 0.0f64..1e-3,
        dt in 0.0f64..1e-3,
    ) {
        let a = eta_harmonic_sag(t, ts(tf), ts(tk));
        let b = eta_harmonic_sag(t + dt, ts(tf), ts(tk));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a * (1.0 + 1e-15));
    }

    #[test]
    fn release_efficiencies_never_exceed_one(
        a0 in 1e-7f64..1e-5,
        w in 1e-7f64..1e-4,
        omega in 10.0f64..1e4,
        sx in 1e-7f64..1e-4,
        sv in 0.0f64..1e-1,
        t in 0.0f64..1e-2,
    ) {
        let b = eta_release_bec(t, a0, w, omega);
        prop_assert!(b > 0.0 && b <= 1.0 + 1e-12);
        let one = eta_release_thermal(t, sx, sv, w, M_RB87, ReleaseDims::One);
        let two = eta_release_thermal(t, sx, sv, w, M_RB87, ReleaseDims::Two);
        prop_assert!(one > 0.0 && one <= 1.0);
        prop_assert!((two - one * one).abs() <= 1e-15);
    }

    #[test]
    fn linear_force_bounded(
        w in 1e-6f64..1e-4,
        sv in 0.0f64..1e-2,
        f in -1e-23f64..1e-23,
        fy in -1e-23f64..1e-23,
        kx in -1e7f64..1e7,
        kz in -1e7f64..1e7,
        t in 0.0f64..1e-3,
    ) {
        for form in [LinearForceForm::Exact, LinearForceForm::HighTemperature] {
            let lf = LinearForce::new(w, sv, M_RB87, [kx, 0.0, kz], [f, fy, 0.0], form).unwrap();
            let e = lf.eta(t);
            prop_assert!((0.0..=1.0).contains(&e), "{e}");
            prop_assert_eq!(lf.eta(0.0), 1.0);
        }
    }

    #[test]
    fn force_direction_only_enters_through_rotation(
        w in 1e-6f64..1e-4,
        f in 1e-26f64..1e-23,
        angle in 0.0f64..(2.0 * PI),
        k in -1e7f64..1e7,
        t in 0.0f64..1e-4,
    ) {
        let (c, s) = (angle.cos(), angle.sin());
        let along_x = LinearForce::new(w, 1e-3, M_RB87, [k, 0.0, 0.0], [f, 0.0, 0.0], LinearForceForm::Exact).unwrap();
        let rotated = LinearForce::new(w, 1e-3, M_RB87, [k * c, k * s, 0.0], [f * c, f * s, 0.0], LinearForceForm::Exact).unwrap();
        let (a, b) = (along_x.eta(t), rotated.eta(t));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{a} {b}");
    }

    #[test]
    fn kuhr_one_over_e_is_consistent(
        omega in 100.0f64..1e4,
        rel in 1e-5f64..0.5,
        temp in 1e-7f64..1e-4,
        dims in 1u32..=3,
    ) {
        let kg = M_RB87 * omega * omega;
        let beta = 1.0 / (spinwave::constants::K_B * temp);
        for variant in [KuhrVariant::KuhrIntermediate, KuhrVariant::RamanNathHighT] {
            let k = Kuhr::new(beta, kg, kg * (1.0 - rel), M_RB87, dims, variant).unwrap();
            let te = k.one_over_e_time().finite().unwrap();
            prop_assert!((k.eta(te) * std::f64::consts::E - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn noiseless_fits_round_trip(
        eta0 in 0.01f64..1.0,
        tau in 1e-6f64..1e-3,
        p in 1.0f64..3.0,
        n in 8usize..40,
    ) {
        let times: Vec<f64> = (0..n).map(|i| 0.02 * tau + 2.0 * tau * i as f64 / n as f64).collect();
        for model in [FitModel::Gaussian, FitModel::Exponential, FitModel::Algebraic, FitModel::StretchedExponential] {
            let eta = times.iter().map(|&t| model.eval(t, eta0, tau, p)).collect();
            let f = fit_decay(&DecayCurve::new(times.clone(), eta).unwrap(), model).unwrap();
            prop_assert!((f.value("tau").unwrap() / tau - 1.0).abs() < 1e-9, "{model:?} {f:?}");
            prop_assert!((f.value("eta0").unwrap() / eta0 - 1.0).abs() < 1e-9, "{model:?}");
            if model == FitModel::StretchedExponential {
                prop_assert!((f.value("p").unwrap() - p).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn temperature_regression_is_exact_on_a_line(
        lambda in 0.5e-6f64..2e-6,
        tau_off in 10e-6f64..100e-6,
        n in 2usize..8,
    ) {
        let k = 2.0 * PI / lambda;
        let pts: Vec<TemperaturePoint> = (0..n)
            .map(|i| {
                let temp = 0.2e-6 + 1.8e-6 * i as f64 / (n - 1) as f64;
                let rate = k * k * spinwave::constants::K_B * temp / M_RB87 + 1.0 / (tau_off * tau_off);
                TemperaturePoint { temperature: temp, tau: rate.powf(-0.5), sigma_tau: None }
            })
            .collect();
        let r = fit_tau_vs_temperature(&pts, M_RB87, false).unwrap();
        prop_assert!((r.lambda_r / lambda - 1.0).abs() < 1e-8);
        prop_assert!((r.tau_offset.unwrap() / tau_off - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gibbs_weights_sum_to_one_minus_tail(ratio in 0.1f64..50.0, n_max in 0usize..400) {
        let spec = ThermalSpec::from_ratio(ratio, 1e3, n_max, 0.999).unwrap();
        let total: f64 = spec.weights().iter().sum();
        prop_assert!((total + spec.tail() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbative_rows_conserve_probability(da in -0.29f64..0.29, n_max in 0usize..50) {
        let p = perturbative_overlaps(n_max, 1.0 + da).unwrap();
        for row in &p.rows {
            let s: f64 = row.iter().map(|(_, v)| v).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_rules(a in proptest::collection::vec(0.0f64..1.0, 5), b in proptest::collection::vec(0.0f64..1.0, 5), w in 0.0f64..1.0) {
        let t: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let ca = DecayCurve::new(t.clone(), a.clone()).unwrap();
        let cb = DecayCurve::new(t, b.clone()).unwrap();
        let ab = compose(&[ca.clone(), cb.clone()], &Composition::CartesianProduct).unwrap();
        let ba = compose(&[cb.clone(), ca.clone()], &Composition::CartesianProduct).unwrap();
        prop_assert_eq!(&ab.eta, &ba.eta);
        let same = compose(&[ca.clone(), ca.clone()], &Composition::MixtureAverage(vec![w, 1.0 - w])).unwrap();
        for (x, y) in same.eta.iter().zip(&a) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
        let mix = compose(&[ca, cb], &Composition::MixtureAverage(vec![w, 1.0 - w])).unwrap();
        for i in 0..5 {
            prop_assert!(mix.eta[i] <= a[i].max(b[i]) + 1e-15 && mix.eta[i] >= a[i].min(b[i]) - 1e-15);
        }
    }

    #[test]
    fn ramsey_signal_stays_between_zero_and_p_r0(
        detuning in -1e6f64..1e6,
        phi in -0.5f64..0.5,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
        t in 0.0f64..1e-4,
    ) {
        let c = Complex64::new(re, im) * 0.7;
        let coh: spinwave::ramsey::CoherenceFn = Arc::new(move |t: f64| Ok(if t == 0.0 { Complex64::new(1.0, 0.0) } else { c }));
        let cfg = RamseyConfig::small_area(detuning, phi, coh).unwrap();
        let p = ramsey_signal(t, &cfg).unwrap();
        prop_assert!(p >= -1e-15 && p <= cfg.p_r0() * (1.0 + 1e-12));
    }

    #[test]
    fn spin_wave_geometry(ls in 300e-9f64..1200e-9, lc in 300e-9f64..1200e-9) {
        let b = |g| BeamGeometry { signal_wavelength: ls, coupling_wavelength: lc, geometry: g, signal_waist: 8e-6 };
        let co = spin_wave_wavevector(&b(Propagation::Copropagating)).unwrap();
        let counter = spin_wave_wavevector(&b(Propagation::Counterpropagating)).unwrap();
        prop_assert!(co.k_r >= counter.k_r);
        let swapped = BeamGeometry { signal_wavelength: lc, coupling_wavelength: ls, geometry: Propagation::Counterpropagating, signal_waist: 8e-6 };
        prop_assert!((spin_wave_wavevector(&swapped).unwrap().k_r - counter.k_r).abs() <= 1e-9 * co.k_r);
    }

    #[test]
    fn unit_round_trips(f in 1e-3f64..1e9, a in -1e4f64..1e4) {
        prop_assert!((angular_to_hz(hz_to_angular(f)) / f - 1.0).abs() < 1e-15);
        prop_assert!((si_to_au(au_to_si(a)) - a).abs() <= 1e-15 * a.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_obeys_cauchy_schwarz(n in 0usize..=30, w_over_a0 in 0.5f64..10.0, wt in 0.0f64..5.0) {
        let omega = 2.0 * PI * 96.0;
        let a0 = (HBAR / (M_RB87 * omega)).sqrt();
        let r = hermite_release_closedform(n, wt / omega, a0, w_over_a0 * a0, M_RB87).unwrap();
        prop_assert!(r.q.norm_sqr() <= r.m0 * r.m_t * (1.0 + 1e-12));
        prop_assert!(r.m_t > 0.0 && r.m0 > 0.0);
    }
}
