use std::f64::consts::TAU;

use proptest::prelude::*;
use qwm_core::calib::*;
use qwm_core::stats::linear_fit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const NS: f64 = 1e-9;

fn synthetic(omega: f64, gamma1: f64, dt: f64, n: usize) -> Vec<f64> {
    let params = RabiParams::new(omega, gamma1).unwrap();
    (0..n)
        .map(|j| rabi_analytic(&params, j as f64 * dt).unwrap().1)
        .collect()
}

fn noisy(mut trace: Vec<f64>, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    for v in &mut trace {
        *v += normal.sample(&mut rng);
    }
    trace
}

#[test]
fn starts_in_ground_state() {
    let p = RabiParams::new(TAU * 20e6, TAU * 1.64e6).unwrap();
    let (sx, sy, sz) = rabi_analytic(&p, 0.0).unwrap();
    assert_eq!(sx, 0.0);
    assert!(sy.abs() < 1e-15);
    assert!((sz + 1.0).abs() < 1e-15);
}

#[test]
fn undamped_limit_is_pure_rotation() {
    let omega = TAU * 20e6;
    let p = RabiParams::new(omega, 0.0).unwrap();
    for k in 0..50 {
        let t = k as f64 * 1.3 * NS;
        let (_, sy, sz) = rabi_analytic(&p, t).unwrap();
        assert!((sy - (omega * t).sin()).abs() < 1e-12);
        assert!((sz + (omega * t).cos()).abs() < 1e-12);
    }
}

#[test]
fn weak_decay_approaches_undamped() {
    let omega = TAU * 20e6;
    let p = RabiParams::new(omega, 1e-3).unwrap();
    let (_, sy, sz) = rabi_analytic(&p, 7.0 * NS).unwrap();
    assert!((sy - (omega * 7.0 * NS).sin()).abs() < 1e-9);
    assert!((sz + (omega * 7.0 * NS).cos()).abs() < 1e-9);
}

#[test]
fn relaxes_to_steady_state() {
    let (w, g) = (TAU * 5e6, TAU * 1.64e6);
    let p = RabiParams::new(w, g).unwrap();
    let (_, sy, sz) = rabi_analytic(&p, 20e-6).unwrap();
    let denom = 2.0 * w * w + g * g;
    assert!((sy - 2.0 * w * g / denom).abs() < 1e-12);
    assert!((sz + g * g / denom).abs() < 1e-12);
}

#[test]
fn parameter_errors() {
    assert!(matches!(
        RabiParams::new(1.0, 8.0),
        Err(CalibError::OverdampedRegime { .. })
    ));
    assert!(matches!(
        RabiParams::new(f64::NAN, 1.0),
        Err(CalibError::InvalidParameters(_))
    ));
    assert!(matches!(
        RabiParams::new(1.0, -1.0),
        Err(CalibError::InvalidParameters(_))
    ));
    let p = RabiParams::new(10.0, 1.0).unwrap();
    assert_eq!(rabi_analytic(&p, -1.0), Err(CalibError::NegativeTime(-1.0)));
    assert!((p.omega_prime() - (100.0f64 - 1.0 / 16.0).sqrt()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn obeys_bloch_equations(
        omega in 1.0f64..10.0,
        ratio in 0.0f64..3.0,
        t in 0.01f64..5.0,
    ) {
        let gamma1 = ratio * omega;
        let p = RabiParams::new(omega, gamma1).unwrap();
        let h = 1e-5;
        let (_, y1, z1) = rabi_analytic(&p, t + h).unwrap();
        let (_, y0, z0) = rabi_analytic(&p, t - h).unwrap();
        let (_, y, z) = rabi_analytic(&p, t).unwrap();
        let dy = (y1 - y0) / (2.0 * h);
        let dz = (z1 - z0) / (2.0 * h);
        let ry = -0.5 * gamma1 * y - omega * z;
        let rz = omega * y - gamma1 * (z + 1.0);
        let scale = omega * (1.0 + ratio);
        prop_assert!((dy - ry).abs() <= 1e-6 * scale, "dy {} vs {}", dy, ry);
        prop_assert!((dz - rz).abs() <= 1e-6 * scale, "dz {} vs {}", dz, rz);
    }

    #[test]
    fn bloch_vector_stays_in_ball(
        omega in 0.5f64..10.0,
        ratio in 0.0f64..3.9,
        t in 0.0f64..20.0,
    ) {
        let p = RabiParams::new(omega, ratio * omega).unwrap();
        let (sx, sy, sz) = rabi_analytic(&p, t).unwrap();
        prop_assert!(sx * sx + sy * sy + sz * sz <= 1.0 + 1e-12);
    }
}

#[test]
fn noiseless_round_trip() {
    let (w, g) = (TAU * 20e6, TAU * 1.64e6);
    let trace = synthetic(w, g, 0.5 * NS, 1000);
    let fit = fit_rabi(&trace, 0.5 * NS, &FitOptions::default()).unwrap();
    assert!((fit.params.omega() / w - 1.0).abs() < 1e-3);
    assert!((fit.params.gamma1() / g - 1.0).abs() < 1e-3);
    assert!((fit.scale - 1.0).abs() < 1e-3);
    assert!(fit.residual_rms < 1e-6);
    assert!((fit.model(10.0 * NS) - trace[20]).abs() < 1e-6);
}

#[test]
fn noisy_round_trip() {
    let (w, g) = (TAU * 20e6, TAU * 1.64e6);
    for seed in 0..5 {
        let trace = noisy(synthetic(w, g, 0.5 * NS, 1000), 0.02, seed);
        let fit = fit_rabi(&trace, 0.5 * NS, &FitOptions::default()).unwrap();
        assert!((fit.params.omega() / w - 1.0).abs() < 1e-2, "seed {seed}");
        assert!(fit.std_errors[0] < 1e-2 * w);
        assert!((fit.residual_rms - 0.02).abs() < 0.005);
    }
}

#[test]
fn fitted_rabi_is_linear_in_drive_amplitude() {
    let g = TAU * 1.64e6;
    let slope = TAU * 4e6;
    let amplitudes: Vec<f64> = (1..=10).map(f64::from).collect();
    let fitted: Vec<f64> = amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let trace = noisy(synthetic(slope * a, g, 0.25 * NS, 4000), 0.02, 100 + k as u64);
            fit_rabi(&trace, 0.25 * NS, &FitOptions::default())
                .unwrap()
                .params
                .omega()
        })
        .collect();
    let line = linear_fit(&amplitudes, &fitted);
    assert!(line.r_squared > 0.999, "{line:?}");
    assert!((line.slope / slope - 1.0).abs() < 1e-2);
}

#[test]
fn short_traces_are_rejected() {
    assert!(matches!(
        fit_rabi(&[0.0; 8], 1.0, &FitOptions::default()),
        Err(CalibError::InsufficientTrace(_))
    ));
    let trace = synthetic(TAU * 20e6, 0.0, 0.5 * NS, 100);
    assert!(matches!(
        fit_rabi(&trace, 0.5 * NS, &FitOptions::default()),
        Err(CalibError::InsufficientTrace(_))
    ));
}

#[test]
fn overdamped_trace_is_rejected() {
    let g = TAU * 40e6;
    let trace: Vec<f64> = (0..2000)
        .map(|j| {
            let t = j as f64 * 0.5 * NS;
            0.2 * (1.0 - (-g * t).exp()) + 0.01 * (TAU * 1e6 * t).sin() * (-g * t / 4.0).exp()
        })
        .collect();
    let err = fit_rabi(&trace, 0.5 * NS, &FitOptions::default()).unwrap_err();
    assert!(
        matches!(err, CalibError::OverdampedRegime { .. } | CalibError::InsufficientTrace(_)),
        "{err:?}"
    );
}
