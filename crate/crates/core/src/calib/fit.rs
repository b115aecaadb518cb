use nalgebra::{Matrix3, Vector3};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{sigma_y, CalibError, RabiParams};
use crate::stats::fit_amplitude;

/// Iteration limits of the Levenberg–Marquardt search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-12,
        }
    }
}

/// Best-fit Rabi parameters of `y(t) ≈ scale · ⟨σ_y⟩(t; Ω, Γ₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RabiFit {
    pub params: RabiParams,
    pub scale: f64,
    /// Covariance of (Ω, Γ₁, scale).
    pub covariance: Matrix3<f64>,
    /// Standard errors of (Ω, Γ₁, scale).
    pub std_errors: [f64; 3],
    pub residual_rms: f64,
    pub iterations: usize,
}

impl RabiFit {
    pub fn model(&self, t: f64) -> f64 {
        self.scale * sigma_y(self.params.omega(), self.params.gamma1(), t)
    }
}

fn dominant_frequency(y: &[f64], dt: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let n = (4 * y.len()).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(n)
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2].iter().map(|c| c.norm()).collect();
    let k = (1..mag.len())
        .max_by(|a, b| mag[*a].total_cmp(&mag[*b]))
        .unwrap_or(1);
    let shift = if k + 1 < mag.len() {
        let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
        let d = a - 2.0 * b + c;
        if d != 0.0 {
            0.5 * (a - c) / d
        } else {
            0.0
        }
    } else {
        0.0
    };
    (k as f64 + shift) / (n as f64 * dt)
}

fn envelope_decay(y: &[f64], dt: f64, omega: f64) -> Option<f64> {
    let tail = &y[3 * y.len() / 4..];
    let level = tail.iter().sum::<f64>() / tail.len() as f64;
    let half_period = ((std::f64::consts::PI / omega) / dt).round().max(1.0) as usize;
    let mut pts: Vec<(f64, f64)> = y
        .chunks(half_period)
        .enumerate()
        .filter_map(|(k, chunk)| {
            let (j, v) = chunk
                .iter()
                .map(|v| (v - level).abs())
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))?;
            Some(((k * half_period + j) as f64 * dt, v))
        })
        .collect();
    let top = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    pts.retain(|p| p.1 > 0.2 * top);
    if pts.len() < 2 {
        return None;
    }
    let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let l: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let slope = crate::stats::linear_fit(&t, &l).slope;
    (slope < 0.0).then_some(-4.0 * slope / 3.0)
}

fn residuals(x: &Vector3<f64>, y: &[f64], dt: f64, out: &mut [f64]) -> f64 {
    let mut ssr = 0.0;
    for (j, (o, v)) in out.iter_mut().zip(y).enumerate() {
        *o = v - x[2] * sigma_y(x[0], x[1], j as f64 * dt);
        ssr += *o * *o;
    }
    ssr
}

fn admissible(x: &Vector3<f64>) -> bool {
    x.iter().all(|v| v.is_finite()) && x[1] >= 0.0 && x[0] > x[1] / 4.0
}

fn normal_equations(x: &Vector3<f64>, y: &[f64], dt: f64, r: &[f64]) -> (Matrix3<f64>, Vector3<f64>) {
    let steps = Vector3::new(
        1e-7 * x[0].abs().max(1e-300),
        1e-7 * x[1].abs().max(1e-6 * x[0].abs()),
        1e-7 * x[2].abs().max(1e-12),
    );
    let mut a = Matrix3::zeros();
    let mut g = Vector3::zeros();
    for (j, rj) in r.iter().enumerate().take(y.len()) {
        let t = j as f64 * dt;
        let mut row = Vector3::zeros();
        for i in 0..3 {
            let (mut hi, mut lo) = (*x, *x);
            hi[i] += steps[i];
            lo[i] -= steps[i];
            let f = |p: &Vector3<f64>| p[2] * sigma_y(p[0], p[1], t);
            row[i] = (f(&hi) - f(&lo)) / (2.0 * steps[i]);
        }
        a += row * row.transpose();
        g += row * *rj;
    }
    (a, g)
}

/// Least-squares fit of `(Ω, Γ₁, scale)` to a ⟨σ_y⟩ trace sampled at
/// `t_j = j·dt` from the start of the drive.
///
/// Ω is initialised from the dominant FFT frequency, Γ₁ from the decay of the
/// oscillation envelope, then refined by Levenberg–Marquardt.
pub fn fit_rabi(trace: &[f64], dt: f64, options: &FitOptions) -> Result<RabiFit, CalibError> {
    if trace.len() < 16 || dt.is_nan() || dt <= 0.0 {
        return Err(CalibError::InsufficientTrace(format!(
            "{} samples at dt = {dt}",
            trace.len()
        )));
    }
    let omega0 = std::f64::consts::TAU * dominant_frequency(trace, dt);
    let span = trace.len() as f64 * dt;
    if omega0 * span < 3.0 * std::f64::consts::TAU {
        return Err(CalibError::InsufficientTrace(format!(
            "window {span:e} s covers fewer than three Rabi periods"
        )));
    }
    let gamma0 = envelope_decay(trace, dt, omega0).unwrap_or(omega0 / 100.0);
    if omega0 <= gamma0 / 4.0 {
        return Err(CalibError::OverdampedRegime {
            omega: omega0,
            quarter_gamma: gamma0 / 4.0,
        });
    }
    let shape: Vec<f64> = (0..trace.len())
        .map(|j| sigma_y(omega0, gamma0, j as f64 * dt))
        .collect();
    let (scale0, _) = fit_amplitude(&shape, trace);

    let mut x = Vector3::new(omega0, gamma0, scale0);
    let mut r = vec![0.0; trace.len()];
    let mut trial_r = vec![0.0; trace.len()];
    let mut ssr = residuals(&x, trace, dt, &mut r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let (a, g) = normal_equations(&x, trace, dt, &r);
        let mut improved = false;
        while lambda < 1e20 {
            let mut damped = a;
            for i in 0..3 {
                damped[(i, i)] += lambda * a[(i, i)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&g) else {
                lambda *= 10.0;
                continue;
            };
            let trial = x + step;
            if admissible(&trial) {
                let trial_ssr = residuals(&trial, trace, dt, &mut trial_r);
                if trial_ssr <= ssr {
                    let rel = (0..3)
                        .map(|i| (step[i] / x[i]).abs())
                        .fold(0.0, f64::max);
                    x = trial;
                    std::mem::swap(&mut r, &mut trial_r);
                    let small = ssr - trial_ssr <= options.tolerance * ssr.max(1e-300);
                    ssr = trial_ssr;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = true;
                    if rel < options.tolerance.sqrt() * 1e-2 || small && rel < 1e-6 {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: x is a minimum to machine precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(CalibError::NoConvergence { iterations });
    }
    let params = RabiParams::new(x[0], x[1])?;
    let (a, _) = normal_equations(&x, trace, dt, &r);
    let dof = (trace.len() as f64 - 3.0).max(1.0);
    let sigma2 = ssr / dof;
    let covariance = a.try_inverse().map(|m| m * sigma2).unwrap_or_else(|| {
        Matrix3::from_diagonal_element(f64::INFINITY)
    });
    let std_errors = [
        covariance[(0, 0)].max(0.0).sqrt(),
        covariance[(1, 1)].max(0.0).sqrt(),
        covariance[(2, 2)].max(0.0).sqrt(),
    ];
    Ok(RabiFit {
        params,
        scale: x[2],
        covariance,
        std_errors,
        residual_rms: (ssr / trace.len() as f64).sqrt(),
        iterations,
    })
}
