use num_complex::Complex64;

use super::SpectrumError;
use crate::lindblad::TimeTrace;
use crate::opalgebra::ComponentTable;

/// Amplitudes below this magnitude count as numerically zero.
pub const NUMERICAL_FLOOR: f64 = 1e-14;

const RESYNC: usize = 4096;

/// Projects a trace onto the comb lines `p·δω`:
/// `V_p = (1/T) Σ_j trace_j e^{−ipδω t_j} dt` for odd `|p| ≤ max_p`.
///
/// The window `T = len·dt` must be an integer number of beat periods π/δω to
/// within 0.1 % of a period; the discrete exponentials are then orthogonal.
pub fn comb_amplitudes(
    trace: &TimeTrace,
    detuning: f64,
    max_p: i32,
) -> Result<ComponentTable<Complex64>, SpectrumError> {
    if max_p < 1 || max_p % 2 == 0 {
        return Err(SpectrumError::InvalidComponentRange(max_p));
    }
    if !(detuning.is_finite() && detuning > 0.0) {
        return Err(SpectrumError::BadWindow {
            window: trace.window(),
            beat_period: f64::INFINITY,
        });
    }
    let window = trace.window();
    let beat = std::f64::consts::PI / detuning;
    let m = (window / beat).round();
    if trace.is_empty() || m < 1.0 || (window - m * beat).abs() > 1e-3 * beat {
        return Err(SpectrumError::BadWindow {
            window,
            beat_period: beat,
        });
    }

    let ps: Vec<i32> = (-max_p..=max_p).step_by(2).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); ps.len()];
    let steps: Vec<Complex64> = ps
        .iter()
        .map(|p| Complex64::from_polar(1.0, -(*p as f64) * detuning * trace.dt))
        .collect();
    let mut phasors = vec![Complex64::new(0.0, 0.0); ps.len()];
    for (j, s) in trace.samples.iter().enumerate() {
        if j % RESYNC == 0 {
            let t = trace.time(j);
            for (ph, p) in phasors.iter_mut().zip(&ps) {
                *ph = Complex64::from_polar(1.0, -(*p as f64) * detuning * t);
            }
        }
        for ((a, ph), st) in acc.iter_mut().zip(phasors.iter_mut()).zip(&steps) {
            *a += *s * *ph;
            *ph *= *st;
        }
    }
    let n = trace.len() as f64;
    let mut table = ComponentTable::new(0, (0, 0));
    for (p, a) in ps.into_iter().zip(acc) {
        table.insert(p, a / n);
    }
    Ok(table)
}

/// Phase φ ∈ [0, π) that minimises Σ |Im(e^{−iφ} v)|² over `values`, or
/// `None` when every value is below [`NUMERICAL_FLOOR`].
pub fn quadrature_phase<I: IntoIterator<Item = Complex64>>(values: I) -> Option<f64> {
    let mut sum_sq = Complex64::new(0.0, 0.0);
    let mut largest: f64 = 0.0;
    for v in values {
        sum_sq += v * v;
        largest = largest.max(v.norm());
    }
    if largest < NUMERICAL_FLOOR {
        return None;
    }
    let mut phi = 0.5 * sum_sq.arg();
    if phi < 0.0 {
        phi += std::f64::consts::PI;
    }
    Some(phi)
}

/// Rotates all components by one global phase so that the emitted field lies
/// in the real quadrature. Returns the real parts and the phase φ, with
/// `real_p = Re(e^{−iφ} V_p)`.
pub fn rotate_quadrature(
    table: &ComponentTable<Complex64>,
) -> Result<(ComponentTable<f64>, f64), SpectrumError> {
    let phi = quadrature_phase(table.iter().map(|(_, v)| v)).ok_or(SpectrumError::AllZero)?;
    let rot = Complex64::from_polar(1.0, -phi);
    Ok((table.map(|v| (v * rot).re), phi))
}

/// Fraction of total power left in the imaginary quadrature after rotating by
/// `phi`.
pub fn residual_imaginary_fraction<I: IntoIterator<Item = Complex64>>(values: I, phi: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, -phi);
    let (mut im, mut total) = (0.0, 0.0);
    for v in values {
        im += (v * rot).im.powi(2);
        total += v.norm_sqr();
    }
    if total == 0.0 {
        0.0
    } else {
        im / total
    }
}

/// Number of components with `|value| ≥ threshold_fraction · max |value|`.
///
/// # Panics
/// If `threshold_fraction` is not in (0, 1).
pub fn count_peaks(table: &ComponentTable<f64>, threshold_fraction: f64) -> usize {
    assert!(
        threshold_fraction > 0.0 && threshold_fraction < 1.0,
        "threshold fraction {threshold_fraction} outside (0, 1)"
    );
    let max = table.max_abs();
    if max == 0.0 {
        return 0;
    }
    table
        .iter()
        .filter(|(_, v)| v.abs() >= threshold_fraction * max)
        .count()
}
