//! Damped resonant Rabi oscillations and extraction of `(Ω, Γ₁)` from
//! measured or simulated ⟨σ_y⟩ traces.
//!
//! The drive rotates the Bloch vector about x with Rabi frequency Ω starting
//! from the ground state, so ⟨σ_y⟩ rises as +sin(Ωt) for small Γ₁. With
//! radiative decay only, the Bloch equations read
//! `ṡ_y = −(Γ₁/2) s_y − Ω s_z` and `ṡ_z = Ω s_y − Γ₁(s_z + 1)`.

mod fit;

pub use fit::{fit_rabi, FitOptions, RabiFit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibError {
    #[error("overdamped regime: Ω = {omega:e} rad/s is not above Γ₁/4 = {quarter_gamma:e} rad/s")]
    OverdampedRegime { omega: f64, quarter_gamma: f64 },
    #[error("invalid Rabi parameters: {0}")]
    InvalidParameters(String),
    #[error("time {0} s is negative")]
    NegativeTime(f64),
    #[error("trace too short: {0}")]
    InsufficientTrace(String),
    #[error("fit did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// Rabi frequency Ω and decay rate Γ₁ (rad/s) on the underdamped branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiParams {
    omega: f64,
    gamma1: f64,
    omega_prime: f64,
}

impl RabiParams {
    pub fn new(omega: f64, gamma1: f64) -> Result<Self, CalibError> {
        if !(omega.is_finite() && gamma1.is_finite() && gamma1 >= 0.0) {
            return Err(CalibError::InvalidParameters(format!(
                "Ω = {omega}, Γ₁ = {gamma1}"
            )));
        }
        if omega <= gamma1 / 4.0 {
            return Err(CalibError::OverdampedRegime {
                omega,
                quarter_gamma: gamma1 / 4.0,
            });
        }
        Ok(Self {
            omega,
            gamma1,
            omega_prime: (omega * omega - gamma1 * gamma1 / 16.0).sqrt(),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// Generalised Rabi frequency Ω′ = √(Ω² − Γ₁²/16).
    pub fn omega_prime(&self) -> f64 {
        self.omega_prime
    }
}

/// (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) at time `t` under constant resonant drive.
pub fn rabi_analytic(params: &RabiParams, t: f64) -> Result<(f64, f64, f64), CalibError> {
    if t < 0.0 {
        return Err(CalibError::NegativeTime(t));
    }
    let (w, g, wp) = (params.omega, params.gamma1, params.omega_prime);
    let denom = 2.0 * w * w + g * g;
    let decay = (-0.75 * g * t).exp();
    let (sin, cos) = (wp * t).sin_cos();
    let sy = 2.0 * w / denom
        * (g - decay * (g * cos - (4.0 * w * w - g * g) / (4.0 * wp) * sin));
    let sz = if g > 0.0 {
        -g / denom * (g + decay * (3.0 * w * w / (2.0 * wp) * sin + 2.0 * w * w / g * cos))
    } else {
        -cos
    };
    Ok((0.0, sy, sz))
}

/// ⟨σ_y⟩ alone; the fit model.
pub(crate) fn sigma_y(omega: f64, gamma1: f64, t: f64) -> f64 {
    let wp = (omega * omega - gamma1 * gamma1 / 16.0).sqrt();
    let denom = 2.0 * omega * omega + gamma1 * gamma1;
    let decay = (-0.75 * gamma1 * t).exp();
    let (sin, cos) = (wp * t).sin_cos();
    2.0 * omega / denom
        * (gamma1
            - decay * (gamma1 * cos - (4.0 * omega * omega - gamma1 * gamma1) / (4.0 * wp) * sin))
}
