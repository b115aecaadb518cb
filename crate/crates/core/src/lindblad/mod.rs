//! Master-equation oracle for a two-level system driven by a bichromatic
//! pulse train in the rotating frame.
//!
//! Pulses carry Rabi frequencies Ω, so a pulse of length Δt rotates the Bloch
//! vector by Ω·Δt and enters the Hamiltonian with coupling Ω/2. Decay is pure
//! radiative relaxation at rate Γ₁ with collapse operator σ⁻ = |g⟩⟨e|. The
//! carrier phase e^{±iδω t} runs continuously across pulses and repetitions.
//!
//! The recorded quantity is ⟨σ⁻⟩ = Tr(ρσ⁻) = ρ_eg, whose magnitude never
//! exceeds ½.

mod integrator;
mod pulse;

use num_complex::Complex64;

pub use integrator::{
    evolve, evolve_observed, evolve_with, rwa_hamiltonian, DensityMatrix, EvolveOptions,
    InitialState,
};
pub use pulse::{sample_envelopes, Envelope, Envelopes, PulseSequence, PulseSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LindbladError {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),
    #[error("sampling step {dt} s does not divide the window {window} s")]
    BadGrid { dt: f64, window: f64 },
    #[error("sampling step {dt:e} s under-resolves the Rabi rotation (limit {limit:e} s)")]
    OverlongStep { dt: f64, limit: f64 },
    #[error("integration step {step:e} s exceeds the resolution limit {limit:e} s")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("density matrix became non-physical at t = {t:e} s: {detail}")]
    NonPhysicalState { t: f64, detail: String },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}

/// Uniformly sampled ⟨σ⁻(t)⟩, sample `j` taken at `t0 + j·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTrace {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<Complex64>,
}

impl TimeTrace {
    pub fn new(t0: f64, dt: f64, samples: Vec<Complex64>) -> Result<Self, LindbladError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(LindbladError::InvalidTrace(format!("dt = {dt} is not positive")));
        }
        if let Some((j, s)) = samples
            .iter()
            .enumerate()
            .find(|(_, s)| s.norm().is_nan() || s.norm() > 0.5 + 1e-9)
        {
            return Err(LindbladError::InvalidTrace(format!(
                "sample {j} = {s} violates the coherence bound |⟨σ⁻⟩| <= 1/2"
            )));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Covered window `len·dt`.
    pub fn window(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }
}
