//! Quantum wave mixing of short bichromatic pulse trains on a single two-level
//! scatterer.
//!
//! * [`opalgebra`] builds evolution operators as signed operator words and
//!   evaluates elastic side-peak amplitudes as functions of rotation angles.
//! * [`lindblad`] integrates the master equation under the bichromatic RWA
//!   Hamiltonian and records the coherence trace.
//! * [`spectrum`] extracts comb components from traces and assembles sweep maps.
//! * [`calib`] holds the damped Rabi solution and the `(Ω, Γ₁)` fit.
//! * [`reference`] carries the reference term lists and closed forms used as
//!   golden data.

pub mod calib;
mod carrier;
pub mod lindblad;
pub mod opalgebra;
pub mod reference;
pub mod spectrum;
pub mod stats;

pub use carrier::{Carrier, ParseCarrierError};

/// Two-pulse and longer patterns used throughout: alternating carriers that
/// start at ω₋.
pub fn alternating_pattern(n: usize) -> Vec<Carrier> {
    (0..n)
        .map(|i| if i % 2 == 0 { Carrier::Minus } else { Carrier::Plus })
        .collect()
}
