//! Comb-line extraction from coherence traces, quadrature rotation, peak
//! counting and sweep maps over rotation angles or pulse positions.

mod comb;
mod maps;
mod shift;

pub use comb::{
    comb_amplitudes, count_peaks, quadrature_phase, residual_imaginary_fraction,
    rotate_quadrature, NUMERICAL_FLOOR,
};
pub use maps::{
    angle_map, angle_maps, cross_validate, AngleGrid, Axis, Backend, ComponentAgreement,
    CrossValidation, OracleSettings, SolverSettings, SpectrumMap,
};
pub use shift::{
    shift_range, Region, RegionRule, RegionSpan, RegionSummary, ShiftScan, ShiftScanSpec,
};

use crate::lindblad::LindbladError;
use crate::opalgebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("window {window:e} s is not a whole number of beat periods ({beat_period:e} s)")]
    BadWindow { window: f64, beat_period: f64 },
    #[error("every component is below the numerical floor")]
    AllZero,
    #[error("largest comb index must be a positive odd integer, got {0}")]
    InvalidComponentRange(i32),
    #[error("map has {found} values, axes need {expected}")]
    Shape { expected: usize, found: usize },
    #[error("non-finite map value {0}")]
    NonFinite(f64),
    #[error("pulse index {0} does not exist in the sequence")]
    NoMovingPulse(usize),
    #[error("shift range is empty or not finite")]
    InvalidRange,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
}
