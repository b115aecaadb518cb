//! Symbolic construction of pulse-train evolution operators as signed words
//! over `{a, a†, b, b†}` and evaluation of the elastic side-peak amplitudes
//! `V_p(θ₋, θ₊)`.
//!
//! Pulses are listed in time order. The evolution operator is assembled as
//! `U_N ⋯ U_1`, so later pulses contribute letters further to the left.

mod mixing;
mod parse;
mod word;

pub use mixing::{
    carrier_counts, component_table, evaluate_component, evolution_operator, lambda0,
    matrix_element_terms, net_field, single_pulse_operator, AlgebraError, ComponentTable,
    MixingModel, RotationAngles, TermPair,
};
pub use parse::{parse_pair_terms, parse_sum, PairTerm, ParseError};
pub use word::{
    arrow_reduce, dagger, ground_state_prune, is_alternating, multiply, word_phase, Letter,
    OperatorSum, OperatorWord,
};
