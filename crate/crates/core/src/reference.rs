//! Reference symbolic tables and closed forms, kept verbatim, plus the
//! corrected variants where a reference entry is inconsistent with the algebra
//! that produces the rest of the table.
//!
//! Expressions use the notation accepted by [`crate::opalgebra::parse_sum`]
//! and [`crate::opalgebra::parse_pair_terms`].

/// Reference Λ⁰_N for N = 2..6, indexed by `N - 2`.
pub const LAMBDA0: [&str; 5] = [
    "1 - a† - ba† - b†",
    "1 - aa† - ab† - 2a† + a†ba† - ba† - b†",
    "1 - aa† - ab† - 2a† + a†ba† - 3ba† + (ba†)^2 - bb† - 2b† + b†aa† + b†ab† + b†ba†",
    "1 - 3aa† + aa†ba† - 3ab† + ab†aa† + (ab†)^2 + ab†ba† - 3a† + a†aa† + a†ab† + 4a†ba† \
     - (a†b)^2a† + a†bb† - 3ba† + (ba†)^2 - bb† - 2b† + b†aa† + b†ab† + b†ba†",
    "1 - 3aa† + aa†ba† - 3ab† + ab†aa† + (ab†)^2 + ab†ba† - 3a† + a†aa† + a†ab† + 4a†ba† \
     - (a†b)^2a† + a†bb† - 6ba† + ba†aa† + ba†ab† + 5(ba†)^2 - (ba†)^3 + ba†bb† - 3bb† \
     + bb†aa† + bb†ab† + bb†ba† - 3b† + 4b†aa† - b†aa†ba† + 4b†ab† - (b†a)^2a† - b†(ab†)^2 \
     - b†ab†ba† + 4b†ba† - b†(ba†)^2 + b†bb†",
];

/// Reference Λ→_N for N = 2..6.
pub const LAMBDA_RIGHT: [&str; 5] = [
    "-a† - b†",
    "-2a† + a†ba† - b†",
    "-2a† + a†ba† - 2b† + b†aa† + b†ab† + b†ba†",
    "-3a† + a†aa† + a†ab† + 4a†ba† - (a†b)^2a† + a†bb† - 2b† + b†aa† + b†ab† + b†ba†",
    "-3a† + a†aa† + a†ab† + 4a†ba† - (a†b)^2a† + a†bb† - 3b† + 4b†aa† - b†aa†ba† + 4b†ab† \
     - (b†a)^2a† - b†(ab†)^2 - b†ab†ba† + 4b†ba† - b†(ba†)^2 + b†bb†",
];

/// Reference Λ←_N for N = 2..6.
pub const LAMBDA_LEFT: [&str; 5] = [
    "1 - ab†",
    "1 - aa† - ab† - ba†",
    "1 - aa† - 3ab† + (ab†)^2 - ba† - bb†",
    "1 - 3aa† + aa†ba† - 3ab† + ab†aa† + (ab†)^2 + ab†ba† - 3ba† + a† - bb†",
    "1 - 3aa† + aa†ab† + aa†ba† + aa†bb† - 6ab† + ab†aa† + 5(ab†)^2 - (ab†)^3 + ab†ba† \
     + ab†bb† - 3ba† + ba†ab† + (ba†)^2 + ba†bb† - 3bb† + bb†ab†",
];

/// Λ←₅ with the `+a†` entry replaced by `+(ba†)^2`: a bare `a†` standing
/// leftmost in a left-acting operator is annihilated by the ground bra, and
/// the conjugate of the `(ab†)^2`-free part of Λ⁰₅ supplies `(ba†)^2`.
pub const LAMBDA_LEFT_5_CORRECTED: &str =
    "1 - 3aa† + aa†ba† - 3ab† + ab†aa† + (ab†)^2 + ab†ba† - 3ba† + (ba†)^2 - bb†";

/// Λ←_N with corrections applied.
pub fn lambda_left_corrected(n: usize) -> &'static str {
    if n == 5 {
        LAMBDA_LEFT_5_CORRECTED
    } else {
        LAMBDA_LEFT[n - 2]
    }
}

/// Two-pulse matrix element terms by component.
pub const M2: [(i32, &str); 3] = [(-1, "-σa†"), (1, "-σb† + ab†σa†"), (3, "+ab†σb†")];

/// Three-pulse matrix element terms by component.
pub const M3: [(i32, &str); 5] = [
    (-5, "-ba†σa†ba†"),
    (-3, "+σa†ba† - aa†σa†ba† + 2ba†σa†"),
    (-1, "-2σa† + 2aa†σa† - ab†σa†ba† + ba†σb†"),
    (1, "-σb† + aa†σb† + 2ab†σa†"),
    (3, "+ab†σb†"),
];

/// Four-pulse matrix element terms by component.
pub const M4: [(i32, &str); 7] = [
    (-5, "-ba†σa†ba†"),
    (-3, "+σa†ba† - aa†σa†ba† + 2ba†σa† - ba†σb†ba† - bb†σa†ba†"),
    (
        -1,
        "-2σa† + σb†ba† + 2aa†σa† - aa†σb†ba† - 3ab†σa†ba† + 2ba†σb† - ba†σb†aa† \
         + 2bb†σa† - bb†σb†ba†",
    ),
    (
        1,
        "-2σb† + σb†aa† + 2aa†σb† - aa†σb†aa† + 6ab†σa† - 3ab†σb†ba† + (ab†)^2σa†ba† \
         - ba†σb†ab† + 2bb†σb† - bb†σb†aa†",
    ),
    (
        3,
        "+σb†ab† - aa†σb†ab† + 6ab†σb† - 3ab†σb†aa† - 2(ab†)^2σa† + (ab†)^2σb†ba† \
         - bb†σb†ab†",
    ),
    (5, "-3ab†σb†ab† - 2(ab†)^2σb† + (ab†)^2σb†aa†"),
    (7, "+(ab†)^2σb†ab†"),
];

/// A closed form `V(θ₋, θ₊)`.
pub type ClosedForm = fn(f64, f64) -> f64;

fn s(x: f64) -> f64 {
    x.sin()
}

fn c(x: f64) -> f64 {
    x.cos()
}

/// Three-pulse side-peak amplitudes, reference form.
pub const V3: [(i32, ClosedForm); 5] = [
    (-5, |m, p| -s(m / 2.0).powi(3) * s(p / 2.0).powi(2) * c(m / 2.0)),
    (-3, |m, p| {
        (2.0 * c(m) + 1.0) * s(m / 2.0).powi(2) * s(p / 2.0) * c(p / 2.0)
    }),
    (-1, |m, p| -(3.0 * c(p) + 1.0) * s(2.0 * m) / 8.0),
    (1, |m, p| {
        (1.0 - 2.0 * c(m)) * s(p / 2.0) * c(m / 2.0).powi(2) * c(p / 2.0)
    }),
    (3, |m, p| s(m / 2.0) * s(p / 2.0).powi(2) * c(m / 2.0).powi(3)),
];

/// Four-pulse side-peak amplitudes, reference form.
pub const V4: [(i32, ClosedForm); 7] = [
    (7, |m, p| {
        s(m / 2.0).powi(2) * s(p / 2.0).powi(4) * s(m) / (c(p) + 1.0)
    }),
    (5, |m, p| {
        -(3.0 * c(m) + 2.0) * s(m / 2.0).powi(2) * s(p / 2.0).powi(3) / c(p / 2.0)
    }),
    (3, |m, p| {
        (15.0 * c(m) * c(p) + 11.0 * c(m) + c(p) + 1.0) * s(m) * s(p / 2.0).powi(2)
            / (4.0 * (c(p) + 1.0))
    }),
    (1, |m, p| {
        (s(m).powi(2) * (5.0 * c(p) + 1.0) - c(p) * (c(m) + 3.0)) * (p / 2.0).tan()
    }),
    (-1, |m, p| {
        s(m) / (8.0 * (c(p) + 1.0))
            * ((1.0 - c(p)).powi(2) * (-15.0 * c(m) - 1.0) + c(m) * (20.0 - 36.0 * c(p)))
    }),
    (-3, |m, p| {
        (c(m) / 2.0 * (3.0 * c(p) + 1.0) + c(p)) * s(m / 2.0).powi(2) * (p / 2.0).tan()
    }),
    (-5, |m, p| -s(m / 2.0).powi(3) * s(p / 2.0).powi(2) * c(m / 2.0)),
];

/// Whether the reference `V4` entry for `p` is finite at `θ₊`, i.e. away from the
/// lines where it carries tan(θ₊/2), 1/cos(θ₊/2) or 1/(1 + cos θ₊).
pub fn v4_reference_is_singular_near(p: i32, theta_plus: f64, margin: f64) -> bool {
    if p == -5 {
        return false;
    }
    let d = (theta_plus - std::f64::consts::PI).abs();
    d < margin
}

/// The reference `V4` entries rescaled by cos²(θ₊/2) (and V4₁ halved), which is
/// the form consistent with the four-pulse term table and its
/// cos⁴(θ₋/2)cos⁴(θ₊/2) prefactor.
pub fn v4_corrected(p: i32, theta_minus: f64, theta_plus: f64) -> Option<f64> {
    let (_, f) = V4.iter().find(|(q, _)| *q == p)?;
    let rescale = c(theta_plus / 2.0).powi(2);
    let halve = if p == 1 { 0.5 } else { 1.0 };
    Some(f(theta_minus, theta_plus) * rescale * halve)
}

/// Two candidate forms for the two-pulse `p = +3` amplitude.
pub mod two_pulse_p3 {
    /// Form quoted in the main discussion: ½ sin²(θ₊/2) cos θ₋.
    pub fn quoted(theta_minus: f64, theta_plus: f64) -> f64 {
        0.5 * (theta_plus / 2.0).sin().powi(2) * theta_minus.cos()
    }

    /// Form given by the word algebra: ½ sin θ₋ sin²(θ₊/2).
    pub fn word_algebra(theta_minus: f64, theta_plus: f64) -> f64 {
        0.5 * theta_minus.sin() * (theta_plus / 2.0).sin().powi(2)
    }
}
