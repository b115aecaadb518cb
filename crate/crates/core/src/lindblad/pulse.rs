use crate::Carrier;

use super::LindbladError;

/// Rise profile of a pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Rectangular,
    /// Raised-cosine ramps of the given length (seconds) at both ends.
    CosineRamp { edge: f64 },
}

/// One drive pulse. Times are seconds, `rabi` is the Rabi frequency Ω in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSpec {
    pub carrier: Carrier,
    pub start: f64,
    pub duration: f64,
    pub rabi: f64,
    pub envelope: Envelope,
}

impl PulseSpec {
    pub fn new(
        carrier: Carrier,
        start: f64,
        duration: f64,
        rabi: f64,
        envelope: Envelope,
    ) -> Result<Self, LindbladError> {
        let bad = |reason: String| Err(LindbladError::InvalidPulse(reason));
        if !(start.is_finite() && duration.is_finite() && rabi.is_finite()) {
            return bad("pulse parameters must be finite".into());
        }
        if duration <= 0.0 {
            return bad(format!("duration {duration} s is not positive"));
        }
        if rabi < 0.0 {
            return bad(format!("Rabi frequency {rabi} rad/s is negative"));
        }
        if let Envelope::CosineRamp { edge } = envelope {
            if !(edge > 0.0 && edge < duration / 2.0) {
                return bad(format!(
                    "ramp edge {edge} s must lie in (0, duration/2 = {})",
                    duration / 2.0
                ));
            }
        }
        Ok(Self {
            carrier,
            start,
            duration,
            rabi,
            envelope,
        })
    }

    pub fn rectangular(
        carrier: Carrier,
        start: f64,
        duration: f64,
        rabi: f64,
    ) -> Result<Self, LindbladError> {
        Self::new(carrier, start, duration, rabi, Envelope::Rectangular)
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn center(&self) -> f64 {
        self.start + self.duration / 2.0
    }

    /// Rotation angle Ω·Δt of a rectangular pulse (ramped pulses lose the ramp
    /// area deficit).
    pub fn area(&self) -> f64 {
        match self.envelope {
            Envelope::Rectangular => self.rabi * self.duration,
            Envelope::CosineRamp { edge } => self.rabi * (self.duration - edge),
        }
    }

    /// Times inside the pulse at which the envelope or its derivative jumps.
    pub(crate) fn edges(&self) -> Vec<f64> {
        match self.envelope {
            Envelope::Rectangular => vec![self.start, self.end()],
            Envelope::CosineRamp { edge } => vec![
                self.start,
                self.start + edge,
                self.end() - edge,
                self.end(),
            ],
        }
    }

    /// Envelope at `t` relative to the start of the repetition. Intervals are
    /// half-open, `[start, end)`.
    pub fn value(&self, t: f64) -> f64 {
        if t < self.start || t >= self.end() {
            return 0.0;
        }
        self.shape(t)
    }

    /// Analytic piece of the envelope valid on the segment containing `t`,
    /// evaluated without the half-open cut so that segment end points see the
    /// limit from inside.
    pub(crate) fn shape(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Rectangular => self.rabi,
            Envelope::CosineRamp { edge } => {
                let from_start = t - self.start;
                let to_end = self.end() - t;
                let ramp = |x: f64| 0.5 * (1.0 - (std::f64::consts::PI * x / edge).cos());
                if from_start < edge {
                    self.rabi * ramp(from_start.max(0.0))
                } else if to_end < edge {
                    self.rabi * ramp(to_end.max(0.0))
                } else {
                    self.rabi
                }
            }
        }
    }
}

/// A pulse train repeated every `repetition_period`, with the beat detuning
/// δω and radiative decay rate Γ₁ (both rad/s).
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pub pulses: Vec<PulseSpec>,
    pub detuning: f64,
    pub gamma1: f64,
    pub repetition_period: f64,
}

impl PulseSequence {
    pub fn new(
        pulses: Vec<PulseSpec>,
        detuning: f64,
        gamma1: f64,
        repetition_period: f64,
    ) -> Result<Self, LindbladError> {
        let bad = |reason: String| Err(LindbladError::InvalidSequence(reason));
        if !(detuning.is_finite() && detuning >= 0.0) {
            return bad(format!("detuning {detuning} rad/s must be finite and >= 0"));
        }
        if !(gamma1.is_finite() && gamma1 >= 0.0) {
            return bad(format!("decay rate {gamma1} rad/s must be finite and >= 0"));
        }
        if !(repetition_period.is_finite() && repetition_period > 0.0) {
            return bad(format!("repetition period {repetition_period} s must be positive"));
        }
        if let Some(p) = pulses.iter().find(|p| p.start < 0.0) {
            return bad(format!("pulse starts at {} s, before the repetition origin", p.start));
        }
        let last = pulses.iter().map(PulseSpec::end).fold(0.0, f64::max);
        if last >= repetition_period {
            return bad(format!(
                "last pulse ends at {last} s, not before the repetition period {repetition_period} s"
            ));
        }
        Ok(Self {
            pulses,
            detuning,
            gamma1,
            repetition_period,
        })
    }

    /// Beat period π/δω of the bichromatic envelope.
    pub fn beat_period(&self) -> f64 {
        std::f64::consts::PI / self.detuning
    }

    /// (Ω₋(t), Ω₊(t)) at absolute time `t ≥ 0`.
    pub fn envelopes_at(&self, t: f64) -> (f64, f64) {
        if t < 0.0 {
            return (0.0, 0.0);
        }
        let local = t.rem_euclid(self.repetition_period);
        let mut out = (0.0, 0.0);
        for p in &self.pulses {
            let v = p.value(local);
            match p.carrier {
                Carrier::Minus => out.0 += v,
                Carrier::Plus => out.1 += v,
            }
        }
        out
    }

    /// Sorted envelope break points in `[0, t_end]`.
    pub(crate) fn breakpoints(&self, t_end: f64) -> Vec<f64> {
        let mut edges: Vec<f64> = self.pulses.iter().flat_map(PulseSpec::edges).collect();
        edges.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let offset = k as f64 * self.repetition_period;
            if offset > t_end {
                break;
            }
            out.extend(edges.iter().map(|e| e + offset).filter(|t| *t <= t_end));
            k += 1;
        }
        out.dedup();
        out
    }

    /// Largest combined drive Ω₋ + Ω₊ anywhere in the train.
    pub fn peak_rabi(&self) -> f64 {
        let points = self.breakpoints(self.repetition_period);
        points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.pulses
                    .iter()
                    .filter(|p| p.start <= mid && mid < p.end())
                    .map(|p| p.rabi)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Envelopes sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelopes {
    pub dt: f64,
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

pub(crate) fn sample_count(dt: f64, window: f64) -> Result<usize, LindbladError> {
    if !(dt.is_finite() && dt > 0.0 && window.is_finite() && window > 0.0) {
        return Err(LindbladError::BadGrid { dt, window });
    }
    let n = (window / dt).round();
    if n < 1.0 || (n * dt - window).abs() > 1e-3 * dt {
        return Err(LindbladError::BadGrid { dt, window });
    }
    Ok(n as usize)
}

/// Samples Ω₋(t) and Ω₊(t) at `t = i·dt` over `[0, window)`.
///
/// Rectangular edges snap to the nearest sample; ramped pulses are sampled
/// from their analytic shape.
pub fn sample_envelopes(
    seq: &PulseSequence,
    dt: f64,
    window: f64,
) -> Result<Envelopes, LindbladError> {
    let n = sample_count(dt, window)?;
    let mut minus = vec![0.0; n];
    let mut plus = vec![0.0; n];
    let mut k = 0u64;
    loop {
        let offset = k as f64 * seq.repetition_period;
        if offset >= window {
            break;
        }
        for p in &seq.pulses {
            let target = match p.carrier {
                Carrier::Minus => &mut minus,
                Carrier::Plus => &mut plus,
            };
            let first = ((p.start + offset) / dt).round().max(0.0) as usize;
            let last = (((p.end() + offset) / dt).round() as usize).min(n);
            for (i, slot) in target.iter_mut().enumerate().take(last).skip(first) {
                *slot += match p.envelope {
                    Envelope::Rectangular => p.rabi,
                    Envelope::CosineRamp { .. } => p.value(i as f64 * dt - offset),
                };
            }
        }
        k += 1;
    }
    let peak = minus
        .iter()
        .zip(&plus)
        .map(|(a, b)| a + b)
        .fold(0.0, f64::max);
    if peak > 0.0 && dt > 1.0 / (20.0 * peak) {
        return Err(LindbladError::OverlongStep {
            dt,
            limit: 1.0 / (20.0 * peak),
        });
    }
    Ok(Envelopes { dt, minus, plus })
}
