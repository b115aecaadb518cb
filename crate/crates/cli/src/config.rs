//! JSON run configuration. Frequencies are in Hz (divided by 2π), durations
//! in ns and angles in radians. Unknown keys are rejected at every level.

use std::f64::consts::TAU;
use std::path::Path;

use qwm_core::lindblad::PulseSpec;
use qwm_core::{alternating_pattern, Carrier};
use serde::Deserialize;

use crate::error::CliError;

const NS: f64 = 1e-9;

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Carrier symbols such as `"-+-"`; overrides `pulses`.
    pub pattern: Option<String>,
    /// Number of alternating pulses starting at ω₋.
    pub pulses: Option<usize>,
    #[serde(default)]
    pub backend: BackendChoice,
    #[serde(default)]
    pub sequence: Vec<PulseEntry>,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub fit: Fit,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    #[default]
    Algebra,
    Oracle,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PulseEntry {
    pub carrier: String,
    pub duration_ns: f64,
    /// Idle time after the previous pulse ends; negative values overlap it.
    #[serde(default)]
    pub gap_ns: f64,
    /// Rotation angle; takes precedence over `rabi_hz`.
    pub angle: Option<f64>,
    pub rabi_hz: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub gamma1_hz: f64,
    pub detuning_hz: f64,
    pub rabi_hz: f64,
    /// Pulse-train repetitions per beat period.
    pub repetitions: usize,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            gamma1_hz: 1.64e6,
            detuning_hz: 25e3,
            rabi_hz: 20e6,
            repetitions: 16,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub n_theta: usize,
    /// Explicit angles for both map axes; replaces the uniform `n_theta` grid.
    pub theta_values: Option<Vec<f64>>,
    pub shift_start_ns: f64,
    pub shift_stop_ns: f64,
    pub shift_step_ns: f64,
    /// Index of the moving pulse; the middle pulse when absent.
    pub moving: Option<usize>,
    /// Rabi frequencies applied to every pulse during a shift scan.
    pub rabi_hz: Vec<f64>,
    /// Largest |p| reported; 2N − 1 when absent.
    pub components: Option<i32>,
    pub peak_threshold: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n_theta: 65,
            theta_values: None,
            shift_start_ns: -50.0,
            shift_stop_ns: 50.0,
            shift_step_ns: 1.0,
            moving: None,
            rabi_hz: Vec::new(),
            components: None,
            peak_threshold: 0.02,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub dt_ns: f64,
    pub substeps: usize,
    /// Largest mirror mismatch accepted by the two-pulse symmetry check,
    /// relative to the largest amplitude of the scan.
    pub tolerance: f64,
}

impl Default for Solver {
    fn default() -> Self {
        Self {
            dt_ns: 0.5,
            substeps: 20,
            tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    /// File stem for CSV outputs, relative to the output directory.
    pub csv_path: Option<String>,
    /// File stem for SVG outputs, relative to the output directory.
    pub svg_path: Option<String>,
    /// Also write the continuous spectrum of the trace.
    pub full_fft: bool,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Fit {
    /// CSV with header `t_ns,value`; a synthetic trace is generated when
    /// absent.
    pub trace_path: Option<String>,
    pub dt_ns: f64,
    pub duration_ns: f64,
    /// Standard deviation of additive Gaussian noise on synthetic traces.
    pub noise: f64,
    /// Drive amplitudes of a linearity sweep, in arbitrary units.
    pub amplitudes: Vec<f64>,
    /// Rabi frequency per unit drive amplitude in the sweep.
    pub rabi_hz_per_amplitude: f64,
    pub max_iterations: usize,
}

impl Default for Fit {
    fn default() -> Self {
        Self {
            trace_path: None,
            dt_ns: 0.5,
            duration_ns: 500.0,
            noise: 0.0,
            amplitudes: Vec::new(),
            rabi_hz_per_amplitude: 4e6,
            max_iterations: 500,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(p) = &self.pattern {
            parse_pattern(p)?;
        }
        if self.pulses == Some(0) {
            return bad("pulses must be at least 1".into());
        }
        for (i, e) in self.sequence.iter().enumerate() {
            parse_carrier(&e.carrier)?;
            positive(&format!("sequence[{i}].duration_ns"), e.duration_ns)?;
            if !e.gap_ns.is_finite() {
                return bad(format!("sequence[{i}].gap_ns must be finite"));
            }
            if let Some(a) = e.angle {
                if !(a.is_finite() && a >= 0.0) {
                    return bad(format!("sequence[{i}].angle must be >= 0"));
                }
            }
            if let Some(r) = e.rabi_hz {
                if !(r.is_finite() && r >= 0.0) {
                    return bad(format!("sequence[{i}].rabi_hz must be >= 0"));
                }
            }
        }
        let p = &self.physics;
        if !(p.gamma1_hz.is_finite() && p.gamma1_hz >= 0.0) {
            return bad("physics.gamma1_hz must be >= 0".into());
        }
        positive("physics.detuning_hz", p.detuning_hz)?;
        positive("physics.rabi_hz", p.rabi_hz)?;
        if p.repetitions == 0 {
            return bad("physics.repetitions must be at least 1".into());
        }
        let g = &self.grid;
        if g.n_theta == 0 {
            return bad("grid.n_theta must be at least 1".into());
        }
        if let Some(v) = &g.theta_values {
            if v.is_empty() || v.iter().any(|t| !t.is_finite()) {
                return bad("grid.theta_values must be a non-empty list of finite angles".into());
            }
        }
        if !(g.shift_start_ns.is_finite() && g.shift_stop_ns.is_finite()) {
            return bad("grid shift range must be finite".into());
        }
        if g.shift_stop_ns < g.shift_start_ns {
            return bad("grid.shift_stop_ns is before grid.shift_start_ns".into());
        }
        if g.shift_stop_ns > g.shift_start_ns {
            positive("grid.shift_step_ns", g.shift_step_ns)?;
        }
        for r in &g.rabi_hz {
            positive("grid.rabi_hz entries", *r)?;
        }
        if let Some(c) = g.components {
            if c < 1 || c % 2 == 0 {
                return bad(format!("grid.components must be a positive odd integer, got {c}"));
            }
        }
        if !(g.peak_threshold > 0.0 && g.peak_threshold < 1.0) {
            return bad("grid.peak_threshold must lie in (0, 1)".into());
        }
        positive("solver.dt_ns", self.solver.dt_ns)?;
        positive("solver.tolerance", self.solver.tolerance)?;
        if self.solver.substeps == 0 {
            return bad("solver.substeps must be at least 1".into());
        }
        let f = &self.fit;
        positive("fit.dt_ns", f.dt_ns)?;
        positive("fit.duration_ns", f.duration_ns)?;
        positive("fit.rabi_hz_per_amplitude", f.rabi_hz_per_amplitude)?;
        if !(f.noise.is_finite() && f.noise >= 0.0) {
            return bad("fit.noise must be >= 0".into());
        }
        for a in &f.amplitudes {
            positive("fit.amplitudes entries", *a)?;
        }
        if f.max_iterations == 0 {
            return bad("fit.max_iterations must be at least 1".into());
        }
        Ok(())
    }

    /// Carrier pattern from `pattern`, `pulses` or the sequence, in that
    /// order of precedence.
    pub fn carrier_pattern(&self) -> Result<Vec<Carrier>, CliError> {
        if let Some(p) = &self.pattern {
            return parse_pattern(p);
        }
        if let Some(n) = self.pulses {
            return Ok(alternating_pattern(n));
        }
        if !self.sequence.is_empty() {
            return self.sequence.iter().map(|e| parse_carrier(&e.carrier)).collect();
        }
        Err(CliError::Config(
            "no pattern: give pattern, pulses or sequence".into(),
        ))
    }

    /// Pulses of the sequence laid out from t = 0, each starting `gap_ns`
    /// after the previous one ends.
    pub fn pulse_specs(&self) -> Result<Vec<PulseSpec>, CliError> {
        let mut t = 0.0;
        let mut out = Vec::with_capacity(self.sequence.len());
        for (i, e) in self.sequence.iter().enumerate() {
            let carrier = parse_carrier(&e.carrier)?;
            let duration = e.duration_ns * NS;
            let rabi = match (e.angle, e.rabi_hz) {
                (Some(angle), Some(_)) => {
                    log::warn!("sequence[{i}] gives both angle and rabi_hz; using the angle");
                    angle / duration
                }
                (Some(angle), None) => angle / duration,
                (None, Some(r)) => TAU * r,
                (None, None) => TAU * self.physics.rabi_hz,
            };
            t += e.gap_ns * NS;
            if t < -1e-6 * NS {
                return Err(CliError::Config(format!(
                    "sequence[{i}] starts at {:.3} ns, before t = 0",
                    t / NS
                )));
            }
            let start = t.max(0.0);
            let spec = PulseSpec::rectangular(carrier, start, duration, rabi)
                .map_err(|err| CliError::Config(format!("sequence[{i}]: {err}")))?;
            out.push(spec);
            t = start + duration;
        }
        Ok(out)
    }

    pub fn gamma1(&self) -> f64 {
        TAU * self.physics.gamma1_hz
    }

    pub fn detuning(&self) -> f64 {
        TAU * self.physics.detuning_hz
    }

    pub fn rabi(&self) -> f64 {
        TAU * self.physics.rabi_hz
    }

    pub fn csv_stem<'a>(&'a self, default: &'a str) -> &'a str {
        self.output.csv_path.as_deref().unwrap_or(default)
    }

    pub fn svg_stem<'a>(&'a self, default: &'a str) -> &'a str {
        self.output.svg_path.as_deref().unwrap_or(default)
    }
}

pub fn parse_carrier(s: &str) -> Result<Carrier, CliError> {
    s.parse()
        .map_err(|e: qwm_core::ParseCarrierError| CliError::Config(e.to_string()))
}

pub fn parse_pattern(s: &str) -> Result<Vec<Carrier>, CliError> {
    let pattern: Vec<Carrier> = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| parse_carrier(&c.to_string()))
        .collect::<Result<_, _>>()?;
    if pattern.is_empty() {
        return Err(CliError::Config("pattern is empty".into()));
    }
    Ok(pattern)
}
