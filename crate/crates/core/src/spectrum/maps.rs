use num_complex::Complex64;
use rayon::prelude::*;

use super::comb::{comb_amplitudes, quadrature_phase};
use super::SpectrumError;
use crate::lindblad::{evolve_with, EvolveOptions, PulseSequence, PulseSpec};
use crate::opalgebra::{carrier_counts, ComponentTable, MixingModel, RotationAngles};
use crate::stats::pearson;
use crate::Carrier;

/// A named axis of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            values,
        }
    }
}

/// One component over a 2-D sweep. Values are stored with the x index
/// outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMap {
    pub x: Axis,
    pub y: Axis,
    pub component: i32,
    values: Vec<f64>,
}

impl SpectrumMap {
    pub fn new(x: Axis, y: Axis, component: i32, values: Vec<f64>) -> Result<Self, SpectrumError> {
        if values.len() != x.values.len() * y.values.len() {
            return Err(SpectrumError::Shape {
                expected: x.values.len() * y.values.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SpectrumError::NonFinite(*v));
        }
        Ok(Self {
            x,
            y,
            component,
            values,
        })
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y.values.len() + iy]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(x, y, value)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let ny = self.y.values.len();
        self.values.iter().enumerate().map(move |(k, v)| {
            (self.x.values[k / ny], self.y.values[k % ny], *v)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Rotation-angle grid over (θ₋, θ₊).
#[derive(Clone, Debug, PartialEq)]
pub struct AngleGrid {
    pub theta_minus: Vec<f64>,
    pub theta_plus: Vec<f64>,
}

impl AngleGrid {
    /// `n × n` grid at `k·2π/n`, covering [0, 2π).
    pub fn uniform(n: usize) -> Self {
        let axis: Vec<f64> = (0..n)
            .map(|k| k as f64 * std::f64::consts::TAU / n as f64)
            .collect();
        Self {
            theta_minus: axis.clone(),
            theta_plus: axis,
        }
    }

    pub fn points(&self) -> Vec<RotationAngles> {
        self.theta_minus
            .iter()
            .flat_map(|m| {
                self.theta_plus
                    .iter()
                    .map(move |p| RotationAngles::new(*m, *p))
            })
            .collect()
    }

    fn axes(&self) -> (Axis, Axis) {
        (
            Axis::new("theta_minus", self.theta_minus.clone()),
            Axis::new("theta_plus", self.theta_plus.clone()),
        )
    }
}

/// Master-equation settings shared by oracle sweeps. The pulse train repeats
/// `repetitions` times per beat period π/δω and the trace covers exactly one
/// beat period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub gamma1: f64,
    pub detuning: f64,
    pub repetitions: usize,
    pub dt: f64,
    pub substeps: usize,
}

impl SolverSettings {
    pub fn beat_period(&self) -> f64 {
        std::f64::consts::PI / self.detuning
    }

    pub fn repetition_period(&self) -> f64 {
        self.beat_period() / self.repetitions as f64
    }

    /// Evolves `pulses` and extracts comb components up to `max_p`.
    pub fn spectrum(
        &self,
        pulses: Vec<PulseSpec>,
        max_p: i32,
    ) -> Result<ComponentTable<Complex64>, SpectrumError> {
        let counts = carrier_counts(&pulses.iter().map(|p| p.carrier).collect::<Vec<_>>());
        let n = pulses.len();
        let seq = PulseSequence::new(pulses, self.detuning, self.gamma1, self.repetition_period())?;
        let opts = EvolveOptions::new(self.dt, self.beat_period()).substeps(self.substeps);
        let trace = evolve_with(&seq, &opts)?;
        let mut table = comb_amplitudes(&trace, self.detuning, max_p)?;
        table.pulse_count = n;
        table.carrier_counts = counts;
        Ok(table)
    }
}

/// Oracle for angle maps: pulses run back to back at a fixed Rabi frequency
/// and the rotation angle is set by each pulse's duration, θ = Ω·Δt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSettings {
    pub rabi: f64,
    pub solver: SolverSettings,
}

impl OracleSettings {
    /// Pulses realising `angles` for `pattern`; zero-angle pulses are left out.
    pub fn pulses(
        &self,
        pattern: &[Carrier],
        angles: RotationAngles,
    ) -> Result<Vec<PulseSpec>, SpectrumError> {
        let mut t = 0.0;
        let mut out = Vec::with_capacity(pattern.len());
        for c in pattern {
            let theta = match c {
                Carrier::Minus => angles.theta_minus,
                Carrier::Plus => angles.theta_plus,
            };
            if theta <= 0.0 {
                continue;
            }
            let duration = theta / self.rabi;
            out.push(PulseSpec::rectangular(*c, t, duration, self.rabi)?);
            t += duration;
        }
        Ok(out)
    }

    pub fn table(
        &self,
        pattern: &[Carrier],
        angles: RotationAngles,
    ) -> Result<ComponentTable<Complex64>, SpectrumError> {
        let max_p = 2 * pattern.len() as i32 - 1;
        let mut table = self.solver.spectrum(self.pulses(pattern, angles)?, max_p)?;
        table.pulse_count = pattern.len();
        table.carrier_counts = carrier_counts(pattern);
        Ok(table)
    }

    /// Complex comb tables for every grid point, in [`AngleGrid::points`]
    /// order.
    pub fn grid_tables(
        &self,
        pattern: &[Carrier],
        grid: &AngleGrid,
    ) -> Result<Vec<ComponentTable<Complex64>>, SpectrumError> {
        grid.points()
            .into_par_iter()
            .map(|a| self.table(pattern, a))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Algebra,
    Oracle(OracleSettings),
}

fn admissible(pattern: &[Carrier]) -> Vec<i32> {
    let max = 2 * pattern.len() as i32 - 1;
    (-max..=max).step_by(2).collect()
}

/// Maps of every component for a pattern. The algebra backend returns the
/// components that carry terms; the oracle backend returns all odd
/// `|p| ≤ 2N − 1`, rotated by one phase shared across the whole grid.
pub fn angle_maps(
    pattern: &[Carrier],
    grid: &AngleGrid,
    backend: &Backend,
) -> Result<Vec<SpectrumMap>, SpectrumError> {
    let (x, y) = grid.axes();
    let points = grid.points();
    match backend {
        Backend::Algebra => {
            let model = MixingModel::new(pattern)?;
            let tables: Vec<ComponentTable> = points.par_iter().map(|a| model.table(*a)).collect();
            model
                .support()
                .into_iter()
                .map(|p| {
                    let values = tables.iter().map(|t| t.value(p)).collect();
                    SpectrumMap::new(x.clone(), y.clone(), p, values)
                })
                .collect()
        }
        Backend::Oracle(settings) => {
            if pattern.is_empty() {
                return Err(crate::opalgebra::AlgebraError::EmptySequence.into());
            }
            let tables = settings.grid_tables(pattern, grid)?;
            let phi = quadrature_phase(tables.iter().flat_map(|t| t.iter().map(|(_, v)| v)))
                .ok_or(SpectrumError::AllZero)?;
            let rot = Complex64::from_polar(1.0, -phi);
            admissible(pattern)
                .into_iter()
                .map(|p| {
                    let values = tables
                        .iter()
                        .map(|t| (t.get(p).unwrap_or_default() * rot).re)
                        .collect();
                    SpectrumMap::new(x.clone(), y.clone(), p, values)
                })
                .collect()
        }
    }
}

/// Map of a single component.
pub fn angle_map(
    pattern: &[Carrier],
    p: i32,
    grid: &AngleGrid,
    backend: &Backend,
) -> Result<SpectrumMap, SpectrumError> {
    let max = 2 * pattern.len() as i32 - 1;
    if p % 2 == 0 || p.abs() > max {
        return Err(crate::opalgebra::AlgebraError::InvalidComponent {
            p,
            pulse_count: pattern.len(),
            max,
        }
        .into());
    }
    let maps = angle_maps(pattern, grid, backend)?;
    match maps.into_iter().find(|m| m.component == p) {
        Some(m) => Ok(m),
        None => {
            let (x, y) = grid.axes();
            let n = x.values.len() * y.values.len();
            SpectrumMap::new(x, y, p, vec![0.0; n])
        }
    }
}

/// Agreement of one component between the algebra and the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentAgreement {
    pub p: i32,
    pub pearson: f64,
}

/// Oracle maps scaled onto the algebra with one complex factor.
#[derive(Clone, Debug)]
pub struct CrossValidation {
    /// Least-squares factor `c` in `oracle ≈ c · algebra`.
    pub scale: Complex64,
    pub components: Vec<ComponentAgreement>,
    /// Real part of `oracle / c` per component, grid-point order.
    pub scaled_oracle: Vec<(i32, Vec<f64>)>,
    pub algebra: Vec<(i32, Vec<f64>)>,
    /// Largest oracle magnitude at components the algebra leaves empty,
    /// relative to the largest magnitude overall.
    pub off_support_fraction: f64,
}

impl CrossValidation {
    pub fn min_pearson(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.pearson)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled_oracle(&self, p: i32) -> Option<&[f64]> {
        self.scaled_oracle
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, v)| v.as_slice())
    }
}

/// Compares oracle and algebra maps over `grid` after fitting one complex
/// scale shared by every component.
pub fn cross_validate(
    pattern: &[Carrier],
    grid: &AngleGrid,
    settings: &OracleSettings,
) -> Result<CrossValidation, SpectrumError> {
    let model = MixingModel::new(pattern)?;
    let points = grid.points();
    let oracle = settings.grid_tables(pattern, grid)?;
    let support = model.support();
    let algebra: Vec<(i32, Vec<f64>)> = support
        .iter()
        .map(|p| {
            let v = points
                .iter()
                .map(|a| model.evaluate(*p, *a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((*p, v))
        })
        .collect::<Result<_, SpectrumError>>()?;

    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (p, values) in &algebra {
        for (a, t) in values.iter().zip(&oracle) {
            num += t.get(*p).unwrap_or_default() * *a;
            den += a * a;
        }
    }
    if den == 0.0 || num.norm() < super::comb::NUMERICAL_FLOOR {
        return Err(SpectrumError::AllZero);
    }
    let scale = num / den;

    let mut scaled_oracle = Vec::new();
    let mut components = Vec::new();
    for (p, values) in &algebra {
        let o: Vec<f64> = oracle
            .iter()
            .map(|t| (t.get(*p).unwrap_or_default() / scale).re)
            .collect();
        components.push(ComponentAgreement {
            p: *p,
            pearson: pearson(values, &o),
        });
        scaled_oracle.push((*p, o));
    }

    let mut largest: f64 = 0.0;
    let mut off: f64 = 0.0;
    for t in &oracle {
        for (p, v) in t.iter() {
            largest = largest.max(v.norm());
            if !support.contains(&p) {
                off = off.max(v.norm());
            }
        }
    }
    Ok(CrossValidation {
        scale,
        components,
        scaled_oracle,
        algebra,
        off_support_fraction: if largest > 0.0 { off / largest } else { 0.0 },
    })
}
