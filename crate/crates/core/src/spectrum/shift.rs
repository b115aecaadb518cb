use num_complex::Complex64;
use rayon::prelude::*;

use super::comb::count_peaks;
use super::maps::{Axis, SolverSettings, SpectrumMap};
use super::SpectrumError;
use crate::lindblad::PulseSpec;
use crate::opalgebra::ComponentTable;

/// Sweep of one pulse's position through an otherwise fixed train.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftScanSpec {
    /// Nominal layout; start times may be negative, the scan translates the
    /// whole train so that every configuration starts at or after zero.
    pub pulses: Vec<PulseSpec>,
    pub moving: usize,
    /// Displacements of the moving pulse's centre from its nominal centre
    /// (seconds). These are the `t₂center` values.
    pub shifts: Vec<f64>,
    /// Rabi frequencies applied to every pulse; `None` keeps each pulse's own.
    pub rabi_values: Option<Vec<f64>>,
    pub components: Vec<i32>,
    pub solver: SolverSettings,
}

/// Evenly spaced shifts from `start` to `stop` inclusive.
pub fn shift_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || stop <= start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// Peak-count classes of the three-pulse scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Moving pulse outside the train: (i).
    Detached,
    /// Moving pulse overlapping a neighbour: (ii).
    Overlap,
    /// Pulses interleaved without overlap: (iii).
    Interleaved,
    Transition,
}

/// Peak counts that identify each region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionRule {
    pub detached: usize,
    pub interleaved: usize,
    pub overlap_min: usize,
    /// Runs with fewer points than this are treated as transitions.
    pub min_run: usize,
}

impl Default for RegionRule {
    fn default() -> Self {
        Self {
            detached: 3,
            interleaved: 5,
            overlap_min: 7,
            min_run: 3,
        }
    }
}

impl RegionRule {
    pub fn classify(&self, count: usize) -> Region {
        if count >= self.overlap_min {
            Region::Overlap
        } else if count == self.detached {
            Region::Detached
        } else if count == self.interleaved {
            Region::Interleaved
        } else {
            Region::Transition
        }
    }
}

/// A maximal run of scan points with the same region label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionSpan {
    pub region: Region,
    pub first: f64,
    pub last: f64,
    pub points: usize,
}

/// Regions of a scan and the boundaries between consecutive settled regions.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSummary {
    pub spans: Vec<RegionSpan>,
    pub boundaries: Vec<f64>,
}

impl RegionSummary {
    /// Labels each point, merges equal neighbours, demotes short runs to
    /// transitions, and places a boundary midway between the last point of
    /// one settled region and the first point of the next.
    pub fn from_counts(shifts: &[f64], counts: &[usize], rule: &RegionRule) -> Self {
        let mut raw: Vec<RegionSpan> = Vec::new();
        for (t, c) in shifts.iter().zip(counts) {
            let region = rule.classify(*c);
            match raw.last_mut() {
                Some(span) if span.region == region => {
                    span.last = *t;
                    span.points += 1;
                }
                _ => raw.push(RegionSpan {
                    region,
                    first: *t,
                    last: *t,
                    points: 1,
                }),
            }
        }
        let settled: Vec<RegionSpan> = raw
            .into_iter()
            .filter(|s| s.region != Region::Transition && s.points >= rule.min_run)
            .collect();
        let mut spans: Vec<RegionSpan> = Vec::new();
        for s in settled {
            match spans.last_mut() {
                Some(prev) if prev.region == s.region => {
                    prev.last = s.last;
                    prev.points += s.points;
                }
                _ => spans.push(s),
            }
        }
        let boundaries = spans
            .windows(2)
            .map(|w| 0.5 * (w[0].last + w[1].first))
            .collect();
        Self { spans, boundaries }
    }

    pub fn regions(&self) -> Vec<Region> {
        self.spans.iter().map(|s| s.region).collect()
    }
}

/// Result of a shift scan: one complex comb table per (shift, Rabi) point.
#[derive(Clone, Debug)]
pub struct ShiftScan {
    pub shifts: Vec<f64>,
    /// Rabi frequencies of the sweep; empty when pulses keep their own.
    pub rabi_values: Vec<f64>,
    pub components: Vec<i32>,
    tables: Vec<ComponentTable<Complex64>>,
}

impl ShiftScan {
    fn columns(&self) -> usize {
        self.rabi_values.len().max(1)
    }

    pub fn table(&self, shift_index: usize, rabi_index: usize) -> &ComponentTable<Complex64> {
        &self.tables[shift_index * self.columns() + rabi_index]
    }

    /// |V_p| over (shift, Rabi). The y axis is a single zero entry when the
    /// pulses keep their own amplitudes.
    pub fn magnitude_map(&self, p: i32) -> Result<SpectrumMap, SpectrumError> {
        let y = if self.rabi_values.is_empty() {
            vec![0.0]
        } else {
            self.rabi_values.clone()
        };
        let values = self
            .tables
            .iter()
            .map(|t| t.get(p).map(|v| v.norm()).unwrap_or(0.0))
            .collect();
        SpectrumMap::new(
            Axis::new("t2_center", self.shifts.clone()),
            Axis::new("rabi", y),
            p,
            values,
        )
    }

    /// Largest |V_p| over the Rabi sweep, per shift.
    pub fn envelope(&self, p: i32) -> Vec<f64> {
        let cols = self.columns();
        (0..self.shifts.len())
            .map(|i| {
                (0..cols)
                    .map(|k| self.tables[i * cols + k].get(p).map(|v| v.norm()).unwrap_or(0.0))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Components counted per shift: a component is lit when its envelope
    /// reaches `threshold` of the strongest component at that shift.
    pub fn peak_counts(&self, threshold: f64) -> Vec<usize> {
        let envelopes: Vec<Vec<f64>> = self.components.iter().map(|p| self.envelope(*p)).collect();
        (0..self.shifts.len())
            .map(|i| {
                let mut table = ComponentTable::new(0, (0, 0));
                for (p, env) in self.components.iter().zip(&envelopes) {
                    table.insert(*p, env[i]);
                }
                count_peaks(&table, threshold)
            })
            .collect()
    }

    pub fn regions(&self, threshold: f64, rule: &RegionRule) -> RegionSummary {
        RegionSummary::from_counts(&self.shifts, &self.peak_counts(threshold), rule)
    }
}

impl ShiftScanSpec {
    /// Translation applied to every configuration so that no pulse starts
    /// before zero.
    pub fn origin_offset(&self) -> f64 {
        let mut earliest: f64 = 0.0;
        for (k, p) in self.pulses.iter().enumerate() {
            if k == self.moving {
                for s in &self.shifts {
                    earliest = earliest.min(p.start + s);
                }
            } else {
                earliest = earliest.min(p.start);
            }
        }
        -earliest
    }

    /// Pulses for one shift and Rabi frequency.
    pub fn configuration(&self, shift: f64, rabi: Option<f64>) -> Vec<PulseSpec> {
        let offset = self.origin_offset();
        self.pulses
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut q = *p;
                q.start += offset;
                if k == self.moving {
                    q.start += shift;
                }
                if let Some(r) = rabi {
                    q.rabi = r;
                }
                q
            })
            .collect()
    }

    pub fn run(&self) -> Result<ShiftScan, SpectrumError> {
        if self.moving >= self.pulses.len() {
            return Err(SpectrumError::NoMovingPulse(self.moving));
        }
        if self.shifts.is_empty() || self.shifts.iter().any(|s| !s.is_finite()) {
            return Err(SpectrumError::InvalidRange);
        }
        let max_p = self
            .components
            .iter()
            .map(|p| p.abs())
            .max()
            .ok_or(SpectrumError::InvalidComponentRange(0))?;
        let max_p = if max_p % 2 == 0 { max_p + 1 } else { max_p };
        let rabis: Vec<Option<f64>> = match &self.rabi_values {
            Some(r) if !r.is_empty() => r.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        let jobs: Vec<(f64, Option<f64>)> = self
            .shifts
            .iter()
            .flat_map(|s| rabis.iter().map(move |r| (*s, *r)))
            .collect();
        let tables = jobs
            .into_par_iter()
            .map(|(s, r)| self.solver.spectrum(self.configuration(s, r), max_p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ShiftScan {
            shifts: self.shifts.clone(),
            rabi_values: self.rabi_values.clone().unwrap_or_default(),
            components: self.components.clone(),
            tables,
        })
    }
}
