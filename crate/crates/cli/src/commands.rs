use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use qwm_core::calib::{fit_rabi, rabi_analytic, FitOptions, RabiFit, RabiParams};
use qwm_core::lindblad::{evolve_with, EvolveOptions, PulseSequence, PulseSpec, TimeTrace};
use qwm_core::opalgebra::ComponentTable;
use qwm_core::spectrum::{
    angle_maps, comb_amplitudes, shift_range, AngleGrid, Backend, OracleSettings, Region,
    RegionRule, ShiftScan, ShiftScanSpec, SolverSettings, SpectrumMap,
};
use qwm_core::stats::linear_fit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::config::{BackendChoice, RunConfig};
use crate::error::CliError;
use crate::output::{component_path, heatmap_svg, map_csv, save_json, save_svg, Csv};
use crate::validate::{run_validation, Goldens};

const NS: f64 = 1e-9;

fn solver_settings(cfg: &RunConfig) -> SolverSettings {
    SolverSettings {
        gamma1: cfg.gamma1(),
        detuning: cfg.detuning(),
        repetitions: cfg.physics.repetitions,
        dt: cfg.solver.dt_ns * NS,
        substeps: cfg.solver.substeps,
    }
}

fn default_max_p(pulses: usize) -> i32 {
    2 * pulses.max(1) as i32 - 1
}

pub fn cmd_map(cfg: &RunConfig, out: &Path) -> Result<Vec<SpectrumMap>, CliError> {
    let pattern = cfg.carrier_pattern()?;
    let grid = match &cfg.grid.theta_values {
        Some(v) => AngleGrid {
            theta_minus: v.clone(),
            theta_plus: v.clone(),
        },
        None => AngleGrid::uniform(cfg.grid.n_theta),
    };
    let backend = match cfg.backend {
        BackendChoice::Algebra => Backend::Algebra,
        BackendChoice::Oracle => Backend::Oracle(OracleSettings {
            rabi: cfg.rabi(),
            solver: solver_settings(cfg),
        }),
    };
    let maps = angle_maps(&pattern, &grid, &backend)?;
    let csv_stem = cfg.csv_stem("map");
    let svg_stem = cfg.svg_stem("map");
    for m in &maps {
        map_csv(m, "theta_minus", "theta_plus").save(&component_path(out, csv_stem, m.component, "csv"))?;
        let title = format!("p = {}, N = {}", m.component, pattern.len());
        save_svg(&component_path(out, svg_stem, m.component, "svg"), &heatmap_svg(m, &title))?;
    }
    Ok(maps)
}

struct Simulation {
    trace: TimeTrace,
    table: ComponentTable<Complex64>,
}

fn simulate(cfg: &RunConfig, pulses: Vec<PulseSpec>, max_p: i32) -> Result<Simulation, CliError> {
    let solver = solver_settings(cfg);
    let seq = PulseSequence::new(pulses, solver.detuning, solver.gamma1, solver.repetition_period())?;
    let opts = EvolveOptions::new(solver.dt, solver.beat_period()).substeps(solver.substeps);
    let trace = evolve_with(&seq, &opts)?;
    let table = comb_amplitudes(&trace, solver.detuning, max_p)?;
    Ok(Simulation { trace, table })
}

fn spectrum_csv(table: &ComponentTable<Complex64>) -> Csv {
    let mut csv = Csv::new(&["p", "real", "imag", "abs"]);
    for (p, v) in table.iter() {
        csv.row(&[p as f64, v.re, v.im, v.norm()]);
    }
    csv
}

fn full_fft_csv(trace: &TimeTrace) -> Csv {
    let n = trace.len();
    let mut buf = trace.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut csv = Csv::new(&["frequency_hz", "real", "imag", "abs"]);
    let df = 1.0 / (n as f64 * trace.dt);
    for j in 0..n {
        let k = (j + n.div_ceil(2)) % n;
        let signed = if k >= n.div_ceil(2) { k as f64 - n as f64 } else { k as f64 };
        let v = buf[k] / n as f64;
        csv.row(&[signed * df, v.re, v.im, v.norm()]);
    }
    csv
}

fn write_spectrum(cfg: &RunConfig, out: &Path, sim: &Simulation) -> Result<(), CliError> {
    let stem = cfg.csv_stem("spectrum");
    spectrum_csv(&sim.table).save(&out.join(format!("{stem}.csv")))?;
    if cfg.output.full_fft {
        full_fft_csv(&sim.trace).save(&out.join(format!("{stem}_fft.csv")))?;
    }
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<ComponentTable<Complex64>, CliError> {
    let pulses = cfg.pulse_specs()?;
    let max_p = cfg.grid.components.unwrap_or(default_max_p(pulses.len()));
    let sim = simulate(cfg, pulses, max_p)?;
    write_spectrum(cfg, out, &sim)?;
    Ok(sim.table)
}

#[derive(Serialize)]
struct SpanRecord {
    region: &'static str,
    first_ns: f64,
    last_ns: f64,
    points: usize,
}

#[derive(Serialize)]
struct RegionRecord {
    peak_threshold: f64,
    spans: Vec<SpanRecord>,
    boundaries_ns: Vec<f64>,
}

#[derive(Serialize)]
struct SymmetryRecord {
    max_relative_deviation: f64,
    tolerance: f64,
    passed: bool,
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Detached => "detached",
        Region::Overlap => "overlap",
        Region::Interleaved => "interleaved",
        Region::Transition => "transition",
    }
}

/// Outcome of a shift scan; `None` fields mark outputs that do not apply.
pub struct ShiftScanOutcome {
    pub scan: Option<ShiftScan>,
    pub boundaries_ns: Vec<f64>,
    pub symmetry_deviation: Option<f64>,
}

pub fn cmd_shift_scan(cfg: &RunConfig, out: &Path) -> Result<ShiftScanOutcome, CliError> {
    let pulses = cfg.pulse_specs()?;
    if pulses.is_empty() {
        return Err(CliError::Config("shift-scan needs a non-empty sequence".into()));
    }
    let g = &cfg.grid;
    let moving = g.moving.unwrap_or(pulses.len() / 2);
    if moving >= pulses.len() {
        return Err(CliError::Config(format!(
            "grid.moving = {moving} but the sequence has {} pulses",
            pulses.len()
        )));
    }
    let max_p = g.components.unwrap_or(default_max_p(pulses.len()));
    let spec = ShiftScanSpec {
        pulses,
        moving,
        shifts: shift_range(g.shift_start_ns * NS, g.shift_stop_ns * NS, g.shift_step_ns * NS),
        rabi_values: if g.rabi_hz.is_empty() {
            None
        } else {
            Some(g.rabi_hz.iter().map(|r| TAU * r).collect())
        },
        components: (-max_p..=max_p).step_by(2).collect(),
        solver: solver_settings(cfg),
    };

    if g.shift_stop_ns == g.shift_start_ns {
        let sim = simulate(cfg, spec.configuration(spec.shifts[0], None), max_p)?;
        write_spectrum(cfg, out, &sim)?;
        return Ok(ShiftScanOutcome {
            scan: None,
            boundaries_ns: Vec::new(),
            symmetry_deviation: None,
        });
    }

    let scan = spec.run()?;
    let stem = cfg.csv_stem("shift_scan");
    let svg_stem = cfg.svg_stem("shift_scan");

    let mut csv = Csv::new(&["t2_center_ns", "p", "value"]);
    let envelopes: Vec<(i32, Vec<f64>)> = scan.components.iter().map(|p| (*p, scan.envelope(*p))).collect();
    for (i, s) in scan.shifts.iter().enumerate() {
        for (p, env) in &envelopes {
            csv.row(&[s / NS, *p as f64, env[i]]);
        }
    }
    csv.save(&out.join(format!("{stem}.csv")))?;

    for p in &scan.components {
        let m = scan.magnitude_map(*p)?;
        let ns_axis: Vec<f64> = m.x.values.iter().map(|s| s / NS).collect();
        let hz_axis: Vec<f64> = m.y.values.iter().map(|r| r / TAU).collect();
        let m = SpectrumMap::new(
            qwm_core::spectrum::Axis::new("t2_center_ns", ns_axis),
            qwm_core::spectrum::Axis::new("rabi_hz", hz_axis),
            *p,
            m.values().to_vec(),
        )?;
        map_csv(&m, "t2_center_ns", "rabi_hz").save(&component_path(out, &format!("{stem}_map"), *p, "csv"))?;
        save_svg(
            &component_path(out, &format!("{svg_stem}_map"), *p, "svg"),
            &heatmap_svg(&m, &format!("|V_p|, p = {p}")),
        )?;
    }

    let counts = scan.peak_counts(g.peak_threshold);
    let mut regions_csv = Csv::new(&["t2_center_ns", "peak_count"]);
    for (s, c) in scan.shifts.iter().zip(&counts) {
        regions_csv.row(&[s / NS, *c as f64]);
    }
    regions_csv.save(&out.join(format!("{stem}_regions.csv")))?;
    let summary = scan.regions(g.peak_threshold, &RegionRule::default());
    let boundaries_ns: Vec<f64> = summary.boundaries.iter().map(|b| b / NS).collect();
    save_json(
        &out.join(format!("{stem}_regions.json")),
        &RegionRecord {
            peak_threshold: g.peak_threshold,
            spans: summary
                .spans
                .iter()
                .map(|s| SpanRecord {
                    region: region_name(s.region),
                    first_ns: s.first / NS,
                    last_ns: s.last / NS,
                    points: s.points,
                })
                .collect(),
            boundaries_ns: boundaries_ns.clone(),
        },
    )?;

    let symmetry_deviation = if spec.pulses.len() == 2 {
        Some(write_symmetry(cfg, out, stem, &scan)?)
    } else {
        None
    };
    Ok(ShiftScanOutcome {
        scan: Some(scan),
        boundaries_ns,
        symmetry_deviation,
    })
}

/// Compares |V_p| at shift t with |V_−p| at shift −t. The shift grid must be
/// symmetric about zero for the pairing to be exact.
fn write_symmetry(cfg: &RunConfig, out: &Path, stem: &str, scan: &ShiftScan) -> Result<f64, CliError> {
    let n = scan.shifts.len();
    let symmetric = (0..n).all(|i| (scan.shifts[i] + scan.shifts[n - 1 - i]).abs() < 1e-3 * NS);
    if !symmetric {
        return Err(CliError::Config(
            "two-pulse symmetry needs a shift range symmetric about zero".into(),
        ));
    }
    let columns = scan.rabi_values.len().max(1);
    let mut csv = Csv::new(&["t2_center_ns", "rabi_hz", "p", "value", "mirror_value"]);
    let (mut largest, mut worst): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        for k in 0..columns {
            let rabi_hz = scan.rabi_values.get(k).map(|r| r / TAU).unwrap_or(0.0);
            for p in &scan.components {
                let a = scan.table(i, k).get(*p).unwrap_or_default().norm();
                let b = scan.table(n - 1 - i, k).get(-p).unwrap_or_default().norm();
                largest = largest.max(a);
                worst = worst.max((a - b).abs());
                csv.row(&[scan.shifts[i] / NS, rabi_hz, *p as f64, a, b]);
            }
        }
    }
    csv.save(&out.join(format!("{stem}_symmetry.csv")))?;
    let rel = if largest > 0.0 { worst / largest } else { 0.0 };
    save_json(
        &out.join(format!("{stem}_symmetry.json")),
        &SymmetryRecord {
            max_relative_deviation: rel,
            tolerance: cfg.solver.tolerance,
            passed: rel <= cfg.solver.tolerance,
        },
    )?;
    Ok(rel)
}

pub fn cmd_validate(out: &Path, quick: bool) -> Result<(), CliError> {
    validate_with(&Goldens::default(), out, quick)
}

pub fn validate_with(goldens: &Goldens, out: &Path, quick: bool) -> Result<(), CliError> {
    let report = run_validation(goldens, quick);
    save_json(&out.join("validate_report.json"), &report)?;
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        log::info!("{status} {}: {}", c.name, c.detail);
    }
    let failures: Vec<String> = report.failures().iter().map(|c| c.name.clone()).collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failures.join(", ")))
    }
}

#[derive(Serialize)]
struct FitRecord {
    omega_hz: f64,
    gamma1_hz: f64,
    scale: f64,
    omega_err_hz: f64,
    gamma1_err_hz: f64,
    scale_err: f64,
    residual_rms: f64,
    iterations: usize,
}

impl From<&RabiFit> for FitRecord {
    fn from(f: &RabiFit) -> Self {
        Self {
            omega_hz: f.params.omega() / TAU,
            gamma1_hz: f.params.gamma1() / TAU,
            scale: f.scale,
            omega_err_hz: f.std_errors[0] / TAU,
            gamma1_err_hz: f.std_errors[1] / TAU,
            scale_err: f.std_errors[2],
            residual_rms: f.residual_rms,
            iterations: f.iterations,
        }
    }
}

#[derive(Serialize)]
struct LinearityRecord {
    slope_hz_per_amplitude: f64,
    intercept_hz: f64,
    r_squared: f64,
}

fn synthetic_trace(omega: f64, gamma1: f64, dt: f64, n: usize, noise: f64, seed: u64) -> Result<Vec<f64>, CliError> {
    let params = RabiParams::new(omega, gamma1)?;
    let mut trace = (0..n)
        .map(|j| rabi_analytic(&params, j as f64 * dt).map(|s| s.1))
        .collect::<Result<Vec<f64>, _>>()?;
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise).map_err(|e| CliError::Config(e.to_string()))?;
        for v in &mut trace {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(trace)
}

fn load_trace(path: &Path) -> Result<(Vec<f64>, f64), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("t_ns,value") {
        return Err(CliError::Config(format!(
            "{}: expected header t_ns,value",
            path.display()
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
        match (cols.next(), cols.next(), cols.next()) {
            (Some(Ok(t)), Some(Ok(v)), None) => {
                times.push(t);
                values.push(v);
            }
            _ => {
                return Err(CliError::Config(format!(
                    "{}: malformed row {}",
                    path.display(),
                    k + 2
                )))
            }
        }
    }
    if times.len() < 2 {
        return Err(CliError::Config(format!("{}: fewer than two samples", path.display())));
    }
    let dt = times[1] - times[0];
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt.abs());
    if !(dt > 0.0 && uniform) {
        return Err(CliError::Config(format!("{}: times are not uniformly spaced", path.display())));
    }
    Ok((values, dt * NS))
}

pub fn cmd_rabi_fit(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let f = &cfg.fit;
    let options = FitOptions {
        max_iterations: f.max_iterations,
        ..FitOptions::default()
    };
    let n = (f.duration_ns / f.dt_ns).round() as usize;
    let (trace, dt) = match &f.trace_path {
        Some(p) => load_trace(Path::new(p))?,
        None => (
            synthetic_trace(cfg.rabi(), cfg.gamma1(), f.dt_ns * NS, n, f.noise, cfg.seed)?,
            f.dt_ns * NS,
        ),
    };
    let fit = fit_rabi(&trace, dt, &options)?;
    let stem = cfg.csv_stem("rabi");
    save_json(&out.join(format!("{stem}_fit.json")), &FitRecord::from(&fit))?;
    let mut overlay = Csv::new(&["t_ns", "data", "fit"]);
    for (j, y) in trace.iter().enumerate() {
        let t = j as f64 * dt;
        overlay.row(&[t / NS, *y, fit.model(t)]);
    }
    overlay.save(&out.join(format!("{stem}_overlay.csv")))?;

    if !f.amplitudes.is_empty() {
        let fits = f
            .amplitudes
            .par_iter()
            .enumerate()
            .map(|(k, a)| {
                let omega = TAU * f.rabi_hz_per_amplitude * a;
                let seed = cfg.seed.wrapping_add(k as u64 + 1);
                let trace = synthetic_trace(omega, cfg.gamma1(), f.dt_ns * NS, n, f.noise, seed)?;
                Ok(fit_rabi(&trace, f.dt_ns * NS, &options)?)
            })
            .collect::<Result<Vec<RabiFit>, CliError>>()?;
        let mut csv = Csv::new(&["amplitude", "omega_hz", "omega_err_hz"]);
        let omegas: Vec<f64> = fits.iter().map(|r| r.params.omega() / TAU).collect();
        for ((a, r), w) in f.amplitudes.iter().zip(&fits).zip(&omegas) {
            csv.row(&[*a, *w, r.std_errors[0] / TAU]);
        }
        csv.save(&out.join(format!("{stem}_linearity.csv")))?;
        if f.amplitudes.len() >= 2 {
            let line = linear_fit(&f.amplitudes, &omegas);
            save_json(
                &out.join(format!("{stem}_linearity.json")),
                &LinearityRecord {
                    slope_hz_per_amplitude: line.slope,
                    intercept_hz: line.intercept,
                    r_squared: line.r_squared,
                },
            )?;
        }
    }
    Ok(())
}
