use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use qwm_core::alternating_pattern;
use qwm_core::lindblad::{PulseSpec, TimeTrace};
use qwm_core::opalgebra::{ComponentTable, RotationAngles};
use qwm_core::reference::two_pulse_p3;
use qwm_core::spectrum::*;
use qwm_core::stats::pearson;
use qwm_core::Carrier::{Minus, Plus};

const NS: f64 = 1e-9;

fn tone(p: i32, amp: Complex64, detuning: f64, n: usize) -> TimeTrace {
    let beat = PI / detuning;
    let dt = beat / n as f64;
    let samples = (0..n)
        .map(|j| amp * Complex64::from_polar(1.0, p as f64 * detuning * j as f64 * dt))
        .collect();
    TimeTrace::new(0.0, dt, samples).unwrap()
}

fn solver(dt_ns: f64, substeps: usize) -> SolverSettings {
    SolverSettings {
        gamma1: TAU * 1.64e6,
        detuning: TAU * 25e3,
        repetitions: 16,
        dt: dt_ns * NS,
        substeps,
    }
}

fn oracle() -> OracleSettings {
    let rabi = TAU / (8.0 * NS);
    OracleSettings {
        rabi,
        solver: SolverSettings {
            gamma1: 0.02 * rabi,
            detuning: TAU * 50e3,
            repetitions: 8,
            dt: 0.25 * NS,
            substeps: 5,
        },
    }
}

#[test]
fn single_comb_line_is_isolated() {
    let detuning = TAU * 50e3;
    let trace = tone(3, Complex64::new(0.5, 0.0), detuning, 4000);
    let table = comb_amplitudes(&trace, detuning, 7).unwrap();
    assert_eq!(table.components(), vec![-7, -5, -3, -1, 1, 3, 5, 7]);
    assert!((table.get(3).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    for (p, v) in table.iter() {
        if p != 3 {
            assert!(v.norm() < 1e-10, "p = {p}: {v}");
        }
    }
}

#[test]
fn comb_is_linear_in_the_trace() {
    let detuning = TAU * 50e3;
    let a = tone(-1, Complex64::new(0.1, 0.2), detuning, 2000);
    let b = tone(5, Complex64::new(-0.2, 0.05), detuning, 2000);
    let sum = TimeTrace::new(
        0.0,
        a.dt,
        a.samples.iter().zip(&b.samples).map(|(x, y)| x + y).collect(),
    )
    .unwrap();
    let ta = comb_amplitudes(&a, detuning, 5).unwrap();
    let tb = comb_amplitudes(&b, detuning, 5).unwrap();
    let ts = comb_amplitudes(&sum, detuning, 5).unwrap();
    for p in ts.components() {
        let diff = ts.get(p).unwrap() - ta.get(p).unwrap() - tb.get(p).unwrap();
        assert!(diff.norm() < 1e-14);
    }
}

#[test]
fn window_must_hold_whole_beats() {
    let detuning = TAU * 50e3;
    let beat = PI / detuning;
    let trace = TimeTrace::new(0.0, 0.7 * beat / 100.0, vec![Complex64::default(); 100]).unwrap();
    assert!(matches!(
        comb_amplitudes(&trace, detuning, 3),
        Err(SpectrumError::BadWindow { .. })
    ));
    let two = tone(1, Complex64::new(0.1, 0.0), detuning / 2.0, 1000);
    assert!(comb_amplitudes(&two, detuning, 3).is_ok());
}

#[test]
fn component_range_must_be_odd_and_positive() {
    let trace = tone(1, Complex64::new(0.1, 0.0), 1.0, 100);
    assert_eq!(
        comb_amplitudes(&trace, 1.0, 4),
        Err(SpectrumError::InvalidComponentRange(4))
    );
    assert_eq!(
        comb_amplitudes(&trace, 1.0, 0),
        Err(SpectrumError::InvalidComponentRange(0))
    );
}

fn complex_table(values: &[(i32, Complex64)]) -> ComponentTable<Complex64> {
    let mut t = ComponentTable::new(0, (0, 0));
    for (p, v) in values {
        t.insert(*p, *v);
    }
    t
}

#[test]
fn quadrature_rotation_of_real_values_is_identity() {
    let t = complex_table(&[(-1, Complex64::new(0.3, 0.0)), (1, Complex64::new(-0.1, 0.0))]);
    let (real, phi) = rotate_quadrature(&t).unwrap();
    assert!(phi.abs() < 1e-15);
    assert!((real.value(-1) - 0.3).abs() < 1e-15);
    assert!((real.value(1) + 0.1).abs() < 1e-15);
}

#[test]
fn quadrature_rotation_at_forty_five_degrees() {
    let rot = Complex64::from_polar(1.0, FRAC_PI_4);
    let t = complex_table(&[(-1, rot * 0.3), (1, rot * -0.1), (3, rot * 0.05)]);
    let (real, phi) = rotate_quadrature(&t).unwrap();
    assert!((phi - FRAC_PI_4).abs() < 1e-12);
    assert!((real.value(-1) - 0.3).abs() < 1e-12);
    assert!((real.value(3) - 0.05).abs() < 1e-12);
    assert!(residual_imaginary_fraction(t.iter().map(|(_, v)| v), phi) < 1e-24);
}

#[test]
fn quadrature_phase_lies_in_half_open_interval() {
    for k in 0..16 {
        let angle = -PI + k as f64 * TAU / 16.0;
        let v = Complex64::from_polar(1.0, angle);
        let phi = quadrature_phase([v, v * 0.5]).unwrap();
        assert!((0.0..PI).contains(&phi));
        assert!((Complex64::from_polar(1.0, -phi) * v).im.abs() < 1e-12);
    }
}

#[test]
fn all_zero_table_is_rejected() {
    let t = complex_table(&[(-1, Complex64::new(1e-16, 0.0)), (1, Complex64::default())]);
    assert_eq!(rotate_quadrature(&t).unwrap_err(), SpectrumError::AllZero);
}

#[test]
fn peak_counting() {
    let mut t = ComponentTable::new(0, (0, 0));
    for (p, v) in [(-3, 0.01), (-1, 1.0), (1, -0.5), (3, 0.019), (5, 0.02)] {
        t.insert(p, v);
    }
    assert_eq!(count_peaks(&t, 0.02), 3);
    assert_eq!(count_peaks(&t, 0.6), 1);
    assert_eq!(count_peaks(&ComponentTable::new(0, (0, 0)), 0.5), 0);
}

#[test]
#[should_panic]
fn peak_threshold_outside_unit_interval_panics() {
    count_peaks(&ComponentTable::new(0, (0, 0)), 1.5);
}

#[test]
fn ground_state_without_pulses_radiates_nothing() {
    let table = solver(0.5, 1).spectrum(Vec::new(), 5).unwrap();
    assert!(table.iter().all(|(_, v)| v.norm() < 1e-12));
}

#[test]
fn algebra_map_examples() {
    let grid = AngleGrid {
        theta_minus: vec![FRAC_PI_2, PI],
        theta_plus: vec![FRAC_PI_2, PI],
    };
    let pattern = alternating_pattern(3);
    let m5 = angle_map(&pattern, -5, &grid, &Backend::Algebra).unwrap();
    assert!((m5.get(0, 1) + 0.25).abs() < 1e-12);
    let m3 = angle_map(&pattern, 3, &grid, &Backend::Algebra).unwrap();
    assert!((m3.get(0, 0) - 0.125).abs() < 1e-12);
    for m in angle_maps(&pattern, &grid, &Backend::Algebra).unwrap() {
        assert!(m.get(1, 1).abs() < 1e-12, "p = {}", m.component);
    }
}

#[test]
fn algebra_maps_cover_every_component() {
    for n in 2..=6 {
        let maps = angle_maps(&alternating_pattern(n), &AngleGrid::uniform(5), &Backend::Algebra).unwrap();
        assert_eq!(maps.len(), 2 * n - 1);
        assert!(maps.iter().all(|m| m.max_abs() > 0.0));
    }
}

#[test]
fn invalid_map_component() {
    let grid = AngleGrid::uniform(3);
    assert!(angle_map(&alternating_pattern(2), 2, &grid, &Backend::Algebra).is_err());
    assert!(angle_map(&alternating_pattern(2), 5, &grid, &Backend::Algebra).is_err());
}

#[test]
fn map_shape_is_checked() {
    let x = Axis::new("x", vec![0.0, 1.0]);
    let y = Axis::new("y", vec![0.0, 1.0, 2.0]);
    assert_eq!(
        SpectrumMap::new(x.clone(), y.clone(), 1, vec![0.0; 5]),
        Err(SpectrumError::Shape { expected: 6, found: 5 })
    );
    assert!(SpectrumMap::new(x.clone(), y.clone(), 1, vec![f64::NAN; 6]).is_err());
    let m = SpectrumMap::new(x, y, 1, (0..6).map(f64::from).collect()).unwrap();
    assert_eq!(m.get(1, 2), 5.0);
    assert_eq!(m.points().nth(4), Some((1.0, 1.0, 4.0)));
}

#[test]
fn oracle_two_pulse_matches_algebra() {
    let cv = cross_validate(&alternating_pattern(2), &AngleGrid::uniform(6), &oracle()).unwrap();
    assert_eq!(cv.components.len(), 3);
    assert!(cv.min_pearson() > 0.99, "{:?}", cv.components);
    assert!(cv.off_support_fraction < 1e-3);
}

#[test]
fn oracle_three_pulse_matches_algebra() {
    let cv = cross_validate(&alternating_pattern(3), &AngleGrid::uniform(6), &oracle()).unwrap();
    assert_eq!(cv.components.len(), 5);
    assert!(cv.min_pearson() > 0.99, "{:?}", cv.components);
}

#[test]
fn oracle_prefers_word_algebra_two_pulse_form() {
    let grid = AngleGrid::uniform(7);
    let cv = cross_validate(&alternating_pattern(2), &grid, &oracle()).unwrap();
    let o = cv.scaled_oracle(3).unwrap();
    let points = grid.points();
    let word: Vec<f64> = points
        .iter()
        .map(|a| two_pulse_p3::word_algebra(a.theta_minus, a.theta_plus))
        .collect();
    let quoted: Vec<f64> = points
        .iter()
        .map(|a| two_pulse_p3::quoted(a.theta_minus, a.theta_plus))
        .collect();
    assert!(pearson(o, &word) > 0.99);
    assert!(pearson(o, &quoted).abs() < 0.5);
}

#[test]
fn oracle_backend_maps_share_one_phase() {
    let settings = oracle();
    let grid = AngleGrid {
        theta_minus: vec![FRAC_PI_2],
        theta_plus: vec![FRAC_PI_2, PI],
    };
    let maps = angle_maps(&alternating_pattern(2), &grid, &Backend::Oracle(settings)).unwrap();
    assert_eq!(maps.iter().map(|m| m.component).collect::<Vec<_>>(), vec![-3, -1, 1, 3]);
    let direct = settings
        .table(&alternating_pattern(2), RotationAngles::new(FRAC_PI_2, PI))
        .unwrap();
    let p1 = maps.iter().find(|m| m.component == 1).unwrap().get(0, 1);
    assert!((p1.abs() - direct.get(1).unwrap().norm()).abs() < 0.05 * direct.get(1).unwrap().norm());
}

#[test]
fn shift_range_inclusive() {
    let r = shift_range(-2.0, 2.0, 1.0);
    assert_eq!(r, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    assert_eq!(shift_range(3.0, 3.0, 1.0), vec![3.0]);
}

#[test]
fn region_rule_labels() {
    let rule = RegionRule::default();
    assert_eq!(rule.classify(3), Region::Detached);
    assert_eq!(rule.classify(5), Region::Interleaved);
    assert_eq!(rule.classify(7), Region::Overlap);
    assert_eq!(rule.classify(12), Region::Overlap);
    assert_eq!(rule.classify(4), Region::Transition);
    assert_eq!(rule.classify(6), Region::Transition);
}

#[test]
fn region_summary_demotes_short_runs() {
    let shifts: Vec<f64> = (0..14).map(f64::from).collect();
    let counts = [3, 3, 3, 4, 7, 8, 9, 5, 7, 7, 5, 5, 5, 5];
    let s = RegionSummary::from_counts(&shifts, &counts, &RegionRule::default());
    assert_eq!(s.regions(), vec![Region::Detached, Region::Overlap, Region::Interleaved]);
    assert_eq!(s.boundaries, vec![3.0, 8.0]);
    assert_eq!(s.spans[1].first, 4.0);
    assert_eq!(s.spans[1].last, 6.0);
}

fn two_pulse_spec(shifts: Vec<f64>) -> ShiftScanSpec {
    let rabi = TAU * 20e6;
    ShiftScanSpec {
        pulses: vec![
            PulseSpec::rectangular(Minus, -4.0 * NS, 8.0 * NS, rabi).unwrap(),
            PulseSpec::rectangular(Plus, -4.0 * NS, 8.0 * NS, rabi).unwrap(),
        ],
        moving: 1,
        shifts,
        rabi_values: None,
        components: vec![-5, -3, -1, 1, 3, 5],
        solver: solver(0.5, 10),
    }
}

#[test]
fn shift_scan_configurations_start_at_zero() {
    let spec = two_pulse_spec(shift_range(-20.0 * NS, 20.0 * NS, 10.0 * NS));
    assert!((spec.origin_offset() - 24.0 * NS).abs() < 1e-18);
    let c = spec.configuration(-20.0 * NS, Some(1.0));
    assert!(c[1].start.abs() < 1e-18);
    assert!((c[0].start - 20.0 * NS).abs() < 1e-18);
    assert!(c.iter().all(|p| p.rabi == 1.0));
}

#[test]
fn shift_scan_errors() {
    let mut spec = two_pulse_spec(vec![0.0]);
    spec.moving = 5;
    assert_eq!(spec.run().unwrap_err(), SpectrumError::NoMovingPulse(5));
    let spec = two_pulse_spec(Vec::new());
    assert_eq!(spec.run().unwrap_err(), SpectrumError::InvalidRange);
}

#[test]
fn two_pulse_scan_mirrors_delay_and_component() {
    let spec = two_pulse_spec(shift_range(-16.0 * NS, 16.0 * NS, 8.0 * NS));
    let scan = spec.run().unwrap();
    let n = scan.shifts.len();
    let largest = (0..n)
        .flat_map(|i| scan.table(i, 0).iter().map(|(_, v)| v.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    for i in 0..n {
        for p in [-5, -3, -1, 1, 3, 5] {
            let a = scan.table(i, 0).get(p).unwrap().norm();
            let b = scan.table(n - 1 - i, 0).get(-p).unwrap().norm();
            assert!((a - b).abs() < 0.01 * largest, "shift {i} p {p}: {a} vs {b}");
        }
    }
    let map = scan.magnitude_map(1).unwrap();
    assert_eq!(map.values().len(), n);
    assert_eq!(scan.envelope(1), map.values());
}
