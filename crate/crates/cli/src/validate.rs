//! Golden-data self check behind `qwm validate`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use qwm_core::alternating_pattern;
use qwm_core::calib::{fit_rabi, rabi_analytic, FitOptions, RabiParams};
use qwm_core::opalgebra::{
    arrow_reduce, lambda0, matrix_element_terms, parse_pair_terms, parse_sum, Letter,
    MixingModel, RotationAngles,
};
use qwm_core::reference::{self, two_pulse_p3};
use qwm_core::spectrum::{cross_validate, AngleGrid, OracleSettings, SolverSettings};
use qwm_core::stats::{fit_amplitude, pearson};
use serde::Serialize;

/// Reference term lists checked by the suite. Tests may alter a copy to make
/// sure a wrong golden is reported.
#[derive(Clone, Debug)]
pub struct Goldens {
    pub lambda0: Vec<String>,
    pub lambda_right: Vec<String>,
    pub lambda_left: Vec<String>,
    pub terms: Vec<(usize, Vec<(i32, String)>)>,
}

impl Default for Goldens {
    /// Reference lists, with the corrected five-pulse left operator.
    fn default() -> Self {
        let owned = |t: &[&str]| t.iter().map(|s| s.to_string()).collect();
        let table = |t: &[(i32, &str)]| t.iter().map(|(p, s)| (*p, s.to_string())).collect();
        Self {
            lambda0: owned(&reference::LAMBDA0),
            lambda_right: owned(&reference::LAMBDA_RIGHT),
            lambda_left: (2..=6)
                .map(|n| reference::lambda_left_corrected(n).to_string())
                .collect(),
            terms: vec![
                (2, table(&reference::M2)),
                (3, table(&reference::M3)),
                (4, table(&reference::M4)),
            ],
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FormArbitration {
    pub word_algebra_pearson: f64,
    pub quoted_pearson: f64,
    pub winner: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ValidationReport {
    pub quick: bool,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Oracle comparison of the two candidate two-pulse p = +3 forms.
    pub two_pulse_p3_form: Option<FormArbitration>,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn axis(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * TAU / n as f64).collect()
}

type Terms = Vec<(i64, Vec<Letter>, Vec<Letter>)>;

fn symbolic(suite: &mut Suite, goldens: &Goldens) {
    for n in 2..=6 {
        let built = lambda0(&alternating_pattern(n));
        let (left, right) = arrow_reduce(&built);
        for (name, value, golden) in [
            ("lambda0", &built, goldens.lambda0.get(n - 2)),
            ("lambda_right", &right, goldens.lambda_right.get(n - 2)),
            ("lambda_left", &left, goldens.lambda_left.get(n - 2)),
        ] {
            let name = format!("{name}_n{n}");
            match golden.map(|g| parse_sum(g)) {
                Some(Ok(g)) => {
                    let diff = value.differences(&g);
                    suite.check(name, diff.is_empty(), format!("{} differing words", diff.len()));
                }
                Some(Err(e)) => suite.check(name, false, format!("golden does not parse: {e}")),
                None => suite.check(name, false, "golden missing"),
            }
        }
    }
    for (n, table) in &goldens.terms {
        let name = format!("matrix_terms_n{n}");
        let built = match matrix_element_terms(&alternating_pattern(*n)) {
            Ok(b) => b,
            Err(e) => {
                suite.check(name, false, e.to_string());
                continue;
            }
        };
        let mut ok = built.len() == table.len();
        for (p, text) in table {
            let golden: Option<Terms> = parse_pair_terms(text).ok().map(|mut t| {
                t.sort();
                t
            });
            let mut mine: Terms = built
                .get(p)
                .map(|list| {
                    list.iter()
                        .map(|t| (t.coefficient, t.left.clone(), t.right.clone()))
                        .collect()
                })
                .unwrap_or_default();
            mine.sort();
            ok &= golden == Some(mine);
        }
        suite.check(name, ok, format!("{} components", table.len()));
    }
}

fn closed_forms(suite: &mut Suite) {
    let grid = axis(33);
    let m3 = MixingModel::new(&alternating_pattern(3)).expect("non-empty pattern");
    let m4 = MixingModel::new(&alternating_pattern(4)).expect("non-empty pattern");
    let (mut w3, mut w4): (f64, f64) = (0.0, 0.0);
    for m in &grid {
        for q in &grid {
            let a = RotationAngles::new(*m, *q);
            for (p, f) in reference::V3 {
                w3 = w3.max((m3.evaluate(p, a).unwrap_or(f64::NAN) - f(*m, *q)).abs());
            }
            for (p, _) in reference::V4 {
                let expected = reference::v4_corrected(p, *m, *q).unwrap_or(f64::NAN);
                w4 = w4.max((m4.evaluate(p, a).unwrap_or(f64::NAN) - expected).abs());
            }
        }
    }
    suite.check("closed_form_v3", w3 <= 1e-12, format!("max deviation {w3:e}"));
    suite.check("closed_form_v4", w4 <= 1e-9, format!("max deviation {w4:e}"));

    let a = m3.evaluate(3, RotationAngles::new(FRAC_PI_2, FRAC_PI_2)).unwrap_or(f64::NAN);
    let b = m3.evaluate(-5, RotationAngles::new(FRAC_PI_2, PI)).unwrap_or(f64::NAN);
    suite.check(
        "spot_values",
        (a - 0.125).abs() <= 1e-12 && (b + 0.25).abs() <= 1e-12,
        format!("{a}, {b}"),
    );
}

fn invariants(suite: &mut Suite) {
    let grid = axis(9);
    let mut zero_worst: f64 = 0.0;
    let mut support_ok = true;
    let mut antisym_worst: f64 = 0.0;
    let mut harmonic_worst: f64 = 0.0;
    for n in 2..=6 {
        let model = MixingModel::new(&alternating_pattern(n)).expect("non-empty pattern");
        let max = model.max_component();
        for p in (-max..=max).step_by(2) {
            let v = model.evaluate(p, RotationAngles::new(PI, PI)).unwrap_or(f64::NAN);
            zero_worst = zero_worst.max(v.abs());
        }
        let support = model.support();
        support_ok &= support.len() == 2 * n - 1;
        for p in &support {
            for m in &grid {
                for q in &grid {
                    let v = model.evaluate(*p, RotationAngles::new(*m, *q)).unwrap_or(f64::NAN);
                    let mirrored = if p.rem_euclid(4) == 3 {
                        RotationAngles::new(TAU - m, *q)
                    } else {
                        RotationAngles::new(*m, TAU - q)
                    };
                    let w = model.evaluate(*p, mirrored).unwrap_or(f64::NAN);
                    antisym_worst = antisym_worst.max((v + w).abs());
                }
            }
        }
        let diag = axis(200);
        let y: Vec<f64> = diag
            .iter()
            .map(|t| model.net_field(RotationAngles::new(*t, *t)))
            .collect();
        let basis: Vec<f64> = diag.iter().map(|t| (n as f64 * t).sin()).collect();
        let (amp, rel) = fit_amplitude(&basis, &y);
        harmonic_worst = harmonic_worst.max(rel).max((amp + 0.5).abs());
    }
    suite.check("zero_at_pi_pi", zero_worst <= 1e-12, format!("max |V| {zero_worst:e}"));
    suite.check("component_support", support_ok, "2N-1 components for N = 2..6");
    suite.check(
        "mirror_antisymmetry",
        antisym_worst <= 1e-12,
        format!("max |V + V_mirrored| {antisym_worst:e}"),
    );
    suite.check(
        "net_field_harmonic",
        harmonic_worst <= 1e-6,
        format!("worst residual {harmonic_worst:e}"),
    );
}

fn oracle(suite: &mut Suite) -> Option<FormArbitration> {
    let rabi = TAU / 8e-9;
    let settings = OracleSettings {
        rabi,
        solver: SolverSettings {
            gamma1: 0.02 * rabi,
            detuning: TAU * 50e3,
            repetitions: 8,
            dt: 0.25e-9,
            substeps: 5,
        },
    };
    let grid = AngleGrid::uniform(11);
    let mut arbitration = None;
    for n in [2usize, 3] {
        let name = format!("oracle_correlation_n{n}");
        match cross_validate(&alternating_pattern(n), &grid, &settings) {
            Ok(cv) => {
                let r = cv.min_pearson();
                suite.check(name, r > 0.99, format!("min pearson {r:.6}"));
                if n == 2 {
                    if let Some(o) = cv.scaled_oracle(3) {
                        let points = grid.points();
                        let word: Vec<f64> = points
                            .iter()
                            .map(|a| two_pulse_p3::word_algebra(a.theta_minus, a.theta_plus))
                            .collect();
                        let quoted: Vec<f64> = points
                            .iter()
                            .map(|a| two_pulse_p3::quoted(a.theta_minus, a.theta_plus))
                            .collect();
                        let (rw, rq) = (pearson(o, &word), pearson(o, &quoted));
                        let winner = if rw >= rq { "word_algebra" } else { "quoted" };
                        suite.check(
                            "two_pulse_p3_form",
                            rw > 0.99,
                            format!("word algebra r {rw:.6}, quoted r {rq:.6}"),
                        );
                        arbitration = Some(FormArbitration {
                            word_algebra_pearson: rw,
                            quoted_pearson: rq,
                            winner: winner.to_string(),
                        });
                    }
                }
            }
            Err(e) => suite.check(name, false, e.to_string()),
        }
    }
    arbitration
}

fn rabi_round_trip(suite: &mut Suite) {
    let (w, g, dt) = (TAU * 20e6, TAU * 1.64e6, 0.5e-9);
    let trace: Option<Vec<f64>> = RabiParams::new(w, g).ok().map(|p| {
        (0..1000)
            .map(|j| rabi_analytic(&p, j as f64 * dt).map(|s| s.1).unwrap_or(f64::NAN))
            .collect()
    });
    match trace.map(|t| fit_rabi(&t, dt, &FitOptions::default())) {
        Some(Ok(fit)) => {
            let ew = (fit.params.omega() / w - 1.0).abs();
            let eg = (fit.params.gamma1() / g - 1.0).abs();
            suite.check(
                "rabi_round_trip",
                ew < 1e-3 && eg < 1e-3,
                format!("relative errors {ew:e}, {eg:e}"),
            );
        }
        Some(Err(e)) => suite.check("rabi_round_trip", false, e.to_string()),
        None => suite.check("rabi_round_trip", false, "invalid parameters"),
    }
}

/// Runs the suite. `quick` restricts it to the symbolic checks.
pub fn run_validation(goldens: &Goldens, quick: bool) -> ValidationReport {
    let mut suite = Suite { checks: Vec::new() };
    symbolic(&mut suite, goldens);
    let mut two_pulse_p3_form = None;
    if !quick {
        closed_forms(&mut suite);
        invariants(&mut suite);
        two_pulse_p3_form = oracle(&mut suite);
        rabi_round_trip(&mut suite);
    }
    let passed = suite.checks.iter().all(|c| c.passed);
    ValidationReport {
        quick,
        passed,
        checks: suite.checks,
        two_pulse_p3_form,
    }
}
