use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use qwm_core::opalgebra::*;
use qwm_core::reference;
use qwm_core::{alternating_pattern, Carrier};

use Carrier::{Minus, Plus};
use Letter::*;

fn sum(s: &str) -> OperatorSum {
    parse_sum(s).unwrap()
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * TAU / n as f64).collect()
}

#[test]
fn single_pulse_skeletons() {
    assert_eq!(single_pulse_operator(Minus), sum("1 + a - a†"));
    assert_eq!(single_pulse_operator(Plus), sum("1 + b - b†"));
}

#[test]
fn multiply_deletes_same_kind_neighbours() {
    let a = sum("a");
    let b = sum("b");
    assert!(multiply(&a, &b).is_empty());
    assert_eq!(multiply(&OperatorSum::identity(), &a), a);
    let two = multiply(&single_pulse_operator(Plus), &single_pulse_operator(Minus));
    assert_eq!(two, sum("1 + a - a† + b - ba† - b† - b†a"));
}

#[test]
fn pruning_gives_two_pulse_operator() {
    let two = sum("1 + a - a† + b - ba† - b† - b†a");
    assert_eq!(ground_state_prune(&two), sum("1 - a† - ba† - b†"));
    assert_eq!(ground_state_prune(&OperatorSum::identity()), OperatorSum::identity());
    assert_eq!(lambda0(&[Minus, Plus]), sum("1 - a† - ba† - b†"));
}

#[test]
fn dagger_examples() {
    assert_eq!(dagger(&sum("-ba†")), sum("-ab†"));
    assert_eq!(dagger(&lambda0(&[Minus, Plus])), sum("1 - a - ab† - b"));
}

#[test]
fn arrow_reduce_examples() {
    let (left, right) = arrow_reduce(&lambda0(&[Minus, Plus]));
    assert_eq!(right, sum("-a† - b†"));
    assert_eq!(left, sum("1 - ab†"));
    let (_, right3) = arrow_reduce(&lambda0(&alternating_pattern(3)));
    assert_eq!(right3, sum("-2a† + a†ba† - b†"));
    let (left_id, right_id) = arrow_reduce(&OperatorSum::identity());
    assert_eq!(left_id, OperatorSum::identity());
    assert!(right_id.is_empty());
}

#[test]
fn word_phase_examples() {
    assert_eq!(word_phase(&[A, BDag, BDag]), 3);
    assert_eq!(word_phase(&[]), 0);
    assert_eq!(word_phase(&[B, ADag, ADag, B, ADag]), -5);
}

#[test]
fn lambda0_matches_reference_lists() {
    for n in 2..=6 {
        let built = lambda0(&alternating_pattern(n));
        assert_eq!(built, sum(reference::LAMBDA0[n - 2]), "N = {n}");
        assert!(built.iter().all(|(w, _)| is_alternating(w)));
    }
}

#[test]
fn right_arrow_matches_reference_lists() {
    for n in 2..=6 {
        let (_, right) = arrow_reduce(&lambda0(&alternating_pattern(n)));
        assert_eq!(right, sum(reference::LAMBDA_RIGHT[n - 2]), "N = {n}");
    }
}

#[test]
fn left_arrow_matches_corrected_lists() {
    for n in 2..=6 {
        let (left, _) = arrow_reduce(&lambda0(&alternating_pattern(n)));
        assert_eq!(left, sum(reference::lambda_left_corrected(n)), "N = {n}");
    }
}

#[test]
fn reference_five_pulse_left_operator_differs_in_one_term() {
    let (left, _) = arrow_reduce(&lambda0(&alternating_pattern(5)));
    let diff = left.differences(&sum(reference::LAMBDA_LEFT[3]));
    assert_eq!(
        diff,
        vec![
            (vec![ADag], 0, 1),
            (vec![B, ADag, B, ADag], 1, 0),
        ]
    );
}

fn reference_terms(table: &[(i32, &str)]) -> Vec<(i32, Vec<PairTerm>)> {
    table
        .iter()
        .map(|(p, s)| {
            let mut t = parse_pair_terms(s).unwrap();
            t.sort();
            (*p, t)
        })
        .collect()
}

fn built_terms(n: usize) -> Vec<(i32, Vec<PairTerm>)> {
    matrix_element_terms(&alternating_pattern(n))
        .unwrap()
        .into_iter()
        .map(|(p, list)| {
            let mut t: Vec<_> = list
                .into_iter()
                .map(|t| (t.coefficient, t.left, t.right))
                .collect();
            t.sort();
            (p, t)
        })
        .collect()
}

#[test]
fn matrix_element_terms_match_reference_tables() {
    assert_eq!(built_terms(2), reference_terms(&reference::M2));
    assert_eq!(built_terms(3), reference_terms(&reference::M3));
    assert_eq!(built_terms(4), reference_terms(&reference::M4));
}

#[test]
fn term_display_round_trips() {
    let terms = matrix_element_terms(&alternating_pattern(3)).unwrap();
    let p5: Vec<String> = terms[&-5].iter().map(|t| t.to_string()).collect();
    assert_eq!(p5, vec!["-ba†σa†ba†"]);
    for list in terms.values() {
        for t in list {
            let back = parse_pair_terms(&t.to_string()).unwrap();
            assert_eq!(back, vec![(t.coefficient, t.left.clone(), t.right.clone())]);
        }
    }
}

#[test]
fn empty_pattern_is_rejected() {
    assert_eq!(matrix_element_terms(&[]), Err(AlgebraError::EmptySequence));
}

#[test]
fn three_pulse_closed_forms() {
    let model = MixingModel::new(&alternating_pattern(3)).unwrap();
    for m in grid(33) {
        for p in grid(33) {
            for (q, f) in reference::V3 {
                let v = model.evaluate(q, RotationAngles::new(m, p)).unwrap();
                assert!((v - f(m, p)).abs() <= 1e-12, "p={q} at ({m}, {p})");
            }
        }
    }
}

#[test]
fn four_pulse_closed_forms_after_rescaling() {
    let model = MixingModel::new(&alternating_pattern(4)).unwrap();
    for m in grid(33) {
        for p in grid(33) {
            for (q, _) in reference::V4 {
                let v = model.evaluate(q, RotationAngles::new(m, p)).unwrap();
                let expected = reference::v4_corrected(q, m, p).unwrap();
                assert!((v - expected).abs() <= 1e-9, "p={q} at ({m}, {p})");
            }
        }
    }
}

#[test]
fn spot_values() {
    let pat = alternating_pattern(3);
    let v = evaluate_component(&pat, 3, RotationAngles::new(FRAC_PI_2, FRAC_PI_2)).unwrap();
    assert!((v - 0.125).abs() < 1e-12);
    let v = evaluate_component(&pat, -5, RotationAngles::new(FRAC_PI_2, PI)).unwrap();
    assert!((v + 0.25).abs() < 1e-12);
}

#[test]
fn invalid_components() {
    let pat = alternating_pattern(2);
    let a = RotationAngles::new(1.0, 1.0);
    assert!(matches!(
        evaluate_component(&pat, 2, a),
        Err(AlgebraError::InvalidComponent { p: 2, .. })
    ));
    assert!(matches!(
        evaluate_component(&pat, 5, a),
        Err(AlgebraError::InvalidComponent { p: 5, .. })
    ));
    // [+,-] puts nothing at p = +3
    let v = evaluate_component(&[Plus, Minus], 3, a).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn zero_at_double_pi() {
    for n in 2..=6 {
        let pat = alternating_pattern(n);
        let model = MixingModel::new(&pat).unwrap();
        for p in (-(2 * n as i32 - 1)..=2 * n as i32 - 1).step_by(2) {
            let v = model.evaluate(p, RotationAngles::new(PI, PI)).unwrap();
            assert!(v.abs() < 1e-12, "N={n} p={p} gives {v}");
        }
        assert!(net_field(&pat, RotationAngles::new(PI, PI)).unwrap().abs() < 1e-12);
    }
}

#[test]
fn support_and_single_term_extremes() {
    for n in 2..=6 {
        let model = MixingModel::new(&alternating_pattern(n)).unwrap();
        let support = model.support();
        assert_eq!(support.len(), 2 * n - 1, "N = {n}");
        assert!(support.iter().all(|p| p % 2 != 0 && p.abs() <= model.max_component()));
        let (lo, hi) = (support[0], *support.last().unwrap());
        assert_eq!(model.terms_for(lo).len(), 1);
        assert_eq!(model.terms_for(hi).len(), 1);
        assert!(lo == -model.max_component() || hi == model.max_component());
    }
}

#[test]
fn component_tables() {
    assert!(component_table(&alternating_pattern(2), RotationAngles::new(0.0, 0.0))
        .unwrap()
        .is_empty());
    let t = component_table(&alternating_pattern(3), RotationAngles::new(0.7, 1.9)).unwrap();
    assert_eq!(t.components(), vec![-5, -3, -1, 1, 3]);
    assert_eq!(t.pulse_count, 3);
    assert_eq!(t.carrier_counts, (2, 1));
    let t = component_table(&alternating_pattern(6), RotationAngles::new(0.7, 1.9)).unwrap();
    assert_eq!(t.len(), 11);
}

#[test]
fn net_field_is_harmonic_on_the_diagonal() {
    for n in 2..=6 {
        let model = MixingModel::new(&alternating_pattern(n)).unwrap();
        for k in 0..200 {
            let th = k as f64 * TAU / 200.0;
            let v = model.net_field(RotationAngles::new(th, th));
            assert!((v + 0.5 * (n as f64 * th).sin()).abs() < 1e-12, "N={n} θ={th}");
        }
    }
}

#[test]
fn phase_conservation_of_terms() {
    for n in 2..=6 {
        let terms = matrix_element_terms(&alternating_pattern(n)).unwrap();
        for (p, list) in &terms {
            assert!(p % 2 != 0);
            for t in list {
                assert_eq!(t.phase(), *p);
            }
        }
    }
}

#[test]
fn mirror_lines_of_three_and_four_pulse_components() {
    for n in [3usize, 4] {
        let model = MixingModel::new(&alternating_pattern(n)).unwrap();
        for p in model.support() {
            for m in grid(17) {
                for q in grid(17) {
                    let v = model.evaluate(p, RotationAngles::new(m, q)).unwrap();
                    if p.rem_euclid(4) == 3 {
                        let w = model.evaluate(p, RotationAngles::new(TAU - m, q)).unwrap();
                        assert!((v + w).abs() < 1e-12);
                        let z = model.evaluate(p, RotationAngles::new(PI, q)).unwrap();
                        assert!(z.abs() < 1e-12);
                    } else {
                        let w = model.evaluate(p, RotationAngles::new(m, TAU - q)).unwrap();
                        assert!((v + w).abs() < 1e-12);
                        let z = model.evaluate(p, RotationAngles::new(m, PI)).unwrap();
                        assert!(z.abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn two_pulse_plus_three_is_sine_in_theta_minus() {
    let model = MixingModel::new(&alternating_pattern(2)).unwrap();
    for m in grid(21) {
        for p in grid(21) {
            let v = model.evaluate(3, RotationAngles::new(m, p)).unwrap();
            let f = reference::two_pulse_p3::word_algebra(m, p);
            assert!((v - f).abs() < 1e-12);
        }
    }
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(A), Just(ADag), Just(B), Just(BDag)]
}

fn operator_sum() -> impl Strategy<Value = OperatorSum> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(letter(), 0..6)), 0..8)
        .prop_map(|terms| OperatorSum::from_words(terms.into_iter().map(|(c, l)| OperatorWord::new(c, l))))
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(s in operator_sum()) {
        let once = s.canonicalize();
        prop_assert_eq!(once.canonicalize(), once.clone());
        prop_assert!(once.iter().all(|(_, c)| c != 0));
    }

    #[test]
    fn dagger_is_an_involution(s in operator_sum()) {
        prop_assert_eq!(dagger(&dagger(&s)), s);
    }

    #[test]
    fn product_words_never_pair_like_letters(x in operator_sum(), y in operator_sum()) {
        let xs = x.filter(|w, _| is_alternating(w));
        let ys = y.filter(|w, _| is_alternating(w));
        let prod = multiply(&xs, &ys);
        prop_assert!(prod.iter().all(|(w, _)| is_alternating(w)));
    }

    #[test]
    fn product_phase_is_additive(x in operator_sum(), y in operator_sum()) {
        let prod = multiply(&x, &y);
        for (w, _) in prod.iter() {
            let found = x.iter().any(|(a, _)| y.iter().any(|(b, _)| {
                a.len() + b.len() == w.len() && w[..a.len()] == *a && w[a.len()..] == *b
                    && word_phase(a) + word_phase(b) == word_phase(w)
            }));
            prop_assert!(found);
        }
    }

    #[test]
    fn angles_outside_grid_stay_finite(m in 0.0..TAU, p in 0.0..TAU) {
        let t = component_table(&alternating_pattern(5), RotationAngles::new(m, p)).unwrap();
        prop_assert!(t.iter().all(|(q, v)| v.is_finite() && q.abs() <= 9));
    }
}
