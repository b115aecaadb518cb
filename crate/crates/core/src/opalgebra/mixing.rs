use std::collections::BTreeMap;
use std::fmt;

use super::word::{
    arrow_reduce, ground_state_prune, multiply, word_phase, write_letters, Letter, OperatorSum,
    OperatorWord,
};
use crate::Carrier;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("pulse pattern is empty")]
    EmptySequence,
    #[error("component p = {p} is not an odd index with |p| <= {max} for {pulse_count} pulses")]
    InvalidComponent { p: i32, pulse_count: usize, max: i32 },
}

/// Rotation angles Ω₋Δt₋ and Ω₊Δt₊ shared by all pulses of a carrier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationAngles {
    pub theta_minus: f64,
    pub theta_plus: f64,
}

impl RotationAngles {
    pub fn new(theta_minus: f64, theta_plus: f64) -> Self {
        Self {
            theta_minus,
            theta_plus,
        }
    }
}

/// Side-peak amplitudes indexed by the odd comb index `p`.
///
/// The real-valued table holds `V_p` from the algebra or a rotated oracle
/// quadrature; the spectral code reuses it with complex entries. Missing
/// entries mean an amplitude of exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentTable<T = f64> {
    pub pulse_count: usize,
    pub carrier_counts: (usize, usize),
    entries: BTreeMap<i32, T>,
}

impl<T: Copy> ComponentTable<T> {
    pub fn new(pulse_count: usize, carrier_counts: (usize, usize)) -> Self {
        Self {
            pulse_count,
            carrier_counts,
            entries: BTreeMap::new(),
        }
    }

    /// Sets component `p`.
    ///
    /// # Panics
    /// If `p` is even.
    pub fn insert(&mut self, p: i32, value: T) {
        assert!(p % 2 != 0, "comb index {p} is even");
        self.entries.insert(p, value);
    }

    pub fn get(&self, p: i32) -> Option<T> {
        self.entries.get(&p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, T)> + '_ {
        self.entries.iter().map(|(p, v)| (*p, *v))
    }

    pub fn components(&self) -> Vec<i32> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map<U: Copy, F: Fn(T) -> U>(&self, f: F) -> ComponentTable<U> {
        ComponentTable {
            pulse_count: self.pulse_count,
            carrier_counts: self.carrier_counts,
            entries: self.entries.iter().map(|(p, v)| (*p, f(*v))).collect(),
        }
    }
}

impl ComponentTable<f64> {
    pub fn value(&self, p: i32) -> f64 {
        self.get(p).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Pulse counts `(N₋, N₊)` per carrier.
pub fn carrier_counts(pattern: &[Carrier]) -> (usize, usize) {
    let minus = pattern.iter().filter(|c| **c == Carrier::Minus).count();
    (minus, pattern.len() - minus)
}

/// Word skeleton of one pulse with the cos(θ/2) prefactor taken out:
/// `1 + a − a†` for ω₋ and `1 + b − b†` for ω₊.
pub fn single_pulse_operator(carrier: Carrier) -> OperatorSum {
    let (low, high) = match carrier {
        Carrier::Minus => (Letter::A, Letter::ADag),
        Carrier::Plus => (Letter::B, Letter::BDag),
    };
    OperatorSum::from_words([
        OperatorWord::identity(),
        OperatorWord::new(1, vec![low]),
        OperatorWord::new(-1, vec![high]),
    ])
}

/// Full evolution operator `U_N ⋯ U_1` for a pattern listed in time order.
pub fn evolution_operator(pattern: &[Carrier]) -> OperatorSum {
    pattern.iter().fold(OperatorSum::identity(), |acc, c| {
        multiply(&single_pulse_operator(*c), &acc)
    })
}

/// Evolution operator with the words that annihilate the ground state removed.
pub fn lambda0(pattern: &[Carrier]) -> OperatorSum {
    ground_state_prune(&evolution_operator(pattern))
}

/// One contribution `c · w_left σ⁻ w_right` to a matrix element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermPair {
    pub coefficient: i64,
    pub left: Vec<Letter>,
    pub right: Vec<Letter>,
}

impl TermPair {
    pub fn phase(&self) -> i32 {
        word_phase(&self.left) + word_phase(&self.right)
    }

    /// Letters of each carrier in the pair, `(n₋, n₊)`.
    pub fn letter_counts(&self) -> (u32, u32) {
        let minus = self
            .left
            .iter()
            .chain(&self.right)
            .filter(|l| l.carrier() == Carrier::Minus)
            .count() as u32;
        (minus, (self.left.len() + self.right.len()) as u32 - minus)
    }
}

impl fmt::Display for TermPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coefficient < 0 { '-' } else { '+' };
        write!(f, "{sign}")?;
        let magnitude = self.coefficient.unsigned_abs();
        if magnitude != 1 {
            write!(f, "{magnitude}")?;
        }
        write_letters(f, &self.left)?;
        f.write_str("σ")?;
        write_letters(f, &self.right)
    }
}

/// ⟨g| w_left σ⁻ w_right |g⟩ for qubit images of the letters. Every word that
/// survives is a unit-amplitude transition path, so the result is 0 or 1.
fn ground_expectation(left: &[Letter], right: &[Letter]) -> i64 {
    let mut excited = false;
    let lowering = left
        .iter()
        .map(|l| l.is_lowering())
        .chain(std::iter::once(true))
        .chain(right.iter().map(|l| l.is_lowering()));
    let ops: Vec<bool> = lowering.collect();
    for low in ops.into_iter().rev() {
        if low != excited {
            return 0;
        }
        excited = !excited;
    }
    i64::from(!excited)
}

/// Surviving `w_left σ⁻ w_right` pairs for a pulse pattern, grouped by phase.
pub fn matrix_element_terms(
    pattern: &[Carrier],
) -> Result<BTreeMap<i32, Vec<TermPair>>, AlgebraError> {
    if pattern.is_empty() {
        return Err(AlgebraError::EmptySequence);
    }
    let (left, right) = arrow_reduce(&lambda0(pattern));
    let mut out: BTreeMap<i32, Vec<TermPair>> = BTreeMap::new();
    for (wl, cl) in left.iter() {
        for (wr, cr) in right.iter() {
            let e = ground_expectation(wl, wr);
            if e == 0 {
                continue;
            }
            let term = TermPair {
                coefficient: cl * cr * e,
                left: wl.to_vec(),
                right: wr.to_vec(),
            };
            out.entry(term.phase()).or_default().push(term);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
struct Monomial {
    coefficient: f64,
    n_minus: i32,
    n_plus: i32,
}

/// Precomputed angle polynomial for every component of one pulse pattern.
///
/// Each term contributes `c · sin(θ₋/2)^{n₋} cos(θ₋/2)^{2N₋−n₋} ·
/// sin(θ₊/2)^{n₊} cos(θ₊/2)^{2N₊−n₊}`, which stays finite at θ = π.
#[derive(Clone, Debug)]
pub struct MixingModel {
    pattern: Vec<Carrier>,
    counts: (usize, usize),
    terms: BTreeMap<i32, Vec<TermPair>>,
    monomials: BTreeMap<i32, Vec<Monomial>>,
}

impl MixingModel {
    pub fn new(pattern: &[Carrier]) -> Result<Self, AlgebraError> {
        let terms = matrix_element_terms(pattern)?;
        let counts = carrier_counts(pattern);
        let monomials = terms
            .iter()
            .map(|(p, list)| {
                let mut merged: BTreeMap<(u32, u32), i64> = BTreeMap::new();
                for t in list {
                    let (nm, np) = t.letter_counts();
                    debug_assert!(nm as usize <= 2 * counts.0 && np as usize <= 2 * counts.1);
                    *merged.entry((nm, np)).or_insert(0) += t.coefficient;
                }
                let monos = merged
                    .into_iter()
                    .filter(|(_, c)| *c != 0)
                    .map(|((nm, np), c)| Monomial {
                        coefficient: c as f64,
                        n_minus: nm as i32,
                        n_plus: np as i32,
                    })
                    .collect();
                (*p, monos)
            })
            .collect();
        Ok(Self {
            pattern: pattern.to_vec(),
            counts,
            terms,
            monomials,
        })
    }

    pub fn pattern(&self) -> &[Carrier] {
        &self.pattern
    }

    pub fn pulse_count(&self) -> usize {
        self.pattern.len()
    }

    pub fn carrier_counts(&self) -> (usize, usize) {
        self.counts
    }

    /// Largest admissible |p|, `2N − 1`.
    pub fn max_component(&self) -> i32 {
        2 * self.pattern.len() as i32 - 1
    }

    /// Components that receive at least one term.
    pub fn support(&self) -> Vec<i32> {
        self.monomials
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn terms(&self) -> &BTreeMap<i32, Vec<TermPair>> {
        &self.terms
    }

    pub fn terms_for(&self, p: i32) -> &[TermPair] {
        self.terms.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    fn check(&self, p: i32) -> Result<(), AlgebraError> {
        let max = self.max_component();
        if p % 2 == 0 || p.abs() > max {
            return Err(AlgebraError::InvalidComponent {
                p,
                pulse_count: self.pattern.len(),
                max,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, p: i32, angles: RotationAngles) -> Result<f64, AlgebraError> {
        self.check(p)?;
        let trig = HalfAngles::new(angles, self.counts);
        Ok(self.evaluate_with(p, &trig))
    }

    fn evaluate_with(&self, p: i32, trig: &HalfAngles) -> f64 {
        self.monomials
            .get(&p)
            .map(|monos| {
                monos
                    .iter()
                    .map(|m| m.coefficient * trig.weight(m.n_minus, m.n_plus))
                    .sum()
            })
            .unwrap_or(0.0)
    }

    /// All components at one angle pair, exact zeros omitted.
    pub fn table(&self, angles: RotationAngles) -> ComponentTable {
        let trig = HalfAngles::new(angles, self.counts);
        let mut table = ComponentTable::new(self.pattern.len(), self.counts);
        for p in self.monomials.keys() {
            let v = self.evaluate_with(*p, &trig);
            if v != 0.0 {
                table.insert(*p, v);
            }
        }
        table
    }

    pub fn net_field(&self, angles: RotationAngles) -> f64 {
        let trig = HalfAngles::new(angles, self.counts);
        self.monomials
            .keys()
            .map(|p| self.evaluate_with(*p, &trig))
            .sum()
    }
}

struct HalfAngles {
    sin_minus: f64,
    cos_minus: f64,
    sin_plus: f64,
    cos_plus: f64,
    two_n_minus: i32,
    two_n_plus: i32,
}

impl HalfAngles {
    fn new(angles: RotationAngles, counts: (usize, usize)) -> Self {
        let (sin_minus, cos_minus) = (angles.theta_minus / 2.0).sin_cos();
        let (sin_plus, cos_plus) = (angles.theta_plus / 2.0).sin_cos();
        Self {
            sin_minus,
            cos_minus,
            sin_plus,
            cos_plus,
            two_n_minus: 2 * counts.0 as i32,
            two_n_plus: 2 * counts.1 as i32,
        }
    }

    fn weight(&self, n_minus: i32, n_plus: i32) -> f64 {
        self.sin_minus.powi(n_minus)
            * self.cos_minus.powi(self.two_n_minus - n_minus)
            * self.sin_plus.powi(n_plus)
            * self.cos_plus.powi(self.two_n_plus - n_plus)
    }
}

/// `V_p` for one pattern and angle pair, in units where the field prefactor
/// is 1.
///
/// Even `p` or `|p| > 2N − 1` is rejected with
/// [`AlgebraError::InvalidComponent`]; an admissible `p` without terms gives
/// `0.0`.
pub fn evaluate_component(
    pattern: &[Carrier],
    p: i32,
    angles: RotationAngles,
) -> Result<f64, AlgebraError> {
    MixingModel::new(pattern)?.evaluate(p, angles)
}

pub fn component_table(
    pattern: &[Carrier],
    angles: RotationAngles,
) -> Result<ComponentTable, AlgebraError> {
    Ok(MixingModel::new(pattern)?.table(angles))
}

/// Sum of all components, the field seen when δω → 0.
pub fn net_field(pattern: &[Carrier], angles: RotationAngles) -> Result<f64, AlgebraError> {
    Ok(MixingModel::new(pattern)?.net_field(angles))
}
