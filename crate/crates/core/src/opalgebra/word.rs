use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::Carrier;

/// One of the mode-dressed qubit operators.
///
/// `A`/`ADag` belong to the ω₋ drive and `B`/`BDag` to the ω₊ drive. On the
/// qubit, `A` and `B` act as the lowering operator and the daggered letters as
/// the raising operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    ADag,
    B,
    BDag,
}

impl Letter {
    /// Phase carried by the letter in units of δω·t.
    pub fn phase(self) -> i32 {
        match self {
            Letter::A => 1,
            Letter::ADag => -1,
            Letter::B => -1,
            Letter::BDag => 1,
        }
    }

    pub fn is_lowering(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    pub fn is_raising(self) -> bool {
        !self.is_lowering()
    }

    pub fn carrier(self) -> Carrier {
        match self {
            Letter::A | Letter::ADag => Carrier::Minus,
            Letter::B | Letter::BDag => Carrier::Plus,
        }
    }

    pub fn dagger(self) -> Letter {
        match self {
            Letter::A => Letter::ADag,
            Letter::ADag => Letter::A,
            Letter::B => Letter::BDag,
            Letter::BDag => Letter::B,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::ADag => "a†",
            Letter::B => "b",
            Letter::BDag => "b†",
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Returns true when no two neighbouring letters are both lowering or both
/// raising. Words failing this test vanish on the qubit.
pub fn is_alternating(letters: &[Letter]) -> bool {
    letters
        .windows(2)
        .all(|w| w[0].is_lowering() != w[1].is_lowering())
}

/// Sum of letter phases.
pub fn word_phase(letters: &[Letter]) -> i32 {
    letters.iter().map(|l| l.phase()).sum()
}

pub(crate) fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    for l in letters {
        write!(f, "{l}")?;
    }
    Ok(())
}

/// A signed product of letters. The leftmost letter acts last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorWord {
    pub coefficient: i64,
    pub letters: Vec<Letter>,
}

impl OperatorWord {
    pub fn new(coefficient: i64, letters: Vec<Letter>) -> Self {
        Self {
            coefficient,
            letters,
        }
    }

    pub fn identity() -> Self {
        Self::new(1, Vec::new())
    }

    pub fn is_identity_word(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn phase(&self) -> i32 {
        word_phase(&self.letters)
    }

    pub fn leftmost(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn rightmost(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn dagger(&self) -> OperatorWord {
        OperatorWord {
            coefficient: self.coefficient,
            letters: self.letters.iter().rev().map(|l| l.dagger()).collect(),
        }
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coefficient < 0 { '-' } else { '+' };
        let magnitude = self.coefficient.unsigned_abs();
        write!(f, "{sign}")?;
        if self.letters.is_empty() {
            return write!(f, "{magnitude}");
        }
        if magnitude != 1 {
            write!(f, "{magnitude}")?;
        }
        write_letters(f, &self.letters)
    }
}

/// A canonical linear combination of operator words with integer coefficients.
///
/// Terms are kept sorted by letter sequence with no duplicates and no zero
/// coefficients, so two sums are equal exactly when they are the same operator
/// expression.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorSum {
    terms: BTreeMap<Vec<Letter>, i64>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_words([OperatorWord::identity()])
    }

    /// Builds a sum, merging equal letter sequences and dropping zeros.
    pub fn from_words<I: IntoIterator<Item = OperatorWord>>(words: I) -> Self {
        let mut sum = Self::zero();
        for w in words {
            sum.add_word(w.letters, w.coefficient);
        }
        sum
    }

    fn add_word(&mut self, letters: Vec<Letter>, coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        match self.terms.entry(letters) {
            Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coefficient;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, letters: &[Letter]) -> i64 {
        self.terms.get(letters).copied().unwrap_or(0)
    }

    pub fn words(&self) -> impl Iterator<Item = OperatorWord> + '_ {
        self.terms
            .iter()
            .map(|(l, c)| OperatorWord::new(*c, l.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Letter], i64)> + '_ {
        self.terms.iter().map(|(l, c)| (l.as_slice(), *c))
    }

    /// Re-merges the terms. A no-op on sums produced by this type; present so
    /// that canonical form can be asserted.
    pub fn canonicalize(&self) -> Self {
        Self::from_words(self.words())
    }

    /// Keeps the terms for which `keep` returns true.
    pub fn filter<F: FnMut(&[Letter], i64) -> bool>(&self, mut keep: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(l, c)| keep(l, **c))
                .map(|(l, c)| (l.clone(), *c))
                .collect(),
        }
    }

    /// Terms present in `self` or `other` whose coefficients differ, as
    /// `(letters, self coefficient, other coefficient)`.
    pub fn differences(&self, other: &OperatorSum) -> Vec<(Vec<Letter>, i64, i64)> {
        let mut keys: Vec<&Vec<Letter>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|k| {
                let a = self.coefficient(k);
                let b = other.coefficient(k);
                (a != b).then(|| (k.clone(), a, b))
            })
            .collect()
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, w) in self.words().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Product `left · right`: letter lists are concatenated with the left
/// operand's letters first, and every word with two neighbouring lowering or
/// raising letters is deleted.
pub fn multiply(left: &OperatorSum, right: &OperatorSum) -> OperatorSum {
    let mut out = OperatorSum::zero();
    for (l, cl) in left.iter() {
        for (r, cr) in right.iter() {
            if let (Some(&last), Some(&first)) = (l.last(), r.first()) {
                if last.is_lowering() == first.is_lowering() {
                    continue;
                }
            }
            let mut letters = Vec::with_capacity(l.len() + r.len());
            letters.extend_from_slice(l);
            letters.extend_from_slice(r);
            out.add_word(letters, cl * cr);
        }
    }
    out
}

/// Removes words whose rightmost letter lowers the qubit; these annihilate the
/// ground state.
pub fn ground_state_prune(sum: &OperatorSum) -> OperatorSum {
    sum.filter(|letters, _| !letters.last().is_some_and(|l| l.is_lowering()))
}

/// Hermitian conjugate: every word is reversed and each letter daggered.
pub fn dagger(sum: &OperatorSum) -> OperatorSum {
    OperatorSum::from_words(sum.words().map(|w| w.dagger()))
}

/// Splits a ground-state-pruned operator into its left-acting and
/// right-acting reduced forms `(Λ←, Λ→)`.
///
/// Λ→ keeps the words whose leftmost letter raises the qubit (σ⁻ standing to
/// their left must find the qubit excited). The identity is dropped on this
/// side since ⟨g|σ⁻|g⟩ = 0 leaves nothing for it to pair with usefully. Λ← is
/// the conjugate with words ending in a lowering letter removed; the identity
/// survives there.
pub fn arrow_reduce(lambda0: &OperatorSum) -> (OperatorSum, OperatorSum) {
    let right = lambda0.filter(|letters, _| letters.first().is_some_and(|l| l.is_raising()));
    let left = dagger(lambda0)
        .filter(|letters, _| !letters.last().is_some_and(|l| l.is_lowering()));
    (left, right)
}
