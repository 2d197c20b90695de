//! The DFAO data model: base-k digit words, automata with output, evaluation
//! and validation.
//!
//! An automaton reads the base-k digits of n most-significant digit first and
//! outputs the symbol attached to the final state. The representation of 0 is
//! the empty word, so the value at 0 is the output of the initial state.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Output symbols are opaque tokens compared by equality.
pub type Symbol = String;

/// A word of digits in a fixed base, most-significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitWord {
    pub base: u32,
    pub digits: Vec<u32>,
}

impl DigitWord {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase { base: base as u64 });
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidArgument(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        Ok(DigitWord { base, digits })
    }

    pub fn empty(base: u32) -> Self {
        DigitWord {
            base,
            digits: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// A canonical word has no leading zero; the empty word represents 0.
    pub fn is_canonical(&self) -> bool {
        self.digits.first().is_none_or(|&d| d != 0)
    }

    /// The number this word denotes when read as a base-k numeral.
    pub fn value(&self) -> BigUint {
        let base = BigUint::from(self.base);
        let mut acc = BigUint::zero();
        for &d in &self.digits {
            acc = acc * &base + BigUint::from(d);
        }
        acc
    }
}

impl std::fmt::Display for DigitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "(empty)");
        }
        let mut first = true;
        for d in &self.digits {
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

/// The canonical base-k representation of n: most-significant digit first,
/// no leading zeros, empty for n = 0.
pub fn digits(n: &BigUint, base: u32) -> Result<DigitWord> {
    if base < 2 {
        return Err(Error::InvalidBase { base: base as u64 });
    }
    let mut out = Vec::new();
    let big_base = BigUint::from(base);
    let mut rest = n.clone();
    while !rest.is_zero() {
        let (q, r) = num_integer::Integer::div_rem(&rest, &big_base);
        out.push(u32::try_from(&r).expect("remainder below base fits u32"));
        rest = q;
    }
    out.reverse();
    Ok(DigitWord { base, digits: out })
}

/// A deterministic finite automaton with output over the digit alphabet
/// {0, .., base-1}. Transitions are stored row-major: `transitions[s * base + d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    pub base: u32,
    pub initial: usize,
    pub transitions: Vec<usize>,
    pub outputs: Vec<Symbol>,
}

impl Dfao {
    /// Builds an automaton and checks the structural invariants: base at least 2,
    /// a transition target per (state, digit), all indices in range, outputs
    /// non-empty whitespace-free tokens.
    pub fn new(
        base: u32,
        initial: usize,
        transitions: Vec<usize>,
        outputs: Vec<Symbol>,
    ) -> Result<Self> {
        let a = Dfao {
            base,
            initial,
            transitions,
            outputs,
        };
        let diag = a.validate();
        if let Some(first) = diag.errors.first() {
            return Err(Error::InvalidAutomaton {
                message: format!("{}: {}", first.code, first.message),
            });
        }
        Ok(a)
    }

    pub fn state_count(&self) -> usize {
        self.outputs.len()
    }

    #[inline]
    pub fn step(&self, state: usize, digit: u32) -> usize {
        self.transitions[state * self.base as usize + digit as usize]
    }

    pub fn output(&self, state: usize) -> &Symbol {
        &self.outputs[state]
    }

    /// Distinct output tokens in sorted order.
    pub fn alphabet(&self) -> Vec<Symbol> {
        let set: BTreeSet<&Symbol> = self.outputs.iter().collect();
        set.into_iter().cloned().collect()
    }

    /// Folds transitions over a word starting at `state`; the empty word
    /// returns `state` unchanged.
    pub fn eval_word(&self, state: usize, word: &DigitWord) -> Result<usize> {
        if word.base != self.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: word.base,
            });
        }
        let mut s = state;
        for &d in &word.digits {
            s = self.step(s, d);
        }
        Ok(s)
    }

    /// The n-th value of the sequence: output of the state reached from the
    /// initial state on the canonical digits of n.
    pub fn eval(&self, n: &BigUint) -> &Symbol {
        let word = digits(n, self.base).expect("base checked at construction");
        let s = self.eval_word(self.initial, &word).expect("same base");
        self.output(s)
    }

    pub fn eval_u64(&self, n: u64) -> &Symbol {
        self.eval(&BigUint::from(n))
    }

    /// True when the zero digit fixes the initial state, so padded
    /// representations evaluate identically.
    pub fn ignores_leading_zeros(&self) -> bool {
        self.step(self.initial, 0) == self.initial
    }

    /// The action of the zero digit on states.
    pub fn zero_action(&self) -> Vec<usize> {
        (0..self.state_count()).map(|s| self.step(s, 0)).collect()
    }

    /// True when the zero action f satisfies f(f(s)) = f(s) for every state.
    pub fn is_idempotent(&self) -> bool {
        let f = self.zero_action();
        f.iter().all(|&t| f[t] == t)
    }

    /// Structural diagnostics: errors make the automaton unusable, warnings
    /// (unreachable states) do not.
    pub fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics::default();
        let n = self.state_count();
        if self.base < 2 {
            diag.error("invalid-base", format!("base {} is below 2", self.base));
        }
        if n == 0 {
            diag.error("no-states", "automaton has no states".to_string());
            return diag;
        }
        if self.initial >= n {
            diag.error(
                "initial-out-of-range",
                format!("initial state {} not below state count {n}", self.initial),
            );
        }
        let expected = n * self.base as usize;
        if self.transitions.len() != expected {
            diag.error(
                "missing-transition",
                format!(
                    "transition table has {} entries, expected {expected}",
                    self.transitions.len()
                ),
            );
        }
        for (i, &t) in self.transitions.iter().enumerate() {
            if t >= n {
                let s = i / self.base as usize;
                let d = i % self.base as usize;
                diag.error(
                    "target-out-of-range",
                    format!("transition ({s}, {d}) points to invalid state {t}"),
                );
            }
        }
        for (s, tok) in self.outputs.iter().enumerate() {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) || tok.starts_with('#') {
                diag.error(
                    "invalid-output-token",
                    format!("state {s} has unusable output token {tok:?}"),
                );
            }
        }
        if diag.errors.is_empty() {
            for s in unreachable_states(self) {
                diag.warn("unreachable-state", format!("state {s} is unreachable"));
            }
        }
        diag
    }

    /// Iterator over the final state for n = 0, 1, 2, ...; amortized O(1)
    /// per step via an incremental digit counter.
    pub fn stream(&self) -> OutputStream<'_> {
        OutputStream::new(self, &BigUint::zero())
    }

    /// Like `stream`, starting at an arbitrary n.
    pub fn stream_from(&self, start: &BigUint) -> OutputStream<'_> {
        OutputStream::new(self, start)
    }
}

fn unreachable_states(a: &Dfao) -> Vec<usize> {
    let n = a.state_count();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    if a.initial < n {
        seen[a.initial] = true;
        queue.push_back(a.initial);
    }
    while let Some(s) = queue.pop_front() {
        for d in 0..a.base {
            let t = a.step(s, d);
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    (0..n).filter(|&s| !seen[s]).collect()
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
}

/// Validation outcome; the automaton is usable iff `errors` is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostics {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, code: &str, message: String) {
        self.errors.push(Diagnostic {
            code: code.to_string(),
            message,
        });
    }

    fn warn(&mut self, code: &str, message: String) {
        self.warnings.push(Diagnostic {
            code: code.to_string(),
            message,
        });
    }
}

/// Sequential evaluator: yields the state reached on the canonical digits of
/// n for n = start, start+1, ... The digit counter is kept least-significant
/// digit first; a stack of partial folds is patched where carries stop.
pub struct OutputStream<'a> {
    dfao: &'a Dfao,
    digits_lsd: Vec<u32>,
    // fold_states[j] = state after consuming digits at positions len-1 .. j
    // (msd-first); fold_states[len] = initial, fold_states[0] = final state.
    fold_states: Vec<usize>,
    started: bool,
}

impl<'a> OutputStream<'a> {
    fn new(dfao: &'a Dfao, start: &BigUint) -> Self {
        let word = digits(start, dfao.base).expect("base checked at construction");
        let mut digits_lsd = word.digits;
        digits_lsd.reverse();
        let mut stream = OutputStream {
            dfao,
            digits_lsd,
            fold_states: Vec::new(),
            started: false,
        };
        stream.rebuild();
        stream
    }

    fn rebuild(&mut self) {
        let len = self.digits_lsd.len();
        self.fold_states.clear();
        self.fold_states.resize(len + 1, self.dfao.initial);
        for j in (0..len).rev() {
            self.fold_states[j] = self.dfao.step(self.fold_states[j + 1], self.digits_lsd[j]);
        }
    }

    fn increment(&mut self) {
        let base = self.dfao.base;
        let mut pos = 0;
        while pos < self.digits_lsd.len() && self.digits_lsd[pos] == base - 1 {
            self.digits_lsd[pos] = 0;
            pos += 1;
        }
        if pos == self.digits_lsd.len() {
            self.digits_lsd.push(1);
            self.rebuild();
            return;
        }
        self.digits_lsd[pos] += 1;
        for j in (0..=pos).rev() {
            self.fold_states[j] = self.dfao.step(self.fold_states[j + 1], self.digits_lsd[j]);
        }
    }
}

impl<'a> Iterator for OutputStream<'a> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.started {
            self.increment();
        }
        self.started = true;
        Some(self.fold_states[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn digits_examples() {
        assert_eq!(digits(&n(12), 2).unwrap().digits, vec![1, 1, 0, 0]);
        assert_eq!(digits(&n(0), 9).unwrap().digits, Vec::<u32>::new());
        assert_eq!(digits(&n(145), 12).unwrap().digits, vec![1, 0, 1]);
        assert!(matches!(digits(&n(5), 1), Err(Error::InvalidBase { .. })));
    }

    #[test]
    fn digits_are_canonical_and_invert() {
        for v in 0..100_000u64 {
            let w = digits(&n(v), 3).unwrap();
            assert!(w.is_canonical());
            assert_eq!(w.value(), n(v));
        }
    }

    #[test]
    fn digits_round_trip_wide_integers() {
        let mut rng = samples::SeededRng::new(0x5eed);
        for _ in 0..100 {
            let bytes: Vec<u8> = (0..4)
                .flat_map(|_| rng.next_u64().to_le_bytes())
                .take(25)
                .collect();
            let v = BigUint::from_bytes_le(&bytes);
            for base in [2u32, 7, 12, 256, 1000] {
                let w = digits(&v, base).unwrap();
                assert!(w.is_canonical());
                assert_eq!(w.value(), v);
            }
        }
    }

    /// Binary digit-sum parity, independent of the automaton code path.
    fn parity_oracle(mut v: u64) -> u32 {
        let mut acc = 0;
        while v > 0 {
            acc ^= (v & 1) as u32;
            v >>= 1;
        }
        acc
    }

    #[test]
    fn eval_thue_morse() {
        let tm = samples::thue_morse();
        assert_eq!(tm.eval_u64(0), "0");
        assert_eq!(tm.eval_u64(3), &parity_oracle(3).to_string());
        assert_eq!(tm.eval_u64(7), &parity_oracle(7).to_string());
        for v in 0..512 {
            assert_eq!(tm.eval_u64(v), &parity_oracle(v).to_string());
        }
    }

    #[test]
    fn eval_word_examples() {
        let tm = samples::thue_morse();
        let empty = DigitWord::empty(2);
        assert_eq!(tm.eval_word(1, &empty).unwrap(), 1);
        let w = DigitWord::new(2, vec![1, 1]).unwrap();
        assert_eq!(tm.eval_word(0, &w).unwrap(), 0);
        let w = DigitWord::new(2, vec![1, 0]).unwrap();
        assert_eq!(tm.eval_word(0, &w).unwrap(), 1);
        let bad = DigitWord::new(3, vec![1]).unwrap();
        assert!(matches!(
            tm.eval_word(0, &bad),
            Err(Error::BaseMismatch { .. })
        ));
    }

    #[test]
    fn eval_agrees_with_word_fold() {
        let autos = [samples::thue_morse(), samples::digit_length_parity(3)];
        for a in &autos {
            for v in 0..100_000u64 {
                let w = digits(&n(v), a.base).unwrap();
                let s = a.eval_word(a.initial, &w).unwrap();
                assert_eq!(a.eval(&n(v)), a.output(s));
            }
        }
    }

    #[test]
    fn stream_matches_pointwise_eval() {
        let tm = samples::thue_morse();
        let got: Vec<String> = tm
            .stream()
            .take(2000)
            .map(|s| tm.output(s).clone())
            .collect();
        for (v, sym) in got.iter().enumerate() {
            assert_eq!(sym, tm.eval_u64(v as u64));
        }
        let from = tm.stream_from(&n(12345)).take(500);
        for (off, s) in from.enumerate() {
            assert_eq!(tm.output(s), tm.eval_u64(12345 + off as u64));
        }
    }

    #[test]
    fn validate_flags_problems() {
        let tm = samples::thue_morse();
        assert!(tm.validate().ok());

        let mut bad = tm.clone();
        bad.transitions[2] = 7;
        let diag = bad.validate();
        assert!(diag.errors.iter().any(|d| d.code == "target-out-of-range"));

        let mut short = tm.clone();
        short.transitions.pop();
        let diag = short.validate();
        assert!(diag.errors.iter().any(|d| d.code == "missing-transition"));

        // isolated extra state: valid but unreachable
        let spare = Dfao::new(
            2,
            0,
            vec![0, 1, 1, 0, 2, 2],
            vec!["0".into(), "1".into(), "x".into()],
        )
        .unwrap();
        let diag = spare.validate();
        assert!(diag.ok());
        assert!(diag.warnings.iter().any(|d| d.code == "unreachable-state"));
    }
}
