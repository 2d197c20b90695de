//! Window-based factor machinery: factor sets, lexicographic minimum
//! prefixes, recurrence gap statistics, and empirical factor-language
//! comparison. Windows are materialized prefixes; results about the infinite
//! word hold to the extent the window is long enough, which the two-window
//! stability checks probe.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::dfao::{Dfao, Symbol};
use crate::error::{Error, Result};

/// A materialized prefix of an automatic sequence with a total order on its
/// output alphabet. Symbols are stored as ranks into `alphabet`.
#[derive(Debug, Clone)]
pub struct SubshiftWindow {
    pub alphabet: Vec<Symbol>,
    pub symbols: Vec<u32>,
}

impl SubshiftWindow {
    /// Evaluates the first `len` terms. The order defaults to lexicographic
    /// over the output tokens; an explicit order must cover the automaton's
    /// alphabet.
    pub fn materialize(a: &Dfao, len: usize, order: Option<&[Symbol]>) -> Result<Self> {
        let alphabet: Vec<Symbol> = match order {
            None => a.alphabet(),
            Some(given) => {
                let mut seen = HashSet::new();
                for tok in given {
                    if !seen.insert(tok) {
                        return Err(Error::InvalidArgument(format!(
                            "symbol order repeats token {tok:?}"
                        )));
                    }
                }
                for tok in a.alphabet() {
                    if !seen.contains(&tok) {
                        return Err(Error::InvalidArgument(format!(
                            "symbol order misses output token {tok:?}"
                        )));
                    }
                }
                given.to_vec()
            }
        };
        let rank: HashMap<&Symbol, u32> = alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i as u32))
            .collect();
        let per_state: Vec<u32> = a.outputs.iter().map(|s| rank[s]).collect();
        let symbols = a.stream().take(len).map(|s| per_state[s]).collect();
        Ok(SubshiftWindow { alphabet, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Token form of a factor: concatenated for single-character alphabets,
    /// space-separated otherwise.
    pub fn render(&self, factor: &[u32]) -> String {
        let compact = self.alphabet.iter().all(|t| t.chars().count() == 1);
        let parts: Vec<&str> = factor
            .iter()
            .map(|&r| self.alphabet[r as usize].as_str())
            .collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    fn check_length(&self, m: usize) -> Result<()> {
        if m > self.len() {
            Err(Error::WindowTooShort {
                m,
                window: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// All distinct length-m factors, sorted in the window's symbol order.
pub fn factors(w: &SubshiftWindow, m: usize) -> Result<Vec<Vec<u32>>> {
    w.check_length(m)?;
    let mut seen: HashSet<&[u32]> = HashSet::new();
    for i in 0..=w.len() - m {
        seen.insert(&w.symbols[i..i + m]);
    }
    let mut out: Vec<Vec<u32>> = seen.into_iter().map(|s| s.to_vec()).collect();
    out.sort_unstable();
    Ok(out)
}

/// The lexicographically least length-m factor of the window.
pub fn min_prefix(w: &SubshiftWindow, m: usize) -> Result<Vec<u32>> {
    w.check_length(m)?;
    let mut best = &w.symbols[0..m];
    for i in 1..=w.len() - m {
        let cand = &w.symbols[i..i + m];
        if cand < best {
            best = cand;
        }
    }
    Ok(best.to_vec())
}

/// Gap statistics per factor. `max_gap` is the largest distance between
/// consecutive occurrence starts inside the window; `tail_gap` is the
/// distance from the last occurrence to the window end, reported separately
/// because it is censored.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub max_gap: BTreeMap<Vec<u32>, usize>,
    pub tail_gap: BTreeMap<Vec<u32>, usize>,
}

pub fn recurrence_gaps(w: &SubshiftWindow, m: usize) -> Result<GapReport> {
    w.check_length(m)?;
    let mut last: HashMap<&[u32], usize> = HashMap::new();
    let mut widest: HashMap<&[u32], usize> = HashMap::new();
    for i in 0..=w.len() - m {
        let factor = &w.symbols[i..i + m];
        if let Some(&prev) = last.get(factor) {
            let gap = i - prev;
            let entry = widest.entry(factor).or_insert(0);
            *entry = (*entry).max(gap);
        } else {
            widest.entry(factor).or_insert(0);
        }
        last.insert(factor, i);
    }
    let final_start = w.len() - m;
    let mut max_gap = BTreeMap::new();
    let mut tail_gap = BTreeMap::new();
    for (factor, gap) in widest {
        max_gap.insert(factor.to_vec(), gap);
        tail_gap.insert(factor.to_vec(), final_start - last[factor]);
    }
    Ok(GapReport { max_gap, tail_gap })
}

/// Per-length verdicts on whether the two windows expose the same factor
/// sets. Windows must share the ordered output alphabet.
pub fn language_equal_empirical(
    wa: &SubshiftWindow,
    wb: &SubshiftWindow,
    m_max: usize,
) -> Result<Vec<(usize, bool)>> {
    if wa.alphabet != wb.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    let mut verdicts = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        verdicts.push((m, factors(wa, m)? == factors(wb, m)?));
    }
    Ok(verdicts)
}
