//! Structure-preserving automaton constructions. Everything here keeps the
//! underlying sequence intact except `shift_by_constant`, which shifts it by
//! exactly p.

use std::collections::{HashMap, VecDeque};

use crate::dfao::{digits, Dfao, Symbol};
use crate::error::{Error, Result};

/// Largest permitted digit alphabet for lifted automata.
pub const ALPHABET_CAP: u64 = 1 << 20;

/// Breadth-first order over reachable states, digits ascending.
fn reachable_order(a: &Dfao) -> Vec<usize> {
    let mut order = Vec::new();
    let mut seen = vec![false; a.state_count()];
    let mut queue = VecDeque::new();
    seen[a.initial] = true;
    queue.push_back(a.initial);
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for d in 0..a.base {
            let t = a.step(s, d);
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    order
}

/// Drops unreachable states and renumbers the rest in breadth-first order.
/// The sequence is unchanged.
pub fn trim_accessible(a: &Dfao) -> Dfao {
    let order = reachable_order(a);
    let mut index = vec![usize::MAX; a.state_count()];
    for (new, &old) in order.iter().enumerate() {
        index[old] = new;
    }
    let base = a.base as usize;
    let mut transitions = Vec::with_capacity(order.len() * base);
    let mut outputs = Vec::with_capacity(order.len());
    for &old in &order {
        for d in 0..a.base {
            transitions.push(index[a.step(old, d)]);
        }
        outputs.push(a.outputs[old].clone());
    }
    Dfao {
        base: a.base,
        initial: 0,
        transitions,
        outputs,
    }
}

/// Makes the zero digit fix the initial state without changing the sequence.
/// Unchanged automata are returned as-is; otherwise a fresh initial state is
/// appended that loops on 0 and copies the old initial behavior on nonzero
/// digits.
pub fn normalize_leading_zeros(a: &Dfao) -> Dfao {
    if a.ignores_leading_zeros() {
        return a.clone();
    }
    let n = a.state_count();
    let base = a.base as usize;
    let mut transitions = a.transitions.clone();
    transitions.reserve(base);
    transitions.push(n); // digit 0 loops on the new initial
    for d in 1..a.base {
        transitions.push(a.step(a.initial, d));
    }
    let mut outputs = a.outputs.clone();
    outputs.push(a.outputs[a.initial].clone());
    Dfao {
        base: a.base,
        initial: n,
        transitions,
        outputs,
    }
}

/// Result of `idempotent_lift`: the automaton in base k^exponent.
#[derive(Debug, Clone)]
pub struct LiftResult {
    pub automaton: Dfao,
    pub exponent: u32,
}

/// Re-reads input in blocks of t base-k digits: the result works in base k^t,
/// each digit acting as its t-digit base-k expansion, most-significant first.
/// Requires the automaton to ignore leading zeros so block padding is
/// semantics-neutral.
pub fn lift_base_power(a: &Dfao, t: u32) -> Result<Dfao> {
    if !a.ignores_leading_zeros() {
        return Err(Error::NotLeadingZeroInvariant);
    }
    if t == 0 {
        return Err(Error::InvalidArgument(
            "lift exponent must be at least 1".into(),
        ));
    }
    let size = (a.base as u64)
        .checked_pow(t)
        .filter(|&s| s <= ALPHABET_CAP)
        .ok_or(Error::AlphabetTooLarge {
            exponent: t,
            size: (a.base as u64).saturating_pow(t),
            cap: ALPHABET_CAP,
        })?;
    let new_base = size as u32;
    let n = a.state_count();
    let mut transitions = Vec::with_capacity(n * size as usize);
    for s in 0..n {
        // Walk digits of u most-significant first by peeling powers of k.
        for u in 0..new_base {
            let mut state = s;
            let mut power = size / a.base as u64;
            let mut rest = u as u64;
            for _ in 0..t {
                let d = (rest / power) as u32;
                rest %= power;
                state = a.step(state, d);
                power = if power == 1 { 1 } else { power / a.base as u64 };
            }
            transitions.push(state);
        }
    }
    Dfao::new(new_base, a.initial, transitions, a.outputs.clone())
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    // (f . g)(s) = f(g(s))
    g.iter().map(|&s| f[s]).collect()
}

/// Lifts to the smallest base power that makes the zero action idempotent:
/// the minimal t >= 1 with f^(2t) = f^t for the zero action f.
pub fn idempotent_lift(a: &Dfao) -> Result<LiftResult> {
    if !a.ignores_leading_zeros() {
        return Err(Error::NotLeadingZeroInvariant);
    }
    let f = a.zero_action();
    let mut f_t = f.clone();
    let mut t = 1u32;
    loop {
        let f_2t = compose(&f_t, &f_t);
        if f_2t == f_t {
            break;
        }
        t += 1;
        if (a.base as u64)
            .checked_pow(t)
            .is_none_or(|s| s > ALPHABET_CAP)
        {
            return Err(Error::AlphabetTooLarge {
                exponent: t,
                size: (a.base as u64).saturating_pow(t),
                cap: ALPHABET_CAP,
            });
        }
        f_t = compose(&f, &f_t);
    }
    Ok(LiftResult {
        automaton: lift_base_power(a, t)?,
        exponent: t,
    })
}

/// Product automaton over reachable state pairs together with the pair each
/// new state stands for.
pub fn product_with_map(
    a: &Dfao,
    b: &Dfao,
    combine: impl Fn(&Symbol, &Symbol) -> Symbol,
) -> Result<(Dfao, Vec<(usize, usize)>)> {
    if a.base != b.base {
        return Err(Error::BaseMismatch {
            left: a.base,
            right: b.base,
        });
    }
    let base = a.base;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(a.initial, b.initial)];
    index.insert(pairs[0], 0);
    let mut transitions = Vec::new();
    let mut at = 0;
    while at < pairs.len() {
        let (sa, sb) = pairs[at];
        for d in 0..base {
            let next = (a.step(sa, d), b.step(sb, d));
            let id = *index.entry(next).or_insert_with(|| {
                pairs.push(next);
                pairs.len() - 1
            });
            transitions.push(id);
        }
        at += 1;
    }
    let outputs = pairs
        .iter()
        .map(|&(sa, sb)| combine(a.output(sa), b.output(sb)))
        .collect();
    let dfao = Dfao {
        base,
        initial: 0,
        transitions,
        outputs,
    };
    Ok((dfao, pairs))
}

/// Product automaton: eval(product, n) = combine(eval(a, n), eval(b, n)).
pub fn product(a: &Dfao, b: &Dfao, combine: impl Fn(&Symbol, &Symbol) -> Symbol) -> Result<Dfao> {
    product_with_map(a, b, combine).map(|(d, _)| d)
}

/// The q-state residue tracker: eval(mod_tracker(k, q), n) = n mod q, with
/// output tokens the decimal residues.
pub fn mod_tracker(base: u32, q: u64) -> Result<Dfao> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    if q > 1 << 20 {
        return Err(Error::InvalidArgument(format!("modulus {q} too large")));
    }
    let states = q as usize;
    let mut transitions = Vec::with_capacity(states * base as usize);
    for r in 0..q {
        for d in 0..base as u64 {
            transitions.push(((r * base as u64 + d) % q) as usize);
        }
    }
    let outputs = (0..q).map(|r| r.to_string()).collect();
    Dfao::new(base, 0, transitions, outputs)
}

/// Minimal automaton with the same sequence: partition refinement seeded by
/// the output map, then a breadth-first renumbering for reproducibility.
pub fn minimize(a: &Dfao) -> Dfao {
    let a = trim_accessible(a);
    let n = a.state_count();
    let base = a.base as usize;

    let mut class: Vec<usize> = {
        let mut by_output: HashMap<&Symbol, usize> = HashMap::new();
        let alphabet = a.alphabet();
        for (i, sym) in alphabet.iter().enumerate() {
            by_output.insert(sym, i);
        }
        a.outputs.iter().map(|sym| by_output[sym]).collect()
    };
    let mut class_count = class.iter().max().map_or(0, |m| m + 1);

    loop {
        let mut next_id: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let mut sig = Vec::with_capacity(base + 1);
            sig.push(class[s]);
            for d in 0..a.base {
                sig.push(class[a.step(s, d)]);
            }
            let fresh = next_id.len();
            next[s] = *next_id.entry(sig).or_insert(fresh);
        }
        let next_count = next_id.len();
        if next_count == class_count {
            break;
        }
        class = next;
        class_count = next_count;
    }

    let mut rep = vec![usize::MAX; class_count];
    for s in 0..n {
        if rep[class[s]] == usize::MAX {
            rep[class[s]] = s;
        }
    }
    let mut transitions = Vec::with_capacity(class_count * base);
    let mut outputs = Vec::with_capacity(class_count);
    for c in 0..class_count {
        let s = rep[c];
        for d in 0..a.base {
            transitions.push(class[a.step(s, d)]);
        }
        outputs.push(a.outputs[s].clone());
    }
    let quotient = Dfao {
        base: a.base,
        initial: class[a.initial],
        transitions,
        outputs,
    };
    trim_accessible(&quotient)
}

/// An automaton meant to be read least-significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsdDfao {
    pub automaton: Dfao,
}

impl LsdDfao {
    /// Value at n: fold the digits of n least-significant first.
    pub fn eval(&self, n: &num_bigint::BigUint) -> &Symbol {
        let a = &self.automaton;
        let mut word = digits(n, a.base).expect("base checked at construction");
        word.digits.reverse();
        let s = a.eval_word(a.initial, &word).expect("same base");
        a.output(s)
    }

    pub fn eval_u64(&self, n: u64) -> &Symbol {
        self.eval(&num_bigint::BigUint::from(n))
    }
}

/// Reading-direction reversal of the word function: the result, fed a word w,
/// outputs what `a` outputs on reverse(w). States are the reachable maps
/// "state of a -> eventual output", explored breadth-first with digits
/// ascending; for a trimmed input the construction is minimal.
fn reverse_word_function(a: &Dfao) -> Dfao {
    let a = trim_accessible(a);
    let alphabet = a.alphabet();
    let sym_id: HashMap<&Symbol, u32> = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();
    let out_ids: Vec<u32> = a.outputs.iter().map(|s| sym_id[s]).collect();

    let start: Vec<u32> = out_ids.clone();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut at = 0;
    while at < states.len() {
        let cur = states[at].clone();
        for d in 0..a.base {
            let next: Vec<u32> = (0..a.state_count()).map(|s| cur[a.step(s, d)]).collect();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            transitions.push(id);
        }
        at += 1;
    }
    let outputs = states
        .iter()
        .map(|h| alphabet[h[a.initial] as usize].clone())
        .collect();
    Dfao {
        base: a.base,
        initial: 0,
        transitions,
        outputs,
    }
}

/// Converts a most-significant-first automaton into one that reads digits
/// least-significant first while defining the same sequence.
pub fn reverse_reading(a: &Dfao) -> Result<LsdDfao> {
    if !a.ignores_leading_zeros() {
        return Err(Error::NotLeadingZeroInvariant);
    }
    Ok(LsdDfao {
        automaton: reverse_word_function(a),
    })
}

fn digits_lsd_u64(mut v: u64, base: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while v > 0 {
        out.push((v % base as u64) as u32);
        v /= base as u64;
    }
    out
}

/// Automaton for n -> eval(a, n + p), built by composing the
/// least-significant-first form of `a` with the carry chain of the constant
/// addition, then reversing back.
pub fn shift_by_constant(a: &Dfao, p: u64) -> Result<Dfao> {
    if !a.ignores_leading_zeros() {
        return Err(Error::NotLeadingZeroInvariant);
    }
    if p == 0 {
        return Ok(a.clone());
    }
    let base = a.base;
    let lsd = reverse_word_function(&trim_accessible(a));
    let p_digits = digits_lsd_u64(p, base);
    let p_len = p_digits.len();
    // Suffixes of p: rest[j] = floor(p / base^j).
    let mut rest = Vec::with_capacity(p_len + 1);
    rest.push(p);
    for j in 0..p_len {
        rest.push(rest[j] / base as u64);
    }

    // State: (digits of n consumed, capped at p_len; carry; state of the lsd
    // machine after the emitted digits of n + p).
    type AddState = (usize, u8, usize);
    let start: AddState = (0, 0, lsd.initial);
    let mut index: HashMap<AddState, usize> = HashMap::new();
    let mut states = vec![start];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut at = 0;
    while at < states.len() {
        let (j, carry, g) = states[at];
        for d in 0..base {
            let p_digit = if j < p_len { p_digits[j] } else { 0 };
            let sum = d as u64 + p_digit as u64 + carry as u64;
            let out_digit = (sum % base as u64) as u32;
            let carry_next = (sum / base as u64) as u8;
            let next: AddState = ((j + 1).min(p_len), carry_next, lsd.step(g, out_digit));
            let id = *index.entry(next).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            transitions.push(id);
        }
        at += 1;
    }
    // Output when the input ends here: feed the unemitted digits of n + p,
    // which are exactly the digits of floor(p / base^j) + carry.
    let outputs = states
        .iter()
        .map(|&(j, carry, g)| {
            let mut s = g;
            let mut tail = rest[j] + carry as u64;
            while tail > 0 {
                s = lsd.step(s, (tail % base as u64) as u32);
                tail /= base as u64;
            }
            lsd.output(s).clone()
        })
        .collect();
    let lsd_shifted = Dfao {
        base,
        initial: 0,
        transitions,
        outputs,
    };
    Ok(reverse_word_function(&lsd_shifted))
}
