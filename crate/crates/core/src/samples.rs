//! Named example automata and deterministic generators used throughout the
//! test suites and handy for CLI experiments.

use crate::dfao::{Dfao, Symbol};
use crate::transforms::{mod_tracker, trim_accessible};

/// Deterministic splitmix64 generator. Everything built from it is a pure
/// function of the seed.
pub struct SeededRng(u64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform-enough value in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// The Thue-Morse automaton: binary digit-sum parity, outputs "0"/"1".
pub fn thue_morse() -> Dfao {
    Dfao::new(2, 0, vec![0, 1, 1, 0], vec!["0".into(), "1".into()]).expect("well-formed")
}

/// Single-state automaton with a constant output.
pub fn constant(base: u32, symbol: &str) -> Dfao {
    Dfao::new(base, 0, vec![0; base as usize], vec![symbol.to_string()]).expect("well-formed")
}

/// Parity of the number of digits of n in the given base, built to ignore
/// leading zeros: a fresh start state, then a two-state toggle. Its only sink
/// component carries both outputs.
pub fn digit_length_parity(base: u32) -> Dfao {
    let b = base as usize;
    let mut transitions = Vec::with_capacity(3 * b);
    // state 0: start; 1: odd digit count; 2: even digit count
    transitions.push(0);
    transitions.extend(std::iter::repeat_n(1, b - 1));
    transitions.extend(std::iter::repeat_n(2, b));
    transitions.extend(std::iter::repeat_n(1, b));
    Dfao::new(
        base,
        0,
        transitions,
        vec!["0".into(), "1".into(), "0".into()],
    )
    .expect("well-formed")
}

/// Exactly periodic sequence: value at n is `values[n mod values.len()]`.
pub fn periodic(base: u32, values: &[&str]) -> Dfao {
    let q = values.len() as u64;
    let tracker = mod_tracker(base, q).expect("period is positive");
    let outputs = (0..values.len()).map(|r| values[r].to_string()).collect();
    Dfao { outputs, ..tracker }
}

/// Indicator of the singleton {n}: outputs "1" exactly at n.
pub fn indicator_singleton(base: u32, n: u64) -> Dfao {
    let word = crate::dfao::digits(&num_bigint::BigUint::from(n), base).expect("valid base");
    let chain = word.digits.len();
    let b = base as usize;
    // states 0..=chain follow the digits of n; state chain+1 is dead
    let dead = chain + 1;
    let mut transitions = vec![dead; (chain + 2) * b];
    for (i, &d) in word.digits.iter().enumerate() {
        transitions[i * b + d as usize] = i + 1;
    }
    transitions[0] = 0; // leading zeros keep the start state
    for d in 0..b {
        transitions[dead * b + d] = dead;
    }
    let mut outputs = vec!["0".to_string(); chain + 2];
    outputs[chain] = "1".to_string();
    Dfao::new(base, 0, transitions, outputs).expect("well-formed")
}

/// Indicator of the powers {base^j, j >= 0}: canonical representations of the
/// form 1 0^j.
pub fn indicator_powers(base: u32) -> Dfao {
    let b = base as usize;
    // 0: start, 1: read "1 0^j", 2: dead
    let mut transitions = vec![2; 3 * b];
    transitions[0] = 0; // leading zeros
    transitions[1] = 1; // start on digit 1
    transitions[b] = 1; // "1 0^j" continues on 0
    for d in 0..b {
        transitions[2 * b + d] = 2;
    }
    Dfao::new(
        base,
        0,
        transitions,
        vec!["0".into(), "1".into(), "0".into()],
    )
    .expect("well-formed")
}

const PLANTED_PERIOD: [&str; 3] = ["0", "1", "2"];
const PLANTED_MARK: &str = "9";

fn planted(base: u32) -> Dfao {
    // detector: 0 start, 1 just read "1", 2 read "1 0^+", 3 dead
    let b = base as usize;
    let state = |rho: usize, det: usize| rho * 4 + det;
    let mut transitions = vec![0; 12 * b];
    let mut outputs = vec![String::new(); 12];
    for rho in 0..3usize {
        for det in 0..4usize {
            outputs[state(rho, det)] = if det == 1 || det == 2 {
                PLANTED_MARK.to_string()
            } else {
                PLANTED_PERIOD[rho].to_string()
            };
            for d in 0..b {
                let rho_next = (rho * b + d) % 3;
                let det_next = match det {
                    0 => {
                        if d == 0 {
                            0
                        } else if d == 1 {
                            1
                        } else {
                            3
                        }
                    }
                    1 | 2
                        if d == 0 => {
                            2
                        }
                    _ => 3,
                };
                transitions[state(rho, det) * b + d] = state(rho_next, det_next);
            }
        }
    }
    trim_accessible(&Dfao::new(base, 0, transitions, outputs).expect("well-formed"))
}

/// The planted cross-base pair: the same period-3 sequence, perturbed to "9"
/// on the powers of 2 in the base-2 automaton and on the powers of 3 in the
/// base-3 automaton. The two sequences differ only on the union of those
/// power sets, so they agree almost everywhere.
pub fn planted_pair() -> (Dfao, Dfao) {
    (planted(2), planted(3))
}

/// Uniformly random automaton, trimmed to its reachable part.
pub fn random_dfao(rng: &mut SeededRng, base: u32, max_states: usize, alphabet: &[&str]) -> Dfao {
    let n = 1 + rng.below(max_states as u64) as usize;
    let transitions = (0..n * base as usize)
        .map(|_| rng.below(n as u64) as usize)
        .collect();
    let outputs = (0..n)
        .map(|_| alphabet[rng.below(alphabet.len() as u64) as usize].to_string())
        .collect();
    let initial = rng.below(n as u64) as usize;
    trim_accessible(&Dfao::new(base, initial, transitions, outputs).expect("well-formed"))
}

/// Random automaton whose initial state loops on the zero digit.
pub fn random_leading_zero_invariant(
    rng: &mut SeededRng,
    base: u32,
    max_states: usize,
    alphabet: &[&str],
) -> Dfao {
    let mut a = random_dfao(rng, base, max_states, alphabet);
    a.transitions[a.initial * a.base as usize] = a.initial;
    trim_accessible(&a)
}

/// Random automaton whose zero action is idempotent and fixes the initial
/// state: a random set of zero-fixed states absorbs everything else.
pub fn random_idempotent(
    rng: &mut SeededRng,
    base: u32,
    max_states: usize,
    alphabet: &[&str],
) -> Dfao {
    let mut a = random_dfao(rng, base, max_states, alphabet);
    let n = a.state_count();
    let mut fixed: Vec<usize> = (0..n).filter(|_| rng.below(2) == 1).collect();
    if !fixed.contains(&a.initial) {
        fixed.push(a.initial);
    }
    for s in 0..n {
        let target = if fixed.contains(&s) {
            s
        } else {
            fixed[rng.below(fixed.len() as u64) as usize]
        };
        a.transitions[s * a.base as usize] = target;
    }
    let a = trim_accessible(&a);
    debug_assert!(a.is_idempotent() && a.ignores_leading_zeros());
    a
}

/// Writes a sequence prefix using the automaton's own outputs.
pub fn prefix(a: &Dfao, len: usize) -> Vec<Symbol> {
    a.stream().take(len).map(|s| a.output(s).clone()).collect()
}
