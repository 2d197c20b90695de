//! Exact streaming computation of the least nonzero digit of n! in base k,
//! the 2-state base-9 comparison automaton taking values 4 and 8, and the
//! reports around them.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::dfao::Dfao;
use crate::error::{Error, Result};
use crate::report::ratio_string;
use crate::structure::sink_membership;
use crate::transforms::{mod_tracker, product_with_map};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The p-adic valuation of n!: sum of floor(n / p^i) over i >= 1.
pub fn legendre(n: &BigUint, p: u64) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::NotPrime { p });
    }
    let p = BigUint::from(p);
    let mut power = p.clone();
    let mut total = BigUint::zero();
    while power <= *n {
        total += n / &power;
        power *= &p;
    }
    Ok(total)
}

/// Incremental factorization state of n!: per-prime-of-k valuations and the
/// remaining unit, reduced modulo k^2.
#[derive(Debug, Clone)]
pub struct FactorialDigitState {
    pub index: u64,
    pub exponents: BTreeMap<u64, BigUint>,
    pub unit: u64,
}

/// Streams t_k(n!) for n = 0, 1, 2, ... in O(log n) amortized work per step.
pub struct FactorialStream {
    k: u64,
    k_squared: u64,
    factors: Vec<(u64, u32)>,
    state: FactorialDigitState,
    started: bool,
}

impl FactorialStream {
    pub fn new(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidBase { base: k });
        }
        let factors = factorize(k);
        let exponents = factors.iter().map(|&(p, _)| (p, BigUint::zero())).collect();
        Ok(FactorialStream {
            k,
            k_squared: k * k,
            factors,
            state: FactorialDigitState {
                index: 0,
                exponents,
                unit: 1,
            },
            started: false,
        })
    }

    pub fn state(&self) -> &FactorialDigitState {
        &self.state
    }

    fn advance(&mut self) {
        let n = self.state.index + 1;
        self.state.index = n;
        let mut m = n;
        for &(p, _) in &self.factors {
            let mut e = 0u64;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            if e > 0 {
                *self.state.exponents.get_mut(&p).expect("prime tracked") += BigUint::from(e);
            }
        }
        self.state.unit = ((self.state.unit as u128 * (m % self.k_squared) as u128)
            % self.k_squared as u128) as u64;
    }

    /// (n! / k^v) mod k for v the k-adic valuation of n!.
    fn current_digit(&self) -> u64 {
        // v = min over primes of floor(e_p / alpha_p)
        let v = self
            .factors
            .iter()
            .map(|&(p, alpha)| &self.state.exponents[&p] / BigUint::from(alpha))
            .min()
            .expect("base has a prime factor");
        let mut digit = self.state.unit % self.k;
        for &(p, alpha) in &self.factors {
            let residual = &self.state.exponents[&p] - &v * BigUint::from(alpha);
            digit = digit * pow_mod_big(p % self.k, &residual, self.k) % self.k;
        }
        digit
    }
}

fn pow_mod_big(base: u64, exp: &BigUint, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut base = base as u128 % modulus as u128;
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result = result * base % modulus as u128;
        }
        base = base * base % modulus as u128;
    }
    result as u64
}

impl Iterator for FactorialStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.started {
            self.advance();
        }
        self.started = true;
        Some(self.current_digit())
    }
}

/// t_k(n!) for n = 0..=n_max.
pub fn least_nonzero_digit_factorial_stream(k: u64, n_max: u64) -> Result<Vec<u64>> {
    Ok(FactorialStream::new(k)?.take(n_max as usize + 1).collect())
}

/// The base-9 comparison value: 4 when the digits {2,3,4,6,7} occur an even
/// number of times among the base-9 digits of n, 8 otherwise. Computed
/// directly on the digits, independently of any automaton.
pub fn dr_sequence(mut n: u64) -> u64 {
    let mut toggles = 0u32;
    while n > 0 {
        let d = n % 9;
        if matches!(d, 2 | 3 | 4 | 6 | 7) {
            toggles ^= 1;
        }
        n /= 9;
    }
    if toggles == 0 {
        4
    } else {
        8
    }
}

/// The 2-state base-9 automaton realizing `dr_sequence`.
pub fn dr_dfao() -> Dfao {
    let toggling = |d: u32| matches!(d, 2 | 3 | 4 | 6 | 7);
    let mut transitions = Vec::with_capacity(18);
    for s in 0..2usize {
        for d in 0..9u32 {
            transitions.push(if toggling(d) { 1 - s } else { s });
        }
    }
    Dfao::new(9, 0, transitions, vec!["4".into(), "8".into()]).expect("well-formed")
}

#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    pub n_max: u64,
    pub disagreements: u64,
    pub fraction: String,
}

/// Value histogram of t_12(n!) on n <= n_max, first occurrences, and the
/// disagreement trend against the base-9 comparison sequence.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub n_max: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub first_occurrence: BTreeMap<u64, u64>,
    pub disagreements: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub base_ordering: BaseOrdering,
    /// v_p(n_max!) per prime of the base, from the valuation formula.
    pub valuations_at_n_max: BTreeMap<u64, String>,
}

/// v_p(n!) for every prime p of k, as decimal strings.
pub fn factorial_valuations(k: u64, n: u64) -> Result<BTreeMap<u64, String>> {
    let big_n = BigUint::from(n);
    let mut out = BTreeMap::new();
    for (p, _) in factorize(k) {
        out.insert(p, legendre(&big_n, p)?.to_string());
    }
    Ok(out)
}

pub fn comparison_report(n_max: u64) -> Result<ComparisonReport> {
    let mut histogram = BTreeMap::new();
    let mut first_occurrence = BTreeMap::new();
    let mut disagreements = 0u64;
    let cuts = [n_max / 100, n_max / 10, n_max];
    let mut checkpoints = Vec::new();

    let dr = dr_dfao();
    let mut dr_stream = dr.stream();
    let mut t12 = FactorialStream::new(12)?;
    for n in 0..=n_max {
        let value = t12.next().expect("stream is infinite");
        *histogram.entry(value).or_insert(0) += 1;
        first_occurrence.entry(value).or_insert(n);
        let b = dr.output(dr_stream.next().expect("stream is infinite"));
        if b != &value.to_string() {
            disagreements += 1;
        }
        for &cut in &cuts {
            if n == cut {
                checkpoints.push(Checkpoint {
                    n_max: cut,
                    disagreements,
                    fraction: format!("{disagreements}/{}", cut + 1),
                });
            }
        }
    }
    Ok(ComparisonReport {
        n_max,
        histogram,
        first_occurrence,
        disagreements,
        checkpoints,
        base_ordering: base_ordering(12)?,
        valuations_at_n_max: factorial_valuations(12, n_max)?,
    })
}

/// The factorization of k sorted by alpha * (p - 1) descending, with the
/// strictness of the leading inequality; the automaticity of t_k(n!) in the
/// dominant prime hinges on it.
#[derive(Debug, Clone, Serialize)]
pub struct BaseOrdering {
    pub base: u64,
    pub terms: Vec<OrderingTerm>,
    pub first_inequality_strict: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingTerm {
    pub prime: u64,
    pub exponent: u32,
    pub weight: u64,
}

pub fn base_ordering(k: u64) -> Result<BaseOrdering> {
    if k < 2 {
        return Err(Error::InvalidBase { base: k });
    }
    let mut terms: Vec<OrderingTerm> = factorize(k)
        .into_iter()
        .map(|(p, alpha)| OrderingTerm {
            prime: p,
            exponent: alpha,
            weight: alpha as u64 * (p - 1),
        })
        .collect();
    terms.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.prime.cmp(&b.prime)));
    let first_inequality_strict = terms.len() < 2 || terms[0].weight > terms[1].weight;
    Ok(BaseOrdering {
        base: k,
        terms,
        first_inequality_strict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityRow {
    pub q: u64,
    pub product_states: usize,
    pub disagreement: String,
    pub positive: bool,
}

/// Exact minimal disagreement density between the comparison sequence and any
/// period-q sequence, for each q up to q_max.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityReport {
    pub q_max: u64,
    pub push_steps: u32,
    pub rows: Vec<PeriodicityRow>,
    pub all_positive: bool,
}

const PUSH_STEPS: u32 = 30;

/// For each q: tracks residues next to the comparison automaton, spreads
/// uniform weight over the sink component, pushes it through 30 exact digit
/// layers, and takes the per-residue minority mass. A positive value for
/// every q certifies that no period-q sequence agrees almost everywhere.
pub fn dr_not_ae_periodic(q_max: u64) -> Result<PeriodicityReport> {
    if q_max == 0 {
        return Err(Error::ZeroModulus);
    }
    let dr = dr_dfao();
    let mut rows = Vec::new();
    for q in 1..=q_max {
        let tracker = mod_tracker(9, q)?;
        let (prod, pairs) = product_with_map(&dr, &tracker, |x, _| x.clone())?;
        let in_sink = sink_membership(&prod);
        let sink_states: Vec<usize> = (0..prod.state_count()).filter(|&s| in_sink[s]).collect();
        let share = BigRational::new(1.into(), (sink_states.len() as u64).into());
        let mut weights = vec![BigRational::zero(); prod.state_count()];
        for &s in &sink_states {
            weights[s] = share.clone();
        }
        let ninth = BigRational::new(1.into(), 9.into());
        for _ in 0..PUSH_STEPS {
            let mut next = vec![BigRational::zero(); prod.state_count()];
            for s in 0..prod.state_count() {
                if weights[s].is_zero() {
                    continue;
                }
                let slice = &weights[s] * &ninth;
                for d in 0..9u32 {
                    next[prod.step(s, d)] += &slice;
                }
            }
            weights = next;
        }
        let mut mass_4 = vec![BigRational::zero(); q as usize];
        let mut mass_8 = vec![BigRational::zero(); q as usize];
        for s in 0..prod.state_count() {
            if weights[s].is_zero() {
                continue;
            }
            let (dr_state, residue) = pairs[s];
            if dr_state == 0 {
                mass_4[residue] += &weights[s];
            } else {
                mass_8[residue] += &weights[s];
            }
        }
        let mut disagreement = BigRational::zero();
        for i in 0..q as usize {
            disagreement += mass_4[i].clone().min(mass_8[i].clone());
        }
        rows.push(PeriodicityRow {
            q,
            product_states: prod.state_count(),
            disagreement: ratio_string(&disagreement),
            positive: disagreement > BigRational::zero(),
        });
    }
    let all_positive = rows.iter().all(|r| r.positive);
    Ok(PeriodicityReport {
        q_max,
        push_steps: PUSH_STEPS,
        rows,
        all_positive,
    })
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;
    use num_traits::{One, ToPrimitive};

    /// Least nonzero digits of n! in base k from the full arbitrary-precision
    /// factorial, digit extraction only.
    pub fn factorial_digits(k: u64, n_max: u64) -> Vec<u64> {
        let chunk = BigUint::from(k).pow(32);
        let k_big = BigUint::from(k);
        let mut factorial = BigUint::one();
        let mut out = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            if n > 0 {
                factorial *= BigUint::from(n);
            }
            let mut x = factorial.clone();
            loop {
                let (quot, rem) = num_integer::Integer::div_rem(&x, &chunk);
                if rem.is_zero() {
                    x = quot;
                } else {
                    x = rem;
                    break;
                }
            }
            loop {
                let (quot, rem) = num_integer::Integer::div_rem(&x, &k_big);
                if rem.is_zero() {
                    x = quot;
                } else {
                    out.push(rem.to_u64().expect("digit below k"));
                    break;
                }
            }
        }
        out
    }
}
