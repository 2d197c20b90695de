//! Exact structural decisions: sink components, digit-string counting, and
//! the almost-everywhere constancy / equality / periodicity procedures.
//!
//! "Sink component" here means a strongly connected set of states closed
//! under every transition; the set of inputs whose run does not end in one
//! has upper density zero, which is what makes these decisions exact.

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dfao::{Dfao, DigitWord, Symbol};
use crate::error::{Error, Result};
use crate::transforms::{mod_tracker, product_with_map, shift_by_constant, trim_accessible};

/// A closed strongly connected component: every transition from a member
/// stays inside, and every member reaches every member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkScc {
    pub states: Vec<usize>,
    pub outputs: Vec<Symbol>,
}

struct TarjanState<'a> {
    a: &'a Dfao,
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, st: &mut TarjanState) {
    st.idx[v] = Some(st.index);
    st.low[v] = st.index;
    st.index += 1;
    st.stack.push(v);
    st.on_stack[v] = true;

    for d in 0..st.a.base {
        let w = st.a.step(v, d);
        if st.idx[w].is_none() {
            strongconnect(w, st);
            st.low[v] = st.low[v].min(st.low[w]);
        } else if st.on_stack[w] {
            st.low[v] = st.low[v].min(st.idx[w].unwrap());
        }
    }

    if st.low[v] == st.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = st.stack.pop().expect("stack underflow");
            st.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        st.comps.push(comp);
    }
}

fn tarjan_components(a: &Dfao) -> Vec<Vec<usize>> {
    let n = a.state_count();
    let mut st = TarjanState {
        a,
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            strongconnect(v, &mut st);
        }
    }
    st.comps
}

/// Membership flags: state -> lies in some sink component.
pub(crate) fn sink_membership(a: &Dfao) -> Vec<bool> {
    let comps = tarjan_components(a);
    let mut comp_of = vec![usize::MAX; a.state_count()];
    for (cid, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    let mut closed = vec![true; comps.len()];
    for s in 0..a.state_count() {
        for d in 0..a.base {
            if comp_of[a.step(s, d)] != comp_of[s] {
                closed[comp_of[s]] = false;
            }
        }
    }
    (0..a.state_count()).map(|s| closed[comp_of[s]]).collect()
}

/// All closed strongly connected components, sorted by minimal state index.
pub fn sink_sccs(a: &Dfao) -> Vec<SinkScc> {
    let comps = tarjan_components(a);
    let mut comp_of = vec![usize::MAX; a.state_count()];
    for (cid, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    let mut sinks = Vec::new();
    for comp in &comps {
        let closed = comp
            .iter()
            .all(|&s| (0..a.base).all(|d| comp_of[a.step(s, d)] == comp_of[s]));
        if closed {
            let mut states = comp.clone();
            states.sort_unstable();
            let outputs = states.iter().map(|&s| a.outputs[s].clone()).collect();
            sinks.push(SinkScc { states, outputs });
        }
    }
    sinks.sort_by_key(|c| c.states[0]);
    sinks
}

/// A word that drives every state into some sink component, built by
/// concatenating per-state absorbing words; closedness keeps already absorbed
/// states absorbed.
pub fn sink_absorbing_word(a: &Dfao) -> DigitWord {
    let in_sink = sink_membership(a);
    let mut word: Vec<u32> = Vec::new();
    for s in 0..a.state_count() {
        let mut here = s;
        for &d in &word {
            here = a.step(here, d);
        }
        if in_sink[here] {
            continue;
        }
        // shortest path into a sink, digits ascending
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; a.state_count()];
        let mut seen = vec![false; a.state_count()];
        let mut queue = VecDeque::new();
        seen[here] = true;
        queue.push_back(here);
        let mut target = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for d in 0..a.base {
                let w = a.step(v, d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, d));
                    if in_sink[w] {
                        target = Some(w);
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = target.expect("every state reaches a sink component");
        while v != here {
            let (prev, d) = parent[v].expect("path recorded");
            path.push(d);
            v = prev;
        }
        path.reverse();
        word.extend(path);
    }
    DigitWord {
        base: a.base,
        digits: word,
    }
}

/// Exact counts of length-t zero-padded digit strings per landing state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    pub length: u64,
    pub counts: Vec<BigUint>,
}

impl CountVector {
    /// One more digit layer: counts push forward along every transition.
    pub fn push_forward(&self, a: &Dfao) -> CountVector {
        let mut next = vec![BigUint::zero(); a.state_count()];
        for s in 0..a.state_count() {
            if self.counts[s].is_zero() {
                continue;
            }
            for d in 0..a.base {
                let t = a.step(s, d);
                next[t] += &self.counts[s];
            }
        }
        CountVector {
            length: self.length + 1,
            counts: next,
        }
    }
}

fn require_leading_zero_invariant(a: &Dfao) -> Result<()> {
    if a.ignores_leading_zeros() {
        Ok(())
    } else {
        Err(Error::NotLeadingZeroInvariant)
    }
}

/// Counts of length-t strings from the initial state. Requires the automaton
/// to ignore leading zeros so that padded strings and numbers below k^t agree.
pub fn count_vector(a: &Dfao, t: u64) -> Result<CountVector> {
    require_leading_zero_invariant(a)?;
    let mut counts = vec![BigUint::zero(); a.state_count()];
    counts[a.initial] = BigUint::one();
    let mut vec = CountVector { length: 0, counts };
    for _ in 0..t {
        vec = vec.push_forward(a);
    }
    Ok(vec)
}

/// Number of n < k^t with value v.
pub fn value_counts(a: &Dfao, v: &Symbol, t: u64) -> Result<BigUint> {
    let vec = count_vector(a, t)?;
    let mut total = BigUint::zero();
    for (s, count) in vec.counts.iter().enumerate() {
        if a.output(s) == v {
            total += count;
        }
    }
    Ok(total)
}

/// Exact fraction of length-t strings whose run ends outside every sink
/// component. Decays to zero as t grows.
pub fn nonsink_mass(a: &Dfao, t: u64) -> Result<BigRational> {
    let vec = count_vector(a, t)?;
    let in_sink = sink_membership(a);
    let mut outside = BigUint::zero();
    for (s, count) in vec.counts.iter().enumerate() {
        if !in_sink[s] {
            outside += count;
        }
    }
    let denom = BigUint::from(a.base).pow(u32::try_from(t).expect("desk-scale t"));
    Ok(BigRational::new(BigInt::from(outside), BigInt::from(denom)))
}

/// The single symbol carried by every sink-component state, if there is one.
/// In that case the sequence equals it almost everywhere; otherwise every
/// other sink output is attained on a set of positive upper density.
pub fn ae_constant(a: &Dfao) -> Result<Option<Symbol>> {
    require_leading_zero_invariant(a)?;
    let a = trim_accessible(a);
    let in_sink = sink_membership(&a);
    let mut value: Option<&Symbol> = None;
    for s in 0..a.state_count() {
        if !in_sink[s] {
            continue;
        }
        match value {
            None => value = Some(a.output(s)),
            Some(v) if v == a.output(s) => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(value.cloned())
}

/// Whether the two sequences agree outside a density-zero set. Only defined
/// within one base; cross-base almost-everywhere equality is not decidable
/// this way.
pub fn ae_equal_same_base(a: &Dfao, b: &Dfao) -> Result<bool> {
    if a.base != b.base {
        return Err(Error::BaseMismatch {
            left: a.base,
            right: b.base,
        });
    }
    require_leading_zero_invariant(a)?;
    require_leading_zero_invariant(b)?;
    let (indicator, _) = product_with_map(a, b, |x, y| {
        if x == y {
            "1".to_string()
        } else {
            "0".to_string()
        }
    })?;
    Ok(ae_constant(&indicator)? == Some("1".to_string()))
}

/// Witness that the constant word x^omega lies in the subshift of the
/// sequence: an anchor m with every value in [m*k^t, (m+1)*k^t) equal to x.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstantWitness {
    pub symbol: Symbol,
    #[serde(serialize_with = "crate::report::big_as_string")]
    pub anchor: BigUint,
    pub block_exponent: u32,
}

/// Decides whether the constant word on `x` belongs to the subshift of the
/// sequence. Requires an idempotent automaton that ignores leading zeros; the
/// witness anchor is the value of the shortest nonzero-leading word into an
/// all-x sink component.
pub fn constant_in_subshift(a: &Dfao, x: &Symbol) -> Result<Option<ConstantWitness>> {
    require_leading_zero_invariant(a)?;
    if !a.is_idempotent() {
        return Err(Error::RequiresIdempotent);
    }
    let a = trim_accessible(&a.clone());
    let sinks = sink_sccs(&a);
    let target = sinks.iter().find(|c| c.outputs.iter().all(|o| o == x));
    let Some(target) = target else {
        return Ok(None);
    };
    let in_target = {
        let mut flags = vec![false; a.state_count()];
        for &s in &target.states {
            flags[s] = true;
        }
        flags
    };

    let word = if in_target[a.initial] {
        Vec::new()
    } else {
        // shortest word with nonzero first digit, BFS with digits ascending
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; a.state_count()];
        let mut seen = vec![false; a.state_count()];
        let mut queue = VecDeque::new();
        seen[a.initial] = true;
        let mut found = None;
        'seed: for d in 1..a.base {
            let t = a.step(a.initial, d);
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((a.initial, d));
                if in_target[t] {
                    found = Some(t);
                    break 'seed;
                }
                queue.push_back(t);
            }
        }
        'bfs: while found.is_none() {
            let Some(v) = queue.pop_front() else {
                break 'bfs;
            };
            for d in 0..a.base {
                let t = a.step(v, d);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((v, d));
                    if in_target[t] {
                        found = Some(t);
                        break 'bfs;
                    }
                    queue.push_back(t);
                }
            }
        }
        let Some(mut v) = found else {
            return Ok(None); // unreachable sink cannot happen on trimmed input
        };
        let mut path = Vec::new();
        while v != a.initial {
            let (prev, d) = parent[v].expect("path recorded");
            path.push(d);
            v = prev;
        }
        path.reverse();
        path
    };

    let anchor = DigitWord {
        base: a.base,
        digits: word,
    }
    .value();
    Ok(Some(ConstantWitness {
        symbol: x.clone(),
        anchor,
        block_exponent: 8,
    }))
}

/// A periodic sequence candidate: value at n is `table[(n + phase) mod period]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicWitness {
    pub period: u64,
    pub phase: u64,
    pub table: Vec<Symbol>,
}

impl PeriodicWitness {
    pub fn value_at(&self, n: u64) -> &Symbol {
        &self.table[((n % self.period + self.phase) % self.period) as usize]
    }

    pub fn value_at_big(&self, n: &BigUint) -> &Symbol {
        let r = n % BigUint::from(self.period);
        self.value_at(u64::try_from(&r).expect("residue fits u64"))
    }
}

/// The automaton realizing a periodic witness in the given base.
pub fn periodic_dfao(base: u32, witness: &PeriodicWitness) -> Dfao {
    let tracker = mod_tracker(base, witness.period).expect("period is positive");
    let outputs = (0..witness.period)
        .map(|r| witness.value_at(r).clone())
        .collect();
    Dfao { outputs, ..tracker }
}

/// Does the sequence agree almost everywhere with some sequence of period q?
/// Tracks residues alongside the automaton and demands a single output per
/// residue class across all sink-component states.
pub fn ae_periodic_with_period(a: &Dfao, q: u64) -> Result<Option<PeriodicWitness>> {
    require_leading_zero_invariant(a)?;
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    let tracker = mod_tracker(a.base, q)?;
    let (prod, pairs) = product_with_map(a, &tracker, |x, _| x.clone())?;
    let in_sink = sink_membership(&prod);
    let mut table: Vec<Option<&Symbol>> = vec![None; q as usize];
    for s in 0..prod.state_count() {
        if !in_sink[s] {
            continue;
        }
        let (state_a, residue) = pairs[s];
        let out = a.output(state_a);
        match table[residue] {
            None => table[residue] = Some(out),
            Some(v) if v == out => {}
            Some(_) => return Ok(None),
        }
    }
    if table.iter().any(Option::is_none) {
        return Ok(None); // sink components touch every residue; defensive
    }
    let table = table
        .into_iter()
        .map(|v| v.expect("checked").clone())
        .collect();
    Ok(Some(PeriodicWitness {
        period: q,
        phase: 0,
        table,
    }))
}

/// Smallest q <= q_max admitting an almost-everywhere period-q witness.
pub fn find_ae_period(a: &Dfao, q_max: u64) -> Result<Option<PeriodicWitness>> {
    for q in 1..=q_max {
        if let Some(w) = ae_periodic_with_period(a, q)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// For binary-output automata: is {n : a(n) = 1} finite? Decided by cycle
/// reachability among states that both occur on canonical inputs and can
/// still reach an output-1 state.
pub fn is_finite_support(a: &Dfao) -> Result<bool> {
    require_leading_zero_invariant(a)?;
    for tok in a.alphabet() {
        if tok != "0" && tok != "1" {
            return Err(Error::NonBinaryOutputs { found: tok });
        }
    }
    let a = trim_accessible(a);
    let n = a.state_count();

    // states on canonical inputs: first digit nonzero, anything after
    let mut reach = vec![false; n];
    let mut queue = VecDeque::new();
    for d in 1..a.base {
        let t = a.step(a.initial, d);
        if !reach[t] {
            reach[t] = true;
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        for d in 0..a.base {
            let t = a.step(v, d);
            if !reach[t] {
                reach[t] = true;
                queue.push_back(t);
            }
        }
    }

    // states that can still reach an output-1 state
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for d in 0..a.base {
            rev[a.step(s, d)].push(s);
        }
    }
    let mut live = vec![false; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if a.output(s) == "1" {
            live[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &p in &rev[v] {
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }

    let useful: Vec<bool> = (0..n).map(|s| reach[s] && live[s]).collect();
    // cycle detection on the useful subgraph
    let mut color = vec![0u8; n]; // 0 unseen, 1 active, 2 done
    for start in 0..n {
        if !useful[start] || color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0u32)];
        color[start] = 1;
        while let Some(&mut (v, ref mut d)) = stack.last_mut() {
            if *d == a.base {
                color[v] = 2;
                stack.pop();
                continue;
            }
            let t = a.step(v, *d);
            *d += 1;
            if !useful[t] {
                continue;
            }
            match color[t] {
                0 => {
                    color[t] = 1;
                    stack.push((t, 0));
                }
                1 => return Ok(false), // cycle: support is infinite
                _ => {}
            }
        }
    }
    Ok(true)
}

/// Exact check that {n : a(n+p) != a(n)} is finite.
pub fn verify_ultimate_periodicity(a: &Dfao, p: u64) -> Result<bool> {
    if p == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    require_leading_zero_invariant(a)?;
    let shifted = shift_by_constant(a, p)?;
    let diff = product_with_map(a, &shifted, |x, y| {
        if x == y {
            "0".to_string()
        } else {
            "1".to_string()
        }
    })?
    .0;
    is_finite_support(&diff)
}

/// Scans a generated prefix for the minimal (preperiod, period) candidate and
/// confirms it exactly. Candidates must satisfy preperiod + 2*period <=
/// prefix_len before the exact check is attempted; ties prefer the smaller
/// period, then the smaller preperiod.
pub fn find_ultimate_period(a: &Dfao, prefix_len: usize, p_max: u64) -> Result<Option<(u64, u64)>> {
    require_leading_zero_invariant(a)?;
    let states: Vec<usize> = a.stream().take(prefix_len).collect();
    let ids: Vec<u32> = {
        let alphabet = a.alphabet();
        let pos = |sym: &Symbol| alphabet.iter().position(|t| t == sym).unwrap() as u32;
        states.iter().map(|&s| pos(a.output(s))).collect()
    };
    for p in 1..=p_max {
        let p_usize = p as usize;
        if p_usize >= prefix_len {
            break;
        }
        let mut preperiod = 0usize;
        for n in (0..prefix_len - p_usize).rev() {
            if ids[n] != ids[n + p_usize] {
                preperiod = n + 1;
                break;
            }
        }
        if preperiod + 2 * p_usize > prefix_len {
            continue;
        }
        if verify_ultimate_periodicity(a, p)? {
            return Ok(Some((preperiod as u64, p)));
        }
    }
    Ok(None)
}
