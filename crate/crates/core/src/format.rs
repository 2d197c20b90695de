//! Bit-exact text serialization for automata.
//!
//! ```text
//! base 2
//! states 2
//! initial 0
//! outputs 0 1
//! trans 0 0 0
//! trans 0 1 1
//! trans 1 0 1
//! trans 1 1 0
//! ```
//!
//! UTF-8, LF line endings, `#` starts a comment line, tokens are
//! whitespace-separated. `serialize_dfao` emits sections in the order above
//! with `trans` lines sorted by (state, digit), so parse-then-serialize is
//! byte-stable.

use crate::dfao::Dfao;
use crate::error::{Error, Result};

pub fn serialize_dfao(a: &Dfao) -> String {
    let mut out = String::new();
    out.push_str(&format!("base {}\n", a.base));
    out.push_str(&format!("states {}\n", a.state_count()));
    out.push_str(&format!("initial {}\n", a.initial));
    out.push_str("outputs");
    for tok in &a.outputs {
        out.push(' ');
        out.push_str(tok);
    }
    out.push('\n');
    for s in 0..a.state_count() {
        for d in 0..a.base {
            out.push_str(&format!("trans {s} {d} {}\n", a.step(s, d)));
        }
    }
    out
}

pub fn parse_dfao(text: &str) -> Result<Dfao> {
    let mut base: Option<u64> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<usize> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut trans: Vec<(usize, usize, u64, usize)> = Vec::new(); // (line, s, d, target)

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().expect("non-empty line has a token");
        match keyword {
            "base" => {
                if base.is_some() {
                    return Err(err(line_no, "duplicate-directive", "repeated base line"));
                }
                base = Some(parse_num(line_no, tokens.next(), "base")?);
                expect_end(line_no, tokens)?;
            }
            "states" => {
                if states.is_some() {
                    return Err(err(line_no, "duplicate-directive", "repeated states line"));
                }
                states = Some(parse_num(line_no, tokens.next(), "states")? as usize);
                expect_end(line_no, tokens)?;
            }
            "initial" => {
                if initial.is_some() {
                    return Err(err(line_no, "duplicate-directive", "repeated initial line"));
                }
                initial = Some(parse_num(line_no, tokens.next(), "initial")? as usize);
                expect_end(line_no, tokens)?;
            }
            "outputs" => {
                if outputs.is_some() {
                    return Err(err(line_no, "duplicate-directive", "repeated outputs line"));
                }
                outputs = Some(tokens.map(str::to_string).collect());
            }
            "trans" => {
                let s = parse_num(line_no, tokens.next(), "trans source")? as usize;
                let d = parse_num(line_no, tokens.next(), "trans digit")?;
                let t = parse_num(line_no, tokens.next(), "trans target")? as usize;
                expect_end(line_no, tokens)?;
                trans.push((line_no, s, d, t));
            }
            other => {
                return Err(err(
                    line_no,
                    "unknown-directive",
                    &format!("unknown directive {other:?}"),
                ));
            }
        }
    }

    let base = base.ok_or_else(|| err(0, "missing-directive", "no base line"))?;
    if !(2..=1 << 20).contains(&base) {
        return Err(Error::InvalidBase { base });
    }
    let base = base as u32;
    let states = states.ok_or_else(|| err(0, "missing-directive", "no states line"))?;
    if states == 0 {
        return Err(err(0, "no-states", "states must be at least 1"));
    }
    let initial = initial.ok_or_else(|| err(0, "missing-directive", "no initial line"))?;
    let outputs = outputs.ok_or_else(|| err(0, "missing-directive", "no outputs line"))?;
    if outputs.len() != states {
        return Err(err(
            0,
            "outputs-count-mismatch",
            &format!(
                "outputs line has {} tokens, expected {states}",
                outputs.len()
            ),
        ));
    }

    let mut table = vec![None; states * base as usize];
    for (line_no, s, d, t) in trans {
        if s >= states {
            return Err(err(
                line_no,
                "state-out-of-range",
                &format!("source state {s}"),
            ));
        }
        if d >= base as u64 {
            return Err(err(line_no, "digit-out-of-range", &format!("digit {d}")));
        }
        if t >= states {
            return Err(err(
                line_no,
                "target-out-of-range",
                &format!("target state {t}"),
            ));
        }
        let slot = &mut table[s * base as usize + d as usize];
        if slot.is_some() {
            return Err(err(
                line_no,
                "duplicate-transition",
                &format!("transition ({s}, {d}) given twice"),
            ));
        }
        *slot = Some(t);
    }
    let mut transitions = Vec::with_capacity(table.len());
    for (i, slot) in table.into_iter().enumerate() {
        match slot {
            Some(t) => transitions.push(t),
            None => {
                let s = i / base as usize;
                let d = i % base as usize;
                return Err(err(
                    0,
                    "missing-transition",
                    &format!("no transition for ({s}, {d})"),
                ));
            }
        }
    }

    Dfao::new(base, initial, transitions, outputs)
}

fn err(line: usize, code: &'static str, message: &str) -> Error {
    Error::Parse {
        line,
        code,
        message: message.to_string(),
    }
}

fn parse_num(line: usize, token: Option<&str>, what: &str) -> Result<u64> {
    let token = token.ok_or_else(|| err(line, "missing-token", &format!("missing {what}")))?;
    token.parse::<u64>().map_err(|_| {
        err(
            line,
            "bad-number",
            &format!("{what} is not a number: {token:?}"),
        )
    })
}

fn expect_end<'a>(line: usize, mut rest: impl Iterator<Item = &'a str>) -> Result<()> {
    match rest.next() {
        None => Ok(()),
        Some(tok) => Err(err(
            line,
            "trailing-tokens",
            &format!("unexpected token {tok:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn round_trip_is_identity() {
        let tm = samples::thue_morse();
        let text = serialize_dfao(&tm);
        let back = parse_dfao(&text).unwrap();
        assert_eq!(back, tm);
        assert_eq!(serialize_dfao(&back), text);
    }

    #[test]
    fn serialize_parse_serialize_is_stable() {
        let mut rng = samples::SeededRng::new(7);
        for _ in 0..50 {
            let a = samples::random_dfao(&mut rng, 3, 6, &["a", "b", "c"]);
            let once = serialize_dfao(&a);
            let twice = serialize_dfao(&parse_dfao(&once).unwrap());
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# Thue-Morse\nbase 2\n\nstates 2\ninitial 0\noutputs 0 1\n\
                    trans 0 0 0\ntrans 0 1 1\ntrans 1 0 1\ntrans 1 1 0\n";
        assert_eq!(parse_dfao(text).unwrap(), samples::thue_morse());
    }

    #[test]
    fn rejects_base_one() {
        let text = "base 1\nstates 1\ninitial 0\noutputs x\ntrans 0 0 0\n";
        assert!(matches!(
            parse_dfao(text),
            Err(Error::InvalidBase { base: 1 })
        ));
    }

    #[test]
    fn rejects_duplicate_transition() {
        let text = "base 2\nstates 1\ninitial 0\noutputs x\n\
                    trans 0 0 0\ntrans 0 1 0\ntrans 0 0 0\n";
        let e = parse_dfao(text).unwrap_err();
        assert_eq!(e.code(), "duplicate-transition");
    }

    #[test]
    fn reports_missing_transition() {
        let text = "base 2\nstates 2\ninitial 0\noutputs 0 1\n\
                    trans 0 0 0\ntrans 0 1 1\ntrans 1 1 0\n";
        let e = parse_dfao(text).unwrap_err();
        assert_eq!(e.code(), "missing-transition");
    }

    #[test]
    fn reports_line_numbers() {
        let text = "base 2\nstates 1\ninitial 0\noutputs x\ntrans 0 5 0\n";
        match parse_dfao(text) {
            Err(Error::Parse { line, code, .. }) => {
                assert_eq!(line, 5);
                assert_eq!(code, "digit-out-of-range");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
