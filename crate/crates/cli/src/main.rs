//! Command-line front end: one subcommand per library operation, stable
//! flags, deterministic byte output. Exit codes: 0 success, 1 domain errors,
//! 2 usage errors (bad flags, unreadable files).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use dfao::cobham::{cobham_witness, CobhamSearchConfig};
use dfao::dfao::Dfao;
use dfao::factorial::{
    base_ordering, comparison_report, dr_dfao, dr_not_ae_periodic, dr_sequence,
    factorial_valuations, least_nonzero_digit_factorial_stream, FactorialStream,
};
use dfao::report::ratio_string;
use dfao::structure::{
    ae_constant, ae_equal_same_base, ae_periodic_with_period, constant_in_subshift, count_vector,
    find_ae_period, find_ultimate_period, nonsink_mass, sink_absorbing_word, sink_sccs,
    value_counts, verify_ultimate_periodicity,
};
use dfao::subshift::{
    factors, language_equal_empirical, min_prefix, recurrence_gaps, SubshiftWindow,
};
use dfao::transforms::{
    idempotent_lift, lift_base_power, minimize, normalize_leading_zeros, shift_by_constant,
};
use dfao::{parse_dfao, serialize_dfao, Symbol};

#[derive(Parser)]
#[command(
    name = "dfao",
    version,
    about = "Automata with output over base-k digits: \
density decisions, periodicity witnesses, and the factorial digit application"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Value of the sequence at n.
    Eval {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        n: String,
    },
    /// Structural diagnostics for an automaton file.
    Validate {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Make the zero digit fix the initial state.
    Normalize {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Lift to a base power: minimal idempotent exponent, or an explicit --t.
    Lift {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        t: Option<u32>,
    },
    /// Minimal automaton with the same sequence.
    Minimize {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Automaton for n -> value at n + p.
    Shift {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Closed strongly connected components and an absorbing word.
    Sccs {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Exact per-state counts of length-t strings and the non-absorbed mass.
    Density {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        value: Option<String>,
    },
    /// Almost-everywhere constant value, if any.
    AeConst {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Almost-everywhere equality of two same-base sequences.
    AeEqual {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Almost-everywhere periodicity: a fixed period --q or a search bound --q-max.
    AePeriodic {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, conflicts_with = "q")]
        q_max: Option<u64>,
    },
    /// Ultimate periodicity: verify a fixed --p or search up to --p-max.
    UltPeriod {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, conflicts_with = "p")]
        p_max: Option<u64>,
        #[arg(long, default_value_t = 65536)]
        prefix_len: usize,
    },
    /// Does the constant word on --symbol lie in the subshift?
    ConstSubshift {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        symbol: String,
    },
    /// Cross-base periodicity pipeline; emits the witness as JSON.
    Cobham {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "N", default_value_t = 1_000_000)]
        n_limit: u64,
        #[arg(long, default_value_t = 3)]
        t_max: u32,
        #[arg(long, default_value_t = 64)]
        q_max: u64,
        /// Common-prefix check length; defaults to min(k, l)^t_max.
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value_t = 16)]
        seeds: usize,
    },
    /// Least nonzero digit of n! in base k: report or raw values.
    Factorial {
        #[arg(long)]
        k: u64,
        #[arg(long = "N")]
        n_limit: u64,
        #[arg(long)]
        values: bool,
    },
    /// The base-9 comparison sequence: values, its automaton, or the
    /// periodicity report.
    Dr {
        #[arg(long = "N")]
        n_limit: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        emit_automaton: bool,
    },
    /// Distinct length-m factors of the sequence prefix.
    Factors {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Lexicographically least length-m factor.
    Minword {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Maximal gaps between occurrences of each length-m factor.
    Gaps {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Per-length comparison of the factor sets of two sequences.
    Langcmp {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long)]
        order: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Domain(dfao::Error),
}

impl From<dfao::Error> for CliError {
    fn from(e: dfao::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult = Result<String, CliError>;

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Dfao, CliError> {
    let text = read_file(path)?;
    Ok(parse_dfao(&text)?)
}

fn load_order(path: &Option<PathBuf>) -> Result<Option<Vec<Symbol>>, CliError> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = read_file(p)?;
            Ok(Some(text.split_whitespace().map(str::to_string).collect()))
        }
    }
}

fn load_window(
    automaton: &Path,
    window: usize,
    order: &Option<PathBuf>,
) -> Result<SubshiftWindow, CliError> {
    let a = load(automaton)?;
    let order = load_order(order)?;
    Ok(SubshiftWindow::materialize(&a, window, order.as_deref())?)
}

fn parse_big(text: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(text)
        .map_err(|_| CliError::Usage(format!("{text:?} is not a non-negative integer")))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}

fn run(cli: &Cli) -> CliResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Eval { automaton, n } => {
            let a = load(automaton)?;
            let n = parse_big(n)?;
            let value = a.eval(&n).clone();
            Ok(match fmt {
                Format::Text => format!("{value}\n"),
                Format::Json => json(&serde_json::json!({
                    "n": n.to_string(),
                    "value": value,
                })),
            })
        }
        Command::Validate { automaton } => {
            let text = read_file(automaton)?;
            let diag = {
                let a = parse_dfao(&text)?;
                a.validate()
            };
            let out = match fmt {
                Format::Text => {
                    let mut out = String::new();
                    for d in &diag.errors {
                        let _ = writeln!(out, "error {}: {}", d.code, d.message);
                    }
                    for d in &diag.warnings {
                        let _ = writeln!(out, "warning {}: {}", d.code, d.message);
                    }
                    if diag.ok() {
                        out.push_str("ok\n");
                    }
                    out
                }
                Format::Json => json(&serde_json::json!({
                    "ok": diag.ok(),
                    "diagnostics": diag,
                })),
            };
            if diag.ok() {
                Ok(out)
            } else {
                print!("{out}");
                Err(CliError::Domain(dfao::Error::InvalidAutomaton {
                    message: format!("{} validation error(s)", diag.errors.len()),
                }))
            }
        }
        Command::Normalize { automaton } => {
            let a = load(automaton)?;
            let result = normalize_leading_zeros(&a);
            emit_automaton(fmt, &result, serde_json::json!({ "changed": result != a }))
        }
        Command::Lift { automaton, t } => {
            let a = load(automaton)?;
            let (result, exponent) = match t {
                Some(t) => (lift_base_power(&a, *t)?, *t),
                None => {
                    let lift = idempotent_lift(&a)?;
                    (lift.automaton, lift.exponent)
                }
            };
            emit_automaton(fmt, &result, serde_json::json!({ "exponent": exponent }))
        }
        Command::Minimize { automaton } => {
            let a = load(automaton)?;
            let result = minimize(&a);
            emit_automaton(
                fmt,
                &result,
                serde_json::json!({ "states": result.state_count() }),
            )
        }
        Command::Shift { automaton, p } => {
            let a = load(automaton)?;
            let result = shift_by_constant(&a, *p)?;
            emit_automaton(fmt, &result, serde_json::json!({ "p": p }))
        }
        Command::Sccs { automaton } => {
            let a = load(automaton)?;
            let sinks = sink_sccs(&a);
            let word = sink_absorbing_word(&a);
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    for (i, scc) in sinks.iter().enumerate() {
                        let states: Vec<String> =
                            scc.states.iter().map(|s| s.to_string()).collect();
                        let _ = writeln!(
                            out,
                            "sink {i}: states {} outputs {}",
                            states.join(" "),
                            scc.outputs.join(" ")
                        );
                    }
                    let digits: Vec<String> = word.digits.iter().map(|d| d.to_string()).collect();
                    let _ = writeln!(out, "absorbing-word {}", digits.join(" "));
                    out
                }
                Format::Json => json(&serde_json::json!({
                    "sinks": sinks,
                    "absorbing_word": word.digits,
                })),
            })
        }
        Command::Density {
            automaton,
            t,
            value,
        } => {
            let a = load(automaton)?;
            let counts = count_vector(&a, *t)?;
            let mass = nonsink_mass(&a, *t)?;
            let value_count = match value {
                Some(v) => Some(value_counts(&a, v, *t)?),
                None => None,
            };
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    let _ = writeln!(out, "t {t}");
                    for (s, c) in counts.counts.iter().enumerate() {
                        let _ = writeln!(out, "state {s} {c}");
                    }
                    let _ = writeln!(out, "nonsink-mass {}", ratio_string(&mass));
                    if let (Some(v), Some(c)) = (value, &value_count) {
                        let _ = writeln!(out, "value-count {v} {c}");
                    }
                    out
                }
                Format::Json => {
                    let count_strings: Vec<String> =
                        counts.counts.iter().map(|c| c.to_string()).collect();
                    json(&serde_json::json!({
                        "t": t,
                        "counts": count_strings,
                        "nonsink_mass": ratio_string(&mass),
                        "value": value,
                        "value_count": value_count.map(|c| c.to_string()),
                    }))
                }
            })
        }
        Command::AeConst { automaton } => {
            let a = load(automaton)?;
            let result = ae_constant(&a)?;
            Ok(match fmt {
                Format::Text => match result {
                    Some(sym) => format!("constant {sym}\n"),
                    None => "none\n".to_string(),
                },
                Format::Json => json(&serde_json::json!({ "constant": result })),
            })
        }
        Command::AeEqual { a, b } => {
            let a = load(a)?;
            let b = load(b)?;
            let equal = ae_equal_same_base(&a, &b)?;
            Ok(match fmt {
                Format::Text => format!("{equal}\n"),
                Format::Json => json(&serde_json::json!({ "equal": equal })),
            })
        }
        Command::AePeriodic {
            automaton,
            q,
            q_max,
        } => {
            let a = load(automaton)?;
            let witness = match (q, q_max) {
                (Some(q), None) => ae_periodic_with_period(&a, *q)?,
                (None, Some(m)) => find_ae_period(&a, *m)?,
                _ => {
                    return Err(CliError::Usage(
                        "give exactly one of --q or --q-max".to_string(),
                    ))
                }
            };
            Ok(match fmt {
                Format::Text => match &witness {
                    Some(w) => format!(
                        "period {} phase {} table {}\n",
                        w.period,
                        w.phase,
                        w.table.join(" ")
                    ),
                    None => "none\n".to_string(),
                },
                Format::Json => json(&serde_json::json!({ "witness": witness })),
            })
        }
        Command::UltPeriod {
            automaton,
            p,
            p_max,
            prefix_len,
        } => {
            let a = load(automaton)?;
            match (p, p_max) {
                (Some(p), None) => {
                    let ok = verify_ultimate_periodicity(&a, *p)?;
                    Ok(match fmt {
                        Format::Text => format!("{ok}\n"),
                        Format::Json => json(&serde_json::json!({ "p": p, "verified": ok })),
                    })
                }
                (None, Some(m)) => {
                    let found = find_ultimate_period(&a, *prefix_len, *m)?;
                    Ok(match fmt {
                        Format::Text => match found {
                            Some((d, p)) => format!("preperiod {d} period {p}\n"),
                            None => "none\n".to_string(),
                        },
                        Format::Json => json(&serde_json::json!({
                            "found": found.map(|(d, p)| {
                                serde_json::json!({ "preperiod": d, "period": p })
                            }),
                        })),
                    })
                }
                _ => Err(CliError::Usage(
                    "give exactly one of --p or --p-max".to_string(),
                )),
            }
        }
        Command::ConstSubshift { automaton, symbol } => {
            let a = load(automaton)?;
            let witness = constant_in_subshift(&a, symbol)?;
            Ok(match fmt {
                Format::Text => match &witness {
                    Some(w) => format!(
                        "witness anchor {} block-exponent {}\n",
                        w.anchor, w.block_exponent
                    ),
                    None => "none\n".to_string(),
                },
                Format::Json => json(&serde_json::json!({ "witness": witness })),
            })
        }
        Command::Cobham {
            a,
            b,
            n_limit,
            t_max,
            q_max,
            m,
            seeds,
        } => {
            let a = load(a)?;
            let b = load(b)?;
            let cfg = CobhamSearchConfig {
                t_max: *t_max,
                n_limit: *n_limit,
                prefix_check_len: *m,
                q_max: *q_max,
                seed_count: *seeds,
            };
            let witness = cobham_witness(&a, &b, &cfg)?;
            Ok(json(&witness))
        }
        Command::Factorial { k, n_limit, values } => {
            if *values {
                let stream = least_nonzero_digit_factorial_stream(*k, *n_limit)?;
                let mut out = String::new();
                for v in stream {
                    let _ = writeln!(out, "{v}");
                }
                return Ok(out);
            }
            if *k == 12 {
                let report = comparison_report(*n_limit)?;
                return Ok(match fmt {
                    Format::Text => {
                        let mut out = String::new();
                        let _ = writeln!(out, "k 12");
                        let _ = writeln!(out, "n-max {}", report.n_max);
                        for (v, c) in &report.histogram {
                            let _ = writeln!(out, "count {v} {c}");
                        }
                        for (v, n) in &report.first_occurrence {
                            let _ = writeln!(out, "first {v} {n}");
                        }
                        let _ = writeln!(out, "disagreements {}", report.disagreements);
                        for c in &report.checkpoints {
                            let _ = writeln!(
                                out,
                                "checkpoint {} {} {}",
                                c.n_max, c.disagreements, c.fraction
                            );
                        }
                        for (p, e) in &report.valuations_at_n_max {
                            let _ = writeln!(out, "valuation {p} {e}");
                        }
                        let _ = writeln!(
                            out,
                            "ordering-strict {}",
                            report.base_ordering.first_inequality_strict
                        );
                        out
                    }
                    Format::Json => json(&report),
                });
            }
            // generic base: histogram, first occurrences, ordering metadata
            let stream = FactorialStream::new(*k)?;
            let mut histogram = std::collections::BTreeMap::new();
            let mut first = std::collections::BTreeMap::new();
            for (n, v) in stream.take(*n_limit as usize + 1).enumerate() {
                *histogram.entry(v).or_insert(0u64) += 1;
                first.entry(v).or_insert(n as u64);
            }
            let ordering = base_ordering(*k)?;
            let valuations = factorial_valuations(*k, *n_limit)?;
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    let _ = writeln!(out, "k {k}");
                    let _ = writeln!(out, "n-max {n_limit}");
                    for (v, c) in &histogram {
                        let _ = writeln!(out, "count {v} {c}");
                    }
                    for (v, n) in &first {
                        let _ = writeln!(out, "first {v} {n}");
                    }
                    for (p, e) in &valuations {
                        let _ = writeln!(out, "valuation {p} {e}");
                    }
                    let _ = writeln!(out, "ordering-strict {}", ordering.first_inequality_strict);
                    out
                }
                Format::Json => json(&serde_json::json!({
                    "k": k,
                    "n_max": n_limit,
                    "histogram": histogram,
                    "first_occurrence": first,
                    "base_ordering": ordering,
                    "valuations_at_n_max": valuations,
                })),
            })
        }
        Command::Dr {
            n_limit,
            q_max,
            emit_automaton,
        } => {
            let picked = [n_limit.is_some(), q_max.is_some(), *emit_automaton]
                .iter()
                .filter(|&&b| b)
                .count();
            if picked != 1 {
                return Err(CliError::Usage(
                    "give exactly one of --N, --q-max, or --emit-automaton".to_string(),
                ));
            }
            if *emit_automaton {
                return Ok(serialize_dfao(&dr_dfao()));
            }
            if let Some(n_limit) = n_limit {
                let mut out = String::new();
                for n in 0..=*n_limit {
                    let _ = writeln!(out, "{}", dr_sequence(n));
                }
                return Ok(out);
            }
            let report = dr_not_ae_periodic(q_max.expect("checked"))?;
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    for row in &report.rows {
                        let _ = writeln!(
                            out,
                            "q {} states {} disagreement {} positive {}",
                            row.q, row.product_states, row.disagreement, row.positive
                        );
                    }
                    let _ = writeln!(out, "all-positive {}", report.all_positive);
                    out
                }
                Format::Json => json(&report),
            })
        }
        Command::Factors {
            automaton,
            window,
            m,
            order,
        } => {
            let w = load_window(automaton, *window, order)?;
            let list = factors(&w, *m)?;
            let mut out = String::new();
            for factor in &list {
                let _ = writeln!(out, "{}", w.render(factor));
            }
            if fmt == Format::Json {
                let rendered: Vec<String> = list.iter().map(|f| w.render(f)).collect();
                return Ok(json(&serde_json::json!({ "m": m, "factors": rendered })));
            }
            Ok(out)
        }
        Command::Minword {
            automaton,
            window,
            m,
            order,
        } => {
            let w = load_window(automaton, *window, order)?;
            let word = min_prefix(&w, *m)?;
            Ok(match fmt {
                Format::Text => format!("{}\n", w.render(&word)),
                Format::Json => json(&serde_json::json!({
                    "m": m,
                    "min_word": w.render(&word),
                })),
            })
        }
        Command::Gaps {
            automaton,
            window,
            m,
            order,
        } => {
            let w = load_window(automaton, *window, order)?;
            let report = recurrence_gaps(&w, *m)?;
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    for (factor, gap) in &report.max_gap {
                        let _ = writeln!(
                            out,
                            "{} gap {} tail {}",
                            w.render(factor),
                            gap,
                            report.tail_gap[factor]
                        );
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = report
                        .max_gap
                        .iter()
                        .map(|(factor, gap)| {
                            serde_json::json!({
                                "factor": w.render(factor),
                                "max_gap": gap,
                                "tail_gap": report.tail_gap[factor],
                            })
                        })
                        .collect();
                    json(&serde_json::json!({ "m": m, "gaps": rows }))
                }
            })
        }
        Command::Langcmp {
            a,
            b,
            window,
            m_max,
            order,
        } => {
            let wa = load_window(a, *window, order)?;
            let wb = load_window(b, *window, order)?;
            let verdicts = language_equal_empirical(&wa, &wb, *m_max)?;
            Ok(match fmt {
                Format::Text => {
                    let mut out = String::new();
                    for (m, equal) in &verdicts {
                        let _ = writeln!(out, "m {m} equal {equal}");
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = verdicts
                        .iter()
                        .map(|(m, equal)| serde_json::json!({ "m": m, "equal": equal }))
                        .collect();
                    json(&rows)
                }
            })
        }
    }
}

fn emit_automaton(fmt: Format, a: &Dfao, extra: serde_json::Value) -> CliResult {
    Ok(match fmt {
        Format::Text => serialize_dfao(a),
        Format::Json => {
            let mut object = serde_json::json!({ "automaton": serialize_dfao(a) });
            if let (Some(map), Some(extra)) = (object.as_object_mut(), extra.as_object()) {
                for (k, v) in extra {
                    map.insert(k.clone(), v.clone());
                }
            }
            json(&object)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error[usage]: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
