//! Command-line front end. Exit status: 0 on success, 1 on invalid input,
//! 2 when an internal verification fails.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{count_overlap_free, fragility_pair, lex_least_code, lex_least_oracle};
use crate::automaticity::{build_dfao, kernel_explore, Coded};
use crate::automaton::{certify, enumerate_paths, transitions, State};
use crate::codec::{decode_eventually_periodic, decode_prefix, encode, trace, validate, Code, Validation};
use crate::error::Error;
use crate::words::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    /// Only meaningful for `automaton`.
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "fife", version, about = "Codes for infinite binary overlap-free words")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutomatonAction {
    Dot,
    Json,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DfaoAction {
    Build,
    Eval,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decode a code such as "203(0)^w;3" or "2313".
    Decode {
        code: String,
        #[arg(long)]
        length: Option<usize>,
    },
    /// Encode a prefix of an infinite overlap-free word.
    Encode {
        word: String,
        #[arg(long)]
        max_digits: Option<usize>,
    },
    /// Check a code against the automaton and its tail rules.
    Validate { code: String },
    /// Export or re-derive the automaton.
    Automaton {
        #[arg(value_enum)]
        action: AutomatonAction,
        #[arg(long, default_value_t = crate::automaton::DEFAULT_DEPTH)]
        depth: usize,
    },
    /// The lexicographically least infinite overlap-free word.
    Lexleast {
        #[arg(long, default_value_t = 64)]
        length: usize,
    },
    /// Explore the 2-kernel of a coded word.
    Kernel {
        code: String,
        #[arg(long, default_value_t = crate::automaticity::DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long, default_value_t = crate::automaticity::DEFAULT_MAX_NODES)]
        max_nodes: usize,
    },
    /// Compile a periodic code to an automaton with output, or evaluate it.
    Dfao {
        #[arg(value_enum)]
        action: DfaoAction,
        code: String,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Count overlap-free words of length n.
    Count { n: usize },
    /// Two overlap-free words differing only in a late block.
    Fragility {
        #[arg(long)]
        block: usize,
        #[arg(long)]
        horizon: usize,
    },
    /// Digit strings readable from a state.
    Paths {
        #[arg(long)]
        from: String,
        #[arg(long)]
        len: usize,
    },
}

/// A successful result in both renderings.
struct Report {
    text: String,
    json: serde_json::Value,
}

enum Failure {
    Invalid { reason: String, detail: serde_json::Value },
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Invalid { reason: e.to_string(), detail: serde_json::Value::Null }
        }
    }
}

fn invalid(reason: impl Into<String>) -> Failure {
    Failure::Invalid { reason: reason.into(), detail: serde_json::Value::Null }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let format = cli.format;
    let is_automaton = matches!(cli.command, Command::Automaton { .. });
    if format == OutputFormat::Dot && !is_automaton {
        let _ = writeln!(err, "error: --format dot is only available for `automaton`");
        return 1;
    }
    let result = match cli.command {
        Command::Automaton { action: AutomatonAction::Dot, .. } => {
            let _ = out.write_all(transitions().to_dot().as_bytes());
            return 0;
        }
        Command::Automaton { action: AutomatonAction::Json, .. } => {
            let _ = writeln!(out, "{}", transitions().to_json());
            return 0;
        }
        command => execute(command),
    };
    match result {
        Ok(report) => {
            let _ = match format {
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json).unwrap()),
                _ => writeln!(out, "{}", report.text),
            };
            0
        }
        Err(Failure::Invalid { reason, detail }) => {
            if format == OutputFormat::Json {
                let doc = json!({ "error": "invalid", "reason": reason, "detail": detail });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                let _ = writeln!(err, "invalid: {reason}");
            }
            1
        }
        Err(Failure::Internal(reason)) => {
            if format == OutputFormat::Json {
                let doc = json!({ "error": "internal", "reason": reason });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                let _ = writeln!(err, "verification failed: {reason}");
            }
            2
        }
    }
}

fn parse_code(text: &str) -> Result<Code, Failure> {
    text.parse::<Code>().map_err(Failure::from)
}

fn periodic_only(text: &str) -> Result<crate::codec::PeriodicCode, Failure> {
    match parse_code(text)? {
        Code::Periodic(c) => Ok(c),
        Code::Finite(_) => Err(invalid("expected an eventually periodic code such as 2(31)^w")),
    }
}

fn invalid_code(e: crate::codec::Invalid) -> Failure {
    let reason = match e.reason {
        crate::codec::InvalidReason::UndefinedTransition { .. } => "undefined transition".to_string(),
        other => other.to_string(),
    };
    Failure::Invalid { reason, detail: serde_json::to_value(e).unwrap() }
}

fn execute(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Decode { code, length } => {
            let parsed = parse_code(&code)?;
            let word = match &parsed {
                Code::Periodic(c) => {
                    if let Validation::Invalid(e) = validate(c) {
                        return Err(invalid_code(e));
                    }
                    decode_eventually_periodic(c, length.unwrap_or(64))?
                }
                Code::Finite(c) => {
                    trace(&c.digits).map_err(invalid_code)?;
                    let w = decode_prefix(c)?;
                    length.map_or(w.clone(), |n| w.prefix(n))
                }
            };
            Ok(Report {
                text: word.to_string(),
                json: json!({ "code": parsed.to_string(), "length": word.len(), "word": word }),
            })
        }
        Command::Encode { word, max_digits } => {
            let x: Word = word.parse()?;
            let code = encode(&x, max_digits.unwrap_or(usize::MAX))?;
            Ok(Report {
                text: code.to_string(),
                json: json!({ "word_length": x.len(), "digits": code.to_string() }),
            })
        }
        Command::Validate { code } => {
            let parsed = parse_code(&code)?;
            let end = match &parsed {
                Code::Periodic(c) => match validate(c) {
                    Validation::Valid => None,
                    Validation::Invalid(e) => return Err(invalid_code(e)),
                },
                Code::Finite(c) => Some(trace(&c.digits).map_err(invalid_code)?),
            };
            let text = match end {
                Some(s) => format!("valid (ends in state {s})"),
                None => "valid".to_string(),
            };
            Ok(Report { text, json: json!({ "code": parsed.to_string(), "valid": true, "end_state": end }) })
        }
        Command::Automaton { depth, .. } => {
            let cert = certify(depth)?;
            let transitions_certified = cert.transitions_certified();
            let certificates = cert.certificates().count();
            if !cert.agrees_with_table() {
                return Err(Failure::Internal(format!(
                    "re-derived table differs from the built-in one ({transitions_certified} transitions, {certificates} certificates)"
                )));
            }
            Ok(Report {
                text: format!("{transitions_certified} transitions certified, {certificates} emptiness certificates"),
                json: json!({
                    "depth": depth,
                    "transitions_certified": transitions_certified,
                    "emptiness_certificates": certificates,
                    "certificates": cert.certificates().collect::<Vec<_>>(),
                }),
            })
        }
        Command::Lexleast { length } => {
            let oracle = lex_least_oracle(length)?;
            let code = lex_least_code();
            let decoded = decode_eventually_periodic(&code, length)?;
            if decoded != oracle {
                return Err(Failure::Internal("decoded code disagrees with the search oracle".into()));
            }
            Ok(Report {
                text: decoded.to_string(),
                json: json!({ "code": code.to_string(), "word": decoded, "oracle_agrees": true }),
            })
        }
        Command::Kernel { code, horizon, max_nodes } => {
            let c = periodic_only(&code)?;
            if let Validation::Invalid(e) = validate(&c) {
                return Err(invalid_code(e));
            }
            let k = kernel_explore(&Coded(c.clone()), horizon, max_nodes)?;
            let nodes: Vec<_> = k
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| {
                    json!({
                        "id": id,
                        "exponent": n.address.exponent,
                        "offset": n.address.offset,
                        "even": n.children[0],
                        "odd": n.children[1],
                    })
                })
                .collect();
            let mut text = format!("{} kernel nodes at horizon {horizon}{}", k.len(), if k.overflowed { " (overflowed)" } else { "" });
            for (id, n) in k.nodes.iter().enumerate() {
                text.push_str(&format!("\n{id}: w[2^{} n + {}]", n.address.exponent, n.address.offset));
            }
            Ok(Report {
                text,
                json: json!({ "code": c.to_string(), "horizon": horizon, "overflowed": k.overflowed, "nodes": nodes }),
            })
        }
        Command::Dfao { action, code, n } => {
            let c = periodic_only(&code)?;
            if let Validation::Invalid(e) = validate(&c) {
                return Err(invalid_code(e));
            }
            let dfao = build_dfao(&c)?;
            match action {
                DfaoAction::Build => {
                    let mut text = format!("{} states, start 0, lsb-first", dfao.len());
                    for (id, s) in dfao.states.iter().enumerate() {
                        text.push_str(&format!("\n{id}: out {} on0 {} on1 {}", s.out, s.on[0], s.on[1]));
                    }
                    Ok(Report { text, json: serde_json::from_str(&dfao.to_json()).unwrap() })
                }
                DfaoAction::Eval => {
                    let n = n.ok_or_else(|| invalid("dfao eval needs --n"))?;
                    let letter = dfao.eval(n);
                    Ok(Report { text: letter.to_string(), json: json!({ "n": n, "letter": letter.bit() }) })
                }
            }
        }
        Command::Count { n } => {
            let count = count_overlap_free(n)?;
            Ok(Report { text: count.to_string(), json: json!({ "n": n, "count": count }) })
        }
        Command::Fragility { block, horizon } => {
            let pair = fragility_pair(block, horizon)?;
            let first = pair.diff_positions.first().copied();
            let text = format!(
                "{}\n{}\nboth overlap-free to {horizon}; {} positions differ, first at {}",
                pair.code_a,
                pair.code_b,
                pair.diff_positions.len(),
                first.map_or("-".to_string(), |p| p.to_string())
            );
            Ok(Report { text, json: serde_json::to_value(&pair).unwrap() })
        }
        Command::Paths { from, len } => {
            let state = State::from_name(&from).ok_or_else(|| invalid(format!("unknown state {from:?}")))?;
            let paths = enumerate_paths(state, len)?;
            let rendered: Vec<String> = paths.iter().map(|p| p.iter().map(|d| d.to_char()).collect()).collect();
            Ok(Report { text: rendered.join("\n"), json: json!({ "from": state, "len": len, "paths": rendered }) })
        }
    }
}
