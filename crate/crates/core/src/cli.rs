//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage/IO/parse error, 2 negative mathematical
//! verdict, 3 internal invariant violation or numerical limit.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::oracle::{conjecture_probe, DEFAULT_GRID, DEFAULT_SEED};
use crate::pattern::{b_matrix, parse_pattern, positive_part, RealMatrix, SignPattern};
use crate::realizer::{hypothesis_failure, hypothesis_holds, realize, Realization, RealizeError};
use crate::spectral::{verify_algebraic_positivity, witness_polynomial, WitnessPolynomial};
use crate::structure::{
    cross_component_plus, digraph_of, irreducible_components, is_ap_irreducible, is_minimally_ap_irreducible,
    is_strongly_connected,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "apsign", version, about = "Sign patterns that allow algebraic positivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural report; exit 0 iff the component hypothesis holds.
    Check { file: PathBuf },
    /// Build and certify a matrix in Q(A); writes a JSON document.
    Realize {
        file: PathBuf,
        /// Output path; `-` (the default) is standard output.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Certificate search for a matrix document (bare matrix or realization).
    Verify {
        doc: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Witness polynomial and the least entry of f(M).
    Witness { doc: PathBuf },
    /// Step-by-step construction log.
    Trace { file: PathBuf },
    /// Probe every (canonical) pattern of order n with filter, realizer and grid search.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Comma-separated positive magnitudes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID.to_vec())]
        grid: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Every pattern instead of one per permutation/negation orbit.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
}

struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn input<E: std::fmt::Display>(ctx: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure(EXIT_INPUT, format!("{}: {e}", ctx.display()))
}

fn read_pattern(path: &Path) -> Result<SignPattern, Failure> {
    let text = std::fs::read_to_string(path).map_err(input(path))?;
    parse_pattern(&text).map_err(input(path))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(input(path))?;
    serde_json::from_str(&text).map_err(input(path))
}

/// The matrix of a document: either a bare `{"n", "rows"}` or anything with a `matrix` field.
fn doc_matrix(path: &Path, doc: &Value) -> Result<RealMatrix, Failure> {
    let m = doc.get("matrix").unwrap_or(doc);
    serde_json::from_value(m.clone()).map_err(input(path))
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn realize_failure(e: RealizeError) -> Failure {
    let code = match e {
        RealizeError::HypothesisFails(_)
        | RealizeError::PreconditionViolated(_)
        | RealizeError::NegativeDiagonal(_) => EXIT_NEGATIVE,
        _ => EXIT_INTERNAL,
    };
    Failure(code, e.to_string())
}

fn negation_hint(a: &SignPattern) -> String {
    if !hypothesis_holds(a) && hypothesis_holds(&a.negate()) {
        "\nnote: -A satisfies the hypothesis; realize -A and negate the result".into()
    } else {
        String::new()
    }
}

fn check(file: &Path, out: &mut dyn Write) -> Outcome {
    let a = read_pattern(file)?;
    let n = a.order();
    let plus_rows = (0..n).all(|i| (0..n).any(|j| a.get(i, j) == crate::Sign::Plus));
    let plus_cols = (0..n).all(|j| (0..n).any(|i| a.get(i, j) == crate::Sign::Plus));
    let comps = irreducible_components(&positive_part(&a));
    let comp_text: Vec<String> = comps
        .parts
        .iter()
        .map(|p| {
            format!(
                "{{{}}}",
                p.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let ap = is_ap_irreducible(&a);
    let mut report = String::new();
    report += &format!("order: {n}\n");
    report += &format!("irreducible: {}\n", yn(is_strongly_connected(&digraph_of(&a))));
    report += &format!("+ in every row and column: {}\n", yn(plus_rows && plus_cols));
    report += &format!(
        "B_A irreducible: {}\n",
        yn(is_strongly_connected(&digraph_of(&b_matrix(&a))))
    );
    report += &format!("AP-irreducible: {}\n", yn(ap));
    report += &format!(
        "minimally AP-irreducible: {}\n",
        yn(ap && is_minimally_ap_irreducible(&a))
    );
    report += &format!("components of A+: {}\n", comp_text.join(" "));
    report += &format!(
        "+ between components: {}\n",
        cross_component_plus(&a).map_or("none".to_string(), |(i, j)| format!("({}, {})", i + 1, j + 1))
    );
    let failure = hypothesis_failure(&a);
    report += &format!("hypothesis: {}\n", yn(failure.is_none()));
    write!(out, "{report}").map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
    match failure {
        None => Ok(EXIT_OK),
        Some(why) => Err(Failure(
            EXIT_NEGATIVE,
            format!("hypothesis fails: {why}{}", negation_hint(&a)),
        )),
    }
}

fn do_realize(file: &Path) -> Result<(SignPattern, Realization), Failure> {
    let a = read_pattern(file)?;
    match realize(&a) {
        Ok(r) => Ok((a, r)),
        Err(e) => {
            let mut f = realize_failure(e);
            f.1 += &negation_hint(&a);
            Err(f)
        }
    }
}

fn write_doc(target: &str, text: &str, out: &mut dyn Write) -> Outcome {
    if target == "-" {
        writeln!(out, "{text}").map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
    } else {
        std::fs::write(target, format!("{text}\n")).map_err(|e| Failure(EXIT_INPUT, format!("{target}: {e}")))?;
    }
    Ok(EXIT_OK)
}

fn fmt_vec(v: &[f64]) -> String {
    format!(
        "[{}]",
        v.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(", ")
    )
}

fn verify(path: &Path, json: bool, out: &mut dyn Write) -> Outcome {
    let doc = read_json(path)?;
    let m = doc_matrix(path, &doc)?;
    let (verdict, _) = verify_algebraic_positivity(&m).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
    let io = |e: std::io::Error| Failure(EXIT_INPUT, e.to_string());
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&verdict).expect("verdict serializes")
        )
        .map_err(io)?;
    } else if verdict.positive {
        writeln!(out, "verdict: algebraically positive").map_err(io)?;
        writeln!(out, "lambda: {:.15e}", verdict.lambda.unwrap_or(f64::NAN)).map_err(io)?;
        writeln!(out, "u: {}", fmt_vec(verdict.u.as_deref().unwrap_or(&[]))).map_err(io)?;
        writeln!(out, "v: {}", fmt_vec(verdict.v.as_deref().unwrap_or(&[]))).map_err(io)?;
    } else {
        let why = verdict.failure.map_or("unknown".to_string(), |f| f.to_string());
        writeln!(out, "verdict: not certified ({why})").map_err(io)?;
    }
    Ok(if verdict.positive { EXIT_OK } else { EXIT_NEGATIVE })
}

fn witness(path: &Path, out: &mut dyn Write) -> Outcome {
    let doc = read_json(path)?;
    let m = doc_matrix(path, &doc)?;
    let (f, source) = match doc.get("witness") {
        Some(w) => (
            serde_json::from_value::<WitnessPolynomial>(w.clone()).map_err(input(path))?,
            "document",
        ),
        None => {
            let (verdict, _) = verify_algebraic_positivity(&m).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
            let Some(lambda) = verdict.lambda.filter(|_| verdict.positive) else {
                let why = verdict.failure.map_or("unknown".to_string(), |f| f.to_string());
                return Err(Failure(EXIT_NEGATIVE, format!("no witness: {why}")));
            };
            (
                witness_polynomial(&m, lambda).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?,
                "computed",
            )
        }
    };
    if f.coefficients.is_empty() || (!f.low.is_empty() && f.low.len() != f.coefficients.len()) {
        return Err(Failure(EXIT_INPUT, format!("{}: malformed witness", path.display())));
    }
    let min = f.evaluate(&m).min_entry();
    let io = |e: std::io::Error| Failure(EXIT_INPUT, e.to_string());
    writeln!(out, "source: {source}").map_err(io)?;
    writeln!(out, "degree: {}", f.degree()).map_err(io)?;
    writeln!(out, "coefficients (ascending): {}", fmt_vec(&f.coefficients)).map_err(io)?;
    writeln!(out, "min entry of f(M): {min:.6e}").map_err(io)?;
    Ok(if min > 0.0 { EXIT_OK } else { EXIT_NEGATIVE })
}

fn trace(file: &Path, out: &mut dyn Write) -> Outcome {
    let (_, r) = do_realize(file)?;
    let io = |e: std::io::Error| Failure(EXIT_INPUT, e.to_string());
    for (k, s) in r.trace.steps.iter().enumerate() {
        let params: Vec<String> = s.params.iter().map(|(a, b)| format!("{a}={b}")).collect();
        let mut head = format!("[{}] {}", k + 1, s.rule);
        if let Some(stage) = &s.stage {
            head += &format!("  {stage}");
        }
        if !params.is_empty() {
            head += &format!("  ({})", params.join(", "));
        }
        if let Some(e) = s.epsilon {
            head += &format!("  eps={e}");
        }
        if let Some(res) = s.residual {
            head += &format!("  residual={res:.1e}");
        }
        writeln!(out, "{head}").map_err(io)?;
        let w = s.labels.iter().map(|l| l.len()).max().unwrap_or(1).max(1);
        writeln!(
            out,
            "{:w$}  {}",
            "",
            s.labels
                .iter()
                .map(|l| format!("{l:>w$}"))
                .collect::<Vec<_>>()
                .join(" ")
        )
        .map_err(io)?;
        for (i, l) in s.labels.iter().enumerate() {
            let row: Vec<String> = (0..s.labels.len())
                .map(|j| format!("{:>w$}", s.pattern.get(i, j).as_char()))
                .collect();
            writeln!(out, "{l:>w$}  {}", row.join(" ")).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    writeln!(out, "lambda = {:.15e}; witness degree {}", r.lambda, r.witness.degree()).map_err(io)?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Check { file } => check(&file, out),
        Command::Realize { file, out: target } => {
            let (_, r) = do_realize(&file)?;
            let text = serde_json::to_string_pretty(&r).expect("realization serializes");
            write_doc(&target, &text, out)
        }
        Command::Verify { doc, json } => verify(&doc, json, out),
        Command::Witness { doc } => witness(&doc, out),
        Command::Trace { file } => trace(&file, out),
        Command::Oracle {
            n,
            budget,
            grid,
            seed,
            all,
            json,
        } => {
            let table =
                conjecture_probe(n, &grid, budget, seed, !all).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            let text = if json {
                serde_json::to_string_pretty(&table).expect("table serializes")
            } else {
                table.to_tsv()
            };
            write!(out, "{text}").map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            if table.summary.inconsistencies > 0 {
                return Err(Failure(
                    EXIT_INTERNAL,
                    format!(
                        "{} inconsistent rows between realizer and oracle",
                        table.summary.inconsistencies
                    ),
                ));
            }
            Ok(EXIT_OK)
        }
    }
}

/// Run with `args` (including the program name); returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
