//! `kqcalc`: query the K-group tables from the command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error,
//! 3 verification failure.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use kq_core::adams::{bracket, check_obstruction};
use kq_core::fields::{a_param, find_q, invariants, is_two_regular, real_embeddings, FieldParams};
use kq_core::tables::symbolic;
use kq_core::verify::{all_passed, run_all, REPORT_HEADER};
use kq_core::{Eps, Error, FieldSpec, QueryContext, TheoryTag};

#[derive(Parser, Debug)]
#[command(name = "kqcalc", version, about = "2-primary K-groups of rings of 2-integers")]
struct Cli {
    /// Print the JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One group, e.g. `group --theory KQ- --n 3 --field "Q(sqrt 6)"`.
    Group {
        #[arg(long, value_parser = parse_theory)]
        theory: TheoryTag,
        /// Degree; -1 is accepted for KQ+/KQ-. Optional for W, W', W1.
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Rows 0..=n-max, with w and t left symbolic.
    Table {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 16)]
        n_max: u32,
        #[arg(long)]
        q: Option<u64>,
        /// Comma-separated theories (default K,KQ+,KQ-,V+,V-).
        #[arg(long, value_parser = parse_theory, value_delimiter = ',')]
        theory: Vec<TheoryTag>,
    },
    /// Decide 2-regularity.
    Regular {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Use the invariant computation rather than the closed criterion.
        #[arg(long)]
        oracle: bool,
    },
    /// Smallest congruence-admissible prime q.
    FindQ {
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Run every consistency check.
    Verify {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
    /// Parity of the top coefficient in the Adams operation computation.
    Adams {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        dump_coeffs: bool,
    },
}

fn parse_theory(s: &str) -> Result<TheoryTag, String> {
    TheoryTag::from_str(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(Error),
    Verify(Output),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::InvalidGroup(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e),
        }
    }
}

/// Text lines and the JSON envelope for one invocation.
struct Output {
    lines: Vec<String>,
    json: Value,
}

fn parse_field(s: &str) -> Result<FieldSpec, Failure> {
    let spec = FieldSpec::from_str(s)?;
    spec.validate()?;
    Ok(spec)
}

fn field_json(spec: &FieldSpec) -> Value {
    json!({
        "spec": spec.to_string(),
        "r": real_embeddings(spec).ok(),
        "a_F": a_param(spec).ok(),
        "two_regular": FieldParams::for_spec(spec).is_ok(),
    })
}

fn field_line(spec: &FieldSpec) -> String {
    let regular = match is_two_regular(spec) {
        Ok(v) if v.regular => "2-regular".to_string(),
        Ok(_) => "not 2-regular".to_string(),
        Err(e) => format!("regularity unknown ({e})"),
    };
    let r = real_embeddings(spec).map_or("?".into(), |r| r.to_string());
    let a = a_param(spec).map_or("?".into(), |a| a.to_string());
    format!("# field: {spec}  r={r}  a_F={a}  {regular}")
}

fn envelope(query: Value, spec: Option<&FieldSpec>, q: Option<u64>, key: &str, body: Value, notes: &[String]) -> Value {
    let mut v = json!({
        "query": query,
        "field": spec.map(field_json),
        "q": q,
        "notes": notes,
    });
    v[key] = body;
    v
}

fn cmd_group(theory: TheoryTag, n: Option<i64>, field: &str, q: Option<u64>) -> Result<Output, Failure> {
    let spec = parse_field(field)?;
    let answer = QueryContext::new(spec.clone(), q, n).evaluate(theory)?;
    let mut lines = vec![
        answer.group.to_string(),
        format!("# theory: {theory}  n: {}", answer.n),
        field_line(&spec),
    ];
    lines.extend(answer.notes.iter().map(|n| format!("# note: {n}")));
    let result = json!({
        "theory": theory.to_string(),
        "n": answer.n,
        "group": answer.group.to_string(),
        "rank": answer.group.rank(),
        "torsion": answer.group.torsion(),
    });
    let query = json!({"command": "group", "theory": theory.to_string(), "n": n, "field": field, "q": q});
    let json = envelope(query, Some(&spec), answer.q, "result", result, &answer.notes);
    Ok(Output { lines, json })
}

fn cmd_table(field: &str, n_max: u32, q: Option<u64>, theories: Vec<TheoryTag>) -> Result<Output, Failure> {
    let spec = parse_field(field)?;
    let theories = if theories.is_empty() {
        vec![
            TheoryTag::K,
            TheoryTag::KQ(Eps::Plus),
            TheoryTag::KQ(Eps::Minus),
            TheoryTag::V(Eps::Plus),
            TheoryTag::V(Eps::Minus),
        ]
    } else {
        theories
    };
    if let Some(t) = theories.iter().find(|t| t.fixed_degree().is_some()) {
        return Err(Failure::Usage(format!("{t} has no degree; use `group --theory {t}`")));
    }
    let r = if theories.iter().any(|t| t.needs_regular_field()) {
        FieldParams::for_spec(&spec)?.r
    } else {
        real_embeddings(&spec)?
    };
    let mut notes = Vec::new();
    let mut q_used = None;
    let mut grid = Vec::new();
    let mut results = Vec::new();
    for n in 0..=i64::from(n_max) {
        let mut row = vec![n.to_string()];
        for &tag in &theories {
            if n < tag.min_degree() {
                row.push("-".into());
                continue;
            }
            let answer = QueryContext::new(spec.clone(), q, Some(n)).evaluate(tag)?;
            for note in answer.notes {
                if !notes.contains(&note) {
                    notes.push(note);
                }
            }
            q_used = q_used.or(answer.q);
            let shape = symbolic(tag, n, r)?;
            results.push(json!({
                "theory": tag.to_string(),
                "n": n,
                "group": answer.group.to_string(),
                "shape": shape,
            }));
            row.push(shape);
        }
        grid.push(row);
    }
    let mut header = vec!["n".to_string()];
    header.extend(theories.iter().map(ToString::to_string));
    grid.insert(0, header);
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut lines: Vec<String> = grid
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
            cells.join("  ").trim_end().to_string()
        })
        .collect();
    lines.push(field_line(&spec));
    lines.push("# k = floor(n/8), w_m = 2^(a_F + nu2(m)), t_n = (q^((n+1)/2) - 1)_2".into());
    lines.extend(notes.iter().map(|n| format!("# note: {n}")));
    let query = json!({
        "command": "table",
        "field": field,
        "n_max": n_max,
        "q": q,
        "theories": theories.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    let json = envelope(query, Some(&spec), q_used, "results", Value::Array(results), &notes);
    Ok(Output { lines, json })
}

fn yes_no(v: Option<bool>) -> String {
    v.map_or("unknown".into(), |b| if b { "yes".into() } else { "no".into() })
}

fn cmd_regular(field: &str, oracle: bool) -> Result<Output, Failure> {
    let spec = parse_field(field)?;
    let query = json!({"command": "regular", "field": field, "oracle": oracle});
    if !oracle {
        let v = is_two_regular(&spec)?;
        let first = if v.regular {
            format!("2-regular: {}", v.reason)
        } else {
            format!("not 2-regular: {}", v.reason)
        };
        let lines = vec![first, field_line(&spec), "# method: closed criterion".into()];
        let body = json!({"two_regular": v.regular, "reason": v.reason, "method": "criterion"});
        return Ok(Output {
            lines,
            json: envelope(query, Some(&spec), None, "result", body, &[]),
        });
    }
    let inv = invariants(&spec)?;
    let mut notes = Vec::new();
    if !matches!(spec, FieldSpec::RealQuadratic { .. }) {
        notes.push("no independent oracle for this field family; invariants follow the criterion".to_string());
    }
    let reason = inv.reasons.first().cloned().unwrap_or_default();
    let first = if inv.two_regular {
        format!("2-regular: {reason}")
    } else {
        format!("not 2-regular: {reason}")
    };
    let mut lines = vec![
        first,
        field_line(&spec),
        "# method: oracle".into(),
        format!(
            "# dyadic primes: {}",
            inv.dyadic_count.map_or("unknown".into(), |c| c.to_string())
        ),
        format!("# Pic(R_F) odd: {}", yes_no(inv.pic_odd)),
        format!("# units of independent signs: {}", yes_no(inv.units_indep_signs)),
        format!("# narrow Picard group odd: {}", yes_no(inv.narrow_pic_odd)),
    ];
    if inv.reasons.len() > 1 {
        lines.push(format!("# all reasons: {}", inv.reasons.join("; ")));
    }
    lines.extend(notes.iter().map(|n| format!("# note: {n}")));
    let body = json!({"two_regular": inv.two_regular, "reason": reason, "method": "oracle", "invariants": inv});
    Ok(Output {
        lines,
        json: envelope(query, Some(&spec), None, "result", body, &notes),
    })
}

fn cmd_find_q(field: &str) -> Result<Output, Failure> {
    let spec = parse_field(field)?;
    let q = find_q(&spec)?;
    let a = a_param(&spec)?;
    let lines = vec![
        q.to_string(),
        field_line(&spec),
        format!(
            "# q = +-1 (mod 2^{a}), q != +-1 (mod 2^{}); congruence-admissible",
            a + 1
        ),
    ];
    let query = json!({"command": "find-q", "field": field});
    let json = envelope(query, Some(&spec), Some(q), "result", json!({"q": q, "a_F": a}), &[]);
    Ok(Output { lines, json })
}

fn cmd_verify(field: &str, q: Option<u64>, n_max: u32) -> Result<Output, Failure> {
    let spec = parse_field(field)?;
    let (q, q_note) = QueryContext::new(spec.clone(), q, None).resolve_q()?;
    let reports = run_all(&spec, q, i64::from(n_max))?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    let first = if failed == 0 {
        format!("all {} checks passed", reports.len())
    } else {
        format!("{failed} of {} checks failed", reports.len())
    };
    let mut lines = vec![
        first,
        field_line(&spec),
        format!("# {q_note}"),
        format!("# {REPORT_HEADER}"),
    ];
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let mut line = format!("{status} {}: {}", r.name, r.details);
        if let Some(cx) = &r.counterexample {
            line.push_str(&format!(
                " [n={} {}: expected {}, got {}]",
                cx.n, cx.parameters, cx.expected, cx.actual
            ));
        }
        lines.push(line);
    }
    let notes = vec![q_note, REPORT_HEADER.to_string()];
    let query = json!({"command": "verify", "field": field, "q": q, "n_max": n_max});
    let json = envelope(
        query,
        Some(&spec),
        Some(q),
        "results",
        serde_json::to_value(&reports).unwrap(),
        &notes,
    );
    let out = Output { lines, json };
    if all_passed(&reports) {
        Ok(out)
    } else {
        Err(Failure::Verify(out))
    }
}

fn cmd_adams(q: u64, dump: bool) -> Result<Output, Failure> {
    let odd = check_obstruction(q)?;
    let b = bracket(q, 2 * q as usize)?;
    let top = b.coeff(2 * q as usize);
    let verdict = if odd { "odd" } else { "even" };
    let mut lines = vec![
        format!("{verdict}: coefficient of u^{} is {top}", 2 * q),
        format!("# q = {q}; constant term {}", b.coeff(0)),
        if odd {
            "# q^4 psi^q - 1 on lambda^1 is not in the image of realification".into()
        } else {
            "# parity argument fails for this q".into()
        },
    ];
    let coeffs: Vec<String> = b.coeffs().iter().map(ToString::to_string).collect();
    if dump {
        lines.push(format!("# coefficients: {}", coeffs.join(" ")));
    }
    let mut body = json!({"q": q, "odd": odd, "coefficient": top.to_string(), "constant_term": b.coeff(0).to_string()});
    if dump {
        body["coefficients"] = json!(coeffs);
    }
    let query = json!({"command": "adams", "q": q, "dump_coeffs": dump});
    Ok(Output {
        lines,
        json: envelope(query, None, Some(q), "result", body, &[]),
    })
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Group { theory, n, field, q } => cmd_group(theory, n, &field, q),
        Command::Table {
            field,
            n_max,
            q,
            theory,
        } => cmd_table(&field, n_max, q, theory),
        Command::Regular { field, oracle } => cmd_regular(&field, oracle),
        Command::FindQ { field } => cmd_find_q(&field),
        Command::Verify { field, q, n_max } => cmd_verify(&field, q, n_max),
        Command::Adams { q, dump_coeffs } => cmd_adams(q, dump_coeffs),
    }
}

fn print(out: &Output, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out.json).expect("json values serialize")
        );
    } else {
        for line in &out.lines {
            println!("{line}");
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            print(&out, json);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            if json {
                println!("{}", json!({"error": e.to_string()}));
            }
            ExitCode::from(2)
        }
        Err(Failure::Verify(out)) => {
            print(&out, json);
            ExitCode::from(3)
        }
    }
}
