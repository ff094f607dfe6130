//! The on-disk formula format.
//!
//! ```text
//! c optional comment lines, anywhere
//! p eok <n> <m> <k> <epsilon>
//! 1 -2 3 0
//! ...                 (m lines, k nonzero integers each, 0-terminated;
//!                      negative = negated variable)
//! ```

use super::{Clause, Formula, Literal, Provenance};
use crate::error::{Error, Result};

/// Serializes a formula. Epsilon is printed with at least six significant
/// digits, exactly round-trippable.
pub fn write_formula(f: &Formula) -> String {
    let mut out = String::new();
    match f.provenance() {
        Provenance::Counting { r, seed } => {
            out.push_str(&format!("c model=counting r={r} seed={seed}\n"));
        }
        Provenance::ConstantProb { p, seed } => {
            out.push_str(&format!("c model=constant_prob p={p} seed={seed}\n"));
        }
        Provenance::File => {}
    }
    out.push_str(&format!(
        "p eok {} {} {} {}\n",
        f.n(),
        f.num_clauses(),
        f.k(),
        format_epsilon(f.epsilon())
    ));
    for cl in f.clauses() {
        for lit in cl.literals() {
            out.push_str(&format!("{} ", lit.code()));
        }
        out.push_str("0\n");
    }
    out
}

fn format_epsilon(eps: f64) -> String {
    let shortest = format!("{eps}");
    if significant_digits(&shortest) >= 6 {
        return shortest;
    }
    let padded = format!("{eps:.6}");
    if padded.parse::<f64>() == Ok(eps) {
        padded
    } else {
        shortest
    }
}

fn significant_digits(s: &str) -> usize {
    s.chars()
        .skip_while(|c| !c.is_ascii_digit() || *c == '0')
        .filter(|c| c.is_ascii_digit())
        .count()
}

/// Parses the text format. Comment lines are skipped; errors carry the
/// 1-based line number.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut header: Option<(usize, usize, usize, f64)> = None;
    let mut clauses: Vec<Clause> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::Parse { line: line_no, msg: "duplicate header".into() });
            }
            let fields: Vec<&str> = rest.split_ascii_whitespace().collect();
            if fields.len() != 5 || fields[0] != "eok" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected header `p eok <n> <m> <k> <epsilon>`".into(),
                });
            }
            let n = parse_field::<usize>(fields[1], "n", line_no)?;
            let m = parse_field::<usize>(fields[2], "m", line_no)?;
            let k = parse_field::<usize>(fields[3], "k", line_no)?;
            let eps = parse_field::<f64>(fields[4], "epsilon", line_no)?;
            header = Some((n, m, k, eps));
            continue;
        }
        let Some((n, _, k, _)) = header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause before `p eok` header".into(),
            });
        };
        let mut codes: Vec<i32> = Vec::with_capacity(k + 1);
        for tok in line.split_ascii_whitespace() {
            codes.push(parse_field::<i32>(tok, "literal", line_no)?);
        }
        if codes.last() != Some(&0) {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause line must end with 0".into(),
            });
        }
        codes.pop();
        if codes.len() != k {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("clause has {} literals, expected {k}", codes.len()),
            });
        }
        let mut literals = Vec::with_capacity(k);
        for code in codes {
            literals.push(Literal::from_code(code).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?);
        }
        clauses.push(Clause::new(literals, k, n).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?);
    }

    let Some((n, m, k, eps)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing `p eok` header".into() });
    };
    if clauses.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} clauses but {} were given", clauses.len()),
        });
    }
    Formula::new(n, k, eps, clauses, Provenance::File).map_err(|e| Error::Parse {
        line: 0,
        msg: e.to_string(),
    })
}

fn parse_field<T: std::str::FromStr>(tok: &str, name: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("could not parse {name} from {tok:?}"),
    })
}
