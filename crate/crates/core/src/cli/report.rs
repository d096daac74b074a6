//! Report rendering. Machine formats carry no timestamps; rationals are
//! always `p/q` strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::spec::{format_rational, format_terms, print_surface_spec, SurfaceSpec};
use super::{CertificateReport, CliError, OutputFormat};
use crate::alpha::AlphaResult;
use crate::ample::{AmplenessReport, Verdict, SELF_INTERSECTION_MARKER};
use crate::lct::{EffectiveDivisor, LctValue};

fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => json!(x.to_string()),
    }
}

fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

fn lct_string(v: &LctValue) -> String {
    match v {
        LctValue::Finite(q) => format_rational(q),
        LctValue::Infinity => "inf".into(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{cell:<w$}  "));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn witness_json(d: &EffectiveDivisor) -> Value {
    Value::Object(
        d.coefficients()
            .iter()
            .map(|(l, c)| (l.clone(), json!(format_rational(c))))
            .collect(),
    )
}

fn witness_text(d: &EffectiveDivisor) -> String {
    format_terms(d.coefficients().iter().map(|(l, c)| (l.as_str(), c.clone())))
}

pub fn alpha_result_json(r: &AlphaResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("k".into(), json!(r.k));
    m.insert("alpha_k".into(), json!(format_rational(&r.alpha_k)));
    m.insert("m_star".into(), int(&r.m_star));
    m.insert("achieved_by".into(), json!(r.achieved_by));
    m.insert("witness".into(), witness_json(&r.witness));
    m
}

pub fn build(spec: &SurfaceSpec, format: OutputFormat) -> Result<String, CliError> {
    let model = &spec.model;
    let labels = model.report_labels();
    let gram = model.report_gram_matrix();
    let classes = model
        .curves()
        .iter()
        .map(|(l, c)| Ok((l.clone(), model.report_coordinates(c)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let divisors = spec
        .divisors
        .keys()
        .map(|name| Ok((name.clone(), model.report_coordinates(&spec.divisor_class(name)?)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match format {
        OutputFormat::Json => pretty(&json!({
            "basis": labels,
            "basis_id": model.basis_id().as_str(),
            "intersection_matrix": gram.to_nested().iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "curves": classes.iter().map(|(l, c)| (l.clone(), ints(c))).collect::<Map<_, _>>(),
            "divisors": divisors.iter().map(|(l, c)| (l.clone(), ints(c))).collect::<Map<_, _>>(),
            "assertions": model.assertions(),
        })),
        OutputFormat::Csv => {
            let mut header = vec!["row"];
            header.extend(labels.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = labels
                .iter()
                .zip(gram.to_nested())
                .map(|(l, r)| std::iter::once(l.clone()).chain(r.iter().map(|x| x.to_string())).collect())
                .collect();
            csv_text(&header, &rows)
        }
        OutputFormat::Text => {
            let mut out = print_surface_spec(spec);
            let brackets = |v: &[BigInt]| {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(", "))
            };
            out.push_str(&format!("#\n# basis: {}\n", labels.join(" ")));
            out.push_str(&format!("# basis id: {}\n", model.basis_id()));
            out.push_str("# classes in this basis:\n");
            let width = classes.iter().chain(&divisors).map(|(l, _)| l.len()).max().unwrap_or(0);
            for (l, c) in classes.iter().chain(&divisors) {
                out.push_str(&format!("#   {l:<width$} = {}\n", brackets(c)));
            }
            out.push_str("# intersection matrix:\n");
            for row in gram.to_nested() {
                out.push_str(&format!("#   {}\n", brackets(&row)));
            }
            out
        }
    })
}

pub fn ample(label: &str, r: &AmplenessReport, format: OutputFormat) -> String {
    let verdict = match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    };
    match format {
        OutputFormat::Json => pretty(&json!({
            "divisor": label,
            "self_intersection": int(&r.self_intersection),
            "per_curve": r.per_curve.iter().map(|(l, d)| (l.clone(), int(d))).collect::<Map<_, _>>(),
            "verdict": verdict,
            "failures": r.failures,
            "assertion_note": r.assertion_note,
        })),
        OutputFormat::Csv | OutputFormat::Text => {
            let row = |name: &str, d: &BigInt| {
                let positive = !r.failures.iter().any(|f| f == name);
                vec![name.to_string(), d.to_string(), positive.to_string()]
            };
            let mut rows = vec![row(SELF_INTERSECTION_MARKER, &r.self_intersection)];
            rows.extend(r.per_curve.iter().map(|(l, d)| row(l, d)));
            if format == OutputFormat::Csv {
                return csv_text(&["curve", "degree", "positive"], &rows);
            }
            let mut out = format!("divisor {label}\n");
            out.push_str(&table(&["curve", "degree", "positive"], &rows));
            out.push_str(&format!("verdict: {verdict}\n"));
            if !r.failures.is_empty() {
                out.push_str(&format!("failures: {}\n", r.failures.join(" ")));
            }
            out.push_str(&format!("note: {}\n", r.assertion_note));
            out
        }
    }
}

pub fn alpha(curves: &[String], results: &[AlphaResult], matches: Option<&[bool]>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let items: Vec<Value> = results
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut m = alpha_result_json(r);
                    if let Some(ms) = matches {
                        m.insert("matches_closed_form".into(), json!(ms[i]));
                    }
                    Value::Object(m)
                })
                .collect();
            pretty(&Value::Array(items))
        }
        OutputFormat::Csv | OutputFormat::Text => {
            let mut header = vec!["k", "alpha_k", "m_star", "achieved_by"];
            if matches.is_some() {
                header.push("matches_closed_form");
            }
            let text = format == OutputFormat::Text;
            if text {
                header.push("witness");
            }
            let rows: Vec<Vec<String>> = results
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = vec![
                        r.k.to_string(),
                        format_rational(&r.alpha_k),
                        r.m_star.to_string(),
                        r.achieved_by.clone(),
                    ];
                    if let Some(ms) = matches {
                        row.push(ms[i].to_string());
                    }
                    if text {
                        row.push(witness_text(&r.witness));
                    }
                    row
                })
                .collect();
            if text {
                let mut out = format!("# infimum over divisors supported on: {}\n", curves.join(" "));
                out.push_str(&table(&header, &rows));
                out
            } else {
                csv_text(&header, &rows)
            }
        }
    }
}

pub fn oracle(pairs: &[(AlphaResult, AlphaResult)], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => pretty(&Value::Array(
            pairs
                .iter()
                .map(|(s, o)| {
                    json!({
                        "k": s.k,
                        "solver": Value::Object(alpha_result_json(s)),
                        "oracle": Value::Object(alpha_result_json(o)),
                        "agree": s == o,
                    })
                })
                .collect(),
        )),
        OutputFormat::Csv | OutputFormat::Text => {
            let header = ["k", "alpha_k", "oracle_alpha_k", "agree"];
            let rows: Vec<Vec<String>> = pairs
                .iter()
                .map(|(s, o)| {
                    vec![
                        s.k.to_string(),
                        format_rational(&s.alpha_k),
                        format_rational(&o.alpha_k),
                        (s == o).to_string(),
                    ]
                })
                .collect();
            if format == OutputFormat::Csv {
                csv_text(&header, &rows)
            } else {
                table(&header, &rows)
            }
        }
    }
}

pub fn verify(reports: &[CertificateReport], format: OutputFormat) -> String {
    let claim = |r: &CertificateReport| r.claim_holds.map_or(String::new(), |c| c.to_string());
    match format {
        OutputFormat::Json => pretty(&Value::Array(
            reports
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    m.insert("k".into(), json!(r.k));
                    m.insert("equivalent".into(), json!(r.equivalent));
                    m.insert("lct".into(), json!(lct_string(&r.lct)));
                    m.insert("k_lct".into(), json!(lct_string(&r.bound)));
                    if let Some(c) = r.claim_holds {
                        m.insert("matches_alpha_k".into(), json!(c));
                    }
                    Value::Object(m)
                })
                .collect(),
        )),
        OutputFormat::Csv | OutputFormat::Text => {
            let header = ["k", "equivalent", "lct", "k_lct", "matches_alpha_k"];
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.equivalent.to_string(),
                        lct_string(&r.lct),
                        lct_string(&r.bound),
                        claim(r),
                    ]
                })
                .collect();
            if format == OutputFormat::Csv {
                csv_text(&header, &rows)
            } else {
                table(&header, &rows)
            }
        }
    }
}
