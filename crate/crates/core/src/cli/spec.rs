//! Surface-description files.
//!
//! One record per line, `key: value`, `#` starts a comment:
//!
//! ```text
//! base: hirzebruch 2 section=Zt2 fiber=Ft negative=Ztm2
//! curve: Ft1 = Ft
//! blowup: Et1 through Zt2:1 Ft1:1
//! report_basis: Zt2 Ft Et1 Et2 Et3 Et4 E1 E2
//! assert: "free text"
//! divisor: L = 2 Zt2 + 9/2 Et1 - Ft1
//! torus_curves: Zt2 Ztm2 Et1
//! ample_curves: Zt2 Ztm2 Ft
//! ```
//!
//! `base` comes first. `curve`, `blowup`, `report_basis` and `assert` are
//! applied in file order. `divisor` and the two curve lists are resolved
//! against the finished surface, so their labels name final proper
//! transforms.

use std::str::FromStr;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::builder::{
    blow_up, hirzebruch_with_labels, paper_ample_curves, paper_divisor, paper_surface, paper_torus_curves,
    BlowUpSpec, BuildError, Combination, Step, SurfaceModel,
};
use crate::lattice::{DivisorClass, Rational};

/// The paper surface as a spec file.
pub const PAPER_SPEC: &str = include_str!("../../data/paper.surf");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A parsed surface together with its named divisors and curve lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub model: SurfaceModel,
    pub divisors: IndexMap<String, Combination>,
    pub torus_curves: Option<Vec<String>>,
    pub ample_curves: Option<Vec<String>>,
}

impl SurfaceSpec {
    /// The paper surface with `L` and both curve lists.
    pub fn paper() -> SurfaceSpec {
        let (model, _) = paper_surface();
        let mut divisors = IndexMap::new();
        divisors.insert("L".to_string(), paper_divisor());
        SurfaceSpec {
            model,
            divisors,
            torus_curves: Some(paper_torus_curves()),
            ample_curves: Some(paper_ample_curves()),
        }
    }

    pub fn divisor_class(&self, label: &str) -> Result<DivisorClass, BuildError> {
        let combination = self
            .divisors
            .get(label)
            .ok_or_else(|| BuildError::UnknownLabel(label.to_string()))?;
        self.model.class_of(label, combination)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Word,
    Str,
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    text: String,
    column: usize,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '=' | '+' | '-' | '"' | '#')
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if matches!(c, '=' | '+' | '-') {
            tokens.push(Token {
                kind: Kind::Sym(c),
                text: c.to_string(),
                column,
            });
            i += 1;
        } else if c == '"' {
            let mut text = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(SpecError {
                            line: line_no,
                            column,
                            message: "unterminated string".into(),
                        })
                    }
                    Some('"') => break,
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => text.push(e),
                            _ => {
                                return Err(SpecError {
                                    line: line_no,
                                    column: i + 1,
                                    message: "unknown escape; only \\\" and \\\\ are allowed".into(),
                                })
                            }
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        text.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            tokens.push(Token {
                kind: Kind::Str,
                text,
                column,
            });
        } else {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            tokens.push(Token {
                kind: Kind::Word,
                text: chars[start..i].iter().collect(),
                column,
            });
        }
    }
    Ok(tokens)
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Tokens of one record, with position-aware error helpers.
struct Record<'a> {
    line: usize,
    end_column: usize,
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Record<'a> {
    fn error_at(&self, column: usize, message: impl Into<String>) -> SpecError {
        SpecError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> SpecError {
        self.error_at(self.here(), message)
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn finish(&self) -> Result<(), SpecError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error_at(t.column, format!("unexpected `{}`", t.text))),
        }
    }

    fn word(&mut self, what: &str) -> Result<&'a Token, SpecError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Word => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn label(&mut self) -> Result<&'a Token, SpecError> {
        let t = self.word("a label")?;
        if !is_label(&t.text) {
            return Err(self.error_at(t.column, format!("`{}` is not a valid label", t.text)));
        }
        Ok(t)
    }

    fn keyword(&mut self, word: &str) -> Result<(), SpecError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Word && t.text == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{word}`"))),
        }
    }

    fn symbol(&mut self, c: char) -> Result<(), SpecError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Sym(c) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{c}`"))),
        }
    }

    fn labels(&mut self) -> Result<Vec<&'a Token>, SpecError> {
        let mut out: Vec<&Token> = Vec::new();
        while !self.at_end() {
            let t = self.label()?;
            if out.iter().any(|o| o.text == t.text) {
                return Err(self.error_at(t.column, format!("label `{}` listed twice", t.text)));
            }
            out.push(t);
        }
        Ok(out)
    }

    /// `[-] [coef] label (± [coef] label)*`, or a lone `0`.
    fn terms(&mut self) -> Result<Vec<(&'a Token, Rational)>, SpecError> {
        if let [t] = &self.tokens[self.pos..] {
            if t.kind == Kind::Word && t.text == "0" {
                self.pos += 1;
                return Ok(Vec::new());
            }
        }
        let mut out: Vec<(&Token, Rational)> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek().map(|t| &t.kind) {
                Some(Kind::Sym('-')) => {
                    self.pos += 1;
                    true
                }
                Some(Kind::Sym('+')) if !first => {
                    self.pos += 1;
                    false
                }
                _ if first => false,
                _ => return Err(self.error("expected `+` or `-`")),
            };
            first = false;
            let t = self.word("a coefficient or label")?;
            let (coef, label) = if t.text.starts_with(|c: char| c.is_ascii_digit()) {
                let c = parse_rational(&t.text).ok_or_else(|| {
                    self.error_at(t.column, format!("`{}` is not a nonnegative integer or p/q", t.text))
                })?;
                (c, self.label()?)
            } else if is_label(&t.text) {
                (Rational::one(), t)
            } else {
                return Err(self.error_at(t.column, format!("`{}` is not a valid label", t.text)));
            };
            if out.iter().any(|(o, _)| o.text == label.text) {
                return Err(self.error_at(label.column, format!("label `{}` appears twice", label.text)));
            }
            out.push((label, if negative { -coef } else { coef }));
            if self.at_end() {
                return Ok(out);
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if !s.chars().all(|c| c.is_ascii_digit() || c == '/') {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) if !p.is_empty() && !q.is_empty() => {
            let q = BigInt::from_str(q).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(BigInt::from_str(p).ok()?, q))
        }
        Some(_) => None,
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

/// Keeps the first occurrence of a record together with its position.
struct Deferred<T> {
    value: T,
    line: usize,
    columns: Vec<usize>,
}

pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec, SpecError> {
    let mut model: Option<SurfaceModel> = None;
    let mut divisors: IndexMap<String, Deferred<Vec<(String, Rational)>>> = IndexMap::new();
    let mut torus: Option<Deferred<Vec<String>>> = None;
    let mut ample: Option<Deferred<Vec<String>>> = None;

    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let tokens = lex(line, line_no)?;
        let Some(first) = tokens.first() else {
            continue;
        };
        let key = match first.kind {
            Kind::Word if first.text.ends_with(':') => &first.text[..first.text.len() - 1],
            _ => {
                return Err(SpecError {
                    line: line_no,
                    column: first.column,
                    message: "expected `key:`".into(),
                })
            }
        };
        let mut rec = Record {
            line: line_no,
            end_column: line.chars().count() + 1,
            tokens: &tokens,
            pos: 1,
        };
        let key_error = |message: String| SpecError {
            line: line_no,
            column: first.column,
            message,
        };

        if key == "base" {
            if model.is_some() {
                return Err(key_error("second `base` record".into()));
            }
            model = Some(parse_base(&mut rec)?);
            continue;
        }
        let known = [
            "curve",
            "blowup",
            "report_basis",
            "assert",
            "divisor",
            "torus_curves",
            "ample_curves",
        ];
        if !known.contains(&key) {
            return Err(key_error(format!("unknown key `{key}`")));
        }
        let Some(current) = model.as_ref() else {
            return Err(key_error("the first record must be `base`".into()));
        };
        match key {
            "curve" => model = Some(parse_curve(&mut rec, current)?),
            "blowup" => model = Some(parse_blowup(&mut rec, current)?),
            "report_basis" => model = Some(parse_report_basis(&mut rec, current)?),
            "assert" => {
                let t = match rec.next() {
                    Some(t) if t.kind == Kind::Str => t,
                    _ => return Err(rec.error("expected a quoted string")),
                };
                rec.finish()?;
                model = Some(current.with_assertion(&t.text));
            }
            "divisor" => {
                let name = rec.label()?;
                if divisors.contains_key(&name.text) {
                    return Err(rec.error_at(name.column, format!("duplicate divisor label `{}`", name.text)));
                }
                rec.symbol('=')?;
                let terms = rec.terms()?;
                divisors.insert(
                    name.text.clone(),
                    Deferred {
                        line: line_no,
                        columns: terms.iter().map(|(t, _)| t.column).collect(),
                        value: terms.into_iter().map(|(t, c)| (t.text.clone(), c)).collect(),
                    },
                );
            }
            _ => {
                let slot = if key == "torus_curves" { &mut torus } else { &mut ample };
                if slot.is_some() {
                    return Err(key_error(format!("second `{key}` record")));
                }
                let labels = rec.labels()?;
                *slot = Some(Deferred {
                    line: line_no,
                    columns: labels.iter().map(|t| t.column).collect(),
                    value: labels.iter().map(|t| t.text.clone()).collect(),
                });
            }
        }
    }

    let model = model.ok_or(SpecError {
        line: 1,
        column: 1,
        message: "missing `base` record".into(),
    })?;
    let check = |line: usize, columns: &[usize], labels: &mut dyn Iterator<Item = &String>| {
        for (label, &column) in labels.zip(columns) {
            if !model.curves().contains_key(label) {
                return Err(SpecError {
                    line,
                    column,
                    message: format!("undeclared curve `{label}`"),
                });
            }
        }
        Ok(())
    };
    let mut named = IndexMap::new();
    for (name, d) in divisors {
        check(d.line, &d.columns, &mut d.value.iter().map(|(l, _)| l))?;
        let combination: Combination = d.value.into_iter().collect();
        model.class_of(&name, &combination).map_err(|e| SpecError {
            line: d.line,
            column: 1,
            message: e.to_string(),
        })?;
        named.insert(name, combination);
    }
    let resolve = |list: Option<Deferred<Vec<String>>>| -> Result<Option<Vec<String>>, SpecError> {
        match list {
            None => Ok(None),
            Some(d) => {
                check(d.line, &d.columns, &mut d.value.iter())?;
                Ok(Some(d.value))
            }
        }
    };
    let torus_curves = resolve(torus)?;
    let ample_curves = resolve(ample)?;
    Ok(SurfaceSpec {
        model,
        divisors: named,
        torus_curves,
        ample_curves,
    })
}

fn parse_base(rec: &mut Record<'_>) -> Result<SurfaceModel, SpecError> {
    rec.keyword("hirzebruch")?;
    let n_tok = rec.word("the Hirzebruch index")?;
    let n: u32 = n_tok
        .text
        .parse()
        .map_err(|_| rec.error_at(n_tok.column, format!("`{}` is not a nonnegative integer", n_tok.text)))?;
    let mut names = [
        ("section", format!("Z{n}")),
        ("fiber", "F".to_string()),
        ("negative", "Zneg".to_string()),
    ];
    let mut seen: Vec<&str> = Vec::new();
    while !rec.at_end() {
        let key = rec.word("`section=`, `fiber=` or `negative=`")?;
        let Some(slot) = names.iter_mut().find(|(k, _)| *k == key.text) else {
            return Err(rec.error_at(key.column, format!("unknown key `{}`", key.text)));
        };
        if seen.contains(&slot.0) {
            return Err(rec.error_at(key.column, format!("`{}` given twice", key.text)));
        }
        seen.push(slot.0);
        rec.symbol('=')?;
        slot.1 = rec.label()?.text.clone();
    }
    let column = n_tok.column;
    hirzebruch_with_labels(n, &names[0].1, &names[1].1, &names[2].1)
        .map_err(|e| rec.error_at(column, e.to_string()))
}

fn parse_curve(rec: &mut Record<'_>, model: &SurfaceModel) -> Result<SurfaceModel, SpecError> {
    let label = rec.label()?;
    if model.curves().contains_key(&label.text) {
        return Err(rec.error_at(label.column, format!("duplicate curve label `{}`", label.text)));
    }
    rec.symbol('=')?;
    let mut terms = Vec::new();
    for (t, c) in rec.terms()? {
        if !c.is_integer() {
            return Err(rec.error_at(t.column, format!("coefficient of `{}` must be an integer", t.text)));
        }
        if !model.curves().contains_key(&t.text) {
            return Err(rec.error_at(t.column, format!("undeclared curve `{}`", t.text)));
        }
        terms.push((t.text.clone(), c.to_integer()));
    }
    model
        .with_curve(&label.text, &terms)
        .map_err(|e| rec.error_at(label.column, e.to_string()))
}

fn parse_blowup(rec: &mut Record<'_>, model: &SurfaceModel) -> Result<SurfaceModel, SpecError> {
    let label = rec.label()?;
    if model.curves().contains_key(&label.text) {
        return Err(rec.error_at(label.column, format!("duplicate curve label `{}`", label.text)));
    }
    rec.keyword("through")?;
    let mut through: Vec<(String, u32)> = Vec::new();
    while !rec.at_end() {
        let t = rec.word("`label:multiplicity`")?;
        let (name, mult) = match t.text.split_once(':') {
            Some((name, m)) => {
                let m: u32 = m
                    .parse()
                    .ok()
                    .filter(|m| *m > 0)
                    .ok_or_else(|| rec.error_at(t.column, format!("bad multiplicity in `{}`", t.text)))?;
                (name, m)
            }
            None => (t.text.as_str(), 1),
        };
        if !is_label(name) {
            return Err(rec.error_at(t.column, format!("`{name}` is not a valid label")));
        }
        if !model.curves().contains_key(name) {
            return Err(rec.error_at(t.column, format!("undeclared curve `{name}`")));
        }
        if through.iter().any(|(l, _)| l == name) {
            return Err(rec.error_at(t.column, format!("curve `{name}` listed twice")));
        }
        through.push((name.to_string(), mult));
    }
    let spec = BlowUpSpec {
        through,
        new_label: label.text.clone(),
    };
    blow_up(model, &spec).map_err(|e| rec.error_at(label.column, e.to_string()))
}

fn parse_report_basis(rec: &mut Record<'_>, model: &SurfaceModel) -> Result<SurfaceModel, SpecError> {
    let column = rec.here();
    let labels = rec.labels()?;
    for t in &labels {
        if !model.curves().contains_key(&t.text) {
            return Err(rec.error_at(t.column, format!("undeclared curve `{}`", t.text)));
        }
    }
    let names: Vec<&str> = labels.iter().map(|t| t.text.as_str()).collect();
    model
        .with_report_basis(&names)
        .map_err(|e| rec.error_at(column, e.to_string()))
}

/// `p/q`, or `p` when `q = 1`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `2 A + 9/2 B - C`; `0` when empty.
pub fn format_terms<'a>(terms: impl IntoIterator<Item = (&'a str, Rational)>) -> String {
    let mut out = String::new();
    for (i, (label, c)) in terms.into_iter().enumerate() {
        let sign = match (i, c.is_negative()) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        };
        out.push_str(sign);
        let a = c.abs();
        if !a.is_one() {
            out.push_str(&format_rational(&a));
            out.push(' ');
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Canonical text of `spec`; `parse_surface_spec` inverts it.
pub fn print_surface_spec(spec: &SurfaceSpec) -> String {
    let mut out = String::new();
    for step in spec.model.steps() {
        let line = match step {
            Step::Base {
                n,
                section,
                fiber,
                negative_section,
            } => format!("base: hirzebruch {n} section={section} fiber={fiber} negative={negative_section}"),
            Step::Curve { label, terms } => format!(
                "curve: {label} = {}",
                format_terms(
                    terms
                        .iter()
                        .map(|(l, c)| (l.as_str(), Rational::from_integer(c.clone())))
                )
            ),
            Step::BlowUp(b) => {
                let mut s = format!("blowup: {} through", b.new_label);
                for (l, m) in &b.through {
                    s.push_str(&format!(" {l}:{m}"));
                }
                s
            }
            Step::ReportBasis(labels) => format!("report_basis: {}", labels.join(" ")),
            Step::Assert(text) => format!("assert: {}", quote(text)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    for (name, combination) in &spec.divisors {
        let terms = combination.iter().map(|(l, c)| (l.as_str(), c.clone()));
        out.push_str(&format!("divisor: {name} = {}\n", format_terms(terms)));
    }
    if let Some(list) = &spec.torus_curves {
        out.push_str(&format!("torus_curves: {}\n", list.join(" ")));
    }
    if let Some(list) = &spec.ample_curves {
        out.push_str(&format!("ample_curves: {}\n", list.join(" ")));
    }
    out
}
