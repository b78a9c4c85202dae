//! The line-oriented algebra document.
//!
//! ```text
//! document      := line*
//! line          := blank | comment | header | entry
//! comment       := '#' <anything>
//! header        := '[' section ']'
//! section       := 'basis' | 'bracket' | 'delta' N | 'gauge' P | 'theta' P | 'meta'
//! basis-entry   := name int
//! bracket-entry := name name '->' terms
//! map-entry     := name '->' terms                  (delta and gauge sections)
//! theta-entry   := terms                            (at most one per section)
//! meta-entry    := key '=' value
//! terms         := '0' | term (term)*
//! term          := name ':' rational
//! rational      := ['-'|'+'] digits ['/' digits]
//! name          := [A-Za-z_][A-Za-z0-9_']*
//! ```
//!
//! Tokens are separated by spaces or tabs. `N` counts from 0 and `P` from 1;
//! the indices of each kind of section must be consecutive. Orders are read
//! off from how many sections there are. An empty map section is the zero
//! map.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::derived::DeformationFamily;
use crate::error::{Error, Result};
use crate::gauge::{mc_to_deformation, GaugeFamily, McElement};
use crate::graded::{Element, GradedBasis, Scalar};
use crate::leibniz::MultiOp;

/// A linear combination written as `name:coeff` pairs.
pub type Terms = Vec<(String, Scalar)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub result: Terms,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapEntry {
    pub source: String,
    pub result: Terms,
}

/// A parsed and validated document. Comments and blank lines are not kept.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraDocument {
    pub basis: Vec<(String, i64)>,
    pub bracket: Vec<BracketEntry>,
    /// `deltas[k]` is `δ_k`.
    pub deltas: Vec<Vec<MapEntry>>,
    /// `gauges[k]` is `ξ_{k+1}`.
    pub gauges: Vec<Vec<MapEntry>>,
    /// `thetas[k]` is `θ_{k+1}`.
    pub thetas: Vec<Terms>,
    pub metadata: BTreeMap<String, String>,
}

/// A problem at a specific line of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.field, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Basis,
    Bracket,
    Delta(usize),
    Gauge(usize),
    Theta(usize),
    Meta,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Basis => write!(f, "basis"),
            Section::Bracket => write!(f, "bracket"),
            Section::Delta(k) => write!(f, "delta {k}"),
            Section::Gauge(k) => write!(f, "gauge {k}"),
            Section::Theta(k) => write!(f, "theta {k}"),
            Section::Meta => write!(f, "meta"),
        }
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Parser {
    errors: Vec<ParseError>,
    doc: AlgebraDocument,
    names: BTreeMap<String, i64>,
    deltas: BTreeMap<usize, (usize, Vec<MapEntry>)>,
    gauges: BTreeMap<usize, (usize, Vec<MapEntry>)>,
    thetas: BTreeMap<usize, (usize, Option<Terms>)>,
    seen: BTreeMap<Section, usize>,
    bracket_keys: BTreeMap<(String, String), usize>,
}

impl Parser {
    fn err(&mut self, line: usize, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ParseError {
            line,
            field: field.into(),
            message: message.into(),
        });
    }

    fn header(&mut self, line: usize, inner: &str) -> Option<Section> {
        let parts: Vec<&str> = inner.split_whitespace().collect();
        let index = |s: Option<&&str>| s.and_then(|s| s.parse::<usize>().ok());
        let section = match parts.as_slice() {
            ["basis"] => Some(Section::Basis),
            ["bracket"] => Some(Section::Bracket),
            ["meta"] => Some(Section::Meta),
            ["delta", _] => index(parts.get(1)).map(Section::Delta),
            ["gauge", _] => index(parts.get(1)).filter(|&k| k >= 1).map(Section::Gauge),
            ["theta", _] => index(parts.get(1)).filter(|&k| k >= 1).map(Section::Theta),
            _ => None,
        };
        let Some(section) = section else {
            self.err(line, "section", format!("unknown section header [{inner}]"));
            return None;
        };
        if let Some(first) = self.seen.insert(section, line) {
            self.err(
                line,
                "section",
                format!("section [{section}] already opened at line {first}"),
            );
            return None;
        }
        if section != Section::Basis && !self.seen.contains_key(&Section::Basis) {
            self.err(line, "section", "[basis] must come first");
        }
        match section {
            Section::Delta(k) => {
                self.deltas.insert(k, (line, Vec::new()));
            }
            Section::Gauge(k) => {
                self.gauges.insert(k, (line, Vec::new()));
            }
            Section::Theta(k) => {
                self.thetas.insert(k, (line, None));
            }
            _ => {}
        }
        Some(section)
    }

    fn name(&mut self, line: usize, field: &str, token: &str) -> Option<(String, i64)> {
        match self.names.get(token) {
            Some(&d) => Some((token.to_string(), d)),
            None => {
                self.err(line, field, format!("unknown basis name `{token}`"));
                None
            }
        }
    }

    /// Parses `name:q ...` and checks that every name has `degree` (when
    /// given). Repeated names are summed.
    fn terms(
        &mut self,
        line: usize,
        field: &str,
        tokens: &[&str],
        degree: Option<i64>,
    ) -> Option<Terms> {
        if tokens.is_empty() {
            self.err(line, field, "missing terms (write 0 for zero)");
            return None;
        }
        if tokens == ["0"] {
            return Some(Vec::new());
        }
        let mut ok = true;
        let mut acc: BTreeMap<usize, (String, Scalar)> = BTreeMap::new();
        let mut order = Vec::new();
        for tok in tokens {
            let Some((n, q)) = tok.split_once(':') else {
                self.err(
                    line,
                    field,
                    format!("term `{tok}` is not of the form name:coefficient"),
                );
                ok = false;
                continue;
            };
            let Some((name, d)) = self.name(line, field, n) else {
                ok = false;
                continue;
            };
            let coeff = match q.parse::<Scalar>() {
                Ok(c) => c,
                Err(e) => {
                    self.err(line, field, format!("coefficient `{q}`: {e}"));
                    ok = false;
                    continue;
                }
            };
            if let Some(want) = degree {
                if d != want {
                    self.err(
                        line,
                        field,
                        format!("`{name}` has degree {d} but this image must have degree {want}"),
                    );
                    ok = false;
                    continue;
                }
            }
            let idx = self
                .doc
                .basis
                .iter()
                .position(|(b, _)| *b == name)
                .expect("resolved name");
            match acc.get_mut(&idx) {
                Some((_, c)) => *c += coeff,
                None => {
                    order.push(idx);
                    acc.insert(idx, (name, coeff));
                }
            }
        }
        if !ok {
            return None;
        }
        Some(
            order
                .into_iter()
                .filter_map(|i| acc.remove(&i))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        )
    }

    fn entry(&mut self, line: usize, section: Section, text: &str) {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match section {
            Section::Basis => {
                let [name, deg] = tokens.as_slice() else {
                    self.err(line, "basis", "expected `name degree`");
                    return;
                };
                if !valid_name(name) {
                    self.err(line, "basis", format!("`{name}` is not a valid name"));
                    return;
                }
                let Ok(d) = deg.parse::<i64>() else {
                    self.err(line, "basis", format!("degree `{deg}` is not an integer"));
                    return;
                };
                if self.names.insert(name.to_string(), d).is_some() {
                    self.err(line, "basis", format!("duplicate basis name `{name}`"));
                    return;
                }
                self.doc.basis.push((name.to_string(), d));
            }
            Section::Bracket => {
                if tokens.len() < 3 || tokens[2] != "->" {
                    self.err(line, "bracket", "expected `left right -> terms`");
                    return;
                }
                let (Some((l, dl)), Some((r, dr))) = (
                    self.name(line, "bracket", tokens[0]),
                    self.name(line, "bracket", tokens[1]),
                ) else {
                    return;
                };
                if let Some(first) = self.bracket_keys.insert((l.clone(), r.clone()), line) {
                    self.err(
                        line,
                        "bracket",
                        format!("bracket of `{l}` and `{r}` already given at line {first}"),
                    );
                    return;
                }
                let field = format!("bracket {l} {r}");
                if let Some(result) = self.terms(line, &field, &tokens[3..], Some(dl + dr)) {
                    self.doc.bracket.push(BracketEntry {
                        left: l,
                        right: r,
                        result,
                    });
                }
            }
            Section::Delta(k) | Section::Gauge(k) => {
                let (label, shift) = match section {
                    Section::Delta(_) => ("delta", 1),
                    _ => ("gauge", 0),
                };
                if tokens.len() < 2 || tokens[1] != "->" {
                    self.err(line, label, "expected `source -> terms`");
                    return;
                }
                let Some((src, d)) = self.name(line, label, tokens[0]) else {
                    return;
                };
                let field = format!("{label} {k} {src}");
                let table = match section {
                    Section::Delta(_) => &self.deltas,
                    _ => &self.gauges,
                };
                if table[&k].1.iter().any(|e| e.source == src) {
                    self.err(line, &field, "source given twice in this section");
                    return;
                }
                if let Some(result) = self.terms(line, &field, &tokens[2..], Some(d + shift)) {
                    let table = match section {
                        Section::Delta(_) => &mut self.deltas,
                        _ => &mut self.gauges,
                    };
                    table.get_mut(&k).expect("opened").1.push(MapEntry {
                        source: src,
                        result,
                    });
                }
            }
            Section::Theta(k) => {
                let field = format!("theta {k}");
                if self.thetas[&k].1.is_some() {
                    self.err(line, &field, "a theta section holds a single line of terms");
                    return;
                }
                if let Some(t) = self.terms(line, &field, &tokens, Some(1)) {
                    self.thetas.get_mut(&k).expect("opened").1 = Some(t);
                }
            }
            Section::Meta => {
                let Some((k, v)) = text.split_once('=') else {
                    self.err(line, "meta", "expected `key = value`");
                    return;
                };
                let key = k.trim();
                if !valid_name(key) {
                    self.err(line, "meta", format!("`{key}` is not a valid key"));
                    return;
                }
                if self
                    .doc
                    .metadata
                    .insert(key.to_string(), v.trim().to_string())
                    .is_some()
                {
                    self.err(line, "meta", format!("duplicate key `{key}`"));
                }
            }
        }
    }

    fn consecutive<T>(&mut self, label: &str, start: usize, map: &BTreeMap<usize, (usize, T)>) {
        for (expected, (&k, &(line, _))) in (start..).zip(map.iter()) {
            if k != expected {
                self.err(
                    line,
                    label,
                    format!("section [{label} {k}] found but [{label} {expected}] is missing"),
                );
                return;
            }
        }
    }
}

/// Parses and validates a document; all problems found are reported.
pub fn parse_document(text: &str) -> std::result::Result<AlgebraDocument, Vec<ParseError>> {
    let mut p = Parser {
        errors: Vec::new(),
        doc: AlgebraDocument::default(),
        names: BTreeMap::new(),
        deltas: BTreeMap::new(),
        gauges: BTreeMap::new(),
        thetas: BTreeMap::new(),
        seen: BTreeMap::new(),
        bracket_keys: BTreeMap::new(),
    };
    let mut current: Option<Section> = None;
    let mut skipping = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(inner) = t.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                p.err(line, "section", "unterminated section header");
                skipping = true;
                continue;
            };
            current = p.header(line, inner.trim());
            skipping = current.is_none();
            continue;
        }
        match current {
            Some(s) => p.entry(line, s, t),
            None if skipping => {}
            None => p.err(line, "section", "entry outside of any section"),
        }
    }
    if !p.seen.contains_key(&Section::Basis) {
        p.err(0, "basis", "missing [basis] section");
    } else if p.doc.basis.is_empty() {
        p.err(p.seen[&Section::Basis], "basis", "the basis is empty");
    }
    let deltas = std::mem::take(&mut p.deltas);
    let gauges = std::mem::take(&mut p.gauges);
    let thetas = std::mem::take(&mut p.thetas);
    p.consecutive("delta", 0, &deltas);
    p.consecutive("gauge", 1, &gauges);
    p.consecutive("theta", 1, &thetas);
    if !thetas.is_empty() && deltas.len() > 1 {
        let line = deltas.get(&1).map(|(l, _)| *l).unwrap_or(0);
        p.err(
            line,
            "delta",
            "with theta sections only [delta 0] may be given; higher deltas come from theta",
        );
    }
    p.doc.deltas = deltas.into_values().map(|(_, v)| v).collect();
    p.doc.gauges = gauges.into_values().map(|(_, v)| v).collect();
    p.doc.thetas = thetas
        .into_values()
        .map(|(_, v)| v.unwrap_or_default())
        .collect();
    if p.errors.is_empty() {
        Ok(p.doc)
    } else {
        p.errors.sort_by_key(|e| e.line);
        Err(p.errors)
    }
}

fn render_terms(t: &Terms) -> String {
    if t.is_empty() {
        "0".into()
    } else {
        t.iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Canonical text form; parsing it gives back an equal document.
pub fn serialize_document(doc: &AlgebraDocument) -> String {
    let mut out = String::new();
    out.push_str("[basis]\n");
    for (n, d) in &doc.basis {
        out.push_str(&format!("{n} {d}\n"));
    }
    out.push_str("\n[bracket]\n");
    for e in &doc.bracket {
        out.push_str(&format!(
            "{} {} -> {}\n",
            e.left,
            e.right,
            render_terms(&e.result)
        ));
    }
    let maps = |out: &mut String, label: &str, start: usize, list: &[Vec<MapEntry>]| {
        for (k, entries) in list.iter().enumerate() {
            out.push_str(&format!("\n[{label} {}]\n", k + start));
            for e in entries {
                out.push_str(&format!("{} -> {}\n", e.source, render_terms(&e.result)));
            }
        }
    };
    maps(&mut out, "delta", 0, &doc.deltas);
    maps(&mut out, "gauge", 1, &doc.gauges);
    for (k, t) in doc.thetas.iter().enumerate() {
        out.push_str(&format!("\n[theta {}]\n{}\n", k + 1, render_terms(t)));
    }
    if !doc.metadata.is_empty() {
        out.push_str("\n[meta]\n");
        for (k, v) in &doc.metadata {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    out
}

/// The engine objects described by a document.
#[derive(Debug, Clone)]
pub struct AlgebraModel {
    pub basis: Arc<GradedBasis>,
    pub bracket: MultiOp,
    /// `δ_0, δ_1, ...` as written; with theta sections only `δ_0`.
    pub deltas: Vec<MultiOp>,
    pub gauge: Option<GaugeFamily>,
    pub theta: Option<McElement>,
    pub metadata: BTreeMap<String, String>,
}

impl AlgebraModel {
    /// The deformation family: the written deltas, or `(δ_0, ad θ_1, ...)`
    /// when theta sections are present (failing with the first order at
    /// which the Maurer-Cartan equation breaks).
    pub fn family(&self) -> Result<DeformationFamily> {
        match &self.theta {
            Some(theta) => mc_to_deformation(&self.bracket, &self.deltas[0], theta),
            None => DeformationFamily::new(self.deltas.clone()),
        }
    }

    /// Basis indices named by the space-separated `key` in the metadata.
    pub fn named_subset(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(v) = self.metadata.get(key) else {
            return Ok(None);
        };
        v.split_whitespace()
            .map(|n| {
                self.basis
                    .position(n)
                    .ok_or_else(|| Error::Malformed(format!("meta {key}: unknown name `{n}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// The `perturb = k source target coeff` entry: `δ_k(source) += coeff target`.
    pub fn perturbation(&self) -> Result<Option<(usize, usize, usize, Scalar)>> {
        let Some(v) = self.metadata.get("perturb") else {
            return Ok(None);
        };
        let parts: Vec<&str> = v.split_whitespace().collect();
        let bad = || {
            Error::Malformed(format!(
                "meta perturb: expected `k source target coeff`, got `{v}`"
            ))
        };
        let [k, s, t, c] = parts.as_slice() else {
            return Err(bad());
        };
        let k = k.parse::<usize>().map_err(|_| bad())?;
        let s = self.basis.position(s).ok_or_else(bad)?;
        let t = self.basis.position(t).ok_or_else(bad)?;
        let c = c.parse::<Scalar>().map_err(|_| bad())?;
        Ok(Some((k, s, t, c)))
    }

    /// The family with the recorded perturbation applied.
    pub fn perturbed_family(&self) -> Result<Option<DeformationFamily>> {
        let Some((k, s, t, c)) = self.perturbation()? else {
            return Ok(None);
        };
        let fam = self.family()?;
        let bump = MultiOp::new(self.basis.clone(), 1, 1, [(vec![s], Element::term(t, c))])?;
        Ok(Some(fam.with_delta(k, fam.delta(k).add(&bump)?)?))
    }
}

fn op_from_entries<'a>(
    basis: &Arc<GradedBasis>,
    arity: usize,
    degree: i64,
    entries: impl IntoIterator<Item = (Vec<&'a str>, &'a Terms)>,
) -> Result<MultiOp> {
    let pos = |n: &str| {
        basis
            .position(n)
            .ok_or_else(|| Error::Malformed(format!("unknown name `{n}`")))
    };
    let constants = entries
        .into_iter()
        .map(|(src, terms)| {
            let tuple = src.into_iter().map(pos).collect::<Result<Vec<_>>>()?;
            let image = terms
                .iter()
                .map(|(n, c)| Ok((pos(n)?, c.clone())))
                .collect::<Result<Vec<_>>>()?;
            Ok((tuple, Element::from_terms(image)))
        })
        .collect::<Result<Vec<_>>>()?;
    MultiOp::new(basis.clone(), arity, degree, constants)
}

impl AlgebraDocument {
    pub fn model(&self) -> Result<AlgebraModel> {
        let basis = Arc::new(GradedBasis::new(
            self.basis.iter().map(|(n, d)| (n.clone(), *d)),
        )?);
        let bracket = op_from_entries(
            &basis,
            2,
            0,
            self.bracket
                .iter()
                .map(|e| (vec![e.left.as_str(), e.right.as_str()], &e.result)),
        )?;
        let map = |entries: &[MapEntry], degree| {
            op_from_entries(
                &basis,
                1,
                degree,
                entries.iter().map(|e| (vec![e.source.as_str()], &e.result)),
            )
        };
        let mut deltas = self
            .deltas
            .iter()
            .map(|d| map(d, 1))
            .collect::<Result<Vec<_>>>()?;
        if deltas.is_empty() {
            deltas.push(MultiOp::zero(basis.clone(), 1, 1));
        }
        let gauge = if self.gauges.is_empty() {
            None
        } else {
            let xis = self
                .gauges
                .iter()
                .map(|g| map(g, 0))
                .collect::<Result<Vec<_>>>()?;
            Some(GaugeFamily::new(basis.clone(), xis)?)
        };
        let theta = if self.thetas.is_empty() {
            None
        } else {
            let pos = |n: &str| {
                basis
                    .position(n)
                    .ok_or_else(|| Error::Malformed(format!("unknown name `{n}`")))
            };
            let thetas = self
                .thetas
                .iter()
                .map(|t| {
                    Ok(Element::from_terms(
                        t.iter()
                            .map(|(n, c)| Ok((pos(n)?, c.clone())))
                            .collect::<Result<Vec<_>>>()?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(McElement::new(&basis, thetas)?)
        };
        Ok(AlgebraModel {
            basis,
            bracket,
            deltas,
            gauge,
            theta,
            metadata: self.metadata.clone(),
        })
    }

    /// Replaces the deformation by `fam` (dropping theta sections) and the
    /// gauge by nothing; used to emit a gauge-transformed document.
    pub fn with_family(&self, fam: &DeformationFamily) -> AlgebraDocument {
        let basis = fam.basis();
        let to_entries = |op: &MultiOp| {
            op.constants()
                .map(|(t, e)| MapEntry {
                    source: basis.name(t[0]).to_string(),
                    result: e
                        .terms()
                        .map(|(i, c)| (basis.name(i).to_string(), c.clone()))
                        .collect(),
                })
                .collect()
        };
        AlgebraDocument {
            deltas: fam.deltas().iter().map(to_entries).collect(),
            gauges: Vec::new(),
            thetas: Vec::new(),
            ..self.clone()
        }
    }
}
