//! Serializers for derivations, model graphs and Kripke models, and the
//! benchmark corpus format.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::countermodel::ModelGraph;
use crate::error::ParseError;
use crate::formula::FormulaSet;
use crate::parse::{parse_input, parse_plain};
use crate::print::{print_set, print_with, LATEX};
use crate::prover::DerivationNode;
use crate::semantics::KripkeModel;
use crate::sequent::{Branching, ExtendedFormula, RuleId, Sequent, Status};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
    Latex,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "latex" => Ok(Format::Latex),
            _ => Err(format!("unknown format `{s}` (text, json, dot, latex)")),
        }
    }
}

pub fn emit_derivation(node: &DerivationNode, format: Format) -> String {
    match format {
        Format::Text => derivation_text(node),
        Format::Json => serde_json::to_string_pretty(&DerivationJson::from(node))
            .expect("derivation serializes"),
        Format::Dot => derivation_dot(node),
        Format::Latex => derivation_latex(node),
    }
}

pub fn emit_model(m: &KripkeModel, format: Format) -> String {
    match format {
        Format::Text => model_text(m),
        Format::Json => m.to_json(),
        Format::Dot => model_dot(m),
        Format::Latex => model_latex(m),
    }
}

// ---------------------------------------------------------------------------
// Text

fn vars_text(node: &DerivationNode) -> String {
    let fam = |f: &BTreeSet<FormulaSet>| {
        let members: Vec<String> = f.iter().map(|m| format!("{{{}}}", print_set(m))).collect();
        format!("{{{}}}", members.join(", "))
    };
    let v = &node.vars_out;
    if v.is_empty() {
        String::new()
    } else {
        format!("  S={} P={}", fam(&v.s), fam(&v.p))
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Derivable => "derivable",
        Status::Open => "open",
    }
}

/// One line per node, premises indented under their conclusion. Failed
/// alternatives from a trace are marked with `?`.
pub fn derivation_text(node: &DerivationNode) -> String {
    let mut out = String::new();
    write_text(node, 0, "", &mut out);
    out
}

fn write_text(node: &DerivationNode, depth: usize, mark: &str, out: &mut String) {
    let _ = writeln!(
        out,
        "{}{mark}{} [{}] {}{}",
        "  ".repeat(depth),
        node.rule,
        status_text(node.status),
        node.sequent,
        vars_text(node)
    );
    for a in &node.alternatives {
        write_text(a, depth + 1, "? ", out);
    }
    for p in &node.premises {
        write_text(p, depth + 1, "", out);
    }
}

pub fn model_text(m: &KripkeModel) -> String {
    let mut out = String::new();
    for &w in m.worlds() {
        let atoms: Vec<&str> = m
            .true_atoms(w)
            .expect("own world")
            .iter()
            .map(String::as_str)
            .collect();
        let _ = writeln!(out, "w{w}: {{{}}}", atoms.join(", "));
    }
    for &(a, b) in m.edges().iter().filter(|(a, b)| a != b) {
        let _ = writeln!(out, "w{a} <= w{b}");
    }
    out
}

pub fn graph_text(g: &ModelGraph) -> String {
    let mut out = String::new();
    for n in &g.nodes {
        let root = if g.roots.get(&n.sort) == Some(&n.id) {
            " root"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "n{} (sort {}{root}): {} |- {}",
            n.id,
            n.sort,
            print_set(&n.lhs),
            print_set(&n.rhs)
        );
    }
    for (a, b) in &g.edges {
        let _ = writeln!(out, "n{a} -> n{b}");
    }
    out
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentJson {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

/// The JSON shape of a derivation node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationJson {
    pub rule: String,
    pub branching: Branching,
    pub sequent: SequentJson,
    pub svar: Vec<Vec<String>>,
    pub pvar: Vec<Vec<String>>,
    pub status: Status,
    pub premises: Vec<DerivationJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<DerivationJson>,
}

fn family_json(f: &BTreeSet<FormulaSet>) -> Vec<Vec<String>> {
    f.iter()
        .map(|m| m.iter().map(|x| x.to_string()).collect())
        .collect()
}

impl From<&DerivationNode> for DerivationJson {
    fn from(n: &DerivationNode) -> DerivationJson {
        let side = |s: &BTreeSet<ExtendedFormula>| s.iter().map(|x| x.to_string()).collect();
        DerivationJson {
            rule: n.rule.name().to_string(),
            branching: n.branching,
            sequent: SequentJson {
                lhs: side(&n.sequent.lhs),
                rhs: side(&n.sequent.rhs),
            },
            svar: family_json(&n.vars_out.s),
            pvar: family_json(&n.vars_out.p),
            status: n.status,
            premises: n.premises.iter().map(DerivationJson::from).collect(),
            alternatives: n.alternatives.iter().map(DerivationJson::from).collect(),
        }
    }
}

impl DerivationJson {
    /// Checks the parts of the schema serde cannot: rule names, branching
    /// per rule, premise counts and formula syntax.
    pub fn validate(&self) -> Result<(), String> {
        let rule =
            RuleId::from_name(&self.rule).ok_or_else(|| format!("unknown rule `{}`", self.rule))?;
        if rule.branching() != self.branching {
            return Err(format!("{} is not {:?}", self.rule, self.branching));
        }
        let leaf = self.premises.is_empty();
        if (self.branching == Branching::Leaf) != leaf {
            return Err(format!(
                "{} has {} premises",
                self.rule,
                self.premises.len()
            ));
        }
        for s in self.sequent.lhs.iter().chain(&self.sequent.rhs) {
            // Variable wrappers print as `\/{..}` or `/\{..}`.
            if !(s.starts_with("\\/{") || s.starts_with("/\\{")) {
                parse_plain(s).map_err(|e| format!("`{s}`: {e}"))?;
            }
        }
        for s in self.svar.iter().chain(&self.pvar).flatten() {
            parse_plain(s).map_err(|e| format!("`{s}`: {e}"))?;
        }
        self.premises
            .iter()
            .chain(&self.alternatives)
            .try_for_each(DerivationJson::validate)
    }
}

/// Parses and validates a derivation emitted as JSON.
pub fn validate_derivation_json(text: &str) -> Result<DerivationJson, String> {
    let d: DerivationJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    d.validate()?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// DOT

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn derivation_dot(node: &DerivationNode) -> String {
    let mut out = String::from(
        "digraph derivation {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n",
    );
    let mut next = 0;
    write_dot(node, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn write_dot(node: &DerivationNode, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let style = if node.status.is_derivable() {
        "solid"
    } else {
        "dashed"
    };
    let _ = writeln!(
        out,
        "  d{id} [label=\"{}\\n{}{}\", style={style}];",
        node.rule,
        dot_escape(&node.sequent.to_string()),
        dot_escape(&vars_text(node))
    );
    for p in &node.premises {
        let child = write_dot(p, next, out);
        let edge = if node.branching == Branching::Existential {
            " [style=dashed]"
        } else {
            ""
        };
        let _ = writeln!(out, "  d{child} -> d{id}{edge};");
    }
    id
}

/// Worlds labelled with their true atoms; reflexive edges are left out.
pub fn model_dot(m: &KripkeModel) -> String {
    let mut out = String::from("digraph model {\n  node [shape=circle];\n");
    for &w in m.worlds() {
        let atoms: Vec<&str> = m
            .true_atoms(w)
            .expect("own world")
            .iter()
            .map(String::as_str)
            .collect();
        let _ = writeln!(
            out,
            "  w{w} [label=\"w{w}\\n{}\"];",
            dot_escape(&atoms.join(", "))
        );
    }
    for &(a, b) in m.edges().iter().filter(|(a, b)| a != b) {
        let _ = writeln!(out, "  w{a} -> w{b};");
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// LaTeX

fn latex_extended(f: &ExtendedFormula) -> String {
    let fam = |fam: &BTreeSet<FormulaSet>| {
        let members: Vec<String> = fam
            .iter()
            .map(|m| {
                let xs: Vec<String> = m.iter().map(|x| print_with(x, &LATEX)).collect();
                format!("\\{{{}\\}}", xs.join(", "))
            })
            .collect();
        format!("\\{{{}\\}}", members.join(", "))
    };
    match f {
        ExtendedFormula::Plain(x) => print_with(x, &LATEX),
        ExtendedFormula::BigOr(s) => format!("\\bigvee{}", fam(s)),
        ExtendedFormula::BigAnd(p) => format!("\\bigwedge{}", fam(p)),
    }
}

fn latex_sequent(s: &Sequent) -> String {
    let side = |xs: &BTreeSet<ExtendedFormula>| {
        xs.iter().map(latex_extended).collect::<Vec<_>>().join(", ")
    };
    format!("${} \\vdash {}$", side(&s.lhs), side(&s.rhs))
}

/// A bussproofs tree. Existential rules get a dashed inference line.
/// bussproofs takes at most five premises; beyond that the rest are elided.
pub fn derivation_latex(node: &DerivationNode) -> String {
    let mut out = String::from("\\begin{prooftree}\n");
    write_latex(node, &mut out);
    out.push_str("\\end{prooftree}\n");
    out
}

fn write_latex(node: &DerivationNode, out: &mut String) {
    const INF: [&str; 5] = [
        "UnaryInfC",
        "BinaryInfC",
        "TrinaryInfC",
        "QuaternaryInfC",
        "QuinaryInfC",
    ];
    let shown = node.premises.len().min(INF.len());
    if node.premises.is_empty() {
        out.push_str("\\AxiomC{}\n");
    } else {
        let elided = node.premises.len() > INF.len();
        let keep = if elided { shown - 1 } else { shown };
        for p in &node.premises[..keep] {
            write_latex(p, out);
        }
        if elided {
            out.push_str("\\AxiomC{$\\cdots$}\n");
        }
    }
    if node.branching == Branching::Existential {
        out.push_str("\\dashedLine\n");
    }
    let _ = writeln!(out, "\\RightLabel{{\\scriptsize {}}}", node.rule);
    let _ = writeln!(
        out,
        "\\{}{{{}}}",
        INF[shown.max(1) - 1],
        latex_sequent(&node.sequent)
    );
}

pub fn model_latex(m: &KripkeModel) -> String {
    let mut out = String::from("\\begin{tikzpicture}[->]\n");
    for (i, &w) in m.worlds().iter().enumerate() {
        let atoms: Vec<&str> = m
            .true_atoms(w)
            .expect("own world")
            .iter()
            .map(String::as_str)
            .collect();
        let _ = writeln!(
            out,
            "  \\node[draw, circle] (w{w}) at ({}, 0) {{$w_{{{w}}}: {}$}};",
            2 * i,
            atoms.join(", ")
        );
    }
    for &(a, b) in m.edges().iter().filter(|(a, b)| a != b) {
        let _ = writeln!(out, "  \\draw (w{a}) to[bend left] (w{b});");
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

// ---------------------------------------------------------------------------
// Corpus

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusItem {
    pub line: usize,
    pub expect_valid: bool,
    pub text: String,
    pub sequent: Sequent,
}

/// Parses a corpus of `VALID: ...` and `INVALID: ...` lines. Blank lines
/// and lines starting with `#` are skipped. Each entry is a formula or a
/// sequent.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusItem>, ParseError> {
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (expect_valid, rest) = if let Some(r) = trimmed.strip_prefix("VALID:") {
            (true, r)
        } else if let Some(r) = trimmed.strip_prefix("INVALID:") {
            (false, r)
        } else {
            return Err(ParseError {
                line,
                column: 1,
                message: "expected a `VALID:` or `INVALID:` prefix".into(),
            });
        };
        let text = rest.trim().to_string();
        let sequent = parse_input(&text).map_err(|e| ParseError { line, ..e })?;
        items.push(CorpusItem {
            line,
            expect_valid,
            text,
            sequent,
        });
    }
    Ok(items)
}
