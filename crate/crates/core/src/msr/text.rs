//! Line-oriented text format for specifications.
//!
//! ```text
//! preds init/0, fresh/1, p/2
//! init init
//! start: init -> fresh(x) | p(y, z) : x > 1, y = 0, z = 0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{AtomTemplate, Configuration, GroundAtom, Pred, Predicates, Rule, Spec};
use crate::nc::{Atom, Constraint, Rational, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Variable names of one rule or constrained configuration, numbered in
/// order of first occurrence.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl VarTable {
    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(v) = self.index.get(name) {
            return *v;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Splits `name(a, b)` or `name` into the name and its argument strings.
fn split_atom(s: &str) -> Result<(&str, Vec<&str>), String> {
    let s = s.trim();
    let (name, args) = match s.find('(') {
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| format!("missing `)` in `{s}`"))?;
            let args: Vec<&str> = if inner.trim().is_empty() {
                vec![]
            } else {
                inner.split(',').map(str::trim).collect()
            };
            (s[..i].trim(), args)
        }
        None => (s, vec![]),
    };
    if !is_ident(name) {
        return Err(format!("bad predicate name `{name}`"));
    }
    Ok((name, args))
}

fn atom_list(s: &str) -> Vec<&str> {
    let s = s.trim();
    if s.is_empty() || s == "empty" {
        return vec![];
    }
    s.split('|').map(str::trim).collect()
}

/// Parses `p(x, y) | q(z)` into templates. `pred` resolves a name and
/// arity to a predicate.
pub(crate) fn parse_templates(
    s: &str,
    pred: &mut dyn FnMut(&str, usize) -> Result<Pred, String>,
    vars: &mut VarTable,
) -> Result<Vec<AtomTemplate>, String> {
    let mut out = Vec::new();
    for part in atom_list(s) {
        let (name, args) = split_atom(part)?;
        let p = pred(name, args.len())?;
        let mut vs = Vec::with_capacity(args.len());
        for a in args {
            if !is_ident(a) {
                return Err(format!("expected a variable, found `{a}`"));
            }
            vs.push(vars.intern(a));
        }
        out.push(AtomTemplate::new(p, vs));
    }
    Ok(out)
}

fn parse_ground(s: &str, preds: &mut Predicates) -> Result<Configuration, String> {
    let mut atoms = Vec::new();
    for part in atom_list(s) {
        let (name, args) = split_atom(part)?;
        let p = preds.declare(name, args.len()).map_err(|e| e.to_string())?;
        let vals = args
            .iter()
            .map(|a| {
                a.parse::<Rational>()
                    .map_err(|_| format!("bad value `{a}`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        atoms.push(GroundAtom::new(p, vals));
    }
    Ok(Configuration::new(atoms))
}

fn parse_term(s: &str, vars: &mut VarTable) -> Result<Term, String> {
    let s = s.trim();
    if let Ok(c) = s.parse::<i64>() {
        return Ok(Term::Const(c));
    }
    if is_ident(s) {
        return Ok(Term::Var(vars.intern(s)));
    }
    Err(format!("bad term `{s}`"))
}

/// Parses `x = y, x > 3, 2 > z` (also `<`, `true`, `false`).
pub fn parse_constraint_with(s: &str, vars: &mut VarTable) -> Result<Constraint, String> {
    let s = s.trim();
    if s.is_empty() || s == "true" {
        return Ok(Constraint::top());
    }
    if s == "false" {
        return Ok(Constraint::bottom());
    }
    let mut atoms = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let (i, op) = part
            .char_indices()
            .find(|(_, c)| matches!(c, '=' | '>' | '<'))
            .ok_or_else(|| format!("expected `=`, `>` or `<` in `{part}`"))?;
        let lhs = parse_term(&part[..i], vars)?;
        let rhs = parse_term(&part[i + 1..], vars)?;
        atoms.push(match op {
            '=' => Atom::eq(lhs, rhs),
            '>' => Atom::gt(lhs, rhs),
            _ => Atom::gt(rhs, lhs),
        });
    }
    Ok(Constraint::new(atoms))
}

fn parse_rule(line: &str, preds: &mut Predicates) -> Result<Rule, String> {
    let (name, rest) = line
        .split_once(':')
        .ok_or("expected `name: head -> body : constraint`")?;
    let name = name.trim();
    if name.is_empty() {
        return Err("empty rule name".into());
    }
    let (head, rest) = rest.split_once("->").ok_or("expected `->`")?;
    let (body, constraint) = rest.split_once(':').unwrap_or((rest, ""));
    let mut vars = VarTable::default();
    let mut resolve = |n: &str, k: usize| preds.declare(n, k).map_err(|e| e.to_string());
    let head = parse_templates(head, &mut resolve, &mut vars)?;
    let body = parse_templates(body, &mut resolve, &mut vars)?;
    let constraint = parse_constraint_with(constraint, &mut vars)?;
    Rule::new(name, head, body, constraint, vars.into_names()).map_err(|e| e.to_string())
}

pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let mut spec = Spec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ParseError {
            line: i + 1,
            message,
        };
        if let Some(rest) = line.strip_prefix("preds ") {
            for decl in rest.split(',').map(str::trim).filter(|d| !d.is_empty()) {
                let (n, a) = decl
                    .split_once('/')
                    .ok_or_else(|| err(format!("expected name/arity, found `{decl}`")))?;
                let a: usize = a
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad arity in `{decl}`")))?;
                spec.predicates
                    .declare(n.trim(), a)
                    .map_err(|e| err(e.to_string()))?;
            }
        } else if let Some(rest) = line.strip_prefix("init ").filter(|r| !r.contains("->")) {
            let m = parse_ground(rest, &mut spec.predicates).map_err(err)?;
            spec.initial.push(m);
        } else {
            let r = parse_rule(line, &mut spec.predicates).map_err(err)?;
            spec.rules.push(r);
        }
    }
    Ok(spec)
}

pub(crate) fn print_spec(spec: &Spec) -> String {
    let mut out = String::new();
    if !spec.predicates.is_empty() {
        let decls: Vec<String> = spec
            .predicates
            .iter()
            .map(|(_, n, a)| format!("{n}/{a}"))
            .collect();
        let _ = writeln!(out, "preds {}", decls.join(", "));
    }
    for m in &spec.initial {
        let _ = writeln!(out, "init {}", m.display(&spec.predicates));
    }
    for r in &spec.rules {
        let _ = writeln!(out, "{}", r.display(&spec.predicates));
    }
    out
}
