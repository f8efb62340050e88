use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {}: {}", self.span, sev, self.message)
    }
}

/// Location names that would collide with auxiliary predicates of the
/// compiled specification.
const RESERVED_LOCATIONS: &[&str] = &["init", "fresh", "zero"];

/// Checks the well-formedness conditions of a program. An empty result means
/// the program is valid.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut err = |span: Span, message: String| {
        out.push(Diagnostic {
            severity: Severity::Error,
            span,
            message,
        })
    };

    let mut seen_consts = BTreeSet::new();
    for c in &p.constants {
        if !seen_consts.insert(c) {
            err(Span::default(), format!("constant `{c}` declared twice"));
        }
    }

    let mut thread_names: BTreeMap<&str, Span> = BTreeMap::new();
    let mut local_owner: BTreeMap<&str, &str> = BTreeMap::new();
    let mut loc_owner: BTreeMap<String, &str> = BTreeMap::new();
    for t in &p.threads {
        if thread_names.insert(&t.name, t.span).is_some() {
            err(t.span, format!("thread `{}` defined twice", t.name));
        }
        let mut own = BTreeSet::new();
        for l in &t.locals {
            if !own.insert(l) {
                err(
                    t.span,
                    format!("duplicate local `{l}` in thread {}", t.name),
                );
            } else if let Some(other) = local_owner.insert(l, &t.name) {
                err(
                    t.span,
                    format!(
                        "local `{l}` of thread {} is also a local of thread {other}",
                        t.name
                    ),
                );
            }
            if seen_consts.contains(l) {
                err(
                    t.span,
                    format!("local `{l}` of thread {} shadows a constant", t.name),
                );
            }
        }
        for loc in t.locations() {
            if RESERVED_LOCATIONS.contains(&loc.as_str()) {
                err(
                    t.span,
                    format!("location name `{loc}` in thread {} is reserved", t.name),
                );
            }
            if let Some(other) = loc_owner.insert(loc.clone(), &t.name) {
                err(
                    t.span,
                    format!(
                        "location `{loc}` of thread {} is also a location of thread {other}",
                        t.name
                    ),
                );
            }
        }
        for (i, r) in t.rules.iter().enumerate() {
            let rn = t.rule_name(i);
            check_rule(p, t, r, &rn, &mut err);
        }
    }
    for (name, k) in &p.init {
        if p.thread(name).is_none() {
            err(
                Span::default(),
                format!("init refers to unknown thread `{name}`"),
            );
        }
        if *k == 0 {
            err(
                Span::default(),
                format!("init multiplicity of `{name}` must be at least 1"),
            );
        }
    }
    out
}

fn check_rule(p: &Program, t: &ThreadDef, r: &Rule, rn: &str, err: &mut impl FnMut(Span, String)) {
    let is_local = |v: &str| t.locals.iter().any(|l| l == v);
    let check_targets = |a: &Assignment,
                         allowed: &dyn Fn(&str) -> bool,
                         owner: &str,
                         err: &mut dyn FnMut(Span, String)| {
        let mut seen = BTreeSet::new();
        for (target, _) in &a.0 {
            if !seen.insert(target) {
                err(
                    r.span,
                    format!("duplicate assignment target `{target}` in rule {rn}"),
                );
            }
            if !allowed(target) {
                err(
                    r.span,
                    format!("assignment target `{target}` in rule {rn} is not a local of {owner}"),
                );
            }
        }
    };
    match &r.body {
        RuleBody::Internal { assign, .. } => check_targets(assign, &is_local, &t.name, err),
        RuleBody::NameGen { target, .. } => {
            if !is_local(target) {
                err(
                    r.span,
                    format!("name generation target `{target}` in rule {rn} is not a local"),
                );
            }
        }
        RuleBody::Create { thread, assign, .. } => match p.thread(thread) {
            Some(child) => {
                let child_local = |v: &str| child.locals.iter().any(|l| l == v);
                check_targets(assign, &child_local, &child.name, err);
            }
            None => err(
                r.span,
                format!("rule {rn} creates unknown thread `{thread}`"),
            ),
        },
        RuleBody::Send {
            template, assign, ..
        } => {
            check_distinct(template, r, rn, err);
            check_targets(assign, &is_local, &t.name, err);
        }
        RuleBody::Receive {
            template, assign, ..
        } => {
            check_distinct(template, r, rn, err);
            for v in template {
                if is_local(v) {
                    err(
                        r.span,
                        format!("template variable not fresh: `{v}` in rule {rn} is a local"),
                    );
                }
            }
            check_targets(assign, &is_local, &t.name, err);
        }
    }
}

fn check_distinct(template: &[String], r: &Rule, rn: &str, err: &mut impl FnMut(Span, String)) {
    let mut seen = BTreeSet::new();
    for v in template {
        if !seen.insert(v) {
            err(
                r.span,
                format!("template variable `{v}` repeated in rule {rn}"),
            );
        }
    }
}
