//! Thread definition language: abstract syntax, parser, validator and
//! pretty printer.
//!
//! A program is a set of thread definitions. Each definition has a finite set
//! of control locations, an ordered list of name-valued locals, and rules of
//! five kinds: internal moves, fresh-name generation, thread creation, and
//! the two halves of a channel rendez-vous.

mod lexer;
mod parser;
mod print;
mod validate;

use std::fmt;

pub use parser::{parse_program, ParseError};
pub use print::pretty_print;
pub use validate::{validate, Diagnostic, Severity};

/// Source position (1-based). Ignored by equality so that parsed and
/// reprinted programs compare structurally.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Const(String),
    Bottom,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) | Expr::Const(v) => f.write_str(v),
            Expr::Bottom => f.write_str("bot"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardOp {
    Eq,
    Neq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardAtom {
    pub op: GuardOp,
    pub var: String,
    pub expr: Expr,
}

/// Conjunction of guard atoms; empty means `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Guard(pub Vec<GuardAtom>);

impl Guard {
    pub fn is_true(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(pub Vec<(String, Expr)>);

impl Assignment {
    pub fn source_for(&self, target: &str) -> Option<&Expr> {
        self.0.iter().find(|(t, _)| t == target).map(|(_, e)| e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    Internal {
        label: String,
        guard: Guard,
        assign: Assignment,
    },
    NameGen {
        label: String,
        target: String,
    },
    Create {
        label: String,
        thread: String,
        assign: Assignment,
    },
    Send {
        channel: Expr,
        template: Vec<String>,
        guard: Guard,
        assign: Assignment,
    },
    Receive {
        channel: Expr,
        template: Vec<String>,
        guard: Guard,
        assign: Assignment,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub from: String,
    pub to: String,
    pub body: RuleBody,
    pub span: Span,
}

impl Rule {
    pub fn label(&self) -> String {
        match &self.body {
            RuleBody::Internal { label, .. }
            | RuleBody::NameGen { label, .. }
            | RuleBody::Create { label, .. } => label.clone(),
            RuleBody::Send { channel, .. } => format!("{channel}!"),
            RuleBody::Receive { channel, .. } => format!("{channel}?"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadDef {
    pub name: String,
    pub locals: Vec<String>,
    pub initial: String,
    pub rules: Vec<Rule>,
    pub span: Span,
}

impl ThreadDef {
    /// Control locations in order of first appearance, initial first.
    pub fn locations(&self) -> Vec<String> {
        let mut out = vec![self.initial.clone()];
        for r in &self.rules {
            for l in [&r.from, &r.to] {
                if !out.contains(l) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    pub fn local_index(&self, name: &str) -> Option<usize> {
        self.locals.iter().position(|l| l == name)
    }

    /// `Thread.from->to#k`, where `k` numbers rules sharing the same
    /// endpoints.
    pub fn rule_name(&self, idx: usize) -> String {
        let r = &self.rules[idx];
        let k = self.rules[..idx]
            .iter()
            .filter(|o| o.from == r.from && o.to == r.to)
            .count();
        format!("{}.{}->{}#{}", self.name, r.from, r.to, k)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub constants: Vec<String>,
    pub threads: Vec<ThreadDef>,
    /// Initial pool: thread name and multiplicity; every local starts at ⊥.
    pub init: Vec<(String, usize)>,
}

impl Program {
    pub fn thread(&self, name: &str) -> Option<&ThreadDef> {
        self.threads.iter().find(|t| t.name == name)
    }

    pub fn thread_index(&self, name: &str) -> Option<usize> {
        self.threads.iter().position(|t| t.name == name)
    }

    /// 1-based index of a constant, which is also its name and its encoding.
    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name).map(|i| i + 1)
    }

    /// Every definition has at most one local and every template at most one
    /// variable.
    pub fn is_monadic(&self) -> bool {
        self.threads.iter().all(|t| {
            t.locals.len() <= 1
                && t.rules.iter().all(|r| match &r.body {
                    RuleBody::Send { template, .. } | RuleBody::Receive { template, .. } => {
                        template.len() <= 1
                    }
                    _ => true,
                })
        })
    }
}
