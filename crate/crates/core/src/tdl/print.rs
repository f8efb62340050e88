use std::fmt::Write;

use super::*;

/// Renders a program in the concrete syntax accepted by [`parse_program`].
///
/// [`parse_program`]: super::parse_program
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    if !p.constants.is_empty() {
        writeln!(out, "const {};", p.constants.join(", ")).unwrap();
    }
    for t in &p.threads {
        if !out.is_empty() {
            out.push('\n');
        }
        writeln!(out, "thread {}({}) {{", t.name, t.locals.join(", ")).unwrap();
        if t.rules.first().map(|r| &r.from) != Some(&t.initial) {
            writeln!(out, "  initial {};", t.initial).unwrap();
        }
        for r in &t.rules {
            writeln!(out, "  {};", rule_text(r)).unwrap();
        }
        out.push_str("}\n");
    }
    if !p.init.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        let entries: Vec<String> = p
            .init
            .iter()
            .map(|(name, k)| {
                let arity = p.thread(name).map_or(0, |t| t.locals.len());
                let mut s = name.clone();
                if arity > 0 {
                    s.push('(');
                    s.push_str(&vec!["bot"; arity].join(", "));
                    s.push(')');
                }
                if *k != 1 {
                    write!(s, " * {k}").unwrap();
                }
                s
            })
            .collect();
        writeln!(out, "init {{ {} }}", entries.join(", ")).unwrap();
    }
    out
}

fn rule_text(r: &Rule) -> String {
    let (label, body) = match &r.body {
        RuleBody::Internal {
            label,
            guard,
            assign,
        } => (label.clone(), plain(guard, assign)),
        RuleBody::NameGen { label, target } => (label.clone(), format!("{target} := new")),
        RuleBody::Create {
            label,
            thread,
            assign,
        } => {
            let body = if assign.0.is_empty() {
                format!("run {thread}")
            } else {
                format!("run {thread} with {}", assignments(assign))
            };
            (label.clone(), body)
        }
        RuleBody::Send {
            channel,
            template,
            guard,
            assign,
        } => (
            format!("send {channel}!({})", template.join(", ")),
            plain(guard, assign),
        ),
        RuleBody::Receive {
            channel,
            template,
            guard,
            assign,
        } => (
            format!("recv {channel}?({})", template.join(", ")),
            plain(guard, assign),
        ),
    };
    format!("{} -{}-> {} [{}]", r.from, label, r.to, body)
}

fn plain(g: &Guard, a: &Assignment) -> String {
    match (g.is_true(), a.0.is_empty()) {
        (true, true) => "true".into(),
        (true, false) => assignments(a),
        (false, true) => guard(g),
        (false, false) => format!("{} / {}", guard(g), assignments(a)),
    }
}

fn guard(g: &Guard) -> String {
    let parts: Vec<String> =
        g.0.iter()
            .map(|a| {
                let op = match a.op {
                    GuardOp::Eq => "=",
                    GuardOp::Neq => "!=",
                };
                format!("{} {} {}", a.var, op, a.expr)
            })
            .collect();
    parts.join(", ")
}

fn assignments(a: &Assignment) -> String {
    let parts: Vec<String> = a.0.iter().map(|(t, e)| format!("{t} := {e}")).collect();
    parts.join(", ")
}
