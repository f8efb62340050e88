use std::fmt;

use thiserror::Error;

use super::lexer::{tokenize, Tok};
use super::*;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(span: Span, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

const RESERVED: &[&str] = &[
    "const", "thread", "init", "initial", "send", "recv", "new", "run", "with", "true", "bot",
];

/// Parses a `.tdl` source text.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = tokenize(src)?;
    let constants = prescan_constants(&toks);
    let mut p = Parser {
        toks,
        pos: 0,
        constants,
        init_seen: false,
        init_arity: Vec::new(),
    };
    let mut program = Program {
        constants: p.constants.clone(),
        ..Program::default()
    };
    loop {
        let (tok, span) = p.peek_full();
        match tok {
            Tok::Eof => break,
            Tok::Ident(k) if k == "const" => p.skip_const()?,
            Tok::Ident(k) if k == "thread" => {
                let t = p.thread()?;
                program.threads.push(t);
            }
            Tok::Ident(k) if k == "init" => {
                if p.init_seen {
                    return Err(ParseError::at(span, "duplicate init block"));
                }
                p.init_seen = true;
                program.init = p.init_block()?;
            }
            other => {
                return Err(ParseError::at(
                    span,
                    format!(
                        "expected `const`, `thread` or `init`, found {}",
                        other.describe()
                    ),
                ))
            }
        }
    }
    for (name, n, span) in &p.init_arity {
        if let Some(t) = program.thread(name) {
            if t.locals.len() != *n {
                return Err(ParseError::at(
                    *span,
                    format!(
                        "thread {name} has {} locals but the init entry lists {n} values",
                        t.locals.len()
                    ),
                ));
            }
        }
    }
    Ok(program)
}

fn prescan_constants(toks: &[(Tok, Span)]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if toks[i].0 == Tok::Ident("const".into()) {
            i += 1;
            while let Some((Tok::Ident(name), _)) = toks.get(i) {
                out.push(name.clone());
                i += 1;
                if toks.get(i).map(|t| &t.0) == Some(&Tok::Comma) {
                    i += 1;
                } else {
                    break;
                }
            }
        }
        i += 1;
    }
    out
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    constants: Vec<String>,
    init_seen: bool,
    init_arity: Vec<(String, usize, Span)>,
}

/// Names visible inside one rule.
struct Scope<'a> {
    thread: &'a str,
    locals: &'a [String],
    template: &'a [String],
    rule: String,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn peek_full(&self) -> (Tok, Span) {
        self.toks[self.pos].clone()
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        let (tok, span) = self.bump();
        if tok == want {
            Ok(span)
        } else {
            Err(ParseError::at(
                span,
                format!("expected {}, found {}", want.describe(), tok.describe()),
            ))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, t: Tok) -> bool {
        if *self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => Ok((s, span)),
            Tok::Ident(s) => Err(ParseError::at(
                span,
                format!("expected {what}, found keyword `{s}`"),
            )),
            other => Err(ParseError::at(
                span,
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn ident_list(&mut self, what: &str, close: Tok) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close.clone()) {
            return Ok(out);
        }
        loop {
            out.push(self.ident(what)?.0);
            if self.eat(Tok::Comma) {
                continue;
            }
            self.expect(close)?;
            return Ok(out);
        }
    }

    fn skip_const(&mut self) -> Result<(), ParseError> {
        self.bump();
        loop {
            self.ident("constant name")?;
            if !self.eat(Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn thread(&mut self) -> Result<ThreadDef, ParseError> {
        let span = self.bump().1;
        let (name, _) = self.ident("thread name")?;
        self.expect(Tok::LParen)?;
        let locals = self.ident_list("local variable", Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut initial = None;
        let mut rules = Vec::new();
        while !self.eat(Tok::RBrace) {
            if self.is_kw("initial") {
                let s = self.bump().1;
                if initial.is_some() {
                    return Err(ParseError::at(
                        s,
                        format!("thread {name} declares its initial location twice"),
                    ));
                }
                initial = Some(self.ident("location")?.0);
                self.expect(Tok::Semi)?;
                continue;
            }
            rules.push(self.rule(&name, &locals)?);
        }
        let initial = match initial.or_else(|| rules.first().map(|r: &Rule| r.from.clone())) {
            Some(i) => i,
            None => {
                return Err(ParseError::at(
                    span,
                    format!("thread {name} has no rules and no initial location"),
                ))
            }
        };
        Ok(ThreadDef {
            name,
            locals,
            initial,
            rules,
            span,
        })
    }

    fn rule(&mut self, thread: &str, locals: &[String]) -> Result<Rule, ParseError> {
        let (from, span) = self.ident("location")?;
        self.expect(Tok::Dash)?;
        enum Head {
            Label(String),
            Comm {
                send: bool,
                chan: (String, Span),
                template: Vec<String>,
            },
        }
        let send_kw = self.is_kw("send");
        let head = if (send_kw || self.is_kw("recv")) && *self.peek_at(1) != Tok::Arrow {
            self.bump();
            let chan = self.ident("channel")?;
            self.expect(if send_kw { Tok::Bang } else { Tok::Question })?;
            self.expect(Tok::LParen)?;
            let template = self.ident_list("template variable", Tok::RParen)?;
            Head::Comm {
                send: send_kw,
                chan,
                template,
            }
        } else {
            let (tok, s) = self.bump();
            match tok {
                Tok::Ident(l) => Head::Label(l),
                other => {
                    return Err(ParseError::at(
                        s,
                        format!("expected action label, found {}", other.describe()),
                    ))
                }
            }
        };
        self.expect(Tok::Arrow)?;
        let (to, _) = self.ident("location")?;
        let scope_template = match &head {
            Head::Comm {
                send: false,
                template,
                ..
            } => template.clone(),
            _ => Vec::new(),
        };
        let scope = Scope {
            thread,
            locals,
            template: &scope_template,
            rule: format!("{from} -> {to}"),
        };
        let body = match head {
            Head::Label(label) => {
                let parts = self.bracketed(&scope, true)?;
                match parts {
                    Body::Fresh(target) => RuleBody::NameGen { label, target },
                    Body::Run(thread, assign) => RuleBody::Create {
                        label,
                        thread,
                        assign,
                    },
                    Body::Plain(guard, assign) => RuleBody::Internal {
                        label,
                        guard,
                        assign,
                    },
                }
            }
            Head::Comm {
                send,
                chan,
                template,
            } => {
                let channel = scope.resolve(&chan.0, chan.1, &self.constants)?;
                if channel == Expr::Bottom {
                    return Err(ParseError::at(
                        chan.1,
                        format!("channel of rule {} cannot be bot", scope.rule),
                    ));
                }
                if send {
                    for v in &template {
                        if !locals.contains(v) {
                            return Err(unknown(v, chan.1, &scope));
                        }
                    }
                }
                let Body::Plain(guard, assign) = self.bracketed(&scope, false)? else {
                    unreachable!()
                };
                if send {
                    RuleBody::Send {
                        channel,
                        template,
                        guard,
                        assign,
                    }
                } else {
                    RuleBody::Receive {
                        channel,
                        template,
                        guard,
                        assign,
                    }
                }
            }
        };
        self.expect(Tok::Semi)?;
        Ok(Rule {
            from,
            to,
            body,
            span,
        })
    }

    fn bracketed(&mut self, scope: &Scope, allow_special: bool) -> Result<Body, ParseError> {
        if !self.eat(Tok::LBracket) {
            return Ok(Body::Plain(Guard::default(), Assignment::default()));
        }
        let body = self.body(scope, allow_special)?;
        self.expect(Tok::RBracket)?;
        Ok(body)
    }

    fn body(&mut self, scope: &Scope, allow_special: bool) -> Result<Body, ParseError> {
        if *self.peek() == Tok::RBracket {
            return Ok(Body::Plain(Guard::default(), Assignment::default()));
        }
        if self.is_kw("run") {
            let s = self.bump().1;
            if !allow_special {
                return Err(ParseError::at(
                    s,
                    "thread creation is not allowed on a channel rule",
                ));
            }
            let (thread, _) = self.ident("thread name")?;
            let assign = if self.is_kw("with") {
                self.bump();
                self.assignments(scope)?
            } else {
                Assignment::default()
            };
            return Ok(Body::Run(thread, assign));
        }
        if matches!(self.peek(), Tok::Ident(_))
            && *self.peek_at(1) == Tok::Assign
            && matches!(self.peek_at(2), Tok::Ident(s) if s == "new")
        {
            let (target, s) = self.bump();
            let Tok::Ident(target) = target else {
                unreachable!()
            };
            self.bump();
            self.bump();
            if !allow_special {
                return Err(ParseError::at(
                    s,
                    "name generation is not allowed on a channel rule",
                ));
            }
            return Ok(Body::Fresh(target));
        }
        let guard = if *self.peek_at(1) == Tok::Assign {
            Guard::default()
        } else {
            self.guard(scope)?
        };
        let bare = guard.is_true() && *self.peek_at(1) == Tok::Assign;
        let assign = if bare || self.eat(Tok::Slash) {
            self.assignments(scope)?
        } else {
            Assignment::default()
        };
        Ok(Body::Plain(guard, assign))
    }

    fn guard(&mut self, scope: &Scope) -> Result<Guard, ParseError> {
        let mut atoms = Vec::new();
        loop {
            if self.is_kw("true") {
                self.bump();
            } else {
                let (var, s) = self.ident("guard variable")?;
                match scope.resolve(&var, s, &self.constants)? {
                    Expr::Var(_) => {}
                    _ => {
                        return Err(ParseError::at(
                            s,
                            format!(
                                "left side of a guard in rule {} must be a variable, found `{var}`",
                                scope.rule
                            ),
                        ))
                    }
                }
                let (op_tok, os) = self.bump();
                let op = match op_tok {
                    Tok::Eq => GuardOp::Eq,
                    Tok::Neq => GuardOp::Neq,
                    other => {
                        return Err(ParseError::at(
                            os,
                            format!("expected `=` or `!=`, found {}", other.describe()),
                        ))
                    }
                };
                let expr = self.expr(scope)?;
                atoms.push(GuardAtom { op, var, expr });
            }
            if !self.eat(Tok::Comma) {
                return Ok(Guard(atoms));
            }
        }
    }

    fn assignments(&mut self, scope: &Scope) -> Result<Assignment, ParseError> {
        let mut out = Vec::new();
        loop {
            let (target, _) = self.ident("assignment target")?;
            self.expect(Tok::Assign)?;
            if self.is_kw("new") {
                return Err(ParseError::at(
                    self.span(),
                    "`new` must be the only assignment of a rule",
                ));
            }
            out.push((target, self.expr(scope)?));
            if !self.eat(Tok::Comma) {
                return Ok(Assignment(out));
            }
        }
    }

    fn expr(&mut self, scope: &Scope) -> Result<Expr, ParseError> {
        let (tok, s) = self.bump();
        match tok {
            Tok::Ident(name) => scope.resolve(&name, s, &self.constants),
            other => Err(ParseError::at(
                s,
                format!("expected expression, found {}", other.describe()),
            )),
        }
    }

    fn init_block(&mut self) -> Result<Vec<(String, usize)>, ParseError> {
        self.bump();
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.eat(Tok::RBrace) {
            return Ok(out);
        }
        loop {
            let (name, span) = self.ident("thread name")?;
            if self.eat(Tok::LParen) {
                let mut n = 0;
                if !self.eat(Tok::RParen) {
                    loop {
                        let (tok, s) = self.bump();
                        if tok != Tok::Ident("bot".into()) {
                            return Err(ParseError::at(
                                s,
                                format!("initial locals must be bot, found {}", tok.describe()),
                            ));
                        }
                        n += 1;
                        if !self.eat(Tok::Comma) {
                            self.expect(Tok::RParen)?;
                            break;
                        }
                    }
                }
                self.init_arity.push((name.clone(), n, span));
            }
            let mult = if self.eat(Tok::Star) {
                match self.bump() {
                    (Tok::Int(k), _) => k as usize,
                    (other, s) => {
                        return Err(ParseError::at(
                            s,
                            format!("expected multiplicity, found {}", other.describe()),
                        ))
                    }
                }
            } else {
                1
            };
            out.push((name, mult));
            if self.eat(Tok::Comma) {
                continue;
            }
            self.expect(Tok::RBrace)?;
            return Ok(out);
        }
    }
}

enum Body {
    Fresh(String),
    Run(String, Assignment),
    Plain(Guard, Assignment),
}

fn unknown(name: &str, span: Span, scope: &Scope) -> ParseError {
    ParseError::at(
        span,
        format!(
            "unknown identifier `{name}` in rule {} of thread {}",
            scope.rule, scope.thread
        ),
    )
}

impl Scope<'_> {
    fn resolve(&self, name: &str, span: Span, constants: &[String]) -> Result<Expr, ParseError> {
        if name == "bot" {
            return Ok(Expr::Bottom);
        }
        if self.locals.iter().any(|l| l == name) || self.template.iter().any(|l| l == name) {
            return Ok(Expr::Var(name.to_string()));
        }
        if constants.iter().any(|c| c == name) {
            return Ok(Expr::Const(name.to_string()));
        }
        Err(unknown(name, span, self))
    }
}
