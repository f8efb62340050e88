//! Translation of programs into multiset rewriting specifications.
//!
//! Each control location becomes a predicate whose arguments are the
//! thread's locals. `⊥` is encoded as `0` and constant `c_i` as `i`. The
//! auxiliary atom `fresh(u)` holds a value above every name in use.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::msr::{AtomTemplate, Configuration, GroundAtom, Pred, Predicates, Rule, Spec};
use crate::nc::{Atom, Constraint, Rational, Term, Var};
use crate::sim::{GlobalConfiguration, Local, Name};
use crate::tdl::{
    validate, Assignment, Expr, Guard, GuardOp, Program, RuleBody, Severity, ThreadDef,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("invalid program:\n{0}")]
    Invalid(String),
    #[error("not monadic: {0}")]
    NotMonadic(String),
    #[error("constant {constant} in rule {rule} cannot be expressed without constants")]
    Constant { rule: String, constant: i64 },
    #[error("name mapping is not injective")]
    NonInjective,
    #[error("name mapping must send bot to 0 and each constant to its index")]
    ConstantImage,
    #[error("expected exactly one fresh atom, found {0}")]
    FreshCount(usize),
    #[error("predicate {0} is not a control location")]
    UnknownPredicate(String),
    #[error("value {0} has no name")]
    Unmapped(Rational),
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    /// Also pair send and receive rules of the same definition.
    pub self_sync: bool,
}

/// Correspondence between predicates and control locations.
#[derive(Clone, Debug)]
pub struct Layout {
    pub init: Pred,
    pub fresh: Pred,
    pub zero: Option<Pred>,
    /// Number of constants; the largest constant image.
    pub constants: usize,
    by_location: HashMap<String, Pred>,
    owners: BTreeMap<Pred, (usize, String)>,
}

impl Layout {
    pub fn pred(&self, location: &str) -> Option<Pred> {
        self.by_location.get(location).copied()
    }

    /// Thread index and location name of a location predicate.
    pub fn location(&self, p: Pred) -> Option<(usize, &str)> {
        self.owners.get(&p).map(|(t, l)| (*t, l.as_str()))
    }
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub spec: Spec,
    pub layout: Layout,
    pub warnings: Vec<String>,
}

fn expr_term(p: &Program, e: &Expr, var: impl Fn(&str) -> Var) -> Term {
    match e {
        Expr::Bottom => Term::Const(0),
        Expr::Const(c) => Term::Const(p.constant_index(c).expect("validated constant") as i64),
        Expr::Var(v) => Term::Var(var(v)),
    }
}

/// The guard as a set of constraints: each `≠` splits into `>` and `<`.
/// Unsatisfiable members are dropped.
pub fn translate_guard(g: &Guard, term: impl Fn(&Expr) -> Term) -> Vec<Constraint> {
    let mut out = vec![Constraint::top()];
    for a in &g.0 {
        let x = term(&Expr::Var(a.var.clone()));
        let e = term(&a.expr);
        let options = match a.op {
            GuardOp::Eq => vec![Atom::eq(x, e)],
            GuardOp::Neq => vec![Atom::gt(x, e), Atom::gt(e, x)],
        };
        out = out
            .iter()
            .flat_map(|c| options.iter().map(move |o| c.with_atoms([*o])))
            .collect();
    }
    out.retain(Constraint::is_satisfiable);
    out
}

/// `x_i' = ⟦α(x_i)⟧` for assigned locals and `x_i' = x_i` for the rest.
pub fn translate_assignment(
    a: &Assignment,
    locals: &[String],
    pre: &[Var],
    post: &[Var],
    term: impl Fn(&Expr) -> Term,
) -> Constraint {
    Constraint::new(
        locals
            .iter()
            .enumerate()
            .map(|(i, l)| match a.source_for(l) {
                Some(e) => Atom::eq(post[i], term(e)),
                None => Atom::eq(post[i], pre[i]),
            }),
    )
}

/// Per-rule variable names, kept unique.
#[derive(Clone, Default)]
struct Builder {
    names: Vec<String>,
    taken: HashSet<String>,
}

impl Builder {
    fn var(&mut self, base: &str) -> Var {
        let mut name = base.to_string();
        let mut k = 2;
        while self.taken.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.taken.insert(name.clone());
        self.names.push(name);
        Var(self.names.len() as u32 - 1)
    }

    fn frame(&mut self, t: &ThreadDef) -> (Vec<Var>, Vec<Var>) {
        let pre = t.locals.iter().map(|l| self.var(l)).collect();
        let post = t
            .locals
            .iter()
            .map(|l| self.var(&format!("{l}'")))
            .collect();
        (pre, post)
    }

    /// Renumbers the atom variables in order of appearance and drops the
    /// rest, which must no longer occur in the constraint.
    fn finish(
        self,
        name: String,
        head: Vec<AtomTemplate>,
        body: Vec<AtomTemplate>,
        c: Constraint,
    ) -> Rule {
        let mut map = BTreeMap::new();
        let mut names = Vec::new();
        for v in head.iter().chain(&body).flat_map(|a| &a.args) {
            map.entry(*v).or_insert_with(|| {
                names.push(self.names[v.0 as usize].clone());
                Var(names.len() as u32 - 1)
            });
        }
        let re =
            |a: &AtomTemplate| AtomTemplate::new(a.pred, a.args.iter().map(|v| map[v]).collect());
        let head = head.iter().map(re).collect();
        let body = body.iter().map(re).collect();
        let c = c
            .rename(&map)
            .expect("constraint only mentions atom variables");
        Rule::new(name, head, body, c, names).expect("compiled rules are well formed")
    }
}

struct Translator<'p> {
    p: &'p Program,
    layout: Layout,
    rules: Vec<Rule>,
    counters: HashMap<String, usize>,
}

impl<'p> Translator<'p> {
    fn name(&mut self, base: String) -> String {
        let k = self.counters.entry(base.clone()).or_insert(0);
        *k += 1;
        format!("{base}#{}", *k - 1)
    }

    fn loc(&self, l: &str) -> Pred {
        self.layout.pred(l).expect("every location has a predicate")
    }

    fn local_term(&self, t: &ThreadDef, pre: &[Var], tpl: &[(String, Var)], e: &Expr) -> Term {
        expr_term(self.p, e, |v| {
            tpl.iter()
                .find(|(n, _)| n == v)
                .map(|(_, x)| *x)
                .unwrap_or_else(|| pre[t.local_index(v).expect("validated variable")])
        })
    }

    fn init_rule(&mut self) {
        let mut b = Builder::default();
        let mut body = Vec::new();
        let mut atoms = Vec::new();
        for (name, k) in &self.p.init {
            let t = self.p.thread(name).expect("validated init");
            for _ in 0..*k {
                let vs: Vec<Var> = t.locals.iter().map(|l| b.var(l)).collect();
                atoms.extend(vs.iter().map(|v| Atom::eq(*v, 0)));
                body.push(AtomTemplate::new(self.loc(&t.initial), vs));
            }
        }
        let u = b.var("u");
        body.push(AtomTemplate::new(self.layout.fresh, vec![u]));
        atoms.push(Atom::gt(u, self.layout.constants as i64));
        let head = vec![AtomTemplate::new(self.layout.init, vec![])];
        self.rules
            .push(b.finish("init".into(), head, body, Constraint::new(atoms)));
    }

    fn thread_rules(&mut self, ti: usize, self_sync: bool) {
        let t = &self.p.threads[ti];
        for r in &t.rules {
            let base = format!("{}.{}->{}", t.name, r.from, r.to);
            let (s, s2) = (self.loc(&r.from), self.loc(&r.to));
            match &r.body {
                RuleBody::Internal { guard, assign, .. } => {
                    let mut b = Builder::default();
                    let (pre, post) = b.frame(t);
                    let alpha = translate_assignment(assign, &t.locals, &pre, &post, |e| {
                        self.local_term(t, &pre, &[], e)
                    });
                    for nu in translate_guard(guard, |e| self.local_term(t, &pre, &[], e)) {
                        let c = nu.conjoin(&alpha);
                        if c.is_satisfiable() {
                            let b2 = b.clone();
                            let name = self.name(base.clone());
                            let rule = b2.finish(
                                name,
                                vec![AtomTemplate::new(s, pre.clone())],
                                vec![AtomTemplate::new(s2, post.clone())],
                                c,
                            );
                            self.rules.push(rule);
                        }
                    }
                }
                RuleBody::NameGen { target, .. } => {
                    let mut b = Builder::default();
                    let (pre, post) = b.frame(t);
                    let u = b.var("u");
                    let u2 = b.var("u'");
                    let i = t.local_index(target).expect("validated target");
                    let mut atoms = vec![Atom::gt(u2, post[i]), Atom::gt(post[i], u)];
                    atoms.extend(
                        (0..pre.len())
                            .filter(|j| *j != i)
                            .map(|j| Atom::eq(post[j], pre[j])),
                    );
                    let name = self.name(base);
                    let fresh = self.layout.fresh;
                    self.rules.push(b.finish(
                        name,
                        vec![AtomTemplate::new(s, pre), AtomTemplate::new(fresh, vec![u])],
                        vec![
                            AtomTemplate::new(s2, post),
                            AtomTemplate::new(fresh, vec![u2]),
                        ],
                        Constraint::new(atoms),
                    ));
                }
                RuleBody::Create { thread, assign, .. } => {
                    let child = self.p.thread(thread).expect("validated thread");
                    let mut b = Builder::default();
                    let (pre, post) = b.frame(t);
                    let kids: Vec<Var> = child
                        .locals
                        .iter()
                        .map(|l| b.var(&format!("{l}'")))
                        .collect();
                    let mut atoms: Vec<Atom> = pre
                        .iter()
                        .zip(&post)
                        .map(|(x, y)| Atom::eq(*y, *x))
                        .collect();
                    for (w, k) in child.locals.iter().zip(&kids) {
                        let src = assign
                            .source_for(w)
                            .map_or(Term::Const(0), |e| self.local_term(t, &pre, &[], e));
                        atoms.push(Atom::eq(*k, src));
                    }
                    let name = self.name(base);
                    let ct = self.loc(&child.initial);
                    self.rules.push(b.finish(
                        name,
                        vec![AtomTemplate::new(s, pre)],
                        vec![AtomTemplate::new(s2, post), AtomTemplate::new(ct, kids)],
                        Constraint::new(atoms),
                    ));
                }
                RuleBody::Send { .. } => {
                    for (tj, other) in self.p.threads.iter().enumerate() {
                        if tj == ti && !self_sync {
                            continue;
                        }
                        for r2 in &other.rules {
                            self.rendezvous(t, r, other, r2);
                        }
                    }
                }
                RuleBody::Receive { .. } => {}
            }
        }
    }

    fn rendezvous(
        &mut self,
        t: &ThreadDef,
        r: &crate::tdl::Rule,
        t2: &ThreadDef,
        r2: &crate::tdl::Rule,
    ) {
        let RuleBody::Send {
            channel,
            template,
            guard,
            assign,
        } = &r.body
        else {
            return;
        };
        let RuleBody::Receive {
            channel: ch2,
            template: tpl2,
            guard: g2,
            assign: a2,
        } = &r2.body
        else {
            return;
        };
        if template.len() != tpl2.len() {
            return;
        }
        let mut b = Builder::default();
        let (pre, post) = b.frame(t);
        let (pre2, post2) = b.frame(t2);
        let tpl: Vec<(String, Var)> = tpl2
            .iter()
            .map(|w| (w.clone(), b.var(&format!("{w}~"))))
            .collect();
        let term1 = |e: &Expr| self.local_term(t, &pre, &[], e);
        let term2 = |e: &Expr| self.local_term(t2, &pre2, &tpl, e);
        let mut link = vec![Atom::eq(term1(channel), term2(ch2))];
        for (w, (_, w2)) in template.iter().zip(&tpl) {
            link.push(Atom::eq(term1(&Expr::Var(w.clone())), *w2));
        }
        let base_c = translate_assignment(assign, &t.locals, &pre, &post, term1)
            .conjoin(&translate_assignment(a2, &t2.locals, &pre2, &post2, term2))
            .with_atoms(link);
        let drop: Vec<Var> = tpl.iter().map(|(_, v)| *v).collect();
        let base = format!(
            "{}.{}->{}|{}.{}->{}",
            t.name, r.from, r.to, t2.name, r2.from, r2.to
        );
        let (s, s2, q, q2) = (
            self.loc(&r.from),
            self.loc(&r.to),
            self.loc(&r2.from),
            self.loc(&r2.to),
        );
        let (gs1, gs2) = (translate_guard(guard, term1), translate_guard(g2, term2));
        for nu in &gs1 {
            for nu2 in &gs2 {
                let c = base_c.conjoin(nu).conjoin(nu2).eliminate(&drop);
                if !c.is_satisfiable() {
                    continue;
                }
                let b2 = b.clone();
                let name = self.name(base.clone());
                let rule = b2.finish(
                    name,
                    vec![
                        AtomTemplate::new(s, pre.clone()),
                        AtomTemplate::new(q, pre2.clone()),
                    ],
                    vec![
                        AtomTemplate::new(s2, post.clone()),
                        AtomTemplate::new(q2, post2.clone()),
                    ],
                    c,
                );
                self.rules.push(rule);
            }
        }
    }
}

/// Builds the predicate table: `init`, `fresh`, then one predicate per
/// control location in thread order.
fn layout(p: &Program) -> (Predicates, Layout) {
    let mut preds = Predicates::default();
    let init = preds.declare("init", 0).expect("fresh table");
    let fresh = preds.declare("fresh", 1).expect("fresh table");
    let mut by_location = HashMap::new();
    let mut owners = BTreeMap::new();
    for (ti, t) in p.threads.iter().enumerate() {
        for l in t.locations() {
            let pr = preds
                .declare(&l, t.locals.len())
                .expect("locations are distinct");
            by_location.insert(l.clone(), pr);
            owners.insert(pr, (ti, l));
        }
    }
    (
        preds,
        Layout {
            init,
            fresh,
            zero: None,
            constants: p.constants.len(),
            by_location,
            owners,
        },
    )
}

/// Definitions that could synchronize with themselves: a send and a receive
/// of equal arity.
fn self_sync_candidates(p: &Program) -> Vec<&str> {
    p.threads
        .iter()
        .filter(|t| {
            let arities = |send: bool| -> BTreeSet<usize> {
                t.rules
                    .iter()
                    .filter_map(|r| match (&r.body, send) {
                        (RuleBody::Send { template, .. }, true)
                        | (RuleBody::Receive { template, .. }, false) => Some(template.len()),
                        _ => None,
                    })
                    .collect()
            };
            !arities(true).is_disjoint(&arities(false))
        })
        .map(|t| t.name.as_str())
        .collect()
}

pub fn translate_program(p: &Program, opts: &CompileOptions) -> Result<Compiled, CompileError> {
    let errors: Vec<String> = validate(p)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(CompileError::Invalid(errors.join("\n")));
    }
    let (predicates, layout) = layout(p);
    let mut tr = Translator {
        p,
        layout,
        rules: Vec::new(),
        counters: HashMap::new(),
    };
    tr.init_rule();
    for ti in 0..p.threads.len() {
        tr.thread_rules(ti, opts.self_sync);
    }
    let mut warnings = Vec::new();
    if !opts.self_sync {
        for name in self_sync_candidates(p) {
            warnings.push(format!(
                "thread {name} has a send and a receive of equal arity; rendez-vous between two {name} instances is not compiled (see --self-sync)"
            ));
        }
    }
    let init = Configuration::new(vec![GroundAtom::new(tr.layout.init, vec![])]);
    let spec = Spec {
        predicates,
        initial: vec![init],
        rules: tr.rules,
    };
    Ok(Compiled {
        spec,
        layout: tr.layout,
        warnings,
    })
}

/// `⟦G⟧(h)`: one atom per local with `h`-images and `fresh(v)` with `v` one
/// above the largest image of a used name.
pub fn encode_global(
    c: &Compiled,
    g: &GlobalConfiguration,
    h: impl Fn(Name) -> Rational,
) -> Result<Configuration, CompileError> {
    let mut seen = BTreeMap::new();
    for n in &g.used {
        if let Some(prev) = seen.insert(h(*n), *n) {
            if prev != *n {
                return Err(CompileError::NonInjective);
            }
        }
    }
    let consts_ok =
        (0..=c.layout.constants as Name).all(|i| h(i) == Rational::from_integer(i as i64));
    if !consts_ok {
        return Err(CompileError::ConstantImage);
    }
    let top = seen.keys().next_back().copied().unwrap_or_default();
    let mut atoms: Vec<GroundAtom> = g
        .locals
        .iter()
        .map(|l| {
            let p = c
                .layout
                .pred(&l.location)
                .expect("location of the compiled program");
            GroundAtom::new(p, l.values.iter().map(|n| h(*n)).collect())
        })
        .collect();
    atoms.push(GroundAtom::new(c.layout.fresh, vec![top + 1]));
    Ok(Configuration::new(atoms))
}

/// `⟦M⟧(f)`: drops the fresh atom and renames values through `f`. The used
/// set is `⊥`, the constants and the names occurring in the result.
pub fn decode_config(
    c: &Compiled,
    m: &Configuration,
    f: impl Fn(Rational) -> Option<Name>,
) -> Result<GlobalConfiguration, CompileError> {
    let fresh = m.count(c.layout.fresh);
    if fresh != 1 {
        return Err(CompileError::FreshCount(fresh));
    }
    let mut used: BTreeSet<Name> = (0..=c.layout.constants as Name).collect();
    let mut locals = Vec::new();
    for a in m.atoms() {
        if a.pred == c.layout.fresh || Some(a.pred) == c.layout.zero {
            continue;
        }
        let (thread, location) = c
            .layout
            .location(a.pred)
            .ok_or_else(|| CompileError::UnknownPredicate(c.spec.predicates.name(a.pred).into()))?;
        let values = a
            .args
            .iter()
            .map(|v| f(*v).ok_or(CompileError::Unmapped(*v)))
            .collect::<Result<Vec<_>, _>>()?;
        used.extend(values.iter().copied());
        locals.push(Local {
            thread,
            location: location.to_string(),
            values,
        });
    }
    Ok(GlobalConfiguration { used, locals })
}

/// Replaces the constant `0` by a variable bound to an auxiliary `zero`
/// atom, present on both sides of every rule that needs it, and the init
/// bound `u > C` by `u > z`. Requires a monadic program whose remaining
/// constants all disappear statically.
pub fn monadize(c: &Compiled) -> Result<Compiled, CompileError> {
    let wide: Vec<String> = c
        .spec
        .predicates
        .iter()
        .filter(|(p, _, a)| *a > 1 && *p != c.layout.init)
        .map(|(_, n, a)| format!("{n}/{a}"))
        .collect();
    if !wide.is_empty() {
        return Err(CompileError::NotMonadic(format!(
            "predicates with more than one argument: {}",
            wide.join(", ")
        )));
    }
    let mut out = c.clone();
    let zero = out
        .spec
        .predicates
        .declare("zero", 1)
        .map_err(|e| CompileError::NotMonadic(e.to_string()))?;
    out.layout.zero = Some(zero);
    let top = c.layout.constants as i64;
    for r in &mut out.spec.rules {
        let is_init = r.head.len() == 1 && r.head[0].pred == c.layout.init;
        let consts = r.constraint.constants();
        for k in &consts {
            if *k != 0 && !(is_init && *k == top) {
                return Err(CompileError::Constant {
                    rule: r.name.clone(),
                    constant: *k,
                });
            }
        }
        if consts.is_empty() {
            continue;
        }
        let z = Var(r.var_names.len() as u32);
        r.var_names.push(unique_name(&r.var_names, "z"));
        let to_z = |t: Term| match t {
            Term::Const(k) if k == 0 || (is_init && k == top) => Term::Var(z),
            other => other,
        };
        let mut atoms: Vec<Atom> = r
            .constraint
            .atoms()
            .iter()
            .map(|a| Atom {
                lhs: to_z(a.lhs),
                rel: a.rel,
                rhs: to_z(a.rhs),
            })
            .collect();
        if is_init {
            r.body.push(AtomTemplate::new(zero, vec![z]));
        } else {
            let z2 = Var(r.var_names.len() as u32);
            r.var_names.push(unique_name(&r.var_names, "z'"));
            r.head.push(AtomTemplate::new(zero, vec![z]));
            r.body.push(AtomTemplate::new(zero, vec![z2]));
            atoms.push(Atom::eq(z2, z));
        }
        r.constraint = Constraint::new(atoms);
    }
    Ok(out)
}

fn unique_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    let mut k = 2;
    while taken.contains(&name) {
        name = format!("{base}_{k}");
        k += 1;
    }
    name
}
