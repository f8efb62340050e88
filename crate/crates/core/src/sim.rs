//! Concrete interpreter: global configurations, enabled steps, and seeded or
//! scripted runs.
//!
//! Names are integers. `0` is ⊥, constant `c_i` is `i`, and fresh names are
//! allocated as one above the largest used name.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::nc::{Rational, Var};
use crate::pattern::UnsafePattern;
use crate::tdl::{Assignment, Expr, Guard, GuardOp, Program, RuleBody};

pub type Name = u64;
pub const BOTTOM: Name = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("step {0} is not enabled")]
    NotEnabled(String),
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Local {
    pub thread: usize,
    pub location: String,
    pub values: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalConfiguration {
    pub used: BTreeSet<Name>,
    /// Indexed by instance number; new threads are appended.
    pub locals: Vec<Local>,
}

impl GlobalConfiguration {
    pub fn sorted_locals(&self) -> Vec<Local> {
        let mut l = self.locals.clone();
        l.sort();
        l
    }

    /// Equality of the local multisets, ignoring instance order.
    pub fn same_locals(&self, other: &GlobalConfiguration) -> bool {
        self.sorted_locals() == other.sorted_locals()
    }

    pub fn max_used(&self) -> Name {
        self.used.iter().next_back().copied().unwrap_or(BOTTOM)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Internal,
    NameGen,
    Create,
    Rendezvous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RuleRef {
    pub thread: usize,
    pub rule: usize,
}

/// One transition. For a rendez-vous the actor is the sender and the
/// partner the receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub actor: usize,
    pub rule: RuleRef,
    pub partner: Option<(usize, RuleRef)>,
    pub fresh: Option<Name>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Run {
    pub configs: Vec<GlobalConfiguration>,
    pub steps: Vec<Step>,
    pub stopped: Option<String>,
}

impl Run {
    pub fn last(&self) -> &GlobalConfiguration {
        self.configs
            .last()
            .expect("a run has an initial configuration")
    }
}

pub struct Simulator<'p> {
    program: &'p Program,
}

impl<'p> Simulator<'p> {
    pub fn new(program: &'p Program) -> Self {
        Simulator { program }
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn initial_configuration(&self) -> GlobalConfiguration {
        let mut used: BTreeSet<Name> = [BOTTOM].into();
        used.extend(1..=self.program.constants.len() as Name);
        let mut locals = Vec::new();
        for (name, k) in &self.program.init {
            let t = self.program.thread_index(name).expect("validated init");
            let def = &self.program.threads[t];
            for _ in 0..*k {
                locals.push(Local {
                    thread: t,
                    location: def.initial.clone(),
                    values: vec![BOTTOM; def.locals.len()],
                });
            }
        }
        GlobalConfiguration { used, locals }
    }

    fn eval(&self, e: &Expr, local: &Local, template: &[(&str, Name)]) -> Name {
        match e {
            Expr::Bottom => BOTTOM,
            Expr::Const(c) => self.program.constant_index(c).expect("validated constant") as Name,
            Expr::Var(v) => {
                if let Some((_, n)) = template.iter().find(|(t, _)| t == v) {
                    return *n;
                }
                let def = &self.program.threads[local.thread];
                local.values[def.local_index(v).expect("validated variable")]
            }
        }
    }

    fn guard_holds(&self, g: &Guard, local: &Local, template: &[(&str, Name)]) -> bool {
        g.0.iter().all(|a| {
            let x = self.eval(&Expr::Var(a.var.clone()), local, template);
            let y = self.eval(&a.expr, local, template);
            match a.op {
                GuardOp::Eq => x == y,
                GuardOp::Neq => x != y,
            }
        })
    }

    fn assigned(&self, a: &Assignment, local: &Local, template: &[(&str, Name)]) -> Vec<Name> {
        let def = &self.program.threads[local.thread];
        def.locals
            .iter()
            .zip(&local.values)
            .map(|(l, old)| {
                a.source_for(l)
                    .map_or(*old, |e| self.eval(e, local, template))
            })
            .collect()
    }

    fn rule(&self, r: RuleRef) -> &'p crate::tdl::Rule {
        &self.program.threads[r.thread].rules[r.rule]
    }

    /// Every step enabled at `g`, ordered by actor, rule, partner and partner
    /// rule. Name generation uses the canonical fresh name.
    pub fn enabled_steps(&self, g: &GlobalConfiguration) -> Vec<Step> {
        let fresh = g.max_used() + 1;
        let mut out = Vec::new();
        for (i, p) in g.locals.iter().enumerate() {
            let def = &self.program.threads[p.thread];
            for (ri, r) in def.rules.iter().enumerate() {
                if r.from != p.location {
                    continue;
                }
                let rule = RuleRef {
                    thread: p.thread,
                    rule: ri,
                };
                let simple = |kind, fresh| Step {
                    kind,
                    actor: i,
                    rule,
                    partner: None,
                    fresh,
                };
                match &r.body {
                    RuleBody::Internal { guard, .. } => {
                        if self.guard_holds(guard, p, &[]) {
                            out.push(simple(StepKind::Internal, None));
                        }
                    }
                    RuleBody::NameGen { .. } => out.push(simple(StepKind::NameGen, Some(fresh))),
                    RuleBody::Create { .. } => out.push(simple(StepKind::Create, None)),
                    RuleBody::Send {
                        channel,
                        template,
                        guard,
                        ..
                    } => {
                        if !self.guard_holds(guard, p, &[]) {
                            continue;
                        }
                        let ch = self.eval(channel, p, &[]);
                        let msg: Vec<Name> = template
                            .iter()
                            .map(|v| self.eval(&Expr::Var(v.clone()), p, &[]))
                            .collect();
                        for (j, q) in g.locals.iter().enumerate() {
                            if j == i {
                                continue;
                            }
                            let qdef = &self.program.threads[q.thread];
                            for (rj, r2) in qdef.rules.iter().enumerate() {
                                if r2.from != q.location {
                                    continue;
                                }
                                let RuleBody::Receive {
                                    channel: ch2,
                                    template: t2,
                                    guard: g2,
                                    ..
                                } = &r2.body
                                else {
                                    continue;
                                };
                                if t2.len() != msg.len() {
                                    continue;
                                }
                                let bind: Vec<(&str, Name)> = t2
                                    .iter()
                                    .map(String::as_str)
                                    .zip(msg.iter().copied())
                                    .collect();
                                if self.eval(ch2, q, &bind) == ch && self.guard_holds(g2, q, &bind)
                                {
                                    out.push(Step {
                                        kind: StepKind::Rendezvous,
                                        actor: i,
                                        rule,
                                        partner: Some((
                                            j,
                                            RuleRef {
                                                thread: q.thread,
                                                rule: rj,
                                            },
                                        )),
                                        fresh: None,
                                    });
                                }
                            }
                        }
                    }
                    RuleBody::Receive { .. } => {}
                }
            }
        }
        out
    }

    /// Applies an enabled step. A name-generation step may carry any name
    /// outside `used`.
    pub fn apply_step(
        &self,
        g: &GlobalConfiguration,
        step: &Step,
    ) -> Result<GlobalConfiguration, SimError> {
        let enabled = self.enabled_steps(g).into_iter().any(|s| {
            Step {
                fresh: step.fresh,
                ..s
            } == *step
        });
        let fresh_ok = match (step.kind, step.fresh) {
            (StepKind::NameGen, Some(n)) => !g.used.contains(&n),
            (StepKind::NameGen, None) => false,
            (_, f) => f.is_none(),
        };
        if !enabled || !fresh_ok {
            return Err(SimError::NotEnabled(self.step_name(step)));
        }
        Ok(self.fire(g, step))
    }

    fn fire(&self, g: &GlobalConfiguration, step: &Step) -> GlobalConfiguration {
        let mut next = g.clone();
        let p = &g.locals[step.actor];
        let r = self.rule(step.rule);
        match &r.body {
            RuleBody::Internal { assign, .. } => {
                next.locals[step.actor].values = self.assigned(assign, p, &[]);
            }
            RuleBody::NameGen { target, .. } => {
                let n = step.fresh.expect("name generation carries a name");
                let k = self.program.threads[p.thread]
                    .local_index(target)
                    .expect("validated target");
                next.locals[step.actor].values[k] = n;
                next.used.insert(n);
            }
            RuleBody::Create { thread, assign, .. } => {
                let t = self.program.thread_index(thread).expect("validated thread");
                let child = &self.program.threads[t];
                let values = child
                    .locals
                    .iter()
                    .map(|l| {
                        assign
                            .source_for(l)
                            .map_or(BOTTOM, |e| self.eval(e, p, &[]))
                    })
                    .collect();
                next.locals.push(Local {
                    thread: t,
                    location: child.initial.clone(),
                    values,
                });
            }
            RuleBody::Send {
                template, assign, ..
            } => {
                let (j, rr) = step.partner.expect("rendez-vous has a partner");
                let q = &g.locals[j];
                let msg: Vec<Name> = template
                    .iter()
                    .map(|v| self.eval(&Expr::Var(v.clone()), p, &[]))
                    .collect();
                let RuleBody::Receive {
                    template: t2,
                    assign: a2,
                    ..
                } = &self.rule(rr).body
                else {
                    unreachable!("partner rule is a receive")
                };
                let bind: Vec<(&str, Name)> = t2.iter().map(String::as_str).zip(msg).collect();
                next.locals[step.actor].values = self.assigned(assign, p, &[]);
                next.locals[j].values = self.assigned(a2, q, &bind);
                next.locals[j].location = self.rule(rr).to.clone();
            }
            RuleBody::Receive { .. } => unreachable!("receives fire through their sender"),
        }
        next.locals[step.actor].location = r.to.clone();
        next
    }

    /// `Thread.from->to#k`, or `sender|receiver` for a rendez-vous.
    pub fn step_name(&self, step: &Step) -> String {
        let own = self.program.threads[step.rule.thread].rule_name(step.rule.rule);
        match step.partner {
            Some((_, rr)) => format!(
                "{own}|{}",
                self.program.threads[rr.thread].rule_name(rr.rule)
            ),
            None => own,
        }
    }

    fn step_label(&self, step: &Step) -> String {
        match step.partner {
            Some((j, _)) => format!("{} @ {}, {}", self.step_name(step), step.actor, j),
            None => format!("{} @ {}", self.step_name(step), step.actor),
        }
    }

    /// Uniformly random run of at most `steps` transitions.
    pub fn run_random(&self, g0: &GlobalConfiguration, steps: usize, seed: u64) -> Run {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut run = Run {
            configs: vec![g0.clone()],
            ..Run::default()
        };
        for _ in 0..steps {
            let enabled = self.enabled_steps(run.last());
            if enabled.is_empty() {
                run.stopped = Some("no enabled steps".into());
                break;
            }
            let s = enabled[rng.gen_range(0..enabled.len())].clone();
            let next = self.fire(run.last(), &s);
            run.steps.push(s);
            run.configs.push(next);
        }
        run
    }

    /// Runs a script of lines `rule @ actor [, partner]`. The rule may omit
    /// its `#k` suffixes, and a rendez-vous may be named by its send rule.
    pub fn run_script(&self, g0: &GlobalConfiguration, script: &str) -> Result<Run, SimError> {
        let mut run = Run {
            configs: vec![g0.clone()],
            ..Run::default()
        };
        for (ln, raw) in script.lines().enumerate() {
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SimError::Script {
                line: ln + 1,
                message,
            };
            let (name, who) = line
                .split_once('@')
                .ok_or_else(|| err("expected `rule @ index`".into()))?;
            let name = name.trim();
            let mut idx = who.split(',').map(|s| s.trim().parse::<usize>());
            let actor = idx
                .next()
                .and_then(Result::ok)
                .ok_or_else(|| err("bad instance index".into()))?;
            let partner = match idx.next() {
                Some(Ok(j)) => Some(j),
                Some(Err(_)) => return Err(err("bad partner index".into())),
                None => None,
            };
            let candidates: Vec<Step> = self
                .enabled_steps(run.last())
                .into_iter()
                .filter(|s| {
                    s.actor == actor && partner.is_none_or(|j| s.partner.map(|p| p.0) == Some(j))
                })
                .filter(|s| self.names_step(name, s))
                .collect();
            let s = match candidates.as_slice() {
                [] => return Err(err(format!("step `{line}` is not enabled"))),
                [s] => s.clone(),
                _ => {
                    return Err(err(format!(
                        "step `{line}` is ambiguous; give the partner index"
                    )))
                }
            };
            let next = self.fire(run.last(), &s);
            run.steps.push(s);
            run.configs.push(next);
        }
        Ok(run)
    }

    fn names_step(&self, name: &str, s: &Step) -> bool {
        let full = self.step_name(s);
        let send = self.program.threads[s.rule.thread].rule_name(s.rule.rule);
        [full.as_str(), send.as_str()]
            .iter()
            .any(|n| *n == name || strip_indices(n) == name)
    }

    /// A step leading from `g` to a configuration with the locals of
    /// `next` (as a multiset). Fresh names are taken from `next`.
    pub fn find_step(&self, g: &GlobalConfiguration, next: &GlobalConfiguration) -> Option<Step> {
        let target = next.sorted_locals();
        let new_names: Vec<Name> = next
            .locals
            .iter()
            .flat_map(|l| l.values.iter().copied())
            .filter(|n| !g.used.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for s in self.enabled_steps(g) {
            let options: Vec<Option<Name>> = if s.kind == StepKind::NameGen {
                new_names.iter().map(|n| Some(*n)).collect()
            } else {
                vec![None]
            };
            for f in options {
                let cand = Step {
                    fresh: f,
                    ..s.clone()
                };
                if self.fire(g, &cand).sorted_locals() == target {
                    return Some(cand);
                }
            }
        }
        None
    }

    /// Whether some pattern matches a sub-multiset of the locals of `g`.
    pub fn match_unsafe(&self, g: &GlobalConfiguration, patterns: &[UnsafePattern]) -> bool {
        patterns.iter().any(|p| {
            let mut used = vec![false; g.locals.len()];
            let mut bind = Vec::new();
            self.match_atoms(p, 0, g, &mut used, &mut bind)
        })
    }

    fn match_atoms(
        &self,
        p: &UnsafePattern,
        i: usize,
        g: &GlobalConfiguration,
        used: &mut [bool],
        bind: &mut Vec<(Var, Rational)>,
    ) -> bool {
        let Some(atom) = p.atoms.get(i) else {
            return p.constraint.satisfiable_with(bind);
        };
        for (j, l) in g.locals.iter().enumerate() {
            if used[j] || l.location != atom.location || l.values.len() != atom.vars.len() {
                continue;
            }
            let mark = bind.len();
            bind.extend(
                atom.vars
                    .iter()
                    .zip(&l.values)
                    .map(|(v, n)| (*v, Rational::from_integer(*n as i64))),
            );
            used[j] = true;
            if p.constraint.satisfiable_with(bind) && self.match_atoms(p, i + 1, g, used, bind) {
                return true;
            }
            used[j] = false;
            bind.truncate(mark);
        }
        false
    }

    fn show_name(&self, n: Name) -> String {
        match n {
            BOTTOM => "bot".into(),
            n if n as usize <= self.program.constants.len() => {
                self.program.constants[n as usize - 1].clone()
            }
            n => n.to_string(),
        }
    }

    /// `loc(v1, v2) | ...` in instance order; constants by name.
    pub fn show(&self, g: &GlobalConfiguration) -> String {
        if g.locals.is_empty() {
            return "empty".into();
        }
        let parts: Vec<String> = g
            .locals
            .iter()
            .map(|l| {
                if l.values.is_empty() {
                    l.location.clone()
                } else {
                    let vs: Vec<String> = l.values.iter().map(|n| self.show_name(*n)).collect();
                    format!("{}({})", l.location, vs.join(", "))
                }
            })
            .collect();
        parts.join(" | ")
    }

    /// One line per configuration: `step#: rule @ instance : G'`.
    pub fn trace_text(&self, run: &Run) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "0: initial : {}", self.show(&run.configs[0]));
        for (i, (s, g)) in run.steps.iter().zip(&run.configs[1..]).enumerate() {
            let _ = writeln!(out, "{}: {} : {}", i + 1, self.step_label(s), self.show(g));
        }
        if let Some(r) = &run.stopped {
            let _ = writeln!(out, "stopped: {r}");
        }
        out
    }

    pub fn trace_json(&self, run: &Run) -> serde_json::Value {
        let mut entries = vec![
            json!({ "step": 0, "rule": null, "configuration": self.config_json(&run.configs[0]) }),
        ];
        for (i, (s, g)) in run.steps.iter().zip(&run.configs[1..]).enumerate() {
            entries.push(json!({
                "step": i + 1,
                "rule": self.step_name(s),
                "actor": s.actor,
                "partner": s.partner.map(|p| p.0),
                "fresh": s.fresh,
                "configuration": self.config_json(g),
            }));
        }
        serde_json::Value::Array(entries)
    }

    fn config_json(&self, g: &GlobalConfiguration) -> serde_json::Value {
        let locals: Vec<_> = g
            .locals
            .iter()
            .map(|l| json!({ "thread": self.program.threads[l.thread].name, "location": l.location, "values": l.values }))
            .collect();
        json!({ "used": g.used, "locals": locals })
    }
}

fn strip_indices(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut chars = name.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '#' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
            while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                chars.next();
            }
        } else {
            out.push(c);
        }
    }
    out
}
