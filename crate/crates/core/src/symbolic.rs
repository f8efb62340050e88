//! Constrained configurations and symbolic backward reachability.
//!
//! A constrained configuration `p(x1, x2) | q(x3) : φ` denotes every ground
//! configuration that contains some solution instance of its atoms. Such
//! sets are upward closed, and so are their predecessor sets.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::msr::{AtomTemplate, Configuration, Predicates, Rule, Spec};
use crate::nc::{Atom, Closure, Constraint, Rational, Term, Var};
use crate::pattern::UnsafePattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("unknown location {0}")]
    UnknownLocation(String),
    #[error("location {location} has {expected} arguments, pattern gives {found}")]
    Arity {
        location: String,
        expected: usize,
        found: usize,
    },
    #[error("constant {0} cannot be expressed in the monadic encoding")]
    Constant(i64),
    #[error("matching needs equally many atoms on both sides ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("no trace")]
    NoTrace,
    #[error("replay failed at step {step}: {message}")]
    Replay { step: usize, message: String },
}

/// Atoms with pairwise distinct variables numbered by position, and a
/// satisfiable constraint over them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstrainedConfiguration {
    atoms: Vec<AtomTemplate>,
    constraint: Constraint,
}

impl ConstrainedConfiguration {
    /// Canonical form of `atoms : constraint`. Repeated variables become
    /// equalities, variables outside the atoms are quantified away. `None`
    /// when the constraint is unsatisfiable.
    pub fn new(atoms: Vec<AtomTemplate>, constraint: Constraint) -> Option<Self> {
        // positional variables live above everything the input mentions
        let base = atoms
            .iter()
            .flat_map(|a| a.args.iter())
            .chain(constraint.vars().iter())
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0);
        let mut next = base;
        let mut eqs = Vec::new();
        let positional: Vec<AtomTemplate> = atoms
            .iter()
            .map(|a| {
                let args = a
                    .args
                    .iter()
                    .map(|v| {
                        let p = Var(next);
                        next += 1;
                        eqs.push(Atom::eq(p, *v));
                        p
                    })
                    .collect();
                AtomTemplate::new(a.pred, args)
            })
            .collect();
        let c = constraint.with_atoms(eqs).project(|v| v.0 >= base);
        if !c.is_satisfiable() {
            return None;
        }
        Some(Self::canonical(positional, c))
    }

    /// Sorts atoms by predicate and then by how their arguments sit in the
    /// constraint, and renumbers variables left to right.
    fn canonical(mut atoms: Vec<AtomTemplate>, c: Constraint) -> Self {
        let profile = |v: Var| {
            let (mut above, mut below, mut eq, mut konst) = (0u32, 0u32, 0u32, None);
            for a in c.atoms() {
                let (l, r) = (a.lhs == Term::Var(v), a.rhs == Term::Var(v));
                if !(l || r) {
                    continue;
                }
                match (a.rel, l) {
                    (crate::nc::Rel::Gt, true) => above += 1,
                    (crate::nc::Rel::Gt, false) => below += 1,
                    (crate::nc::Rel::Eq, _) => {
                        eq += 1;
                        if let (Term::Const(k), _) | (_, Term::Const(k)) = (a.lhs, a.rhs) {
                            konst = Some(k);
                        }
                    }
                }
            }
            (konst, above, below, eq)
        };
        atoms.sort_by_cached_key(|a| {
            (
                a.pred,
                a.args.iter().map(|v| profile(*v)).collect::<Vec<_>>(),
            )
        });
        let mut map = std::collections::HashMap::new();
        let mut n = 0u32;
        for a in &mut atoms {
            for v in &mut a.args {
                map.insert(*v, Var(n));
                *v = Var(n);
                n += 1;
            }
        }
        let constraint = c.rename_unchecked(|v| map.get(&v).copied().unwrap_or(v));
        ConstrainedConfiguration { atoms, constraint }
    }

    /// Reads `p(x, y) | q(z) : x > z` over known predicates. Returns
    /// `Ok(None)` for an unsatisfiable constraint.
    pub fn parse(text: &str, preds: &Predicates) -> Result<Option<Self>, String> {
        let (atoms, c) = text.split_once(':').unwrap_or((text, ""));
        let mut vars = crate::msr::VarTable::default();
        let mut resolve = |n: &str, k: usize| match preds.lookup(n) {
            Some(p) if preds.arity(p) == k => Ok(p),
            Some(_) => Err(format!(
                "{n} takes {} arguments",
                preds.arity(preds.lookup(n).expect("found"))
            )),
            None => Err(format!("unknown predicate {n}")),
        };
        let atoms = crate::msr::parse_templates(atoms, &mut resolve, &mut vars)?;
        let c = crate::msr::parse_constraint_with(c, &mut vars)?;
        Ok(Self::new(atoms, c))
    }

    pub fn atoms(&self) -> &[AtomTemplate] {
        &self.atoms
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn var_count(&self) -> usize {
        self.atoms.iter().map(|a| a.args.len()).sum()
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> impl fmt::Display + 'a {
        CcDisplay { cc: self, preds }
    }

    /// `p(v0, v1) | q(v2)`, or `empty`.
    pub fn atoms_text(&self, preds: &Predicates) -> String {
        if self.atoms.is_empty() {
            return "empty".into();
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| {
                let args: Vec<String> = a.args.iter().map(|v| v.to_string()).collect();
                if args.is_empty() {
                    preds.name(a.pred).to_string()
                } else {
                    format!("{}({})", preds.name(a.pred), args.join(", "))
                }
            })
            .collect();
        parts.join(" | ")
    }

    pub fn constraint_text(&self) -> String {
        self.constraint.display_compact(&|v: Var| v.to_string())
    }
}

struct CcDisplay<'a> {
    cc: &'a ConstrainedConfiguration,
    preds: &'a Predicates,
}

impl fmt::Display for CcDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} : {}",
            self.cc.atoms_text(self.preds),
            self.cc.constraint_text()
        )
    }
}

/// Whether `m` contains an instance of `cc`.
pub fn member(cc: &ConstrainedConfiguration, m: &Configuration) -> bool {
    if cc.atoms.len() > m.len() {
        return false;
    }
    let mut used = vec![false; m.len()];
    let mut bind = Vec::new();
    place(cc, 0, m, &mut used, &mut bind)
}

fn place(
    cc: &ConstrainedConfiguration,
    i: usize,
    m: &Configuration,
    used: &mut [bool],
    bind: &mut Vec<(Var, Rational)>,
) -> bool {
    let Some(tpl) = cc.atoms.get(i) else {
        return cc.constraint.satisfiable_with(bind);
    };
    for (j, g) in m.atoms().iter().enumerate() {
        if used[j] || g.pred != tpl.pred || g.args.len() != tpl.args.len() {
            continue;
        }
        let mark = bind.len();
        bind.extend(tpl.args.iter().copied().zip(g.args.iter().copied()));
        used[j] = true;
        if cc.constraint.satisfiable_with(bind) && place(cc, i + 1, m, used, bind) {
            return true;
        }
        used[j] = false;
        bind.truncate(mark);
    }
    false
}

/// One constraint `φ ∧ ψ ∧ ⋀ Ai = Bj` per predicate-respecting pairing of
/// the two atom lists, keeping the satisfiable ones. Both sides must use
/// disjoint variables.
pub fn match_theta(
    part: &[AtomTemplate],
    phi: &Constraint,
    target: &[AtomTemplate],
    psi: &Constraint,
) -> Result<Vec<Constraint>, SymbolicError> {
    if part.len() != target.len() {
        return Err(SymbolicError::SizeMismatch(part.len(), target.len()));
    }
    let base = phi.conjoin(psi);
    let mut out = Vec::new();
    if !base.is_satisfiable() {
        return Ok(out);
    }
    let mut used = vec![false; target.len()];
    let mut eqs = Vec::new();
    pair_up(part, target, 0, &mut used, &mut eqs, &mut |eqs| {
        let theta = base.with_atoms(eqs.iter().copied());
        if theta.is_satisfiable() && !out.contains(&theta) {
            out.push(theta);
        }
    });
    Ok(out)
}

fn pair_up(
    part: &[AtomTemplate],
    target: &[AtomTemplate],
    i: usize,
    used: &mut [bool],
    eqs: &mut Vec<Atom>,
    emit: &mut dyn FnMut(&[Atom]),
) {
    let Some(a) = part.get(i) else {
        emit(eqs);
        return;
    };
    for (j, b) in target.iter().enumerate() {
        if used[j] || a.pred != b.pred || a.args.len() != b.args.len() {
            continue;
        }
        let mark = eqs.len();
        eqs.extend(a.args.iter().zip(&b.args).map(|(x, y)| Atom::eq(*x, *y)));
        used[j] = true;
        pair_up(part, target, i + 1, used, eqs, emit);
        used[j] = false;
        eqs.truncate(mark);
    }
}

/// Predecessors of `m` under `rule`. With `with_disjoint` false the pairing
/// that leaves `m` untouched is skipped; its result is always entailed by
/// `m` itself.
pub fn pre_rule(
    rule: &Rule,
    m: &ConstrainedConfiguration,
    with_disjoint: bool,
) -> Vec<ConstrainedConfiguration> {
    let shift = m.var_count() as u32;
    let lift = |v: Var| Var(v.0 + shift);
    let head: Vec<AtomTemplate> = rule
        .head
        .iter()
        .map(|a| AtomTemplate::new(a.pred, a.args.iter().map(|v| lift(*v)).collect()))
        .collect();
    let body: Vec<AtomTemplate> = rule
        .body
        .iter()
        .map(|a| AtomTemplate::new(a.pred, a.args.iter().map(|v| lift(*v)).collect()))
        .collect();
    let base = m
        .constraint
        .conjoin(&rule.constraint.rename_unchecked(lift));
    let mut out: Vec<ConstrainedConfiguration> = Vec::new();
    if !base.is_satisfiable() {
        return out;
    }
    let mut choice: Vec<Option<usize>> = vec![None; m.atoms.len()];
    let mut used = vec![false; body.len()];
    overlaps(&m.atoms, &body, 0, &mut choice, &mut used, &mut |choice| {
        let matched = choice.iter().filter(|c| c.is_some()).count();
        if matched == 0 && !with_disjoint {
            return;
        }
        let eqs = choice
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|j| (i, j)))
            .flat_map(|(i, j)| {
                m.atoms[i]
                    .args
                    .iter()
                    .zip(&body[j].args)
                    .map(|(x, y)| Atom::eq(*x, *y))
                    .collect::<Vec<_>>()
            });
        let theta = base.with_atoms(eqs);
        if !theta.is_satisfiable() {
            return;
        }
        let mut atoms = head.clone();
        atoms.extend(
            m.atoms
                .iter()
                .zip(choice)
                .filter(|(_, c)| c.is_none())
                .map(|(a, _)| a.clone()),
        );
        let keep: BTreeSet<Var> = atoms.iter().flat_map(|a| a.args.iter().copied()).collect();
        let xi = theta.project(|v| keep.contains(&v));
        if let Some(cc) = ConstrainedConfiguration::new(atoms, xi) {
            if !out.contains(&cc) {
                out.push(cc);
            }
        }
    });
    out
}

fn overlaps(
    m: &[AtomTemplate],
    body: &[AtomTemplate],
    i: usize,
    choice: &mut [Option<usize>],
    used: &mut [bool],
    emit: &mut dyn FnMut(&[Option<usize>]),
) {
    if i == m.len() {
        emit(choice);
        return;
    }
    choice[i] = None;
    overlaps(m, body, i + 1, choice, used, emit);
    for (j, b) in body.iter().enumerate() {
        if used[j] || b.pred != m[i].pred || b.args.len() != m[i].args.len() {
            continue;
        }
        used[j] = true;
        choice[i] = Some(j);
        overlaps(m, body, i + 1, choice, used, emit);
        used[j] = false;
    }
    choice[i] = None;
}

/// The symbolic predecessor operator over every rule and member,
/// including pairings that leave a member untouched.
pub fn sym_pre(rules: &[Rule], s: &SymbolicSet) -> SymbolicSet {
    let mut out = SymbolicSet::default();
    for m in s.members() {
        for r in rules {
            for cc in pre_rule(r, m, true) {
                out.insert(cc);
            }
        }
    }
    out
}

/// Indexed form used by the entailment search.
#[derive(Clone)]
struct Entry {
    cc: ConstrainedConfiguration,
    counts: Vec<u16>,
    /// First variable of each atom.
    offsets: Vec<u32>,
    /// Constraint atoms grouped by the last atom whose variables they use.
    ready: Vec<Vec<Atom>>,
    closure: std::sync::Arc<Closure>,
}

impl Entry {
    fn new(cc: ConstrainedConfiguration, preds: usize, consts: &BTreeSet<i64>) -> Self {
        let mut counts = vec![0u16; preds];
        let mut offsets = Vec::with_capacity(cc.atoms.len());
        let mut owner = Vec::new();
        let mut k = 0u32;
        for (i, a) in cc.atoms.iter().enumerate() {
            if let Some(c) = counts.get_mut(a.pred.0 as usize) {
                *c += 1;
            }
            offsets.push(k);
            k += a.args.len() as u32;
            owner.extend(std::iter::repeat_n(i, a.args.len()));
        }
        let mut ready = vec![Vec::new(); cc.atoms.len().max(1)];
        for a in cc.constraint.atoms() {
            let last = a.vars().map(|v| owner[v.0 as usize]).max().unwrap_or(0);
            ready[last].push(*a);
        }
        let closure = std::sync::Arc::new(cc.constraint.closure(consts.iter().copied()));
        Entry {
            cc,
            counts,
            offsets,
            ready,
            closure,
        }
    }

    fn covers_counts(&self, other: &Entry) -> bool {
        self.counts.len() == other.counts.len()
            && self.counts.iter().zip(&other.counts).all(|(a, b)| a >= b)
    }
}

/// `n` entails `m`: some injection of m's atoms into n's atoms under which
/// n's constraint implies m's.
fn entails_entry(n: &Entry, m: &Entry) -> bool {
    if m.cc.atoms.len() > n.cc.atoms.len() || !n.covers_counts(m) {
        return false;
    }
    if m.cc.atoms.is_empty() {
        return m.ready[0].iter().all(|a| n.closure.implies(a));
    }
    let mut image = vec![0u32; m.cc.atoms.len()];
    let mut used = vec![false; n.cc.atoms.len()];
    inject(n, m, 0, &mut image, &mut used)
}

fn inject(n: &Entry, m: &Entry, i: usize, image: &mut [u32], used: &mut [bool]) -> bool {
    if i == m.cc.atoms.len() {
        return true;
    }
    let tpl = &m.cc.atoms[i];
    // translate an m variable through the atoms placed so far
    let owner_of = |v: Var| m.offsets.partition_point(|o| *o <= v.0) - 1;
    for (j, a) in n.cc.atoms.iter().enumerate() {
        if used[j] || a.pred != tpl.pred || a.args.len() != tpl.args.len() {
            continue;
        }
        image[i] = n.offsets[j];
        let f = |v: Var| {
            let k = owner_of(v);
            Var(image[k] + (v.0 - m.offsets[k]))
        };
        if m.ready[i].iter().all(|at| n.closure.implies_mapped(at, f)) {
            used[j] = true;
            if inject(n, m, i + 1, image, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Sound entailment `⟦n⟧ ⊆ ⟦m⟧`; `false` is inconclusive.
pub fn entails_cc(n: &ConstrainedConfiguration, m: &ConstrainedConfiguration) -> bool {
    let preds = n
        .atoms
        .iter()
        .chain(&m.atoms)
        .map(|a| a.pred.0 as usize + 1)
        .max()
        .unwrap_or(0);
    let consts = m.constraint.constants();
    entails_entry(
        &Entry::new(n.clone(), preds, &consts),
        &Entry::new(m.clone(), preds, &consts),
    )
}

/// Constrained configurations kept free of entailed members.
#[derive(Clone, Debug, Default)]
pub struct SymbolicSet {
    members: Vec<ConstrainedConfiguration>,
}

impl SymbolicSet {
    pub fn members(&self) -> &[ConstrainedConfiguration] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Adds `cc` unless a member entails it; drops members it entails.
    /// Returns whether it was added.
    pub fn insert(&mut self, cc: ConstrainedConfiguration) -> bool {
        if self.members.iter().any(|m| entails_cc(&cc, m)) {
            return false;
        }
        self.members.retain(|m| !entails_cc(m, &cc));
        self.members.push(cc);
        true
    }

    pub fn contains_instance(&self, m: &Configuration) -> bool {
        self.members.iter().any(|cc| member(cc, m))
    }
}

impl FromIterator<ConstrainedConfiguration> for SymbolicSet {
    fn from_iter<I: IntoIterator<Item = ConstrainedConfiguration>>(iter: I) -> Self {
        let mut s = SymbolicSet::default();
        for cc in iter {
            s.insert(cc);
        }
        s
    }
}

/// Turns bad-state patterns into constrained configurations over the
/// predicates of `spec`. With `zero`, the constant 0 is expressed through
/// an extra `zero(z)` atom and any other constant is an error.
pub fn resolve_patterns(
    patterns: &[UnsafePattern],
    spec: &Spec,
    zero: Option<crate::msr::Pred>,
) -> Result<SymbolicSet, SymbolicError> {
    let mut out = SymbolicSet::default();
    for p in patterns {
        let mut atoms = Vec::new();
        for a in &p.atoms {
            let pred = spec
                .predicates
                .lookup(&a.location)
                .ok_or_else(|| SymbolicError::UnknownLocation(a.location.clone()))?;
            let expected = spec.predicates.arity(pred);
            if expected != a.vars.len() {
                return Err(SymbolicError::Arity {
                    location: a.location.clone(),
                    expected,
                    found: a.vars.len(),
                });
            }
            atoms.push(AtomTemplate::new(pred, a.vars.clone()));
        }
        let mut constraint = p.constraint.clone();
        if let Some(zp) = zero {
            let consts = constraint.constants();
            if let Some(k) = consts.iter().find(|k| **k != 0) {
                return Err(SymbolicError::Constant(*k));
            }
            if !consts.is_empty() {
                let z = Var(p.var_count() as u32);
                let to_z = |t: Term| if t == Term::Const(0) { Term::Var(z) } else { t };
                constraint = Constraint::new(constraint.atoms().iter().map(|a| Atom {
                    lhs: to_z(a.lhs),
                    rel: a.rel,
                    rhs: to_z(a.rhs),
                }));
                atoms.push(AtomTemplate::new(zp, vec![z]));
            }
        }
        if let Some(cc) = ConstrainedConfiguration::new(atoms, constraint) {
            out.insert(cc);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    Unsafe,
    BoundExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Safe => "SAFE",
            Verdict::Unsafe => "UNSAFE",
            Verdict::BoundExceeded => "BOUND_EXCEEDED",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_iterations: usize,
    pub max_set_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: 200,
            max_set_size: 100_000,
        }
    }
}

/// One step of a backward trace: the rule that leads from the previous
/// entry into this one (none for the first entry).
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: Option<String>,
    pub configuration: ConstrainedConfiguration,
}

#[derive(Clone, Debug)]
pub struct SbrReport {
    pub verdict: Verdict,
    pub iterations: usize,
    /// Members of the final set.
    pub fixpoint_size: usize,
    /// Members ever added, including those later subsumed.
    pub inserted: usize,
    pub trace: Option<Vec<TraceStep>>,
    pub elapsed: Duration,
    /// The final set, for cross-checks.
    pub fixpoint: Vec<ConstrainedConfiguration>,
    /// Which limit stopped the search.
    pub exceeded: Option<String>,
}

impl SbrReport {
    pub fn to_json(&self, preds: &Predicates) -> serde_json::Value {
        let trace: Vec<serde_json::Value> = self
            .trace
            .iter()
            .flatten()
            .map(|s| {
                json!({
                    "rule": s.rule,
                    "configuration": s.configuration.atoms_text(preds),
                    "constraint": s.configuration.constraint_text(),
                })
            })
            .collect();
        json!({
            "verdict": self.verdict.to_string(),
            "iterations": self.iterations,
            "fixpoint_size": self.fixpoint_size,
            "inserted": self.inserted,
            "elapsed_ms": self.elapsed.as_millis() as u64,
            "trace": trace,
        })
    }

    /// Deterministic part of the report as text; timing on its own line.
    pub fn to_text(&self, preds: &Predicates) -> String {
        let mut out = format!(
            "verdict: {}\niterations: {}\nfixpoint size: {}\nmembers inserted: {}\n",
            self.verdict, self.iterations, self.fixpoint_size, self.inserted
        );
        if let Some(why) = &self.exceeded {
            out += &format!("limit: {why}\n");
        }
        if let Some(trace) = &self.trace {
            out += "trace:\n";
            for (i, s) in trace.iter().enumerate() {
                let rule = s.rule.as_deref().unwrap_or("start");
                out += &format!("  {i}: {rule} => {}\n", s.configuration.display(preds));
            }
        }
        out += &format!("elapsed: {} ms\n", self.elapsed.as_millis());
        out
    }
}

struct Node {
    entry: Entry,
    parent: Option<(usize, usize)>,
    alive: bool,
}

/// Backward reachability from `unsafe_set` until no new member survives
/// subsumption, an initial configuration is covered, or a limit is hit.
pub fn sbr(spec: &Spec, unsafe_set: &SymbolicSet, limits: &Limits) -> SbrReport {
    let start = Instant::now();
    let preds = spec.predicates.len();
    let mut consts: BTreeSet<i64> = spec.constants();
    consts.insert(0);
    for m in unsafe_set.members() {
        consts.extend(m.constraint.constants());
    }
    let mut nodes: Vec<Node> = Vec::new();
    let finish =
        |verdict, iterations, nodes: &[Node], hit: Option<usize>, exceeded: Option<String>| {
            let fixpoint: Vec<ConstrainedConfiguration> = nodes
                .iter()
                .filter(|n| n.alive)
                .map(|n| n.entry.cc.clone())
                .collect();
            let trace = hit.map(|mut i| {
                let mut steps = vec![TraceStep {
                    rule: None,
                    configuration: nodes[i].entry.cc.clone(),
                }];
                while let Some((r, p)) = nodes[i].parent {
                    steps.push(TraceStep {
                        rule: Some(spec.rules[r].name.clone()),
                        configuration: nodes[p].entry.cc.clone(),
                    });
                    i = p;
                }
                steps
            });
            SbrReport {
                verdict,
                iterations,
                fixpoint_size: fixpoint.len(),
                inserted: nodes.len(),
                trace,
                elapsed: start.elapsed(),
                fixpoint,
                exceeded,
            }
        };
    let covers_initial = |cc: &ConstrainedConfiguration| spec.initial.iter().any(|m| member(cc, m));

    let mut frontier = Vec::new();
    for cc in unsafe_set.members() {
        let e = Entry::new(cc.clone(), preds, &consts);
        if let Some(i) = insert_node(&mut nodes, e, None) {
            frontier.push(i);
        }
    }
    if let Some(&i) = frontier
        .iter()
        .find(|&&i| covers_initial(&nodes[i].entry.cc))
    {
        return finish(Verdict::Unsafe, 0, &nodes, Some(i), None);
    }
    let mut iterations = 0;
    loop {
        if frontier.is_empty() {
            return finish(Verdict::Safe, iterations, &nodes, None, None);
        }
        if iterations >= limits.max_iterations {
            let why = format!("max_iterations = {}", limits.max_iterations);
            return finish(Verdict::BoundExceeded, iterations, &nodes, None, Some(why));
        }
        iterations += 1;
        let work: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&i| (0..spec.rules.len()).map(move |r| (i, r)))
            .collect();
        let produced: Vec<Vec<Entry>> = work
            .par_iter()
            .map(|&(i, r)| {
                pre_rule(&spec.rules[r], &nodes[i].entry.cc, false)
                    .into_iter()
                    .map(|cc| Entry::new(cc, preds, &consts))
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (&(i, r), entries) in work.iter().zip(produced) {
            for e in entries {
                let Some(k) = insert_node(&mut nodes, e, Some((r, i))) else {
                    continue;
                };
                if covers_initial(&nodes[k].entry.cc) {
                    return finish(Verdict::Unsafe, iterations, &nodes, Some(k), None);
                }
                next.push(k);
            }
        }
        next.retain(|&k| nodes[k].alive);
        frontier = next;
        let alive = nodes.iter().filter(|n| n.alive).count();
        if alive > limits.max_set_size {
            let why = format!("max_set_size = {}", limits.max_set_size);
            return finish(Verdict::BoundExceeded, iterations, &nodes, None, Some(why));
        }
    }
}

/// Minimizing insert. Returns the new node index when `e` survives.
fn insert_node(nodes: &mut Vec<Node>, e: Entry, parent: Option<(usize, usize)>) -> Option<usize> {
    let subsumed = nodes
        .par_iter()
        .any(|n| n.alive && entails_entry(&e, &n.entry));
    if subsumed {
        return None;
    }
    let weaker: Vec<usize> = nodes
        .par_iter()
        .enumerate()
        .filter(|(_, n)| n.alive && entails_entry(&n.entry, &e))
        .map(|(i, _)| i)
        .collect();
    for i in weaker {
        nodes[i].alive = false;
    }
    nodes.push(Node {
        entry: e,
        parent,
        alive: true,
    });
    Some(nodes.len() - 1)
}

/// Runs an unsafe trace forward from the initial configuration, choosing
/// the first instance (in canonical order) that lands in the next
/// constrained configuration. Returns the configurations visited and the
/// rules fired.
pub fn replay_trace(
    report: &SbrReport,
    spec: &Spec,
) -> Result<(Vec<Configuration>, Vec<String>), SymbolicError> {
    let trace = match (&report.verdict, &report.trace) {
        (Verdict::Unsafe, Some(t)) if !t.is_empty() => t,
        _ => return Err(SymbolicError::NoTrace),
    };
    let m0 = spec
        .initial
        .iter()
        .find(|m| member(&trace[0].configuration, m))
        .ok_or_else(|| SymbolicError::Replay {
            step: 0,
            message: "no initial configuration is covered".into(),
        })?;
    let mut consts: BTreeSet<Rational> = spec
        .constants()
        .into_iter()
        .chain([0])
        .map(Rational::from_integer)
        .collect();
    for s in trace {
        consts.extend(
            s.configuration
                .constraint
                .constants()
                .into_iter()
                .map(Rational::from_integer),
        );
    }
    let mut run = vec![m0.clone()];
    let mut rules = Vec::new();
    for (k, step) in trace.iter().enumerate().skip(1) {
        let name = step.rule.as_deref().unwrap_or_default();
        let rule = spec.rule(name).ok_or_else(|| SymbolicError::Replay {
            step: k,
            message: format!("unknown rule {name}"),
        })?;
        let m = run.last().expect("nonempty run");
        let next = rule
            .all_instances(m, &consts)
            .into_iter()
            .filter_map(|sigma| rule.fire(m, &sigma).ok())
            .find(|n| member(&step.configuration, n))
            .ok_or_else(|| SymbolicError::Replay {
                step: k,
                message: format!(
                    "no instance of {name} reaches {}",
                    step.configuration.display(&spec.predicates)
                ),
            })?;
        run.push(next);
        rules.push(name.to_string());
    }
    Ok((run, rules))
}
