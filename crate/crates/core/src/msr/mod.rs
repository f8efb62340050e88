//! Multiset rewriting with name constraints: ground configurations, rule
//! firing and bounded forward exploration.

mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::nc::{pick_between, Constraint, Rational, Var};

pub(crate) use text::parse_templates;
pub use text::{parse_constraint_with, parse_spec, ParseError, VarTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pred(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MsrError {
    #[error("predicate {name} has arity {expected}, used with {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("rule {rule}: variable {var} occurs more than once")]
    DuplicateVariable { rule: String, var: String },
    #[error("rule {rule}: constraint variable {var} does not occur in the rule's atoms")]
    StrayVariable { rule: String, var: String },
    #[error("rule {rule}: substitution leaves {var} unbound")]
    Unbound { rule: String, var: String },
    #[error("rule {0}: substitution violates the constraint")]
    ConstraintViolated(String),
    #[error("rule {0}: instantiated head is not contained in the configuration")]
    NotIncluded(String),
}

/// Predicate symbols with their arities, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Predicates {
    names: Vec<String>,
    arities: Vec<usize>,
    index: HashMap<String, Pred>,
}

impl Predicates {
    /// Declares a predicate, or checks the arity of an existing one.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<Pred, MsrError> {
        if let Some(&p) = self.index.get(name) {
            let expected = self.arity(p);
            if expected != arity {
                return Err(MsrError::Arity {
                    name: name.into(),
                    expected,
                    found: arity,
                });
            }
            return Ok(p);
        }
        let p = Pred(self.names.len() as u32);
        self.names.push(name.into());
        self.arities.push(arity);
        self.index.insert(name.into(), p);
        Ok(p)
    }

    pub fn lookup(&self, name: &str) -> Option<Pred> {
        self.index.get(name).copied()
    }

    pub fn name(&self, p: Pred) -> &str {
        &self.names[p.0 as usize]
    }

    pub fn arity(&self, p: Pred) -> usize {
        self.arities[p.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pred, &str, usize)> + '_ {
        self.names
            .iter()
            .zip(&self.arities)
            .enumerate()
            .map(|(i, (n, a))| (Pred(i as u32), n.as_str(), *a))
    }
}

/// `p(x1, ..., xn)` with variable arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomTemplate {
    pub pred: Pred,
    pub args: Vec<Var>,
}

impl AtomTemplate {
    pub fn new(pred: Pred, args: Vec<Var>) -> Self {
        AtomTemplate { pred, args }
    }

    pub fn instantiate(&self, sigma: impl Fn(Var) -> Option<Rational>) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|v| sigma(*v))
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            pred: self.pred,
            args,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: Pred,
    pub args: Vec<Rational>,
}

impl GroundAtom {
    pub fn new(pred: Pred, args: Vec<Rational>) -> Self {
        GroundAtom { pred, args }
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> impl fmt::Display + 'a {
        GroundDisplay { atom: self, preds }
    }
}

struct GroundDisplay<'a> {
    atom: &'a GroundAtom,
    preds: &'a Predicates,
}

impl fmt::Display for GroundDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.preds.name(self.atom.pred))?;
        if !self.atom.args.is_empty() {
            let args: Vec<String> = self.atom.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

/// A finite multiset of ground atoms, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    atoms: Vec<GroundAtom>,
}

impl FromIterator<GroundAtom> for Configuration {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        Configuration::new(iter.into_iter().collect())
    }
}

impl Configuration {
    pub fn new(mut atoms: Vec<GroundAtom>) -> Self {
        atoms.sort();
        Configuration { atoms }
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Multiset inclusion `other ≼ self`.
    pub fn includes(&self, other: &Configuration) -> bool {
        self.minus(other).is_some()
    }

    /// `self ⊖ other`, or `None` unless `other ≼ self`.
    pub fn minus(&self, other: &Configuration) -> Option<Configuration> {
        let mut out = Vec::with_capacity(self.atoms.len());
        let mut j = 0;
        for a in &self.atoms {
            if j < other.atoms.len() && other.atoms[j] == *a {
                j += 1;
            } else {
                if j < other.atoms.len() && other.atoms[j] < *a {
                    return None;
                }
                out.push(a.clone());
            }
        }
        if j == other.atoms.len() {
            Some(Configuration { atoms: out })
        } else {
            None
        }
    }

    pub fn plus(&self, other: &Configuration) -> Configuration {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Configuration::new(atoms)
    }

    pub fn values(&self) -> BTreeSet<Rational> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter().copied())
            .collect()
    }

    pub fn count(&self, pred: Pred) -> usize {
        self.atoms.iter().filter(|a| a.pred == pred).count()
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> impl fmt::Display + 'a {
        ConfigDisplay {
            config: self,
            preds,
        }
    }
}

struct ConfigDisplay<'a> {
    config: &'a Configuration,
    preds: &'a Predicates,
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.config.atoms.is_empty() {
            return f.write_str("empty");
        }
        for (i, a) in self.config.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", a.display(self.preds))?;
        }
        Ok(())
    }
}

/// `head -> body : constraint`. Variables are `Var(0..var_names.len())`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub head: Vec<AtomTemplate>,
    pub body: Vec<AtomTemplate>,
    pub constraint: Constraint,
    pub var_names: Vec<String>,
}

pub type Substitution = BTreeMap<Var, Rational>;

impl Rule {
    /// Checks that atom variables are pairwise distinct and that the
    /// constraint only mentions atom variables.
    pub fn new(
        name: impl Into<String>,
        head: Vec<AtomTemplate>,
        body: Vec<AtomTemplate>,
        constraint: Constraint,
        var_names: Vec<String>,
    ) -> Result<Rule, MsrError> {
        let rule = Rule {
            name: name.into(),
            head,
            body,
            constraint,
            var_names,
        };
        let mut seen = BTreeSet::new();
        for v in rule.head.iter().chain(&rule.body).flat_map(|a| &a.args) {
            if !seen.insert(*v) {
                return Err(MsrError::DuplicateVariable {
                    rule: rule.name.clone(),
                    var: rule.var_name(*v),
                });
            }
        }
        for v in rule.constraint.vars() {
            if !seen.contains(&v) {
                return Err(MsrError::StrayVariable {
                    rule: rule.name.clone(),
                    var: rule.var_name(v),
                });
            }
        }
        Ok(rule)
    }

    pub fn var_name(&self, v: Var) -> String {
        self.var_names
            .get(v.0 as usize)
            .cloned()
            .unwrap_or_else(|| v.to_string())
    }

    pub fn head_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.head.iter().flat_map(|a| a.args.iter().copied())
    }

    pub fn body_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.body.iter().flat_map(|a| a.args.iter().copied())
    }

    pub fn var_count(&self) -> usize {
        self.head_vars()
            .chain(self.body_vars())
            .map(|v| v.0 as usize + 1)
            .max()
            .unwrap_or(0)
    }

    fn instantiate_all(
        &self,
        atoms: &[AtomTemplate],
        sigma: &Substitution,
    ) -> Result<Configuration, MsrError> {
        atoms
            .iter()
            .map(|a| {
                a.instantiate(|v| sigma.get(&v).copied()).ok_or_else(|| {
                    let v = a
                        .args
                        .iter()
                        .find(|v| !sigma.contains_key(v))
                        .copied()
                        .unwrap_or(Var(0));
                    MsrError::Unbound {
                        rule: self.name.clone(),
                        var: self.var_name(v),
                    }
                })
            })
            .collect()
    }

    /// `σ(body) ⊕ (m ⊖ σ(head))`.
    pub fn fire(&self, m: &Configuration, sigma: &Substitution) -> Result<Configuration, MsrError> {
        let head = self.instantiate_all(&self.head, sigma)?;
        let body = self.instantiate_all(&self.body, sigma)?;
        match self.constraint.evaluate(sigma) {
            Ok(true) => {}
            Ok(false) => return Err(MsrError::ConstraintViolated(self.name.clone())),
            Err(crate::nc::NcError::Unbound(v)) => {
                return Err(MsrError::Unbound {
                    rule: self.name.clone(),
                    var: self.var_name(v),
                })
            }
            Err(e) => unreachable!("evaluate only reports unbound variables: {e}"),
        }
        let rest = m
            .minus(&head)
            .ok_or_else(|| MsrError::NotIncluded(self.name.clone()))?;
        Ok(rest.plus(&body))
    }

    /// Head matchings into `m` whose constraint stays satisfiable, each
    /// extended with canonical witnesses for the body variables.
    pub fn enabled_instances(&self, m: &Configuration) -> Vec<Substitution> {
        let mut out = Vec::new();
        for head_sigma in self.head_matches(m) {
            let Some(mut sigma) = self.constraint.witness(&head_sigma) else {
                continue;
            };
            for v in self.body_vars() {
                sigma.entry(v).or_insert_with(|| pick_between(None, None));
            }
            out.push(sigma);
        }
        out
    }

    /// Like [`Rule::enabled_instances`] but with one substitution per order
    /// type of the body values relative to `anchors`, the values of `m` and
    /// the head values. Exhaustive up to order isomorphism.
    pub fn all_instances(
        &self,
        m: &Configuration,
        anchors: &BTreeSet<Rational>,
    ) -> Vec<Substitution> {
        let body: Vec<Var> = self.body_vars().collect();
        let mut out = Vec::new();
        for head_sigma in self.head_matches(m) {
            let mut base: BTreeSet<Rational> = anchors.clone();
            base.extend(m.values());
            let mut sigma = head_sigma;
            self.extend_body(&body, &base, &mut sigma, &mut out);
        }
        out
    }

    fn extend_body(
        &self,
        rest: &[Var],
        points: &BTreeSet<Rational>,
        sigma: &mut Substitution,
        out: &mut Vec<Substitution>,
    ) {
        let Some((&v, tail)) = rest.split_first() else {
            if self.constraint.evaluate(sigma) == Ok(true) {
                out.push(sigma.clone());
            }
            return;
        };
        for q in gap_representatives(points) {
            sigma.insert(v, q);
            let fixed: Vec<(Var, Rational)> = sigma.iter().map(|(a, b)| (*a, *b)).collect();
            if self.constraint.satisfiable_with(&fixed) {
                let mut next = points.clone();
                next.insert(q);
                self.extend_body(tail, &next, sigma, out);
            }
        }
        sigma.remove(&v);
    }

    /// Distinct substitutions of the head variables into `m`, pruned by
    /// satisfiability of the constraint. Matches are tried in lexicographic
    /// order of atom positions.
    pub fn head_matches(&self, m: &Configuration) -> Vec<Substitution> {
        let mut out = BTreeSet::new();
        let mut used = vec![false; m.len()];
        let mut sigma = Substitution::new();
        self.match_from(0, m, &mut used, &mut sigma, &mut out);
        out.into_iter().collect()
    }

    fn match_from(
        &self,
        i: usize,
        m: &Configuration,
        used: &mut [bool],
        sigma: &mut Substitution,
        out: &mut BTreeSet<Substitution>,
    ) {
        if i == self.head.len() {
            out.insert(sigma.clone());
            return;
        }
        let tpl = &self.head[i];
        for (j, atom) in m.atoms.iter().enumerate() {
            if used[j] || atom.pred != tpl.pred || atom.args.len() != tpl.args.len() {
                continue;
            }
            for (v, q) in tpl.args.iter().zip(&atom.args) {
                sigma.insert(*v, *q);
            }
            let fixed: Vec<(Var, Rational)> = sigma.iter().map(|(a, b)| (*a, *b)).collect();
            if self.constraint.satisfiable_with(&fixed) {
                used[j] = true;
                self.match_from(i + 1, m, used, sigma, out);
                used[j] = false;
            }
            for v in &tpl.args {
                sigma.remove(v);
            }
        }
    }

    /// Whether one firing of this rule turns `m` into `next`.
    pub fn connects(&self, m: &Configuration, next: &Configuration) -> bool {
        for head_sigma in self.head_matches(m) {
            let head = self
                .instantiate_all(&self.head, &head_sigma)
                .expect("head bound");
            let Some(rest) = m.minus(&head) else { continue };
            let Some(added) = next.minus(&rest) else {
                continue;
            };
            if added.len() != self.body.len() {
                continue;
            }
            let mut used = vec![false; added.len()];
            let mut sigma = head_sigma.clone();
            if self.match_body(0, &added, &mut used, &mut sigma) {
                return true;
            }
        }
        false
    }

    fn match_body(
        &self,
        i: usize,
        added: &Configuration,
        used: &mut [bool],
        sigma: &mut Substitution,
    ) -> bool {
        if i == self.body.len() {
            return self.constraint.evaluate(sigma) == Ok(true);
        }
        let tpl = &self.body[i];
        for (j, atom) in added.atoms.iter().enumerate() {
            if used[j] || atom.pred != tpl.pred || atom.args.len() != tpl.args.len() {
                continue;
            }
            for (v, q) in tpl.args.iter().zip(&atom.args) {
                sigma.insert(*v, *q);
            }
            used[j] = true;
            let ok = self.match_body(i + 1, added, used, sigma);
            used[j] = false;
            for v in &tpl.args {
                sigma.remove(v);
            }
            if ok {
                return true;
            }
        }
        false
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> impl fmt::Display + 'a {
        RuleDisplay { rule: self, preds }
    }
}

/// The points themselves, a midpoint of each gap, and one point beyond each
/// end.
fn gap_representatives(points: &BTreeSet<Rational>) -> Vec<Rational> {
    let one = Rational::from_integer(1);
    let pts: Vec<Rational> = points.iter().copied().collect();
    let Some((&lo, &hi)) = pts.first().zip(pts.last()) else {
        return vec![Rational::from_integer(0)];
    };
    let mut out = vec![lo - one];
    for w in pts.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) / Rational::from_integer(2));
    }
    out.push(hi);
    out.push(hi + one);
    out
}

struct RuleDisplay<'a> {
    rule: &'a Rule,
    preds: &'a Predicates,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        let side = |atoms: &[AtomTemplate]| -> String {
            if atoms.is_empty() {
                return "empty".into();
            }
            let parts: Vec<String> = atoms
                .iter()
                .map(|a| {
                    let name = self.preds.name(a.pred);
                    if a.args.is_empty() {
                        name.to_string()
                    } else {
                        let args: Vec<String> = a.args.iter().map(|v| r.var_name(*v)).collect();
                        format!("{name}({})", args.join(", "))
                    }
                })
                .collect();
            parts.join(" | ")
        };
        let names = |v: Var| r.var_name(v);
        let c = r.constraint.display_compact(&names);
        write!(
            f,
            "{}: {} -> {} : {}",
            r.name,
            side(&r.head),
            side(&r.body),
            c
        )
    }
}

/// Predicates, initial configurations and rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Spec {
    pub predicates: Predicates,
    pub initial: Vec<Configuration>,
    pub rules: Vec<Rule>,
}

impl Spec {
    /// Integer constants mentioned by any rule constraint.
    pub fn constants(&self) -> BTreeSet<i64> {
        self.rules
            .iter()
            .flat_map(|r| r.constraint.constants())
            .collect()
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// One-step successors with canonical witnesses.
    pub fn post(&self, m: &Configuration) -> BTreeSet<Configuration> {
        self.successors(m).into_iter().map(|(_, c)| c).collect()
    }

    /// One-step successors with canonical witnesses, tagged by rule index.
    pub fn successors(&self, m: &Configuration) -> Vec<(usize, Configuration)> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            for sigma in r.enabled_instances(m) {
                out.push((i, r.fire(m, &sigma).expect("enabled instance fires")));
            }
        }
        out
    }

    /// One successor per rule instance and order type of the new values.
    pub fn post_exhaustive(
        &self,
        m: &Configuration,
        anchors: &BTreeSet<Rational>,
    ) -> BTreeSet<Configuration> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            for sigma in r.all_instances(m, anchors) {
                out.insert(r.fire(m, &sigma).expect("instance fires"));
            }
        }
        out
    }

    /// The index of a rule that rewrites `m` into `next`, if any.
    pub fn step_rule(&self, m: &Configuration, next: &Configuration) -> Option<usize> {
        self.rules.iter().position(|r| r.connects(m, next))
    }

    pub fn to_text(&self) -> String {
        text::print_spec(self)
    }

    /// Maps the values of `m` to the least values with the same order type
    /// relative to the constants of the spec.
    pub fn normalize(&self, m: &Configuration) -> Configuration {
        let consts: BTreeSet<Rational> = self
            .constants()
            .into_iter()
            .chain([0])
            .map(Rational::from_integer)
            .collect();
        normalize_values(m, &consts)
    }

    /// Breadth-first exploration of the configurations reachable from the
    /// initial ones while every configuration has at most `max_atoms` atoms
    /// and every value, after normalization, is at most `value_cap`.
    pub fn post_star_bounded(&self, bounds: &Bounds) -> BoundedReach {
        let mut seen: HashMap<Configuration, Option<(usize, usize)>> = HashMap::new();
        let mut order: Vec<Configuration> = Vec::new();
        let mut queue = VecDeque::new();
        let within = |c: &Configuration| {
            c.len() <= bounds.max_atoms && c.values().iter().all(|v| *v <= bounds.value_cap)
        };
        for m in &self.initial {
            let m = self.normalize(m);
            if within(&m) && !seen.contains_key(&m) {
                seen.insert(m.clone(), None);
                order.push(m.clone());
                queue.push_back(order.len() - 1);
            }
        }
        let mut truncated = false;
        'outer: while !queue.is_empty() {
            // expand the whole frontier in parallel, merge in order
            let frontier: Vec<usize> = queue.drain(..).collect();
            let expanded: Vec<Vec<(usize, Configuration)>> = frontier
                .par_iter()
                .map(|&i| {
                    self.successors(&order[i])
                        .into_iter()
                        .map(|(r, c)| (r, self.normalize(&c)))
                        .filter(|(_, c)| within(c))
                        .collect()
                })
                .collect();
            for (&parent, succs) in frontier.iter().zip(expanded) {
                for (rule, c) in succs {
                    if seen.contains_key(&c) {
                        continue;
                    }
                    if order.len() >= bounds.max_configs {
                        truncated = true;
                        break 'outer;
                    }
                    seen.insert(c.clone(), Some((rule, parent)));
                    order.push(c);
                    queue.push_back(order.len() - 1);
                }
            }
        }
        let parents = order.iter().map(|c| seen[c]).collect();
        BoundedReach {
            configs: order,
            parents,
            truncated,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Bounds {
    pub max_atoms: usize,
    pub value_cap: Rational,
    pub max_configs: usize,
}

/// Result of [`Spec::post_star_bounded`], in discovery order.
#[derive(Clone, Debug)]
pub struct BoundedReach {
    pub configs: Vec<Configuration>,
    /// `(rule, parent index)` for each configuration; `None` for initial ones.
    pub parents: Vec<Option<(usize, usize)>>,
    pub truncated: bool,
}

impl BoundedReach {
    /// Configurations from an initial one to `configs[i]`, with the rule
    /// applied before each.
    pub fn path_to(&self, mut i: usize) -> Vec<(Option<usize>, &Configuration)> {
        let mut out = vec![];
        loop {
            match self.parents[i] {
                Some((r, p)) => {
                    out.push((Some(r), &self.configs[i]));
                    i = p;
                }
                None => {
                    out.push((None, &self.configs[i]));
                    break;
                }
            }
        }
        out.reverse();
        out
    }
}

/// Whether two rules agree up to a bijective renaming of variables and a
/// reordering of atoms. Predicates are compared by name and arity.
pub fn rules_equivalent(a: &Rule, pa: &Predicates, b: &Rule, pb: &Predicates) -> bool {
    if a.head.len() != b.head.len() || a.body.len() != b.body.len() {
        return false;
    }
    let atoms_a: Vec<&AtomTemplate> = a.head.iter().chain(&a.body).collect();
    let atoms_b: Vec<&AtomTemplate> = b.head.iter().chain(&b.body).collect();
    let split = a.head.len();
    let mut used = vec![false; atoms_b.len()];
    let mut map = BTreeMap::new();
    equivalent_from(
        0,
        split,
        &atoms_a,
        pa,
        &atoms_b,
        pb,
        &mut used,
        &mut map,
        &a.constraint,
        &b.constraint,
    )
}

#[allow(clippy::too_many_arguments)]
fn equivalent_from(
    i: usize,
    split: usize,
    aa: &[&AtomTemplate],
    pa: &Predicates,
    bb: &[&AtomTemplate],
    pb: &Predicates,
    used: &mut [bool],
    map: &mut BTreeMap<Var, Var>,
    ca: &Constraint,
    cb: &Constraint,
) -> bool {
    if i == aa.len() {
        return match ca.rename(map) {
            Ok(c) => c.entails(cb) && cb.entails(&c),
            Err(_) => false,
        };
    }
    let a = aa[i];
    // head atoms pair with head atoms, body with body
    let range = if i < split { 0..split } else { split..bb.len() };
    for j in range {
        let b = bb[j];
        if used[j] || pa.name(a.pred) != pb.name(b.pred) || a.args.len() != b.args.len() {
            continue;
        }
        used[j] = true;
        for (x, y) in a.args.iter().zip(&b.args) {
            map.insert(*x, *y);
        }
        if equivalent_from(i + 1, split, aa, pa, bb, pb, used, map, ca, cb) {
            return true;
        }
        for x in &a.args {
            map.remove(x);
        }
        used[j] = false;
    }
    false
}

/// Strictly increasing renaming of values that fixes every value in
/// `consts` and compacts the others towards the smallest available
/// integers inside their gap.
pub fn normalize_values(m: &Configuration, consts: &BTreeSet<Rational>) -> Configuration {
    let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
    let mut prev: Option<Rational> = None;
    for v in m.values() {
        let image = if consts.contains(&v) {
            v
        } else {
            let below = consts.range(..v).next_back().copied();
            let above = consts.range(v..).next().copied();
            let lo = match (prev, below) {
                (Some(p), Some(b)) => Some(p.max(b)),
                (p, b) => p.or(b),
            };
            pick_between(lo, above)
        };
        map.insert(v, image);
        prev = Some(image);
    }
    m.atoms
        .iter()
        .map(|a| GroundAtom {
            pred: a.pred,
            args: a.args.iter().map(|v| map[v]).collect(),
        })
        .collect()
}
