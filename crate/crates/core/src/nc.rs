//! Name constraints: conjunctions of `=` and `>` between variables and
//! integer constants, interpreted over the rationals.
//!
//! Every [`Constraint`] is stored closed and canonical. Closure works on an
//! order graph: equalities are merged with union-find, strict edges are
//! closed transitively with bitsets, and constants are nodes whose numeric
//! order is seeded into the graph. A constraint is unsatisfiable exactly when
//! the closure contains a strict cycle or merges two distinct constants;
//! density of the rationals makes this test complete.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = num_rational::Ratio<i64>;

/// Opaque variable identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(i64),
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl From<i64> for Term {
    fn from(c: i64) -> Self {
        Term::Const(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Gt,
}

/// `lhs = rhs` or `lhs > rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub rel: Rel,
    pub rhs: Term,
}

impl Atom {
    pub fn eq(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Atom {
        Atom {
            lhs: lhs.into(),
            rel: Rel::Eq,
            rhs: rhs.into(),
        }
    }

    pub fn gt(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Atom {
        Atom {
            lhs: lhs.into(),
            rel: Rel::Gt,
            rhs: rhs.into(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        [self.lhs, self.rhs].into_iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    /// Truth value of an atom between two constants.
    fn ground_truth(&self) -> Option<bool> {
        match (self.lhs, self.rhs) {
            (Term::Const(a), Term::Const(b)) => Some(match self.rel {
                Rel::Eq => a == b,
                Rel::Gt => a > b,
            }),
            _ => None,
        }
    }

    pub fn holds(&self, value: impl Fn(Var) -> Option<Rational>) -> Result<bool, NcError> {
        let eval = |t: Term| match t {
            Term::Const(c) => Ok(Rational::from_integer(c)),
            Term::Var(v) => value(v).ok_or(NcError::Unbound(v)),
        };
        let (l, r) = (eval(self.lhs)?, eval(self.rhs)?);
        Ok(match self.rel {
            Rel::Eq => l == r,
            Rel::Gt => l > r,
        })
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Atom {
        let m = |t: Term| match t {
            Term::Var(v) => Term::Var(f(v)),
            c => c,
        };
        Atom {
            lhs: m(self.lhs),
            rel: self.rel,
            rhs: m(self.rhs),
        }
    }

    pub fn display_with<'a, F: Fn(Var) -> String>(
        &'a self,
        names: &'a F,
    ) -> impl fmt::Display + 'a {
        AtomDisplay { atom: self, names }
    }
}

struct AtomDisplay<'a, F> {
    atom: &'a Atom,
    names: &'a F,
}

impl<F: Fn(Var) -> String> fmt::Display for AtomDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: Term| match t {
            Term::Var(v) => (self.names)(v),
            Term::Const(c) => c.to_string(),
        };
        let op = match self.atom.rel {
            Rel::Eq => "=",
            Rel::Gt => ">",
        };
        write!(f, "{}{}{}", show(self.atom.lhs), op, show(self.atom.rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("renaming is not injective: {0} and {1} both map to {2}")]
    NonInjective(Var, Var, Var),
    #[error("no value bound for variable {0}")]
    Unbound(Var),
}

/// A closed, canonical conjunction of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    sat: bool,
    atoms: Vec<Atom>,
}

impl Default for Constraint {
    fn default() -> Self {
        Constraint::top()
    }
}

impl Constraint {
    /// The empty conjunction.
    pub fn top() -> Constraint {
        Constraint {
            sat: true,
            atoms: Vec::new(),
        }
    }

    pub fn bottom() -> Constraint {
        Constraint {
            sat: false,
            atoms: Vec::new(),
        }
    }

    /// Closes and canonicalizes an arbitrary conjunction.
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Constraint {
        let mut edges = Vec::new();
        for a in atoms {
            match a.ground_truth() {
                Some(true) => {}
                Some(false) => return Constraint::bottom(),
                None => edges.push(a),
            }
        }
        let g = Graph::build(edges.iter().map(edge_of), std::iter::empty());
        g.canonical(|_| true)
    }

    pub fn canonicalize(&self) -> Constraint {
        if !self.sat {
            return Constraint::bottom();
        }
        Constraint::new(self.atoms.iter().copied())
    }

    pub fn is_satisfiable(&self) -> bool {
        self.sat
    }

    pub fn is_top(&self) -> bool {
        self.sat && self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atoms.iter().flat_map(|a| a.vars()).collect()
    }

    pub fn constants(&self) -> BTreeSet<i64> {
        self.atoms
            .iter()
            .flat_map(|a| [a.lhs, a.rhs])
            .filter_map(|t| match t {
                Term::Const(c) => Some(c),
                Term::Var(_) => None,
            })
            .collect()
    }

    pub fn conjoin(&self, other: &Constraint) -> Constraint {
        if !self.sat || !other.sat {
            return Constraint::bottom();
        }
        Constraint::new(self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    pub fn with_atoms(&self, extra: impl IntoIterator<Item = Atom>) -> Constraint {
        if !self.sat {
            return Constraint::bottom();
        }
        Constraint::new(self.atoms.iter().copied().chain(extra))
    }

    /// Existentially quantifies away `drop`.
    pub fn eliminate(&self, drop: &[Var]) -> Constraint {
        let drop: BTreeSet<Var> = drop.iter().copied().collect();
        self.project(|v| !drop.contains(&v))
    }

    /// Keeps only the variables selected by `keep`; the rest are
    /// existentially quantified.
    pub fn project(&self, keep: impl Fn(Var) -> bool) -> Constraint {
        if !self.sat {
            return Constraint::bottom();
        }
        let g = Graph::build(self.atoms.iter().map(edge_of), std::iter::empty());
        g.canonical(keep)
    }

    /// `Sol(self) ⊆ Sol(other)`.
    pub fn entails(&self, other: &Constraint) -> bool {
        if !self.sat {
            return true;
        }
        if !other.sat {
            return false;
        }
        let closure = self.closure(other.constants());
        other.atoms.iter().all(|a| closure.implies(a))
    }

    /// Renames through `map`; variables absent from the map keep their name.
    /// Fails when two variables of the constraint collapse onto one.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Result<Constraint, NcError> {
        let mut seen: BTreeMap<Var, Var> = BTreeMap::new();
        for v in self.vars() {
            let image = map.get(&v).copied().unwrap_or(v);
            if let Some(prev) = seen.insert(image, v) {
                return Err(NcError::NonInjective(prev, v, image));
            }
        }
        Ok(self.rename_unchecked(|v| map.get(&v).copied().unwrap_or(v)))
    }

    /// Renames with a function the caller guarantees injective on `vars()`.
    pub fn rename_unchecked(&self, f: impl Fn(Var) -> Var) -> Constraint {
        if !self.sat {
            return Constraint::bottom();
        }
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| normalize(a.map_vars(&f)))
            .collect();
        atoms.sort();
        Constraint { sat: true, atoms }
    }

    /// Checks a full assignment.
    pub fn evaluate(&self, assignment: &BTreeMap<Var, Rational>) -> Result<bool, NcError> {
        self.evaluate_with(|v| assignment.get(&v).copied())
    }

    pub fn evaluate_with(&self, value: impl Fn(Var) -> Option<Rational>) -> Result<bool, NcError> {
        if !self.sat {
            // still report unbound variables consistently: an Unsat constraint has none
            return Ok(false);
        }
        let mut ok = true;
        for a in &self.atoms {
            ok &= a.holds(&value)?;
        }
        Ok(ok)
    }

    /// Satisfiability after fixing some variables to rational values.
    pub fn satisfiable_with(&self, fixed: &[(Var, Rational)]) -> bool {
        if !self.sat {
            return false;
        }
        Graph::build(self.atoms.iter().map(edge_of), fixed.iter().copied()).sat
    }

    /// Extends `fixed` to a solution covering every variable of the
    /// constraint, choosing the smallest integer above the lower bound when
    /// one fits and a midpoint otherwise.
    pub fn witness(&self, fixed: &BTreeMap<Var, Rational>) -> Option<BTreeMap<Var, Rational>> {
        if !self.sat {
            return None;
        }
        let fixed: Vec<(Var, Rational)> = fixed.iter().map(|(v, q)| (*v, *q)).collect();
        let g = Graph::build(self.atoms.iter().map(edge_of), fixed.iter().copied());
        if !g.sat {
            return None;
        }
        Some(g.witness())
    }

    /// Precomputed closure for repeated implication queries. `extra` adds
    /// constants that later queries may mention.
    pub fn closure(&self, extra: impl IntoIterator<Item = i64>) -> Closure {
        let extra: Vec<Rational> = extra.into_iter().map(Rational::from_integer).collect();
        let mut g = Graph::build(self.atoms.iter().map(edge_of), std::iter::empty());
        if !extra.is_empty() && g.sat {
            let mut edges: Vec<(Rel, Node, Node)> = self.atoms.iter().map(edge_of).collect();
            // dummy self-equalities register the constants as nodes
            edges.extend(
                extra
                    .iter()
                    .map(|q| (Rel::Eq, Node::Val(*q), Node::Val(*q))),
            );
            g = Graph::build(edges.into_iter(), std::iter::empty());
        }
        Closure { graph: g }
    }

    pub fn display_with<'a, F: Fn(Var) -> String>(
        &'a self,
        names: &'a F,
    ) -> impl fmt::Display + 'a {
        ConstraintDisplay { c: self, names }
    }

    /// An equivalent shorter list: each variable equated to one
    /// representative of its class, plus the covering pairs of the strict
    /// order. Empty for `false`.
    pub fn compact_atoms(&self) -> Vec<Atom> {
        if !self.sat {
            return Vec::new();
        }
        Graph::build(self.atoms.iter().map(edge_of), std::iter::empty()).compact()
    }

    /// Like [`Constraint::display_with`] over [`Constraint::compact_atoms`].
    pub fn display_compact<'a, F: Fn(Var) -> String>(&'a self, names: &'a F) -> String {
        if !self.sat {
            return "false".into();
        }
        let atoms = self.compact_atoms();
        if atoms.is_empty() {
            return "true".into();
        }
        atoms
            .iter()
            .map(|a| a.display_with(names).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| v.to_string();
        ConstraintDisplay {
            c: self,
            names: &names,
        }
        .fmt(f)
    }
}

struct ConstraintDisplay<'a, F> {
    c: &'a Constraint,
    names: &'a F,
}

impl<F: Fn(Var) -> String> fmt::Display for ConstraintDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.c.sat {
            return f.write_str("false");
        }
        if self.c.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.c.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", a.display_with(self.names))?;
        }
        Ok(())
    }
}

/// Read-only closure of a satisfiable or unsatisfiable constraint.
pub struct Closure {
    graph: Graph,
}

impl Closure {
    pub fn is_satisfiable(&self) -> bool {
        self.graph.sat
    }

    /// Whether every solution satisfies `atom`.
    pub fn implies(&self, atom: &Atom) -> bool {
        self.implies_mapped(atom, |v| v)
    }

    /// Like [`Closure::implies`] after renaming the atom's variables.
    pub fn implies_mapped(&self, atom: &Atom, f: impl Fn(Var) -> Var) -> bool {
        if !self.graph.sat {
            return true;
        }
        let node = |t: Term| match t {
            Term::Var(v) => Node::Var(f(v)),
            Term::Const(c) => Node::Val(Rational::from_integer(c)),
        };
        self.graph.implies(atom.rel, node(atom.lhs), node(atom.rhs))
    }
}

fn normalize(a: Atom) -> Atom {
    match (a.rel, a.lhs, a.rhs) {
        (Rel::Eq, l, r) if r < l => Atom {
            lhs: r,
            rel: Rel::Eq,
            rhs: l,
        },
        _ => a,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Node {
    Var(Var),
    Val(Rational),
}

fn edge_of(a: &Atom) -> (Rel, Node, Node) {
    let n = |t: Term| match t {
        Term::Var(v) => Node::Var(v),
        Term::Const(c) => Node::Val(Rational::from_integer(c)),
    };
    (a.rel, n(a.lhs), n(a.rhs))
}

/// Square bit matrix over equivalence classes.
#[derive(Clone, Debug)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn close(&mut self) {
        let w = self.words;
        let mut row_k = vec![0u64; w];
        for k in 0..self.n {
            row_k.copy_from_slice(&self.bits[k * w..(k + 1) * w]);
            for i in 0..self.n {
                if self.get(i, k) {
                    for (dst, src) in self.bits[i * w..(i + 1) * w].iter_mut().zip(&row_k) {
                        *dst |= *src;
                    }
                }
            }
        }
    }

    fn count_row(&self, i: usize) -> u32 {
        self.bits[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }
}

/// Closed order graph. `gt.get(a, b)` means class `a` is strictly above `b`.
#[derive(Clone, Debug)]
struct Graph {
    sat: bool,
    nodes: Vec<Node>,
    class_of: Vec<usize>,
    class_val: Vec<Option<Rational>>,
    /// Greatest constant at or below each class.
    lower: Vec<Option<Rational>>,
    /// Least constant at or above each class.
    upper: Vec<Option<Rational>>,
    gt: BitMatrix,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Graph {
    fn build(
        edges: impl Iterator<Item = (Rel, Node, Node)>,
        fixed: impl Iterator<Item = (Var, Rational)>,
    ) -> Graph {
        let mut edges: Vec<(Rel, Node, Node)> = edges.collect();
        edges.extend(fixed.map(|(v, q)| (Rel::Eq, Node::Var(v), Node::Val(q))));
        let mut nodes: Vec<Node> = edges.iter().flat_map(|(_, a, b)| [*a, *b]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let idx = |n: &Node| nodes.binary_search(n).expect("node registered");

        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        for (rel, a, b) in &edges {
            if *rel == Rel::Eq {
                let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut class_of = vec![0; nodes.len()];
        let mut root_class: Vec<Option<usize>> = vec![None; nodes.len()];
        let mut n_classes = 0;
        for (i, slot) in class_of.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            *slot = *root_class[r].get_or_insert_with(|| {
                n_classes += 1;
                n_classes - 1
            });
        }
        let mut sat = true;
        let mut class_val: Vec<Option<Rational>> = vec![None; n_classes];
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Val(q) = n {
                match class_val[class_of[i]] {
                    Some(prev) if prev != *q => sat = false,
                    _ => class_val[class_of[i]] = Some(*q),
                }
            }
        }
        let mut gt = BitMatrix::new(n_classes);
        for (rel, a, b) in &edges {
            if *rel == Rel::Gt {
                gt.set(class_of[idx(a)], class_of[idx(b)]);
            }
        }
        // Node order puts values sorted; chain consecutive value classes.
        let vals: Vec<(Rational, usize)> = nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                Node::Val(q) => Some((*q, class_of[i])),
                Node::Var(_) => None,
            })
            .collect();
        for w in vals.windows(2) {
            if w[1].0 > w[0].0 {
                gt.set(w[1].1, w[0].1);
            }
        }
        gt.close();
        if (0..n_classes).any(|c| gt.get(c, c)) {
            sat = false;
        }
        let mut lower = vec![None; n_classes];
        let mut upper = vec![None; n_classes];
        if sat {
            for c in 0..n_classes {
                for (d, v) in class_val.iter().enumerate() {
                    let Some(v) = v else { continue };
                    if c == d || gt.get(c, d) {
                        lower[c] = Some(lower[c].map_or(*v, |l: Rational| l.max(*v)));
                    }
                    if c == d || gt.get(d, c) {
                        upper[c] = Some(upper[c].map_or(*v, |u: Rational| u.min(*v)));
                    }
                }
            }
        }
        Graph {
            sat,
            nodes,
            class_of,
            class_val,
            lower,
            upper,
            gt,
        }
    }

    fn class(&self, n: &Node) -> Option<usize> {
        self.nodes.binary_search(n).ok().map(|i| self.class_of[i])
    }

    fn implies(&self, rel: Rel, a: Node, b: Node) -> bool {
        if let (Node::Val(x), Node::Val(y)) = (a, b) {
            return match rel {
                Rel::Eq => x == y,
                Rel::Gt => x > y,
            };
        }
        if a == b {
            return rel == Rel::Eq;
        }
        let (ca, cb) = (self.class(&a), self.class(&b));
        match rel {
            Rel::Eq => matches!((ca, cb), (Some(x), Some(y)) if x == y),
            Rel::Gt => match (ca, cb) {
                (Some(x), Some(y)) => self.gt.get(x, y),
                (Some(x), None) => match b {
                    Node::Val(v) => self.lower[x].is_some_and(|l| l > v),
                    Node::Var(_) => false,
                },
                (None, Some(y)) => match a {
                    Node::Val(v) => self.upper[y].is_some_and(|u| u < v),
                    Node::Var(_) => false,
                },
                (None, None) => false,
            },
        }
    }

    fn canonical(&self, keep: impl Fn(Var) -> bool) -> Constraint {
        if !self.sat {
            return Constraint::bottom();
        }
        let vars: Vec<(Var, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                Node::Var(v) if keep(*v) => Some((*v, self.class_of[i])),
                _ => None,
            })
            .collect();
        let mut atoms = Vec::new();
        for (i, &(x, cx)) in vars.iter().enumerate() {
            for &(y, cy) in &vars[i + 1..] {
                if cx == cy {
                    atoms.push(Atom::eq(x, y));
                } else if self.gt.get(cx, cy) {
                    atoms.push(Atom::gt(x, y));
                } else if self.gt.get(cy, cx) {
                    atoms.push(Atom::gt(y, x));
                }
            }
            if let Some(v) = self.class_val[cx] {
                atoms.push(Atom::eq(x, int_of(v)));
            } else {
                if let Some(l) = self.lower[cx] {
                    atoms.push(Atom::gt(x, int_of(l)));
                }
                if let Some(u) = self.upper[cx] {
                    atoms.push(Atom::gt(int_of(u), x));
                }
            }
        }
        atoms.sort();
        Constraint { sat: true, atoms }
    }

    fn compact(&self) -> Vec<Atom> {
        let n = self.class_val.len();
        let mut rep: Vec<Option<Term>> = self
            .class_val
            .iter()
            .map(|v| v.map(|q| Term::Const(int_of(q))))
            .collect();
        let mut atoms = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Var(v) = node {
                let c = self.class_of[i];
                match rep[c] {
                    None => rep[c] = Some(Term::Var(*v)),
                    Some(r) => atoms.push(Atom {
                        lhs: Term::Var(*v),
                        rel: Rel::Eq,
                        rhs: r,
                    }),
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.gt.get(a, b)
                    || (self.class_val[a].is_some() && self.class_val[b].is_some())
                {
                    continue;
                }
                if (0..n).any(|c| self.gt.get(a, c) && self.gt.get(c, b)) {
                    continue;
                }
                atoms.push(Atom {
                    lhs: rep[a].expect("class has a term"),
                    rel: Rel::Gt,
                    rhs: rep[b].expect("class has a term"),
                });
            }
        }
        atoms
    }

    fn witness(&self) -> BTreeMap<Var, Rational> {
        let n = self.class_val.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&c| (self.gt.count_row(c), c));
        let mut value: Vec<Option<Rational>> = self.class_val.clone();
        for &c in &order {
            if value[c].is_some() {
                continue;
            }
            let lo = (0..n)
                .filter(|&d| self.gt.get(c, d))
                .filter_map(|d| value[d])
                .max();
            let hi = self.upper[c];
            value[c] = Some(pick_between(lo, hi));
        }
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, node)| match node {
                Node::Var(v) => Some((*v, value[self.class_of[i]].expect("assigned"))),
                Node::Val(_) => None,
            })
            .collect()
    }
}

/// Canonical value strictly inside `(lo, hi)`.
pub fn pick_between(lo: Option<Rational>, hi: Option<Rational>) -> Rational {
    let two = Rational::from_integer(2);
    match (lo, hi) {
        (None, None) => Rational::zero(),
        (Some(l), None) => l.floor() + Rational::one(),
        (None, Some(h)) => {
            if h > Rational::zero() {
                Rational::zero()
            } else {
                h.ceil() - Rational::one()
            }
        }
        (Some(l), Some(h)) => {
            let candidate = l.floor() + Rational::one();
            if candidate < h {
                candidate
            } else {
                (l + h) / two
            }
        }
    }
}

fn int_of(q: Rational) -> i64 {
    debug_assert!(
        q.is_integer(),
        "canonical forms only carry integer constants"
    );
    q.to_integer()
}
