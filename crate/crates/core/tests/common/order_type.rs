//! Brute-force decision procedures for name constraints, written without
//! reference to the library's closure algorithm.
//!
//! An order type places every variable either exactly on one of the given
//! integer constants or inside one of the open gaps around them, together
//! with a weak order among variables. Atoms compare only with `=` and `>`,
//! so the truth of a constraint depends on the order type alone.

use std::collections::BTreeMap;

use rand::Rng;
use tdlmc_core::nc::{Atom, Rational, Rel, Term, Var};

pub type Assignment = BTreeMap<Var, Rational>;

/// One representative assignment per order type of `vars` relative to
/// `consts`.
pub fn order_types(vars: &[Var], consts: &[i64]) -> Vec<Assignment> {
    let mut consts = consts.to_vec();
    consts.sort_unstable();
    consts.dedup();
    let mut out = Vec::new();
    for blocks in ordered_partitions(vars) {
        let mut slots = Vec::with_capacity(blocks.len());
        place(&blocks, &consts, 0, &mut slots, &mut out);
    }
    out
}

fn ordered_partitions(vars: &[Var]) -> Vec<Vec<Vec<Var>>> {
    let mut acc: Vec<Vec<Vec<Var>>> = vec![Vec::new()];
    for &v in vars {
        let mut next = Vec::new();
        for p in &acc {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].push(v);
                next.push(q);
            }
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, vec![v]);
                next.push(q);
            }
        }
        acc = next;
    }
    acc
}

/// Slot `2g` is the open gap below constant `g` (or above all when
/// `g == consts.len()`); slot `2j + 1` is constant `j` itself.
fn place(
    blocks: &[Vec<Var>],
    consts: &[i64],
    min_slot: usize,
    slots: &mut Vec<usize>,
    out: &mut Vec<Assignment>,
) {
    let i = slots.len();
    if i == blocks.len() {
        out.push(realize(blocks, consts, slots));
        return;
    }
    for s in min_slot..=2 * consts.len() {
        if let Some(&prev) = slots.last() {
            if s == prev && (s % 2 == 1) {
                continue;
            }
        }
        slots.push(s);
        // a constant slot holds one block; a gap may hold several
        let next_min = if s % 2 == 1 { s + 1 } else { s };
        place(blocks, consts, next_min, slots, out);
        slots.pop();
    }
}

fn realize(blocks: &[Vec<Var>], consts: &[i64], slots: &[usize]) -> Assignment {
    let q = Rational::from_integer;
    let mut out = Assignment::new();
    let mut i = 0;
    while i < blocks.len() {
        let s = slots[i];
        let mut j = i;
        while j < blocks.len() && slots[j] == s {
            j += 1;
        }
        let t = (j - i) as i64;
        for (k, block) in blocks[i..j].iter().enumerate() {
            let k = k as i64;
            let value = if s % 2 == 1 {
                q(consts[s / 2])
            } else {
                let g = s / 2;
                let lo = if g > 0 { Some(consts[g - 1]) } else { None };
                let hi = consts.get(g).copied();
                match (lo, hi) {
                    (Some(l), Some(h)) => q(l) + Rational::new((h - l) * (k + 1), t + 1),
                    (Some(l), None) => q(l + k + 1),
                    (None, Some(h)) => q(h - t + k),
                    (None, None) => q(k),
                }
            };
            for v in block {
                out.insert(*v, value);
            }
        }
        i = j;
    }
    out
}

pub fn holds(atoms: &[Atom], a: &Assignment) -> bool {
    atoms.iter().all(|atom| {
        atom.holds(|v| a.get(&v).copied())
            .expect("assignment covers atom")
    })
}

pub fn atom_vars(atoms: &[Atom]) -> Vec<Var> {
    let mut vs: Vec<Var> = atoms.iter().flat_map(|a| a.vars()).collect();
    vs.sort();
    vs.dedup();
    vs
}

pub fn atom_consts(atoms: &[Atom]) -> Vec<i64> {
    let mut cs: Vec<i64> = atoms
        .iter()
        .flat_map(|a| [a.lhs, a.rhs])
        .filter_map(|t| match t {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        })
        .collect();
    cs.sort_unstable();
    cs.dedup();
    cs
}

/// Negation of one atom as a disjunction of atoms.
pub fn negate(a: &Atom) -> Vec<Atom> {
    match a.rel {
        Rel::Eq => vec![
            Atom {
                lhs: a.lhs,
                rel: Rel::Gt,
                rhs: a.rhs,
            },
            Atom {
                lhs: a.rhs,
                rel: Rel::Gt,
                rhs: a.lhs,
            },
        ],
        Rel::Gt => vec![
            Atom {
                lhs: a.lhs,
                rel: Rel::Eq,
                rhs: a.rhs,
            },
            Atom {
                lhs: a.rhs,
                rel: Rel::Gt,
                rhs: a.lhs,
            },
        ],
    }
}

/// Finite set of values realizing every order type of `free` variables
/// relative to `anchors`: the anchors themselves plus `free` distinct points
/// in each gap.
fn grid(anchors: &[Rational], free: usize) -> Vec<Rational> {
    let mut a = anchors.to_vec();
    a.sort();
    a.dedup();
    let n = free.max(1) as i64;
    let mut out = a.clone();
    if a.is_empty() {
        out.extend((0..n).map(Rational::from_integer));
        return out;
    }
    for k in 1..=n {
        out.push(a[0] - Rational::from_integer(k));
        out.push(a[a.len() - 1] + Rational::from_integer(k));
    }
    for w in a.windows(2) {
        for k in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * Rational::new(k, n + 1));
        }
    }
    out.sort();
    out
}

/// Backtracking search for a solution extending `fixed`. With an rng the
/// candidate order is shuffled, which samples solutions.
pub fn grid_search<R: Rng>(
    atoms: &[Atom],
    fixed: &Assignment,
    rng: Option<&mut R>,
) -> Option<Assignment> {
    let free: Vec<Var> = atom_vars(atoms)
        .into_iter()
        .filter(|v| !fixed.contains_key(v))
        .collect();
    let mut anchors: Vec<Rational> = atom_consts(atoms)
        .into_iter()
        .map(Rational::from_integer)
        .collect();
    anchors.extend(fixed.values().copied());
    let points = grid(&anchors, free.len());
    let mut assign = fixed.clone();
    let mut rng = rng;
    if dfs(atoms, &free, &points, &mut assign, &mut rng) {
        Some(assign)
    } else {
        None
    }
}

fn dfs<R: Rng>(
    atoms: &[Atom],
    free: &[Var],
    points: &[Rational],
    assign: &mut Assignment,
    rng: &mut Option<&mut R>,
) -> bool {
    let Some((&v, rest)) = free.split_first() else {
        return holds(atoms, assign);
    };
    let mut order: Vec<Rational> = points.to_vec();
    if let Some(r) = rng.as_deref_mut() {
        use rand::seq::SliceRandom;
        order.shuffle(r);
    }
    for p in order {
        assign.insert(v, p);
        let consistent = atoms
            .iter()
            .all(|a| a.holds(|x| assign.get(&x).copied()).unwrap_or(true));
        if consistent && dfs(atoms, rest, points, assign, rng) {
            return true;
        }
    }
    assign.remove(&v);
    false
}

pub fn search_sat(atoms: &[Atom]) -> bool {
    grid_search::<rand::rngs::ThreadRng>(atoms, &Assignment::new(), None).is_some()
}

/// `Sol(a) ⊆ Sol(b)` by refuting `a ∧ ¬β` for each atom β of `b`.
pub fn search_entails(a: &[Atom], b: &[Atom]) -> bool {
    b.iter().all(|beta| {
        negate(beta).into_iter().all(|n| {
            let mut with = a.to_vec();
            with.push(n);
            !search_sat(&with)
        })
    })
}
