//! Random small specifications and symbolic sets, a brute-force membership
//! test, and the bounded comparison of symbolic and concrete predecessors.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdlmc_core::msr::{AtomTemplate, Configuration, GroundAtom, Predicates, Rule, Spec};
use tdlmc_core::nc::{Atom, Constraint, Rational, Term, Var};
use tdlmc_core::symbolic::{member, sym_pre, ConstrainedConfiguration, SymbolicSet};

use super::order_type::{self, Assignment};

/// Membership by trying every injective placement and searching the value
/// grid for a solution.
pub fn oracle_member(cc: &ConstrainedConfiguration, m: &Configuration) -> bool {
    fn go(
        cc: &ConstrainedConfiguration,
        i: usize,
        m: &Configuration,
        used: &mut [bool],
        fixed: &mut Assignment,
    ) -> bool {
        let Some(t) = cc.atoms().get(i) else {
            let atoms = cc.constraint().atoms();
            if !cc.constraint().is_satisfiable() {
                return false;
            }
            return order_type::grid_search::<ChaCha8Rng>(atoms, fixed, None).is_some();
        };
        for (j, g) in m.atoms().iter().enumerate() {
            if used[j] || g.pred != t.pred || g.args.len() != t.args.len() {
                continue;
            }
            used[j] = true;
            for (v, q) in t.args.iter().zip(&g.args) {
                fixed.insert(*v, *q);
            }
            let ok = go(cc, i + 1, m, used, fixed);
            for v in &t.args {
                fixed.remove(v);
            }
            used[j] = false;
            if ok {
                return true;
            }
        }
        false
    }
    go(cc, 0, m, &mut vec![false; m.len()], &mut Assignment::new())
}

fn random_constraint(rng: &mut impl Rng, vars: &[Var], max_atoms: usize) -> Constraint {
    if vars.is_empty() {
        return Constraint::top();
    }
    let n = rng.gen_range(0..=max_atoms);
    let term = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.25) {
            Term::Const(rng.gen_range(0..=2))
        } else {
            Term::Var(vars[rng.gen_range(0..vars.len())])
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let atoms: Vec<Atom> = (0..n)
        .map(|_| {
            let l = Term::Var(vars[r.gen_range(0..vars.len())]);
            let rr = term(&mut r);
            if r.gen_bool(0.4) {
                Atom::eq(l, rr)
            } else if r.gen_bool(0.5) {
                Atom::gt(l, rr)
            } else {
                Atom::gt(rr, l)
            }
        })
        .collect();
    Constraint::new(atoms)
}

fn random_templates(
    rng: &mut impl Rng,
    preds: &Predicates,
    n: usize,
    next: &mut u32,
) -> Vec<AtomTemplate> {
    (0..n)
        .map(|_| {
            let p = tdlmc_core::msr::Pred(rng.gen_range(0..preds.len() as u32));
            let args = (0..preds.arity(p))
                .map(|_| {
                    *next += 1;
                    Var(*next - 1)
                })
                .collect();
            AtomTemplate::new(p, args)
        })
        .collect()
}

/// Up to three predicates of arity at most two, up to four rules with at
/// most two atoms per side and at most three variables on the right.
pub fn random_spec(rng: &mut impl Rng) -> Spec {
    let mut predicates = Predicates::default();
    for i in 0..rng.gen_range(1..=3) {
        predicates
            .declare(&format!("p{i}"), rng.gen_range(0..=2))
            .unwrap();
    }
    let mut rules = Vec::new();
    let want = rng.gen_range(1..=4);
    while rules.len() < want {
        let mut next = 0;
        let (nh, nb) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let head = random_templates(rng, &predicates, nh, &mut next);
        let split = next;
        let body = random_templates(rng, &predicates, nb, &mut next);
        if next - split > 3 {
            continue;
        }
        let vars: Vec<Var> = (0..next).map(Var).collect();
        let c = random_constraint(rng, &vars, 3);
        if !c.is_satisfiable() {
            continue;
        }
        let names = vars.iter().map(|v| v.to_string()).collect();
        rules.push(Rule::new(format!("r{}", rules.len()), head, body, c, names).unwrap());
    }
    Spec {
        predicates,
        initial: vec![],
        rules,
    }
}

pub fn random_set(rng: &mut impl Rng, preds: &Predicates) -> SymbolicSet {
    let mut out = SymbolicSet::default();
    for _ in 0..rng.gen_range(1..=2) {
        let mut next = 0;
        let n = rng.gen_range(1..=2);
        let atoms = random_templates(rng, preds, n, &mut next);
        let vars: Vec<Var> = (0..next).map(Var).collect();
        if let Some(cc) = ConstrainedConfiguration::new(atoms, random_constraint(rng, &vars, 2)) {
            out.insert(cc);
        }
    }
    out
}

/// Every multiset of at most `size` ground atoms with values in `0..=max`.
pub fn universe(preds: &Predicates, size: usize, max: i64) -> Vec<Configuration> {
    let mut ground = Vec::new();
    for (p, _, arity) in preds.iter() {
        let mut tuples: Vec<Vec<Rational>> = vec![vec![]];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..=max).map(move |v| {
                        let mut t = t.clone();
                        t.push(Rational::from_integer(v));
                        t
                    })
                })
                .collect();
        }
        ground.extend(tuples.into_iter().map(|args| GroundAtom::new(p, args)));
    }
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        ground: &[GroundAtom],
        from: usize,
        left: usize,
        pick: &mut Vec<GroundAtom>,
        out: &mut Vec<Configuration>,
    ) {
        out.push(Configuration::new(pick.clone()));
        if left == 0 {
            return;
        }
        for i in from..ground.len() {
            pick.push(ground[i].clone());
            rec(ground, i, left - 1, pick, out);
            pick.pop();
        }
    }
    rec(&ground, 0, size, &mut pick, &mut out);
    out
}

/// Whether some one-step successor of `m`, over every order type of the
/// new values, lies in the denotation of `s`.
pub fn concrete_pre_member(spec: &Spec, s: &SymbolicSet, m: &Configuration) -> bool {
    let mut anchors: BTreeSet<Rational> = (0..=2).map(Rational::from_integer).collect();
    anchors.extend(m.values());
    let preds: Vec<_> = spec.predicates.iter().map(|(p, _, _)| p).collect();
    spec.rules.iter().any(|r| {
        // the predicate counts of a successor do not depend on the values;
        // skip rules whose successors cannot cover any member
        let n = |side: &[AtomTemplate], p| side.iter().filter(|a| a.pred == p).count();
        let after: Option<Vec<usize>> = preds
            .iter()
            .map(|&p| {
                m.count(p)
                    .checked_sub(n(&r.head, p))
                    .map(|k| k + n(&r.body, p))
            })
            .collect();
        let Some(after) = after else { return false };
        let coverable = s.members().iter().any(|cc| {
            preds
                .iter()
                .zip(&after)
                .all(|(&p, &k)| n(cc.atoms(), p) <= k)
        });
        coverable
            && r.all_instances(m, &anchors)
                .into_iter()
                .filter_map(|sigma| r.fire(m, &sigma).ok())
                .any(|next| s.members().iter().any(|cc| member(cc, &next)))
    })
}

#[derive(Debug, Default)]
pub struct DualityTally {
    pub cases: usize,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

/// Compares the bounded denotation of `sym_pre` with concrete
/// predecessors for `cases` random specs and sets.
pub fn duality(cases: usize, seed: u64) -> DualityTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = DualityTally::default();
    for case in 0..cases {
        let spec = random_spec(&mut rng);
        let s = random_set(&mut rng, &spec.predicates);
        let pre = sym_pre(&spec.rules, &s);
        tally.cases += 1;
        for m in universe(&spec.predicates, 3, 4) {
            tally.checked += 1;
            let symbolic = pre.members().iter().any(|cc| member(cc, &m));
            let concrete = concrete_pre_member(&spec, &s, &m);
            if symbolic != concrete && tally.mismatches.len() < 10 {
                tally.mismatches.push(format!(
                    "case {case}: {} symbolic={symbolic} concrete={concrete}\n{}",
                    m.display(&spec.predicates),
                    spec.to_text()
                ));
            }
        }
    }
    tally
}
