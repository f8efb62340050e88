//! Cross-check of satisfiability, entailment and elimination against the
//! order-type oracle.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdlmc_core::nc::{Atom, Constraint, Term, Var};

use super::order_type::{self, Assignment};

#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

/// Every atom over `vars` and `consts` up to orientation of `=`.
pub fn atom_universe(vars: &[Var], consts: &[i64]) -> Vec<Atom> {
    let mut out = Vec::new();
    for (i, &x) in vars.iter().enumerate() {
        for &y in &vars[i + 1..] {
            out.push(Atom::eq(x, y));
        }
        for &y in vars {
            if x != y {
                out.push(Atom::gt(x, y));
            }
        }
        for &c in consts {
            out.push(Atom::eq(x, c));
            out.push(Atom::gt(x, c));
            out.push(Atom::gt(c, x));
        }
    }
    out
}

fn mask_of(universe: &[Atom], a: &Assignment) -> u64 {
    let mut m = 0u64;
    for (i, atom) in universe.iter().enumerate() {
        if order_type::holds(std::slice::from_ref(atom), a) {
            m |= 1 << i;
        }
    }
    m
}

/// Exhaustive enumeration of atom sets (by increasing size, stopping at
/// `cap`) over 4 variables and constants {0,1,2}. Each order type is
/// summarized as a bitmask of true atoms, so satisfiability, implied atoms
/// and projections reduce to mask arithmetic.
pub fn exhaustive(cap: usize) -> Tally {
    let vars: Vec<Var> = (0..4).map(Var).collect();
    let consts = [0, 1, 2];
    let universe = atom_universe(&vars, &consts);
    assert!(universe.len() <= 64);
    let types: Vec<u64> = order_type::order_types(&vars, &consts)
        .iter()
        .map(|a| mask_of(&universe, a))
        .collect();
    let keep_masks: Vec<(Vec<Var>, u64)> = (0..4u32)
        .map(|drop| {
            let keep: Vec<Var> = vars.iter().copied().filter(|v| v.0 != drop).collect();
            let mut m = 0u64;
            for (i, atom) in universe.iter().enumerate() {
                if atom.vars().all(|v| v.0 != drop) {
                    m |= 1 << i;
                }
            }
            (keep, m)
        })
        .collect();

    let mut tally = Tally::default();
    let n = universe.len();
    let mut combo: Vec<usize> = Vec::new();
    'sizes: for size in 0..=n {
        combo.clear();
        combo.extend(0..size);
        loop {
            if tally.cases >= cap {
                break 'sizes;
            }
            let atoms: Vec<Atom> = combo.iter().map(|&i| universe[i]).collect();
            let want: u64 = combo.iter().fold(0, |m, &i| m | 1 << i);
            check_one(&atoms, want, &universe, &types, &keep_masks, &mut tally);
            tally.cases += 1;
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    tally
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn check_one(
    atoms: &[Atom],
    want: u64,
    universe: &[Atom],
    types: &[u64],
    keep_masks: &[(Vec<Var>, u64)],
    tally: &mut Tally,
) {
    let c = Constraint::new(atoms.iter().copied());
    let sols: Vec<u64> = types.iter().copied().filter(|t| t & want == want).collect();
    let oracle_sat = !sols.is_empty();
    if c.is_satisfiable() != oracle_sat {
        tally.mismatches.push(format!(
            "sat {atoms:?}: got {}, oracle {oracle_sat}",
            c.is_satisfiable()
        ));
        return;
    }
    let implied = sols.iter().fold(u64::MAX, |m, t| m & t);
    for (i, atom) in universe.iter().enumerate() {
        let single = Constraint::new([*atom]);
        let got = c.entails(&single);
        let oracle = implied >> i & 1 == 1;
        if got != oracle {
            tally.mismatches.push(format!(
                "entails {atoms:?} |= {atom:?}: got {got}, oracle {oracle}"
            ));
        }
    }
    // a random-ish two-atom right-hand side exercises multi-atom entailment
    let (i, j) = (
        (want.count_ones() as usize * 7) % universe.len(),
        (want as usize / 3) % universe.len(),
    );
    let pair = Constraint::new([universe[i], universe[j]]);
    let oracle_pair = implied >> i & 1 == 1 && implied >> j & 1 == 1;
    let pair_sat = Constraint::new([universe[i], universe[j]]).is_satisfiable();
    if pair_sat && c.entails(&pair) != oracle_pair {
        tally
            .mismatches
            .push(format!("entails {atoms:?} |= pair {i},{j}"));
    }
    for (d, (_, km)) in keep_masks.iter().enumerate() {
        let e = c.eliminate(&[Var(d as u32)]);
        if e.vars().contains(&Var(d as u32)) {
            tally.mismatches.push(format!("eliminate left v{d} in {e}"));
            continue;
        }
        let proj: BTreeSet<u64> = sols.iter().map(|t| t & km).collect();
        let e_atoms = e.atoms();
        let e_want = mask_for(universe, e_atoms);
        let elim: BTreeSet<u64> = match e_want {
            Some(w) if e.is_satisfiable() => types
                .iter()
                .filter(|t| *t & w == w)
                .map(|t| t & km)
                .collect(),
            Some(_) => BTreeSet::new(),
            None => {
                tally.mismatches.push(format!(
                    "eliminate produced an atom outside the universe: {e}"
                ));
                continue;
            }
        };
        if proj != elim {
            tally
                .mismatches
                .push(format!("eliminate v{d} from {atoms:?} gave {e}"));
        }
    }
}

fn mask_for(universe: &[Atom], atoms: &[Atom]) -> Option<u64> {
    let mut m = 0;
    for a in atoms {
        let flipped = Atom {
            lhs: a.rhs,
            rel: a.rel,
            rhs: a.lhs,
        };
        let i = universe
            .iter()
            .position(|u| u == a || (a.rel == tdlmc_core::nc::Rel::Eq && *u == flipped))?;
        m |= 1u64 << i;
    }
    Some(m)
}

/// Random instances over up to 6 variables and constants {0..4}, decided by
/// the backtracking grid oracle.
pub fn random_larger(cases: usize, seed: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        tally.cases += 1;
        let nvars = rng.gen_range(4..=6);
        let (na, nb) = (rng.gen_range(2..=8), rng.gen_range(1..=3));
        let a = random_atoms(&mut rng, nvars, na);
        let b = random_atoms(&mut rng, nvars, nb);
        let ca = Constraint::new(a.iter().copied());
        let cb = Constraint::new(b.iter().copied());
        let sat = order_type::search_sat(&a);
        if ca.is_satisfiable() != sat {
            tally.mismatches.push(format!("sat {a:?}"));
            continue;
        }
        if sat {
            let mut w = ca
                .witness(&Assignment::new())
                .expect("satisfiable constraint has a witness");
            complete(&mut w, nvars);
            if !order_type::holds(&a, &w) {
                tally.mismatches.push(format!("witness {w:?} fails {a:?}"));
            }
        }
        let got = ca.entails(&cb);
        let want = order_type::search_entails(&a, &b);
        if got != want {
            tally
                .mismatches
                .push(format!("entails {a:?} |= {b:?}: got {got}, oracle {want}"));
        }
        if got {
            for _ in 0..20 {
                let sample =
                    order_type::grid_search(&a, &Assignment::new(), Some(&mut rng)).map(|mut s| {
                        complete(&mut s, nvars);
                        s
                    });
                match sample {
                    Some(s) if !order_type::holds(&b, &s) => {
                        tally
                            .mismatches
                            .push(format!("sampled solution of {a:?} violates {b:?}"));
                        break;
                    }
                    _ => {}
                }
            }
        }
        if sat {
            let drop: Vec<Var> = (0..nvars as u32)
                .filter(|_| rng.gen_bool(0.4))
                .map(Var)
                .collect();
            let e = ca.eliminate(&drop);
            if !order_type::search_entails(&a, e.atoms()) {
                tally
                    .mismatches
                    .push(format!("eliminate {drop:?} of {a:?} is not implied: {e}"));
            }
            for _ in 0..10 {
                let Some(s) =
                    order_type::grid_search(e.atoms(), &Assignment::new(), Some(&mut rng))
                else {
                    tally
                        .mismatches
                        .push(format!("eliminate {drop:?} of {a:?} unsat: {e}"));
                    break;
                };
                let fixed: Assignment = s.into_iter().filter(|(v, _)| !drop.contains(v)).collect();
                if order_type::grid_search::<ChaCha8Rng>(&a, &fixed, None).is_none() {
                    tally.mismatches.push(format!(
                        "eliminate {drop:?} of {a:?}: {fixed:?} does not extend"
                    ));
                    break;
                }
            }
        }
    }
    tally
}

/// Variables that only occur in trivial atoms such as `x=x` may be absent
/// from a solution; any value works for them.
fn complete(a: &mut Assignment, nvars: usize) {
    for v in 0..nvars as u32 {
        a.entry(Var(v))
            .or_insert_with(|| num_rational::Ratio::from_integer(0));
    }
}

pub fn random_atoms(rng: &mut impl Rng, nvars: usize, n: usize) -> Vec<Atom> {
    let term = |rng: &mut dyn rand::RngCore, allow_const: bool| -> Term {
        if allow_const && rng.gen_bool(0.3) {
            Term::Const(rng.gen_range(0..=4))
        } else {
            Term::Var(Var(rng.gen_range(0..nvars as u32)))
        }
    };
    (0..n)
        .map(|_| {
            let lhs = term(rng, true);
            let rhs = term(rng, !matches!(lhs, Term::Const(_)));
            if rng.gen_bool(0.35) {
                Atom::eq(lhs, rhs)
            } else {
                Atom::gt(lhs, rhs)
            }
        })
        .collect()
}
