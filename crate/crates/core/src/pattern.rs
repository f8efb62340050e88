//! Bad-state patterns: multisets of located variable tuples with a name
//! constraint, read from `unsafe { ... }` files.

use thiserror::Error;

use crate::msr::{Predicates, VarTable};
use crate::nc::{Atom, Constraint, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("expected `unsafe {{ ... }}`")]
    Shape,
    #[error("member {member}: {message}")]
    Member { member: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternAtom {
    pub location: String,
    pub vars: Vec<Var>,
}

/// Upward-closed set of configurations containing locals at the given
/// locations whose values satisfy the constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsafePattern {
    pub atoms: Vec<PatternAtom>,
    pub constraint: Constraint,
    pub var_names: Vec<String>,
}

impl UnsafePattern {
    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }
}

/// Parses `unsafe { a(x) | b(y) : x = y ; ... }`. A variable repeated
/// across atoms stands for equal values.
pub fn parse_unsafe(text: &str) -> Result<Vec<UnsafePattern>, PatternError> {
    let cleaned: String = text
        .lines()
        .map(|l| l.split("//").next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    let rest = cleaned
        .trim()
        .strip_prefix("unsafe")
        .ok_or(PatternError::Shape)?
        .trim();
    let inner = rest
        .strip_prefix('{')
        .and_then(|r| r.trim_end().strip_suffix('}'))
        .ok_or(PatternError::Shape)?;
    let mut out = Vec::new();
    for (i, member) in inner
        .split(';')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .enumerate()
    {
        let err = |message: String| PatternError::Member {
            member: i + 1,
            message,
        };
        let (atoms, constraint) = member.split_once(':').unwrap_or((member, ""));
        let mut preds = Predicates::default();
        let mut vars = VarTable::default();
        let mut resolve = |n: &str, k: usize| preds.declare(n, k).map_err(|e| e.to_string());
        let templates = crate::msr::parse_templates(atoms, &mut resolve, &mut vars).map_err(err)?;
        if templates.is_empty() {
            return Err(err("no atoms".into()));
        }
        let constraint = crate::msr::parse_constraint_with(constraint, &mut vars).map_err(err)?;
        // split repeated occurrences into fresh variables tied by equalities
        let mut seen = std::collections::BTreeSet::new();
        let mut extra = Vec::new();
        let mut names = vars.names().to_vec();
        let mut pattern_atoms = Vec::new();
        for t in &templates {
            let mut vs = Vec::new();
            for &v in &t.args {
                if seen.insert(v) {
                    vs.push(v);
                } else {
                    let w = Var(names.len() as u32);
                    names.push(format!("{}_{}", names[v.0 as usize], names.len()));
                    extra.push(Atom::eq(w, v));
                    vs.push(w);
                }
            }
            pattern_atoms.push(PatternAtom {
                location: preds.name(t.pred).to_string(),
                vars: vs,
            });
        }
        if let Some(v) = constraint.vars().into_iter().find(|v| !seen.contains(v)) {
            return Err(err(format!(
                "constraint variable {} does not occur in the atoms",
                names[v.0 as usize]
            )));
        }
        out.push(UnsafePattern {
            atoms: pattern_atoms,
            constraint: constraint.with_atoms(extra),
            var_names: names,
        });
    }
    if out.is_empty() {
        return Err(PatternError::Shape);
    }
    Ok(out)
}
