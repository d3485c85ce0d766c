//! JSON form of constraint sets: an array of disjuncts, each an array of
//! atoms `{"terms": [{"var": "p", "coeff": "1"}], "rel": "<", "rhs": "1"}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::atom::{Atom, Cmp, Rel};
use super::context::Context;
use super::polyhedron::Polyhedron;
use super::rational::{fmt_rat, parse_rat, Rat};
use super::set::ConstraintSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub var: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub terms: Vec<TermJson>,
    pub rel: Cmp,
    pub rhs: String,
}

pub type ConstraintJson = Vec<Vec<AtomJson>>;

pub fn atom_to_json(ctx: &Context, a: &Atom) -> AtomJson {
    AtomJson {
        terms: a
            .support()
            .map(|j| TermJson {
                var: ctx.vars()[j].name.clone(),
                coeff: a.coeff(j).to_string(),
            })
            .collect(),
        rel: match a.rel() {
            Rel::Lt => Cmp::Lt,
            Rel::Le => Cmp::Le,
            Rel::Eq => Cmp::Eq,
        },
        rhs: a.rhs().to_string(),
    }
}

pub fn to_json(set: &ConstraintSet) -> ConstraintJson {
    let ctx = set.context();
    set.disjuncts()
        .iter()
        .map(|d| d.atoms().iter().map(|a| atom_to_json(ctx, a)).collect())
        .collect()
}

pub fn atom_from_json(ctx: &Context, a: &AtomJson) -> Result<Atom> {
    let mut coeffs = vec![Rat::from_integer(0.into()); ctx.len()];
    for t in &a.terms {
        let j = ctx
            .lookup(&t.var)
            .ok_or_else(|| Error::usage(format!("unknown variable `{}`", t.var)))?;
        coeffs[j.0] += parse_rat(&t.coeff)?;
    }
    Ok(Atom::new(&coeffs, a.rel, &parse_rat(&a.rhs)?))
}

pub fn from_json(ctx: &Arc<Context>, value: &ConstraintJson) -> Result<ConstraintSet> {
    let disjuncts = value
        .iter()
        .map(|d| {
            let atoms = d
                .iter()
                .map(|a| atom_from_json(ctx, a))
                .collect::<Result<Vec<_>>>()?;
            Polyhedron::from_atoms(ctx.clone(), atoms)
        })
        .collect::<Result<Vec<_>>>()?;
    ConstraintSet::from_disjuncts(ctx.clone(), disjuncts)
}

/// Rational rendered the way the JSON forms expect.
pub fn rat_string(r: &Rat) -> String {
    fmt_rat(r)
}
