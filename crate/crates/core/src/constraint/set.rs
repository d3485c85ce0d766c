use std::sync::Arc;

use super::context::{Context, VarId};
use super::polyhedron::Polyhedron;
use super::valuation::Valuation;
use crate::error::{Error, Result};

/// Finite union of polyhedra over one context.
///
/// Canonical: no empty disjunct, no disjunct contained in another, adjacent
/// pieces merged when their envelope is exactly their union, disjuncts sorted
/// by their text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    ctx: Arc<Context>,
    disjuncts: Vec<Polyhedron>,
}

impl ConstraintSet {
    pub fn empty(ctx: Arc<Context>) -> Self {
        ConstraintSet {
            ctx,
            disjuncts: Vec::new(),
        }
    }

    pub fn universe(ctx: Arc<Context>) -> Self {
        ConstraintSet {
            disjuncts: vec![Polyhedron::universe(ctx.clone())],
            ctx,
        }
    }

    pub fn from_polyhedron(p: Polyhedron) -> Self {
        let ctx = p.context().clone();
        Self::from_disjuncts(ctx, vec![p]).expect("same context")
    }

    pub fn from_disjuncts(ctx: Arc<Context>, disjuncts: Vec<Polyhedron>) -> Result<Self> {
        for d in &disjuncts {
            if **d.context() != *ctx {
                return Err(Error::usage(format!(
                    "disjunct over {} in a set over {ctx}",
                    d.context()
                )));
            }
        }
        Ok(ConstraintSet {
            disjuncts: canonical_union(disjuncts),
            ctx,
        })
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn disjuncts(&self) -> &[Polyhedron] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn is_universe(&self) -> bool {
        self.disjuncts.len() == 1 && self.disjuncts[0].is_universe()
    }

    fn check_same(&self, other: &Context) -> Result<()> {
        if *self.ctx == *other {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "context mismatch: {} vs {other}",
                self.ctx
            )))
        }
    }

    pub fn union(&self, other: &ConstraintSet) -> Result<ConstraintSet> {
        self.check_same(&other.ctx)?;
        let mut all = self.disjuncts.clone();
        all.extend(other.disjuncts.iter().cloned());
        Ok(ConstraintSet {
            ctx: self.ctx.clone(),
            disjuncts: canonical_union(all),
        })
    }

    /// Adds one polyhedron; a no-op when it is already covered.
    pub fn add(&mut self, p: Polyhedron) -> Result<()> {
        self.check_same(p.context())?;
        if p.is_empty() || self.disjuncts.iter().any(|d| d.includes_unchecked(&p)) {
            return Ok(());
        }
        self.disjuncts.push(p);
        self.disjuncts = canonical_union(std::mem::take(&mut self.disjuncts));
        Ok(())
    }

    pub fn intersect(&self, other: &ConstraintSet) -> Result<ConstraintSet> {
        self.check_same(&other.ctx)?;
        let mut out = Vec::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                let m = a.intersect(b)?;
                if !m.is_empty() {
                    out.push(m);
                }
            }
        }
        Ok(ConstraintSet {
            ctx: self.ctx.clone(),
            disjuncts: canonical_union(out),
        })
    }

    pub fn intersect_polyhedron(&self, p: &Polyhedron) -> Result<ConstraintSet> {
        self.intersect(&ConstraintSet::from_polyhedron(p.clone()))
    }

    /// Complement within the nonnegative orthant.
    pub fn negate(&self) -> ConstraintSet {
        let mut rest = vec![Polyhedron::universe(self.ctx.clone())];
        for d in &self.disjuncts {
            rest = subtract_all(rest, d);
            if rest.is_empty() {
                break;
            }
        }
        ConstraintSet {
            ctx: self.ctx.clone(),
            disjuncts: canonical_union(rest),
        }
    }

    pub fn difference(&self, other: &ConstraintSet) -> Result<ConstraintSet> {
        self.check_same(&other.ctx)?;
        let mut rest = self.disjuncts.clone();
        for d in &other.disjuncts {
            rest = subtract_all(rest, d);
        }
        Ok(ConstraintSet {
            ctx: self.ctx.clone(),
            disjuncts: canonical_union(rest),
        })
    }

    /// `true` iff every solution of `other` is a solution of `self`.
    pub fn includes(&self, other: &ConstraintSet) -> Result<bool> {
        self.check_same(&other.ctx)?;
        Ok(other.disjuncts.iter().all(|t| self.covers(t)))
    }

    pub fn includes_polyhedron(&self, p: &Polyhedron) -> Result<bool> {
        self.check_same(p.context())?;
        Ok(self.covers(p))
    }

    fn covers(&self, t: &Polyhedron) -> bool {
        if self.disjuncts.iter().any(|s| s.includes_unchecked(t)) {
            return true;
        }
        let mut rest = vec![t.clone()];
        for s in &self.disjuncts {
            rest = subtract_all(rest, s);
            if rest.is_empty() {
                return true;
            }
        }
        rest.is_empty()
    }

    pub fn set_equal(&self, other: &ConstraintSet) -> Result<bool> {
        Ok(self.includes(other)? && other.includes(self)?)
    }

    pub fn contains_point(&self, point: &[super::rational::Rat]) -> bool {
        self.disjuncts.iter().any(|d| d.contains_point(point))
    }

    pub fn satisfies(&self, val: &Valuation) -> Result<bool> {
        Ok(self.contains_point(&val.point(&self.ctx)?))
    }

    pub fn eliminate(&self, vars: &[VarId]) -> ConstraintSet {
        let ctx = self.ctx.without(vars);
        let disjuncts = self.disjuncts.iter().map(|d| d.eliminate(vars)).collect();
        ConstraintSet {
            ctx,
            disjuncts: canonical_union(disjuncts),
        }
    }

    pub fn project_to_parameters(&self) -> ConstraintSet {
        self.eliminate(&self.ctx.clocks())
    }

    pub fn instantiate(&self, val: &Valuation) -> ConstraintSet {
        let disjuncts: Vec<Polyhedron> = self.disjuncts.iter().map(|d| d.instantiate(val)).collect();
        let ctx = match disjuncts.first() {
            Some(d) => d.context().clone(),
            None => Polyhedron::universe(self.ctx.clone())
                .instantiate(val)
                .context()
                .clone(),
        };
        ConstraintSet {
            ctx,
            disjuncts: canonical_union(disjuncts),
        }
    }

    pub fn embed(&self, ctx: &Arc<Context>) -> Result<ConstraintSet> {
        let disjuncts = self
            .disjuncts
            .iter()
            .map(|d| d.embed(ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintSet {
            ctx: ctx.clone(),
            disjuncts: canonical_union(disjuncts),
        })
    }
}

fn subtract_all(pieces: Vec<Polyhedron>, d: &Polyhedron) -> Vec<Polyhedron> {
    pieces
        .into_iter()
        .flat_map(|r| r.subtract(d).expect("same context"))
        .collect()
}

fn canonical_union(disjuncts: Vec<Polyhedron>) -> Vec<Polyhedron> {
    let mut ds: Vec<Polyhedron> = disjuncts.into_iter().filter(|d| !d.is_empty()).collect();
    ds.sort_by_cached_key(|d| d.to_string());
    ds.dedup();
    ds = drop_covered(ds);
    loop {
        let mut merged = false;
        'outer: for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                if let Some(e) = try_merge(&ds[i], &ds[j]) {
                    ds.swap_remove(j);
                    ds.swap_remove(i);
                    ds.push(e);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
        ds = drop_covered(ds);
    }
    ds.sort_by_cached_key(|d| d.to_string());
    ds
}

fn drop_covered(ds: Vec<Polyhedron>) -> Vec<Polyhedron> {
    let mut keep: Vec<Polyhedron> = Vec::with_capacity(ds.len());
    for (i, d) in ds.iter().enumerate() {
        let covered = ds.iter().enumerate().any(|(k, o)| {
            k != i && o.includes_unchecked(d) && (k < i || !d.includes_unchecked(o))
        });
        if !covered {
            keep.push(d.clone());
        }
    }
    keep
}

/// The envelope of `p` and `q` (their atoms valid on both) when it equals
/// `p ∪ q`.
fn try_merge(p: &Polyhedron, q: &Polyhedron) -> Option<Polyhedron> {
    let ctx = p.context().clone();
    let valid_on = |atoms: &[super::atom::Atom], other: &Polyhedron| {
        atoms
            .iter()
            .flat_map(|a| a.halves())
            .filter(|a| {
                Polyhedron::from_atoms(ctx.clone(), vec![a.clone()])
                    .map(|h| h.includes_unchecked(other))
                    .unwrap_or(false)
            })
            .collect::<Vec<_>>()
    };
    let mut env = valid_on(p.atoms(), q);
    env.extend(valid_on(q.atoms(), p));
    let e = Polyhedron::from_atoms(ctx, env).ok()?;
    let rest = e.subtract(p).ok()?;
    if rest.iter().all(|r| q.includes_unchecked(r)) {
        Some(e)
    } else {
        None
    }
}
