use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Cmp, Rel};
use super::context::{Context, VarId};
use super::lp::{self, LpOutcome, LpRow};
use super::rational::{gcd_all, Rat};
use super::valuation::Valuation;
use crate::error::{Error, Result};

/// Convex polyhedron over a [`Context`], nonnegativity of every variable
/// implied.
///
/// Always kept canonical: equalities in reduced form (each solved for its
/// highest-index variable), no implied equalities among the inequalities,
/// no redundant atoms, atoms sorted.  The empty polyhedron is `[0 < 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    ctx: Arc<Context>,
    atoms: Vec<Atom>,
}

impl Polyhedron {
    pub fn universe(ctx: Arc<Context>) -> Self {
        Polyhedron {
            ctx,
            atoms: Vec::new(),
        }
    }

    pub fn empty(ctx: Arc<Context>) -> Self {
        let dim = ctx.len();
        Polyhedron {
            ctx,
            atoms: vec![Atom::falsum(dim)],
        }
    }

    pub fn from_atoms(ctx: Arc<Context>, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.dim() != ctx.len()) {
            return Err(Error::usage(format!(
                "atom over {} variables used in context {ctx}",
                a.dim()
            )));
        }
        Ok(Self::build(ctx, atoms))
    }

    fn build(ctx: Arc<Context>, atoms: Vec<Atom>) -> Self {
        let dim = ctx.len();
        match canonicalize(dim, atoms) {
            Some(atoms) => Polyhedron { ctx, atoms },
            None => Polyhedron::empty(ctx),
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.ctx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].is_falsum()
    }

    pub fn is_universe(&self) -> bool {
        self.atoms.is_empty()
    }

    fn check_same(&self, other: &Polyhedron) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "context mismatch: {} vs {}",
                self.ctx, other.ctx
            )))
        }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        self.check_same(other)?;
        if self.is_empty() || other.is_universe() {
            return Ok(self.clone());
        }
        if other.is_empty() || self.is_universe() {
            return Ok(other.clone());
        }
        Ok(self.constrain(other.atoms.iter().cloned()))
    }

    /// Conjoins extra atoms over the same context.
    pub fn constrain(&self, extra: impl IntoIterator<Item = Atom>) -> Polyhedron {
        if self.is_empty() {
            return self.clone();
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(extra);
        debug_assert!(atoms.iter().all(|a| a.dim() == self.dim()));
        Self::build(self.ctx.clone(), atoms)
    }

    /// `true` iff `other ⊆ self`.
    pub fn includes(&self, other: &Polyhedron) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.includes_unchecked(other))
    }

    pub(crate) fn includes_unchecked(&self, other: &Polyhedron) -> bool {
        if other.is_empty() || self.is_universe() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        let dim = self.dim();
        for a in &self.atoms {
            if other.atoms.contains(a) {
                continue;
            }
            for neg in a.negation() {
                let rows = other.atoms.iter().chain(std::iter::once(&neg));
                if lp::is_feasible(dim, rows) {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains_point(&self, point: &[Rat]) -> bool {
        point.iter().all(|v| !v.is_negative()) && self.atoms.iter().all(|a| a.holds(point))
    }

    pub fn satisfies(&self, val: &Valuation) -> Result<bool> {
        Ok(self.contains_point(&val.point(&self.ctx)?))
    }

    /// Some point of the polyhedron, if nonempty.
    pub fn sample_point(&self) -> Option<Vec<Rat>> {
        if self.is_empty() {
            return None;
        }
        lp::find_point(self.dim(), &self.atoms)
    }

    /// Existential projection that keeps the context; eliminated variables
    /// become unconstrained apart from nonnegativity.
    pub fn exists(&self, vars: &[VarId]) -> Polyhedron {
        if self.is_empty() || vars.is_empty() {
            return self.clone();
        }
        let mut atoms = self.atoms.clone();
        let mut order: Vec<usize> = vars.iter().map(|v| v.0).collect();
        order.sort_unstable();
        order.dedup();
        for j in order {
            if !atoms.iter().any(|a| a.mentions(j)) {
                continue;
            }
            let stepped = fm_step(self.dim(), atoms, j);
            match canonicalize(self.dim(), stepped) {
                Some(next) => atoms = next,
                None => return Polyhedron::empty(self.ctx.clone()),
            }
        }
        Polyhedron {
            ctx: self.ctx.clone(),
            atoms,
        }
    }

    /// Fourier-Motzkin elimination; the result lives over `context ∖ vars`.
    pub fn eliminate(&self, vars: &[VarId]) -> Polyhedron {
        let projected = self.exists(vars);
        let ctx = self.ctx.without(vars);
        projected.drop_columns(vars, ctx)
    }

    fn drop_columns(&self, vars: &[VarId], ctx: Arc<Context>) -> Polyhedron {
        if self.is_empty() {
            return Polyhedron::empty(ctx);
        }
        let (map, dim) = column_map(self.dim(), vars);
        let atoms = self.atoms.iter().map(|a| a.remap(&map, dim)).collect();
        Polyhedron { ctx, atoms }
    }

    /// Lets time pass: every clock advances by the same nonnegative delay.
    pub fn time_elapse(&self) -> Polyhedron {
        if self.is_empty() {
            return self.clone();
        }
        let clocks = self.ctx.clocks();
        if clocks.is_empty() {
            return self.clone();
        }
        let dim = self.dim();
        let d = dim;
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.atoms.len() + clocks.len());
        for a in &self.atoms {
            let mut coeffs: Vec<BigInt> = a.coeffs().to_vec();
            let shift: BigInt = clocks.iter().map(|c| a.coeff(c.0)).sum();
            coeffs.push(-shift);
            atoms.push(Atom::raw(coeffs, a.rel(), a.rhs().clone()));
        }
        for c in &clocks {
            // x - d >= 0
            let mut coeffs = vec![BigInt::zero(); dim + 1];
            coeffs[c.0] = BigInt::from(-1);
            coeffs[d] = BigInt::one();
            atoms.push(Atom::raw(coeffs, Rel::Le, BigInt::zero()));
        }
        let stepped = fm_step(dim + 1, atoms, d);
        let map: Vec<Option<usize>> = (0..=dim).map(|j| (j < dim).then_some(j)).collect();
        let atoms = stepped.iter().map(|a| a.remap(&map, dim)).collect();
        Self::build(self.ctx.clone(), atoms)
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[VarId]) -> Polyhedron {
        if clocks.is_empty() || self.is_empty() {
            return self.clone();
        }
        let freed = self.exists(clocks);
        if freed.is_empty() {
            return freed;
        }
        let dim = self.dim();
        freed.constrain(clocks.iter().map(|c| Atom::zero(dim, c.0)))
    }

    pub fn project_to_parameters(&self) -> Polyhedron {
        self.eliminate(&self.ctx.clocks())
    }

    /// Replaces every variable assigned by `val` with its value and drops it
    /// from the context.
    pub fn instantiate(&self, val: &Valuation) -> Polyhedron {
        let fixed: Vec<(VarId, Rat)> = self
            .ctx
            .ids()
            .filter_map(|i| val.get(&self.ctx.var(i).name).map(|v| (i, v.clone())))
            .collect();
        if fixed.is_empty() {
            return self.clone();
        }
        let ids: Vec<VarId> = fixed.iter().map(|(i, _)| *i).collect();
        let ctx = self.ctx.without(&ids);
        if self.is_empty() {
            return Polyhedron::empty(ctx);
        }
        let mut atoms = self.atoms.clone();
        for (i, v) in &fixed {
            atoms = atoms.iter().map(|a| a.substitute(i.0, v)).collect();
        }
        let (map, dim) = column_map(self.dim(), &ids);
        let atoms = atoms.iter().map(|a| a.remap(&map, dim)).collect();
        Self::build(ctx, atoms)
    }

    /// Re-expresses the polyhedron in a larger context, matching by name.
    pub fn embed(&self, ctx: &Arc<Context>) -> Result<Polyhedron> {
        if self.ctx == *ctx {
            return Ok(Polyhedron {
                ctx: ctx.clone(),
                atoms: self.atoms.clone(),
            });
        }
        let mut map = Vec::with_capacity(self.dim());
        for v in self.ctx.vars() {
            match ctx.lookup(&v.name) {
                Some(j) if ctx.var(j).kind == v.kind => map.push(Some(j.0)),
                _ => {
                    return Err(Error::usage(format!(
                        "variable `{}` missing from context {ctx}",
                        v.name
                    )))
                }
            }
        }
        let atoms = self.atoms.iter().map(|a| a.remap(&map, ctx.len())).collect();
        // Remapping permutes columns, so the reduced form must be rebuilt.
        Ok(Self::build(ctx.clone(), atoms))
    }

    /// `self ∖ other` as a list of pairwise disjoint polyhedra.
    pub fn subtract(&self, other: &Polyhedron) -> Result<Vec<Polyhedron>> {
        self.check_same(other)?;
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if other.is_empty() {
            return Ok(vec![self.clone()]);
        }
        if other.includes_unchecked(self) {
            return Ok(Vec::new());
        }
        let meet = self.intersect(other)?;
        if meet.is_empty() {
            return Ok(vec![self.clone()]);
        }
        let mut out = Vec::new();
        let mut prefix = self.clone();
        let halves: Vec<Atom> = other.atoms.iter().flat_map(Atom::halves).collect();
        for h in halves {
            if prefix.is_empty() {
                break;
            }
            // the half is already implied on the remaining piece
            if prefix.atoms.contains(&h) {
                continue;
            }
            for neg in h.negation() {
                let piece = prefix.constrain([neg]);
                if !piece.is_empty() {
                    out.push(piece);
                }
            }
            prefix = prefix.constrain([h]);
        }
        Ok(out)
    }

    /// Complement within the nonnegative orthant.
    pub fn complement(&self) -> Vec<Polyhedron> {
        Polyhedron::universe(self.ctx.clone())
            .subtract(self)
            .expect("same context")
    }
}

/// New positions of the columns that survive dropping `vars`.
fn column_map(dim: usize, vars: &[VarId]) -> (Vec<Option<usize>>, usize) {
    let mut map = Vec::with_capacity(dim);
    let mut next = 0;
    for j in 0..dim {
        if vars.iter().any(|v| v.0 == j) {
            map.push(None);
        } else {
            map.push(Some(next));
            next += 1;
        }
    }
    (map, next)
}

/// One Fourier-Motzkin step on variable `j` (nonnegativity of `j` included).
/// The output no longer mentions `j` and is not canonical.
fn fm_step(dim: usize, mut atoms: Vec<Atom>, j: usize) -> Vec<Atom> {
    let mut domain = vec![BigInt::zero(); dim];
    domain[j] = BigInt::from(-1);
    atoms.push(Atom::raw(domain, Rel::Le, BigInt::zero()));

    if let Some(k) = atoms
        .iter()
        .position(|a| a.is_equality() && a.mentions(j))
    {
        let eq = atoms.swap_remove(k);
        let ej = eq.coeff(j).clone();
        let sign = if ej.is_negative() { BigInt::from(-1) } else { BigInt::one() };
        let scale_self = ej.abs();
        return atoms
            .iter()
            .map(|a| {
                if a.mentions(j) {
                    let s_other = -(a.coeff(j) * &sign);
                    a.combine(&scale_self, &eq, &s_other)
                } else {
                    a.clone()
                }
            })
            .collect();
    }

    let mut keep = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for a in atoms {
        if !a.mentions(j) {
            keep.push(a);
        } else if a.coeff(j).is_positive() {
            upper.push(a);
        } else {
            lower.push(a);
        }
    }
    for u in &upper {
        for l in &lower {
            let cu = u.coeff(j).clone();
            let cl = -l.coeff(j);
            keep.push(u.combine(&cl, l, &cu));
        }
    }
    keep
}

/// Canonical form of a conjunction, or `None` when it is empty.
pub(crate) fn canonicalize(dim: usize, atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    let mut atoms = atoms;
    let (eqs, ineqs) = loop {
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for a in atoms {
            match a.constant_truth() {
                Some(true) => {}
                Some(false) => return None,
                None if a.is_equality() => eqs.push(a),
                None => ineqs.push(a),
            }
        }
        let reduced = Reduced::new(dim, &eqs)?;
        let mut subst = Vec::with_capacity(ineqs.len());
        for a in &ineqs {
            let s = reduced.substitute(a);
            match s.constant_truth() {
                Some(true) => {}
                Some(false) => return None,
                None => subst.push(s),
            }
        }
        let eq_atoms = reduced.atoms();
        let (merged, found) = merge_bounds(subst)?;
        if !found.is_empty() {
            atoms = eq_atoms.into_iter().chain(merged).chain(found).collect();
            continue;
        }
        let found = implied_equalities(dim, &reduced, &eq_atoms, &merged)?;
        if !found.is_empty() {
            atoms = eq_atoms.into_iter().chain(merged).chain(found).collect();
            continue;
        }
        break (eq_atoms, merged);
    };

    let mut ineqs = ineqs;
    ineqs.sort();
    let mut keep = vec![true; ineqs.len()];
    for i in 0..ineqs.len() {
        let negs = ineqs[i].negation();
        let rows = eqs
            .iter()
            .chain(
                ineqs
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && keep[k])
                    .map(|(_, a)| a),
            )
            .chain(negs.iter());
        if !lp::is_feasible(dim, rows) {
            keep[i] = false;
        }
    }
    let mut out: Vec<Atom> = eqs
        .into_iter()
        .chain(
            ineqs
                .into_iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(a, _)| a),
        )
        .collect();
    out.sort();
    Some(out)
}

/// Equalities in reduced row echelon form, pivoting on the highest index.
struct Reduced {
    dim: usize,
    /// (pivot column, row with a unit pivot; last entry is the rhs)
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Reduced {
    fn new(dim: usize, eqs: &[Atom]) -> Option<Reduced> {
        let mut rows: Vec<(usize, Vec<Rat>)> = Vec::new();
        for e in eqs {
            let mut r: Vec<Rat> = e
                .coeffs()
                .iter()
                .chain(std::iter::once(e.rhs()))
                .map(|c| Rat::from_integer(c.clone()))
                .collect();
            for (col, pr) in &rows {
                if !r[*col].is_zero() {
                    let f = r[*col].clone();
                    for (x, y) in r.iter_mut().zip(pr) {
                        *x -= &f * y;
                    }
                }
            }
            let Some(col) = (0..dim).rev().find(|&c| !r[c].is_zero()) else {
                if r[dim].is_zero() {
                    continue;
                }
                return None;
            };
            let p = r[col].clone();
            for x in r.iter_mut() {
                *x /= &p;
            }
            for (_, pr) in rows.iter_mut() {
                if !pr[col].is_zero() {
                    let f = pr[col].clone();
                    for (x, y) in pr.iter_mut().zip(&r) {
                        *x -= &f * y;
                    }
                }
            }
            rows.push((col, r));
        }
        rows.sort_by_key(|(c, _)| *c);
        Some(Reduced { dim, rows })
    }

    fn substitute(&self, a: &Atom) -> Atom {
        if !self.rows.iter().any(|(c, _)| a.mentions(*c)) {
            return a.clone();
        }
        let mut r: Vec<Rat> = a
            .coeffs()
            .iter()
            .chain(std::iter::once(a.rhs()))
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        for (col, pr) in &self.rows {
            if !r[*col].is_zero() {
                let f = r[*col].clone();
                for (x, y) in r.iter_mut().zip(pr) {
                    *x -= &f * y;
                }
            }
        }
        let rhs = r.pop().expect("rhs");
        let cmp = if a.is_strict() { Cmp::Lt } else { Cmp::Le };
        Atom::new(&r, cmp, &rhs)
    }

    fn atoms(&self) -> Vec<Atom> {
        self.rows
            .iter()
            .map(|(_, r)| Atom::new(&r[..self.dim], Cmp::Eq, &r[self.dim]))
            .collect()
    }

    /// Whether variable `j` is fixed to a constant by the equalities.
    fn is_constant(&self, j: usize) -> bool {
        self.rows
            .iter()
            .any(|(c, r)| *c == j && r[..self.dim].iter().filter(|x| !x.is_zero()).count() == 1)
    }
}

/// Keeps the tightest atom per direction and detects opposite bounds that
/// meet.  Returns the merged inequalities and any equalities discovered.
fn merge_bounds(ineqs: Vec<Atom>) -> Option<(Vec<Atom>, Vec<Atom>)> {
    // direction (coefficients divided by their gcd) -> (bound, strict, atom)
    let mut best: BTreeMap<Vec<BigInt>, (Rat, bool, Atom)> = BTreeMap::new();
    for a in ineqs {
        let g = gcd_all(a.coeffs());
        let dir: Vec<BigInt> = a.coeffs().iter().map(|c| c / &g).collect();
        let bound = Rat::new(a.rhs().clone(), g);
        let strict = a.is_strict();
        match best.get(&dir) {
            Some((b, s, _)) if *b < bound || (*b == bound && (*s || !strict)) => {}
            _ => {
                best.insert(dir, (bound, strict, a));
            }
        }
    }
    let mut found = Vec::new();
    let mut drop = Vec::new();
    for (dir, (ub, us, a)) in &best {
        let neg: Vec<BigInt> = dir.iter().map(|c| -c).collect();
        if neg > *dir {
            continue;
        }
        if let Some((lb_neg, ls, _)) = best.get(&neg) {
            let lb = -lb_neg;
            if lb > *ub {
                return None;
            }
            if lb == *ub {
                if *us || *ls {
                    return None;
                }
                found.push(a.with_rel(Rel::Eq));
                drop.push(dir.clone());
                drop.push(neg);
            }
        }
    }
    for d in drop {
        best.remove(&d);
    }
    Some((best.into_values().map(|(_, _, a)| a).collect(), found))
}

/// Finds inequalities (and variable domains) that hold with equality on the
/// whole polyhedron.  `None` when the polyhedron is empty.
fn implied_equalities(
    dim: usize,
    reduced: &Reduced,
    eqs: &[Atom],
    ineqs: &[Atom],
) -> Option<Vec<Atom>> {
    let domain: Vec<usize> = (0..dim).filter(|&j| !reduced.is_constant(j)).collect();
    if ineqs.is_empty() && domain.is_empty() {
        // a single point: only nonnegativity is left to check
        let point_ok = reduced.rows.iter().all(|(_, r)| !r[dim].is_negative());
        return point_ok.then(Vec::new);
    }
    let mut rows: Vec<LpRow> = eqs.iter().map(|a| LpRow { atom: a, slack: false }).collect();
    rows.extend(ineqs.iter().map(|a| LpRow { atom: a, slack: true }));
    let first = lp::max_slack(dim, &rows, &domain, true);
    match &first {
        LpOutcome::Infeasible => return None,
        _ if first.slack_positive() => return Some(Vec::new()),
        _ => {}
    }

    // Candidates: inequality rows then domain rows; settled once a point
    // with positive slack is known.
    let n_ineq = ineqs.len();
    let total = n_ineq + domain.len();
    let mut loose = vec![false; total];
    let mark = |point: &[Rat], loose: &mut Vec<bool>| {
        for (i, a) in ineqs.iter().enumerate() {
            let lhs = a.lhs_value(point);
            if lhs < Rat::from_integer(a.rhs().clone()) {
                loose[i] = true;
            }
        }
        for (k, &j) in domain.iter().enumerate() {
            if point[j].is_positive() {
                loose[n_ineq + k] = true;
            }
        }
    };
    let mut tight = Vec::new();
    for c in 0..total {
        if loose[c] {
            continue;
        }
        let mut rows: Vec<LpRow> = eqs.iter().map(|a| LpRow { atom: a, slack: false }).collect();
        rows.extend(ineqs.iter().enumerate().map(|(i, a)| LpRow {
            atom: a,
            slack: i == c,
        }));
        let dom: Vec<usize> = if c >= n_ineq {
            vec![domain[c - n_ineq]]
        } else {
            Vec::new()
        };
        let out = lp::max_slack(dim, &rows, &dom, true);
        match out {
            LpOutcome::Infeasible => return None,
            LpOutcome::Feasible { ref slack, ref point } => {
                mark(point, &mut loose);
                if !slack.is_positive() {
                    tight.push(c);
                }
            }
        }
    }
    let mut found = Vec::new();
    for c in tight {
        if c < n_ineq {
            if ineqs[c].is_strict() {
                return None;
            }
            found.push(ineqs[c].with_rel(Rel::Eq));
        } else {
            found.push(Atom::zero(dim, domain[c - n_ineq]));
        }
    }
    debug_assert!(!found.is_empty(), "zero slack without a tight row");
    Some(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::rational::{frac, int};

    fn ctx() -> Arc<Context> {
        Context::from_names(&["p"], &["x", "y"])
    }

    fn at(c: &[i64], cmp: Cmp, k: i64) -> Atom {
        Atom::from_ints(c.iter().map(|&v| BigInt::from(v)).collect(), cmp, BigInt::from(k))
    }

    fn poly(atoms: Vec<Atom>) -> Polyhedron {
        Polyhedron::from_atoms(ctx(), atoms).unwrap()
    }

    #[test]
    fn forced_equality() {
        let p = poly(vec![at(&[0, 1, 0], Cmp::Ge, 1)]);
        let q = poly(vec![at(&[0, 1, 0], Cmp::Le, 1)]);
        let r = p.intersect(&q).unwrap();
        assert_eq!(r.atoms(), &[at(&[0, 1, 0], Cmp::Eq, 1)]);
    }

    #[test]
    fn emptiness_cases() {
        assert!(poly(vec![at(&[0, 1, 0], Cmp::Lt, 0)]).is_empty());
        assert!(!poly(vec![at(&[1, 0, 0], Cmp::Gt, 0), at(&[1, 0, 0], Cmp::Lt, 1)]).is_empty());
        let e = poly(vec![
            at(&[-1, 1, 0], Cmp::Eq, 0),
            at(&[-2, 1, 0], Cmp::Eq, 0),
            at(&[0, 1, 0], Cmp::Eq, 1),
        ]);
        assert!(e.is_empty());
        // equalities alone pin y to -1
        let pinned = poly(vec![
            at(&[1, 0, 0], Cmp::Eq, 0),
            at(&[0, 1, 1], Cmp::Eq, 1),
            at(&[0, 1, -1], Cmp::Eq, 3),
        ]);
        assert!(pinned.is_empty());
    }

    #[test]
    fn implied_domain_equality() {
        // x + y <= 0 forces both clocks to zero
        let p = poly(vec![at(&[0, 1, 1], Cmp::Le, 0)]);
        assert_eq!(
            p.atoms(),
            &[at(&[0, 0, 1], Cmp::Eq, 0), at(&[0, 1, 0], Cmp::Eq, 0)]
        );
        // x = p - 1 with p <= 1
        let q = poly(vec![at(&[-1, 1, 0], Cmp::Eq, -1), at(&[1, 0, 0], Cmp::Le, 1)]);
        assert_eq!(q.atoms(), &[at(&[0, 1, 0], Cmp::Eq, 0), at(&[1, 0, 0], Cmp::Eq, 1)]);
        // a strict row made tight by the closure empties the set
        let r = poly(vec![at(&[0, 1, 1], Cmp::Lt, 1), at(&[0, 1, 1], Cmp::Ge, 1)]);
        assert!(r.is_empty());
    }

    #[test]
    fn eliminate_examples() {
        let c = Context::from_names(&["p"], &["x"]);
        let p = Polyhedron::from_atoms(
            c.clone(),
            vec![at(&[1, -1], Cmp::Le, 0), at(&[0, 1], Cmp::Le, 2)],
        )
        .unwrap();
        let e = p.eliminate(&[VarId(1)]);
        assert_eq!(e.atoms(), &[at(&[1], Cmp::Le, 2)]);
        let q = Polyhedron::from_atoms(
            c.clone(),
            vec![at(&[-1, 1], Cmp::Lt, 0), at(&[-1, 1], Cmp::Gt, 0)],
        )
        .unwrap();
        assert!(q.is_empty());
        assert!(q.eliminate(&[VarId(1)]).is_empty());
    }

    #[test]
    fn elapse_and_reset() {
        let z = poly(vec![at(&[0, 1, 0], Cmp::Eq, 0), at(&[0, 0, 1], Cmp::Eq, 0)]);
        let e = z.time_elapse();
        assert_eq!(e.atoms(), &[at(&[0, -1, 1], Cmp::Eq, 0)]);
        assert_eq!(e.time_elapse(), e);
        let c = Context::from_names(&["p"], &["x"]);
        let xp = Polyhedron::from_atoms(c, vec![at(&[-1, 1], Cmp::Eq, 0)]).unwrap();
        let el = xp.time_elapse();
        assert_eq!(el.atoms(), &[at(&[1, -1], Cmp::Le, 0)]);

        let r = poly(vec![at(&[0, 1, -1], Cmp::Eq, 0), at(&[0, 0, 1], Cmp::Eq, 5)])
            .reset(&[VarId(1)]);
        assert_eq!(
            r.atoms(),
            &[at(&[0, 0, 1], Cmp::Eq, 5), at(&[0, 1, 0], Cmp::Eq, 0)]
        );
        let s = poly(vec![at(&[-1, 1, 0], Cmp::Eq, 0), at(&[-1, 0, 1], Cmp::Eq, 0)])
            .reset(&[VarId(1)]);
        assert_eq!(
            s,
            poly(vec![at(&[0, 1, 0], Cmp::Eq, 0), at(&[-1, 0, 1], Cmp::Eq, 0)])
        );
    }

    #[test]
    fn projection() {
        let p = poly(vec![at(&[-1, 1, 0], Cmp::Eq, 0), at(&[0, 1, 0], Cmp::Lt, 1)]);
        let q = p.project_to_parameters();
        assert_eq!(q.atoms(), &[at(&[1], Cmp::Lt, 1)]);
        let r = poly(vec![at(&[0, 0, 1], Cmp::Gt, 2), at(&[0, 1, 0], Cmp::Eq, 0)]);
        assert!(r.project_to_parameters().is_universe());
    }

    #[test]
    fn instantiate_and_embed() {
        let p = poly(vec![at(&[-1, 1, 0], Cmp::Eq, 0)]);
        let v = Valuation::new().with("p", frac(9, 10)).unwrap();
        let i = p.instantiate(&v);
        assert_eq!(i.context().to_string(), "[x, y]");
        assert!(i.contains_point(&[frac(9, 10), int(0)]));
        assert!(!i.contains_point(&[int(1), int(0)]));
        let big = Context::from_names(&["n", "p"], &["x", "y", "z"]);
        let e = p.embed(&big).unwrap();
        assert!(e.contains_point(&[int(7), int(2), int(2), int(0), int(9)]));
    }

    #[test]
    fn subtract_is_disjoint_cover() {
        let c = Context::from_names(&["p"], &[]);
        let u = Polyhedron::universe(c.clone());
        let band = Polyhedron::from_atoms(
            c.clone(),
            vec![at(&[1], Cmp::Gt, 1), at(&[1], Cmp::Le, 2)],
        )
        .unwrap();
        let parts = u.subtract(&band).unwrap();
        assert_eq!(parts.len(), 2);
        for k in 0..12 {
            let pt = [frac(k, 4)];
            let inside = parts.iter().filter(|q| q.contains_point(&pt)).count();
            assert_eq!(inside + band.contains_point(&pt) as usize, 1);
        }
    }
}
