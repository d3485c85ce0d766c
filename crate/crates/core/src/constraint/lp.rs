//! Exact simplex used for feasibility, implied-equality and redundancy tests.
//!
//! Every query has the same shape: all variables are nonnegative, some rows
//! carry a shared slack `t` (`a.x + t <= k`), `t <= 1`, maximize `t`.  A
//! system with strict rows is nonempty iff its closure is feasible and the
//! optimum `t` is positive.
//!
//! The tableau first runs over `Ratio<i128>` with checked arithmetic and
//! falls back to big rationals when anything overflows.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use super::atom::{Atom, Rel};
use super::rational::Rat;

pub(crate) struct LpRow<'a> {
    pub atom: &'a Atom,
    pub slack: bool,
}

pub(crate) enum LpOutcome {
    Infeasible,
    /// Closure feasible; `slack` is the optimum of `t` (capped at one, or
    /// the first positive value seen when stopping early).
    Feasible { slack: Rat, point: Vec<Rat> },
}

impl LpOutcome {
    pub fn slack_positive(&self) -> bool {
        matches!(self, LpOutcome::Feasible { slack, .. } if slack.is_positive())
    }
}

/// Maximizes the shared slack over `rows` plus `-x_j + t <= 0` for every
/// `j` in `domain_slack`.
pub(crate) fn max_slack(
    dim: usize,
    rows: &[LpRow<'_>],
    domain_slack: &[usize],
    stop_at_positive: bool,
) -> LpOutcome {
    if let Some(out) = Simplex::<Ratio<i128>>::run(dim, rows, domain_slack, stop_at_positive) {
        return out;
    }
    Simplex::<Rat>::run(dim, rows, domain_slack, stop_at_positive)
        .expect("big rationals never overflow")
}

/// Whether the conjunction of `atoms` has a nonnegative solution.
pub(crate) fn is_feasible<'a>(dim: usize, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
    let rows: Vec<LpRow> = atoms
        .into_iter()
        .map(|a| LpRow {
            atom: a,
            slack: a.is_strict(),
        })
        .collect();
    if rows.iter().any(|r| r.atom.is_falsum()) {
        return false;
    }
    let strict = rows.iter().any(|r| r.slack);
    let out = max_slack(dim, &rows, &[], true);
    match out {
        LpOutcome::Infeasible => false,
        LpOutcome::Feasible { .. } => !strict || out.slack_positive(),
    }
}

/// A point satisfying every atom (strict ones strictly), if any.
pub(crate) fn find_point<'a>(dim: usize, atoms: impl IntoIterator<Item = &'a Atom>) -> Option<Vec<Rat>> {
    let rows: Vec<LpRow> = atoms
        .into_iter()
        .map(|a| LpRow {
            atom: a,
            slack: a.is_strict(),
        })
        .collect();
    let strict = rows.iter().any(|r| r.slack);
    match max_slack(dim, &rows, &[], false) {
        LpOutcome::Infeasible => None,
        LpOutcome::Feasible { slack, point } => {
            if strict && !slack.is_positive() {
                None
            } else {
                Some(point)
            }
        }
    }
}

trait Field: Clone + PartialOrd {
    fn from_int(v: &BigInt) -> Option<Self>;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn to_rat(&self) -> Rat;
}

impl Field for Ratio<i128> {
    fn from_int(v: &BigInt) -> Option<Self> {
        v.to_i128().map(Ratio::from_integer)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_rat(&self) -> Rat {
        Rat::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for Rat {
    fn from_int(v: &BigInt) -> Option<Self> {
        Some(Rat::from_integer(v.clone()))
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
}

struct Simplex<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
    /// Reduced costs and current objective value (minimization).
    cost: Vec<T>,
    value: T,
}

impl<T: Field> Simplex<T> {
    fn run(
        dim: usize,
        input: &[LpRow<'_>],
        domain_slack: &[usize],
        stop_at_positive: bool,
    ) -> Option<LpOutcome> {
        let t_col = dim;
        // (coefficients over x, t coefficient, is_equality, rhs)
        let mut spec: Vec<(Vec<T>, bool, bool, T)> = Vec::new();
        for r in input {
            let coeffs = r
                .atom
                .coeffs()
                .iter()
                .map(T::from_int)
                .collect::<Option<Vec<T>>>()?;
            let eq = r.atom.rel() == Rel::Eq;
            let uses_t = r.slack && !eq;
            spec.push((coeffs, uses_t, eq, T::from_int(r.atom.rhs())?));
        }
        for &j in domain_slack {
            let mut coeffs = vec![T::zero(); dim];
            coeffs[j] = T::zero().sub(&T::one())?;
            spec.push((coeffs, true, false, T::zero()));
        }
        let uses_slack = spec.iter().any(|s| s.1);
        if uses_slack {
            spec.push((vec![T::zero(); dim], true, false, T::one()));
        }

        let n_ineq = spec.iter().filter(|s| !s.2).count();
        let needs_art: Vec<bool> = spec.iter().map(|s| s.2 || s.3.is_neg()).collect();
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let slack_base = dim + 1;
        let first_artificial = slack_base + n_ineq;
        let ncols = first_artificial + n_art;

        let mut rows = Vec::with_capacity(spec.len());
        let mut rhs = Vec::with_capacity(spec.len());
        let mut basis = Vec::with_capacity(spec.len());
        let mut next_slack = slack_base;
        let mut next_art = first_artificial;
        for (i, (coeffs, uses_t, eq, b)) in spec.into_iter().enumerate() {
            let mut row = vec![T::zero(); ncols];
            for (j, c) in coeffs.into_iter().enumerate() {
                row[j] = c;
            }
            if uses_t {
                row[t_col] = T::one();
            }
            let slack_col = if eq {
                None
            } else {
                row[next_slack] = T::one();
                next_slack += 1;
                Some(next_slack - 1)
            };
            let mut b = b;
            if b.is_neg() {
                for v in row.iter_mut() {
                    *v = T::zero().sub(v)?;
                }
                b = T::zero().sub(&b)?;
            }
            if needs_art[i] {
                row[next_art] = T::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(slack_col.expect("inequality row"));
            }
            rows.push(row);
            rhs.push(b);
        }

        let mut sx = Simplex {
            rows,
            rhs,
            basis,
            first_artificial,
            cost: vec![T::zero(); ncols],
            value: T::zero(),
        };

        if n_art > 0 {
            for (i, row) in sx.rows.iter().enumerate() {
                if sx.basis[i] >= first_artificial {
                    for (c, r) in sx.cost.iter_mut().zip(&row[..first_artificial]) {
                        *c = c.sub(r)?;
                    }
                    sx.value = sx.value.add(&sx.rhs[i])?;
                }
            }
            sx.optimize(None)?;
            if !sx.value.is_zero() {
                return Some(LpOutcome::Infeasible);
            }
            sx.drive_out_artificials()?;
        }

        if uses_slack {
            sx.cost = vec![T::zero(); ncols];
            sx.value = T::zero();
            sx.cost[t_col] = T::zero().sub(&T::one())?;
            if let Some(r) = sx.basis.iter().position(|&b| b == t_col) {
                // objective -t with t basic in row r
                let row = sx.rows[r].clone();
                for (j, v) in row.iter().enumerate() {
                    sx.cost[j] = sx.cost[j].add(v)?;
                }
                sx.value = T::zero().sub(&sx.rhs[r])?;
            }
            let stop = if stop_at_positive { Some(t_col) } else { None };
            sx.optimize(stop)?;
        }

        let mut point = vec![T::zero(); dim + 1];
        for (r, &b) in sx.basis.iter().enumerate() {
            if b <= dim {
                point[b] = sx.rhs[r].clone();
            }
        }
        let t = point.pop().expect("t column");
        Some(LpOutcome::Feasible {
            slack: t.to_rat(),
            point: point.iter().map(Field::to_rat).collect(),
        })
    }

    fn current(&self, col: usize) -> Option<&T> {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|r| &self.rhs[r])
    }

    /// Bland's rule minimization of the current cost row.  With `stop_on`
    /// set, returns as soon as that column has a positive value.
    fn optimize(&mut self, stop_on: Option<usize>) -> Option<()> {
        loop {
            if let Some(col) = stop_on {
                if self.current(col).is_some_and(|v| v.is_pos()) {
                    return Some(());
                }
            }
            let Some(enter) = (0..self.first_artificial).find(|&j| self.cost[j].is_neg()) else {
                return Some(());
            };
            let mut leave: Option<(usize, T)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[r].div(a)?;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let (r, _) = leave.expect("objective is bounded by t <= 1");
            self.pivot(r, enter)?;
        }
    }

    fn drive_out_artificials(&mut self) -> Option<()> {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            if let Some(j) = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, j)?;
            }
        }
        Some(())
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let p = self.rows[r][c].clone();
        if !(p == T::one()) {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.div(&p)?;
                }
            }
            self.rhs[r] = self.rhs[r].div(&p)?;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = f.mul(&pivot_row[j])?;
                self.rows[i][j] = self.rows[i][j].sub(&d)?;
            }
            self.rhs[i] = self.rhs[i].sub(&f.mul(&pivot_rhs)?)?;
        }
        let f = self.cost[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                let d = f.mul(&pivot_row[j])?;
                self.cost[j] = self.cost[j].sub(&d)?;
            }
            self.value = self.value.add(&f.mul(&pivot_rhs)?)?;
        }
        self.basis[r] = c;
        Some(())
    }
}
