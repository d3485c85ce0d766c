//! Location reachability of parameter-free networks with difference bound
//! matrices and max-constant extrapolation.  Shares nothing with the
//! polyhedral engine beyond reading guards.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::constraint::{Atom, Polyhedron, Rel};
use crate::error::{Error, Result};
use crate::pta::{LocVec, Network};

#[derive(Clone, Debug, Default)]
pub struct ConcreteOptions {
    pub depth_limit: Option<usize>,
    pub state_budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteReach {
    pub locations: BTreeSet<LocVec>,
    pub complete: bool,
    pub states: usize,
}

impl ConcreteReach {
    /// Names of reachable location vectors.
    pub fn names(&self, net: &Network) -> BTreeSet<String> {
        self.locations.iter().map(|l| net.loc_name(l)).collect()
    }
}

const INF: i64 = i64::MAX;
const LE_ZERO: i64 = 1;

fn bound(c: i64, nonstrict: bool) -> i64 {
    (c << 1) | nonstrict as i64
}

fn add(a: i64, b: i64) -> i64 {
    if a == INF || b == INF {
        INF
    } else {
        (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)
    }
}

/// `x_i - x_j ≤ c` (or `<`), index 0 is the constant zero clock.
#[derive(Clone, Copy, Debug)]
struct Diff {
    i: usize,
    j: usize,
    b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Dbm {
    n: usize,
    m: Vec<i64>,
}

impl Dbm {
    fn zero(n: usize) -> Dbm {
        Dbm {
            n,
            m: vec![LE_ZERO; n * n],
        }
    }

    fn at(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.m[i * self.n + j] = v;
    }

    fn is_empty(&self) -> bool {
        (0..self.n).any(|i| self.at(i, i) < LE_ZERO)
    }

    fn close(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                let ik = self.at(i, k);
                if ik == INF {
                    continue;
                }
                for j in 0..n {
                    let v = add(ik, self.at(k, j));
                    if v < self.at(i, j) {
                        self.set(i, j, v);
                    }
                }
            }
        }
    }

    fn constrain(&mut self, diffs: &[Diff]) -> bool {
        let mut changed = false;
        for d in diffs {
            if d.b < self.at(d.i, d.j) {
                self.set(d.i, d.j, d.b);
                changed = true;
            }
        }
        if changed {
            self.close();
        }
        !self.is_empty()
    }

    fn up(&mut self) {
        for i in 1..self.n {
            self.set(i, 0, INF);
        }
    }

    fn reset(&mut self, x: usize) {
        for j in 0..self.n {
            let v = self.at(0, j);
            self.set(x, j, v);
            let w = self.at(j, 0);
            self.set(j, x, w);
        }
        self.set(x, x, LE_ZERO);
    }

    /// Extra_M: forget bounds beyond the largest constant of each clock.
    fn extrapolate(&mut self, max: &[i64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = self.at(i, j);
                if v == INF {
                    continue;
                }
                let c = v >> 1;
                if c > max[i] {
                    self.set(i, j, INF);
                } else if -c > max[j] {
                    self.set(i, j, bound(-max[j], false));
                }
            }
        }
        self.close();
    }

    fn included_in(&self, other: &Dbm) -> bool {
        self.m.iter().zip(&other.m).all(|(a, b)| a <= b)
    }
}

/// Guards and invariants compiled to scaled difference constraints.
struct Compiled {
    invariants: Vec<Vec<Vec<Diff>>>,
    guards: Vec<Vec<Vec<Diff>>>,
    max: Vec<i64>,
}

fn compile(net: &Network) -> Result<Compiled> {
    let ctx = net.context();
    if !ctx.parameters().is_empty() {
        return Err(Error::usage("concrete reachability needs a parameter-free model"));
    }
    let polys = net.components().iter().flat_map(|c| {
        c.locations()
            .iter()
            .map(|l| &l.invariant)
            .chain(c.edges().iter().map(|e| &e.guard))
    });
    // scale so that every bound k / a is an integer
    let mut scale = BigInt::one();
    for p in polys.clone() {
        for a in p.atoms() {
            let lead = a.support().next().map(|j| a.coeff(j).abs()).unwrap_or_else(BigInt::one);
            scale = scale.lcm(&lead);
        }
    }
    let clock_index = |j: usize| 1 + ctx.clocks().iter().position(|c| c.0 == j).expect("clock");
    let n = ctx.clocks().len() + 1;
    let mut max = vec![0i64; n];
    let mut convert = |p: &Polyhedron| -> Result<Vec<Diff>> {
        if p.is_empty() {
            return Ok(vec![Diff { i: 0, j: 0, b: bound(-1, true) }]);
        }
        let mut out = Vec::new();
        for a in p.atoms() {
            for h in a.halves() {
                out.push(to_diff(&h, &scale, &clock_index)?);
            }
            for j in a.support() {
                let k = (a.rhs().abs() * &scale / a.coeff(j).abs()).to_i64();
                let k = k.ok_or_else(|| Error::Resource("constant too large".into()))?;
                let ci = clock_index(j);
                max[ci] = max[ci].max(k);
            }
        }
        Ok(out)
    };
    let mut invariants = Vec::new();
    let mut guards = Vec::new();
    for c in net.components() {
        invariants.push(
            c.locations()
                .iter()
                .map(|l| convert(&l.invariant))
                .collect::<Result<Vec<_>>>()?,
        );
        guards.push(c.edges().iter().map(|e| convert(&e.guard)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Compiled {
        invariants,
        guards,
        max,
    })
}

fn to_diff(a: &Atom, scale: &BigInt, clock_index: &dyn Fn(usize) -> usize) -> Result<Diff> {
    let support: Vec<usize> = a.support().collect();
    let nonstrict = a.rel() != Rel::Lt;
    let conv = |v: BigInt| v.to_i64().ok_or_else(|| Error::Resource("constant too large".into()));
    match support.as_slice() {
        [j] => {
            let c = a.coeff(*j);
            let k = conv(a.rhs() * scale / c.abs())?;
            if c.is_positive() {
                Ok(Diff { i: clock_index(*j), j: 0, b: bound(k, nonstrict) })
            } else {
                Ok(Diff { i: 0, j: clock_index(*j), b: bound(k, nonstrict) })
            }
        }
        [p, q] if (a.coeff(*p) + a.coeff(*q)).is_zero() => {
            let c = a.coeff(*p);
            let k = conv(a.rhs() * scale / c.abs())?;
            let (i, j) = if c.is_positive() { (*p, *q) } else { (*q, *p) };
            Ok(Diff { i: clock_index(i), j: clock_index(j), b: bound(k, nonstrict) })
        }
        _ => Err(Error::usage(format!(
            "constraint {a:?} is not a clock bound; concrete reachability needs difference constraints"
        ))),
    }
}

/// Location vectors reachable in a parameter-free network.
pub fn reachable_locations(net: &Network, opts: &ConcreteOptions) -> Result<ConcreteReach> {
    let comp = compile(net)?;
    let n = net.context().clocks().len() + 1;
    let clock_index = {
        let clocks = net.context().clocks();
        move |j: usize| 1 + clocks.iter().position(|c| c.0 == j).expect("clock")
    };
    let inv = |locs: &[usize]| -> Vec<Diff> {
        locs.iter()
            .enumerate()
            .flat_map(|(c, &l)| comp.invariants[c][l].iter().copied())
            .collect()
    };

    let init_locs = net.initial();
    let mut z = Dbm::zero(n);
    let i0 = inv(&init_locs);
    let mut ok = z.constrain(&i0);
    if ok {
        z.up();
        ok = z.constrain(&i0);
    }
    if !ok {
        return Err(Error::model(format!(
            "initial invariant of {} is unsatisfiable",
            net.loc_name(&init_locs)
        )));
    }
    z.extrapolate(&comp.max);

    let mut locations = BTreeSet::from([init_locs.clone()]);
    let mut visited: HashMap<LocVec, Vec<Dbm>> = HashMap::new();
    visited.insert(init_locs.clone(), vec![z.clone()]);
    let mut queue = VecDeque::from([(init_locs, z, 0usize)]);
    let mut states = 0usize;
    let mut complete = true;

    while let Some((locs, z, depth)) = queue.pop_front() {
        states += 1;
        if let Some(b) = opts.state_budget {
            if states > b {
                return Err(Error::Resource(format!("state budget of {b} exhausted")));
            }
        }
        let at_limit = opts.depth_limit.is_some_and(|d| depth >= d);
        for m in net.moves(&locs) {
            let mut next = z.clone();
            let guard: Vec<Diff> = m
                .parts
                .iter()
                .flat_map(|&(c, e)| comp.guards[c][e].iter().copied())
                .collect();
            if !next.constrain(&guard) {
                continue;
            }
            for r in net.resets(&m) {
                next.reset(clock_index(r.0));
            }
            let target = net.target(&locs, &m);
            let ti = inv(&target);
            if !next.constrain(&ti) {
                continue;
            }
            next.up();
            if !next.constrain(&ti) {
                continue;
            }
            next.extrapolate(&comp.max);
            let seen = visited.entry(target.clone()).or_default();
            if seen.iter().any(|o| next.included_in(o)) {
                continue;
            }
            if at_limit {
                complete = false;
                continue;
            }
            locations.insert(target.clone());
            seen.retain(|o| !o.included_in(&next));
            seen.push(next.clone());
            queue.push_back((target, next, depth + 1));
        }
    }
    Ok(ConcreteReach {
        locations,
        complete,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{frac, Valuation};
    use crate::pta::tests::fig1;

    fn names(p: (i64, i64)) -> BTreeSet<String> {
        let v = Valuation::new().with("p", frac(p.0, p.1)).unwrap();
        let net = Network::single(fig1()).instantiate(&v).unwrap();
        let r = reachable_locations(&net, &ConcreteOptions::default()).unwrap();
        assert!(r.complete);
        r.names(&net)
    }

    #[test]
    fn fig1_instances() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(names((1, 1)), s(&["l0", "l1"]));
        assert_eq!(names((9, 10)), s(&["l0", "l1", "l2"]));
        assert_eq!(names((11, 10)), s(&["l0", "l1", "l2"]));
        assert_eq!(names((0, 1)), s(&["l0", "l1"]));
        assert_eq!(names((5, 2)), s(&["l0", "l1", "l2"]));
        assert_eq!(names((3, 1)), s(&["l0", "l1"]));
        assert_eq!(names((1, 100)), s(&["l0", "l1", "l2"]));
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(add(bound(2, true), bound(-3, false)), bound(-1, false));
        assert_eq!(add(bound(2, true), INF), INF);
        assert!(bound(1, false) < bound(1, true));
    }
}
