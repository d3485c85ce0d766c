//! Explicit-run evidence for parameter-free models: grid simulation, run
//! replay, and concrete witnesses extracted from symbolic paths.
//!
//! The simulator and the replayer only evaluate atoms at points; they never
//! touch zones.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constraint::{
    fmt_rat, parse_rat, Atom, Cmp, Context, Polyhedron, Rat, Rel, Valuation, Var, VarId,
};
use crate::error::{Error, Result};
use crate::pta::{LocVec, Move, Network, Target};
use crate::reach::{initial_state, successors};

#[derive(Clone, Debug)]
pub struct SimOptions {
    /// Every delay is a multiple of this.
    pub grid: Rat,
    pub max_steps: usize,
    pub state_budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStep {
    pub delay: Rat,
    /// A [`Move::id`].
    pub edge: String,
}

/// Delays and discrete moves from the initial state, alternating.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConcreteRun {
    pub steps: Vec<RunStep>,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    delay: String,
    edge: String,
}

impl ConcreteRun {
    pub fn to_json(&self) -> String {
        let steps: Vec<StepJson> = self
            .steps
            .iter()
            .map(|s| StepJson {
                delay: fmt_rat(&s.delay),
                edge: s.edge.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&steps).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<ConcreteRun> {
        let steps: Vec<StepJson> = serde_json::from_str(text)?;
        let steps = steps
            .into_iter()
            .map(|s| {
                Ok(RunStep {
                    delay: parse_rat(&s.delay)?,
                    edge: s.edge,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConcreteRun { steps })
    }
}

/// Concrete state: location vector and the value of every context variable.
pub type ConcreteState = (LocVec, Vec<Rat>);

#[derive(Clone, Debug)]
pub struct Replay {
    /// Why the run is illegal, if it is.
    pub failure: Option<String>,
    /// States after each discrete step, starting with the initial state.
    pub states: Vec<ConcreteState>,
}

impl Replay {
    pub fn is_legal(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last_locations(&self) -> &LocVec {
        &self.states.last().expect("initial state").0
    }
}

fn require_concrete(net: &Network) -> Result<()> {
    if net.is_parameter_free() {
        Ok(())
    } else {
        Err(Error::usage("instantiate the parameters first"))
    }
}

fn holds(p: &Polyhedron, vals: &[Rat]) -> bool {
    p.atoms().iter().all(|a| a.holds(vals))
}

fn delayed(vals: &[Rat], d: &Rat) -> Vec<Rat> {
    vals.iter().map(|v| v + d).collect()
}

fn reset(vals: &mut [Rat], clocks: &[VarId]) {
    for c in clocks {
        vals[c.0] = Rat::zero();
    }
}

/// Largest constant `|k / c|` over all guards and invariants.
fn max_constant(net: &Network) -> Rat {
    let mut m = Rat::zero();
    for c in net.components() {
        let polys = c
            .locations()
            .iter()
            .map(|l| &l.invariant)
            .chain(c.edges().iter().map(|e| &e.guard));
        for p in polys {
            for a in p.atoms() {
                if let Some(j) = a.support().next() {
                    let k = Rat::new(a.rhs().abs(), a.coeff(j).abs());
                    if k > m {
                        m = k;
                    }
                }
            }
        }
    }
    m
}

/// Locations visited by runs whose delays are multiples of the grid step,
/// each at most the largest model constant plus one, within `max_steps`
/// discrete steps.  Under-approximates reachability.
pub fn simulate_reachable(net: &Network, opts: &SimOptions) -> Result<BTreeSet<LocVec>> {
    require_concrete(net)?;
    if !opts.grid.is_positive() {
        return Err(Error::usage("the delay grid must be positive"));
    }
    let cap = max_constant(net) + Rat::from_integer(1.into());
    let delays: Vec<Rat> = {
        let mut out = vec![];
        let mut d = Rat::zero();
        while d <= cap {
            out.push(d.clone());
            d += &opts.grid;
        }
        out
    };
    let clamp = |vals: Vec<Rat>| -> Vec<Rat> {
        // beyond every constant, single-clock atoms cannot tell values apart
        vals.into_iter().map(|v| if v > cap { cap.clone() } else { v }).collect()
    };
    let init = net.initial();
    let zero = vec![Rat::zero(); net.context().len()];
    if !holds(&net.invariant(&init), &zero) {
        return Err(Error::model("the initial state violates its invariant"));
    }
    let mut seen: HashSet<ConcreteState> = HashSet::from([(init.clone(), zero.clone())]);
    let mut locations = BTreeSet::from([init.clone()]);
    let mut frontier = vec![(init, zero)];
    for _ in 0..opts.max_steps {
        let mut next = vec![];
        for (locs, vals) in &frontier {
            let inv = net.invariant(locs);
            let moves = net.moves(locs);
            for d in &delays {
                let now = delayed(vals, d);
                if !holds(&inv, &now) {
                    // invariants are convex: longer delays fail too
                    break;
                }
                for m in &moves {
                    if !holds(&net.guard(m), &now) {
                        continue;
                    }
                    let mut after = now.clone();
                    reset(&mut after, &net.resets(m));
                    let target = net.target(locs, m);
                    if !holds(&net.invariant(&target), &after) {
                        continue;
                    }
                    let s = (target, clamp(after));
                    if seen.insert(s.clone()) {
                        if opts.state_budget.is_some_and(|b| seen.len() > b) {
                            return Err(Error::Resource(format!(
                                "grid simulation exceeded {} states",
                                seen.len() - 1
                            )));
                        }
                        locations.insert(s.0.clone());
                        next.push(s);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(locations)
}

/// Checks a run step by step against the timed semantics.
pub fn replay(net: &Network, run: &ConcreteRun) -> Result<Replay> {
    require_concrete(net)?;
    let mut locs = net.initial();
    let mut vals = vec![Rat::zero(); net.context().len()];
    let mut states = vec![(locs.clone(), vals.clone())];
    let fail = |states: Vec<ConcreteState>, msg: String| Replay {
        failure: Some(msg),
        states,
    };
    if !holds(&net.invariant(&locs), &vals) {
        return Ok(fail(states, "initial state violates its invariant".into()));
    }
    for (i, step) in run.steps.iter().enumerate() {
        if step.delay.is_negative() {
            return Ok(fail(states, format!("step {i}: negative delay")));
        }
        let now = delayed(&vals, &step.delay);
        if !holds(&net.invariant(&locs), &now) {
            return Ok(fail(
                states,
                format!("step {i}: invariant of {} broken while waiting", net.loc_name(&locs)),
            ));
        }
        let Some(m) = net.find_move(&locs, &step.edge) else {
            return Ok(fail(
                states,
                format!("step {i}: no move `{}` from {}", step.edge, net.loc_name(&locs)),
            ));
        };
        if !holds(&net.guard(&m), &now) {
            return Ok(fail(states, format!("step {i}: guard of `{}` is false", step.edge)));
        }
        let mut after = now;
        reset(&mut after, &net.resets(&m));
        let target = net.target(&locs, &m);
        if !holds(&net.invariant(&target), &after) {
            return Ok(fail(
                states,
                format!("step {i}: invariant of {} false on entry", net.loc_name(&target)),
            ));
        }
        locs = target;
        vals = after;
        states.push((locs.clone(), vals.clone()));
    }
    Ok(Replay {
        failure: None,
        states,
    })
}

/// Shortest move sequence to `target` in the zone graph of `net`, if one
/// exists within `max_depth` steps.
fn symbolic_path(net: &Network, target: &Target, max_depth: usize) -> Result<Option<Vec<Move>>> {
    let init = initial_state(net)?;
    if target.matches(&init.locs) {
        return Ok(Some(vec![]));
    }
    let mut nodes = vec![(init, None::<(usize, Move)>)];
    let mut visited: HashMap<LocVec, Vec<Polyhedron>> = HashMap::new();
    visited.insert(nodes[0].0.locs.clone(), vec![nodes[0].0.zone.clone()]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = nodes[i].0.clone();
        if s.depth >= max_depth {
            continue;
        }
        for (m, t) in successors(net, &s) {
            let seen = visited.entry(t.locs.clone()).or_default();
            if seen.iter().any(|z| z.includes(&t.zone).unwrap_or(false)) {
                continue;
            }
            seen.push(t.zone.clone());
            let hit = target.matches(&t.locs);
            nodes.push((t, Some((i, m))));
            if hit {
                let mut path = vec![];
                let mut k = nodes.len() - 1;
                while let Some((parent, m)) = &nodes[k].1 {
                    path.push(m.clone());
                    k = *parent;
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(None)
}

/// A concrete run of `net` at `val` ending in `target`, or `None` if the
/// zone graph has no path there within `max_depth` steps.
///
/// The firing times along the symbolic path are found exactly by linear
/// programming and the result is replayed before it is returned.
pub fn witness_from_symbolic(
    net: &Network,
    target: &Target,
    val: &Valuation,
    max_depth: usize,
) -> Result<Option<ConcreteRun>> {
    let inst = net.instantiate(val)?;
    let Some(path) = symbolic_path(&inst, target, max_depth)? else {
        return Ok(None);
    };
    let k = path.len();
    if k == 0 {
        return Ok(Some(ConcreteRun::default()));
    }
    let tctx: Arc<Context> =
        Context::new((1..=k).map(|i| Var::clock(format!("t{i}"))).collect())?;
    let ctx = inst.context();
    // last_reset[x] after processing moves 1..=m, as an index into times (0 = start)
    let mut last_reset = vec![0usize; ctx.len()];
    let mut atoms: Vec<Atom> = vec![];
    let time = |i: usize| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); k];
        if i > 0 {
            v[i - 1] = Rat::from_integer(1.into());
        }
        v
    };
    let sub = |a: &[Rat], b: &[Rat]| -> Vec<Rat> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let lift = |a: &Atom, at: usize, last_reset: &[usize]| -> Atom {
        let mut coeffs = vec![Rat::zero(); k];
        for j in a.support() {
            let x = sub(&time(at), &time(last_reset[j]));
            let c = Rat::from_integer(a.coeff(j).clone());
            for (acc, v) in coeffs.iter_mut().zip(x) {
                *acc += &c * v;
            }
        }
        let cmp = match a.rel() {
            Rel::Lt => Cmp::Lt,
            Rel::Le => Cmp::Le,
            Rel::Eq => Cmp::Eq,
        };
        Atom::new(&coeffs, cmp, &Rat::from_integer(a.rhs().clone()))
    };
    let mut locs = inst.initial();
    for (i, m) in path.iter().enumerate() {
        let (enter, fire) = (i, i + 1);
        atoms.push(Atom::new(&sub(&time(fire), &time(enter)), Cmp::Ge, &Rat::zero()));
        let inv = inst.invariant(&locs);
        for a in inv.atoms() {
            atoms.push(lift(a, enter, &last_reset));
            atoms.push(lift(a, fire, &last_reset));
        }
        for a in inst.guard(m).atoms() {
            atoms.push(lift(a, fire, &last_reset));
        }
        for r in inst.resets(m) {
            last_reset[r.0] = fire;
        }
        locs = inst.target(&locs, m);
    }
    for a in inst.invariant(&locs).atoms() {
        atoms.push(lift(a, k, &last_reset));
    }
    let lp = Polyhedron::from_atoms(tctx, atoms)?;
    let times = lp
        .sample_point()
        .ok_or_else(|| Error::model("symbolic path has no concrete timing"))?;
    let mut prev = Rat::zero();
    let mut steps = vec![];
    for (m, t) in path.iter().zip(times) {
        steps.push(RunStep {
            delay: &t - &prev,
            edge: m.id(),
        });
        prev = t;
    }
    let run = ConcreteRun { steps };
    let check = replay(&inst, &run)?;
    if let Some(f) = check.failure {
        return Err(Error::model(format!("extracted witness does not replay: {f}")));
    }
    Ok(Some(run))
}
