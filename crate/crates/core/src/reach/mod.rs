//! Parametric zone-graph exploration (reachability and safety synthesis)
//! and concrete location reachability for instantiated models.

mod concrete;

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::constraint::{ConstraintSet, Polyhedron};
use crate::error::{Error, Result};
use crate::pta::{LocVec, Move, Network, Target};

pub use concrete::{reachable_locations, ConcreteReach, ConcreteOptions};

/// Node of the parametric zone graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymState {
    pub locs: LocVec,
    pub zone: Polyhedron,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct ReachOptions {
    /// Maximal number of discrete transitions from the initial state.
    pub depth_limit: Option<usize>,
    /// Drop a state whose zone is included in one already seen at the same
    /// location vector.
    pub inclusion_pruning: bool,
    /// Drop a state whose parameter projection is already in the result.
    pub coverage_pruning: bool,
    /// Assert zone well-formedness on every explored state.
    pub check_zones: bool,
    /// Give up (with an error) after this many explored states.
    pub state_budget: Option<usize>,
    /// Stop early with an incomplete result once this much time has passed.
    pub time_limit: Option<Duration>,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            depth_limit: None,
            inclusion_pruning: true,
            coverage_pruning: true,
            check_zones: false,
            state_budget: None,
            time_limit: None,
        }
    }
}

impl ReachOptions {
    pub fn with_depth(depth: usize) -> Self {
        ReachOptions {
            depth_limit: Some(depth),
            ..Default::default()
        }
    }
}

/// Reported once per finished BFS layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub depth: usize,
    pub frontier: usize,
    pub disjuncts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisResult {
    pub constraint: ConstraintSet,
    /// The exploration ran out of states before any limit.
    pub complete: bool,
    pub states_explored: usize,
    pub max_depth_reached: usize,
    pub depth_limited: bool,
    /// Stopped by the time limit.
    pub timed_out: bool,
    /// The constraint may contain valuations outside the exact answer.
    pub over_approximation: bool,
}

pub fn initial_state(net: &Network) -> Result<SymState> {
    let ctx = net.context();
    let dim = ctx.len();
    let locs = net.initial();
    let inv = net.invariant(&locs);
    let origin = Polyhedron::universe(ctx.clone())
        .constrain(ctx.clocks().iter().map(|c| crate::constraint::Atom::zero(dim, c.0)));
    let start = origin.intersect(&inv)?;
    let zone = start.time_elapse().intersect(&inv)?;
    if zone.is_empty() {
        return Err(Error::model(format!(
            "initial invariant of {} is unsatisfiable",
            net.loc_name(&locs)
        )));
    }
    Ok(SymState {
        locs,
        zone,
        depth: 0,
    })
}

/// Successor of `s` through `m`, if its zone is nonempty.
pub fn step(net: &Network, s: &SymState, m: &Move) -> Option<SymState> {
    let guard = net.guard(m);
    let fired = s.zone.intersect(&guard).expect("shared context");
    if fired.is_empty() {
        return None;
    }
    let target = net.target(&s.locs, m);
    let inv = net.invariant(&target);
    let reset = fired.reset(&net.resets(m));
    let entered = reset.intersect(&inv).expect("shared context");
    if entered.is_empty() {
        return None;
    }
    let zone = if inv.is_universe() {
        entered.time_elapse()
    } else {
        entered.time_elapse().intersect(&inv).expect("shared context")
    };
    Some(SymState {
        locs: target,
        zone,
        depth: s.depth + 1,
    })
}

/// All nonempty successors, in move order.
pub fn successors(net: &Network, s: &SymState) -> Vec<(Move, SymState)> {
    net.moves(&s.locs)
        .into_iter()
        .filter_map(|m| step(net, s, &m).map(|t| (m, t)))
        .collect()
}

fn check_zone(net: &Network, s: &SymState) {
    assert!(!s.zone.is_empty(), "empty zone at {}", net.loc_name(&s.locs));
    let inv = net.invariant(&s.locs);
    assert!(
        inv.includes(&s.zone).expect("shared context"),
        "zone leaves the invariant at {}",
        net.loc_name(&s.locs)
    );
    let closed = s.zone.time_elapse().intersect(&inv).expect("shared context");
    assert_eq!(closed, s.zone, "zone not closed under delay");
}

/// Parameter valuations for which some target location vector is
/// reachable.
pub fn ef_synth(net: &Network, target: &Target, opts: &ReachOptions) -> Result<AnalysisResult> {
    ef_synth_with_progress(net, target, opts, &mut |_| {})
}

pub fn ef_synth_with_progress(
    net: &Network,
    target: &Target,
    opts: &ReachOptions,
    progress: &mut dyn FnMut(&Progress),
) -> Result<AnalysisResult> {
    let pctx = net.context().parameters_only();
    let mut found = ConstraintSet::empty(pctx.clone());
    let init = initial_state(net)?;
    let mut visited: HashMap<LocVec, Vec<Polyhedron>> = HashMap::new();
    let mut queue: VecDeque<SymState> = VecDeque::new();
    let mut explored = 0usize;
    let mut max_depth = 0usize;
    let mut depth_limited = false;
    let mut layer = 0usize;
    let deadline = opts.time_limit.map(|d| Instant::now() + d);
    let mut timed_out = false;

    visited.entry(init.locs.clone()).or_default().push(init.zone.clone());
    queue.push_back(init);

    while let Some(s) = queue.pop_front() {
        if s.depth > layer {
            progress(&Progress {
                depth: layer,
                frontier: queue.len() + 1,
                disjuncts: found.disjuncts().len(),
            });
            layer = s.depth;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        explored += 1;
        if let Some(b) = opts.state_budget {
            if explored > b {
                return Err(Error::Resource(format!(
                    "state budget of {b} exhausted at depth {}",
                    s.depth
                )));
            }
        }
        max_depth = max_depth.max(s.depth);
        if opts.check_zones {
            check_zone(net, &s);
        }
        let proj = s.zone.project_to_parameters();
        if target.matches(&s.locs) {
            found.add(proj)?;
            if opts.coverage_pruning {
                // every successor projects inside `proj`
                continue;
            }
        } else if opts.coverage_pruning && found.includes_polyhedron(&proj)? {
            continue;
        }
        let at_limit = opts.depth_limit.is_some_and(|d| s.depth >= d);
        for (_, t) in successors(net, &s) {
            if opts.coverage_pruning
                && !found.is_empty()
                && found.includes_polyhedron(&t.zone.project_to_parameters())?
            {
                continue;
            }
            let seen = visited.entry(t.locs.clone()).or_default();
            if opts.inclusion_pruning && seen.iter().any(|z| z.includes_unchecked(&t.zone)) {
                continue;
            }
            if at_limit {
                depth_limited = true;
                break;
            }
            seen.push(t.zone.clone());
            queue.push_back(t);
        }
    }
    progress(&Progress {
        depth: layer,
        frontier: queue.len(),
        disjuncts: found.disjuncts().len(),
    });
    Ok(AnalysisResult {
        constraint: found,
        complete: !depth_limited && !timed_out,
        states_explored: explored,
        max_depth_reached: max_depth,
        depth_limited,
        timed_out,
        over_approximation: false,
    })
}

/// Parameter valuations for which no bad location vector is reachable:
/// the complement of [`ef_synth`].  Incomplete runs over-approximate.
pub fn safety_synth(net: &Network, bad: &Target, opts: &ReachOptions) -> Result<AnalysisResult> {
    if bad.is_empty() {
        return Ok(AnalysisResult {
            constraint: ConstraintSet::universe(net.context().parameters_only()),
            complete: true,
            states_explored: 0,
            max_depth_reached: 0,
            depth_limited: false,
            timed_out: false,
            over_approximation: false,
        });
    }
    let r = ef_synth(net, bad, opts)?;
    Ok(AnalysisResult {
        constraint: r.constraint.negate(),
        over_approximation: !r.complete,
        ..r
    })
}
