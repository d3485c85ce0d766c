//! n-location-non-interference: checking at fixed valuations and synthesis
//! of the parameter and `n` valuations that guarantee it.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::constraint::{ConstraintSet, Rat, Valuation};
use crate::error::{Error, Result};
use crate::pta::{build_interf, ActionClass, InterfBound, LocVec, Network, Target};
use crate::reach::{
    ef_synth, reachable_locations, safety_synth, AnalysisResult, ConcreteOptions, ReachOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct NiReport {
    pub verdict: Verdict,
    /// Location vectors reachable without high actions.
    pub restricted: BTreeSet<LocVec>,
    /// Location vectors of the model reachable next to the attacker.
    pub full: BTreeSet<LocVec>,
    pub restricted_complete: bool,
    pub full_complete: bool,
}

impl NiReport {
    /// Locations reachable only because of the attacker.
    pub fn extra(&self) -> Vec<&LocVec> {
        self.full.difference(&self.restricted).collect()
    }

    /// Whether the attacker side reaches a location vector matching `bad`.
    pub fn full_reaches(&self, bad: &Target) -> bool {
        self.full.iter().any(|l| bad.matches(l))
    }

    /// The verdict under `mode`.  In bad-location mode a reached bad vector
    /// is a definite no even when the exploration was cut short.
    pub fn verdict_in(&self, mode: &NiMode) -> Verdict {
        match mode {
            NiMode::Agreement => self.verdict,
            NiMode::Bad(bad) if self.full_reaches(bad) => Verdict::No,
            NiMode::Bad(_) if self.full_complete => Verdict::Yes,
            NiMode::Bad(_) => Verdict::Unknown,
        }
    }
}

/// `net ∥ Interf` where the gadget spaces high actions by `n`.
pub fn with_attacker(net: &Network, n: InterfBound) -> Result<Network> {
    let high = net.actions_of(ActionClass::High);
    let low = net.actions_of(ActionClass::Low);
    let gadget = build_interf(&high, &low, n, net.context())?;
    net.compose(gadget)
}

/// Decides whether `net` at `val` is `n`-location-non-interfering.
pub fn check_noninterf(
    net: &Network,
    val: &Valuation,
    n: &Rat,
    opts: &ConcreteOptions,
) -> Result<NiReport> {
    let inst = net.instantiate(val)?;
    let r = reachable_locations(&inst.restrict(), opts)?;
    if net.actions_of(ActionClass::High).is_empty() {
        return Ok(NiReport {
            verdict: Verdict::Yes,
            full: r.locations.clone(),
            restricted: r.locations,
            restricted_complete: r.complete,
            full_complete: r.complete,
        });
    }
    let full_net = with_attacker(&inst, InterfBound::Const(n.clone()))?.hide();
    let f = reachable_locations(&full_net, opts)?;
    let k = net.components().len();
    let full: BTreeSet<LocVec> = f.locations.iter().map(|l| l[..k].to_vec()).collect();
    if r.complete && f.complete {
        assert!(
            r.locations.is_subset(&full),
            "attacker side lost a restricted location"
        );
    }
    let verdict = if r.complete && f.complete {
        if r.locations == full {
            Verdict::Yes
        } else {
            Verdict::No
        }
    } else if r.complete && !full.is_subset(&r.locations) {
        Verdict::No
    } else {
        Verdict::Unknown
    };
    Ok(NiReport {
        verdict,
        restricted: r.locations,
        full,
        restricted_complete: r.complete,
        full_complete: f.complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NiMode {
    /// Reachability of every location must agree between both sides.
    Agreement,
    /// The given location vectors must stay unreachable next to the attacker.
    Bad(Target),
}

/// Valuations of the parameters and of `n_name` under which the model is
/// non-interfering.
pub fn synth_noninterf(
    net: &Network,
    mode: &NiMode,
    n_name: &str,
    opts: &ReachOptions,
) -> Result<AnalysisResult> {
    if net.context().lookup(n_name).is_some() {
        return Err(Error::usage(format!(
            "`{n_name}` is already a variable of the model; pick another name for the attacker bound"
        )));
    }
    let full = with_attacker(net, InterfBound::Param(n_name.to_string()))?.hide();
    let pctx = full.context().parameters_only();
    if net.actions_of(ActionClass::High).is_empty() {
        return Ok(AnalysisResult {
            constraint: ConstraintSet::universe(pctx),
            complete: true,
            states_explored: 0,
            max_depth_reached: 0,
            depth_limited: false,
            timed_out: false,
            over_approximation: false,
        });
    }
    match mode {
        NiMode::Bad(bad) => safety_synth(&full, bad, opts),
        NiMode::Agreement => {
            let restricted = net.restrict();
            let rset: BTreeSet<LocVec> = restricted.graph_reachable().into_iter().collect();
            let mut acc = ConstraintSet::universe(pctx.clone());
            let mut complete = true;
            let mut explored = 0;
            let mut max_depth = 0;
            let mut depth_limited = false;
            let mut timed_out = false;
            for l in net.graph_reachable() {
                let t = Target::exact(std::slice::from_ref(&l));
                let kr = if rset.contains(&l) {
                    let r = ef_synth(&restricted, &t, opts)?;
                    complete &= r.complete;
                    depth_limited |= r.depth_limited;
                    timed_out |= r.timed_out;
                    explored += r.states_explored;
                    max_depth = max_depth.max(r.max_depth_reached);
                    r.constraint.embed(&pctx)?
                } else {
                    ConstraintSet::empty(pctx.clone())
                };
                let kf = {
                    let r = ef_synth(&full, &t, opts)?;
                    complete &= r.complete;
                    depth_limited |= r.depth_limited;
                    timed_out |= r.timed_out;
                    explored += r.states_explored;
                    max_depth = max_depth.max(r.max_depth_reached);
                    r.constraint
                };
                let both = kr.intersect(&kf)?;
                let neither = kr.negate().intersect(&kf.negate())?;
                acc = acc.intersect(&both.union(&neither)?)?;
            }
            Ok(AnalysisResult {
                constraint: acc,
                complete,
                states_explored: explored,
                max_depth_reached: max_depth,
                depth_limited,
                timed_out,
                over_approximation: !complete,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    pub valuation: String,
    pub inside: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SampleReport {
    pub agreements: usize,
    pub disagreements: Vec<SampleOutcome>,
    pub unknowns: Vec<SampleOutcome>,
}

/// Compares membership in `constraint` with [`check_noninterf`] at each
/// valuation (which must assign `n_name` as well as the parameters).
pub fn sample_and_verify(
    net: &Network,
    mode: &NiMode,
    constraint: &ConstraintSet,
    n_name: &str,
    samples: &[Valuation],
    opts: &ConcreteOptions,
) -> Result<SampleReport> {
    let mut report = SampleReport::default();
    for v in samples {
        let n = v
            .get(n_name)
            .cloned()
            .ok_or_else(|| Error::usage(format!("sample {v} has no value for `{n_name}`")))?;
        let inside = constraint.satisfies(v)?;
        let verdict = check_noninterf(net, v, &n, opts)?.verdict_in(mode);
        let outcome = SampleOutcome {
            valuation: v.to_string(),
            inside,
            verdict,
        };
        match verdict {
            Verdict::Unknown => report.unknowns.push(outcome),
            Verdict::Yes if inside => report.agreements += 1,
            Verdict::No if !inside => report.agreements += 1,
            _ => report.disagreements.push(outcome),
        }
    }
    Ok(report)
}
