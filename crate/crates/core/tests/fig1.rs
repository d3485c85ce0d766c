//! The small example automaton: bounded synthesis against the exact answers,
//! the concrete engine and the grid simulator.

use timed_ni::constraint::{frac, int, parse_constraint, ConstraintSet, Rat, Valuation};
use timed_ni::format::{parse_grid, parse_model, AnalysisDoc};
use timed_ni::noninterf::{sample_and_verify, synth_noninterf, NiMode};
use timed_ni::oracle::{simulate_reachable, SimOptions};
use timed_ni::pta::Network;
use timed_ni::reach::{
    ef_synth, reachable_locations, safety_synth, ConcreteOptions, ReachOptions,
};

const EF_L2: &str = "0 < p && p < 1 || 1 < p && p < 3/2 || 2 < p && p < 3";
const SAFE_L2: &str = "p == 0 || p == 1 || 3/2 <= p && p <= 2 || p >= 3";
const NI_TABLE: &str = "0 < p && p < 1 && n > p || p == 1 && n >= 0 \
    || 1 < p && p < 3/2 && n > p || 3/2 <= p && p <= 2 && n >= 0 || p >= 3 && n >= 0";

fn fig1() -> Network {
    parse_model(include_str!("../models/fig1.model")).unwrap().network
}

fn at(p: Rat) -> Valuation {
    Valuation::new().with("p", p).unwrap()
}

fn exact(net: &Network, text: &str) -> ConstraintSet {
    parse_constraint(&net.context().parameters_only(), text).unwrap()
}

#[test]
fn the_exact_answers_are_complements() {
    let net = fig1();
    assert!(exact(&net, EF_L2).negate().set_equal(&exact(&net, SAFE_L2)).unwrap());
    assert_eq!(exact(&net, EF_L2).to_string(), EF_L2);
}

#[test]
fn bounded_synthesis_agrees_with_concrete_reachability_on_the_p_grid() {
    let net = fig1();
    let t = net.parse_target("l2").unwrap();
    let r = ef_synth(&net, &t, &ReachOptions::with_depth(40)).unwrap();
    assert!(!r.complete);
    assert_eq!(
        r.constraint.to_string(),
        "1 < p && p < 3/2 || 2 < p && p < 3 || 2/39 < p && p < 1"
    );
    let golden = exact(&net, EF_L2);
    assert!(golden.includes(&r.constraint).unwrap());
    for k in 0..=40 {
        let p = frac(k, 10);
        let v = at(p.clone());
        let reach = reachable_locations(&net.instantiate(&v).unwrap(), &ConcreteOptions::default())
            .unwrap();
        assert!(reach.complete);
        let hit = reach.locations.iter().any(|l| t.matches(l));
        assert_eq!(r.constraint.satisfies(&v).unwrap(), hit, "p = {p}");
        assert_eq!(golden.satisfies(&v).unwrap(), hit, "p = {p}");
    }
}

#[test]
fn safety_is_the_complement_and_over_approximates() {
    let net = fig1();
    let t = net.parse_target("l2").unwrap();
    let r = safety_synth(&net, &t, &ReachOptions::with_depth(20)).unwrap();
    assert!(r.over_approximation);
    assert!(r.constraint.includes(&exact(&net, SAFE_L2)).unwrap());
    let e = ef_synth(&net, &t, &ReachOptions::with_depth(20)).unwrap();
    assert!(r.constraint.set_equal(&e.constraint.negate()).unwrap());
}

#[test]
fn synthesis_grows_with_depth() {
    let net = fig1();
    let t = net.parse_target("l2").unwrap();
    let mut prev = ConstraintSet::empty(net.context().parameters_only());
    for d in 0..=16 {
        let r = ef_synth(&net, &t, &ReachOptions::with_depth(d)).unwrap();
        assert!(r.constraint.includes(&prev).unwrap(), "depth {d}");
        assert!(r.max_depth_reached <= d);
        prev = r.constraint;
    }
}

#[test]
fn pruning_never_changes_the_bounded_result() {
    let net = fig1();
    let t = net.parse_target("l2").unwrap();
    for d in 0..=8 {
        let pruned = ef_synth(&net, &t, &ReachOptions::with_depth(d)).unwrap();
        let plain = ef_synth(
            &net,
            &t,
            &ReachOptions {
                inclusion_pruning: false,
                coverage_pruning: false,
                ..ReachOptions::with_depth(d)
            },
        )
        .unwrap();
        assert!(pruned.constraint.set_equal(&plain.constraint).unwrap(), "depth {d}");
        assert!(pruned.states_explored <= plain.states_explored);
    }
}

#[test]
fn repeated_runs_serialize_identically() {
    let net = fig1();
    let t = net.parse_target("l2").unwrap();
    let a = ef_synth(&net, &t, &ReachOptions::with_depth(12)).unwrap();
    let b = ef_synth(&net, &t, &ReachOptions::with_depth(12)).unwrap();
    assert_eq!(a, b);
    let (ja, jb) = (AnalysisDoc::new(&a), AnalysisDoc::new(&b));
    assert_eq!(
        serde_json::to_string(&ja).unwrap(),
        serde_json::to_string(&jb).unwrap()
    );
}

#[test]
fn the_simulator_sees_what_the_zones_see() {
    let net = fig1();
    for (p, k) in [(frac(9, 10), 6), (int(1), 6), (frac(1, 2), 8), (frac(5, 2), 8)] {
        let inst = net.instantiate(&at(p.clone())).unwrap();
        let sim = simulate_reachable(
            &inst,
            &SimOptions {
                grid: frac(1, 10),
                max_steps: k,
                state_budget: None,
            },
        )
        .unwrap();
        let dbm = reachable_locations(&inst, &ConcreteOptions::default()).unwrap();
        assert_eq!(sim, dbm.locations, "p = {p}");
    }
}

/// The table plus `p == 0`, where the loop cannot move y past 0 and l2 stays
/// out of reach with or without the attacker.
fn corrected_table(net: &Network) -> ConstraintSet {
    let ctx = timed_ni::noninterf::with_attacker(net, timed_ni::pta::InterfBound::Param("n".into()))
        .unwrap()
        .context()
        .parameters_only();
    parse_constraint(&ctx, &format!("{NI_TABLE} || p == 0")).unwrap()
}

#[test]
fn noninterference_against_the_corrected_table() {
    let net = fig1();
    let bad = net.parse_target("l2").unwrap();
    let r = synth_noninterf(&net, &NiMode::Bad(bad.clone()), "n", &ReachOptions::with_depth(30))
        .unwrap();
    assert!(r.over_approximation);
    let golden = corrected_table(&net);
    assert!(r.constraint.includes(&golden).unwrap());
    let samples = parse_grid("p=0:4:1/4,n=0:4:1/4").unwrap();
    let o = ConcreteOptions::default();
    for c in [&golden, &r.constraint] {
        let rep = sample_and_verify(&net, &NiMode::Agreement, c, "n", &samples, &o).unwrap();
        assert_eq!(rep.agreements, samples.len(), "{:?}", rep.disagreements);
    }
    // bad mode and agreement mode give the same verdicts here
    let rep = sample_and_verify(&net, &NiMode::Bad(bad), &golden, "n", &samples, &o).unwrap();
    assert!(rep.disagreements.is_empty());
}

#[test]
fn agreement_mode_matches_bad_mode_at_equal_depth() {
    let net = fig1();
    let bad = net.parse_target("l2").unwrap();
    for d in [6, 14] {
        let opts = ReachOptions::with_depth(d);
        let a = synth_noninterf(&net, &NiMode::Agreement, "n", &opts).unwrap();
        let b = synth_noninterf(&net, &NiMode::Bad(bad.clone()), "n", &opts).unwrap();
        assert!(a.constraint.set_equal(&b.constraint).unwrap(), "depth {d}");
    }
}

#[test]
fn the_table_misses_p_zero() {
    let net = fig1();
    let golden = corrected_table(&net);
    let table = parse_constraint(golden.context(), NI_TABLE).unwrap();
    let missing = golden.difference(&table).unwrap();
    assert_eq!(missing.to_string(), "p == 0 && n >= 0");
}
