//! Browser bindings: bounded synthesis with a sampled region for plotting,
//! a concrete non-interference check, and concrete reachability.
//!
//! Every function takes model text and returns a JSON string. The plain
//! `*_json` functions carry the logic and are what the native tests call.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use timed_ni::constraint::{frac, parse_rat, ConstraintSet, Rat, Valuation};
use timed_ni::format::parse_model;
use timed_ni::noninterf::{check_noninterf, synth_noninterf, NiMode};
use timed_ni::pta::Network;
use timed_ni::reach::{ef_synth, reachable_locations, safety_synth, ConcreteOptions, ReachOptions};

const FIG1: &str = include_str!("../../core/models/fig1.model");

/// Keeps a page from hanging on a model with a huge state space.
const STATE_BUDGET: usize = 20_000;

fn network(model: &str) -> Result<Network, String> {
    let m = parse_model(model).map_err(|e| e.to_string())?;
    if let Some(d) = m.diagnostics.first() {
        return Err(d.to_string());
    }
    Ok(m.network)
}

fn valuation(text: &str) -> Result<Valuation, String> {
    Valuation::parse(text).map_err(|e| e.to_string())
}

/// Membership of cell centers in `c` over its first one or two parameters,
/// each ranging over `[0, max]`. Rows run from the top of the plot down.
fn sample(c: &ConstraintSet, max: i64, cells: i64) -> Result<Value, String> {
    let names: Vec<String> = c.context().vars().iter().map(|v| v.name.clone()).collect();
    if names.is_empty() || names.len() > 2 || cells < 1 || max < 1 {
        return Ok(json!({ "axes": names, "rows": [] }));
    }
    let at = |k: i64| -> Rat { frac(max * (2 * k + 1), 2 * cells) };
    let ys = if names.len() == 2 { cells } else { 1 };
    let mut rows = Vec::new();
    for j in (0..ys).rev() {
        let mut row = String::with_capacity(cells as usize);
        for i in 0..cells {
            let mut v = Valuation::new().with(&names[0], at(i)).map_err(|e| e.to_string())?;
            if names.len() == 2 {
                v = v.with(&names[1], at(j)).map_err(|e| e.to_string())?;
            }
            row.push(if c.satisfies(&v).map_err(|e| e.to_string())? { '1' } else { '0' });
        }
        rows.push(row);
    }
    Ok(json!({ "axes": names, "max": max, "rows": rows }))
}

/// `kind` is `ef`, `safety`, `ni-bad` or `ni-agreement`. `target` names the
/// target (ef), the bad locations (safety, ni-bad) or is ignored.
pub fn synthesize_json(
    model: &str,
    kind: &str,
    target: &str,
    depth: usize,
    max: i64,
    cells: i64,
) -> Result<String, String> {
    let net = network(model)?;
    let opts = ReachOptions {
        state_budget: Some(STATE_BUDGET),
        ..ReachOptions::with_depth(depth)
    };
    let locs = || net.parse_target(target).map_err(|e| e.to_string());
    let r = match kind {
        "ef" => ef_synth(&net, &locs()?, &opts),
        "safety" => safety_synth(&net, &locs()?, &opts),
        "ni-bad" => synth_noninterf(&net, &NiMode::Bad(locs()?), "n", &opts),
        "ni-agreement" => synth_noninterf(&net, &NiMode::Agreement, "n", &opts),
        other => return Err(format!("unknown analysis `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "constraint": r.constraint.to_string(),
        "complete": r.complete,
        "states": r.states_explored,
        "depth": r.max_depth_reached,
        "over_approximation": r.over_approximation,
        "plot": sample(&r.constraint, max, cells)?,
    })
    .to_string())
}

/// Non-interference at one valuation; `bad` empty means agreement mode.
pub fn check_json(model: &str, valuation_text: &str, n: &str, bad: &str) -> Result<String, String> {
    let net = network(model)?;
    let v = valuation(valuation_text)?;
    let n = parse_rat(n).map_err(|e| e.to_string())?;
    let mode = match bad.trim() {
        "" => NiMode::Agreement,
        b => NiMode::Bad(net.parse_target(b).map_err(|e| e.to_string())?),
    };
    let o = ConcreteOptions {
        depth_limit: None,
        state_budget: Some(STATE_BUDGET),
    };
    let r = check_noninterf(&net, &v, &n, &o).map_err(|e| e.to_string())?;
    let attacker_only: Vec<String> = r.extra().into_iter().map(|l| net.loc_name(l)).collect();
    Ok(json!({
        "verdict": r.verdict_in(&mode),
        "attacker_only": attacker_only,
    })
    .to_string())
}

pub fn reach_json(model: &str, valuation_text: &str, target: &str) -> Result<String, String> {
    let net = network(model)?;
    let t = net.parse_target(target).map_err(|e| e.to_string())?;
    let inst = net.instantiate(&valuation(valuation_text)?).map_err(|e| e.to_string())?;
    let o = ConcreteOptions {
        depth_limit: None,
        state_budget: Some(STATE_BUDGET),
    };
    let r = reachable_locations(&inst, &o).map_err(|e| e.to_string())?;
    let names: Vec<String> = r.locations.iter().map(|l| inst.loc_name(l)).collect();
    Ok(json!({
        "reachable": r.locations.iter().any(|l| t.matches(l)),
        "complete": r.complete,
        "locations": names,
    })
    .to_string())
}

#[wasm_bindgen(js_name = exampleModel)]
pub fn example_model() -> String {
    FIG1.to_string()
}

#[wasm_bindgen]
pub fn synthesize(
    model: &str,
    kind: &str,
    target: &str,
    depth: usize,
    max: i32,
    cells: i32,
) -> Result<String, JsError> {
    synthesize_json(model, kind, target, depth, max.into(), cells.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(model: &str, valuation: &str, n: &str, bad: &str) -> Result<String, JsError> {
    check_json(model, valuation, n, bad).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reach(model: &str, valuation: &str, target: &str) -> Result<String, JsError> {
    reach_json(model, valuation, target).map_err(|e| JsError::new(&e))
}
