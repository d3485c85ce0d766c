use serde_json::Value;
use timed_ni_wasm::{check_json, example_model, reach_json, synthesize_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn ef_region_on_the_p_axis() {
    let out = parse(&synthesize_json(&example_model(), "ef", "l2", 20, 4, 8).unwrap());
    assert_eq!(out["complete"], false);
    assert_eq!(out["plot"]["axes"], serde_json::json!(["p"]));
    // centers 1/4, 3/4, ..., 15/4: inside for 1/4, 3/4, 5/4, 9/4, 11/4
    assert_eq!(out["plot"]["rows"][0], "11101100");
}

#[test]
fn ni_region_is_two_dimensional() {
    let out = parse(&synthesize_json(&example_model(), "ni-bad", "l2", 12, 4, 4).unwrap());
    assert_eq!(out["plot"]["axes"], serde_json::json!(["p", "n"]));
    let rows = out["plot"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // bottom row is n = 1/2: only p = 7/4 and p >= 3 are safe there
    assert_eq!(rows[3], "0101");
    assert!(out["over_approximation"].as_bool().unwrap());
}

#[test]
fn example_checks() {
    let m = example_model();
    let no = parse(&check_json(&m, "p=11/10", "1", "").unwrap());
    assert_eq!(no["verdict"], "no");
    assert_eq!(no["attacker_only"], serde_json::json!(["l2"]));
    let yes = parse(&check_json(&m, "p=11/10", "2", "l2").unwrap());
    assert_eq!(yes["verdict"], "yes");
}

#[test]
fn reach_at_a_valuation() {
    let m = example_model();
    let r = parse(&reach_json(&m, "p=9/10", "l2").unwrap());
    assert_eq!(r["reachable"], true);
    assert_eq!(r["locations"], serde_json::json!(["l0", "l1", "l2"]));
    let r = parse(&reach_json(&m, "p=1", "l2").unwrap());
    assert_eq!(r["reachable"], false);
}

#[test]
fn errors_are_messages() {
    let m = example_model();
    assert!(synthesize_json(&m, "eg", "l2", 3, 4, 4).unwrap_err().contains("eg"));
    assert!(reach_json(&m, "p=1", "l7").is_err());
    assert!(check_json("automaton {", "", "1", "").is_err());
}
