#[path = "support/laws.rs"]
mod laws;

const CASES: u32 = 1000;

fn law(i: usize) {
    if let Err(e) = laws::check(i, CASES, false) {
        panic!("{e}");
    }
}

#[test]
fn canonical_form_keeps_the_solution_set() {
    law(0);
}

#[test]
fn projection_matches_brute_force_search() {
    law(1);
}

#[test]
fn intersection_laws() {
    law(2);
}

#[test]
fn elapse_laws() {
    law(3);
}

#[test]
fn reset_laws() {
    law(4);
}

#[test]
fn negation_partitions_the_orthant() {
    law(5);
}

#[test]
fn serialization_ignores_atom_order() {
    law(6);
}
