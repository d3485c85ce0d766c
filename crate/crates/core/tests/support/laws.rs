//! Randomized laws of the constraint engine, checked against a plain i64
//! evaluation of the raw atoms on a grid.  Shared by the property suite and
//! the acceptance run.

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use timed_ni::constraint::{Atom, Cmp, ConstraintSet, Context, Polyhedron, Rat, VarId};

const DIM: usize = 4;

/// `Σ c_i v_i ⋈ k/2`, variables p, q, x, y.
#[derive(Clone, Debug)]
struct RawAtom {
    c: [i64; DIM],
    cmp: Cmp,
    k: i64,
}

impl RawAtom {
    /// Evaluates at a point given in quarter units.
    fn holds(&self, quarters: &[i64; DIM]) -> bool {
        // Σ c (q/4) ⋈ k/2  <=>  Σ c q ⋈ 2k
        let lhs: i64 = self.c.iter().zip(quarters).map(|(c, q)| c * q).sum();
        let rhs = 2 * self.k;
        match self.cmp {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
        }
    }

    fn atom(&self) -> Atom {
        let coeffs = self.c.iter().map(|c| BigInt::from(2 * c)).collect();
        Atom::from_ints(coeffs, self.cmp, BigInt::from(self.k))
    }
}

fn ctx() -> Arc<Context> {
    Context::from_names(&["p", "q"], &["x", "y"])
}

fn poly(atoms: &[RawAtom]) -> Polyhedron {
    Polyhedron::from_atoms(ctx(), atoms.iter().map(RawAtom::atom).collect()).unwrap()
}

fn raw_holds(atoms: &[RawAtom], g: &[i64; DIM]) -> bool {
    atoms.iter().all(|a| a.holds(g))
}

fn point(g: &[i64]) -> Vec<Rat> {
    g.iter().map(|&q| Rat::new(q.into(), 4.into())).collect()
}

/// All points of {0, 1/2, ..., 2}^4 in quarter units.
fn half_grid() -> Vec<[i64; DIM]> {
    let vals = [0, 2, 4, 6, 8];
    let mut out = vec![];
    for a in vals {
        for b in vals {
            for c in vals {
                for d in vals {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn cmp() -> impl Strategy<Value = Cmp> {
    prop_oneof![
        Just(Cmp::Lt),
        Just(Cmp::Le),
        Just(Cmp::Eq),
        Just(Cmp::Ge),
        Just(Cmp::Gt)
    ]
}

fn raw_atom() -> impl Strategy<Value = RawAtom> {
    (prop::array::uniform4(-3i64..=3), cmp(), -12i64..=12).prop_map(|(c, cmp, k)| RawAtom {
        c,
        cmp,
        k,
    })
}

fn raw_poly() -> impl Strategy<Value = Vec<RawAtom>> {
    prop::collection::vec(raw_atom(), 1..=4)
}

fn small_poly() -> impl Strategy<Value = Vec<RawAtom>> {
    prop::collection::vec(raw_atom(), 1..=3)
}

/// Atoms whose coefficient on `v` is in {-1, 0, 1}, so every projection
/// witness lies on the quarter grid.
fn grid_closed(v: usize) -> impl Strategy<Value = Vec<RawAtom>> {
    prop::collection::vec((raw_atom(), -1i64..=1), 1..=4).prop_map(move |atoms| {
        atoms
            .into_iter()
            .map(|(mut a, cv)| {
                a.c[v] = cv;
                a
            })
            .collect()
    })
}

fn same(a: &Polyhedron, b: &Polyhedron) -> bool {
    a.includes(b).unwrap() && b.includes(a).unwrap()
}


type Outcome = Result<(), TestCaseError>;

fn canonical_form_keeps_the_solution_set(atoms: Vec<RawAtom>) -> Outcome {
    let p = poly(&atoms);
    for g in half_grid() {
        prop_assert_eq!(p.contains_point(&point(&g)), raw_holds(&atoms, &g), "at {:?}", g);
    }
    match p.sample_point() {
        Some(pt) => prop_assert!(p.contains_point(&pt)),
        None => prop_assert!(p.is_empty()),
    }
    Ok(())
}

fn projection_matches_brute_force_search((v, atoms): (usize, Vec<RawAtom>)) -> Outcome {
    let p = poly(&atoms);
    let proj = p.eliminate(&[VarId(v)]);
    for g in half_grid() {
        if g[v] != 0 {
            continue;
        }
        let exists = (0..=240).any(|qv| {
            let mut h = g;
            h[v] = qv;
            raw_holds(&atoms, &h)
        });
        let rest: Vec<i64> = (0..DIM).filter(|&j| j != v).map(|j| g[j]).collect();
        prop_assert_eq!(proj.contains_point(&point(&rest)), exists, "at {:?}", g);
    }
    let all: Vec<VarId> = (0..DIM).map(VarId).collect();
    prop_assert_eq!(p.eliminate(&all).is_empty(), p.is_empty());
    Ok(())
}

fn intersection_laws((a, b, c): (Vec<RawAtom>, Vec<RawAtom>, Vec<RawAtom>)) -> Outcome {
    let (pa, pb, pc) = (poly(&a), poly(&b), poly(&c));
    let ab = pa.intersect(&pb).unwrap();
    prop_assert!(same(&ab, &pb.intersect(&pa).unwrap()));
    prop_assert!(same(
        &ab.intersect(&pc).unwrap(),
        &pa.intersect(&pb.intersect(&pc).unwrap()).unwrap()
    ));
    prop_assert!(same(&pa.intersect(&pa).unwrap(), &pa));
    for g in half_grid() {
        prop_assert_eq!(
            ab.contains_point(&point(&g)),
            raw_holds(&a, &g) && raw_holds(&b, &g)
        );
    }
    Ok(())
}

fn elapse_laws(atoms: Vec<RawAtom>) -> Outcome {
    let p = poly(&atoms);
    let e = p.time_elapse();
    prop_assert!(e.includes(&p).unwrap());
    prop_assert!(same(&e.time_elapse(), &e));
    prop_assert!(same(&e.project_to_parameters(), &p.project_to_parameters()));
    Ok(())
}

fn reset_laws((atoms, which): (Vec<RawAtom>, usize)) -> Outcome {
    let p = poly(&atoms);
    let clocks: Vec<VarId> = [2usize, 3]
        .into_iter()
        .enumerate()
        .filter(|(i, _)| which & (1 << i) != 0)
        .map(|(_, j)| VarId(j))
        .collect();
    let r = p.reset(&clocks);
    if let Some(pt) = r.sample_point() {
        for c in &clocks {
            prop_assert_eq!(&pt[c.0], &Rat::from_integer(0.into()));
        }
    }
    for g in half_grid() {
        if clocks.iter().any(|c| g[c.0] != 0) {
            prop_assert!(!r.contains_point(&point(&g)));
        }
    }
    prop_assert!(same(&r.project_to_parameters(), &p.project_to_parameters()));
    prop_assert!(same(&p.reset(&[]), &p));
    Ok(())
}

fn negation_partitions_the_orthant(polys: Vec<Vec<RawAtom>>) -> Outcome {
    let s = polys.iter().fold(ConstraintSet::empty(ctx()), |s, a| {
        s.union(&ConstraintSet::from_polyhedron(poly(a))).unwrap()
    });
    let n = s.negate();
    prop_assert!(s.intersect(&n).unwrap().is_empty());
    prop_assert!(s
        .union(&n)
        .unwrap()
        .set_equal(&ConstraintSet::universe(ctx()))
        .unwrap());
    for g in half_grid() {
        let inside = polys.iter().any(|a| raw_holds(a, &g));
        prop_assert_eq!(s.contains_point(&point(&g)), inside);
        prop_assert_eq!(n.contains_point(&point(&g)), !inside);
    }
    Ok(())
}

fn serialization_ignores_atom_order((atoms, rot): (Vec<RawAtom>, usize)) -> Outcome {
    let mut shuffled = atoms.clone();
    let len = shuffled.len();
    shuffled.rotate_left(rot % len);
    shuffled.reverse();
    let a = ConstraintSet::from_polyhedron(poly(&atoms));
    let b = ConstraintSet::from_polyhedron(poly(&shuffled));
    prop_assert_eq!(a.to_string(), b.to_string());
    Ok(())
}

pub const LAWS: &[&str] = &[
    "canonical form keeps the solution set",
    "projection matches brute-force search",
    "intersection laws",
    "elapse laws",
    "reset laws",
    "negation partitions the orthant",
    "serialization ignores atom order",
];

/// Runs law `i` of [`LAWS`] on `cases` random instances.  A fixed seed
/// makes the instances reproducible.
pub fn check(i: usize, cases: u32, fixed_seed: bool) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = if fixed_seed {
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    } else {
        TestRunner::new(config)
    };
    macro_rules! run {
        ($strategy:expr, $law:expr) => {
            runner.run(&$strategy, $law).map_err(|e| e.to_string())
        };
    }
    let r = match i {
        0 => run!(raw_poly(), canonical_form_keeps_the_solution_set),
        1 => run!(
            (0usize..DIM).prop_flat_map(|v| (Just(v), grid_closed(v))),
            projection_matches_brute_force_search
        ),
        2 => run!((raw_poly(), raw_poly(), raw_poly()), intersection_laws),
        3 => run!(raw_poly(), elapse_laws),
        4 => run!((raw_poly(), 1usize..=3), reset_laws),
        5 => run!(
            prop::collection::vec(small_poly(), 1..=3),
            negation_partitions_the_orthant
        ),
        6 => run!((raw_poly(), 0usize..4), serialization_ignores_atom_order),
        _ => panic!("no law {i}"),
    };
    r.map_err(|e| format!("{}: {e}", LAWS[i]))
}
