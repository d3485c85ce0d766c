use std::sync::Arc;

use super::{Action, Edge, Label, Location, Pta};
use crate::constraint::{parse_polyhedron, Context, Polyhedron, Rat, Var, fmt_rat};
use crate::error::Result;

pub const INTERF_CLOCK: &str = "x_interf";

/// Minimal spacing between two high actions of the attacker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterfBound {
    Param(String),
    Const(Rat),
}

/// The attacker gadget: `i0` accepts low actions and any first high
/// action, `i1` accepts low actions and high actions spaced by at least
/// the bound.
///
/// `taken` lists the model's variables; the gadget clock is renamed with a
/// numeric suffix if `x_interf` is already used.
pub fn build_interf(high: &[String], low: &[String], n: InterfBound, taken: &Context) -> Result<Pta> {
    let mut clock = INTERF_CLOCK.to_string();
    let mut k = 1;
    while taken.lookup(&clock).is_some() {
        clock = format!("{INTERF_CLOCK}_{k}");
        k += 1;
    }
    let mut vars = vec![Var::clock(clock.clone())];
    let bound = match &n {
        InterfBound::Param(p) => {
            vars.push(Var::parameter(p.clone()));
            p.clone()
        }
        InterfBound::Const(c) => fmt_rat(c),
    };
    let ctx: Arc<Context> = Context::new(vars)?;
    let x = ctx.lookup(&clock).expect("declared");
    let top = Polyhedron::universe(ctx.clone());
    let spaced = parse_polyhedron(&ctx, &format!("{clock} >= {bound}"))?;

    let mut edges = Vec::new();
    for loc in [0, 1] {
        for a in low {
            edges.push(Edge {
                source: loc,
                guard: top.clone(),
                label: Label::Act(a.clone()),
                resets: vec![],
                target: loc,
            });
        }
    }
    for h in high {
        edges.push(Edge {
            source: 0,
            guard: top.clone(),
            label: Label::Act(h.clone()),
            resets: vec![x],
            target: 1,
        });
    }
    for h in high {
        edges.push(Edge {
            source: 1,
            guard: spaced.clone(),
            label: Label::Act(h.clone()),
            resets: vec![x],
            target: 1,
        });
    }
    let actions = high
        .iter()
        .map(|h| Action::high(h))
        .chain(low.iter().map(|l| Action::low(l)))
        .collect();
    let loc = |name: &str| Location {
        name: name.into(),
        invariant: top.clone(),
    };
    Pta::new("Interf", ctx, actions, vec![loc("i0"), loc("i1")], 0, edges)
}
