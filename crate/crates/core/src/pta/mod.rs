//! Parametric timed automata and the operations the non-interference
//! reduction needs: instantiation, restriction, hiding, composition.

mod interf;
mod network;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constraint::{Context, Polyhedron, Valuation, VarId, VarKind};
use crate::error::{Error, Result};

pub use interf::{build_interf, InterfBound, INTERF_CLOCK};
pub use network::{LocVec, Move, Network, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionClass {
    Low,
    High,
    Silent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub name: String,
    pub class: ActionClass,
}

impl Action {
    pub fn low(name: &str) -> Self {
        Action {
            name: name.into(),
            class: ActionClass::Low,
        }
    }

    pub fn high(name: &str) -> Self {
        Action {
            name: name.into(),
            class: ActionClass::High,
        }
    }
}

/// Edge label: a declared action or the silent action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Silent,
    Act(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Silent => f.write_str("eps"),
            Label::Act(a) => f.write_str(a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: Polyhedron,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub guard: Polyhedron,
    pub label: Label,
    pub resets: Vec<VarId>,
    pub target: usize,
}

/// A parametric timed automaton over the variables of its context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pta {
    name: String,
    ctx: Arc<Context>,
    actions: Vec<Action>,
    locations: Vec<Location>,
    initial: usize,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Pta {
    /// Checks structural well-formedness (indices, contexts); the softer
    /// checks are reported by [`Pta::validate`].
    pub fn new(
        name: impl Into<String>,
        ctx: Arc<Context>,
        actions: Vec<Action>,
        locations: Vec<Location>,
        initial: usize,
        edges: Vec<Edge>,
    ) -> Result<Pta> {
        let name = name.into();
        if initial >= locations.len() {
            return Err(Error::model(format!("automaton `{name}` has no initial location")));
        }
        for l in &locations {
            if **l.invariant.context() != *ctx {
                return Err(Error::usage(format!(
                    "invariant of `{}` is over {}, expected {ctx}",
                    l.name,
                    l.invariant.context()
                )));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if e.source >= locations.len() || e.target >= locations.len() {
                return Err(Error::usage(format!("edge {i} of `{name}` has a dangling endpoint")));
            }
            if **e.guard.context() != *ctx {
                return Err(Error::usage(format!("guard of edge {i} of `{name}` uses another context")));
            }
            if let Some(r) = e.resets.iter().find(|r| r.0 >= ctx.len() || ctx.var(**r).kind != VarKind::Clock) {
                return Err(Error::usage(format!("edge {i} of `{name}` resets non-clock {r:?}")));
            }
            if let Label::Act(a) = &e.label {
                if !actions.iter().any(|x| &x.name == a) {
                    return Err(Error::usage(format!("edge {i} of `{name}` uses undeclared action `{a}`")));
                }
            }
        }
        Ok(Pta {
            name,
            ctx,
            actions,
            locations,
            initial,
            edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn clocks(&self) -> Vec<VarId> {
        self.ctx.clocks()
    }

    pub fn parameters(&self) -> Vec<VarId> {
        self.ctx.parameters()
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn class_of(&self, label: &Label) -> ActionClass {
        match label {
            Label::Silent => ActionClass::Silent,
            Label::Act(a) => self
                .actions
                .iter()
                .find(|x| &x.name == a)
                .map(|x| x.class)
                .unwrap_or(ActionClass::Silent),
        }
    }

    pub fn actions_of(&self, class: ActionClass) -> Vec<String> {
        self.actions
            .iter()
            .filter(|a| a.class == class)
            .map(|a| a.name.clone())
            .collect()
    }

    pub fn is_parameter_free(&self) -> bool {
        self.ctx.parameters().is_empty()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Pta {
        self.name = name.into();
        self
    }

    /// Substitutes parameter values; the result has no parameters left.
    pub fn instantiate(&self, val: &Valuation) -> Result<Pta> {
        for p in self.ctx.parameters() {
            let name = &self.ctx.var(p).name;
            if val.get(name).is_none() {
                return Err(Error::usage(format!("no value for parameter `{name}`")));
            }
        }
        let only: Valuation = Valuation::from_pairs(
            self.ctx
                .parameters()
                .into_iter()
                .map(|p| {
                    let n = self.ctx.var(p).name.as_str();
                    (n, val.get(n).cloned().expect("checked above"))
                }),
        )?;
        let ctx = self.ctx.without(&self.ctx.parameters());
        let remap = |r: &VarId| {
            ctx.lookup(&self.ctx.var(*r).name).expect("clock kept")
        };
        Ok(Pta {
            name: self.name.clone(),
            actions: self.actions.clone(),
            locations: self
                .locations
                .iter()
                .map(|l| Location {
                    name: l.name.clone(),
                    invariant: l.invariant.instantiate(&only),
                })
                .collect(),
            initial: self.initial,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    source: e.source,
                    guard: e.guard.instantiate(&only),
                    label: e.label.clone(),
                    resets: e.resets.iter().map(remap).collect(),
                    target: e.target,
                })
                .collect(),
            ctx,
        })
    }

    /// Drops every edge labeled with a high action.
    pub fn restrict(&self) -> Pta {
        let mut out = self.clone();
        out.edges
            .retain(|e| self.class_of(&e.label) != ActionClass::High);
        out
    }

    /// Relabels every high edge with the silent action.
    pub fn hide(&self) -> Pta {
        let mut out = self.clone();
        for e in out.edges.iter_mut() {
            if self.class_of(&e.label) == ActionClass::High {
                e.label = Label::Silent;
            }
        }
        out
    }

    /// Re-expresses guards and invariants over a larger context.
    pub fn embed(&self, ctx: &Arc<Context>) -> Result<Pta> {
        let remap = |r: &VarId| -> Result<VarId> {
            ctx.lookup(&self.ctx.var(*r).name)
                .ok_or_else(|| Error::usage("clock missing from context"))
        };
        Ok(Pta {
            name: self.name.clone(),
            actions: self.actions.clone(),
            locations: self
                .locations
                .iter()
                .map(|l| {
                    Ok(Location {
                        name: l.name.clone(),
                        invariant: l.invariant.embed(ctx)?,
                    })
                })
                .collect::<Result<_>>()?,
            initial: self.initial,
            edges: self
                .edges
                .iter()
                .map(|e| {
                    Ok(Edge {
                        source: e.source,
                        guard: e.guard.embed(ctx)?,
                        label: e.label.clone(),
                        resets: e.resets.iter().map(remap).collect::<Result<_>>()?,
                        target: e.target,
                    })
                })
                .collect::<Result<_>>()?,
            ctx: ctx.clone(),
        })
    }

    /// Well-formedness report; empty when the automaton is fine.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |m: String| out.push(Diagnostic { message: m });
        let mut seen = BTreeSet::new();
        for l in &self.locations {
            if !seen.insert(l.name.as_str()) {
                diag(format!("{}: duplicate location `{}`", self.name, l.name));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &self.actions {
            if !seen.insert(a.name.as_str()) {
                diag(format!("{}: action `{}` declared twice", self.name, a.name));
            }
            if a.class == ActionClass::Silent {
                diag(format!("{}: action `{}` uses the reserved silent class", self.name, a.name));
            }
        }
        let clocks = self.ctx.clocks();
        let multi_clock = |p: &Polyhedron| {
            p.atoms()
                .iter()
                .any(|a| clocks.iter().filter(|c| a.mentions(c.0)).count() > 1)
        };
        for l in &self.locations {
            if multi_clock(&l.invariant) {
                diag(format!(
                    "{}: invariant of `{}` relates two clocks",
                    self.name, l.name
                ));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if multi_clock(&e.guard) {
                diag(format!(
                    "{}: guard of edge {i} ({} -> {}) relates two clocks",
                    self.name, self.locations[e.source].name, self.locations[e.target].name
                ));
            }
        }
        if self.locations[self.initial].invariant.is_empty() {
            diag(format!("{}: initial invariant is unsatisfiable", self.name));
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::constraint::{frac, parse_polyhedron};

    /// The three-location example: a high self-loop on l0 and two low
    /// edges out of it.
    pub(crate) fn fig1() -> Pta {
        let ctx = Context::from_names(&["p"], &["x", "y"]);
        let g = |t: &str| parse_polyhedron(&ctx, t).unwrap();
        let top = Polyhedron::universe(ctx.clone());
        let loc = |n: &str| Location {
            name: n.into(),
            invariant: top.clone(),
        };
        Pta::new(
            "A",
            ctx.clone(),
            vec![Action::low("l"), Action::high("h")],
            vec![loc("l0"), loc("l1"), loc("l2")],
            0,
            vec![
                Edge {
                    source: 0,
                    guard: g("y < 3 && x == p"),
                    label: Label::Act("h".into()),
                    resets: vec![ctx.lookup("x").unwrap()],
                    target: 0,
                },
                Edge {
                    source: 0,
                    guard: g("y > 2"),
                    label: Label::Act("l".into()),
                    resets: vec![],
                    target: 1,
                },
                Edge {
                    source: 0,
                    guard: g("y > 2 && x == 0"),
                    label: Label::Act("l".into()),
                    resets: vec![],
                    target: 2,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn instantiation_substitutes_parameters() {
        let a = fig1();
        let v = Valuation::new().with("p", frac(9, 10)).unwrap();
        let i = a.instantiate(&v).unwrap();
        assert!(i.is_parameter_free());
        assert_eq!(i.edges()[0].guard.to_string(), "y < 3 && x == 9/10");
        let one = a.instantiate(&Valuation::new().with("p", frac(1, 1)).unwrap()).unwrap();
        assert_eq!(one.edges()[0].guard.to_string(), "y < 3 && x == 1");
        assert!(a.instantiate(&Valuation::new()).is_err());
        assert_eq!(i.instantiate(&Valuation::new()).unwrap(), i);
    }

    #[test]
    fn restrict_and_hide() {
        let a = fig1();
        assert_eq!(a.restrict().edges().len(), 2);
        let h = a.hide();
        assert_eq!(h.edges().len(), 3);
        assert_eq!(h.edges().iter().filter(|e| e.label == Label::Silent).count(), 1);
        assert_eq!(a.restrict().hide(), a.restrict());
        assert!(a.restrict().edges().iter().all(|e| a.edges().contains(e)));
    }

    #[test]
    fn validation() {
        assert!(fig1().validate().is_empty());
        let mut dup = fig1();
        dup.locations[2].name = "l1".into();
        assert_eq!(dup.validate().len(), 1);
        let mut diag = fig1();
        diag.edges[1].guard = parse_polyhedron(diag.context(), "x < y").unwrap();
        assert_eq!(diag.validate().len(), 1);
    }
}
