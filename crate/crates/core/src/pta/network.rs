use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use super::{Action, ActionClass, Edge, Label, Location, Pta};
use crate::constraint::{Context, Polyhedron, Valuation, VarId};
use crate::error::{Error, Result};

/// One location index per component.
pub type LocVec = Vec<usize>;

/// A discrete transition of the network: one edge per participating
/// component, `(component, edge index)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub parts: Vec<(usize, usize)>,
    pub label: Label,
    pub class: ActionClass,
}

impl Move {
    /// `0.2+2.7`
    pub fn id(&self) -> String {
        self.parts
            .iter()
            .map(|(c, e)| format!("{c}.{e}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Components composed over a shared context, explored lazily.
///
/// Actions in the sync set fire jointly in every component whose alphabet
/// contains them; everything else interleaves.  The silent action never
/// synchronizes.
#[derive(Clone, Debug)]
pub struct Network {
    ctx: Arc<Context>,
    components: Vec<Pta>,
    sync: BTreeSet<String>,
    classes: BTreeMap<String, ActionClass>,
    restricted: bool,
    hidden: bool,
    /// Outgoing edge indices per component and location.
    out: Vec<Vec<Vec<usize>>>,
    /// Components declaring each synchronized action, in order.
    owners: BTreeMap<String, Vec<usize>>,
}

impl Network {
    pub fn single(pta: Pta) -> Network {
        Network::new(vec![pta], None).expect("a single automaton composes")
    }

    pub fn new(components: Vec<Pta>, sync: Option<BTreeSet<String>>) -> Result<Network> {
        if components.is_empty() {
            return Err(Error::usage("a network needs at least one automaton"));
        }
        let mut ctx = components[0].context().clone();
        for c in &components[1..] {
            ctx = ctx.merge(c.context())?;
        }
        let mut classes: BTreeMap<String, ActionClass> = BTreeMap::new();
        let mut count: BTreeMap<String, usize> = BTreeMap::new();
        for c in &components {
            for a in c.actions() {
                if let Some(k) = classes.get(&a.name) {
                    if *k != a.class {
                        return Err(Error::usage(format!(
                            "action `{}` is low in one automaton and high in another",
                            a.name
                        )));
                    }
                }
                classes.insert(a.name.clone(), a.class);
                *count.entry(a.name.clone()).or_default() += 1;
            }
        }
        let sync = match sync {
            Some(s) => {
                if let Some(a) = s.iter().find(|a| !classes.contains_key(*a)) {
                    return Err(Error::usage(format!(
                        "sync action `{a}` is not declared by any automaton"
                    )));
                }
                s
            }
            None => count
                .into_iter()
                .filter(|(_, n)| *n >= 2)
                .map(|(a, _)| a)
                .collect(),
        };
        let components = components
            .iter()
            .map(|c| c.embed(&ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Network::assemble(ctx, components, sync, classes, false, false))
    }

    fn assemble(
        ctx: Arc<Context>,
        components: Vec<Pta>,
        sync: BTreeSet<String>,
        classes: BTreeMap<String, ActionClass>,
        restricted: bool,
        hidden: bool,
    ) -> Network {
        let out = components
            .iter()
            .map(|c| {
                let mut v = vec![Vec::new(); c.locations().len()];
                for (i, e) in c.edges().iter().enumerate() {
                    v[e.source].push(i);
                }
                v
            })
            .collect();
        let owners = sync
            .iter()
            .map(|a| {
                let who = components
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.actions().iter().any(|x| &x.name == a))
                    .map(|(i, _)| i)
                    .collect();
                (a.clone(), who)
            })
            .collect();
        Network {
            ctx,
            components,
            sync,
            classes,
            restricted,
            hidden,
            out,
            owners,
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn components(&self) -> &[Pta] {
        &self.components
    }

    pub fn sync(&self) -> &BTreeSet<String> {
        &self.sync
    }

    pub fn class_of(&self, action: &str) -> Option<ActionClass> {
        self.classes.get(action).copied()
    }

    pub fn actions_of(&self, class: ActionClass) -> Vec<String> {
        self.classes
            .iter()
            .filter(|(_, k)| **k == class)
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn is_parameter_free(&self) -> bool {
        self.ctx.parameters().is_empty()
    }

    pub fn initial(&self) -> LocVec {
        self.components.iter().map(Pta::initial).collect()
    }

    pub fn invariant(&self, locs: &[usize]) -> Polyhedron {
        let mut inv = Polyhedron::universe(self.ctx.clone());
        for (c, &l) in self.components.iter().zip(locs) {
            let i = &c.locations()[l].invariant;
            if !i.is_universe() {
                inv = inv.intersect(i).expect("shared context");
            }
        }
        inv
    }

    pub fn edge(&self, component: usize, edge: usize) -> &Edge {
        &self.components[component].edges()[edge]
    }

    fn enabled(&self, locs: &[usize], c: usize, action: &str) -> Vec<usize> {
        self.out[c][locs[c]]
            .iter()
            .copied()
            .filter(|&e| matches!(&self.components[c].edges()[e].label, Label::Act(a) if a == action))
            .collect()
    }

    /// Discrete transitions available from `locs` (ignoring guards), in
    /// component then edge declaration order.
    pub fn moves(&self, locs: &[usize]) -> Vec<Move> {
        let mut out = Vec::new();
        for c in 0..self.components.len() {
            for &e in &self.out[c][locs[c]] {
                let label = self.components[c].edges()[e].label.clone();
                let class = match &label {
                    Label::Silent => ActionClass::Silent,
                    Label::Act(a) => self.classes[a],
                };
                if self.restricted && class == ActionClass::High {
                    continue;
                }
                let parts_list: Vec<Vec<(usize, usize)>> = match &label {
                    Label::Act(a) if self.sync.contains(a) => {
                        let owners = &self.owners[a];
                        if owners.first() != Some(&c) {
                            continue;
                        }
                        let mut combos: Vec<Vec<(usize, usize)>> = vec![vec![(c, e)]];
                        for &o in &owners[1..] {
                            let choices = self.enabled(locs, o, a);
                            let mut next = Vec::new();
                            for combo in &combos {
                                for &f in &choices {
                                    let mut k = combo.clone();
                                    k.push((o, f));
                                    next.push(k);
                                }
                            }
                            combos = next;
                        }
                        combos
                    }
                    _ => vec![vec![(c, e)]],
                };
                for parts in parts_list {
                    let (label, class) = if self.hidden && class == ActionClass::High {
                        (Label::Silent, ActionClass::Silent)
                    } else {
                        (label.clone(), class)
                    };
                    out.push(Move { parts, label, class });
                }
            }
        }
        out
    }

    pub fn guard(&self, m: &Move) -> Polyhedron {
        let mut g = Polyhedron::universe(self.ctx.clone());
        for &(c, e) in &m.parts {
            let eg = &self.edge(c, e).guard;
            if !eg.is_universe() {
                g = g.intersect(eg).expect("shared context");
            }
        }
        g
    }

    pub fn resets(&self, m: &Move) -> Vec<VarId> {
        let mut r: Vec<VarId> = m
            .parts
            .iter()
            .flat_map(|&(c, e)| self.edge(c, e).resets.iter().copied())
            .collect();
        r.sort();
        r.dedup();
        r
    }

    pub fn target(&self, locs: &[usize], m: &Move) -> LocVec {
        let mut t = locs.to_vec();
        for &(c, e) in &m.parts {
            t[c] = self.edge(c, e).target;
        }
        t
    }

    /// Looks up a move by its [`Move::id`] among those enabled at `locs`.
    pub fn find_move(&self, locs: &[usize], id: &str) -> Option<Move> {
        self.moves(locs).into_iter().find(|m| m.id() == id)
    }

    /// `l0` for one component, `(l0,i1)` otherwise.
    pub fn loc_name(&self, locs: &[usize]) -> String {
        let names: Vec<&str> = self
            .components
            .iter()
            .zip(locs)
            .map(|(c, &l)| c.locations()[l].name.as_str())
            .collect();
        if names.len() == 1 {
            names[0].to_string()
        } else {
            format!("({})", names.join(","))
        }
    }

    pub fn restrict(&self) -> Network {
        let mut n = self.clone();
        n.restricted = true;
        n
    }

    pub fn hide(&self) -> Network {
        let mut n = self.clone();
        n.hidden = true;
        n
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn is_hidden(&self) -> bool {
        self.hidden
    }

    pub fn instantiate(&self, val: &Valuation) -> Result<Network> {
        let comps = self
            .components
            .iter()
            .map(|c| c.instantiate(val))
            .collect::<Result<Vec<_>>>()?;
        let ctx = self.ctx.without(&self.ctx.parameters());
        let comps = comps
            .iter()
            .map(|c| c.embed(&ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Network::assemble(
            ctx,
            comps,
            self.sync.clone(),
            self.classes.clone(),
            self.restricted,
            self.hidden,
        ))
    }

    /// Adds a component, keeping restriction/hiding flags.  The sync set is
    /// extended with the new component's actions already known here.
    pub fn compose(&self, extra: Pta) -> Result<Network> {
        let mut comps = self.components.clone();
        comps.push(extra);
        let mut sync = self.sync.clone();
        let last = comps.last().expect("just pushed");
        for a in last.actions() {
            let shared = comps[..comps.len() - 1]
                .iter()
                .any(|c| c.actions().iter().any(|x| x.name == a.name));
            if shared {
                sync.insert(a.name.clone());
            }
        }
        let mut n = Network::new(comps, Some(sync))?;
        n.restricted = self.restricted;
        n.hidden = self.hidden;
        Ok(n)
    }

    /// Location vectors reachable in the untimed graph of the network.
    pub fn graph_reachable(&self) -> Vec<LocVec> {
        let init = self.initial();
        let mut seen: BTreeSet<LocVec> = BTreeSet::from([init.clone()]);
        let mut order = vec![init.clone()];
        let mut queue = VecDeque::from([init]);
        while let Some(l) = queue.pop_front() {
            for m in self.moves(&l) {
                let t = self.target(&l, &m);
                if seen.insert(t.clone()) {
                    order.push(t.clone());
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Eager product automaton over the graph-reachable location vectors.
    pub fn product(&self) -> Result<Pta> {
        if self.components.len() == 1 && !self.restricted && !self.hidden {
            return Ok(self.components[0].clone());
        }
        let vecs = self.graph_reachable();
        let index: BTreeMap<&LocVec, usize> = vecs.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let locations = vecs
            .iter()
            .map(|v| Location {
                name: self.loc_name(v),
                invariant: self.invariant(v),
            })
            .collect();
        let mut edges = Vec::new();
        for (i, v) in vecs.iter().enumerate() {
            for m in self.moves(v) {
                edges.push(Edge {
                    source: i,
                    guard: self.guard(&m),
                    label: m.label.clone(),
                    resets: self.resets(&m),
                    target: index[&self.target(v, &m)],
                });
            }
        }
        let actions = self
            .classes
            .iter()
            .filter(|(_, k)| !(self.restricted || self.hidden) || **k != ActionClass::High)
            .map(|(a, k)| Action {
                name: a.clone(),
                class: *k,
            })
            .collect();
        let name = self
            .components
            .iter()
            .map(Pta::name)
            .collect::<Vec<_>>()
            .join("||");
        Pta::new(name, self.ctx.clone(), actions, locations, 0, edges)
    }

    /// Parses `l2`, `P1.CS&P2.CS`, or several such alternatives separated
    /// by commas.
    pub fn parse_target(&self, text: &str) -> Result<Target> {
        let mut alts = Vec::new();
        for alt in text.split(',').map(str::trim) {
            if alt.is_empty() {
                return Err(Error::usage(format!("empty target in `{text}`")));
            }
            let mut conj = Vec::new();
            for part in alt.split('&').map(str::trim) {
                conj.push(self.resolve_location(part)?);
            }
            alts.push(conj);
        }
        Ok(Target { alts })
    }

    fn resolve_location(&self, text: &str) -> Result<(usize, usize)> {
        if let Some((comp, loc)) = text.split_once('.') {
            let c = self
                .components
                .iter()
                .position(|p| p.name() == comp)
                .ok_or_else(|| Error::usage(format!("unknown automaton `{comp}`")))?;
            let l = self.components[c]
                .location_index(loc)
                .ok_or_else(|| Error::usage(format!("unknown location `{loc}` in `{comp}`")))?;
            return Ok((c, l));
        }
        let hits: Vec<(usize, usize)> = self
            .components
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.location_index(text).map(|l| (c, l)))
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::usage(format!("unknown location `{text}`"))),
            _ => Err(Error::usage(format!(
                "location `{text}` is ambiguous; write `Automaton.{text}`"
            ))),
        }
    }
}

/// Disjunction of partial location vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    alts: Vec<Vec<(usize, usize)>>,
}

impl Target {
    pub fn none() -> Target {
        Target { alts: Vec::new() }
    }

    /// Exactly the given location vectors.
    pub fn exact(vecs: &[LocVec]) -> Target {
        Target {
            alts: vecs
                .iter()
                .map(|v| v.iter().copied().enumerate().collect())
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.alts.is_empty()
    }

    pub fn matches(&self, locs: &[usize]) -> bool {
        self.alts
            .iter()
            .any(|alt| alt.iter().all(|&(c, l)| locs.get(c) == Some(&l)))
    }
}
