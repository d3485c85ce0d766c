use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Parameter,
    Clock,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub name: String,
}

impl Var {
    pub fn clock(name: impl Into<String>) -> Self {
        Var {
            kind: VarKind::Clock,
            name: name.into(),
        }
    }

    pub fn parameter(name: impl Into<String>) -> Self {
        Var {
            kind: VarKind::Parameter,
            name: name.into(),
        }
    }
}

/// Position of a variable inside a [`Context`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Ordered set of variables a polyhedron ranges over.
///
/// Parameters always precede clocks, so that equality pivots in canonical
/// forms land on clocks and express them in terms of parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    vars: Vec<Var>,
}

impl Context {
    pub fn new(vars: Vec<Var>) -> Result<Arc<Self>> {
        let mut params: Vec<Var> = Vec::new();
        let mut clocks: Vec<Var> = Vec::new();
        for v in vars {
            if params.iter().chain(&clocks).any(|w| w.name == v.name) {
                return Err(Error::usage(format!("duplicate variable `{}`", v.name)));
            }
            match v.kind {
                VarKind::Parameter => params.push(v),
                VarKind::Clock => clocks.push(v),
            }
        }
        params.extend(clocks);
        Ok(Arc::new(Context { vars: params }))
    }

    pub fn from_names(params: &[&str], clocks: &[&str]) -> Arc<Self> {
        let vars = params
            .iter()
            .map(|p| Var::parameter(*p))
            .chain(clocks.iter().map(|c| Var::clock(*c)))
            .collect();
        Context::new(vars).expect("distinct names")
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(Context { vars: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, id: VarId) -> &Var {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).map(VarId)
    }

    pub fn clocks(&self) -> Vec<VarId> {
        self.of_kind(VarKind::Clock)
    }

    pub fn parameters(&self) -> Vec<VarId> {
        self.of_kind(VarKind::Parameter)
    }

    fn of_kind(&self, kind: VarKind) -> Vec<VarId> {
        self.ids().filter(|&i| self.var(i).kind == kind).collect()
    }

    /// Context with the given variables removed (order of the rest kept).
    pub fn without(&self, drop: &[VarId]) -> Arc<Self> {
        Arc::new(Context {
            vars: self
                .ids()
                .filter(|i| !drop.contains(i))
                .map(|i| self.var(i).clone())
                .collect(),
        })
    }

    pub fn parameters_only(&self) -> Arc<Self> {
        self.without(&self.clocks())
    }

    /// Union by name; variables of `self` first, kinds must agree.
    pub fn merge(&self, other: &Context) -> Result<Arc<Self>> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            match vars.iter().find(|w| w.name == v.name) {
                Some(w) if w.kind != v.kind => {
                    return Err(Error::usage(format!(
                        "variable `{}` is a clock in one component and a parameter in another",
                        v.name
                    )))
                }
                Some(_) => {}
                None => vars.push(v.clone()),
            }
        }
        Context::new(vars)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}
