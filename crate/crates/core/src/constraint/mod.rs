//! Exact linear constraints over clocks and parameters.

mod atom;
mod context;
pub mod json;
mod lp;
mod polyhedron;
mod rational;
mod set;
pub mod text;
mod valuation;

pub use atom::{Atom, Cmp, Rel};
pub use context::{Context, Var, VarId, VarKind};
pub use polyhedron::Polyhedron;
pub use rational::{fmt_rat, frac, int, parse_rat, Rat};
pub use set::ConstraintSet;
pub use text::{parse_constraint, parse_polyhedron};
pub use valuation::Valuation;
