use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{gcd_all, scale_to_integers, Rat};

/// Relation of a normalized atom `sum(c_i * v_i) REL k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

/// User-facing comparison operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "==",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }

    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Le => Cmp::Ge,
            Cmp::Eq => Cmp::Eq,
            Cmp::Ge => Cmp::Le,
            Cmp::Gt => Cmp::Lt,
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Cmp::Lt => ord == Ordering::Less,
            Cmp::Le => ord != Ordering::Greater,
            Cmp::Eq => ord == Ordering::Equal,
            Cmp::Ge => ord != Ordering::Less,
            Cmp::Gt => ord == Ordering::Greater,
        }
    }
}

/// Linear constraint `sum(coeffs[i] * v_i) rel rhs` with integer
/// coefficients whose gcd (together with `rhs`) is one.  Equalities have a
/// positive leading coefficient.
///
/// Field order matters: the derived `Ord` is the canonical atom order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    coeffs: Vec<BigInt>,
    rel: Rel,
    rhs: BigInt,
}

impl Atom {
    pub fn new(coeffs: &[Rat], cmp: Cmp, rhs: &Rat) -> Atom {
        let mut all: Vec<Rat> = coeffs.to_vec();
        all.push(rhs.clone());
        let mut ints = scale_to_integers(&all);
        let k = ints.pop().unwrap();
        Atom::from_ints(ints, cmp, k)
    }

    pub fn from_ints(mut coeffs: Vec<BigInt>, cmp: Cmp, mut rhs: BigInt) -> Atom {
        let rel = match cmp {
            Cmp::Lt => Rel::Lt,
            Cmp::Le => Rel::Le,
            Cmp::Eq => Rel::Eq,
            Cmp::Ge | Cmp::Gt => {
                for c in coeffs.iter_mut() {
                    *c = -&*c;
                }
                rhs = -rhs;
                if cmp == Cmp::Ge {
                    Rel::Le
                } else {
                    Rel::Lt
                }
            }
        };
        Atom { coeffs, rel, rhs }.normalized()
    }

    pub(crate) fn raw(coeffs: Vec<BigInt>, rel: Rel, rhs: BigInt) -> Atom {
        Atom { coeffs, rel, rhs }.normalized()
    }

    /// The unsatisfiable atom `0 < 0`.
    pub fn falsum(dim: usize) -> Atom {
        Atom {
            coeffs: vec![BigInt::zero(); dim],
            rel: Rel::Lt,
            rhs: BigInt::zero(),
        }
    }

    /// `v_j == 0`
    pub fn zero(dim: usize, j: usize) -> Atom {
        let mut coeffs = vec![BigInt::zero(); dim];
        coeffs[j] = BigInt::from(1);
        Atom {
            coeffs,
            rel: Rel::Eq,
            rhs: BigInt::zero(),
        }
    }

    fn normalized(mut self) -> Atom {
        if self.coeffs.iter().all(Zero::is_zero) {
            return match self.constant_truth() {
                Some(false) => Atom::falsum(self.coeffs.len()),
                _ => Atom {
                    coeffs: self.coeffs,
                    rel: Rel::Le,
                    rhs: BigInt::zero(),
                },
            };
        }
        let g = gcd_all(self.coeffs.iter().chain(std::iter::once(&self.rhs)));
        if !g.is_zero() && g != BigInt::from(1) {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &g;
            }
            self.rhs = &self.rhs / &g;
        }
        if self.rel == Rel::Eq {
            let lead_negative = self
                .coeffs
                .iter()
                .find(|c| !c.is_zero())
                .is_some_and(|c| c.is_negative());
            if lead_negative {
                for c in self.coeffs.iter_mut() {
                    *c = -&*c;
                }
                self.rhs = -&self.rhs;
            }
        }
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &BigInt {
        &self.coeffs[j]
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_strict(&self) -> bool {
        self.rel == Rel::Lt
    }

    pub fn is_equality(&self) -> bool {
        self.rel == Rel::Eq
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Truth value of an atom without variables; `None` otherwise.
    pub fn constant_truth(&self) -> Option<bool> {
        if !self.is_constant() {
            return None;
        }
        let zero = BigInt::zero();
        Some(match self.rel {
            Rel::Lt => zero < self.rhs,
            Rel::Le => zero <= self.rhs,
            Rel::Eq => zero == self.rhs,
        })
    }

    pub fn is_falsum(&self) -> bool {
        self.constant_truth() == Some(false)
    }

    pub fn mentions(&self, j: usize) -> bool {
        !self.coeffs[j].is_zero()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
    }

    pub fn lhs_value(&self, values: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| Rat::from_integer(c.clone()) * v)
            .sum()
    }

    pub fn holds(&self, values: &[Rat]) -> bool {
        let lhs = self.lhs_value(values);
        let rhs = Rat::from_integer(self.rhs.clone());
        match self.rel {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
        }
    }

    /// Atoms whose disjunction is the complement of `self`.
    pub fn negation(&self) -> Vec<Atom> {
        let neg: Vec<BigInt> = self.coeffs.iter().map(|c| -c).collect();
        let nrhs = -&self.rhs;
        match self.rel {
            Rel::Le => vec![Atom::raw(neg, Rel::Lt, nrhs)],
            Rel::Lt => vec![Atom::raw(neg, Rel::Le, nrhs)],
            Rel::Eq => vec![
                Atom::raw(self.coeffs.clone(), Rel::Lt, self.rhs.clone()),
                Atom::raw(neg, Rel::Lt, nrhs),
            ],
        }
    }

    /// Splits an equality into its two non-strict halves.
    pub fn halves(&self) -> Vec<Atom> {
        match self.rel {
            Rel::Eq => vec![
                Atom::raw(self.coeffs.clone(), Rel::Le, self.rhs.clone()),
                Atom::raw(
                    self.coeffs.iter().map(|c| -c).collect(),
                    Rel::Le,
                    -&self.rhs,
                ),
            ],
            _ => vec![self.clone()],
        }
    }

    /// Same atom with the relation relaxed or tightened.
    pub(crate) fn with_rel(&self, rel: Rel) -> Atom {
        Atom::raw(self.coeffs.clone(), rel, self.rhs.clone())
    }

    /// Reorders and resizes the coefficient vector: `map[i]` is the new
    /// position of old column `i` (`None` drops a column that must be zero).
    pub(crate) fn remap(&self, map: &[Option<usize>], new_dim: usize) -> Atom {
        let mut coeffs = vec![BigInt::zero(); new_dim];
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(j) = map[i] {
                coeffs[j] = c.clone();
            } else {
                debug_assert!(c.is_zero(), "dropping a constrained column");
            }
        }
        Atom::raw(coeffs, self.rel, self.rhs.clone())
    }

    /// Replaces variable `j` by the constant `value`.
    pub(crate) fn substitute(&self, j: usize, value: &Rat) -> Atom {
        let mut coeffs: Vec<Rat> = self
            .coeffs
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let shift = &coeffs[j] * value;
        coeffs[j] = Rat::zero();
        let rhs = Rat::from_integer(self.rhs.clone()) - shift;
        let cmp = match self.rel {
            Rel::Lt => Cmp::Lt,
            Rel::Le => Cmp::Le,
            Rel::Eq => Cmp::Eq,
        };
        Atom::new(&coeffs, cmp, &rhs)
    }

    /// `scale_self * self + scale_other * other`, strict if either is strict.
    /// Both scales must be positive unless `self` or `other` is an equality.
    pub(crate) fn combine(&self, scale_self: &BigInt, other: &Atom, scale_other: &BigInt) -> Atom {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * scale_self + b * scale_other)
            .collect();
        let rhs = &self.rhs * scale_self + &other.rhs * scale_other;
        let rel = match (self.rel, other.rel) {
            (Rel::Eq, r) | (r, Rel::Eq) => r,
            (Rel::Lt, _) | (_, Rel::Lt) => Rel::Lt,
            _ => Rel::Le,
        };
        Atom::raw(coeffs, rel, rhs)
    }
}
