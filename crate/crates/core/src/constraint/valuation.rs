use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use super::context::Context;
use super::rational::{fmt_rat, parse_rat, Rat};
use crate::error::{Error, Result};

/// Nonnegative rational assignment to named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Valuation {
    values: BTreeMap<String, Rat>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Rat)>) -> Result<Self> {
        let mut v = Valuation::new();
        for (name, value) in pairs {
            v.set(name, value)?;
        }
        Ok(v)
    }

    pub fn set(&mut self, name: &str, value: Rat) -> Result<()> {
        if value.is_negative() {
            return Err(Error::usage(format!(
                "negative value {} for `{name}`",
                fmt_rat(&value)
            )));
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: Rat) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Rat> {
        self.values.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in context order; every context variable must be assigned.
    pub fn point(&self, ctx: &Context) -> Result<Vec<Rat>> {
        ctx.vars()
            .iter()
            .map(|v| {
                self.values
                    .get(&v.name)
                    .cloned()
                    .ok_or_else(|| Error::usage(format!("no value for `{}`", v.name)))
            })
            .collect()
    }

    /// Parses `p=1/2, n=3`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut v = Valuation::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("expected `name=value`, got `{part}`")))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::usage(format!("missing name in `{part}`")));
            }
            if v.values.contains_key(name) {
                return Err(Error::usage(format!("`{name}` assigned twice")));
            }
            v.set(name, parse_rat(value)?)?;
        }
        Ok(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_rat(v)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}
