//! Per-order residual term counts of an identity check.

use serde::Serialize;

use crate::series::{LambdaSeries, Linear};

/// Number of surviving terms at each lambda-order of `lhs - rhs`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub counts: Vec<usize>,
}

impl Residual {
    pub fn new(name: impl Into<String>, order: u32) -> Self {
        Residual { name: name.into(), counts: vec![0; order as usize + 1] }
    }

    pub fn of<T: Linear>(name: impl Into<String>, s: &LambdaSeries<T>) -> Self {
        Residual { name: name.into(), counts: s.counts() }
    }

    pub fn of_difference<T: Linear>(name: impl Into<String>, a: &LambdaSeries<T>, b: &LambdaSeries<T>) -> Self {
        Self::of(name, &a.sub(b))
    }

    /// A residual with a single term count, for identities without a
    /// deformation parameter.
    pub fn count(name: impl Into<String>, n: usize) -> Self {
        Residual { name: name.into(), counts: vec![n] }
    }

    /// Adds the counts of another residual order by order.
    pub fn absorb<T: Linear>(&mut self, s: &LambdaSeries<T>) {
        for (k, c) in s.counts().into_iter().enumerate() {
            if k < self.counts.len() {
                self.counts[k] += c;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|c| *c == 0)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}
