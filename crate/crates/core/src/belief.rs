//! Probability vectors over hidden states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the unit-sum constraint.
pub const SUM_TOL: f64 = 1e-9;
/// Most negative entry tolerated as numerical drift.
pub const NEG_TOL: f64 = -1e-12;

/// A belief: a probability distribution over the hidden states of a model.
///
/// Entries are non-negative (down to [`NEG_TOL`]) and sum to one within
/// [`SUM_TOL`]. Beliefs are never renormalised or clamped after the fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidBelief {
                probs,
                reason: "empty".into(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < NEG_TOL) {
            let reason = format!("entry {p} is negative or not finite");
            return Err(Error::InvalidBelief { probs, reason });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            let reason = format!("entries sum to {sum}");
            return Err(Error::InvalidBelief { probs, reason });
        }
        Ok(Belief(probs))
    }

    /// Point mass on `state`.
    pub fn point(n_states: usize, state: usize) -> Result<Self> {
        if state >= n_states {
            return Err(Error::Index {
                what: "state",
                index: state,
                size: n_states,
            });
        }
        let mut probs = vec![0.0; n_states];
        probs[state] = 1.0;
        Ok(Belief(probs))
    }

    pub fn uniform(n_states: usize) -> Self {
        assert!(n_states > 0);
        Belief(vec![1.0 / n_states as f64; n_states])
    }

    /// Wraps a vector produced by an operator that preserves the simplex.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(
            (probs.iter().sum::<f64>() - 1.0).abs() <= 1e-8,
            "operator produced an unnormalised belief {probs:?}"
        );
        Belief(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, state: usize) -> f64 {
        self.0[state]
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        dot(&self.0, v)
    }

    /// Max-norm distance to another belief of the same size.
    pub fn max_distance(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn euclidean_distance(&self, other: &Belief) -> f64 {
        euclidean(&self.0, &other.0)
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Belief, lambda: f64) -> Belief {
        let probs = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Belief(probs)
    }

    /// Bit pattern of the entries, usable as an exact hash key.
    pub(crate) fn key(&self) -> Vec<u64> {
        self.0.iter().map(|p| p.to_bits()).collect()
    }
}

impl TryFrom<Vec<f64>> for Belief {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Belief::new(probs)
    }
}

impl From<Belief> for Vec<f64> {
    fn from(b: Belief) -> Self {
        b.0
    }
}

impl AsRef<[f64]> for Belief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(Belief::new(vec![]).is_err());
        assert!(Belief::new(vec![0.5, 0.4]).is_err());
        assert!(Belief::new(vec![1.1, -0.1]).is_err());
        assert!(Belief::new(vec![f64::NAN, 1.0]).is_err());
        // drift inside the tolerance is kept verbatim
        let b = Belief::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(b.get(1), -1e-13);
    }

    #[test]
    fn point_and_uniform() {
        assert_eq!(Belief::point(3, 1).unwrap().probs(), &[0.0, 1.0, 0.0]);
        assert!(Belief::point(3, 3).is_err());
        assert_eq!(Belief::uniform(4).probs(), &[0.25; 4]);
    }

    #[test]
    fn serde_validates() {
        let b: Belief = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(b.get(1), 0.75);
        assert!(serde_json::from_str::<Belief>("[0.25, 0.5]").is_err());
    }
}
