//! Traits shared by everything that maps beliefs to costs or actions.

use crate::belief::Belief;

/// A value function: expected discounted cost as a function of the belief.
pub trait ValueFunction: Sync {
    fn value(&self, b: &Belief) -> f64;
}

/// A stationary policy over beliefs.
pub trait BeliefPolicy: Sync {
    fn action(&self, b: &Belief) -> usize;
}

impl<F> ValueFunction for F
where
    F: Fn(&Belief) -> f64 + Sync,
{
    fn value(&self, b: &Belief) -> f64 {
        self(b)
    }
}

impl<F> BeliefPolicy for F
where
    F: Fn(&Belief) -> usize + Sync,
{
    fn action(&self, b: &Belief) -> usize {
        self(b)
    }
}
