//! Discrete POMDPs, point-based value iteration, finite state controllers and
//! value-of-information analysis for agents acting under epistemic
//! constraints, such as a regulator forcing a repair whenever the damage
//! probability exceeds a threshold.
//!
//! The pipeline:
//!
//! * [`model`] holds the problem instance and the belief operators;
//! * [`pbvi`] solves for optimal α-vector value functions on a belief grid;
//! * [`fsc`] turns a solved policy into a finite state controller, evaluates
//!   any cost table under it and computes stationary distributions;
//! * [`voi`] computes pre-posterior values, the value of current information
//!   (pessimistic and optimistic) and of the flow of information;
//! * [`scenarios`] builds the three-state deterioration example, regulation
//!   settings and parametric sweeps.
//!
//! ```
//! use pomdp_voi::{Belief, ObsMode, scenarios::DeteriorationSpec};
//!
//! let model = DeteriorationSpec::default().build().unwrap();
//! let intact = Belief::point(3, 0).unwrap();
//! let next = model.transition_update(&intact, 0, 0, ObsMode::Background).unwrap();
//! assert!((next.get(1) - 0.04).abs() < 1e-12);
//! ```

pub mod belief;
pub mod error;
pub mod fsc;
pub mod io;
pub mod model;
pub mod pbvi;
pub mod scenarios;
pub mod value;
pub mod voi;

pub use belief::Belief;
pub use error::{Error, Result};
pub use model::{CostKind, CostTable, JointObservation, ObsMode, PomdpModel};
pub use pbvi::{AlphaSet, AlphaVector, BeliefGrid, SolverParams};
pub use value::{BeliefPolicy, ValueFunction};

// Compile and run the guide's code listings as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/beliefs.md")]
    mod beliefs {}
    #[doc = include_str!("../../../book/src/pbvi.md")]
    mod pbvi {}
    #[doc = include_str!("../../../book/src/controllers.md")]
    mod controllers {}
    #[doc = include_str!("../../../book/src/voi.md")]
    mod voi {}
    #[doc = include_str!("../../../book/src/deterioration.md")]
    mod deterioration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
