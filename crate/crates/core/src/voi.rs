//! Pre-posterior values and value of information.
//!
//! With `V` a value function on beliefs, the pre-posterior value of the
//! additional observation `z` is
//!
//! ```text
//! U(b) = Σ_z P(z | b) V(u_Z(b, z))
//! ```
//!
//! and `V(b) − U(b)` is the value of current information. Costs are
//! minimised, so a negative VoI means the agent would rather not look.
//!
//! For a regulation pairing `πA` (background only) with `πB` (with the
//! additional stream):
//!
//! * `VoI_C^P = V_Y^{πA} − U_Y^{πA}`
//! * `VoI_C^O = V_W^{πB} − U_W^{πB}`
//! * `VoI_F   = V_Y^{πA} − U_W^{πB}`
//!
//! and `VoI_F` satisfies `VoI_F(b) = ΔC(b) + γ Σ_y P(y) VoI_F(τ_Y(b, y))`,
//! where `ΔC = VoI_C^O + ΔV` and `ΔV` is the loss of following `πA` for one
//! step before switching to `πB`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::Result;
use crate::model::{CostTable, ObsMode, PomdpModel};
use crate::value::{BeliefPolicy, ValueFunction};

/// Which value function the current-information VoI is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assumption {
    /// No additional information in future steps: use `V_Y^{πA}`.
    Pessimistic,
    /// Additional information at every future step: use `V_W^{πB}`.
    Optimistic,
}

/// `Σ_z P(z | b) V(u_Z(b, z))`, skipping impossible `z`.
pub fn pre_posterior(model: &PomdpModel, value: &dyn ValueFunction, b: &Belief) -> f64 {
    model
        .additional_posteriors(b)
        .iter()
        .map(|(_, lik, post)| lik * value.value(post))
        .sum()
}

/// `V(b) − U(b)`; the assumption is encoded by which `V` is passed.
pub fn voi_current(model: &PomdpModel, value: &dyn ValueFunction, b: &Belief) -> f64 {
    value.value(b) - pre_posterior(model, value, b)
}

/// Cost of following `policy_a` now, observing `w`, then continuing with the
/// plan valued by `value_b`:
/// `C(b, πA(b)) + γ Σ_w P(w | t(b, πA(b))) V_W^{πB}(τ_W(b, πA(b), w))`.
pub fn v_mixed(
    model: &PomdpModel,
    costs: &CostTable,
    policy_a: &dyn BeliefPolicy,
    value_b: &dyn ValueFunction,
    b: &Belief,
) -> f64 {
    let a = policy_a.action(b);
    let future: f64 = model
        .successors(b, a, ObsMode::Joint)
        .iter()
        .map(|(_, lik, post)| lik * value_b.value(post))
        .sum();
    costs.expected(b, a) + model.discount() * future
}

/// `ΔC = V_W^{πA,πB} − U_W^{πB}`.
pub fn delta_c(
    model: &PomdpModel,
    costs: &CostTable,
    policy_a: &dyn BeliefPolicy,
    value_b: &dyn ValueFunction,
    b: &Belief,
) -> f64 {
    v_mixed(model, costs, policy_a, value_b, b) - pre_posterior(model, value_b, b)
}

/// `VoI_F(b) − [ΔC(b) + γ Σ_y P(y | t(b, πA(b))) VoI_F(τ_Y(b, πA(b), y))]`.
pub fn flow_recursion_residual(
    model: &PomdpModel,
    policy_a: &dyn BeliefPolicy,
    voi_f: &dyn ValueFunction,
    delta_c: &dyn ValueFunction,
    b: &Belief,
) -> f64 {
    let a = policy_a.action(b);
    let future: f64 = model
        .successors(b, a, ObsMode::Background)
        .iter()
        .map(|(_, lik, post)| lik * voi_f.value(post))
        .sum();
    voi_f.value(b) - (delta_c.value(b) + model.discount() * future)
}

/// One belief's worth of values and VoI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiRow {
    pub belief: Belief,
    pub v_y: f64,
    pub u_y: f64,
    pub v_w: f64,
    pub u_w: f64,
    pub voi_cp: f64,
    pub voi_co: f64,
    pub voi_f: f64,
    pub delta_c: f64,
    pub delta_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiCurve {
    pub rows: Vec<VoiRow>,
}

impl VoiCurve {
    pub fn column(&self, f: impl Fn(&VoiRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// What a VoI curve is computed from.
pub struct VoiInputs<'a> {
    /// Costs the agent bears.
    pub costs: &'a CostTable,
    pub policy_a: &'a dyn BeliefPolicy,
    /// `V_Y^{πA}`.
    pub value_a: &'a dyn ValueFunction,
    /// `V_W^{πB}`.
    pub value_b: &'a dyn ValueFunction,
    /// `πA = πB`: `ΔV` is zero by definition rather than evaluated.
    pub same_policy: bool,
}

impl VoiInputs<'_> {
    pub fn row(&self, model: &PomdpModel, b: &Belief) -> VoiRow {
        let v_y = self.value_a.value(b);
        let u_y = pre_posterior(model, self.value_a, b);
        let v_w = self.value_b.value(b);
        let u_w = pre_posterior(model, self.value_b, b);
        let voi_co = v_w - u_w;
        let delta_v = if self.same_policy {
            0.0
        } else {
            v_mixed(model, self.costs, self.policy_a, self.value_b, b) - v_w
        };
        VoiRow {
            belief: b.clone(),
            v_y,
            u_y,
            v_w,
            u_w,
            voi_cp: v_y - u_y,
            voi_co,
            voi_f: v_y - u_w,
            delta_c: voi_co + delta_v,
            delta_v,
        }
    }

    /// `VoI_F` as a function of the belief.
    pub fn voi_f(&self, model: &PomdpModel, b: &Belief) -> f64 {
        self.value_a.value(b) - pre_posterior(model, self.value_b, b)
    }

    /// `ΔC` as a function of the belief.
    pub fn delta_c(&self, model: &PomdpModel, b: &Belief) -> f64 {
        if self.same_policy {
            voi_current(model, self.value_b, b)
        } else {
            delta_c(model, self.costs, self.policy_a, self.value_b, b)
        }
    }

    pub fn residual(&self, model: &PomdpModel, b: &Belief) -> f64 {
        let f = |x: &Belief| self.voi_f(model, x);
        let dc = |x: &Belief| self.delta_c(model, x);
        flow_recursion_residual(model, self.policy_a, &f, &dc, b)
    }
}

pub fn voi_curve(model: &PomdpModel, inputs: &VoiInputs<'_>, beliefs: &[Belief]) -> VoiCurve {
    VoiCurve {
        rows: beliefs.par_iter().map(|b| inputs.row(model, b)).collect(),
    }
}

/// Long-run averages under a belief distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedVoi {
    pub voi_co: f64,
    pub delta_v: f64,
    /// `(E[VoI_C^O] + E[ΔV]) / (1 − γ)`.
    pub voi_f: f64,
}

/// Weighted averages of `VoI_C^O` and `ΔV`; `weights` must sum to one.
pub fn expected_voi(weights: &[f64], voi_co: &[f64], delta_v: &[f64], gamma: f64) -> Result<ExpectedVoi> {
    if weights.len() != voi_co.len() || weights.len() != delta_v.len() {
        return Err(crate::Error::Parameter(format!(
            "{} weights for {} / {} values",
            weights.len(),
            voi_co.len(),
            delta_v.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 || weights.iter().any(|w| *w < 0.0) {
        return Err(crate::Error::Parameter(format!("weights sum to {total}")));
    }
    let e = |v: &[f64]| weights.iter().zip(v).map(|(w, x)| w * x).sum::<f64>();
    let voi_co = e(voi_co);
    let delta_v = e(delta_v);
    Ok(ExpectedVoi {
        voi_co,
        delta_v,
        voi_f: (voi_co + delta_v) / (1.0 - gamma),
    })
}
