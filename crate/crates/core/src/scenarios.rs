//! The three-state deterioration example: intact (1), damaged (2) and
//! failed (3), maintained by doing nothing (1) or repairing (2).
//!
//! Failure is revealed by the background signal. The additional signal is a
//! noisy Gaussian reading centred at −1/2 when intact and +1/2 when damaged,
//! discretised into equal-width bins. A regulator imposes the repair policy
//! that is optimal for societal costs; the agent bears its own costs.
//!
//! ```
//! use pomdp_voi::scenarios::DeteriorationSpec;
//!
//! let model = DeteriorationSpec::default().build().unwrap();
//! assert_eq!(model.t(1, 0, 2), 0.12);
//! assert_eq!(model.costs(pomdp_voi::CostKind::Agent).get(2, 1), 1.5);
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::fsc::{
    build_joint_chain, filtered_occupancy, stationary_distribution, Controller, EvaluatedController,
    SimulationConfig, StationaryDistribution,
};
use crate::model::{CostKind, ModelFile, ObsMode, PomdpModel};
use crate::pbvi::{extract_threshold, solve_optimal, BeliefGrid, Solution, SolverParams, Threshold};
use crate::value::ValueFunction;
use crate::voi::{expected_voi, voi_curve, ExpectedVoi, VoiCurve, VoiInputs, VoiRow};

pub const DO_NOTHING: usize = 0;
pub const REPAIR: usize = 1;

/// Additional-signal row used for the failed state, which the background
/// signal already identifies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailedRow {
    #[default]
    CopyDamaged,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeteriorationSpec {
    pub p12: f64,
    pub p23: f64,
    pub repair_cost_agent: f64,
    pub repair_cost_society: f64,
    pub sigma: f64,
    pub n_z_bins: usize,
    /// Bin range beyond each mean, in multiples of `sigma`.
    pub z_half_range: f64,
    pub discount: f64,
    pub failed_row: FailedRow,
    /// Use the damaged-state row `[0, p23, 1 − p23]` exactly as printed in
    /// the source table instead of `[0, 1 − p23, p23]`. Audit only.
    pub table1_literal: bool,
}

impl Default for DeteriorationSpec {
    fn default() -> Self {
        DeteriorationSpec {
            p12: 0.04,
            p23: 0.12,
            repair_cost_agent: 0.5,
            repair_cost_society: 0.246,
            sigma: 3.0,
            n_z_bins: 300,
            z_half_range: 5.0,
            discount: 0.95,
            failed_row: FailedRow::CopyDamaged,
            table1_literal: false,
        }
    }
}

impl DeteriorationSpec {
    pub fn check(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} = {p} must lie in (0, 1)")))
            }
        };
        prob("p12", self.p12)?;
        prob("p23", self.p23)?;
        prob("discount", self.discount)?;
        if !(self.sigma > 0.0) {
            return Err(Error::Parameter(format!("sigma = {} must be positive", self.sigma)));
        }
        if self.n_z_bins < 2 {
            return Err(Error::Parameter("at least two z bins are required".into()));
        }
        if !(self.z_half_range > 0.0) {
            return Err(Error::Parameter("z_half_range must be positive".into()));
        }
        if self.repair_cost_agent < 0.0 || self.repair_cost_society < 0.0 {
            return Err(Error::Parameter("repair costs must be non-negative".into()));
        }
        Ok(())
    }

    pub fn model_file(&self) -> Result<ModelFile> {
        self.check()?;
        let (p12, p23) = (self.p12, self.p23);
        let damaged = if self.table1_literal {
            vec![0.0, p23, 1.0 - p23]
        } else {
            vec![0.0, 1.0 - p23, p23]
        };
        let reset = vec![1.0 - p12, p12, 0.0];
        let transition = vec![
            vec![reset.clone(), reset.clone()],
            vec![damaged, reset.clone()],
            vec![vec![0.0, 0.0, 1.0], reset],
        ];
        let silent = vec![vec![1.0, 0.0]; 2];
        let emission_background = vec![silent.clone(), silent, vec![vec![0.0, 1.0]; 2]];
        let n = self.n_z_bins;
        let intact = discretize_gaussian(-0.5, self.sigma, n, self.z_half_range)?;
        let dam = discretize_gaussian(0.5, self.sigma, n, self.z_half_range)?;
        let failed = match self.failed_row {
            FailedRow::CopyDamaged => dam.clone(),
            FailedRow::Uniform => vec![1.0 / n as f64; n],
        };
        let costs = |r: f64| vec![vec![0.0, r], vec![0.0, r], vec![1.0, 1.0 + r]];
        Ok(ModelFile {
            n_states: 3,
            n_actions: 2,
            n_obs_background: 2,
            n_obs_additional: n,
            transition,
            emission_background,
            emission_additional: vec![intact, dam, failed],
            cost_agent: costs(self.repair_cost_agent),
            cost_society: costs(self.repair_cost_society),
            discount: self.discount,
        })
    }

    pub fn build(&self) -> Result<PomdpModel> {
        PomdpModel::from_file(&self.model_file()?)
    }
}

/// Bin probabilities of `Normal(mu, sigma)` over `n_bins` equal-width bins
/// spanning `[−1/2 − half_range·σ, 1/2 + half_range·σ]`. The outer bins take
/// the tails; the last bin is set so the row sums to one.
pub fn discretize_gaussian(mu: f64, sigma: f64, n_bins: usize, half_range: f64) -> Result<Vec<f64>> {
    if n_bins < 2 || !(half_range > 0.0) {
        return Err(Error::Parameter("need n_bins >= 2 and half_range > 0".into()));
    }
    let normal = Normal::new(mu, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let lo = -0.5 - half_range * sigma;
    let hi = 0.5 + half_range * sigma;
    let width = (hi - lo) / n_bins as f64;
    let cdf: Vec<f64> = (1..n_bins).map(|k| normal.cdf(lo + width * k as f64)).collect();
    let mut row = Vec::with_capacity(n_bins);
    row.push(cdf[0]);
    for w in cdf.windows(2) {
        row.push((w[1] - w[0]).max(0.0));
    }
    let head: f64 = row.iter().sum();
    row.push((1.0 - head).max(0.0));
    Ok(row)
}

/// Damage probability of a belief on the `b(3) = 0` segment.
pub fn p_dam(b: &Belief) -> f64 {
    b.get(1)
}

/// `[1 − q, q, 0]`.
pub fn segment_belief(q: f64) -> Result<Belief> {
    Belief::new(vec![1.0 - q, q, 0.0])
}

/// Repair threshold of a policy on the segment part of a deterioration grid.
pub fn threshold(grid: &BeliefGrid, policy: &[usize]) -> Threshold {
    let seg: Vec<usize> = (0..grid.len()).filter(|i| grid.get(*i).get(2) == 0.0).collect();
    let pdam: Vec<f64> = seg.iter().map(|i| p_dam(grid.get(*i))).collect();
    let actions: Vec<usize> = seg.iter().map(|i| policy[*i]).collect();
    extract_threshold(&pdam, &actions, REPAIR)
}

/// Filtered damage probability after `steps` silent do-nothing steps.
pub fn silent_belief(model: &PomdpModel, start: &Belief, steps: usize) -> Result<Belief> {
    let mut b = start.clone();
    for _ in 0..steps {
        b = model.transition_update(&b, DO_NOTHING, 0, ObsMode::Background)?;
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingMode {
    /// One imposed policy whether or not the additional signal is available.
    Fixed,
    /// A separate imposed policy for when the additional signal is available.
    Flexible,
}

impl std::fmt::Display for SettingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SettingMode::Fixed => "fixed",
            SettingMode::Flexible => "flexible",
        })
    }
}

/// Imposed policies: `πA` without the additional signal, `πB` with it.
#[derive(Debug, Clone)]
pub struct RegulationSetting {
    pub mode: SettingMode,
    pub policy_a: Solution,
    /// `None` in the fixed setting, where `πB = πA`.
    pub policy_b: Option<Solution>,
}

impl RegulationSetting {
    pub fn threshold_a(&self, grid: &BeliefGrid) -> Threshold {
        threshold(grid, &self.policy_a.policy)
    }

    pub fn threshold_b(&self, grid: &BeliefGrid) -> Threshold {
        match &self.policy_b {
            Some(s) => threshold(grid, &s.policy),
            None => self.threshold_a(grid),
        }
    }
}

pub fn build_regulation(
    model: &PomdpModel,
    mode: SettingMode,
    grid: &BeliefGrid,
    params: SolverParams,
) -> Result<RegulationSetting> {
    let society = model.costs(CostKind::Society);
    let policy_a = solve_optimal(model, society, grid, ObsMode::Background, params)?;
    let policy_b = match mode {
        SettingMode::Fixed => None,
        SettingMode::Flexible => Some(solve_optimal(model, society, grid, ObsMode::Joint, params)?),
    };
    Ok(RegulationSetting { mode, policy_a, policy_b })
}

/// Societal repair cost that puts the background-only threshold at the
/// grid point nearest to `target`, found by bisection.
pub fn calibrate_repair_cost(
    spec: &DeteriorationSpec,
    grid: &BeliefGrid,
    params: SolverParams,
    target: f64,
) -> Result<f64> {
    let chi = |l_r: f64| -> Result<f64> {
        let m = DeteriorationSpec { repair_cost_society: l_r, ..spec.clone() }.build()?;
        let sol = solve_optimal(&m, m.costs(CostKind::Society), grid, ObsMode::Background, params)?;
        Ok(threshold(grid, &sol.policy).chi)
    };
    let target = grid
        .beliefs()
        .iter()
        .filter(|b| b.get(2) == 0.0)
        .map(p_dam)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .ok_or_else(|| Error::Parameter("grid has no segment beliefs".into()))?;
    // a larger repair cost postpones repair
    let (mut lo, mut hi) = (0.0, 1.0);
    while chi(hi)? < target {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Parameter(format!("threshold {target} not reachable")));
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if chi(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Settings for a full regulation analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub grid_count: usize,
    pub p_min: f64,
    pub solver: SolverParams,
    /// Rollouts for the filtered-belief estimate of the long-run average.
    pub filter: SimulationConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            grid_count: 1001,
            p_min: 1e-6,
            solver: SolverParams::default(),
            filter: SimulationConfig {
                seed: 2024,
                steps: 200_000,
                trajectories: 1,
                burn_in: 1_000,
            },
        }
    }
}

impl AnalysisConfig {
    pub fn grid(&self) -> Result<BeliefGrid> {
        BeliefGrid::deterioration(self.grid_count, self.p_min)
    }
}

/// Agent values under a regulation and the resulting VoI.
pub struct RegulationAnalysis {
    pub model: PomdpModel,
    pub grid: BeliefGrid,
    pub setting: RegulationSetting,
    pub chi_a: Threshold,
    pub chi_b: Threshold,
    /// `V_Y^{πA}`: inner states from the background-only societal α-set.
    pub value_a: EvaluatedController,
    /// `V_W^{πB}`. Fixed: `πA` run on a grid controller driven by the joint
    /// stream. Flexible: inner states from the joint societal α-set.
    pub value_b: EvaluatedController,
    /// Background-only grid controller for `πA`, used for the long-run
    /// distribution of the belief.
    pub background: Controller,
    pub stationary: StationaryDistribution,
}

impl RegulationAnalysis {
    pub fn run(spec: &DeteriorationSpec, mode: SettingMode, config: &AnalysisConfig) -> Result<Self> {
        Self::from_model(spec.build()?, config.grid()?, mode, config.solver)
    }

    /// Solves the imposed policies for any model whose agent and societal
    /// costs differ only in what the regulator optimises.
    pub fn from_model(model: PomdpModel, grid: BeliefGrid, mode: SettingMode, params: SolverParams) -> Result<Self> {
        let setting = build_regulation(&model, mode, &grid, params)?;
        Self::from_setting(model, grid, setting)
    }

    pub fn from_setting(model: PomdpModel, grid: BeliefGrid, setting: RegulationSetting) -> Result<Self> {
        let agent = model.costs(CostKind::Agent);
        let ctrl_a = Controller::from_alpha_set(&model, &setting.policy_a.set, &grid, ObsMode::Background)?;
        let value_a = EvaluatedController::new(&model, ctrl_a, agent)?;
        let ctrl_b = match &setting.policy_b {
            None => Controller::from_grid_policy(&model, &grid, &setting.policy_a.policy, ObsMode::Joint)?,
            Some(b) => Controller::from_alpha_set(&model, &b.set, &grid, ObsMode::Joint)?,
        };
        let value_b = EvaluatedController::new(&model, ctrl_b, agent)?;
        let background = Controller::from_grid_policy(&model, &grid, &setting.policy_a.policy, ObsMode::Background)?;
        let chain = build_joint_chain(&model, &background, agent)?;
        let stationary = stationary_distribution(&chain)?;
        Ok(RegulationAnalysis {
            chi_a: setting.threshold_a(&grid),
            chi_b: setting.threshold_b(&grid),
            model,
            grid,
            setting,
            value_a,
            value_b,
            background,
            stationary,
        })
    }

    pub fn inputs(&self) -> VoiInputs<'_> {
        VoiInputs {
            costs: self.model.costs(CostKind::Agent),
            policy_a: &self.value_a.controller,
            value_a: &self.value_a,
            value_b: &self.value_b,
            same_policy: self.setting.mode == SettingMode::Fixed,
        }
    }

    /// VoI at every grid belief.
    pub fn curve(&self) -> VoiCurve {
        voi_curve(&self.model, &self.inputs(), self.grid.beliefs())
    }

    pub fn row(&self, b: &Belief) -> VoiRow {
        self.inputs().row(&self.model, b)
    }

    /// Recursion residual at every grid belief.
    pub fn residuals(&self) -> Vec<f64> {
        let inputs = self.inputs();
        self.grid
            .beliefs()
            .par_iter()
            .map(|b| inputs.residual(&self.model, b))
            .collect()
    }

    /// Long-run averages with the stationary weight of each grid
    /// controller state placed on its grid belief.
    pub fn expected_stationary(&self, curve: &VoiCurve) -> Result<ExpectedVoi> {
        let w = self.stationary.inner_marginal();
        expected_voi(
            &w,
            &curve.column(|r| r.voi_co),
            &curve.column(|r| r.delta_v),
            self.model.discount(),
        )
    }

    /// Long-run averages over exactly filtered beliefs of simulated
    /// background-only trajectories.
    pub fn expected_filtered(&self, config: SimulationConfig) -> Result<ExpectedVoi> {
        let start = Belief::point(3, 0)?;
        let occ = filtered_occupancy(&self.model, &self.value_a.controller, ObsMode::Background, &start, config)?;
        let inputs = self.inputs();
        let rows: Vec<VoiRow> = occ.beliefs.par_iter().map(|b| inputs.row(&self.model, b)).collect();
        let voi_co: Vec<f64> = rows.iter().map(|r| r.voi_co).collect();
        let delta_v: Vec<f64> = rows.iter().map(|r| r.delta_v).collect();
        expected_voi(&occ.weights, &voi_co, &delta_v, self.model.discount())
    }

    /// `(p_dam, P[P_DAM <= p_dam])` over the grid controller's long-run
    /// distribution; the failure vertex counts as `p_dam = 0`.
    pub fn pinf_cdf(&self) -> Vec<(f64, f64)> {
        pdam_cdf(&self.grid, &self.stationary.inner_marginal())
    }
}

/// Cumulative weight over grid beliefs sorted by damage probability.
pub fn pdam_cdf(grid: &BeliefGrid, weights: &[f64]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|a, b| p_dam(grid.get(*a)).total_cmp(&p_dam(grid.get(*b))));
    let mut acc = 0.0;
    order
        .iter()
        .map(|i| {
            acc += weights[*i];
            (p_dam(grid.get(*i)), acc)
        })
        .collect()
}

/// Value of the agent-optimal plans, background only and with the
/// additional signal.
pub struct OptimalAgent {
    pub background: Solution,
    pub joint: Solution,
}

impl OptimalAgent {
    pub fn solve(model: &PomdpModel, grid: &BeliefGrid, params: SolverParams) -> Result<Self> {
        let agent = model.costs(CostKind::Agent);
        Ok(OptimalAgent {
            background: solve_optimal(model, agent, grid, ObsMode::Background, params)?,
            joint: solve_optimal(model, agent, grid, ObsMode::Joint, params)?,
        })
    }

    pub fn v_y(&self) -> &dyn ValueFunction {
        &self.background.set
    }

    pub fn v_w(&self) -> &dyn ValueFunction {
        &self.joint.set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Sigma,
    /// Deterioration rate, with `p23 = 3 p12` and the threshold held at
    /// the base level.
    P12,
    /// Target imposed threshold, reached by recalibrating the societal
    /// repair cost.
    RepairThreshold,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(SweepParameter::Sigma),
            "p12" => Ok(SweepParameter::P12),
            "repair-threshold" | "repair_threshold" => Ok(SweepParameter::RepairThreshold),
            other => Err(Error::Parameter(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Damage probabilities at which sweeps report VoI.
pub const PROBES: [f64; 2] = [0.20, 0.40];

/// Threshold the p12 sweep holds fixed.
pub const BASE_THRESHOLD: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub value: f64,
    pub repair_cost_society: f64,
    pub chi: f64,
    pub expected: ExpectedVoi,
    /// VoI rows at each of [`PROBES`].
    pub probes: Vec<VoiRow>,
    /// Row at the last grid belief below `chi`.
    pub below_chi: Option<VoiRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub summary: SweepSummary,
    pub curve: VoiCurve,
}

/// Sweep result per parameter value, in input order.
pub type SweepResult = Vec<(f64, Result<SweepPoint>)>;

pub fn sweep_spec(parameter: SweepParameter, value: f64, base: &DeteriorationSpec) -> DeteriorationSpec {
    let mut spec = base.clone();
    match parameter {
        SweepParameter::Sigma => spec.sigma = value,
        SweepParameter::P12 => {
            spec.p12 = value;
            spec.p23 = 3.0 * value;
        }
        SweepParameter::RepairThreshold => {}
    }
    spec
}

/// One sweep point in the fixed setting.
pub fn sweep_point(
    parameter: SweepParameter,
    value: f64,
    base: &DeteriorationSpec,
    config: &AnalysisConfig,
) -> Result<SweepPoint> {
    let mut spec = sweep_spec(parameter, value, base);
    let grid = config.grid()?;
    match parameter {
        SweepParameter::Sigma => {}
        SweepParameter::P12 => {
            spec.repair_cost_society = calibrate_repair_cost(&spec, &grid, config.solver, BASE_THRESHOLD)?;
        }
        SweepParameter::RepairThreshold => {
            spec.repair_cost_society = calibrate_repair_cost(&spec, &grid, config.solver, value)?;
        }
    }
    let model = spec.build()?;
    let setting = build_regulation(&model, SettingMode::Fixed, &grid, config.solver)?;
    let analysis = RegulationAnalysis::from_setting(model, grid, setting)?;
    let curve = analysis.curve();
    let expected = analysis.expected_stationary(&curve)?;
    let probes = PROBES
        .iter()
        .map(|q| Ok(analysis.row(&segment_belief(*q)?)))
        .collect::<Result<Vec<_>>>()?;
    let chi = analysis.chi_a.chi;
    let below_chi = curve
        .rows
        .iter()
        .filter(|r| r.belief.get(2) == 0.0 && p_dam(&r.belief) < chi)
        .last()
        .cloned();
    Ok(SweepPoint {
        summary: SweepSummary {
            value,
            repair_cost_society: spec.repair_cost_society,
            chi,
            expected,
            probes,
            below_chi,
        },
        curve,
    })
}

/// Runs every value; failures are returned in place and do not stop the
/// sweep.
pub fn sweep(
    parameter: SweepParameter,
    values: &[f64],
    base: &DeteriorationSpec,
    config: &AnalysisConfig,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Parameter("sweep needs at least one value".into()));
    }
    Ok(values
        .par_iter()
        .map(|v| (*v, sweep_point(parameter, *v, base, config)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bins_split_at_the_mean() {
        let row = discretize_gaussian(0.0, 1.0, 2, 3.0).unwrap();
        assert!((row[0] - 0.5).abs() < 1e-15 && (row[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rows_sum_to_one() {
        for sigma in [0.3, 1.0, 3.0] {
            for mu in [-0.5, 0.5] {
                let row = discretize_gaussian(mu, sigma, 300, 5.0).unwrap();
                assert_eq!(row.len(), 300);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|p| *p >= 0.0));
            }
        }
    }

    #[test]
    fn wide_noise_overlaps() {
        let a = discretize_gaussian(-0.5, 3.0, 300, 5.0).unwrap();
        let b = discretize_gaussian(0.5, 3.0, 300, 5.0).unwrap();
        let overlap: f64 = a.iter().zip(&b).map(|(x, y)| x.min(*y)).sum();
        // 2Φ(−d/(2σ)) for means a distance d = 1 apart
        let n = Normal::new(0.0, 1.0).unwrap();
        let expect = 2.0 * n.cdf(-1.0 / 6.0);
        assert!((overlap - expect).abs() < 5e-3, "{overlap} vs {expect}");
        assert!(overlap > 0.85);
    }

    #[test]
    fn model_tables() {
        let m = DeteriorationSpec::default().build().unwrap();
        assert_eq!((m.t(0, 0, 0), m.t(0, 0, 1), m.t(0, 0, 2)), (0.96, 0.04, 0.0));
        assert_eq!((m.t(1, 0, 1), m.t(1, 0, 2)), (0.88, 0.12));
        for x in 0..3 {
            assert_eq!((m.t(x, 1, 0), m.t(x, 1, 1)), (0.96, 0.04));
        }
        let c = m.costs(CostKind::Agent);
        assert_eq!((c.get(2, 0), c.get(2, 1), c.get(0, 1), c.get(0, 0)), (1.0, 1.5, 0.5, 0.0));
        assert_eq!(m.costs(CostKind::Society).get(1, 1), 0.246);
        assert_eq!((m.e_y(2, 0, 1), m.e_y(0, 1, 0)), (1.0, 1.0));
        let lit = DeteriorationSpec { table1_literal: true, ..Default::default() }.build().unwrap();
        assert_eq!(lit.t(1, 0, 2), 0.88);
    }

    #[test]
    fn failure_only_emits_the_alarm() {
        let m = DeteriorationSpec::default().build().unwrap();
        for a in 0..2 {
            for w in 0..m.n_obs_joint() {
                let obs = crate::JointObservation::decode(w, m.n_obs_additional());
                let p = m.joint_emission(2, a, obs).unwrap();
                if obs.y == 0 {
                    assert_eq!(p, 0.0);
                }
            }
        }
    }

    #[test]
    fn silent_belief_fixed_point() {
        let m = DeteriorationSpec::default().build().unwrap();
        let b = silent_belief(&m, &Belief::point(3, 0).unwrap(), 500).unwrap();
        assert!((p_dam(&b) - 1.0 / 3.0).abs() < 1e-9);
        // with the table as printed the fixed point moves
        let lit = DeteriorationSpec { table1_literal: true, ..Default::default() }.build().unwrap();
        let b = silent_belief(&lit, &Belief::point(3, 0).unwrap(), 500).unwrap();
        assert!((p_dam(&b) - 1.0 / 3.0).abs() > 0.1);
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            DeteriorationSpec { p12: 0.0, ..Default::default() },
            DeteriorationSpec { sigma: -1.0, ..Default::default() },
            DeteriorationSpec { n_z_bins: 1, ..Default::default() },
            DeteriorationSpec { discount: 1.0, ..Default::default() },
        ] {
            assert!(spec.build().is_err());
        }
    }

    #[test]
    fn threshold_on_grid() {
        let grid = BeliefGrid::deterioration(5, 0.1).unwrap();
        let mut policy = vec![0, 0, 0, 1, 1, 1];
        assert!((threshold(&grid, &policy).chi - 0.1f64.powf(0.25)).abs() < 1e-12);
        policy = vec![0; 6];
        assert_eq!(threshold(&grid, &policy).chi, f64::INFINITY);
    }

    #[test]
    fn sweep_parameters_parse() {
        assert_eq!("p12".parse::<SweepParameter>().unwrap(), SweepParameter::P12);
        assert!("gamma".parse::<SweepParameter>().is_err());
        let s = sweep_spec(SweepParameter::P12, 0.08, &DeteriorationSpec::default());
        assert_eq!((s.p12, s.p23), (0.08, 0.24));
    }
}
