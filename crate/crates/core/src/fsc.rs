//! Finite state controllers and their evaluation.
//!
//! A controller has inner states `h`, each with an action `π(h)` and a
//! representative belief `b_h`, plus an updating map `η(h, o)` giving the next
//! inner state after observation `o`. Pairing the hidden state with the inner
//! state gives a Markov chain on `s = (x, h)`:
//!
//! ```text
//! T̃(s, s') = T(x, π(h), x') Σ_o E(x', π(h), o) 𝕀[h' = η(h, o)]
//! ```
//!
//! and any cost table is evaluated under the controller by solving
//! `ṽ = c̃ + γ T̃ ṽ`. Joint states are laid out as `s = h * n_states + x`, so
//! the block of `ṽ` for inner state `h` is a linear value function on
//! beliefs.

use std::collections::HashMap;

use petgraph::algo::condensation;
use petgraph::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{dot, Belief};
use crate::error::{Error, Result};
use crate::model::{CostTable, JointObservation, ObsMode, PomdpModel};
use crate::pbvi::{AlphaSet, BeliefGrid, Solution};
use crate::value::{BeliefPolicy, ValueFunction};

/// How inner states and the belief-to-inner-state map are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    /// One inner state per α-vector; beliefs map to the dominating vector.
    AlphaRegions,
    /// One inner state per grid belief; beliefs map to the nearest one.
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerState {
    pub rep_belief: Belief,
    pub action: usize,
}

#[derive(Debug, Clone)]
enum RegionMap {
    Alpha(AlphaSet),
    Grid(BeliefGrid),
}

#[derive(Debug, Clone)]
pub struct Controller {
    mode: ObsMode,
    n_obs: usize,
    inner: Vec<InnerState>,
    eta: Vec<Option<usize>>,
    region: RegionMap,
}

impl Controller {
    /// One inner state per vector of `set`, with the vector's action and the
    /// grid belief that generated it. `η(h, o)` is the dominating vector at
    /// `τ(b_h, π(h), o)`.
    pub fn from_alpha_set(model: &PomdpModel, set: &AlphaSet, grid: &BeliefGrid, mode: ObsMode) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let inner: Vec<InnerState> = set
            .vectors()
            .iter()
            .map(|v| InnerState {
                rep_belief: grid.get(v.source).clone(),
                action: v.action,
            })
            .collect();
        let eta = successor_table(model, &inner, mode, |post| set.argmin_raw(post).0);
        Ok(Controller {
            mode,
            n_obs: model.n_obs(mode),
            inner,
            eta,
            region: RegionMap::Alpha(set.clone()),
        })
    }

    /// Grid method: one inner state per grid belief acting as `policy`
    /// prescribes there; `η(h, o)` is the grid belief nearest to
    /// `τ(b_h, π(h), o)`. The policy can come from any source, which makes
    /// this the way to run a given policy under a different observation mode.
    pub fn from_grid_policy(model: &PomdpModel, grid: &BeliefGrid, policy: &[usize], mode: ObsMode) -> Result<Self> {
        if policy.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "policy has {} entries for {} grid beliefs",
                policy.len(),
                grid.len()
            )));
        }
        if let Some(a) = policy.iter().find(|a| **a >= model.n_actions()) {
            return Err(Error::Index {
                what: "action",
                index: *a,
                size: model.n_actions(),
            });
        }
        let inner: Vec<InnerState> = grid
            .beliefs()
            .iter()
            .zip(policy)
            .map(|(b, a)| InnerState {
                rep_belief: b.clone(),
                action: *a,
            })
            .collect();
        let eta = successor_table(model, &inner, mode, |post| grid.nearest(post));
        Ok(Controller {
            mode,
            n_obs: model.n_obs(mode),
            inner,
            eta,
            region: RegionMap::Grid(grid.clone()),
        })
    }

    pub fn mode(&self) -> ObsMode {
        self.mode
    }

    pub fn kind(&self) -> ControllerKind {
        match self.region {
            RegionMap::Alpha(_) => ControllerKind::AlphaRegions,
            RegionMap::Grid(_) => ControllerKind::Grid,
        }
    }

    pub fn n_inner(&self) -> usize {
        self.inner.len()
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn inner(&self) -> &[InnerState] {
        &self.inner
    }

    pub fn action_of(&self, h: usize) -> usize {
        self.inner[h].action
    }

    /// Successor inner state; an error where the observation cannot follow
    /// from `b_h`.
    pub fn eta(&self, h: usize, o: usize) -> Result<usize> {
        if h >= self.inner.len() {
            return Err(Error::Index { what: "inner state", index: h, size: self.inner.len() });
        }
        if o >= self.n_obs {
            return Err(Error::Index { what: "observation", index: o, size: self.n_obs });
        }
        self.eta[h * self.n_obs + o].ok_or(Error::UnreachableEta { inner: h, obs: o })
    }

    pub(crate) fn eta_raw(&self, h: usize, o: usize) -> Option<usize> {
        self.eta[h * self.n_obs + o]
    }

    /// The inner state a belief is mapped to.
    pub fn locate(&self, b: &Belief) -> usize {
        match &self.region {
            RegionMap::Alpha(set) => set.argmin_raw(b.probs()).0,
            RegionMap::Grid(grid) => grid.nearest(b.probs()),
        }
    }
}

impl BeliefPolicy for Controller {
    fn action(&self, b: &Belief) -> usize {
        self.inner[self.locate(b)].action
    }
}

fn successor_table(
    model: &PomdpModel,
    inner: &[InnerState],
    mode: ObsMode,
    locate: impl Fn(&[f64]) -> usize + Sync,
) -> Vec<Option<usize>> {
    let n_obs = model.n_obs(mode);
    let n = model.n_states();
    // rows depend only on (action, prediction)
    let mut index: HashMap<(usize, Vec<u64>), usize> = HashMap::new();
    let mut unique: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut slot = Vec::with_capacity(inner.len());
    for s in inner {
        let mut pred = vec![0.0; n];
        model.predict_into(s.rep_belief.probs(), s.action, &mut pred);
        let key = (s.action, pred.iter().map(|p| p.to_bits()).collect());
        let k = *index.entry(key).or_insert_with(|| {
            unique.push((s.action, pred));
            unique.len() - 1
        });
        slot.push(k);
    }
    let rows: Vec<Vec<Option<usize>>> = unique
        .par_iter()
        .map(|(a, pred)| {
            let mut post = vec![0.0; n];
            let mut prev: Option<(Vec<f64>, usize)> = None;
            (0..n_obs)
                .map(|o| {
                    let lik = model.mask_into(pred, *a, o, mode, &mut post);
                    if lik <= 0.0 {
                        return None;
                    }
                    post.iter_mut().for_each(|p| *p /= lik);
                    match &prev {
                        Some((p, h)) if *p == post => Some(*h),
                        _ => {
                            let h = locate(&post);
                            prev = Some((post.clone(), h));
                            Some(h)
                        }
                    }
                })
                .collect()
        })
        .collect();
    slot.iter().flat_map(|k| rows[*k].iter().copied()).collect()
}

/// Builds a controller from a solution.
///
/// With [`ControllerKind::AlphaRegions`] the solution's α-set defines the
/// inner states; with [`ControllerKind::Grid`] its per-grid policy does.
/// `mode` selects the observation stream driving `η` and need not match the
/// mode the solution was computed for.
pub fn build_controller(
    model: &PomdpModel,
    solution: &Solution,
    grid: &BeliefGrid,
    mode: ObsMode,
    kind: ControllerKind,
) -> Result<Controller> {
    match kind {
        ControllerKind::AlphaRegions => Controller::from_alpha_set(model, &solution.set, grid, mode),
        ControllerKind::Grid => Controller::from_grid_policy(model, grid, &solution.policy, mode),
    }
}

/// Markov chain on joint states `(x, h)` under a controller.
#[derive(Debug, Clone)]
pub struct JointChain {
    n_states: usize,
    n_inner: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
}

impl JointChain {
    pub fn n_joint(&self) -> usize {
        self.rows.len()
    }
    pub fn n_states(&self) -> usize {
        self.n_states
    }
    pub fn n_inner(&self) -> usize {
        self.n_inner
    }
    pub fn index(&self, x: usize, h: usize) -> usize {
        h * self.n_states + x
    }
    /// Sparse row `s`: `(s', T̃(s, s'))` with positive entries only.
    pub fn row(&self, s: usize) -> &[(usize, f64)] {
        &self.rows[s]
    }
    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn dense_transition(&self) -> Vec<Vec<f64>> {
        let n = self.n_joint();
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0.0; n];
                for (j, p) in r {
                    d[*j] = *p;
                }
                d
            })
            .collect()
    }

    /// `T̃ v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(j, p)| p * v[*j]).sum())
            .collect()
    }

    /// `T̃ᵀ p`.
    pub fn apply_transpose(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_joint()];
        for (i, r) in self.rows.iter().enumerate() {
            let pi = p[i];
            if pi == 0.0 {
                continue;
            }
            for (j, t) in r {
                out[*j] += pi * t;
            }
        }
        out
    }

    /// Same chain with another cost vector.
    pub fn with_costs(&self, model: &PomdpModel, ctrl: &Controller, costs: &CostTable) -> JointChain {
        let mut chain = self.clone();
        chain.cost = joint_costs(model, ctrl, costs);
        chain
    }
}

fn joint_costs(model: &PomdpModel, ctrl: &Controller, costs: &CostTable) -> Vec<f64> {
    let n = model.n_states();
    (0..ctrl.n_inner() * n)
        .map(|s| costs.get(s % n, ctrl.action_of(s / n)))
        .collect()
}

pub fn build_joint_chain(model: &PomdpModel, ctrl: &Controller, costs: &CostTable) -> Result<JointChain> {
    let n = model.n_states();
    let n_h = ctrl.n_inner();
    let n_s = n * n_h;
    let mode = ctrl.mode();
    let mut rows = Vec::with_capacity(n_s);
    let mut acc = vec![0.0; n_s];
    let mut touched: Vec<usize> = Vec::new();
    for h in 0..n_h {
        let a = ctrl.action_of(h);
        for x in 0..n {
            for x2 in 0..n {
                let t = model.t(x, a, x2);
                if t == 0.0 {
                    continue;
                }
                for o in 0..ctrl.n_obs() {
                    let e = model.emission(mode, x2, a, o);
                    if e == 0.0 {
                        continue;
                    }
                    let h2 = ctrl.eta(h, o)?;
                    let s2 = h2 * n + x2;
                    if acc[s2] == 0.0 {
                        touched.push(s2);
                    }
                    acc[s2] += t * e;
                }
            }
            touched.sort_unstable();
            let row: Vec<(usize, f64)> = touched.iter().map(|j| (*j, acc[*j])).collect();
            for j in touched.drain(..) {
                acc[j] = 0.0;
            }
            let s = h * n + x;
            let sum: f64 = row.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::ChainRow { state: s, sum });
            }
            rows.push(row);
        }
    }
    Ok(JointChain {
        n_states: n,
        n_inner: n_h,
        rows,
        cost: joint_costs(model, ctrl, costs),
    })
}

/// Solves `ṽ = c̃ + γ T̃ ṽ` with a dense LU factorisation.
pub fn evaluate(chain: &JointChain, gamma: f64) -> Result<Vec<f64>> {
    use faer::linalg::solvers::Solve;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Parameter(format!("discount {gamma} outside (0, 1)")));
    }
    let n = chain.n_joint();
    let mut a = faer::Mat::<f64>::identity(n, n);
    for (i, r) in chain.rows.iter().enumerate() {
        for (j, p) in r {
            a[(i, *j)] -= gamma * p;
        }
    }
    let rhs = faer::Mat::<f64>::from_fn(n, 1, |i, _| chain.cost[i]);
    let sol = a.partial_piv_lu().solve(&rhs);
    let v: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("policy evaluation system is singular".into()));
    }
    let tv = chain.apply(&v);
    let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let residual = (0..n)
        .map(|i| (v[i] - chain.cost[i] - gamma * tv[i]).abs())
        .fold(0.0, f64::max);
    if residual > 1e-9 * scale {
        return Err(Error::Numeric(format!("policy evaluation residual {residual:e}")));
    }
    Ok(v)
}

/// `ṽ_(h) · b` with `h` the inner state `b` maps to.
pub fn value_at(ctrl: &Controller, values: &[f64], b: &Belief) -> f64 {
    let n = b.len();
    let h = ctrl.locate(b);
    dot(&values[h * n..(h + 1) * n], b.probs())
}

/// A controller together with the nodal values of some cost table.
#[derive(Debug, Clone)]
pub struct EvaluatedController {
    pub controller: Controller,
    pub values: Vec<f64>,
}

impl EvaluatedController {
    pub fn new(model: &PomdpModel, controller: Controller, costs: &CostTable) -> Result<Self> {
        let chain = build_joint_chain(model, &controller, costs)?;
        let values = evaluate(&chain, model.discount())?;
        Ok(EvaluatedController { controller, values })
    }

    /// The linear value function of inner state `h`.
    pub fn block(&self, h: usize) -> &[f64] {
        let n = self.values.len() / self.controller.n_inner();
        &self.values[h * n..(h + 1) * n]
    }
}

impl ValueFunction for EvaluatedController {
    fn value(&self, b: &Belief) -> f64 {
        value_at(&self.controller, &self.values, b)
    }
}

impl BeliefPolicy for EvaluatedController {
    fn action(&self, b: &Belief) -> usize {
        self.controller.action(b)
    }
}

/// Stationary distribution of a joint chain.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    pub probs: Vec<f64>,
    pub n_states: usize,
    pub n_inner: usize,
    pub iterations: usize,
    /// `‖T̃ᵀ p − p‖∞` at the returned `p`.
    pub residual: f64,
    /// False when the chain has more than one closed communicating class,
    /// in which case the returned distribution depends on the start.
    pub ergodic: bool,
}

impl StationaryDistribution {
    pub fn inner_marginal(&self) -> Vec<f64> {
        self.probs
            .chunks(self.n_states)
            .map(|c| c.iter().sum())
            .collect()
    }

    pub fn state_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_states];
        for (s, p) in self.probs.iter().enumerate() {
            out[s % self.n_states] += p;
        }
        out
    }
}

pub const STATIONARY_TOL: f64 = 1e-12;
pub const STATIONARY_MAX_ITERS: usize = 1_000_000;

/// Power iteration from the uniform distribution.
pub fn stationary_distribution(chain: &JointChain) -> Result<StationaryDistribution> {
    let n = chain.n_joint();
    let mut p = vec![1.0 / n as f64; n];
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < STATIONARY_MAX_ITERS {
        let next = chain.apply_transpose(&p);
        change = next
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        p = next;
        iterations += 1;
        if change < STATIONARY_TOL {
            break;
        }
    }
    if change >= STATIONARY_TOL {
        return Err(Error::NotConverged {
            iterations,
            residual: change,
        });
    }
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    let tp = chain.apply_transpose(&p);
    let residual = tp
        .iter()
        .zip(&p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(StationaryDistribution {
        probs: p,
        n_states: chain.n_states,
        n_inner: chain.n_inner,
        iterations,
        residual,
        ergodic: closed_classes(chain) == 1,
    })
}

fn closed_classes(chain: &JointChain) -> usize {
    let mut g = DiGraph::<(), ()>::with_capacity(chain.n_joint(), 0);
    let nodes: Vec<_> = (0..chain.n_joint()).map(|_| g.add_node(())).collect();
    for (i, r) in chain.rows.iter().enumerate() {
        for (j, _) in r {
            if i != *j {
                g.add_edge(nodes[i], nodes[*j], ());
            }
        }
    }
    let dag = condensation(g, true);
    dag.node_indices()
        .filter(|n| dag.neighbors(*n).next().is_none())
        .count()
}

/// Rollout settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub seed: u64,
    pub steps: usize,
    pub trajectories: usize,
    /// Steps excluded from the occupancy counts.
    pub burn_in: usize,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub mean: f64,
    pub std_error: f64,
    /// Empirical frequency of each joint state `h * n_states + x`.
    pub occupancy: Vec<f64>,
}

/// Cumulative tables for sampling transitions and emissions.
struct Sampler<'m> {
    model: &'m PomdpModel,
    trans: Vec<Vec<f64>>,
    emit_y: Vec<Vec<f64>>,
    emit_z: Vec<Vec<f64>>,
}

impl<'m> Sampler<'m> {
    fn new(model: &'m PomdpModel) -> Self {
        let (n, na) = (model.n_states(), model.n_actions());
        let cum = |row: Vec<f64>| -> Vec<f64> {
            row.iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        };
        let mut trans = Vec::new();
        let mut emit_y = Vec::new();
        for x in 0..n {
            for a in 0..na {
                trans.push(cum((0..n).map(|x2| model.t(x, a, x2)).collect()));
                emit_y.push(cum((0..model.n_obs_background()).map(|y| model.e_y(x, a, y)).collect()));
            }
        }
        let emit_z = (0..n)
            .map(|x| cum((0..model.n_obs_additional()).map(|z| model.e_z(x, z)).collect()))
            .collect();
        Sampler { model, trans, emit_y, emit_z }
    }

    fn draw(cdf: &[f64], u: f64) -> usize {
        // entries with zero probability are never returned
        let total = *cdf.last().unwrap();
        cdf.partition_point(|c| *c <= u * total).min(cdf.len() - 1)
    }

    fn next_state(&self, rng: &mut ChaCha8Rng, x: usize, a: usize) -> usize {
        Self::draw(&self.trans[x * self.model.n_actions() + a], rng.random())
    }

    fn observe(&self, rng: &mut ChaCha8Rng, x: usize, a: usize, mode: ObsMode) -> usize {
        let y = Self::draw(&self.emit_y[x * self.model.n_actions() + a], rng.random());
        match mode {
            ObsMode::Background => y,
            ObsMode::Joint => {
                let z = Self::draw(&self.emit_z[x], rng.random());
                JointObservation { y, z }.encode(self.model.n_obs_additional())
            }
        }
    }

    fn initial(&self, rng: &mut ChaCha8Rng, b: &Belief) -> usize {
        let cdf: Vec<f64> = b
            .probs()
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p.max(0.0);
                Some(*acc)
            })
            .collect();
        Self::draw(&cdf, rng.random())
    }
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Seeded rollouts of `(x, h)` under the controller, starting from `x ~ b`
/// and `h = locate(b)`. Each trajectory draws from its own stream of the
/// master seed, so results do not depend on scheduling.
pub fn simulate(
    model: &PomdpModel,
    ctrl: &Controller,
    costs: &CostTable,
    start: &Belief,
    config: SimulationConfig,
) -> Result<SimulationReport> {
    if config.trajectories == 0 || config.steps == 0 {
        return Err(Error::Parameter("simulation needs steps and trajectories".into()));
    }
    let n = model.n_states();
    let n_s = n * ctrl.n_inner();
    let sampler = Sampler::new(model);
    let gamma = model.discount();
    let mode = ctrl.mode();
    let h0 = ctrl.locate(start);
    let runs: Vec<Result<(f64, Vec<u32>)>> = (0..config.trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = trajectory_rng(config.seed, t);
            let mut counts = vec![0u32; n_s];
            let mut x = sampler.initial(&mut rng, start);
            let mut h = h0;
            let mut total = 0.0;
            let mut disc = 1.0;
            for k in 0..config.steps {
                if k >= config.burn_in {
                    counts[h * n + x] += 1;
                }
                let a = ctrl.action_of(h);
                total += disc * costs.get(x, a);
                disc *= gamma;
                x = sampler.next_state(&mut rng, x, a);
                let o = sampler.observe(&mut rng, x, a, mode);
                h = ctrl.eta(h, o)?;
            }
            Ok((total, counts))
        })
        .collect();
    let mut sums = Vec::with_capacity(runs.len());
    let mut counts = vec![0u64; n_s];
    for r in runs {
        let (total, c) = r?;
        sums.push(total);
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += u64::from(v);
        }
    }
    let m = sums.len() as f64;
    let mean = sums.iter().sum::<f64>() / m;
    let var = if sums.len() > 1 {
        sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let visits: u64 = counts.iter().sum();
    let occupancy = counts
        .iter()
        .map(|c| if visits == 0 { 0.0 } else { *c as f64 / visits as f64 })
        .collect();
    Ok(SimulationReport {
        mean,
        std_error: (var / m).sqrt(),
        occupancy,
    })
}

/// Distinct beliefs visited by an exactly filtered process, with visit
/// frequencies.
#[derive(Debug, Clone)]
pub struct BeliefOccupancy {
    pub beliefs: Vec<Belief>,
    pub weights: Vec<f64>,
}

/// Simulates the true state, draws observations and filters the belief
/// exactly under `policy`, counting visits to each distinct belief after
/// `config.burn_in` steps of every trajectory.
pub fn filtered_occupancy(
    model: &PomdpModel,
    policy: &dyn BeliefPolicy,
    mode: ObsMode,
    start: &Belief,
    config: SimulationConfig,
) -> Result<BeliefOccupancy> {
    let sampler = Sampler::new(model);
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut beliefs = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for t in 0..config.trajectories {
        let mut rng = trajectory_rng(config.seed, t);
        let mut x = sampler.initial(&mut rng, start);
        let mut b = start.clone();
        for k in 0..config.steps {
            if k >= config.burn_in {
                let i = *index.entry(b.key()).or_insert_with(|| {
                    beliefs.push(b.clone());
                    counts.push(0);
                    beliefs.len() - 1
                });
                counts[i] += 1;
            }
            let a = policy.action(&b);
            x = sampler.next_state(&mut rng, x, a);
            let o = sampler.observe(&mut rng, x, a, mode);
            b = model.transition_update(&b, a, o, mode)?;
        }
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Parameter("no steps after burn-in".into()));
    }
    Ok(BeliefOccupancy {
        beliefs,
        weights: counts.iter().map(|c| *c as f64 / total as f64).collect(),
    })
}
