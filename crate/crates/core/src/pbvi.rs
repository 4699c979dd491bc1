//! Point-based value iteration over a fixed grid of representative beliefs.
//!
//! A value function is stored as the lower envelope of a set of α-vectors,
//! `V(b) = min_j α_j · b`. One backup step, at every grid belief `b_h`:
//!
//! 1. picks the action minimising the quality
//!    `Q(b, a) = C(b, a) + γ Σ_o P(o | t(b, a)) V(τ(b, a, o))`;
//! 2. records, per observation, the vector dominating at the posterior;
//! 3. emits `α'_h = c_a + γ T_a Σ_o Diag[e(o, a)] α_{η(h, o)}`.
//!
//! A new vector is kept only if it is farther than `3 ε_V` (Euclidean) from
//! every vector already kept in the same backup.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{dot, euclidean, Belief};
use crate::error::{Error, Result};
use crate::model::{CostTable, ObsMode, PomdpModel};
use crate::value::{BeliefPolicy, ValueFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaVector {
    pub id: usize,
    pub action: usize,
    /// Index of the grid belief whose backup produced this vector.
    pub source: usize,
    pub values: Vec<f64>,
}

/// A set of α-vectors together with the observation mode it was solved for.
///
/// Vector ids equal their position, so "lowest id" and "first in order" are
/// the same tie-break.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSet {
    mode: ObsMode,
    n_states: usize,
    vectors: Vec<AlphaVector>,
    flat: Vec<f64>,
}

impl AlphaSet {
    /// Builds a set; ids are reassigned to match positions.
    pub fn new(mode: ObsMode, n_states: usize, mut vectors: Vec<AlphaVector>) -> Result<Self> {
        for (i, v) in vectors.iter_mut().enumerate() {
            if v.values.len() != n_states {
                return Err(Error::Parameter(format!(
                    "alpha-vector {i} has {} entries, expected {n_states}",
                    v.values.len()
                )));
            }
            if v.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric(format!("alpha-vector {i} is not finite")));
            }
            v.id = i;
        }
        let flat = vectors.iter().flat_map(|v| v.values.iter().copied()).collect();
        Ok(AlphaSet {
            mode,
            n_states,
            vectors,
            flat,
        })
    }

    /// The single all-zero vector: a valid lower bound when costs are
    /// non-negative.
    pub fn zero(mode: ObsMode, n_states: usize) -> Self {
        let v = AlphaVector {
            id: 0,
            action: 0,
            source: 0,
            values: vec![0.0; n_states],
        };
        AlphaSet::new(mode, n_states, vec![v]).expect("zero vector is valid")
    }

    pub fn mode(&self) -> ObsMode {
        self.mode
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[AlphaVector] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &AlphaVector {
        &self.vectors[i]
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.flat[i * self.n_states..(i + 1) * self.n_states]
    }

    /// `(argmin_j α_j · v, min)` for an arbitrary (possibly unnormalised)
    /// vector. Ties go to the lowest index.
    #[inline]
    pub(crate) fn argmin_raw(&self, v: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, row) in self.flat.chunks_exact(self.n_states).enumerate() {
            let val = dot(row, v);
            if val < best.1 {
                best = (i, val);
            }
        }
        best
    }

    /// Position of the dominating (minimal) vector at `b`.
    pub fn dominant_index(&self, b: &Belief) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.argmin_raw(b.probs()).0)
    }

    /// `min_j α_j · b`.
    pub fn envelope_value(&self, b: &Belief) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.argmin_raw(b.probs()).1)
    }
}

impl ValueFunction for AlphaSet {
    /// Envelope value; `+inf` for an empty set.
    fn value(&self, b: &Belief) -> f64 {
        self.argmin_raw(b.probs()).1
    }
}

impl BeliefPolicy for AlphaSet {
    /// Action attached to the dominating vector.
    fn action(&self, b: &Belief) -> usize {
        let (i, _) = self.argmin_raw(b.probs());
        self.vectors[i].action
    }
}

/// Ordered set of representative beliefs.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefGrid {
    beliefs: Vec<Belief>,
}

/// How to build a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// `count` beliefs `[1-q, q, 0]` with `q` log-spaced from `p_min` to 1,
    /// followed by the failure vertex `[0, 0, 1]`.
    Deterioration { count: usize, p_min: f64 },
    /// Caller-supplied beliefs, used as given.
    Explicit(Vec<Belief>),
}

pub fn build_belief_grid(spec: GridSpec) -> Result<BeliefGrid> {
    match spec {
        GridSpec::Deterioration { count, p_min } => BeliefGrid::deterioration(count, p_min),
        GridSpec::Explicit(beliefs) => BeliefGrid::new(beliefs),
    }
}

impl BeliefGrid {
    pub fn new(beliefs: Vec<Belief>) -> Result<Self> {
        let Some(first) = beliefs.first() else {
            return Err(Error::Parameter("belief grid is empty".into()));
        };
        let n = first.len();
        if beliefs.iter().any(|b| b.len() != n) {
            return Err(Error::Parameter("grid beliefs differ in length".into()));
        }
        for i in 0..beliefs.len() {
            for j in 0..i {
                if beliefs[i].max_distance(&beliefs[j]) <= 1e-12 {
                    return Err(Error::Parameter(format!(
                        "grid beliefs {} and {} coincide",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(BeliefGrid { beliefs })
    }

    /// Log-spaced damage probabilities on the no-failure segment plus the
    /// failure vertex.
    pub fn deterioration(count: usize, p_min: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::Parameter(format!("grid needs at least 2 points, got {count}")));
        }
        if !(p_min > 0.0 && p_min < 1.0) {
            return Err(Error::Parameter(format!("p_min {p_min} outside (0, 1)")));
        }
        let mut beliefs: Vec<Belief> = log_spaced(p_min, count)
            .into_iter()
            .map(|q| Belief::from_raw(vec![1.0 - q, q, 0.0]))
            .collect();
        beliefs.push(Belief::from_raw(vec![0.0, 0.0, 1.0]));
        Ok(BeliefGrid { beliefs })
    }

    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    pub fn beliefs(&self) -> &[Belief] {
        &self.beliefs
    }

    pub fn get(&self, i: usize) -> &Belief {
        &self.beliefs[i]
    }

    /// Index of the grid belief closest (Euclidean) to `b`; lowest index on
    /// ties.
    pub fn nearest(&self, b: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, g) in self.beliefs.iter().enumerate() {
            let mut d = 0.0;
            for (x, y) in g.probs().iter().zip(b) {
                d += (x - y) * (x - y);
            }
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

/// `count` values log-spaced from `lo` to 1 inclusive.
pub(crate) fn log_spaced(lo: f64, count: usize) -> Vec<f64> {
    let span = -lo.ln();
    (0..count)
        .map(|i| {
            if i + 1 == count {
                1.0
            } else {
                (lo.ln() + span * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Quality of action `a` at belief `b`, with `set` as next-step value.
/// Zero-probability observations contribute nothing.
pub fn quality(
    model: &PomdpModel,
    costs: &CostTable,
    set: &AlphaSet,
    mode: ObsMode,
    b: &Belief,
    a: usize,
) -> f64 {
    let mut pred = vec![0.0; model.n_states()];
    model.predict_into(b.probs(), a, &mut pred);
    costs.expected(b, a) + model.discount() * lookahead(model, set, a, &pred, mode).future
}

/// Result of looking one step ahead from a predicted belief.
#[derive(Debug, Clone)]
struct Lookahead {
    /// `Σ_o P(o) V(posterior_o)`.
    future: f64,
    /// Dominating vector per observation; `None` where `P(o) = 0`.
    choice: Vec<Option<u32>>,
}

fn lookahead(model: &PomdpModel, set: &AlphaSet, a: usize, pred: &[f64], mode: ObsMode) -> Lookahead {
    let n_obs = model.n_obs(mode);
    let mut post = vec![0.0; model.n_states()];
    let mut prev: Option<(Vec<f64>, usize, f64)> = None;
    let mut future = 0.0;
    let mut choice = Vec::with_capacity(n_obs);
    for o in 0..n_obs {
        let lik = model.mask_into(pred, a, o, mode, &mut post);
        if lik <= 0.0 {
            choice.push(None);
            continue;
        }
        post.iter_mut().for_each(|p| *p /= lik);
        // consecutive observations often share a posterior (e.g. every z
        // once the background signal has revealed the state)
        let (idx, val) = match &prev {
            Some((p, idx, val)) if *p == post => (*idx, *val),
            _ => {
                let (idx, val) = set.argmin_raw(&post);
                prev = Some((post.clone(), idx, val));
                (idx, val)
            }
        };
        future += lik * val;
        choice.push(Some(idx as u32));
    }
    Lookahead { future, choice }
}

/// Outcome of one backup over the grid.
#[derive(Debug, Clone)]
pub struct BackupOutcome {
    pub set: AlphaSet,
    /// Greedy action per grid belief.
    pub actions: Vec<usize>,
    /// Minimal quality per grid belief.
    pub values: Vec<f64>,
}

/// Greedy action and quality at every grid belief, plus the lookahead data
/// needed to build backed-up vectors.
fn greedy(
    model: &PomdpModel,
    costs: &CostTable,
    set: &AlphaSet,
    grid: &BeliefGrid,
    mode: ObsMode,
) -> (Vec<usize>, Vec<f64>, Vec<usize>, Vec<Lookahead>) {
    let n = model.n_states();
    let n_actions = model.n_actions();
    // Predicted beliefs repeat across the grid (e.g. every row of a repair
    // matrix is the same), so lookaheads are computed once per distinct
    // (action, prediction).
    let mut index: HashMap<(usize, Vec<u64>), usize> = HashMap::new();
    let mut unique: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut slot = Vec::with_capacity(grid.len() * n_actions);
    let mut pred = vec![0.0; n];
    for b in grid.beliefs() {
        for a in 0..n_actions {
            model.predict_into(b.probs(), a, &mut pred);
            let key = (a, pred.iter().map(|p| p.to_bits()).collect::<Vec<_>>());
            let k = *index.entry(key).or_insert_with(|| {
                unique.push((a, pred.clone()));
                unique.len() - 1
            });
            slot.push(k);
        }
    }
    let looks: Vec<Lookahead> = unique
        .par_iter()
        .map(|(a, p)| lookahead(model, set, *a, p, mode))
        .collect();

    let gamma = model.discount();
    let mut actions = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    let mut chosen = Vec::with_capacity(grid.len());
    for (h, b) in grid.beliefs().iter().enumerate() {
        let mut best = (0, f64::INFINITY, 0);
        for a in 0..n_actions {
            let k = slot[h * n_actions + a];
            let q = costs.expected(b, a) + gamma * looks[k].future;
            if q < best.1 {
                best = (a, q, k);
            }
        }
        actions.push(best.0);
        values.push(best.1);
        chosen.push(best.2);
    }
    (actions, values, chosen, looks)
}

/// One point-based backup of `set` over `grid`.
pub fn backup(
    model: &PomdpModel,
    costs: &CostTable,
    set: &AlphaSet,
    grid: &BeliefGrid,
    mode: ObsMode,
    prune_tol: f64,
) -> Result<BackupOutcome> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let (actions, values, chosen, looks) = greedy(model, costs, set, grid, mode);
    let gamma = model.discount();
    let mut kept: Vec<AlphaVector> = Vec::new();
    let mut built: HashMap<usize, Vec<f64>> = HashMap::new();
    for (h, &a) in actions.iter().enumerate() {
        let look = &looks[chosen[h]];
        let values = built
            .entry(chosen[h])
            .or_insert_with(|| {
                let c = costs.column(a);
                let next = model.backup_vector(a, mode, |o| look.choice[o].map(|i| set.row(i as usize)));
                c.iter().zip(&next).map(|(c, v)| c + gamma * v).collect()
            })
            .clone();
        let far = kept
            .iter()
            .all(|k| euclidean(&k.values, &values) > 3.0 * prune_tol);
        if far {
            kept.push(AlphaVector {
                id: kept.len(),
                action: a,
                source: h,
                values,
            });
        }
    }
    Ok(BackupOutcome {
        set: AlphaSet::new(mode, model.n_states(), kept)?,
        actions,
        values,
    })
}

/// One backup, returning only the new set.
pub fn pbvi_backup(
    model: &PomdpModel,
    costs: &CostTable,
    set: &AlphaSet,
    grid: &BeliefGrid,
    mode: ObsMode,
    prune_tol: f64,
) -> Result<AlphaSet> {
    backup(model, costs, set, grid, mode, prune_tol).map(|o| o.set)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Number of backups `n_T`.
    pub iterations: usize,
    /// Pruning tolerance `ε_V`.
    pub prune_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            iterations: 180,
            prune_tol: 1e-3,
        }
    }
}

/// Solved value function and greedy policy on a grid.
#[derive(Debug, Clone)]
pub struct Solution {
    pub set: AlphaSet,
    pub mode: ObsMode,
    /// Greedy action at each grid belief, w.r.t. the final set.
    pub policy: Vec<usize>,
    /// Envelope of the final set at each grid belief.
    pub values: Vec<f64>,
    /// Max change of the grid envelope over the last backup.
    pub residual: f64,
    pub iterations: usize,
}

/// Runs `params.iterations` backups from the zero vector.
pub fn solve_optimal(
    model: &PomdpModel,
    costs: &CostTable,
    grid: &BeliefGrid,
    mode: ObsMode,
    params: SolverParams,
) -> Result<Solution> {
    if params.iterations == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    if costs.min() < 0.0 {
        return Err(Error::Parameter(
            "costs must be non-negative for zero initialisation".into(),
        ));
    }
    let mut set = AlphaSet::zero(mode, model.n_states());
    let mut env: Vec<f64> = grid.beliefs().iter().map(|b| set.value(b)).collect();
    let mut residual = f64::INFINITY;
    for _ in 0..params.iterations {
        set = backup(model, costs, &set, grid, mode, params.prune_tol)?.set;
        let next: Vec<f64> = grid.beliefs().iter().map(|b| set.value(b)).collect();
        residual = next
            .iter()
            .zip(&env)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        env = next;
    }
    let (policy, _, _, _) = greedy(model, costs, &set, grid, mode);
    Ok(Solution {
        set,
        mode,
        policy,
        values: env,
        residual,
        iterations: params.iterations,
    })
}

/// Repair threshold read off a policy on the damage segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    /// Smallest damage probability at which `repair` is chosen; `+inf` if
    /// never.
    pub chi: f64,
    /// Set when the policy switches back from repair to another action.
    pub warning: Option<String>,
}

/// `pdam` must be increasing; `actions[i]` is the policy at `pdam[i]`.
pub fn extract_threshold(pdam: &[f64], actions: &[usize], repair: usize) -> Threshold {
    debug_assert!(pdam.windows(2).all(|w| w[0] < w[1]));
    let chi = pdam
        .iter()
        .zip(actions)
        .find(|(_, a)| **a == repair)
        .map_or(f64::INFINITY, |(p, _)| *p);
    let switches = actions.windows(2).filter(|w| w[0] != w[1]).count();
    let warning = (switches > 1).then(|| {
        let seq: String = actions.iter().map(|a| char::from(b'1' + *a as u8)).collect();
        format!("policy is not monotone in damage probability: {seq}")
    });
    Threshold { chi, warning }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelFile;
    use proptest::prelude::*;

    fn single_state(cost: f64, discount: f64) -> PomdpModel {
        PomdpModel::from_file(&ModelFile {
            n_states: 1,
            n_actions: 2,
            n_obs_background: 1,
            n_obs_additional: 1,
            transition: vec![vec![vec![1.0], vec![1.0]]],
            emission_background: vec![vec![vec![1.0], vec![1.0]]],
            emission_additional: vec![vec![1.0]],
            cost_agent: vec![vec![cost, cost + 1.0]],
            cost_society: vec![vec![cost, cost + 1.0]],
            discount,
        })
        .unwrap()
    }

    fn set2(a: [f64; 2], b: [f64; 2]) -> AlphaSet {
        let v = |values: [f64; 2], action| AlphaVector {
            id: 0,
            action,
            source: 0,
            values: values.to_vec(),
        };
        AlphaSet::new(ObsMode::Background, 2, vec![v(a, 0), v(b, 1)]).unwrap()
    }

    #[test]
    fn dominant_index_and_ties() {
        let s = set2([0.0, 1.0], [1.0, 0.0]);
        let b = Belief::new(vec![0.9, 0.1]).unwrap();
        assert_eq!(s.dominant_index(&b).unwrap(), 0);
        assert!((s.envelope_value(&b).unwrap() - 0.1).abs() < 1e-15);
        let tie = Belief::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(s.dominant_index(&tie).unwrap(), 0);
        let empty = AlphaSet::new(ObsMode::Background, 2, vec![]).unwrap();
        assert!(matches!(empty.dominant_index(&tie), Err(Error::EmptySet)));
        assert!(matches!(empty.envelope_value(&tie), Err(Error::EmptySet)));
    }

    #[test]
    fn vertex_values_are_column_minima() {
        let s = set2([0.3, 1.0], [1.0, 0.2]);
        assert_eq!(s.envelope_value(&Belief::point(2, 0).unwrap()).unwrap(), 0.3);
        assert_eq!(s.envelope_value(&Belief::point(2, 1).unwrap()).unwrap(), 0.2);
    }

    #[test]
    fn log_grid() {
        let g = BeliefGrid::deterioration(2, 0.5).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.get(0).probs(), &[0.5, 0.5, 0.0]);
        assert_eq!(g.get(1).probs(), &[0.0, 1.0, 0.0]);
        assert_eq!(g.get(2).probs(), &[0.0, 0.0, 1.0]);
        let g = BeliefGrid::deterioration(1001, 1e-6).unwrap();
        assert_eq!(g.len(), 1002);
        assert!((g.get(0).get(1) - 1e-6).abs() < 1e-18);
        for b in g.beliefs() {
            assert!(Belief::new(b.probs().to_vec()).is_ok());
        }
        assert!(BeliefGrid::deterioration(10, 0.0).is_err());
        assert!(BeliefGrid::deterioration(10, 1.0).is_err());
        assert!(BeliefGrid::deterioration(1, 0.1).is_err());
    }

    #[test]
    fn explicit_grid_rejects_duplicates() {
        let b = Belief::uniform(2);
        assert!(build_belief_grid(GridSpec::Explicit(vec![b.clone(), b.clone()])).is_err());
        assert!(build_belief_grid(GridSpec::Explicit(vec![])).is_err());
        let g = build_belief_grid(GridSpec::Explicit(vec![b.clone()])).unwrap();
        assert_eq!(g.get(0), &b);
    }

    #[test]
    fn single_state_backup_is_scalar_recursion() {
        let m = single_state(1.0, 0.9);
        let grid = BeliefGrid::new(vec![Belief::point(1, 0).unwrap()]).unwrap();
        let costs = m.costs(crate::CostKind::Agent);
        let start = AlphaSet::new(
            ObsMode::Background,
            1,
            vec![AlphaVector { id: 0, action: 0, source: 0, values: vec![2.0] }],
        )
        .unwrap();
        let next = pbvi_backup(&m, costs, &start, &grid, ObsMode::Background, 0.0).unwrap();
        assert_eq!(next.len(), 1);
        assert!((next.get(0).values[0] - (1.0 + 0.9 * 2.0)).abs() < 1e-15);
        assert_eq!(next.get(0).action, 0);
    }

    #[test]
    fn single_state_fixed_point_is_geometric() {
        let m = single_state(1.0, 0.95);
        let grid = BeliefGrid::new(vec![Belief::point(1, 0).unwrap()]).unwrap();
        let sol = solve_optimal(
            &m,
            m.costs(crate::CostKind::Agent),
            &grid,
            ObsMode::Joint,
            SolverParams { iterations: 1000, prune_tol: 0.0 },
        )
        .unwrap();
        assert!((sol.values[0] - 20.0).abs() < 1e-9);
        assert_eq!(sol.policy, vec![0]);
        assert!(sol.residual < 1e-9);
    }

    #[test]
    fn no_lookahead_quality_is_immediate_cost() {
        let m = crate::model::tests::toy().with_discount(1e-12).unwrap();
        let set = set3();
        let b = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
        for a in 0..2 {
            let q = quality(&m, m.costs(crate::CostKind::Agent), &set, ObsMode::Joint, &b, a);
            let c = m.costs(crate::CostKind::Agent).expected(&b, a);
            assert!((q - c).abs() < 1e-10);
        }
    }

    fn set3() -> AlphaSet {
        AlphaSet::new(
            ObsMode::Joint,
            3,
            vec![
                AlphaVector { id: 0, action: 0, source: 0, values: vec![1.0, 2.0, 9.0] },
                AlphaVector { id: 0, action: 1, source: 0, values: vec![3.0, 3.0, 4.0] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn quality_matches_direct_sum() {
        let m = crate::model::tests::toy();
        let set = set3();
        let costs = m.costs(crate::CostKind::Society);
        let b = Belief::new(vec![0.6, 0.3, 0.1]).unwrap();
        for mode in [ObsMode::Background, ObsMode::Joint] {
            for a in 0..2 {
                let mut direct = costs.expected(&b, a);
                for (_, p, post) in m.successors(&b, a, mode) {
                    direct += m.discount() * p * set.envelope_value(&post).unwrap();
                }
                let q = quality(&m, costs, &set, mode, &b, a);
                assert!((q - direct).abs() < 1e-12, "{mode} {a}: {q} vs {direct}");
            }
        }
    }

    #[test]
    fn backed_up_vector_evaluates_its_plan() {
        // α'_h · b_h equals the quality of the chosen action
        let m = crate::model::tests::toy();
        let grid = BeliefGrid::deterioration(15, 0.01).unwrap();
        let costs = m.costs(crate::CostKind::Agent);
        let out = backup(&m, costs, &set3(), &grid, ObsMode::Joint, 0.0).unwrap();
        for (h, b) in grid.beliefs().iter().enumerate() {
            let q = quality(&m, costs, &set3(), ObsMode::Joint, b, out.actions[h]);
            assert!((q - out.values[h]).abs() < 1e-12);
            assert!((out.set.envelope_value(b).unwrap() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn pruning_respects_distance() {
        let m = crate::model::tests::toy();
        let grid = BeliefGrid::deterioration(40, 0.001).unwrap();
        let costs = m.costs(crate::CostKind::Agent);
        let sol = solve_optimal(&m, costs, &grid, ObsMode::Joint, SolverParams { iterations: 40, prune_tol: 0.01 })
            .unwrap();
        let v = sol.set.vectors();
        for i in 0..v.len() {
            for j in 0..i {
                assert!(euclidean(&v[i].values, &v[j].values) > 0.03);
            }
        }
    }

    #[test]
    fn thresholds() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(extract_threshold(&p, &[0, 0, 0, 0], 1).chi, f64::INFINITY);
        let t = extract_threshold(&p, &[0, 0, 1, 1], 1);
        assert_eq!(t.chi, 0.3);
        assert!(t.warning.is_none());
        let t = extract_threshold(&p, &[0, 1, 0, 1], 1);
        assert_eq!(t.chi, 0.2);
        assert!(t.warning.unwrap().contains("1212"));
    }

    fn arb_belief() -> impl Strategy<Value = Belief> {
        prop::collection::vec(0.0f64..1.0, 3).prop_filter_map("zero", |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-6).then(|| Belief::new(v.iter().map(|p| p / s).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn envelope_is_concave(b1 in arb_belief(), b2 in arb_belief(), lam in 0.0f64..1.0) {
            let m = crate::model::tests::toy();
            let grid = BeliefGrid::deterioration(30, 0.001).unwrap();
            let sol = solve_optimal(&m, m.costs(crate::CostKind::Agent), &grid, ObsMode::Background,
                SolverParams { iterations: 20, prune_tol: 0.0 }).unwrap();
            let s = &sol.set;
            let mid = b1.mix(&b2, lam);
            let lhs = s.value(&mid);
            let rhs = lam * s.value(&b1) + (1.0 - lam) * s.value(&b2);
            prop_assert!(lhs >= rhs - 1e-9);
        }

        #[test]
        fn envelope_is_min_over_vectors(b in arb_belief()) {
            let s = set3();
            let env = s.envelope_value(&b).unwrap();
            for v in s.vectors() {
                prop_assert!(env <= b.dot(&v.values));
            }
        }
    }

    #[test]
    fn grid_values_are_monotone_from_zero() {
        let m = crate::model::tests::toy();
        let grid = BeliefGrid::deterioration(25, 0.001).unwrap();
        let costs = m.costs(crate::CostKind::Agent);
        let mut set = AlphaSet::zero(ObsMode::Joint, 3);
        let mut prev: Vec<f64> = grid.beliefs().iter().map(|b| set.value(b)).collect();
        for _ in 0..60 {
            set = pbvi_backup(&m, costs, &set, &grid, ObsMode::Joint, 0.0).unwrap();
            let next: Vec<f64> = grid.beliefs().iter().map(|b| set.value(b)).collect();
            for (n, p) in next.iter().zip(&prev) {
                assert!(*n >= p - 1e-12);
            }
            prev = next;
        }
    }
}
