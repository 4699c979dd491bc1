//! Problem instance and the elementary belief-space operators.
//!
//! A model holds the transition table `T(x, a, x')`, the background emission
//! table `E_Y(x, a, y)` (conditioned on the previous action), the
//! action-independent additional emission table `E_Z(x, z)`, two immediate
//! cost tables (the agent's `C` and society's `L`) and a discount factor.
//!
//! Background and additional observations are conditionally independent given
//! the state, so the joint observation `w = (y, z)` has emission
//! `E_W(x, a, w) = E_Y(x, a, y) * E_Z(x, z)`.
//!
//! All indices are 0-based in code. Files and CLI output use 1-based indices.

use serde::{Deserialize, Serialize};

use crate::belief::{dot, Belief};
use crate::error::{Error, Result};

/// Tolerance on every stochastic row of a model.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Which observation stream drives belief updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObsMode {
    /// Background observations `y` only.
    Background,
    /// Joint observations `w = (y, z)`.
    Joint,
}

impl std::fmt::Display for ObsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObsMode::Background => f.write_str("background"),
            ObsMode::Joint => f.write_str("joint"),
        }
    }
}

/// Selects one of the two cost tables carried by a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Agent,
    Society,
}

/// A joint observation `(y, z)`, 0-based.
///
/// The encoded index is `w = y * n_z + z`, i.e. `(y-1) * n_Z + z` in 1-based
/// terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointObservation {
    pub y: usize,
    pub z: usize,
}

impl JointObservation {
    pub fn encode(self, n_z: usize) -> usize {
        self.y * n_z + self.z
    }

    pub fn decode(w: usize, n_z: usize) -> Self {
        JointObservation { y: w / n_z, z: w % n_z }
    }
}

/// Immediate cost table `cost(x, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    n_actions: usize,
    values: Vec<f64>,
}

impl CostTable {
    /// Builds a table from rows indexed by state.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_actions = rows.first().map_or(0, Vec::len);
        if n_actions == 0 || rows.iter().any(|r| r.len() != n_actions) {
            return Err(Error::Parameter("ragged or empty cost table".into()));
        }
        Ok(CostTable {
            n_actions,
            values: rows.concat(),
        })
    }

    pub fn n_states(&self) -> usize {
        self.values.len() / self.n_actions
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.values[x * self.n_actions + a]
    }

    /// Column `c_a` of costs for action `a`, indexed by state.
    pub fn column(&self, a: usize) -> Vec<f64> {
        (0..self.n_states()).map(|x| self.get(x, a)).collect()
    }

    /// Expected immediate cost `sum_i cost(i, a) b(i)`.
    pub fn expected(&self, b: &Belief, a: usize) -> f64 {
        b.probs()
            .iter()
            .enumerate()
            .map(|(x, p)| self.get(x, a) * p)
            .sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.n_actions)
            .map(<[f64]>::to_vec)
            .collect()
    }
}

/// Expected immediate cost of action `a` under belief `b`.
pub fn expected_cost(costs: &CostTable, b: &Belief, a: usize) -> f64 {
    costs.expected(b, a)
}

/// On-disk layout of a model: nested arrays, first entry = index 1.
///
/// `transition[x][a][x']`, `emission_background[x][a][y]`,
/// `emission_additional[x][z]`, `cost_agent[x][a]`, `cost_society[x][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n_states: usize,
    pub n_actions: usize,
    pub n_obs_background: usize,
    pub n_obs_additional: usize,
    pub transition: Vec<Vec<Vec<f64>>>,
    pub emission_background: Vec<Vec<Vec<f64>>>,
    pub emission_additional: Vec<Vec<f64>>,
    pub cost_agent: Vec<Vec<f64>>,
    pub cost_society: Vec<Vec<f64>>,
    pub discount: f64,
}

impl ModelFile {
    /// Every violated invariant, with 1-based table coordinates.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (nx, na, ny, nz) = (
            self.n_states,
            self.n_actions,
            self.n_obs_background,
            self.n_obs_additional,
        );
        for (name, n) in [
            ("n_states", nx),
            ("n_actions", na),
            ("n_obs_background", ny),
            ("n_obs_additional", nz),
        ] {
            if n == 0 {
                out.push(format!("{name} must be positive"));
            }
        }
        let discount_ok = self.discount > 0.0 && self.discount < 1.0;
        if !discount_ok {
            out.push(format!("discount {} outside (0, 1)", self.discount));
        }

        check_shape3(&mut out, "transition", &self.transition, nx, na, nx);
        check_shape3(
            &mut out,
            "emission_background",
            &self.emission_background,
            nx,
            na,
            ny,
        );
        check_shape2(&mut out, "emission_additional", &self.emission_additional, nx, nz);
        check_shape2(&mut out, "cost_agent", &self.cost_agent, nx, na);
        check_shape2(&mut out, "cost_society", &self.cost_society, nx, na);
        if out.len() > usize::from(!discount_ok) {
            return out;
        }

        for x in 0..nx {
            for a in 0..na {
                check_row(
                    &mut out,
                    &format!("transition row (x={}, a={})", x + 1, a + 1),
                    &self.transition[x][a],
                );
                check_row(
                    &mut out,
                    &format!("emission_background row (x={}, a={})", x + 1, a + 1),
                    &self.emission_background[x][a],
                );
            }
            check_row(
                &mut out,
                &format!("emission_additional row (x={})", x + 1),
                &self.emission_additional[x],
            );
        }
        for (name, table) in [("cost_agent", &self.cost_agent), ("cost_society", &self.cost_society)]
        {
            for (x, row) in table.iter().enumerate() {
                for (a, c) in row.iter().enumerate() {
                    if !c.is_finite() {
                        out.push(format!("{name} (x={}, a={}) is not finite", x + 1, a + 1));
                    } else if *c < 0.0 {
                        out.push(format!("{name} (x={}, a={}) = {c} is negative", x + 1, a + 1));
                    }
                }
            }
        }
        out
    }
}

fn check_shape2(out: &mut Vec<String>, name: &str, t: &[Vec<f64>], n0: usize, n1: usize) {
    if t.len() != n0 {
        out.push(format!("{name} has {} rows, expected {n0}", t.len()));
        return;
    }
    for (i, row) in t.iter().enumerate() {
        if row.len() != n1 {
            out.push(format!(
                "{name} row {} has {} entries, expected {n1}",
                i + 1,
                row.len()
            ));
        }
    }
}

fn check_shape3(
    out: &mut Vec<String>,
    name: &str,
    t: &[Vec<Vec<f64>>],
    n0: usize,
    n1: usize,
    n2: usize,
) {
    if t.len() != n0 {
        out.push(format!("{name} has {} blocks, expected {n0}", t.len()));
        return;
    }
    for (i, block) in t.iter().enumerate() {
        check_shape2(out, &format!("{name}[{}]", i + 1), block, n1, n2);
    }
}

fn check_row(out: &mut Vec<String>, label: &str, row: &[f64]) {
    if let Some((j, p)) = row
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        out.push(format!("{label}: entry {} = {p} is negative or not finite", j + 1));
        return;
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        out.push(format!("{label} sums to {sum:.15}"));
    }
}

/// A validated discrete POMDP. Immutable once built.
#[derive(Debug, Clone)]
pub struct PomdpModel {
    n_states: usize,
    n_actions: usize,
    n_obs_background: usize,
    n_obs_additional: usize,
    transition: Vec<f64>,
    emission_background: Vec<f64>,
    emission_additional: Vec<f64>,
    cost_agent: CostTable,
    cost_society: CostTable,
    discount: f64,
}

impl PomdpModel {
    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let violations = file.violations();
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        let flat3 = |t: &[Vec<Vec<f64>>]| -> Vec<f64> { t.iter().flatten().flatten().copied().collect() };
        Ok(PomdpModel {
            n_states: file.n_states,
            n_actions: file.n_actions,
            n_obs_background: file.n_obs_background,
            n_obs_additional: file.n_obs_additional,
            transition: flat3(&file.transition),
            emission_background: flat3(&file.emission_background),
            emission_additional: file.emission_additional.concat(),
            cost_agent: CostTable::from_rows(&file.cost_agent)?,
            cost_society: CostTable::from_rows(&file.cost_society)?,
            discount: file.discount,
        })
    }

    pub fn to_file(&self) -> ModelFile {
        let (nx, na, ny, nz) = (
            self.n_states,
            self.n_actions,
            self.n_obs_background,
            self.n_obs_additional,
        );
        ModelFile {
            n_states: nx,
            n_actions: na,
            n_obs_background: ny,
            n_obs_additional: nz,
            transition: (0..nx)
                .map(|x| (0..na).map(|a| (0..nx).map(|x2| self.t(x, a, x2)).collect()).collect())
                .collect(),
            emission_background: (0..nx)
                .map(|x| (0..na).map(|a| (0..ny).map(|y| self.e_y(x, a, y)).collect()).collect())
                .collect(),
            emission_additional: (0..nx)
                .map(|x| (0..nz).map(|z| self.e_z(x, z)).collect())
                .collect(),
            cost_agent: self.cost_agent.rows(),
            cost_society: self.cost_society.rows(),
            discount: self.discount,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serialises")
    }

    /// Same model with a different discount factor.
    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        let mut file = self.to_file();
        file.discount = discount;
        Self::from_file(&file)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }
    pub fn n_actions(&self) -> usize {
        self.n_actions
    }
    pub fn n_obs_background(&self) -> usize {
        self.n_obs_background
    }
    pub fn n_obs_additional(&self) -> usize {
        self.n_obs_additional
    }
    pub fn n_obs_joint(&self) -> usize {
        self.n_obs_background * self.n_obs_additional
    }
    pub fn n_obs(&self, mode: ObsMode) -> usize {
        match mode {
            ObsMode::Background => self.n_obs_background,
            ObsMode::Joint => self.n_obs_joint(),
        }
    }
    pub fn discount(&self) -> f64 {
        self.discount
    }
    pub fn costs(&self, kind: CostKind) -> &CostTable {
        match kind {
            CostKind::Agent => &self.cost_agent,
            CostKind::Society => &self.cost_society,
        }
    }

    #[inline]
    pub fn t(&self, x: usize, a: usize, x2: usize) -> f64 {
        self.transition[(x * self.n_actions + a) * self.n_states + x2]
    }

    #[inline]
    pub fn e_y(&self, x: usize, a: usize, y: usize) -> f64 {
        self.emission_background[(x * self.n_actions + a) * self.n_obs_background + y]
    }

    #[inline]
    pub fn e_z(&self, x: usize, z: usize) -> f64 {
        self.emission_additional[x * self.n_obs_additional + z]
    }

    /// Emission probability of observation `o` (in the given mode) from state
    /// `x` after action `a`. No bounds checking beyond slice indexing.
    #[inline]
    pub fn emission(&self, mode: ObsMode, x: usize, a: usize, o: usize) -> f64 {
        match mode {
            ObsMode::Background => self.e_y(x, a, o),
            ObsMode::Joint => {
                let w = JointObservation::decode(o, self.n_obs_additional);
                self.e_y(x, a, w.y) * self.e_z(x, w.z)
            }
        }
    }

    fn check(&self, what: &'static str, index: usize, size: usize) -> Result<()> {
        if index < size {
            Ok(())
        } else {
            Err(Error::Index { what, index, size })
        }
    }

    fn check_belief(&self, b: &Belief) -> Result<()> {
        if b.len() == self.n_states {
            Ok(())
        } else {
            Err(Error::InvalidBelief {
                probs: b.probs().to_vec(),
                reason: format!("length {} but model has {} states", b.len(), self.n_states),
            })
        }
    }

    /// `E_W(x, a, w) = E_Y(x, a, y) E_Z(x, z)`.
    pub fn joint_emission(&self, x: usize, a: usize, w: JointObservation) -> Result<f64> {
        self.check("state", x, self.n_states)?;
        self.check("action", a, self.n_actions)?;
        self.check("background observation", w.y, self.n_obs_background)?;
        self.check("additional observation", w.z, self.n_obs_additional)?;
        Ok(self.e_y(x, a, w.y) * self.e_z(x, w.z))
    }

    /// Probability `e_Z(z)^T b` of additional observation `z`.
    pub fn likelihood_additional(&self, b: &Belief, z: usize) -> Result<f64> {
        self.check_belief(b)?;
        self.check("additional observation", z, self.n_obs_additional)?;
        Ok((0..self.n_states).map(|x| self.e_z(x, z) * b.get(x)).sum())
    }

    /// Bayes posterior after additional observation `z`.
    pub fn bayes_update_additional(&self, b: &Belief, z: usize) -> Result<Belief> {
        let lik = self.likelihood_additional(b, z)?;
        if lik <= 0.0 {
            return Err(Error::ImpossibleObservation {
                belief: b.probs().to_vec(),
                obs: z,
            });
        }
        let post = (0..self.n_states)
            .map(|x| self.e_z(x, z) * b.get(x) / lik)
            .collect();
        Ok(Belief::from_raw(post))
    }

    /// One-step prediction `t(b, a)(i) = sum_j T(j, a, i) b(j)`.
    pub fn predict(&self, b: &Belief, a: usize) -> Result<Belief> {
        self.check_belief(b)?;
        self.check("action", a, self.n_actions)?;
        let mut out = vec![0.0; self.n_states];
        self.predict_into(b.probs(), a, &mut out);
        Ok(Belief::from_raw(out))
    }

    /// Probability of observation `o` given the predicted belief `pred`.
    pub fn likelihood(&self, pred: &Belief, a: usize, o: usize, mode: ObsMode) -> Result<f64> {
        self.check_belief(pred)?;
        self.check("action", a, self.n_actions)?;
        self.check("observation", o, self.n_obs(mode))?;
        Ok((0..self.n_states)
            .map(|x| self.emission(mode, x, a, o) * pred.get(x))
            .sum())
    }

    /// Combined prediction and update: `u(t(b, a), o)`, where the update uses
    /// `E_Y` in background mode and `E_W` in joint mode.
    pub fn transition_update(&self, b: &Belief, a: usize, o: usize, mode: ObsMode) -> Result<Belief> {
        self.check_belief(b)?;
        self.check("action", a, self.n_actions)?;
        self.check("observation", o, self.n_obs(mode))?;
        let mut pred = vec![0.0; self.n_states];
        self.predict_into(b.probs(), a, &mut pred);
        let mut post = vec![0.0; self.n_states];
        let lik = self.mask_into(&pred, a, o, mode, &mut post);
        if lik <= 0.0 {
            return Err(Error::ImpossibleObservation {
                belief: b.probs().to_vec(),
                obs: o,
            });
        }
        post.iter_mut().for_each(|p| *p /= lik);
        Ok(Belief::from_raw(post))
    }

    /// All posteriors reachable from `b` under action `a`, with their
    /// probabilities. Zero-probability observations are skipped.
    pub fn successors(&self, b: &Belief, a: usize, mode: ObsMode) -> Vec<(usize, f64, Belief)> {
        let mut pred = vec![0.0; self.n_states];
        self.predict_into(b.probs(), a, &mut pred);
        let mut out = Vec::new();
        let mut post = vec![0.0; self.n_states];
        for o in 0..self.n_obs(mode) {
            let lik = self.mask_into(&pred, a, o, mode, &mut post);
            if lik > 0.0 {
                let probs = post.iter().map(|p| p / lik).collect();
                out.push((o, lik, Belief::from_raw(probs)));
            }
        }
        out
    }

    /// Posteriors after an additional observation only (no transition), with
    /// their probabilities; zero-probability observations are skipped.
    pub fn additional_posteriors(&self, b: &Belief) -> Vec<(usize, f64, Belief)> {
        let mut out = Vec::new();
        for z in 0..self.n_obs_additional {
            let lik: f64 = (0..self.n_states).map(|x| self.e_z(x, z) * b.get(x)).sum();
            if lik > 0.0 {
                let post = (0..self.n_states)
                    .map(|x| self.e_z(x, z) * b.get(x) / lik)
                    .collect();
                out.push((z, lik, Belief::from_raw(post)));
            }
        }
        out
    }

    #[inline]
    pub(crate) fn predict_into(&self, b: &[f64], a: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            let row = &self.transition[(j * self.n_actions + a) * self.n_states..][..self.n_states];
            for (o, t) in out.iter_mut().zip(row) {
                *o += t * bj;
            }
        }
    }

    /// Writes `Diag[e(o, a)] pred` to `out` and returns its sum.
    #[inline]
    pub(crate) fn mask_into(&self, pred: &[f64], a: usize, o: usize, mode: ObsMode, out: &mut [f64]) -> f64 {
        let mut lik = 0.0;
        for (x, (v, p)) in out.iter_mut().zip(pred).enumerate() {
            *v = self.emission(mode, x, a, o) * p;
            lik += *v;
        }
        lik
    }

    /// `T_a sum_o Diag[e(o, a)] alpha_o` for a per-observation choice of
    /// vectors: the backed-up coefficients of a conditional plan.
    pub(crate) fn backup_vector<'v>(
        &self,
        a: usize,
        mode: ObsMode,
        next: impl Fn(usize) -> Option<&'v [f64]>,
    ) -> Vec<f64> {
        let n = self.n_states;
        // inner(x') = sum_o e(x', a, o) alpha_{o}(x')
        let mut inner = vec![0.0; n];
        for o in 0..self.n_obs(mode) {
            if let Some(alpha) = next(o) {
                for (x2, v) in inner.iter_mut().enumerate() {
                    *v += self.emission(mode, x2, a, o) * alpha[x2];
                }
            }
        }
        (0..n)
            .map(|x| dot(&self.transition[(x * self.n_actions + a) * n..][..n], &inner))
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Three states, two actions, deterministic background signal that
    /// separates state 3, and a binary additional signal.
    pub(crate) fn toy() -> PomdpModel {
        let file = ModelFile {
            n_states: 3,
            n_actions: 2,
            n_obs_background: 2,
            n_obs_additional: 2,
            transition: vec![
                vec![vec![0.96, 0.04, 0.0], vec![0.96, 0.04, 0.0]],
                vec![vec![0.0, 0.88, 0.12], vec![0.96, 0.04, 0.0]],
                vec![vec![0.0, 0.0, 1.0], vec![0.96, 0.04, 0.0]],
            ],
            emission_background: vec![
                vec![vec![1.0, 0.0], vec![1.0, 0.0]],
                vec![vec![1.0, 0.0], vec![1.0, 0.0]],
                vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            ],
            emission_additional: vec![vec![0.8, 0.2], vec![0.2, 0.8], vec![0.2, 0.8]],
            cost_agent: vec![vec![0.0, 0.5], vec![0.0, 0.5], vec![1.0, 1.5]],
            cost_society: vec![vec![0.0, 0.25], vec![0.0, 0.25], vec![1.0, 1.25]],
            discount: 0.95,
        };
        PomdpModel::from_file(&file).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn validation_names_coordinates() {
        let mut file = toy().to_file();
        file.transition[1][0][1] += 1e-6;
        file.discount = 1.0;
        let v = file.violations();
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v.iter().any(|s| s.contains("transition row (x=2, a=1)")));
        assert!(v.iter().any(|s| s.contains("discount")));
        assert!(matches!(PomdpModel::from_file(&file), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn validation_catches_shapes() {
        let mut file = toy().to_file();
        file.emission_additional[2].pop();
        let v = file.violations();
        assert!(v[0].contains("emission_additional row 3"), "{v:?}");
    }

    #[test]
    fn json_round_trip() {
        let m = toy();
        let back = PomdpModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_file().transition, m.to_file().transition);
        assert_eq!(back.discount(), 0.95);
    }

    #[test]
    fn joint_observation_encoding_is_bijective() {
        let nz = 7;
        let mut seen = vec![false; 3 * nz];
        for y in 0..3 {
            for z in 0..nz {
                let w = JointObservation { y, z };
                let code = w.encode(nz);
                assert!(!seen[code]);
                seen[code] = true;
                assert_eq!(JointObservation::decode(code, nz), w);
            }
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn joint_emission_on_failed_state() {
        let m = toy();
        for a in 0..2 {
            for z in 0..2 {
                assert_eq!(m.joint_emission(2, a, JointObservation { y: 0, z }).unwrap(), 0.0);
                assert!(m.joint_emission(2, a, JointObservation { y: 1, z }).unwrap() > 0.0);
            }
        }
        assert!(matches!(
            m.joint_emission(3, 0, JointObservation { y: 0, z: 0 }),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn additional_likelihood_and_update() {
        let m = toy();
        let b = Belief::new(vec![0.5, 0.5, 0.0]).unwrap();
        // e_Z(z=1) = [0.8, 0.2, 0.2]: 0.4 + 0.1
        assert!((m.likelihood_additional(&b, 0).unwrap() - 0.5).abs() < 1e-15);
        let post = m.bayes_update_additional(&b, 0).unwrap();
        assert!(close(post.probs(), &[0.8, 0.2, 0.0], 1e-15));

        let point = Belief::point(3, 0).unwrap();
        assert_eq!(m.likelihood_additional(&point, 1).unwrap(), 0.2);
        assert_eq!(m.bayes_update_additional(&point, 1).unwrap(), point);
    }

    #[test]
    fn impossible_observation_is_an_error() {
        let m = toy();
        let b = Belief::new(vec![0.5, 0.5, 0.0]).unwrap();
        // after repair nothing can be failed, so y=2 is impossible
        let err = m.transition_update(&b, 1, 1, ObsMode::Background).unwrap_err();
        assert!(matches!(err, Error::ImpossibleObservation { obs: 1, .. }));
    }

    #[test]
    fn prediction_and_filter() {
        let m = toy();
        let intact = Belief::point(3, 0).unwrap();
        assert!(close(m.predict(&intact, 0).unwrap().probs(), &[0.96, 0.04, 0.0], 1e-15));
        let b = Belief::new(vec![0.1, 0.3, 0.6]).unwrap();
        assert!(close(m.predict(&b, 1).unwrap().probs(), &[0.96, 0.04, 0.0], 1e-15));
        let silent = m.transition_update(&intact, 0, 0, ObsMode::Background).unwrap();
        assert!(close(silent.probs(), &[0.96, 0.04, 0.0], 1e-15));
        let failed = m.transition_update(&Belief::point(3, 1).unwrap(), 0, 1, ObsMode::Background).unwrap();
        assert_eq!(failed.probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn expected_costs() {
        let m = toy();
        let c = m.costs(CostKind::Agent);
        let failed = Belief::point(3, 2).unwrap();
        assert_eq!(expected_cost(c, &failed, 0), 1.0);
        assert_eq!(expected_cost(c, &failed, 1), 1.5);
        assert_eq!(expected_cost(c, &Belief::new(vec![0.5, 0.5, 0.0]).unwrap(), 0), 0.0);
    }

    fn arb_belief(n: usize) -> impl Strategy<Value = Belief> {
        prop::collection::vec(0.001f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            Belief::new(v.iter().map(|p| p / s).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn total_probability(b in arb_belief(3)) {
            let m = toy();
            let mut mean = [0.0; 3];
            for (_, p, post) in m.additional_posteriors(&b) {
                for i in 0..3 { mean[i] += p * post.get(i); }
            }
            prop_assert!(close(&mean, b.probs(), 1e-9));
        }

        #[test]
        fn joint_update_factorises(b in arb_belief(3), a in 0usize..2) {
            let m = toy();
            let pred = m.predict(&b, a).unwrap();
            for y in 0..2 {
                for z in 0..2 {
                    let w = JointObservation { y, z }.encode(2);
                    let lw = m.likelihood(&pred, a, w, ObsMode::Joint).unwrap();
                    let ly = m.likelihood(&pred, a, y, ObsMode::Background).unwrap();
                    if ly == 0.0 {
                        prop_assert_eq!(lw, 0.0);
                        continue;
                    }
                    let by = m.transition_update(&b, a, y, ObsMode::Background).unwrap();
                    let lz = m.likelihood_additional(&by, z).unwrap();
                    prop_assert!((lw - ly * lz).abs() < 1e-12);
                    let direct = m.transition_update(&b, a, w, ObsMode::Joint).unwrap();
                    let staged = m.bayes_update_additional(&by, z).unwrap();
                    prop_assert!(close(direct.probs(), staged.probs(), 1e-12));
                }
            }
        }

        #[test]
        fn operators_preserve_the_simplex(b in arb_belief(3), a in 0usize..2) {
            let m = toy();
            let p = m.predict(&b, a).unwrap();
            prop_assert!(Belief::new(p.probs().to_vec()).is_ok());
            for (_, _, post) in m.successors(&b, a, ObsMode::Joint) {
                prop_assert!(Belief::new(post.probs().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn random_tables_joint_emission_sums_to_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut row = |n: usize| -> Vec<f64> {
            let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
            let s: f64 = v.iter().sum();
            v.iter().map(|p| p / s).collect()
        };
        let (nx, na, ny, nz) = (4, 3, 3, 5);
        let file = ModelFile {
            n_states: nx,
            n_actions: na,
            n_obs_background: ny,
            n_obs_additional: nz,
            transition: (0..nx).map(|_| (0..na).map(|_| row(nx)).collect()).collect(),
            emission_background: (0..nx).map(|_| (0..na).map(|_| row(ny)).collect()).collect(),
            emission_additional: (0..nx).map(|_| row(nz)).collect(),
            cost_agent: vec![vec![0.0; na]; nx],
            cost_society: vec![vec![0.0; na]; nx],
            discount: 0.9,
        };
        let m = PomdpModel::from_file(&file).unwrap();
        for x in 0..nx {
            for a in 0..na {
                let mut total = 0.0;
                for y in 0..ny {
                    for z in 0..nz {
                        total += m.joint_emission(x, a, JointObservation { y, z }).unwrap();
                    }
                }
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}
