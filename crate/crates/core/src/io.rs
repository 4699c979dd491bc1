//! File formats: α-sets and controllers as JSON, tables as CSV.
//!
//! Indices (actions, inner states, observations) are 1-based in files.
//! Numbers in CSV files carry 12 significant digits so output is stable
//! across runs and platforms.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsc::{Controller, ControllerKind, JointChain};
use crate::model::ObsMode;
use crate::pbvi::{AlphaSet, AlphaVector};
use crate::voi::VoiCurve;

/// 12 significant digits; `inf`/`-inf`/`nan` for non-finite values.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

/// A CSV table built row by row.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    body: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Csv {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            body: String::new(),
        }
    }

    /// Appends a row of pre-formatted cells.
    pub fn push(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn push_nums(&mut self, cells: &[f64]) {
        let cells: Vec<String> = cells.iter().map(|x| fmt_num(*x)).collect();
        self.push(&cells);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        out.push_str(&self.body);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct AlphaVectorDoc {
    id: usize,
    action: usize,
    source: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct AlphaSetDoc {
    mode: ObsMode,
    n_states: usize,
    vectors: Vec<AlphaVectorDoc>,
}

pub fn alpha_set_to_json(set: &AlphaSet) -> String {
    let doc = AlphaSetDoc {
        mode: set.mode(),
        n_states: set.n_states(),
        vectors: set
            .vectors()
            .iter()
            .map(|v| AlphaVectorDoc {
                id: v.id + 1,
                action: v.action + 1,
                source: v.source + 1,
                values: v.values.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("alpha set serialises")
}

pub fn alpha_set_from_json(text: &str) -> Result<AlphaSet> {
    let doc: AlphaSetDoc = serde_json::from_str(text)?;
    let one_based = |what: &str, i: usize| {
        i.checked_sub(1)
            .ok_or_else(|| Error::Parse(format!("{what} indices are 1-based, found 0")))
    };
    let vectors = doc
        .vectors
        .into_iter()
        .map(|v| {
            Ok(AlphaVector {
                id: one_based("vector", v.id)?,
                action: one_based("action", v.action)?,
                source: one_based("source", v.source)?,
                values: v.values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AlphaSet::new(doc.mode, doc.n_states, vectors)
}

#[derive(Debug, Clone, Serialize)]
struct InnerDoc {
    h: usize,
    action: usize,
    rep_belief: Vec<f64>,
    /// Successor per observation; `null` where the observation cannot occur.
    eta: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize)]
struct ControllerDoc {
    kind: ControllerKind,
    mode: ObsMode,
    n_obs: usize,
    inner_states: Vec<InnerDoc>,
}

pub fn controller_to_json(ctrl: &Controller) -> String {
    let doc = ControllerDoc {
        kind: ctrl.kind(),
        mode: ctrl.mode(),
        n_obs: ctrl.n_obs(),
        inner_states: ctrl
            .inner()
            .iter()
            .enumerate()
            .map(|(h, s)| InnerDoc {
                h: h + 1,
                action: s.action + 1,
                rep_belief: s.rep_belief.probs().to_vec(),
                eta: (0..ctrl.n_obs()).map(|o| ctrl.eta_raw(h, o).map(|x| x + 1)).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("controller serialises")
}

/// Dense transition matrix followed by the cost column.
pub fn chain_to_csv(chain: &JointChain) -> String {
    let n = chain.n_joint();
    let mut header: Vec<String> = (0..n)
        .map(|s| format!("s{}_h{}_x{}", s + 1, s / chain.n_states() + 1, s % chain.n_states() + 1))
        .collect();
    header.push("cost".into());
    let mut csv = Csv::new(&header);
    for (s, row) in chain.dense_transition().into_iter().enumerate() {
        let mut cells = row;
        cells.push(chain.cost()[s]);
        csv.push_nums(&cells);
    }
    csv.render()
}

pub const VOI_COLUMNS: [&str; 10] = [
    "p_dam", "V_Y", "U_Y", "V_W", "U_W", "VoI_CP", "VoI_CO", "VoI_F", "dC", "dV",
];

/// One row per belief; `p_dam` is the second belief entry.
pub fn voi_curve_to_csv(curve: &VoiCurve) -> String {
    let mut header = vec!["belief"];
    header.extend(VOI_COLUMNS);
    let mut csv = Csv::new(&header);
    for (i, r) in curve.rows.iter().enumerate() {
        let mut cells = vec![(i + 1).to_string()];
        for x in [
            r.belief.probs().get(1).copied().unwrap_or(0.0),
            r.v_y,
            r.u_y,
            r.v_w,
            r.u_w,
            r.voi_cp,
            r.voi_co,
            r.voi_f,
            r.delta_c,
            r.delta_v,
        ] {
            cells.push(fmt_num(x));
        }
        csv.push(&cells);
    }
    csv.render()
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<PathBuf>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            parameters,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }
}

/// `key = value` lines, for terminal summaries.
pub fn summary_lines(pairs: &[(&str, f64)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {}", fmt_num(*v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.35), "3.50000000000e-1");
        assert_eq!(fmt_num(-20.0), "-2.00000000000e1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        let x: f64 = fmt_num(1.0 / 3.0).parse().unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_set_round_trip() {
        let set = AlphaSet::new(
            ObsMode::Joint,
            2,
            vec![
                AlphaVector { id: 0, action: 1, source: 4, values: vec![0.5, 1.0] },
                AlphaVector { id: 1, action: 0, source: 0, values: vec![0.0, 2.0] },
            ],
        )
        .unwrap();
        let text = alpha_set_to_json(&set);
        assert!(text.contains("\"action\": 2"));
        assert_eq!(alpha_set_from_json(&text).unwrap(), set);
        assert!(matches!(alpha_set_from_json("{\"mode\": 3}"), Err(Error::Parse(_))));
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.push_nums(&[1.0, f64::INFINITY]);
        assert_eq!(c.render(), "a,b\n1.00000000000e0,inf\n");
    }
}
