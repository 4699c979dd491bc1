//! One function per subcommand. Each builds its [`Job`] first so that
//! `--dry-run` can print the manifest before any work is done.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pomdp_voi::fsc::{
    build_controller, build_joint_chain, evaluate as solve_chain, simulate, stationary_distribution, value_at,
    Controller, SimulationConfig,
};
use pomdp_voi::io::{alpha_set_to_json, chain_to_csv, controller_to_json, fmt_num, summary_lines, Csv, RunManifest};
use pomdp_voi::pbvi::solve_optimal;
use pomdp_voi::scenarios::{self, AnalysisConfig, DeteriorationSpec, RegulationAnalysis, SettingMode, SweepResult, PROBES};
use pomdp_voi::voi::{VoiCurve, VoiRow};
use pomdp_voi::{Belief, BeliefGrid, CostKind, Error, ObsMode, PomdpModel, Result};

use crate::args::*;
use crate::figures;
use crate::job::Job;

pub fn run(command: Command, dry: bool) -> Result<()> {
    match command {
        Command::Validate(a) => validate(&a, dry),
        Command::ExportModel(a) => export_model(&a, dry),
        Command::Solve(a) => solve(&a, dry),
        Command::Evaluate(a) => evaluate(&a, dry),
        Command::Voi(a) => voi(&a, dry),
        Command::Stationary(a) => stationary(&a, dry),
        Command::Sweep(a) => sweep(&a, dry),
        Command::Reproduce(a) => figures::reproduce(&a, dry),
        Command::Rerun(a) => rerun(&a, dry),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Prefixes parse errors with the file they came from.
fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn load_model_file(path: &Path) -> Result<PomdpModel> {
    PomdpModel::from_json(&read(path)?).map_err(|e| in_file(path, e))
}

pub fn scenario_spec(scenario: Option<&Path>, sigma: Option<f64>) -> Result<DeteriorationSpec> {
    let mut spec = match scenario {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| in_file(p, e.into()))?,
        None => DeteriorationSpec::default(),
    };
    if let Some(s) = sigma {
        spec.sigma = s;
    }
    spec.check()?;
    Ok(spec)
}

fn load_model(src: &SourceOpts) -> Result<PomdpModel> {
    match &src.model {
        Some(p) => load_model_file(p),
        None => scenario_spec(src.scenario.as_deref(), src.sigma)?.build(),
    }
}

fn load_grid(opts: &GridOpts, model: &PomdpModel) -> Result<BeliefGrid> {
    match &opts.beliefs {
        Some(p) => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(&read(p)?).map_err(|e| in_file(p, e.into()))?;
            let beliefs = rows
                .into_iter()
                .map(|r| {
                    if r.len() != model.n_states() {
                        return Err(Error::Parameter(format!(
                            "grid belief of length {} for a model with {} states",
                            r.len(),
                            model.n_states()
                        )));
                    }
                    Belief::new(r)
                })
                .collect::<Result<Vec<_>>>()?;
            BeliefGrid::new(beliefs)
        }
        None if model.n_states() == 3 => BeliefGrid::deterioration(opts.segment.grid, opts.segment.min_pdam),
        None => Err(Error::Parameter("models without three states need --beliefs".into())),
    }
}

fn inputs(paths: &[&Option<PathBuf>]) -> Vec<PathBuf> {
    paths.iter().filter_map(|p| (*p).clone()).collect()
}

fn source_inputs(src: &SourceOpts, grid: &GridOpts) -> Vec<PathBuf> {
    inputs(&[&src.model, &src.scenario, &grid.beliefs])
}

pub fn analysis_config(grid: &SegmentGridOpts, solver: &SolverOpts) -> AnalysisConfig {
    AnalysisConfig {
        grid_count: grid.grid,
        p_min: grid.min_pdam,
        solver: solver.params(),
        ..AnalysisConfig::default()
    }
}

/// Second belief entry; the damage probability in the deterioration example.
pub fn pdam(b: &Belief) -> f64 {
    b.probs().get(1).copied().unwrap_or(0.0)
}

/// Threshold report for models shaped like the deterioration example.
fn threshold_lines(model: &PomdpModel, grid: &BeliefGrid, policy: &[usize], name: &str) -> String {
    if model.n_states() != 3 || model.n_actions() <= scenarios::REPAIR {
        return String::new();
    }
    let t = scenarios::threshold(grid, policy);
    let mut out = summary_lines(&[(name, t.chi)]);
    if let Some(w) = t.warning {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn report(job: &mut Job, name: &str, text: String) {
    print!("{text}");
    job.add(name, text);
}

fn validate(a: &ValidateArgs, dry: bool) -> Result<()> {
    let job = Job::new("validate", a, vec![a.model.clone()], &a.out.out, &[]);
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = load_model_file(&a.model)?;
    println!(
        "{}: valid ({} states, {} actions, {} background and {} additional observations, discount {})",
        a.model.display(),
        model.n_states(),
        model.n_actions(),
        model.n_obs_background(),
        model.n_obs_additional(),
        model.discount()
    );
    job.finish()
}

fn export_model(a: &ExportArgs, dry: bool) -> Result<()> {
    let mut job = Job::new(
        "export-model",
        a,
        inputs(&[&a.scenario.scenario]),
        &a.out.out,
        &["model.json".into()],
    );
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = scenario_spec(a.scenario.scenario.as_deref(), a.scenario.sigma)?.build()?;
    let mut text = model.to_json();
    text.push('\n');
    job.add("model.json", text);
    job.finish()
}

fn solve(a: &SolveArgs, dry: bool) -> Result<()> {
    let files = ["solve_alpha.json", "solve_policy.csv", "solve_summary.txt"].map(String::from);
    let mut job = Job::new("solve", a, source_inputs(&a.source, &a.grid), &a.out.out, &files);
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = load_model(&a.source)?;
    let grid = load_grid(&a.grid, &model)?;
    let sol = solve_optimal(&model, model.costs(a.costs.into()), &grid, a.mode.into(), a.solver.params())?;

    let mut csv = Csv::new(&["belief", "p_dam", "action", "envelope_value"]);
    for (i, b) in grid.beliefs().iter().enumerate() {
        csv.push(&[
            (i + 1).to_string(),
            fmt_num(pdam(b)),
            (sol.policy[i] + 1).to_string(),
            fmt_num(sol.values[i]),
        ]);
    }
    let mut summary = format!("vectors = {}\n", sol.set.len());
    summary += &summary_lines(&[("residual", sol.residual)]);
    summary += &threshold_lines(&model, &grid, &sol.policy, "chi");

    job.add("solve_alpha.json", alpha_set_to_json(&sol.set) + "\n");
    job.add("solve_policy.csv", csv.render());
    report(&mut job, "solve_summary.txt", summary);
    job.finish()
}

/// Steps after which the discount factor has fallen below 1e-6.
fn default_steps(gamma: f64) -> usize {
    (1e-6f64.ln() / gamma.ln()).ceil() as usize
}

fn evaluate(a: &EvaluateArgs, dry: bool) -> Result<()> {
    let mut files = vec!["evaluate_values.csv".to_string(), "evaluate_controller.json".into()];
    if a.export_chain {
        files.push("evaluate_chain.csv".into());
    }
    files.push("evaluate_summary.txt".into());
    let mut job = Job::new("evaluate", a, source_inputs(&a.source, &a.grid), &a.out.out, &files);
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = load_model(&a.source)?;
    let grid = load_grid(&a.grid, &model)?;
    let mode: ObsMode = a.mode.into();
    let sol = solve_optimal(&model, model.costs(a.policy_costs.into()), &grid, mode, a.solver.params())?;
    let ctrl = build_controller(&model, &sol, &grid, mode, a.controller.into())?;
    let costs = model.costs(a.costs.into());
    let chain = build_joint_chain(&model, &ctrl, costs)?;
    let values = solve_chain(&chain, model.discount())?;

    let mut csv = Csv::new(&["belief", "p_dam", "inner", "action", "value"]);
    for (i, b) in grid.beliefs().iter().enumerate() {
        let h = ctrl.locate(b);
        csv.push(&[
            (i + 1).to_string(),
            fmt_num(pdam(b)),
            (h + 1).to_string(),
            (ctrl.action_of(h) + 1).to_string(),
            fmt_num(value_at(&ctrl, &values, b)),
        ]);
    }
    let mut summary = format!("inner_states = {}\njoint_states = {}\n", ctrl.n_inner(), chain.n_joint());
    summary += &threshold_lines(&model, &grid, &sol.policy, "chi");
    if a.trajectories > 0 {
        let start = if a.start.is_empty() {
            Belief::point(model.n_states(), 0)?
        } else {
            Belief::new(a.start.clone())?
        };
        if start.len() != model.n_states() {
            return Err(Error::Parameter(format!("--start has {} entries, expected {}", start.len(), model.n_states())));
        }
        let config = SimulationConfig {
            seed: a.seed,
            steps: a.steps.unwrap_or_else(|| default_steps(model.discount())),
            trajectories: a.trajectories,
            burn_in: 0,
        };
        let linear = value_at(&ctrl, &values, &start);
        let rep = simulate(&model, &ctrl, costs, &start, config)?;
        summary += &summary_lines(&[
            ("start_value", linear),
            ("rollout_mean", rep.mean),
            ("rollout_std_error", rep.std_error),
            ("z_score", (rep.mean - linear) / rep.std_error),
        ]);
    }

    job.add("evaluate_values.csv", csv.render());
    job.add("evaluate_controller.json", controller_to_json(&ctrl) + "\n");
    if a.export_chain {
        job.add("evaluate_chain.csv", chain_to_csv(&chain));
    }
    report(&mut job, "evaluate_summary.txt", summary);
    job.finish()
}

pub fn voi_value(r: &VoiRow, column: &str) -> f64 {
    match column {
        "V_Y" => r.v_y,
        "U_Y" => r.u_y,
        "V_W" => r.v_w,
        "U_W" => r.u_w,
        "VoI_CP" => r.voi_cp,
        "VoI_CO" => r.voi_co,
        "VoI_F" => r.voi_f,
        "dC" => r.delta_c,
        "dV" => r.delta_v,
        other => unreachable!("unknown VoI column {other}"),
    }
}

pub const ALL_COLUMNS: [&str; 9] = ["V_Y", "U_Y", "V_W", "U_W", "VoI_CP", "VoI_CO", "VoI_F", "dC", "dV"];

fn assumption_columns(a: AssumptionArg) -> &'static [&'static str] {
    match a {
        AssumptionArg::Pessimistic => &["V_Y", "U_Y", "VoI_CP"],
        AssumptionArg::Optimistic => &["V_W", "U_W", "VoI_CO"],
        AssumptionArg::Flow => &["V_Y", "V_W", "U_W", "VoI_F", "dC", "dV"],
        AssumptionArg::All => &ALL_COLUMNS,
    }
}

/// `belief, p_dam`, the chosen columns, then any extra per-row columns.
pub fn curve_csv(curve: &VoiCurve, columns: &[&str], extra: &[(&str, Vec<f64>)]) -> String {
    let mut header = vec!["belief", "p_dam"];
    header.extend(columns);
    header.extend(extra.iter().map(|(name, _)| *name));
    let mut csv = Csv::new(&header);
    for (i, r) in curve.rows.iter().enumerate() {
        let mut cells = vec![(i + 1).to_string(), fmt_num(pdam(&r.belief))];
        cells.extend(columns.iter().map(|c| fmt_num(voi_value(r, c))));
        cells.extend(extra.iter().map(|(_, v)| fmt_num(v[i])));
        csv.push(&cells);
    }
    csv.render()
}

/// Thresholds and long-run averages of an analysis.
pub fn analysis_summary(analysis: &RegulationAnalysis, curve: &VoiCurve) -> Result<String> {
    let e = analysis.expected_stationary(curve)?;
    let mut pairs = vec![("chi_a", analysis.chi_a.chi)];
    if analysis.setting.mode == SettingMode::Flexible {
        pairs.push(("chi_b", analysis.chi_b.chi));
    }
    pairs.extend([("E_VoI_CO", e.voi_co), ("E_dV", e.delta_v), ("E_VoI_F", e.voi_f)]);
    let mut out = summary_lines(&pairs);
    for (name, t) in [("chi_a", &analysis.chi_a), ("chi_b", &analysis.chi_b)] {
        if let Some(w) = &t.warning {
            let _ = writeln!(out, "warning ({name}): {w}");
        }
    }
    Ok(out)
}

fn voi(a: &VoiArgs, dry: bool) -> Result<()> {
    let files = ["voi.csv", "voi_summary.txt"].map(String::from);
    let mut job = Job::new("voi", a, source_inputs(&a.source, &a.grid), &a.out.out, &files);
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = load_model(&a.source)?;
    let grid = load_grid(&a.grid, &model)?;
    let analysis = RegulationAnalysis::from_model(model, grid, a.setting.into(), a.solver.params())?;
    let curve = analysis.curve();
    job.add("voi.csv", curve_csv(&curve, assumption_columns(a.assumption), &[]));
    report(&mut job, "voi_summary.txt", analysis_summary(&analysis, &curve)?);
    job.finish()
}

fn stationary(a: &StationaryArgs, dry: bool) -> Result<()> {
    let files = ["stationary.csv", "stationary_summary.txt"].map(String::from);
    let mut job = Job::new("stationary", a, source_inputs(&a.source, &a.grid), &a.out.out, &files);
    if job.dry_run(dry) {
        return Ok(());
    }
    let model = load_model(&a.source)?;
    let grid = load_grid(&a.grid, &model)?;
    let society = model.costs(CostKind::Society);
    let sol = solve_optimal(&model, society, &grid, ObsMode::Background, a.solver.params())?;
    let ctrl = Controller::from_grid_policy(&model, &grid, &sol.policy, ObsMode::Background)?;
    let chain = build_joint_chain(&model, &ctrl, society)?;
    let st = stationary_distribution(&chain)?;
    let fixed_point: f64 = chain
        .apply_transpose(&st.probs)
        .iter()
        .zip(&st.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();

    let weights = st.inner_marginal();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|i, j| pdam(grid.get(*i)).total_cmp(&pdam(grid.get(*j))));
    let mut csv = Csv::new(&["belief", "p_dam", "weight", "cdf"]);
    let mut acc = 0.0;
    for i in order {
        acc += weights[i];
        csv.push(&[(i + 1).to_string(), fmt_num(pdam(grid.get(i))), fmt_num(weights[i]), fmt_num(acc)]);
    }
    let mut summary = format!("iterations = {}\nergodic = {}\n", st.iterations, st.ergodic);
    summary += &summary_lines(&[("power_iteration_change", st.residual), ("fixed_point_residual", fixed_point)]);
    summary += &threshold_lines(&model, &grid, &sol.policy, "chi");

    job.add("stationary.csv", csv.render());
    report(&mut job, "stationary_summary.txt", summary);
    job.finish()
}

/// Long-format curves and one summary row per parameter value. Failed
/// values keep their row with status `failed`; the first error is returned
/// after both tables are built.
pub fn sweep_tables(parameter: &str, results: SweepResult) -> (String, String, Option<Error>) {
    let mut header = vec![parameter, "belief", "p_dam"];
    header.extend(ALL_COLUMNS);
    let mut curves = Csv::new(&header);

    let mut summary_header: Vec<String> = [parameter, "status", "L_R", "chi", "E_VoI_CO", "E_dV", "E_VoI_F"]
        .map(String::from)
        .to_vec();
    for q in PROBES {
        for c in ["VoI_CP", "VoI_CO", "VoI_F"] {
            summary_header.push(format!("{c}_at_{q}"));
        }
    }
    summary_header.extend(["below_chi_p_dam", "below_chi_VoI_CP", "below_chi_VoI_CO", "below_chi_VoI_F"].map(String::from));
    let width = summary_header.len();
    let mut summary = Csv::new(&summary_header);

    let mut first_err = None;
    for (value, result) in results {
        match result {
            Ok(point) => {
                for (i, r) in point.curve.rows.iter().enumerate() {
                    let mut cells = vec![fmt_num(value), (i + 1).to_string(), fmt_num(pdam(&r.belief))];
                    cells.extend(ALL_COLUMNS.iter().map(|c| fmt_num(voi_value(r, c))));
                    curves.push(&cells);
                }
                let s = &point.summary;
                let mut cells = vec![fmt_num(value), "ok".to_string()];
                let mut nums = vec![s.repair_cost_society, s.chi, s.expected.voi_co, s.expected.delta_v, s.expected.voi_f];
                for r in &s.probes {
                    nums.extend([r.voi_cp, r.voi_co, r.voi_f]);
                }
                match &s.below_chi {
                    Some(r) => nums.extend([pdam(&r.belief), r.voi_cp, r.voi_co, r.voi_f]),
                    None => nums.extend([f64::NAN; 4]),
                }
                cells.extend(nums.into_iter().map(fmt_num));
                summary.push(&cells);
            }
            Err(e) => {
                eprintln!("{parameter} = {value}: {e}");
                let mut cells = vec![fmt_num(value), "failed".to_string()];
                cells.resize(width, fmt_num(f64::NAN));
                summary.push(&cells);
                first_err.get_or_insert(e);
            }
        }
    }
    (curves.render(), summary.render(), first_err)
}

fn sweep(a: &SweepArgs, dry: bool) -> Result<()> {
    let files = ["sweep_curves.csv", "sweep_summary.csv"].map(String::from);
    let mut job = Job::new("sweep", a, inputs(&[&a.scenario.scenario]), &a.out.out, &files);
    if job.dry_run(dry) {
        return Ok(());
    }
    let spec = scenario_spec(a.scenario.scenario.as_deref(), a.scenario.sigma)?;
    let config = analysis_config(&a.grid, &a.solver);
    let results = scenarios::sweep(a.parameter.into(), &a.values, &spec, &config)?;
    let name = serde_json::to_value(a.parameter).expect("parameter serialises");
    let (curves, summary, err) = sweep_tables(name.as_str().unwrap_or("value"), results);
    job.add("sweep_curves.csv", curves);
    job.add("sweep_summary.csv", summary);
    job.finish()?;
    err.map_or(Ok(()), Err)
}

fn rerun(a: &RerunArgs, dry: bool) -> Result<()> {
    let manifest: RunManifest = serde_json::from_str(&read(&a.manifest)?).map_err(|e| in_file(&a.manifest, e.into()))?;
    if manifest.tool_version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, this is {}",
            manifest.tool_version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let mut params = manifest.parameters;
    if let (Some(out), Some(obj)) = (&a.out, params.as_object_mut()) {
        obj.insert("out".into(), serde_json::json!(out));
    }
    let parse = |e: serde_json::Error| in_file(&a.manifest, e.into());
    let command = match manifest.command.as_str() {
        "validate" => Command::Validate(serde_json::from_value(params).map_err(parse)?),
        "export-model" => Command::ExportModel(serde_json::from_value(params).map_err(parse)?),
        "solve" => Command::Solve(serde_json::from_value(params).map_err(parse)?),
        "evaluate" => Command::Evaluate(serde_json::from_value(params).map_err(parse)?),
        "voi" => Command::Voi(serde_json::from_value(params).map_err(parse)?),
        "stationary" => Command::Stationary(serde_json::from_value(params).map_err(parse)?),
        "sweep" => Command::Sweep(serde_json::from_value(params).map_err(parse)?),
        "reproduce" => Command::Reproduce(serde_json::from_value(params).map_err(parse)?),
        other => {
            return Err(Error::Parse(format!(
                "{}: unknown command {other:?}",
                a.manifest.display()
            )))
        }
    };
    run(command, dry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_horizon_makes_the_tail_negligible() {
        let k = default_steps(0.95);
        assert!(0.95f64.powi(k as i32) <= 1e-6);
        assert!(0.95f64.powi(k as i32 - 1) > 1e-6);
    }

    #[test]
    fn assumption_columns_are_a_subset_in_order() {
        for a in [AssumptionArg::Pessimistic, AssumptionArg::Optimistic, AssumptionArg::Flow] {
            let cols = assumption_columns(a);
            let pos: Vec<usize> = cols.iter().map(|c| ALL_COLUMNS.iter().position(|x| x == c).unwrap()).collect();
            assert!(pos.windows(2).all(|w| w[0] < w[1]), "{a:?}");
        }
        assert_eq!(assumption_columns(AssumptionArg::All), &ALL_COLUMNS);
    }

    #[test]
    fn explicit_grid_must_match_the_model() {
        let dir = std::env::temp_dir().join(format!("pomdp-voi-grid-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("beliefs.json");
        std::fs::write(&file, "[[0.5, 0.5]]").unwrap();
        let model = DeteriorationSpec::default().build().unwrap();
        let opts = GridOpts {
            segment: SegmentGridOpts { grid: 11, min_pdam: 1e-3 },
            beliefs: Some(file.clone()),
        };
        assert!(matches!(load_grid(&opts, &model), Err(Error::Parameter(_))));
        std::fs::write(&file, "[[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]").unwrap();
        assert_eq!(load_grid(&opts, &model).unwrap().len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
