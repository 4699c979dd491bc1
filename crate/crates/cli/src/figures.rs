//! Plot data behind each figure of the deterioration study, all on the
//! built-in example.

use pomdp_voi::io::{fmt_num, summary_lines, Csv};
use pomdp_voi::pbvi::{solve_optimal, Solution};
use pomdp_voi::scenarios::{
    self, AnalysisConfig, DeteriorationSpec, RegulationAnalysis, SettingMode, SweepParameter,
};
use pomdp_voi::voi::{voi_curve, VoiCurve, VoiInputs};
use pomdp_voi::{BeliefGrid, CostKind, ObsMode, PomdpModel, Result};

use crate::args::{FigureArg, ReproduceArgs};
use crate::commands::{analysis_config, analysis_summary, curve_csv, pdam, sweep_tables, voi_value, ALL_COLUMNS};
use crate::job::Job;

const FIGURES: [FigureArg; 8] = [
    FigureArg::Fig4,
    FigureArg::Fig5,
    FigureArg::Fig6,
    FigureArg::Fig7,
    FigureArg::Fig8,
    FigureArg::Fig9,
    FigureArg::Fig10,
    FigureArg::Fig11,
];

const SIGMAS: [f64; 4] = [0.3, 0.75, 1.5, 3.0];
const RATES: [f64; 4] = [0.02, 0.04, 0.08, 0.16];
const THRESHOLDS: [f64; 6] = [0.25, 0.30, 0.35, 0.40, 0.45, 0.50];

fn name(f: FigureArg) -> &'static str {
    match f {
        FigureArg::Fig4 => "fig4",
        FigureArg::Fig5 => "fig5",
        FigureArg::Fig6 => "fig6",
        FigureArg::Fig7 => "fig7",
        FigureArg::Fig8 => "fig8",
        FigureArg::Fig9 => "fig9",
        FigureArg::Fig10 => "fig10",
        FigureArg::Fig11 => "fig11",
        FigureArg::All => "all",
    }
}

fn files(f: FigureArg) -> Vec<String> {
    let n = name(f);
    match f {
        FigureArg::Fig9 | FigureArg::Fig10 | FigureArg::Fig11 => {
            vec![format!("{n}_curves.csv"), format!("{n}_summary.csv"), format!("{n}_summary.txt")]
        }
        _ => vec![format!("{n}.csv"), format!("{n}_summary.txt")],
    }
}

/// Optimal plans for one cost table, without and with the additional
/// observation.
struct Optimal {
    background: Solution,
    joint: Solution,
}

impl Optimal {
    fn solve(model: &PomdpModel, grid: &BeliefGrid, config: &AnalysisConfig, kind: CostKind) -> Result<Self> {
        let costs = model.costs(kind);
        Ok(Optimal {
            background: solve_optimal(model, costs, grid, ObsMode::Background, config.solver)?,
            joint: solve_optimal(model, costs, grid, ObsMode::Joint, config.solver)?,
        })
    }
}

/// Solves reused across figures when several are requested together.
struct Shared {
    config: AnalysisConfig,
    model: PomdpModel,
    grid: BeliefGrid,
    fixed: Option<RegulationAnalysis>,
    agent: Option<Optimal>,
    society: Option<Optimal>,
}

impl Shared {
    fn new(config: AnalysisConfig) -> Result<Self> {
        Ok(Shared {
            model: DeteriorationSpec::default().build()?,
            grid: config.grid()?,
            config,
            fixed: None,
            agent: None,
            society: None,
        })
    }

    fn fixed(&mut self) -> Result<&RegulationAnalysis> {
        if self.fixed.is_none() {
            self.fixed = Some(RegulationAnalysis::run(&DeteriorationSpec::default(), SettingMode::Fixed, &self.config)?);
        }
        Ok(self.fixed.as_ref().expect("just set"))
    }

    fn optimal(&mut self, kind: CostKind) -> Result<&Optimal> {
        let slot = match kind {
            CostKind::Agent => &mut self.agent,
            CostKind::Society => &mut self.society,
        };
        if slot.is_none() {
            *slot = Some(Optimal::solve(&self.model, &self.grid, &self.config, kind)?);
        }
        Ok(slot.as_ref().expect("just set"))
    }
}

pub fn reproduce(a: &ReproduceArgs, dry: bool) -> Result<()> {
    let figures: Vec<FigureArg> = match a.figure {
        FigureArg::All => FIGURES.to_vec(),
        f => vec![f],
    };
    let jobs: Vec<(FigureArg, Job)> = figures
        .iter()
        .map(|f| {
            let params = ReproduceArgs { figure: *f, ..a.clone() };
            let job = Job::new("reproduce", &params, Vec::new(), &a.out.out, &files(*f))
                .with_stem(&format!("reproduce-{}", name(*f)));
            (*f, job)
        })
        .collect();
    if dry {
        for (_, job) in &jobs {
            job.dry_run(true);
        }
        return Ok(());
    }
    let mut shared = Shared::new(analysis_config(&a.grid, &a.solver))?;
    for (f, mut job) in jobs {
        println!("[{}]", name(f));
        figure(f, &mut shared, &mut job)?;
        job.finish()?;
    }
    Ok(())
}

fn report(job: &mut Job, name: &str, text: String) {
    print!("{text}");
    job.add(name, text);
}

/// `P[P_DAM <= p_dam(b)]` at every grid belief under the long-run weights.
fn cdf_at_grid(grid: &BeliefGrid, weights: &[f64]) -> Vec<f64> {
    let p: Vec<f64> = grid.beliefs().iter().map(pdam).collect();
    p.iter()
        .map(|q| p.iter().zip(weights).filter(|(x, _)| *x <= q).map(|(_, w)| w).sum())
        .collect()
}

fn regulation_figure(analysis: &RegulationAnalysis, columns: &[&str], job: &mut Job, n: &str) -> Result<()> {
    let curve = analysis.curve();
    let cdf = cdf_at_grid(&analysis.grid, &analysis.stationary.inner_marginal());
    let mut summary = analysis_summary(analysis, &curve)?;
    if let Some(r) = curve
        .rows
        .iter()
        .filter(|r| r.belief.get(2) == 0.0 && pdam(&r.belief) < analysis.chi_a.chi)
        .last()
    {
        summary += &summary_lines(&[("below_chi_p_dam", pdam(&r.belief)), ("below_chi_VoI_CP", r.voi_cp)]);
    }
    job.add(&format!("{n}.csv"), curve_csv(&curve, columns, &[("pinf_cdf", cdf)]));
    report(job, &format!("{n}_summary.txt"), summary);
    Ok(())
}

fn optimal_voi(model: &PomdpModel, grid: &BeliefGrid, opt: &Optimal, kind: CostKind) -> VoiCurve {
    let inputs = VoiInputs {
        costs: model.costs(kind),
        policy_a: &opt.background.set,
        value_a: &opt.background.set,
        value_b: &opt.joint.set,
        same_policy: false,
    };
    voi_curve(model, &inputs, grid.beliefs())
}

fn sweep_figure(
    parameter: SweepParameter,
    label: &str,
    values: &[f64],
    shared: &Shared,
    job: &mut Job,
    n: &str,
) -> Result<String> {
    let results = scenarios::sweep(parameter, values, &DeteriorationSpec::default(), &shared.config)?;
    let chis: Vec<f64> = results
        .iter()
        .map(|(_, r)| r.as_ref().map_or(f64::NAN, |p| p.summary.chi))
        .collect();
    let (curves, summary, err) = sweep_tables(label, results);
    job.add(&format!("{n}_curves.csv"), curves);
    job.add(&format!("{n}_summary.csv"), summary);
    if let Some(e) = err {
        return Err(e);
    }
    let mut text = String::new();
    for (v, chi) in values.iter().zip(chis) {
        text += &format!("chi at {label} = {v}: {}\n", fmt_num(chi));
    }
    Ok(text)
}

fn figure(f: FigureArg, shared: &mut Shared, job: &mut Job) -> Result<()> {
    let n = name(f);
    let fig4_columns = ["V_Y", "U_Y", "V_W", "U_W", "VoI_CP", "VoI_CO", "VoI_F"];
    match f {
        FigureArg::Fig4 => {
            let analysis = shared.fixed()?;
            regulation_figure(analysis, &fig4_columns, job, n)?;
        }
        FigureArg::Fig5 => {
            let grid = shared.grid.clone();
            let agent_y = shared.optimal(CostKind::Agent)?.background.clone();
            let agent_w = shared.optimal(CostKind::Agent)?.joint.clone();
            let society = shared.optimal(CostKind::Society)?;
            let mut header = vec!["belief".to_string(), "p_dam".to_string()];
            for role in ["agent", "society"] {
                header.extend(["V_Y", "V_W", "action_Y", "action_W"].map(|c| format!("{role}_{c}")));
            }
            let mut csv = Csv::new(&header);
            for (i, b) in grid.beliefs().iter().enumerate() {
                let mut cells = vec![(i + 1).to_string(), fmt_num(pdam(b))];
                for (y, w) in [(&agent_y, &agent_w), (&society.background, &society.joint)] {
                    cells.extend([
                        fmt_num(y.values[i]),
                        fmt_num(w.values[i]),
                        (y.policy[i] + 1).to_string(),
                        (w.policy[i] + 1).to_string(),
                    ]);
                }
                csv.push(&cells);
            }
            let chi = |s: &Solution| scenarios::threshold(&grid, &s.policy).chi;
            let summary = summary_lines(&[
                ("chi_agent_Y", chi(&agent_y)),
                ("chi_agent_W", chi(&agent_w)),
                ("chi_society_Y", chi(&society.background)),
                ("chi_society_W", chi(&society.joint)),
            ]);
            job.add(&format!("{n}.csv"), csv.render());
            report(job, &format!("{n}_summary.txt"), summary);
        }
        FigureArg::Fig6 => {
            let grid = shared.grid.clone();
            let model = shared.model.clone();
            let agent = optimal_voi(&model, &grid, shared.optimal(CostKind::Agent)?, CostKind::Agent);
            let society = optimal_voi(&model, &grid, shared.optimal(CostKind::Society)?, CostKind::Society);
            let cols = &fig4_columns;
            let mut header = vec!["belief".to_string(), "p_dam".to_string()];
            for role in ["agent", "society"] {
                header.extend(cols.iter().map(|c| format!("{role}_{c}")));
            }
            let mut csv = Csv::new(&header);
            for (i, (ra, rs)) in agent.rows.iter().zip(&society.rows).enumerate() {
                let mut cells = vec![(i + 1).to_string(), fmt_num(pdam(&ra.belief))];
                cells.extend(cols.iter().map(|c| fmt_num(voi_value(ra, c))));
                cells.extend(cols.iter().map(|c| fmt_num(voi_value(rs, c))));
                csv.push(&cells);
            }
            let min = |c: &VoiCurve, col: &str| c.rows.iter().map(|r| voi_value(r, col)).fold(f64::INFINITY, f64::min);
            let summary = summary_lines(&[
                ("min_agent_VoI_CP", min(&agent, "VoI_CP")),
                ("min_agent_VoI_CO", min(&agent, "VoI_CO")),
                ("min_agent_VoI_F", min(&agent, "VoI_F")),
                ("min_society_VoI_CP", min(&society, "VoI_CP")),
                ("min_society_VoI_CO", min(&society, "VoI_CO")),
                ("min_society_VoI_F", min(&society, "VoI_F")),
            ]);
            job.add(&format!("{n}.csv"), csv.render());
            report(job, &format!("{n}_summary.txt"), summary);
        }
        FigureArg::Fig7 | FigureArg::Fig8 => {
            let sigma = if f == FigureArg::Fig7 { 3.0 } else { 1.0 };
            let spec = DeteriorationSpec { sigma, ..Default::default() };
            let analysis = RegulationAnalysis::run(&spec, SettingMode::Flexible, &shared.config)?;
            regulation_figure(&analysis, &ALL_COLUMNS, job, n)?;
        }
        FigureArg::Fig9 => {
            let text = sweep_figure(SweepParameter::Sigma, "sigma", &SIGMAS, shared, job, n)?;
            report(job, &format!("{n}_summary.txt"), text);
        }
        FigureArg::Fig10 => {
            let text = sweep_figure(SweepParameter::P12, "p12", &RATES, shared, job, n)?;
            report(job, &format!("{n}_summary.txt"), text);
        }
        FigureArg::Fig11 => {
            let mut text = sweep_figure(SweepParameter::RepairThreshold, "repair_threshold", &THRESHOLDS, shared, job, n)?;
            // thresholds of the unconstrained agent, for reference lines
            let grid = shared.grid.clone();
            let agent = shared.optimal(CostKind::Agent)?;
            text += &summary_lines(&[
                ("chi_agent_Y", scenarios::threshold(&grid, &agent.background.policy).chi),
                ("chi_agent_W", scenarios::threshold(&grid, &agent.joint.policy).chi),
            ]);
            report(job, &format!("{n}_summary.txt"), text);
        }
        FigureArg::All => unreachable!("expanded by the caller"),
    }
    Ok(())
}
