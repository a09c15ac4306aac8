//! One function per subcommand: resolve defaults, compute, tabulate.
//!
//! Column layouts are part of the output contract; see the README.

use std::f64::consts::PI;

use serde_json::json;
use spinclone::circuits::{compare, crossover, pcc_circuit};
use spinclone::cloner::{
    clone_fidelity, closed_form_fidelity, earliest_threshold_time, haar_inputs, optimal_parameters, optimal_pcc_bound,
    optimize, qudit_clone_fidelity, qudit_optimal_parameters, qudit_optimum_formula, spiral_inputs, tetrahedron_search,
    time_to_threshold, universal_clone, universal_time_optimum, BlankPolicy, CloneTask, Model, QuditMode, ScanGrid,
};
use spinclone::disorder::{classical_noise_curve, disorder_ensemble, DisorderSpec, NoiseTarget};
use spinclone::josephson::{josephson_fidelity_scan, JosephsonScanOptions};
use spinclone::redfield::RedfieldOptions;
use spinclone::{BathSpec, BlochInput, Error, Topology};

use crate::config::{ModelArg, NoiseTargetArg, Params, QuditModeArg, RunConfig, Subcommand, TopologyArg};
use crate::output::Table;
use crate::CliError;

type Res = Result<Table, CliError>;

pub fn run(config: &RunConfig) -> Res {
    let p = &config.params;
    match config.subcommand {
        Subcommand::Pcc => pcc(p),
        Subcommand::Nm => nm(p),
        Subcommand::ThetaSweep => theta_sweep(p),
        Subcommand::MSweep => m_sweep(p),
        Subcommand::Disorder => disorder(p, seed(config)?),
        Subcommand::ClassicalNoise => classical_noise(p, seed(config)?),
        Subcommand::RedfieldCompare => redfield_compare(p),
        Subcommand::Universal => universal(p, config.seed),
        Subcommand::Qudit => qudit(p),
        Subcommand::Tetrahedron => tetrahedron(p, seed(config)?),
        Subcommand::Josephson => josephson(p),
    }
}

fn seed(config: &RunConfig) -> Result<u64, CliError> {
    config.seed.ok_or_else(|| CliError::Config(format!("`{}` is stochastic and needs --seed", config.subcommand)))
}

fn model(p: &Params) -> Model {
    match p.model.unwrap_or(ModelArg::Xy) {
        ModelArg::Xy => Model::Xy,
        ModelArg::Heisenberg => Model::Heisenberg,
    }
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Xy => "xy",
        Model::Heisenberg => "heisenberg",
    }
}

fn single_m(p: &Params, default: usize) -> Result<usize, CliError> {
    match p.m.as_deref() {
        None => Ok(default),
        Some([m]) => Ok(*m),
        Some(v) => Err(CliError::Config(format!("expected a single M, got {v:?}"))),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn topology(p: &Params) -> Result<Topology, CliError> {
    let m = single_m(p, 2)?;
    Ok(match p.topology.unwrap_or(TopologyArg::Star) {
        TopologyArg::Star => Topology::Star { m },
        TopologyArg::Tree => Topology::Tree {
            k: p.k.ok_or_else(|| CliError::Config("tree topology needs k".into()))?,
            j: p.j.ok_or_else(|| CliError::Config("tree topology needs j".into()))?,
        },
        TopologyArg::BipartiteStar => Topology::BipartiteStar { n: p.n.unwrap_or(1), m },
        TopologyArg::Tetrahedron => Topology::Tetrahedron,
        TopologyArg::Complete => Topology::Complete { n: m + 1 },
    })
}

fn topology_name(t: &Topology) -> String {
    match t {
        Topology::Star { m } => format!("star(M={m})"),
        Topology::Tree { k, j } => format!("tree(k={k},j={j})"),
        Topology::BipartiteStar { n, m } => format!("bipartite_star(N={n},M={m})"),
        Topology::Tetrahedron => "tetrahedron".into(),
        Topology::Complete { n } => format!("complete(n={n})"),
        Topology::Custom { n_sites, .. } => format!("custom(n={n_sites})"),
    }
}

/// `1 -> M` (or `N -> M` on a bipartite star) field/time optimization.
fn pcc(p: &Params) -> Res {
    let topo = topology(p)?;
    let model = model(p);
    let lambda = p.lambda.unwrap_or(model.lambda());
    let theta = p.theta.unwrap_or(PI / 2.0);
    let phi = p.phi.unwrap_or(0.0);
    let t_max = p.t_max_over_j.unwrap_or(20.0);
    let grid = ScanGrid::log_spaced(
        p.b_min_over_j.unwrap_or(0.01),
        p.b_max_over_j.unwrap_or(10.0),
        p.n_b.unwrap_or(60),
        p.t_step_over_j.unwrap_or(0.05),
        t_max,
    )?;
    let task = CloneTask::new(topo.clone(), lambda, BlochInput::new(theta, phi)?);
    let r = optimize(&task, &grid, 1e-12)?;
    let t_c = match p.threshold_delta {
        Some(delta) => Some(time_to_threshold(
            &task,
            r.b_star,
            delta,
            r.mean_fidelity,
            p.threshold_t_step_over_j.unwrap_or(0.01),
            p.threshold_t_max_over_j.unwrap_or(t_max),
        )?),
        None => None,
    };
    let bound = optimal_pcc_bound(r.n_sources, r.n_blanks, 2).ok();
    let site_min = r.per_site_fidelity.iter().copied().fold(f64::INFINITY, f64::min);
    let site_max = r.per_site_fidelity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let resolved = json!({ "topology": topo, "lambda": lambda, "theta": theta, "phi": phi, "grid": grid,
        "threshold_delta": p.threshold_delta });
    let mut t = Table::new(
        &["topology", "N", "M", "lambda", "theta", "phi", "F", "B", "t", "F_site_min", "F_site_max", "t_c", "F_bound"],
        resolved,
    );
    t.push(vec![
        topology_name(&topo).into(),
        r.n_sources.into(),
        r.n_blanks.into(),
        lambda.into(),
        theta.into(),
        phi.into(),
        r.mean_fidelity.into(),
        r.b_star.into(),
        r.t_star.into(),
        site_min.into(),
        site_max.into(),
        t_c.into(),
        bound.into(),
    ]);
    Ok(t)
}

/// `N -> M` maximization on the bipartite star, with the threshold time.
/// The trailing columns restate the optimum in the units of the published
/// table (`J t / 4`, and `J / B` for a field twice as large).
fn nm(p: &Params) -> Res {
    let n = p.n.unwrap_or(2);
    let m = single_m(p, 3)?;
    let model = model(p);
    let lambda = p.lambda.unwrap_or(model.lambda());
    let grid = ScanGrid::log_spaced(
        p.b_min_over_j.unwrap_or(0.005),
        p.b_max_over_j.unwrap_or(5.0),
        p.n_b.unwrap_or(60),
        p.t_step_over_j.unwrap_or(0.05),
        p.t_max_over_j.unwrap_or(20000.0),
    )?;
    let delta = p.threshold_delta.unwrap_or(1e-2);
    let (th_step, th_max) = (p.threshold_t_step_over_j.unwrap_or(0.01), p.threshold_t_max_over_j.unwrap_or(200.0));
    let task = CloneTask::new(Topology::BipartiteStar { n, m }, lambda, BlochInput::equatorial(0.0));
    let r = optimize(&task, &grid, 1e-12)?;
    let (t_c, b_c) = earliest_threshold_time(&task, &grid.b_values, delta, r.mean_fidelity, th_step, th_max)?;
    let bound = optimal_pcc_bound(n, m, 2).ok();
    let resolved = json!({ "N": n, "M": m, "lambda": lambda, "grid": grid, "threshold_delta": delta,
        "threshold_t_step_over_J": th_step, "threshold_t_max_over_J": th_max });
    let mut t = Table::new(
        &["N", "M", "lambda", "F_abs", "B", "t", "delta", "t_c", "B_c", "F_bound", "Jt_table", "J_over_B_table", "Jt_c_table"],
        resolved,
    );
    t.push(vec![
        n.into(),
        m.into(),
        lambda.into(),
        r.mean_fidelity.into(),
        r.b_star.into(),
        r.t_star.into(),
        delta.into(),
        t_c.into(),
        b_c.into(),
        bound.into(),
        (r.t_star / 4.0).into(),
        (1.0 / (2.0 * r.b_star)).into(),
        (t_c / 4.0).into(),
    ]);
    Ok(t)
}

/// Fidelity against input polar angle for both models at their star optima.
/// Blanks start in `|0>` for every angle.
fn theta_sweep(p: &Params) -> Res {
    let m = single_m(p, 2)?;
    let n_theta = p.n_theta.unwrap_or(100);
    require(n_theta >= 2, || "n_theta must be at least 2".into())?;
    let thetas: Vec<f64> = (0..n_theta).map(|k| (PI * k as f64 / (n_theta - 1) as f64).min(PI)).collect();
    let mut t = Table::new(
        &["model", "M", "theta", "B", "t", "F_sim", "F_closed"],
        json!({ "M": m, "theta": thetas, "blank_policy": "zero" }),
    );
    for model in [Model::Xy, Model::Heisenberg] {
        let (b, time) = optimal_parameters(model, m);
        let rows = spinclone::par::map(&thetas, |&theta| -> Result<f64, Error> {
            let task = CloneTask::new(Topology::Star { m }, model.lambda(), BlochInput::new(theta, 0.0)?)
                .with_blank_policy(BlankPolicy::Zero);
            Ok(clone_fidelity(&task, b, time)?.mean)
        });
        for (&theta, f) in thetas.iter().zip(rows) {
            let f = f?;
            t.push(vec![
                model_name(model).into(),
                m.into(),
                theta.into(),
                b.into(),
                time.into(),
                f.into(),
                closed_form_fidelity(model, m, theta).into(),
            ]);
        }
    }
    Ok(t)
}

/// Equatorial fidelity against the number of clones. `F_scan` is the
/// field/time optimum found by search (XY only).
fn m_sweep(p: &Params) -> Res {
    let ms: Vec<usize> = p.m.clone().unwrap_or_else(|| (2..=10).collect());
    require(!ms.is_empty() && ms.iter().all(|&m| m >= 1), || "M values must be >= 1".into())?;
    let t_max = p.t_max_over_j.unwrap_or(20.0);
    let mut t = Table::new(
        &["model", "M", "B", "t", "F_sim", "F_closed", "F_scan", "F_bound"],
        json!({ "M": ms, "t_max_over_J": t_max }),
    );
    for model in [Model::Xy, Model::Heisenberg] {
        let rows = spinclone::par::map(&ms, |&m| -> Result<(f64, f64, f64, Option<f64>), Error> {
            let (b, time) = optimal_parameters(model, m);
            let task = CloneTask::equatorial(Topology::Star { m }, model.lambda());
            let f = clone_fidelity(&task, b, time)?.mean;
            let scan = match model {
                Model::Xy => Some(optimize(&task, &ScanGrid::standard(t_max)?, 1e-12)?.mean_fidelity),
                Model::Heisenberg => None,
            };
            Ok((b, time, f, scan))
        });
        for (&m, r) in ms.iter().zip(rows) {
            let (b, time, f, scan) = r?;
            t.push(vec![
                model_name(model).into(),
                m.into(),
                b.into(),
                time.into(),
                f.into(),
                closed_form_fidelity(model, m, PI / 2.0).into(),
                scan.into(),
                optimal_pcc_bound(1, m, 2).ok().into(),
            ]);
        }
    }
    Ok(t)
}

/// XY star optimum, or the fixed `(B, t)` when both are given.
fn operating_point(p: &Params, m: usize) -> (f64, f64) {
    let (b, t) = optimal_parameters(Model::Xy, m);
    (p.b_over_j.unwrap_or(b), p.t_over_j.unwrap_or(t))
}

fn disorder(p: &Params, seed: u64) -> Res {
    let ms = p.m.clone().unwrap_or_else(|| vec![2, 3]);
    let eps = p.epsilon.clone().unwrap_or_else(|| vec![0.1]);
    let mus = p.mu.clone().unwrap_or_else(|| vec![0.0, 0.5]);
    let n = p.n_realizations.unwrap_or(1000);
    let mut t = Table::new(
        &["M", "epsilon", "mu", "n", "F_ideal", "mean_F", "stderr", "seed"],
        json!({ "M": ms, "epsilon": eps, "mu": mus, "n_realizations": n }),
    );
    for &m in &ms {
        let (b, time) = operating_point(p, m);
        let task = CloneTask::equatorial(Topology::Star { m }, 0.0);
        let ideal = clone_fidelity(&task, b, time)?.mean;
        for &e in &eps {
            for &mu in &mus {
                let r = disorder_ensemble(&task, b, time, &DisorderSpec::new(e, mu, n, seed)?)?;
                t.push(vec![
                    m.into(),
                    e.into(),
                    mu.into(),
                    n.into(),
                    ideal.into(),
                    r.mean.into(),
                    r.stderr.into(),
                    seed.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn classical_noise(p: &Params, seed: u64) -> Res {
    let m = single_m(p, 2)?;
    let deltas = p.delta_over_j.clone().unwrap_or_else(|| (0..=20).map(|i| 0.1 * i as f64).collect());
    let n = p.n_samples.unwrap_or(10_000);
    let targets = match p.target.unwrap_or(NoiseTargetArg::Both) {
        NoiseTargetArg::J => vec![NoiseTarget::J],
        NoiseTargetArg::B => vec![NoiseTarget::B],
        NoiseTargetArg::Both => vec![NoiseTarget::J, NoiseTarget::B],
    };
    let (b, time) = operating_point(p, m);
    let task = CloneTask::equatorial(Topology::Star { m }, 0.0);
    let mut t = Table::new(
        &["target", "M", "delta", "n", "mean_F", "stderr", "seed"],
        json!({ "M": m, "delta_over_J": deltas, "n_samples": n, "B_over_J": b, "t_over_J": time }),
    );
    for target in targets {
        let name = match target {
            NoiseTarget::J => "J",
            NoiseTarget::B => "B",
        };
        for pt in classical_noise_curve(&task, b, time, target, &deltas, n, seed)? {
            t.push(vec![name.into(), m.into(), pt.delta.into(), n.into(), pt.mean.into(), pt.stderr.into(), seed.into()]);
        }
    }
    Ok(t)
}

fn redfield_compare(p: &Params) -> Res {
    let ms = p.m.clone().unwrap_or_else(|| vec![2, 3]);
    let alphas =
        p.alpha.clone().unwrap_or_else(|| (0..=12).map(|i| 1e-4 * 10f64.powf(i as f64 / 6.0)).collect::<Vec<_>>());
    let template = BathSpec::new(0.0, p.beta_times_j.unwrap_or(10.0), p.cutoff_over_j.unwrap_or(1e4))?;
    let options = RedfieldOptions { lamb_shift: p.lamb_shift.unwrap_or(false) };
    let tol = p.tol.unwrap_or(1e-8);
    require(tol > 0.0, || "tol must be positive".into())?;
    let mut t = Table::new(
        &["task", "M", "alpha", "beta", "cutoff", "F_network", "F_gates", "t_network", "t_gates", "iswaps"],
        json!({ "M": ms, "alpha": alphas, "bath": template, "lamb_shift": options.lamb_shift, "tol": tol }),
    );
    let mut crossings = serde_json::Map::new();
    for &m in &ms {
        let rows = match crossover(m, &alphas, &template, options, tol) {
            Ok(c) => {
                crossings.insert(
                    m.to_string(),
                    json!({ "alpha_star": c.alpha_star, "alpha_grid": c.alpha_grid, "bracket": c.bracket }),
                );
                c.rows
            }
            Err(Error::NoCrossover) => {
                crossings.insert(m.to_string(), serde_json::Value::Null);
                let mut sorted = alphas.clone();
                sorted.sort_by(f64::total_cmp);
                compare(m, &sorted, &template, options, tol)?
            }
            Err(e) => return Err(e.into()),
        };
        let iswaps = pcc_circuit(m)?.iswap_count();
        for r in rows {
            t.push(vec![
                format!("1->{m}").into(),
                m.into(),
                r.alpha.into(),
                template.inv_temperature.into(),
                template.cutoff.into(),
                r.f_network.into(),
                r.f_gates.into(),
                r.t_network.into(),
                r.t_gates.into(),
                iswaps.into(),
            ]);
        }
    }
    t.summary = json!({ "crossover": crossings });
    Ok(t)
}

/// Heisenberg three-spin family with a blank-blank coupling: best time per
/// coupling, then the input spread at the overall optimum. Inputs are
/// Haar-random when a seed is given and a deterministic spiral otherwise.
fn universal(p: &Params, seed: Option<u64>) -> Res {
    let couplings = p.j_bb.clone().unwrap_or_else(|| (0..=40).map(|i| -1.0 + 0.05 * i as f64).collect());
    require(!couplings.is_empty(), || "J_bb must not be empty".into())?;
    let t_max = p.t_max_over_j.unwrap_or(10.0);
    let t_step = p.t_step_over_j.unwrap_or(0.01);
    let n_inputs = p.n_inputs.unwrap_or(100);
    require(n_inputs > 0, || "n_inputs must be positive".into())?;
    let inputs = match seed {
        Some(s) => haar_inputs(n_inputs, s),
        None => spiral_inputs(n_inputs),
    };
    let best_t = spinclone::par::map(&couplings, |&j| universal_time_optimum(j, t_max, t_step))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let fmax = best_t.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    // Ties: earliest time (to within roundoff), then smallest |J_bb|.
    let ties: Vec<(f64, f64)> =
        couplings.iter().zip(&best_t).filter(|(_, r)| r.1 >= fmax - 1e-9).map(|(j, r)| (*j, r.0)).collect();
    let t_first = ties.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let (j_best, t_best) = ties
        .into_iter()
        .filter(|r| r.1 <= t_first + 1e-6 * t_first.max(1.0))
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)))
        .expect("non-empty coupling grid");
    let spread = universal_clone(t_best, &[j_best], &inputs)?;
    let mut t = Table::new(
        &["J_bb", "t", "F", "best"],
        json!({ "J_bb": couplings, "t_max_over_J": t_max, "t_step_over_J": t_step, "n_inputs": n_inputs,
            "inputs": if seed.is_some() { "haar" } else { "spiral" } }),
    );
    for (&j, &(time, f)) in couplings.iter().zip(&best_t) {
        t.push(vec![j.into(), time.into(), f.into(), if j == j_best { "1" } else { "0" }.into()]);
    }
    t.summary = json!({ "J_bb": j_best, "t": t_best, "F": spread.fidelity, "input_spread": spread.spread });
    Ok(t)
}

fn qudit(p: &Params) -> Res {
    let ds = p.d.clone().unwrap_or_else(|| vec![3]);
    let m = single_m(p, 2)?;
    let (delta0, t0) = qudit_optimal_parameters(m);
    let delta = p.big_delta_over_j.unwrap_or(delta0);
    let time = p.t_over_j.unwrap_or(t0);
    let modes = match p.mode.unwrap_or(QuditModeArg::Both) {
        QuditModeArg::Effective => vec![QuditMode::Effective],
        QuditModeArg::Full => vec![QuditMode::Full],
        QuditModeArg::Both => vec![QuditMode::Effective, QuditMode::Full],
    };
    let mut t = Table::new(
        &["d", "M", "mode", "Delta", "t", "F", "F_formula", "F_bound"],
        json!({ "d": ds, "M": m, "Delta_over_J": delta, "t_over_J": time }),
    );
    for &d in &ds {
        for &mode in &modes {
            let f = qudit_clone_fidelity(d, m, delta, time, mode)?;
            let name = match mode {
                QuditMode::Effective => "effective",
                QuditMode::Full => "full",
            };
            t.push(vec![
                d.into(),
                m.into(),
                name.into(),
                delta.into(),
                time.into(),
                f.into(),
                qudit_optimum_formula(d, m).into(),
                optimal_pcc_bound(1, m, d).ok().into(),
            ]);
        }
    }
    Ok(t)
}

fn tetrahedron(p: &Params, seed: u64) -> Res {
    let n_starts = p.n_starts.unwrap_or(16);
    let max_evals = p.max_evals.unwrap_or(6000);
    require(n_starts > 0, || "n_starts must be positive".into())?;
    let s = tetrahedron_search(n_starts, seed, max_evals)?;
    let mut t = Table::new(&["start", "F", "seed"], json!({ "n_starts": n_starts, "max_evals": max_evals }));
    for (i, &f) in s.per_start.iter().enumerate() {
        t.push(vec![i.into(), f.into(), seed.into()]);
    }
    t.summary = json!({ "F": s.fidelity, "best": s.best });
    Ok(t)
}

fn josephson(p: &Params) -> Res {
    let ratios = p.ratio.clone().unwrap_or_else(|| (0..=10).map(|i| 0.05 * i as f64).collect());
    let d = JosephsonScanOptions::default();
    let opts = JosephsonScanOptions {
        t_max: p.t_max_over_j.unwrap_or(d.t_max),
        t_step: p.t_step_over_j.unwrap_or(d.t_step),
        bias_min: p.bias_min_over_j.unwrap_or(d.bias_min),
        bias_max: p.bias_max_over_j.unwrap_or(d.bias_max),
        n_bias: p.n_bias.unwrap_or(d.n_bias),
    };
    let scan = josephson_fidelity_scan(&ratios, &opts)?;
    let mut t = Table::new(&["ratio", "F_max", "t_star", "bias_star"], json!({ "E_K_over_J_K": ratios, "options": opts }));
    for pt in scan.points {
        t.push(vec![pt.ratio.into(), pt.fidelity.into(), pt.t_star.into(), pt.bias_star.into()]);
    }
    Ok(t)
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::EmptyGrid(_)
            | Error::TooManySites(_)
            | Error::UnsupportedBound { .. }
            | Error::SiteOutOfRange { .. }
            | Error::RedfieldTooLarge(_)
            | Error::UnsupportedGate(_)
            | Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Cell;

    fn run_with(sub: Subcommand, params: Params, seed: Option<u64>) -> Res {
        run(&RunConfig { subcommand: sub, seed, output: None, params })
    }

    #[test]
    fn stochastic_commands_need_a_seed() {
        for sub in [Subcommand::Disorder, Subcommand::ClassicalNoise, Subcommand::Tetrahedron] {
            assert!(matches!(run_with(sub, Params::default(), None), Err(CliError::Config(_))));
        }
    }

    #[test]
    fn pcc_default_is_one_to_two() {
        let t = run_with(Subcommand::Pcc, Params::default(), None).unwrap();
        let Cell::Real(f) = t.rows[0][6] else { panic!() };
        assert!((f - (0.5 + 1.0 / 8f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn core_errors_map_to_exit_classes() {
        assert!(matches!(CliError::from(Error::EmptyGrid("x")), CliError::Config(_)));
        assert!(matches!(CliError::from(Error::NoCrossover), CliError::Numerical(_)));
        assert!(matches!(CliError::from(Error::StepSizeUnderflow { t_reached: 1.0 }), CliError::Numerical(_)));
    }

    #[test]
    fn oversized_full_qudit_is_a_config_error() {
        let p = Params { d: Some(vec![9]), mode: Some(QuditModeArg::Full), ..Params::default() };
        assert!(matches!(run_with(Subcommand::Qudit, p, None), Err(CliError::Config(_))));
    }
}
