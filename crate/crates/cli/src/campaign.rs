//! Campaign execution: each campaign is one output directory with a
//! manifest, machine-first CSV/JSON artifacts, and deterministic content for
//! a given config and master seed (wall-clock goes to the manifest only).

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use qudit_core::CMat;
use qudit_grape as grape;
use qudit_grape::{EvalContext, SearchOptions};
use qudit_povm as povm;
use qudit_qpt as qpt;
use qudit_qst as qst;
use qudit_sim as sim;

use crate::config::{config_hash, CampaignConfig, CampaignKind};

pub fn run_campaign(cfg: &CampaignConfig, root: &Path, gnuplot: bool) -> Result<()> {
    std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let hash = config_hash(cfg);
    let manifest = serde_json::json!({
        "config": cfg,
        "config_hash": hash,
        "started_unix_ms": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0),
    });
    std::fs::write(root.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;

    let csv_files = match &cfg.kind {
        CampaignKind::PovmAudit { constructions, verify_states } => {
            povm_audit(cfg, root, constructions, *verify_states)?
        }
        CampaignKind::RbStudy { etas, lengths, n_sequences } => {
            rb_study(cfg, root, etas, lengths, *n_sequences)?
        }
        CampaignKind::GrapeSweep { t_list_us, dt_list_us, n_targets, target_fidelity, n_starts, max_iters } => {
            grape_sweep(cfg, root, t_list_us, dt_list_us, *n_targets, *target_fidelity, *n_starts, *max_iters)?
        }
        CampaignKind::QstStudy { constructions, n_states, estimators, error_model, ensemble_draws } => {
            qst_study(cfg, root, constructions, *n_states, estimators, error_model, *ensemble_draws)?
        }
        CampaignKind::QstPartial { construction, n_states, estimators, error_model, ensemble_draws, epsilon } => {
            qst_partial(cfg, root, construction, *n_states, estimators, error_model, *ensemble_draws, *epsilon)?
        }
        CampaignKind::QptStudy { dim, n_processes, probe_counts, noisy, error_model } => {
            qpt_study(cfg, root, *dim, *n_processes, probe_counts, *noisy, error_model)?
        }
    };

    if gnuplot {
        let mut script = String::from("set datafile separator ','\nset key autotitle columnhead\n");
        for (i, f) in csv_files.iter().enumerate() {
            script.push_str(&format!(
                "set terminal pngcairo; set output 'plot_{i}.png'\nplot '{f}' using 0:2 with linespoints\n"
            ));
        }
        std::fs::write(root.join("plot.gp"), script)?;
    }
    eprintln!("campaign complete: {}", root.display());
    Ok(())
}

fn write_csv(root: &Path, name: &str, header: &str, rows: &[String]) -> Result<String> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(root.join(name), text)?;
    Ok(name.to_string())
}

fn povm_audit(
    cfg: &CampaignConfig,
    root: &Path,
    constructions: &[String],
    verify_states: usize,
) -> Result<Vec<String>> {
    let mut rows = Vec::new();
    for name in constructions {
        let c = povm::by_name(name).map_err(|e| anyhow!("{e}"))?;
        std::fs::write(root.join(format!("{name}.json")), c.to_json())?;
        let report = povm::verify_ic_class(&c, verify_states, cfg.master_seed)
            .map_err(|e| anyhow!("{e}"))?;
        rows.push(format!(
            "{},{},{},{},{:.3e},{},{},{:.3e},{}",
            name,
            c.dim,
            c.n_settings(),
            c.n_outcomes(),
            c.completeness_defect(),
            report.fic_rank,
            report.fully_ic,
            report.r1s_max_infidelity,
            report.r1_jacobian_rank_min,
        ));
        eprintln!("audited {name}");
    }
    Ok(vec![write_csv(
        root,
        "povm_audit.csv",
        "name,dim,settings,outcomes,completeness_defect,fic_rank,fully_ic,r1s_max_infidelity,r1_jacobian_rank_min",
        &rows,
    )?])
}

fn rb_study(
    cfg: &CampaignConfig,
    root: &Path,
    etas: &[f64],
    lengths: &[usize],
    n_sequences: usize,
) -> Result<Vec<String>> {
    let mut fit_rows = Vec::new();
    let mut survival_rows = Vec::new();
    for (k, &eta) in etas.iter().enumerate() {
        let pool = sim::BenchmarkPool::Depolarizing {
            unitaries: (0..6)
                .map(|i| {
                    qudit_core::haar_random_unitary(16, cfg.master_seed + 100 + i + 50 * k as u64)
                        .map(|u| u.into_entries())
                        .map_err(|e| anyhow!("{e}"))
                })
                .collect::<Result<_>>()?,
            eta_step: eta,
            eta0: 0.0,
        };
        let model = sim::ErrorModel::noiseless();
        let opts = sim::SequenceOptions { ensemble_draws: 1, ..Default::default() };
        let out = sim::randomized_benchmark(&pool, lengths, n_sequences, &model, &opts, cfg.master_seed)
            .map_err(|e| anyhow!("{e}"))?;
        fit_rows.push(format!(
            "{eta},{:.8},{:.8},{:.8},{:.3e}",
            out.eta, out.eta0, out.benchmark_fidelity, out.fit_residual
        ));
        for (l, mean, se) in &out.survivals {
            survival_rows.push(format!("{eta},{l},{mean:.8},{se:.3e}"));
        }
        eprintln!("rb pool eta = {eta}: fitted {:.5}", out.eta);
    }
    Ok(vec![
        write_csv(root, "rb_fits.csv", "eta_injected,eta_fitted,eta0_fitted,benchmark_fidelity,fit_residual", &fit_rows)?,
        write_csv(root, "rb_survivals.csv", "eta_injected,length,survival_mean,survival_se", &survival_rows)?,
    ])
}

#[allow(clippy::too_many_arguments)]
fn grape_sweep(
    cfg: &CampaignConfig,
    root: &Path,
    t_list_us: &[f64],
    dt_list_us: &[f64],
    n_targets: usize,
    target_fidelity: f64,
    n_starts: usize,
    max_iters: usize,
) -> Result<Vec<String>> {
    let params = cfg.hamiltonian.to_params()?;
    let mut rows = Vec::new();
    for &t_us in t_list_us {
        for &dt_us in dt_list_us {
            let dt = dt_us * 1e-6;
            let n_steps = (t_us * 1e-6 / dt).round() as usize;
            for target in 0..n_targets {
                let u = qudit_core::haar_random_unitary(16, cfg.master_seed + 1000 + target as u64)
                    .map_err(|e| anyhow!("{e}"))?;
                let obj = grape::TaskObjective {
                    task: grape::ControlTask::FullUnitary { target: u.into_entries() },
                    ctx: EvalContext::nominal(params.clone()),
                };
                let opts = SearchOptions {
                    n_starts,
                    max_iters,
                    target_fidelity,
                    seed: cfg.master_seed + target as u64,
                    ..Default::default()
                };
                let res = grape::search(&obj, dt, n_steps, &opts).map_err(|e| anyhow!("{e}"))?;
                rows.push(format!("{t_us},{dt_us},{target},{:.8},{}", res.fidelity, res.iterations));
                eprintln!("T={t_us}us dt={dt_us}us target {target}: F = {:.5}", res.fidelity);
            }
        }
    }
    Ok(vec![write_csv(root, "grape_sweep.csv", "t_us,dt_us,target,fidelity,iterations", &rows)?])
}

fn exact_bases(c: &povm::PovmConstruction) -> Result<Vec<CMat>> {
    (0..c.n_settings())
        .map(|s| c.setting_basis(s).map_err(|e| anyhow!("{e}")))
        .collect()
}

fn simulate_for_construction(
    c: &povm::PovmConstruction,
    truths: &[CMat],
    model: &sim::ErrorModel,
    ensemble: usize,
) -> Result<sim::MeasurementRecord> {
    let bases = exact_bases(c)?;
    let preps: Vec<(sim::Prep, Option<sim::Process>)> =
        truths.iter().map(|rho| (sim::Prep::Exact(rho), None)).collect();
    let measures: Vec<sim::Measure> = bases.iter().map(|b| sim::Measure::ExactBasis(b)).collect();
    let opts = sim::SequenceOptions { ensemble_draws: ensemble, ..Default::default() };
    sim::simulate_record(&preps, &measures, model, &opts, &c.name).map_err(|e| anyhow!("{e}"))
}

fn qst_study(
    cfg: &CampaignConfig,
    root: &Path,
    constructions: &[String],
    n_states: usize,
    estimators: &[String],
    error_model: &crate::config::ErrorModelConfig,
    ensemble: usize,
) -> Result<Vec<String>> {
    let mut rows = Vec::new();
    for name in constructions {
        let c = povm::by_name(name).map_err(|e| anyhow!("{e}"))?;
        let d = c.dim;
        let truths: Vec<CMat> = (0..n_states)
            .map(|k| {
                qudit_core::haar_random_state(d, cfg.master_seed + 7000 + k as u64)
                    .map(|s| s.projector())
                    .map_err(|e| anyhow!("{e}"))
            })
            .collect::<Result<_>>()?;
        let mut model = error_model.to_model()?;
        model.seed = cfg.master_seed;
        let record = simulate_for_construction(&c, &truths, &model, ensemble)?;
        record.save(&root.join(format!("record_{name}"))).map_err(|e| anyhow!("{e}"))?;
        for est_name in estimators {
            let mut infids = Vec::new();
            for (k, truth) in truths.iter().enumerate() {
                let freqs = &record.frequencies[k];
                let cfg_est = qst::EstimatorConfig::default();
                let rho = match est_name.as_str() {
                    "ls" => qst::least_squares(freqs, &c, &cfg_est).map_err(|e| anyhow!("{e}"))?.rho,
                    "ml" => qst::max_likelihood(freqs, &c, &cfg_est).map_err(|e| anyhow!("{e}"))?.rho,
                    other => anyhow::bail!("estimator '{other}' not valid in qst_study (use ls/ml)"),
                };
                let f = qudit_core::fidelity::state_fidelity_mat(&rho, truth)
                    .map_err(|e| anyhow!("{e}"))?;
                infids.push(1.0 - f);
            }
            let mean: f64 = infids.iter().sum::<f64>() / infids.len() as f64;
            let var: f64 = infids.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / infids.len().max(1) as f64;
            let sem = (var / infids.len() as f64).sqrt();
            rows.push(format!("{name},{est_name},{n_states},{mean:.6},{sem:.6}"));
            eprintln!("{name} / {est_name}: mean infidelity {mean:.4} ({sem:.4})");
        }
    }
    Ok(vec![write_csv(root, "qst_infidelity.csv", "construction,estimator,n_states,mean_infidelity,sem", &rows)?])
}

#[allow(clippy::too_many_arguments)]
fn qst_partial(
    cfg: &CampaignConfig,
    root: &Path,
    construction: &str,
    n_states: usize,
    estimators: &[String],
    error_model: &crate::config::ErrorModelConfig,
    ensemble: usize,
    epsilon: Option<f64>,
) -> Result<Vec<String>> {
    let c = povm::by_name(construction).map_err(|e| anyhow!("{e}"))?;
    let d = c.dim;
    let truths: Vec<CMat> = (0..n_states)
        .map(|k| {
            qudit_core::haar_random_state(d, cfg.master_seed + 7000 + k as u64)
                .map(|s| s.projector())
                .map_err(|e| anyhow!("{e}"))
        })
        .collect::<Result<_>>()?;
    let mut model = error_model.to_model()?;
    model.seed = cfg.master_seed;
    let record = simulate_for_construction(&c, &truths, &model, ensemble)?;
    // Calibrate epsilon on the full record unless given.
    let eps = match epsilon {
        Some(e) => e,
        None => qst::calibrate_epsilon(&c, &truths, &record).map_err(|e| anyhow!("{e}"))?,
    };
    let mut rows = Vec::new();
    for k in 1..=c.n_settings() {
        let partial = qst::partial_record(&record, k).map_err(|e| anyhow!("{e}"))?;
        let c_part = c.truncated(k).map_err(|e| anyhow!("{e}"))?;
        for est_name in estimators {
            let mut infids = Vec::new();
            for (s, truth) in truths.iter().enumerate() {
                let freqs = &partial.frequencies[s];
                let cfg_est = qst::EstimatorConfig { epsilon: eps, ..Default::default() };
                let rho = match est_name.as_str() {
                    "ls" => qst::least_squares(freqs, &c_part, &cfg_est).map_err(|e| anyhow!("{e}"))?.rho,
                    "ml" => qst::max_likelihood(freqs, &c_part, &cfg_est).map_err(|e| anyhow!("{e}"))?.rho,
                    "tm" => match qst::trace_min(freqs, &c_part, &cfg_est, qst::EpsilonMode::RmsPerOutcome) {
                        Ok(out) => out.rho,
                        Err(qst::QstError::TmInfeasible { .. }) => continue,
                        Err(e) => return Err(anyhow!("{e}")),
                    },
                    other => anyhow::bail!("estimator '{other}' not valid in qst_partial"),
                };
                let f = qudit_core::fidelity::state_fidelity_mat(&rho, truth)
                    .map_err(|e| anyhow!("{e}"))?;
                infids.push(1.0 - f);
            }
            if infids.is_empty() {
                continue;
            }
            let mean: f64 = infids.iter().sum::<f64>() / infids.len() as f64;
            rows.push(format!("{construction},{est_name},{k},{mean:.6},{}", infids.len()));
            eprintln!("{construction} / {est_name} / {k} settings: mean infidelity {mean:.4}");
        }
    }
    std::fs::write(root.join("epsilon.json"), serde_json::json!({ "epsilon": eps }).to_string())?;
    Ok(vec![write_csv(root, "qst_partial.csv", "construction,estimator,settings_used,mean_infidelity,n_ok", &rows)?])
}

fn qpt_study(
    cfg: &CampaignConfig,
    root: &Path,
    dim: usize,
    n_processes: usize,
    probe_counts: &[usize],
    noisy: bool,
    error_model: &crate::config::ErrorModelConfig,
) -> Result<Vec<String>> {
    let c = if dim.is_power_of_two() {
        povm::mub(dim).map_err(|e| anyhow!("{e}"))?
    } else {
        povm::mub_prime(dim).map_err(|e| anyhow!("{e}"))?
    };
    let probes_full = qpt::intelligent_probes(dim).map_err(|e| anyhow!("{e}"))?;
    let mut rows = Vec::new();
    for proc_idx in 0..n_processes {
        let u = qudit_core::haar_random_unitary(dim, cfg.master_seed + 500 + proc_idx as u64)
            .map_err(|e| anyhow!("{e}"))?;
        let target = qpt::unitary_to_chi(u.entries()).map_err(|e| anyhow!("{e}"))?;
        // Record for all probes.
        let mut model = error_model.to_model()?;
        model.seed = cfg.master_seed + proc_idx as u64;
        if !noisy {
            model = sim::ErrorModel::noiseless();
        }
        let outputs: Vec<CMat> = probes_full
            .iter()
            .map(|p| {
                let out = u.entries().dot(p.amplitudes());
                let mut rho: CMat = ndarray::Array2::zeros((dim, dim));
                for i in 0..dim {
                    for j in 0..dim {
                        rho[[i, j]] = out[i] * out[j].conj();
                    }
                }
                rho
            })
            .collect();
        let record = simulate_for_construction(&c, &outputs, &model, 20)?;
        for &np in probe_counts {
            let np = np.min(probes_full.len());
            let est = qpt::estimate_process(
                &record.frequencies[..np],
                &probes_full[..np],
                &c,
                &qpt::QptConfig::default(),
            )
            .map_err(|e| anyhow!("{e}"))?;
            let f = qpt::process_fidelity(&est.chi, &target).map_err(|e| anyhow!("{e}"))?;
            rows.push(format!(
                "{dim},{proc_idx},{np},{:.6},{:.2e},{:.2e}",
                1.0 - f,
                est.cp_violation,
                est.tp_violation
            ));
            eprintln!("process {proc_idx}, {np} probes: infidelity {:.4}", 1.0 - f);
        }
    }
    Ok(vec![write_csv(root, "qpt_infidelity.csv", "dim,process,probes_used,infidelity,cp_violation,tp_violation", &rows)?])
}
