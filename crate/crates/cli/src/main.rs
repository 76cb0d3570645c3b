//! Batch front end for the qudit control and tomography toolkit.

mod campaign;
mod config;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndarray::Array2;
use qudit_core::serialize::OperatorJson;
use qudit_core::{CMat, Ket};
use qudit_grape as grape;
use qudit_grape::{ControlTask, ControlWaveform, EvalContext, SearchOptions};
use qudit_povm as povm;
use qudit_qpt as qpt;
use qudit_qst as qst;
use qudit_sim as sim;

#[derive(Parser)]
#[command(name = "qudit", about = "Quantum control and tomography toolkit for a 16-dimensional cesium qudit", version)]
struct Cli {
    /// Master seed for all randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hamiltonian construction utilities.
    Ham {
        #[command(subcommand)]
        cmd: HamCmd,
    },
    /// Waveform search and evaluation.
    Grape {
        #[command(subcommand)]
        cmd: GrapeCmd,
    },
    /// POVM construction generation and verification.
    Povm {
        #[command(subcommand)]
        cmd: PovmCmd,
    },
    /// Measurement-record simulation and randomized benchmarking.
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
    },
    /// State reconstruction.
    Qst {
        #[command(subcommand)]
        cmd: QstCmd,
    },
    /// Process reconstruction.
    Qpt {
        #[command(subcommand)]
        cmd: QptCmd,
    },
    /// Config-driven experiment campaigns.
    Campaign {
        #[command(subcommand)]
        cmd: CampaignCmd,
    },
}

#[derive(Subcommand)]
enum HamCmd {
    /// Emit the 16x16 control Hamiltonian in the shared JSON operator format.
    Dump(HamDumpArgs),
}

#[derive(Args)]
struct HamDumpArgs {
    /// Hamiltonian config (JSON, Hz-valued); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    phi_x: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_y: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_uw: f64,
    /// Remove the trace part before emitting.
    #[arg(long)]
    traceless: bool,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GrapeCmd {
    /// Search for a control waveform implementing a task.
    Search(GrapeSearchArgs),
    /// Evaluate a stored waveform's fidelity, optionally under bias ramps.
    Evaluate(GrapeEvalArgs),
    /// Fidelity over a (T, dt) grid for Haar targets.
    Sweep(GrapeSweepArgs),
}

#[derive(Args)]
struct GrapeSearchArgs {
    /// Task kind: state-map | unitary | subspace9 | subspace4.
    #[arg(long, default_value = "unitary")]
    task: String,
    /// Seed for the Haar target.
    #[arg(long, default_value_t = 1)]
    target_seed: u64,
    /// Total control time in seconds.
    #[arg(long, default_value_t = 600e-6)]
    t_total: f64,
    /// Phase step duration in seconds.
    #[arg(long, default_value_t = 4e-6)]
    dt: f64,
    #[arg(long, default_value_t = 4)]
    n_starts: usize,
    #[arg(long, default_value_t = 0.999)]
    target_fidelity: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Add the four-point static/ramp robustness average.
    #[arg(long)]
    robust: bool,
    /// Output base path (writes base.csv and base.json).
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct GrapeEvalArgs {
    /// Waveform base path (without extension).
    #[arg(long)]
    waveform: PathBuf,
    /// Target unitary seed used at design time.
    #[arg(long, default_value_t = 1)]
    target_seed: u64,
    #[arg(long, default_value = "unitary")]
    task: String,
    /// Bias offset at the start of the waveform, Hz.
    #[arg(long, default_value_t = 0.0)]
    delta_omega_i_hz: f64,
    /// Bias offset at the end of the waveform, Hz.
    #[arg(long, default_value_t = 0.0)]
    delta_omega_f_hz: f64,
}

#[derive(Args)]
struct GrapeSweepArgs {
    /// Control times in microseconds.
    #[arg(long, value_delimiter = ',', default_value = "300,450,600")]
    t_us: Vec<f64>,
    /// Step durations in microseconds.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    dt_us: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    n_targets: usize,
    #[arg(long, default_value_t = 2)]
    n_starts: usize,
    #[arg(long, default_value_t = 800)]
    max_iters: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum PovmCmd {
    /// Generate a construction by catalog name (mub16, sic4, 5gmb16, ...).
    Gen {
        #[arg(long)]
        name: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Re-check a stored construction: counts, completeness, IC class.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        states: usize,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Simulate a measurement record for Haar test states (exact-state mode).
    Record {
        /// Construction catalog name or a stored construction file.
        #[arg(long)]
        construction: String,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 20)]
        ensemble: usize,
        /// Disable all errors (exact Born frequencies).
        #[arg(long)]
        noiseless: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Randomized benchmarking with an injected depolarizing error.
    Rb {
        #[arg(long, default_value_t = 0.02)]
        eta: f64,
        #[arg(long, default_value_t = 0.0)]
        eta0: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,4,8,12,18,24,30")]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        sequences: usize,
    },
}

#[derive(Subcommand)]
enum QstCmd {
    /// Reconstruct a state from a stored record.
    Reconstruct {
        /// Record base path (base.csv + base.json).
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        construction: String,
        /// Probe index within the record.
        #[arg(long, default_value_t = 0)]
        probe: usize,
        /// Estimator: li | ls | ml | tm.
        #[arg(long, default_value = "ls")]
        estimator: String,
        /// Per-outcome RMS error threshold (trace minimization).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Keep only the first k measurement settings.
        #[arg(long)]
        first_k: Option<usize>,
        /// Optional truth state (JSON operator) to report fidelity against.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Calibrate the trace-minimization epsilon from truths and a record.
    CalibrateEps {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        construction: String,
        /// Directory of truth states truth_000.json, truth_001.json, ...
        #[arg(long)]
        truths: PathBuf,
    },
}

#[derive(Subcommand)]
enum QptCmd {
    /// Estimate a process matrix from a stored record.
    Estimate {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        construction: String,
        /// Probe set: currently "intelligent".
        #[arg(long, default_value = "intelligent")]
        probes: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Optional target unitary (JSON operator) for the infidelity report.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CampaignCmd {
    /// Validate a campaign config and echo the normalized form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a campaign into an output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults under QUDIT_OUTPUT_ROOT or ./campaigns).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also emit a gnuplot script for the CSV tables.
        #[arg(long)]
        gnuplot_script: bool,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Ham { cmd } => ham_cmd(cmd),
        Command::Grape { cmd } => grape_cmd(cmd, cli.seed),
        Command::Povm { cmd } => povm_cmd(cmd, cli.seed),
        Command::Sim { cmd } => sim_cmd(cmd, cli.seed),
        Command::Qst { cmd } => qst_cmd(cmd),
        Command::Qpt { cmd } => qpt_cmd(cmd),
        Command::Campaign { cmd } => campaign_cmd(cmd, cli.seed),
    }
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                std::fs::create_dir_all(parent).ok();
            }
            std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => println!("{content}"),
    }
    Ok(())
}

fn ham_cmd(cmd: HamCmd) -> Result<()> {
    match cmd {
        HamCmd::Dump(args) => {
            let cfg = match &args.config {
                Some(p) => serde_json::from_str::<config::HamiltonianConfig>(
                    &std::fs::read_to_string(p)?,
                )?,
                None => config::HamiltonianConfig::default(),
            };
            let params = cfg.to_params()?;
            let h = if args.traceless {
                qudit_hamiltonian::builder::h_static_traceless(&params)
                    .map_err(|e| anyhow!("{e}"))?
                    .into_entries()
                    + &qudit_hamiltonian::builder::h_rf_mat(&params, args.phi_x, args.phi_y)
                    + &qudit_hamiltonian::builder::h_uw_mat(&params, args.phi_uw)
            } else {
                qudit_hamiltonian::h_total(&params, args.phi_x, args.phi_y, args.phi_uw)
                    .map_err(|e| anyhow!("{e}"))?
                    .into_entries()
            };
            let json = serde_json::to_string_pretty(&OperatorJson::from_matrix(&h))?;
            write_or_print(&args.output, &json)
        }
    }
}

fn task_by_name(name: &str, target_seed: u64) -> Result<ControlTask> {
    let d = 16;
    match name {
        "unitary" => Ok(ControlTask::FullUnitary {
            target: qudit_core::haar_random_unitary(d, target_seed)
                .map_err(|e| anyhow!("{e}"))?
                .into_entries(),
        }),
        "state-map" => Ok(ControlTask::StateMap {
            initial: Ket::basis_state(d, 9),
            target: qudit_core::haar_random_state(d, target_seed).map_err(|e| anyhow!("{e}"))?,
        }),
        "subspace9" | "subspace4" => {
            let ds = if name == "subspace9" { 9 } else { 4 };
            let mut p: CMat = Array2::zeros((d, d));
            for i in 0..ds {
                p[[i, i]] = num_complex::Complex64::new(1.0, 0.0);
            }
            let w = qudit_core::haar_random_unitary(ds, target_seed).map_err(|e| anyhow!("{e}"))?;
            let mut target: CMat = Array2::eye(d);
            for i in 0..ds {
                for j in 0..ds {
                    target[[i, j]] = w.entries()[[i, j]];
                }
            }
            Ok(ControlTask::SubspaceUnitary { target, projector: p, ds })
        }
        other => bail!("unknown task '{other}'"),
    }
}

fn grape_cmd(cmd: GrapeCmd, seed: u64) -> Result<()> {
    let params = qudit_hamiltonian::HamiltonianParams::default();
    match cmd {
        GrapeCmd::Search(args) => {
            let n_steps = (args.t_total / args.dt).round() as usize;
            let task = task_by_name(&args.task, args.target_seed)?;
            let opts = SearchOptions {
                n_starts: args.n_starts,
                max_iters: args.max_iters,
                target_fidelity: args.target_fidelity,
                seed,
                ..Default::default()
            };
            let result = if args.robust {
                let spec = grape::RobustnessSpec::four_point(
                    &params,
                    std::f64::consts::TAU * 40.0,
                    std::f64::consts::TAU * 100.0,
                );
                let obj = grape::RobustObjective { task, spec };
                grape::search(&obj, args.dt, n_steps, &opts).map_err(|e| anyhow!("{e}"))?
            } else {
                let obj = grape::TaskObjective { task, ctx: EvalContext::nominal(params.clone()) };
                grape::search(&obj, args.dt, n_steps, &opts).map_err(|e| anyhow!("{e}"))?
            };
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let header = grape::WaveformHeader {
                dt: args.dt,
                n_steps,
                params_hash: grape::waveform::params_hash(&params),
                achieved_fidelity: Some(result.fidelity),
            };
            result.waveform.save(&args.output, &header).map_err(|e| anyhow!("{e}"))?;
            eprintln!(
                "fidelity {:.6} after {} iterations (converged: {})",
                result.fidelity, result.iterations, result.converged
            );
            Ok(())
        }
        GrapeCmd::Evaluate(args) => {
            let (wf, _) = ControlWaveform::load(&args.waveform).map_err(|e| anyhow!("{e}"))?;
            let task = task_by_name(&args.task, args.target_seed)?;
            let ctx = EvalContext {
                params,
                ramp: Some(grape::Ramp {
                    delta_omega_i: std::f64::consts::TAU * args.delta_omega_i_hz,
                    delta_omega_f: std::f64::consts::TAU * args.delta_omega_f_hz,
                }),
                extra: None,
            };
            let f = grape::cost(&wf, &task, &ctx).map_err(|e| anyhow!("{e}"))?;
            println!("{}", serde_json::json!({ "fidelity": f }));
            Ok(())
        }
        GrapeCmd::Sweep(args) => {
            let mut rows = vec!["t_us,dt_us,target,fidelity".to_string()];
            for &t_us in &args.t_us {
                for &dt_us in &args.dt_us {
                    let dt = dt_us * 1e-6;
                    let n_steps = (t_us * 1e-6 / dt).round() as usize;
                    for target in 0..args.n_targets {
                        let task = task_by_name("unitary", seed + 1000 + target as u64)?;
                        let obj = grape::TaskObjective {
                            task,
                            ctx: EvalContext::nominal(params.clone()),
                        };
                        let opts = SearchOptions {
                            n_starts: args.n_starts,
                            max_iters: args.max_iters,
                            target_fidelity: 0.999,
                            seed: seed + target as u64,
                            ..Default::default()
                        };
                        let res = grape::search(&obj, dt, n_steps, &opts).map_err(|e| anyhow!("{e}"))?;
                        rows.push(format!("{t_us},{dt_us},{target},{:.8}", res.fidelity));
                        eprintln!("T={t_us}us dt={dt_us}us target {target}: F = {:.5}", res.fidelity);
                    }
                }
            }
            std::fs::write(&args.output, rows.join("\n") + "\n")?;
            eprintln!("wrote {}", args.output.display());
            Ok(())
        }
    }
}

fn povm_cmd(cmd: PovmCmd, seed: u64) -> Result<()> {
    match cmd {
        PovmCmd::Gen { name, output } => {
            let c = povm::by_name(&name).map_err(|e| anyhow!("{e}"))?;
            std::fs::write(&output, c.to_json())?;
            eprintln!(
                "wrote {} ({} settings, {} outcomes, completeness defect {:.2e})",
                output.display(),
                c.n_settings(),
                c.n_outcomes(),
                c.completeness_defect()
            );
            Ok(())
        }
        PovmCmd::Verify { file, states } => {
            let c = povm::PovmConstruction::from_json(&std::fs::read_to_string(&file)?)
                .map_err(|e| anyhow!("{e}"))?;
            let report = povm::verify_ic_class(&c, states, seed).map_err(|e| anyhow!("{e}"))?;
            println!(
                "{}",
                serde_json::json!({
                    "name": c.name,
                    "dim": c.dim,
                    "settings": c.n_settings(),
                    "outcomes": c.n_outcomes(),
                    "completeness_defect": c.completeness_defect(),
                    "fic_rank": report.fic_rank,
                    "fully_ic": report.fully_ic,
                    "r1s_max_infidelity": report.r1s_max_infidelity,
                    "r1s_ok": report.r1s_ok,
                    "r1_jacobian_rank_min": report.r1_jacobian_rank_min,
                    "r1_ok": report.r1_ok,
                    "pure_fit_max_residual": report.pure_fit_max_residual,
                })
            );
            Ok(())
        }
    }
}

fn load_construction(spec: &str) -> Result<povm::PovmConstruction> {
    let path = PathBuf::from(spec);
    if path.exists() {
        povm::PovmConstruction::from_json(&std::fs::read_to_string(&path)?)
            .map_err(|e| anyhow!("{e}"))
    } else {
        povm::by_name(spec).map_err(|e| anyhow!("{e}"))
    }
}

fn sim_cmd(cmd: SimCmd, seed: u64) -> Result<()> {
    match cmd {
        SimCmd::Record { construction, states, ensemble, noiseless, output } => {
            let c = load_construction(&construction)?;
            let model = if noiseless {
                sim::ErrorModel::noiseless()
            } else {
                sim::ErrorModel { seed, ..Default::default() }
            };
            let d = c.dim;
            let truths: Vec<CMat> = (0..states)
                .map(|k| {
                    qudit_core::haar_random_state(d, seed + 7000 + k as u64)
                        .map(|s| s.projector())
                        .map_err(|e| anyhow!("{e}"))
                })
                .collect::<Result<_>>()?;
            let bases: Vec<CMat> = (0..c.n_settings())
                .map(|s| embedded_setting_basis(&c, s))
                .collect::<Result<_>>()?;
            let preps: Vec<(sim::Prep, Option<sim::Process>)> = truths
                .iter()
                .map(|rho| (sim::Prep::Exact(rho), None))
                .collect();
            let measures: Vec<sim::Measure> =
                bases.iter().map(|b| sim::Measure::ExactBasis(b)).collect();
            let opts = sim::SequenceOptions {
                ensemble_draws: ensemble,
                ..Default::default()
            };
            let record = sim::simulate_record(&preps, &measures, &model, &opts, &c.name)
                .map_err(|e| anyhow!("{e}"))?;
            record.save(&output).map_err(|e| anyhow!("{e}"))?;
            // Truth sidecars for downstream fidelity reports.
            for (k, rho) in truths.iter().enumerate() {
                let p = output.with_file_name(format!(
                    "{}_truth_{k:03}.json",
                    output.file_name().unwrap().to_string_lossy()
                ));
                std::fs::write(&p, serde_json::to_string(&OperatorJson::from_matrix(rho))?)?;
            }
            eprintln!("wrote record {} ({} probes x {} settings)", output.display(), states, c.n_settings());
            Ok(())
        }
        SimCmd::Rb { eta, eta0, lengths, sequences } => {
            let pool = sim::BenchmarkPool::Depolarizing {
                unitaries: (0..6)
                    .map(|k| {
                        qudit_core::haar_random_unitary(16, seed + 100 + k)
                            .map(|u| u.into_entries())
                            .map_err(|e| anyhow!("{e}"))
                    })
                    .collect::<Result<_>>()?,
                eta_step: eta,
                eta0,
            };
            let model = sim::ErrorModel::noiseless();
            let opts = sim::SequenceOptions { ensemble_draws: 1, ..Default::default() };
            let out = sim::randomized_benchmark(&pool, &lengths, sequences, &model, &opts, seed)
                .map_err(|e| anyhow!("{e}"))?;
            println!(
                "{}",
                serde_json::json!({
                    "survivals": out.survivals,
                    "eta": out.eta,
                    "eta0": out.eta0,
                    "benchmark_fidelity": out.benchmark_fidelity,
                    "fit_residual": out.fit_residual,
                })
            );
            Ok(())
        }
    }
}

/// For subspace constructions (dim < 16), the measured basis in the lab is
/// the Neumark-embedded one; for native constructions the setting basis (or
/// element kets for flat POVMs) is measured directly.
fn embedded_setting_basis(c: &povm::PovmConstruction, s: usize) -> Result<CMat> {
    if c.settings[s].len() == c.dim {
        c.setting_basis(s).map_err(|e| anyhow!("{e}"))
    } else {
        bail!(
            "setting {s} of {} is not an orthonormal basis; simulate it through its Neumark embedding",
            c.name
        )
    }
}

fn load_operator(path: &PathBuf) -> Result<CMat> {
    let parsed: OperatorJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    parsed.to_matrix().map_err(|e| anyhow!("{e}"))
}

fn qst_cmd(cmd: QstCmd) -> Result<()> {
    match cmd {
        QstCmd::Reconstruct {
            record,
            construction,
            probe,
            estimator,
            epsilon,
            first_k,
            truth,
            output,
        } => {
            let c = load_construction(&construction)?;
            let rec = sim::MeasurementRecord::load(&record).map_err(|e| anyhow!("{e}"))?;
            let (rec, c) = match first_k {
                Some(k) => (
                    qst::partial_record(&rec, k).map_err(|e| anyhow!("{e}"))?,
                    c.truncated(k).map_err(|e| anyhow!("{e}"))?,
                ),
                None => (rec, c),
            };
            if probe >= rec.n_probes() {
                bail!("record has {} probes, asked for {probe}", rec.n_probes());
            }
            let freqs = &rec.frequencies[probe];
            let cfg = qst::EstimatorConfig {
                epsilon: epsilon.unwrap_or(0.0),
                ..Default::default()
            };
            let (rho, objective, iters, residual) = match estimator.as_str() {
                "li" => {
                    let m = qst::linear_inversion(freqs, &c).map_err(|e| anyhow!("{e}"))?;
                    (m, f64::NAN, 0usize, f64::NAN)
                }
                "ls" => {
                    let e = qst::least_squares(freqs, &c, &cfg).map_err(|e| anyhow!("{e}"))?;
                    (e.rho, e.objective, e.iterations, e.stationarity)
                }
                "ml" => {
                    let e = qst::max_likelihood(freqs, &c, &cfg).map_err(|e| anyhow!("{e}"))?;
                    (e.rho, e.objective, e.iterations, e.stationarity)
                }
                "tm" => {
                    let out = qst::trace_min(freqs, &c, &cfg, qst::EpsilonMode::RmsPerOutcome)
                        .map_err(|e| anyhow!("{e}"))?;
                    (out.rho, out.misfit, out.iterations, out.bound)
                }
                other => bail!("unknown estimator '{other}'"),
            };
            let fidelity = match &truth {
                Some(p) => {
                    let t = load_operator(p)?;
                    Some(
                        qudit_core::fidelity::state_fidelity_mat(&rho, &t)
                            .map_err(|e| anyhow!("{e}"))?,
                    )
                }
                None => None,
            };
            let out = serde_json::json!({
                "rho": OperatorJson::from_matrix(&rho),
                "fidelity_vs_truth": fidelity,
                "objective": objective,
                "iters": iters,
                "residual": residual,
            });
            write_or_print(&output, &serde_json::to_string_pretty(&out)?)
        }
        QstCmd::CalibrateEps { record, construction, truths } => {
            let c = load_construction(&construction)?;
            let rec = sim::MeasurementRecord::load(&record).map_err(|e| anyhow!("{e}"))?;
            let mut truth_mats = Vec::new();
            for k in 0..rec.n_probes() {
                let p = truths.join(format!("truth_{k:03}.json"));
                truth_mats.push(load_operator(&p)?);
            }
            let eps = qst::calibrate_epsilon(&c, &truth_mats, &rec).map_err(|e| anyhow!("{e}"))?;
            println!("{}", serde_json::json!({ "epsilon": eps }));
            Ok(())
        }
    }
}

fn qpt_cmd(cmd: QptCmd) -> Result<()> {
    match cmd {
        QptCmd::Estimate { record, construction, probes, dim, target, output } => {
            if probes != "intelligent" {
                bail!("only the intelligent probe set is wired to the CLI");
            }
            let c = load_construction(&construction)?;
            let rec = sim::MeasurementRecord::load(&record).map_err(|e| anyhow!("{e}"))?;
            let probe_states = qpt::intelligent_probes(dim).map_err(|e| anyhow!("{e}"))?;
            if rec.n_probes() < probe_states.len() {
                bail!("record has {} probes, need {}", rec.n_probes(), probe_states.len());
            }
            let est = qpt::estimate_process(
                &rec.frequencies[..probe_states.len()],
                &probe_states,
                &c,
                &qpt::QptConfig::default(),
            )
            .map_err(|e| anyhow!("{e}"))?;
            let infidelity = match &target {
                Some(p) => {
                    let u = load_operator(p)?;
                    let t = qpt::unitary_to_chi(&u).map_err(|e| anyhow!("{e}"))?;
                    Some(1.0 - qpt::process_fidelity(&est.chi, &t).map_err(|e| anyhow!("{e}"))?)
                }
                None => None,
            };
            let out = serde_json::json!({
                "chi": OperatorJson::from_matrix(&est.chi.chi),
                "infidelity_vs_target": infidelity,
                "cp_violation": est.cp_violation,
                "tp_violation": est.tp_violation,
                "iters": est.iterations,
                "objective": est.objective,
            });
            write_or_print(&output, &serde_json::to_string_pretty(&out)?)
        }
    }
}

fn campaign_cmd(cmd: CampaignCmd, seed: u64) -> Result<()> {
    match cmd {
        CampaignCmd::Validate { config: path } => {
            let cfg = config::validate_config(&path)?;
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(())
        }
        CampaignCmd::Run { config: path, output, gnuplot_script } => {
            let mut cfg = config::validate_config(&path)?;
            if cfg.master_seed == 0 {
                cfg.master_seed = seed;
            }
            let root = output.unwrap_or_else(|| {
                std::env::var_os("QUDIT_OUTPUT_ROOT")
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("campaigns"))
                    .join(format!("campaign_{}", config::config_hash(&cfg)))
            });
            campaign::run_campaign(&cfg, &root, gnuplot_script)
        }
    }
}
