//! Multi-start gradient ascent with Armijo backtracking and L-BFGS
//! acceleration. Ascent is monotone per start; the returned trace is the
//! per-iteration fidelity of the winning start.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::objective::Objective;
use crate::waveform::ControlWaveform;
use crate::GrapeError;

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub n_starts: usize,
    pub max_iters: usize,
    pub target_fidelity: f64,
    /// Stop when the gradient max-norm falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// L-BFGS history length; 0 disables acceleration.
    pub lbfgs_memory: usize,
    /// How many starts run concurrently per wave; waves stop early once a
    /// start reaches the target, keeping results deterministic per seed.
    pub wave_size: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            n_starts: 10,
            max_iters: 2000,
            target_fidelity: 0.999,
            grad_tol: 1e-7,
            seed: 0,
            lbfgs_memory: 10,
            wave_size: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub waveform: ControlWaveform,
    pub fidelity: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Fidelity after each accepted iteration of the winning start.
    pub trace: Vec<f64>,
    pub warnings: Vec<String>,
    /// (start index, achieved fidelity) for every start that ran.
    pub starts: Vec<(usize, f64)>,
}

struct StartOutcome {
    waveform: ControlWaveform,
    fidelity: f64,
    converged: bool,
    iterations: usize,
    trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Two-loop L-BFGS direction for maximizing: returns an ascent direction
/// built from the curvature pairs, or a scaled copy of the gradient when no
/// usable history exists.
fn lbfgs_direction(
    grad: &[f64],
    history: &VecDeque<(Vec<f64>, Vec<f64>)>, // (s, y) pairs in minimize convention
) -> Vec<f64> {
    // Work in minimize convention: g_min = -grad, return d with d = -H g_min.
    let n = grad.len();
    let mut q: Vec<f64> = grad.iter().map(|&g| -g).collect();
    if history.is_empty() {
        return grad.to_vec();
    }
    let m = history.len();
    let mut alphas = vec![0.0f64; m];
    for (i, (s, y)) in history.iter().enumerate().rev() {
        let rho = 1.0 / dot(y, s);
        let alpha = rho * dot(s, &q);
        alphas[i] = alpha;
        for k in 0..n {
            q[k] -= alpha * y[k];
        }
    }
    let (s_last, y_last) = history.back().unwrap();
    let gamma = dot(s_last, y_last) / dot(y_last, y_last);
    for qk in q.iter_mut() {
        *qk *= gamma;
    }
    for (i, (s, y)) in history.iter().enumerate() {
        let rho = 1.0 / dot(y, s);
        let beta = rho * dot(y, &q);
        for k in 0..n {
            q[k] += s[k] * (alphas[i] - beta);
        }
    }
    // q is now H g_min; the ascent direction is -q.
    q.iter().map(|&x| -x).collect()
}

fn run_start(
    obj: &dyn Objective,
    dt: f64,
    n_steps: usize,
    opts: &SearchOptions,
    start_index: usize,
) -> Result<StartOutcome, GrapeError> {
    let mut rng =
        ChaCha12Rng::seed_from_u64(opts.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(start_index as u64 + 1)));
    let nparams = 3 * n_steps;
    let mut x: Vec<f64> = (0..nparams)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect();
    let mut wf = ControlWaveform::from_flat(dt, &x)?;
    let (mut f, mut grad) = obj.evaluate(&wf)?;
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut converged = f >= opts.target_fidelity;
    let mut iterations = 0usize;
    let mut steepest_step = 1.0f64;

    while !converged && iterations < opts.max_iters {
        let gmax = max_norm(&grad);
        if gmax < opts.grad_tol {
            break;
        }
        let mut used_lbfgs = !history.is_empty() && opts.lbfgs_memory > 0;
        let mut dir = if used_lbfgs {
            lbfgs_direction(&grad, &history)
        } else {
            grad.clone()
        };
        if dot(&dir, &grad) <= 0.0 {
            // Not an ascent direction; drop the history and fall back.
            history.clear();
            dir = grad.clone();
            used_lbfgs = false;
        }
        let slope = dot(&dir, &grad);
        let mut t = if used_lbfgs { 1.0 } else { steepest_step };
        // Keep the first trial step below a sane phase scale.
        let dmax = max_norm(&dir);
        if t * dmax > std::f64::consts::PI {
            t = std::f64::consts::PI / dmax;
        }
        let c1 = 1e-4;
        let mut accepted = false;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(dir.iter()).map(|(xi, di)| xi + t * di).collect();
            let wt = ControlWaveform::from_flat(dt, &xt)?;
            let ft = obj.value(&wt)?;
            if ft >= f + c1 * t * slope {
                let (fnew, gnew) = obj.evaluate(&wt)?;
                // Curvature pair in minimize convention: y = g_old - g_new.
                if opts.lbfgs_memory > 0 {
                    let s: Vec<f64> = xt.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                    let y: Vec<f64> = grad.iter().zip(gnew.iter()).map(|(go, gn)| go - gn).collect();
                    if dot(&s, &y) > 1e-14 {
                        history.push_back((s, y));
                        if history.len() > opts.lbfgs_memory {
                            history.pop_front();
                        }
                    }
                }
                x = xt;
                wf = wt;
                f = fnew;
                grad = gnew;
                if !used_lbfgs {
                    steepest_step = (t * 2.0).min(1e6);
                }
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if !history.is_empty() {
                history.clear();
                continue;
            }
            if steepest_step > 1e-12 {
                steepest_step *= 0.25;
                continue;
            }
            break;
        }
        iterations += 1;
        trace.push(f);
        if f >= opts.target_fidelity {
            converged = true;
        }
    }

    Ok(StartOutcome { waveform: wf, fidelity: f, converged, iterations, trace })
}

/// Multi-start search for a waveform maximizing the objective. Starts run in
/// deterministic waves; the search stops after the first wave containing a
/// start that reached the target fidelity. Non-convergence returns the best
/// waveform found with `converged = false`.
pub fn search(
    obj: &dyn Objective,
    dt: f64,
    n_steps: usize,
    opts: &SearchOptions,
) -> Result<SearchResult, GrapeError> {
    let mut warnings = Vec::new();
    let nparams = 3 * n_steps;
    let floor = obj.parameter_floor();
    if nparams < floor {
        warnings.push(format!(
            "waveform has {nparams} control phases, below the {floor} needed to fully specify the task; expect reduced fidelity"
        ));
    }
    let wave = opts.wave_size.max(1);
    let mut outcomes: Vec<(usize, StartOutcome)> = Vec::new();
    let mut next = 0usize;
    while next < opts.n_starts {
        let hi = (next + wave).min(opts.n_starts);
        let batch: Result<Vec<(usize, StartOutcome)>, GrapeError> = (next..hi)
            .into_par_iter()
            .map(|s| run_start(obj, dt, n_steps, opts, s).map(|o| (s, o)))
            .collect();
        let mut batch = batch?;
        let hit = batch.iter().any(|(_, o)| o.converged);
        outcomes.append(&mut batch);
        next = hi;
        if hit {
            break;
        }
    }
    let starts: Vec<(usize, f64)> = outcomes.iter().map(|(s, o)| (*s, o.fidelity)).collect();
    let (_, best) = outcomes
        .into_iter()
        .max_by(|(ia, a), (ib, b)| {
            a.fidelity
                .partial_cmp(&b.fidelity)
                .unwrap()
                .then(ib.cmp(ia))
        })
        .expect("at least one start");
    Ok(SearchResult {
        waveform: best.waveform,
        fidelity: best.fidelity,
        converged: best.converged,
        iterations: best.iterations,
        trace: best.trace,
        warnings,
        starts,
    })
}
