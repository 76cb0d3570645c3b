//! Randomized benchmarking: survival of the fiducial state through random
//! map sequences with exact target-inverse readout, and the decay-curve fit
//! P(l) = 1/16 + (15/16)(1 - 16 eta0/15)(1 - 16 eta/15)^l.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::dagger;
use qudit_core::{BasisLabel, CMat};
use qudit_grape::{propagate, ControlWaveform, EvalContext};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error_model::ErrorModel;
use crate::sequence::SequenceOptions;
use crate::{derive_seed, SimError};

/// The pool of maps a benchmarking sequence draws from.
pub enum BenchmarkPool<'a> {
    /// Waveforms with their design targets; realized maps re-propagate the
    /// waveform under each error draw, readout inverts the target product.
    Waveforms(Vec<(&'a ControlWaveform, CMat)>),
    /// Exact unitaries followed by a depolarizing channel of strength
    /// `eta_step` per map, with `eta0` of combined preparation/readout
    /// depolarization. The analytic decay is known for this pool.
    Depolarizing { unitaries: Vec<CMat>, eta_step: f64, eta0: f64 },
}

#[derive(Debug, Clone)]
pub struct RbOutcome {
    /// (sequence length, mean survival, std error) per requested length.
    pub survivals: Vec<(usize, f64, f64)>,
    pub eta0: f64,
    pub eta: f64,
    pub benchmark_fidelity: f64,
    pub fit_residual: f64,
}

fn depolarize(rho: &CMat, p: f64) -> CMat {
    let d = rho.nrows() as f64;
    let tr = qudit_core::linalg::trace(rho).re;
    let mut out = rho.mapv(|z| z * (1.0 - p));
    for i in 0..rho.nrows() {
        out[[i, i]] += Complex64::new(p * tr / d, 0.0);
    }
    out
}

fn survival_of_sequence(
    pool: &BenchmarkPool,
    length: usize,
    model: &ErrorModel,
    opts: &SequenceOptions,
    seed: u64,
) -> Result<f64, SimError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let fiducial = BasisLabel::index_of(3, 3).expect("fiducial");
    let mut rho: CMat = Array2::zeros((16, 16));
    rho[[fiducial, fiducial]] = Complex64::new(1.0, 0.0);

    match pool {
        BenchmarkPool::Depolarizing { unitaries, eta_step, eta0 } => {
            let p0 = 16.0 * eta0 / 15.0;
            let p = 16.0 * eta_step / 15.0;
            rho = depolarize(&rho, p0);
            let mut target: CMat = Array2::eye(16);
            for _ in 0..length {
                let u = &unitaries[rng.gen_range(0..unitaries.len())];
                rho = u.dot(&rho).dot(&dagger(u));
                rho = depolarize(&rho, p);
                target = u.dot(&target);
            }
            let inv = dagger(&target);
            rho = inv.dot(&rho).dot(&dagger(&inv));
            Ok(rho[[fiducial, fiducial]].re)
        }
        BenchmarkPool::Waveforms(pool_wf) => {
            // Choose the sequence once, then average the realized survival
            // over the ensemble draws (fixed inhomogeneity interpretation).
            let picks: Vec<usize> =
                (0..length).map(|_| rng.gen_range(0..pool_wf.len())).collect();
            let mut target: CMat = Array2::eye(16);
            for &k in &picks {
                target = pool_wf[k].1.dot(&target);
            }
            let readout = dagger(&target);
            let kdraws = opts.ensemble_draws.max(1);
            let mut acc = 0.0;
            for _ in 0..kdraws {
                let draw = model.sample(&mut rng);
                let params = draw.apply(&opts.params);
                let ctx = EvalContext::nominal(params);
                let mut r = rho.clone();
                for &k in &picks {
                    let u = propagate(pool_wf[k].0, &ctx)?;
                    r = u.dot(&r).dot(&dagger(&u));
                }
                let r = readout.dot(&r).dot(&dagger(&readout));
                acc += r[[fiducial, fiducial]].re;
            }
            Ok(acc / kdraws as f64)
        }
    }
}

/// Run the benchmark over the given sequence lengths and fit the decay.
pub fn randomized_benchmark(
    pool: &BenchmarkPool,
    lengths: &[usize],
    n_sequences: usize,
    model: &ErrorModel,
    opts: &SequenceOptions,
    master_seed: u64,
) -> Result<RbOutcome, SimError> {
    model.validate()?;
    let survivals: Result<Vec<(usize, f64, f64)>, SimError> = lengths
        .par_iter()
        .map(|&l| {
            let vals: Result<Vec<f64>, SimError> = (0..n_sequences)
                .into_par_iter()
                .map(|s| {
                    survival_of_sequence(
                        pool,
                        l,
                        model,
                        opts,
                        derive_seed(master_seed, l as u64, s as u64),
                    )
                })
                .collect();
            let vals = vals?;
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            let var: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / vals.len().max(1) as f64;
            let se = (var / vals.len() as f64).sqrt();
            Ok((l, mean, se))
        })
        .collect();
    let survivals = survivals?;
    let (a, b, residual) = fit_decay(&survivals)?;
    let eta0 = 15.0 / 16.0 - a;
    let eta = 15.0 * (1.0 - b) / 16.0;
    Ok(RbOutcome {
        survivals,
        eta0,
        eta,
        benchmark_fidelity: 1.0 - eta,
        fit_residual: residual,
    })
}

/// Least-squares fit of P(l) = 1/16 + A B^l; returns (A, B, residual).
/// Log-linear initialization, Gauss-Newton refinement.
pub fn fit_decay(data: &[(usize, f64, f64)]) -> Result<(f64, f64, f64), SimError> {
    if data.len() < 2 {
        return Err(SimError::FitFailure("need at least two lengths".into()));
    }
    let floor = 1.0 / 16.0;
    // Initialize on the positive part of the decay.
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut n = 0.0;
    for &(l, p, _) in data {
        let y = p - floor;
        if y > 1e-6 {
            let ly = y.ln();
            let x = l as f64;
            sx += x;
            sy += ly;
            sxx += x * x;
            sxy += x * ly;
            n += 1.0;
        }
    }
    if n < 2.0 {
        return Err(SimError::FitFailure("survival data entirely at the floor".into()));
    }
    let denom = n * sxx - sx * sx;
    let slope = if denom.abs() > 1e-12 { (n * sxy - sx * sy) / denom } else { 0.0 };
    let intercept = (sy - slope * sx) / n;
    let mut a = intercept.exp();
    let mut b = slope.exp().clamp(1e-6, 1.0);

    // Gauss-Newton on (A, B).
    for _ in 0..200 {
        let mut jtj = [[0.0f64; 2]; 2];
        let mut jtr = [0.0f64; 2];
        let mut res2 = 0.0;
        for &(l, p, _) in data {
            let lf = l as f64;
            let bl = b.powf(lf);
            let model = floor + a * bl;
            let r = model - p;
            let da = bl;
            let db = if l == 0 { 0.0 } else { a * lf * b.powf(lf - 1.0) };
            jtj[0][0] += da * da;
            jtj[0][1] += da * db;
            jtj[1][0] += da * db;
            jtj[1][1] += db * db;
            jtr[0] += da * r;
            jtr[1] += db * r;
            res2 += r * r;
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-18 {
            break;
        }
        let step_a = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let step_b = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        a -= step_a;
        b -= step_b;
        b = b.clamp(1e-9, 1.0);
        a = a.clamp(0.0, 1.0);
        if step_a.abs() < 1e-14 && step_b.abs() < 1e-14 {
            let _ = res2;
            break;
        }
    }
    let residual: f64 = data
        .iter()
        .map(|&(l, p, _)| {
            let r = floor + a * b.powf(l as f64) - p;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok((a, b, residual))
}

/// Linear fidelity-decay model A(T) = 1 - 0.0444 T with T in milliseconds,
/// floored at zero.
pub fn fidelity_decay_model(t_ms: f64) -> f64 {
    (1.0 - 0.0444 * t_ms).max(0.0)
}
