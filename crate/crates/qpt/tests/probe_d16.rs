use ndarray::Array2;
use qudit_core::CMat;
use qudit_povm::mub;
use qudit_qpt::*;
use std::time::Instant;

#[test]
#[ignore]
fn probe_d16_noiseless() {
    let d = 16;
    let c = mub(d).unwrap();
    let probes = intelligent_probes(d).unwrap();
    let u = qudit_core::haar_random_unitary(d, 4242).unwrap();
    let rec: Vec<Vec<Vec<f64>>> = probes
        .iter()
        .map(|psi| {
            let out = u.entries().dot(psi.amplitudes());
            let mut rho: CMat = Array2::zeros((d, d));
            for i in 0..d {
                for j in 0..d {
                    rho[[i, j]] = out[i] * out[j].conj();
                }
            }
            c.settings
                .iter()
                .map(|s| s.iter().map(|e| e.probability(&rho)).collect())
                .collect()
        })
        .collect();
    let t0 = Instant::now();
    let cfg = QptConfig { max_iters: 150, ..Default::default() };
    let est = estimate_process(&rec, &probes, &c, &cfg).unwrap();
    let target = unitary_to_chi(u.entries()).unwrap();
    let f = process_fidelity(&est.chi, &target).unwrap();
    eprintln!(
        "d=16: infidelity {:.3e}, obj {:.3e}, iters {}, cp {:.2e}, tp {:.2e}, time {:.1}s",
        1.0 - f,
        est.objective,
        est.iterations,
        est.cp_violation,
        est.tp_violation,
        t0.elapsed().as_secs_f64()
    );
}
