mod common;

use common::random_pure_ensemble;
use qleak_core::{
    ascent_step, basis_encoding, compute_leakage, optimize_encoding, optimize_from, sweep_qubits, EncodingProblem,
    OptimizerConfig, SolverConfig,
};

fn small_cfg(restarts: usize, iterations: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig { restarts, iterations, seed, ..Default::default() }
}

#[test]
fn ascent_iterates_stay_pure() {
    let mut ens = random_pure_ensemble(4, 3, 8);
    let cfg = SolverConfig::default();
    for _ in 0..30 {
        let res = compute_leakage(&ens, &cfg).unwrap();
        ens = ascent_step(&ens, &res, 0.1).unwrap();
        for s in ens.states() {
            let eig = s.operator().eig();
            assert!(eig.values[1].abs() <= 1e-12, "second eigenvalue {}", eig.values[1]);
            assert!((s.operator().trace() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn basis_encoding_is_a_fixed_point() {
    for n in [2usize, 4] {
        let start = basis_encoding(n, n, |x| x).unwrap();
        let run = optimize_from(vec![start], &small_cfg(1, 25, 0)).unwrap();
        for q in &run.traces[0] {
            assert!((q - (n as f64).log2()).abs() <= 1e-6, "{q}");
        }
    }
}

#[test]
fn traces_respect_the_cap_and_trend_upward() {
    let (n, d) = (6, 4);
    let run = optimize_encoding(EncodingProblem::new(n, d).unwrap(), &small_cfg(12, 40, 3)).unwrap();
    let cap = (n as f64).log2().min((d as f64).log2());
    for t in &run.traces {
        assert_eq!(t.len(), 41);
        assert!(t.iter().all(|&q| q <= cap + 1e-6));
    }
    for k in 0..run.summary.len() - 5 {
        assert!(run.summary[k + 5].median >= run.summary[k].median - 0.02, "iteration {k}");
    }
    assert!((run.best_leakage_bits - cap).abs() <= 1e-3);
}

#[test]
fn two_symbols_reach_one_bit() {
    let run = optimize_encoding(EncodingProblem::new(2, 2).unwrap(), &OptimizerConfig { restarts: 4, ..Default::default() })
        .unwrap();
    assert!((run.best_leakage_bits - 1.0).abs() <= 1e-3);
}

#[test]
fn zero_iterations_report_the_initial_leakage() {
    let p = EncodingProblem::new(3, 2).unwrap();
    let cfg = small_cfg(1, 0, 5);
    let run = optimize_encoding(p, &cfg).unwrap();
    assert_eq!(run.traces[0].len(), 1);
    let again = optimize_encoding(p, &small_cfg(1, 3, 5)).unwrap();
    assert_eq!(run.traces[0][0].to_bits(), again.traces[0][0].to_bits());
}

#[test]
fn identical_seeds_give_identical_traces() {
    let p = EncodingProblem::new(4, 4).unwrap();
    let a = optimize_encoding(p, &small_cfg(6, 15, 42)).unwrap();
    let b = optimize_encoding(p, &small_cfg(6, 15, 42)).unwrap();
    for (x, y) in a.traces.iter().zip(&b.traces) {
        assert!(x.iter().zip(y).all(|(u, v)| u.to_bits() == v.to_bits()));
    }
    let c = optimize_encoding(p, &small_cfg(6, 15, 43)).unwrap();
    assert_ne!(a.traces, c.traces);
}

#[test]
fn sweep_plateaus_at_log_alphabet() {
    let cfg = small_cfg(8, 60, 1);
    let pts = sweep_qubits(4, 1..=3, &cfg).unwrap();
    let got: Vec<f64> = pts.iter().map(|p| p.leakage_bits).collect();
    for (g, want) in got.iter().zip([1.0, 2.0, 2.0]) {
        assert!((g - want).abs() <= 0.05, "{got:?}");
    }
    assert!(!pts[0].warm_started && pts[1].warm_started);

    let trivial = sweep_qubits(1, 1..=2, &cfg).unwrap();
    assert!(trivial.iter().all(|p| p.leakage_bits.abs() <= 1e-12));
}
