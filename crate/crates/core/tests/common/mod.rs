#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qleak_core::random::{random_pure_state, rng_from_seed, SimRng};
use qleak_core::{CMatrix, Ensemble, PureState};

pub fn rng(seed: u64) -> SimRng {
    rng_from_seed(seed)
}

pub fn random_pure_ensemble(n: usize, d: usize, seed: u64) -> Ensemble {
    let mut r = rng(seed);
    let states: Vec<PureState> = (0..n).map(|_| random_pure_state(d, &mut r).unwrap()).collect();
    Ensemble::from_pure_states(&states).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ_y max_x tr(ρ^x F_y)` computed entry by entry.
pub fn objective_by_hand(povm: &[CMatrix], states: &[CMatrix]) -> f64 {
    povm.iter()
        .map(|f| {
            states
                .iter()
                .map(|rho| (rho * f).trace().re)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// `A^{-1/2}` on the support of a Hermitian PSD matrix, via nalgebra's own
/// eigensolver.
pub fn inv_sqrt_on_support(a: &CMatrix) -> CMatrix {
    let eig = a.clone().symmetric_eigen();
    let d = a.nrows();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-12 {
            let v = eig.eigenvectors.column(i);
            out += v * v.adjoint() * Complex64::new(1.0 / l.sqrt(), 0.0);
        }
    }
    out
}

/// Square-root ("pretty good") measurement `S^{-1/2} ρ^x S^{-1/2}`, completed
/// with the kernel projector of `S` on the first outcome.
pub fn pretty_good_measurement(states: &[CMatrix]) -> Vec<CMatrix> {
    let d = states[0].nrows();
    let s = states.iter().fold(DMatrix::zeros(d, d), |acc, r| acc + r);
    let w = inv_sqrt_on_support(&s);
    let mut povm: Vec<CMatrix> = states.iter().map(|r| &w * r * &w).collect();
    let covered = povm.iter().fold(DMatrix::zeros(d, d), |acc, f| acc + f);
    povm[0] += DMatrix::identity(d, d) - covered;
    povm
}
