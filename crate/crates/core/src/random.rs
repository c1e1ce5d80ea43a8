//! Seeded sampling of states, unitaries and isometries.
//!
//! All randomness goes through an explicit [`SimRng`]. Concurrent tasks get
//! their own generator from [`task_rng`], so results depend only on the
//! master seed and the task index, never on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, CVector, Hermitian, PureState};

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for task `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator owned by task `index` of a run seeded with `master`.
pub fn task_rng(master: u64, index: u64) -> SimRng {
    rng_from_seed(derive_seed(master, index))
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state: a normalized vector of i.i.d. complex Gaussians.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
        if v.norm() > 0.0 {
            return PureState::normalized(v);
        }
    }
}

/// Haar-random unitary from the QR factorization of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Haar-random isometry `C^cols → C^rows` (`rows ≥ cols`).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    if cols > rows {
        return Err(Error::InvalidArgument(format!("isometry from {cols} into {rows} dimensions")));
    }
    Ok(haar_unitary(rows, rng).columns(0, cols).into_owned())
}

/// Random Hermitian matrix with Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Hermitian {
    let g = ginibre(dim, dim, rng);
    Hermitian::symmetrized(g)
}

/// Random positive semi-definite matrix `G G†`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Hermitian {
    let g = ginibre(dim, dim, rng);
    Hermitian::symmetrized(&g * g.adjoint())
}
