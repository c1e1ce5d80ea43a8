//! Exact simulation of encode → channel → measure → post-process inference
//! pipelines, and audits of the leakage-based accuracy bounds.
//!
//! Accuracy `P{Ẑ = Z}` is evaluated in closed form from Born's rule; no shot
//! noise is simulated. Two versions of each bound are reported: the
//! multiplier `2^Q` (the one that holds) and the multiplier `Q`, which fails
//! already for perfect discrimination of orthogonal states.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::leakage::{compute_leakage, normalize_to_povm, SolverConfig};
use crate::operator::{c, validate_density, CMatrix, DensityOperator, Ensemble, Hermitian, Povm};
use crate::random::{derive_seed, haar_isometry, random_psd, random_pure_state, rng_from_seed};

const PMF_TOL: f64 = 1e-12;
const KRAUS_TOL: f64 = 1e-10;
const CHANNEL_OUTPUT_TOL: f64 = 1e-8;
/// Slack allowed when checking `accuracy ≤ bound`.
pub const BOUND_TOL: f64 = 1e-9;

/// Joint distribution `P(x, z)`, indexed `[x][z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    probs: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let nz = probs.first().map_or(0, Vec::len);
        if probs.is_empty() || nz == 0 || probs.iter().any(|row| row.len() != nz) {
            return Err(Error::InvalidArgument("joint pmf must be a non-empty rectangular table".into()));
        }
        if probs.iter().flatten().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidArgument("joint pmf has negative or non-finite entries".into()));
        }
        let total: f64 = probs.iter().flatten().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(Error::InvalidArgument(format!("joint pmf sums to {total}")));
        }
        Ok(JointPmf { probs })
    }

    /// `Z = X` with `X` uniform on `n` symbols.
    pub fn uniform_identity(n: usize) -> Result<Self> {
        let p = 1.0 / n as f64;
        Self::new((0..n).map(|x| (0..n).map(|z| if x == z { p } else { 0.0 }).collect()).collect())
    }

    pub fn random<R: Rng + ?Sized>(nx: usize, nz: usize, rng: &mut R) -> Result<Self> {
        let raw: Vec<Vec<f64>> =
            (0..nx).map(|_| (0..nz).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect()).collect();
        let total: f64 = raw.iter().flatten().sum();
        Self::new(raw.into_iter().map(|row| row.into_iter().map(|p| p / total).collect()).collect())
    }

    pub fn input_size(&self) -> usize {
        self.probs.len()
    }

    pub fn output_size(&self) -> usize {
        self.probs[0].len()
    }

    pub fn prob(&self, x: usize, z: usize) -> f64 {
        self.probs[x][z]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.probs.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_z(&self) -> Vec<f64> {
        (0..self.output_size()).map(|z| self.probs.iter().map(|row| row[z]).sum()).collect()
    }

    /// Accuracy of the best estimator that ignores X: `(argmax_z P(z), max_z P(z))`,
    /// ties to the smallest `z`.
    pub fn best_blind_guess(&self) -> (usize, f64) {
        self.marginal_z()
            .into_iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (z, p)| if p > best.1 { (z, p) } else { best })
    }
}

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidArgument("channel needs at least one Kraus operator".into()));
        };
        let (rows, cols) = first.shape();
        if rows == 0 || cols == 0 || kraus.iter().any(|k| k.shape() != (rows, cols)) {
            return Err(Error::InvalidArgument("Kraus operators must share a non-empty shape".into()));
        }
        let sum = kraus.iter().fold(CMatrix::zeros(cols, cols), |acc, k| acc + k.adjoint() * k);
        let residual = (sum - CMatrix::identity(cols, cols)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual > KRAUS_TOL {
            return Err(Error::InvalidArgument(format!("Kraus operators are not trace preserving (residual {residual:e})")));
        }
        Ok(QuantumChannel { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel { kraus: vec![CMatrix::identity(dim, dim)] }
    }

    /// `ρ ↦ U ρ U†`; `u` must be unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Kraus `{I/2, X/2, Y/2, Z/2}`: every qubit state goes to `I/2`.
    pub fn fully_depolarizing_qubit() -> Self {
        let h = c(0.5);
        let i = num_complex::Complex64::new(0.0, 0.5);
        let z = c(0.0);
        QuantumChannel {
            kraus: vec![
                CMatrix::from_row_slice(2, 2, &[h, z, z, h]),
                CMatrix::from_row_slice(2, 2, &[z, h, h, z]),
                CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
                CMatrix::from_row_slice(2, 2, &[h, z, z, -h]),
            ],
        }
    }

    /// Completely depolarizing channel in any dimension: Kraus `|i⟩⟨j|/√d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let s = c(1.0 / (dim as f64).sqrt());
        let kraus = (0..dim * dim)
            .map(|k| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(k / dim, k % dim)] = s;
                m
            })
            .collect();
        QuantumChannel { kraus }
    }

    /// Measure in the computational basis and forget the outcome.
    pub fn dephasing(dim: usize) -> Self {
        let kraus = (0..dim)
            .map(|i| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(i, i)] = c(1.0);
                m
            })
            .collect();
        QuantumChannel { kraus }
    }

    /// Random channel from a Haar isometry `C^d_in → C^d_out ⊗ C^env`
    /// followed by tracing out the environment.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, output_dim: usize, env_dim: usize, rng: &mut R) -> Result<Self> {
        let v = haar_isometry(output_dim * env_dim, input_dim, rng)?;
        let kraus = (0..env_dim)
            .map(|e| CMatrix::from_fn(output_dim, input_dim, |i, j| v[(i * env_dim + e, j)]))
            .collect();
        Self::new(kraus)
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }
}

/// `N(ρ) = Σ_k K_k ρ K_k†`.
pub fn apply_channel(channel: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != channel.input_dim() {
        return Err(Error::DimensionMismatch { expected: channel.input_dim(), found: rho.dim() });
    }
    if let ([k], Some(v)) = (channel.kraus(), rho.pure_vector()) {
        if let Ok(psi) = crate::operator::PureState::normalized(k * v) {
            return Ok(psi.to_density());
        }
    }
    let d = channel.output_dim();
    let out = channel
        .kraus()
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k * rho.matrix() * k.adjoint());
    let out = Hermitian::symmetrized(out);
    validate_density(&out, CHANNEL_OUTPUT_TOL)
        .map_err(|violations| Error::Invalid { what: "channel output", violations })?;
    Ok(DensityOperator::unchecked(out))
}

/// Classical post-processing `γ_{zy} = P{Ẑ = z | Y = y}`, indexed `[z][y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PostProcessor {
    gamma: Vec<Vec<f64>>,
}

impl PostProcessor {
    pub fn new(gamma: Vec<Vec<f64>>) -> Result<Self> {
        let ny = gamma.first().map_or(0, Vec::len);
        if gamma.is_empty() || ny == 0 || gamma.iter().any(|row| row.len() != ny) {
            return Err(Error::InvalidArgument("post-processor must be a non-empty rectangular table".into()));
        }
        if gamma.iter().flatten().any(|&g| !(0.0..=1.0).contains(&g)) {
            return Err(Error::InvalidArgument("post-processor entries must lie in [0, 1]".into()));
        }
        for y in 0..ny {
            let s: f64 = gamma.iter().map(|row| row[y]).sum();
            if (s - 1.0).abs() > PMF_TOL {
                return Err(Error::InvalidArgument(format!("column {y} of the post-processor sums to {s}")));
            }
        }
        Ok(PostProcessor { gamma })
    }

    /// `Ẑ = Y`.
    pub fn identity(n: usize) -> Self {
        PostProcessor { gamma: (0..n).map(|z| (0..n).map(|y| if y == z { 1.0 } else { 0.0 }).collect()).collect() }
    }

    /// Always answer `z`, whatever was measured.
    pub fn constant(z: usize, outputs: usize, outcomes: usize) -> Result<Self> {
        if z >= outputs {
            return Err(Error::InvalidArgument(format!("output {z} out of range")));
        }
        Self::new((0..outputs).map(|k| vec![if k == z { 1.0 } else { 0.0 }; outcomes]).collect())
    }

    pub fn random<R: Rng + ?Sized>(outputs: usize, outcomes: usize, rng: &mut R) -> Result<Self> {
        let raw: Vec<Vec<f64>> =
            (0..outputs).map(|_| (0..outcomes).map(|_| rng.random::<f64>() + 1e-3).collect()).collect();
        let mut gamma = raw.clone();
        for y in 0..outcomes {
            let s: f64 = raw.iter().map(|row| row[y]).sum();
            for row in gamma.iter_mut() {
                row[y] /= s;
            }
        }
        Self::new(gamma)
    }

    pub fn outputs(&self) -> usize {
        self.gamma.len()
    }

    pub fn outcomes(&self) -> usize {
        self.gamma[0].len()
    }

    pub fn prob(&self, z: usize, y: usize) -> f64 {
        self.gamma[z][y]
    }
}

/// The procedure `(R, N, F, γ)`.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub encoding: Ensemble,
    pub channel: QuantumChannel,
    pub measurement: Povm,
    pub post: PostProcessor,
}

impl Pipeline {
    pub fn new(encoding: Ensemble, channel: QuantumChannel, measurement: Povm, post: PostProcessor) -> Result<Self> {
        if encoding.dim() != channel.input_dim() {
            return Err(Error::DimensionMismatch { expected: channel.input_dim(), found: encoding.dim() });
        }
        if measurement.dim() != channel.output_dim() {
            return Err(Error::DimensionMismatch { expected: channel.output_dim(), found: measurement.dim() });
        }
        if post.outcomes() != measurement.outcome_count() {
            return Err(Error::DimensionMismatch { expected: measurement.outcome_count(), found: post.outcomes() });
        }
        Ok(Pipeline { encoding, channel, measurement, post })
    }

    /// `P(y | x) = tr(F_y N(ρ^x))`, indexed `[x][y]`.
    pub fn likelihoods(&self) -> Result<Vec<Vec<f64>>> {
        self.encoding
            .states()
            .iter()
            .map(|rho| Ok(self.measurement.probabilities(&apply_channel(&self.channel, rho)?)))
            .collect()
    }
}

fn check_alphabets(p: &Pipeline, j: &JointPmf) -> Result<()> {
    if j.input_size() != p.encoding.len() || j.output_size() != p.post.outputs() {
        return Err(Error::InvalidArgument(format!(
            "pipeline alphabets {}→{} do not match distribution {}→{}",
            p.encoding.len(),
            p.post.outputs(),
            j.input_size(),
            j.output_size()
        )));
    }
    Ok(())
}

/// `P{Ẑ = Z} = Σ_{x,z} P(x,z) Σ_y tr(F_y N(ρ^x)) γ_{zy}`.
pub fn pipeline_accuracy(p: &Pipeline, j: &JointPmf) -> Result<f64> {
    check_alphabets(p, j)?;
    let lik = p.likelihoods()?;
    let mut acc = 0.0;
    for (x, row) in lik.iter().enumerate() {
        for z in 0..j.output_size() {
            let hit: f64 = row.iter().enumerate().map(|(y, &py)| py * p.post.prob(z, y)).sum();
            acc += j.prob(x, z) * hit;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub accuracy: f64,
    pub leakage_bits: f64,
    pub max_prior: f64,
    /// `2^Q · max_z P(z)`.
    pub corrected_bound: f64,
    /// `Q · max_z P(z)`.
    pub literal_bound: f64,
    /// `min(|X|, d²) · max_z P(z)`.
    pub dimension_corrected: f64,
    /// `min(log2|X|, 2 log2 d) · max_z P(z)`.
    pub dimension_literal: f64,
    pub corrected_holds: bool,
    pub literal_holds: bool,
    pub dimension_corrected_holds: bool,
    pub dimension_literal_holds: bool,
}

/// Exact accuracy next to both forms of the leakage bound and its
/// dimension-only form. Leakage is taken over the support of X.
pub fn audit_bounds(p: &Pipeline, j: &JointPmf, solver: &SolverConfig) -> Result<BoundReport> {
    let accuracy = pipeline_accuracy(p, j)?;
    let encoding = p.encoding.clone().with_prior(&j.marginal_x())?;
    let res = compute_leakage(&encoding, solver)?;
    let (_, max_prior) = j.best_blind_guess();
    let support = encoding.support_size() as f64;
    let d = encoding.dim() as f64;
    let q = res.leakage_bits;
    let corrected_bound = res.objective * max_prior;
    let literal_bound = q * max_prior;
    let dimension_corrected = support.min(d * d) * max_prior;
    let dimension_literal = support.log2().min(2.0 * d.log2()) * max_prior;
    let holds = |bound: f64| accuracy <= bound + BOUND_TOL;
    Ok(BoundReport {
        accuracy,
        leakage_bits: q,
        max_prior,
        corrected_holds: holds(corrected_bound),
        literal_holds: holds(literal_bound),
        dimension_corrected_holds: holds(dimension_corrected),
        dimension_literal_holds: holds(dimension_literal),
        corrected_bound,
        literal_bound,
        dimension_corrected,
        dimension_literal,
    })
}

/// Leakage of `{ρ^x}` and of `{N(ρ^x)}` in bits.
pub fn data_processing_check(ens: &Ensemble, channel: &QuantumChannel, solver: &SolverConfig) -> Result<(f64, f64)> {
    let before = compute_leakage(ens, solver)?.leakage_bits;
    let processed = ens.map_states(|rho| apply_channel(channel, rho))?;
    let after = compute_leakage(&processed, solver)?.leakage_bits;
    Ok((before, after))
}

/// Basis encoding of `n` symbols, noiseless channel, basis measurement and
/// `Ẑ = Y` with `Z = X` uniform: accuracy 1 with `Q = log2 n`.
pub fn perfect_discrimination(n: usize) -> Result<(Pipeline, JointPmf)> {
    let encoding = crate::encoder::basis_encoding(n, n, |x| x)?;
    let pipeline = Pipeline::new(encoding, QuantumChannel::identity(n), Povm::computational_basis(n), PostProcessor::identity(n))?;
    Ok((pipeline, JointPmf::uniform_identity(n)?))
}

/// Size caps for randomly generated pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditLimits {
    pub dim_max: usize,
    pub alphabet_max: usize,
    pub outcome_max: usize,
}

impl Default for AuditLimits {
    fn default() -> Self {
        AuditLimits { dim_max: 4, alphabet_max: 4, outcome_max: 4 }
    }
}

impl AuditLimits {
    pub fn validate(&self) -> Result<()> {
        if self.dim_max == 0 || self.alphabet_max == 0 || self.outcome_max == 0 {
            return Err(Error::InvalidArgument("audit limits must be at least 1".into()));
        }
        Ok(())
    }
}

/// Random pipeline: Haar pure-state encoding, Stinespring channel, normalized
/// random PSD measurement, column-normalized post-processing and a strictly
/// positive joint distribution.
pub fn random_pipeline<R: Rng + ?Sized>(limits: AuditLimits, rng: &mut R) -> Result<(Pipeline, JointPmf)> {
    limits.validate()?;
    let lo = limits.dim_max.min(2);
    let d_in = rng.random_range(lo..=limits.dim_max);
    let d_out = rng.random_range(lo..=limits.dim_max);
    let nx = rng.random_range(1..=limits.alphabet_max);
    let nz = rng.random_range(1..=limits.alphabet_max);
    let ny = rng.random_range(1..=limits.outcome_max);
    let env = d_in.div_ceil(d_out) + rng.random_range(0..=2);

    let states = (0..nx).map(|_| random_pure_state(d_in, rng)).collect::<Result<Vec<_>>>()?;
    let encoding = Ensemble::from_pure_states(&states)?;
    let channel = QuantumChannel::random(d_in, d_out, env, rng)?;
    let measurement = normalize_to_povm((0..ny).map(|_| random_psd(d_out, rng)).collect())?;
    let post = PostProcessor::random(nz, ny, rng)?;
    let pmf = JointPmf::random(nx, nz, rng)?;
    Ok((Pipeline::new(encoding, channel, measurement, post)?, pmf))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditRow {
    pub case_id: usize,
    pub seed: u64,
    pub dim: usize,
    pub alphabet_in: usize,
    pub alphabet_out: usize,
    pub report: BoundReport,
}

/// Audit `trials` random pipelines; case `i` is generated from
/// `derive_seed(seed, i)`.
pub fn audit_sweep(trials: usize, limits: AuditLimits, seed: u64, solver: &SolverConfig) -> Result<Vec<AuditRow>> {
    limits.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|case_id| {
            let case_seed = derive_seed(seed, case_id as u64);
            let (p, j) = random_pipeline(limits, &mut rng_from_seed(case_seed))?;
            let report = audit_bounds(&p, &j, solver)?;
            Ok(AuditRow {
                case_id,
                seed: case_seed,
                dim: p.encoding.dim(),
                alphabet_in: j.input_size(),
                alphabet_out: j.output_size(),
                report,
            })
        })
        .collect()
}
