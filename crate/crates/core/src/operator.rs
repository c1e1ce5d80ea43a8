//! Dense complex Hermitian algebra on finite-dimensional Hilbert spaces.
//!
//! Everything above this module talks in terms of [`Hermitian`],
//! [`DensityOperator`], [`PureState`], [`Povm`] and [`Ensemble`]. Constructors
//! validate their invariants once; values produced by the iterative solvers
//! go through the crate-private `*_unchecked` paths after being symmetrized.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result, Violation};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Max-entry deviation from `A = A†` accepted on input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semi-definite operator.
pub const PSD_TOL: f64 = 1e-10;
/// Trace deviation accepted for a density operator.
pub const TRACE_TOL: f64 = 1e-10;
/// Completeness residual accepted for a POVM.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Norm deviation accepted for a pure state vector.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest one count as kernel.
pub const RANK_CUTOFF: f64 = 1e-12;

const IMAG_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "operator must be a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        let deviation = max_abs(&(&m - m.adjoint()));
        if deviation > HERMITIAN_TOL {
            return Err(Error::Invalid {
                what: "hermitian operator",
                violations: vec![Violation::NonHermitian { element: None, deviation }],
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// `(m + m†)/2` without any tolerance check.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Hermitian((m + adj) * c(0.5))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        Hermitian(CMatrix::from_diagonal(&d))
    }

    pub fn identity(dim: usize) -> Self {
        Hermitian(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Hermitian(CMatrix::zeros(dim, dim))
    }

    /// `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &CVector) -> Self {
        Hermitian(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Hermitian(&self.0 * c(s))
    }

    pub fn add(&self, other: &Hermitian) -> Self {
        Hermitian(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Hermitian) -> Self {
        Hermitian(&self.0 - &other.0)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u * &self.0 * u.adjoint())
    }

    pub fn eig(&self) -> Eigen {
        eig_hermitian(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.0)
    }
}

/// Spectral decomposition ordered by descending `|λ|`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.vectors.first().map_or(0, |v| v.len());
        self.values
            .iter()
            .zip(&self.vectors)
            .fold(CMatrix::zeros(d, d), |acc, (&l, v)| acc + v * v.adjoint() * c(l))
    }
}

/// Eigendecomposition of a Hermitian operator. Ordering is by descending
/// absolute eigenvalue; ties keep the order of the underlying factorization.
pub fn eig_hermitian(h: &Hermitian) -> Eigen {
    let se = h.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    // stable sort: equal magnitudes keep ascending factorization index
    order.sort_by(|&a, &b| se.eigenvalues[b].abs().total_cmp(&se.eigenvalues[a].abs()));
    Eigen {
        values: order.iter().map(|&i| se.eigenvalues[i]).collect(),
        vectors: order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect(),
    }
}

/// `tr(AB)` for Hermitian `A`, `B`; the imaginary residue must be rounding noise.
pub fn trace_inner(a: &Hermitian, b: &Hermitian) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let z = a.0.iter().zip(b.0.transpose().iter()).fold(c(0.0), |acc, (x, y)| acc + x * y);
    let scale = 1f64.max(a.0.norm() * b.0.norm());
    if z.im.abs() > IMAG_TOL * scale {
        return Err(Error::Numeric(format!("tr(AB) has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

/// Real part of `tr(AB)` with no checks; both operands Hermitian by construction.
pub(crate) fn trace_inner_re(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

/// `⟨v|A|v⟩`, real part.
pub(crate) fn expectation(v: &CVector, a: &CMatrix) -> f64 {
    v.dotc(&(a * v)).re
}

pub fn validate_density(rho: &Hermitian, tol: f64) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let min = rho.min_eigenvalue();
    if min < -tol {
        violations.push(Violation::NegativeEigenvalue { element: None, value: min });
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > tol {
        violations.push(Violation::TraceDeviation { trace });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

pub fn validate_povm(elements: &[Hermitian], tol: f64) -> Result<(), Vec<Violation>> {
    povm_violations(elements, tol, tol)
}

fn povm_violations(
    elements: &[Hermitian],
    psd_tol: f64,
    completeness_tol: f64,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let Some(first) = elements.first() else {
        return Err(vec![Violation::Completeness { residual: 1.0 }]);
    };
    let d = first.dim();
    let mut sum = CMatrix::zeros(d, d);
    for (i, f) in elements.iter().enumerate() {
        if f.dim() != d {
            violations.push(Violation::DimensionMismatch { element: i, expected: d, found: f.dim() });
            continue;
        }
        let min = f.min_eigenvalue();
        if min < -psd_tol {
            violations.push(Violation::NegativeEigenvalue { element: Some(i), value: min });
        }
        sum += &f.0;
    }
    let residual = max_abs(&(sum - CMatrix::identity(d, d)));
    if residual > completeness_tol {
        violations.push(Violation::Completeness { residual });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Returns `(P^{-1/2} on supp P, projector onto ker P)`.
pub(crate) fn inverse_sqrt_split(p: &Hermitian) -> Result<(Hermitian, Hermitian)> {
    let se = p.0.clone().symmetric_eigen();
    let lmax = se.eigenvalues.iter().copied().fold(0.0, f64::max);
    let lmin = se.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin < -PSD_TOL * lmax.max(1.0) {
        return Err(Error::Numeric(format!("operator is not PSD (eigenvalue {lmin:e})")));
    }
    let cutoff = RANK_CUTOFF * lmax;
    let d = p.dim();
    let mut inv = CMatrix::zeros(d, d);
    let mut ker = CMatrix::zeros(d, d);
    for (i, &l) in se.eigenvalues.iter().enumerate() {
        let v = se.eigenvectors.column(i);
        let proj = v * v.adjoint();
        if lmax > 0.0 && l > cutoff {
            inv += proj * c(1.0 / l.sqrt());
        } else {
            ker += proj;
        }
    }
    Ok((Hermitian::symmetrized(inv), Hermitian::symmetrized(ker)))
}

/// Pseudo-inverse square root: `P^{-1/2}` on the support of `P`, zero on its kernel.
pub fn sqrt_pinv(p: &Hermitian) -> Result<Hermitian> {
    inverse_sqrt_split(p).map(|(inv, _)| inv)
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state vector must be non-empty".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("state vector has norm {norm}")));
        }
        Ok(PureState(amplitudes))
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(PureState(amplitudes / c(norm)))
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0);
        Ok(PureState(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

/// A positive semi-definite, unit-trace operator.
///
/// Rank-one states remember their state vector; the leakage solver uses it
/// for an `O(d²)` fast path.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: Hermitian,
    pure: Option<CVector>,
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.op == other.op
    }
}

impl DensityOperator {
    pub fn new(op: Hermitian) -> Result<Self> {
        validate_density(&op, PSD_TOL.max(TRACE_TOL))
            .map_err(|violations| Error::Invalid { what: "density operator", violations })?;
        Ok(DensityOperator { op, pure: None })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(Hermitian::new(m)?)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityOperator { op: Hermitian::outer(&psi.0), pure: Some(psi.0.clone()) }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { op: Hermitian::identity(dim).scale(1.0 / dim as f64), pure: None }
    }

    /// Attach a state vector when the operator is rank one within [`NORM_TOL`].
    pub fn detect_pure(mut self) -> Self {
        if self.pure.is_none() {
            let eig = eig_hermitian(&self.op);
            if eig.values.get(1).is_none_or(|l| l.abs() <= NORM_TOL) {
                self.pure = PureState::normalized(eig.vectors[0].clone()).ok().map(|p| p.0);
            }
        }
        self
    }

    pub(crate) fn unchecked(op: Hermitian) -> Self {
        DensityOperator { op, pure: None }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Hermitian {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// State vector when the operator was built from a pure state.
    pub fn pure_vector(&self) -> Option<&CVector> {
        self.pure.as_ref()
    }

    /// `tr(ρ A)`.
    pub(crate) fn expect(&self, a: &CMatrix) -> f64 {
        match &self.pure {
            Some(v) => expectation(v, a),
            None => trace_inner_re(self.op.matrix(), a),
        }
    }

    /// `U ρ U†`, keeping the pure-state representation when present.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        match &self.pure {
            Some(v) => {
                let w = u * v;
                DensityOperator { op: Hermitian::outer(&w), pure: Some(w) }
            }
            None => DensityOperator { op: self.op.conjugate_by(u), pure: None },
        }
    }
}

/// Trace distance `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::InvalidArgument(format!(
            "trace distance between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.op.sub(&sigma.op);
    let t: f64 = diff.eigenvalues().iter().map(|l| l.abs()).sum::<f64>() * 0.5;
    Ok(t.clamp(0.0, 1.0))
}

/// A positive operator-valued measure `{F_y}` with `Σ_y F_y = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<Hermitian>,
}

impl Povm {
    pub fn new(elements: Vec<Hermitian>) -> Result<Self> {
        povm_violations(&elements, PSD_TOL, COMPLETENESS_TOL)
            .map_err(|violations| Error::Invalid { what: "POVM", violations })?;
        Ok(Povm { elements })
    }

    pub(crate) fn unchecked(elements: Vec<Hermitian>) -> Self {
        Povm { elements }
    }

    /// Projective measurement in the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|i| {
                let mut diag = vec![0.0; dim];
                diag[i] = 1.0;
                Hermitian::from_real_diagonal(&diag)
            })
            .collect();
        Povm { elements }
    }

    /// The trivial measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Povm { elements: vec![Hermitian::identity(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcome_count(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Hermitian] {
        &self.elements
    }

    pub fn validate(&self, tol: f64) -> Result<(), Vec<Violation>> {
        validate_povm(&self.elements, tol)
    }

    /// Born-rule probabilities `tr(F_y ρ)`.
    pub fn probabilities(&self, rho: &DensityOperator) -> Vec<f64> {
        self.elements.iter().map(|f| rho.expect(f.matrix())).collect()
    }
}

/// A quantum encoding `{ρ^x}` over a finite ordered alphabet.
///
/// Labels outside the support (zero prior probability) are kept for
/// bookkeeping but never take part in leakage computations.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    labels: Vec<String>,
    states: Vec<DensityOperator>,
    support: Vec<bool>,
}

impl Ensemble {
    pub fn new(labels: Vec<String>, states: Vec<DensityOperator>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs at least one state".into()));
        }
        if labels.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} states",
                labels.len(),
                states.len()
            )));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
        }
        let support = vec![true; states.len()];
        Ok(Ensemble { labels, states, support })
    }

    /// Ensemble labelled `0, 1, …`.
    pub fn from_states(states: Vec<DensityOperator>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| i.to_string()).collect();
        Self::new(labels, states)
    }

    pub fn from_pure_states(states: &[PureState]) -> Result<Self> {
        Self::from_states(states.iter().map(PureState::to_density).collect())
    }

    /// Restrict the support to labels whose mask entry is true.
    pub fn with_support(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.states.len() {
            return Err(Error::InvalidArgument("support mask length differs from alphabet".into()));
        }
        if !mask.iter().any(|&b| b) {
            return Err(Error::InvalidArgument("support is empty".into()));
        }
        self.support = mask;
        Ok(self)
    }

    /// Support taken from a prior: labels with positive probability.
    pub fn with_prior(self, prior: &[f64]) -> Result<Self> {
        let mask = prior.iter().map(|&p| p > 0.0).collect();
        self.with_support(mask)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    /// Alphabet indices with positive prior, ascending.
    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&i| self.support[i]).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support.iter().filter(|&&b| b).count()
    }

    pub fn is_pure(&self) -> bool {
        self.states.iter().all(|s| s.pure.is_some())
    }

    /// Apply `f` to every state, keeping labels and support.
    pub fn map_states<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(&DensityOperator) -> Result<DensityOperator>,
    {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
        }
        Ok(Ensemble { labels: self.labels.clone(), states, support: self.support.clone() })
    }

    /// Reorder the alphabet so that new index `i` holds old index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() || perm.iter().any(|&p| p >= self.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the alphabet".into()));
        }
        Ok(Ensemble {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            states: perm.iter().map(|&p| self.states[p].clone()).collect(),
            support: perm.iter().map(|&p| self.support[p]).collect(),
        })
    }
}
