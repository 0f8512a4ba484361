//! Multipartite pure states and density matrices over explicit subsystem
//! dimension lists, with tensor products, partial traces, and local operator
//! application.
//!
//! Subsystems are 0-indexed in row-major tensor order: for dimensions
//! `[d0, d1, ...]` the flat index of `|i0 i1 ...⟩` is `(i0*d1 + i1)*d2 + ...`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tolerance;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::EmptySubsystemSet);
    }
    if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidWeights(format!(
            "subsystem dimension {bad} must be at least 2"
        )));
    }
    Ok(dims.iter().product())
}

fn check_subsystems(dims: &[usize], subsystems: &[usize]) -> Result<()> {
    if subsystems.is_empty() {
        return Err(Error::EmptySubsystemSet);
    }
    for &s in subsystems {
        if s >= dims.len() {
            return Err(Error::InvalidSubsystem {
                index: s,
                count: dims.len(),
            });
        }
    }
    let mut seen = vec![false; dims.len()];
    for &s in subsystems {
        if seen[s] {
            return Err(Error::InvalidPartition(format!(
                "subsystem {s} listed twice"
            )));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Row-major strides for a dimension list.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}

/// Flat-index offsets of all assignments of the given axes, enumerated
/// row-major in the order the axes are listed.
fn axis_offsets(dims: &[usize], axes: &[usize]) -> Vec<usize> {
    let strides = strides(dims);
    let sizes: Vec<usize> = axes.iter().map(|&a| dims[a]).collect();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut off = 0;
        for i in (0..axes.len()).rev() {
            let idx = rest % sizes[i];
            rest /= sizes[i];
            off += idx * strides[axes[i]];
        }
        out.push(off);
    }
    out
}

fn complement(dims_len: usize, axes: &[usize]) -> Vec<usize> {
    (0..dims_len).filter(|i| !axes.contains(i)).collect()
}

/// Apply `op` to the row index of `m` on the given target axes, i.e. compute
/// `L·m` where `L` is `op` lifted to the full space.
fn apply_to_rows(m: &CMatrix, dims: &[usize], op: &CMatrix, targets: &[usize]) -> Result<CMatrix> {
    check_subsystems(dims, targets)?;
    let dt: usize = targets.iter().map(|&t| dims[t]).product();
    if op.nrows() != dt || op.ncols() != dt {
        return Err(Error::DimensionMismatch {
            expected: dt,
            got: op.nrows().max(op.ncols()),
        });
    }
    let t_off = axis_offsets(dims, targets);
    let comp = complement(dims.len(), targets);
    let c_off = if comp.is_empty() {
        vec![0usize]
    } else {
        axis_offsets(dims, &comp)
    };
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for col in 0..m.ncols() {
        for &base in &c_off {
            for r in 0..dt {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..dt {
                    acc += op[(r, s)] * m[(base + t_off[s], col)];
                }
                out[(base + t_off[r], col)] = acc;
            }
        }
    }
    Ok(out)
}

fn apply_to_vector(v: &CVector, dims: &[usize], op: &CMatrix, targets: &[usize]) -> Result<CVector> {
    check_subsystems(dims, targets)?;
    let dt: usize = targets.iter().map(|&t| dims[t]).product();
    if op.nrows() != dt || op.ncols() != dt {
        return Err(Error::DimensionMismatch {
            expected: dt,
            got: op.nrows().max(op.ncols()),
        });
    }
    let t_off = axis_offsets(dims, targets);
    let comp = complement(dims.len(), targets);
    let c_off = if comp.is_empty() {
        vec![0usize]
    } else {
        axis_offsets(dims, &comp)
    };
    let mut out = CVector::zeros(v.len());
    for &base in &c_off {
        for r in 0..dt {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..dt {
                acc += op[(r, s)] * v[base + t_off[s]];
            }
            out[base + t_off[r]] = acc;
        }
    }
    Ok(out)
}

/// Normalized pure state of one or more subsystems.
///
/// Operator application may leave the state unnormalized (measurement
/// branches need the unnormalized weight); [`PureState::validate`] and
/// [`PureState::normalized`] restore the contract explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    /// Validating constructor: amplitude length must equal the product of
    /// `dims` and the norm must be 1 within the global tolerance.
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let state = Self { amplitudes, dims };
        state.validate()?;
        Ok(state)
    }

    /// Constructor that normalizes the amplitudes.
    pub fn from_unnormalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if norm < 1e-150 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
            dims,
        })
    }

    pub(crate) fn from_raw(amplitudes: CVector, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }

    /// Computational basis state `|i0 i1 ...⟩`.
    pub fn basis_state(dims: &[usize], indices: &[usize]) -> Result<Self> {
        let total = check_dims(dims)?;
        if indices.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: indices.len(),
            });
        }
        let st = strides(dims);
        let mut flat = 0usize;
        for (i, (&idx, &d)) in indices.iter().zip(dims).enumerate() {
            if idx >= d {
                return Err(Error::OutcomeOutOfRange { outcome: idx, dim: d });
            }
            flat += idx * st[i];
        }
        let mut amplitudes = CVector::zeros(total);
        amplitudes[flat] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            dims: dims.to_vec(),
        })
    }

    /// Bipartite state `Σ_k √w_k |kk⟩` on dimensions `[d, d]` from Schmidt
    /// weights `w` (nonnegative, summing to 1).
    pub fn from_schmidt_weights(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        if d < 2 {
            return Err(Error::InvalidWeights(
                "need at least two Schmidt weights".into(),
            ));
        }
        if let Some(&bad) = weights.iter().find(|&&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "weight {bad} must be finite and nonnegative"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance::global().max(1e-9) {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let mut amplitudes = CVector::zeros(d * d);
        for (k, &w) in weights.iter().enumerate() {
            amplitudes[k * d + k] = Complex64::new((w / total).sqrt(), 0.0);
        }
        Ok(Self {
            amplitudes,
            dims: vec![d, d],
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Squared norm; the branch weight of an unnormalized measurement outcome.
    pub fn weight(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tolerance::global() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        Self::from_unnormalized(self.amplitudes.clone(), self.dims.clone())
    }

    /// Tensor product; dimension lists concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amplitudes: CVector::from_column_slice(amplitudes.as_slice()),
            dims,
        }
    }

    /// `|ψ⟩⟨ψ|` as a density matrix (input must be normalized).
    pub fn density_matrix(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_raw(m, self.dims.clone())
    }

    /// Apply an operator to the listed target subsystems (in the listed
    /// order). The result may be unnormalized.
    pub fn apply_operator(&self, op: &CMatrix, targets: &[usize]) -> Result<Self> {
        let amplitudes = apply_to_vector(&self.amplitudes, &self.dims, op, targets)?;
        Ok(Self {
            amplitudes,
            dims: self.dims.clone(),
        })
    }

    /// Contract `⟨probe|` over the target subsystems, leaving the remaining
    /// subsystems in their original order. The result is unnormalized; its
    /// squared norm is the probability of the projective outcome `|probe⟩`.
    pub fn partial_inner(&self, probe: &CVector, targets: &[usize]) -> Result<Self> {
        check_subsystems(&self.dims, targets)?;
        let dt: usize = targets.iter().map(|&t| self.dims[t]).product();
        if probe.len() != dt {
            return Err(Error::DimensionMismatch {
                expected: dt,
                got: probe.len(),
            });
        }
        let comp = complement(self.dims.len(), targets);
        if comp.is_empty() {
            return Err(Error::InvalidPartition(
                "partial_inner must leave at least one subsystem".into(),
            ));
        }
        let t_off = axis_offsets(&self.dims, targets);
        let c_off = axis_offsets(&self.dims, &comp);
        let mut amplitudes = CVector::zeros(c_off.len());
        for (ci, &base) in c_off.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ti, &toff) in t_off.iter().enumerate() {
                acc += probe[ti].conj() * self.amplitudes[base + toff];
            }
            amplitudes[ci] = acc;
        }
        let dims = comp.iter().map(|&i| self.dims[i]).collect();
        Ok(Self { amplitudes, dims })
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                got: other.total_dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }
}

/// Density matrix over an explicit subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace, positive semidefinite,
    /// all within the global tolerance.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let dm = Self { matrix, dims };
        dm.validate()?;
        Ok(dm)
    }

    /// Trusted constructor for matrices already known to be valid (or
    /// deliberately unnormalized, as in measurement branches).
    pub fn from_raw(matrix: CMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|` from a pure-state mixture.
    pub fn from_mixture(terms: &[(f64, PureState)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let dims = terms[0].1.dims().to_vec();
        let total = terms[0].1.total_dim();
        let mut matrix = CMatrix::zeros(total, total);
        let mut weight_sum = 0.0;
        for (w, psi) in terms {
            if psi.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: total,
                    got: psi.total_dim(),
                });
            }
            if !(*w >= 0.0) {
                return Err(Error::InvalidWeights(format!("weight {w} negative")));
            }
            weight_sum += w;
            matrix += (psi.amplitudes() * psi.amplitudes().adjoint())
                .map(|z| z * Complex64::new(*w, 0.0));
        }
        if (weight_sum - 1.0).abs() > tolerance::global().max(1e-9) {
            return Err(Error::InvalidWeights(format!(
                "mixture weights sum to {weight_sum}, expected 1"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²` (real part).
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let tol = tolerance::global();
        let herm_dev = linalg::max_abs_diff(&self.matrix, &self.matrix.adjoint());
        if herm_dev > tol {
            return Err(Error::NotHermitian { deviation: herm_dev });
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let (values, _) = linalg::hermitian_eigen(&self.matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// Tensor product; dimension lists concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        let matrix = self.matrix.kronecker(&other.matrix);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { matrix, dims }
    }

    /// Trace out everything except the listed subsystems; the result keeps
    /// them in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_subsystems(&self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let traced = complement(self.dims.len(), &keep_sorted);
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let k_off = axis_offsets(&self.dims, &keep_sorted);
        let t_off = axis_offsets(&self.dims, &traced);
        let dk = k_off.len();
        let mut matrix = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for &t in &t_off {
                    acc += self.matrix[(k_off[a] + t, k_off[b] + t)];
                }
                matrix[(a, b)] = acc;
            }
        }
        let dims = keep_sorted.iter().map(|&i| self.dims[i]).collect();
        Ok(Self { matrix, dims })
    }

    /// `op · ρ · op†` on the listed target subsystems. Normalization is the
    /// caller's responsibility: the trace of the result is the outcome
    /// probability when `op` is a Kraus operator.
    pub fn apply_operator(&self, op: &CMatrix, targets: &[usize]) -> Result<Self> {
        let rows_done = apply_to_rows(&self.matrix, &self.dims, op, targets)?;
        let matrix = apply_to_rows(&rows_done.adjoint(), &self.dims, op, targets)?.adjoint();
        Ok(Self {
            matrix,
            dims: self.dims.clone(),
        })
    }

    /// Rescale by the trace to restore unit normalization.
    pub fn normalized(&self) -> Result<Self> {
        let trace = self.trace().re;
        if trace < 1e-150 {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(Self {
            matrix: self.matrix.map(|z| z / trace),
            dims: self.dims.clone(),
        })
    }

    /// Extract the pure state of a rank-1 density matrix.
    pub fn to_pure(&self) -> Result<PureState> {
        let purity = self.purity();
        if (purity - 1.0).abs() > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "state is not pure (Tr ρ² = {purity})"
            )));
        }
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        let top = vectors.column(0).into_owned();
        debug_assert!(values[0] > 0.9);
        PureState::from_unnormalized(top, self.dims.clone())
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                got: other.total_dim(),
            });
        }
        let s = linalg::hermitian_sqrt(&self.matrix);
        let inner = linalg::hermitize(&(&s * &other.matrix * &s));
        let (values, _) = linalg::hermitian_eigen(&inner);
        // drop round-off eigenvalues: their square roots would add O(√ε) noise
        let floor = values.first().copied().unwrap_or(0.0).max(0.0) * 1e-13;
        let root_sum: f64 = values.iter().filter(|&&v| v > floor).map(|&v| v.sqrt()).sum();
        Ok(root_sum * root_sum)
    }
}

/// A pure or mixed state, as produced by measurements and protocol runs.
#[derive(Debug, Clone)]
pub enum QState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QState {
    pub fn dims(&self) -> &[usize] {
        match self {
            QState::Pure(p) => p.dims(),
            QState::Mixed(m) => m.dims(),
        }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            QState::Pure(p) => p.density_matrix(),
            QState::Mixed(m) => m.clone(),
        }
    }

    /// Fidelity between states of matching subsystem structure.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (QState::Pure(a), QState::Pure(b)) => a.fidelity(b),
            (QState::Pure(p), QState::Mixed(m)) | (QState::Mixed(m), QState::Pure(p)) => {
                if p.dims() != m.dims() {
                    return Err(Error::DimensionMismatch {
                        expected: p.total_dim(),
                        got: m.total_dim(),
                    });
                }
                Ok((p.amplitudes().adjoint() * m.matrix() * p.amplitudes())[(0, 0)].re)
            }
            (QState::Mixed(a), QState::Mixed(b)) => a.fidelity(b),
        }
    }
}

/// One measurement outcome: a probability and the post-measurement state.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub probability: f64,
    pub state: QState,
}

/// Probability distribution over post-measurement states.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    outcomes: Vec<Outcome>,
}

impl OutcomeDistribution {
    /// Validating constructor: nonempty, probabilities positive and summing
    /// to 1 within [`tolerance::PROBABILITY_SUM`].
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if let Some(bad) = outcomes
            .iter()
            .find(|o| !(o.probability > 0.0) || !o.probability.is_finite())
        {
            return Err(Error::InvalidWeights(format!(
                "outcome probability {} must be positive",
                bad.probability
            )));
        }
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        if (total - 1.0).abs() > tolerance::PROBABILITY_SUM {
            return Err(Error::ProbabilityNotNormalized { total });
        }
        Ok(Self { outcomes })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Outcome> {
        self.outcomes.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_phi_plus() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
            vec![2, 2],
        )
        .unwrap()
    }

    fn random_density(dims: &[usize], rng: &mut ChaCha12Rng) -> DensityMatrix {
        let n: usize = dims.iter().product();
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.map(|z| z / tr), dims.to_vec()).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = PureState::basis_state(&[2], &[0]).unwrap();
        let joint = zero.tensor(&zero);
        assert_eq!(joint.dims(), &[2, 2]);
        assert_eq!(joint.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(joint.amplitudes().iter().skip(1).map(|z| z.norm()).sum::<f64>(), 0.0);
    }

    #[test]
    fn tensor_preserves_norm_and_trace() {
        let b = bell_phi_plus();
        let double = b.tensor(&b);
        assert_eq!(double.total_dim(), 16);
        assert!((double.norm() - 1.0).abs() < 1e-12);

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let rho = random_density(&[2], &mut rng);
        let sigma = random_density(&[3], &mut rng);
        let prod = rho.tensor(&sigma);
        assert!((prod.trace().re - 1.0).abs() < 1e-12);
        assert_eq!(prod.dims(), &[2, 3]);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let rho = bell_phi_plus().density_matrix();
        let reduced = rho.partial_trace(&[0]).unwrap();
        assert_eq!(reduced.dims(), &[2]);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        assert!(linalg::max_abs_diff(reduced.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn partial_trace_keep_all_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rho = random_density(&[2, 3], &mut rng);
        let same = rho.partial_trace(&[0, 1]).unwrap();
        assert!(linalg::max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state_factors() {
        // |ψ⟩ with weights (0.8, 0.2) and |χ⟩ with (0.6, 0.4): tracing the two
        // middle subsystems leaves diag(0.8,0.2) ⊗ diag(0.6,0.4).
        let psi = PureState::from_schmidt_weights(&[0.8, 0.2]).unwrap();
        let chi = PureState::from_schmidt_weights(&[0.6, 0.4]).unwrap();
        let full = psi.tensor(&chi).density_matrix();
        let reduced = full.partial_trace(&[0, 3]).unwrap();
        let expected_diag = [0.48, 0.32, 0.12, 0.08];
        for (i, &w) in expected_diag.iter().enumerate() {
            assert!((reduced.matrix()[(i, i)].re - w).abs() < 1e-12);
        }
        let offdiag: f64 = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| reduced.matrix()[(a, b)].norm())
            .sum();
        assert!(offdiag < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let rho = bell_phi_plus().density_matrix();
        assert!(matches!(
            rho.partial_trace(&[]),
            Err(Error::EmptySubsystemSet)
        ));
    }

    #[test]
    fn partial_trace_preserves_trace_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for dims in [vec![2, 2], vec![2, 3], vec![2, 2, 2], vec![3, 2, 2]] {
            let rho = random_density(&dims, &mut rng);
            for k in 0..dims.len() {
                let red = rho.partial_trace(&[k]).unwrap();
                assert!((red.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tensor_then_partial_trace_recovers_factor() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let rho = random_density(&[2, 2], &mut rng);
        let sigma = random_density(&[3], &mut rng);
        let joint = rho.tensor(&sigma);
        let back = joint.partial_trace(&[0, 1]).unwrap();
        assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn apply_identity_is_noop() {
        let b = bell_phi_plus();
        let out = b.apply_operator(&linalg::identity(2), &[1]).unwrap();
        assert_eq!(out.amplitudes(), b.amplitudes());
    }

    #[test]
    fn apply_pauli_x_flips_qubit() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let zero = PureState::basis_state(&[2], &[0]).unwrap();
        let one = zero.apply_operator(&x, &[0]).unwrap();
        assert!((one.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let b = bell_phi_plus();
        let bad = CMatrix::zeros(3, 3);
        assert!(matches!(
            b.apply_operator(&bad, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_operator_on_density_matches_pure_route() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let psi = {
            let v = CVector::from_fn(12, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            PureState::from_unnormalized(v, vec![2, 3, 2]).unwrap()
        };
        let op = CMatrix::from_fn(6, 6, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let via_pure = psi.apply_operator(&op, &[1, 2]).unwrap();
        let via_dm = psi.density_matrix().apply_operator(&op, &[1, 2]).unwrap();
        let expected = via_pure.amplitudes() * via_pure.amplitudes().adjoint();
        assert!(linalg::max_abs_diff(via_dm.matrix(), &expected) < 1e-10);
        // trace of the unnormalized result equals the branch weight
        assert!((via_dm.trace().re - via_pure.weight()).abs() < 1e-10);
    }

    #[test]
    fn apply_operator_respects_target_order() {
        // SWAP on targets [0,1] vs [1,0]: applying an asymmetric two-site
        // operator with reversed target order must transpose its action.
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let v = CVector::from_fn(4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let psi = PureState::from_unnormalized(v, vec![2, 2]).unwrap();
        let op = CMatrix::from_fn(4, 4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let swap = CMatrix::from_row_slice(
            4,
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        );
        let direct = psi.apply_operator(&op, &[1, 0]).unwrap();
        let via_swap = psi.apply_operator(&(&swap * &op * &swap), &[0, 1]).unwrap();
        assert!((direct.amplitudes() - via_swap.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn partial_inner_projects_out_subsystem() {
        // ⟨0|₁ on |Φ+⟩ leaves |0⟩/√2 unnormalized.
        let b = bell_phi_plus();
        let probe = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let rest = b.partial_inner(&probe, &[1]).unwrap();
        assert_eq!(rest.dims(), &[2]);
        assert!((rest.weight() - 0.5).abs() < 1e-12);
        assert!((rest.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn density_validation_catches_bad_matrices() {
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(not_herm, vec![2]),
            Err(Error::NotHermitian { .. })
        ));
        let bad_trace = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.9, 0.0), c(0.3, 0.0)]));
        assert!(matches!(
            DensityMatrix::new(bad_trace, vec![2]),
            Err(Error::TraceNotOne { .. })
        ));
        let not_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(matches!(
            DensityMatrix::new(not_psd, vec![2]),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn uhlmann_fidelity_agrees_with_pure_overlap() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let v1 = CVector::from_fn(4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let v2 = CVector::from_fn(4, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let p1 = PureState::from_unnormalized(v1, vec![2, 2]).unwrap();
        let p2 = PureState::from_unnormalized(v2, vec![2, 2]).unwrap();
        let f_pure = p1.fidelity(&p2).unwrap();
        let f_mixed = p1.density_matrix().fidelity(&p2.density_matrix()).unwrap();
        assert!((f_pure - f_mixed).abs() < 1e-9);
    }
}
