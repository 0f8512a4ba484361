//! Kraus-operator measurements: validation, application to multipartite
//! states, the phase-parametrized projective basis used by the
//! remote-preparation protocol, and seeded random samplers for Monte Carlo.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::state::{DensityMatrix, Outcome, OutcomeDistribution, PureState, QState};
use crate::tolerance;

/// A generalized measurement: Kraus operators indexed by outcome, acting on
/// the listed target subsystems (in the listed order).
#[derive(Debug, Clone)]
pub struct Measurement {
    kraus: Vec<CMatrix>,
    target: Vec<usize>,
}

impl Measurement {
    /// Validating constructor: all operators square of equal size and
    /// `Σ_j M_j† M_j = I` within [`tolerance::KRAUS_COMPLETENESS`].
    pub fn new(kraus: Vec<CMatrix>, target: Vec<usize>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let dim = kraus[0].nrows();
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows().max(k.ncols()),
                });
            }
        }
        if target.is_empty() {
            return Err(Error::EmptySubsystemSet);
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let deviation = linalg::max_abs_diff(&sum, &linalg::identity(dim));
        if deviation > tolerance::KRAUS_COMPLETENESS {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(Self { kraus, target })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn outcome_count(&self) -> usize {
        self.kraus.len()
    }

    /// Operator dimension (the product of the target subsystem dimensions).
    pub fn operator_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// Same Kraus set aimed at different subsystems.
    pub fn retarget(&self, target: Vec<usize>) -> Result<Self> {
        Self::new(self.kraus.clone(), target)
    }

    /// Identity channel (single unitary Kraus operator = I).
    pub fn identity(dim: usize, target: Vec<usize>) -> Result<Self> {
        Self::new(vec![linalg::identity(dim)], target)
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective_from_unitary(u: &CMatrix, target: Vec<usize>) -> Result<Self> {
        let kraus = (0..u.ncols())
            .map(|k| {
                let col = u.column(k).into_owned();
                &col * col.adjoint()
            })
            .collect();
        Self::new(kraus, target)
    }
}

/// Real `d×d` phase matrix θ with entries `θ_mm'` (radians, interpreted
/// modulo 2π) parametrizing the supplier's measurement basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    theta: DMatrix<f64>,
}

impl PhaseMatrix {
    pub fn from_matrix(theta: DMatrix<f64>) -> Result<Self> {
        if theta.nrows() != theta.ncols() || theta.nrows() < 2 {
            return Err(Error::DimensionMismatch {
                expected: theta.nrows().max(2),
                got: theta.ncols(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeights("phase entries must be finite".into()));
        }
        Ok(Self { theta })
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::zeros(d, d))
    }

    /// `θ_mm' = scale · m · m'`. With `scale = π` this is the choice that
    /// saturates the two-qubit bound; with `scale = 2π/d` it maximally
    /// entangles uniform Schmidt weights.
    pub fn bilinear(d: usize, scale: f64) -> Result<Self> {
        Self::from_matrix(DMatrix::from_fn(d, d, |m, mp| scale * (m * mp) as f64))
    }

    /// Independent uniform entries in `[0, 2π)`.
    pub fn random<R: Rng>(d: usize, rng: &mut R) -> Result<Self> {
        Self::from_matrix(DMatrix::from_fn(d, d, |_, _| {
            rng.gen::<f64>() * std::f64::consts::TAU
        }))
    }

    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn get(&self, m: usize, mp: usize) -> f64 {
        self.theta[(m, mp)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.theta
    }
}

/// The `d²` orthonormal basis states
/// `|P(j,j')⟩ = (1/d) Σ_{m,m'} exp(i[2π(dj+j')(dm+m')/d² + θ_mm']) |mm'⟩`.
///
/// Orthonormality holds for every choice of θ: the phase matrix enters as a
/// fixed diagonal unitary applied to a Fourier basis.
pub fn rpbes_basis_states(d: usize, theta: &PhaseMatrix) -> Result<Vec<CVector>> {
    if d < 2 {
        return Err(Error::InvalidWeights(format!("dimension {d} must be at least 2")));
    }
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.dim(),
        });
    }
    let base = std::f64::consts::TAU / (d * d) as f64;
    let inv_d = 1.0 / d as f64;
    let mut states = Vec::with_capacity(d * d);
    for j in 0..d {
        for jp in 0..d {
            let row = (d * j + jp) as f64;
            let v = CVector::from_fn(d * d, |idx, _| {
                let (m, mp) = (idx / d, idx % d);
                let col = (d * m + mp) as f64;
                Complex64::from_polar(inv_d, base * row * col + theta.get(m, mp))
            });
            states.push(v);
        }
    }
    Ok(states)
}

/// Projective measurement onto the `rpbes` basis, targeting the supplier's
/// two subsystems (indices 1 and 2 in the four-share layout).
pub fn rpbes_basis(d: usize, theta: &PhaseMatrix) -> Result<Measurement> {
    let states = rpbes_basis_states(d, theta)?;
    let kraus = states.iter().map(|v| v * v.adjoint()).collect();
    Measurement::new(kraus, vec![1, 2])
}

/// Apply a measurement to a density matrix: outcome `j` occurs with
/// probability `Q_j = Tr(M_j ρ M_j†)` and leaves the normalized state
/// `M_j ρ M_j† / Q_j`. Outcomes with probability below
/// [`tolerance::ZERO_PROBABILITY`] are omitted.
pub fn apply_measurement(state: &DensityMatrix, m: &Measurement) -> Result<OutcomeDistribution> {
    let mut outcomes = Vec::with_capacity(m.outcome_count());
    for k in m.kraus() {
        let branch = state.apply_operator(k, m.target())?;
        let q = branch.trace().re;
        if q < tolerance::ZERO_PROBABILITY {
            continue;
        }
        outcomes.push(Outcome {
            probability: q,
            state: QState::Mixed(branch.normalized()?),
        });
    }
    OutcomeDistribution::new(outcomes)
}

/// Measurement on a pure state: each Kraus branch stays pure.
pub fn apply_measurement_pure(state: &PureState, m: &Measurement) -> Result<OutcomeDistribution> {
    let mut outcomes = Vec::with_capacity(m.outcome_count());
    for k in m.kraus() {
        let branch = state.apply_operator(k, m.target())?;
        let q = branch.weight();
        if q < tolerance::ZERO_PROBABILITY {
            continue;
        }
        outcomes.push(Outcome {
            probability: q,
            state: QState::Pure(branch.normalized()?),
        });
    }
    OutcomeDistribution::new(outcomes)
}

/// Haar-random rank-1 projective measurement on a `dim`-dimensional target.
/// Deterministic in the seed.
pub fn random_projective_measurement(dim: usize, target: Vec<usize>, seed: u64) -> Result<Measurement> {
    if dim < 2 {
        return Err(Error::InvalidWeights(format!("dimension {dim} must be at least 2")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_projective(dim, target, &mut rng)
}

pub(crate) fn sample_projective<R: Rng>(dim: usize, target: Vec<usize>, rng: &mut R) -> Result<Measurement> {
    let u = linalg::haar_unitary(dim, rng);
    Measurement::projective_from_unitary(&u, target)
}

/// Random Kraus channel with `n_outcomes` operators, built by slicing a Haar
/// unitary on the `n_outcomes·dim`-dimensional extended space. Deterministic
/// in the seed.
pub fn random_kraus_channel(
    dim: usize,
    n_outcomes: usize,
    target: Vec<usize>,
    seed: u64,
) -> Result<Measurement> {
    if dim < 2 {
        return Err(Error::InvalidWeights(format!("dimension {dim} must be at least 2")));
    }
    if n_outcomes == 0 {
        return Err(Error::InvalidWeights("need at least one outcome".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_kraus(dim, n_outcomes, target, &mut rng)
}

pub(crate) fn sample_kraus<R: Rng>(
    dim: usize,
    n_outcomes: usize,
    target: Vec<usize>,
    rng: &mut R,
) -> Result<Measurement> {
    let u = linalg::haar_unitary(dim * n_outcomes, rng);
    let kraus = (0..n_outcomes)
        .map(|j| CMatrix::from_fn(dim, dim, |r, c| u[(j * dim + r, c)]))
        .collect();
    Measurement::new(kraus, target)
}
