//! The remote-preparation protocol, end to end.
//!
//! A supplier holding shares 1 and 2 of `|ψ⟩₀₁ ⊗ |χ⟩₂₃` measures her pair in
//! the phase-parametrized basis of [`crate::measurement::rpbes_basis`],
//! broadcasts the outcome `(j, j')`, and the two nodes apply diagonal phase
//! corrections. Every outcome then carries the same final state
//! `|F⟩ = Σ e^{-iθ_mm'} √(λ_m η_m') |mm'⟩`, so the nodes end up with a unique
//! entangled state independent of the measurement result. A class of mixed
//! inputs diagonal in a fixed product basis preserves this outcome
//! independence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::measurement::{rpbes_basis_states, PhaseMatrix};
use crate::state::{DensityMatrix, Outcome, OutcomeDistribution, PureState, QState};
use crate::tolerance;

/// Result of a protocol run: the raw outcome distribution, the per-outcome
/// corrected states, the common final state, and the classical cost.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub outcomes: OutcomeDistribution,
    pub corrected: Vec<QState>,
    pub final_state: QState,
    pub bits_to_alice: f64,
    pub bits_to_bob: f64,
}

impl ProtocolResult {
    /// Smallest pairwise fidelity among the corrected outcome states; equals
    /// 1 up to round-off when the protocol is outcome independent.
    pub fn min_pairwise_fidelity(&self) -> Result<f64> {
        let mut min = 1.0f64;
        for a in 0..self.corrected.len() {
            for b in (a + 1)..self.corrected.len() {
                min = min.min(self.corrected[a].fidelity(&self.corrected[b])?);
            }
        }
        Ok(min)
    }

    /// Concurrence of the final shared state.
    pub fn final_concurrence(&self) -> Result<crate::entanglement::Concurrence> {
        crate::entanglement::state_concurrence(&self.final_state)
    }
}

fn validate_weights(weights: &[f64], what: &str) -> Result<usize> {
    let d = weights.len();
    if d < 2 {
        return Err(Error::InvalidWeights(format!("{what}: need at least 2 weights")));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights(format!("{what}: weights must be nonnegative")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tolerance::global().max(1e-9) {
        return Err(Error::InvalidWeights(format!("{what}: weights sum to {total}")));
    }
    Ok(d)
}

/// The two diagonal correction unitaries for outcome `(j, j')`: Alice applies
/// `diag(exp(i 2π j' m / d))`, Bob applies `diag(exp(i 2π (dj + j') m' / d²))`.
pub fn correction_unitaries(d: usize, j: usize, jp: usize) -> Result<(CMatrix, CMatrix)> {
    if d < 2 {
        return Err(Error::InvalidWeights(format!("dimension {d} must be at least 2")));
    }
    if j >= d {
        return Err(Error::OutcomeOutOfRange { outcome: j, dim: d });
    }
    if jp >= d {
        return Err(Error::OutcomeOutOfRange { outcome: jp, dim: d });
    }
    let tau = std::f64::consts::TAU;
    let ua = CMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, tau * (jp * r) as f64 / d as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let ub = CMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, tau * ((d * j + jp) * r) as f64 / (d * d) as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((ua, ub))
}

/// Classical communication cost of one protocol run:
/// `(log₂ d bits to Alice, 2 log₂ d bits to Bob)`.
pub fn classical_cost(d: usize) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::InvalidWeights(format!("dimension {d} must be at least 2")));
    }
    let bits = (d as f64).log2();
    Ok((bits, 2.0 * bits))
}

/// The final state `Σ_{m,m'} e^{-iθ_mm'} √(λ_m η_m') |mm'⟩` the protocol
/// delivers for Schmidt weights `λ`, `η` and phase matrix `θ`.
pub fn predicted_final_state(lambda: &[f64], eta: &[f64], theta: &PhaseMatrix) -> Result<PureState> {
    let d = validate_weights(lambda, "lambda")?;
    if validate_weights(eta, "eta")? != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: eta.len(),
        });
    }
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.dim(),
        });
    }
    let amplitudes = CVector::from_fn(d * d, |idx, _| {
        let (m, mp) = (idx / d, idx % d);
        Complex64::from_polar((lambda[m] * eta[mp]).sqrt(), -theta.get(m, mp))
    });
    PureState::new(amplitudes, vec![d, d])
}

// One measurement-and-correct pass over a pure 4-share state. Returns, per
// outcome (j,j'), the branch probability, the uncorrected node state, and
// the corrected node state.
fn measure_and_correct(
    full: &PureState,
    d: usize,
    theta: &PhaseMatrix,
) -> Result<Vec<(f64, PureState, PureState)>> {
    let probes = rpbes_basis_states(d, theta)?;
    let mut branches = Vec::with_capacity(d * d);
    for (idx, probe) in probes.iter().enumerate() {
        let (j, jp) = (idx / d, idx % d);
        let raw = full.partial_inner(probe, &[1, 2])?;
        let probability = raw.weight();
        if probability < tolerance::ZERO_PROBABILITY {
            continue;
        }
        let uncorrected = raw.normalized()?;
        let (ua, ub) = correction_unitaries(d, j, jp)?;
        let corrected = uncorrected
            .apply_operator(&ua, &[0])?
            .apply_operator(&ub, &[1])?;
        branches.push((probability, uncorrected, corrected));
    }
    Ok(branches)
}

/// Run the protocol on pure inputs given by their Schmidt weights.
///
/// Every outcome occurs with probability `1/d²` and every corrected state
/// equals [`predicted_final_state`] exactly (not merely up to a global
/// phase: the corrections cancel the measurement phases term by term).
pub fn run_rpbes_pure(lambda: &[f64], eta: &[f64], theta: &PhaseMatrix) -> Result<ProtocolResult> {
    let d = validate_weights(lambda, "lambda")?;
    if validate_weights(eta, "eta")? != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: eta.len(),
        });
    }
    let psi = PureState::from_schmidt_weights(lambda)?;
    let chi = PureState::from_schmidt_weights(eta)?;
    let full = psi.tensor(&chi);
    let branches = measure_and_correct(&full, d, theta)?;

    let outcomes = OutcomeDistribution::new(
        branches
            .iter()
            .map(|(p, raw, _)| Outcome {
                probability: *p,
                state: QState::Pure(raw.clone()),
            })
            .collect(),
    )?;
    let corrected: Vec<QState> = branches
        .iter()
        .map(|(_, _, c)| QState::Pure(c.clone()))
        .collect();
    let final_state = corrected[0].clone();
    let (bits_to_alice, bits_to_bob) = classical_cost(d)?;
    Ok(ProtocolResult {
        outcomes,
        corrected,
        final_state,
        bits_to_alice,
        bits_to_bob,
    })
}

/// A mixed input from the protocol-compatible class: a mixture of bipartite
/// pure states that are all diagonal in one fixed product basis,
/// `ρ = Σ_l p_l |ψ^(l)⟩⟨ψ^(l)|` with `|ψ^(l)⟩ = Σ_k a_k^(l) |kk⟩`.
#[derive(Debug, Clone)]
pub struct MixedClassSpec {
    weights: Vec<f64>,
    amplitude_rows: Vec<CVector>,
}

impl MixedClassSpec {
    pub fn new(weights: Vec<f64>, amplitude_rows: Vec<CVector>) -> Result<Self> {
        if weights.len() != amplitude_rows.len() || weights.is_empty() {
            return Err(Error::InvalidWeights(
                "need one amplitude row per weight".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance::global().max(1e-9) {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        let d = amplitude_rows[0].len();
        if d < 2 {
            return Err(Error::InvalidWeights(format!("dimension {d} must be at least 2")));
        }
        if weights.len() > d {
            return Err(Error::InvalidWeights(format!(
                "{} terms exceed the dimension {d}",
                weights.len()
            )));
        }
        for row in &amplitude_rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            let norm = row.norm();
            if (norm - 1.0).abs() > tolerance::global().max(1e-9) {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(Self {
            weights,
            amplitude_rows,
        })
    }

    /// Pure spec with a single amplitude row.
    pub fn pure(amplitudes: CVector) -> Result<Self> {
        Self::new(vec![1.0], vec![amplitudes])
    }

    /// Pure spec from nonnegative Schmidt weights.
    pub fn from_schmidt_weights(weights: &[f64]) -> Result<Self> {
        validate_weights(weights, "schmidt weights")?;
        let row = CVector::from_iterator(
            weights.len(),
            weights.iter().map(|w| Complex64::new(w.sqrt(), 0.0)),
        );
        Self::pure(row)
    }

    pub fn dim(&self) -> usize {
        self.amplitude_rows[0].len()
    }

    pub fn term_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn amplitude_rows(&self) -> &[CVector] {
        &self.amplitude_rows
    }

    /// `|ψ^(l)⟩ = Σ_k a_k^(l) |kk⟩` on dimensions `[d, d]`.
    pub fn term_state(&self, l: usize) -> Result<PureState> {
        let d = self.dim();
        let mut amplitudes = CVector::zeros(d * d);
        for k in 0..d {
            amplitudes[k * d + k] = self.amplitude_rows[l][k];
        }
        PureState::new(amplitudes, vec![d, d])
    }

    /// The density matrix `Σ_l p_l |ψ^(l)⟩⟨ψ^(l)|`.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        let terms: Vec<(f64, PureState)> = (0..self.term_count())
            .map(|l| Ok((self.weights[l], self.term_state(l)?)))
            .collect::<Result<_>>()?;
        DensityMatrix::from_mixture(&terms)
    }
}

/// The unique mixed state the protocol delivers on class inputs:
/// `σ = Σ_{l,l'} p_l q_l' |φ^(ll')⟩⟨φ^(ll')|` with
/// `|φ^(ll')⟩ = Σ_{k,k'} a_k^(l) b_k'^(l') e^{-iθ_kk'} |kk'⟩`.
pub fn predicted_mixed_final(
    spec_a: &MixedClassSpec,
    spec_b: &MixedClassSpec,
    theta: &PhaseMatrix,
) -> Result<DensityMatrix> {
    let d = spec_a.dim();
    if spec_b.dim() != d || theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: spec_b.dim().min(theta.dim()),
        });
    }
    let mut terms = Vec::new();
    for (l, &p) in spec_a.weights().iter().enumerate() {
        for (lp, &q) in spec_b.weights().iter().enumerate() {
            let amplitudes = CVector::from_fn(d * d, |idx, _| {
                let (k, kp) = (idx / d, idx % d);
                spec_a.amplitude_rows()[l][k]
                    * spec_b.amplitude_rows()[lp][kp]
                    * Complex64::from_polar(1.0, -theta.get(k, kp))
            });
            terms.push((p * q, PureState::new(amplitudes, vec![d, d])?));
        }
    }
    DensityMatrix::from_mixture(&terms)
}

/// Run the protocol on mixed-class inputs by propagating each `(l, l')` pure
/// branch independently and reassembling the per-outcome mixtures. Every
/// corrected outcome equals [`predicted_mixed_final`] entrywise.
pub fn run_rpbes_mixed_class(
    spec_a: &MixedClassSpec,
    spec_b: &MixedClassSpec,
    theta: &PhaseMatrix,
) -> Result<ProtocolResult> {
    let d = spec_a.dim();
    if spec_b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: spec_b.dim(),
        });
    }
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.dim(),
        });
    }

    // per outcome index: accumulated (weight, branch) lists
    let n_outcomes = d * d;
    let mut raw_terms: Vec<Vec<(f64, PureState)>> = vec![Vec::new(); n_outcomes];
    let mut corrected_terms: Vec<Vec<(f64, PureState)>> = vec![Vec::new(); n_outcomes];
    let mut outcome_probs = vec![0.0f64; n_outcomes];

    let probes = rpbes_basis_states(d, theta)?;
    for (l, &p) in spec_a.weights().iter().enumerate() {
        for (lp, &q) in spec_b.weights().iter().enumerate() {
            let full = spec_a.term_state(l)?.tensor(&spec_b.term_state(lp)?);
            for (idx, probe) in probes.iter().enumerate() {
                let (j, jp) = (idx / d, idx % d);
                let raw = full.partial_inner(probe, &[1, 2])?;
                let branch_prob = raw.weight();
                if branch_prob < tolerance::ZERO_PROBABILITY {
                    continue;
                }
                let uncorrected = raw.normalized()?;
                let (ua, ub) = correction_unitaries(d, j, jp)?;
                let corrected = uncorrected
                    .apply_operator(&ua, &[0])?
                    .apply_operator(&ub, &[1])?;
                let weight = p * q * branch_prob;
                outcome_probs[idx] += weight;
                raw_terms[idx].push((weight, uncorrected));
                corrected_terms[idx].push((weight, corrected));
            }
        }
    }

    let mut outcomes = Vec::new();
    let mut corrected = Vec::new();
    for idx in 0..n_outcomes {
        let q = outcome_probs[idx];
        if q < tolerance::ZERO_PROBABILITY {
            continue;
        }
        let normalize = |terms: &[(f64, PureState)]| -> Result<DensityMatrix> {
            let scaled: Vec<(f64, PureState)> =
                terms.iter().map(|(w, s)| (*w / q, s.clone())).collect();
            DensityMatrix::from_mixture(&scaled)
        };
        outcomes.push(Outcome {
            probability: q,
            state: QState::Mixed(normalize(&raw_terms[idx])?),
        });
        corrected.push(QState::Mixed(normalize(&corrected_terms[idx])?));
    }

    let outcomes = OutcomeDistribution::new(outcomes)?;
    let final_state = corrected[0].clone();
    let (bits_to_alice, bits_to_bob) = classical_cost(d)?;
    Ok(ProtocolResult {
        outcomes,
        corrected,
        final_state,
        bits_to_alice,
        bits_to_bob,
    })
}
