//! Entanglement measures: pure-state concurrence in any dimension, the
//! Wootters concurrence of two-qubit mixed states, entanglement of formation,
//! average concurrence of outcome distributions, and optimal decompositions
//! in which every pure term carries the same concurrence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::schmidt;
use crate::state::{DensityMatrix, OutcomeDistribution, PureState, QState};
use crate::tolerance;

/// Nonnegative concurrence value. For a `d×d` pure state it lies in
/// `[0, √(2(d−1)/d)]`; for two qubits in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    /// Wrap a raw value, clamping small negatives from round-off to zero.
    pub fn new(value: f64) -> Self {
        Self(value.max(0.0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Concurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Concurrence `√(2(1 − Σ_k λ_k²))` of a pure state across the given cut,
/// with `λ_k` the squared Schmidt weights.
pub fn concurrence_pure(psi: &PureState, side_a: &[usize]) -> Result<Concurrence> {
    let coeffs = schmidt::schmidt_coefficients(psi, side_a)?;
    let purity: f64 = coeffs.iter().map(|l| l * l).sum();
    Ok(Concurrence::new((2.0 * (1.0 - purity)).max(0.0).sqrt()))
}

/// `Y ⊗ Y` in the computational basis.
pub(crate) fn spin_flip_matrix() -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    let n = Complex64::new(-1.0, 0.0);
    CMatrix::from_row_slice(4, 4, &[z, z, z, n, z, z, p, z, z, p, z, z, n, z, z, z])
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::NotTwoQubit {
            dims: rho.dims().to_vec(),
        });
    }
    Ok(())
}

// ⟨u|ṽ⟩ with |ṽ⟩ = (Y⊗Y)|v*⟩; a symmetric bilinear form of the conjugates.
fn tilde_overlap(sf: &CMatrix, u: &CVector, v: &CVector) -> Complex64 {
    let v_tilde = sf * v.map(|z| z.conj());
    u.dotc(&v_tilde)
}

// Subnormalized eigenvectors of ρ together with the Takagi factorization of
// their tilde-overlap matrix τ_ab = ⟨v_a|ṽ_b⟩. The Takagi values are the
// Wootters μ_i (square roots of the eigenvalues of ρ·(Y⊗Y)·ρ*·(Y⊗Y)); this
// route never takes a square root of a near-zero eigenvalue, so the small
// μ_i come out exact instead of O(√ε).
fn wootters_takagi(rho: &DensityMatrix) -> Result<(Vec<CVector>, Vec<f64>, CMatrix)> {
    let (eigs, vecs) = linalg::hermitian_eigen(rho.matrix());
    let mut sub: Vec<CVector> = Vec::new();
    for (k, &e) in eigs.iter().enumerate() {
        if e > tolerance::SCHMIDT_RANK_CUTOFF {
            sub.push(vecs.column(k).map(|z| z * Complex64::new(e.sqrt(), 0.0)));
        }
    }
    if sub.is_empty() {
        return Err(Error::NumericalFailure("density matrix has no support".into()));
    }
    let rank = sub.len();
    let sf = spin_flip_matrix();
    let tau = CMatrix::from_fn(rank, rank, |r, c| tilde_overlap(&sf, &sub[r], &sub[c]));
    let tau = (&tau + tau.transpose()).map(|z| z * 0.5);
    let (sigma, z) = linalg::takagi(&tau)?;
    Ok((sub, sigma, z))
}

/// Wootters concurrence `max(0, μ1 − μ2 − μ3 − μ4)` of a two-qubit state,
/// with `μ_i` the descending square roots of the eigenvalues of
/// `ρ (Y⊗Y) ρ* (Y⊗Y)`, computed as the Takagi values of the tilde-overlap
/// matrix in the subnormalized eigenbasis.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<Concurrence> {
    require_two_qubit(rho)?;
    let (_, sigma, _) = wootters_takagi(rho)?;
    let c = sigma[0] - sigma[1..].iter().sum::<f64>();
    Ok(Concurrence::new(c))
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation (in ebits) of a two-qubit state with the given
/// concurrence: `h((1 + √(1 − C²))/2)`. Values above 1 are rejected; the
/// conversion is specific to the two-qubit range.
pub fn entanglement_of_formation(c: Concurrence) -> Result<f64> {
    let v = c.value();
    if v > 1.0 + tolerance::global() {
        return Err(Error::ConcurrenceOutOfRange { value: v });
    }
    let v = v.min(1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - v * v).max(0.0).sqrt())))
}

/// Concurrence of one bipartite outcome state: pure states use the
/// Schmidt-based formula (any dimension), mixed states the two-qubit
/// Wootters formula.
pub fn state_concurrence(state: &QState) -> Result<Concurrence> {
    match state {
        QState::Pure(p) => {
            if p.subsystem_count() != 2 {
                return Err(Error::InvalidPartition(format!(
                    "expected a bipartite state, got {} subsystems",
                    p.subsystem_count()
                )));
            }
            concurrence_pure(p, &[0])
        }
        QState::Mixed(m) => concurrence_two_qubit(m),
    }
}

/// Probability-weighted average concurrence `Σ_j Q_j C(σ_j)` of a
/// distribution of bipartite states.
pub fn average_concurrence(dist: &OutcomeDistribution) -> Result<Concurrence> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let total = dist.total_probability();
    if (total - 1.0).abs() > tolerance::PROBABILITY_SUM {
        return Err(Error::ProbabilityNotNormalized { total });
    }
    let mut acc = 0.0;
    for outcome in dist.iter() {
        acc += outcome.probability * state_concurrence(&outcome.state)?.value();
    }
    Ok(Concurrence::new(acc))
}

/// Pure-state decomposition `ρ = Σ_l p_l |ψ_l⟩⟨ψ_l|`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    terms: Vec<(f64, PureState)>,
}

impl Decomposition {
    pub fn terms(&self) -> &[(f64, PureState)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_l p_l |ψ_l⟩⟨ψ_l|`.
    pub fn reconstruct(&self) -> DensityMatrix {
        let total = self.terms[0].1.total_dim();
        let mut m = CMatrix::zeros(total, total);
        for (p, psi) in &self.terms {
            m += (psi.amplitudes() * psi.amplitudes().adjoint())
                .map(|z| z * Complex64::new(*p, 0.0));
        }
        DensityMatrix::from_raw(m, self.terms[0].1.dims().to_vec())
    }
}

// Angles that close a triangle with side lengths (a, b, c): returns
// (alpha, beta, gamma) with a·e^{iα} + b·e^{iβ} + c·e^{iγ} = 0.
fn triangle_angles(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    if c < 1e-15 {
        // degenerate: a and b must match, point in opposite directions
        return (0.0, std::f64::consts::PI, 0.0);
    }
    let cos_beta = ((c * c - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let beta = cos_beta.acos();
    let rest = Complex64::new(-(a + b * beta.cos()), -(b * beta.sin()));
    (0.0, beta, rest.arg())
}

/// Optimal decomposition of a two-qubit state in which every pure term has
/// concurrence equal to the Wootters concurrence of the input.
///
/// Follows the constructive route: subnormalized eigenvectors, Takagi
/// diagonalization of the tilde-overlap matrix, then a real orthogonal mixing
/// chosen so each term's tilde overlap is proportional to its weight. When
/// the concurrence is zero the phases are instead chosen to close the
/// `λ`-polygon and a Hadamard mixing zeroes every term's overlap.
pub fn optimal_equal_concurrence_decomposition(rho: &DensityMatrix) -> Result<Decomposition> {
    require_two_qubit(rho)?;
    rho.validate()?;
    let (sub, sigma, z) = wootters_takagi(rho)?;
    let rank = sub.len();
    if rank == 1 {
        let psi = PureState::from_unnormalized(sub[0].clone(), vec![2, 2])?;
        return Ok(Decomposition {
            terms: vec![(1.0, psi)],
        });
    }

    // x_i = Σ_j Z_ji v_j diagonalize the tilde form: ⟨x_a|x̃_b⟩ = σ_a δ_ab
    let xs: Vec<CVector> = (0..rank)
        .map(|i| {
            let mut x = CVector::zeros(4);
            for (j, v) in sub.iter().enumerate() {
                x += v.map(|zz| zz * z[(j, i)]);
            }
            x
        })
        .collect();

    let c = (sigma[0] - sigma[1..].iter().sum::<f64>()).max(0.0);
    let im = Complex64::new(0.0, 1.0);

    let (ys, mixing): (Vec<CVector>, nalgebra::DMatrix<f64>) = if c > 1e-12 {
        // tilde-gram becomes diag(σ1, −σ2, …) with trace c
        let ys: Vec<CVector> = xs
            .iter()
            .enumerate()
            .map(|(j, x)| if j == 0 { x.clone() } else { x.map(|zz| zz * im) })
            .collect();
        let mut d = nalgebra::DMatrix::<f64>::zeros(rank, rank);
        d[(0, 0)] = sigma[0];
        for j in 1..rank {
            d[(j, j)] = -sigma[j];
        }
        // gram of the y's in the ordinary inner product
        let h = nalgebra::DMatrix::<f64>::from_fn(rank, rank, |r, cc| ys[r].dotc(&ys[cc]).re);
        let k = &d - h.map(|v| c * v);
        let o = linalg::zero_diagonal_rotation(&k)?;
        (ys, o)
    } else {
        // zero concurrence: close the polygon Σ σ_j e^{2iθ_j} = 0
        let (alpha, beta, gamma) = triangle_angles(
            sigma[0],
            sigma[1],
            sigma.get(2).copied().unwrap_or(0.0) + sigma.get(3).copied().unwrap_or(0.0),
        );
        let group_angle = |j: usize| match j {
            0 => alpha,
            1 => beta,
            _ => gamma,
        };
        let mut ys: Vec<CVector> = xs
            .iter()
            .enumerate()
            .map(|(j, x)| x.map(|zz| zz * Complex64::from_polar(1.0, 0.5 * group_angle(j))))
            .collect();
        if rank == 2 {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let o = nalgebra::DMatrix::<f64>::from_row_slice(2, 2, &[r, r, r, -r]);
            (ys, o)
        } else {
            // pad to four terms; the 4×4 Hadamard has uniform squared entries
            while ys.len() < 4 {
                ys.push(CVector::zeros(4));
            }
            let o = nalgebra::DMatrix::<f64>::from_row_slice(
                4,
                4,
                &[
                    0.5, 0.5, 0.5, 0.5, //
                    0.5, 0.5, -0.5, -0.5, //
                    0.5, -0.5, 0.5, -0.5, //
                    0.5, -0.5, -0.5, 0.5,
                ],
            );
            (ys, o)
        }
    };

    let mut terms = Vec::new();
    for i in 0..mixing.nrows() {
        let mut zvec = CVector::zeros(4);
        for (j, y) in ys.iter().enumerate() {
            zvec += y.map(|zz| zz * Complex64::new(mixing[(i, j)], 0.0));
        }
        let p = zvec.norm_squared();
        if p < 1e-14 {
            continue;
        }
        terms.push((p, PureState::from_unnormalized(zvec, vec![2, 2])?));
    }
    let total: f64 = terms.iter().map(|(p, _)| p).sum();
    for (p, _) in &mut terms {
        *p /= total;
    }
    Ok(Decomposition { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Outcome;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_phi_plus() -> PureState {
        PureState::from_schmidt_weights(&[0.5, 0.5]).unwrap()
    }

    fn chi_pm(sign: f64) -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            CVector::from_vec(vec![c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(sign * s, 0.0)]),
            vec![2, 2],
        )
        .unwrap()
    }

    /// `q|χ+⟩⟨χ+| + (1−q)|χ−⟩⟨χ−|`
    fn chi_mixture(q: f64) -> DensityMatrix {
        DensityMatrix::from_mixture(&[(q, chi_pm(1.0)), (1.0 - q, chi_pm(-1.0))]).unwrap()
    }

    fn random_pure_two_qubit(rng: &mut ChaCha12Rng) -> PureState {
        let v = CVector::from_fn(4, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        PureState::from_unnormalized(v, vec![2, 2]).unwrap()
    }

    fn random_two_qubit_density(rank: usize, rng: &mut ChaCha12Rng) -> DensityMatrix {
        let mut weights: Vec<f64> = (0..rank).map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let terms: Vec<(f64, PureState)> = weights
            .into_iter()
            .map(|w| (w, random_pure_two_qubit(rng)))
            .collect();
        DensityMatrix::from_mixture(&terms).unwrap()
    }

    #[test]
    fn bell_state_concurrence_is_one() {
        let c = concurrence_pure(&bell_phi_plus(), &[0]).unwrap();
        assert!((c.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_concurrence_is_zero() {
        let psi = PureState::basis_state(&[2, 2], &[0, 1]).unwrap();
        let c = concurrence_pure(&psi, &[0]).unwrap();
        assert!(c.value() < 1e-12);
    }

    #[test]
    fn known_schmidt_weights() {
        // λ = (0.8, 0.2): C = 2√(0.16) = 0.8
        let psi = PureState::from_schmidt_weights(&[0.8, 0.2]).unwrap();
        let c = concurrence_pure(&psi, &[0]).unwrap();
        assert!((c.value() - 0.8).abs() < 1e-12);

        // uniform qutrit weights: C = √(2(1 − 1/3)) = √(4/3)
        let psi3 = PureState::from_schmidt_weights(&[1.0 / 3.0; 3]).unwrap();
        let c3 = concurrence_pure(&psi3, &[0]).unwrap();
        assert!((c3.value() - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wootters_on_chi_mixture() {
        // C(q|χ+⟩⟨χ+| + (1−q)|χ−⟩⟨χ−|) = |2q − 1|
        let c = concurrence_two_qubit(&chi_mixture(0.75)).unwrap();
        assert!((c.value() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn wootters_on_maximally_mixed_is_zero() {
        let m = CMatrix::from_diagonal(&CVector::from_element(4, c64(0.25, 0.0)));
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        assert!(concurrence_two_qubit(&rho).unwrap().value() < 1e-12);
    }

    #[test]
    fn wootters_matches_pure_formula_on_pure_inputs() {
        let mut rng = ChaCha12Rng::seed_from_u64(211);
        for _ in 0..25 {
            let psi = random_pure_two_qubit(&mut rng);
            let via_pure = concurrence_pure(&psi, &[0]).unwrap().value();
            let via_wootters = concurrence_two_qubit(&psi.density_matrix()).unwrap().value();
            assert!(
                (via_pure - via_wootters).abs() < 1e-10,
                "pure {via_pure} vs wootters {via_wootters}"
            );
        }
    }

    #[test]
    fn wootters_rejects_wrong_shape() {
        let m = CMatrix::from_diagonal(&CVector::from_element(6, c64(1.0 / 6.0, 0.0)));
        let rho = DensityMatrix::new(m, vec![2, 3]).unwrap();
        assert!(matches!(
            concurrence_two_qubit(&rho),
            Err(Error::NotTwoQubit { .. })
        ));
    }

    #[test]
    fn eof_endpoints_and_midpoint() {
        assert!(entanglement_of_formation(Concurrence::new(0.0)).unwrap().abs() < 1e-15);
        assert!((entanglement_of_formation(Concurrence::new(1.0)).unwrap() - 1.0).abs() < 1e-12);
        // C = 0.8 → h((1 + 0.6)/2) = h(0.8)
        let e = entanglement_of_formation(Concurrence::new(0.8)).unwrap();
        assert!((e - 0.7219280948873623).abs() < 1e-12);
        assert!(entanglement_of_formation(Concurrence::new(1.2)).is_err());
    }

    #[test]
    fn eof_strictly_increasing() {
        let mut prev = -1.0;
        for k in 0..=100 {
            let c = k as f64 / 100.0;
            let e = entanglement_of_formation(Concurrence::new(c)).unwrap();
            assert!(e > prev - 1e-15, "EoF not increasing at C = {c}");
            prev = e;
        }
    }

    #[test]
    fn average_concurrence_examples() {
        let single = OutcomeDistribution::new(vec![Outcome {
            probability: 1.0,
            state: QState::Pure(PureState::from_schmidt_weights(&[0.8, 0.2]).unwrap()),
        }])
        .unwrap();
        assert!((average_concurrence(&single).unwrap().value() - 0.8).abs() < 1e-12);

        let bells = OutcomeDistribution::new(vec![
            Outcome {
                probability: 0.5,
                state: QState::Pure(chi_pm(1.0)),
            },
            Outcome {
                probability: 0.5,
                state: QState::Pure(chi_pm(-1.0)),
            },
        ])
        .unwrap();
        assert!((average_concurrence(&bells).unwrap().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn det_scaling_identity() {
        // C((A⊗B)|ψ⟩/‖·‖)·‖·‖² = |det A||det B| C(|ψ⟩)
        let mut rng = ChaCha12Rng::seed_from_u64(223);
        for _ in 0..25 {
            let psi = random_pure_two_qubit(&mut rng);
            let a = CMatrix::from_fn(2, 2, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let b = CMatrix::from_fn(2, 2, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let moved = psi
                .apply_operator(&a, &[0])
                .unwrap()
                .apply_operator(&b, &[1])
                .unwrap();
            let w = moved.weight();
            if w < 1e-6 {
                continue;
            }
            let lhs = concurrence_pure(&moved.normalized().unwrap(), &[0]).unwrap().value() * w;
            let det_a = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).norm();
            let det_b = (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).norm();
            let rhs = det_a * det_b * concurrence_pure(&psi, &[0]).unwrap().value();
            assert!((lhs - rhs).abs() < 1e-9, "det scaling violated: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn optimal_decomposition_of_pure_state_is_single_term() {
        let psi = PureState::from_schmidt_weights(&[0.7, 0.3]).unwrap();
        let deco = optimal_equal_concurrence_decomposition(&psi.density_matrix()).unwrap();
        assert_eq!(deco.len(), 1);
        assert!((deco.terms()[0].0 - 1.0).abs() < 1e-12);
        assert!(deco.terms()[0].1.fidelity(&psi).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn optimal_decomposition_of_chi_mixture() {
        let rho = chi_mixture(0.75);
        let target = concurrence_two_qubit(&rho).unwrap().value();
        let deco = optimal_equal_concurrence_decomposition(&rho).unwrap();
        assert!(deco.len() >= 2 && deco.len() <= 4);
        for (_, psi) in deco.terms() {
            let c = concurrence_pure(psi, &[0]).unwrap().value();
            assert!((c - target).abs() < 1e-8, "term concurrence {c} vs {target}");
        }
        let rebuilt = deco.reconstruct();
        assert!(linalg::max_abs_diff(rebuilt.matrix(), rho.matrix()) < 1e-8);
    }

    #[test]
    fn optimal_decomposition_of_separable_state_has_zero_terms() {
        // Werner state with visibility 1/4 is separable (C = 0).
        let bell = bell_phi_plus().density_matrix();
        let mixed = CMatrix::from_diagonal(&CVector::from_element(4, c64(0.25, 0.0)));
        let p = 0.25;
        let m = bell.matrix().map(|z| z * p) + mixed.map(|z| z * (1.0 - p));
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        assert!(concurrence_two_qubit(&rho).unwrap().value() < 1e-12);

        let deco = optimal_equal_concurrence_decomposition(&rho).unwrap();
        for (_, psi) in deco.terms() {
            assert!(concurrence_pure(psi, &[0]).unwrap().value() < 1e-8);
        }
        assert!(linalg::max_abs_diff(deco.reconstruct().matrix(), rho.matrix()) < 1e-8);
    }

    #[test]
    fn optimal_decomposition_on_random_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(229);
        for _ in 0..30 {
            let rank = rng.gen_range(1..=4);
            let rho = random_two_qubit_density(rank, &mut rng);
            let target = concurrence_two_qubit(&rho).unwrap().value();
            let deco = optimal_equal_concurrence_decomposition(&rho).unwrap();
            assert!(deco.len() <= 4);
            let mut weight = 0.0;
            for (p, psi) in deco.terms() {
                weight += p;
                let c = concurrence_pure(psi, &[0]).unwrap().value();
                assert!((c - target).abs() < 1e-8, "term {c} target {target}");
            }
            assert!((weight - 1.0).abs() < 1e-10);
            assert!(linalg::max_abs_diff(deco.reconstruct().matrix(), rho.matrix()) < 1e-8);
        }
    }

    #[test]
    fn random_decompositions_average_at_least_wootters() {
        // unitary remixing of the optimal decomposition cannot go below the
        // convex-roof value
        let mut rng = ChaCha12Rng::seed_from_u64(233);
        for _ in 0..20 {
            let rho = random_two_qubit_density(rng.gen_range(2..=4), &mut rng);
            let base = concurrence_two_qubit(&rho).unwrap().value();
            let deco = optimal_equal_concurrence_decomposition(&rho).unwrap();
            let subnorm: Vec<CVector> = deco
                .terms()
                .iter()
                .map(|(p, psi)| psi.amplitudes().map(|z| z * Complex64::new(p.sqrt(), 0.0)))
                .collect();
            let m = subnorm.len();
            let u = linalg::haar_unitary(m, &mut rng);
            let mut avg = 0.0;
            for i in 0..m {
                let mut w = CVector::zeros(4);
                for (j, v) in subnorm.iter().enumerate() {
                    w += v.map(|z| z * u[(i, j)]);
                }
                let p = w.norm_squared();
                if p < 1e-14 {
                    continue;
                }
                let psi = PureState::from_unnormalized(w, vec![2, 2]).unwrap();
                avg += p * concurrence_pure(&psi, &[0]).unwrap().value();
            }
            assert!(avg >= base - 1e-8, "average {avg} below convex roof {base}");
        }
    }
}
