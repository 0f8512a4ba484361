//! Numerical verification of the average-concurrence bound and its chain
//! generalization.
//!
//! For two-qubit inputs `ρ₀₁` (supplier–Alice) and `ρ₂₃` (supplier–Bob), any
//! LOCC strategy whose first measurement is performed by the supplier yields
//! an outcome distribution whose average concurrence between the nodes
//! satisfies `C14 ≤ C12·C34`. This module samples strategies (projective,
//! Kraus, the phase-basis protocol measurement, and multi-round plans),
//! expands every conditioned branch exactly, and reports the achieved values
//! against the bound. For aligned chains of two-qubit states the bound is the
//! product of the link concurrences, and a sequential run of the
//! remote-preparation protocol saturates it on pure chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::entanglement::{average_concurrence, concurrence_two_qubit};
use crate::error::{Error, Result};
use crate::measurement::{
    apply_measurement, rpbes_basis, sample_kraus, sample_projective, Measurement, PhaseMatrix,
};
use crate::schmidt::schmidt_coefficients;
use crate::state::{DensityMatrix, Outcome, OutcomeDistribution, QState};
use crate::tolerance;

/// Tolerance at which a sample is counted as violating the bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Acting party of one LOCC round, in the four-share layout
/// `[Alice, supplier, supplier, Bob]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Supplier,
    Alice,
    Bob,
}

impl Party {
    fn targets(&self) -> Vec<usize> {
        match self {
            Party::Supplier => vec![1, 2],
            Party::Alice => vec![0],
            Party::Bob => vec![3],
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Party::Supplier => "sapna",
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

/// Where a round's measurement comes from. Random sources are re-sampled for
/// every conditioned branch, so later rounds depend on all earlier outcomes.
#[derive(Debug, Clone)]
pub enum MeasurementSource {
    Fixed(Measurement),
    RandomProjective,
    RandomKraus { outcomes: usize },
    RpbesBasis { theta: PhaseMatrix },
}

impl MeasurementSource {
    fn describe(&self, dim: usize) -> String {
        match self {
            MeasurementSource::Fixed(_) => "fixed".to_string(),
            MeasurementSource::RandomProjective => format!("proj{dim}"),
            MeasurementSource::RandomKraus { outcomes } => format!("kraus{outcomes}"),
            MeasurementSource::RpbesBasis { .. } => "rpbes".to_string(),
        }
    }
}

/// One LOCC round: who acts and with what measurement.
#[derive(Debug, Clone)]
pub struct LoccRound {
    pub party: Party,
    pub source: MeasurementSource,
}

/// An ordered LOCC plan. The first round must belong to the supplier: the
/// nodes share no entanglement until she measures.
#[derive(Debug, Clone)]
pub struct LoccRoundPlan {
    rounds: Vec<LoccRound>,
}

impl LoccRoundPlan {
    pub fn new(rounds: Vec<LoccRound>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::InvalidPlan("plan has no rounds".into()));
        }
        if rounds[0].party != Party::Supplier {
            return Err(Error::InvalidPlan(
                "first round must be a supplier measurement".into(),
            ));
        }
        Ok(Self { rounds })
    }

    pub fn rounds(&self) -> &[LoccRound] {
        &self.rounds
    }

    fn describe(&self, dims: &[usize]) -> String {
        self.rounds
            .iter()
            .map(|r| {
                let dim: usize = r.party.targets().iter().map(|&t| dims[t]).product();
                if r.party == Party::Supplier {
                    r.source.describe(dim)
                } else {
                    format!("{}:{}", r.party.label(), r.source.describe(dim))
                }
            })
            .collect::<Vec<_>>()
            .join(">")
    }
}

/// One sampled strategy and the average concurrence it achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySample {
    pub descriptor: String,
    pub c14: f64,
}

/// Report of a bound-verification run.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// Concurrences of the input states (two entries for a pair, one per
    /// link for a chain).
    pub input_concurrences: Vec<f64>,
    /// Product of the input concurrences: the right side of the bound.
    pub bound: f64,
    pub samples: Vec<StrategySample>,
    pub max_achieved: f64,
    /// Samples exceeding `bound + tolerance`.
    pub violations: usize,
    pub tolerance: f64,
}

impl BoundReport {
    fn assemble(input_concurrences: Vec<f64>, samples: Vec<StrategySample>) -> Self {
        let bound = input_concurrences.iter().product();
        let max_achieved = samples.iter().map(|s| s.c14).fold(f64::NEG_INFINITY, f64::max);
        let violations = samples
            .iter()
            .filter(|s| s.c14 > bound + BOUND_TOLERANCE)
            .count();
        Self {
            input_concurrences,
            bound,
            samples,
            max_achieved,
            violations,
            tolerance: BOUND_TOLERANCE,
        }
    }
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::NotTwoQubit {
            dims: rho.dims().to_vec(),
        });
    }
    Ok(())
}

/// The right side of the bound: `C(ρ₁₂) · C(ρ₃₄)`.
pub fn theorem1_bound(rho12: &DensityMatrix, rho34: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho12)?;
    require_two_qubit(rho34)?;
    Ok(concurrence_two_qubit(rho12)?.value() * concurrence_two_qubit(rho34)?.value())
}

fn instantiate<R: Rng>(
    source: &MeasurementSource,
    dim: usize,
    targets: Vec<usize>,
    rng: &mut R,
) -> Result<Measurement> {
    match source {
        MeasurementSource::Fixed(m) => {
            if m.operator_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.operator_dim(),
                });
            }
            m.retarget(targets)
        }
        MeasurementSource::RandomProjective => sample_projective(dim, targets, rng),
        MeasurementSource::RandomKraus { outcomes } => sample_kraus(dim, *outcomes, targets, rng),
        MeasurementSource::RpbesBasis { theta } => {
            let d = theta.dim();
            if d * d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: d * d,
                });
            }
            rpbes_basis(d, theta)?.retarget(targets)
        }
    }
}

// Expand every conditioned branch of the plan on the full four-share state.
fn expand_plan<R: Rng>(
    initial: &DensityMatrix,
    plan: &LoccRoundPlan,
    rng: &mut R,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let dims = initial.dims().to_vec();
    let mut branches: Vec<(f64, DensityMatrix)> = vec![(1.0, initial.clone())];
    for round in plan.rounds() {
        let targets = round.party.targets();
        let dim: usize = targets.iter().map(|&t| dims[t]).product();
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (p, state) in &branches {
            let m = instantiate(&round.source, dim, targets.clone(), rng)?;
            let dist = apply_measurement(state, &m)?;
            for outcome in dist.iter() {
                let weight = p * outcome.probability;
                if weight < tolerance::ZERO_PROBABILITY {
                    continue;
                }
                next.push((weight, outcome.state.density_matrix()));
            }
        }
        branches = next;
    }
    Ok(branches)
}

// Reduce expanded four-share branches to the node pair (shares 0 and 3).
fn node_distribution(branches: Vec<(f64, DensityMatrix)>) -> Result<OutcomeDistribution> {
    let outcomes = branches
        .into_iter()
        .map(|(p, state)| {
            Ok(Outcome {
                probability: p,
                state: QState::Mixed(state.partial_trace(&[0, 3])?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(outcomes)
}

/// Expand a multi-round LOCC plan on `ρ₁₂ ⊗ ρ₃₄` and return the normalized
/// distribution of node-pair states. Deterministic in the seed.
pub fn multi_round_locc(
    rho12: &DensityMatrix,
    rho34: &DensityMatrix,
    plan: &LoccRoundPlan,
    seed: u64,
) -> Result<OutcomeDistribution> {
    require_two_qubit(rho12)?;
    require_two_qubit(rho34)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let joint = rho12.tensor(rho34);
    node_distribution(expand_plan(&joint, plan, &mut rng)?)
}

/// Strategy families for the Monte Carlo sweep.
#[derive(Debug, Clone)]
pub enum PlanFamily {
    /// One Haar-random projective measurement on the supplier's pair.
    Projective,
    /// One random Kraus channel (2 to 8 outcomes) on the supplier's pair.
    Kraus,
    /// The protocol basis with random phases.
    Rpbes,
    /// Two to four rounds mixing all sources across the three parties.
    MultiRound,
    /// Mixture of all of the above.
    Mixed,
    /// One supplier measurement, projective or Kraus with equal probability;
    /// the family applied per node by random chain strategies.
    NodeMixed,
    /// A literal plan, evaluated as given on every trial.
    Fixed(LoccRoundPlan),
}

fn sample_node_source<R: Rng>(rng: &mut R) -> MeasurementSource {
    if rng.gen::<f64>() < 0.5 {
        MeasurementSource::RandomProjective
    } else {
        MeasurementSource::RandomKraus {
            outcomes: rng.gen_range(2..=8),
        }
    }
}

impl PlanFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PlanFamily::Projective => "projective",
            PlanFamily::Kraus => "kraus",
            PlanFamily::Rpbes => "rpbes",
            PlanFamily::MultiRound => "multi-round",
            PlanFamily::Mixed => "mixed",
            PlanFamily::NodeMixed => "node-mixed",
            PlanFamily::Fixed(_) => "fixed-plan",
        }
    }

    fn sample_plan<R: Rng>(&self, d: usize, rng: &mut R) -> Result<LoccRoundPlan> {
        let supplier = |source: MeasurementSource| LoccRound {
            party: Party::Supplier,
            source,
        };
        match self {
            PlanFamily::Projective => {
                LoccRoundPlan::new(vec![supplier(MeasurementSource::RandomProjective)])
            }
            PlanFamily::Kraus => LoccRoundPlan::new(vec![supplier(MeasurementSource::RandomKraus {
                outcomes: rng.gen_range(2..=8),
            })]),
            PlanFamily::Rpbes => {
                let theta = PhaseMatrix::random(d, rng)?;
                LoccRoundPlan::new(vec![supplier(MeasurementSource::RpbesBasis { theta })])
            }
            PlanFamily::MultiRound => {
                let first = if rng.gen::<f64>() < 0.5 {
                    MeasurementSource::RandomProjective
                } else {
                    MeasurementSource::RandomKraus {
                        outcomes: rng.gen_range(2..=6),
                    }
                };
                let mut rounds = vec![supplier(first)];
                let extra = rng.gen_range(1..=3);
                let cycle = [Party::Alice, Party::Bob, Party::Supplier];
                for i in 0..extra {
                    let party = cycle[i % cycle.len()];
                    let source = if rng.gen::<f64>() < 0.5 {
                        MeasurementSource::RandomProjective
                    } else {
                        let max = if party == Party::Supplier { 4 } else { 3 };
                        MeasurementSource::RandomKraus {
                            outcomes: rng.gen_range(2..=max),
                        }
                    };
                    rounds.push(LoccRound { party, source });
                }
                LoccRoundPlan::new(rounds)
            }
            PlanFamily::Mixed => {
                let draw = rng.gen::<f64>();
                let inner = if draw < 0.35 {
                    PlanFamily::Projective
                } else if draw < 0.60 {
                    PlanFamily::Kraus
                } else if draw < 0.75 {
                    PlanFamily::Rpbes
                } else {
                    PlanFamily::MultiRound
                };
                inner.sample_plan(d, rng)
            }
            PlanFamily::NodeMixed => LoccRoundPlan::new(vec![supplier(sample_node_source(rng))]),
            PlanFamily::Fixed(plan) => Ok(plan.clone()),
        }
    }
}

/// Monte Carlo sweep over sampled LOCC strategies. Each trial derives its
/// RNG stream from `(seed, trial index)`, so reports are bit-reproducible
/// and trials evaluate in parallel without shared state.
pub fn monte_carlo_red(
    rho12: &DensityMatrix,
    rho34: &DensityMatrix,
    family: &PlanFamily,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    require_two_qubit(rho12)?;
    require_two_qubit(rho34)?;
    if trials == 0 {
        return Err(Error::InvalidPlan("need at least one trial".into()));
    }
    let c12 = concurrence_two_qubit(rho12)?.value();
    let c34 = concurrence_two_qubit(rho34)?.value();
    let joint = rho12.tensor(rho34);
    let dims = joint.dims().to_vec();

    let samples: Vec<StrategySample> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<StrategySample> {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let plan = family.sample_plan(dims[1], &mut rng)?;
            let dist = node_distribution(expand_plan(&joint, &plan, &mut rng)?)?;
            Ok(StrategySample {
                descriptor: plan.describe(&dims),
                c14: average_concurrence(&dist)?.value(),
            })
        })
        .collect::<Result<_>>()?;

    Ok(BoundReport::assemble(vec![c12, c34], samples))
}

/// Strategy for chain simulations.
#[derive(Debug, Clone)]
pub enum ChainStrategy {
    /// Run the remote-preparation protocol link by link with `θ_mm' = πmm'`,
    /// re-expressing the accumulated state in Schmidt form between steps.
    /// Deterministic; requires pure links.
    SequentialRpbes,
    /// Each intermediate node measures its two qubits with a freshly sampled
    /// projective or Kraus measurement, conditioned on earlier outcomes.
    Random,
}

fn link_schmidt_weights(link: &DensityMatrix) -> Result<Vec<f64>> {
    let pure = link.to_pure().map_err(|_| {
        Error::InvalidPlan("sequential-rpbes requires pure chain links".into())
    })?;
    let mut weights = schmidt_coefficients(&pure, &[0])?;
    while weights.len() < 2 {
        weights.push(0.0);
    }
    Ok(weights)
}

fn sequential_rpbes_sample(chain: &[DensityMatrix]) -> Result<StrategySample> {
    let theta = PhaseMatrix::bilinear(2, std::f64::consts::PI)?;
    let mut current = link_schmidt_weights(&chain[0])?;
    let mut final_concurrence = 2.0 * (current[0] * current[1]).sqrt();
    for link in &chain[1..] {
        let eta = link_schmidt_weights(link)?;
        let result = crate::protocol::run_rpbes_pure(&current, &eta, &theta)?;
        let final_state = match &result.final_state {
            QState::Pure(p) => p.clone(),
            QState::Mixed(_) => {
                return Err(Error::NumericalFailure(
                    "pure protocol returned a mixed state".into(),
                ))
            }
        };
        final_concurrence = result.final_concurrence()?.value();
        current = schmidt_coefficients(&final_state, &[0])?;
        while current.len() < 2 {
            current.push(0.0);
        }
    }
    Ok(StrategySample {
        descriptor: "sequential-rpbes".to_string(),
        c14: final_concurrence,
    })
}

fn random_chain_sample<R: Rng>(chain: &[DensityMatrix], rng: &mut R) -> Result<StrategySample> {
    let mut branches: Vec<(f64, DensityMatrix)> = vec![(1.0, chain[0].clone())];
    let mut descriptor_parts = Vec::with_capacity(chain.len() - 1);
    for link in &chain[1..] {
        let source = sample_node_source(rng);
        descriptor_parts.push(source.describe(4));
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (p, current) in &branches {
            let joint = current.tensor(link);
            let m = instantiate(&source, 4, vec![1, 2], rng)?;
            let dist = apply_measurement(&joint, &m)?;
            for outcome in dist.iter() {
                let weight = p * outcome.probability;
                if weight < tolerance::ZERO_PROBABILITY {
                    continue;
                }
                next.push((
                    weight,
                    outcome.state.density_matrix().partial_trace(&[0, 3])?,
                ));
            }
        }
        branches = next;
    }
    let outcomes = branches
        .into_iter()
        .map(|(p, state)| Outcome {
            probability: p,
            state: QState::Mixed(state),
        })
        .collect();
    let dist = OutcomeDistribution::new(outcomes)?;
    Ok(StrategySample {
        descriptor: descriptor_parts.join(">"),
        c14: average_concurrence(&dist)?.value(),
    })
}

/// Simulate LOCC on an aligned chain of two-qubit states shared between
/// consecutive parties and compare the end-to-end average concurrence with
/// the product of the link concurrences.
pub fn chain_corollary_sim(
    chain: &[DensityMatrix],
    strategy: &ChainStrategy,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    if chain.len() < 2 {
        return Err(Error::InvalidPlan(format!(
            "chain needs at least 2 links, got {}",
            chain.len()
        )));
    }
    for link in chain {
        require_two_qubit(link)?;
    }
    let link_concurrences = chain
        .iter()
        .map(|l| Ok(concurrence_two_qubit(l)?.value()))
        .collect::<Result<Vec<f64>>>()?;

    let samples = match strategy {
        ChainStrategy::SequentialRpbes => vec![sequential_rpbes_sample(chain)?],
        ChainStrategy::Random => {
            if trials == 0 {
                return Err(Error::InvalidPlan("need at least one trial".into()));
            }
            (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha12Rng::seed_from_u64(seed);
                    rng.set_stream(trial as u64);
                    random_chain_sample(chain, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(BoundReport::assemble(link_concurrences, samples))
}
