//! Channel adversary models.
//!
//! The strongest model is the collective attack: the eavesdropper attaches a
//! fresh ancilla register to each logical-index photon pair, applies one
//! fixed unitary on the Alice→Bob leg and another on the Bob→Alice leg, and
//! measures her ancillas after the protocol completes. The same pair of
//! unitaries is used in every round. Simpler models (intercept-resend,
//! bit tampering) are provided for calibration and detection statistics.
//!
//! Besides sampled attack application, this module computes *exact*
//! per-index quantities for collective attacks by enumerating every
//! measurement branch: the detection probability (any of Bob's or Alice's
//! checks failing) and the eavesdropper's Holevo information over her
//! conditional ancilla states.

mod search;

pub use search::{
    constrained_attack_search, evaluate_params, information_frontier, search_candidates,
    AttackSearchReport, SearchCandidate, SearchOptions,
};

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::linalg;
use crate::quantum::{
    apply_unitary, measure, prepare_plus, prepare_z, project, tensor, Basis, PureState,
    QuantumError, UnitaryMatrix,
};

/// Largest supported ancilla register.
pub const MAX_ANCILLA_QUBITS: usize = 4;

/// Probabilities below this are treated as impossible branches.
const BRANCH_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("attack unitary must be {expected}×{expected} for {ancilla_qubits} ancilla qubit(s), got {got}×{got}")]
    WrongAttackDimension {
        expected: usize,
        got: usize,
        ancilla_qubits: usize,
    },
    #[error("ancilla register must have 1..={MAX_ANCILLA_QUBITS} qubits, got {0}")]
    BadAncillaWidth(usize),
    #[error("per-photon attack probability {0} is not in [0, 1]")]
    BadProbability(f64),
    #[error("ensemble probabilities sum to {0}, expected 1 within 1e-9")]
    UnnormalizedEnsemble(f64),
    #[error("ensemble states have mixed dimensions")]
    MixedEnsembleDimensions,
    #[error("ensemble must not be empty")]
    EmptyEnsemble,
    #[error("invalid search parameters: {0}")]
    BadSearchParams(String),
}

/// A collective attack: U₁ on the forward leg, U₂ on the backward leg,
/// acting on (photon pair) ⊗ (ancilla register). The ancilla starts in
/// |0…0⟩; any initial ancilla state can be absorbed into the unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveAttack {
    u1: UnitaryMatrix,
    u2: UnitaryMatrix,
    ancilla_qubits: usize,
}

impl CollectiveAttack {
    pub fn new(
        u1: UnitaryMatrix,
        u2: UnitaryMatrix,
        ancilla_qubits: usize,
    ) -> Result<Self, AdversaryError> {
        if !(1..=MAX_ANCILLA_QUBITS).contains(&ancilla_qubits) {
            return Err(AdversaryError::BadAncillaWidth(ancilla_qubits));
        }
        let expected = 1usize << (2 + ancilla_qubits);
        for u in [&u1, &u2] {
            if u.dim() != expected {
                return Err(AdversaryError::WrongAttackDimension {
                    expected,
                    got: u.dim(),
                    ancilla_qubits,
                });
            }
        }
        Ok(CollectiveAttack {
            u1,
            u2,
            ancilla_qubits,
        })
    }

    /// Both legs act as the identity; statistically indistinguishable from
    /// no attack at all.
    pub fn identity(ancilla_qubits: usize) -> Result<Self, AdversaryError> {
        let dim = 1usize << (2 + ancilla_qubits);
        CollectiveAttack::new(
            UnitaryMatrix::identity(dim),
            UnitaryMatrix::identity(dim),
            ancilla_qubits,
        )
    }

    /// The copy attack: the forward leg CNOTs the first pair qubit onto the
    /// first ancilla qubit, the backward leg does nothing. When the payload
    /// travels in the first slot this clones its bit into the ancilla;
    /// when the decoy travels first it entangles the decoy instead and
    /// Alice's X check fails half the time.
    pub fn copy_attack(ancilla_qubits: usize) -> Result<Self, AdversaryError> {
        if !(1..=MAX_ANCILLA_QUBITS).contains(&ancilla_qubits) {
            return Err(AdversaryError::BadAncillaWidth(ancilla_qubits));
        }
        let dim = 1usize << (2 + ancilla_qubits);
        let u1 = UnitaryMatrix::new(dim, copy_permutation(ancilla_qubits))?;
        CollectiveAttack::new(u1, UnitaryMatrix::identity(dim), ancilla_qubits)
    }

    /// An attack that acts only on the ancilla register and leaves the
    /// transmitted qubits untouched: Uᵢ = I₄ ⊗ Vᵢ. All such attacks
    /// produce the same post-attack ancilla state on every branch, so they
    /// go undetected and carry no information.
    pub fn ancilla_only(v1: &UnitaryMatrix, v2: &UnitaryMatrix) -> Result<Self, AdversaryError> {
        if v1.dim() != v2.dim() || !v1.dim().is_power_of_two() {
            return Err(AdversaryError::MixedEnsembleDimensions);
        }
        let ancilla_qubits = v1.dim().trailing_zeros() as usize;
        if !(1..=MAX_ANCILLA_QUBITS).contains(&ancilla_qubits) {
            return Err(AdversaryError::BadAncillaWidth(ancilla_qubits));
        }
        let dim = 4 * v1.dim();
        let u1 = UnitaryMatrix::new(
            dim,
            linalg::kron(4, &linalg::identity(4), v1.dim(), v1.entries()),
        )?;
        let u2 = UnitaryMatrix::new(
            dim,
            linalg::kron(4, &linalg::identity(4), v2.dim(), v2.entries()),
        )?;
        CollectiveAttack::new(u1, u2, ancilla_qubits)
    }

    pub fn u1(&self) -> &UnitaryMatrix {
        &self.u1
    }

    pub fn u2(&self) -> &UnitaryMatrix {
        &self.u2
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }
}

/// Permutation entries of CNOT(pair qubit 0 → first ancilla qubit) ⊗ I.
fn copy_permutation(ancilla_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << (2 + ancilla_qubits);
    let control_shift = ancilla_qubits + 1; // pair qubit 0 is the index MSB
    let target_shift = ancilla_qubits - 1; // first ancilla qubit
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let row = if (col >> control_shift) & 1 == 1 {
            col ^ (1usize << target_shift)
        } else {
            col
        };
        entries[row * dim + col] = Complex64::new(1.0, 0.0);
    }
    entries
}

/// Eavesdropper behavior on the quantum channel.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackModel {
    /// No interference on either leg.
    Honest,
    /// Measure each passing photon in Z with probability `p_attack` and
    /// forward the collapsed basis state.
    InterceptResendZ { p_attack: f64 },
    /// Same, measuring in X and forwarding |+⟩/|−⟩.
    InterceptResendX { p_attack: f64 },
    /// Apply Pauli-X to the listed transmission slots on the forward leg.
    BitFlip { slots: BTreeSet<usize> },
    /// The collective attack.
    Collective(CollectiveAttack),
}

impl AttackModel {
    pub fn validate(&self) -> Result<(), AdversaryError> {
        match self {
            AttackModel::Honest | AttackModel::BitFlip { .. } | AttackModel::Collective(_) => {
                Ok(())
            }
            AttackModel::InterceptResendZ { p_attack }
            | AttackModel::InterceptResendX { p_attack } => {
                if !(0.0..=1.0).contains(p_attack) || !p_attack.is_finite() {
                    Err(AdversaryError::BadProbability(*p_attack))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Width of the ancilla register this model attaches to each pair.
    pub fn ancilla_qubits(&self) -> usize {
        match self {
            AttackModel::Collective(c) => c.ancilla_qubits,
            _ => 0,
        }
    }

    /// Fresh ancilla register in |0…0⟩ (the 0-qubit tensor unit for models
    /// without an ancilla).
    pub fn initial_ancilla(&self) -> PureState {
        PureState::basis_state(self.ancilla_qubits(), 0)
            .expect("ancilla width is validated to fit the register cap")
    }
}

/// Applies the adversary's Alice→Bob action to one logical-index pair.
///
/// `pair` holds the two photons in slot order; `slots` are their global
/// transmission slot indices; `ancilla` is the adversary's register, which
/// becomes the least significant qubits of the returned joint state.
pub fn attack_forward<R: Rng + ?Sized>(
    model: &AttackModel,
    pair: &PureState,
    ancilla: &PureState,
    slots: [usize; 2],
    rng: &mut R,
) -> Result<PureState, AdversaryError> {
    let joint = tensor(pair, ancilla)?;
    match model {
        AttackModel::Honest => Ok(joint),
        AttackModel::InterceptResendZ { p_attack } => {
            intercept_leg(joint, Basis::Z, *p_attack, rng)
        }
        AttackModel::InterceptResendX { p_attack } => {
            intercept_leg(joint, Basis::X, *p_attack, rng)
        }
        AttackModel::BitFlip { slots: flipped } => {
            let mut state = joint;
            for (pos, slot) in slots.iter().enumerate() {
                if flipped.contains(slot) {
                    state = apply_unitary(&UnitaryMatrix::pauli_x(), &state, &[pos])?;
                }
            }
            Ok(state)
        }
        AttackModel::Collective(c) => apply_on_all(&c.u1, &joint),
    }
}

/// Applies the adversary's Bob→Alice action to the joint state (pair plus
/// the ancilla that persisted from the forward leg).
///
/// The bit-tamper model acts on the forward leg only; the collective model
/// applies U₂ to the same registers U₁ acted on.
pub fn attack_backward<R: Rng + ?Sized>(
    model: &AttackModel,
    joint: &PureState,
    _slots: [usize; 2],
    rng: &mut R,
) -> Result<PureState, AdversaryError> {
    match model {
        AttackModel::Honest | AttackModel::BitFlip { .. } => Ok(joint.clone()),
        AttackModel::InterceptResendZ { p_attack } => {
            intercept_leg(joint.clone(), Basis::Z, *p_attack, rng)
        }
        AttackModel::InterceptResendX { p_attack } => {
            intercept_leg(joint.clone(), Basis::X, *p_attack, rng)
        }
        AttackModel::Collective(c) => apply_on_all(&c.u2, joint),
    }
}

/// Measures each of the two photon qubits with probability `p` in `basis`;
/// the collapse is exactly the substituted basis state.
fn intercept_leg<R: Rng + ?Sized>(
    mut state: PureState,
    basis: Basis,
    p: f64,
    rng: &mut R,
) -> Result<PureState, AdversaryError> {
    for pos in 0..2 {
        if rng.gen::<f64>() < p {
            let (_, collapsed) = measure(&state, basis, pos, rng)?;
            state = collapsed;
        }
    }
    Ok(state)
}

fn apply_on_all(u: &UnitaryMatrix, state: &PureState) -> Result<PureState, AdversaryError> {
    let targets: Vec<usize> = (0..state.num_qubits()).collect();
    Ok(apply_unitary(u, state, &targets)?)
}

/// One exact measurement branch of a single logical-index round trip under
/// a collective attack.
#[derive(Debug, Clone)]
pub struct IndexBranch {
    /// Joint probability of the branch, including the 1/4 weight of the
    /// sent configuration.
    pub probability: f64,
    /// The payload bit Alice sent.
    pub payload_bit: u8,
    /// Whether the payload occupies the first slot of the pair.
    pub payload_first: bool,
    /// Bob's Z measurement of the payload.
    pub bob_bit: u8,
    /// Alice's Z recheck of the returned payload.
    pub alice_payload_bit: u8,
    /// Alice's X check of the returned decoy (0 = |+⟩ as expected).
    pub alice_decoy_outcome: u8,
    /// True when every check agrees with the honest expectation.
    pub undetected: bool,
    /// The adversary's ancilla register after all measurements (pure,
    /// because every non-ancilla qubit has been projected out).
    pub eve_state: PureState,
}

/// Enumerates every measurement branch of one logical index under `attack`,
/// averaging uniformly over the four sent configurations (payload bit 0/1 ×
/// payload-first/decoy-first). No sampling is involved; probabilities come
/// from the Born rule.
pub fn enumerate_branches(attack: &CollectiveAttack) -> Result<Vec<IndexBranch>, AdversaryError> {
    let ancilla = PureState::basis_state(attack.ancilla_qubits, 0)?;
    let mut branches = Vec::new();
    for payload_first in [true, false] {
        for payload_bit in [0u8, 1u8] {
            let payload = prepare_z(payload_bit);
            let decoy = prepare_plus();
            let pair = if payload_first {
                tensor(&payload, &decoy)?
            } else {
                tensor(&decoy, &payload)?
            };
            let (payload_pos, decoy_pos) = if payload_first { (0, 1) } else { (1, 0) };
            let joint = tensor(&pair, &ancilla)?;
            let joint = apply_on_all(&attack.u1, &joint)?;
            for bob_bit in [0u8, 1u8] {
                let (p_bob, after_bob) = project(&joint, Basis::Z, payload_pos, bob_bit)?;
                let Some(after_bob) = after_bob else { continue };
                if p_bob < BRANCH_CUTOFF {
                    continue;
                }
                let returned = apply_on_all(&attack.u2, &after_bob)?;
                for alice_payload_bit in [0u8, 1u8] {
                    let (p_ap, after_z) =
                        project(&returned, Basis::Z, payload_pos, alice_payload_bit)?;
                    let Some(after_z) = after_z else { continue };
                    if p_ap < BRANCH_CUTOFF {
                        continue;
                    }
                    for alice_decoy_outcome in [0u8, 1u8] {
                        let (p_ad, after_x) =
                            project(&after_z, Basis::X, decoy_pos, alice_decoy_outcome)?;
                        let Some(after_x) = after_x else { continue };
                        let probability = 0.25 * p_bob * p_ap * p_ad;
                        if probability < BRANCH_CUTOFF {
                            continue;
                        }
                        let eve_state = extract_ancilla(
                            &after_x,
                            payload_pos,
                            alice_payload_bit,
                            decoy_pos,
                            alice_decoy_outcome,
                        )?;
                        let undetected = bob_bit == payload_bit
                            && alice_payload_bit == payload_bit
                            && alice_decoy_outcome == 0;
                        branches.push(IndexBranch {
                            probability,
                            payload_bit,
                            payload_first,
                            bob_bit,
                            alice_payload_bit,
                            alice_decoy_outcome,
                            undetected,
                            eve_state,
                        });
                    }
                }
            }
        }
    }
    Ok(branches)
}

/// Pulls the ancilla register out of a fully measured branch state.
///
/// After Alice's projections the payload qubit is a Z eigenstate and the
/// decoy qubit an X eigenstate, so the joint state factors as
/// |payload⟩ ⊗ |±⟩ ⊗ |ancilla⟩; rotating the decoy into the Z basis makes
/// the ancilla amplitudes a contiguous slice.
fn extract_ancilla(
    state: &PureState,
    payload_pos: usize,
    payload_bit: u8,
    decoy_pos: usize,
    decoy_outcome: u8,
) -> Result<PureState, AdversaryError> {
    let ancilla_qubits = state.num_qubits() - 2;
    let rotated = apply_unitary(&UnitaryMatrix::hadamard(), state, &[decoy_pos])?;
    let mut pair_bits = [0usize; 2];
    pair_bits[payload_pos] = payload_bit as usize;
    pair_bits[decoy_pos] = decoy_outcome as usize;
    let base = ((pair_bits[0] << 1) | pair_bits[1]) << ancilla_qubits;
    let mut amplitudes: Vec<Complex64> = (0..(1usize << ancilla_qubits))
        .map(|j| rotated.amplitude(base + j))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    debug_assert!((norm - 1.0).abs() < 1e-6, "branch state did not factor");
    let inv = 1.0 / norm;
    for a in amplitudes.iter_mut() {
        *a *= inv;
    }
    Ok(PureState::new(amplitudes)?)
}

/// Exact probability that at least one of Bob's or Alice's per-index checks
/// fails, averaged over the four sent configurations.
pub fn detection_probability_exact(attack: &CollectiveAttack) -> Result<f64, AdversaryError> {
    let undetected: f64 = enumerate_branches(attack)?
        .iter()
        .filter(|b| b.undetected)
        .map(|b| b.probability)
        .sum();
    Ok((1.0 - undetected).clamp(0.0, 1.0))
}

/// The adversary's conditional ancilla ensemble: one weighted pure state per
/// (sent configuration, measurement branch).
pub fn eve_branch_ensemble(
    attack: &CollectiveAttack,
) -> Result<Vec<(f64, PureState)>, AdversaryError> {
    Ok(enumerate_branches(attack)?
        .into_iter()
        .map(|b| (b.probability, b.eve_state))
        .collect())
}

/// Holevo quantity χ = S(Σ pᵢ ρᵢ) − Σ pᵢ S(ρᵢ) of an ensemble of pure
/// conditional states, in bits. Pure inputs make the second term vanish,
/// so χ reduces to the entropy of the average density operator. Zero iff
/// all conditional states coincide; bounded by log₂ of the state dimension.
pub fn eve_information(ensemble: &[(f64, PureState)]) -> Result<f64, AdversaryError> {
    if ensemble.is_empty() {
        return Err(AdversaryError::EmptyEnsemble);
    }
    let dim = ensemble[0].1.dim();
    if ensemble.iter().any(|(_, s)| s.dim() != dim) {
        return Err(AdversaryError::MixedEnsembleDimensions);
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(AdversaryError::UnnormalizedEnsemble(total));
    }
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (p, state) in ensemble {
        let amps = state.amplitudes();
        for r in 0..dim {
            let w = Complex64::new(*p, 0.0) * amps[r];
            for c in 0..dim {
                rho[r * dim + c] += w * amps[c].conj();
            }
        }
    }
    Ok(von_neumann_entropy_bits(dim, &rho))
}

/// Von Neumann entropy −Σ λ log₂ λ of a density matrix, in bits.
pub fn von_neumann_entropy_bits(dim: usize, rho: &[Complex64]) -> f64 {
    let entropy: f64 = linalg::hermitian_eigenvalues(dim, rho)
        .into_iter()
        .filter(|&lambda| lambda > 1e-12)
        .map(|lambda| -lambda * lambda.log2())
        .sum();
    entropy.max(0.0)
}
