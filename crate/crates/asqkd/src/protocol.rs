//! The measure-resend key distribution session.
//!
//! One session distributes an n-bit key SK from Alice (full quantum
//! capability) to Bob (Z-basis measure/prepare and reflect only):
//!
//! 1. Alice hashes SK with the family member selected by K₂ and forms the
//!    payload S_A = SK ∥ tag (n + m bits).
//! 2. She interleaves one |+⟩ decoy per payload bit, positioned by K₁
//!    (K₁ᵢ = 0 puts the decoy in front of payload bit i, K₁ᵢ = 1 behind),
//!    encodes payload bits in the Z basis, and sends the 2(n+m) photons
//!    one at a time.
//! 3. Bob, reading roles off K₁, Z-measures each payload photon and sends
//!    back a fresh photon in the measured state; decoys he reflects
//!    untouched. He holds at most one photon at a time.
//! 4. Alice Z-checks returned payloads against S_A and X-checks returned
//!    decoys against |+⟩; Bob recomputes the tag over his received SK′ and
//!    compares it with the received tag.
//! 5. Both sides exchange one authenticated verdict bit each; the
//!    pre-shared keys are recycled only when every check passed.
//!
//! The adversary may act on both channel legs; see [`crate::adversary`].

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::{self, AdversaryError, AttackModel};
use crate::bits::BitString;
use crate::hashing::{self, HashError};
use crate::quantum::{measure, prepare_plus, prepare_z, tensor, Basis, PureState, QuantumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("{what} must have {expected} bits, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("key length n must be at least 1")]
    EmptyKey,
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
}

/// Session parameters: n key bits, m hash bits, and the base seed used by
/// callers to derive generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SessionConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self, ProtocolError> {
        if n < 1 {
            return Err(ProtocolError::EmptyKey);
        }
        if !(hashing::MIN_HASH_BITS..=hashing::MAX_HASH_BITS).contains(&m) {
            return Err(ProtocolError::Hash(HashError::WidthOutOfRange(m)));
        }
        Ok(SessionConfig { n, m, seed })
    }

    /// Photons Alice transmits per session: one payload and one decoy per
    /// logical index.
    pub fn transmitted_qubits(&self) -> usize {
        2 * (self.n + self.m)
    }

    /// Total generated qubits including Bob's resent payload photons.
    pub fn total_generated_qubits(&self) -> usize {
        3 * (self.n + self.m)
    }
}

/// The pre-shared secret keys: K₁ (n+m bits) positions the decoys, K₂
/// (m bits) selects the hash family member. n + 2m secret bits in total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreSharedKeys {
    pub k1: BitString,
    pub k2: BitString,
}

impl PreSharedKeys {
    pub fn new(k1: BitString, k2: BitString) -> Self {
        PreSharedKeys { k1, k2 }
    }

    /// Draws uniformly random keys for `config`.
    pub fn random<R: Rng + ?Sized>(config: &SessionConfig, rng: &mut R) -> Self {
        PreSharedKeys {
            k1: BitString::random(config.n + config.m, rng),
            k2: BitString::random(config.m, rng),
        }
    }

    fn check_lengths(&self, config: &SessionConfig) -> Result<(), ProtocolError> {
        if self.k1.len() != config.n + config.m {
            return Err(ProtocolError::LengthMismatch {
                what: "K1",
                expected: config.n + config.m,
                actual: self.k1.len(),
            });
        }
        if self.k2.len() != config.m {
            return Err(ProtocolError::LengthMismatch {
                what: "K2",
                expected: config.m,
                actual: self.k2.len(),
            });
        }
        Ok(())
    }
}

/// Role of one transmitted photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhotonRole {
    /// Carries one bit of S_A in the Z basis.
    Payload,
    /// A |+⟩ decoy, reflected by Bob and X-checked by Alice.
    Decoy,
}

/// One photon of the transmission sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonRecord {
    /// Position in the transmission sequence, 0..2(n+m).
    pub slot: usize,
    /// The payload/decoy index this photon belongs to, 0..n+m.
    pub logical_index: usize,
    pub role: PhotonRole,
    /// The state Alice prepared (before any channel interference).
    pub sent_state: PureState,
    /// Alice's measured outcome for the returned photon, once received.
    pub returned_outcome: Option<u8>,
}

/// Pass/fail verdict exchanged over the ideal authenticated classical bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuthBit {
    Pass,
    Fail,
}

impl From<bool> for AuthBit {
    fn from(pass: bool) -> Self {
        if pass {
            AuthBit::Pass
        } else {
            AuthBit::Fail
        }
    }
}

/// Everything observable about one completed session.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub photons: Vec<PhotonRecord>,
    /// Bob's Z outcomes on payload photons, in logical order (SK′ ∥ tag′).
    pub bob_measured_bits: BitString,
    /// Alice's measured outcomes on returned photons, in slot order.
    pub alice_recheck_bits: Vec<u8>,
    pub alice_auth_bit: AuthBit,
    pub bob_auth_bit: AuthBit,
}

/// Session verdicts and the distributed key on both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub alice_check_pass: bool,
    pub bob_check_pass: bool,
    #[serde(serialize_with = "crate::protocol::serialize_bits")]
    pub sk: BitString,
    #[serde(serialize_with = "crate::protocol::serialize_bits")]
    pub sk_prime: BitString,
    pub keys_recycled: bool,
}

pub(crate) fn serialize_bits<S: serde::Serializer>(
    bits: &BitString,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&bits.to_string())
}

/// S_A = SK ∥ Hash_{K₂}(SK).
pub fn make_payload(sk: &BitString, k2: &BitString) -> Result<BitString, ProtocolError> {
    if sk.is_empty() {
        return Err(ProtocolError::EmptyKey);
    }
    let key = hashing::select_hash(k2)?;
    let tag = hashing::universal_hash(sk, &key)?;
    Ok(sk.concat(tag.bits()))
}

/// The transmission order: for each logical index i, K₁ᵢ = 0 sends the
/// decoy first, K₁ᵢ = 1 sends the payload first.
pub fn interleave(
    s_a: &BitString,
    k1: &BitString,
) -> Result<Vec<(PhotonRole, usize)>, ProtocolError> {
    if s_a.len() != k1.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "K1",
            expected: s_a.len(),
            actual: k1.len(),
        });
    }
    let mut order = Vec::with_capacity(2 * s_a.len());
    for i in 0..s_a.len() {
        if k1.bit(i) == 0 {
            order.push((PhotonRole::Decoy, i));
            order.push((PhotonRole::Payload, i));
        } else {
            order.push((PhotonRole::Payload, i));
            order.push((PhotonRole::Decoy, i));
        }
    }
    Ok(order)
}

/// Splits a slot-ordered value sequence back into (S_A, S_D) using K₁.
pub fn deinterleave(
    values: &BitString,
    k1: &BitString,
) -> Result<(BitString, BitString), ProtocolError> {
    if values.len() != 2 * k1.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "interleaved sequence",
            expected: 2 * k1.len(),
            actual: values.len(),
        });
    }
    let mut s_a = BitString::zeros(0);
    let mut s_d = BitString::zeros(0);
    for (role, logical) in interleave(&BitString::zeros(k1.len()), k1)? {
        let slot = s_a.len() + s_d.len();
        debug_assert_eq!(logical, slot / 2);
        match role {
            PhotonRole::Payload => s_a.push(values.bit(slot)),
            PhotonRole::Decoy => s_d.push(values.bit(slot)),
        }
    }
    Ok((s_a, s_d))
}

/// Role of a transmission slot as both honest parties derive it from K₁.
pub fn role_for_slot(slot: usize, k1: &BitString) -> PhotonRole {
    let payload_first = k1.bit(slot / 2) == 1;
    if slot.is_multiple_of(2) == payload_first {
        PhotonRole::Payload
    } else {
        PhotonRole::Decoy
    }
}

/// Alice's photon sequence Q_A for the session: payload bits Z-encoded,
/// every decoy |+⟩ (the decoy string S_D is all zeros).
pub fn alice_prepare(
    sk: &BitString,
    keys: &PreSharedKeys,
) -> Result<Vec<PhotonRecord>, ProtocolError> {
    let s_a = make_payload(sk, &keys.k2)?;
    let order = interleave(&s_a, &keys.k1)?;
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(slot, (role, logical_index))| {
            let sent_state = match role {
                PhotonRole::Payload => prepare_z(s_a.bit(logical_index)),
                PhotonRole::Decoy => prepare_plus(),
            };
            PhotonRecord {
                slot,
                logical_index,
                role,
                sent_state,
                returned_outcome: None,
            }
        })
        .collect())
}

/// Bob's handling of one received photon, with the role derived from K₁
/// alone: payload → Z-measure, record the bit, and resend the measured
/// basis state; decoy → reflect untouched, record nothing.
pub fn bob_process<R: Rng + ?Sized>(
    photon: &PhotonRecord,
    keys: &PreSharedKeys,
    rng: &mut R,
) -> Result<(PureState, Option<u8>), ProtocolError> {
    match role_for_slot(photon.slot, &keys.k1) {
        PhotonRole::Decoy => Ok((photon.sent_state.clone(), None)),
        PhotonRole::Payload => {
            let (bit, _) = measure(&photon.sent_state, Basis::Z, 0, rng)?;
            Ok((prepare_z(bit), Some(bit)))
        }
    }
}

/// Alice's Step 4 verification over per-photon returned states: Z-measure
/// each payload and compare with S_A, X-measure each decoy and require the
/// |+⟩ outcome. A missing or surplus photon counts as detection.
pub fn alice_verify<R: Rng + ?Sized>(
    returned: &[(PhotonRecord, PureState)],
    s_a: &BitString,
    keys: &PreSharedKeys,
    rng: &mut R,
) -> Result<bool, ProtocolError> {
    if returned.len() != 2 * s_a.len() {
        return Ok(false);
    }
    let mut pass = true;
    for (record, state) in returned {
        match role_for_slot(record.slot, &keys.k1) {
            PhotonRole::Payload => {
                let (bit, _) = measure(state, Basis::Z, 0, rng)?;
                pass &= bit == s_a.bit(record.logical_index);
            }
            PhotonRole::Decoy => {
                let (outcome, _) = measure(state, Basis::X, 0, rng)?;
                pass &= outcome == 0;
            }
        }
    }
    Ok(pass)
}

/// Bob's Step 4 verification: split his measured bits into SK′ and the
/// received tag, recompute the tag over SK′ and compare.
pub fn bob_verify(
    measured: &BitString,
    config: &SessionConfig,
    keys: &PreSharedKeys,
) -> Result<(bool, BitString), ProtocolError> {
    if measured.len() != config.n + config.m {
        return Err(ProtocolError::LengthMismatch {
            what: "measured payload bits",
            expected: config.n + config.m,
            actual: measured.len(),
        });
    }
    let sk_prime = measured.slice(0..config.n);
    let received_tag = measured.slice(config.n..config.n + config.m);
    let key = hashing::select_hash(&keys.k2)?;
    let expected_tag = hashing::universal_hash(&sk_prime, &key)?;
    Ok((expected_tag.bits() == &received_tag, sk_prime))
}

/// Runs one full session with a key drawn uniformly from `rng`.
pub fn run_session<R: Rng + ?Sized>(
    config: &SessionConfig,
    keys: &PreSharedKeys,
    attack: &AttackModel,
    rng: &mut R,
) -> Result<(RunOutcome, Transcript), ProtocolError> {
    let sk = BitString::random(config.n, rng);
    run_session_with_key(config, keys, &sk, attack, rng)
}

/// Runs one full session distributing the given key.
///
/// Photons travel one logical index at a time; the adversary may act on
/// both legs of each round trip (buffering the pair, which the honest
/// parties cannot do). Attack-induced check failures are outcomes, not
/// errors.
pub fn run_session_with_key<R: Rng + ?Sized>(
    config: &SessionConfig,
    keys: &PreSharedKeys,
    sk: &BitString,
    attack: &AttackModel,
    rng: &mut R,
) -> Result<(RunOutcome, Transcript), ProtocolError> {
    keys.check_lengths(config)?;
    if sk.len() != config.n {
        return Err(ProtocolError::LengthMismatch {
            what: "SK",
            expected: config.n,
            actual: sk.len(),
        });
    }
    attack.validate()?;

    let total = config.n + config.m;
    let s_a = make_payload(sk, &keys.k2)?;
    let mut photons = alice_prepare(sk, keys)?;
    let mut bob_bits = BitString::zeros(total);
    let mut recheck = vec![0u8; 2 * total];
    let mut alice_pass = true;

    for i in 0..total {
        let payload_first = keys.k1.bit(i) == 1;
        let payload_pos = if payload_first { 0 } else { 1 };
        let slots = [2 * i, 2 * i + 1];
        let pair = tensor(&photons[slots[0]].sent_state, &photons[slots[1]].sent_state)?;
        let ancilla = attack.initial_ancilla();
        let mut joint = adversary::attack_forward(attack, &pair, &ancilla, slots, rng)?;

        // Bob: the Z collapse leaves the payload qubit in exactly the basis
        // state he resends; the reflected decoy passes through untouched.
        let (bob_bit, collapsed) = measure(&joint, Basis::Z, payload_pos, rng)?;
        bob_bits.set(i, bob_bit);
        joint = collapsed;

        joint = adversary::attack_backward(attack, &joint, slots, rng)?;

        // Alice measures the returns on receipt, in slot order.
        for (pos, &slot) in slots.iter().enumerate() {
            let outcome = if pos == payload_pos {
                let (bit, next) = measure(&joint, Basis::Z, pos, rng)?;
                joint = next;
                alice_pass &= bit == s_a.bit(i);
                bit
            } else {
                let (x_outcome, next) = measure(&joint, Basis::X, pos, rng)?;
                joint = next;
                alice_pass &= x_outcome == 0;
                x_outcome
            };
            recheck[slot] = outcome;
            photons[slot].returned_outcome = Some(outcome);
        }
        // What remains of `joint` is the adversary's ancilla; the honest
        // parties never see it.
    }

    let (bob_pass, sk_prime) = bob_verify(&bob_bits, config, keys)?;
    let keys_recycled = alice_pass && bob_pass;

    let outcome = RunOutcome {
        alice_check_pass: alice_pass,
        bob_check_pass: bob_pass,
        sk: sk.clone(),
        sk_prime,
        keys_recycled,
    };
    let transcript = Transcript {
        photons,
        bob_measured_bits: bob_bits,
        alice_recheck_bits: recheck,
        alice_auth_bit: AuthBit::from(alice_pass),
        bob_auth_bit: AuthBit::from(bob_pass),
    };
    Ok((outcome, transcript))
}
