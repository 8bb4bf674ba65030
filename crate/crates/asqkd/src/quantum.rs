//! Minimal pure-state simulator: preparation, tensor composition, unitary
//! application, and projective measurement in the Z and X bases.
//!
//! Conventions, fixed once for the whole crate:
//! - Qubit 0 is the most significant bit of the basis-state index, so the
//!   amplitude ordering follows left-to-right ket notation (|0+⟩ puts the
//!   |0⟩ qubit first).
//! - X-basis outcome 0 means projection onto |+⟩, outcome 1 onto |−⟩.
//! - States are immutable values; every stochastic operation takes an
//!   explicit generator, so trials are bit-reproducible and safe to run
//!   from concurrent workers.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::linalg;

/// Hard cap on register width; the protocol needs at most two transmitted
/// qubits plus a small eavesdropper ancilla.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for the state-norm invariant.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Entrywise tolerance for the U†U = I invariant.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("amplitude vector length {0} is not a power of two")]
    BadAmplitudeCount(usize),
    #[error("state norm {0} is not 1 within tolerance")]
    NotNormalized(f64),
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("target qubit {target} out of range for a {num_qubits}-qubit state")]
    TargetOutOfRange { target: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("matrix dimension {dim} does not match {targets} target qubit(s)")]
    DimensionMismatch { dim: usize, targets: usize },
    #[error("states have different dimensions ({0} vs {1})")]
    StateDimensionMismatch(usize, usize),
    #[error("matrix is not unitary (max |U†U − I| entry = {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix entry count {entries} does not form a {dim}×{dim} matrix")]
    BadMatrixShape { dim: usize, entries: usize },
    #[error("measurement outcome must be 0 or 1, got {0}")]
    BadOutcome(u8),
}

/// Measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

/// A normalized complex amplitude vector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, checking the length and norm
    /// invariants.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QuantumError::BadAmplitudeCount(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(QuantumError::TooManyQubits(num_qubits));
        }
        let state = PureState {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// The computational basis state |index⟩ on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        if num_qubits > MAX_QUBITS {
            return Err(QuantumError::TooManyQubits(num_qubits));
        }
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// L2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn renormalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for a in self.amplitudes.iter_mut() {
                *a *= inv;
            }
        }
        self
    }

    /// Bit value of `qubit` within basis-state `index` (qubit 0 = MSB).
    fn index_bit(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.num_qubits - 1 - qubit)) & 1
    }

    fn check_target(&self, target: usize) -> Result<(), QuantumError> {
        if target >= self.num_qubits {
            return Err(QuantumError::TargetOutOfRange {
                target,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }
}

/// Prepares the 1-qubit computational basis state for `bit`.
pub fn prepare_z(bit: u8) -> PureState {
    assert!(bit <= 1, "bit must be 0 or 1");
    PureState::basis_state(1, bit as usize).expect("one qubit is always valid")
}

/// Prepares |+⟩ = (|0⟩ + |1⟩)/√2.
pub fn prepare_plus() -> PureState {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState {
        num_qubits: 1,
        amplitudes: vec![h, h],
    }
}

/// Kronecker product `a ⊗ b`; `a`'s qubits become the most significant.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState, QuantumError> {
    let num_qubits = a.num_qubits + b.num_qubits;
    if num_qubits > MAX_QUBITS {
        return Err(QuantumError::TooManyQubits(num_qubits));
    }
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for &x in &a.amplitudes {
        for &y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    Ok(PureState {
        num_qubits,
        amplitudes,
    })
}

/// Applies `u` to the ordered `targets` subsystem, identity elsewhere.
pub fn apply_unitary(
    u: &UnitaryMatrix,
    s: &PureState,
    targets: &[usize],
) -> Result<PureState, QuantumError> {
    let k = targets.len();
    if u.dim != 1usize << k {
        return Err(QuantumError::DimensionMismatch {
            dim: u.dim,
            targets: k,
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        s.check_target(t)?;
        if targets[..i].contains(&t) {
            return Err(QuantumError::DuplicateTarget(t));
        }
    }

    let n = s.num_qubits;
    // Fast path: the unitary covers the whole register in natural order.
    if k == n && targets.iter().enumerate().all(|(i, &t)| i == t) {
        let dim = s.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (r, out_r) in out.iter_mut().enumerate() {
            let row = &u.entries[r * dim..(r + 1) * dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, amp) in s.amplitudes.iter().enumerate() {
                acc += row[c] * amp;
            }
            *out_r = acc;
        }
        return Ok(PureState {
            num_qubits: n,
            amplitudes: out,
        });
    }

    let mut out = vec![Complex64::new(0.0, 0.0); s.dim()];
    for (i, amp) in s.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        // Column of U selected by this index's target bits, MSB first.
        let mut col = 0usize;
        for &t in targets {
            col = (col << 1) | s.index_bit(i, t);
        }
        for r in 0..u.dim {
            let coef = u.entries[r * u.dim + col];
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            let mut j = i;
            for (a, &t) in targets.iter().enumerate() {
                let bit = (r >> (k - 1 - a)) & 1;
                let shift = n - 1 - t;
                j = (j & !(1usize << shift)) | (bit << shift);
            }
            out[j] += coef * amp;
        }
    }
    Ok(PureState {
        num_qubits: n,
        amplitudes: out,
    })
}

/// Probability of observing `outcome` when measuring `target` in `basis`,
/// together with the renormalized post-measurement state.
///
/// Returns `None` for the state when the branch has (numerically) zero
/// probability. This is the deterministic core that [`measure`] samples
/// from; exact analyses enumerate branches through it directly.
pub fn project(
    s: &PureState,
    basis: Basis,
    target: usize,
    outcome: u8,
) -> Result<(f64, Option<PureState>), QuantumError> {
    s.check_target(target)?;
    if outcome > 1 {
        return Err(QuantumError::BadOutcome(outcome));
    }
    match basis {
        Basis::Z => {
            let mut prob = 0.0;
            for (i, amp) in s.amplitudes.iter().enumerate() {
                if s.index_bit(i, target) == outcome as usize {
                    prob += amp.norm_sqr();
                }
            }
            let prob = prob.clamp(0.0, 1.0);
            if prob < 1e-300 {
                return Ok((prob, None));
            }
            let mut amplitudes = s.amplitudes.clone();
            for (i, amp) in amplitudes.iter_mut().enumerate() {
                if s.index_bit(i, target) != outcome as usize {
                    *amp = Complex64::new(0.0, 0.0);
                }
            }
            let collapsed = PureState {
                num_qubits: s.num_qubits,
                amplitudes,
            }
            .renormalized();
            Ok((prob, Some(collapsed)))
        }
        Basis::X => {
            // Rotate |±⟩ → |0/1⟩, project in Z, rotate back.
            let h = UnitaryMatrix::hadamard();
            let rotated = apply_unitary(&h, s, &[target])?;
            let (prob, collapsed) = project(&rotated, Basis::Z, target, outcome)?;
            let back = match collapsed {
                Some(state) => Some(apply_unitary(&h, &state, &[target])?),
                None => None,
            };
            Ok((prob, back))
        }
    }
}

/// Samples a projective measurement of `target` in `basis` from the Born
/// distribution and returns the outcome with the collapsed state.
pub fn measure<R: Rng + ?Sized>(
    s: &PureState,
    basis: Basis,
    target: usize,
    rng: &mut R,
) -> Result<(u8, PureState), QuantumError> {
    let (p1, branch1) = project(s, basis, target, 1)?;
    let outcome = u8::from(rng.gen::<f64>() < p1);
    let collapsed = if outcome == 1 {
        branch1.expect("sampled branch has positive probability")
    } else {
        let (_, branch0) = project(s, basis, target, 0)?;
        branch0.expect("sampled branch has positive probability")
    };
    Ok((outcome, collapsed))
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64, QuantumError> {
    if a.dim() != b.dim() {
        return Err(QuantumError::StateDimensionMismatch(a.dim(), b.dim()));
    }
    let inner: Complex64 = a
        .amplitudes
        .iter()
        .zip(b.amplitudes.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(inner.norm_sqr().clamp(0.0, 1.0))
}

/// A dim×dim unitary matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a matrix from row-major entries, checking U†U = I.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, QuantumError> {
        if entries.len() != dim * dim {
            return Err(QuantumError::BadMatrixShape {
                dim,
                entries: entries.len(),
            });
        }
        let u = UnitaryMatrix { dim, entries };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(QuantumError::NotUnitary(deviation));
        }
        Ok(u)
    }

    /// Constructor for matrices that are unitary by construction.
    pub(crate) fn new_unchecked(dim: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        UnitaryMatrix { dim, entries }
    }

    /// Largest entrywise deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = linalg::matmul(
            self.dim,
            &linalg::dagger(self.dim, &self.entries),
            &self.entries,
        );
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expect = if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((product[r * self.dim + c] - expect).norm());
            }
        }
        worst
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix {
            dim,
            entries: linalg::identity(dim),
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        UnitaryMatrix {
            dim: 2,
            entries: vec![h, h, h, -h],
        }
    }

    pub fn pauli_x() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        UnitaryMatrix {
            dim: 2,
            entries: vec![zero, one, one, zero],
        }
    }

    /// A Haar-ish random unitary: Gram-Schmidt orthonormalization of a
    /// complex Gaussian matrix drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let mut rows: Vec<Vec<Complex64>> = (0..dim)
                .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
                .collect();
            let mut ok = true;
            for i in 0..dim {
                for j in 0..i {
                    let proj: Complex64 = rows[j]
                        .iter()
                        .zip(rows[i].iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let basis_row = rows[j].clone();
                    for (x, b) in rows[i].iter_mut().zip(basis_row.iter()) {
                        *x -= proj * b;
                    }
                }
                let norm = rows[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                let inv = 1.0 / norm;
                for a in rows[i].iter_mut() {
                    *a *= inv;
                }
            }
            if ok {
                let entries = rows.into_iter().flatten().collect();
                return UnitaryMatrix { dim, entries };
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }
}

/// One standard complex Gaussian sample (Box-Muller).
fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn prepare_z_is_computational_basis() {
        assert_eq!(prepare_z(0).amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(prepare_z(1).amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn prepare_z_eigenstate_measures_deterministically() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (outcome, collapsed) = measure(&prepare_z(1), Basis::Z, 0, &mut rng).unwrap();
            assert_eq!(outcome, 1);
            assert_eq!(collapsed, prepare_z(1));
        }
    }

    #[test]
    fn prepare_plus_amplitudes() {
        let plus = prepare_plus();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.amplitude(0) - c(h, 0.0)).norm() < 1e-15);
        assert!((plus.amplitude(1) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn plus_is_x_eigenstate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (outcome, _) = measure(&prepare_plus(), Basis::X, 0, &mut rng).unwrap();
            assert_eq!(outcome, 0);
        }
    }

    #[test]
    fn plus_in_z_is_unbiased() {
        // Born rule: outcome-0 frequency within a 3σ binomial band of 1/2.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000usize;
        let zeros = (0..trials)
            .filter(|_| measure(&prepare_plus(), Basis::Z, 0, &mut rng).unwrap().0 == 0)
            .count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.005, "freq = {freq}");
    }

    #[test]
    fn tensor_orders_first_factor_most_significant() {
        let s01 = tensor(&prepare_z(0), &prepare_z(1)).unwrap();
        assert_eq!(
            s01.amplitudes(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus0 = tensor(&prepare_plus(), &prepare_z(0)).unwrap();
        let expected = [c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)];
        for (a, e) in plus0.amplitudes().iter().zip(expected.iter()) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_state(2, &mut rng);
            let b = random_state(3, &mut rng);
            let t = tensor(&a, &b).unwrap();
            assert!((t.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_enforces_qubit_cap() {
        let a = random_state(5, &mut ChaCha8Rng::seed_from_u64(5));
        let b = random_state(4, &mut ChaCha8Rng::seed_from_u64(6));
        assert_eq!(tensor(&a, &b), Err(QuantumError::TooManyQubits(9)));
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_state(3, &mut rng);
        let u = UnitaryMatrix::identity(8);
        let out = apply_unitary(&u, &s, &[0, 1, 2]).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes().iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let out = apply_unitary(&UnitaryMatrix::hadamard(), &prepare_z(0), &[0]).unwrap();
        let plus = prepare_plus();
        for (a, b) in out.amplitudes().iter().zip(plus.amplitudes().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn random_unitary_preserves_norm() {
        // Unitary generated by orthonormalizing a seeded complex Gaussian
        // matrix; applying it must leave the norm at 1.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = UnitaryMatrix::random(8, &mut rng);
        assert!(u.unitarity_deviation() < 1e-12);
        let s = random_state(3, &mut rng);
        let out = apply_unitary(&u, &s, &[0, 1, 2]).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn apply_unitary_on_subsystem_matches_manual_expansion() {
        // X on qubit 1 of |00⟩ gives |01⟩.
        let s = tensor(&prepare_z(0), &prepare_z(0)).unwrap();
        let out = apply_unitary(&UnitaryMatrix::pauli_x(), &s, &[1]).unwrap();
        assert!((out.amplitude(1) - c(1.0, 0.0)).norm() < 1e-15);

        // X on qubit 0 of |00⟩ gives |10⟩ (qubit 0 is the MSB).
        let out = apply_unitary(&UnitaryMatrix::pauli_x(), &s, &[0]).unwrap();
        assert!((out.amplitude(2) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn apply_unitary_rejects_bad_targets() {
        let s = tensor(&prepare_z(0), &prepare_z(0)).unwrap();
        let u = UnitaryMatrix::identity(4);
        assert!(matches!(
            apply_unitary(&u, &s, &[0, 2]),
            Err(QuantumError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            apply_unitary(&u, &s, &[1, 1]),
            Err(QuantumError::DuplicateTarget(1))
        ));
        assert!(matches!(
            apply_unitary(&u, &s, &[0]),
            Err(QuantumError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn measure_rejects_out_of_range_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        assert!(matches!(
            measure(&prepare_plus(), Basis::Z, 1, &mut rng),
            Err(QuantumError::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn unitary_constructor_rejects_non_unitary_entries() {
        let entries = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            UnitaryMatrix::new(2, entries),
            Err(QuantumError::NotUnitary(_))
        ));
        assert!(matches!(
            UnitaryMatrix::new(2, vec![c(1.0, 0.0); 3]),
            Err(QuantumError::BadMatrixShape { .. })
        ));
    }

    #[test]
    fn unitarity_preserves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = random_state(3, &mut rng);
            let b = random_state(3, &mut rng);
            let u = UnitaryMatrix::random(8, &mut rng);
            let ua = apply_unitary(&u, &a, &[0, 1, 2]).unwrap();
            let ub = apply_unitary(&u, &b, &[0, 1, 2]).unwrap();
            let before = inner(&a, &b);
            let after = inner(&ua, &ub);
            assert!((before - after).norm() < 1e-8);
        }
    }

    #[test]
    fn measurement_is_idempotent_per_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for basis in [Basis::Z, Basis::X] {
            for _ in 0..40 {
                let s = random_state(3, &mut rng);
                let target = rng.gen_range(0..3);
                let (outcome, collapsed) = measure(&s, basis, target, &mut rng).unwrap();
                let (again, _) = measure(&collapsed, basis, target, &mut rng).unwrap();
                assert_eq!(outcome, again);
                assert!((collapsed.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn project_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_state(3, &mut rng);
        for basis in [Basis::Z, Basis::X] {
            for target in 0..3 {
                let (p0, _) = project(&s, basis, target, 0).unwrap();
                let (p1, _) = project(&s, basis, target, 1).unwrap();
                assert!((p0 + p1 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let s = prepare_plus();
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&prepare_z(0), &prepare_z(1)).unwrap() < 1e-15);
        assert!((fidelity(&prepare_z(0), &prepare_plus()).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(
            &prepare_z(0),
            &tensor(&prepare_z(0), &prepare_z(0)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn pure_state_invariants_are_enforced() {
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            Err(QuantumError::BadAmplitudeCount(3))
        ));
        assert!(matches!(
            PureState::new(vec![c(0.7, 0.0), c(0.7, 0.0)]),
            Err(QuantumError::NotNormalized(_))
        ));
        assert!(PureState::new(vec![c(1.0, 0.0)]).is_ok()); // 0-qubit state is the tensor unit
    }

    #[test]
    fn born_statistics_for_random_single_qubit_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let s = random_state(1, &mut rng);
            let p0 = s.amplitude(0).norm_sqr();
            let trials = 20_000usize;
            let zeros = (0..trials)
                .filter(|_| measure(&s, Basis::Z, 0, &mut rng).unwrap().0 == 0)
                .count();
            let freq = zeros as f64 / trials as f64;
            let sigma = (p0 * (1.0 - p0) / trials as f64).sqrt();
            assert!(
                (freq - p0).abs() <= 3.0 * sigma + 1e-9,
                "freq {freq} vs p0 {p0} (3σ = {})",
                3.0 * sigma
            );
        }
    }

    fn inner(a: &PureState, b: &PureState) -> Complex64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes().iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    fn random_state<R: Rng>(num_qubits: usize, rng: &mut R) -> PureState {
        let dim = 1usize << num_qubits;
        let amplitudes: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        PureState::new(amplitudes.into_iter().map(|a| a / norm).collect()).unwrap()
    }
}
