//! Dense statevector simulator.
//!
//! Qubit `0` is the least significant bit of the basis-state index. A gate
//! lists its target qubits with `targets[0]` mapping to the least
//! significant bit of the gate's local matrix, plus optional control qubits
//! that must all read `1` for the unitary to act. Everything is exact
//! double-precision (or `f32`) arithmetic; there is no sampling noise here.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{approx_f64, real, Scalar};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("gate indices must be distinct, got duplicate qubit {index}")]
    DuplicateQubit { index: usize },
    #[error("unitary payload of dimension {dim} does not match {targets} target qubit(s)")]
    DimensionMismatch { dim: usize, targets: usize },
    #[error("matrix payload is not unitary (max |U†U - I| = {deviation:.3e})")]
    NonUnitary { deviation: f64 },
    #[error("amplitude vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("cannot encode the zero vector as a quantum state")]
    ZeroVector,
    #[error("state norm {norm} too far from 1")]
    NotNormalized { norm: f64 },
    #[error("post-selection outcome has probability {probability:.3e}, below threshold")]
    ZeroProbabilityOutcome { probability: f64 },
    #[error("probability query needs at least one qubit")]
    EmptyQubitList,
    #[error("register extraction requires the discarded qubits to be in a basis state")]
    EntangledRemainder,
}

/// Complex amplitudes over `2^num_qubits` basis states.
#[derive(Debug, Clone)]
pub struct StateVector<T: Scalar> {
    amps: Vec<Complex<T>>,
    num_qubits: usize,
}

impl<T: Scalar> StateVector<T> {
    /// All-zeros computational basis state `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        StateVector { amps, num_qubits }
    }

    /// Builds a state from explicit amplitudes; the length must be a power
    /// of two and the vector normalized within tolerance.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::NotPowerOfTwo { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        let state = StateVector { amps, num_qubits };
        let norm = state.norm();
        if (norm - T::one()).abs() > tol::norm::<T>() {
            return Err(SimError::NotNormalized {
                norm: approx_f64(norm),
            });
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Raw amplitude read-back. This is the "simulation privilege" API: the
    /// hybrid estimation path may call it, the full path sticks to
    /// [`probabilities`](Self::probabilities) and post-selection.
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Tensor product with `other`; `self` keeps the low qubit indices.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps =
            vec![Complex::new(T::zero(), T::zero()); self.amps.len() * other.amps.len()];
        for (hi, b) in other.amps.iter().enumerate() {
            if b.norm_sqr() == T::zero() {
                continue;
            }
            let base = hi << self.num_qubits;
            for (lo, a) in self.amps.iter().enumerate() {
                amps[base | lo] = *a * *b;
            }
        }
        StateVector {
            amps,
            num_qubits: self.num_qubits + other.num_qubits,
        }
    }

    /// Applies a gate in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<(), SimError> {
        gate.validate(self.num_qubits)?;
        let unitary = gate.kind.matrix();
        let dim = unitary.dim;
        let target_mask: usize = gate.targets.iter().map(|&q| 1usize << q).sum();
        let control_mask: usize = gate.controls.iter().map(|&q| 1usize << q).sum();
        let spread = |local: usize| -> usize {
            gate.targets
                .iter()
                .enumerate()
                .fold(0usize, |acc, (bit, &q)| acc | (((local >> bit) & 1) << q))
        };
        let offsets: Vec<usize> = (0..dim).map(spread).collect();
        let mut gathered = vec![Complex::new(T::zero(), T::zero()); dim];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            if base & control_mask != control_mask {
                continue;
            }
            for (slot, off) in offsets.iter().enumerate() {
                gathered[slot] = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (col, amp) in gathered.iter().enumerate() {
                    acc += unitary.data[row * dim + col] * *amp;
                }
                self.amps[base | off] = acc;
            }
        }
        Ok(())
    }

    /// Born-rule marginal over the listed qubits; entry `v` of the returned
    /// table is the probability of reading bit pattern `v` (with
    /// `qubits[0]` as its least significant bit).
    pub fn probabilities(&self, qubits: &[usize]) -> Result<Vec<T>, SimError> {
        if qubits.is_empty() {
            return Err(SimError::EmptyQubitList);
        }
        self.check_indices(qubits)?;
        let mut table = vec![T::zero(); 1 << qubits.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == T::zero() {
                continue;
            }
            let val = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (bit, &q)| acc | (((idx >> q) & 1) << bit));
            table[val] += p;
        }
        Ok(table)
    }

    /// Conditions on a measurement outcome of one qubit and renormalizes.
    /// Returns the collapsed state together with the outcome probability.
    pub fn postselect(&self, qubit: usize, outcome: bool) -> Result<(Self, T), SimError> {
        self.check_indices(&[qubit])?;
        let want = usize::from(outcome) << qubit;
        let mask = 1usize << qubit;
        let probability: T = self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if probability <= tol::postselect_min::<T>() {
            return Err(SimError::ZeroProbabilityOutcome {
                probability: approx_f64(probability),
            });
        }
        let scale = T::one() / probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                if idx & mask == want {
                    a.scale(scale)
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Ok((
            StateVector {
                amps,
                num_qubits: self.num_qubits,
            },
            probability,
        ))
    }

    /// Extracts the state of `kept` qubits when all remaining qubits are in
    /// a definite basis state (e.g. after post-selecting them). Errors when
    /// residual amplitude lives outside a single assignment of the
    /// discarded qubits.
    pub fn extract_subregister(&self, kept: &[usize]) -> Result<Self, SimError> {
        self.check_indices(kept)?;
        let kept_mask: usize = kept.iter().map(|&q| 1usize << q).sum();
        // locate the dominant assignment of the discarded qubits
        let mut best = (T::zero(), 0usize);
        let mut weights: std::collections::HashMap<usize, T> = std::collections::HashMap::new();
        for (idx, amp) in self.amps.iter().enumerate() {
            let rest = idx & !kept_mask;
            let w = weights.entry(rest).or_insert_with(T::zero);
            *w += amp.norm_sqr();
            if *w > best.0 {
                best = (*w, rest);
            }
        }
        if (best.0 - T::one()).abs() > tol::norm::<T>() {
            return Err(SimError::EntangledRemainder);
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << kept.len()];
        for (local, slot) in amps.iter_mut().enumerate() {
            let mut idx = best.1;
            for (bit, &q) in kept.iter().enumerate() {
                idx |= ((local >> bit) & 1) << q;
            }
            *slot = self.amps[idx];
        }
        Ok(StateVector {
            amps,
            num_qubits: kept.len(),
        })
    }

    fn check_indices(&self, qubits: &[usize]) -> Result<(), SimError> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(SimError::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(SimError::DuplicateQubit { index: q });
            }
        }
        Ok(())
    }
}

/// Amplitude-encodes a real vector, returning the normalized state and the
/// recorded Euclidean norm. The length must be a power of two.
pub fn prepare_amplitude_state<T: Scalar>(v: &[T]) -> Result<(StateVector<T>, T), SimError> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return Err(SimError::NotPowerOfTwo { len: v.len() });
    }
    let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
    if norm <= T::zero() {
        return Err(SimError::ZeroVector);
    }
    let amps = v
        .iter()
        .map(|x| Complex::new(*x / norm, T::zero()))
        .collect();
    Ok((
        StateVector {
            amps,
            num_qubits: v.len().trailing_zeros() as usize,
        },
        norm,
    ))
}

/// Square complex matrix payload for arbitrary-unitary gates.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Unitary<T> {
    /// Row-major construction; `data` must have `dim * dim` entries.
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), dim * dim, "payload must be square");
        Unitary { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn unitarity_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                let expect = if i == j { T::one() } else { T::zero() };
                worst = worst.max((acc - Complex::new(expect, T::zero())).norm());
            }
        }
        worst
    }

    fn dagger(&self) -> Self {
        let n = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        Unitary { dim: n, data }
    }
}

/// Supported gate kinds. Controlled variants come from attaching control
/// qubits to any kind via [`Gate::controlled`].
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind<T: Scalar> {
    Hadamard,
    PauliX,
    /// diag(1, e^{i phi}); a controlled phase gate when controls are added.
    Phase(T),
    Ry(T),
    Swap,
    ArbitraryUnitary(Unitary<T>),
}

impl<T: Scalar> GateKind<T> {
    fn target_count(&self) -> usize {
        match self {
            GateKind::Hadamard | GateKind::PauliX | GateKind::Phase(_) | GateKind::Ry(_) => 1,
            GateKind::Swap => 2,
            GateKind::ArbitraryUnitary(u) => {
                debug_assert!(u.dim.is_power_of_two());
                u.dim.trailing_zeros() as usize
            }
        }
    }

    fn matrix(&self) -> Unitary<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        match self {
            GateKind::Hadamard => {
                let h = Complex::new(T::one() / real::<T>(2.0).sqrt(), T::zero());
                Unitary::new(2, vec![h, h, h, -h])
            }
            GateKind::PauliX => Unitary::new(2, vec![zero, one, one, zero]),
            GateKind::Phase(phi) => Unitary::new(
                2,
                vec![one, zero, zero, Complex::new(phi.cos(), phi.sin())],
            ),
            GateKind::Ry(theta) => {
                let half = *theta * real::<T>(0.5);
                let c = Complex::new(half.cos(), T::zero());
                let s = Complex::new(half.sin(), T::zero());
                Unitary::new(2, vec![c, -s, s, c])
            }
            GateKind::Swap => Unitary::new(
                4,
                vec![
                    one, zero, zero, zero, //
                    zero, zero, one, zero, //
                    zero, one, zero, zero, //
                    zero, zero, zero, one,
                ],
            ),
            GateKind::ArbitraryUnitary(u) => u.clone(),
        }
    }

    fn inverse(&self) -> Self {
        match self {
            GateKind::Hadamard => GateKind::Hadamard,
            GateKind::PauliX => GateKind::PauliX,
            GateKind::Phase(phi) => GateKind::Phase(-*phi),
            GateKind::Ry(theta) => GateKind::Ry(-*theta),
            GateKind::Swap => GateKind::Swap,
            GateKind::ArbitraryUnitary(u) => GateKind::ArbitraryUnitary(u.dagger()),
        }
    }
}

/// A gate bound to target and control qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate<T: Scalar> {
    pub kind: GateKind<T>,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl<T: Scalar> Gate<T> {
    pub fn hadamard(q: usize) -> Self {
        Gate {
            kind: GateKind::Hadamard,
            targets: vec![q],
            controls: vec![],
        }
    }

    pub fn pauli_x(q: usize) -> Self {
        Gate {
            kind: GateKind::PauliX,
            targets: vec![q],
            controls: vec![],
        }
    }

    pub fn phase(phi: T, q: usize) -> Self {
        Gate {
            kind: GateKind::Phase(phi),
            targets: vec![q],
            controls: vec![],
        }
    }

    pub fn controlled_phase(phi: T, control: usize, q: usize) -> Self {
        Gate::phase(phi, q).controlled(&[control])
    }

    pub fn ry(theta: T, q: usize) -> Self {
        Gate {
            kind: GateKind::Ry(theta),
            targets: vec![q],
            controls: vec![],
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::Swap,
            targets: vec![a, b],
            controls: vec![],
        }
    }

    pub fn unitary(payload: Unitary<T>, targets: Vec<usize>) -> Self {
        Gate {
            kind: GateKind::ArbitraryUnitary(payload),
            targets,
            controls: vec![],
        }
    }

    /// Adds control qubits; the unitary acts only where they all read `1`.
    pub fn controlled(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn inverse(&self) -> Self {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), SimError> {
        let mut seen: Vec<usize> = Vec::with_capacity(self.targets.len() + self.controls.len());
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(SimError::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            if seen.contains(&q) {
                return Err(SimError::DuplicateQubit { index: q });
            }
            seen.push(q);
        }
        let expected = self.kind.target_count();
        if self.targets.len() != expected {
            return Err(SimError::DimensionMismatch {
                dim: 1 << expected,
                targets: self.targets.len(),
            });
        }
        if let GateKind::ArbitraryUnitary(u) = &self.kind {
            if !u.dim.is_power_of_two() {
                return Err(SimError::NotPowerOfTwo { len: u.dim });
            }
            let deviation = u.unitarity_deviation();
            if deviation > tol::unitarity::<T>() {
                return Err(SimError::NonUnitary {
                    deviation: approx_f64(deviation),
                });
            }
        }
        Ok(())
    }
}

/// Ordered gate list over a fixed-width register.
#[derive(Debug, Clone, Default)]
pub struct Circuit<T: Scalar> {
    pub num_qubits: usize,
    pub gates: Vec<Gate<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate<T>) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: Circuit<T>) {
        self.gates.extend(other.gates);
    }

    pub fn apply_to(&self, state: &mut StateVector<T>) -> Result<(), SimError> {
        for gate in &self.gates {
            state.apply(gate)?;
        }
        Ok(())
    }

    /// Reversed circuit of inverted gates, so `c.apply; c.inverse().apply`
    /// is the identity.
    pub fn inverse(&self) -> Self {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }
}

/// Quantum Fourier transform over the given qubits (`qubits[0]` = least
/// significant bit of the transformed value):
/// `|k> -> 2^{-m/2} sum_l exp(2 pi i k l / 2^m) |l>`.
pub fn qft_circuit<T: Scalar>(qubits: &[usize], num_qubits: usize) -> Circuit<T> {
    let m = qubits.len();
    let mut circuit = Circuit::new(num_qubits);
    // textbook network on big-endian order, then bit reversal swaps
    for (pos, &q) in qubits.iter().enumerate().rev() {
        circuit.push(Gate::hadamard(q));
        for (lower, &qc) in qubits.iter().enumerate().take(pos).rev() {
            let distance = pos - lower;
            let angle = real::<T>(std::f64::consts::PI) / real::<T>((1u64 << distance) as f64);
            circuit.push(Gate::controlled_phase(angle, qc, q));
        }
    }
    for i in 0..m / 2 {
        circuit.push(Gate::swap(qubits[i], qubits[m - 1 - i]));
    }
    circuit
}

pub fn inverse_qft_circuit<T: Scalar>(qubits: &[usize], num_qubits: usize) -> Circuit<T> {
    qft_circuit::<T>(qubits, num_qubits).inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type S64 = StateVector<f64>;

    fn amp(s: &S64, idx: usize) -> Complex<f64> {
        s.amplitudes()[idx]
    }

    #[test]
    fn hadamard_on_zero_gives_plus_state() {
        let mut s = S64::zero(1);
        s.apply(&Gate::hadamard(0)).unwrap();
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amp(&s, 0).re - x).abs() < 1e-15);
        assert!((amp(&s, 1).re - x).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_flips_basis_state() {
        let mut s = S64::zero(1);
        s.apply(&Gate::pauli_x(0)).unwrap();
        assert_eq!(amp(&s, 0), Complex::new(0.0, 0.0));
        assert_eq!(amp(&s, 1), Complex::new(1.0, 0.0));
    }

    #[test]
    fn ry_rotation_matches_closed_form() {
        // P(1) for Ry(theta)|0> is sin^2(theta/2)
        let theta = 0.7;
        let mut s = S64::zero(1);
        s.apply(&Gate::ry(theta, 0)).unwrap();
        let probs = s.probabilities(&[0]).unwrap();
        let expect = (theta / 2.0).sin().powi(2);
        assert!((probs[1] - expect).abs() < 1e-12);
        assert!((probs[0] + probs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_marginals() {
        let mut s = S64::zero(2);
        s.apply(&Gate::hadamard(0)).unwrap();
        s.apply(&Gate::pauli_x(1).controlled(&[0])).unwrap();
        let marginal = s.probabilities(&[0]).unwrap();
        assert!((marginal[0] - 0.5).abs() < 1e-12);
        assert!((marginal[1] - 0.5).abs() < 1e-12);
        let joint = s.probabilities(&[0, 1]).unwrap();
        assert!((joint[0] - 0.5).abs() < 1e-12);
        assert!(joint[1].abs() < 1e-12);
        assert!(joint[2].abs() < 1e-12);
        assert!((joint[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_one_qubit_probabilities() {
        let mut s = S64::zero(1);
        s.apply(&Gate::pauli_x(0)).unwrap();
        assert_eq!(s.probabilities(&[0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn postselect_bell_state() {
        let mut s = S64::zero(2);
        s.apply(&Gate::hadamard(0)).unwrap();
        s.apply(&Gate::pauli_x(1).controlled(&[0])).unwrap();
        let (collapsed, p) = s.postselect(1, false).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((amp(&collapsed, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn postselect_definite_state_is_identity() {
        let mut s = S64::zero(1);
        s.apply(&Gate::pauli_x(0)).unwrap();
        let (collapsed, p) = s.postselect(0, true).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(amp(&collapsed, 1), Complex::new(1.0, 0.0));
    }

    #[test]
    fn postselect_rotation_recovers_sine() {
        let theta: f64 = 0.7;
        let mut s = S64::zero(1);
        s.apply(&Gate::ry(theta, 0)).unwrap();
        let (collapsed, p) = s.postselect(0, true).unwrap();
        assert!((p - (theta / 2.0).sin().powi(2)).abs() < 1e-12);
        assert!((amp(&collapsed, 1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn postselect_impossible_outcome_errors() {
        let s = S64::zero(1);
        match s.postselect(0, true) {
            Err(SimError::ZeroProbabilityOutcome { .. }) => {}
            other => panic!("expected zero-probability error, got {other:?}"),
        }
    }

    #[test]
    fn prepare_amplitude_state_normalizes_and_records_norm() {
        let (s, norm) = prepare_amplitude_state(&[3.0, 4.0]).unwrap();
        assert_eq!(norm, 5.0);
        assert!((amp(&s, 0).re - 0.6).abs() < 1e-15);
        assert!((amp(&s, 1).re - 0.8).abs() < 1e-15);

        let (s, norm) = prepare_amplitude_state(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(norm, 1.0);
        assert_eq!(amp(&s, 0), Complex::new(1.0, 0.0));

        let (s, norm) = prepare_amplitude_state(&[1.0, 1.0]).unwrap();
        assert!((norm - 2f64.sqrt()).abs() < 1e-15);
        assert!((amp(&s, 0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn prepare_rejects_zero_and_bad_lengths() {
        assert_eq!(
            prepare_amplitude_state::<f64>(&[0.0, 0.0]).unwrap_err(),
            SimError::ZeroVector
        );
        assert_eq!(
            prepare_amplitude_state::<f64>(&[1.0, 2.0, 3.0]).unwrap_err(),
            SimError::NotPowerOfTwo { len: 3 }
        );
    }

    #[test]
    fn non_unitary_payload_is_rejected() {
        let bad = Unitary::new(
            2,
            vec![
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(2.0, 0.0),
            ],
        );
        let mut s = S64::zero(1);
        match s.apply(&Gate::unitary(bad, vec![0])) {
            Err(SimError::NonUnitary { .. }) => {}
            other => panic!("expected NonUnitary, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_and_duplicate_indices_error() {
        let mut s = S64::zero(2);
        assert!(matches!(
            s.apply(&Gate::hadamard(5)),
            Err(SimError::QubitOutOfRange { index: 5, .. })
        ));
        assert!(matches!(
            s.apply(&Gate::swap(1, 1)),
            Err(SimError::DuplicateQubit { index: 1 })
        ));
    }

    #[test]
    fn swap_exchanges_qubits() {
        let mut s = S64::zero(2);
        s.apply(&Gate::pauli_x(0)).unwrap();
        s.apply(&Gate::swap(0, 1)).unwrap();
        assert_eq!(amp(&s, 2), Complex::new(1.0, 0.0));
    }

    #[test]
    fn qft_matches_direct_dft() {
        // compare the gate decomposition against the DFT matrix applied
        // directly to a random-ish normalized state
        let m = 3;
        let dim = 1 << m;
        let raw: Vec<f64> = (0..dim).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let (mut s, _) = prepare_amplitude_state(&raw).unwrap();
        let input = s.amplitudes().to_vec();
        qft_circuit::<f64>(&[0, 1, 2], m).apply_to(&mut s).unwrap();
        let scale = 1.0 / (dim as f64).sqrt();
        for l in 0..dim {
            let mut expect = Complex::new(0.0, 0.0);
            for (k, a) in input.iter().enumerate() {
                let angle = std::f64::consts::TAU * (k * l) as f64 / dim as f64;
                expect += a * Complex::new(angle.cos(), angle.sin());
            }
            expect *= scale;
            assert!(
                (amp(&s, l) - expect).norm() < 1e-12,
                "component {l} mismatch"
            );
        }
    }

    #[test]
    fn extract_subregister_after_postselection() {
        let inner = StateVector::from_amplitudes(vec![
            Complex::new(0.6, 0.0),
            Complex::new(0.8, 0.0),
        ])
        .unwrap();
        let mut outer = S64::zero(1);
        outer.apply(&Gate::pauli_x(0)).unwrap();
        let joint = inner.tensor(&outer); // qubit 0/=inner, qubit 1 = |1>
        let got = joint.extract_subregister(&[0]).unwrap();
        assert!((amp(&got, 0).re - 0.6).abs() < 1e-12);
        assert!((amp(&got, 1).re - 0.8).abs() < 1e-12);
    }

    #[test]
    fn extract_subregister_rejects_entanglement() {
        let mut s = S64::zero(2);
        s.apply(&Gate::hadamard(0)).unwrap();
        s.apply(&Gate::pauli_x(1).controlled(&[0])).unwrap();
        assert_eq!(
            s.extract_subregister(&[0]).unwrap_err(),
            SimError::EntangledRemainder
        );
    }

    fn arbitrary_gate(num_qubits: usize) -> impl Strategy<Value = Gate<f64>> {
        let q = 0..num_qubits;
        let q2 = (0..num_qubits, 0..num_qubits)
            .prop_filter("distinct", |(a, b)| a != b);
        prop_oneof![
            q.clone().prop_map(Gate::hadamard),
            q.clone().prop_map(Gate::pauli_x),
            (q.clone(), -3.0..3.0f64).prop_map(|(q, a)| Gate::phase(a, q)),
            (q, -3.0..3.0f64).prop_map(|(q, a)| Gate::ry(a, q)),
            q2.clone().prop_map(|(a, b)| Gate::swap(a, b)),
            q2.prop_map(|(a, b)| Gate::pauli_x(a).controlled(&[b])),
        ]
    }

    proptest! {
        #[test]
        fn norm_preserved_by_random_circuits(
            gates in proptest::collection::vec(arbitrary_gate(5), 1..40)
        ) {
            let mut s = S64::zero(5);
            for g in &gates {
                s.apply(g).unwrap();
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn circuit_then_inverse_is_identity(
            gates in proptest::collection::vec(arbitrary_gate(4), 1..25)
        ) {
            let mut circuit = Circuit::new(4);
            for g in gates {
                circuit.push(g);
            }
            let mut s = S64::zero(4);
            s.apply(&Gate::hadamard(0)).unwrap();
            s.apply(&Gate::ry(0.3, 2)).unwrap();
            let before = s.amplitudes().to_vec();
            circuit.apply_to(&mut s).unwrap();
            circuit.inverse().apply_to(&mut s).unwrap();
            for (a, b) in s.amplitudes().iter().zip(&before) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }

        #[test]
        fn marginals_are_consistent(
            gates in proptest::collection::vec(arbitrary_gate(3), 1..20)
        ) {
            let mut s = S64::zero(3);
            for g in &gates {
                s.apply(g).unwrap();
            }
            let joint = s.probabilities(&[0, 1, 2]).unwrap();
            let marginal = s.probabilities(&[1]).unwrap();
            let from_joint: f64 = joint
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx & 0b010 != 0)
                .map(|(_, p)| *p)
                .sum();
            prop_assert!((marginal[1] - from_joint).abs() < 1e-10);
            let total: f64 = joint.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }
    }
}
