//! HHL solver for 2x2 real linear systems on the statevector simulator.
//!
//! Non-symmetric blocks are lifted to a 4x4 hermitian dilation
//! `[[0, S], [Sᵀ, 0]]` whose spectrum is the signed singular values of `S`;
//! negative eigenvalues are carried in the clock register with a
//! two's-complement phase convention. Symmetric blocks run directly on one
//! system qubit. An `Ideal` backend applies the inverse through an exact
//! eigendecomposition and serves as the oracle for the circuit path.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Mat};
use crate::scalar::{approx_f64, real, Scalar};
use crate::sim::{
    inverse_qft_circuit, prepare_amplitude_state, Circuit, Gate, SimError, StateVector, Unitary,
};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum HhlError {
    #[error("system matrix is singular")]
    Singular,
    #[error("right-hand side is identically zero")]
    ZeroRhs,
    #[error("invalid HHL config: {0}")]
    InvalidConfig(String),
    #[error(
        "eigenphase {phase:.4} exceeds the representable clock range (limit {limit:.4}); \
         increase clock qubits or lower the evolution time"
    )]
    PhaseOverflow { phase: f64, limit: f64 },
    #[error("ancilla post-selection probability {probability:.3e} below threshold")]
    PostSelectionFailed { probability: f64 },
    #[error("fidelity inputs must be unit vectors (got norm {norm})")]
    NonUnitInput { norm: f64 },
    #[error("simulator failure: {0}")]
    Sim(#[from] SimError),
}

/// Backend selector: the full phase-estimation circuit, or an exact
/// eigendecomposition inverse used as the reference oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HhlBackend {
    Circuit,
    Ideal,
}

/// Precision and scaling knobs of the solver.
///
/// `evolution_time` and `rotation_constant` default to per-system values
/// derived from classical eigenvalue estimates of the block (a documented
/// simulation shortcut): the largest eigenphase is placed on the highest
/// representable clock slot and `C = min(lambda_min / 2, smallest
/// representable eigenvalue)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HhlConfig<T> {
    /// Clock register width (phase-estimation precision).
    pub clock_qubits: usize,
    /// Hamiltonian simulation time; `None` derives it per system.
    pub evolution_time: Option<T>,
    /// Controlled-rotation scale C; `None` derives it per system.
    pub rotation_constant: Option<T>,
    pub backend: HhlBackend,
}

impl<T: Scalar> Default for HhlConfig<T> {
    fn default() -> Self {
        HhlConfig {
            clock_qubits: 5,
            evolution_time: None,
            rotation_constant: None,
            backend: HhlBackend::Circuit,
        }
    }
}

impl<T: Scalar> HhlConfig<T> {
    pub fn ideal() -> Self {
        HhlConfig {
            backend: HhlBackend::Ideal,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), HhlError> {
        if self.clock_qubits == 0 {
            return Err(HhlError::InvalidConfig(
                "need at least one clock qubit".into(),
            ));
        }
        if self.clock_qubits > 9 {
            return Err(HhlError::InvalidConfig(
                "clock register capped at 9 qubits (12-qubit simulator budget)".into(),
            ));
        }
        if let Some(t) = self.evolution_time {
            if t <= T::zero() || !t.is_finite() {
                return Err(HhlError::InvalidConfig(
                    "evolution time must be positive".into(),
                ));
            }
        }
        if let Some(c) = self.rotation_constant {
            if c <= T::zero() || !c.is_finite() {
                return Err(HhlError::InvalidConfig(
                    "rotation constant must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Solver output: the unit solution direction, a norm recovered from the
/// ancilla statistics, the ancilla success probability, and the squared
/// overlap with the classical solution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HhlResult<T> {
    pub solution_direction: [T; 2],
    pub recovered_norm: T,
    pub success_probability: T,
    pub fidelity: T,
}

/// Hermitian dilation `H = [[0, S], [Sᵀ, 0]]` with padded right-hand side
/// `(y, 0)`. Solving `H z = (y, 0)` puts `beta = S^{-1} y` in the last two
/// components of `z`.
pub fn hermitian_embed<T: Scalar>(s: &[[T; 2]; 2], y: &[T; 2]) -> ([[T; 4]; 4], [T; 4]) {
    let z = T::zero();
    let h = [
        [z, z, s[0][0], s[0][1]],
        [z, z, s[1][0], s[1][1]],
        [s[0][0], s[1][0], z, z],
        [s[0][1], s[1][1], z, z],
    ];
    (h, [y[0], y[1], z, z])
}

/// Squared overlap of two unit vectors.
pub fn fidelity<T: Scalar>(a: &[T], b: &[T]) -> Result<T, HhlError> {
    for v in [a, b] {
        let norm = linalg::norm(v);
        if (norm - T::one()).abs() > tol::norm::<T>() {
            return Err(HhlError::NonUnitInput {
                norm: approx_f64(norm),
            });
        }
    }
    let overlap = linalg::dot(a, b);
    Ok((overlap * overlap).min(T::one()))
}

/// How eigenvalues map onto clock values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseConvention {
    /// All eigenvalues positive; phases fill [0, 1).
    Unsigned,
    /// Mixed signs; the upper half of the clock range encodes negatives.
    TwosComplement,
}

/// Everything derived classically about the hermitian system before the
/// circuit runs: spectrum, convention, time and rotation scales.
struct SystemPlan<T> {
    rhs: Vec<T>,
    rhs_norm: T,
    eigenvalues: Vec<T>,
    eigenvectors: Mat<T>,
    system_qubits: usize,
    /// Offset of the solution components within the system register.
    solution_offset: usize,
    convention: PhaseConvention,
}

fn plan_system<T: Scalar>(s: &[[T; 2]; 2], y: &[T; 2]) -> Result<SystemPlan<T>, HhlError> {
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if det.abs() <= tol::singular::<T>() {
        return Err(HhlError::Singular);
    }
    let scale = s
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(T::zero(), T::max);
    let symmetric = (s[0][1] - s[1][0]).abs() <= tol::symmetry::<T>() * scale.max(T::one());
    let (hamiltonian, rhs, system_qubits, solution_offset) = if symmetric {
        let m = Mat::from_rows(&[vec![s[0][0], s[0][1]], vec![s[1][0], s[1][1]]]);
        (m, vec![y[0], y[1]], 1, 0)
    } else {
        let (h, b) = hermitian_embed(s, y);
        let rows: Vec<Vec<T>> = h.iter().map(|r| r.to_vec()).collect();
        (Mat::from_rows(&rows), b.to_vec(), 2, 2)
    };
    let rhs_norm = linalg::norm(&rhs);
    if rhs_norm <= tol::zero_rhs::<T>() {
        return Err(HhlError::ZeroRhs);
    }
    let (eigenvalues, eigenvectors) = hamiltonian.jacobi_eigh();
    if eigenvalues
        .iter()
        .any(|l| l.abs() <= tol::singular::<T>())
    {
        return Err(HhlError::Singular);
    }
    let convention = if eigenvalues.iter().all(|l| *l > T::zero()) {
        PhaseConvention::Unsigned
    } else {
        PhaseConvention::TwosComplement
    };
    Ok(SystemPlan {
        rhs,
        rhs_norm,
        eigenvalues,
        eigenvectors,
        system_qubits,
        solution_offset,
        convention,
    })
}

impl<T: Scalar> SystemPlan<T> {
    fn lambda_abs_min(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(T::infinity(), T::min)
    }

    fn lambda_abs_max(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(T::zero(), T::max)
    }

    /// Classical reference solution of the original 2x2 system.
    fn classical_direction(&self, s: &[[T; 2]; 2], y: &[T; 2]) -> Result<[T; 2], HhlError> {
        let beta = linalg::solve2(s, y).ok_or(HhlError::Singular)?;
        let norm = linalg::norm(&beta);
        if norm <= tol::singular::<T>() {
            return Err(HhlError::ZeroRhs);
        }
        Ok(canonical_sign([beta[0] / norm, beta[1] / norm]))
    }

    /// Exact `H^{-1}` applied through the eigendecomposition; the ideal
    /// backend and the norm law share this.
    fn ideal_solution(&self) -> Vec<T> {
        let n = self.rhs.len();
        let coeffs: Vec<T> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|r| self.eigenvectors[(r, j)] * self.rhs[r])
                    .sum::<T>()
            })
            .collect();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|j| self.eigenvectors[(r, j)] * coeffs[j] / self.eigenvalues[j])
                    .sum::<T>()
            })
            .collect()
    }
}

/// Applies the global sign convention: the first component above tolerance
/// is made nonnegative.
fn canonical_sign<T: Scalar>(mut v: [T; 2]) -> [T; 2] {
    let lead = if v[0].abs() > tol::norm::<T>() {
        v[0]
    } else {
        v[1]
    };
    if lead < T::zero() {
        v[0] = -v[0];
        v[1] = -v[1];
    }
    v
}

fn phase_limit(convention: PhaseConvention, m: usize) -> f64 {
    let slots = (1u64 << m) as f64;
    match convention {
        // positive phases must round into [0, 2^m - 1]
        PhaseConvention::Unsigned => 1.0 - 0.5 / slots,
        // positive phases must round into [0, 2^(m-1) - 1]
        PhaseConvention::TwosComplement => 0.5 - 0.5 / slots,
    }
}

fn auto_phase_target(convention: PhaseConvention, m: usize) -> f64 {
    match convention {
        PhaseConvention::Unsigned => 0.75,
        // top representable positive slot
        PhaseConvention::TwosComplement => ((1u64 << (m - 1)) - 1) as f64 / (1u64 << m) as f64,
    }
}

/// Signed eigenvalue associated with clock value `k`.
fn decoded_eigenvalue<T: Scalar>(k: usize, m: usize, t: T, convention: PhaseConvention) -> T {
    let slots = 1usize << m;
    let signed = match convention {
        PhaseConvention::Unsigned => k as f64,
        PhaseConvention::TwosComplement => {
            if k >= slots / 2 {
                k as f64 - slots as f64
            } else {
                k as f64
            }
        }
    };
    real::<T>(2.0 * std::f64::consts::PI * signed / slots as f64) / t
}

struct CircuitScales<T> {
    evolution_time: T,
    rotation_constant: T,
}

fn derive_scales<T: Scalar>(
    plan: &SystemPlan<T>,
    config: &HhlConfig<T>,
) -> Result<CircuitScales<T>, HhlError> {
    let m = config.clock_qubits;
    if plan.convention == PhaseConvention::TwosComplement && m < 2 {
        return Err(HhlError::InvalidConfig(
            "two's-complement encoding of negative eigenvalues needs >= 2 clock qubits".into(),
        ));
    }
    let tau = real::<T>(2.0 * std::f64::consts::PI);
    let evolution_time = match config.evolution_time {
        Some(t) => t,
        None => tau * real::<T>(auto_phase_target(plan.convention, m)) / plan.lambda_abs_max(),
    };
    let max_phase = plan.lambda_abs_max() * evolution_time / tau;
    let limit = real::<T>(phase_limit(plan.convention, m));
    if max_phase > limit * (T::one() + tol::norm::<T>()) {
        return Err(HhlError::PhaseOverflow {
            phase: approx_f64(max_phase),
            limit: approx_f64(limit),
        });
    }
    // smallest eigenvalue magnitude the clock grid can express
    let grid_min = tau / (real::<T>((1u64 << m) as f64) * evolution_time);
    let rotation_constant = match config.rotation_constant {
        Some(c) => {
            if c > grid_min * (T::one() + tol::norm::<T>()) {
                return Err(HhlError::InvalidConfig(format!(
                    "rotation constant {} exceeds the smallest representable eigenvalue {}",
                    approx_f64(c),
                    approx_f64(grid_min),
                )));
            }
            c
        }
        None => (real::<T>(0.5) * plan.lambda_abs_min()).min(grid_min),
    };
    Ok(CircuitScales {
        evolution_time,
        rotation_constant,
    })
}

/// Controlled powers of `exp(i H t)` built from the eigendecomposition.
fn evolution_unitary<T: Scalar>(plan: &SystemPlan<T>, time: T) -> Unitary<T> {
    let n = plan.rhs.len();
    let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
    for (j, lambda) in plan.eigenvalues.iter().enumerate() {
        let angle = *lambda * time;
        let phase = Complex::new(angle.cos(), angle.sin());
        for r in 0..n {
            let qr = plan.eigenvectors[(r, j)];
            for c in 0..n {
                data[r * n + c] += phase.scale(qr * plan.eigenvectors[(c, j)]);
            }
        }
    }
    Unitary::new(n, data)
}

/// Quantum phase estimation block: Hadamards, controlled `U^{2^j}` powers,
/// inverse QFT over the clock.
fn qpe_circuit<T: Scalar>(
    plan: &SystemPlan<T>,
    time: T,
    clock: &[usize],
    total_qubits: usize,
) -> Circuit<T> {
    let mut circuit = Circuit::new(total_qubits);
    for &q in clock {
        circuit.push(Gate::hadamard(q));
    }
    let system: Vec<usize> = (0..plan.system_qubits).collect();
    let mut step = time;
    for &q in clock {
        let u = evolution_unitary(plan, step);
        circuit.push(Gate::unitary(u, system.clone()).controlled(&[q]));
        step = step + step;
    }
    circuit.extend(inverse_qft_circuit(clock, total_qubits));
    circuit
}

/// The eigenvalue-inversion rotations: for every clock value `k`, rotate
/// the ancilla by `2 asin(C / lambda_hat(k))` conditioned on the clock
/// register reading exactly `k` (zero bits are X-conjugated).
fn rotation_circuit<T: Scalar>(
    scales: &CircuitScales<T>,
    convention: PhaseConvention,
    clock: &[usize],
    ancilla: usize,
    total_qubits: usize,
) -> Circuit<T> {
    let m = clock.len();
    let mut circuit = Circuit::new(total_qubits);
    for k in 1..(1usize << m) {
        let lambda = decoded_eigenvalue(k, m, scales.evolution_time, convention);
        let ratio = (scales.rotation_constant / lambda)
            .max(-T::one())
            .min(T::one());
        let theta = real::<T>(2.0) * ratio.asin();
        let zero_bits: Vec<usize> = clock
            .iter()
            .enumerate()
            .filter(|(bit, _)| (k >> bit) & 1 == 0)
            .map(|(_, &q)| q)
            .collect();
        for &q in &zero_bits {
            circuit.push(Gate::pauli_x(q));
        }
        circuit.push(Gate::ry(theta, ancilla).controlled(clock));
        for &q in &zero_bits {
            circuit.push(Gate::pauli_x(q));
        }
    }
    circuit
}

/// Runs the solver and also returns the post-selected single-qubit solution
/// state `|beta>`, which downstream swap tests consume without reading
/// amplitudes.
pub fn solve_hhl_with_state<T: Scalar>(
    s: &[[T; 2]; 2],
    y: &[T; 2],
    config: &HhlConfig<T>,
) -> Result<(HhlResult<T>, StateVector<T>), HhlError> {
    config.validate()?;
    let plan = plan_system(s, y)?;
    let classical = plan.classical_direction(s, y)?;
    match config.backend {
        HhlBackend::Ideal => solve_ideal(&plan, config, &classical),
        HhlBackend::Circuit => solve_circuit(&plan, config, &classical),
    }
}

/// Runs the solver, discarding the solution state.
pub fn solve_hhl<T: Scalar>(
    s: &[[T; 2]; 2],
    y: &[T; 2],
    config: &HhlConfig<T>,
) -> Result<HhlResult<T>, HhlError> {
    solve_hhl_with_state(s, y, config).map(|(result, _)| result)
}

fn solve_ideal<T: Scalar>(
    plan: &SystemPlan<T>,
    config: &HhlConfig<T>,
    classical: &[T; 2],
) -> Result<(HhlResult<T>, StateVector<T>), HhlError> {
    let z = plan.ideal_solution();
    let beta = [z[plan.solution_offset], z[plan.solution_offset + 1]];
    let beta_norm = linalg::norm(&beta);
    if beta_norm <= tol::singular::<T>() {
        return Err(HhlError::ZeroRhs);
    }
    let direction = canonical_sign([beta[0] / beta_norm, beta[1] / beta_norm]);
    let c = config
        .rotation_constant
        .unwrap_or_else(|| real::<T>(0.5) * plan.lambda_abs_min());
    let success_probability = (c * beta_norm / plan.rhs_norm).powi(2).min(T::one());
    let fid = fidelity(&direction, classical)?;
    let (state, _) = prepare_amplitude_state(&direction)?;
    Ok((
        HhlResult {
            solution_direction: direction,
            recovered_norm: success_probability.sqrt() * plan.rhs_norm / c,
            success_probability,
            fidelity: fid,
        },
        state,
    ))
}

fn solve_circuit<T: Scalar>(
    plan: &SystemPlan<T>,
    config: &HhlConfig<T>,
    classical: &[T; 2],
) -> Result<(HhlResult<T>, StateVector<T>), HhlError> {
    let scales = derive_scales(plan, config)?;
    let m = config.clock_qubits;
    let n_sys = plan.system_qubits;
    let total = n_sys + m + 1;
    if total > 12 {
        return Err(HhlError::InvalidConfig(format!(
            "{total} qubits exceed the 12-qubit simulator budget"
        )));
    }
    let clock: Vec<usize> = (n_sys..n_sys + m).collect();
    let ancilla = n_sys + m;

    let (sys_state, _) = prepare_amplitude_state(&plan.rhs)?;
    let mut state = sys_state.tensor(&StateVector::zero(m + 1));

    let qpe = qpe_circuit(plan, scales.evolution_time, &clock, total);
    qpe.apply_to(&mut state)?;
    rotation_circuit(&scales, plan.convention, &clock, ancilla, total).apply_to(&mut state)?;
    qpe.inverse().apply_to(&mut state)?;

    let (state, success_probability) =
        state
            .postselect(ancilla, true)
            .map_err(|err| match err {
                SimError::ZeroProbabilityOutcome { probability } => {
                    HhlError::PostSelectionFailed { probability }
                }
                other => HhlError::Sim(other),
            })?;
    // condition the readout on the clock having returned to |0...0>
    let mut state = state;
    for &q in &clock {
        let (next, _) = state.postselect(q, false)?;
        state = next;
    }
    let system = state.extract_subregister(&(0..n_sys).collect::<Vec<_>>())?;

    let amps = system.amplitudes();
    let raw = [
        amps[plan.solution_offset],
        amps[plan.solution_offset + 1],
    ];
    // strip the (floating-point) residual global phase and read real parts
    let lead = if raw[0].norm() >= raw[1].norm() {
        raw[0]
    } else {
        raw[1]
    };
    let lead_norm = lead.norm();
    if lead_norm <= tol::singular::<T>() {
        return Err(HhlError::PostSelectionFailed {
            probability: approx_f64(lead_norm),
        });
    }
    let phase = lead.conj().scale(T::one() / lead_norm);
    let beta = [(raw[0] * phase).re, (raw[1] * phase).re];
    let beta_norm = linalg::norm(&beta);
    if beta_norm <= tol::singular::<T>() {
        return Err(HhlError::PostSelectionFailed {
            probability: approx_f64(beta_norm),
        });
    }
    let direction = canonical_sign([beta[0] / beta_norm, beta[1] / beta_norm]);
    let fid = fidelity(&direction, classical)?;

    // |beta> as a single-qubit state for the swap-test consumers
    let solution_state = if plan.solution_offset == 0 {
        system
    } else {
        let (conditioned, _) = system.postselect(1, true)?;
        conditioned.extract_subregister(&[0])?
    };

    Ok((
        HhlResult {
            solution_direction: direction,
            recovered_norm: success_probability.sqrt() * plan.rhs_norm
                / scales.rotation_constant,
            success_probability,
            fidelity: fid,
        },
        solution_state,
    ))
}
