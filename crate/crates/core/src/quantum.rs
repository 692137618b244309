//! Quantum miner cost model.
//!
//! The chain is: marked count `M = maxTarget / difficulty`, Grover iteration
//! count `t = sqrt(N / M)`, gate count `t · g`, error-correction steps
//! `gates · d`, erased bits `steps · c^n + q`, and finally the Landauer
//! minimum for those bits. The non-ECC miner only erases its `q` output
//! qubits at measurement.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classical::NetworkSnapshot;
use crate::error::{
    check_positive_field, domain, ensure_non_negative, ensure_positive, invalid, ModelError, Result,
};
use crate::physics::{erasure_energy, ErasureLedger, TemperatureK};

pub const DEFAULT_MEASUREMENTS_PER_EC_STEP: u32 = 12;
pub const DEFAULT_GATES_PER_ITERATION: u64 = 1280;
pub const DEFAULT_OUTPUT_QUBITS: u64 = 512;
pub const MAX_ECC_LAYERS: u32 = 4;

/// A quantum mining device with `ecc_layers` levels of concatenated Shor code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumArchitecture {
    pub label: String,
    /// 0 is a non-error-corrected (NISQ) device.
    pub ecc_layers: u32,
    #[serde(default = "default_c")]
    pub measurements_per_ec_step: u32,
    #[serde(default = "default_g")]
    pub gates_per_iteration: u64,
    pub corrected_qubits: u64,
    #[serde(default = "default_q")]
    pub output_qubits: u64,
}

fn default_c() -> u32 {
    DEFAULT_MEASUREMENTS_PER_EC_STEP
}
fn default_g() -> u64 {
    DEFAULT_GATES_PER_ITERATION
}
fn default_q() -> u64 {
    DEFAULT_OUTPUT_QUBITS
}

impl QuantumArchitecture {
    pub fn new(label: impl Into<String>, ecc_layers: u32, corrected_qubits: u64) -> Self {
        Self {
            label: label.into(),
            ecc_layers,
            measurements_per_ec_step: DEFAULT_MEASUREMENTS_PER_EC_STEP,
            gates_per_iteration: DEFAULT_GATES_PER_ITERATION,
            corrected_qubits,
            output_qubits: DEFAULT_OUTPUT_QUBITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ecc_layers > MAX_ECC_LAYERS {
            return Err(invalid(
                "ecc_layers",
                format!("must be at most {MAX_ECC_LAYERS}, got {}", self.ecc_layers),
            ));
        }
        for (field, value) in [
            (
                "measurements_per_ec_step",
                self.measurements_per_ec_step as u64,
            ),
            ("gates_per_iteration", self.gates_per_iteration),
            ("corrected_qubits", self.corrected_qubits),
            ("output_qubits", self.output_qubits),
        ] {
            if value == 0 {
                return Err(invalid(field, "must be a positive integer"));
            }
        }
        Ok(())
    }

    pub fn is_error_corrected(&self) -> bool {
        self.ecc_layers > 0
    }

    /// `c^n`, using integer powers.
    pub fn measurement_multiplier(&self) -> f64 {
        (self.measurements_per_ec_step as u64).pow(self.ecc_layers) as f64
    }
}

/// Search-space size, marked count, iteration count and the resulting
/// success probability of one Grover search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverPlan {
    pub search_space: BigUint,
    pub marked_count: f64,
    pub iterations: f64,
    pub success_probability: f64,
}

impl GroverPlan {
    /// Plan using the iteration count `t = sqrt(N/M)`. The success
    /// probability is the closed form evaluated at the (generally
    /// fractional) `t`.
    pub fn sqrt_rule(search_space: &BigUint, marked_count: f64) -> Result<Self> {
        let iterations = grover_iterations_sqrt(search_space, marked_count)?;
        let theta = grover_angle(search_space, marked_count)?;
        Ok(Self {
            search_space: search_space.clone(),
            marked_count,
            iterations,
            success_probability: ((2.0 * iterations + 1.0) * theta).sin().powi(2),
        })
    }

    /// Plan with the smallest integer iteration count reaching `p_target`.
    pub fn for_success(search_space: &BigUint, marked_count: f64, p_target: f64) -> Result<Self> {
        let t = iterations_for_success(search_space, marked_count, p_target)?;
        Ok(Self {
            search_space: search_space.clone(),
            marked_count,
            iterations: t as f64,
            success_probability: grover_success_probability(search_space, marked_count, t)?,
        })
    }
}

/// Error-correction cost of one search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccCost {
    pub gate_count: f64,
    pub ec_steps: f64,
    pub erased_bits: f64,
}

pub(crate) fn biguint_to_f64(value: &BigUint) -> f64 {
    // to_f64 saturates to infinity only above f64::MAX, far beyond 2^256.
    value.to_f64().unwrap_or(f64::INFINITY)
}

/// Number of hash values at or below the target: `maxTarget / difficulty`.
pub fn pow_target_m(max_target: &BigUint, difficulty: f64) -> Result<f64> {
    ensure_positive("difficulty", difficulty)?;
    Ok(biguint_to_f64(max_target) / difficulty)
}

/// Integer target from the miner's pseudo-code rule
/// `2^bits - difficulty · 2^32`. Fails when the subtraction underflows.
pub fn alg1_target(difficulty: &BigUint, bits: u32) -> Result<BigUint> {
    let space = BigUint::from(1u8) << bits;
    let offset = difficulty << 32u32;
    if offset > space {
        return Err(domain(format!(
            "difficulty·2^32 exceeds 2^{bits}; the target rule underflows"
        )));
    }
    Ok(space - offset)
}

fn check_marked(search_space: &BigUint, marked_count: f64) -> Result<f64> {
    ensure_positive("marked count", marked_count)?;
    let n = biguint_to_f64(search_space);
    if search_space.is_zero() {
        return Err(domain("search space must be non-empty"));
    }
    if marked_count > n {
        return Err(domain(format!(
            "marked count {marked_count} exceeds search space {n}"
        )));
    }
    Ok(n)
}

/// `asin(sqrt(M/N))`, the rotation angle of one Grover iteration.
pub fn grover_angle(search_space: &BigUint, marked_count: f64) -> Result<f64> {
    let n = check_marked(search_space, marked_count)?;
    Ok((marked_count / n).sqrt().min(1.0).asin())
}

/// Iteration count `t = sqrt(N/M)`, kept verbatim for table reproduction.
pub fn grover_iterations_sqrt(search_space: &BigUint, marked_count: f64) -> Result<f64> {
    let n = check_marked(search_space, marked_count)?;
    Ok((n / marked_count).sqrt())
}

/// Textbook optimum `floor(pi/4 · sqrt(N/M))`.
pub fn grover_iterations_optimal(search_space: &BigUint, marked_count: f64) -> Result<u64> {
    let n = check_marked(search_space, marked_count)?;
    Ok((PI / 4.0 * (n / marked_count).sqrt()).floor() as u64)
}

/// `sin^2((2t+1)·theta)` with `sin(theta) = sqrt(M/N)`.
pub fn grover_success_probability(
    search_space: &BigUint,
    marked_count: f64,
    iterations: u64,
) -> Result<f64> {
    let theta = grover_angle(search_space, marked_count)?;
    Ok(success_at(theta, iterations))
}

fn success_at(theta: f64, iterations: u64) -> f64 {
    ((2.0 * iterations as f64 + 1.0) * theta).sin().powi(2)
}

/// Smallest `t` whose success probability reaches `p_target`. When the
/// target is above the first peak of the probability curve the peak
/// iteration is returned instead.
pub fn iterations_for_success(
    search_space: &BigUint,
    marked_count: f64,
    p_target: f64,
) -> Result<u64> {
    if !(p_target > 0.0 && p_target <= 1.0) {
        return Err(domain(format!(
            "target probability must be in (0, 1], got {p_target}"
        )));
    }
    let theta = grover_angle(search_space, marked_count)?;
    if success_at(theta, 0) >= p_target {
        return Ok(0);
    }

    // sin^2 rises monotonically until (2t+1)·theta reaches pi/2.
    let peak_real = PI / (4.0 * theta) - 0.5;
    let lo = peak_real.floor().max(0.0) as u64;
    let peak = [lo, lo + 1]
        .into_iter()
        .max_by(|a, b| success_at(theta, *a).total_cmp(&success_at(theta, *b)))
        .unwrap_or(0);

    let estimate = (((p_target.sqrt().asin() / theta) - 1.0) / 2.0)
        .ceil()
        .max(0.0) as u64;
    let mut t = estimate.min(peak);
    // Floating error can put the closed-form estimate one step off either way.
    while t > 0 && success_at(theta, t - 1) >= p_target {
        t -= 1;
    }
    while t < peak && success_at(theta, t) < p_target {
        t += 1;
    }
    Ok(t)
}

/// Total gates for `iterations` Grover iterations of `gates_per_iteration`.
pub fn gate_count(iterations: f64, gates_per_iteration: u64) -> Result<f64> {
    ensure_non_negative("iterations", iterations)?;
    Ok(iterations * gates_per_iteration as f64)
}

/// Error-correction steps: every corrected qubit is corrected after every gate.
pub fn ec_steps(gate_count: f64, corrected_qubits: u64) -> Result<f64> {
    ensure_non_negative("gate count", gate_count)?;
    Ok(gate_count * corrected_qubits as f64)
}

/// `sqrt(N / (maxTarget / difficulty)) · g · d` in one call.
pub fn ec_steps_total(
    search_space: &BigUint,
    max_target: &BigUint,
    difficulty: f64,
    gates_per_iteration: u64,
    corrected_qubits: u64,
) -> Result<f64> {
    let m = pow_target_m(max_target, difficulty)?;
    let t = grover_iterations_sqrt(search_space, m)?;
    ec_steps(gate_count(t, gates_per_iteration)?, corrected_qubits)
}

/// Bits erased by one search: `steps · c^n + q`, or only `q` without ECC.
pub fn erased_bits(arch: &QuantumArchitecture, ec_steps: f64) -> f64 {
    let q = arch.output_qubits as f64;
    if arch.is_error_corrected() {
        ec_steps * arch.measurement_multiplier() + q
    } else {
        q
    }
}

/// Full cost for a given iteration count on `arch`.
pub fn ecc_cost(arch: &QuantumArchitecture, iterations: f64) -> Result<EccCost> {
    let gates = gate_count(iterations, arch.gates_per_iteration)?;
    let steps = ec_steps(gates, arch.corrected_qubits)?;
    Ok(EccCost {
        gate_count: gates,
        ec_steps: steps,
        erased_bits: erased_bits(arch, steps),
    })
}

/// Error-correction steps for the snapshot's search, from first principles.
pub fn ec_steps_for_network(arch: &QuantumArchitecture, snap: &NetworkSnapshot) -> Result<f64> {
    ec_steps_total(
        &snap.search_space(),
        &snap.max_target,
        snap.difficulty,
        arch.gates_per_iteration,
        arch.corrected_qubits,
    )
}

pub fn quantum_landauer_energy(
    arch: &QuantumArchitecture,
    ec_steps: f64,
    temperature: TemperatureK,
) -> Result<ErasureLedger> {
    ensure_non_negative("error-correction steps", ec_steps)?;
    erasure_energy(erased_bits(arch, ec_steps), temperature)
}

/// Landauer minimum scaled by an efficiency ratio. Ratios below 1 are
/// unphysical but still computed; scenario validation warns about them.
pub fn projected_actual_energy(landauer_j: f64, ratio: f64) -> Result<f64> {
    ensure_non_negative("Landauer energy", landauer_j)?;
    ensure_positive("efficiency ratio", ratio)?;
    Ok(landauer_j * ratio)
}

/// Inefficiency ratio at which the quantum miner would spend exactly the
/// classical miner's actual energy.
pub fn break_even_ratio(classical_actual_j: f64, quantum_landauer_j: f64) -> Result<f64> {
    ensure_positive("classical actual energy", classical_actual_j)?;
    ensure_positive("quantum Landauer energy", quantum_landauer_j)?;
    Ok(classical_actual_j / quantum_landauer_j)
}

/// How many times less energy the quantum miner spends per block.
pub fn advantage_factor(classical_actual_j: f64, quantum_actual_j: f64) -> Result<f64> {
    ensure_positive("classical actual energy", classical_actual_j)?;
    ensure_positive("quantum actual energy", quantum_actual_j)?;
    Ok(classical_actual_j / quantum_actual_j)
}

/// Annual energy saved if the whole network switched, in TWh/year.
pub fn annual_savings(snap: &NetworkSnapshot, advantage: f64) -> Result<f64> {
    let annual = snap.annual_consumption_twh.ok_or_else(|| {
        ModelError::Config("annual_consumption_twh is required for savings".into())
    })?;
    check_positive_field("annual_consumption_twh", annual)?;
    if !(advantage.is_finite() && advantage >= 1.0) {
        return Err(domain(format!("advantage must be >= 1, got {advantage}")));
    }
    Ok(annual * (1.0 - 1.0 / advantage))
}
