//! Exact statevector execution of Grover-based mining on a toy instance.
//!
//! SHA-256 is replaced by a small xor-shift-multiply hash so the whole
//! nonce space fits in memory. A nonce is a solution when its digest is at
//! or below the target, exactly as in HashCash. The oracle flips the sign
//! of precomputed solution amplitudes; gate-level costs are not modeled
//! here.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, ModelError, Result};
use crate::exec::Execution;

/// Largest register the simulator will allocate (2^24 amplitudes, 256 MiB
/// of `Complex64`).
pub const MAX_QUBITS: u32 = 24;

/// Offset added to the nonce before hashing so that nonce 0 does not stay 0.
pub const HASH_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Constants of the toy hash. Defaults are the SplitMix64/Murmur3 finalizer
/// multipliers and shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashParams {
    pub multipliers: [u64; 3],
    pub shifts: [u32; 2],
}

impl Default for HashParams {
    fn default() -> Self {
        Self {
            multipliers: [
                0xbf58_476d_1ce4_e5b9,
                0x94d0_49bb_1331_11eb,
                0xff51_afd7_ed55_8ccd,
            ],
            shifts: [30, 27],
        }
    }
}

impl HashParams {
    fn validate(&self) -> Result<()> {
        if self.multipliers.iter().any(|m| m % 2 == 0) {
            return Err(domain("hash multipliers must be odd"));
        }
        if self.shifts.iter().any(|&s| s == 0 || s >= 64) {
            return Err(domain("hash shifts must be in 1..64"));
        }
        Ok(())
    }

    /// Three rounds of xor-shift-multiply, keeping the top `digest_bits`.
    pub fn digest(&self, nonce: u64, digest_bits: u32) -> u64 {
        let [s1, s2] = self.shifts;
        let mut x = nonce.wrapping_add(HASH_SEED_OFFSET);
        for m in self.multipliers {
            x ^= x >> s1;
            x = x.wrapping_mul(m);
            x ^= x >> s2;
        }
        x >> (64 - digest_bits)
    }
}

/// A desk-scale proof-of-work puzzle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyPowInstance {
    pub nonce_bits: u32,
    pub digest_bits: u32,
    pub params: HashParams,
    pub target: u64,
}

fn check_width(name: &str, bits: u32) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&bits) {
        Ok(())
    } else {
        Err(ModelError::Resource(format!(
            "{name} must be in 1..={MAX_QUBITS}, got {bits}"
        )))
    }
}

impl ToyPowInstance {
    pub fn new(nonce_bits: u32, digest_bits: u32, target: u64) -> Result<Self> {
        Self::with_params(nonce_bits, digest_bits, target, HashParams::default())
    }

    pub fn with_params(
        nonce_bits: u32,
        digest_bits: u32,
        target: u64,
        params: HashParams,
    ) -> Result<Self> {
        check_width("nonce_bits", nonce_bits)?;
        check_width("digest_bits", digest_bits)?;
        params.validate()?;
        if target >= 1u64 << digest_bits {
            return Err(domain(format!(
                "target {target} is outside the {digest_bits}-bit digest range"
            )));
        }
        Ok(Self {
            nonce_bits,
            digest_bits,
            params,
            target,
        })
    }

    /// Target from the rule `2^digest_bits - difficulty · 2^shift`, scaled
    /// down from the 256-bit original. Errors when the result leaves the
    /// digest range.
    pub fn from_alg1_rule(
        nonce_bits: u32,
        digest_bits: u32,
        difficulty: u64,
        shift: u32,
    ) -> Result<Self> {
        check_width("digest_bits", digest_bits)?;
        let space = 1u128 << digest_bits;
        let offset = (difficulty as u128)
            .checked_shl(shift)
            .filter(|o| shift < 128 && o >> shift == difficulty as u128)
            .ok_or_else(|| domain("difficulty·2^shift overflows"))?;
        if offset == 0 || offset > space {
            return Err(domain(format!(
                "2^{digest_bits} - {difficulty}·2^{shift} is outside the digest range"
            )));
        }
        Self::new(nonce_bits, digest_bits, (space - offset) as u64)
    }

    pub fn search_space(&self) -> u64 {
        1u64 << self.nonce_bits
    }

    fn is_solution(&self, nonce: u64) -> bool {
        self.params.digest(nonce, self.digest_bits) <= self.target
    }
}

pub fn toy_hash(nonce: u64, instance: &ToyPowInstance) -> Result<u64> {
    if nonce >= instance.search_space() {
        return Err(domain(format!(
            "nonce {nonce} outside the {}-bit nonce space",
            instance.nonce_bits
        )));
    }
    Ok(instance.params.digest(nonce, instance.digest_bits))
}

/// Brute-force count of nonces whose digest is at or below the target.
pub fn count_marked(instance: &ToyPowInstance) -> u64 {
    let mut count = 0;
    for nonce in 0..instance.search_space() {
        if instance.params.digest(nonce, instance.digest_bits) <= instance.target {
            count += 1;
        }
    }
    count
}

/// Basis states the oracle flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    mask: Vec<bool>,
    count: u64,
}

impl MarkedSet {
    pub fn from_instance(instance: &ToyPowInstance) -> Self {
        Self::from_instance_with(instance, Execution::default())
    }

    pub fn from_instance_with(instance: &ToyPowInstance, exec: Execution) -> Self {
        let mask = exec.map_indices(instance.search_space() as usize, |i| {
            instance.is_solution(i as u64)
        });
        Self::from_mask(mask)
    }

    pub fn from_indices(num_qubits: u32, indices: &[u64]) -> Result<Self> {
        check_width("num_qubits", num_qubits)?;
        let size = 1u64 << num_qubits;
        let mut mask = vec![false; size as usize];
        for &i in indices {
            if i >= size {
                return Err(domain(format!("marked index {i} outside 2^{num_qubits}")));
            }
            mask[i as usize] = true;
        }
        Ok(Self::from_mask(mask))
    }

    /// The `m` nonces with the smallest digests (ties broken by nonce).
    pub fn lowest_digests(instance: &ToyPowInstance, m: u64) -> Result<Self> {
        let n = instance.search_space();
        if m > n {
            return Err(domain(format!("cannot mark {m} of {n} nonces")));
        }
        let mut order: Vec<(u64, u64)> = (0..n)
            .map(|i| (instance.params.digest(i, instance.digest_bits), i))
            .collect();
        order.sort_unstable();
        let chosen: Vec<u64> = order[..m as usize].iter().map(|&(_, i)| i).collect();
        Self::from_indices(instance.nonce_bits, &chosen)
    }

    fn from_mask(mask: Vec<bool>) -> Self {
        let count = mask.iter().filter(|&&b| b).count() as u64;
        Self { mask, count }
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, index: u64) -> bool {
        self.mask.get(index as usize).copied().unwrap_or(false)
    }

    pub fn size(&self) -> usize {
        self.mask.len()
    }
}

/// Normalized amplitudes over `2^num_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition, the result of `H^{⊗n}` on `|0…0⟩`.
    pub fn init_uniform(num_qubits: u32) -> Result<Self> {
        check_width("num_qubits", num_qubits)?;
        let size = 1usize << num_qubits;
        let amp = 2f64.powf(-(num_qubits as f64) / 2.0);
        Ok(Self {
            num_qubits,
            amplitudes: vec![Complex64::new(amp, 0.0); size],
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(domain(format!("{len} amplitudes is not 2^n with n >= 1")));
        }
        let num_qubits = len.trailing_zeros();
        check_width("num_qubits", num_qubits)?;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        Execution::Sequential.sum(&self.amplitudes, 0.0, |a| a.norm_sqr())
    }

    /// Total probability of measuring a marked state.
    pub fn probability_of(&self, marked: &MarkedSet) -> f64 {
        let mut p = 0.0;
        for (a, &m) in self.amplitudes.iter().zip(&marked.mask) {
            if m {
                p += a.norm_sqr();
            }
        }
        p
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Phase flip on every marked basis state.
pub fn apply_oracle(state: &mut StateVector, marked: &MarkedSet) -> Result<()> {
    apply_oracle_with(state, marked, Execution::default())
}

pub fn apply_oracle_with(
    state: &mut StateVector,
    marked: &MarkedSet,
    exec: Execution,
) -> Result<()> {
    if marked.size() != state.amplitudes.len() {
        return Err(domain(format!(
            "marked set covers {} states, register has {}",
            marked.size(),
            state.amplitudes.len()
        )));
    }
    let mask = &marked.mask;
    exec.for_each_mut(&mut state.amplitudes, |i, a| {
        if mask[i] {
            *a = -*a;
        }
    });
    Ok(())
}

/// Inversion about the mean, `a_i <- 2·mean - a_i`. Equal to
/// `H^{⊗n} (2|0⟩⟨0| - I) H^{⊗n}`.
pub fn apply_diffusion(state: &mut StateVector) {
    apply_diffusion_with(state, Execution::default())
}

pub fn apply_diffusion_with(state: &mut StateVector, exec: Execution) {
    let total = exec.sum(&state.amplitudes, Complex64::new(0.0, 0.0), |a| *a);
    let twice_mean = total * (2.0 / state.amplitudes.len() as f64);
    exec.for_each_mut(&mut state.amplitudes, |_, a| *a = twice_mean - *a);
}

/// One Grover iteration: oracle then diffusion.
pub fn grover_step(state: &mut StateVector, marked: &MarkedSet, exec: Execution) -> Result<()> {
    apply_oracle_with(state, marked, exec)?;
    apply_diffusion_with(state, exec);
    Ok(())
}

/// Inverse-CDF sampler over measurement outcomes.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cumulative = state
            .amplitudes
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1) as u64
    }
}

/// Result of one simulated mining attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningOutcome {
    pub success_probability: f64,
    pub sampled_nonce: u64,
    pub sample_satisfies_target: bool,
    pub iterations_used: u64,
    pub marked_count: u64,
}

/// `iterations` Grover rounds from the uniform state, then one seeded
/// measurement.
pub fn run(instance: &ToyPowInstance, iterations: u64, seed: u64) -> Result<MiningOutcome> {
    let marked = MarkedSet::from_instance(instance);
    run_marked(
        instance.nonce_bits,
        &marked,
        iterations,
        seed,
        Execution::default(),
    )
}

pub fn run_marked(
    num_qubits: u32,
    marked: &MarkedSet,
    iterations: u64,
    seed: u64,
    exec: Execution,
) -> Result<MiningOutcome> {
    let mut state = StateVector::init_uniform(num_qubits)?;
    for _ in 0..iterations {
        grover_step(&mut state, marked, exec)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled_nonce = Sampler::new(&state).sample(&mut rng);
    Ok(MiningOutcome {
        success_probability: state.probability_of(marked),
        sampled_nonce,
        sample_satisfies_target: marked.contains(sampled_nonce),
        iterations_used: iterations,
        marked_count: marked.len(),
    })
}
