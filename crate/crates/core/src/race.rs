//! Seeded block-by-block race between modeled miners.
//!
//! Each block cycle every agent makes one attempt and succeeds with its
//! per-block probability. If several agents succeed in the same block one is
//! picked uniformly; when none succeed, the unmodeled rest of the network
//! takes the block. Every agent pays its per-block energy whether or not it
//! wins.
//!
//! Randomness comes from ChaCha8 streams keyed by the seed: stream 0 draws
//! block times, stream 1 arbitrates ties, stream `2 + i` belongs to agent
//! `i`. Adding an agent therefore never changes anyone else's draws.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{check_positive_field, domain, invalid, Result};
use crate::exec::Execution;
use crate::quantum::{grover_success_probability, iterations_for_success};

const NETWORK_STREAM: u64 = 0;
const ARBITER_STREAM: u64 = 1;
const AGENT_STREAM_BASE: u64 = 2;

pub const DEFAULT_RETARGET_INTERVAL: u64 = 2016;
pub const DEFAULT_BLOCK_TIME_S: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinerKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerAgent {
    pub kind: MinerKind,
    pub per_block_success_prob: f64,
    pub energy_per_block_j: f64,
    pub label: String,
}

impl MinerAgent {
    /// Classical device winning with its hash-rate share.
    pub fn classical(
        label: impl Into<String>,
        network_share: f64,
        energy_per_block_j: f64,
    ) -> Self {
        Self {
            kind: MinerKind::Classical,
            per_block_success_prob: network_share,
            energy_per_block_j,
            label: label.into(),
        }
    }

    pub fn quantum(label: impl Into<String>, success_prob: f64, energy_per_block_j: f64) -> Self {
        Self {
            kind: MinerKind::Quantum,
            per_block_success_prob: success_prob,
            energy_per_block_j,
            label: label.into(),
        }
    }

    /// Quantum agent whose success probability comes from running the fewest
    /// Grover iterations that reach `p_target` on an `N`, `M` search.
    pub fn quantum_for_target(
        label: impl Into<String>,
        search_space: &BigUint,
        marked_count: f64,
        p_target: f64,
        energy_per_block_j: f64,
    ) -> Result<Self> {
        let t = iterations_for_success(search_space, marked_count, p_target)?;
        let p = grover_success_probability(search_space, marked_count, t)?;
        Ok(Self::quantum(label, p, energy_per_block_j))
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.per_block_success_prob;
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(
                "per_block_success_prob",
                format!(
                    "agent `{}` must have probability in (0, 1], got {p}",
                    self.label
                ),
            ));
        }
        check_positive_field("energy_per_block_j", self.energy_per_block_j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retarget {
    pub interval_blocks: u64,
    /// Network hash rate relative to the rate the starting difficulty was
    /// tuned for. 1.0 keeps blocks at the target time on average.
    pub hashrate_multiplier: f64,
}

impl Default for Retarget {
    fn default() -> Self {
        Self {
            interval_blocks: DEFAULT_RETARGET_INTERVAL,
            hashrate_multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceConfig {
    pub agents: Vec<MinerAgent>,
    pub num_blocks: u64,
    pub seed: u64,
    pub target_block_time_s: f64,
    pub difficulty: f64,
    /// Difficulty retargeting; `None` keeps difficulty fixed.
    pub retarget: Option<Retarget>,
}

impl RaceConfig {
    pub fn new(agents: Vec<MinerAgent>, num_blocks: u64, seed: u64, difficulty: f64) -> Self {
        Self {
            agents,
            num_blocks,
            seed,
            target_block_time_s: DEFAULT_BLOCK_TIME_S,
            difficulty,
            retarget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(invalid("agents", "at least one agent is required"));
        }
        for agent in &self.agents {
            agent.validate()?;
        }
        if self.num_blocks == 0 {
            return Err(invalid("num_blocks", "must be positive"));
        }
        check_positive_field("target_block_time_s", self.target_block_time_s)?;
        check_positive_field("difficulty", self.difficulty)?;
        if let Some(r) = &self.retarget {
            if r.interval_blocks == 0 {
                return Err(invalid("retarget_interval_blocks", "must be positive"));
            }
            if self.num_blocks < r.interval_blocks {
                return Err(invalid(
                    "num_blocks",
                    format!(
                        "must be at least the retarget interval {} when retargeting",
                        r.interval_blocks
                    ),
                ));
            }
            check_positive_field("hashrate_multiplier", r.hashrate_multiplier)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResult {
    pub label: String,
    pub kind: MinerKind,
    pub per_block_success_prob: f64,
    pub blocks_won: u64,
    pub total_energy_j: f64,
    /// Absent when the agent never won.
    pub energy_per_won_block_j: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceReport {
    pub seed: u64,
    pub agents: Vec<AgentResult>,
    pub final_difficulty: f64,
    pub total_blocks: u64,
    pub retargets: u64,
}

impl RaceReport {
    /// Blocks that went to the unmodeled part of the network.
    pub fn unclaimed_blocks(&self) -> u64 {
        self.total_blocks - self.agents.iter().map(|a| a.blocks_won).sum::<u64>()
    }
}

/// Proportional retarget clamped to a factor of four either way.
pub fn retarget_difficulty(
    current: f64,
    observed_mean_block_time_s: f64,
    target_s: f64,
) -> Result<f64> {
    for (name, v) in [
        ("current difficulty", current),
        ("observed block time", observed_mean_block_time_s),
        ("target block time", target_s),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    let proposed = current * (target_s / observed_mean_block_time_s);
    Ok(proposed.clamp(current / 4.0, current * 4.0))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn run_race(config: &RaceConfig) -> Result<RaceReport> {
    config.validate()?;
    let seed = config.seed;
    let mut network = stream(seed, NETWORK_STREAM);
    let mut arbiter = stream(seed, ARBITER_STREAM);
    let mut agent_rngs: Vec<ChaCha8Rng> = (0..config.agents.len() as u64)
        .map(|i| stream(seed, AGENT_STREAM_BASE + i))
        .collect();

    let base_difficulty = config.difficulty;
    let mut difficulty = base_difficulty;
    let mut wins = vec![0u64; config.agents.len()];
    let mut winners: Vec<usize> = Vec::with_capacity(config.agents.len());
    let mut window_time = 0.0;
    let mut window_blocks = 0u64;
    let mut retargets = 0u64;

    for _ in 0..config.num_blocks {
        // One uniform per agent per block keeps the coupling between runs
        // with different probabilities monotone.
        let scale = base_difficulty / difficulty;
        winners.clear();
        for (i, (agent, rng)) in config.agents.iter().zip(agent_rngs.iter_mut()).enumerate() {
            let p = (agent.per_block_success_prob * scale).min(1.0);
            if rng.random::<f64>() < p {
                winners.push(i);
            }
        }
        let pick = arbiter.random::<f64>();
        if !winners.is_empty() {
            let k = ((pick * winners.len() as f64) as usize).min(winners.len() - 1);
            wins[winners[k]] += 1;
        }

        let u: f64 = network.random();
        if let Some(rt) = &config.retarget {
            let mean = config.target_block_time_s * (difficulty / base_difficulty)
                / rt.hashrate_multiplier;
            window_time += -mean * (1.0 - u).ln();
            window_blocks += 1;
            if window_blocks == rt.interval_blocks {
                let observed = window_time / window_blocks as f64;
                difficulty = retarget_difficulty(difficulty, observed, config.target_block_time_s)?;
                window_time = 0.0;
                window_blocks = 0;
                retargets += 1;
            }
        }
    }

    let agents = config
        .agents
        .iter()
        .zip(&wins)
        .map(|(agent, &won)| {
            let total = config.num_blocks as f64 * agent.energy_per_block_j;
            AgentResult {
                label: agent.label.clone(),
                kind: agent.kind,
                per_block_success_prob: agent.per_block_success_prob,
                blocks_won: won,
                total_energy_j: total,
                energy_per_won_block_j: (won > 0).then(|| total / won as f64),
            }
        })
        .collect();

    Ok(RaceReport {
        seed,
        agents,
        final_difficulty: difficulty,
        total_blocks: config.num_blocks,
        retargets,
    })
}

/// Runs the same configuration under each seed. Reports come back in seed
/// order and do not depend on the execution strategy.
pub fn run_sweep(config: &RaceConfig, seeds: &[u64], exec: Execution) -> Result<Vec<RaceReport>> {
    config.validate()?;
    let one = |&seed: &u64| {
        let cfg = RaceConfig {
            seed,
            ..config.clone()
        };
        run_race(&cfg)
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return seeds.par_iter().map(one).collect();
    }
    let _ = exec;
    seeds.iter().map(one).collect()
}

/// Per-agent totals accumulated over several races.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTotals {
    pub runs: u64,
    pub total_blocks: u64,
    pub blocks_won: Vec<u64>,
    pub total_energy_j: Vec<f64>,
}

impl SweepTotals {
    pub fn from_report(report: &RaceReport) -> Self {
        Self {
            runs: 1,
            total_blocks: report.total_blocks,
            blocks_won: report.agents.iter().map(|a| a.blocks_won).collect(),
            total_energy_j: report.agents.iter().map(|a| a.total_energy_j).collect(),
        }
    }

    /// Associative merge. An empty side acts as the identity.
    pub fn merge(mut self, other: &SweepTotals) -> SweepTotals {
        if self.runs == 0 {
            return other.clone();
        }
        if other.runs == 0 {
            return self;
        }
        self.runs += other.runs;
        self.total_blocks += other.total_blocks;
        for (a, b) in self.blocks_won.iter_mut().zip(&other.blocks_won) {
            *a += b;
        }
        for (a, b) in self.total_energy_j.iter_mut().zip(&other.total_energy_j) {
            *a += b;
        }
        self
    }

    pub fn mean_blocks_won(&self) -> Vec<f64> {
        self.blocks_won
            .iter()
            .map(|&w| w as f64 / self.runs.max(1) as f64)
            .collect()
    }
}
