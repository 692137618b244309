use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qpow::grover::{grover_step, run, run_marked, MarkedSet, Sampler, StateVector, ToyPowInstance};
use qpow::quantum::{grover_success_probability, iterations_for_success};
use qpow::race::{run_race, run_sweep, MinerAgent, RaceConfig, Retarget, SweepTotals};
use qpow::Execution;

#[test]
fn sampler_matches_state_distribution() {
    let marked = MarkedSet::from_indices(6, &[3, 17, 40]).unwrap();
    let mut state = StateVector::init_uniform(6).unwrap();
    grover_step(&mut state, &marked, Execution::default()).unwrap();
    let probs = state.probabilities();

    let sampler = Sampler::new(&state);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let mut counts = vec![0u32; probs.len()];
    for _ in 0..draws {
        counts[sampler.sample(&mut rng) as usize] += 1;
    }
    let tvd: f64 = probs
        .iter()
        .zip(&counts)
        .map(|(p, &c)| (p - c as f64 / draws as f64).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tvd < 0.01, "total variation distance {tvd}");
}

#[test]
fn sequential_and_parallel_runs_agree_bit_for_bit() {
    let inst = ToyPowInstance::new(14, 20, 300).unwrap();
    let seq = MarkedSet::from_instance_with(&inst, Execution::Sequential);
    let t = iterations_for_success(&BigUint::from(1u64 << 14), seq.len() as f64, 0.9).unwrap();
    let a = run_marked(14, &seq, t, 5, Execution::Sequential).unwrap();
    let b = run_marked(14, &seq, t, 5, Execution::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.success_probability.to_bits(),
        b.success_probability.to_bits()
    );
}

#[test]
fn mining_run_reaches_requested_probability() {
    let inst = ToyPowInstance::new(12, 12, 2).unwrap();
    let outcome = run(&inst, 0, 1).unwrap();
    let m = outcome.marked_count as f64;
    assert!(m >= 1.0);
    let space = BigUint::from(1u64 << 12);
    let t = iterations_for_success(&space, m, 0.5).unwrap();
    let outcome = run(&inst, t, 1).unwrap();
    let closed = grover_success_probability(&space, m, t).unwrap();
    assert!((outcome.success_probability - closed).abs() < 1e-9);
    assert!(outcome.success_probability >= 0.5);
    if t > 0 {
        let before = grover_success_probability(&space, m, t - 1).unwrap();
        assert!(before < 0.5);
    }
}

fn pair(p: f64, blocks: u64, seed: u64) -> RaceConfig {
    RaceConfig::new(
        vec![
            MinerAgent::classical("Classical", p, 2258.69),
            MinerAgent::quantum("Quantum", p, 7.687e-6),
        ],
        blocks,
        seed,
        2.8e13,
    )
}

#[test]
fn same_seed_same_race() {
    let cfg = pair(0.01, 100_000, 17);
    assert_eq!(run_race(&cfg).unwrap(), run_race(&cfg).unwrap());
    let other = RaceConfig {
        seed: 18,
        ..cfg.clone()
    };
    assert_ne!(run_race(&cfg).unwrap(), run_race(&other).unwrap());
}

#[test]
fn sweep_is_independent_of_execution_strategy() {
    let cfg = pair(0.02, 20_000, 0);
    let seeds: Vec<u64> = (0..12).collect();
    let seq = run_sweep(&cfg, &seeds, Execution::Sequential).unwrap();
    let par = run_sweep(&cfg, &seeds, Execution::default()).unwrap();
    assert_eq!(seq, par);
    for (report, seed) in seq.iter().zip(&seeds) {
        assert_eq!(report.seed, *seed);
    }
}

#[test]
fn wins_stay_within_three_sigma_across_seeds() {
    let p = 0.003;
    let blocks = 200_000u64;
    let seeds: Vec<u64> = (100..120).collect();
    let cfg = RaceConfig::new(
        vec![MinerAgent::classical("Classical", p, 1.0)],
        blocks,
        0,
        1.0,
    );
    let reports = run_sweep(&cfg, &seeds, Execution::default()).unwrap();
    let mean = blocks as f64 * p;
    let sigma = (blocks as f64 * p * (1.0 - p)).sqrt();
    for r in &reports {
        let won = r.agents[0].blocks_won as f64;
        assert!(
            (won - mean).abs() <= 3.0 * sigma,
            "seed {}: {won} vs {mean}",
            r.seed
        );
    }
    let totals = reports
        .iter()
        .map(SweepTotals::from_report)
        .reduce(|a, b| a.merge(&b))
        .unwrap();
    let pooled = totals.mean_blocks_won()[0];
    let pooled_sigma = sigma / (seeds.len() as f64).sqrt();
    assert!(
        (pooled - mean).abs() <= 3.0 * pooled_sigma,
        "{pooled} vs {mean}"
    );
}

#[test]
fn retargeting_tracks_hashrate() {
    let mut cfg = pair(0.001, 20_160, 9);
    cfg.retarget = Some(Retarget {
        interval_blocks: 2016,
        hashrate_multiplier: 2.0,
    });
    let report = run_race(&cfg).unwrap();
    assert_eq!(report.retargets, 10);
    let ratio = report.final_difficulty / cfg.difficulty;
    assert!((ratio - 2.0).abs() < 0.1, "difficulty ratio {ratio}");
}
