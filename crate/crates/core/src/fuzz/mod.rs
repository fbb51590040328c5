//! Coverage-guided grey-box fuzzing over call sequences.
//!
//! The seed pool starts from one sequence (random, or supplied by the
//! caller). Each iteration picks a seed uniformly, applies one mutation,
//! and replays the result on a fresh world. Sequences that reach a branch
//! site never seen before join the pool; the rest are dropped. Sequences
//! that trip a checked-arithmetic or transfer fault go to the bug pool.
//! Every step draws from one ChaCha stream seeded by the config, so a run
//! is a pure function of `(model, config)`.

mod bugs;
mod generate;
mod mutate;

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use bugs::{detect_bugs, BugKind, BugReport};
pub use generate::{generate_call, generate_inputs};
pub use mutate::{mutate, mutate_with_op, MutationOp};

use crate::config::FuzzConfig;
use crate::error::{Error, ModelError};
use crate::minisol::{ContractModel, SiteId};
use crate::vm::{replay, FunctionCall, Simulation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzResult {
    /// Seed-pool entries in admission order, capped at `max_simulations`.
    pub simulations: Vec<Simulation>,
    pub bugs: Vec<BugReport>,
    /// Union of the coverage of every admitted seed.
    pub global_coverage: BTreeSet<SiteId>,
    pub iterations_run: u64,
    /// Size of the seed pool before the output cap was applied.
    pub pool_size: usize,
}

pub fn fuzz(model: &ContractModel, config: &FuzzConfig) -> Result<FuzzResult, Error> {
    fuzz_with_seeds(model, config, &[])
}

/// Runs the fuzz loop starting from `seeds`. With no seeds, one random
/// sequence bootstraps the pool. The first seed is always admitted; later
/// ones only if they add coverage.
pub fn fuzz_with_seeds(
    model: &ContractModel,
    config: &FuzzConfig,
    seeds: &[Vec<FunctionCall>],
) -> Result<FuzzResult, Error> {
    config.validate()?;
    if model.functions.is_empty() {
        return Err(ModelError.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut pool = Pool::default();

    if seeds.is_empty() {
        let len = rng.gen_range(1..=config.max_sequence_length);
        let seq = (0..len)
            .map(|_| generate_call(model, config, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        pool.offer(replay(model, config, &seq)?);
    } else {
        for seq in seeds {
            let mut seq = seq.clone();
            seq.truncate(config.max_sequence_length);
            pool.offer(replay(model, config, &seq)?);
        }
    }

    for _ in 0..config.iteration_budget {
        let parent = &pool.seeds[rng.gen_range(0..pool.seeds.len())];
        let child = mutate(&parent.sequence(), model, config, &mut rng);
        pool.offer(replay(model, config, &child)?);
    }

    let pool_size = pool.seeds.len();
    let mut simulations = pool.seeds;
    simulations.truncate(config.max_simulations);
    Ok(FuzzResult {
        simulations,
        bugs: pool.bugs,
        global_coverage: pool.coverage,
        iterations_run: config.iteration_budget,
        pool_size,
    })
}

#[derive(Default)]
struct Pool {
    seeds: Vec<Simulation>,
    coverage: BTreeSet<SiteId>,
    bugs: Vec<BugReport>,
    seen_bugs: HashSet<BugReport>,
}

impl Pool {
    fn offer(&mut self, sim: Simulation) {
        for kind in detect_bugs(&sim) {
            let report = BugReport {
                kind,
                sequence: sim.sequence(),
            };
            if self.seen_bugs.insert(report.clone()) {
                self.bugs.push(report);
            }
        }
        let grows = self.seeds.is_empty() || !sim.coverage.is_subset(&self.coverage);
        if grows {
            self.coverage.extend(sim.coverage.iter().copied());
            self.seeds.push(sim);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minisol::parse;

    const LOTTERY: &str = include_str!("../../../../corpus/lottery.msol");
    const PONZI: &str = include_str!("../../../../corpus/ponzi.msol");

    fn cfg(budget: u64) -> FuzzConfig {
        FuzzConfig {
            iteration_budget: budget,
            owner_index: 1,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn zero_budget_returns_initial_seed() {
        let model = parse(LOTTERY).unwrap();
        let result = fuzz(&model, &cfg(0)).unwrap();
        assert_eq!(result.simulations.len(), 1);
        assert_eq!(result.iterations_run, 0);
        assert_eq!(result.global_coverage, result.simulations[0].coverage);
    }

    #[test]
    fn straight_line_contract_covers_entry_only() {
        let model = parse("contract S { uint n; function f() { n += 1; } }").unwrap();
        for budget in [0, 10, 500] {
            let result = fuzz(&model, &cfg(budget)).unwrap();
            assert_eq!(result.global_coverage, BTreeSet::from([0]));
            assert_eq!(result.simulations.len(), 1);
        }
    }

    #[test]
    fn empty_contract_is_model_error() {
        let model = parse("contract E {}").unwrap();
        assert_eq!(
            fuzz(&model, &cfg(10)).unwrap_err(),
            Error::Model(ModelError)
        );
    }

    #[test]
    fn bad_config_propagates() {
        let model = parse(LOTTERY).unwrap();
        let config = FuzzConfig {
            owner_index: 9,
            ..cfg(10)
        };
        assert!(matches!(fuzz(&model, &config), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let model = parse(PONZI).unwrap();
        let a = fuzz(&model, &cfg(300)).unwrap();
        let b = fuzz(&model, &cfg(300)).unwrap();
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap()
        );
        let c = fuzz(
            &model,
            &FuzzConfig {
                rng_seed: 7,
                ..cfg(300)
            },
        )
        .unwrap();
        assert_ne!(a.simulations, c.simulations);
    }

    #[test]
    fn every_admission_grows_coverage() {
        let model = parse(PONZI).unwrap();
        let result = fuzz(&model, &cfg(2000)).unwrap();
        let mut seen = BTreeSet::new();
        for (i, sim) in result.simulations.iter().enumerate() {
            assert!(
                i == 0 || !sim.coverage.is_subset(&seen),
                "simulation {i} added nothing"
            );
            seen.extend(sim.coverage.iter().copied());
        }
        assert_eq!(seen, result.global_coverage);
        assert_eq!(result.pool_size, result.simulations.len());
    }

    #[test]
    fn pool_entries_replay_exactly() {
        let model = parse(LOTTERY).unwrap();
        let config = cfg(500);
        let result = fuzz(&model, &config).unwrap();
        for sim in &result.simulations {
            assert_eq!(&replay(&model, &config, &sim.sequence()).unwrap(), sim);
        }
    }

    #[test]
    fn output_capped_in_admission_order() {
        let model = parse(PONZI).unwrap();
        let full = fuzz(&model, &cfg(2000)).unwrap();
        let capped = fuzz(
            &model,
            &FuzzConfig {
                max_simulations: 2,
                ..cfg(2000)
            },
        )
        .unwrap();
        assert_eq!(capped.simulations, full.simulations[..2]);
        assert_eq!(capped.global_coverage, full.global_coverage);
    }

    #[test]
    fn supplied_seeds_start_the_pool() {
        let model = parse(LOTTERY).unwrap();
        let seed = vec![FunctionCall {
            caller: 0,
            function: "enter".into(),
            value: 3,
            args: vec![],
        }];
        let result = fuzz_with_seeds(&model, &cfg(0), std::slice::from_ref(&seed)).unwrap();
        assert_eq!(result.simulations.len(), 1);
        assert_eq!(result.simulations[0].sequence(), seed);
    }

    #[test]
    fn overflow_lands_in_bug_pool() {
        let src = "contract Counter {
            uint count = 340282366920938463463374607431768211450;
            function bump(uint by) { count += by; }
        }";
        let model = parse(src).unwrap();
        let result = fuzz(&model, &cfg(200)).unwrap();
        assert!(result
            .bugs
            .iter()
            .any(|b| b.kind == BugKind::ArithmeticOverflow));
        for bug in &result.bugs {
            let sim = replay(&model, &cfg(0), &bug.sequence).unwrap();
            assert!(detect_bugs(&sim).contains(&bug.kind));
        }
    }
}
