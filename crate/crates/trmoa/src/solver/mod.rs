//! The allocation strategies behind one interface.
//!
//! * **BG** — round-robin greedy: every pick scans the whole remaining pool
//!   for the slot with the best regret reduction per unit cost.
//! * **RG** — stochastic greedy: every pick scans only a uniform random
//!   subsample of the pool, sized by [`rg_sample_size`].
//! * **RLS** — randomized local search: an RG warm start, `rls_iters`
//!   uniform-random rebuild iterations that replace the incumbent only on
//!   improvement, and a final greedy extension pass over the leftover pool
//!   that is kept only if it lowers total regret.
//! * **Random** — the baseline: advertisers in input order, uniform random
//!   slots until demand is met or the pool is exhausted.
//! * **Oracle** — exact branch-and-bound enumeration of every slot-to-
//!   advertiser map, guarded to micro instances.
//!
//! All solvers refine each advertiser's tags with [`crate::tags::aits`]
//! first, enforce disjointness by removing picked slots from a shared pool,
//! and draw every random decision from one seeded ChaCha8 stream, so a solve
//! is a pure function of (instance, config).

mod engine;
mod oracle;
mod rng;
mod trace;

pub use oracle::{oracle_solve, OracleLimits};
pub use rng::{derive_seed, SolveRng};
pub use trace::{replay, RunTrace, TraceEntry};

use std::time::Instant;

use thiserror::Error;

use crate::influence::{build_exposure_index, ExposureIndex};
use crate::model::{AdvId, AdvertiserBook, Allocation, Instance, ModelError, TagId};
use crate::regret::{total_regret, RegretError, RegretParams, RegretReport};
use crate::tags::{aits, TagSelectionParams};

use engine::{PassState, PassTemplates, Picker};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Bg,
    Rg,
    Rls,
    Random,
    Oracle,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bg => "bg",
            Algorithm::Rg => "rg",
            Algorithm::Rls => "rls",
            Algorithm::Random => "random",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bg" => Some(Algorithm::Bg),
            "rg" => Some(Algorithm::Rg),
            "rls" => Some(Algorithm::Rls),
            "random" => Some(Algorithm::Random),
            "oracle" => Some(Algorithm::Oracle),
            _ => None,
        }
    }
}

/// Which influence context scores greedy candidates.
///
/// `Tag` measures regret reduction with the influence of the round-robin
/// pointer's current tag alone, which is what makes the pointer matter;
/// `Full` uses the whole refined set. The demand check always uses the full
/// set either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreContext {
    #[default]
    Tag,
    Full,
}

/// Denominator of the greedy score: slot cost (the default) or the slot's
/// stand-alone influence. Costs are influence-proportional by construction,
/// so the two rank nearly identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreDenominator {
    #[default]
    Cost,
    Influence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Sampling parameter for RG; smaller means larger samples.
    pub epsilon: f64,
    /// Local search iteration count N.
    pub rls_iters: u32,
    pub seed: u64,
    pub regret: RegretParams,
    pub tag: TagSelectionParams,
    /// Exposure distance threshold in meters.
    pub gamma: f64,
    pub score_context: ScoreContext,
    pub score_denominator: ScoreDenominator,
    /// Optional guard that stops serving an advertiser once the least-bad
    /// candidate would add more regret than stopping costs.
    pub early_stop: bool,
    pub oracle_limits: OracleLimits,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        SolverConfig {
            algorithm,
            epsilon: 0.01,
            rls_iters: 20,
            seed,
            regret: RegretParams::default(),
            tag: TagSelectionParams::default(),
            gamma: 100.0,
            score_context: ScoreContext::default(),
            score_denominator: ScoreDenominator::default(),
            early_stop: false,
            oracle_limits: OracleLimits::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(SolveError::InvalidConfig(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.rls_iters < 1 {
            return Err(SolveError::InvalidConfig("rls_iters must be >= 1".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(SolveError::InvalidConfig(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        RegretParams::new(self.regret.delta).map_err(SolveError::Regret)?;
        TagSelectionParams::new(self.tag.omega)
            .map_err(|e| SolveError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Regret(#[from] RegretError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "instance exceeds the oracle guard rail: {slots} slots (max {max_slots}), \
         {advertisers} advertisers (max {max_advertisers})"
    )]
    OracleGuard {
        slots: usize,
        advertisers: usize,
        max_slots: usize,
        max_advertisers: usize,
    },
}

/// Everything a solve produces. The leftover pool is
/// `allocation.unassigned`; replaying `trace.entries` rebuilds `allocation`.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub allocation: Allocation,
    pub report: RegretReport,
    pub trace: RunTrace,
    /// Refined tag set per advertiser, in book order.
    pub tag_selections: Vec<Vec<TagId>>,
}

/// Sample size for one stochastic-greedy pick: `(remaining / k) * ln(1/eps)`
/// rounded up, where `k` is 10% of the remaining pool (at least 1). Clamped
/// to `[1, remaining]`.
pub fn rg_sample_size(remaining: usize, epsilon: f64) -> usize {
    debug_assert!(remaining >= 1);
    debug_assert!(epsilon > 0.0 && epsilon < 1.0);
    let k = ((0.10 * remaining as f64).ceil() as usize).max(1);
    let raw = ((remaining as f64 / k as f64) * (1.0 / epsilon).ln()).ceil();
    (raw as usize).clamp(1, remaining)
}

/// Advertiser order used by BG, RG and RLS: descending payment-to-demand
/// ratio, ties by ascending advertiser id.
pub fn sort_advertisers(book: &AdvertiserBook) -> Vec<AdvId> {
    let mut ids: Vec<AdvId> = book.ids().collect();
    ids.sort_by(|&a, &b| {
        let ra = book.advertisers[a.index()].ratio();
        let rb = book.advertisers[b.index()].ratio();
        rb.partial_cmp(&ra)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    ids
}

/// Validates the config, builds the exposure index at `config.gamma`, and
/// dispatches on the algorithm.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    config.validate()?;
    let index = build_exposure_index(
        &instance.db.records,
        &instance.catalog,
        instance.user_count(),
        config.gamma,
    );
    solve_with_index(instance, config, &index)
}

/// Like [`solve`] but reuses a prebuilt exposure index (the index must match
/// the instance and the intended gamma).
pub fn solve_with_index(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    config.validate()?;
    for adv in &instance.book.advertisers {
        if !(adv.demand > 0.0) {
            return Err(SolveError::Regret(RegretError::NonPositiveDemand(adv.demand)));
        }
    }
    match config.algorithm {
        Algorithm::Bg => bg_solve(instance, config, index),
        Algorithm::Rg => rg_solve(instance, config, index),
        Algorithm::Rls => rls_solve(instance, config, index),
        Algorithm::Random => random_solve(instance, config, index),
        Algorithm::Oracle => oracle_solve(instance, config, index),
    }
}

fn refine_all(instance: &Instance, config: &SolverConfig) -> Vec<Vec<TagId>> {
    instance
        .book
        .advertisers
        .iter()
        .map(|adv| aits(&adv.tags, &instance.db.affinities, &config.tag))
        .collect()
}

fn finish_pass(
    state: PassState,
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
    refined: Vec<Vec<TagId>>,
    rng_draws: u64,
    started: Instant,
) -> Result<SolveOutcome, SolveError> {
    let allocation = state.build_allocation();
    let report = total_regret(&allocation, instance, &refined, &config.regret, index)?;
    Ok(SolveOutcome {
        allocation,
        report,
        trace: RunTrace {
            entries: state.entries,
            skipped: state.skipped,
            wall: started.elapsed(),
            rng_draws,
            warm_start_regret: None,
            improved_iterations: 0,
            extension_kept: false,
        },
        tag_selections: refined,
    })
}

/// Round-robin greedy over the full pool (BG).
pub fn bg_solve(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let refined = refine_all(instance, config);
    let order = sort_advertisers(&instance.book);
    let templates = PassTemplates::new(instance, index, config, &refined, true);
    let mut rng = SolveRng::new(config.seed);
    let mut state = PassState::fresh(&templates, true);
    state.run(&order, Picker::GreedyAll, instance, index, config, &mut rng);
    finish_pass(state, instance, config, index, refined, rng.draws(), started)
}

/// Stochastic greedy over sampled candidates (RG).
pub fn rg_solve(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let refined = refine_all(instance, config);
    let order = sort_advertisers(&instance.book);
    let templates = PassTemplates::new(instance, index, config, &refined, true);
    let mut rng = SolveRng::new(config.seed);
    let mut state = PassState::fresh(&templates, true);
    state.run(&order, Picker::GreedySampled, instance, index, config, &mut rng);
    finish_pass(state, instance, config, index, refined, rng.draws(), started)
}

/// Uniform random baseline: input order, blind picks.
pub fn random_solve(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let refined = refine_all(instance, config);
    let order: Vec<AdvId> = instance.book.ids().collect();
    let templates = PassTemplates::new(instance, index, config, &refined, false);
    let mut rng = SolveRng::new(config.seed);
    let mut state = PassState::fresh(&templates, false);
    state.run(&order, Picker::UniformRandom, instance, index, config, &mut rng);
    finish_pass(state, instance, config, index, refined, rng.draws(), started)
}

/// Randomized local search (RLS): RG warm start, `rls_iters` random rebuild
/// iterations accepted only on improvement, then a greedy extension over the
/// leftover pool kept only if it lowers total regret.
pub fn rls_solve(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let refined = refine_all(instance, config);
    let order = sort_advertisers(&instance.book);
    let templates = PassTemplates::new(instance, index, config, &refined, true);
    let mut rng = SolveRng::new(config.seed);
    let delta = config.regret.delta;

    let mut warm = PassState::fresh(&templates, true);
    warm.run(&order, Picker::GreedySampled, instance, index, config, &mut rng);
    let warm_total = warm.total_from_accumulators(delta);
    let warm_alloc = warm.build_allocation();
    let warm_report = total_regret(&warm_alloc, instance, &refined, &config.regret, index)?;
    let warm_entries = warm.entries.clone();
    let warm_skipped = warm.skipped.clone();

    let mut best = warm;
    let mut best_total = warm_total;
    let mut best_is_warm = true;
    let mut improved = 0_u32;
    for _ in 0..config.rls_iters {
        let mut cand = PassState::fresh(&templates, false);
        cand.run(&order, Picker::UniformRandom, instance, index, config, &mut rng);
        let total = cand.total_from_accumulators(delta);
        if total < best_total {
            best = cand;
            best_total = total;
            best_is_warm = false;
            improved += 1;
        }
    }

    let warm_regret = warm_report.total;
    let (mut best_alloc, mut best_entries, best_skipped, mut best_report) = if best_is_warm {
        let entries = std::mem::take(&mut best.entries);
        let skipped = std::mem::take(&mut best.skipped);
        (warm_alloc, entries, skipped, warm_report)
    } else {
        let alloc = best.build_allocation();
        let report = total_regret(&alloc, instance, &refined, &config.regret, index)?;
        if report.total < warm_regret {
            let entries = std::mem::take(&mut best.entries);
            let skipped = std::mem::take(&mut best.skipped);
            (alloc, entries, skipped, report)
        } else {
            // An accepted iteration must also win under the canonical
            // evaluation; fall back to the warm start if rounding disagrees.
            improved = 0;
            (warm_alloc, warm_entries, warm_skipped, warm_report)
        }
    };

    let mut extension_kept = false;
    if !best_alloc.unassigned.is_empty() {
        let mut ext = PassState::from_allocation(best_alloc.clone(), &templates, index, true);
        ext.run(&order, Picker::GreedySampled, instance, index, config, &mut rng);
        if !ext.entries.is_empty() {
            let ext_alloc = ext.build_allocation();
            let report = total_regret(&ext_alloc, instance, &refined, &config.regret, index)?;
            if report.total < best_report.total {
                best_alloc = ext_alloc;
                best_entries.extend(ext.entries);
                best_report = report;
                extension_kept = true;
            }
        }
    }

    Ok(SolveOutcome {
        allocation: best_alloc,
        report: best_report,
        trace: RunTrace {
            entries: best_entries,
            skipped: best_skipped,
            wall: started.elapsed(),
            rng_draws: rng.draws(),
            warm_start_regret: Some(warm_regret),
            improved_iterations: improved,
            extension_kept,
        },
        tag_selections: refined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::influence;
    use crate::model::{allocation_is_feasible, Advertiser, SlotId};
    use crate::regret::advertiser_regret;
    use crate::testsupport::{coverage_instance, example_one};

    fn indexed(instance: &Instance, gamma: f64) -> crate::influence::ExposureIndex {
        build_exposure_index(
            &instance.db.records,
            &instance.catalog,
            instance.user_count(),
            gamma,
        )
    }

    /// Exhaustive reference: try every slot-to-advertiser map, evaluating
    /// influence and regret through the public from-scratch paths.
    fn brute_force_min_regret(instance: &Instance, config: &SolverConfig) -> f64 {
        let index = indexed(instance, config.gamma);
        let refined: Vec<Vec<TagId>> = refine_all(instance, config);
        let n = instance.advertiser_count();
        let h = instance.slot_count();
        let mut best = f64::INFINITY;
        let mut assignment = vec![0_usize; h]; // 0 = unassigned, i+1 = advertiser i
        loop {
            let mut total = 0.0;
            for i in 0..n {
                let slots: Vec<SlotId> = (0..h)
                    .filter(|&s| assignment[s] == i + 1)
                    .map(|s| SlotId(s as u32))
                    .collect();
                let achieved = influence(slots, &refined[i], &index, &instance.db.affinities);
                let adv = &instance.book.advertisers[i];
                let (r, _) =
                    advertiser_regret(achieved, adv.demand, adv.payment, &config.regret).unwrap();
                total += r;
            }
            best = best.min(total);
            // Odometer over the (n+1)^h assignment space.
            let mut pos = 0;
            loop {
                if pos == h {
                    return best;
                }
                assignment[pos] += 1;
                if assignment[pos] <= n {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn bg_with_no_slots_forfeits_every_payment() {
        let mut instance = example_one();
        instance.catalog.slots.clear();
        instance.catalog.slot_labels.clear();
        instance.horizon = crate::model::TimeWindow::new(0, 0);
        instance.db.records.clear();
        let config = SolverConfig::new(Algorithm::Bg, 1);
        let outcome = solve(&instance, &config).unwrap();
        assert_eq!(outcome.allocation.allocated_count(), 0);
        assert_eq!(outcome.report.total, 9.0 + 12.0 + 18.0);
    }

    #[test]
    fn bg_takes_the_minimal_prefix_on_disjoint_unit_slots() {
        // Four slots, one fresh user each; demand is two users' worth.
        let instance = coverage_instance(&[1, 1, 1, 1], 1.0, &[(2.0, 10.0)]);
        let config = SolverConfig::new(Algorithm::Bg, 5);
        let outcome = solve(&instance, &config).unwrap();
        let slots: Vec<SlotId> = outcome.allocation.per_adv[0].slots.iter().copied().collect();
        assert_eq!(slots, vec![SlotId(0), SlotId(1)]);
        assert_eq!(outcome.report.total, 0.0);
        assert_eq!(
            brute_force_min_regret(&instance, &config),
            outcome.report.total
        );
    }

    #[test]
    fn oracle_assigns_the_exact_slot_when_it_matches_demand() {
        let instance = coverage_instance(&[3], 1.0, &[(3.0, 5.0)]);
        let config = SolverConfig::new(Algorithm::Oracle, 0);
        let outcome = solve(&instance, &config).unwrap();
        assert_eq!(outcome.report.total, 0.0);
        assert!(outcome.allocation.per_adv[0].slots.contains(&SlotId(0)));
    }

    #[test]
    fn oracle_matches_brute_force_on_the_worked_example() {
        let instance = example_one();
        let config = SolverConfig::new(Algorithm::Oracle, 0);
        let outcome = solve(&instance, &config).unwrap();
        // Strategy II of the worked example totals 0 + 12/7 + 11.25.
        let strategy_two = 12.0 / 7.0 + 11.25;
        assert!(outcome.report.total <= strategy_two + 1e-9);
        let brute = brute_force_min_regret(&instance, &config);
        assert!(
            (outcome.report.total - brute).abs() < 1e-9,
            "oracle {} vs brute force {brute}",
            outcome.report.total
        );
    }

    #[test]
    fn oracle_refuses_oversized_instances() {
        let instance = coverage_instance(&[1; 13], 1.0, &[(2.0, 10.0)]);
        let config = SolverConfig::new(Algorithm::Oracle, 0);
        match solve(&instance, &config) {
            Err(SolveError::OracleGuard { slots, .. }) => assert_eq!(slots, 13),
            other => panic!("expected guard refusal, got {other:?}"),
        }
    }

    #[test]
    fn rg_degenerates_to_bg_when_the_sample_covers_the_pool() {
        // Five slots: the sample size formula saturates, so RG scans the
        // whole pool and must match BG decision for decision.
        let instance = example_one();
        let bg = solve(&instance, &SolverConfig::new(Algorithm::Bg, 7)).unwrap();
        let rg = solve(&instance, &SolverConfig::new(Algorithm::Rg, 7)).unwrap();
        assert_eq!(bg.allocation, rg.allocation);
        assert_eq!(bg.report.total, rg.report.total);
        assert_eq!(rg.trace.rng_draws, 0);
    }

    #[test]
    fn fixed_seed_reproduces_the_allocation() {
        let instance = coverage_instance(&[2, 1, 3, 1, 2, 1], 0.8, &[(3.0, 8.0), (2.0, 5.0)]);
        for algo in [Algorithm::Rg, Algorithm::Rls, Algorithm::Random] {
            let a = solve(&instance, &SolverConfig::new(algo, 99)).unwrap();
            let b = solve(&instance, &SolverConfig::new(algo, 99)).unwrap();
            assert_eq!(a.allocation, b.allocation, "{algo:?}");
            assert_eq!(a.trace.rng_draws, b.trace.rng_draws, "{algo:?}");
        }
    }

    #[test]
    fn rls_without_improvement_equals_rg() {
        let instance = example_one();
        let mut config = SolverConfig::new(Algorithm::Rls, 3);
        config.rls_iters = 1;
        let rls = solve(&instance, &config).unwrap();
        let rg = solve(&instance, &SolverConfig::new(Algorithm::Rg, 3)).unwrap();
        if rls.trace.improved_iterations == 0 && !rls.trace.extension_kept {
            assert_eq!(rls.allocation, rg.allocation);
            assert_eq!(rls.report.total, rg.report.total);
        }
        assert_eq!(rls.trace.warm_start_regret, Some(rg.report.total));
        assert!(rls.report.total <= rg.report.total);
    }

    #[test]
    fn random_consumes_the_pool_when_demand_exceeds_supply() {
        let instance = coverage_instance(&[1, 1, 1], 1.0, &[(10.0, 4.0)]);
        let outcome = solve(&instance, &SolverConfig::new(Algorithm::Random, 11)).unwrap();
        assert_eq!(outcome.allocation.allocated_count(), 3);
        assert!(outcome.allocation.unassigned.is_empty());
        assert_eq!(outcome.report.satisfied_count, 0);
    }

    #[test]
    fn solver_outputs_are_always_disjoint_partitions() {
        let instance = coverage_instance(&[2, 3, 1, 2, 1], 0.9, &[(3.0, 9.0), (4.0, 7.0)]);
        let index = indexed(&instance, 100.0);
        for algo in [
            Algorithm::Bg,
            Algorithm::Rg,
            Algorithm::Rls,
            Algorithm::Random,
            Algorithm::Oracle,
        ] {
            let outcome = solve(&instance, &SolverConfig::new(algo, 21)).unwrap();
            let verdict = allocation_is_feasible(
                &outcome.allocation,
                &instance,
                &outcome.tag_selections,
                &index,
            )
            .unwrap();
            assert!(verdict.disjoint, "{algo:?}");
            assert!(verdict.partition, "{algo:?}");
            assert!(verdict.buckets_consistent, "{algo:?}");
            // Pool conservation.
            assert_eq!(
                outcome.allocation.allocated_count() + outcome.allocation.unassigned.len(),
                instance.slot_count(),
                "{algo:?}"
            );
        }
    }

    #[test]
    fn traces_replay_to_the_emitted_allocation() {
        let instance = coverage_instance(&[2, 3, 1, 2, 1], 0.9, &[(3.0, 9.0), (4.0, 7.0)]);
        for algo in [Algorithm::Bg, Algorithm::Rg, Algorithm::Rls, Algorithm::Random] {
            let outcome = solve(&instance, &SolverConfig::new(algo, 4)).unwrap();
            let replayed = replay(
                &outcome.trace.entries,
                instance.advertiser_count(),
                instance.slot_count(),
            )
            .unwrap();
            assert_eq!(replayed, outcome.allocation, "{algo:?}");
        }
    }

    #[test]
    fn trace_demand_check_held_before_every_selection() {
        let instance = coverage_instance(&[2, 3, 1, 2, 1, 2], 0.9, &[(4.0, 9.0), (3.0, 7.0)]);
        for algo in [Algorithm::Bg, Algorithm::Rg] {
            let outcome = solve(&instance, &SolverConfig::new(algo, 8)).unwrap();
            for e in &outcome.trace.entries {
                assert!(e.remaining_demand > 0.0, "{algo:?}");
            }
        }
    }

    #[test]
    fn sample_size_matches_formula() {
        assert_eq!(rg_sample_size(1000, 0.01), 47);
    }

    #[test]
    fn sample_size_caps_at_remaining() {
        assert_eq!(rg_sample_size(5, 0.01), 5);
    }

    #[test]
    fn sample_size_clamps_to_one_near_epsilon_one() {
        assert_eq!(rg_sample_size(1000, 0.999_999), 1);
    }

    fn book(entries: &[(f64, f64)]) -> AdvertiserBook {
        AdvertiserBook {
            labels: (0..entries.len()).map(|i| format!("a{i}")).collect(),
            advertisers: entries
                .iter()
                .map(|&(demand, payment)| Advertiser {
                    demand,
                    payment,
                    tags: vec![TagId(0)],
                })
                .collect(),
        }
    }

    #[test]
    fn advertisers_sort_by_descending_ratio() {
        // Ratios 9/6 = 1.5, 12/7 ~ 1.714, 18/8 = 2.25.
        let b = book(&[(6.0, 9.0), (7.0, 12.0), (8.0, 18.0)]);
        assert_eq!(sort_advertisers(&b), vec![AdvId(2), AdvId(1), AdvId(0)]);
    }

    #[test]
    fn equal_ratios_fall_back_to_id_order() {
        let b = book(&[(2.0, 4.0), (1.0, 2.0), (4.0, 8.0)]);
        assert_eq!(sort_advertisers(&b), vec![AdvId(0), AdvId(1), AdvId(2)]);
    }

    #[test]
    fn single_advertiser_sorts_to_itself() {
        let b = book(&[(5.0, 5.0)]);
        assert_eq!(sort_advertisers(&b), vec![AdvId(0)]);
    }
}
