//! The shared advertiser-by-advertiser allocation pass.
//!
//! All four heuristics run the same loop: serve advertisers in a fixed
//! order; for each advertiser cycle a pointer over its refined tags and keep
//! assigning slots until the full-tag-set influence meets the demand or the
//! pool runs dry. They differ only in how a slot is picked per step:
//!
//! * `GreedyAll` scans the whole remaining pool (BG),
//! * `GreedySampled` scans a uniform random subsample (RG),
//! * `UniformRandom` picks one slot blindly (Random baseline and the
//!   local-search exploration passes).
//!
//! Greedy picks maximize regret reduction per unit cost. The reduction is
//! measured either against the influence of the pointer's current tag alone
//! (the default, which makes the round-robin pointer meaningful) or against
//! the full refined set, per [`ScoreContext`]. Ties break toward the
//! smallest slot id.
//!
//! A pass records its assignments as trace entries and defers building the
//! `Allocation` maps until a caller asks; local search runs many throwaway
//! passes and only materializes the winner. Accumulators are cloned from
//! per-solve templates so repeated passes skip the tag-probability setup.

use crate::influence::{ExposureIndex, InfluenceAccumulator};
use crate::model::{AdvId, Allocation, Instance, SlotId, TagId};
use crate::regret::eval;

use super::rng::SolveRng;
use super::trace::TraceEntry;
use super::{rg_sample_size, ScoreContext, ScoreDenominator, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Picker {
    GreedyAll,
    GreedySampled,
    UniformRandom,
}

/// Fresh accumulators and advertiser constants, built once per solve and
/// cloned into every pass.
pub(crate) struct PassTemplates {
    demands: Vec<f64>,
    payments: Vec<f64>,
    refined: Vec<Vec<TagId>>,
    full: Vec<InfluenceAccumulator>,
    /// One accumulator per refined tag per advertiser; empty unless the
    /// score context is `Tag` and some pass will score candidates.
    per_tag: Vec<Vec<InfluenceAccumulator>>,
    advertiser_count: usize,
    slot_count: usize,
}

impl PassTemplates {
    pub fn new(
        instance: &Instance,
        index: &ExposureIndex,
        config: &SolverConfig,
        refined: &[Vec<TagId>],
        build_scoring: bool,
    ) -> Self {
        let full = refined
            .iter()
            .map(|tags| InfluenceAccumulator::new(index, &instance.db.affinities, tags))
            .collect();
        let per_tag = if build_scoring && config.score_context == ScoreContext::Tag {
            refined
                .iter()
                .map(|tags| {
                    tags.iter()
                        .map(|&t| InfluenceAccumulator::new(index, &instance.db.affinities, &[t]))
                        .collect()
                })
                .collect()
        } else {
            vec![Vec::new(); refined.len()]
        };
        PassTemplates {
            demands: instance.book.advertisers.iter().map(|a| a.demand).collect(),
            payments: instance.book.advertisers.iter().map(|a| a.payment).collect(),
            refined: refined.to_vec(),
            full,
            per_tag,
            advertiser_count: instance.advertiser_count(),
            slot_count: instance.slot_count(),
        }
    }
}

/// Per-advertiser evaluation state for one pass.
struct AdvCtx {
    demand: f64,
    payment: f64,
    refined: Vec<TagId>,
    /// Influence under the full refined tag set; drives the demand check.
    full: InfluenceAccumulator,
    /// Influence under each single refined tag; drives tag-context scoring.
    per_tag: Vec<InfluenceAccumulator>,
    pointer: usize,
}

pub(crate) struct PassState {
    pub pool: Vec<SlotId>,
    pub entries: Vec<TraceEntry>,
    pub skipped: Vec<AdvId>,
    ctxs: Vec<AdvCtx>,
    advertiser_count: usize,
    slot_count: usize,
    /// Allocation this pass resumed from, if any.
    base: Option<Allocation>,
}

impl PassState {
    /// Everything unassigned, accumulators at zero. `scoring` controls
    /// whether the cloned contexts carry per-tag accumulators; passes that
    /// only pick uniformly at random skip them since nothing reads them.
    pub fn fresh(templates: &PassTemplates, scoring: bool) -> Self {
        let ctxs = (0..templates.advertiser_count)
            .map(|i| AdvCtx {
                demand: templates.demands[i],
                payment: templates.payments[i],
                refined: templates.refined[i].clone(),
                full: templates.full[i].clone(),
                per_tag: if scoring {
                    templates.per_tag[i].clone()
                } else {
                    Vec::new()
                },
                pointer: 0,
            })
            .collect();
        PassState {
            pool: (0..templates.slot_count as u32).map(SlotId).collect(),
            entries: Vec::new(),
            skipped: Vec::new(),
            ctxs,
            advertiser_count: templates.advertiser_count,
            slot_count: templates.slot_count,
            base: None,
        }
    }

    /// Resumes from an existing allocation: accumulators replay each
    /// advertiser's slots in canonical order, the pool is the allocation's
    /// unassigned set, and tag pointers continue where the round-robin
    /// would be after that many picks.
    pub fn from_allocation(
        alloc: Allocation,
        templates: &PassTemplates,
        index: &ExposureIndex,
        scoring: bool,
    ) -> Self {
        let mut state = PassState::fresh(templates, scoring);
        state.pool = alloc.unassigned.iter().copied().collect();
        for (i, adv_alloc) in alloc.per_adv.iter().enumerate() {
            let ctx = &mut state.ctxs[i];
            for &slot in &adv_alloc.slots {
                ctx.full.commit(index, slot);
                for acc in &mut ctx.per_tag {
                    acc.commit(index, slot);
                }
            }
            if !ctx.refined.is_empty() {
                ctx.pointer = adv_alloc.slots.len() % ctx.refined.len();
            }
        }
        state.base = Some(alloc);
        state
    }

    /// Runs the allocation loop for every advertiser in `order`.
    pub fn run(
        &mut self,
        order: &[AdvId],
        picker: Picker,
        instance: &Instance,
        index: &ExposureIndex,
        config: &SolverConfig,
        rng: &mut SolveRng,
    ) {
        for &adv in order {
            self.run_advertiser(adv, picker, instance, index, config, rng);
        }
    }

    /// Total regret implied by the current accumulator state. Used to rank
    /// candidate passes without materializing allocations; the winner's
    /// report is recomputed canonically afterwards.
    pub fn total_from_accumulators(&self, delta: f64) -> f64 {
        self.ctxs
            .iter()
            .map(|c| eval(c.full.total(), c.demand, c.payment, delta).0)
            .sum()
    }

    /// Materializes the allocation this pass produced.
    pub fn build_allocation(&self) -> Allocation {
        let mut alloc = match &self.base {
            Some(base) => base.clone(),
            None => Allocation::empty(self.advertiser_count, self.slot_count),
        };
        for e in &self.entries {
            alloc
                .assign(e.advertiser, e.tag, e.slot)
                .expect("pass entries assign pool slots once");
        }
        alloc
    }

    fn run_advertiser(
        &mut self,
        adv: AdvId,
        picker: Picker,
        instance: &Instance,
        index: &ExposureIndex,
        config: &SolverConfig,
        rng: &mut SolveRng,
    ) {
        let a = adv.index();
        if self.ctxs[a].refined.is_empty() {
            self.skipped.push(adv);
            return;
        }
        loop {
            let remaining_before = self.ctxs[a].demand - self.ctxs[a].full.total();
            if !(remaining_before > 0.0) || self.pool.is_empty() {
                break;
            }
            let ctx = &self.ctxs[a];
            let pointer = ctx.pointer;
            let tag = ctx.refined[pointer];

            let (pos, score) = match picker {
                Picker::UniformRandom => (rng.index(self.pool.len()), None),
                Picker::GreedyAll => {
                    let (pos, s) = self.best_candidate(a, pointer, index, instance, config, None);
                    (pos, Some(s))
                }
                Picker::GreedySampled => {
                    let len = self.pool.len();
                    let k = rg_sample_size(len, config.epsilon);
                    if k >= len {
                        let (pos, s) =
                            self.best_candidate(a, pointer, index, instance, config, None);
                        (pos, Some(s))
                    } else {
                        let sample = rng.sample_positions(len, k);
                        let (pos, s) = self
                            .best_candidate(a, pointer, index, instance, config, Some(&sample));
                        (pos, Some(s))
                    }
                }
            };
            let slot = self.pool[pos];

            if config.early_stop && picker != Picker::UniformRandom {
                // Stop serving this advertiser once the least-bad slot would
                // cost more extra regret than giving up now.
                let ctx = &self.ctxs[a];
                let before = eval(ctx.full.total(), ctx.demand, ctx.payment, config.regret.delta).0;
                let after_total = ctx.full.total() + ctx.full.marginal_gain(index, slot);
                let after = eval(after_total, ctx.demand, ctx.payment, config.regret.delta).0;
                if after - before > before {
                    break;
                }
            }

            let ctx = &mut self.ctxs[a];
            ctx.full.commit(index, slot);
            for acc in &mut ctx.per_tag {
                acc.commit(index, slot);
            }
            ctx.pointer = (ctx.pointer + 1) % ctx.refined.len();
            self.pool.swap_remove(pos);
            self.entries.push(TraceEntry {
                advertiser: adv,
                tag_pointer: pointer,
                tag,
                slot,
                score,
                remaining_demand: remaining_before,
            });
        }
    }

    /// Argmax of regret reduction per unit cost over the pool (or the given
    /// sampled positions). Returns the pool position and the score.
    fn best_candidate(
        &self,
        a: usize,
        pointer: usize,
        index: &ExposureIndex,
        instance: &Instance,
        config: &SolverConfig,
        sample: Option<&[usize]>,
    ) -> (usize, f64) {
        let ctx = &self.ctxs[a];
        let scoring = match config.score_context {
            ScoreContext::Tag => &ctx.per_tag[pointer],
            ScoreContext::Full => &ctx.full,
        };
        let delta = config.regret.delta;
        let regret_before = eval(scoring.total(), ctx.demand, ctx.payment, delta).0;

        let mut best: Option<(usize, f64, SlotId)> = None;
        let mut consider = |pos: usize| {
            let slot = self.pool[pos];
            let gain = scoring.marginal_gain(index, slot);
            let regret_after = eval(scoring.total() + gain, ctx.demand, ctx.payment, delta).0;
            let raw_denom = match config.score_denominator {
                ScoreDenominator::Cost => instance.catalog.slots[slot.index()].cost,
                ScoreDenominator::Influence => instance.catalog.slots[slot.index()].base_influence,
            };
            // Zero-cost slots score by raw reduction rather than dividing by 0.
            let denom = if raw_denom > 0.0 { raw_denom } else { 1.0 };
            let score = (regret_before - regret_after) / denom;
            let better = match best {
                None => true,
                Some((_, best_score, best_slot)) => {
                    score > best_score || (score == best_score && slot < best_slot)
                }
            };
            if better {
                best = Some((pos, score, slot));
            }
        };
        match sample {
            Some(positions) => positions.iter().for_each(|&p| consider(p)),
            None => (0..self.pool.len()).for_each(&mut consider),
        }
        let (pos, score, _) = best.expect("candidate set is non-empty");
        (pos, score)
    }
}
