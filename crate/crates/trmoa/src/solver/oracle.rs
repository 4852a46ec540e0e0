//! Exact minimum-regret enumeration for micro instances.
//!
//! Every slot is assigned to one advertiser or left out, so the search space
//! is `(n + 1)^h` maps. Depth-first search over slots (most influential
//! first) prunes with a per-advertiser regret lower bound, a dominance rule
//! (a slot never goes to an advertiser it cannot help), and a greedy warm
//! start as the incumbent. A guard rail refuses instances where `h` or `n`
//! would make the enumeration explode.
//!
//! Tag refinement is fixed to the same adaptive selection the heuristics
//! use, so oracle totals are directly comparable to theirs.

use std::time::Instant;

use crate::influence::{ExposureIndex, InfluenceAccumulator};
use crate::model::{AdvId, Allocation, Instance, SlotId};
use crate::regret::{eval, total_regret};

use super::{bg_solve, refine_all, RunTrace, SolveError, SolveOutcome, SolverConfig};

/// Instance-size guard for [`oracle_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_slots: usize,
    pub max_advertisers: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_slots: 12,
            max_advertisers: 3,
        }
    }
}

struct Search<'a> {
    index: &'a ExposureIndex,
    /// Slots in branching order (descending base influence).
    slot_order: Vec<SlotId>,
    /// Advertisers worth branching on, best payment/demand ratio first.
    eligible: Vec<usize>,
    demands: Vec<f64>,
    payments: Vec<f64>,
    delta: f64,
    accs: Vec<InfluenceAccumulator>,
    /// `suffix[i][d]`: upper bound on influence advertiser `i` could still
    /// gain from slots at depth `>= d` (sum of empty-set marginal gains).
    suffix: Vec<Vec<f64>>,
    /// Cap on each advertiser's achievable influence in its tag context.
    max_influence: Vec<f64>,
    owner: Vec<Option<AdvId>>,
    best_total: f64,
    best_owner: Vec<Option<AdvId>>,
}

impl Search<'_> {
    /// Cheap bound from precomputed empty-set gain suffixes.
    fn static_bound(&self, depth: usize) -> f64 {
        let mut bound = 0.0;
        for (i, acc) in self.accs.iter().enumerate() {
            let achieved = acc.total();
            let demand = self.demands[i];
            let reachable = (achieved + self.suffix[i][depth]).min(self.max_influence[i]);
            if reachable < demand {
                bound += eval(reachable, demand, self.payments[i], self.delta).0;
            } else if achieved > demand {
                bound += eval(achieved, demand, self.payments[i], self.delta).0;
            }
        }
        bound
    }

    /// Tighter bound: remaining gains evaluated at the advertiser's current
    /// coverage state (submodularity makes these no larger than the static
    /// ones). Only computed when the static bound fails to prune.
    fn dynamic_bound(&self, depth: usize) -> f64 {
        let mut bound = 0.0;
        for (i, acc) in self.accs.iter().enumerate() {
            let achieved = acc.total();
            let demand = self.demands[i];
            if achieved > demand {
                bound += eval(achieved, demand, self.payments[i], self.delta).0;
                continue;
            }
            let static_reach = (achieved + self.suffix[i][depth]).min(self.max_influence[i]);
            if static_reach >= demand {
                // Recheck with current-state gains before conceding zero.
                let mut potential = 0.0;
                for &slot in &self.slot_order[depth..] {
                    potential += acc.marginal_gain(self.index, slot);
                    if achieved + potential >= demand {
                        break;
                    }
                }
                let reachable = achieved + potential;
                if reachable < demand {
                    bound += eval(reachable, demand, self.payments[i], self.delta).0;
                }
            } else {
                bound += eval(static_reach, demand, self.payments[i], self.delta).0;
            }
        }
        bound
    }

    fn dfs(&mut self, depth: usize) {
        if depth == self.slot_order.len() {
            let total: f64 = self
                .accs
                .iter()
                .enumerate()
                .map(|(i, acc)| eval(acc.total(), self.demands[i], self.payments[i], self.delta).0)
                .sum();
            if total < self.best_total {
                self.best_total = total;
                self.best_owner = self.owner.clone();
            }
            return;
        }
        if self.static_bound(depth) >= self.best_total {
            return;
        }
        if self.dynamic_bound(depth) >= self.best_total {
            return;
        }
        let slot = self.slot_order[depth];
        for k in 0..self.eligible.len() {
            let i = self.eligible[k];
            // Leaving the slot out dominates giving it to an advertiser it
            // cannot move: a satisfied advertiser only gains excessive
            // regret, and a zero-gain assignment changes nothing.
            if self.accs[i].total() >= self.demands[i] {
                continue;
            }
            if self.accs[i].marginal_gain(self.index, slot) <= 0.0 {
                continue;
            }
            let token = self.accs[i].commit_undoable(self.index, slot);
            self.owner[slot.index()] = Some(AdvId(i as u32));
            self.dfs(depth + 1);
            self.owner[slot.index()] = None;
            self.accs[i].undo(token);
        }
        self.dfs(depth + 1); // leave unassigned
    }
}

/// Exhaustive minimum-total-regret allocation, refused above the guard rail.
pub fn oracle_solve(
    instance: &Instance,
    config: &SolverConfig,
    index: &ExposureIndex,
) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let limits = config.oracle_limits;
    if instance.slot_count() > limits.max_slots
        || instance.advertiser_count() > limits.max_advertisers
    {
        return Err(SolveError::OracleGuard {
            slots: instance.slot_count(),
            advertisers: instance.advertiser_count(),
            max_slots: limits.max_slots,
            max_advertisers: limits.max_advertisers,
        });
    }

    let refined = refine_all(instance, config);
    let warm = bg_solve(instance, config, index)?;

    let mut slot_order: Vec<SlotId> = instance.catalog.slot_ids().collect();
    slot_order.sort_by(|&a, &b| {
        let ia = instance.catalog.slots[a.index()].base_influence;
        let ib = instance.catalog.slots[b.index()].base_influence;
        ib.partial_cmp(&ia)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let accs: Vec<InfluenceAccumulator> = refined
        .iter()
        .map(|tags| InfluenceAccumulator::new(index, &instance.db.affinities, tags))
        .collect();
    let n = instance.advertiser_count();
    let h = slot_order.len();
    let mut suffix = vec![vec![0.0_f64; h + 1]; n];
    for (i, acc) in accs.iter().enumerate() {
        for d in (0..h).rev() {
            suffix[i][d] = suffix[i][d + 1] + acc.marginal_gain(index, slot_order[d]);
        }
    }
    let max_influence: Vec<f64> = (0..n)
        .map(|i| {
            (0..instance.user_count())
                .map(|u| accs[i].user_tag_prob(crate::model::UserId(u as u32)))
                .sum()
        })
        .collect();

    let mut eligible: Vec<usize> = super::sort_advertisers(&instance.book)
        .into_iter()
        .map(|a| a.index())
        .collect();
    eligible.retain(|&i| !refined[i].is_empty());

    let mut warm_owner: Vec<Option<AdvId>> = vec![None; instance.slot_count()];
    for (i, adv_alloc) in warm.allocation.per_adv.iter().enumerate() {
        for &s in &adv_alloc.slots {
            warm_owner[s.index()] = Some(AdvId(i as u32));
        }
    }

    let mut search = Search {
        index,
        slot_order,
        eligible,
        demands: instance.book.advertisers.iter().map(|a| a.demand).collect(),
        payments: instance.book.advertisers.iter().map(|a| a.payment).collect(),
        delta: config.regret.delta,
        accs,
        suffix,
        max_influence,
        owner: vec![None; instance.slot_count()],
        best_total: warm.report.total,
        best_owner: warm_owner,
    };
    search.dfs(0);

    let mut allocation = Allocation::empty(n, instance.slot_count());
    let mut pointers = vec![0_usize; n];
    for s in 0..instance.slot_count() {
        if let Some(adv) = search.best_owner[s] {
            let i = adv.index();
            let tags = &refined[i];
            let tag = tags[pointers[i] % tags.len()];
            pointers[i] += 1;
            allocation
                .assign(adv, tag, SlotId(s as u32))
                .expect("owner map assigns each slot once");
        }
    }
    let report = total_regret(&allocation, instance, &refined, &config.regret, index)?;
    Ok(SolveOutcome {
        allocation,
        report,
        trace: RunTrace {
            wall: started.elapsed(),
            ..RunTrace::default()
        },
        tag_selections: refined,
    })
}
