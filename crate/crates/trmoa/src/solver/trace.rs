//! Selection logs. A trace records every slot assignment a solve made, in
//! order, with enough detail that replaying the entries reconstructs the
//! exact allocation.

use std::time::Duration;

use crate::model::{AdvId, Allocation, ModelError, SlotId, TagId};

/// One slot assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub advertiser: AdvId,
    /// Round-robin pointer value (index into the advertiser's refined tags)
    /// at the time of the pick.
    pub tag_pointer: usize,
    pub tag: TagId,
    pub slot: SlotId,
    /// Greedy score of the chosen slot; `None` for uniform random picks.
    pub score: Option<f64>,
    /// Demand still open *before* this assignment, under the full refined
    /// tag set. Positive for every entry by the loop condition.
    pub remaining_demand: f64,
}

/// Ordered log of one solve.
#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
    /// Advertisers skipped because tag refinement left them without tags.
    pub skipped: Vec<AdvId>,
    pub wall: Duration,
    pub rng_draws: u64,
    /// Total regret of the internal greedy warm start (local search only).
    pub warm_start_regret: Option<f64>,
    /// Local-search iterations that replaced the incumbent (local search only).
    pub improved_iterations: u32,
    /// Whether the final leftover-pool extension was kept (local search only).
    pub extension_kept: bool,
}

/// Rebuilds the allocation a trace describes by applying its entries in
/// order to an empty allocation.
pub fn replay(
    entries: &[TraceEntry],
    advertiser_count: usize,
    slot_count: usize,
) -> Result<Allocation, ModelError> {
    let mut alloc = Allocation::empty(advertiser_count, slot_count);
    for e in entries {
        alloc.assign(e.advertiser, e.tag, e.slot)?;
    }
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_applies_entries_in_order() {
        let entries = vec![
            TraceEntry {
                advertiser: AdvId(1),
                tag_pointer: 0,
                tag: TagId(3),
                slot: SlotId(2),
                score: Some(1.5),
                remaining_demand: 4.0,
            },
            TraceEntry {
                advertiser: AdvId(0),
                tag_pointer: 1,
                tag: TagId(1),
                slot: SlotId(0),
                score: None,
                remaining_demand: 2.0,
            },
        ];
        let alloc = replay(&entries, 2, 3).unwrap();
        assert!(alloc.per_adv[1].slots.contains(&SlotId(2)));
        assert!(alloc.per_adv[0].slots.contains(&SlotId(0)));
        assert_eq!(alloc.unassigned.len(), 1);
    }

    #[test]
    fn replay_rejects_double_assignment() {
        let e = TraceEntry {
            advertiser: AdvId(0),
            tag_pointer: 0,
            tag: TagId(0),
            slot: SlotId(0),
            score: None,
            remaining_demand: 1.0,
        };
        let entries = vec![e.clone(), e];
        assert!(replay(&entries, 1, 2).is_err());
    }
}
