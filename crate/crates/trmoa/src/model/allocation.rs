use std::collections::{BTreeMap, BTreeSet};

use super::ids::{AdvId, SlotId, TagId};
use super::types::Instance;
use super::ModelError;
use crate::influence::{influence, ExposureIndex};

/// Slots held by one advertiser, bucketed by the tag that acquired each slot.
/// The buckets partition the slot set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdvAllocation {
    pub slots: BTreeSet<SlotId>,
    pub buckets: BTreeMap<TagId, BTreeSet<SlotId>>,
}

/// An assignment of slots to advertisers plus the pool of unassigned slots.
///
/// [`Allocation::assign`] maintains disjointness and pool conservation; the
/// fields stay public so tests and ingestion can build arbitrary (including
/// deliberately invalid) allocations for [`allocation_is_feasible`] to judge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub per_adv: Vec<AdvAllocation>,
    pub unassigned: BTreeSet<SlotId>,
}

impl Allocation {
    /// Everything unassigned.
    pub fn empty(advertiser_count: usize, slot_count: usize) -> Self {
        Allocation {
            per_adv: vec![AdvAllocation::default(); advertiser_count],
            unassigned: (0..slot_count as u32).map(SlotId).collect(),
        }
    }

    /// Moves `slot` from the unassigned pool into `adv`'s `tag` bucket.
    pub fn assign(&mut self, adv: AdvId, tag: TagId, slot: SlotId) -> Result<(), ModelError> {
        if !self.unassigned.remove(&slot) {
            return Err(ModelError::UnknownSlot(slot));
        }
        let a = self
            .per_adv
            .get_mut(adv.index())
            .ok_or(ModelError::UnknownAdvertiser(adv))?;
        a.slots.insert(slot);
        a.buckets.entry(tag).or_default().insert(slot);
        Ok(())
    }

    pub fn allocated_count(&self) -> usize {
        self.per_adv.iter().map(|a| a.slots.len()).sum()
    }

    pub fn slots_of(&self, adv: AdvId) -> &BTreeSet<SlotId> {
        &self.per_adv[adv.index()].slots
    }
}

/// Outcome of checking an allocation against the instance constraints.
///
/// Demand satisfaction is diagnostic, not an error: with insufficient supply
/// the solvers legitimately return demand-unsatisfied allocations.
#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    /// No slot appears in two advertisers' sets.
    pub disjoint: bool,
    /// First offending (slot, holder, other holder) when not disjoint.
    pub first_conflict: Option<(SlotId, AdvId, AdvId)>,
    /// Allocated sets plus the unassigned pool cover the catalog exactly once.
    pub partition: bool,
    /// Every advertiser's tag buckets union to exactly its slot set.
    pub buckets_consistent: bool,
    /// Tag-specific influence achieved per advertiser.
    pub achieved: Vec<f64>,
    /// Whether achieved influence meets the advertiser's demand.
    pub demand_met: Vec<bool>,
}

impl FeasibilityVerdict {
    pub fn satisfied_count(&self) -> usize {
        self.demand_met.iter().filter(|&&m| m).count()
    }
}

/// Checks disjointness, catalog partitioning, bucket consistency, and
/// per-advertiser demand satisfaction under the given tag selections.
///
/// `tag_selections` holds one refined tag set per advertiser, in book order.
/// Unknown slot ids are a rejection, not a verdict.
pub fn allocation_is_feasible(
    alloc: &Allocation,
    instance: &Instance,
    tag_selections: &[Vec<TagId>],
    index: &ExposureIndex,
) -> Result<FeasibilityVerdict, ModelError> {
    let slot_count = instance.slot_count();
    for &s in alloc
        .per_adv
        .iter()
        .flat_map(|a| a.slots.iter())
        .chain(alloc.unassigned.iter())
    {
        if s.index() >= slot_count {
            return Err(ModelError::UnknownSlot(s));
        }
    }

    let mut owner: Vec<Option<AdvId>> = vec![None; slot_count];
    let mut disjoint = true;
    let mut first_conflict = None;
    for (i, a) in alloc.per_adv.iter().enumerate() {
        let adv = AdvId(i as u32);
        for &s in &a.slots {
            match owner[s.index()] {
                None => owner[s.index()] = Some(adv),
                Some(prev) => {
                    disjoint = false;
                    if first_conflict.is_none() {
                        first_conflict = Some((s, prev, adv));
                    }
                }
            }
        }
    }

    let allocated: usize = alloc.per_adv.iter().map(|a| a.slots.len()).sum();
    let partition = disjoint
        && allocated + alloc.unassigned.len() == slot_count
        && alloc
            .unassigned
            .iter()
            .all(|s| owner[s.index()].is_none());

    let buckets_consistent = alloc.per_adv.iter().all(|a| {
        let union: BTreeSet<SlotId> = a.buckets.values().flatten().copied().collect();
        let bucket_sizes: usize = a.buckets.values().map(BTreeSet::len).sum();
        union == a.slots && bucket_sizes == union.len()
    });

    let mut achieved = Vec::with_capacity(instance.advertiser_count());
    let mut demand_met = Vec::with_capacity(instance.advertiser_count());
    for (i, advertiser) in instance.book.advertisers.iter().enumerate() {
        let tags: &[TagId] = tag_selections.get(i).map(Vec::as_slice).unwrap_or(&[]);
        let slots = alloc
            .per_adv
            .get(i)
            .map(|a| a.slots.iter().copied().collect::<Vec<_>>())
            .unwrap_or_default();
        let value = influence(slots, tags, index, &instance.db.affinities);
        demand_met.push(value >= advertiser.demand);
        achieved.push(value);
    }

    Ok(FeasibilityVerdict {
        disjoint,
        first_conflict,
        partition,
        buckets_consistent,
        achieved,
        demand_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::build_exposure_index;
    use crate::model::TagId;
    use crate::testsupport::example_one;

    fn example_setup() -> (crate::model::Instance, ExposureIndex, Vec<Vec<TagId>>) {
        let instance = example_one();
        let index = build_exposure_index(
            &instance.db.records,
            &instance.catalog,
            instance.user_count(),
            100.0,
        );
        let tags = vec![vec![TagId(0)]; 3];
        (instance, index, tags)
    }

    #[test]
    fn empty_allocation_is_disjoint_with_all_demands_unmet() {
        let (instance, index, tags) = example_setup();
        let alloc = Allocation::empty(3, 5);
        let verdict = allocation_is_feasible(&alloc, &instance, &tags, &index).unwrap();
        assert!(verdict.disjoint);
        assert!(verdict.partition);
        assert!(verdict.demand_met.iter().all(|&m| !m));
        assert_eq!(verdict.satisfied_count(), 0);
    }

    #[test]
    fn strategy_two_of_the_worked_example_is_disjoint() {
        // a0 <- {s0, s4}, a1 <- {s1, s2}, a2 <- {s3}.
        let (instance, index, tags) = example_setup();
        let mut alloc = Allocation::empty(3, 5);
        alloc.assign(AdvId(0), TagId(0), SlotId(0)).unwrap();
        alloc.assign(AdvId(0), TagId(0), SlotId(4)).unwrap();
        alloc.assign(AdvId(1), TagId(0), SlotId(1)).unwrap();
        alloc.assign(AdvId(1), TagId(0), SlotId(2)).unwrap();
        alloc.assign(AdvId(2), TagId(0), SlotId(3)).unwrap();
        let verdict = allocation_is_feasible(&alloc, &instance, &tags, &index).unwrap();
        assert!(verdict.disjoint);
        assert!(verdict.partition);
        // Influences 6, 8, 6 against demands 6, 7, 8.
        assert!((verdict.achieved[0] - 6.0).abs() < 1e-9);
        assert!((verdict.achieved[1] - 8.0).abs() < 1e-9);
        assert!((verdict.achieved[2] - 6.0).abs() < 1e-9);
        assert_eq!(verdict.demand_met, vec![true, true, false]);
    }

    #[test]
    fn shared_slot_breaks_disjointness() {
        let (instance, index, tags) = example_setup();
        let mut alloc = Allocation::empty(3, 5);
        alloc.per_adv[0].slots.insert(SlotId(1));
        alloc.per_adv[1].slots.insert(SlotId(1));
        alloc.unassigned.remove(&SlotId(1));
        let verdict = allocation_is_feasible(&alloc, &instance, &tags, &index).unwrap();
        assert!(!verdict.disjoint);
        assert_eq!(
            verdict.first_conflict,
            Some((SlotId(1), AdvId(0), AdvId(1)))
        );
    }

    #[test]
    fn unknown_slot_id_is_rejected_with_the_offender() {
        let (instance, index, tags) = example_setup();
        let mut alloc = Allocation::empty(3, 5);
        alloc.per_adv[0].slots.insert(SlotId(9));
        match allocation_is_feasible(&alloc, &instance, &tags, &index) {
            Err(ModelError::UnknownSlot(s)) => assert_eq!(s, SlotId(9)),
            other => panic!("expected unknown-slot rejection, got {other:?}"),
        }
    }

    #[test]
    fn assign_moves_slot_out_of_pool() {
        let mut alloc = Allocation::empty(2, 3);
        alloc.assign(AdvId(0), TagId(0), SlotId(1)).unwrap();
        assert!(!alloc.unassigned.contains(&SlotId(1)));
        assert!(alloc.per_adv[0].slots.contains(&SlotId(1)));
        assert_eq!(alloc.per_adv[0].buckets[&TagId(0)].len(), 1);
        // Second assignment of the same slot is rejected.
        assert!(alloc.assign(AdvId(1), TagId(0), SlotId(1)).is_err());
    }

    #[test]
    fn empty_allocation_conserves_pool() {
        let alloc = Allocation::empty(3, 5);
        assert_eq!(alloc.allocated_count(), 0);
        assert_eq!(alloc.unassigned.len(), 5);
    }
}
