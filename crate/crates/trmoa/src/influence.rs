//! The coverage influence model.
//!
//! A slot *exposes* a user when one of the user's trajectory records lies
//! within `gamma` meters of the slot's board and its time interval overlaps
//! the slot's window (closed intervals). An exposed user is influenced by a
//! slot with the tag-dependent probability
//!
//! ```text
//! Pr(u, b | T') = 1 - prod_{x in T'} (1 - Pr(u | x))      if u exposed to b
//!              = 0                                         otherwise
//! ```
//!
//! and the influence of a slot set is the expected number of influenced
//! users under independent per-slot trials:
//!
//! ```text
//! I(S | T') = sum_u [ 1 - prod_{b in S} (1 - Pr(u, b | T')) ]
//! ```
//!
//! The function is non-negative, monotone, and submodular in `S`.
//! [`InfluenceAccumulator`] maintains the per-user survival products so a
//! slot's marginal gain costs `O(|exposure(slot)|)`.

use crate::geo::{haversine_m, GeoGrid};
use crate::model::{AffinityTable, SlotCatalog, SlotId, TagId, TrajectoryRecord, UserId};

/// Per-slot exposed-user sets, fixed for a given (trajectories, slots, gamma).
#[derive(Debug, Clone)]
pub struct ExposureIndex {
    exposure: Vec<Vec<UserId>>,
    user_count: usize,
    gamma: f64,
}

/// Builds the exposure sets with a grid pre-filter over board locations and
/// an exact haversine + closed-interval-overlap test per candidate.
///
/// The result does not depend on the order of the trajectory records.
pub fn build_exposure_index(
    records: &[TrajectoryRecord],
    catalog: &SlotCatalog,
    user_count: usize,
    gamma: f64,
) -> ExposureIndex {
    assert!(gamma > 0.0, "gamma must be positive");
    let mut exposure: Vec<Vec<UserId>> = vec![Vec::new(); catalog.slot_count()];
    if !catalog.boards.is_empty() {
        let points: Vec<(f64, f64)> = catalog.boards.iter().map(|b| (b.lat, b.lon)).collect();
        let grid = GeoGrid::build(&points, gamma);
        let mut slots_of_board: Vec<Vec<SlotId>> = vec![Vec::new(); catalog.boards.len()];
        for (i, slot) in catalog.slots.iter().enumerate() {
            slots_of_board[slot.board.index()].push(SlotId(i as u32));
        }
        for rec in records {
            for b in grid.candidates(rec.lat, rec.lon) {
                let board = &catalog.boards[b as usize];
                if haversine_m(rec.lat, rec.lon, board.lat, board.lon) > gamma {
                    continue;
                }
                for &s in &slots_of_board[b as usize] {
                    if catalog.slots[s.index()].window.overlaps(&rec.window) {
                        exposure[s.index()].push(rec.user);
                    }
                }
            }
        }
        for users in &mut exposure {
            users.sort_unstable();
            users.dedup();
        }
    }
    ExposureIndex {
        exposure,
        user_count,
        gamma,
    }
}

impl ExposureIndex {
    /// Users exposed to `slot`, sorted and deduplicated.
    #[inline]
    pub fn exposed(&self, slot: SlotId) -> &[UserId] {
        &self.exposure[slot.index()]
    }

    pub fn user_count(&self) -> usize {
        self.user_count
    }

    pub fn slot_count(&self) -> usize {
        self.exposure.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Probability that at least one tag in `tag_set` influences `user`:
/// `1 - prod_{x in tag_set} (1 - Pr(u | x))`. Empty set gives 0.
pub fn tag_prob(affinities: &AffinityTable, user: UserId, tag_set: &[TagId]) -> f64 {
    let mut survival = 1.0;
    for &t in tag_set {
        survival *= 1.0 - affinities.prob(user, t);
    }
    1.0 - survival
}

/// Tag-specific influence probability for every user at once, computed via
/// the tag-to-user index.
pub fn tag_probs(affinities: &AffinityTable, user_count: usize, tag_set: &[TagId]) -> Vec<f64> {
    let mut survival = vec![1.0_f64; user_count];
    for &t in tag_set {
        for &(u, p) in affinities.users_of_tag(t) {
            survival[u.index()] *= 1.0 - p;
        }
    }
    survival.into_iter().map(|s| 1.0 - s).collect()
}

/// Incremental evaluator of `I(S | T')` for a growing slot set under a fixed
/// tag context. Holds one survival product per user; a slot's marginal gain
/// reads only the slot's exposed users.
#[derive(Debug, Clone)]
pub struct InfluenceAccumulator {
    tag_probs: Vec<f64>,
    survival: Vec<f64>,
    total: f64,
}

/// Saved state for reverting one [`InfluenceAccumulator::commit_undoable`].
#[derive(Debug)]
pub struct UndoToken {
    changed: Vec<(UserId, f64)>,
    old_total: f64,
}

impl InfluenceAccumulator {
    /// Starts at the empty slot set for the given tag context.
    pub fn new(index: &ExposureIndex, affinities: &AffinityTable, tag_set: &[TagId]) -> Self {
        let tag_probs = tag_probs(affinities, index.user_count(), tag_set);
        InfluenceAccumulator {
            survival: vec![1.0; tag_probs.len()],
            tag_probs,
            total: 0.0,
        }
    }

    /// Current `I(S | T')`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `I(S ∪ {slot} | T') - I(S | T')` without changing state.
    pub fn marginal_gain(&self, index: &ExposureIndex, slot: SlotId) -> f64 {
        let mut gain = 0.0;
        for &u in index.exposed(slot) {
            gain += self.survival[u.index()] * self.tag_probs[u.index()];
        }
        gain
    }

    /// Adds `slot` to the set, updating per-user survival products.
    pub fn commit(&mut self, index: &ExposureIndex, slot: SlotId) {
        for &u in index.exposed(slot) {
            let i = u.index();
            let delta = self.survival[i] * self.tag_probs[i];
            self.total += delta;
            self.survival[i] -= delta;
        }
    }

    /// Like [`commit`](Self::commit) but returns a token that restores the
    /// previous state bit-exactly through [`undo`](Self::undo).
    pub fn commit_undoable(&mut self, index: &ExposureIndex, slot: SlotId) -> UndoToken {
        let old_total = self.total;
        let mut changed = Vec::with_capacity(index.exposed(slot).len());
        for &u in index.exposed(slot) {
            let i = u.index();
            changed.push((u, self.survival[i]));
            let delta = self.survival[i] * self.tag_probs[i];
            self.total += delta;
            self.survival[i] -= delta;
        }
        UndoToken { changed, old_total }
    }

    pub fn undo(&mut self, token: UndoToken) {
        for (u, old) in token.changed {
            self.survival[u.index()] = old;
        }
        self.total = token.old_total;
    }

    /// Tag-context influence probability of one user.
    #[inline]
    pub fn user_tag_prob(&self, user: UserId) -> f64 {
        self.tag_probs[user.index()]
    }
}

/// `I(S | T')` from scratch. Slots are committed in the order given; pass a
/// canonically ordered set when reproducibility of the rounding matters.
pub fn influence(
    slots: impl IntoIterator<Item = SlotId>,
    tag_set: &[TagId],
    index: &ExposureIndex,
    affinities: &AffinityTable,
) -> f64 {
    let mut acc = InfluenceAccumulator::new(index, affinities, tag_set);
    for s in slots {
        acc.commit(index, s);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Board, TagAffinity, TimeWindow};

    fn record(user: u32, lat: f64, lon: f64, t1: i64, t2: i64) -> TrajectoryRecord {
        TrajectoryRecord {
            user: UserId(user),
            lat,
            lon,
            window: TimeWindow::new(t1, t2),
        }
    }

    /// One board at the origin-ish point with two slots [0,100] and [100,200].
    fn small_catalog() -> SlotCatalog {
        SlotCatalog::tile(
            vec!["b0".into()],
            vec![Board {
                lat: 40.75,
                lon: -73.98,
            }],
            TimeWindow::new(0, 200),
            100,
        )
    }

    #[test]
    fn exposure_same_location_overlapping_interval() {
        let catalog = small_catalog();
        let recs = vec![record(0, 40.75, -73.98, 10, 20)];
        let idx = build_exposure_index(&recs, &catalog, 1, 100.0);
        assert_eq!(idx.exposed(SlotId(0)), &[UserId(0)]);
    }

    #[test]
    fn exposure_ten_km_away_is_empty() {
        let catalog = small_catalog();
        // ~10km north of the board.
        let recs = vec![record(0, 40.84, -73.98, 10, 20)];
        let idx = build_exposure_index(&recs, &catalog, 1, 100.0);
        assert!(idx.exposed(SlotId(0)).is_empty());
        assert!(idx.exposed(SlotId(1)).is_empty());
    }

    #[test]
    fn exposure_requires_time_overlap() {
        let catalog = small_catalog();
        // Within 50m of the board but entirely inside the second window.
        let recs = vec![record(0, 40.7503, -73.98, 150, 180)];
        let idx = build_exposure_index(&recs, &catalog, 1, 100.0);
        assert!(idx.exposed(SlotId(0)).is_empty());
        assert_eq!(idx.exposed(SlotId(1)), &[UserId(0)]);
    }

    #[test]
    fn exposure_is_order_independent() {
        let catalog = small_catalog();
        let mut recs = vec![
            record(1, 40.75, -73.98, 0, 50),
            record(0, 40.75, -73.98, 10, 20),
            record(0, 40.75, -73.98, 120, 130),
        ];
        let a = build_exposure_index(&recs, &catalog, 2, 100.0);
        recs.reverse();
        let b = build_exposure_index(&recs, &catalog, 2, 100.0);
        for s in 0..2 {
            assert_eq!(a.exposed(SlotId(s)), b.exposed(SlotId(s)));
        }
    }

    fn affinities(user_count: usize, tag_count: usize, entries: &[(u32, u32, f64)]) -> AffinityTable {
        let entries: Vec<TagAffinity> = entries
            .iter()
            .map(|&(u, t, p)| TagAffinity {
                user: UserId(u),
                tag: TagId(t),
                prob: p,
            })
            .collect();
        AffinityTable::new(user_count, tag_count, &entries).unwrap()
    }

    #[test]
    fn tag_prob_single_factor() {
        let table = affinities(1, 1, &[(0, 0, 0.2)]);
        let p = tag_prob(&table, UserId(0), &[TagId(0)]);
        assert!((p - 0.2).abs() < 1e-12, "got {p}");
    }

    #[test]
    fn tag_prob_two_factors() {
        let table = affinities(1, 2, &[(0, 0, 0.2), (0, 1, 0.5)]);
        let p = tag_prob(&table, UserId(0), &[TagId(0), TagId(1)]);
        assert!((p - 0.6).abs() < 1e-12, "got {p}");
    }

    #[test]
    fn tag_prob_empty_set_is_zero() {
        let table = affinities(1, 1, &[(0, 0, 0.9)]);
        assert_eq!(tag_prob(&table, UserId(0), &[]), 0.0);
    }

    #[test]
    fn tag_probs_matches_per_user_form() {
        let table = affinities(3, 2, &[(0, 0, 0.2), (0, 1, 0.5), (2, 1, 0.7)]);
        let set = [TagId(0), TagId(1)];
        let all = tag_probs(&table, 3, &set);
        for u in 0..3 {
            assert!((all[u] - tag_prob(&table, UserId(u as u32), &set)).abs() < 1e-15);
        }
    }

    /// Index with explicit exposure sets, bypassing geometry.
    fn fixed_index(exposure: Vec<Vec<u32>>, user_count: usize) -> ExposureIndex {
        ExposureIndex {
            exposure: exposure
                .into_iter()
                .map(|v| v.into_iter().map(UserId).collect())
                .collect(),
            user_count,
            gamma: 100.0,
        }
    }

    #[test]
    fn influence_of_empty_set_is_zero() {
        let idx = fixed_index(vec![vec![0], vec![0]], 1);
        let table = affinities(1, 1, &[(0, 0, 0.5)]);
        assert_eq!(influence([], &[TagId(0)], &idx, &table), 0.0);
    }

    #[test]
    fn influence_one_user_two_slots_compounds() {
        let idx = fixed_index(vec![vec![0], vec![0]], 1);
        let table = affinities(1, 1, &[(0, 0, 0.5)]);
        let v = influence([SlotId(0), SlotId(1)], &[TagId(0)], &idx, &table);
        assert!((v - 0.75).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn influence_sums_over_users() {
        let idx = fixed_index(vec![vec![0], vec![1]], 2);
        let table = affinities(2, 1, &[(0, 0, 0.3), (1, 0, 0.4)]);
        let v = influence([SlotId(0), SlotId(1)], &[TagId(0)], &idx, &table);
        assert!((v - 0.7).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn marginal_gain_empty_exposure_is_zero() {
        let idx = fixed_index(vec![vec![], vec![0]], 1);
        let table = affinities(1, 1, &[(0, 0, 0.5)]);
        let acc = InfluenceAccumulator::new(&idx, &table, &[TagId(0)]);
        assert_eq!(acc.marginal_gain(&idx, SlotId(0)), 0.0);
    }

    #[test]
    fn first_marginal_gain_equals_singleton_influence() {
        let idx = fixed_index(vec![vec![0, 2], vec![1]], 3);
        let table = affinities(3, 1, &[(0, 0, 0.3), (1, 0, 0.4), (2, 0, 0.9)]);
        let acc = InfluenceAccumulator::new(&idx, &table, &[TagId(0)]);
        let single = influence([SlotId(0)], &[TagId(0)], &idx, &table);
        assert_eq!(acc.marginal_gain(&idx, SlotId(0)), single);
    }

    #[test]
    fn marginal_gain_agrees_with_recompute_on_randomized_trials() {
        // Independent oracle: recompute I(S u {s}) - I(S) from scratch.
        let mut state = 12345_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let users = 1 + (next() * 8.0) as usize;
            let slots = 1 + (next() * 6.0) as usize;
            let tags = 1 + (next() * 3.0) as usize;
            let exposure: Vec<Vec<u32>> = (0..slots)
                .map(|_| (0..users as u32).filter(|_| next() < 0.5).collect())
                .collect();
            let mut entries = Vec::new();
            for u in 0..users as u32 {
                for t in 0..tags as u32 {
                    if next() < 0.7 {
                        entries.push((u, t, next() * 0.95));
                    }
                }
            }
            let table = affinities(users, tags, &entries);
            let idx = fixed_index(exposure, users);
            let tag_set: Vec<TagId> = (0..tags as u32).map(TagId).collect();

            let mut acc = InfluenceAccumulator::new(&idx, &table, &tag_set);
            let mut committed: Vec<SlotId> = Vec::new();
            for s in 0..slots as u32 {
                let slot = SlotId(s);
                if next() < 0.5 {
                    let gain = acc.marginal_gain(&idx, slot);
                    let before = influence(committed.iter().copied(), &tag_set, &idx, &table);
                    let after = influence(
                        committed.iter().copied().chain([slot]),
                        &tag_set,
                        &idx,
                        &table,
                    );
                    assert!(
                        (gain - (after - before)).abs() < 1e-9,
                        "gain {gain} vs {}",
                        after - before
                    );
                    acc.commit(&idx, slot);
                    committed.push(slot);
                }
            }
        }
    }

    #[test]
    fn undo_restores_state_bit_exactly() {
        let idx = fixed_index(vec![vec![0, 1], vec![1, 2]], 3);
        let table = affinities(3, 1, &[(0, 0, 0.3), (1, 0, 0.6), (2, 0, 0.9)]);
        let mut acc = InfluenceAccumulator::new(&idx, &table, &[TagId(0)]);
        acc.commit(&idx, SlotId(0));
        let snapshot = acc.clone();
        let token = acc.commit_undoable(&idx, SlotId(1));
        acc.undo(token);
        assert_eq!(acc.total().to_bits(), snapshot.total().to_bits());
        for u in 0..3 {
            assert_eq!(
                acc.survival[u].to_bits(),
                snapshot.survival[u].to_bits()
            );
        }
    }
}
