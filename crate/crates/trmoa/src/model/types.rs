use super::ids::{AdvId, BoardId, SlotId, TagId, UserId};
use super::time::TimeWindow;
use super::ModelError;

/// One visit of one user: a location occupied during a closed time interval.
///
/// Group tuples from raw data are flattened to one record per individual
/// user at ingestion, since influence sums over individual users.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub user: UserId,
    pub lat: f64,
    pub lon: f64,
    pub window: TimeWindow,
}

/// Probability that a given tag's content influences a given user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TagAffinity {
    pub user: UserId,
    pub tag: TagId,
    pub prob: f64,
}

/// Sparse (user, tag) -> probability table with both orientations indexed.
///
/// An absent pair means probability 0: such a tag contributes a factor of 1
/// to the non-influence product, i.e. no influence at all.
#[derive(Debug, Clone, Default)]
pub struct AffinityTable {
    /// Per user, sorted by tag id.
    by_user: Vec<Vec<(TagId, f64)>>,
    /// Per tag, sorted by user id.
    by_tag: Vec<Vec<(UserId, f64)>>,
}

impl AffinityTable {
    /// Builds the table, rejecting duplicate (user, tag) pairs.
    pub fn new(
        user_count: usize,
        tag_count: usize,
        entries: &[TagAffinity],
    ) -> Result<Self, ModelError> {
        let mut by_user = vec![Vec::new(); user_count];
        let mut by_tag = vec![Vec::new(); tag_count];
        for e in entries {
            by_user[e.user.index()].push((e.tag, e.prob));
            by_tag[e.tag.index()].push((e.user, e.prob));
        }
        for (u, row) in by_user.iter_mut().enumerate() {
            row.sort_by_key(|(t, _)| *t);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(ModelError::DuplicateAffinity {
                    user: UserId(u as u32),
                    tag: w[0].0,
                });
            }
        }
        for row in by_tag.iter_mut() {
            row.sort_by_key(|(u, _)| *u);
        }
        Ok(AffinityTable { by_user, by_tag })
    }

    /// Pr(u | x); 0 when the pair is absent.
    #[inline]
    pub fn prob(&self, user: UserId, tag: TagId) -> f64 {
        let row = &self.by_user[user.index()];
        match row.binary_search_by_key(&tag, |(t, _)| *t) {
            Ok(i) => row[i].1,
            Err(_) => 0.0,
        }
    }

    /// All (tag, prob) pairs of one user, sorted by tag.
    #[inline]
    pub fn tags_of_user(&self, user: UserId) -> &[(TagId, f64)] {
        &self.by_user[user.index()]
    }

    /// All (user, prob) pairs of one tag, sorted by user.
    #[inline]
    pub fn users_of_tag(&self, tag: TagId) -> &[(UserId, f64)] {
        &self.by_tag[tag.index()]
    }

    pub fn entries(&self) -> impl Iterator<Item = TagAffinity> + '_ {
        self.by_user.iter().enumerate().flat_map(|(u, row)| {
            row.iter().map(move |&(tag, prob)| TagAffinity {
                user: UserId(u as u32),
                tag,
                prob,
            })
        })
    }

    pub fn len(&self) -> usize {
        self.by_user.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_user.iter().all(Vec::is_empty)
    }

    pub fn user_count(&self) -> usize {
        self.by_user.len()
    }

    pub fn tag_count(&self) -> usize {
        self.by_tag.len()
    }
}

/// Users, their timed location visits, and their tag affinities.
#[derive(Debug, Clone)]
pub struct TrajectoryDb {
    pub user_labels: Vec<String>,
    pub tag_labels: Vec<String>,
    pub records: Vec<TrajectoryRecord>,
    pub affinities: AffinityTable,
}

impl TrajectoryDb {
    pub fn user_count(&self) -> usize {
        self.user_labels.len()
    }

    pub fn tag_count(&self) -> usize {
        self.tag_labels.len()
    }
}

/// A physical billboard location.
#[derive(Debug, Clone, PartialEq)]
pub struct Board {
    pub lat: f64,
    pub lon: f64,
}

/// One allocatable unit: a board crossed with a fixed-length time window.
///
/// `base_influence` caches the slot's stand-alone influence over the full tag
/// universe; it feeds the supply total and the cost model.
#[derive(Debug, Clone, PartialEq)]
pub struct BillboardSlot {
    pub board: BoardId,
    pub window: TimeWindow,
    pub cost: f64,
    pub base_influence: f64,
}

/// All boards and their slots. Slots are laid out board-major: the slots of
/// one board tile the horizon in contiguous windows of the slot duration.
#[derive(Debug, Clone, Default)]
pub struct SlotCatalog {
    pub board_labels: Vec<String>,
    pub boards: Vec<Board>,
    pub slot_labels: Vec<String>,
    pub slots: Vec<BillboardSlot>,
}

impl SlotCatalog {
    /// Tiles the horizon into `duration / slot_duration` windows per board.
    /// Costs and base influences start at zero and are filled in once an
    /// exposure index exists (see the generator and ingestion paths).
    pub fn tile(
        board_labels: Vec<String>,
        boards: Vec<Board>,
        horizon: TimeWindow,
        slot_duration: i64,
    ) -> Self {
        assert!(slot_duration > 0, "slot duration must be positive");
        assert_eq!(
            horizon.duration() % slot_duration,
            0,
            "slot duration must divide the horizon"
        );
        let per_board = (horizon.duration() / slot_duration) as usize;
        let mut slot_labels = Vec::with_capacity(boards.len() * per_board);
        let mut slots = Vec::with_capacity(boards.len() * per_board);
        for b in 0..boards.len() {
            for j in 0..per_board {
                let start = horizon.start + j as i64 * slot_duration;
                slot_labels.push(format!("s{}", slots.len()));
                slots.push(BillboardSlot {
                    board: BoardId(b as u32),
                    window: TimeWindow::new(start, start + slot_duration),
                    cost: 0.0,
                    base_influence: 0.0,
                });
            }
        }
        SlotCatalog {
            board_labels,
            boards,
            slot_labels,
            slots,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn board_count(&self) -> usize {
        self.boards.len()
    }

    /// Total influence supply: the sum of every slot's base influence.
    pub fn supply(&self) -> f64 {
        self.slots.iter().map(|s| s.base_influence).sum()
    }

    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> {
        (0..self.slots.len() as u32).map(SlotId)
    }
}

/// A campaign request: how much influence is wanted, what it pays, and which
/// content tags the campaign may use.
#[derive(Debug, Clone, PartialEq)]
pub struct Advertiser {
    pub demand: f64,
    pub payment: f64,
    pub tags: Vec<TagId>,
}

impl Advertiser {
    /// Payment per unit of demanded influence; the solvers serve advertisers
    /// in descending order of this ratio.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.payment / self.demand
    }
}

/// The advertiser database.
#[derive(Debug, Clone, Default)]
pub struct AdvertiserBook {
    pub labels: Vec<String>,
    pub advertisers: Vec<Advertiser>,
}

impl AdvertiserBook {
    pub fn len(&self) -> usize {
        self.advertisers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.advertisers.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AdvId> {
        (0..self.advertisers.len() as u32).map(AdvId)
    }
}

/// A complete problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub horizon: TimeWindow,
    pub slot_duration: i64,
    pub db: TrajectoryDb,
    pub catalog: SlotCatalog,
    pub book: AdvertiserBook,
}

impl Instance {
    pub fn user_count(&self) -> usize {
        self.db.user_count()
    }

    pub fn tag_count(&self) -> usize {
        self.db.tag_count()
    }

    pub fn slot_count(&self) -> usize {
        self.catalog.slot_count()
    }

    pub fn advertiser_count(&self) -> usize {
        self.book.len()
    }
}
