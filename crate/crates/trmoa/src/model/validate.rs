use std::collections::BTreeSet;
use std::fmt;

use super::ids::{AdvId, SlotId, TagId, UserId};
use super::types::Instance;

/// A single data problem found by [`validate_instance`]. Violations are data,
/// not failures: the scan never mutates and never aborts early.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    HorizonInverted,
    SlotDurationInvalid,
    RecordIntervalInverted { record: usize },
    RecordOutsideHorizon { record: usize },
    RecordBadCoordinates { record: usize },
    RecordUnknownUser { record: usize },
    ProbabilityOutOfRange { user: UserId, tag: TagId, prob: f64 },
    SlotWindowInverted { slot: SlotId },
    SlotUnknownBoard { slot: SlotId },
    SlotBadEconomics { slot: SlotId },
    BoardBadCoordinates { board: usize },
    BoardTilingBroken { board: usize, detail: String },
    SlotCountMismatch { expected: usize, actual: usize },
    AdvertiserBadDemand { adv: AdvId },
    AdvertiserBadPayment { adv: AdvId },
    AdvertiserNoTags { adv: AdvId },
    AdvertiserUnknownTag { adv: AdvId, tag: TagId },
    AdvertiserDuplicateTag { adv: AdvId, tag: TagId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HorizonInverted => write!(f, "horizon t1 > t2"),
            Violation::SlotDurationInvalid => {
                write!(f, "slot duration must be positive and divide the horizon")
            }
            Violation::RecordIntervalInverted { record } => {
                write!(f, "trajectory record {record}: t1 > t2")
            }
            Violation::RecordOutsideHorizon { record } => {
                write!(f, "trajectory record {record}: interval outside horizon")
            }
            Violation::RecordBadCoordinates { record } => {
                write!(f, "trajectory record {record}: coordinates out of range")
            }
            Violation::RecordUnknownUser { record } => {
                write!(f, "trajectory record {record}: unknown user")
            }
            Violation::ProbabilityOutOfRange { user, tag, prob } => {
                write!(f, "affinity ({user}, {tag}): probability out of range: {prob}")
            }
            Violation::SlotWindowInverted { slot } => write!(f, "slot {slot}: t1 > t2"),
            Violation::SlotUnknownBoard { slot } => write!(f, "slot {slot}: unknown board"),
            Violation::SlotBadEconomics { slot } => {
                write!(f, "slot {slot}: cost or base influence negative or not finite")
            }
            Violation::BoardBadCoordinates { board } => {
                write!(f, "board {board}: coordinates out of range")
            }
            Violation::BoardTilingBroken { board, detail } => {
                write!(f, "board {board}: slot windows do not tile the horizon: {detail}")
            }
            Violation::SlotCountMismatch { expected, actual } => {
                write!(f, "slot count {actual} != boards * horizon/duration = {expected}")
            }
            Violation::AdvertiserBadDemand { adv } => {
                write!(f, "advertiser {adv}: demand must be positive and finite")
            }
            Violation::AdvertiserBadPayment { adv } => {
                write!(f, "advertiser {adv}: payment must be positive and finite")
            }
            Violation::AdvertiserNoTags { adv } => write!(f, "advertiser {adv}: empty tag list"),
            Violation::AdvertiserUnknownTag { adv, tag } => {
                write!(f, "advertiser {adv}: unknown tag {tag}")
            }
            Violation::AdvertiserDuplicateTag { adv, tag } => {
                write!(f, "advertiser {adv}: duplicate tag {tag}")
            }
        }
    }
}

/// All violations found in one pass over an instance.
#[derive(Debug, Clone, Default)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn coords_ok(lat: f64, lon: f64) -> bool {
    lat.is_finite() && lon.is_finite() && (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

/// Scans every collection of the instance for invariant violations: inverted
/// or out-of-horizon intervals, bad coordinates, probabilities outside
/// `[0, 1]`, broken per-board slot tilings, and advertiser field problems.
pub fn validate_instance(instance: &Instance) -> ValidationResult {
    let mut out = ValidationResult::default();
    let horizon = instance.horizon;
    if !horizon.is_ordered() {
        out.violations.push(Violation::HorizonInverted);
    }
    let delta = instance.slot_duration;
    let tiles = delta > 0 && horizon.is_ordered() && horizon.duration() % delta == 0;
    if !tiles {
        out.violations.push(Violation::SlotDurationInvalid);
    }

    for (i, rec) in instance.db.records.iter().enumerate() {
        if rec.user.index() >= instance.user_count() {
            out.violations.push(Violation::RecordUnknownUser { record: i });
        }
        if !rec.window.is_ordered() {
            out.violations.push(Violation::RecordIntervalInverted { record: i });
        } else if !horizon.contains(&rec.window) {
            out.violations.push(Violation::RecordOutsideHorizon { record: i });
        }
        if !coords_ok(rec.lat, rec.lon) {
            out.violations.push(Violation::RecordBadCoordinates { record: i });
        }
    }

    for entry in instance.db.affinities.entries() {
        if !(0.0..=1.0).contains(&entry.prob) || entry.prob.is_nan() {
            out.violations.push(Violation::ProbabilityOutOfRange {
                user: entry.user,
                tag: entry.tag,
                prob: entry.prob,
            });
        }
    }

    for (i, board) in instance.catalog.boards.iter().enumerate() {
        if !coords_ok(board.lat, board.lon) {
            out.violations.push(Violation::BoardBadCoordinates { board: i });
        }
    }

    let mut windows_by_board: Vec<Vec<(i64, i64)>> = vec![Vec::new(); instance.catalog.board_count()];
    for (i, slot) in instance.catalog.slots.iter().enumerate() {
        let id = SlotId(i as u32);
        if !slot.window.is_ordered() {
            out.violations.push(Violation::SlotWindowInverted { slot: id });
        }
        if slot.board.index() >= instance.catalog.board_count() {
            out.violations.push(Violation::SlotUnknownBoard { slot: id });
        } else {
            windows_by_board[slot.board.index()].push((slot.window.start, slot.window.end));
        }
        let econ_ok = slot.cost.is_finite()
            && slot.cost >= 0.0
            && slot.base_influence.is_finite()
            && slot.base_influence >= 0.0;
        if !econ_ok {
            out.violations.push(Violation::SlotBadEconomics { slot: id });
        }
    }

    if tiles {
        let per_board = (horizon.duration() / delta) as usize;
        let expected = instance.catalog.board_count() * per_board;
        if instance.catalog.slot_count() != expected {
            out.violations.push(Violation::SlotCountMismatch {
                expected,
                actual: instance.catalog.slot_count(),
            });
        }
        for (b, windows) in windows_by_board.iter_mut().enumerate() {
            windows.sort_unstable();
            let mut detail = None;
            if windows.len() != per_board {
                detail = Some(format!("{} windows, expected {per_board}", windows.len()));
            } else {
                let mut cursor = horizon.start;
                for &(s, e) in windows.iter() {
                    if s != cursor || e != s + delta {
                        detail = Some(format!("window [{s}, {e}] breaks the tiling at {cursor}"));
                        break;
                    }
                    cursor = e;
                }
                if detail.is_none() && cursor != horizon.end {
                    detail = Some(format!("tiling stops at {cursor}, horizon ends at {}", horizon.end));
                }
            }
            if let Some(detail) = detail {
                out.violations.push(Violation::BoardTilingBroken { board: b, detail });
            }
        }
    }

    for (i, adv) in instance.book.advertisers.iter().enumerate() {
        let id = AdvId(i as u32);
        if !(adv.demand.is_finite() && adv.demand > 0.0) {
            out.violations.push(Violation::AdvertiserBadDemand { adv: id });
        }
        if !(adv.payment.is_finite() && adv.payment > 0.0) {
            out.violations.push(Violation::AdvertiserBadPayment { adv: id });
        }
        if adv.tags.is_empty() {
            out.violations.push(Violation::AdvertiserNoTags { adv: id });
        }
        let mut seen = BTreeSet::new();
        for &tag in &adv.tags {
            if tag.index() >= instance.tag_count() {
                out.violations.push(Violation::AdvertiserUnknownTag { adv: id, tag });
            }
            if !seen.insert(tag) {
                out.violations.push(Violation::AdvertiserDuplicateTag { adv: id, tag });
            }
        }
    }

    out
}
