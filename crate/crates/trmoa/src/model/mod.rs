//! Instance data model: trajectories, tag affinities, the slot catalog,
//! the advertiser book, allocations, and validation.
//!
//! All types here are plain immutable data once constructed. Entities are
//! referred to by dense index newtypes ([`UserId`], [`TagId`], [`BoardId`],
//! [`SlotId`], [`AdvId`]); the original string identifiers from the input
//! files are kept as label tables on the owning collection so instances
//! round-trip through serialization unchanged.

mod allocation;
mod ids;
mod time;
mod types;
mod validate;

pub use allocation::{allocation_is_feasible, AdvAllocation, Allocation, FeasibilityVerdict};
pub use ids::{AdvId, BoardId, SlotId, TagId, UserId};
pub use time::TimeWindow;
pub use types::{
    Advertiser, AdvertiserBook, AffinityTable, BillboardSlot, Board, Instance, SlotCatalog,
    TagAffinity, TrajectoryDb, TrajectoryRecord,
};
pub use validate::{validate_instance, ValidationResult, Violation};

use thiserror::Error;

/// Errors raised when referencing entities that do not exist in an instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown slot id {0:?}")]
    UnknownSlot(SlotId),
    #[error("unknown advertiser id {0:?}")]
    UnknownAdvertiser(AdvId),
    #[error("duplicate affinity entry for user {user:?}, tag {tag:?}")]
    DuplicateAffinity { user: UserId, tag: TagId },
    #[error("advertiser demand must be positive, got {0}")]
    NonPositiveDemand(f64),
}
