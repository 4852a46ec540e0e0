//! Regret-minimizing allocation of billboard slots to advertisers with
//! tag-specific influence demands.
//!
//! An influence provider owns a catalog of billboard slots (a board crossed
//! with a fixed-length time window). Advertisers arrive with an influence
//! demand, a payment, and a list of content tags. Delivering less influence
//! than demanded forfeits part of the payment (*unsatisfied regret*);
//! delivering more wastes inventory that could have served someone else
//! (*excessive regret*). The provider's objective is to pick disjoint slot
//! sets per advertiser that minimize the total of both losses.
//!
//! Influence is a coverage-style function over a trajectory database: a slot
//! exposes the users that pass close to its board while the slot is live, and
//! an exposed user is influenced with a probability that depends on the tags
//! in play. See [`influence`] for the model and [`regret`] for the loss.
//!
//! The crate provides:
//!
//! * [`model`] — instance data types, validation, allocations, feasibility.
//! * [`influence`] — exposure index and incremental coverage evaluation.
//! * [`regret`] — the two-sided regret function and report aggregation.
//! * [`tags`] — adaptive greedy tag-subset selection.
//! * [`solver`] — the BG / RG / RLS / Random allocators plus an exact
//!   enumerator usable on micro instances.
//! * [`gen`] — seeded synthetic instance generation.
//! * [`io`] — CSV ingestion, instance directories, canonical allocation text.
//! * [`sweep`] — parameter-grid experiment harness emitting plot-ready CSV.
//!
//! # Example
//!
//! Generate a small instance, solve it with the round-robin greedy
//! allocator, and inspect the regret breakdown:
//!
//! ```
//! use trmoa::gen::{generate_instance, GeneratorParams};
//! use trmoa::solver::{solve, Algorithm, SolverConfig};
//!
//! let mut params = GeneratorParams::default();
//! params.alpha = 0.8;
//! params.beta = 0.2;             // 0.8 / 0.2 = 4 advertisers
//! params.user_count = 120;
//! params.board_count = 8;
//! params.tag_universe = 12;
//! params.tag_count_range = (3, 8);
//! params.t2 = 7_200;             // 8 slots per board at the default duration
//! params.seed = 7;
//!
//! let instance = generate_instance(&params).unwrap();
//! let config = SolverConfig::new(Algorithm::Bg, 42);
//! let outcome = solve(&instance, &config).unwrap();
//!
//! assert_eq!(outcome.report.per_advertiser.len(), 4);
//! assert!(outcome.report.total >= 0.0);
//! ```

pub mod geo;
pub mod influence;
pub mod io;
pub mod model;
pub mod regret;
pub mod solver;
pub mod sweep;
pub mod tags;

pub mod gen;

#[cfg(test)]
pub(crate) mod testsupport;

pub use model::{Allocation, Instance};
pub use regret::{RegretParams, RegretReport};
pub use solver::{Algorithm, SolveOutcome, SolverConfig};
