//! Instance and allocation serialization.
//!
//! An *instance directory* holds five CSV files plus a flat `key=value`
//! manifest:
//!
//! | file              | columns                                            |
//! |-------------------|----------------------------------------------------|
//! | `trajectories.csv`| `user_id,lat,lon,t_start,t_end`                    |
//! | `affinities.csv`  | `user_id,tag_id,prob`                              |
//! | `billboards.csv`  | `board_id,lat,lon`                                 |
//! | `slots.csv`       | `slot_id,board_id,t_start,t_end,cost,base_influence` |
//! | `advertisers.csv` | `adv_id,demand,payment,tags` (tags `;`-separated)  |
//! | `params.txt`      | `key=value` lines, sorted; `#` starts a comment    |
//!
//! `params.txt` must define `t1`, `t2`, `slot_duration`, and `tag_universe`
//! (the `;`-separated tag labels in index order); `gamma`, `seed`, `alpha`,
//! `beta` are recorded when known. Saving writes rows in index order and
//! floats in shortest round-trip form, so save -> load is identity and
//! repeated saves are byte-identical.
//!
//! Raw external data enters through [`ingest_csv`], which is lenient where
//! directory loading is strict: records are clamped to the horizon, users
//! left without usable records are dropped (with counts reported), and slots
//! are derived from the billboard list plus the horizon options.

mod alloc_text;
mod csv_io;
mod ingest;
mod manifest;

pub use alloc_text::{
    parse_allocation, render_allocation, resolve_allocation, serialize_allocation, AllocationText,
};
pub use ingest::{ingest_csv, IngestOptions, IngestPaths, IngestSummary};
pub use manifest::Manifest;

use std::path::Path;

use thiserror::Error;

use crate::model::{Instance, ModelError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: u64,
        msg: String,
    },
    #[error("{file}: missing column {column}")]
    MissingColumn { file: String, column: String },
    #[error("{file}: duplicate id {id}")]
    IdCollision { file: String, id: String },
    #[error("{file}:{line}: unknown id {id}")]
    UnknownId {
        file: String,
        line: u64,
        id: String,
    },
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("bad allocation text: {0}")]
    BadAllocationText(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Writes the five CSVs and the manifest into `dir`, creating it if needed.
pub fn save_instance(instance: &Instance, dir: &Path, manifest: &Manifest) -> Result<(), IoError> {
    std::fs::create_dir_all(dir)?;
    csv_io::write_trajectories(instance, &dir.join("trajectories.csv"))?;
    csv_io::write_affinities(instance, &dir.join("affinities.csv"))?;
    csv_io::write_billboards(instance, &dir.join("billboards.csv"))?;
    csv_io::write_slots(instance, &dir.join("slots.csv"))?;
    csv_io::write_advertisers(instance, &dir.join("advertisers.csv"))?;
    std::fs::write(dir.join("params.txt"), manifest.render())?;
    Ok(())
}

/// Loads an instance directory written by [`save_instance`]. Strict: every
/// referenced id must resolve and files must parse exactly.
pub fn load_instance(dir: &Path) -> Result<(Instance, Manifest), IoError> {
    let manifest = Manifest::parse(&std::fs::read_to_string(dir.join("params.txt"))?)?;
    let horizon = manifest.horizon()?;
    let slot_duration = manifest.slot_duration()?;
    let tag_labels = manifest.tag_universe()?;

    let (board_labels, boards) = csv_io::read_billboards(&dir.join("billboards.csv"))?;
    let (slot_labels, slots) =
        csv_io::read_slots(&dir.join("slots.csv"), &board_labels)?;
    let (user_labels, records) = csv_io::read_trajectories(&dir.join("trajectories.csv"))?;
    let affinities = csv_io::read_affinities(
        &dir.join("affinities.csv"),
        &user_labels,
        &tag_labels,
    )?;
    let book = csv_io::read_advertisers(&dir.join("advertisers.csv"), &tag_labels)?;

    Ok((
        Instance {
            horizon,
            slot_duration,
            db: crate::model::TrajectoryDb {
                user_labels,
                tag_labels,
                records,
                affinities,
            },
            catalog: crate::model::SlotCatalog {
                board_labels,
                boards,
                slot_labels,
                slots,
            },
            book,
        },
        manifest,
    ))
}
