//! Lenient assembly of an instance from raw external CSV files.

use std::collections::HashMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::influence::{build_exposure_index, tag_probs};
use crate::model::{
    AdvertiserBook, AffinityTable, Instance, SlotCatalog, TagAffinity, TagId, TimeWindow,
    TrajectoryDb, TrajectoryRecord, UserId,
};

use super::csv_io::CsvTable;
use super::IoError;

#[derive(Debug, Clone)]
pub struct IngestPaths {
    pub trajectories: PathBuf,
    pub affinities: PathBuf,
    pub billboards: PathBuf,
    pub advertisers: PathBuf,
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub t1: i64,
    pub t2: i64,
    pub slot_duration: i64,
    /// Exposure distance used to price slots.
    pub gamma: f64,
    /// Seed for the cost fluctuation draws.
    pub seed: u64,
}

/// What the lenient pass dropped or clamped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    /// Records discarded because they lie entirely outside the horizon.
    pub dropped_records: usize,
    /// Records whose interval was clamped to the horizon.
    pub clamped_records: usize,
    /// Users left without any usable record.
    pub dropped_users: usize,
    /// Affinity rows referencing dropped or unknown users.
    pub dropped_affinities: usize,
}

/// Reads the four raw CSVs, derives slots by tiling the horizon over the
/// billboard list, prices them like the generator does, and reports what the
/// lenient cleanup dropped. Malformed rows are hard errors with their line
/// number; duplicate board or advertiser ids are collisions.
pub fn ingest_csv(
    paths: &IngestPaths,
    options: &IngestOptions,
) -> Result<(Instance, IngestSummary), IoError> {
    if options.t2 <= options.t1 || options.slot_duration <= 0 {
        return Err(IoError::BadManifest(
            "horizon must be non-empty and slot duration positive".into(),
        ));
    }
    if (options.t2 - options.t1) % options.slot_duration != 0 {
        return Err(IoError::BadManifest(format!(
            "slot duration {} does not divide horizon {}..{}",
            options.slot_duration, options.t1, options.t2
        )));
    }
    let horizon = TimeWindow::new(options.t1, options.t2);
    let mut summary = IngestSummary::default();

    // Trajectories: intern users in order of first appearance, clamp or drop
    // rows against the horizon.
    let table = CsvTable::open(&paths.trajectories)?;
    let user_col = table.column("user_id")?;
    let lat_col = table.column("lat")?;
    let lon_col = table.column("lon")?;
    let start_col = table.column("t_start")?;
    let end_col = table.column("t_end")?;
    let mut user_labels: Vec<String> = Vec::new();
    let mut user_index: HashMap<String, u32> = HashMap::new();
    let mut records: Vec<TrajectoryRecord> = Vec::new();
    for (line, row) in table.rows() {
        let start: i64 = table.parse(*line, row, start_col, "t_start")?;
        let end: i64 = table.parse(*line, row, end_col, "t_end")?;
        let lat: f64 = table.parse(*line, row, lat_col, "lat")?;
        let lon: f64 = table.parse(*line, row, lon_col, "lon")?;
        let label = &row[user_col];
        let user = *user_index.entry(label.clone()).or_insert_with(|| {
            user_labels.push(label.clone());
            (user_labels.len() - 1) as u32
        });
        let window = TimeWindow::new(start, end);
        if !window.is_ordered() || !window.overlaps(&horizon) {
            summary.dropped_records += 1;
            continue;
        }
        let clamped = TimeWindow::new(start.max(horizon.start), end.min(horizon.end));
        if clamped != window {
            summary.clamped_records += 1;
        }
        records.push(TrajectoryRecord {
            user: UserId(user),
            lat,
            lon,
            window: clamped,
        });
    }

    // Drop users that ended up with no records (they can never be exposed).
    let mut used = vec![false; user_labels.len()];
    for rec in &records {
        used[rec.user.index()] = true;
    }
    summary.dropped_users = used.iter().filter(|&&u| !u).count();
    if summary.dropped_users > 0 {
        let mut remap: Vec<Option<u32>> = vec![None; user_labels.len()];
        let mut kept_labels = Vec::with_capacity(user_labels.len());
        for (i, label) in user_labels.into_iter().enumerate() {
            if used[i] {
                remap[i] = Some(kept_labels.len() as u32);
                kept_labels.push(label);
            }
        }
        user_labels = kept_labels;
        user_index = user_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        for rec in &mut records {
            rec.user = UserId(remap[rec.user.index()].expect("kept users have records"));
        }
    }

    // Affinities: tags interned in appearance order; rows for unknown or
    // dropped users are themselves dropped.
    let table = CsvTable::open(&paths.affinities)?;
    let a_user_col = table.column("user_id")?;
    let a_tag_col = table.column("tag_id")?;
    let prob_col = table.column("prob")?;
    let mut tag_labels: Vec<String> = Vec::new();
    let mut tag_index: HashMap<String, u32> = HashMap::new();
    let mut entries: Vec<TagAffinity> = Vec::new();
    for (line, row) in table.rows() {
        let prob: f64 = table.parse(*line, row, prob_col, "prob")?;
        let Some(&user) = user_index.get(row[a_user_col].as_str()) else {
            summary.dropped_affinities += 1;
            continue;
        };
        let tag_label = &row[a_tag_col];
        let tag = *tag_index.entry(tag_label.clone()).or_insert_with(|| {
            tag_labels.push(tag_label.clone());
            (tag_labels.len() - 1) as u32
        });
        entries.push(TagAffinity {
            user: UserId(user),
            tag: TagId(tag),
            prob,
        });
    }

    // Boards and derived slots.
    let (board_labels, boards) = super::csv_io::read_billboards(&paths.billboards)?;
    let mut catalog = SlotCatalog::tile(board_labels, boards, horizon, options.slot_duration);

    // Advertisers may cite tags absent from the affinity data; intern those
    // too (they simply never influence anyone).
    let table = CsvTable::open(&paths.advertisers)?;
    let id_col = table.column("adv_id")?;
    let demand_col = table.column("demand")?;
    let payment_col = table.column("payment")?;
    let tags_col = table.column("tags")?;
    let mut adv_labels: Vec<String> = Vec::new();
    let mut advertisers = Vec::new();
    for (line, row) in table.rows() {
        if adv_labels.contains(&row[id_col]) {
            return Err(IoError::IdCollision {
                file: table.file().to_string(),
                id: row[id_col].clone(),
            });
        }
        let mut adv_tags = Vec::new();
        for part in row[tags_col].split(';').filter(|p| !p.is_empty()) {
            let tag = *tag_index.entry(part.to_string()).or_insert_with(|| {
                tag_labels.push(part.to_string());
                (tag_labels.len() - 1) as u32
            });
            adv_tags.push(TagId(tag));
        }
        adv_labels.push(row[id_col].clone());
        advertisers.push(crate::model::Advertiser {
            demand: table.parse(*line, row, demand_col, "demand")?,
            payment: table.parse(*line, row, payment_col, "payment")?,
            tags: adv_tags,
        });
    }

    let affinities = AffinityTable::new(user_labels.len(), tag_labels.len(), &entries)?;

    // Price slots exactly like the generator: base influence over the full
    // tag universe, cost = floor(tau * influence / 10) with tau ~ U[0.9, 1.1].
    let index = build_exposure_index(&records, &catalog, user_labels.len(), options.gamma);
    let universe: Vec<TagId> = (0..tag_labels.len() as u32).map(TagId).collect();
    let tp_full = tag_probs(&affinities, user_labels.len(), &universe);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for (i, slot) in catalog.slots.iter_mut().enumerate() {
        let influence: f64 = index
            .exposed(crate::model::SlotId(i as u32))
            .iter()
            .map(|u| tp_full[u.index()])
            .sum();
        slot.base_influence = influence;
        let tau: f64 = rng.gen_range(0.9..1.1);
        slot.cost = (tau * influence / 10.0).floor();
    }

    Ok((
        Instance {
            horizon,
            slot_duration: options.slot_duration,
            db: TrajectoryDb {
                user_labels,
                tag_labels,
                records,
                affinities,
            },
            catalog,
            book: AdvertiserBook {
                labels: adv_labels,
                advertisers,
            },
        },
        summary,
    ))
}
