use std::collections::HashMap;
use std::path::Path;

use crate::model::{
    Advertiser, AdvertiserBook, AffinityTable, BillboardSlot, Board, BoardId, TagAffinity, TagId,
    TimeWindow, TrajectoryRecord, UserId,
};
use crate::model::Instance;

use super::IoError;

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub(super) struct CsvTable {
    file: String,
    headers: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

impl CsvTable {
    pub(super) fn open(path: &Path) -> Result<Self, IoError> {
        let file = file_name(path);
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for result in reader.records() {
            let record = result?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record.iter().map(str::to_string).collect()));
        }
        Ok(CsvTable {
            file,
            headers,
            rows,
        })
    }

    pub(super) fn column(&self, name: &str) -> Result<usize, IoError> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::MissingColumn {
                file: self.file.clone(),
                column: name.to_string(),
            })
    }

    pub(super) fn rows(&self) -> &[(u64, Vec<String>)] {
        &self.rows
    }

    pub(super) fn file(&self) -> &str {
        &self.file
    }

    pub(super) fn parse<T: std::str::FromStr>(
        &self,
        line: u64,
        row: &[String],
        col: usize,
        what: &str,
    ) -> Result<T, IoError>
    where
        T::Err: std::fmt::Display,
    {
        row.get(col)
            .ok_or_else(|| IoError::Parse {
                file: self.file.clone(),
                line,
                msg: format!("missing field {what}"),
            })?
            .parse()
            .map_err(|e| IoError::Parse {
                file: self.file.clone(),
                line,
                msg: format!("{what}: {e}"),
            })
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, IoError> {
    Ok(csv::Writer::from_path(path)?)
}

pub(super) fn write_trajectories(instance: &Instance, path: &Path) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["user_id", "lat", "lon", "t_start", "t_end"])?;
    for rec in &instance.db.records {
        w.write_record([
            instance.db.user_labels[rec.user.index()].as_str(),
            &format!("{}", rec.lat),
            &format!("{}", rec.lon),
            &format!("{}", rec.window.start),
            &format!("{}", rec.window.end),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_trajectories(
    path: &Path,
) -> Result<(Vec<String>, Vec<TrajectoryRecord>), IoError> {
    let table = CsvTable::open(path)?;
    let user_col = table.column("user_id")?;
    let lat_col = table.column("lat")?;
    let lon_col = table.column("lon")?;
    let start_col = table.column("t_start")?;
    let end_col = table.column("t_end")?;

    let mut user_labels = Vec::new();
    let mut user_index: HashMap<String, u32> = HashMap::new();
    let mut records = Vec::with_capacity(table.rows().len());
    for (line, row) in table.rows() {
        let label = &row[user_col];
        let user = *user_index.entry(label.clone()).or_insert_with(|| {
            user_labels.push(label.clone());
            (user_labels.len() - 1) as u32
        });
        records.push(TrajectoryRecord {
            user: UserId(user),
            lat: table.parse(*line, row, lat_col, "lat")?,
            lon: table.parse(*line, row, lon_col, "lon")?,
            window: TimeWindow::new(
                table.parse(*line, row, start_col, "t_start")?,
                table.parse(*line, row, end_col, "t_end")?,
            ),
        });
    }
    Ok((user_labels, records))
}

pub(super) fn write_affinities(instance: &Instance, path: &Path) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["user_id", "tag_id", "prob"])?;
    for entry in instance.db.affinities.entries() {
        w.write_record([
            instance.db.user_labels[entry.user.index()].as_str(),
            instance.db.tag_labels[entry.tag.index()].as_str(),
            &format!("{}", entry.prob),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_affinities(
    path: &Path,
    user_labels: &[String],
    tag_labels: &[String],
) -> Result<AffinityTable, IoError> {
    let table = CsvTable::open(path)?;
    let user_col = table.column("user_id")?;
    let tag_col = table.column("tag_id")?;
    let prob_col = table.column("prob")?;
    let users: HashMap<&str, u32> = user_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u32))
        .collect();
    let tags: HashMap<&str, u32> = tag_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u32))
        .collect();

    let mut entries = Vec::with_capacity(table.rows().len());
    for (line, row) in table.rows() {
        let user = *users
            .get(row[user_col].as_str())
            .ok_or_else(|| IoError::UnknownId {
                file: table.file().to_string(),
                line: *line,
                id: row[user_col].clone(),
            })?;
        let tag = *tags
            .get(row[tag_col].as_str())
            .ok_or_else(|| IoError::UnknownId {
                file: table.file().to_string(),
                line: *line,
                id: row[tag_col].clone(),
            })?;
        entries.push(TagAffinity {
            user: UserId(user),
            tag: TagId(tag),
            prob: table.parse(*line, row, prob_col, "prob")?,
        });
    }
    Ok(AffinityTable::new(
        user_labels.len(),
        tag_labels.len(),
        &entries,
    )?)
}

pub(super) fn write_billboards(instance: &Instance, path: &Path) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["board_id", "lat", "lon"])?;
    for (i, board) in instance.catalog.boards.iter().enumerate() {
        w.write_record([
            instance.catalog.board_labels[i].as_str(),
            &format!("{}", board.lat),
            &format!("{}", board.lon),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_billboards(path: &Path) -> Result<(Vec<String>, Vec<Board>), IoError> {
    let table = CsvTable::open(path)?;
    let id_col = table.column("board_id")?;
    let lat_col = table.column("lat")?;
    let lon_col = table.column("lon")?;
    let mut labels: Vec<String> = Vec::new();
    let mut boards = Vec::new();
    for (line, row) in table.rows() {
        if labels.contains(&row[id_col]) {
            return Err(IoError::IdCollision {
                file: table.file().to_string(),
                id: row[id_col].clone(),
            });
        }
        labels.push(row[id_col].clone());
        boards.push(Board {
            lat: table.parse(*line, row, lat_col, "lat")?,
            lon: table.parse(*line, row, lon_col, "lon")?,
        });
    }
    Ok((labels, boards))
}

pub(super) fn write_slots(instance: &Instance, path: &Path) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["slot_id", "board_id", "t_start", "t_end", "cost", "base_influence"])?;
    for (i, slot) in instance.catalog.slots.iter().enumerate() {
        w.write_record([
            instance.catalog.slot_labels[i].as_str(),
            instance.catalog.board_labels[slot.board.index()].as_str(),
            &format!("{}", slot.window.start),
            &format!("{}", slot.window.end),
            &format!("{}", slot.cost),
            &format!("{}", slot.base_influence),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_slots(
    path: &Path,
    board_labels: &[String],
) -> Result<(Vec<String>, Vec<BillboardSlot>), IoError> {
    let table = CsvTable::open(path)?;
    let id_col = table.column("slot_id")?;
    let board_col = table.column("board_id")?;
    let start_col = table.column("t_start")?;
    let end_col = table.column("t_end")?;
    let cost_col = table.column("cost")?;
    let base_col = table.column("base_influence")?;
    let boards: HashMap<&str, u32> = board_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u32))
        .collect();

    let mut labels = Vec::new();
    let mut slots = Vec::new();
    for (line, row) in table.rows() {
        let board = *boards
            .get(row[board_col].as_str())
            .ok_or_else(|| IoError::UnknownId {
                file: table.file().to_string(),
                line: *line,
                id: row[board_col].clone(),
            })?;
        labels.push(row[id_col].clone());
        slots.push(BillboardSlot {
            board: BoardId(board),
            window: TimeWindow::new(
                table.parse(*line, row, start_col, "t_start")?,
                table.parse(*line, row, end_col, "t_end")?,
            ),
            cost: table.parse(*line, row, cost_col, "cost")?,
            base_influence: table.parse(*line, row, base_col, "base_influence")?,
        });
    }
    Ok((labels, slots))
}

pub(super) fn write_advertisers(instance: &Instance, path: &Path) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["adv_id", "demand", "payment", "tags"])?;
    for (i, adv) in instance.book.advertisers.iter().enumerate() {
        let tags: Vec<&str> = adv
            .tags
            .iter()
            .map(|t| instance.db.tag_labels[t.index()].as_str())
            .collect();
        w.write_record([
            instance.book.labels[i].as_str(),
            &format!("{}", adv.demand),
            &format!("{}", adv.payment),
            &tags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_advertisers(
    path: &Path,
    tag_labels: &[String],
) -> Result<AdvertiserBook, IoError> {
    let table = CsvTable::open(path)?;
    let id_col = table.column("adv_id")?;
    let demand_col = table.column("demand")?;
    let payment_col = table.column("payment")?;
    let tags_col = table.column("tags")?;
    let tags: HashMap<&str, u32> = tag_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u32))
        .collect();

    let mut labels: Vec<String> = Vec::new();
    let mut advertisers = Vec::new();
    for (line, row) in table.rows() {
        if labels.contains(&row[id_col]) {
            return Err(IoError::IdCollision {
                file: table.file().to_string(),
                id: row[id_col].clone(),
            });
        }
        let mut adv_tags = Vec::new();
        for part in row[tags_col].split(';').filter(|p| !p.is_empty()) {
            let tag = *tags.get(part).ok_or_else(|| IoError::UnknownId {
                file: table.file().to_string(),
                line: *line,
                id: part.to_string(),
            })?;
            adv_tags.push(TagId(tag));
        }
        labels.push(row[id_col].clone());
        advertisers.push(Advertiser {
            demand: table.parse(*line, row, demand_col, "demand")?,
            payment: table.parse(*line, row, payment_col, "payment")?,
            tags: adv_tags,
        });
    }
    Ok(AdvertiserBook {
        labels,
        advertisers,
    })
}
