//! Canonical text form of an allocation and its regret report.
//!
//! The format is line-based with four bracketed sections. Assignment rows
//! are sorted by (advertiser, tag, slot) index, floats print in shortest
//! round-trip form, and serialize -> parse -> render is a fixpoint, so two
//! equal allocations always serialize to identical bytes.
//!
//! ```text
//! # trmoa allocation v1
//! [assignments]
//! advertiser,tag,slot
//! a1,t0,s3
//! [unassigned]
//! slot
//! s9
//! [advertisers]
//! advertiser,achieved,regret,kind
//! a1,6,0,zero
//! [totals]
//! excessive_regret=0
//! satisfied_count=1
//! total_regret=0
//! unsatisfied_regret=0
//! ```

use std::collections::BTreeSet;

use crate::model::{Allocation, Instance, SlotId};
use crate::regret::RegretReport;

use super::IoError;

const HEADER: &str = "# trmoa allocation v1";

/// Label-level view of a serialized allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationText {
    /// (advertiser, tag, slot) labels, in serialized order.
    pub assignments: Vec<(String, String, String)>,
    pub unassigned: Vec<String>,
    /// (advertiser, achieved, regret, kind) per advertiser.
    pub advertisers: Vec<(String, f64, f64, String)>,
    pub total_regret: f64,
    pub excessive_regret: f64,
    pub unsatisfied_regret: f64,
    pub satisfied_count: usize,
}

/// Renders an allocation and its report as canonical text.
pub fn serialize_allocation(
    alloc: &Allocation,
    report: &RegretReport,
    instance: &Instance,
) -> String {
    let mut assignments = Vec::new();
    for (i, adv_alloc) in alloc.per_adv.iter().enumerate() {
        for (tag, slots) in &adv_alloc.buckets {
            for slot in slots {
                assignments.push((
                    instance.book.labels[i].clone(),
                    instance.db.tag_labels[tag.index()].clone(),
                    instance.catalog.slot_labels[slot.index()].clone(),
                ));
            }
        }
    }
    let unassigned = alloc
        .unassigned
        .iter()
        .map(|s| instance.catalog.slot_labels[s.index()].clone())
        .collect();
    let advertisers = report
        .per_advertiser
        .iter()
        .enumerate()
        .map(|(i, o)| {
            (
                instance.book.labels[i].clone(),
                o.achieved,
                o.regret,
                o.kind.as_str().to_string(),
            )
        })
        .collect();
    render_allocation(&AllocationText {
        assignments,
        unassigned,
        advertisers,
        total_regret: report.total,
        excessive_regret: report.excessive_total,
        unsatisfied_regret: report.unsatisfied_total,
        satisfied_count: report.satisfied_count,
    })
}

pub fn render_allocation(text: &AllocationText) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push_str("\n[assignments]\nadvertiser,tag,slot\n");
    for (a, t, s) in &text.assignments {
        out.push_str(&format!("{a},{t},{s}\n"));
    }
    out.push_str("[unassigned]\nslot\n");
    for s in &text.unassigned {
        out.push_str(s);
        out.push('\n');
    }
    out.push_str("[advertisers]\nadvertiser,achieved,regret,kind\n");
    for (a, achieved, regret, kind) in &text.advertisers {
        out.push_str(&format!("{a},{achieved},{regret},{kind}\n"));
    }
    out.push_str("[totals]\n");
    out.push_str(&format!("excessive_regret={}\n", text.excessive_regret));
    out.push_str(&format!("satisfied_count={}\n", text.satisfied_count));
    out.push_str(&format!("total_regret={}\n", text.total_regret));
    out.push_str(&format!("unsatisfied_regret={}\n", text.unsatisfied_regret));
    out
}

pub fn parse_allocation(input: &str) -> Result<AllocationText, IoError> {
    let bad = |msg: String| IoError::BadAllocationText(msg);
    let mut lines = input.lines().peekable();
    match lines.next() {
        Some(l) if l == HEADER => {}
        other => return Err(bad(format!("missing header, got {other:?}"))),
    }

    let mut text = AllocationText {
        assignments: Vec::new(),
        unassigned: Vec::new(),
        advertisers: Vec::new(),
        total_regret: 0.0,
        excessive_regret: 0.0,
        unsatisfied_regret: 0.0,
        satisfied_count: 0,
    };
    let mut section = String::new();
    let mut expect_header = false;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].to_string();
            expect_header = matches!(section.as_str(), "assignments" | "unassigned" | "advertisers");
            continue;
        }
        if expect_header {
            expect_header = false;
            continue; // column header row
        }
        match section.as_str() {
            "assignments" => {
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad(format!("assignment row needs 3 fields: {line:?}")));
                }
                text.assignments.push((
                    parts[0].to_string(),
                    parts[1].to_string(),
                    parts[2].to_string(),
                ));
            }
            "unassigned" => text.unassigned.push(line.to_string()),
            "advertisers" => {
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != 4 {
                    return Err(bad(format!("advertiser row needs 4 fields: {line:?}")));
                }
                let achieved = parts[1]
                    .parse()
                    .map_err(|e| bad(format!("achieved: {e}")))?;
                let regret = parts[2].parse().map_err(|e| bad(format!("regret: {e}")))?;
                text.advertisers.push((
                    parts[0].to_string(),
                    achieved,
                    regret,
                    parts[3].to_string(),
                ));
            }
            "totals" => {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| bad(format!("totals row needs key=value: {line:?}")))?;
                match k {
                    "total_regret" => {
                        text.total_regret = v.parse().map_err(|e| bad(format!("{k}: {e}")))?
                    }
                    "excessive_regret" => {
                        text.excessive_regret = v.parse().map_err(|e| bad(format!("{k}: {e}")))?
                    }
                    "unsatisfied_regret" => {
                        text.unsatisfied_regret =
                            v.parse().map_err(|e| bad(format!("{k}: {e}")))?
                    }
                    "satisfied_count" => {
                        text.satisfied_count = v.parse().map_err(|e| bad(format!("{k}: {e}")))?
                    }
                    other => return Err(bad(format!("unknown totals key {other}"))),
                }
            }
            _ => return Err(bad(format!("row outside any section: {line:?}"))),
        }
    }
    Ok(text)
}

/// Maps a parsed allocation text back onto instance indices.
pub fn resolve_allocation(
    text: &AllocationText,
    instance: &Instance,
) -> Result<Allocation, IoError> {
    let find = |labels: &[String], label: &str, file: &str| {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| IoError::UnknownId {
                file: file.to_string(),
                line: 0,
                id: label.to_string(),
            })
    };
    let mut alloc = Allocation::empty(instance.advertiser_count(), instance.slot_count());
    for (a, t, s) in &text.assignments {
        let adv = find(&instance.book.labels, a, "allocation")?;
        let tag = find(&instance.db.tag_labels, t, "allocation")?;
        let slot = find(&instance.catalog.slot_labels, s, "allocation")?;
        alloc.assign(
            crate::model::AdvId(adv as u32),
            crate::model::TagId(tag as u32),
            crate::model::SlotId(slot as u32),
        )?;
    }
    // Cross-check the unassigned section against what is left.
    let expect: BTreeSet<SlotId> = text
        .unassigned
        .iter()
        .map(|s| find(&instance.catalog.slot_labels, s, "allocation").map(|i| SlotId(i as u32)))
        .collect::<Result<_, _>>()?;
    if expect != alloc.unassigned {
        return Err(IoError::BadAllocationText(
            "unassigned section does not match the catalog minus assignments".into(),
        ));
    }
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regret::{AdvertiserOutcome, RegretKind, RegretReport};

    fn tiny_report() -> RegretReport {
        RegretReport::from_outcomes(vec![AdvertiserOutcome {
            achieved: 3.0,
            regret: 0.0,
            kind: RegretKind::Zero,
        }])
    }

    #[test]
    fn parse_render_is_a_fixpoint() {
        let text = AllocationText {
            assignments: vec![("a0".into(), "t0".into(), "s1".into())],
            unassigned: vec!["s0".into()],
            advertisers: vec![("a0".into(), 3.0, 0.0, "zero".into())],
            total_regret: 0.0,
            excessive_regret: 0.0,
            unsatisfied_regret: 0.0,
            satisfied_count: 1,
        };
        let rendered = render_allocation(&text);
        let parsed = parse_allocation(&rendered).unwrap();
        assert_eq!(parsed, text);
        assert_eq!(render_allocation(&parsed), rendered);
    }

    #[test]
    fn totals_mirror_the_report() {
        let report = tiny_report();
        assert_eq!(report.total, 0.0);
        assert_eq!(report.satisfied_count, 1);
    }
}
