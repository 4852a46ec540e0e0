//! Shared builders for integration tests.

use trmoa::model::{
    Advertiser, AdvertiserBook, AffinityTable, Board, Instance, SlotCatalog, TagAffinity, TagId,
    TimeWindow, TrajectoryDb, TrajectoryRecord, UserId,
};

/// Builds an instance with exact, hand-chosen exposure sets: one board per
/// slot (each board carries a single window covering the whole horizon), and
/// user `u` is exposed to slot `s` iff `exposure[s]` contains `u`. Tag
/// probabilities come straight from `probs` entries `(user, tag, p)`.
pub fn exact_exposure_instance(
    user_count: usize,
    tag_count: usize,
    exposure: &[Vec<u32>],
    probs: &[(u32, u32, f64)],
    advertisers: &[(f64, f64, Vec<u32>)],
) -> Instance {
    let slot_duration = 100_i64;
    let horizon = TimeWindow::new(0, slot_duration);
    let boards: Vec<Board> = (0..exposure.len())
        .map(|i| Board {
            // Spread boards far apart so exposure never bleeds across slots.
            lat: 10.0 + i as f64,
            lon: 20.0,
        })
        .collect();
    let board_labels = (0..exposure.len()).map(|b| format!("b{b}")).collect();
    let mut catalog = SlotCatalog::tile(board_labels, boards, horizon, slot_duration);

    let mut records = Vec::new();
    for (slot, users) in exposure.iter().enumerate() {
        for &u in users {
            records.push(TrajectoryRecord {
                user: UserId(u),
                lat: 10.0 + slot as f64,
                lon: 20.0,
                window: TimeWindow::new(1, 10),
            });
        }
    }

    let entries: Vec<TagAffinity> = probs
        .iter()
        .map(|&(u, t, p)| TagAffinity {
            user: UserId(u),
            tag: TagId(t),
            prob: p,
        })
        .collect();
    let affinities = AffinityTable::new(user_count, tag_count, &entries).unwrap();

    // Base influence over the full universe, as the generator would cache it.
    let universe: Vec<TagId> = (0..tag_count as u32).map(TagId).collect();
    let index = trmoa::influence::build_exposure_index(&records, &catalog, user_count, 100.0);
    for s in 0..catalog.slot_count() {
        let id = trmoa::model::SlotId(s as u32);
        catalog.slots[s].base_influence =
            trmoa::influence::influence([id], &universe, &index, &affinities);
        catalog.slots[s].cost = 1.0;
    }

    Instance {
        horizon,
        slot_duration,
        db: TrajectoryDb {
            user_labels: (0..user_count).map(|u| format!("u{u}")).collect(),
            tag_labels: (0..tag_count).map(|t| format!("t{t}")).collect(),
            records,
            affinities,
        },
        catalog,
        book: AdvertiserBook {
            labels: (0..advertisers.len()).map(|a| format!("a{a}")).collect(),
            advertisers: advertisers
                .iter()
                .map(|(demand, payment, tags)| Advertiser {
                    demand: *demand,
                    payment: *payment,
                    tags: tags.iter().copied().map(TagId).collect(),
                })
                .collect(),
        },
    }
}
