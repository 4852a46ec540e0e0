//! Hand-buildable instances for unit tests.

use crate::model::{
    Advertiser, AdvertiserBook, AffinityTable, Board, Instance, SlotCatalog, TagAffinity,
    TimeWindow, TrajectoryDb, TrajectoryRecord, UserId,
};

/// An instance whose influence function is exactly additive: one board, one
/// slot per entry of `slot_user_counts`, and each slot exposed to its own
/// disjoint block of users, who all carry probability `prob` for tag 0.
///
/// With `prob = 1.0` the influence of a slot set is the number of users it
/// covers, so `slot_user_counts` doubles as the per-slot influence values.
pub(crate) fn coverage_instance(
    slot_user_counts: &[usize],
    prob: f64,
    advertisers: &[(f64, f64)],
) -> Instance {
    let slot_duration = 100_i64;
    let horizon = TimeWindow::new(0, slot_duration * slot_user_counts.len() as i64);
    let board = Board {
        lat: 40.75,
        lon: -73.98,
    };
    let mut catalog = SlotCatalog::tile(vec!["b0".into()], vec![board], horizon, slot_duration);

    let user_count: usize = slot_user_counts.iter().sum();
    let mut records = Vec::with_capacity(user_count);
    let mut user = 0_u32;
    for (j, &count) in slot_user_counts.iter().enumerate() {
        let t0 = j as i64 * slot_duration + 10;
        for _ in 0..count {
            records.push(TrajectoryRecord {
                user: UserId(user),
                lat: 40.75,
                lon: -73.98,
                window: TimeWindow::new(t0, t0 + 10),
            });
            user += 1;
        }
    }
    let entries: Vec<TagAffinity> = (0..user_count)
        .map(|u| TagAffinity {
            user: UserId(u as u32),
            tag: crate::model::TagId(0),
            prob,
        })
        .collect();
    let affinities = AffinityTable::new(user_count, 1, &entries).unwrap();

    for (j, slot) in catalog.slots.iter_mut().enumerate() {
        slot.base_influence = slot_user_counts[j] as f64 * prob;
        slot.cost = 1.0;
    }

    Instance {
        horizon,
        slot_duration,
        db: TrajectoryDb {
            user_labels: (0..user_count).map(|u| format!("u{u}")).collect(),
            tag_labels: vec!["t0".into()],
            records,
            affinities,
        },
        catalog,
        book: AdvertiserBook {
            labels: (0..advertisers.len()).map(|i| format!("a{i}")).collect(),
            advertisers: advertisers
                .iter()
                .map(|&(demand, payment)| Advertiser {
                    demand,
                    payment,
                    tags: vec![crate::model::TagId(0)],
                })
                .collect(),
        },
    }
}

/// The five-slot, three-advertiser worked example: slot influences
/// 4, 5, 3, 6, 2; demands 6, 7, 8; payments 9, 12, 18.
pub(crate) fn example_one() -> Instance {
    coverage_instance(
        &[4, 5, 3, 6, 2],
        1.0,
        &[(6.0, 9.0), (7.0, 12.0), (8.0, 18.0)],
    )
}
