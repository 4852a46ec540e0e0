//! Instance directory and allocation text round trips.

use trmoa::gen::{generate_instance, GeneratorParams};
use trmoa::influence::build_exposure_index;
use trmoa::io::{
    load_instance, parse_allocation, render_allocation, resolve_allocation, save_instance,
    serialize_allocation, Manifest,
};
use trmoa::model::validate_instance;
use trmoa::regret::total_regret;
use trmoa::solver::{solve, Algorithm, SolverConfig};

fn micro(seed: u64) -> GeneratorParams {
    GeneratorParams {
        alpha: 1.0,
        beta: 0.25,
        user_count: 80,
        board_count: 8,
        tag_universe: 12,
        tag_count_range: (3, 8),
        t2: 7_200,
        seed,
        ..GeneratorParams::default()
    }
}

#[test]
fn save_load_round_trip_is_identity() {
    for seed in [1, 7, 23] {
        let instance = generate_instance(&micro(seed)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = Manifest::for_instance(&instance);
        save_instance(&instance, dir.path(), &manifest).unwrap();
        let (loaded, loaded_manifest) = load_instance(dir.path()).unwrap();

        assert_eq!(loaded.horizon, instance.horizon);
        assert_eq!(loaded.slot_duration, instance.slot_duration);
        assert_eq!(loaded.db.user_labels, instance.db.user_labels);
        assert_eq!(loaded.db.tag_labels, instance.db.tag_labels);
        assert_eq!(loaded.db.records, instance.db.records);
        assert_eq!(
            loaded.db.affinities.entries().collect::<Vec<_>>(),
            instance.db.affinities.entries().collect::<Vec<_>>()
        );
        assert_eq!(loaded.catalog.board_labels, instance.catalog.board_labels);
        assert_eq!(loaded.catalog.boards, instance.catalog.boards);
        assert_eq!(loaded.catalog.slot_labels, instance.catalog.slot_labels);
        assert_eq!(loaded.catalog.slots, instance.catalog.slots);
        assert_eq!(loaded.book.labels, instance.book.labels);
        assert_eq!(loaded.book.advertisers, instance.book.advertisers);
        assert_eq!(loaded_manifest.horizon().unwrap(), instance.horizon);
        assert!(validate_instance(&loaded).ok());
    }
}

#[test]
fn repeated_saves_are_byte_identical() {
    let instance = generate_instance(&micro(5)).unwrap();
    let manifest = Manifest::for_instance(&instance);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    save_instance(&instance, dir_a.path(), &manifest).unwrap();
    save_instance(&instance, dir_b.path(), &manifest).unwrap();
    for file in [
        "trajectories.csv",
        "affinities.csv",
        "billboards.csv",
        "slots.csv",
        "advertisers.csv",
        "params.txt",
    ] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn allocation_text_round_trip_and_totals() {
    let instance = generate_instance(&micro(9)).unwrap();
    let config = SolverConfig::new(Algorithm::Bg, 3);
    let outcome = solve(&instance, &config).unwrap();
    let text = serialize_allocation(&outcome.allocation, &outcome.report, &instance);

    // serialize -> parse -> render is a fixpoint.
    let parsed = parse_allocation(&text).unwrap();
    assert_eq!(render_allocation(&parsed), text);

    // The summary block mirrors a from-scratch regret recomputation.
    let resolved = resolve_allocation(&parsed, &instance).unwrap();
    assert_eq!(resolved, outcome.allocation);
    let index = build_exposure_index(
        &instance.db.records,
        &instance.catalog,
        instance.user_count(),
        config.gamma,
    );
    let recomputed = total_regret(
        &resolved,
        &instance,
        &outcome.tag_selections,
        &config.regret,
        &index,
    )
    .unwrap();
    assert_eq!(parsed.total_regret, recomputed.total);
    assert_eq!(parsed.excessive_regret, recomputed.excessive_total);
    assert_eq!(parsed.unsatisfied_regret, recomputed.unsatisfied_total);
    assert_eq!(parsed.satisfied_count, recomputed.satisfied_count);
}

#[test]
fn empty_allocation_serializes_with_zero_summary() {
    let instance = generate_instance(&micro(2)).unwrap();
    let alloc = trmoa::model::Allocation::empty(instance.advertiser_count(), instance.slot_count());
    let index = build_exposure_index(
        &instance.db.records,
        &instance.catalog,
        instance.user_count(),
        100.0,
    );
    let tags: Vec<Vec<trmoa::model::TagId>> = instance
        .book
        .advertisers
        .iter()
        .map(|a| a.tags.clone())
        .collect();
    let report = total_regret(&alloc, &instance, &tags, &Default::default(), &index).unwrap();
    let text = serialize_allocation(&alloc, &report, &instance);
    let parsed = parse_allocation(&text).unwrap();
    assert!(parsed.assignments.is_empty());
    assert_eq!(parsed.unassigned.len(), instance.slot_count());
    assert!(parsed.advertisers.iter().all(|(_, achieved, _, _)| *achieved == 0.0));
    // Every advertiser forfeits its payment.
    let payments: f64 = instance.book.advertisers.iter().map(|a| a.payment).sum();
    assert_eq!(parsed.total_regret, payments);
}
