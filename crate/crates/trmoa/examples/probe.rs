use std::time::Instant;
use trmoa::gen::{generate_instance, GeneratorParams};
use trmoa::influence::build_exposure_index;
use trmoa::solver::{solve_with_index, Algorithm, OracleLimits, SolverConfig};

fn twenty(alpha: f64, seed: u64) -> GeneratorParams {
    GeneratorParams {
        alpha,
        beta: alpha / 3.0,
        user_count: 80,
        board_count: 4,
        tag_universe: 8,
        tag_count_range: (2, 6),
        t1: 0,
        t2: 4_500,
        slot_duration: 900,
        seed,
        trips_per_user: (2, 3),
        ..GeneratorParams::default()
    }
}

fn main() {
    for alpha in [1.8, 2.2, 2.6] {
        let t0 = Instant::now();
        let mut ok = 0;
        let mut total = 0;
        let mut worst: f64 = 0.0;
        for seed in 42..52 {
            let Ok(instance) = generate_instance(&twenty(alpha, seed)) else { continue };
            let index = build_exposure_index(&instance.db.records, &instance.catalog, instance.user_count(), 100.0);
            let mut config = SolverConfig::new(Algorithm::Oracle, seed);
            config.oracle_limits = OracleLimits { max_slots: 20, max_advertisers: 3 };
            let oracle = solve_with_index(&instance, &config, &index).unwrap();
            let bg = solve_with_index(&instance, &SolverConfig::new(Algorithm::Bg, seed), &index).unwrap();
            total += 1;
            let ratio = bg.report.total / oracle.report.total;
            worst = worst.max(ratio);
            if ratio <= 1.15 { ok += 1; }
        }
        println!("alpha={alpha}: {ok}/{total} within 15% (worst ratio {worst:.3}), elapsed {:.1}s", t0.elapsed().as_secs_f64());
    }
}
