//! Seeded synthetic instance generation.
//!
//! Geometry first: boards and users share a pool of street-like polylines,
//! so trajectories naturally pass near boards. Affinities give each user a
//! small set of tags with moderate probabilities (capped at 0.95 so survival
//! products never underflow to zero). Slots tile the horizon per board; each
//! slot's base influence is its stand-alone influence over the full tag
//! universe, costs are influence-proportional with a random fluctuation, and
//! advertiser demands are calibrated against the resulting supply:
//!
//! * `alpha` — total demand over total supply `sum_s I({s})`,
//! * `beta`  — average single-advertiser demand over supply, so the
//!   advertiser count is `round(alpha / beta)`.
//!
//! Raw demands `floor(psi * supply * beta)` with `psi ~ U[0.8, 1.2]` are
//! rescaled so the aggregate hits `alpha * supply` within rounding, keeping
//! sweep x-axes honest. Payments are `floor(eta * demand)`, `eta ~ U[0.9,
//! 1.1]`. Generation is a pure function of the parameter struct.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::influence::{build_exposure_index, tag_probs};
use crate::model::{
    Advertiser, AdvertiserBook, AffinityTable, Board, Instance, SlotCatalog, TagAffinity, TagId,
    TimeWindow, TrajectoryDb, TrajectoryRecord, UserId,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GenError {
    #[error("infeasible generator params: {0}")]
    Infeasible(String),
}

/// Every knob of the generator. `Default` is the desk-scale "nyc-micro"
/// shape: 200 users, 30 boards with 48 slots each, a 50-tag universe.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Demand-supply ratio.
    pub alpha: f64,
    /// Average individual demand ratio; advertiser count is `alpha / beta`.
    pub beta: f64,
    pub user_count: usize,
    pub board_count: usize,
    pub tag_universe: usize,
    /// Tags per advertiser, clipped to the universe size.
    pub tag_count_range: (usize, usize),
    pub t1: i64,
    pub t2: i64,
    pub slot_duration: i64,
    /// Exposure distance in meters, used to price slots.
    pub gamma: f64,
    pub seed: u64,
    /// Expected number of tags a user has affinity for.
    pub affinity_tags_per_user: f64,
    /// Per-tag affinity probabilities are drawn uniformly from this range.
    pub affinity_prob_range: (f64, f64),
    /// Trips per user (inclusive range).
    pub trips_per_user: (usize, usize),
    /// Location records per trip (inclusive range).
    pub records_per_trip: (usize, usize),
    /// Seconds a user dwells at each record location (inclusive range).
    pub dwell_range_s: (i64, i64),
    /// Street count is `board_count / boards_per_street` (at least 2);
    /// fewer streets pack boards and trajectories closer together.
    pub boards_per_street: usize,
    /// Center of the synthetic map.
    pub center: (f64, f64),
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            alpha: 1.0,
            beta: 0.05,
            user_count: 200,
            board_count: 30,
            tag_universe: 50,
            tag_count_range: (100, 500),
            t1: 0,
            t2: 43_200,
            slot_duration: 900,
            gamma: 100.0,
            seed: 0,
            affinity_tags_per_user: 6.0,
            affinity_prob_range: (0.10, 0.40),
            trips_per_user: (1, 2),
            records_per_trip: (3, 5),
            dwell_range_s: (60, 240),
            boards_per_street: 5,
            center: (40.75, -73.98),
        }
    }
}

impl GeneratorParams {
    pub fn advertiser_count(&self) -> usize {
        (self.alpha / self.beta).round() as usize
    }

    fn check(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::Infeasible(msg));
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return fail(format!("alpha and beta must be positive, got {} / {}", self.alpha, self.beta));
        }
        if self.beta > self.alpha {
            return fail(format!(
                "beta {} exceeds alpha {}: advertiser count would round to zero",
                self.beta, self.alpha
            ));
        }
        if self.advertiser_count() < 1 {
            return fail("alpha / beta rounds to zero advertisers".into());
        }
        if self.user_count == 0 || self.board_count == 0 || self.tag_universe == 0 {
            return fail("user, board and tag counts must be positive".into());
        }
        if self.t2 <= self.t1 || self.slot_duration <= 0 {
            return fail("horizon must be non-empty and slot duration positive".into());
        }
        if (self.t2 - self.t1) % self.slot_duration != 0 {
            return fail(format!(
                "slot duration {} does not divide the horizon {}..{}",
                self.slot_duration, self.t1, self.t2
            ));
        }
        if self.tag_count_range.0 < 1 || self.tag_count_range.0 > self.tag_count_range.1 {
            return fail("tag count range must be non-empty".into());
        }
        if !(self.gamma > 0.0) {
            return fail("gamma must be positive".into());
        }
        let (lo, hi) = self.affinity_prob_range;
        if !(0.0 <= lo && lo <= hi && hi <= 0.95) {
            return fail("affinity probabilities must stay within [0, 0.95]".into());
        }
        Ok(())
    }
}

const METERS_PER_DEG: f64 = 111_195.0;

/// A street as a polyline with precomputed cumulative lengths.
struct Street {
    points: Vec<(f64, f64)>,
    cumulative_m: Vec<f64>,
}

impl Street {
    fn length_m(&self) -> f64 {
        *self.cumulative_m.last().unwrap()
    }

    /// Point at `at_m` meters from the start, clamped to the street.
    fn locate(&self, at_m: f64) -> (f64, f64) {
        let at = at_m.clamp(0.0, self.length_m());
        let seg = self
            .cumulative_m
            .windows(2)
            .position(|w| at <= w[1])
            .unwrap_or(self.points.len() - 2);
        let (a, b) = (self.points[seg], self.points[seg + 1]);
        let span = self.cumulative_m[seg + 1] - self.cumulative_m[seg];
        let f = if span > 0.0 {
            (at - self.cumulative_m[seg]) / span
        } else {
            0.0
        };
        (a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1))
    }
}

fn offset_deg(lat: f64, east_m: f64, north_m: f64) -> (f64, f64) {
    (
        north_m / METERS_PER_DEG,
        east_m / (METERS_PER_DEG * lat.to_radians().cos()),
    )
}

fn build_streets(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<Street> {
    let count = (params.board_count / params.boards_per_street.max(1)).max(2);
    let (clat, clon) = params.center;
    (0..count)
        .map(|_| {
            let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let start_north = rng.gen_range(-3000.0..3000.0);
            let start_east = rng.gen_range(-3000.0..3000.0);
            let (dlat, dlon) = offset_deg(clat, start_east, start_north);
            let mut points = vec![(clat + dlat, clon + dlon)];
            let mut cumulative_m = vec![0.0];
            for _ in 0..4 {
                let len = rng.gen_range(400.0..1200.0);
                let (last_lat, last_lon) = *points.last().unwrap();
                let (dlat, dlon) = offset_deg(clat, len * heading.cos(), len * heading.sin());
                points.push((last_lat + dlat, last_lon + dlon));
                cumulative_m.push(cumulative_m.last().unwrap() + len);
                heading += rng.gen_range(-0.5..0.5);
            }
            Street {
                points,
                cumulative_m,
            }
        })
        .collect()
}

/// Largest-remainder integerization of `values` summing to `target`, with
/// every entry at least 1.
fn apportion(values: &[f64], target: u64) -> Vec<u64> {
    let mut floors: Vec<u64> = values.iter().map(|v| v.floor().max(1.0) as u64).collect();
    let mut remainders: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v - v.floor()))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let assigned: u64 = floors.iter().sum();
    if target > assigned {
        let mut short = target - assigned;
        for (i, _) in remainders.iter().cycle() {
            if short == 0 {
                break;
            }
            floors[*i] += 1;
            short -= 1;
        }
    } else {
        let mut over = assigned - target;
        for (i, _) in remainders.iter().rev().cycle() {
            if over == 0 {
                break;
            }
            if floors[*i] > 1 {
                floors[*i] -= 1;
                over -= 1;
            }
        }
    }
    floors
}

/// Generates a full instance from the parameters. Pure in `(params, seed)`.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, GenError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let streets = build_streets(params, &mut rng);
    let horizon = TimeWindow::new(params.t1, params.t2);

    // Boards sit just off a street, spread evenly along it with jitter so
    // exposure regions rarely overlap.
    let mut boards = Vec::with_capacity(params.board_count);
    for b in 0..params.board_count {
        let street = &streets[b % streets.len()];
        let rank = b / streets.len();
        let slots_on_street = params.board_count.div_ceil(streets.len());
        let stride = street.length_m() / slots_on_street as f64;
        let along = (rank as f64 + 0.5) * stride + rng.gen_range(-0.2..0.2) * stride;
        let (lat, lon) = street.locate(along);
        let (dlat, dlon) = offset_deg(
            lat,
            rng.gen_range(-20.0..20.0),
            rng.gen_range(-20.0..20.0),
        );
        boards.push(Board {
            lat: lat + dlat,
            lon: lon + dlon,
        });
    }

    // Users walk trips along streets, dwelling briefly at sampled spots.
    let mut records = Vec::new();
    for user in 0..params.user_count {
        let trips = rng.gen_range(params.trips_per_user.0..=params.trips_per_user.1);
        for _ in 0..trips.max(1) {
            let street = &streets[rng.gen_range(0..streets.len())];
            let mut at_m = rng.gen_range(0.0..street.length_m());
            let direction = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mut t = rng.gen_range(params.t1..params.t2.max(params.t1 + 1));
            let steps = rng.gen_range(params.records_per_trip.0..=params.records_per_trip.1);
            for _ in 0..steps.max(1) {
                let dwell = rng.gen_range(params.dwell_range_s.0..=params.dwell_range_s.1);
                let end = (t + dwell).min(params.t2);
                if t >= end {
                    break;
                }
                let (lat, lon) = street.locate(at_m);
                records.push(TrajectoryRecord {
                    user: UserId(user as u32),
                    lat,
                    lon,
                    window: TimeWindow::new(t, end),
                });
                at_m += direction * rng.gen_range(150.0..400.0);
                t = end + rng.gen_range(30..180);
                if t >= params.t2 {
                    break;
                }
            }
        }
    }

    // Affinities: each (user, tag) pair is present with a popularity-weighted
    // probability targeting `affinity_tags_per_user` tags per user.
    let mut popularity: Vec<f64> = (0..params.tag_universe)
        .map(|r| 1.0 / (1.0 + r as f64))
        .collect();
    for i in (1..popularity.len()).rev() {
        popularity.swap(i, rng.gen_range(0..=i));
    }
    let pop_sum: f64 = popularity.iter().sum();
    let mut entries = Vec::new();
    let (plo, phi) = params.affinity_prob_range;
    for user in 0..params.user_count {
        let mut any = false;
        for (tag, w) in popularity.iter().enumerate() {
            let present = (params.affinity_tags_per_user * w / pop_sum).min(0.95);
            if rng.gen_bool(present) {
                any = true;
                entries.push(TagAffinity {
                    user: UserId(user as u32),
                    tag: TagId(tag as u32),
                    prob: if plo < phi { rng.gen_range(plo..phi) } else { plo },
                });
            }
        }
        if !any {
            // Keep every user reachable by some tag.
            let tag = rng.gen_range(0..params.tag_universe);
            entries.push(TagAffinity {
                user: UserId(user as u32),
                tag: TagId(tag as u32),
                prob: if plo < phi { rng.gen_range(plo..phi) } else { plo },
            });
        }
    }
    let affinities = AffinityTable::new(params.user_count, params.tag_universe, &entries)
        .expect("generator emits unique (user, tag) pairs");

    // Slots, their base influence over the full universe, and costs.
    let mut catalog = SlotCatalog::tile(
        (0..params.board_count).map(|b| format!("b{b}")).collect(),
        boards,
        horizon,
        params.slot_duration,
    );
    let index = build_exposure_index(&records, &catalog, params.user_count, params.gamma);
    let full_universe: Vec<TagId> = (0..params.tag_universe as u32).map(TagId).collect();
    let tp_full = tag_probs(&affinities, params.user_count, &full_universe);
    for (i, slot) in catalog.slots.iter_mut().enumerate() {
        let influence: f64 = index
            .exposed(crate::model::SlotId(i as u32))
            .iter()
            .map(|u| tp_full[u.index()])
            .sum();
        slot.base_influence = influence;
        let tau = rng.gen_range(0.9..1.1);
        slot.cost = (tau * influence / 10.0).floor();
    }

    let supply = catalog.supply();
    if supply * params.beta < 10.0 {
        return Err(GenError::Infeasible(format!(
            "supply {supply:.1} * beta {} is below 10 influence units; demands would \
             quantize to zero (add users/boards or raise beta)",
            params.beta
        )));
    }

    // Demands, rescaled so the aggregate hits alpha * supply.
    let n = params.advertiser_count();
    let raw: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.8..1.2) * supply * params.beta)
        .collect();
    let raw_sum: f64 = raw.iter().sum();
    let target_total = params.alpha * supply;
    let scale = target_total / raw_sum;
    let scaled: Vec<f64> = raw.iter().map(|v| v * scale).collect();
    let demands = apportion(&scaled, target_total.round().max(n as f64) as u64);

    // Audit: integer demands must track alpha * supply within 1%, up to the
    // half-unit that rounding the aggregate to a whole number can cost.
    let actual: u64 = demands.iter().sum();
    let tolerance = (0.01 * target_total).max(0.5);
    if (actual as f64 - target_total).abs() > tolerance {
        return Err(GenError::Infeasible(format!(
            "aggregate demand {actual} missed alpha * supply = {target_total:.1} by more than 1%"
        )));
    }

    let mut advertisers = Vec::with_capacity(n);
    for &demand in &demands {
        let eta = rng.gen_range(0.9..1.1);
        let payment = ((eta * demand as f64).floor()).max(1.0);
        let want = rng.gen_range(params.tag_count_range.0..=params.tag_count_range.1);
        let size = want.min(params.tag_universe);
        let mut all: Vec<u32> = (0..params.tag_universe as u32).collect();
        for i in 0..size {
            let j = i + rng.gen_range(0..all.len() - i);
            all.swap(i, j);
        }
        let mut tags: Vec<TagId> = all[..size].iter().copied().map(TagId).collect();
        tags.sort_unstable();
        advertisers.push(Advertiser {
            demand: demand as f64,
            payment,
            tags,
        });
    }

    Ok(Instance {
        horizon,
        slot_duration: params.slot_duration,
        db: TrajectoryDb {
            user_labels: (0..params.user_count).map(|u| format!("u{u}")).collect(),
            tag_labels: (0..params.tag_universe).map(|t| format!("t{t}")).collect(),
            records,
            affinities,
        },
        catalog,
        book: AdvertiserBook {
            labels: (0..n).map(|a| format!("a{a}")).collect(),
            advertisers,
        },
    })
}
