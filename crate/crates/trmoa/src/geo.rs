//! Spherical distance and a fixed-grid candidate index for proximity queries.

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

const METERS_PER_DEG_LAT: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;

/// Great-circle distance in meters between two (lat, lon) points in degrees,
/// on a sphere of radius [`EARTH_RADIUS_M`].
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Uniform lat/lon grid over a point set, used as a candidate filter for
/// radius queries. Cells are sized so that any point within `radius_m` of a
/// query location lies in the 3x3 neighborhood of the query's cell; callers
/// must still apply the exact haversine test to the candidates.
#[derive(Debug, Clone)]
pub struct GeoGrid {
    cell_lat_deg: f64,
    cell_lon_deg: f64,
    cells: std::collections::HashMap<(i64, i64), Vec<u32>>,
}

impl GeoGrid {
    pub fn build(points: &[(f64, f64)], radius_m: f64) -> Self {
        assert!(radius_m > 0.0, "radius must be positive");
        // Longitude degrees shrink with latitude; size lon cells for the
        // worst latitude present, with ample slack since cells are only a
        // pre-filter. cos is clamped away from the poles.
        let max_abs_lat = points
            .iter()
            .map(|p| p.0.abs())
            .fold(0.0_f64, f64::max)
            .min(89.0);
        let min_cos = max_abs_lat.to_radians().cos().max(0.02);
        let cell_lat_deg = 1.5 * radius_m / METERS_PER_DEG_LAT;
        let cell_lon_deg = 2.0 * radius_m / (METERS_PER_DEG_LAT * min_cos);
        let mut cells: std::collections::HashMap<(i64, i64), Vec<u32>> =
            std::collections::HashMap::new();
        for (i, &(lat, lon)) in points.iter().enumerate() {
            let key = (
                (lat / cell_lat_deg).floor() as i64,
                (lon / cell_lon_deg).floor() as i64,
            );
            cells.entry(key).or_default().push(i as u32);
        }
        GeoGrid {
            cell_lat_deg,
            cell_lon_deg,
            cells,
        }
    }

    /// Indices of all points in the 3x3 cell neighborhood of (lat, lon).
    pub fn candidates(&self, lat: f64, lon: f64) -> impl Iterator<Item = u32> + '_ {
        let row = (lat / self.cell_lat_deg).floor() as i64;
        let col = (lon / self.cell_lon_deg).floor() as i64;
        (-1..=1).flat_map(move |dr| {
            (-1..=1).flat_map(move |dc| {
                self.cells
                    .get(&(row + dr, col + dc))
                    .map(|v| v.iter().copied())
                    .into_iter()
                    .flatten()
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haversine_zero_for_identical_points() {
        assert_eq!(haversine_m(40.75, -73.98, 40.75, -73.98), 0.0);
    }

    #[test]
    fn haversine_one_degree_latitude() {
        let d = haversine_m(0.0, 0.0, 1.0, 0.0);
        assert!((d - METERS_PER_DEG_LAT).abs() < 1.0, "got {d}");
    }

    #[test]
    fn grid_never_misses_points_in_radius() {
        // Deterministic pseudo-random scatter around a city-sized box.
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let points: Vec<(f64, f64)> = (0..500)
            .map(|_| (40.6 + 0.3 * next(), -74.1 + 0.3 * next()))
            .collect();
        let radius = 120.0;
        let grid = GeoGrid::build(&points, radius);
        for _ in 0..200 {
            let q = (40.6 + 0.3 * next(), -74.1 + 0.3 * next());
            let mut expect: Vec<u32> = points
                .iter()
                .enumerate()
                .filter(|(_, p)| haversine_m(q.0, q.1, p.0, p.1) <= radius)
                .map(|(i, _)| i as u32)
                .collect();
            let mut got: Vec<u32> = grid
                .candidates(q.0, q.1)
                .filter(|&i| {
                    haversine_m(q.0, q.1, points[i as usize].0, points[i as usize].1) <= radius
                })
                .collect();
            expect.sort_unstable();
            got.sort_unstable();
            assert_eq!(expect, got);
        }
    }
}
