use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, ConvexPolygon, Placement, Vec2, DEFAULT_TOL};

/// Multiplicity statistics over a finite sample of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub min_multiplicity: u32,
    pub max_multiplicity: u32,
    pub uncovered_fraction: f64,
    pub samples: u64,
    /// `histogram[m]` = number of samples covered exactly `m` times.
    pub histogram: Vec<u64>,
}

impl CoverageReport {
    pub fn from_counts(counts: &[u32]) -> Self {
        let max = counts.iter().copied().max().unwrap_or(0);
        let min = counts.iter().copied().min().unwrap_or(0);
        let mut histogram = vec![0u64; max as usize + 1];
        for &c in counts {
            histogram[c as usize] += 1;
        }
        let samples = counts.len() as u64;
        let uncovered_fraction = if samples == 0 {
            0.0
        } else {
            histogram[0] as f64 / samples as f64
        };
        CoverageReport {
            min_multiplicity: min,
            max_multiplicity: max,
            uncovered_fraction,
            samples,
            histogram,
        }
    }
}

/// Where the sample point sits inside each grid cell.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum SamplePattern {
    /// Cell centers.
    #[default]
    Centers,
    /// One uniform point per cell, from a generator seeded with the value.
    Jittered(u64),
}

/// Multiplicity at `resolution²` stratified sample points of `window`.
pub fn grid_coverage(
    base: &ConvexPolygon,
    placements: &[Placement],
    window: Aabb,
    resolution: usize,
    pattern: SamplePattern,
) -> Result<CoverageReport> {
    coverage(base, placements, window, None, resolution, pattern)
}

/// Like [`grid_coverage`] on the bounding box of `region`, keeping only the
/// sample points that lie in `region`.
pub fn region_coverage(
    base: &ConvexPolygon,
    placements: &[Placement],
    region: &ConvexPolygon,
    resolution: usize,
    pattern: SamplePattern,
) -> Result<CoverageReport> {
    coverage(
        base,
        placements,
        region.bbox(),
        Some(region),
        resolution,
        pattern,
    )
}

fn coverage(
    base: &ConvexPolygon,
    placements: &[Placement],
    window: Aabb,
    region: Option<&ConvexPolygon>,
    resolution: usize,
    pattern: SamplePattern,
) -> Result<CoverageReport> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let n = resolution;
    let hx = window.width() / n as f64;
    let hy = window.height() / n as f64;
    let offsets: Vec<Vec2> = match pattern {
        SamplePattern::Centers => vec![Vec2::new(0.5, 0.5); n * n],
        SamplePattern::Jittered(seed) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..n * n)
                .map(|_| Vec2::new(rng.random::<f64>(), rng.random::<f64>()))
                .collect()
        }
    };
    let point = |i: usize, j: usize| {
        let o = offsets[j * n + i];
        Vec2::new(
            window.min.x + (i as f64 + o.x) * hx,
            window.min.y + (j as f64 + o.y) * hy,
        )
    };
    let mut counts = vec![0u32; n * n];
    let clamp = |t: f64| t.floor().clamp(0.0, n as f64 - 1.0) as usize;
    for pl in placements {
        let body = pl.body(base);
        let bb = body.bbox();
        if bb.max.x < window.min.x
            || bb.min.x > window.max.x
            || bb.max.y < window.min.y
            || bb.min.y > window.max.y
        {
            continue;
        }
        let i0 = clamp((bb.min.x - window.min.x) / hx - 1.0);
        let i1 = clamp((bb.max.x - window.min.x) / hx + 1.0);
        let j0 = clamp((bb.min.y - window.min.y) / hy - 1.0);
        let j1 = clamp((bb.max.y - window.min.y) / hy + 1.0);
        for j in j0..=j1 {
            for i in i0..=i1 {
                if body.contains_tol(point(i, j), DEFAULT_TOL) {
                    counts[j * n + i] += 1;
                }
            }
        }
    }
    if let Some(region) = region {
        let mut kept = Vec::with_capacity(counts.len());
        for j in 0..n {
            for i in 0..n {
                if region.contains_tol(point(i, j), -DEFAULT_TOL) {
                    kept.push(counts[j * n + i]);
                }
            }
        }
        counts = kept;
    }
    Ok(CoverageReport::from_counts(&counts))
}

/// Number of bodies containing each point.
pub fn multiplicities_at(bodies: &[ConvexPolygon], points: &[Vec2]) -> Vec<u32> {
    let boxes: Vec<Aabb> = bodies.iter().map(|b| b.bbox()).collect();
    points
        .iter()
        .map(|p| {
            bodies
                .iter()
                .zip(&boxes)
                .filter(|(b, bb)| {
                    p.x >= bb.min.x - DEFAULT_TOL
                        && p.x <= bb.max.x + DEFAULT_TOL
                        && p.y >= bb.min.y - DEFAULT_TOL
                        && p.y <= bb.max.y + DEFAULT_TOL
                        && b.contains(*p)
                })
                .count() as u32
        })
        .collect()
}

/// Σ λ²·area(K) over placements whose body meets the window in positive
/// area, divided by the window area.
pub fn density_estimate(base: &ConvexPolygon, placements: &[Placement], window: Aabb) -> f64 {
    let area = base.area();
    let Ok(wpoly) = window.to_polygon() else {
        return 0.0;
    };
    let used: f64 = placements
        .iter()
        .filter(|p| p.body(base).intersection_area(&wpoly) > 0.0)
        .map(|p| p.ratio * p.ratio * area)
        .sum();
    used / window.area()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn single_body_equal_to_window() {
        let r = grid_coverage(
            &unit_square(),
            &[Placement::new(Vec2::ZERO, 1.0)],
            Aabb::unit(),
            50,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
        assert_eq!((r.min_multiplicity, r.max_multiplicity), (1, 1));
        assert_eq!(r.histogram.iter().sum::<u64>(), 2500);
    }

    #[test]
    fn empty_placements_leave_everything_uncovered() {
        let r = grid_coverage(
            &unit_square(),
            &[],
            Aabb::unit(),
            10,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 1.0);
        assert!(
            grid_coverage(&unit_square(), &[], Aabb::unit(), 1, SamplePattern::Centers).is_err()
        );
    }

    #[test]
    fn four_tiles_and_corners() {
        let tiles: Vec<Placement> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(x, y)| Placement::new(Vec2::new(x, y), 1.0))
            .collect();
        let window = Aabb::new(Vec2::ZERO, Vec2::new(2.0, 2.0));
        let r = grid_coverage(
            &unit_square(),
            &tiles,
            window,
            64,
            SamplePattern::Jittered(3),
        )
        .unwrap();
        assert_eq!(r.min_multiplicity, 1);
        assert!(r.max_multiplicity <= 4);
        // With samples on the shared corner every tile counts it.
        let m = multiplicities_at(
            &tiles
                .iter()
                .map(|p| p.body(&unit_square()))
                .collect::<Vec<_>>(),
            &[Vec2::new(1.0, 1.0)],
        );
        assert_eq!(m, vec![4]);
        let diamond = ConvexPolygon::from_points(&[
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        let r = region_coverage(
            &unit_square(),
            &tiles[..3],
            &diamond,
            100,
            SamplePattern::Centers,
        )
        .unwrap();
        assert!(r.samples > 4000 && r.samples < 5100);
        assert!((r.uncovered_fraction - 0.25).abs() < 0.02);
        assert!((density_estimate(&unit_square(), &tiles, window) - 1.0).abs() < 1e-12);
        let mut doubled = tiles.clone();
        doubled.extend(tiles.iter().copied());
        assert!((density_estimate(&unit_square(), &doubled, window) - 2.0).abs() < 1e-12);
    }
}
