use std::f64::consts::PI;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chain_area, ConvexPolygon, Residual, Vec2};
use crate::hypergraph::FiniteHypergraph;

/// Bounds max(area L / area K, 1) ≤ N*(L, K) ≤ area(L − K) / area K on the
/// fractional number of translates of K needed to cover L.
pub fn nstar_bounds(k: &ConvexPolygon, l: &ConvexPolygon) -> (f64, f64) {
    let ak = k.area();
    let lower = (l.area() / ak).max(1.0);
    let upper = l.minkowski_sum(&k.reflect()).area() / ak;
    (lower, upper)
}

/// Gauge ‖z‖ of a polygon symmetric about the origin.
fn gauge(s: &ConvexPolygon, z: Vec2) -> f64 {
    s.normals()
        .iter()
        .zip(s.offsets())
        .map(|(n, h)| n.dot(z) / h)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Uniform bucket grid over planar points.
struct PointGrid {
    cell: f64,
    map: FxHashMap<(i64, i64), Vec<u32>>,
}

impl PointGrid {
    fn new(cell: f64) -> Self {
        PointGrid {
            cell,
            map: FxHashMap::default(),
        }
    }

    fn key(&self, p: Vec2) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, p: Vec2, id: u32) {
        self.map.entry(self.key(p)).or_default().push(id);
    }

    fn for_each_in_box(&self, min: Vec2, max: Vec2, mut f: impl FnMut(u32)) {
        let (x0, y0) = self.key(min);
        let (x1, y1) = self.key(max);
        for x in x0..=x1 {
            for y in y0..=y1 {
                if let Some(v) = self.map.get(&(x, y)) {
                    v.iter().for_each(|&i| f(i));
                }
            }
        }
    }
}

/// Which body the candidate translates use as edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeShape {
    /// (1 − δ)K, which sits inside K∼δ(K∩(−K)).
    #[default]
    Scaled,
    /// The erosion K∼δ(K∩(−K)) itself.
    Eroded,
}

/// Knobs for [`build_translate_instance`].
#[derive(Clone, Debug, PartialEq)]
pub struct TranslateConfig {
    pub delta: f64,
    /// Side of the square C = [−a/2, a/2]².
    pub a: f64,
    pub edge_shape: EdgeShape,
    /// Candidate grid pitch as a multiple of δ·inradius(K∩(−K)).
    pub pitch_factor: f64,
    /// Random phase stops after this many rejections per accepted point.
    pub streak_factor: usize,
    pub max_points: usize,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        TranslateConfig {
            delta: 0.25,
            a: 4.0,
            edge_shape: EdgeShape::Scaled,
            pitch_factor: 0.25,
            streak_factor: 50,
            max_points: 200_000,
        }
    }
}

/// A finite covering problem equivalent, up to the slack δ, to covering the
/// square C by translates of K.
#[derive(Clone, Debug)]
pub struct DiscretizedInstance {
    /// K recentered at its centroid and scaled to inradius 1 about it.
    pub k: ConvexPolygon,
    /// Original centroid and scale factor of the normalization.
    pub centroid: Vec2,
    pub scale: f64,
    /// The square C.
    pub region: ConvexPolygon,
    /// K ∩ (−K).
    pub s: ConvexPolygon,
    /// T = δ·(K ∩ (−K)); C ⊆ Λ + T.
    pub t: ConvexPolygon,
    /// The body whose translates form the edges.
    pub edge_shape: ConvexPolygon,
    pub delta: f64,
    pub a: f64,
    pub lambda: Vec<Vec2>,
    /// One candidate translate per (distinct) edge.
    pub candidates: Vec<Vec2>,
    pub hypergraph: FiniteHypergraph,
    /// area(C + (δ/2)S) / area((δ/2)S): packing bound on |Λ|.
    pub packing_bound: f64,
    /// (a + δ)²·4 / (π(δ/2)²): the bound from B(0,1) ⊆ K ⊆ [−2, 2]².
    pub volume_bound: f64,
}

/// Builds Λ, a saturated δ-separated set (in the gauge of K∩(−K)) of C,
/// and the hypergraph of Λ-points inside each candidate translate of the
/// edge shape.
///
/// Λ is grown by random sequential acceptance and then completed cell by
/// cell: any part of C not yet inside Λ + T contributes a new point, which is
/// automatically δ-far from Λ. The result satisfies C ⊆ Λ + T up to pieces of
/// negligible area.
pub fn build_translate_instance<R: Rng + ?Sized>(
    k: &ConvexPolygon,
    cfg: &TranslateConfig,
    rng: &mut R,
) -> Result<DiscretizedInstance> {
    let delta = cfg.delta;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "δ = {delta} outside (0, 1)"
        )));
    }
    if !(cfg.a > 0.0) {
        return Err(Error::InvalidParameter(format!("a = {}", cfg.a)));
    }
    let (kc, centroid) = k.centered();
    let scale = 1.0 / kc.inradius_about(Vec2::ZERO);
    let kn = kc.scale(scale);
    let s = kn.intersect(&kn.reflect())?;
    let t = s.scale(delta);
    let half = cfg.a / 2.0;
    let region = ConvexPolygon::square(Vec2::ZERO, cfg.a)?;
    let s_radius = s.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);

    let reach = delta * s_radius;
    let mut grid = PointGrid::new(reach);
    let mut lambda: Vec<Vec2> = Vec::new();
    let far_from_all = |lambda: &[Vec2], grid: &PointGrid, z: Vec2| {
        let mut ok = true;
        grid.for_each_in_box(
            z - Vec2::new(reach, reach),
            z + Vec2::new(reach, reach),
            |i| {
                if ok && gauge(&s, z - lambda[i as usize]) < delta {
                    ok = false;
                }
            },
        );
        ok
    };
    let push = |lambda: &mut Vec<Vec2>, grid: &mut PointGrid, z: Vec2| -> Result<()> {
        if lambda.len() >= cfg.max_points {
            return Err(Error::SaturationBudget(lambda.len()));
        }
        grid.insert(z, lambda.len() as u32);
        lambda.push(z);
        Ok(())
    };

    let mut streak = 0usize;
    loop {
        if !lambda.is_empty() && streak >= cfg.streak_factor * lambda.len() {
            break;
        }
        if lambda.len() > 10 && streak >= cfg.streak_factor * 2000 {
            break;
        }
        let z = Vec2::new(
            rng.random_range(-half..=half),
            rng.random_range(-half..=half),
        );
        if far_from_all(&lambda, &grid, z) {
            push(&mut lambda, &mut grid, z)?;
            streak = 0;
        } else {
            streak += 1;
        }
    }

    // Completion over cells of C.
    let s_in = s.inradius_about(Vec2::ZERO);
    let cells = ((cfg.a / (delta * s_in)).ceil() as usize).max(1);
    let side = cfg.a / cells as f64;
    let min_area = 1e-12 * side * side;
    for i in 0..cells {
        for j in 0..cells {
            let lo = Vec2::new(-half + i as f64 * side, -half + j as f64 * side);
            let cell = [
                lo,
                lo + Vec2::new(side, 0.0),
                lo + Vec2::new(side, side),
                lo + Vec2::new(0.0, side),
            ];
            let mut res = Residual::new(&cell, min_area);
            let mut near = Vec::new();
            grid.for_each_in_box(
                lo - Vec2::new(reach, reach),
                lo + Vec2::new(side + reach, side + reach),
                |id| near.push(id),
            );
            for id in near {
                res.remove(&t.translate(lambda[id as usize]));
            }
            while !res.is_empty() {
                let piece = res
                    .pieces()
                    .iter()
                    .max_by(|a, b| chain_area(a).total_cmp(&chain_area(b)))
                    .expect("nonempty");
                let z = piece_centroid(piece);
                push(&mut lambda, &mut grid, z)?;
                res.remove(&t.translate(z));
            }
        }
    }

    let edge_shape = match cfg.edge_shape {
        EdgeShape::Scaled => kn.scale(1.0 - delta),
        EdgeShape::Eroded => kn.erode(&t)?,
    };
    let pitch = cfg.pitch_factor * delta * s_in;
    let (hypergraph, candidates) =
        translate_hypergraph(&lambda, &region, &edge_shape, pitch, &grid)?;

    let small = s.scale(delta / 2.0);
    let packing_bound = region.minkowski_sum(&small).area() / small.area();
    let volume_bound = (cfg.a + delta).powi(2) * 4.0 / (PI * (delta / 2.0).powi(2));
    Ok(DiscretizedInstance {
        k: kn,
        centroid,
        scale,
        region,
        s,
        t,
        edge_shape,
        delta,
        a: cfg.a,
        lambda,
        candidates,
        hypergraph,
        packing_bound,
        volume_bound,
    })
}

fn piece_centroid(v: &[Vec2]) -> Vec2 {
    let o = v[0];
    let mut acc = Vec2::ZERO;
    let mut total = 0.0;
    for i in 1..v.len() - 1 {
        let a = v[i] - o;
        let b = v[i + 1] - o;
        let w = a.cross(b);
        acc += (a + b) * (w / 3.0);
        total += w;
    }
    o + acc / total
}

/// Edges {p ∈ points : p ∈ x + shape} for grid translates x whose body
/// meets `region` in positive area; repeated edges are dropped.
fn translate_hypergraph(
    points: &[Vec2],
    region: &ConvexPolygon,
    shape: &ConvexPolygon,
    pitch: f64,
    grid: &PointGrid,
) -> Result<(FiniteHypergraph, Vec<Vec2>)> {
    let reach = region.minkowski_sum(&shape.reflect());
    let bb = reach.bbox();
    let sb = shape.bbox();
    let mut seen: FxHashMap<Vec<u32>, ()> = FxHashMap::default();
    let mut edges = Vec::new();
    let mut candidates = Vec::new();
    let i0 = (bb.min.x / pitch).floor() as i64;
    let i1 = (bb.max.x / pitch).ceil() as i64;
    let j0 = (bb.min.y / pitch).floor() as i64;
    let j1 = (bb.max.y / pitch).ceil() as i64;
    for i in i0..=i1 {
        for j in j0..=j1 {
            let x = Vec2::new(i as f64 * pitch, j as f64 * pitch);
            if !reach.contains_tol(x, -1e-12) {
                continue;
            }
            let mut e = Vec::new();
            grid.for_each_in_box(x + sb.min, x + sb.max, |id| {
                if shape.contains(points[id as usize] - x) {
                    e.push(id);
                }
            });
            if e.is_empty() {
                continue;
            }
            e.sort_unstable();
            if seen.insert(e.clone(), ()).is_none() {
                edges.push(e);
                candidates.push(x);
            }
        }
    }
    Ok((FiniteHypergraph::uniform(points.len(), edges)?, candidates))
}

/// Finite version of covering L by translates of K: ground = grid points of
/// L, edges = grid points inside each grid translate of K.
#[derive(Clone, Debug)]
pub struct NstarInstance {
    pub hypergraph: FiniteHypergraph,
    pub ground: Vec<Vec2>,
    pub candidates: Vec<Vec2>,
    pub pitch: f64,
    pub max_edge: usize,
    /// max(0, lower − |ground|/max_edge): how far the counting lower bound of
    /// the finite problem falls below the continuous lower bound.
    pub disc_slack: f64,
}

/// Discretizes N*(L, K) on the lattice pitch·ℤ².
pub fn discretize_nstar(k: &ConvexPolygon, l: &ConvexPolygon, pitch: f64) -> Result<NstarInstance> {
    if !(pitch > 0.0) {
        return Err(Error::InvalidParameter(format!("pitch {pitch}")));
    }
    let bb = l.bbox();
    let mut ground = Vec::new();
    for i in (bb.min.x / pitch).floor() as i64..=(bb.max.x / pitch).ceil() as i64 {
        for j in (bb.min.y / pitch).floor() as i64..=(bb.max.y / pitch).ceil() as i64 {
            let p = Vec2::new(i as f64 * pitch, j as f64 * pitch);
            if l.contains(p) {
                ground.push(p);
            }
        }
    }
    if ground.is_empty() {
        return Err(Error::InvalidParameter(
            "pitch leaves L without grid points".into(),
        ));
    }
    let mut grid = PointGrid::new(pitch * 4.0);
    for (i, p) in ground.iter().enumerate() {
        grid.insert(*p, i as u32);
    }
    let (hypergraph, candidates) = translate_hypergraph(&ground, l, k, pitch, &grid)?;
    let max_edge = hypergraph
        .edges()
        .iter()
        .map(|e| e.len())
        .max()
        .unwrap_or(1);
    let (lower, _) = nstar_bounds(k, l);
    let disc_slack = (lower - ground.len() as f64 / max_edge as f64).max(0.0);
    Ok(NstarInstance {
        hypergraph,
        ground,
        candidates,
        pitch,
        max_edge,
        disc_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn square2() -> ConvexPolygon {
        ConvexPolygon::square(Vec2::ZERO, 2.0).unwrap()
    }

    #[test]
    fn nstar_examples() {
        let k = ConvexPolygon::regular(6, 1.0).unwrap();
        let (lo, hi) = nstar_bounds(&k, &k);
        assert_eq!(lo, 1.0);
        assert!((hi - 4.0).abs() < 1e-9);
        let (lo, hi) = nstar_bounds(&k, &k.scale(3.0));
        assert!((lo - 9.0).abs() < 1e-9 && (hi - 16.0).abs() < 1e-9);
        let sq = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        assert!((nstar_bounds(&sq, &sq).1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_covers_region_and_respects_bounds() {
        let cfg = TranslateConfig::default();
        let inst = build_translate_instance(&square2(), &cfg, &mut seeded_rng(3)).unwrap();
        let n = inst.lambda.len() as f64;
        assert!(n <= inst.packing_bound && n <= inst.volume_bound);
        assert!((inst.volume_bound - 1_471.864_9).abs() < 1e-3);
        for (i, p) in inst.lambda.iter().enumerate() {
            for q in &inst.lambda[i + 1..] {
                assert!(gauge(&inst.s, *p - *q) >= cfg.delta * (1.0 - 1e-9));
            }
        }
        let mut rng = seeded_rng(11);
        for _ in 0..20_000 {
            let z = Vec2::new(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0));
            assert!(inst.lambda.iter().any(|l| inst.t.contains(z - *l)));
        }
    }

    #[test]
    fn instance_is_reproducible_and_rejects_bad_delta() {
        let cfg = TranslateConfig::default();
        let a = build_translate_instance(&square2(), &cfg, &mut seeded_rng(3)).unwrap();
        let b = build_translate_instance(&square2(), &cfg, &mut seeded_rng(3)).unwrap();
        assert_eq!(a.lambda, b.lambda);
        let bad = TranslateConfig { delta: 1.0, ..cfg };
        assert!(build_translate_instance(&square2(), &bad, &mut seeded_rng(3)).is_err());
    }

    #[test]
    fn eroded_edges_contain_scaled_edges() {
        let k = ConvexPolygon::from_points(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(0.0, 3.0),
        ])
        .unwrap();
        let cfg = TranslateConfig {
            edge_shape: EdgeShape::Eroded,
            a: 2.0,
            ..TranslateConfig::default()
        };
        let inst = build_translate_instance(&k, &cfg, &mut seeded_rng(1)).unwrap();
        let scaled = inst.k.scale(1.0 - cfg.delta);
        assert!(inst.edge_shape.contains_polygon(&scaled, 1e-9));
        assert!(inst
            .k
            .contains_polygon(&inst.edge_shape.minkowski_sum(&inst.t), 1e-9));
    }

    #[test]
    fn discretized_nstar_has_expected_shape() {
        let k = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let l = ConvexPolygon::square(Vec2::ZERO, 2.0).unwrap();
        let inst = discretize_nstar(&k, &l, 0.1).unwrap();
        assert_eq!(inst.ground.len(), 21 * 21);
        assert_eq!(inst.max_edge, 11 * 11);
        assert!(inst.disc_slack >= 0.0);
    }
}
