use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::family::HomothetFamily;
use crate::error::{Error, Result};
use crate::geometry::{clip_chain, ConvexPolygon, Placement, Vec2};
use crate::verify::multiplicities_at;

/// Angle below which an edge counts as facing a direction exactly.
const FACING_TOL: f64 = 1e-9;

/// Largest turn between consecutive edge normals for a polygon to stand in
/// for a smooth body (a disk approximation); a square turns by π/2.
pub const SMOOTH_TURN: f64 = PI / 12.0;

/// Largest angle between consecutive outer normals.
pub fn max_turn(k: &ConvexPolygon) -> f64 {
    let n = k.normals();
    (0..n.len())
        .map(|i| {
            let (a, b) = (n[i], n[(i + 1) % n.len()]);
            a.cross(b).atan2(a.dot(b)).abs()
        })
        .fold(0.0, f64::max)
}

/// Edge-interior points of K whose tangent halfplanes cut out a bounded
/// polygon L ⊇ K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothFrame {
    pub edges: Vec<usize>,
    /// Edge midpoints.
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub polygon: ConvexPolygon,
}

/// Widest angular gap (start angle, width) between the sorted normals; the
/// normals positively span the plane iff the gap is below π.
fn widest_gap(normals: &[Vec2]) -> (f64, f64) {
    let mut a: Vec<f64> = normals
        .iter()
        .map(|n| n.angle().rem_euclid(2.0 * PI))
        .collect();
    a.sort_by(f64::total_cmp);
    let mut best = (a[a.len() - 1], a[0] + 2.0 * PI - a[a.len() - 1]);
    for w in a.windows(2) {
        if w[1] - w[0] > best.1 {
            best = (w[0], w[1] - w[0]);
        }
    }
    best
}

/// Frame from the edges facing the axis directions, topped up with the
/// edge facing the bisector of the widest normal gap until the normals
/// positively span the plane.
pub fn find_smooth_frame(k: &ConvexPolygon) -> Result<SmoothFrame> {
    let mut edges: Vec<usize> = Vec::new();
    for dir in [
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(0.0, -1.0),
    ] {
        let (i, _) = k.edge_facing(dir);
        if !edges.contains(&i) {
            edges.push(i);
        }
    }
    loop {
        let normals: Vec<Vec2> = edges.iter().map(|&i| k.normals()[i]).collect();
        let (start, gap) = widest_gap(&normals);
        if gap < PI - 1e-9 {
            break;
        }
        let (i, _) = k.edge_facing(Vec2::from_angle(start + gap / 2.0));
        if edges.contains(&i) || edges.len() >= 4 {
            return Err(Error::FrameNotFound(format!(
                "normals of edges {edges:?} leave a gap of {gap} rad"
            )));
        }
        edges.push(i);
    }
    edges.sort_unstable();
    let normals: Vec<Vec2> = edges.iter().map(|&i| k.normals()[i]).collect();
    let points: Vec<Vec2> = edges
        .iter()
        .map(|&i| {
            let (a, b) = k.edge(i);
            (a + b) * 0.5
        })
        .collect();
    let bb = k.bbox();
    let r = 1e3 * (k.diameter() + bb.center().norm());
    let c = bb.center();
    let mut chain = vec![
        c + Vec2::new(-r, -r),
        c + Vec2::new(r, -r),
        c + Vec2::new(r, r),
        c + Vec2::new(-r, r),
    ];
    for &i in &edges {
        chain = clip_chain(&chain, k.normals()[i], k.offsets()[i]);
    }
    let polygon = ConvexPolygon::from_convex_chain(chain)
        .map_err(|e| Error::FrameNotFound(format!("tangent halfplanes: {e}")))?;
    if polygon
        .vertices()
        .iter()
        .any(|v| (*v - c).x.abs() >= 0.5 * r || (*v - c).y.abs() >= 0.5 * r)
    {
        return Err(Error::FrameNotFound(
            "tangent halfplanes are unbounded".into(),
        ));
    }
    Ok(SmoothFrame {
        edges,
        points,
        normals,
        polygon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    /// Radius of the window B(0, extent) to cover.
    pub extent: f64,
    /// Clearance between non-adjacent shells.
    pub epsilon: f64,
    /// Treat K as smooth: square shells are used when K turns by at most
    /// [`SMOOTH_TURN`] at every vertex and has edges facing all four axes.
    pub smooth: bool,
    pub max_shells: usize,
}

impl Default for RingConfig {
    fn default() -> Self {
        RingConfig {
            extent: 50.0,
            epsilon: 0.1,
            smooth: true,
            max_shells: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    /// Q = alpha·P is the region this shell completes.
    pub alpha: f64,
    pub placements: Vec<Placement>,
    pub members: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSchedule {
    /// Shell shape P: the square [−1, 1]² or −L for a frame L.
    pub shape: ConvexPolygon,
    pub frame: Option<SmoothFrame>,
    pub smooth_used: bool,
    pub epsilon: f64,
    pub extent: f64,
    /// Shell 0 holds the single starting body.
    pub shells: Vec<Shell>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingProperties {
    /// Opposite-facet pairs within a shell (square shells only).
    pub opposite_pairs: usize,
    pub opposite_violations: usize,
    /// Pairs from shells at least two apart.
    pub far_pairs: usize,
    pub far_violations: usize,
    /// Shells whose bodies, grown by ε, escape the next shell region.
    pub growth_violations: usize,
}

impl RingProperties {
    pub fn holds(&self) -> bool {
        self.opposite_violations == 0 && self.far_violations == 0 && self.growth_violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingCertificate {
    pub probes: usize,
    pub min_multiplicity: u32,
    pub max_multiplicity: u32,
    /// 4 with square shells, 8 otherwise.
    pub bound: u32,
}

impl RingCertificate {
    pub fn passes(&self) -> bool {
        self.min_multiplicity >= 1 && self.max_multiplicity <= self.bound
    }
}

impl RingSchedule {
    pub fn placements(&self) -> Vec<Placement> {
        self.shells
            .iter()
            .flat_map(|s| s.placements.iter().copied())
            .collect()
    }

    /// Shell index of every placement, in [`Self::placements`] order.
    pub fn shell_tags(&self) -> Vec<usize> {
        self.shells
            .iter()
            .enumerate()
            .flat_map(|(i, s)| std::iter::repeat_n(i, s.placements.len()))
            .collect()
    }

    /// Exact disjointness and growth checks behind the multiplicity bound.
    pub fn verify_properties(&self, base: &ConvexPolygon) -> RingProperties {
        let bodies: Vec<Vec<ConvexPolygon>> = self
            .shells
            .iter()
            .map(|s| s.placements.iter().map(|p| p.body(base)).collect())
            .collect();
        let mut r = RingProperties::default();
        let strict = -1e-12 * self.extent.max(1.0);
        if self.smooth_used {
            let normals = self.shape.normals();
            for shell in bodies.iter().skip(1) {
                for a in 0..shell.len() {
                    for b in a + 1..shell.len() {
                        if (normals[a] + normals[b]).norm() < 1e-9 {
                            r.opposite_pairs += 1;
                            if !shell[a].interiors_disjoint(&shell[b], strict) {
                                r.opposite_violations += 1;
                            }
                        }
                    }
                }
            }
        }
        for i in 0..bodies.len() {
            for l in i + 2..bodies.len() {
                for a in &bodies[i] {
                    for b in &bodies[l] {
                        r.far_pairs += 1;
                        if !a.interiors_disjoint(b, strict) {
                            r.far_violations += 1;
                        }
                    }
                }
            }
        }
        for k in 0..self.shells.len().saturating_sub(1) {
            let next = self.shells[k + 1].alpha;
            let ok = self.shape.normals().iter().all(|u| {
                let h = bodies[..=k]
                    .iter()
                    .flatten()
                    .map(|b| b.support(*u))
                    .fold(f64::NEG_INFINITY, f64::max);
                h + self.epsilon <= next * self.shape.support(*u) * (1.0 + 1e-12)
            });
            if !ok {
                r.growth_violations += 1;
            }
        }
        r
    }

    /// Multiplicity at `probes` uniform points of B(0, extent).
    pub fn certify<R: Rng + ?Sized>(
        &self,
        base: &ConvexPolygon,
        probes: usize,
        rng: &mut R,
    ) -> RingCertificate {
        let bodies: Vec<ConvexPolygon> = self.placements().iter().map(|p| p.body(base)).collect();
        let points: Vec<Vec2> = (0..probes)
            .map(|_| {
                let r = self.extent * rng.random::<f64>().sqrt();
                Vec2::from_angle(rng.random::<f64>() * 2.0 * PI) * r
            })
            .collect();
        let m = multiplicities_at(&bodies, &points);
        RingCertificate {
            probes,
            min_multiplicity: m.iter().copied().min().unwrap_or(0),
            max_multiplicity: m.iter().copied().max().unwrap_or(0),
            bound: if self.smooth_used { 4 } else { 8 },
        }
    }
}

/// Largest t with t·w ∈ P, for P containing the origin.
fn ray_exit(p: &ConvexPolygon, w: Vec2) -> f64 {
    p.normals()
        .iter()
        .zip(p.offsets())
        .filter(|(n, _)| n.dot(w) > 0.0)
        .map(|(n, c)| c / n.dot(w))
        .fold(f64::INFINITY, f64::min)
}

/// Covers B(0, extent) by members of an unbounded family so that every
/// point lies in at most 4 (square shells) or 8 (frame shells) of them.
/// Each shell adds one body per facet of the shell shape, placed beyond the
/// previous shell with its flat edge on a line ε/2 inside the facet.
pub fn ring_cover(family: &mut HomothetFamily, cfg: &RingConfig) -> Result<RingSchedule> {
    if !(cfg.extent > 0.0) || !(cfg.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "extent {} and ε {} must be positive",
            cfg.extent, cfg.epsilon
        )));
    }
    let (kc, c) = family.base().centered();
    let axes = [
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(0.0, -1.0),
    ];
    let axis_edges = axes.iter().all(|u| kc.edge_facing(*u).1 < FACING_TOL);
    let (shape, frame, smooth_used) = if cfg.smooth && axis_edges && max_turn(&kc) <= SMOOTH_TURN {
        (ConvexPolygon::square(Vec2::ZERO, 2.0)?, None, true)
    } else {
        let f = find_smooth_frame(&kc)?;
        (f.polygon.reflect(), Some(f), false)
    };
    let facets: Vec<(Vec2, f64, usize)> = shape
        .normals()
        .iter()
        .zip(shape.offsets())
        .map(|(u, h)| {
            let (e, ang) = kc.edge_facing(-*u);
            debug_assert!(ang < FACING_TOL);
            (*u, *h, e)
        })
        .collect();
    let min_h = facets.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);

    let take = |family: &mut HomothetFamily, at_least: f64| -> Result<(u64, f64)> {
        let i = family.smallest_at_least(at_least).ok_or_else(|| {
            Error::RatioUnavailable(format!("no unused member with ratio ≥ {at_least}"))
        })?;
        Ok((i, family.consume(i)?))
    };

    let (i0, mu0) = take(family, f64::MIN_POSITIVE)?;
    let body0 = kc.scale(mu0);
    let alpha0 = shape
        .vertices()
        .iter()
        .map(|v| ray_exit(&body0, *v))
        .fold(f64::INFINITY, f64::min);
    let mut bodies = vec![body0];
    let mut shells = vec![Shell {
        alpha: alpha0,
        placements: vec![Placement::new(-c * mu0, mu0)],
        members: vec![i0],
    }];
    let mut alpha = alpha0;
    while alpha * min_h < cfg.extent {
        if shells.len() > cfg.max_shells {
            return Err(Error::BudgetExceeded(format!(
                "more than {} shells",
                cfg.max_shells
            )));
        }
        let next_alpha = facets
            .iter()
            .map(|(u, h, _)| {
                let s = bodies
                    .iter()
                    .map(|b| b.support(*u))
                    .fold(f64::NEG_INFINITY, f64::max);
                (s + cfg.epsilon) / h
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let region = shape.scale(next_alpha);
        let mut shell = Shell {
            alpha: next_alpha,
            placements: Vec::new(),
            members: Vec::new(),
        };
        let mut new_bodies = Vec::new();
        for (u, h, e) in &facets {
            let line = alpha * h;
            let piece = clip_chain(region.vertices(), -*u, -line);
            let g = ConvexPolygon::from_convex_chain(piece.clone())?.centroid();
            let back = line - cfg.epsilon / 2.0;
            let p = g - *u * (u.dot(g) - back);
            let (a, b) = kc.edge(*e);
            let m = (a + b) * 0.5;
            let shifted = kc.translate(-m);
            let need = piece
                .iter()
                .map(|v| 1.0 / ray_exit(&shifted, *v - p))
                .fold(0.0, f64::max);
            let (i, mu) = take(family, need)?;
            let x = p - m * mu;
            new_bodies.push(kc.homothet(x, mu));
            shell.placements.push(Placement::new(x - c * mu, mu));
            shell.members.push(i);
        }
        bodies.extend(new_bodies);
        shells.push(shell);
        alpha = next_alpha;
    }
    Ok(RingSchedule {
        shape,
        frame,
        smooth_used,
        epsilon: cfg.epsilon,
        extent: cfg.extent,
        shells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homothet::RatioGenerator;
    use crate::seeded_rng;
    use rand::Rng;

    fn geometric(k: ConvexPolygon, factor: f64) -> HomothetFamily {
        HomothetFamily::generated(k, RatioGenerator::Geometric { first: 1.0, factor }).unwrap()
    }

    fn check(k: ConvexPolygon, cfg: &RingConfig, seed: u64) -> RingSchedule {
        let mut f = geometric(k.clone(), 1.5);
        let s = ring_cover(&mut f, cfg).unwrap();
        let props = s.verify_properties(&k);
        assert!(props.holds(), "{props:?}");
        let cert = s.certify(&k, 20_000, &mut seeded_rng(seed));
        assert!(cert.passes(), "{cert:?}");
        s
    }

    #[test]
    fn square_frame_uses_the_four_midpoints() {
        let f = find_smooth_frame(&ConvexPolygon::square(Vec2::ZERO, 2.0).unwrap()).unwrap();
        assert_eq!(f.points.len(), 4);
        for p in &f.points {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert!((f.polygon.area() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn triangle_frame_is_the_triangle() {
        let t = ConvexPolygon::regular(3, 1.0).unwrap();
        let f = find_smooth_frame(&t).unwrap();
        assert_eq!(f.edges.len(), 3);
        assert!((f.polygon.area() - t.area()).abs() < 1e-9);
    }

    #[test]
    fn polygon_with_axis_edges_uses_square_shells() {
        let s = check(
            ConvexPolygon::regular(64, 1.0).unwrap(),
            &RingConfig::default(),
            1,
        );
        assert!(s.smooth_used);
        assert!(s.shells.iter().skip(1).all(|sh| sh.placements.len() == 4));
    }

    #[test]
    fn triangle_uses_frame_shells() {
        let s = check(
            ConvexPolygon::regular(3, 1.0).unwrap(),
            &RingConfig::default(),
            2,
        );
        assert!(!s.smooth_used);
        assert!(s.frame.is_some());
    }

    #[test]
    fn diamond_falls_back_to_a_frame() {
        let d = ConvexPolygon::from_points(&[
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ])
        .unwrap();
        let s = check(d, &RingConfig::default(), 3);
        assert!(!s.smooth_used);
    }

    #[test]
    fn random_polygons() {
        let mut rng = seeded_rng(44);
        for seed in 0..4 {
            let pts: Vec<Vec2> = (0..20)
                .map(|_| {
                    Vec2::from_angle(rng.random::<f64>() * 2.0 * PI) * (0.5 + rng.random::<f64>())
                })
                .collect();
            let k = ConvexPolygon::from_points(&pts).unwrap();
            check(
                k,
                &RingConfig {
                    extent: 30.0,
                    ..RingConfig::default()
                },
                seed,
            );
        }
    }

    #[test]
    fn square_is_not_smooth() {
        let sq = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let s = check(sq, &RingConfig::default(), 5);
        assert!(!s.smooth_used);
        assert_eq!(s.frame.as_ref().unwrap().points.len(), 4);
    }

    #[test]
    fn tiny_extent_needs_one_body() {
        let k = ConvexPolygon::regular(8, 1.0).unwrap();
        let mut f = geometric(k, 2.0);
        let s = ring_cover(
            &mut f,
            &RingConfig {
                extent: 0.1,
                ..RingConfig::default()
            },
        )
        .unwrap();
        assert_eq!(s.placements().len(), 1);
    }

    #[test]
    fn bounded_family_runs_out() {
        let k = ConvexPolygon::regular(8, 1.0).unwrap();
        let mut f = HomothetFamily::generated(k, RatioGenerator::Constant { ratio: 1.0 }).unwrap();
        assert!(matches!(
            ring_cover(&mut f, &RingConfig::default()),
            Err(Error::RatioUnavailable(_))
        ));
    }
}
