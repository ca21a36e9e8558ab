use rand::Rng;
use rand_distr::StandardNormal;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::strips::Strip;

/// Uniform point on S² (normalized Gaussian triple).
pub fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v * (1.0 / n);
        }
    }
}

/// Knobs for [`build_sphere_net`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetConfig {
    /// Sampling stops after `streak_factor · size` consecutive rejections.
    pub streak_factor: u64,
    /// Hard cap on the number of net points.
    pub max_points: usize,
    /// Cap on random draws; `None` picks a multiple of the expected size.
    pub max_draws: Option<u64>,
    /// Subdivision depth of the deterministic completion pass.
    pub max_depth: u32,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            streak_factor: 50,
            max_points: 200_000,
            max_draws: None,
            max_depth: 12,
        }
    }
}

/// A finite set of unit vectors whose caps of chordal radius
/// `covering_radius` cover S², with pairwise distances at least `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereNet {
    pub points: Vec<Vec3>,
    /// Separation radius r used while building.
    pub radius: f64,
    /// Certified covering radius; equals `radius` unless the completion pass
    /// hit its depth limit somewhere, in which case it is slightly larger.
    pub covering_radius: f64,
    /// Longest run of consecutive rejections reached during sampling.
    pub streak: u64,
    /// Whether the rejection streak rule was met before the draw cap.
    pub saturated: bool,
    /// Points added by the completion pass.
    pub completion_added: usize,
    /// Smallest pairwise distance (infinite for a single point).
    pub min_separation: f64,
}

struct SphereIndex {
    cell: f64,
    map: FxHashMap<(i32, i32, i32), Vec<u32>>,
}

impl SphereIndex {
    fn new(cell: f64) -> Self {
        SphereIndex {
            cell,
            map: FxHashMap::default(),
        }
    }

    fn key(&self, p: Vec3) -> (i32, i32, i32) {
        let k = |t: f64| ((t + 1.0) / self.cell).floor() as i32;
        (k(p.x), k(p.y), k(p.z))
    }

    fn insert(&mut self, p: Vec3, id: u32) {
        self.map.entry(self.key(p)).or_default().push(id);
    }

    /// Calls `f` on every stored index whose cell may hold a point within
    /// `radius` of `p`.
    fn for_each_near(&self, p: Vec3, radius: f64, mut f: impl FnMut(u32)) {
        let reach = (radius / self.cell).ceil() as i32;
        let (x, y, z) = self.key(p);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for dz in -reach..=reach {
                    if let Some(ids) = self.map.get(&(x + dx, y + dy, z + dz)) {
                        ids.iter().for_each(|&i| f(i));
                    }
                }
            }
        }
    }
}

struct NetBuilder<'a> {
    r: f64,
    points: Vec<Vec3>,
    index: SphereIndex,
    cfg: &'a NetConfig,
    covering_radius: f64,
}

impl NetBuilder<'_> {
    fn nearest_within(&self, p: Vec3, radius: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.index.for_each_near(p, radius, |i| {
            let d = self.points[i as usize].dist(p);
            if d < radius && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        });
        best
    }

    fn push(&mut self, p: Vec3) -> Result<()> {
        if self.points.len() >= self.cfg.max_points {
            return Err(Error::BudgetExceeded(format!(
                "sphere net at radius {} needs more than {} points",
                self.r, self.cfg.max_points
            )));
        }
        self.index.insert(p, self.points.len() as u32);
        self.points.push(p);
        Ok(())
    }

    fn face_point(face: usize, u: f64, v: f64) -> Vec3 {
        let axis = face / 2;
        let sign = if face.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut c = [0.0; 3];
        c[axis] = sign;
        c[(axis + 1) % 3] = u;
        c[(axis + 2) % 3] = v;
        Vec3::new(c[0], c[1], c[2]).normalized()
    }

    /// Certifies a gnomonic face cell, adding points where needed. A cell is
    /// the spherical hull of its corners, so a cap of radius at most √2 that
    /// holds all four corners holds the whole cell.
    fn audit(&mut self, face: usize, u0: f64, v0: f64, side: f64, depth: u32) -> Result<()> {
        let corners = [
            Self::face_point(face, u0, v0),
            Self::face_point(face, u0 + side, v0),
            Self::face_point(face, u0 + side, v0 + side),
            Self::face_point(face, u0, v0 + side),
        ];
        let c = Self::face_point(face, u0 + side / 2.0, v0 + side / 2.0);
        let rho = corners.iter().map(|q| q.dist(c)).fold(0.0, f64::max);
        let r = self.r;
        let inner = r * (1.0 - 1e-12);
        let mut certified = false;
        let mut nearest = f64::INFINITY;
        self.index.for_each_near(c, r + rho, |i| {
            if certified {
                return;
            }
            let q = self.points[i as usize];
            nearest = nearest.min(q.dist(c));
            if corners.iter().all(|k| k.dist(q) <= inner) {
                certified = true;
            }
        });
        if certified {
            return Ok(());
        }
        if nearest >= r && rho <= inner {
            return self.push(c);
        }
        if depth >= self.cfg.max_depth {
            // Every point of the cell is within nearest + rho of some net point.
            self.covering_radius = self.covering_radius.max(nearest + rho);
            return Ok(());
        }
        let h = side / 2.0;
        for (du, dv) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
            self.audit(face, u0 + du, v0 + dv, h, depth + 1)?;
        }
        Ok(())
    }
}

/// Builds a net of separation `r` whose caps of radius `covering_radius`
/// cover S².
///
/// Uniform points are accepted when at distance at least `r` from every kept
/// point until the rejection streak reaches `streak_factor · size` (or the
/// draw cap is hit). A deterministic pass over the six gnomonic cube faces
/// then certifies every cell against a single cap, adding cell centers
/// wherever no kept point lies within `r`.
pub fn build_sphere_net<R: Rng + ?Sized>(
    r: f64,
    cfg: &NetConfig,
    rng: &mut R,
) -> Result<SphereNet> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("net radius {r}")));
    }
    if r >= 2.0 {
        let p = uniform_sphere_point(rng);
        return Ok(SphereNet {
            points: vec![p],
            radius: r,
            covering_radius: r,
            streak: 0,
            saturated: true,
            completion_added: 0,
            min_separation: f64::INFINITY,
        });
    }
    if r > std::f64::consts::SQRT_2 {
        return Err(Error::InvalidParameter(format!(
            "net radius {r} lies between √2 and 2, where caps are not convex"
        )));
    }
    let expected = (9.0 / (r * r)).ceil() as u64;
    let max_draws = cfg.max_draws.unwrap_or(40 * expected);
    let mut b = NetBuilder {
        r,
        points: Vec::new(),
        index: SphereIndex::new(1.5 * r),
        cfg,
        covering_radius: r,
    };
    let mut streak = 0u64;
    let mut best_streak = 0u64;
    let mut saturated = false;
    let mut draws = 0u64;
    loop {
        if !b.points.is_empty() && streak >= cfg.streak_factor * b.points.len() as u64 {
            saturated = true;
            break;
        }
        if draws >= max_draws {
            break;
        }
        draws += 1;
        let p = uniform_sphere_point(rng);
        if b.nearest_within(p, r).is_none() {
            b.push(p)?;
            streak = 0;
        } else {
            streak += 1;
            best_streak = best_streak.max(streak);
        }
    }
    let before = b.points.len();
    let g = ((2.0 * std::f64::consts::SQRT_2 / r).ceil() as usize).max(1);
    let side = 2.0 / g as f64;
    for face in 0..6 {
        for i in 0..g {
            for j in 0..g {
                let u0 = -1.0 + i as f64 * side;
                let v0 = -1.0 + j as f64 * side;
                b.audit(face, u0, v0, side, 0)?;
            }
        }
    }
    let completion_added = b.points.len() - before;
    let mut min_sep = f64::INFINITY;
    for (i, p) in b.points.iter().enumerate() {
        b.index.for_each_near(*p, r, |j| {
            if j as usize != i {
                min_sep = min_sep.min(b.points[j as usize].dist(*p));
            }
        });
    }
    Ok(SphereNet {
        covering_radius: b.covering_radius,
        points: b.points,
        radius: r,
        streak: best_streak,
        saturated,
        completion_added,
        min_separation: min_sep,
    })
}

fn check_margin(strips: &[Strip], net: &SphereNet) -> Result<()> {
    for s in strips {
        if s.half_width <= net.covering_radius {
            return Err(Error::MarginTooSmall {
                width: s.half_width,
                radius: net.covering_radius,
            });
        }
    }
    Ok(())
}

/// Sound covering certificate: true when every net point lies in some strip
/// shrunk by the net's covering radius (or in a strip of half-width ≥ 1).
/// `false` is inconclusive.
pub fn certify_strip_cover(strips: &[Strip], net: &SphereNet) -> Result<bool> {
    check_margin(strips, net)?;
    if strips.is_empty() {
        return Ok(false);
    }
    if strips.iter().any(|s| s.half_width >= 1.0) {
        return Ok(true);
    }
    let rho = net.covering_radius;
    Ok(net.points.iter().all(|p| {
        strips
            .iter()
            .any(|s| s.center.dot(*p).abs() <= s.half_width - rho)
    }))
}

/// Sound upper bound on the largest number of strips sharing a point of S²:
/// the maximum over net points of the count of strips expanded by the net's
/// covering radius.
pub fn certify_strip_multiplicity(strips: &[Strip], net: &SphereNet) -> u32 {
    let rho = net.covering_radius;
    net.points
        .iter()
        .map(|p| {
            strips
                .iter()
                .filter(|s| s.center.dot(*p).abs() <= s.half_width + rho)
                .count() as u32
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn huge_radius_gives_one_point() {
        let net = build_sphere_net(2.0, &NetConfig::default(), &mut seeded_rng(1)).unwrap();
        assert_eq!(net.points.len(), 1);
        assert!(build_sphere_net(1.8, &NetConfig::default(), &mut seeded_rng(1)).is_err());
    }

    #[test]
    fn net_is_packing_and_deterministic() {
        let cfg = NetConfig::default();
        let a = build_sphere_net(0.2, &cfg, &mut seeded_rng(5)).unwrap();
        let b = build_sphere_net(0.2, &cfg, &mut seeded_rng(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.min_separation >= 0.2);
        assert!(a.covering_radius >= 0.2 && a.covering_radius < 0.2 * 1.01);
        // Brute-force packing check.
        for (i, p) in a.points.iter().enumerate() {
            for q in &a.points[i + 1..] {
                assert!(p.dist(*q) >= 0.2);
            }
        }
    }

    #[test]
    fn net_covers_random_directions() {
        let net = build_sphere_net(0.15, &NetConfig::default(), &mut seeded_rng(2)).unwrap();
        let mut rng = seeded_rng(99);
        for _ in 0..20_000 {
            let v = uniform_sphere_point(&mut rng);
            let d = net
                .points
                .iter()
                .map(|p| p.dist(v))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= net.covering_radius);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = NetConfig {
            max_points: 10,
            ..NetConfig::default()
        };
        assert!(matches!(
            build_sphere_net(0.1, &cfg, &mut seeded_rng(0)),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn coordinate_strips_are_certified() {
        let net = build_sphere_net(0.01, &NetConfig::default(), &mut seeded_rng(4)).unwrap();
        let strips: Vec<Strip> = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ]
        .iter()
        .map(|c| Strip::new(*c, 0.6).unwrap())
        .collect();
        assert!(certify_strip_cover(&strips, &net).unwrap());
        assert_eq!(certify_strip_multiplicity(&strips, &net), 3);
        assert!(!certify_strip_cover(&[], &net).unwrap());
        let whole = [Strip::new(Vec3::new(0.0, 0.0, 1.0), 1.0).unwrap()];
        assert!(certify_strip_cover(&whole, &net).unwrap());
        let thin = [Strip::new(Vec3::new(0.0, 0.0, 1.0), 0.005).unwrap()];
        assert!(matches!(
            certify_strip_cover(&thin, &net),
            Err(Error::MarginTooSmall { .. })
        ));
    }

    #[test]
    fn identical_strips_multiplicity() {
        let net = build_sphere_net(0.3, &NetConfig::default(), &mut seeded_rng(4)).unwrap();
        let s = Strip::new(Vec3::new(0.0, 1.0, 0.0), 0.5).unwrap();
        assert_eq!(certify_strip_multiplicity(&vec![s; 7], &net), 7);
    }
}
