use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::cells::{classify, largest_inscribed_square, CellRelation};
use super::family::HomothetFamily;
use crate::error::{Error, Result};
use crate::geometry::{clip_chain, search_lattice_covering, Aabb, ConvexPolygon, Placement, Vec2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VitaliConfig {
    /// Volume allowed for the second phase.
    pub epsilon0: f64,
    /// Phase one stops once the uncovered area drops below this.
    pub residual_target: f64,
    /// Smallest phase-one size class: bodies down to window·2^{-max_level}.
    pub max_level: u32,
    /// Candidate positions per body width (and per body height).
    pub pitch_divisions: u32,
    /// Side of the occupancy bitmap used to skip candidates.
    pub raster: usize,
    /// Phase two uses a covering lattice of ratio window·2^{-(last level + offset)}.
    pub phase2_offset: u32,
    /// Cap on phase-two placements.
    pub max_phase2: usize,
}

impl Default for VitaliConfig {
    fn default() -> Self {
        VitaliConfig {
            epsilon0: 0.05,
            residual_target: 1e-3,
            max_level: 10,
            pitch_divisions: 4,
            raster: 8192,
            phase2_offset: 2,
            max_phase2: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VitaliCover {
    /// Phase-one (pairwise disjoint, inside the window) placements first.
    pub placements: Vec<Placement>,
    pub members: Vec<u64>,
    pub phase1_count: usize,
    pub phase1_volume: f64,
    pub phase2_volume: f64,
    /// Exact uncovered area after phase one.
    pub uncovered_after_phase1: f64,
    /// Deepest size class used by phase one.
    pub last_level: u32,
    /// Lattice ratio of phase two (0 when phase two was not needed).
    pub phase2_ratio: f64,
    /// (1 + ε₀·diam K)²·area(window) + ε₀.
    pub volume_bound: f64,
}

impl VitaliCover {
    pub fn used_volume(&self) -> f64 {
        self.phase1_volume + self.phase2_volume
    }
}

/// Bodies bucketed by size class; class i lives on a grid of cell side
/// `unit·2^{-i}`, which is at least the bounding-box side of its bodies.
struct Index {
    unit: f64,
    levels: Vec<FxHashMap<(i64, i64), Vec<u32>>>,
}

impl Index {
    fn new(unit: f64) -> Self {
        Index {
            unit,
            levels: (0..64).map(|_| FxHashMap::default()).collect(),
        }
    }

    fn class(&self, extent: f64) -> usize {
        ((self.unit / extent).log2().floor().max(0.0) as usize).min(63)
    }

    fn cells(&self, level: usize, bb: &Aabb) -> impl Iterator<Item = (i64, i64)> {
        let s = self.unit / (1u64 << level) as f64;
        let (x0, x1) = ((bb.min.x / s).floor() as i64, (bb.max.x / s).floor() as i64);
        let (y0, y1) = ((bb.min.y / s).floor() as i64, (bb.max.y / s).floor() as i64);
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    fn insert(&mut self, id: u32, bb: &Aabb) {
        let level = self.class(bb.width().max(bb.height()));
        let cells: Vec<_> = self.cells(level, bb).collect();
        for c in cells {
            self.levels[level].entry(c).or_default().push(id);
        }
    }

    /// Bodies whose grid cells meet `bb` (with repeats).
    fn query(&self, bb: &Aabb, mut f: impl FnMut(u32) -> bool) -> bool {
        for (level, map) in self.levels.iter().enumerate() {
            if map.is_empty() {
                continue;
            }
            for c in self.cells(level, bb) {
                if let Some(ids) = map.get(&c) {
                    for &id in ids {
                        if !f(id) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Occupancy bitmap: a pixel is set when its center lies in a placed body.
struct Bitmap {
    n: usize,
    min: Vec2,
    px: f64,
    bits: Vec<u64>,
}

impl Bitmap {
    fn new(window: &Aabb, n: usize) -> Self {
        Bitmap {
            n,
            min: window.min,
            px: window.width() / n as f64,
            bits: vec![0; (n * n).div_ceil(64)],
        }
    }

    fn get(&self, p: Vec2) -> bool {
        let i = ((p.x - self.min.x) / self.px).floor();
        let j = ((p.y - self.min.y) / self.px).floor();
        if i < 0.0 || j < 0.0 || i >= self.n as f64 || j >= self.n as f64 {
            return false;
        }
        let k = j as usize * self.n + i as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    fn fill(&mut self, body: &ConvexPolygon) {
        let bb = body.bbox();
        let v = body.vertices();
        let row = |y: f64| ((y - self.min.y) / self.px - 0.5).ceil().max(0.0) as usize;
        let (j0, j1) = (row(bb.min.y), row(bb.max.y).min(self.n));
        for j in j0..j1 {
            let yc = self.min.y + (j as f64 + 0.5) * self.px;
            let (mut xl, mut xr) = (f64::INFINITY, f64::NEG_INFINITY);
            for e in 0..v.len() {
                let (a, b) = (v[e], v[(e + 1) % v.len()]);
                if (a.y - yc) * (b.y - yc) <= 0.0 && a.y != b.y {
                    let x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
                    xl = xl.min(x);
                    xr = xr.max(x);
                }
            }
            if xl > xr {
                continue;
            }
            let i0 = ((xl - self.min.x) / self.px - 0.5).ceil().max(0.0) as usize;
            let i1 = (((xr - self.min.x) / self.px - 0.5).floor() + 1.0).clamp(0.0, self.n as f64)
                as usize;
            for i in i0..i1 {
                let k = j * self.n + i;
                self.bits[k / 64] |= 1 << (k % 64);
            }
        }
    }
}

struct Placed {
    body: ConvexPolygon,
    bbox: Aabb,
    center: Vec2,
    inner: f64,
    outer: f64,
}

fn disjoint(
    a: &Placed,
    b: &ConvexPolygon,
    b_center: Vec2,
    b_inner: f64,
    b_outer: f64,
    bb: &Aabb,
    tol: f64,
) -> bool {
    if !a.bbox.overlaps(bb) {
        return true;
    }
    let d = (a.center - b_center).norm();
    if d >= a.outer + b_outer {
        return true;
    }
    if d < a.inner + b_inner {
        return false;
    }
    a.body.interiors_disjoint(b, tol)
}

/// Density-one covering of a square window by members of a nonincreasing
/// family. Phase one packs pairwise disjoint homothets inside the window,
/// largest size class first, scanning candidate positions in raster order.
/// Phase two covers what is left by a fine covering lattice, keeping only
/// translates that are not inside a single phase-one body.
pub fn vitali_cover(
    family: &mut HomothetFamily,
    window: Aabb,
    cfg: &VitaliConfig,
) -> Result<VitaliCover> {
    let side = window.width();
    if !(side > 0.0) || (window.height() - side).abs() > 1e-12 * side {
        return Err(Error::InvalidParameter(
            "the window must be a square".into(),
        ));
    }
    if !(cfg.epsilon0 > 0.0) || cfg.pitch_divisions == 0 || cfg.raster < 2 {
        return Err(Error::InvalidParameter(format!(
            "bad configuration {cfg:?}"
        )));
    }
    let k = family.base().clone();
    let area_k = k.area();
    let kbox = k.bbox();
    let (kw, kh) = (kbox.width(), kbox.height());
    let kd = kw.max(kh);
    let (sq_min, q) = largest_inscribed_square(&k);
    let sq_center = sq_min + Vec2::new(q / 2.0, q / 2.0);
    let k_center = k.centroid();
    let k_inner = k.inradius_about(k_center).max(0.0);
    let k_outer = k
        .vertices()
        .iter()
        .map(|v| (*v - k_center).norm())
        .fold(0.0, f64::max);
    let volume_bound = (1.0 + cfg.epsilon0 * k.diameter()).powi(2) * window.area() + cfg.epsilon0;
    let mut out = VitaliCover {
        placements: Vec::new(),
        members: Vec::new(),
        phase1_count: 0,
        phase1_volume: 0.0,
        phase2_volume: 0.0,
        uncovered_after_phase1: window.area(),
        last_level: 0,
        phase2_ratio: 0.0,
        volume_bound,
    };
    if cfg.residual_target >= window.area() {
        return Ok(out);
    }

    let tol = 1e-12 * side;
    let mut placed: Vec<Placed> = Vec::new();
    let mut index = Index::new(side);
    let mut bitmap = Bitmap::new(&window, cfg.raster);
    let mut uncovered = window.area();
    let pd = cfg.pitch_divisions as f64;

    'levels: for level in 0..=cfg.max_level {
        let x = side / (1u64 << level) as f64 / kd;
        let Some(mut idx) = family.next_at_most(x, 0) else {
            if placed.is_empty() {
                return Err(Error::BudgetExceeded(format!(
                    "no member has ratio ≤ {x}, so nothing fits in the window"
                )));
            }
            break;
        };
        out.last_level = level;
        let (px, py) = (x * kw / pd, x * kh / pd);
        let nx = ((side - x * kw) / px + 1e-9).floor() as i64;
        let ny = ((side - x * kh) / py + 1e-9).floor() as i64;
        for b in 0..=ny {
            for a in 0..=nx {
                if uncovered < cfg.residual_target {
                    break 'levels;
                }
                let lam = family.ratio(idx).expect("index in range");
                let p = window.min + Vec2::new(a as f64 * px, b as f64 * py);
                let t = p - kbox.min * lam;
                if lam * q >= 2.0 * bitmap.px && bitmap.get(t + sq_center * lam) {
                    continue;
                }
                let body = k.homothet(t, lam);
                let bb = body.bbox();
                if bb.max.x > window.max.x + tol || bb.max.y > window.max.y + tol {
                    continue;
                }
                let c = t + k_center * lam;
                let (ri, ro) = (k_inner * lam, k_outer * lam);
                let free = index.query(&bb, |id| {
                    disjoint(&placed[id as usize], &body, c, ri, ro, &bb, tol)
                });
                if !free {
                    continue;
                }
                family.consume(idx)?;
                let id = placed.len() as u32;
                index.insert(id, &bb);
                bitmap.fill(&body);
                placed.push(Placed {
                    body,
                    bbox: bb,
                    center: c,
                    inner: ri,
                    outer: ro,
                });
                out.placements.push(Placement::new(t, lam));
                out.members.push(idx);
                uncovered -= lam * lam * area_k;
                out.phase1_volume += lam * lam * area_k;
                match family.next_at_most(x, idx + 1) {
                    Some(i) => idx = i,
                    None => break 'levels,
                }
            }
        }
    }
    out.phase1_count = out.placements.len();
    out.uncovered_after_phase1 = uncovered.max(0.0);
    if uncovered <= 0.0 {
        return Ok(out);
    }
    phase_two(family, &window, &placed, &index, cfg, out)
}

/// Quadtree leaves (cells not inside a single body) down to `depth`.
fn residual_cells(window: &Aabb, placed: &[Placed], index: &Index, depth: u32) -> Vec<Aabb> {
    let mut stack = vec![(*window, 0u32)];
    let mut leaves = Vec::new();
    while let Some((cell, d)) = stack.pop() {
        let mut inside = false;
        let mut partial = false;
        index.query(&cell, |id| {
            let p = &placed[id as usize];
            match classify(&cell, &p.body, &p.bbox) {
                CellRelation::Inside => {
                    inside = true;
                    false
                }
                CellRelation::Partial => {
                    partial = true;
                    true
                }
                CellRelation::Disjoint => true,
            }
        });
        if inside {
            continue;
        }
        if !partial || d == depth {
            leaves.push(cell);
            continue;
        }
        let h = cell.width() / 2.0;
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let m = cell.min + Vec2::new(a * h, b * h);
            stack.push((Aabb::new(m, m + Vec2::new(h, h)), d + 1));
        }
    }
    leaves
}

fn phase_two(
    family: &mut HomothetFamily,
    window: &Aabb,
    placed: &[Placed],
    index: &Index,
    cfg: &VitaliConfig,
    mut out: VitaliCover,
) -> Result<VitaliCover> {
    let side = window.width();
    let (kc, c) = family.base().centered();
    let area_k = kc.area();
    let kd = {
        let b = kc.bbox();
        b.width().max(b.height())
    };
    let rho_level = out.last_level + cfg.phase2_offset;
    let rho = side / (1u64 << rho_level) as f64 / kd;
    out.phase2_ratio = rho;
    let lattice = search_lattice_covering(&kc).scaled(rho);
    let small = kc.scale(rho);
    let sb = small.bbox();
    // Few-vertex outer approximation of the small body for containment tests.
    let hull: Vec<Vec2> = if small.len() <= 8 {
        small.vertices().to_vec()
    } else {
        let mut chain = vec![
            sb.min,
            Vec2::new(sb.max.x, sb.min.y),
            sb.max,
            Vec2::new(sb.min.x, sb.max.y),
        ];
        for k in 0..4 {
            let n = Vec2::from_angle(std::f64::consts::FRAC_PI_4 * (2 * k + 1) as f64);
            chain = clip_chain(&chain, n, small.support(n));
        }
        chain
    };
    let leaves = residual_cells(window, placed, index, rho_level.saturating_sub(1));

    let mut seen: FxHashSet<(i64, i64)> = FxHashSet::default();
    let mut chosen: Vec<Vec2> = Vec::new();
    for cell in &leaves {
        // Lattice points x with x + small meeting the cell lie in this box.
        let lo = cell.min - sb.max;
        let hi = cell.max - sb.min;
        let corners = [lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(lo.x, hi.y)];
        let (mut a0, mut a1, mut b0, mut b1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in corners {
            let (a, b) = lattice.coords(p);
            a0 = a0.min(a);
            a1 = a1.max(a);
            b0 = b0.min(b);
            b1 = b1.max(b);
        }
        for i in a0.floor() as i64..=a1.ceil() as i64 {
            for j in b0.floor() as i64..=b1.ceil() as i64 {
                let x = lattice.point(i, j);
                if x.x < lo.x || x.x > hi.x || x.y < lo.y || x.y > hi.y {
                    continue;
                }
                if seen.contains(&(i, j)) {
                    continue;
                }
                let tb = Aabb::new(x + sb.min, x + sb.max);
                // Skip translates lying inside one phase-one body.
                let covered = !index.query(&tb, |id| {
                    let b = &placed[id as usize].body;
                    !hull.iter().all(|p| b.contains_tol(*p + x, 0.0))
                });
                if covered {
                    continue;
                }
                seen.insert((i, j));
                chosen.push(x);
                if chosen.len() > cfg.max_phase2 {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {} phase-two placements",
                        cfg.max_phase2
                    )));
                }
            }
        }
    }
    let estimate = chosen.len() as f64 * rho * rho * area_k;
    if estimate > cfg.epsilon0 {
        return Err(Error::BudgetExceeded(format!(
            "covering the residue needs volume {estimate} > ε₀ = {}",
            cfg.epsilon0
        )));
    }
    for x in chosen {
        let i = family
            .smallest_at_least(rho)
            .ok_or_else(|| Error::BudgetExceeded(format!("no member with ratio ≥ {rho}")))?;
        let lam = family.consume(i)?;
        // lam·kc ⊇ rho·kc because kc contains the origin.
        out.placements.push(Placement::new(x - c * lam, lam));
        out.members.push(i);
        out.phase2_volume += lam * lam * area_k;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homothet::RatioGenerator;
    use crate::verify::{grid_coverage, SamplePattern};

    fn unit_box(k: ConvexPolygon) -> ConvexPolygon {
        let b = k.bbox();
        k.scale(1.0 / b.width().max(b.height()))
    }

    fn coarse() -> VitaliConfig {
        VitaliConfig {
            epsilon0: 0.5,
            max_level: 6,
            raster: 512,
            ..VitaliConfig::default()
        }
    }

    fn dyadic(k: ConvexPolygon) -> HomothetFamily {
        HomothetFamily::generated(k, RatioGenerator::Dyadic { first_level: 1 }).unwrap()
    }

    #[test]
    fn square_tiles_exactly() {
        let k = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let v = vitali_cover(&mut dyadic(k), Aabb::unit(), &VitaliConfig::default()).unwrap();
        assert_eq!(v.placements.len(), 4);
        assert_eq!(v.phase1_count, 4);
        assert!((v.used_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_phase_one_is_disjoint_and_cover_is_complete() {
        let k = unit_box(ConvexPolygon::regular(3, 1.0).unwrap());
        let mut f = dyadic(k.clone());
        let v = vitali_cover(&mut f, Aabb::unit(), &coarse()).unwrap();
        let bodies: Vec<_> = v.placements[..v.phase1_count]
            .iter()
            .map(|p| p.body(&k))
            .collect();
        for (i, a) in bodies.iter().enumerate() {
            assert!(Aabb::unit()
                .to_polygon()
                .unwrap()
                .contains_polygon(a, 1e-12));
            for b in &bodies[i + 1..] {
                assert!(a.interiors_disjoint(b, 1e-12));
            }
        }
        let area: f64 = bodies.iter().map(|b| b.area()).sum();
        assert!((area - v.phase1_volume).abs() < 1e-9);
        assert!(v.phase2_volume <= 0.5);
        assert!(v.used_volume() <= v.volume_bound);
        let members: FxHashSet<u64> = v.members.iter().copied().collect();
        assert_eq!(members.len(), v.members.len());
        let r =
            grid_coverage(&k, &v.placements, Aabb::unit(), 300, SamplePattern::Centers).unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
    }

    #[test]
    fn polygon_cover_is_complete() {
        let k = unit_box(ConvexPolygon::regular(24, 1.0).unwrap());
        let v = vitali_cover(&mut dyadic(k.clone()), Aabb::unit(), &coarse()).unwrap();
        let r =
            grid_coverage(&k, &v.placements, Aabb::unit(), 300, SamplePattern::Centers).unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
        assert!(v.uncovered_after_phase1 < 0.1);
    }

    #[test]
    fn loose_target_needs_nothing() {
        let k = ConvexPolygon::regular(5, 1.0).unwrap();
        let cfg = VitaliConfig {
            residual_target: 1.0,
            ..VitaliConfig::default()
        };
        let v = vitali_cover(&mut dyadic(k), Aabb::unit(), &cfg).unwrap();
        assert!(v.placements.is_empty());
    }

    #[test]
    fn oversized_family_is_rejected() {
        let k = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let mut f = HomothetFamily::generated(k, RatioGenerator::Constant { ratio: 2.0 }).unwrap();
        assert!(matches!(
            vitali_cover(&mut f, Aabb::unit(), &VitaliConfig::default()),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn small_budget_is_reported() {
        let k = unit_box(ConvexPolygon::regular(3, 1.0).unwrap());
        let cfg = VitaliConfig {
            epsilon0: 1e-3,
            ..coarse()
        };
        assert!(matches!(
            vitali_cover(&mut dyadic(k), Aabb::unit(), &cfg),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn window_must_be_square() {
        let k = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let w = Aabb::new(Vec2::ZERO, Vec2::new(2.0, 1.0));
        assert!(matches!(
            vitali_cover(&mut dyadic(k), w, &VitaliConfig::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
