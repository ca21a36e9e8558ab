use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::vec::Vec2;
use crate::error::{Error, Result};

/// Default absolute tolerance for containment and clipping.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative tolerance below which cross products count as collinear.
const COLLINEAR_REL: f64 = 1e-13;

/// Anything with a support function h(u) = max over the set of <x, u>.
pub trait SupportFunction {
    fn support(&self, dir: Vec2) -> f64;
    /// Some point of the set.
    fn reference_point(&self) -> Vec2;
}

impl SupportFunction for Vec2 {
    fn support(&self, dir: Vec2) -> f64 {
        self.dot(dir)
    }
    fn reference_point(&self) -> Vec2 {
        *self
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Aabb { min, max }
    }

    pub fn unit() -> Self {
        Aabb::new(Vec2::ZERO, Vec2::new(1.0, 1.0))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x < o.max.x && o.min.x < self.max.x && self.min.y < o.max.y && o.min.y < self.max.y
    }

    pub fn to_polygon(&self) -> Result<ConvexPolygon> {
        ConvexPolygon::rectangle(self.min, self.max)
    }
}

/// A convex polygon with counterclockwise, strictly convex vertices.
///
/// Edge `i` runs from vertex `i` to vertex `i + 1`; its outer unit normal and
/// offset are cached so halfplane tests are cheap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    normals: Vec<Vec2>,
    offsets: Vec<f64>,
}

impl TryFrom<Vec<Vec2>> for ConvexPolygon {
    type Error = Error;
    fn try_from(v: Vec<Vec2>) -> Result<Self> {
        ConvexPolygon::from_points(&v)
    }
}

impl From<ConvexPolygon> for Vec<Vec2> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

fn scale_of(points: &[Vec2]) -> f64 {
    let mut s: f64 = 0.0;
    for p in points {
        s = s.max(p.x.abs()).max(p.y.abs());
    }
    s.max(f64::MIN_POSITIVE)
}

fn turn(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a - o).cross(b - o)
}

/// Signed shoelace area of a vertex chain.
pub fn chain_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * s
}

/// Clips a convex vertex chain to the halfplane `n·x <= c`.
pub fn clip_chain(v: &[Vec2], n: Vec2, c: f64) -> Vec<Vec2> {
    let len = v.len();
    let mut out = Vec::with_capacity(len + 1);
    if len == 0 {
        return out;
    }
    for i in 0..len {
        let cur = v[i];
        let nxt = v[(i + 1) % len];
        let dc = n.dot(cur) - c;
        let dn = n.dot(nxt) - c;
        if dc <= 0.0 {
            out.push(cur);
        }
        if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0) {
            let t = dc / (dc - dn);
            out.push(cur + (nxt - cur) * t);
        }
    }
    out
}

impl ConvexPolygon {
    /// Convex hull of `points`; fails on hulls with fewer than three
    /// vertices or zero area.
    pub fn from_points(points: &[Vec2]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateBody(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateBody("non-finite coordinate".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        let s = scale_of(&pts);
        let eps = COLLINEAR_REL * s * s;
        let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() + 1);
        for &p in &pts {
            while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        let lower_len = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower_len
                && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        Self::from_convex_chain(hull)
    }

    /// Builds a polygon from a vertex chain already known to be convex and
    /// counterclockwise, dropping duplicate and collinear vertices.
    pub fn from_convex_chain(mut v: Vec<Vec2>) -> Result<Self> {
        let s = scale_of(&v);
        let dup = 1e-12 * s;
        let eps = COLLINEAR_REL * s * s;
        loop {
            let before = v.len();
            if v.len() >= 2 {
                let mut w: Vec<Vec2> = Vec::with_capacity(v.len());
                for &p in &v {
                    if w.last().is_none_or(|q: &Vec2| (p - *q).norm() > dup) {
                        w.push(p);
                    }
                }
                while w.len() >= 2 && (w[0] - w[w.len() - 1]).norm() <= dup {
                    w.pop();
                }
                v = w;
            }
            if v.len() >= 3 {
                let n = v.len();
                let mut keep = Vec::with_capacity(n);
                for i in 0..n {
                    let prev = v[(i + n - 1) % n];
                    let next = v[(i + 1) % n];
                    if turn(prev, v[i], next) > eps {
                        keep.push(v[i]);
                    }
                }
                v = keep;
            }
            if v.len() == before || v.len() < 3 {
                break;
            }
        }
        if v.len() < 3 {
            return Err(Error::DegenerateBody(format!(
                "hull has {} vertices",
                v.len()
            )));
        }
        let area = chain_area(&v);
        if !(area > eps) {
            return Err(Error::DegenerateBody(format!("hull area {area}")));
        }
        let n = v.len();
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for i in 0..n {
            let e = v[(i + 1) % n] - v[i];
            let nrm = Vec2::new(e.y, -e.x).normalized();
            normals.push(nrm);
            offsets.push(nrm.dot(v[i]));
        }
        Ok(ConvexPolygon {
            vertices: v,
            normals,
            offsets,
        })
    }

    /// Axis-aligned rectangle with the given corners.
    pub fn rectangle(min: Vec2, max: Vec2) -> Result<Self> {
        Self::from_convex_chain(vec![
            min,
            Vec2::new(max.x, min.y),
            max,
            Vec2::new(min.x, max.y),
        ])
    }

    /// Axis-aligned square of side `side` centered at `center`.
    pub fn square(center: Vec2, side: f64) -> Result<Self> {
        let h = Vec2::new(side / 2.0, side / 2.0);
        Self::rectangle(center - h, center + h)
    }

    /// Regular `n`-gon centered at the origin with the given circumradius.
    ///
    /// Vertices sit at angles (k + 1/2)·2π/n, so edge normals include the
    /// direction (1, 0), and the axis directions whenever 4 divides n.
    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::DegenerateBody(format!("regular {n}-gon")));
        }
        let step = 2.0 * PI / n as f64;
        let v = (0..n)
            .map(|k| Vec2::from_angle((k as f64 + 0.5) * step) * circumradius)
            .collect();
        Self::from_convex_chain(v)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Outer unit normal of each edge.
    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    /// Offset of each edge line: the edge lies on `normal·x = offset`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    pub fn area(&self) -> f64 {
        chain_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                (b - a).norm()
            })
            .sum()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let o = self.vertices[0];
        let mut acc = Vec2::ZERO;
        let mut total = 0.0;
        for i in 1..n - 1 {
            let a = self.vertices[i] - o;
            let b = self.vertices[i + 1] - o;
            let w = a.cross(b);
            acc += (a + b) * (w / 3.0);
            total += w;
        }
        o + acc / total
    }

    pub fn bbox(&self) -> Aabb {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for v in &self.vertices[1..] {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        Aabb::new(min, max)
    }

    pub fn support(&self, dir: Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(dir))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width in direction `u` (unit): h(u) + h(−u).
    pub fn width(&self, u: Vec2) -> f64 {
        self.support(u) + self.support(-u)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((*a - *b).norm());
            }
        }
        d
    }

    /// Closed containment with the default tolerance.
    pub fn contains(&self, p: Vec2) -> bool {
        self.contains_tol(p, DEFAULT_TOL)
    }

    /// Closed containment: every edge inequality holds up to `tol`.
    /// A negative `tol` demands a strict interior margin.
    pub fn contains_tol(&self, p: Vec2, tol: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, c)| n.dot(p) - c <= tol)
    }

    /// Distance from `p` to the boundary when `p` is inside (negative outside).
    pub fn depth(&self, p: Vec2) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, c)| c - n.dot(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every vertex of `other` lies in `self` within `tol`.
    pub fn contains_polygon(&self, other: &ConvexPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|v| self.contains_tol(*v, tol))
    }

    pub fn translate(&self, t: Vec2) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
            normals: self.normals.clone(),
            offsets: self
                .normals
                .iter()
                .zip(&self.offsets)
                .map(|(n, c)| c + n.dot(t))
                .collect(),
        }
    }

    /// Homothetic image `lambda·P` about the origin, `lambda > 0`.
    pub fn scale(&self, lambda: f64) -> ConvexPolygon {
        assert!(lambda > 0.0, "scale factor must be positive");
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| *v * lambda).collect(),
            normals: self.normals.clone(),
            offsets: self.offsets.iter().map(|c| c * lambda).collect(),
        }
    }

    /// Homothetic image about `center`.
    pub fn scale_about(&self, center: Vec2, lambda: f64) -> ConvexPolygon {
        self.translate(-center).scale(lambda).translate(center)
    }

    /// `translation + ratio·P`.
    pub fn homothet(&self, translation: Vec2, ratio: f64) -> ConvexPolygon {
        self.scale(ratio).translate(translation)
    }

    /// Point reflection −P.
    pub fn reflect(&self) -> ConvexPolygon {
        // Negating a CCW chain keeps it CCW.
        let vertices: Vec<Vec2> = self.vertices.iter().map(|v| -*v).collect();
        let normals = self.normals.iter().map(|n| -*n).collect();
        ConvexPolygon {
            vertices,
            normals,
            offsets: self.offsets.clone(),
        }
    }

    /// Minkowski sum by merging edge sequences sorted by angle.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let p = rotate_to_lowest(&self.vertices);
        let q = rotate_to_lowest(&other.vertices);
        let (n, m) = (p.len(), q.len());
        let mut out = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0, 0);
        while i < n || j < m {
            out.push(p[i % n] + q[j % m]);
            let e1 = p[(i + 1) % n] - p[i % n];
            let e2 = q[(j + 1) % m] - q[j % m];
            let c = e1.cross(e2);
            if j == m || (i < n && c > 0.0) {
                i += 1;
            } else if i == n || c < 0.0 {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        Self::from_convex_chain(out).expect("sum of bodies has positive area")
    }

    /// Difference body P − P.
    pub fn difference_body(&self) -> ConvexPolygon {
        self.minkowski_sum(&self.reflect())
    }

    /// Intersection by halfplane clipping.
    pub fn intersect(&self, other: &ConvexPolygon) -> Result<ConvexPolygon> {
        if !self.bbox().overlaps(&other.bbox()) {
            return Err(Error::EmptyIntersection);
        }
        let mut v = self.vertices.clone();
        for (n, c) in other.normals.iter().zip(&other.offsets) {
            v = clip_chain(&v, *n, *c);
            if v.len() < 3 {
                return Err(Error::EmptyIntersection);
            }
        }
        Self::from_convex_chain(v).map_err(|_| Error::EmptyIntersection)
    }

    /// Area of the intersection, zero when disjoint.
    pub fn intersection_area(&self, other: &ConvexPolygon) -> f64 {
        if !self.bbox().overlaps(&other.bbox()) {
            return 0.0;
        }
        let mut v = self.vertices.clone();
        for (n, c) in other.normals.iter().zip(&other.offsets) {
            v = clip_chain(&v, *n, *c);
            if v.len() < 3 {
                return 0.0;
            }
        }
        chain_area(&v).max(0.0)
    }

    /// True when some edge normal separates the interiors by more than
    /// `-tol`, i.e. the overlap has width at most `tol` in that direction.
    pub fn interiors_disjoint(&self, other: &ConvexPolygon, tol: f64) -> bool {
        let separated = |n: &Vec2| {
            let hi = self.support(*n).min(other.support(*n));
            let lo = (-self.support(-*n)).max(-other.support(-*n));
            hi - lo <= tol
        };
        self.normals.iter().any(separated) || other.normals.iter().any(separated)
    }

    /// Erosion P∼T = {x : x + T ⊆ P}.
    pub fn erode<T: SupportFunction>(&self, t: &T) -> Result<ConvexPolygon> {
        let shift = -t.reference_point();
        let mut v: Vec<Vec2> = self.vertices.iter().map(|p| *p + shift).collect();
        for (n, c) in self.normals.iter().zip(&self.offsets) {
            v = clip_chain(&v, *n, c - t.support(*n));
            if v.len() < 3 {
                return Err(Error::EmptyIntersection);
            }
        }
        Self::from_convex_chain(v).map_err(|_| Error::EmptyIntersection)
    }

    /// Largest r with B(p, r) ⊆ P (negative when p is outside).
    pub fn inradius_about(&self, p: Vec2) -> f64 {
        self.depth(p)
    }

    /// True when P = −P up to translation, checked on support values.
    pub fn is_centrally_symmetric(&self, tol: f64) -> bool {
        let c = self.centroid();
        let q = self.translate(-c);
        q.normals
            .iter()
            .chain(q.reflect().normals.iter())
            .all(|n| (q.support(*n) - q.support(-*n)).abs() <= tol)
    }

    /// Index of the edge whose outer normal is closest in angle to `dir`.
    pub fn edge_facing(&self, dir: Vec2) -> (usize, f64) {
        let u = dir.normalized();
        let mut best = (0, f64::NEG_INFINITY);
        for (i, n) in self.normals.iter().enumerate() {
            let d = n.dot(u);
            if d > best.1 {
                best = (i, d);
            }
        }
        let n = self.normals[best.0];
        (best.0, n.cross(u).abs().atan2(n.dot(u)))
    }

    /// Centered copy (centroid at the origin) together with the centroid.
    pub fn centered(&self) -> (ConvexPolygon, Vec2) {
        let c = self.centroid();
        (self.translate(-c), c)
    }
}

impl SupportFunction for ConvexPolygon {
    fn support(&self, dir: Vec2) -> f64 {
        ConvexPolygon::support(self, dir)
    }
    fn reference_point(&self) -> Vec2 {
        self.vertices[0]
    }
}

fn rotate_to_lowest(v: &[Vec2]) -> Vec<Vec2> {
    let mut k = 0;
    for (i, p) in v.iter().enumerate() {
        let q = v[k];
        if p.y < q.y || (p.y == q.y && p.x < q.x) {
            k = i;
        }
    }
    v[k..].iter().chain(v[..k].iter()).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap()
    }

    fn triangle() -> ConvexPolygon {
        ConvexPolygon::from_points(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn hull_of_square_corners() {
        let p = ConvexPolygon::from_points(&[
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.5),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.0),
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
        assert!((p.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let r = ConvexPolygon::from_points(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(2.0, 2.0),
        ]);
        assert!(matches!(r, Err(Error::DegenerateBody(_))));
        assert!(ConvexPolygon::from_points(&[Vec2::ZERO, Vec2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn hexagon_area() {
        let h = ConvexPolygon::regular(6, 1.0).unwrap();
        assert!((h.area() - 2.598_076_211_353_316).abs() < 1e-12);
    }

    #[test]
    fn scaled_square_area() {
        assert!((unit_square().scale(0.5).area() - 0.25).abs() < 1e-15);
        let s = unit_square();
        let big = s.scale_about(s.centroid(), 2.0);
        assert!((big.area() - 4.0).abs() < 1e-12);
        assert!((big.centroid() - Vec2::new(0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn difference_bodies() {
        let sq = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let d = sq.difference_body();
        assert!((d.area() - 4.0).abs() < 1e-12);
        assert_eq!(d.len(), 4);
        let t = triangle();
        let dt = t.difference_body();
        assert_eq!(dt.len(), 6);
        assert!((dt.area() / t.area() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_is_idempotent() {
        let t = triangle();
        let i = t.intersect(&t).unwrap();
        assert!((i.area() - t.area()).abs() < 1e-15);
        let far = t.translate(Vec2::new(5.0, 0.0));
        assert!(matches!(t.intersect(&far), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn erosion_of_boxes() {
        let p = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(2.0, 2.0)).unwrap();
        let e = p.erode(&unit_square()).unwrap();
        assert!((e.area() - 1.0).abs() < 1e-12);
        assert!(e.contains(Vec2::ZERO) && e.contains(Vec2::new(1.0, 1.0)));
        let same = p.erode(&Vec2::ZERO).unwrap();
        assert!((same.area() - 4.0).abs() < 1e-12);
        let huge = ConvexPolygon::square(Vec2::ZERO, 3.0).unwrap();
        assert!(matches!(p.erode(&huge), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn erosion_of_disk_by_smaller_disk() {
        let p = ConvexPolygon::regular(64, 1.0).unwrap();
        let t = ConvexPolygon::regular(64, 0.25).unwrap();
        let e = p.erode(&t).unwrap();
        let expect = ConvexPolygon::regular(64, 0.75).unwrap();
        assert_eq!(e.len(), 64);
        assert!((e.area() - expect.area()).abs() < 1e-12);
    }

    #[test]
    fn support_and_containment() {
        let s = unit_square();
        assert_eq!(s.support(Vec2::new(1.0, 0.0)), 1.0);
        assert!(s.contains(Vec2::new(0.5, 0.5)));
        assert!(!s.contains(Vec2::new(1.5, 0.5)));
        assert!(s.contains(Vec2::new(1.0, 1.0)));
        assert!(s.contains(Vec2::new(1.0 + 1e-10, 0.5)));
        assert!(!s.contains_tol(Vec2::new(1.0, 0.5), -1e-6));
    }

    #[test]
    fn disjointness_of_touching_squares() {
        let a = unit_square();
        let b = a.translate(Vec2::new(1.0, 0.0));
        assert!(a.interiors_disjoint(&b, 1e-12));
        assert!(!a.interiors_disjoint(&a.translate(Vec2::new(0.5, 0.5)), 1e-12));
        assert_eq!(a.intersection_area(&b), 0.0);
    }

    #[test]
    fn symmetry_detection() {
        assert!(ConvexPolygon::regular(6, 1.0)
            .unwrap()
            .is_centrally_symmetric(1e-9));
        assert!(!triangle().is_centrally_symmetric(1e-9));
    }

    #[test]
    fn centroid_of_triangle() {
        let c = triangle().centroid();
        assert!((c - Vec2::new(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn regular_polygon_has_axis_normals() {
        let p = ConvexPolygon::regular(64, 1.0).unwrap();
        for dir in [
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ] {
            let (_, angle) = p.edge_facing(dir);
            assert!(angle < 1e-12);
        }
    }
}
