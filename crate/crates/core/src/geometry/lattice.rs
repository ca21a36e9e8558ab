use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use super::subtract::Residual;
use super::vec::Vec2;

/// A lattice {i·u + j·v} whose translates of a body cover the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCovering {
    pub u: Vec2,
    pub v: Vec2,
    /// area(K) / |det(u, v)|.
    pub density: f64,
}

impl LatticeCovering {
    pub fn scaled(&self, lambda: f64) -> LatticeCovering {
        LatticeCovering {
            u: self.u * lambda,
            v: self.v * lambda,
            density: self.density,
        }
    }

    /// Lattice coordinates of `p`.
    pub fn coords(&self, p: Vec2) -> (f64, f64) {
        let det = self.u.cross(self.v);
        (p.cross(self.v) / det, self.u.cross(p) / det)
    }

    pub fn point(&self, i: i64, j: i64) -> Vec2 {
        self.u * i as f64 + self.v * j as f64
    }

    /// Lattice points `x + offset` for which `x + offset + body` may meet
    /// `region` (a superset, found via the bounding box of region − body).
    pub fn points_near(
        &self,
        region: &ConvexPolygon,
        body: &ConvexPolygon,
        offset: Vec2,
    ) -> Vec<Vec2> {
        let diff = region.minkowski_sum(&body.reflect()).translate(-offset);
        let (mut a0, mut a1, mut b0, mut b1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in diff.vertices() {
            let (a, b) = self.coords(*p);
            a0 = a0.min(a);
            a1 = a1.max(a);
            b0 = b0.min(b);
            b1 = b1.max(b);
        }
        let mut out = Vec::new();
        for i in a0.floor() as i64..=a1.ceil() as i64 {
            for j in b0.floor() as i64..=b1.ceil() as i64 {
                let p = self.point(i, j) + offset;
                if diff.contains_tol(p - offset, 1e-9) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// True when the translates `K + i·u + j·v` cover the plane, checked exactly
/// (up to sliver area) on a fundamental parallelogram.
pub fn lattice_covers(k: &ConvexPolygon, u: Vec2, v: Vec2) -> bool {
    let det = u.cross(v);
    if det.abs() < 1e-300 {
        return false;
    }
    let (u, v) = if det < 0.0 { (v, u) } else { (u, v) };
    let cell = [Vec2::ZERO, u, u + v, v];
    let cell_area = u.cross(v);
    let lat = LatticeCovering { u, v, density: 0.0 };
    let cell_poly = match ConvexPolygon::from_convex_chain(cell.to_vec()) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let mut residual = Residual::new(&cell, 1e-13 * cell_area);
    for x in lat.points_near(&cell_poly, k, Vec2::ZERO) {
        residual.remove(&k.translate(x));
        if residual.is_empty() {
            return true;
        }
    }
    residual.area() <= 1e-10 * cell_area
}

/// Coarse search over lattices u = ℓ·e(θ), v = σ·u + h·e(θ)⊥, maximizing
/// the covolume. Parallelogram tilings are detected first and give density 1.
pub fn search_lattice_covering(k: &ConvexPolygon) -> LatticeCovering {
    let (kc, _) = k.centered();
    let area = kc.area();

    // Parallelograms tile with their own edge vectors.
    if kc.len() == 4 {
        let v = kc.vertices();
        let u = v[1] - v[0];
        let w = v[2] - v[1];
        if (v[2] - v[3] - u).norm() < 1e-12 * u.norm() && lattice_covers(&kc, u, w) {
            return LatticeCovering {
                u,
                v: w,
                density: area / u.cross(w).abs(),
            };
        }
    }

    let r = kc.inradius_about(Vec2::ZERO);
    let pitch = r * std::f64::consts::SQRT_2;
    let mut best = LatticeCovering {
        u: Vec2::new(pitch, 0.0),
        v: Vec2::new(0.0, pitch),
        density: area / (pitch * pitch),
    };

    let mut thetas: Vec<f64> = Vec::new();
    let mut push_theta = |t: f64| {
        let t = t.rem_euclid(PI);
        if thetas
            .iter()
            .all(|s| ((s - t).abs()).min(PI - (s - t).abs()) > 1e-6)
        {
            thetas.push(t);
        }
    };
    if kc.len() <= 8 {
        for i in 0..kc.len() {
            let (a, b) = kc.edge(i);
            push_theta((b - a).angle());
        }
    }
    for t in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        push_theta(t);
    }

    let fracs = [0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 1.0];
    let shears = [0.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75];
    for &theta in &thetas {
        let e = Vec2::from_angle(theta);
        let n = e.perp();
        let wu = kc.width(n.perp());
        let wn = kc.width(n);
        for &f in &fracs {
            let len = f * wu;
            let u = e * len;
            for &s in &shears {
                let mk = |h: f64| u * s + n * h;
                // Density can only beat the incumbent when h exceeds this.
                let h_needed = area / (len * best.density);
                if h_needed >= wn || !lattice_covers(&kc, u, mk(h_needed)) {
                    continue;
                }
                let (mut lo, mut hi) = (h_needed, wn);
                if lattice_covers(&kc, u, mk(hi)) {
                    lo = hi;
                } else {
                    for _ in 0..14 {
                        let mid = 0.5 * (lo + hi);
                        if lattice_covers(&kc, u, mk(mid)) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                }
                let density = area / (len * lo);
                if density < best.density {
                    best = LatticeCovering {
                        u,
                        v: mk(lo),
                        density,
                    };
                }
            }
        }
    }
    best
}
