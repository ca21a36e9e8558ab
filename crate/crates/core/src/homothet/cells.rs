use crate::geometry::{Aabb, ConvexPolygon, Vec2};

/// Largest axis-parallel square inside `k`, as (lower-left corner, side).
/// The square constraint for edge (n, c) is n·p + s·(n_x⁺ + n_y⁺) ≤ c; the
/// optimum sits where three of them are tight, so triples are enumerated.
pub fn largest_inscribed_square(k: &ConvexPolygon) -> (Vec2, f64) {
    let rows: Vec<[f64; 4]> = k
        .normals()
        .iter()
        .zip(k.offsets())
        .map(|(n, c)| [n.x, n.y, n.x.max(0.0) + n.y.max(0.0), *c])
        .collect();
    let m = rows.len();
    let feasible = |p: [f64; 3]| {
        p[2] >= 0.0
            && rows.iter().all(|r| {
                r[0] * p[0] + r[1] * p[1] + r[2] * p[2] <= r[3] + 1e-12 * (1.0 + r[3].abs())
            })
    };
    let mut best = (k.centroid(), 0.0);
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                if let Some(p) = solve3(&rows[a], &rows[b], &rows[c]) {
                    if p[2] > best.1 && feasible(p) {
                        best = (Vec2::new(p[0], p[1]), p[2]);
                    }
                }
            }
        }
    }
    best
}

fn solve3(r0: &[f64; 4], r1: &[f64; 4], r2: &[f64; 4]) -> Option<[f64; 3]> {
    let det3 = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let (a, b, c) = (
        [r0[0], r0[1], r0[2]],
        [r1[0], r1[1], r1[2]],
        [r2[0], r2[1], r2[2]],
    );
    let det = det3(a, b, c);
    if det.abs() < 1e-12 {
        return None;
    }
    let rhs = [r0[3], r1[3], r2[3]];
    let col = |j: usize| {
        let mut rows = [a, b, c];
        for (i, row) in rows.iter_mut().enumerate() {
            row[j] = rhs[i];
        }
        det3(rows[0], rows[1], rows[2])
    };
    Some([col(0) / det, col(1) / det, col(2) / det])
}

/// Relation between an axis-aligned cell and a convex body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRelation {
    Inside,
    Disjoint,
    Partial,
}

/// Separating-axis classification; touching boundaries count as disjoint.
pub fn classify(cell: &Aabb, body: &ConvexPolygon, body_box: &Aabb) -> CellRelation {
    let tol = 1e-12 * (1.0 + cell.width());
    if body_box.max.x <= cell.min.x + tol
        || body_box.min.x >= cell.max.x - tol
        || body_box.max.y <= cell.min.y + tol
        || body_box.min.y >= cell.max.y - tol
    {
        return CellRelation::Disjoint;
    }
    let corners = [
        cell.min,
        Vec2::new(cell.max.x, cell.min.y),
        cell.max,
        Vec2::new(cell.min.x, cell.max.y),
    ];
    let mut inside = true;
    for (n, c) in body.normals().iter().zip(body.offsets()) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &corners {
            let v = n.dot(*p) - c;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo >= -tol {
            return CellRelation::Disjoint;
        }
        if hi > 0.0 {
            inside = false;
        }
    }
    if inside {
        CellRelation::Inside
    } else {
        CellRelation::Partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inscribed_squares() {
        let sq = ConvexPolygon::square(Vec2::new(1.0, 1.0), 2.0).unwrap();
        let (p, s) = largest_inscribed_square(&sq);
        assert!((s - 2.0).abs() < 1e-12 && p.norm() < 1e-12);

        // Right triangle with legs 1: the corner square has side 1/2.
        let t = ConvexPolygon::from_points(&[Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)])
            .unwrap();
        assert!((largest_inscribed_square(&t).1 - 0.5).abs() < 1e-12);

        // Disk-like polygon: side close to r·√2.
        let d = ConvexPolygon::regular(64, 1.0).unwrap();
        let s = largest_inscribed_square(&d).1;
        assert!(s <= std::f64::consts::SQRT_2 + 1e-12 && s > 1.40, "{s}");
    }

    #[test]
    fn classification() {
        let b = ConvexPolygon::square(Vec2::ZERO, 2.0).unwrap();
        let bb = b.bbox();
        let cell = |x: f64, y: f64, s: f64| Aabb::new(Vec2::new(x, y), Vec2::new(x + s, y + s));
        assert_eq!(
            classify(&cell(-0.5, -0.5, 1.0), &b, &bb),
            CellRelation::Inside
        );
        assert_eq!(
            classify(&cell(1.0, 0.0, 1.0), &b, &bb),
            CellRelation::Disjoint
        );
        assert_eq!(
            classify(&cell(0.5, 0.5, 1.0), &b, &bb),
            CellRelation::Partial
        );
        let diamond = ConvexPolygon::from_points(&[
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ])
        .unwrap();
        // Cell beyond the diamond's edge x + y = 1 but inside its box.
        assert_eq!(
            classify(&cell(0.6, 0.6, 0.3), &diamond, &diamond.bbox()),
            CellRelation::Disjoint
        );
    }
}
