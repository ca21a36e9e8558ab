use super::polygon::{chain_area, clip_chain, ConvexPolygon};
use super::vec::Vec2;

/// Convex pieces of `piece` lying outside `cutter`; pieces with area below
/// `min_area` are dropped.
pub fn subtract_convex(piece: &[Vec2], cutter: &ConvexPolygon, min_area: f64) -> Vec<Vec<Vec2>> {
    let mut out = Vec::new();
    let mut rest = piece.to_vec();
    for (n, c) in cutter.normals().iter().zip(cutter.offsets()) {
        let outside = clip_chain(&rest, -*n, -*c);
        if outside.len() >= 3 && chain_area(&outside) > min_area {
            out.push(outside);
        }
        rest = clip_chain(&rest, *n, *c);
        if rest.len() < 3 || chain_area(&rest) <= min_area {
            return out;
        }
    }
    out
}

/// Region of a convex target not yet covered, kept as disjoint convex pieces.
#[derive(Clone, Debug)]
pub struct Residual {
    pieces: Vec<Vec<Vec2>>,
    min_area: f64,
}

impl Residual {
    pub fn new(target: &[Vec2], min_area: f64) -> Self {
        Residual {
            pieces: vec![target.to_vec()],
            min_area,
        }
    }

    pub fn remove(&mut self, cutter: &ConvexPolygon) {
        let bb = cutter.bbox();
        let mut next = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            if !chain_bbox_overlaps(&p, bb.min, bb.max) {
                next.push(p);
                continue;
            }
            next.extend(subtract_convex(&p, cutter, self.min_area));
        }
        self.pieces = next;
    }

    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|p| chain_area(p)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[Vec<Vec2>] {
        &self.pieces
    }
}

fn chain_bbox_overlaps(v: &[Vec2], min: Vec2, max: Vec2) -> bool {
    let mut lo = v[0];
    let mut hi = v[0];
    for p in v {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    lo.x < max.x && min.x < hi.x && lo.y < max.y && min.y < hi.y
}

/// Area of `target` not covered by the union of `covers`.
pub fn uncovered_area(target: &ConvexPolygon, covers: &[ConvexPolygon], min_area: f64) -> f64 {
    let mut r = Residual::new(target.vertices(), min_area);
    for c in covers {
        r.remove(c);
        if r.is_empty() {
            return 0.0;
        }
    }
    r.area()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_minus_corner_square() {
        let big = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(2.0, 2.0)).unwrap();
        let small = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        let pieces = subtract_convex(big.vertices(), &small, 1e-14);
        let a: f64 = pieces.iter().map(|p| chain_area(p)).sum();
        assert!((a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tiling_leaves_nothing() {
        let target = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(2.0, 2.0)).unwrap();
        let tile = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        let covers: Vec<_> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| tile.translate(Vec2::new(x, y)))
            .collect();
        assert!((uncovered_area(&target, &covers, 1e-14) - 1.0).abs() < 1e-12);
        let mut all = covers.clone();
        all.push(tile.translate(Vec2::new(1.0, 1.0)));
        assert_eq!(uncovered_area(&target, &all, 1e-14), 0.0);
    }
}
