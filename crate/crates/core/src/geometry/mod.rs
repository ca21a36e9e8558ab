//! Planar convex geometry and closed-form bound evaluators.

mod bounds;
mod lattice;
mod polygon;
mod subtract;
mod text;
mod vec;

pub use bounds::{rogers_bound, BoundReport};
pub use lattice::{lattice_covers, search_lattice_covering, LatticeCovering};
pub use polygon::{chain_area, clip_chain, Aabb, ConvexPolygon, SupportFunction, DEFAULT_TOL};
pub use subtract::{subtract_convex, uncovered_area, Residual};
pub use text::{format_polygon, parse_polygon};
pub use vec::{Vec2, Vec3};

use serde::{Deserialize, Serialize};

/// One homothet `translation + ratio·K` of a base body K.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub translation: Vec2,
    pub ratio: f64,
}

impl Placement {
    pub fn new(translation: Vec2, ratio: f64) -> Self {
        assert!(ratio > 0.0, "placement ratio must be positive");
        Placement { translation, ratio }
    }

    /// The placed body.
    pub fn body(&self, base: &ConvexPolygon) -> ConvexPolygon {
        base.homothet(self.translation, self.ratio)
    }
}
