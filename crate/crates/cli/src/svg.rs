//! Deterministic SVG renderings: fixed canvas, fixed precision, input order.

use std::fmt::Write as _;

use covering::geometry::{Aabb, ConvexPolygon, Vec3};

const SIZE: f64 = 800.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

/// A planar scene: filled bodies (colored by tag) and bold outlines.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub bodies: Vec<(ConvexPolygon, usize)>,
    pub outlines: Vec<ConvexPolygon>,
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    out.push('\n');
}

/// Renders `scene` inside `view` (mapped onto an 800-pixel square canvas).
pub fn render_scene(scene: &Scene, view: Aabb) -> String {
    let mut out = String::new();
    header(&mut out, SIZE, SIZE);
    let _ = writeln!(
        out,
        r##"<rect width="{SIZE:.0}" height="{SIZE:.0}" fill="#ffffff"/>"##
    );
    let span = view.width().max(view.height());
    if !(span > 0.0) {
        out.push_str("</svg>\n");
        return out;
    }
    let s = SIZE / span;
    let path = |p: &ConvexPolygon| {
        let mut d = String::new();
        for (i, v) in p.vertices().iter().enumerate() {
            let x = (v.x - view.min.x) * s;
            let y = SIZE - (v.y - view.min.y) * s;
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        d
    };
    for (body, tag) in &scene.bodies {
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="{}" fill-opacity="0.35" stroke="#333333" stroke-width="0.5"/>"##,
            path(body),
            PALETTE[tag % PALETTE.len()]
        );
    }
    for o in &scene.outlines {
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="none" stroke="#000000" stroke-width="2.5"/>"##,
            path(o)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Equirectangular heatmap of multiplicity over the sphere.
pub fn render_heatmap(counts: &[Vec<u32>]) -> String {
    let rows = counts.len();
    let cols = counts.first().map_or(0, Vec::len);
    let cell = 4.0;
    let mut out = String::new();
    header(&mut out, cols as f64 * cell, rows as f64 * cell);
    let max = counts.iter().flatten().copied().max().unwrap_or(0).max(1);
    for (i, row) in counts.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let shade = 255 - (255 * *c / max).min(255);
            let _ = writeln!(
                out,
                r##"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="#{shade:02x}{shade:02x}ff"/>"##,
                j as f64 * cell,
                i as f64 * cell
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Direction at the center of heatmap cell (i, j) on a rows × cols grid.
pub fn heatmap_direction(i: usize, j: usize, rows: usize, cols: usize) -> Vec3 {
    use std::f64::consts::PI;
    let lat = PI / 2.0 - (i as f64 + 0.5) * PI / rows as f64;
    let lon = (j as f64 + 0.5) * 2.0 * PI / cols as f64 - PI;
    Vec3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use covering::geometry::Vec2;

    #[test]
    fn empty_scene_is_valid() {
        let s = render_scene(&Scene::default(), Aabb::unit());
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
    }

    #[test]
    fn one_element_per_body() {
        let sq = ConvexPolygon::square(Vec2::ZERO, 0.01).unwrap();
        let bodies: Vec<_> = (0..10_000)
            .map(|i| {
                (
                    sq.translate(Vec2::new(
                        (i % 100) as f64 / 100.0,
                        (i / 100) as f64 / 100.0,
                    )),
                    i,
                )
            })
            .collect();
        let scene = Scene {
            bodies,
            outlines: vec![],
        };
        let s = render_scene(&scene, Aabb::unit());
        assert_eq!(s.matches("<path").count(), 10_000);
        assert!(s.len() < 10_000 * 200);
        assert_eq!(s, render_scene(&scene, Aabb::unit()));
    }
}
