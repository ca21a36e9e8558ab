use std::fmt::Write as _;

use super::polygon::ConvexPolygon;
use super::vec::Vec2;
use crate::error::{Error, Result};

/// Parses a vertex list: one `x y` pair per line; blank lines and lines
/// starting with `#` are skipped. The hull of the points is returned.
pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = |what: &str| -> Result<f64> {
            let tok = it.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("missing {what} coordinate"),
            })?;
            tok.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad {what} coordinate {tok:?}: {e}"),
            })
        };
        let x = next("x")?;
        let y = next("y")?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected exactly two numbers".into(),
            });
        }
        pts.push(Vec2::new(x, y));
    }
    ConvexPolygon::from_points(&pts)
}

/// Writes the vertices one `x y` pair per line.
pub fn format_polygon(p: &ConvexPolygon) -> String {
    let mut s = String::new();
    for v in p.vertices() {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = ConvexPolygon::regular(7, 1.5).unwrap();
        let q = parse_polygon(&format_polygon(&p)).unwrap();
        assert_eq!(p.len(), q.len());
        assert!((p.area() - q.area()).abs() < 1e-14);
    }

    #[test]
    fn comments_and_errors() {
        let p = parse_polygon("# square\n0 0\n1 0\n\n1 1\n0 1\n").unwrap();
        assert_eq!(p.len(), 4);
        assert!(matches!(
            parse_polygon("0 0\n1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_polygon("0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
