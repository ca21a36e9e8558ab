//! Text forms of bodies, ratio lists and ratio generators.

use covering::geometry::{parse_polygon, ConvexPolygon, Vec2};
use covering::homothet::RatioGenerator;
use covering::{Error, Result};

fn bad(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn unit_box(k: ConvexPolygon) -> ConvexPolygon {
    let b = k.bbox();
    let (k, _) = k.scale(1.0 / b.width().max(b.height())).centered();
    k
}

/// `square`, `triangle`, `regular:N` (bounding box side 1, centroid at the
/// origin) or `file:PATH` (vertex list, used as is).
pub fn body(spec: &str) -> Result<ConvexPolygon> {
    match spec.split_once(':') {
        None if spec == "square" => ConvexPolygon::square(Vec2::ZERO, 1.0),
        None if spec == "triangle" => Ok(unit_box(ConvexPolygon::regular(3, 1.0)?)),
        Some(("regular", n)) => {
            let n: usize = n
                .parse()
                .map_err(|e| bad(format!("vertex count {n:?}: {e}")))?;
            Ok(unit_box(ConvexPolygon::regular(n, 1.0)?))
        }
        Some(("file", path)) => parse_polygon(&std::fs::read_to_string(path)?),
        _ => Err(bad(format!(
            "unknown body {spec:?}; expected square, triangle, regular:N or file:PATH"
        ))),
    }
}

/// Comma list of ratios; `r*count` repeats `r`.
pub fn ratios(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (r, count) = match part.split_once('*') {
            Some((r, c)) => (
                r,
                c.trim()
                    .parse::<usize>()
                    .map_err(|e| bad(format!("count {c:?}: {e}")))?,
            ),
            None => (part, 1),
        };
        let r: f64 = r
            .trim()
            .parse()
            .map_err(|e| bad(format!("ratio {r:?}: {e}")))?;
        out.extend(std::iter::repeat_n(r, count));
    }
    if out.is_empty() {
        return Err(bad("empty ratio list".into()));
    }
    Ok(out)
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| bad(format!("number {s:?}: {e}")))
}

/// `dyadic:LEVEL`, `invsqrt:SCALE`, `geometric:FIRST,FACTOR` or `constant:R`.
pub fn generator(spec: &str) -> Result<RatioGenerator> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("generator {spec:?} lacks parameters")))?;
    match kind {
        "dyadic" => Ok(RatioGenerator::Dyadic {
            first_level: rest
                .trim()
                .parse()
                .map_err(|e| bad(format!("level {rest:?}: {e}")))?,
        }),
        "invsqrt" => Ok(RatioGenerator::InverseSqrt {
            scale: number(rest)?,
        }),
        "constant" => Ok(RatioGenerator::Constant {
            ratio: number(rest)?,
        }),
        "geometric" => {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| bad(format!("geometric needs FIRST,FACTOR, got {rest:?}")))?;
            Ok(RatioGenerator::Geometric {
                first: number(a)?,
                factor: number(b)?,
            })
        }
        _ => Err(bad(format!("unknown generator {kind:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bodies() {
        assert!((body("square").unwrap().area() - 1.0).abs() < 1e-12);
        let t = body("triangle").unwrap();
        let b = t.bbox();
        assert!((b.width().max(b.height()) - 1.0).abs() < 1e-12);
        assert!(t.centroid().norm() < 1e-12);
        assert_eq!(body("regular:64").unwrap().len(), 64);
        assert!(body("circle").is_err());
        assert!(body("regular:x").is_err());
    }

    #[test]
    fn ratio_lists() {
        assert_eq!(ratios("0.5*3, 0.25").unwrap(), vec![0.5, 0.5, 0.5, 0.25]);
        assert!(ratios("").is_err());
        assert!(ratios("a").is_err());
    }

    #[test]
    fn generators() {
        assert_eq!(
            generator("dyadic:1").unwrap(),
            RatioGenerator::Dyadic { first_level: 1 }
        );
        assert_eq!(
            generator("geometric:1,2").unwrap(),
            RatioGenerator::Geometric {
                first: 1.0,
                factor: 2.0
            }
        );
        assert!(generator("dyadic").is_err());
        assert!(generator("spiral:1").is_err());
    }
}
