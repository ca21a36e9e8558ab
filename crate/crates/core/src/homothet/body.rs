use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::bands::{volume_threshold, BandPartition};
use super::cells::{classify, largest_inscribed_square, CellRelation};
use super::family::HomothetFamily;
use crate::error::{Error, Result};
use crate::geometry::{
    search_lattice_covering, Aabb, BoundReport, ConvexPolygon, LatticeCovering, Placement, Vec2,
};

/// Which argument produced a [`BodyCover`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverCase {
    /// Near-equal ratios from one band on a lattice of the smallest of them.
    Band { band: usize },
    /// Small ratios assigned to cells.
    Small,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyCover {
    pub placements: Vec<Placement>,
    pub members: Vec<u64>,
    pub case: CoverCase,
    /// Lattice covering density used in place of ϑ(K).
    pub theta_hat: f64,
    pub threshold: f64,
    /// Σ λ² over the unused members before covering.
    pub ratio_sum: f64,
}

/// 2^d·area(L + λ₁·S/2)/area(S) with S = K ∩ (−K), the ratio-sum that lets a
/// family with ratios ≤ λ₁ cover L by translates. K must contain the origin
/// in its interior.
pub fn small_family_volume_bound(
    l: &ConvexPolygon,
    k: &ConvexPolygon,
    lambda1: f64,
) -> Result<BoundReport> {
    if !(lambda1 > 0.0 && lambda1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "λ₁ = {lambda1} outside (0, 1)"
        )));
    }
    if k.depth(Vec2::ZERO) <= 0.0 {
        return Err(Error::HypothesisViolated(
            "the body must contain the origin in its interior".into(),
        ));
    }
    let s = k.intersect(&k.reflect())?;
    let grown = l.minkowski_sum(&s.scale(lambda1 / 2.0));
    let value = 4.0 * grown.area() / s.area();
    Ok(BoundReport::new(
        "small_family_volume_bound",
        vec![
            ("lambda1", lambda1),
            ("area_l", l.area()),
            ("area_s", s.area()),
        ],
        value,
    ))
}

/// Ratio lookup keyed by bit pattern (order-preserving for positive floats).
struct Pool {
    by_ratio: BTreeMap<u64, Vec<u64>>,
}

impl Pool {
    fn new(members: &[(u64, f64)]) -> Self {
        let mut by_ratio: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        // Reverse so that pop() hands out the lowest index first.
        for &(i, l) in members.iter().rev() {
            by_ratio.entry(l.to_bits()).or_default().push(i);
        }
        Pool { by_ratio }
    }

    fn max(&self) -> Option<f64> {
        self.by_ratio.keys().next_back().map(|b| f64::from_bits(*b))
    }

    /// Removes the member with the smallest ratio ≥ x.
    fn take_at_least(&mut self, x: f64) -> Option<(u64, f64)> {
        let (&key, _) = self.by_ratio.range(x.to_bits()..).next()?;
        let list = self.by_ratio.get_mut(&key)?;
        let i = list.pop()?;
        if list.is_empty() {
            self.by_ratio.remove(&key);
        }
        Some((i, f64::from_bits(key)))
    }
}

/// Greedy cell assignment. Returns (member, translation, ratio) for the body
/// `k`, which must contain the origin in its interior.
fn assign_cells(
    l: &ConvexPolygon,
    k: &ConvexPolygon,
    members: &[(u64, f64)],
) -> Result<Vec<(u64, Vec2, f64)>> {
    let (sq_min, q) = largest_inscribed_square(k);
    let sq_center = sq_min + Vec2::new(q / 2.0, q / 2.0);
    let mut pool = Pool::new(members);
    let lbox = l.bbox();
    let side = lbox.width().max(lbox.height());
    // Max-heap on side, then FIFO by sequence number.
    let mut heap: BinaryHeap<(u64, Reverse<u64>, [u64; 3])> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<_>, min: Vec2, s: f64| {
        heap.push((
            s.to_bits(),
            Reverse(seq),
            [min.x.to_bits(), min.y.to_bits(), s.to_bits()],
        ));
        seq += 1;
    };
    push(&mut heap, lbox.min, side);
    let mut out = Vec::new();
    while let Some((_, _, [x, y, s])) = heap.pop() {
        let (min, s) = (
            Vec2::new(f64::from_bits(x), f64::from_bits(y)),
            f64::from_bits(s),
        );
        let cell = Aabb::new(min, min + Vec2::new(s, s));
        if classify(&cell, l, &lbox) == CellRelation::Disjoint {
            continue;
        }
        let Some(top) = pool.max() else {
            return Err(Error::PlacementFailed(format!(
                "family used up with {} cells left (largest side {s})",
                heap.len() + 1
            )));
        };
        let need = s / q;
        if top >= need {
            let (i, lam) = pool.take_at_least(need).expect("top ratio qualifies");
            out.push((i, cell.center() - sq_center * lam, lam));
        } else {
            let m = ((need / top).ceil() as usize).max(2);
            let sub = s / m as f64;
            for a in 0..m {
                for b in 0..m {
                    push(
                        &mut heap,
                        min + Vec2::new(a as f64 * sub, b as f64 * sub),
                        sub,
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Covers `l` by translates of unused members of `family` (all ratios at
/// most `lambda1` < 1), after checking the ratio-sum hypothesis. The base
/// body must contain the origin in its interior.
pub fn small_homothet_cover(
    l: &ConvexPolygon,
    family: &mut HomothetFamily,
    lambda1: f64,
) -> Result<Vec<Placement>> {
    let members = family.unused();
    if let Some((_, r)) = members.iter().find(|(_, r)| *r > lambda1 || *r >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ratio {r} exceeds λ₁ = {lambda1} or is not below 1"
        )));
    }
    let k = family.base().clone();
    let bound = small_family_volume_bound(l, &k, lambda1)?.value;
    let sum: f64 = members.iter().map(|(_, r)| r * r).sum();
    if sum < bound * (1.0 - 1e-12) {
        return Err(Error::HypothesisViolated(format!(
            "ratio square-sum {sum} is below the required {bound}"
        )));
    }
    let assigned = assign_cells(l, &k, &members)?;
    let mut out = Vec::with_capacity(assigned.len());
    for (i, t, lam) in assigned {
        family.consume(i)?;
        out.push(Placement::new(t, lam));
    }
    Ok(out)
}

/// Lattice translates `x` (with the best of 16 offsets) for which
/// `x + body` meets `target` in positive area.
fn lattice_translates(
    target: &ConvexPolygon,
    body: &ConvexPolygon,
    lat: &LatticeCovering,
) -> Vec<Vec2> {
    let min_area = 1e-12 * target.area();
    let mut best: Option<Vec<Vec2>> = None;
    for a in 0..4 {
        for b in 0..4 {
            let off = lat.u * (a as f64 / 4.0) + lat.v * (b as f64 / 4.0);
            let pts: Vec<Vec2> = lat
                .points_near(target, body, off)
                .into_iter()
                .filter(|x| body.translate(*x).intersection_area(target) > min_area)
                .collect();
            if best.as_ref().is_none_or(|p| pts.len() < p.len()) {
                best = Some(pts);
            }
        }
    }
    best.unwrap_or_default()
}

/// Covers the base body K of a finite family by translates of its members.
/// First tries each band of near-equal ratios on a lattice of its smallest
/// member, then the small ratios via [`small_homothet_cover`]'s cell
/// assignment. `epsilon` sets the band width (0.5 in the plane by default).
pub fn cover_body(family: &mut HomothetFamily, epsilon: f64) -> Result<BodyCover> {
    if !matches!(family.source(), super::family::RatioSource::Finite(_)) {
        return Err(Error::InvalidParameter(
            "cover_body needs a finite family prefix".into(),
        ));
    }
    let members = family.unused();
    let partition = BandPartition::new(&members, epsilon, 2)?;
    let ratio_of: BTreeMap<u64, f64> = members.iter().copied().collect();

    let (kc, c) = family.base().centered();
    let lattice = search_lattice_covering(&kc);
    let theta = lattice.density.max(1.0);
    let diam = kc.diameter();
    let threshold = volume_threshold(2, kc.is_centrally_symmetric(1e-9 * diam), theta)?.value;
    let ratio_sum: f64 = members.iter().map(|(_, r)| r * r).sum();

    let band_need = theta * (1.0 + epsilon) * kc.difference_body().area() / kc.area();
    let small_need = small_family_volume_bound(&kc, &kc, epsilon)?.value;
    let sq = |ids: &[u64]| ids.iter().map(|i| ratio_of[i].powi(2)).sum::<f64>();
    let band_ok: Vec<bool> = partition
        .bands
        .iter()
        .map(|b| sq(&b.members) >= band_need)
        .collect();
    let small_sum = sq(&partition.small_band);
    let small_ok = small_sum >= small_need * (1.0 - 1e-12);
    if ratio_sum < threshold && !band_ok.iter().any(|b| *b) && !small_ok {
        return Err(Error::InsufficientVolume {
            volume: ratio_sum,
            required: threshold,
        });
    }

    let report = |placements, members, case| BodyCover {
        placements,
        members,
        case,
        theta_hat: theta,
        threshold,
        ratio_sum,
    };

    // Bands from the top (largest ratios, fewest translates) down.
    for (bi, band) in partition.bands.iter().enumerate().rev() {
        if band.members.is_empty() {
            continue;
        }
        let mut ids = band.members.clone();
        ids.sort_by(|a, b| ratio_of[a].total_cmp(&ratio_of[b]).then(a.cmp(b)));
        let mu1 = ratio_of[&ids[0]];
        let translates = lattice_translates(&kc, &kc.scale(mu1), &lattice.scaled(mu1));
        if translates.len() > ids.len() {
            continue;
        }
        let mut placements = Vec::with_capacity(translates.len());
        let mut used = Vec::with_capacity(translates.len());
        for (x, &i) in translates.iter().zip(&ids) {
            let lam = family.consume(i)?;
            // λ·kc ⊇ μ₁·kc since kc contains the origin.
            placements.push(Placement::new(*x + c * (1.0 - lam), lam));
            used.push(i);
        }
        return Ok(report(placements, used, CoverCase::Band { band: bi }));
    }

    if small_ok {
        let small: Vec<(u64, f64)> = partition
            .small_band
            .iter()
            .map(|i| (*i, ratio_of[i]))
            .collect();
        let assigned = assign_cells(&kc, &kc, &small)?;
        let mut placements = Vec::with_capacity(assigned.len());
        let mut used = Vec::with_capacity(assigned.len());
        for (i, x, lam) in assigned {
            family.consume(i)?;
            placements.push(Placement::new(x + c * (1.0 - lam), lam));
            used.push(i);
        }
        return Ok(report(placements, used, CoverCase::Small));
    }
    Err(Error::FamilyExhausted(format!(
        "ratio square-sum {ratio_sum} clears {threshold}, but no band fills a lattice cover and the small ratios sum to {small_sum} < {small_need}"
    )))
}

/// Covers `window` by members whose ratio lies in [limit, limit·(1 + tol)],
/// each on a point of a covering lattice of limit·K. The rest of the family
/// stays unused.
pub fn limit_ratio_cover(
    family: &mut HomothetFamily,
    window: &ConvexPolygon,
    limit: f64,
    tol: f64,
) -> Result<Vec<Placement>> {
    if !(limit > 0.0) || !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "limit {limit}, tolerance {tol}"
        )));
    }
    let (kc, c) = family.base().centered();
    let lattice = search_lattice_covering(&kc).scaled(limit);
    let translates = lattice_translates(window, &kc.scale(limit), &lattice);
    let mut out = Vec::with_capacity(translates.len());
    let mut from = 0u64;
    for x in translates {
        let i = loop {
            let Some(i) = family.next_at_most(limit * (1.0 + tol), from) else {
                return Err(Error::FamilyExhausted(format!(
                    "fewer than {} members with ratio in [{limit}, {}]",
                    out.len() + 1,
                    limit * (1.0 + tol)
                )));
            };
            from = i + 1;
            if family.ratio(i).is_some_and(|r| r >= limit) {
                break i;
            }
        };
        let lam = family.consume(i)?;
        out.push(Placement::new(x - c * lam, lam));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{grid_coverage, region_coverage, SamplePattern};

    fn centered_unit() -> ConvexPolygon {
        ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap()
    }

    fn corner_unit() -> ConvexPolygon {
        ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn small_family_bound_worked_example() {
        let b = small_family_volume_bound(&corner_unit(), &centered_unit(), 0.5).unwrap();
        assert_eq!(b.value, 6.25);
    }

    #[test]
    fn small_cover_hypothesis_and_success() {
        let mut f = HomothetFamily::finite(centered_unit(), vec![0.25; 64]).unwrap();
        assert!(matches!(
            small_homothet_cover(&corner_unit(), &mut f, 0.5),
            Err(Error::HypothesisViolated(_))
        ));
        let mut f = HomothetFamily::finite(centered_unit(), vec![0.25; 100]).unwrap();
        let p = small_homothet_cover(&corner_unit(), &mut f, 0.5).unwrap();
        assert_eq!(p.len(), 16);
        assert_eq!(f.consumed_count(), 16);
        let r = grid_coverage(
            &centered_unit(),
            &p,
            Aabb::unit(),
            400,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
        let mut f = HomothetFamily::finite(centered_unit(), vec![0.25, 1.0]).unwrap();
        assert!(matches!(
            small_homothet_cover(&corner_unit(), &mut f, 0.5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn band_case_for_near_unit_ratios() {
        let mut f = HomothetFamily::finite(corner_unit(), vec![0.99; 34]).unwrap();
        let c = cover_body(&mut f, 0.5).unwrap();
        assert!(matches!(c.case, CoverCase::Band { .. }));
        assert!((c.threshold - 33.053_837_1).abs() < 1e-6);
        let r = grid_coverage(
            &corner_unit(),
            &c.placements,
            Aabb::unit(),
            1000,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
    }

    #[test]
    fn small_case_for_tiny_ratios() {
        let mut f = HomothetFamily::finite(corner_unit(), vec![0.05; 10_000]).unwrap();
        let c = cover_body(&mut f, 0.5).unwrap();
        assert_eq!(c.case, CoverCase::Small);
        assert_eq!(c.placements.len(), 400);
        let r = grid_coverage(
            &corner_unit(),
            &c.placements,
            Aabb::unit(),
            1000,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
    }

    #[test]
    fn too_little_volume() {
        let mut f = HomothetFamily::finite(corner_unit(), vec![0.5]).unwrap();
        assert!(matches!(
            cover_body(&mut f, 0.5),
            Err(Error::InsufficientVolume { .. })
        ));
        assert_eq!(f.consumed_count(), 0);
    }

    #[test]
    fn triangle_cover() {
        let t = ConvexPolygon::from_points(&[Vec2::ZERO, Vec2::new(2.0, 0.0), Vec2::new(0.7, 1.0)])
            .unwrap();
        let mut f = HomothetFamily::finite(t.clone(), vec![0.1; 3000]).unwrap();
        let c = cover_body(&mut f, 0.5).unwrap();
        let r = region_coverage(&t, &c.placements, &t, 600, SamplePattern::Centers).unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
    }

    #[test]
    fn lattice_of_a_convergent_subfamily() {
        let mut f = HomothetFamily::finite(
            corner_unit(),
            vec![
                5.0, 0.26, 0.255, 0.251, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25,
                0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25,
            ],
        )
        .unwrap();
        let p = limit_ratio_cover(&mut f, &corner_unit(), 0.25, 0.05).unwrap();
        assert!(!f.is_consumed(0));
        let r = grid_coverage(
            &corner_unit(),
            &p,
            Aabb::unit(),
            200,
            SamplePattern::Centers,
        )
        .unwrap();
        assert_eq!(r.uncovered_fraction, 0.0);
    }
}
