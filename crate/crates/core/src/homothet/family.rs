use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;

/// Largest index a generated family hands out.
pub const MAX_INDEX: u64 = 1 << 60;

/// Closed-form ratio sequences, so huge families never need materializing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RatioGenerator {
    /// λ_i = ratio for every i.
    Constant { ratio: f64 },
    /// 2^{-j} repeated 2·4^j times, for j = first_level, first_level + 1, ...
    /// Every level adds square-sum 2.
    Dyadic { first_level: u32 },
    /// λ_i = scale / √(i + 1); square-sum diverges like the harmonic series.
    InverseSqrt { scale: f64 },
    /// λ_i = first·factor^i.
    Geometric { first: f64, factor: f64 },
}

/// Deepest dyadic level, keeping indices inside u64.
const DYADIC_MAX_LEVEL: u32 = 29;

impl RatioGenerator {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RatioGenerator::Constant { ratio } => ratio > 0.0 && ratio.is_finite(),
            RatioGenerator::Dyadic { first_level } => first_level <= DYADIC_MAX_LEVEL,
            RatioGenerator::InverseSqrt { scale } => scale > 0.0 && scale.is_finite(),
            RatioGenerator::Geometric { first, factor } => {
                first > 0.0 && factor > 0.0 && first.is_finite() && factor.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "bad ratio generator {self:?}"
            )))
        }
    }

    /// Number of indices; dyadic families stop at a fixed deepest level.
    pub fn len(&self) -> u64 {
        match *self {
            RatioGenerator::Dyadic { first_level } => {
                dyadic_start(first_level, DYADIC_MAX_LEVEL + 1)
            }
            _ => MAX_INDEX,
        }
    }

    pub fn ratio(&self, i: u64) -> f64 {
        match *self {
            RatioGenerator::Constant { ratio } => ratio,
            RatioGenerator::Dyadic { first_level } => {
                let mut j = first_level;
                while j < DYADIC_MAX_LEVEL && dyadic_start(first_level, j + 1) <= i {
                    j += 1;
                }
                0.5f64.powi(j as i32)
            }
            RatioGenerator::InverseSqrt { scale } => scale / ((i + 1) as f64).sqrt(),
            RatioGenerator::Geometric { first, factor } => first * factor.powf(i as f64),
        }
    }

    pub fn is_increasing(&self) -> bool {
        matches!(*self, RatioGenerator::Geometric { factor, .. } if factor > 1.0)
    }

    /// Smallest index whose ratio satisfies `pred`, assuming `pred` is
    /// monotone along the sequence; `len()` when there is none.
    fn first_where(&self, pred: impl Fn(f64) -> bool) -> u64 {
        let n = self.len();
        if pred(self.ratio(0)) {
            return 0;
        }
        // Exponential then binary search; pred(lo) is false, pred(hi) true.
        let mut lo = 0u64;
        let mut hi = 1u64;
        while hi < n && !pred(self.ratio(hi)) {
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        if hi >= n {
            if !pred(self.ratio(n - 1)) {
                return n;
            }
            hi = n - 1;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pred(self.ratio(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn dyadic_start(first: u32, level: u32) -> u64 {
    // Σ_{l=first}^{level-1} 2·4^l = 2(4^level − 4^first)/3.
    if level <= first {
        return 0;
    }
    (2 * ((1u64 << (2 * level)) - (1u64 << (2 * first)))) / 3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RatioSource {
    Finite(Vec<f64>),
    Generated(RatioGenerator),
}

/// Disjoint closed index intervals, keyed by start.
#[derive(Clone, Debug, Default, PartialEq)]
struct IntervalSet {
    runs: BTreeMap<u64, u64>,
    count: u64,
}

impl IntervalSet {
    fn containing(&self, i: u64) -> Option<(u64, u64)> {
        self.runs
            .range(..=i)
            .next_back()
            .filter(|(_, &e)| e >= i)
            .map(|(&s, &e)| (s, e))
    }

    fn contains(&self, i: u64) -> bool {
        self.containing(i).is_some()
    }

    /// Inserts `i`; false if already present.
    fn insert(&mut self, i: u64) -> bool {
        if self.contains(i) {
            return false;
        }
        let mut start = i;
        let mut end = i;
        if i > 0 {
            if let Some((s, _)) = self.containing(i - 1) {
                start = s;
            }
        }
        if let Some(e) = self.runs.remove(&(i + 1)) {
            end = e;
        }
        self.runs.insert(start, end);
        self.count += 1;
        true
    }

    /// Largest index ≤ i not in the set.
    fn prev_free(&self, i: u64) -> Option<u64> {
        match self.containing(i) {
            None => Some(i),
            Some((s, _)) => s.checked_sub(1),
        }
    }

    /// Smallest index ≥ i not in the set.
    fn next_free(&self, i: u64) -> u64 {
        match self.containing(i) {
            None => i,
            Some((_, e)) => e + 1,
        }
    }
}

/// Homothets λ_i·K of a base body, each usable at most once.
#[derive(Clone, Debug, PartialEq)]
pub struct HomothetFamily {
    base: ConvexPolygon,
    source: RatioSource,
    consumed: IntervalSet,
}

impl HomothetFamily {
    pub fn finite(base: ConvexPolygon, ratios: Vec<f64>) -> Result<Self> {
        if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "ratio {r} is not positive"
            )));
        }
        Ok(HomothetFamily {
            base,
            source: RatioSource::Finite(ratios),
            consumed: IntervalSet::default(),
        })
    }

    pub fn generated(base: ConvexPolygon, generator: RatioGenerator) -> Result<Self> {
        generator.validate()?;
        Ok(HomothetFamily {
            base,
            source: RatioSource::Generated(generator),
            consumed: IntervalSet::default(),
        })
    }

    pub fn base(&self) -> &ConvexPolygon {
        &self.base
    }

    pub fn source(&self) -> &RatioSource {
        &self.source
    }

    pub fn len(&self) -> u64 {
        match &self.source {
            RatioSource::Finite(r) => r.len() as u64,
            RatioSource::Generated(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ratio(&self, i: u64) -> Option<f64> {
        match &self.source {
            RatioSource::Finite(r) => r.get(i as usize).copied(),
            RatioSource::Generated(g) => (i < g.len()).then(|| g.ratio(i)),
        }
    }

    pub fn is_consumed(&self, i: u64) -> bool {
        self.consumed.contains(i)
    }

    pub fn consumed_count(&self) -> u64 {
        self.consumed.count
    }

    /// Marks member `i` as used and returns its ratio.
    pub fn consume(&mut self, i: u64) -> Result<f64> {
        let r = self
            .ratio(i)
            .ok_or_else(|| Error::FamilyExhausted(format!("no member with index {i}")))?;
        if !self.consumed.insert(i) {
            return Err(Error::InvalidParameter(format!("member {i} used twice")));
        }
        Ok(r)
    }

    /// Σ λ_i²·area(K) over the whole family (infinite for generators).
    pub fn total_volume(&self) -> f64 {
        match &self.source {
            RatioSource::Finite(r) => r.iter().map(|l| l * l).sum::<f64>() * self.base.area(),
            RatioSource::Generated(_) => f64::INFINITY,
        }
    }

    /// Unused members of a finite family as (index, ratio).
    pub fn unused(&self) -> Vec<(u64, f64)> {
        match &self.source {
            RatioSource::Finite(r) => r
                .iter()
                .enumerate()
                .map(|(i, l)| (i as u64, *l))
                .filter(|(i, _)| !self.is_consumed(*i))
                .collect(),
            RatioSource::Generated(_) => Vec::new(),
        }
    }

    /// Smallest unused index ≥ `from` with ratio at most `x`, for
    /// nonincreasing generated families (finite families are scanned).
    pub fn next_at_most(&self, x: f64, from: u64) -> Option<u64> {
        match &self.source {
            RatioSource::Finite(r) => (from as usize..r.len())
                .find(|&i| r[i] <= x && !self.is_consumed(i as u64))
                .map(|i| i as u64),
            RatioSource::Generated(g) => {
                let mut i = g.first_where(|l| l <= x).max(from);
                loop {
                    i = self.consumed.next_free(i);
                    if i >= g.len() {
                        return None;
                    }
                    if g.ratio(i) <= x {
                        return Some(i);
                    }
                    i += 1;
                }
            }
        }
    }

    /// Unused member with the smallest ratio that is at least `x`.
    pub fn smallest_at_least(&self, x: f64) -> Option<u64> {
        match &self.source {
            RatioSource::Finite(r) => r
                .iter()
                .enumerate()
                .filter(|(i, l)| **l >= x && !self.is_consumed(*i as u64))
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i as u64),
            RatioSource::Generated(g) if g.is_increasing() => {
                let i = self.consumed.next_free(g.first_where(|l| l >= x));
                (i < g.len()).then_some(i)
            }
            RatioSource::Generated(g) => {
                // Nonincreasing: the last index still ≥ x, walking back over
                // used ones.
                let first_below = g.first_where(|l| l < x);
                let i = first_below.checked_sub(1)?;
                let i = self.consumed.prev_free(i)?;
                (g.ratio(i) >= x).then_some(i)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn unit() -> ConvexPolygon {
        ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap()
    }

    #[test]
    fn dyadic_levels() {
        let g = RatioGenerator::Dyadic { first_level: 1 };
        assert_eq!(g.ratio(0), 0.5);
        assert_eq!(g.ratio(7), 0.5);
        assert_eq!(g.ratio(8), 0.25);
        assert_eq!(g.ratio(8 + 31), 0.25);
        assert_eq!(g.ratio(8 + 32), 0.125);
        assert_eq!(g.first_where(|l| l <= 0.3), 8);
        assert_eq!(g.first_where(|l| l < 0.25), 40);
    }

    #[test]
    fn members_are_single_use() {
        let mut f = HomothetFamily::finite(unit(), vec![0.5, 0.25]).unwrap();
        assert_eq!(f.consume(1).unwrap(), 0.25);
        assert!(f.consume(1).is_err());
        assert!(f.consume(2).is_err());
        assert_eq!(f.unused(), vec![(0, 0.5)]);
        assert!((f.total_volume() - 0.3125).abs() < 1e-12);
        assert!(HomothetFamily::finite(unit(), vec![0.0]).is_err());
    }

    #[test]
    fn searches_skip_used_members() {
        let mut f =
            HomothetFamily::generated(unit(), RatioGenerator::Dyadic { first_level: 1 }).unwrap();
        assert_eq!(f.next_at_most(0.3, 0), Some(8));
        f.consume(8).unwrap();
        f.consume(9).unwrap();
        assert_eq!(f.next_at_most(0.3, 0), Some(10));
        // Smallest ratio ≥ 0.2 is 0.25; the last of that level is 39.
        assert_eq!(f.smallest_at_least(0.2), Some(39));
        for i in 30..40 {
            f.consume(i).unwrap();
        }
        assert_eq!(f.smallest_at_least(0.2), Some(29));

        let mut g = HomothetFamily::generated(
            unit(),
            RatioGenerator::Geometric {
                first: 1.0,
                factor: 2.0,
            },
        )
        .unwrap();
        assert_eq!(g.smallest_at_least(3.0), Some(2));
        g.consume(2).unwrap();
        assert_eq!(g.smallest_at_least(3.0), Some(3));
    }

    #[test]
    fn interval_set_merges() {
        let mut s = IntervalSet::default();
        for i in [3, 5, 4, 1] {
            assert!(s.insert(i));
        }
        assert!(!s.insert(4));
        assert_eq!(s.runs.len(), 2);
        assert_eq!(s.prev_free(5), Some(2));
        assert_eq!(s.next_free(3), 6);
        assert_eq!(s.prev_free(1), Some(0));
    }
}
