use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;

/// Tolerance for the equal-measure hypothesis.
pub const MEASURE_TOL: f64 = 1e-9;

/// Ground elements with multiplicities, sorted by element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiset {
    pub items: Vec<(u32, u32)>,
}

impl Multiset {
    pub fn from_draws(mut draws: Vec<u32>) -> Self {
        draws.sort_unstable();
        let mut items: Vec<(u32, u32)> = Vec::new();
        for d in draws {
            match items.last_mut() {
                Some((x, c)) if *x == d => *c += 1,
                _ => items.push((d, 1)),
            }
        }
        Multiset { items }
    }

    /// Size counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.items.iter().map(|(_, c)| *c as u64).sum()
    }

    /// Multiplicity of every ground element.
    pub fn counts(&self, ground: usize) -> Vec<u32> {
        let mut c = vec![0u32; ground];
        for &(x, k) in &self.items {
            c[x as usize] += k;
        }
        c
    }
}

/// Per-edge counts of a sample against its targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub min_edge_count: u64,
    pub max_edge_count: u64,
    pub target_lower: u64,
    pub target_upper: u64,
    pub pass: bool,
    pub sample_size: u64,
    pub attempts: usize,
}

impl NetReport {
    /// How far the report is from passing (0 when it passes).
    pub fn violation(&self) -> u64 {
        self.target_lower.saturating_sub(self.min_edge_count)
            + self.max_edge_count.saturating_sub(self.target_upper)
    }
}

/// Which sample size and upper target to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetVariant {
    /// ⌊C(d/ε)ln(1/ε)⌋ points, at most C₁·d·ln(1/ε) per edge; needs ε ≤ 1/d.
    A,
    /// ⌊C(d/ε)ln(1/ε + 1)⌋ points, at most C₁·d·ln d·ln(1/ε + 1) per edge.
    B,
}

/// Count of sample points (with multiplicity) in every edge.
pub fn edge_counts(h: &FiniteHypergraph, sample: &Multiset) -> Vec<u64> {
    let c = sample.counts(h.ground_size());
    h.edges()
        .iter()
        .map(|e| e.iter().map(|&x| c[x as usize] as u64).sum())
        .collect()
}

fn check_measure(h: &FiniteHypergraph, target: f64) -> Result<()> {
    for i in 0..h.edge_count() {
        let mu = h.edge_measure(i);
        if (mu - target).abs() > MEASURE_TOL {
            return Err(Error::HypothesisViolated(format!(
                "edge {i} has measure {mu}, expected {target}"
            )));
        }
    }
    Ok(())
}

fn report(
    h: &FiniteHypergraph,
    s: &Multiset,
    lower: u64,
    upper: u64,
    attempts: usize,
) -> NetReport {
    let counts = edge_counts(h, s);
    let min = counts.iter().copied().min().unwrap_or(0);
    let max = counts.iter().copied().max().unwrap_or(0);
    let lower_ok = h.edge_count() == 0 || min >= lower;
    NetReport {
        min_edge_count: min,
        max_edge_count: max,
        target_lower: lower,
        target_upper: upper,
        pass: lower_ok && max <= upper,
        sample_size: s.size(),
        attempts,
    }
}

fn sample_and_check<R: Rng + ?Sized>(
    h: &FiniteHypergraph,
    size: usize,
    lower: u64,
    upper: u64,
    retries: usize,
    rng: &mut R,
) -> Result<(Multiset, NetReport)> {
    let dist = WeightedIndex::new(h.weights())
        .map_err(|e| Error::InvalidParameter(format!("element weights: {e}")))?;
    let attempts = retries.max(1);
    let mut best: Option<NetReport> = None;
    for attempt in 1..=attempts {
        let draws: Vec<u32> = (0..size).map(|_| dist.sample(rng) as u32).collect();
        let s = Multiset::from_draws(draws);
        let r = report(h, &s, lower, upper, attempt);
        if r.pass {
            return Ok((s, r));
        }
        if best.as_ref().is_none_or(|b| r.violation() < b.violation()) {
            best = Some(r);
        }
    }
    Err(Error::RetriesExhausted {
        attempts,
        best: best.map(Box::new),
    })
}

/// Sample size and upper target of [`sample_bounded_net`].
pub fn bounded_net_parameters(
    epsilon: f64,
    d: u32,
    variant: NetVariant,
    c: f64,
    c1: f64,
) -> (usize, u64) {
    let df = d as f64;
    let inv = 1.0 / epsilon;
    match variant {
        NetVariant::A => (
            (c * df * inv * inv.ln()).floor() as usize,
            (c1 * df * inv.ln()).floor() as u64,
        ),
        NetVariant::B => (
            (c * df * inv * (inv + 1.0).ln()).floor() as usize,
            (c1 * df * df.ln() * (inv + 1.0).ln()).floor() as u64,
        ),
    }
}

/// Samples a multiset meeting every edge (all of measure ε) at least once
/// and at most the variant's upper target, retrying with fresh draws.
#[allow(clippy::too_many_arguments)]
pub fn sample_bounded_net<R: Rng + ?Sized>(
    h: &FiniteHypergraph,
    epsilon: f64,
    d: u32,
    variant: NetVariant,
    c: f64,
    c1: f64,
    retries: usize,
    rng: &mut R,
) -> Result<(Multiset, NetReport)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ε = {epsilon} outside (0, 1)"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d = {d}; nets need d >= 2"
        )));
    }
    if variant == NetVariant::A && epsilon > 1.0 / d as f64 {
        return Err(Error::InvalidParameter(format!(
            "variant a needs ε <= 1/d, got ε = {epsilon}, d = {d}"
        )));
    }
    check_measure(h, epsilon)?;
    let (size, upper) = bounded_net_parameters(epsilon, d, variant, c, c1);
    sample_and_check(h, size, 1, upper, retries, rng)
}

/// C·d·ln N / ln ln N.
pub fn low_multiplicity_target(n: usize, d: u32, c: f64) -> f64 {
    let l = (n as f64).ln();
    c * d as f64 * l / l.ln()
}

/// Draws N points so that every edge (all of measure 1/N) holds at most
/// C·d·ln N / ln ln N of them.
pub fn sample_low_multiplicity<R: Rng + ?Sized>(
    h: &FiniteHypergraph,
    n: usize,
    d: u32,
    c: f64,
    retries: usize,
    rng: &mut R,
) -> Result<(Multiset, NetReport)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "N = {n}; need N >= 3 so that ln ln N > 0"
        )));
    }
    check_measure(h, 1.0 / n as f64)?;
    let upper = low_multiplicity_target(n, d, c).floor() as u64;
    sample_and_check(h, n, 0, upper, retries, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn multiset_keeps_repeats() {
        let m = Multiset::from_draws(vec![3, 1, 3, 3]);
        assert_eq!(m.items, vec![(1, 1), (3, 3)]);
        assert_eq!(m.size(), 4);
    }

    #[test]
    fn sample_size_is_exact() {
        let (s, u) = bounded_net_parameters(0.05, 2, NetVariant::A, 4.0, 8.0);
        assert_eq!(s, (4.0f64 * 2.0 / 0.05 * 20f64.ln()).floor() as usize);
        assert_eq!(u, (8.0 * 2.0 * 20f64.ln()).floor() as u64);
    }

    #[test]
    fn single_edge_instance() {
        let h = FiniteHypergraph::uniform(10, vec![vec![4]]).unwrap();
        let (s, r) =
            sample_bounded_net(&h, 0.1, 2, NetVariant::A, 1.0, 3.0, 10, &mut seeded_rng(1))
                .unwrap();
        assert!(r.pass && r.min_edge_count >= 1);
        assert_eq!(
            s.size() as usize,
            bounded_net_parameters(0.1, 2, NetVariant::A, 1.0, 3.0).0
        );
    }

    #[test]
    fn hypothesis_is_checked() {
        let h = FiniteHypergraph::uniform(10, vec![vec![4], vec![1, 2]]).unwrap();
        assert!(matches!(
            sample_bounded_net(&h, 0.1, 2, NetVariant::A, 1.0, 3.0, 1, &mut seeded_rng(1)),
            Err(Error::HypothesisViolated(_))
        ));
        let h = FiniteHypergraph::uniform(100, vec![vec![7]]).unwrap();
        assert!(sample_low_multiplicity(&h, 2, 2, 3.0, 1, &mut seeded_rng(1)).is_err());
    }

    #[test]
    fn low_multiplicity_single_edge() {
        assert!((low_multiplicity_target(100, 2, 3.0) - 18.092_8).abs() < 1e-3);
        let h = FiniteHypergraph::uniform(100, vec![vec![7]]).unwrap();
        let (_, r) = sample_low_multiplicity(&h, 100, 2, 3.0, 5, &mut seeded_rng(2)).unwrap();
        assert!(r.pass && r.max_edge_count <= 18);
    }

    #[test]
    fn exhausted_retries_carry_best_report() {
        let h = FiniteHypergraph::uniform(10, vec![vec![4]]).unwrap();
        match sample_bounded_net(&h, 0.1, 2, NetVariant::A, 0.01, 3.0, 3, &mut seeded_rng(1)) {
            Err(Error::RetriesExhausted {
                attempts: 3,
                best: Some(b),
            }) => assert!(!b.pass),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn intervals_pass_with_generous_constants() {
        let h = crate::epsnet::interval_instance(200, 0.05).unwrap();
        let (s, r) =
            sample_bounded_net(&h, 0.05, 2, NetVariant::A, 4.0, 8.0, 10, &mut seeded_rng(5))
                .unwrap();
        assert!(r.pass);
        let counts = edge_counts(&h, &s);
        assert!(counts.iter().all(|&c| c >= 1 && c <= r.target_upper));
    }
}
