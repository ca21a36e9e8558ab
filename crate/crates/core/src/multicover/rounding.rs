use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mwu::FractionalCover;
use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;

/// Sample sizes guaranteeing a k-fold cover after random rounding:
/// `exact` = ⌈τ(k + 1.5 ln n + 1.5 √((4k + ln n) ln n))⌉ and the simpler
/// `coarse` = ⌈6τ·max(ln n, k)⌉ ≥ exact.
pub fn tau_k_bound(tau_star: f64, k: u32, n: usize) -> Result<(u64, u64)> {
    if !(tau_star >= 1.0) || !tau_star.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "τ* = {tau_star} must be >= 1"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "ground set must be nonempty".into(),
        ));
    }
    let l = (n as f64).ln();
    let kf = k as f64;
    let exact = tau_star * (kf + 1.5 * l + 1.5 * ((4.0 * kf + l) * l).sqrt());
    let coarse = 6.0 * tau_star * l.max(kf);
    Ok((ceil_u64(exact), ceil_u64(coarse)))
}

fn ceil_u64(x: f64) -> u64 {
    // Guard against values like 36.000000000000004 from rounding noise.
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Result of one random rounding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rounding {
    /// Drawn edge indices, repeats kept.
    pub draws: Vec<usize>,
    /// Smallest number of draws containing any ground element.
    pub min_multiplicity: u32,
    /// Whether every element is covered at least k times.
    pub k_fold: bool,
}

/// Number of draws containing each element.
pub fn multiplicities(h: &FiniteHypergraph, draws: &[usize]) -> Vec<u32> {
    let mut c = vec![0u32; h.ground_size()];
    for &d in draws {
        for &x in &h.edges()[d] {
            c[x as usize] += 1;
        }
    }
    c
}

/// Draws `m` edges independently with probabilities w_F / w(F) and checks
/// k-fold coverage.
pub fn chernoff_round<R: Rng + ?Sized>(
    h: &FiniteHypergraph,
    w: &FractionalCover,
    k: u32,
    m: usize,
    rng: &mut R,
) -> Result<Rounding> {
    if w.set_weights.len() != h.edge_count() {
        return Err(Error::InvalidParameter(
            "cover and hypergraph disagree on the edge count".into(),
        ));
    }
    let draws: Vec<usize> = if m == 0 {
        Vec::new()
    } else {
        let dist = WeightedIndex::new(&w.set_weights)
            .map_err(|e| Error::InvalidParameter(format!("edge weights: {e}")))?;
        (0..m).map(|_| dist.sample(rng)).collect()
    };
    let mult = multiplicities(h, &draws);
    let min = mult.iter().copied().min().unwrap_or(u32::MAX);
    Ok(Rounding {
        draws,
        min_multiplicity: if h.ground_size() == 0 { 0 } else { min },
        k_fold: min >= k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multicover::{fractional_cover, MwuConfig};
    use crate::seeded_rng;

    #[test]
    fn bound_values() {
        assert_eq!(tau_k_bound(1.0, 1, 1).unwrap(), (1, 6));
        assert_eq!(tau_k_bound(2.0, 3, 8).unwrap().1, 36);
        assert!(tau_k_bound(2.0, 0, 8).is_err());
        assert!(tau_k_bound(0.5, 1, 8).is_err());
    }

    #[test]
    fn single_edge_always_k_fold() {
        let h = FiniteHypergraph::uniform(3, vec![vec![0, 1, 2]]).unwrap();
        let w = fractional_cover(&h, &MwuConfig::default()).unwrap();
        let r = chernoff_round(&h, &w, 4, 4, &mut seeded_rng(1)).unwrap();
        assert!(r.k_fold);
        assert_eq!(r.draws.len(), 4);
        let r = chernoff_round(&h, &w, 1, 0, &mut seeded_rng(1)).unwrap();
        assert!(r.draws.is_empty() && !r.k_fold);
    }

    #[test]
    fn triangle_rounding_succeeds_mostly() {
        let h = FiniteHypergraph::uniform(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let w = fractional_cover(&h, &MwuConfig::default()).unwrap();
        let (m, _) = tau_k_bound(1.5, 2, 3).unwrap();
        let mut rng = seeded_rng(8);
        let ok = (0..100)
            .filter(|_| {
                chernoff_round(&h, &w, 2, m as usize, &mut rng)
                    .unwrap()
                    .k_fold
            })
            .count();
        assert!(ok > 50, "{ok}");
    }
}
