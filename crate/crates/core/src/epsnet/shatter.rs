use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;

/// Largest ground set the exhaustive oracles accept.
pub const MAX_GROUND: usize = 25;

fn edge_masks(h: &FiniteHypergraph) -> Result<Vec<u32>> {
    if h.ground_size() > MAX_GROUND {
        return Err(Error::TooLarge(format!(
            "ground size {} exceeds {MAX_GROUND}",
            h.ground_size()
        )));
    }
    let mut masks: Vec<u32> = h
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &x| m | (1 << x)))
        .collect();
    masks.sort_unstable();
    masks.dedup();
    Ok(masks)
}

/// Calls `f` on every `m`-subset of `0..n` as a bitmask until it returns
/// false.
fn for_each_subset(n: usize, m: usize, mut f: impl FnMut(u32) -> bool) {
    if m == 0 {
        f(0);
        return;
    }
    let limit: u64 = 1 << n;
    let mut s: u64 = (1 << m) - 1;
    while s < limit {
        if !f(s as u32) {
            return;
        }
        // Gosper's hack: next integer with the same popcount.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

fn traces(masks: &[u32], a: u32, buf: &mut Vec<u32>) -> usize {
    buf.clear();
    buf.extend(masks.iter().map(|e| e & a));
    buf.sort_unstable();
    buf.dedup();
    buf.len()
}

/// π_H(m): the largest number of distinct traces E ∩ A over m-subsets A.
/// By convention π_H(0) = 1.
pub fn shatter_function(h: &FiniteHypergraph, m: usize) -> Result<u64> {
    let masks = edge_masks(h)?;
    let n = h.ground_size();
    if m > n {
        return Err(Error::InvalidParameter(format!(
            "subset size {m} exceeds ground size {n}"
        )));
    }
    if m == 0 {
        return Ok(1);
    }
    let cap = (1u64 << m).min(masks.len() as u64);
    let mut best = 0u64;
    let mut buf = Vec::with_capacity(masks.len());
    for_each_subset(n, m, |a| {
        best = best.max(traces(&masks, a, &mut buf) as u64);
        best < cap
    });
    Ok(best)
}

/// Largest m with π_H(m) = 2^m; the empty family has dimension 0.
pub fn vc_dimension(h: &FiniteHypergraph) -> Result<usize> {
    let masks = edge_masks(h)?;
    let n = h.ground_size();
    if masks.is_empty() {
        return Ok(0);
    }
    let top = (usize::BITS - 1 - masks.len().leading_zeros()) as usize;
    let mut buf = Vec::with_capacity(masks.len());
    for m in (1..=top.min(n)).rev() {
        let full = 1usize << m;
        let mut shattered = false;
        for_each_subset(n, m, |a| {
            shattered = traces(&masks, a, &mut buf) == full;
            !shattered
        });
        if shattered {
            return Ok(m);
        }
    }
    Ok(0)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Σ_{i≤d} C(m, i) and the coarser 2·m^d (with 0^0 = 1).
pub fn sauer_shelah(d: u32, m: u64) -> (u128, u128) {
    let sum = (0..=d as u64).map(|i| binomial(m, i)).sum();
    let coarse = 2u128.saturating_mul((m as u128).saturating_pow(d));
    (sum, coarse)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intervals(n: u32) -> FiniteHypergraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i..n {
                edges.push((i..=j).collect());
            }
        }
        FiniteHypergraph::uniform(n as usize, edges).unwrap()
    }

    #[test]
    fn singletons() {
        let h = FiniteHypergraph::uniform(5, (0..5).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(shatter_function(&h, 2).unwrap(), 3);
        assert_eq!(shatter_function(&h, 0).unwrap(), 1);
        assert_eq!(vc_dimension(&h).unwrap(), 1);
    }

    #[test]
    fn full_edge_only() {
        let h = FiniteHypergraph::uniform(6, vec![(0..6).collect()]).unwrap();
        for m in 0..=6 {
            assert_eq!(shatter_function(&h, m).unwrap(), 1);
        }
    }

    #[test]
    fn intervals_have_dimension_two() {
        assert_eq!(vc_dimension(&intervals(10)).unwrap(), 2);
        // Every interval meets the whole 3-point line, so ∅ is missing.
        assert_eq!(shatter_function(&intervals(3), 3).unwrap(), 6);
        // On a longer line some interval misses the 3-set: 7 = C(3,0)+C(3,1)+C(3,2).
        assert_eq!(shatter_function(&intervals(5), 3).unwrap(), 7);
    }

    #[test]
    fn empty_family() {
        let h = FiniteHypergraph::uniform(4, vec![]).unwrap();
        assert_eq!(vc_dimension(&h).unwrap(), 0);
        assert_eq!(shatter_function(&h, 0).unwrap(), 1);
        assert_eq!(shatter_function(&h, 2).unwrap(), 0);
    }

    #[test]
    fn sauer_shelah_values() {
        assert_eq!(sauer_shelah(1, 3), (4, 6));
        assert_eq!(sauer_shelah(2, 3), (7, 18));
        assert_eq!(sauer_shelah(2, 0).0, 1);
    }

    #[test]
    fn guard() {
        let h = FiniteHypergraph::uniform(26, vec![vec![0]]).unwrap();
        assert!(matches!(shatter_function(&h, 1), Err(Error::TooLarge(_))));
    }
}
