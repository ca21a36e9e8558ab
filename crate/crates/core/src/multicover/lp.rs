use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;

/// Largest number of candidate vertices [`exact_fractional_cover_value`]
/// will enumerate.
pub const MAX_VERTEX_CANDIDATES: u128 = 2_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Exact τ* via the dual packing LP max Σy s.t. Σ_{x∈F} y_x ≤ 1, y ≥ 0,
/// solved by enumerating every basis of n tight constraints.
pub fn exact_fractional_cover_value(h: &FiniteHypergraph) -> Result<f64> {
    let n = h.ground_size();
    let m = h.edge_count();
    if let Some(x) = h.incidence().iter().position(|v| v.is_empty()) {
        return Err(Error::UncoverableElement(x));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let rows = m + n;
    let count = binomial(rows as u128, n as u128);
    if count > MAX_VERTEX_CANDIDATES {
        return Err(Error::TooLarge(format!(
            "{count} candidate vertices for n = {n}, m = {m}"
        )));
    }
    // Constraint rows a·y ≤ b: edges first, then −y_x ≤ 0.
    let mut a = DMatrix::<f64>::zeros(rows, n);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, e) in h.edges().iter().enumerate() {
        for &x in e {
            a[(i, x as usize)] = 1.0;
        }
        b[i] = 1.0;
    }
    for x in 0..n {
        a[(m + x, x)] = -1.0;
    }
    let mut best = f64::NEG_INFINITY;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let sub = DMatrix::from_fn(n, n, |r, c| a[(pick[r], c)]);
        let rhs = DVector::from_fn(n, |r, _| b[pick[r]]);
        if let Some(y) = sub.lu().solve(&rhs) {
            let feasible = (0..rows).all(|r| a.row(r).dot(&y.transpose()) <= b[r] + 1e-9);
            if feasible {
                best = best.max(y.sum());
            }
        }
        // Next n-combination of 0..rows.
        let mut i = n;
        while i > 0 && pick[i - 1] == rows - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        pick[i - 1] += 1;
        for j in i..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_three_halves() {
        let h = FiniteHypergraph::uniform(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert!((exact_fractional_cover_value(&h).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_full_edge() {
        let h = FiniteHypergraph::uniform(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!((exact_fractional_cover_value(&h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn guard_on_size() {
        let edges = (0..40).map(|i| vec![i % 30, (i + 1) % 30]).collect();
        let h = FiniteHypergraph::uniform(30, edges).unwrap();
        assert!(matches!(
            exact_fractional_cover_value(&h),
            Err(Error::TooLarge(_))
        ));
    }
}
