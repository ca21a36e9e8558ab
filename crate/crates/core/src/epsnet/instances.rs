use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;
use crate::verify::{uniform_sphere_point, SphereNet};

/// Largest per-element change, relative to the uniform weight, allowed when
/// reweighting strip edges to exact measure.
pub const REWEIGHT_BOUND: f64 = 0.1;

/// Cycle of `n` uniform points; edges are all windows of exactly εn
/// consecutive points, so every edge has measure ε.
pub fn interval_instance(n: usize, epsilon: f64) -> Result<FiniteHypergraph> {
    if n == 0 || !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InfeasibleMeasure(format!("n = {n}, ε = {epsilon}")));
    }
    let exact = epsilon * n as f64;
    let k = exact.round();
    if k < 1.0 || (exact - k).abs() > 1e-9 * exact.max(1.0) {
        return Err(Error::InfeasibleMeasure(format!(
            "ε·n = {exact} is not a positive integer, so windows cannot have measure exactly ε"
        )));
    }
    let k = k as usize;
    let starts = if k == n { 1 } else { n };
    let edges = (0..starts)
        .map(|s| (0..k).map(|j| ((s + j) % n) as u32).collect())
        .collect();
    FiniteHypergraph::uniform(n, edges)
}

/// Uniform sphere sample whose edges are the strips of half-width `w`
/// around the net directions. Edges are kept only if their empirical measure
/// is within 10% of `w` and admitted greedily while a minimum-norm
/// reweighting (each element within ±10% of uniform) makes all of them
/// measure exactly `w`.
pub fn strip_instance<R: Rng + ?Sized>(
    net: &SphereNet,
    w: f64,
    ground: usize,
    rng: &mut R,
) -> Result<FiniteHypergraph> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "half-width {w} outside (0, 1)"
        )));
    }
    if ground == 0 {
        return Err(Error::InvalidParameter("empty ground set".into()));
    }
    let pts: Vec<_> = (0..ground).map(|_| uniform_sphere_point(rng)).collect();
    let uniform = 1.0 / ground as f64;

    let mut candidates: Vec<Vec<u32>> = Vec::new();
    for c in &net.points {
        let e: Vec<u32> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dot(*c).abs() <= w)
            .map(|(i, _)| i as u32)
            .collect();
        let mu = e.len() as f64 * uniform;
        if !e.is_empty() && (mu - w).abs() <= 0.1 * w && !candidates.contains(&e) {
            candidates.push(e);
        }
    }

    let mut admitted: Vec<Vec<u32>> = Vec::new();
    let mut weights = vec![uniform; ground];
    for e in candidates {
        admitted.push(e);
        match reweight(&admitted, ground, w) {
            Some(wt) => weights = wt,
            None => {
                admitted.pop();
            }
        }
    }
    if admitted.is_empty() {
        return Err(Error::InfeasibleMeasure(format!(
            "no strip of half-width {w} reaches measure within 10% on {ground} points"
        )));
    }
    FiniteHypergraph::new(ground, weights, admitted)
}

/// Minimum-norm perturbation of the uniform weights giving each edge
/// measure `target` while keeping the total at 1.
fn reweight(edges: &[Vec<u32>], ground: usize, target: f64) -> Option<Vec<f64>> {
    let uniform = 1.0 / ground as f64;
    let rows = edges.len() + 1;
    let mut a = DMatrix::<f64>::zeros(rows, ground);
    let mut b = DVector::<f64>::zeros(rows);
    for (r, e) in edges.iter().enumerate() {
        for &x in e {
            a[(r, x as usize)] = 1.0;
        }
        b[r] = target - e.len() as f64 * uniform;
    }
    for x in 0..ground {
        a[(edges.len(), x)] = 1.0;
    }
    let delta = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    if (&a * &delta - &b).amax() > 1e-12 {
        return None;
    }
    if delta.amax() > REWEIGHT_BOUND * uniform {
        return None;
    }
    Some(delta.iter().map(|d| uniform + d).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsnet::vc_dimension;
    use crate::seeded_rng;
    use crate::verify::{build_sphere_net, NetConfig};

    #[test]
    fn cycle_windows() {
        let h = interval_instance(20, 0.2).unwrap();
        assert_eq!(h.edge_count(), 20);
        for i in 0..20 {
            assert_eq!(h.edges()[i].len(), 4);
            assert!((h.edge_measure(i) - 0.2).abs() < 1e-12);
        }
        assert!(matches!(
            interval_instance(20, 0.13),
            Err(Error::InfeasibleMeasure(_))
        ));
        assert_eq!(interval_instance(5, 1.0).unwrap().edge_count(), 1);
    }

    #[test]
    fn cycle_arcs_have_small_vc_dimension() {
        assert!(vc_dimension(&interval_instance(10, 0.2).unwrap()).unwrap() <= 2);
    }

    #[test]
    fn strips_are_exact() {
        let mut rng = seeded_rng(3);
        let net = build_sphere_net(0.5, &NetConfig::default(), &mut rng).unwrap();
        let h = strip_instance(&net, 0.5, 100, &mut rng).unwrap();
        assert!(h.edge_count() >= 1);
        for i in 0..h.edge_count() {
            assert!((h.edge_measure(i) - 0.5).abs() < 1e-9);
        }
        for &x in h.weights() {
            assert!((x - 0.01).abs() <= 0.001 + 1e-15);
            assert!(x <= 0.5 / 4.0);
        }
    }
}
