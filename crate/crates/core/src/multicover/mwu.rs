use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::FiniteHypergraph;

/// Knobs for the multiplicative-weights solver.
#[derive(Clone, Debug, PartialEq)]
pub struct MwuConfig {
    /// Target ratio between the primal value and the certified lower bound.
    pub gap: f64,
    /// Step size; defaults to gap/4.
    pub eta: Option<f64>,
    /// Iteration cap; defaults to ⌈16·ln(n)/gap²⌉.
    pub max_iterations: Option<usize>,
    /// Iterations between certificate checks.
    pub check_every: usize,
}

impl Default for MwuConfig {
    fn default() -> Self {
        MwuConfig {
            gap: 0.05,
            eta: None,
            max_iterations: None,
            check_every: 50,
        }
    }
}

impl MwuConfig {
    pub fn with_gap(gap: f64) -> Self {
        MwuConfig {
            gap,
            ..Self::default()
        }
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            let ln = (n.max(2) as f64).ln();
            (16.0 * ln / (self.gap * self.gap)).ceil() as usize
        })
    }
}

/// Nonnegative edge weights covering every ground element at least once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalCover {
    pub set_weights: Vec<f64>,
    /// Σ set_weights.
    pub total: f64,
    /// Certified lower bound on the optimum, from a dual solution.
    pub lower_bound: f64,
    pub iterations: usize,
    /// Whether total ≤ (1 + gap)·lower_bound was reached.
    pub certified: bool,
}

impl FractionalCover {
    /// total / lower_bound − 1.
    pub fn achieved_gap(&self) -> f64 {
        self.total / self.lower_bound - 1.0
    }

    /// Per-element coverage Σ_{edges ∋ x} w.
    pub fn coverage(&self, h: &FiniteHypergraph) -> Vec<f64> {
        let mut cov = vec![0.0; h.ground_size()];
        for (e, w) in h.edges().iter().zip(&self.set_weights) {
            for &x in e {
                cov[x as usize] += w;
            }
        }
        cov
    }

    /// Every element covered with weight at least 1 − tol.
    pub fn is_feasible(&self, h: &FiniteHypergraph, tol: f64) -> bool {
        self.set_weights.iter().all(|w| *w >= 0.0)
            && self.coverage(h).iter().all(|c| *c >= 1.0 - tol)
    }
}

/// Approximately minimum fractional cover by multiplicative weights.
///
/// Element weights play the dual: each round the edge of largest current
/// weight is chosen and the weights of its elements shrink by a factor
/// (1 − η). The chosen edges, scaled by the least coverage count, form a
/// feasible primal; the averaged element distribution p̄ gives the lower
/// bound 1 / max_F p̄(F). The loop stops once the two are within the gap.
pub fn fractional_cover(h: &FiniteHypergraph, cfg: &MwuConfig) -> Result<FractionalCover> {
    let n = h.ground_size();
    let m = h.edge_count();
    let inc = h.incidence();
    if let Some(x) = inc.iter().position(|v| v.is_empty()) {
        return Err(Error::UncoverableElement(x));
    }
    if !(cfg.gap > 0.0) {
        return Err(Error::InvalidParameter(format!("gap {}", cfg.gap)));
    }
    if n == 0 {
        return Ok(FractionalCover {
            set_weights: vec![0.0; m],
            total: 0.0,
            lower_bound: 0.0,
            iterations: 0,
            certified: true,
        });
    }
    if let Some(full) = h.edges().iter().position(|e| e.len() == n) {
        let mut w = vec![0.0; m];
        w[full] = 1.0;
        return Ok(FractionalCover {
            set_weights: w,
            total: 1.0,
            lower_bound: 1.0,
            iterations: 0,
            certified: true,
        });
    }

    let eta = cfg.eta.unwrap_or(cfg.gap / 4.0);
    let cap = cfg.iteration_cap(n).max(1);
    let check_every = cfg.check_every.max(1);

    let mut p = vec![1.0f64; n];
    let mut z = n as f64;
    let mut pf: Vec<f64> = h.edges().iter().map(|e| e.len() as f64).collect();
    let mut avg = vec![0.0f64; m];
    let mut picks = vec![0u32; m];
    let mut hits = vec![0u32; n];
    let mut lower: f64 = 1.0;
    let mut iterations = 0;
    let mut certified = false;

    let primal_of = |hits: &[u32], t: usize| -> f64 {
        let min = *hits.iter().min().unwrap_or(&0);
        if min == 0 {
            f64::INFINITY
        } else {
            t as f64 / min as f64
        }
    };

    for t in 1..=cap {
        iterations = t;
        let inv_z = 1.0 / z;
        let mut best = 0usize;
        let mut best_val = f64::NEG_INFINITY;
        for (i, v) in pf.iter().enumerate() {
            avg[i] += v * inv_z;
            if *v > best_val {
                best_val = *v;
                best = i;
            }
        }
        if best_val > 0.0 {
            lower = lower.max(z / best_val);
        }
        picks[best] += 1;
        for &x in &h.edges()[best] {
            let xi = x as usize;
            hits[xi] += 1;
            let old = p[xi];
            let delta = old * eta;
            p[xi] = old - delta;
            z -= delta;
            for &f in &inc[xi] {
                pf[f as usize] -= delta;
            }
        }
        if z < 1e-200 || t % 4096 == 0 {
            let s = if z < 1e-200 { 1.0 / z } else { 1.0 };
            for v in p.iter_mut() {
                *v *= s;
            }
            z = p.iter().sum();
            for (i, e) in h.edges().iter().enumerate() {
                pf[i] = e.iter().map(|&x| p[x as usize]).sum();
            }
        }
        if t % check_every == 0 || t == cap {
            let max_avg = avg.iter().copied().fold(0.0, f64::max);
            if max_avg > 0.0 {
                lower = lower.max(t as f64 / max_avg);
            }
            if primal_of(&hits, t) <= (1.0 + cfg.gap) * lower {
                certified = true;
                break;
            }
        }
    }

    let min_hits = *hits.iter().min().expect("n >= 1");
    let mut weights: Vec<f64> = if min_hits == 0 {
        // Not every element was reached: fall back to covering each element
        // with one of its edges on top of the scaled picks.
        let mut w = vec![0.0; m];
        for (x, v) in inc.iter().enumerate() {
            if hits[x] == 0 {
                w[v[0] as usize] = 1.0;
            }
        }
        w
    } else {
        picks.iter().map(|&c| c as f64 / min_hits as f64).collect()
    };
    prune(h, &mut weights);
    let total: f64 = weights.iter().sum();
    let lower = lower.min(total);
    Ok(FractionalCover {
        set_weights: weights,
        total,
        lower_bound: lower,
        iterations,
        certified: certified || total <= (1.0 + cfg.gap) * lower,
    })
}

/// Greedily lowers edge weights while every element stays covered.
fn prune(h: &FiniteHypergraph, w: &mut [f64]) {
    let mut cov = vec![0.0f64; h.ground_size()];
    for (e, wi) in h.edges().iter().zip(w.iter()) {
        for &x in e {
            cov[x as usize] += wi;
        }
    }
    // Elements reached only through floating-point sums keep a tiny margin.
    let floor = 1.0 + 1e-12;
    let mut order: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    for i in order {
        let slack = h.edges()[i]
            .iter()
            .map(|&x| cov[x as usize] - floor)
            .fold(f64::INFINITY, f64::min);
        if slack > 0.0 {
            let d = slack.min(w[i]);
            w[i] -= d;
            for &x in &h.edges()[i] {
                cov[x as usize] -= d;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn triangle() -> FiniteHypergraph {
        FiniteHypergraph::uniform(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn whole_ground_edge() {
        let h = FiniteHypergraph::uniform(4, vec![vec![0, 1], vec![0, 1, 2, 3]]).unwrap();
        let f = fractional_cover(&h, &MwuConfig::default()).unwrap();
        assert_eq!(f.set_weights, vec![0.0, 1.0]);
        assert_eq!(f.total, 1.0);
    }

    #[test]
    fn triangle_value() {
        let f = fractional_cover(&triangle(), &MwuConfig::default()).unwrap();
        assert!(f.is_feasible(&triangle(), 1e-9));
        assert!(f.total <= 1.5 * 1.05 + 1e-9, "{}", f.total);
        assert!(f.lower_bound <= 1.5 + 1e-9 && f.lower_bound >= 1.4);
        for w in &f.set_weights {
            assert!((w - 0.5).abs() < 0.05, "{w}");
        }
    }

    #[test]
    fn uncoverable_element() {
        let h = FiniteHypergraph::uniform(3, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            fractional_cover(&h, &MwuConfig::default()),
            Err(Error::UncoverableElement(2))
        ));
    }

    #[test]
    fn random_instances_are_feasible_and_certified() {
        let mut rng = seeded_rng(4);
        for _ in 0..5 {
            let h = FiniteHypergraph::random_covering(100, 200, 0.05, &mut rng).unwrap();
            let f = fractional_cover(&h, &MwuConfig::default()).unwrap();
            assert!(f.is_feasible(&h, 1e-9));
            assert!(f.lower_bound <= f.total);
            assert!(f.achieved_gap() < 0.2, "gap {}", f.achieved_gap());
        }
    }
}
