//! Finite hypergraphs with a probability weight on each ground element.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground set `0..ground_size` with element weights summing to one and a
/// list of nonempty edges (sorted, duplicate-free index lists).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteHypergraph {
    ground_size: usize,
    weights: Vec<f64>,
    edges: Vec<Vec<u32>>,
}

impl FiniteHypergraph {
    pub fn new(ground_size: usize, weights: Vec<f64>, edges: Vec<Vec<u32>>) -> Result<Self> {
        if weights.len() != ground_size {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} elements",
                weights.len(),
                ground_size
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if ground_size > 0 && (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let mut clean = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidParameter(format!("edge {i} is empty")));
            }
            if e.last().is_some_and(|&x| x as usize >= ground_size) {
                return Err(Error::InvalidParameter(format!(
                    "edge {i} has an element outside 0..{ground_size}"
                )));
            }
            clean.push(e);
        }
        Ok(FiniteHypergraph {
            ground_size,
            weights,
            edges: clean,
        })
    }

    /// Uniform weights.
    pub fn uniform(ground_size: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        let w = if ground_size == 0 {
            Vec::new()
        } else {
            vec![1.0 / ground_size as f64; ground_size]
        };
        Self::new(ground_size, w, edges)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// μ(edge).
    pub fn edge_measure(&self, i: usize) -> f64 {
        self.edges[i]
            .iter()
            .map(|&x| self.weights[x as usize])
            .sum()
    }

    /// For each element, the indices of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.ground_size];
        for (i, e) in self.edges.iter().enumerate() {
            for &x in e {
                inc[x as usize].push(i as u32);
            }
        }
        inc
    }

    /// Same edges, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.ground_size, weights, self.edges.clone())
    }

    /// Drops repeated edges, keeping first occurrences.
    pub fn dedup_edges(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.edges.retain(|e| seen.insert(e.clone()));
    }

    /// Random instance: each element joins each edge independently with
    /// probability `p`; empty edges get one random element, and elements in
    /// no edge are added to a random edge.
    pub fn random_covering<R: Rng + ?Sized>(
        n: usize,
        m: usize,
        p: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("need n, m >= 1".into()));
        }
        let mut edges: Vec<Vec<u32>> = (0..m)
            .map(|_| (0..n as u32).filter(|_| rng.random_bool(p)).collect())
            .collect();
        for e in edges.iter_mut() {
            if e.is_empty() {
                e.push(rng.random_range(0..n as u32));
            }
        }
        let mut covered = vec![false; n];
        for e in &edges {
            for &x in e {
                covered[x as usize] = true;
            }
        }
        let ids: Vec<usize> = (0..m).collect();
        for (x, c) in covered.iter().enumerate() {
            if !c {
                let &i = ids.choose(rng).expect("m >= 1");
                edges[i].push(x as u32);
            }
        }
        Self::uniform(n, edges)
    }

    /// Plain-text form: `n m`, one line of n weights, then one edge per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.ground_size, self.edges.len());
        let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        let _ = writeln!(s, "{}", w.join(" "));
        for e in &self.edges {
            let v: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", v.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let perr = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(0, "missing header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(hl, format!("bad header: {e}")))?;
        let [n, m] = nums[..] else {
            return Err(perr(hl, "header must be `n m`".into()));
        };
        let (wl, wline) = lines
            .next()
            .ok_or_else(|| perr(hl + 1, "missing weight line".into()))?;
        let weights: Vec<f64> = wline
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(wl, format!("bad weight: {e}")))?;
        let mut edges = Vec::with_capacity(m);
        for (el, line) in lines {
            let e: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| perr(el, format!("bad element index: {e}")))?;
            edges.push(e);
        }
        if edges.len() != m {
            return Err(perr(
                0,
                format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, weights, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn validation() {
        assert!(FiniteHypergraph::uniform(3, vec![vec![]]).is_err());
        assert!(FiniteHypergraph::uniform(3, vec![vec![3]]).is_err());
        assert!(FiniteHypergraph::new(2, vec![0.5, 0.6], vec![]).is_err());
        let h = FiniteHypergraph::uniform(4, vec![vec![2, 0, 2]]).unwrap();
        assert_eq!(h.edges()[0], vec![0, 2]);
        assert!((h.edge_measure(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let h = FiniteHypergraph::random_covering(12, 7, 0.3, &mut seeded_rng(2)).unwrap();
        let g = FiniteHypergraph::from_text(&h.to_text()).unwrap();
        assert_eq!(h, g);
        assert!(matches!(
            FiniteHypergraph::from_text("2 1\n0.5 0.5\n0 x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn random_instance_covers_everything() {
        let h = FiniteHypergraph::random_covering(100, 200, 0.02, &mut seeded_rng(9)).unwrap();
        assert!(h.incidence().iter().all(|v| !v.is_empty()));
        assert_eq!(h.edge_count(), 200);
    }
}
