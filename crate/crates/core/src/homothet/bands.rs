use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundReport;

/// c(ε) = d·⌈−ln ε / ln(1 + ε)⌉.
pub fn band_count(epsilon: f64, d: u32) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ε = {epsilon} outside (0, 1)"
        )));
    }
    let q = -epsilon.ln() / epsilon.ln_1p();
    // Guard against q landing a hair above an integer.
    let q = if (q - q.round()).abs() < 1e-12 {
        q.round()
    } else {
        q.ceil()
    };
    Ok(d as usize * q as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// Bounds on λ^d: the band is (lower, upper].
    pub lower: f64,
    pub upper: f64,
    pub members: Vec<u64>,
}

/// Ratios grouped by λ^d into (ε^d(1+ε)^{j−1}, ε^d(1+ε)^j], j = 1..c(ε),
/// plus the small band λ^d ≤ ε^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPartition {
    pub epsilon: f64,
    pub d: u32,
    pub bands: Vec<Band>,
    pub small_band: Vec<u64>,
}

impl BandPartition {
    /// `ratios` are (member index, λ) pairs with 0 < λ < 1.
    pub fn new(ratios: &[(u64, f64)], epsilon: f64, d: u32) -> Result<Self> {
        let c = band_count(epsilon, d)?;
        let floor = epsilon.powi(d as i32);
        let mut bands: Vec<Band> = (1..=c)
            .map(|j| Band {
                lower: floor * (1.0 + epsilon).powi(j as i32 - 1),
                upper: floor * (1.0 + epsilon).powi(j as i32),
                members: Vec::new(),
            })
            .collect();
        let mut small_band = Vec::new();
        for &(i, l) in ratios {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::InvalidParameter(format!("ratio {l} outside (0, 1)")));
            }
            let v = l.powi(d as i32);
            if v <= floor {
                small_band.push(i);
                continue;
            }
            // ε^d(1+ε)^c ≥ 1 > v, so some band takes it.
            let j = bands
                .iter()
                .position(|b| v > b.lower && v <= b.upper)
                .expect("band ladder reaches 1");
            bands[j].members.push(i);
        }
        Ok(BandPartition {
            epsilon,
            d,
            bands,
            small_band,
        })
    }
}

/// Total homothet volume (relative to vol K) that guarantees a translative
/// cover of K: (d³ ln d·ϑ + e)·2^d for symmetric K, otherwise
/// d³ ln d·ϑ·C(2d, d) + e·4^d.
pub fn volume_threshold(d: u32, symmetric: bool, theta: f64) -> Result<BoundReport> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d = {d}; the threshold needs d >= 2"
        )));
    }
    if !(theta >= 1.0) || !theta.is_finite() {
        return Err(Error::InvalidDimension(format!(
            "covering density {theta} is below 1, which no body attains"
        )));
    }
    let df = d as f64;
    let core = df.powi(3) * df.ln() * theta;
    let value = if symmetric {
        (core + E) * 2f64.powi(d as i32)
    } else {
        let binom: f64 = (1..=d).map(|i| (d + i) as f64 / i as f64).product();
        core * binom + E * 4f64.powi(d as i32)
    };
    Ok(BoundReport::new(
        if symmetric {
            "homothet_volume_threshold_symmetric"
        } else {
            "homothet_volume_threshold"
        },
        vec![("d", df), ("theta", theta)],
        value,
    ))
}
