use std::f64::consts::E;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mwu::{fractional_cover, MwuConfig};
use super::rounding::chernoff_round;
use super::translate::{build_translate_instance, nstar_bounds, TranslateConfig};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, BoundReport, ConvexPolygon, Placement, Vec2};
use crate::verify::{density_estimate, multiplicities_at};

/// Upper bound 6ed(3 ln d + ln ln d + 15) on the k-fold covering density in
/// dimension d, valid for k up to d(ln d + ln ln d).
pub fn kfold_density_bound(d: u32) -> Result<BoundReport> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "k-fold density bound needs d >= 2, got {d}"
        )));
    }
    let df = d as f64;
    let value = 6.0 * E * df * (3.0 * df.ln() + df.ln().ln() + 15.0);
    Ok(BoundReport::new("kfold_density", vec![("d", df)], value))
}

/// Knobs for [`kfold_pipeline`].
#[derive(Clone, Debug, PartialEq)]
pub struct KfoldConfig {
    pub translate: TranslateConfig,
    pub mwu: MwuConfig,
    /// Rounding attempts; the sample size grows by half after half of them.
    pub retries: usize,
    /// Uniform probe points of C checked after a successful rounding.
    pub probes: usize,
}

impl Default for KfoldConfig {
    fn default() -> Self {
        KfoldConfig {
            translate: TranslateConfig::default(),
            mwu: MwuConfig::default(),
            retries: 20,
            probes: 100_000,
        }
    }
}

/// A verified k-fold covering of the square C by translates of K.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KfoldResult {
    /// K recentered and scaled to inradius 1; placements refer to it.
    pub base: ConvexPolygon,
    pub placements: Vec<Placement>,
    pub k: u32,
    pub a: f64,
    pub delta: f64,
    pub lambda_size: usize,
    pub edge_count: usize,
    /// Value of the fractional cover found and its certified lower bound.
    pub tau_hat: f64,
    pub tau_lower: f64,
    /// Bounds on N*(C + T, edge shape).
    pub nstar_lower: f64,
    pub nstar_upper: f64,
    /// ⌈6·τ̂·max(ln|Λ|, k)⌉.
    pub count_bound: u64,
    pub attempts: usize,
    pub lambda_min_multiplicity: u32,
    pub probe_min_multiplicity: u32,
    /// count·area(K)/area(C): density of the periodic extension.
    pub periodic_density: f64,
    /// density_estimate of the 3×3 periodic extension over C.
    pub window_density: f64,
    pub count_report: BoundReport,
    pub density_formula: BoundReport,
}

/// k-fold covering of C = [−a/2, a/2]² by translates of K via a fractional
/// cover of the discretized instance and random rounding with
/// m = ⌈6·w(F)·max(ln|Λ|, k)⌉ draws.
pub fn kfold_pipeline<R: Rng + ?Sized>(
    k_body: &ConvexPolygon,
    k: u32,
    cfg: &KfoldConfig,
    rng: &mut R,
) -> Result<KfoldResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let inst = build_translate_instance(k_body, &cfg.translate, rng)?;
    let h = &inst.hypergraph;
    let fc = fractional_cover(h, &cfg.mwu)?;
    let ln_lambda = (inst.lambda.len() as f64).ln();
    let m0 = (6.0 * fc.total * ln_lambda.max(k as f64)).ceil() as usize;
    let half = cfg.retries.div_ceil(2);
    let a = inst.a;
    let region = inst.region.clone();

    let mut found = None;
    for attempt in 1..=cfg.retries {
        let m = if attempt <= half {
            m0
        } else {
            (m0 as f64 * 1.5).ceil() as usize
        };
        let r = chernoff_round(h, &fc, k, m, rng)?;
        if !r.k_fold {
            continue;
        }
        let placements: Vec<Placement> = r
            .draws
            .iter()
            .map(|&d| Placement::new(inst.candidates[d], 1.0))
            .collect();
        let bodies: Vec<ConvexPolygon> = placements.iter().map(|p| p.body(&inst.k)).collect();
        let probes: Vec<Vec2> = (0..cfg.probes)
            .map(|_| {
                Vec2::new(
                    rng.random_range(-a / 2.0..=a / 2.0),
                    rng.random_range(-a / 2.0..=a / 2.0),
                )
            })
            .collect();
        let probe_min = multiplicities_at(&bodies, &probes)
            .into_iter()
            .min()
            .unwrap_or(u32::MAX);
        if probe_min < k {
            continue;
        }
        found = Some((attempt, placements, r.min_multiplicity, probe_min));
        break;
    }
    let Some((attempts, placements, lambda_min, probe_min)) = found else {
        return Err(Error::RoundingFailed {
            attempts: cfg.retries,
        });
    };

    let mut tiled = Vec::with_capacity(placements.len() * 9);
    for i in -1..=1 {
        for j in -1..=1 {
            let shift = Vec2::new(i as f64 * a, j as f64 * a);
            tiled.extend(
                placements
                    .iter()
                    .map(|p| Placement::new(p.translation + shift, p.ratio)),
            );
        }
    }
    let window = Aabb::new(Vec2::new(-a / 2.0, -a / 2.0), Vec2::new(a / 2.0, a / 2.0));
    let window_density = density_estimate(&inst.k, &tiled, window);
    let periodic_density = placements.len() as f64 * inst.k.area() / region.area();
    let (nstar_lower, nstar_upper) = nstar_bounds(&inst.edge_shape, &region.minkowski_sum(&inst.t));
    let count_report = BoundReport::new(
        "kfold_count",
        vec![
            ("tau_hat", fc.total),
            ("lambda", inst.lambda.len() as f64),
            ("k", k as f64),
        ],
        m0 as f64,
    );
    Ok(KfoldResult {
        base: inst.k.clone(),
        placements,
        k,
        a,
        delta: inst.delta,
        lambda_size: inst.lambda.len(),
        edge_count: h.edge_count(),
        tau_hat: fc.total,
        tau_lower: fc.lower_bound,
        nstar_lower,
        nstar_upper,
        count_bound: m0 as u64,
        attempts,
        lambda_min_multiplicity: lambda_min,
        probe_min_multiplicity: probe_min,
        periodic_density,
        window_density,
        count_report,
        density_formula: kfold_density_bound(2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn density_formula_values() {
        assert!((kfold_density_bound(2).unwrap().value - 545.165_402).abs() < 1e-5);
        assert!((kfold_density_bound(3).unwrap().value - 899.800_009).abs() < 1e-5);
        assert!(kfold_density_bound(1).is_err());
    }

    #[test]
    fn small_square_pipeline() {
        let k = ConvexPolygon::square(Vec2::ZERO, 2.0).unwrap();
        let cfg = KfoldConfig {
            translate: TranslateConfig {
                a: 2.0,
                delta: 0.5,
                ..TranslateConfig::default()
            },
            probes: 5000,
            ..KfoldConfig::default()
        };
        let r = kfold_pipeline(&k, 2, &cfg, &mut seeded_rng(1)).unwrap();
        assert!(r.probe_min_multiplicity >= 2);
        assert!(r.placements.len() as u64 <= r.count_bound);
        assert!(r.tau_hat <= 1.05 * r.nstar_upper);
    }
}
