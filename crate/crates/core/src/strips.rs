//! Strip coverings of the unit sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// The strip {v ∈ S² : |<v, center>| ≤ half_width}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub center: Vec3,
    pub half_width: f64,
}

impl Strip {
    /// Normalizes `center`; the half-width must lie in (0, 1].
    pub fn new(center: Vec3, half_width: f64) -> Result<Self> {
        let n = center.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(
                "strip center must be nonzero".into(),
            ));
        }
        if !(half_width > 0.0 && half_width <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "strip half-width {half_width} outside (0, 1]"
            )));
        }
        Ok(Strip {
            center: center * (1.0 / n),
            half_width,
        })
    }

    pub fn contains(&self, v: Vec3) -> bool {
        self.center.dot(v).abs() <= self.half_width
    }
}

use rand::Rng;

use crate::verify::{
    build_sphere_net, certify_strip_cover, certify_strip_multiplicity, uniform_sphere_point,
    NetConfig, SphereNet,
};

/// `count` independent uniform points of S².
pub fn sample_strip_centers<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Vec3> {
    (0..count).map(|_| uniform_sphere_point(rng)).collect()
}

/// Constants of the randomized strip cover; the defaults are half-width
/// 10·ln N/N, net radius ln N/N and multiplicity cap 100·ln N.
#[derive(Clone, Debug, PartialEq)]
pub struct StripConfig {
    pub width_factor: f64,
    pub net_factor: f64,
    pub multiplicity_constant: f64,
    pub net: NetConfig,
}

impl Default for StripConfig {
    fn default() -> Self {
        StripConfig {
            width_factor: 10.0,
            net_factor: 1.0,
            multiplicity_constant: 100.0,
            net: NetConfig::default(),
        }
    }
}

/// Outcome of certifying one strip family against a net.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripCoverCertificate {
    pub covered: bool,
    pub multiplicity_bound: u32,
    /// Certified covering radius of the net used.
    pub net_radius: f64,
    pub net_size: usize,
    pub half_width: f64,
    pub shrunk_width: f64,
    pub expanded_width: f64,
    /// The asserted cap on `multiplicity_bound`.
    pub multiplicity_cap: f64,
    /// Number of sampled families tried, including the returned one.
    pub attempts: usize,
}

impl StripCoverCertificate {
    pub fn passes(&self) -> bool {
        self.covered && (self.multiplicity_bound as f64) <= self.multiplicity_cap
    }
}

/// A certified covering of S² by equal-width strips.
#[derive(Clone, Debug)]
pub struct StripCover {
    pub strips: Vec<Strip>,
    pub certificate: StripCoverCertificate,
    pub net: SphereNet,
}

/// Half-width 10·ln N/N (scaled by the configured factor).
pub fn cover_half_width(n: usize, cfg: &StripConfig) -> f64 {
    let nf = n as f64;
    cfg.width_factor * nf.ln() / nf
}

/// Certifies an arbitrary strip family against `net`.
pub fn certify(strips: &[Strip], net: &SphereNet, cap: f64) -> Result<StripCoverCertificate> {
    let w = strips.first().map_or(0.0, |s| s.half_width);
    let covered = certify_strip_cover(strips, net)?;
    let bound = certify_strip_multiplicity(strips, net);
    Ok(StripCoverCertificate {
        covered,
        multiplicity_bound: bound,
        net_radius: net.covering_radius,
        net_size: net.points.len(),
        half_width: w,
        shrunk_width: w - net.covering_radius,
        expanded_width: w + net.covering_radius,
        multiplicity_cap: cap,
        attempts: 1,
    })
}

/// Random strip cover with N strips of half-width 10·ln N/N: centers are
/// sampled uniformly and the family is accepted once the net certificate
/// proves coverage with multiplicity at most 100·ln N. Failed samples are
/// replaced by fresh draws from the same stream, at most `retries` times.
pub fn construct_cover<R: Rng + ?Sized>(
    n: usize,
    cfg: &StripConfig,
    retries: usize,
    rng: &mut R,
) -> Result<StripCover> {
    construct_cover_with(n, cfg, retries, rng, |count, rng| {
        sample_strip_centers(count, rng)
    })
}

/// [`construct_cover`] with a caller-supplied center sampler.
pub fn construct_cover_with<R, F>(
    n: usize,
    cfg: &StripConfig,
    retries: usize,
    rng: &mut R,
    mut sampler: F,
) -> Result<StripCover>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &mut R) -> Vec<Vec3>,
{
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need N >= 2 strips, got {n}"
        )));
    }
    let nf = n as f64;
    let w = cover_half_width(n, cfg);
    let r = cfg.net_factor * nf.ln() / nf;
    if !(w < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "half-width {w} is not below 1 for N = {n}"
        )));
    }
    if !(w > r) {
        return Err(Error::MarginTooSmall {
            width: w,
            radius: r,
        });
    }
    let mut net_cfg = cfg.net.clone();
    net_cfg.max_points = net_cfg.max_points.min(n.saturating_mul(n));
    let net = build_sphere_net(r, &net_cfg, rng)?;
    let cap = cfg.multiplicity_constant * nf.ln();
    let attempts = retries.max(1);
    for attempt in 1..=attempts {
        let centers = sampler(n, rng);
        let strips = centers
            .into_iter()
            .map(|c| Strip::new(c, w))
            .collect::<Result<Vec<_>>>()?;
        let mut cert = certify(&strips, &net, cap)?;
        cert.attempts = attempt;
        if cert.passes() {
            return Ok(StripCover {
                strips,
                certificate: cert,
                net,
            });
        }
    }
    Err(Error::RetriesExhausted {
        attempts,
        best: None,
    })
}

/// Knobs for [`thin_strip_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ThinStripConfig {
    pub constant: f64,
    pub net: NetConfig,
    /// When the radius-1/N net would exceed the point budget, coarsen it to
    /// fit instead of failing. The count bound stays sound, only looser.
    pub allow_coarse_net: bool,
}

impl Default for ThinStripConfig {
    fn default() -> Self {
        ThinStripConfig {
            constant: 100.0,
            net: NetConfig::default(),
            allow_coarse_net: true,
        }
    }
}

/// Result of [`thin_strip_experiment`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinStripReport {
    pub n: usize,
    pub half_width: f64,
    /// Sound upper bound on the number of points in any strip of
    /// half-width 1/N.
    pub empirical_max: u32,
    /// C·ln N / ln ln N.
    pub bound: f64,
    pub net_radius: f64,
    pub net_size: usize,
    pub coarse_net: bool,
}

/// C·ln N / ln ln N.
pub fn thin_strip_bound(n: usize, constant: f64) -> f64 {
    let l = (n as f64).ln();
    constant * l / l.ln()
}

/// Samples N uniform points and bounds, over all strips of half-width 1/N,
/// how many of them a single strip can hold.
pub fn thin_strip_experiment<R: Rng + ?Sized>(
    n: usize,
    cfg: &ThinStripConfig,
    rng: &mut R,
) -> Result<ThinStripReport> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!(
            "thin strip experiment needs N >= 10, got {n}"
        )));
    }
    let w = 1.0 / n as f64;
    let points = sample_strip_centers(n, rng);
    let budget = cfg.net.max_points;
    let mut r = w;
    let mut coarse = false;
    // A saturated net of separation r has roughly 9/r² points.
    if 9.0 / (r * r) > 0.9 * budget as f64 {
        if !cfg.allow_coarse_net {
            return Err(Error::BudgetExceeded(format!(
                "a net of radius {r} needs about {:.0} points, budget {budget}",
                9.0 / (r * r)
            )));
        }
        r = (10.0 / budget as f64).sqrt();
        coarse = true;
    }
    let net = build_sphere_net(r, &cfg.net, rng)?;
    let rho = net.covering_radius;
    let empirical_max = net
        .points
        .iter()
        .map(|x| points.iter().filter(|p| p.dot(*x).abs() <= w + rho).count() as u32)
        .max()
        .unwrap_or(0);
    Ok(ThinStripReport {
        n,
        half_width: w,
        empirical_max,
        bound: thin_strip_bound(n, cfg.constant),
        net_radius: rho,
        net_size: net.points.len(),
        coarse_net: coarse,
    })
}

/// Bounds for the point-set version: over every strip of half-width `w`,
/// the number of `points` inside lies in [min_count_lb, max_count_ub].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualBounds {
    pub min_count_lb: u32,
    pub max_count_ub: u32,
}

/// Counts points in shrunk (w − ρ) and expanded (w + ρ) strips around each
/// net direction, ρ the net's covering radius.
pub fn dual_check(points: &[Vec3], w: f64, net: &SphereNet) -> Result<DualBounds> {
    let rho = net.covering_radius;
    if points.is_empty() {
        return Ok(DualBounds {
            min_count_lb: 0,
            max_count_ub: 0,
        });
    }
    if w >= 1.0 {
        let n = points.len() as u32;
        return Ok(DualBounds {
            min_count_lb: n,
            max_count_ub: n,
        });
    }
    if w <= rho {
        return Err(Error::MarginTooSmall {
            width: w,
            radius: rho,
        });
    }
    let mut lo = u32::MAX;
    let mut hi = 0;
    for x in &net.points {
        let mut inner = 0;
        let mut outer = 0;
        for p in points {
            let d = p.dot(*x).abs();
            if d <= w + rho {
                outer += 1;
                if d <= w - rho {
                    inner += 1;
                }
            }
        }
        lo = lo.min(inner);
        hi = hi.max(outer);
    }
    Ok(DualBounds {
        min_count_lb: lo,
        max_count_ub: hi,
    })
}

/// Smallest and largest number of strips containing a direction, over
/// `samples` uniform directions.
pub fn sampled_multiplicity_range<R: Rng + ?Sized>(
    strips: &[Strip],
    samples: usize,
    rng: &mut R,
) -> (u32, u32) {
    let mut lo = u32::MAX;
    let mut hi = 0;
    for _ in 0..samples {
        let v = uniform_sphere_point(rng);
        let c = strips.iter().filter(|s| s.contains(v)).count() as u32;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn centers_are_unit_and_reproducible() {
        let a = sample_strip_centers(5, &mut seeded_rng(1));
        let b = sample_strip_centers(5, &mut seeded_rng(1));
        assert_eq!(a, b);
        for v in &a {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_n_is_rejected() {
        let r = construct_cover(3, &StripConfig::default(), 1, &mut seeded_rng(0));
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
        let r = thin_strip_experiment(1, &ThinStripConfig::default(), &mut seeded_rng(0));
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn thin_strip_bound_values() {
        assert!((thin_strip_bound(2000, 100.0) - 374.748_616).abs() < 1e-5);
        assert!((thin_strip_bound(10, 100.0) - 276.078_599).abs() < 1e-5);
    }

    #[test]
    fn adversarial_sampler_forces_retries() {
        let mut calls = 0;
        let cfg = StripConfig::default();
        let mut rng = seeded_rng(3);
        let res = construct_cover_with(200, &cfg, 3, &mut rng, |n, rng| {
            calls += 1;
            if calls < 3 {
                vec![Vec3::new(0.0, 0.0, 1.0); n]
            } else {
                sample_strip_centers(n, rng)
            }
        })
        .unwrap();
        assert_eq!(res.certificate.attempts, 3);
        assert!(res.certificate.covered);

        let res = construct_cover_with(200, &cfg, 2, &mut seeded_rng(3), |n, _| {
            vec![Vec3::new(0.0, 0.0, 1.0); n]
        });
        assert!(matches!(
            res,
            Err(Error::RetriesExhausted { attempts: 2, .. })
        ));
    }

    #[test]
    fn dual_trivial_cases() {
        let net = build_sphere_net(0.2, &NetConfig::default(), &mut seeded_rng(0)).unwrap();
        let pts = sample_strip_centers(9, &mut seeded_rng(1));
        assert_eq!(
            dual_check(&pts, 1.0, &net).unwrap(),
            DualBounds {
                min_count_lb: 9,
                max_count_ub: 9
            }
        );
        assert_eq!(dual_check(&[], 0.5, &net).unwrap().max_count_ub, 0);
        assert!(matches!(
            dual_check(&pts, 0.1, &net),
            Err(Error::MarginTooSmall { .. })
        ));
    }
}
