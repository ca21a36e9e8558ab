use covering::epsnet::{edge_counts, sauer_shelah, shatter_function, vc_dimension, Multiset};
use covering::geometry::Aabb;
use covering::geometry::Placement;
use covering::geometry::{ConvexPolygon, Vec2, Vec3};
use covering::hypergraph::FiniteHypergraph;
use covering::multicover::{fractional_cover, tau_k_bound, MwuConfig};
use covering::seeded_rng;
use covering::strips::Strip;
use covering::verify::{grid_coverage, SamplePattern};
use proptest::prelude::*;
use rand::Rng;

fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((0.0..std::f64::consts::TAU, 0.3f64..2.0), 3..14).prop_filter_map(
        "degenerate hull",
        |pts| {
            let v: Vec<Vec2> = pts.iter().map(|&(a, r)| Vec2::from_angle(a) * r).collect();
            ConvexPolygon::from_points(&v)
                .ok()
                .filter(|p| p.area() > 1e-3)
        },
    )
}

fn hypergraph(max_ground: usize) -> impl Strategy<Value = FiniteHypergraph> {
    (1..=max_ground, 1usize..40).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), m).prop_map(move |rows| {
            let edges = rows
                .into_iter()
                .enumerate()
                .map(|(j, r)| {
                    let e: Vec<u32> = (0..n as u32).filter(|&i| r[i as usize]).collect();
                    if e.is_empty() {
                        vec![(j % n) as u32]
                    } else {
                        e
                    }
                })
                .collect();
            FiniteHypergraph::uniform(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_area_is_superadditive(p in polygon(), q in polygon()) {
        let s = p.minkowski_sum(&q);
        prop_assert!(s.area() >= p.area() + q.area() - 1e-9);
    }

    #[test]
    fn scaling_multiplies_area(p in polygon(), l in 0.01f64..50.0, cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
        let s = p.scale_about(Vec2::new(cx, cy), l);
        prop_assert!((s.area() - l * l * p.area()).abs() <= 1e-9 * s.area());
    }

    #[test]
    fn erosion_undoes_sum(p in polygon(), t in polygon()) {
        let grown = p.minkowski_sum(&t);
        let back = grown.erode(&t).unwrap();
        for v in p.vertices() {
            prop_assert!(back.contains_tol(*v, 1e-7));
        }
    }

    #[test]
    fn difference_body_area(p in polygon()) {
        let d = p.difference_body().area();
        prop_assert!(d <= 6.0 * p.area() * (1.0 + 1e-9));
        prop_assert!(d >= 4.0 * p.area() * (1.0 - 1e-9));
        let sym = p.intersect(&p.reflect());
        if let Ok(s) = sym {
            prop_assert!((s.difference_body().area() - 4.0 * s.area()).abs() <= 1e-8 * s.area());
        }
    }

    #[test]
    fn vertices_are_contained(p in polygon()) {
        for v in p.vertices() {
            prop_assert!(p.contains(*v));
        }
    }

    #[test]
    fn rounding_bounds_are_ordered(tau in 1.0f64..1e4, k in 1u32..500, n in 1usize..1_000_000) {
        let (exact, coarse) = tau_k_bound(tau, k, n).unwrap();
        prop_assert!(exact <= coarse, "{exact} > {coarse}");
    }

    #[test]
    fn shatter_respects_sauer_shelah(h in hypergraph(12)) {
        let d = vc_dimension(&h).unwrap();
        let mut prev = 0;
        for m in 0..=h.ground_size() {
            let pi = shatter_function(&h, m).unwrap();
            let (sum, coarse) = sauer_shelah(d as u32, m as u64);
            prop_assert!(pi as u128 <= sum);
            if m >= 1 {
                prop_assert!(sum <= coarse);
            }
            prop_assert!(pi >= prev);
            prev = pi;
        }
    }

    #[test]
    fn fractional_covers_are_feasible(seed in any::<u64>(), n in 2usize..40, m in 1usize..60) {
        let mut rng = seeded_rng(seed);
        let h = FiniteHypergraph::random_covering(n, m, 0.2, &mut rng).unwrap();
        let fc = fractional_cover(&h, &MwuConfig::default()).unwrap();
        prop_assert!(fc.is_feasible(&h, 1e-6));
        prop_assert!(fc.lower_bound <= fc.total * (1.0 + 1e-9));
    }

    #[test]
    fn recount_matches_multiset(h in hypergraph(15), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let n = h.ground_size() as u32;
        let draws: Vec<u32> = (0..30).map(|_| rng.random_range(0..n)).collect();
        let counts = edge_counts(&h, &Multiset::from_draws(draws.clone()));
        for (e, c) in h.edges().iter().zip(counts) {
            let direct = draws.iter().filter(|x| e.contains(x)).count() as u64;
            prop_assert_eq!(c, direct);
        }
    }

    #[test]
    fn histogram_totals_samples(seed in any::<u64>(), count in 1usize..12, res in 5usize..60) {
        let mut rng = seeded_rng(seed);
        let base = ConvexPolygon::square(Vec2::ZERO, 1.0).unwrap();
        let placements: Vec<Placement> = (0..count)
            .map(|_| Placement {
                translation: Vec2::new(rng.random(), rng.random()),
                ratio: rng.random_range(0.05..0.6),
            })
            .collect();
        let r = grid_coverage(&base, &placements, Aabb::unit(), res, SamplePattern::Centers).unwrap();
        prop_assert_eq!(r.histogram.iter().sum::<u64>(), r.samples);
    }
}

#[test]
fn strip_measure_equals_half_width() {
    let mut rng = seeded_rng(3);
    let center = Vec3::new(0.3, -0.5, 0.8).normalized();
    let trials = 200_000;
    for w in [0.01, 0.1, 0.4] {
        let s = Strip::new(center, w).unwrap();
        let hits = (0..trials)
            .filter(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let r = (1.0 - z * z).sqrt();
                s.contains(Vec3::new(r * phi.cos(), r * phi.sin(), z))
            })
            .count() as f64;
        let sigma = (w * (1.0 - w) / trials as f64).sqrt();
        assert!(
            (hits / trials as f64 - w).abs() <= 3.0 * sigma + 1e-12,
            "w = {w}"
        );
    }
}

#[test]
fn intervals_on_three_points_meet_the_sum_bound() {
    // On a 5-point line some interval misses any 3 points, so the empty
    // trace is available too.
    let mut edges = Vec::new();
    for i in 0..5u32 {
        for j in i..5 {
            edges.push((i..=j).collect());
        }
    }
    let h = FiniteHypergraph::uniform(5, edges).unwrap();
    assert_eq!(vc_dimension(&h).unwrap(), 2);
    assert_eq!(shatter_function(&h, 3).unwrap(), 7);
    assert_eq!(sauer_shelah(2, 3).0, 7);
}
