//! One function per subcommand. Each returns a [`Report`] whose checks
//! decide the exit status.

use covering::epsnet::{
    bounded_net_parameters, edge_counts, interval_instance, low_multiplicity_target,
    sample_bounded_net, sample_low_multiplicity, sauer_shelah, shatter_function, strip_instance,
    vc_dimension, Multiset, NetReport, NetVariant, CALIBRATED,
};
use covering::geometry::{rogers_bound, Aabb, ConvexPolygon, Placement, Vec2};
use covering::homothet::{
    band_count, cover_body, ring_cover, small_family_volume_bound, vitali_cover, volume_threshold,
    CoverCase, HomothetFamily, RingConfig, VitaliConfig,
};
use covering::hypergraph::FiniteHypergraph;
use covering::multicover::{
    discretize_nstar, fractional_cover, kfold_density_bound, kfold_pipeline, nstar_bounds,
    tau_k_bound, EdgeShape, KfoldConfig, MwuConfig, TranslateConfig,
};
use covering::strips::{
    construct_cover, dual_check, sampled_multiplicity_range, thin_strip_bound,
    thin_strip_experiment, StripConfig, ThinStripConfig,
};
use covering::verify::{
    build_sphere_net, grid_coverage, region_coverage, CoverageReport, NetConfig, SamplePattern,
};
use covering::{Error, Result, SeededRng};
use rand::Rng;

use crate::args::*;
use crate::parse;
use crate::report::{int, CsvFile, Report};
use crate::svg::{heatmap_direction, render_heatmap, render_scene, Scene};

fn f(x: f64) -> String {
    x.to_string()
}

fn placements_csv(name: &str, placements: &[Placement], tags: &[i64]) -> CsvFile {
    let mut c = CsvFile::new(name, &["ratio", "tx", "ty", "tag"]);
    for (p, t) in placements.iter().zip(tags) {
        c.row(vec![
            f(p.ratio),
            f(p.translation.x),
            f(p.translation.y),
            t.to_string(),
        ]);
    }
    c
}

fn coverage_fields(r: &mut Report, prefix: &str, c: &CoverageReport) {
    r.set(
        &format!("{prefix}_uncovered_fraction"),
        c.uncovered_fraction,
    );
    r.set(
        &format!("{prefix}_min_multiplicity"),
        int(c.min_multiplicity),
    );
    r.set(
        &format!("{prefix}_max_multiplicity"),
        int(c.max_multiplicity),
    );
    r.set(&format!("{prefix}_samples"), int(c.samples));
}

fn histogram_csv(c: &CoverageReport) -> CsvFile {
    let mut h = CsvFile::new("histogram", &["multiplicity", "count"]);
    for (m, n) in c.histogram.iter().enumerate() {
        h.row(vec![m.to_string(), n.to_string()]);
    }
    h
}

fn net_fields(r: &mut Report, n: &NetReport) {
    r.set("min_edge_count", int(n.min_edge_count));
    r.set("max_edge_count", int(n.max_edge_count));
    r.set("target_lower", int(n.target_lower));
    r.set("target_upper", int(n.target_upper));
    r.set("sample_size", int(n.sample_size));
    r.set("attempts", int(n.attempts));
}

/// Net outcome as a report; exhausted retries become a failed check that
/// still records the best attempt.
fn net_outcome(
    r: &mut Report,
    h: &FiniteHypergraph,
    out: Result<(Multiset, NetReport)>,
) -> Result<()> {
    match out {
        Ok((sample, rep)) => {
            net_fields(r, &rep);
            r.check("net_targets_met", rep.pass);
            let counts = edge_counts(h, &sample);
            let (lo, hi) = (
                counts.iter().copied().min().unwrap_or(0),
                counts.iter().copied().max().unwrap_or(0),
            );
            r.check(
                "recount_agrees",
                lo == rep.min_edge_count && hi == rep.max_edge_count,
            );
            let mut c = CsvFile::new("sample", &["element", "multiplicity"]);
            for (e, m) in &sample.items {
                c.row(vec![e.to_string(), m.to_string()]);
            }
            r.csv.push(c);
            Ok(())
        }
        Err(Error::RetriesExhausted { attempts, best }) => {
            if let Some(b) = best {
                net_fields(r, &b);
            }
            r.set("failure", format!("all {attempts} attempts failed"));
            r.check("net_targets_met", false);
            Ok(())
        }
        Err(e) => Err(e),
    }
}

pub fn strips(a: &StripsArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("strips");
    let cfg = StripConfig {
        width_factor: a.width_factor,
        net_factor: a.net_factor,
        multiplicity_constant: a.constant,
        net: NetConfig::default(),
    };
    let cover = construct_cover(a.n, &cfg, g.retries, rng)?;
    let c = &cover.certificate;
    r.set("covered", c.covered);
    r.set("multiplicity_bound", int(c.multiplicity_bound));
    r.set("multiplicity_cap", c.multiplicity_cap);
    r.set("half_width", c.half_width);
    r.set("shrunk_width", c.shrunk_width);
    r.set("expanded_width", c.expanded_width);
    r.set("net_radius", c.net_radius);
    r.set("net_size", int(c.net_size));
    r.set("attempts", int(c.attempts));
    r.check("covered", c.covered);
    r.check(
        "multiplicity_within_cap",
        c.multiplicity_bound as f64 <= c.multiplicity_cap,
    );
    if a.mc_probes > 0 {
        let (lo, hi) = sampled_multiplicity_range(&cover.strips, a.mc_probes, rng);
        r.set("mc_probes", int(a.mc_probes));
        r.set("mc_min_multiplicity", int(lo));
        r.set("mc_max_multiplicity", int(hi));
        r.check("mc_no_uncovered_direction", lo >= 1);
        r.check("mc_within_certified_bound", hi <= c.multiplicity_bound);
    }
    let mut csv = CsvFile::new("strips", &["cx", "cy", "cz", "w"]);
    for s in &cover.strips {
        csv.row(vec![
            f(s.center.x),
            f(s.center.y),
            f(s.center.z),
            f(s.half_width),
        ]);
    }
    r.csv.push(csv);
    if g.svg {
        let (rows, cols) = (45, 90);
        let grid: Vec<Vec<u32>> = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        let v = heatmap_direction(i, j, rows, cols);
                        cover.strips.iter().filter(|s| s.contains(v)).count() as u32
                    })
                    .collect()
            })
            .collect();
        r.svg = Some(render_heatmap(&grid));
    }
    Ok(r)
}

pub fn thin_strips(a: &ThinStripsArgs, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("thin-strips");
    let cfg = ThinStripConfig {
        constant: a.constant,
        net: NetConfig {
            max_points: a.net_budget,
            ..NetConfig::default()
        },
        allow_coarse_net: true,
    };
    let t = thin_strip_experiment(a.n, &cfg, rng)?;
    r.set("half_width", t.half_width);
    r.set("empirical_max", int(t.empirical_max));
    r.set("bound", t.bound);
    r.set("net_radius", t.net_radius);
    r.set("net_size", int(t.net_size));
    r.set("coarse_net", t.coarse_net);
    r.check(
        "empirical_max_within_bound",
        t.empirical_max as f64 <= t.bound,
    );
    Ok(r)
}

pub fn dual(a: &StripsArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("dual");
    let cfg = StripConfig {
        width_factor: a.width_factor,
        net_factor: a.net_factor,
        multiplicity_constant: a.constant,
        net: NetConfig::default(),
    };
    let cover = construct_cover(a.n, &cfg, g.retries, rng)?;
    let points: Vec<_> = cover.strips.iter().map(|s| s.center).collect();
    let w = cover.certificate.half_width;
    let b = dual_check(&points, w, &cover.net)?;
    let cap = cover.certificate.multiplicity_cap;
    r.set("half_width", w);
    r.set("net_radius", cover.net.covering_radius);
    r.set("min_count_lb", int(b.min_count_lb));
    r.set("max_count_ub", int(b.max_count_ub));
    r.set("count_cap", cap);
    r.check("every_strip_holds_a_point", b.min_count_lb >= 1);
    r.check("every_strip_holds_few_points", b.max_count_ub as f64 <= cap);
    Ok(r)
}

pub fn kfold(a: &KfoldArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("kfold");
    let body = parse::body(&a.body)?.scale(a.scale);
    let cfg = KfoldConfig {
        translate: TranslateConfig {
            delta: a.delta,
            a: a.a,
            edge_shape: match a.edge_shape {
                EdgeShapeArg::Scaled => EdgeShape::Scaled,
                EdgeShapeArg::Eroded => EdgeShape::Eroded,
            },
            ..TranslateConfig::default()
        },
        mwu: MwuConfig::with_gap(a.gap),
        retries: g.retries,
        probes: a.probes,
    };
    let res = kfold_pipeline(&body, a.k, &cfg, rng)?;
    r.set("placements", int(res.placements.len()));
    r.set("count_bound", int(res.count_bound));
    r.set("lambda_size", int(res.lambda_size));
    r.set("edge_count", int(res.edge_count));
    r.set("tau_hat", res.tau_hat);
    r.set("tau_lower", res.tau_lower);
    r.set("nstar_lower", res.nstar_lower);
    r.set("nstar_upper", res.nstar_upper);
    r.set("attempts", int(res.attempts));
    r.set("lambda_min_multiplicity", int(res.lambda_min_multiplicity));
    r.set("probe_min_multiplicity", int(res.probe_min_multiplicity));
    r.set("periodic_density", res.periodic_density);
    r.set("window_density", res.window_density);
    r.set("density_formula", res.density_formula.value);
    r.check("k_fold_at_lambda", res.lambda_min_multiplicity >= a.k);
    r.check("k_fold_at_probes", res.probe_min_multiplicity >= a.k);
    r.check(
        "count_within_bound",
        res.placements.len() as u64 <= res.count_bound,
    );
    r.check(
        "fractional_value_near_upper",
        res.tau_hat <= (1.0 + a.gap) * res.nstar_upper,
    );
    r.csv.push(placements_csv(
        "placements",
        &res.placements,
        &vec![0; res.placements.len()],
    ));
    if g.svg {
        let h = a.a / 2.0;
        let region = ConvexPolygon::square(Vec2::ZERO, a.a)?;
        let scene = Scene {
            bodies: res
                .placements
                .iter()
                .enumerate()
                .map(|(i, p)| (p.body(&res.base), i))
                .collect(),
            outlines: vec![region],
        };
        let view = Aabb::new(Vec2::new(-h - 2.0, -h - 2.0), Vec2::new(h + 2.0, h + 2.0));
        r.svg = Some(render_scene(&scene, view));
    }
    Ok(r)
}

pub fn fraccover(a: &FraccoverArgs) -> Result<Report> {
    let mut r = Report::new("fraccover");
    let mwu = MwuConfig::with_gap(a.gap);
    if let Some(path) = &a.hypergraph {
        let h = FiniteHypergraph::from_text(&std::fs::read_to_string(path)?)?;
        let fc = fractional_cover(&h, &mwu)?;
        r.set("value", fc.total);
        r.set("lower_bound", fc.lower_bound);
        r.set("iterations", int(fc.iterations));
        r.check("feasible", fc.is_feasible(&h, 1e-6));
        r.check("within_gap", fc.certified);
        return Ok(r);
    }
    let k = parse::body(&a.body)?;
    let l = parse::body(&a.target)?.scale(a.target_scale);
    let (lower, upper) = nstar_bounds(&k, &l);
    let inst = discretize_nstar(&k, &l, a.pitch)?;
    let fc = fractional_cover(&inst.hypergraph, &mwu)?;
    r.set("lower", lower);
    r.set("upper", upper);
    r.set("value", fc.total);
    r.set("dual_lower_bound", fc.lower_bound);
    r.set("disc_slack", inst.disc_slack);
    r.set("ground", int(inst.ground.len()));
    r.set("edges", int(inst.hypergraph.edge_count()));
    r.check("feasible", fc.is_feasible(&inst.hypergraph, 1e-6));
    r.check(
        "above_lower",
        lower - inst.disc_slack <= fc.total * (1.0 + 1e-9),
    );
    r.check("below_upper", fc.total <= (1.0 + a.gap) * upper);
    Ok(r)
}

pub fn cover_body_cmd(a: &CoverBodyArgs, g: &GlobalOpts) -> Result<Report> {
    let mut r = Report::new("cover-body");
    let k = parse::body(&a.body)?;
    let ratios = parse::ratios(&a.ratios)?;
    r.set("members", int(ratios.len()));
    let mut fam = HomothetFamily::finite(k.clone(), ratios)?;
    let cover = cover_body(&mut fam, a.epsilon)?;
    let (case, tag) = match cover.case {
        CoverCase::Band { band } => (format!("band {band}"), band as i64),
        CoverCase::Small => ("small".to_string(), -1),
    };
    r.set("case", case);
    r.set("placements", int(cover.placements.len()));
    r.set("theta_hat", cover.theta_hat);
    r.set("threshold", cover.threshold);
    r.set("ratio_sum", cover.ratio_sum);
    let cov = region_coverage(
        &k,
        &cover.placements,
        &k,
        g.resolution,
        SamplePattern::Centers,
    )?;
    coverage_fields(&mut r, "grid", &cov);
    r.check("covers_body", cov.uncovered_fraction == 0.0);
    r.csv.push(placements_csv(
        "placements",
        &cover.placements,
        &vec![tag; cover.placements.len()],
    ));
    r.csv.push(histogram_csv(&cov));
    if g.svg {
        let scene = Scene {
            bodies: cover.placements.iter().map(|p| (p.body(&k), 0)).collect(),
            outlines: vec![k.clone()],
        };
        let b = k.bbox();
        let pad = 0.5 * b.width().max(b.height());
        let view = Aabb::new(b.min - Vec2::new(pad, pad), b.max + Vec2::new(pad, pad));
        r.svg = Some(render_scene(&scene, view));
    }
    Ok(r)
}

pub fn vitali(a: &VitaliArgs, g: &GlobalOpts) -> Result<Report> {
    let mut r = Report::new("vitali");
    let k = parse::body(&a.body)?;
    let mut fam = HomothetFamily::generated(k.clone(), parse::generator(&a.generator)?)?;
    let cfg = VitaliConfig {
        epsilon0: a.epsilon0,
        residual_target: a.residual_target,
        max_level: a.max_level,
        phase2_offset: a.phase2_offset,
        ..VitaliConfig::default()
    };
    let window = Aabb::unit();
    let v = vitali_cover(&mut fam, window, &cfg)?;
    r.set("placements", int(v.placements.len()));
    r.set("phase1_count", int(v.phase1_count));
    r.set("phase1_volume", v.phase1_volume);
    r.set("phase2_volume", v.phase2_volume);
    r.set("used_volume", v.used_volume());
    r.set("volume_bound", v.volume_bound);
    r.set("uncovered_after_phase1", v.uncovered_after_phase1);
    r.set("last_level", int(v.last_level));
    r.set("phase2_ratio", v.phase2_ratio);
    let cov = grid_coverage(
        &k,
        &v.placements,
        window,
        g.resolution,
        SamplePattern::Centers,
    )?;
    coverage_fields(&mut r, "grid", &cov);
    r.check(
        "residual_below_target",
        cov.uncovered_fraction < a.residual_target.max(f64::MIN_POSITIVE),
    );
    r.check("volume_within_bound", v.used_volume() <= v.volume_bound);
    r.check("phase2_within_budget", v.phase2_volume <= a.epsilon0);
    let tags: Vec<i64> = (0..v.placements.len())
        .map(|i| if i < v.phase1_count { 1 } else { 2 })
        .collect();
    r.csv
        .push(placements_csv("placements", &v.placements, &tags));
    r.csv.push(histogram_csv(&cov));
    if g.svg {
        let scene = Scene {
            bodies: v
                .placements
                .iter()
                .zip(&tags)
                .map(|(p, t)| (p.body(&k), *t as usize))
                .collect(),
            outlines: vec![window.to_polygon()?],
        };
        r.svg = Some(render_scene(&scene, window));
    }
    Ok(r)
}

pub fn rings(a: &RingsArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("rings");
    let k = parse::body(&a.body)?;
    let mut fam = HomothetFamily::generated(k.clone(), parse::generator(&a.generator)?)?;
    let cfg = RingConfig {
        extent: a.extent,
        epsilon: a.epsilon,
        smooth: a.smooth,
        ..RingConfig::default()
    };
    let s = ring_cover(&mut fam, &cfg)?;
    let props = s.verify_properties(&k);
    let cert = s.certify(&k, a.probes, rng);
    r.set("smooth_used", s.smooth_used);
    r.set("shells", int(s.shells.len()));
    r.set("placements", int(s.placements().len()));
    r.set("opposite_pairs", int(props.opposite_pairs));
    r.set("opposite_violations", int(props.opposite_violations));
    r.set("far_pairs", int(props.far_pairs));
    r.set("far_violations", int(props.far_violations));
    r.set("growth_violations", int(props.growth_violations));
    r.set("probes", int(cert.probes));
    r.set("min_multiplicity", int(cert.min_multiplicity));
    r.set("max_multiplicity", int(cert.max_multiplicity));
    r.set("multiplicity_limit", int(cert.bound));
    if let Some(fr) = &s.frame {
        r.set(
            "frame_edges",
            toml::Value::Array(fr.edges.iter().map(|e| int(*e)).collect()),
        );
    }
    r.check("shell_properties", props.holds());
    r.check("window_covered", cert.min_multiplicity >= 1);
    r.check(
        "multiplicity_within_limit",
        cert.max_multiplicity <= cert.bound,
    );
    let placements = s.placements();
    let tags: Vec<i64> = s.shell_tags().into_iter().map(|t| t as i64).collect();
    r.csv.push(placements_csv("placements", &placements, &tags));
    if g.svg {
        let scene = Scene {
            bodies: placements
                .iter()
                .zip(&tags)
                .map(|(p, t)| (p.body(&k), *t as usize))
                .collect(),
            outlines: s
                .shells
                .iter()
                .skip(1)
                .map(|sh| s.shape.scale(sh.alpha))
                .collect(),
        };
        let e = a.extent;
        r.svg = Some(render_scene(
            &scene,
            Aabb::new(Vec2::new(-e, -e), Vec2::new(e, e)),
        ));
    }
    Ok(r)
}

pub fn epsnet(a: &EpsnetArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("epsnet");
    let (variant, c0, c10) = match a.variant {
        VariantArg::A => (NetVariant::A, CALIBRATED.c_a, CALIBRATED.c1_a),
        VariantArg::B => (NetVariant::B, CALIBRATED.c_b, CALIBRATED.c1_b),
    };
    let (c, c1) = (a.c.unwrap_or(c0), a.c1.unwrap_or(c10));
    r.config.insert("c".into(), c.into());
    r.config.insert("c1".into(), c1.into());
    let h = match a.instance {
        InstanceArg::Intervals => interval_instance(a.n, a.epsilon)?,
        InstanceArg::Strips => {
            let net = build_sphere_net(a.net_radius, &NetConfig::default(), rng)?;
            strip_instance(&net, a.epsilon, a.ground, rng)?
        }
    };
    let (size, upper) = bounded_net_parameters(a.epsilon, a.d, variant, c, c1);
    r.set("ground", int(h.ground_size()));
    r.set("edges", int(h.edge_count()));
    r.set("planned_sample_size", int(size));
    r.set("planned_upper_target", int(upper));
    let out = sample_bounded_net(&h, a.epsilon, a.d, variant, c, c1, g.retries, rng);
    net_outcome(&mut r, &h, out)?;
    Ok(r)
}

pub fn lowmult(a: &LowmultArgs, g: &GlobalOpts, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("lowmult");
    if a.n == 0 || !a.ground.is_multiple_of(a.n) {
        return Err(Error::InvalidParameter(format!(
            "ground {} must be a positive multiple of N = {}",
            a.ground, a.n
        )));
    }
    let h = interval_instance(a.ground, 1.0 / a.n as f64)?;
    r.set("edges", int(h.edge_count()));
    r.set("target", low_multiplicity_target(a.n, a.d, a.c));
    let out = sample_low_multiplicity(&h, a.n, a.d, a.c, g.retries, rng);
    net_outcome(&mut r, &h, out)?;
    Ok(r)
}

/// All contiguous ranges of a line of `n` points.
pub fn line_intervals(n: usize) -> Result<FiniteHypergraph> {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i..n as u32 {
            edges.push((i..=j).collect());
        }
    }
    FiniteHypergraph::uniform(n, edges)
}

pub fn vc(a: &VcArgs, rng: &mut SeededRng) -> Result<Report> {
    let mut r = Report::new("vc");
    let h = if let Some(path) = &a.hypergraph {
        FiniteHypergraph::from_text(&std::fs::read_to_string(path)?)?
    } else {
        match a.family {
            FamilyArg::Intervals => line_intervals(a.n)?,
            FamilyArg::Arcs => {
                if a.n == 0 {
                    return Err(Error::InvalidParameter("empty ground set".into()));
                }
                interval_instance(a.n, a.size as f64 / a.n as f64)?
            }
            FamilyArg::Singletons => {
                FiniteHypergraph::uniform(a.n, (0..a.n as u32).map(|i| vec![i]).collect())?
            }
            FamilyArg::Random => {
                let edges = (0..a.size)
                    .map(|_| {
                        let mut e: Vec<u32> =
                            (0..a.n as u32).filter(|_| rng.random::<bool>()).collect();
                        if e.is_empty() {
                            e.push(rng.random_range(0..a.n.max(1) as u32));
                        }
                        e
                    })
                    .collect();
                FiniteHypergraph::uniform(a.n, edges)?
            }
        }
    };
    let d = vc_dimension(&h)?;
    r.set("ground", int(h.ground_size()));
    r.set("edges", int(h.edge_count()));
    r.set("vc_dimension", int(d));
    let mut csv = CsvFile::new("shatter", &["m", "shatter", "sum_bound", "coarse_bound"]);
    let (mut within_sum, mut sum_within_coarse, mut monotone) = (true, true, true);
    let mut prev = 0;
    for m in 0..=h.ground_size() {
        let pi = shatter_function(&h, m)?;
        let (sum, coarse) = sauer_shelah(d as u32, m as u64);
        within_sum &= pi as u128 <= sum;
        if m >= 1 {
            sum_within_coarse &= sum <= coarse;
        }
        monotone &= pi >= prev;
        prev = pi;
        csv.row(vec![
            m.to_string(),
            pi.to_string(),
            sum.to_string(),
            coarse.to_string(),
        ]);
    }
    r.csv.push(csv);
    r.check("shatter_within_sum_bound", within_sum);
    r.check("sum_within_coarse_bound", sum_within_coarse);
    r.check("shatter_nondecreasing", monotone);
    Ok(r)
}

pub fn bounds(a: &BoundsArgs) -> Result<Report> {
    let mut r = Report::new("bounds");
    r.set("covering_density", rogers_bound(a.d)?.value);
    r.set(
        "homothet_threshold_symmetric",
        volume_threshold(a.d, true, a.theta)?.value,
    );
    r.set(
        "homothet_threshold_general",
        volume_threshold(a.d, false, a.theta)?.value,
    );
    r.set("kfold_density", kfold_density_bound(a.d)?.value);
    r.set("band_count", int(band_count(1.0 / a.d as f64, a.d)?));
    let (exact, coarse) = tau_k_bound(a.tau, a.k, a.ground)?;
    r.set("rounding_exact", int(exact));
    r.set("rounding_coarse", int(coarse));
    r.set("strip_multiplicity_cap", 100.0 * (a.n as f64).ln());
    r.set("strip_half_width", 10.0 * (a.n as f64).ln() / a.n as f64);
    r.set("thin_strip_bound", thin_strip_bound(a.thin_n, 100.0));
    let unit = ConvexPolygon::rectangle(Vec2::ZERO, Vec2::new(1.0, 1.0))?;
    let centered = ConvexPolygon::square(Vec2::ZERO, 1.0)?;
    r.set(
        "small_family_bound_example",
        small_family_volume_bound(&unit, &centered, 0.5)?.value,
    );
    r.check("rounding_exact_within_coarse", exact <= coarse);
    Ok(r)
}
