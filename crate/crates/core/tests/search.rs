mod common;

use std::f64::consts::PI;

use common::disk;
use platelab::geometry::{ConvexDomain, Point2};
use platelab::plate::LoadSpec;
use platelab::search::{
    diagnostics, optimize, symmetry_report, AdmissibleClassSpec, Iterate, IterateStatus, OptimizationTrace,
    SearchConfig,
};

fn config(seed: u64, iterations: usize) -> SearchConfig {
    let spec = AdmissibleClassSpec::new(1.0, 1.2).unwrap();
    let mut cfg = SearchConfig::new(spec, 1.0 / 16.0);
    cfg.seed = seed;
    cfg.iterations = iterations;
    cfg.vertex_count = 12;
    cfg.start = Some(ConvexDomain::rectangle(1.4, 0.7, Point2::default(), 1.0).unwrap());
    cfg
}

#[test]
fn same_seed_same_trace() {
    let f = LoadSpec::constant(1.0);
    let a = optimize(&config(9, 8), &f).unwrap();
    let b = optimize(&config(9, 8), &f).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json_lines().unwrap(), b.to_json_lines().unwrap());
    let c = optimize(&config(10, 8), &f).unwrap();
    assert_ne!(a.iterates, c.iterates);
}

#[test]
fn trace_contract() {
    let f = LoadSpec::constant(1.0);
    let cfg = config(3, 12);
    let t = optimize(&cfg, &f).unwrap();
    assert_eq!(t.iterates.len(), 13);
    assert_eq!(t.iterates[0].status, IterateStatus::Start);
    for it in t.iterates.iter().filter(|it| it.status != IterateStatus::Infeasible) {
        let d = it.domain.as_ref().unwrap();
        assert!(cfg.class_spec.membership(d).holds(), "iterate {}", it.iter);
    }
    let hist = t.incumbent_history();
    assert!(hist.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*hist.last().unwrap(), t.incumbent().gamma_star.unwrap());
    let inc = t.incumbent();
    assert!(-inc.mu1.unwrap() <= inc.gamma_star.unwrap());
    for it in t.accepted().skip(1) {
        assert!(it.d_h_step.unwrap() >= 0.0);
    }
    let lines = t.to_json_lines().unwrap();
    assert_eq!(lines.lines().count(), 13);
    assert!(lines.contains("\"d_H_step\""));

    let diag = diagnostics(&t);
    if t.accepted().count() >= 2 {
        let diag = diag.unwrap();
        assert!(diag.area_continuity_holds);
        assert!(diag.buckling_bound_holds);
    }
}

#[test]
fn zero_load_trace_tracks_buckling_load() {
    let f = LoadSpec::constant(0.0);
    let t = optimize(&config(1, 5), &f).unwrap();
    for it in t.iterates.iter().filter(|it| it.status == IterateStatus::Evaluated || it.iter == 0) {
        assert_eq!(it.gamma_star.unwrap(), -it.mu1.unwrap());
    }
    let sym = symmetry_report(&t, &f).unwrap();
    assert!(sym.zero_load);
    assert_eq!(sym.disk_gamma_star, Some(-sym.disk_mu1));
}

fn synthetic(domains: Vec<ConvexDomain>) -> OptimizationTrace {
    let n = domains.len();
    let iterates = domains
        .into_iter()
        .enumerate()
        .map(|(i, d)| Iterate {
            iter: i,
            domain: Some(d),
            gamma_star: Some(-(i as f64)),
            mu1: Some(100.0),
            accepted: true,
            d_h_step: None,
            status: IterateStatus::Evaluated,
            note: None,
        })
        .collect();
    OptimizationTrace {
        iterates,
        best: n - 1,
        seed: 0,
        config: config(0, 0),
        load: LoadSpec::constant(1.0),
    }
}

#[test]
fn diagnostics_on_constant_trace() {
    let d = disk(12, 0.6, 1.0);
    let diag = diagnostics(&synthetic(vec![d; 5])).unwrap();
    assert_eq!(diag.containment_index, Some(1));
    assert_eq!(diag.close_tail_start, Some(1));
    assert!(diag.containment_consistent);
    assert_eq!(diag.tail_diameter, 0.0);
    assert!(diag.area_continuity_holds);
}

#[test]
fn diagnostics_on_homothety_trace() {
    let limit = disk(12, 0.6, 1.0);
    let seq: Vec<ConvexDomain> = (1..=20)
        .map(|m| limit.scaled(1.0 - 0.5 / m as f64).unwrap())
        .chain(std::iter::once(limit.clone()))
        .collect();
    let diag = diagnostics(&synthetic(seq)).unwrap();
    // Scale 1 − 0.5/m reaches 0.9 at m = 5.
    assert_eq!(diag.containment_index, Some(5));
    let s = diag.close_tail_start.unwrap();
    assert!(s >= 5);
    assert!(diag.containment_consistent);
    assert!(diag.area_continuity_holds);
    assert!((diag.containment_margin - 0.1 * 0.6 * (PI / 12.0).cos()).abs() < 1e-12);
}

#[test]
fn diagnostics_need_two_accepted_iterates() {
    let t = synthetic(vec![disk(12, 0.6, 1.0)]);
    assert!(diagnostics(&t).is_err());
}

#[test]
fn symmetry_report_on_near_disk() {
    let d = disk(48, 0.6, 1.0);
    let mut t = synthetic(vec![d]);
    t.config.h = 1.0 / 16.0;
    let f = LoadSpec::constant(1.0);
    let sym = symmetry_report(&t, &f).unwrap();
    assert!(!sym.zero_load);
    // A regular 48-gon is within ρ(1 − cos(π/48)) of its circumcircle.
    assert!(sym.hausdorff_to_disk < 0.6 * (1.0 - (PI / 48.0).cos()));
    assert!((PI * sym.disk_radius.powi(2) - disk(48, 0.6, 1.0).area()).abs() < 1e-12);
    assert!(sym.disk_gamma_star.is_some());
}
