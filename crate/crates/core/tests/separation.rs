mod common;

use std::cmp::Ordering;

use common::*;
use exprays::approximation::classify_misiurewicz;
use exprays::combinatorics::CharacteristicPair;
use exprays::numerics::*;
use exprays::separation::*;
use exprays::Complex64;

fn pair(lo: &str, hi: &str) -> CharacteristicPair {
    CharacteristicPair::new(addr(lo), addr(hi)).unwrap()
}

fn satellite() -> CharacteristicPair {
    pair("| 0 1", "| 1 0")
}

#[test]
fn conjugate_pairs_give_mirror_curves() {
    let a = build_curve(&pair("| 1 -1 1", "| 1 0 0"), 20.0).unwrap();
    let b = build_curve(&pair("| -1 0 0", "| -1 1 -1"), 20.0).unwrap();
    assert!((a.landing.c - b.landing.c.conj()).norm() < 1e-6);
    for (x, y) in [(&a.lower_trace, &b.upper_trace), (&a.upper_trace, &b.lower_trace)] {
        assert_eq!(x.samples.len(), y.samples.len());
        for (p, q) in x.samples.iter().zip(&y.samples) {
            assert_eq!(p.t, q.t);
            assert!((p.z - q.z.conj()).norm() < 1e-6, "t = {}: {} vs {}", p.t, p.z, q.z);
        }
    }
    for z in &a.polyline {
        assert!(b.distance(z.conj()).0 < 1e-6);
    }
}

#[test]
fn satellite_curve_is_closed_at_the_root() {
    let curve = build_curve(&satellite(), 20.0).unwrap();
    let (lo, hi) = (curve.lower_trace.last().z, curve.upper_trace.last().z);
    assert!((lo - hi).norm() < 1e-3);
    assert!((lo - curve.landing.c).norm() < 1e-3 && (hi - curve.landing.c).norm() < 1e-3);
    assert!(curve.polyline.contains(&curve.landing.c));
    assert!(curve.polyline.len() >= 4);
    assert!(curve.closure <= curve.truncation);
    assert_eq!(curve.truncation, 20.0);
}

#[test]
fn small_truncation_is_a_precondition_error() {
    let err = build_curve(&satellite(), 0.5).unwrap_err();
    assert!(err.is_precondition(), "{err}");
    assert!(build_curve(&satellite(), -1.0).unwrap_err().is_precondition());
}

/// Side of `G_β(t)`, required to clear the polyline by an edge length.
fn side_of_ray_point(curve: &SeparatingCurve, beta: &str, t: f64) -> Side {
    let g = trace_parameter_ray(&addr(beta), t, 20.0, &TraceConfig::default())
        .unwrap()
        .last()
        .z;
    let (d, edge) = curve.distance(g);
    assert!(d >= edge, "{beta} at t = {t}: distance {d:e}, edge {edge:e}");
    curve.side_of(g)
}

#[test]
fn sides_of_the_satellite_curve() {
    let curve = build_curve(&satellite(), 20.0).unwrap();
    assert_eq!(curve.side_of(curve.landing.c), Side::OnCurve);
    for t in [0.5, 1.0] {
        for beta in ["| 0 1 1", "| 1 0 0", "0 1 1 | 0"] {
            assert_eq!(side_of_ray_point(&curve, beta, t), Side::Inside, "{beta} at t = {t}");
        }
        for beta in ["| 0 0 1", "| 1 1 0", "| 2", "| -1", "| 0", "| 1"] {
            assert_eq!(side_of_ray_point(&curve, beta, t), Side::Outside, "{beta} at t = {t}");
        }
    }
    let far = Complex64::new(20.0, std::f64::consts::TAU * 2.0 + 10.0);
    assert_eq!(curve.side_of(far), Side::Outside);
}

#[test]
fn sides_agree_with_the_order_of_addresses() {
    let p = satellite();
    let curve = build_curve(&p, 20.0).unwrap();
    let cfg = SolverConfig::default();
    for text in [
        "1 | 0",
        "0 | 1",
        "2 | 0",
        "-1 | 0",
        "1 | 2",
        "0 | 0 1 1",
        "1 0 0 | 0 0 1",
    ] {
        let beta = addr(text);
        let m = postsingular_period(&beta).unwrap();
        let c = find_misiurewicz_parameter(&beta, beta.preperiod_len(), m, &cfg)
            .unwrap()
            .c;
        let between = naive_cmp(p.lower(), &beta) == Ordering::Less && naive_cmp(&beta, p.upper()) == Ordering::Less;
        let expected = if between { Side::Inside } else { Side::Outside };
        assert_eq!(curve.side_of(c), expected, "{text} at {c}");
    }
}

fn figure() -> exprays::approximation::MisiurewiczCombinatorics {
    classify_misiurewicz(&addr("1 0 0 | 0 0 1"), 2).unwrap()
}

#[test]
fn misiurewicz_parameter_itself_is_rejected() {
    let m = figure();
    let cfg = SeparationConfig::default();
    let c0 = find_misiurewicz_parameter(&m.addresses()[0], 3, 3, &cfg.solver).unwrap();
    let err = verify_fiber_separation(&m, c0.c, 10, &cfg).unwrap_err();
    assert!(err.is_precondition(), "{err}");
}

#[test]
fn point_on_a_ray_of_the_combinatorics() {
    let m = figure();
    let cfg = SeparationConfig::default();
    let s1 = m.addresses()[0].clone();
    let c = trace_parameter_ray(&s1, 3.0, 20.0, &cfg.solver.trace).unwrap().last().z;
    let cert = verify_fiber_separation(&m, c, 10, &cfg).unwrap();
    assert_eq!(cert.verdict, Verdict::OnRay(s1));
    assert!(cert.ray_distance < cfg.margin);
    assert!(cert.to_text(None).starts_with("verdict: on-ray "));
}

#[test]
fn origin_is_separated_and_stays_separated() {
    let m = figure();
    let cfg = SeparationConfig::default();
    let cert = verify_fiber_separation(&m, Complex64::new(0.0, 0.0), 10, &cfg).unwrap();
    assert_eq!(cert.verdict, Verdict::Separated, "{}", cert.to_text(None));
    let test = cert.test.as_ref().unwrap();
    let curve = cert.curve.as_ref().unwrap();
    assert!(test.n <= 10);
    assert_ne!(test.side_c0, test.side_c);
    assert!(![test.side_c0, test.side_c].contains(&Side::OnCurve));
    assert!(test.distance_c0 >= 10.0 * test.edge_c0 && test.distance_c >= 10.0 * test.edge_c);
    assert_eq!(curve.side_of(cert.c0.c), test.side_c0);
    assert_eq!(curve.side_of(cert.c), test.side_c);
    assert!(cert.ray_distance >= cfg.margin);

    let fine = verify_fiber_separation(&m, Complex64::new(0.0, 0.0), 10, &cfg.refined(2.0)).unwrap();
    assert_eq!(fine.verdict, Verdict::Separated);
    let text = cert.to_text(Some(("lo.txt", "hi.txt")));
    assert!(text.starts_with("verdict: separated\n"));
    assert!(text.contains("lower_trace: lo.txt\n") && text.contains("upper_trace: hi.txt\n"));
}

#[test]
fn exhausted_budget_is_inconclusive() {
    let m = figure();
    let mut cfg = SeparationConfig::default();
    cfg.budget.max_period = Some(3);
    let cert = verify_fiber_separation(&m, Complex64::new(0.0, 0.0), 4, &cfg).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(cert.test.is_none() && cert.curve.is_none());
    assert!(!cert.diagnostics.is_empty());
}
