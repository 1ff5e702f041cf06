//! Closed curves built from characteristic parameter ray pairs, and
//! certificates that a parameter is separated from a Misiurewicz parameter.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::approximation::{approximate_misiurewicz_with, ApproximationError, MisiurewiczCombinatorics, SearchBudget};
use crate::combinatorics::{CharacteristicPair, ExternalAddress};
use crate::numerics::{
    find_misiurewicz_parameter, find_parabolic_root_with_traces, postsingular_period, trace_parameter_ray,
    NumericsError, ParameterContinuation, RayTrace, SolverConfig, SpecialParameter,
};

#[derive(Debug, Clone, Error)]
pub enum SeparationError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Approximation(#[from] ApproximationError),
    #[error("curve of {pair} intersects itself between edges {first} and {second}")]
    NotSimple { pair: String, first: usize, second: usize },
}

impl SeparationError {
    pub fn is_precondition(&self) -> bool {
        match self {
            SeparationError::Precondition(_) => true,
            SeparationError::Numerics(e) => e.is_precondition(),
            SeparationError::Approximation(ApproximationError::SearchExhausted { .. }) => false,
            SeparationError::Approximation(_) => true,
            SeparationError::NotSimple { .. } => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationConfig {
    pub solver: SolverConfig,
    /// Points closer than this to a curve or ray are on it.
    pub margin: f64,
    /// Smallest truncation potential of the curves.
    pub truncation: f64,
    /// Largest accepted `|G_s(T) − (T + 2πi s₁)|` at the truncation potential.
    pub asymptotic_tol: f64,
    /// Required clearance from the curve, in units of the nearest edge length.
    pub clearance_factor: f64,
    /// Distance to the Misiurewicz parameter below which no verdict is attempted.
    pub exclusion_radius: f64,
    /// Smallest `N` of `ε = 2^{-N}` tried.
    pub n_min: u32,
    pub budget: SearchBudget,
    /// Lowest potential of the traced rays of the Misiurewicz parameter.
    pub ray_t_min: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            solver: SolverConfig::default(),
            margin: 1e-4,
            truncation: 20.0,
            asymptotic_tol: 0.1,
            clearance_factor: 10.0,
            exclusion_radius: 1e-6,
            n_min: 2,
            budget: SearchBudget::default(),
            ray_t_min: 1e-4,
        }
    }
}

impl SeparationConfig {
    /// The same settings with ray traces sampled `factor` times more densely.
    pub fn refined(&self, factor: f64) -> Self {
        let mut cfg = self.clone();
        cfg.solver.trace = self.solver.trace.refined(factor);
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Inside,
    Outside,
    OnCurve,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Inside => "inside",
            Side::Outside => "outside",
            Side::OnCurve => "on-curve",
        })
    }
}

/// Closed polygon: the lower ray from `T` down to the parabolic root, the
/// upper ray back up to `T`, and the segment joining the two ends at `T`.
#[derive(Clone, Debug)]
pub struct SeparatingCurve {
    pub pair: CharacteristicPair,
    pub lower_trace: RayTrace,
    pub upper_trace: RayTrace,
    pub landing: SpecialParameter,
    pub truncation: f64,
    /// Potential of the closing segment: the highest sample at which the two
    /// traces are at least `margin` apart, or the one just above it.
    pub closure: f64,
    pub polyline: Vec<Complex64>,
    pub margin: f64,
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn orientation(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    cross(b - a, c - a)
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (o1, o2) = (orientation(a, b, c), orientation(a, b, d));
    let (o3, o4) = (orientation(c, d, a), orientation(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    (p - (a + ab * u.clamp(0.0, 1.0))).norm()
}

/// Distance from `p` to an open polyline and the length of the nearest edge.
fn polyline_distance(points: &[Complex64], p: Complex64, closed: bool) -> (f64, f64) {
    let n = points.len();
    if n == 1 {
        return ((p - points[0]).norm(), 0.0);
    }
    let edges = if closed { n } else { n - 1 };
    (0..edges)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            (point_segment_distance(p, a, b), (b - a).norm())
        })
        .fold((f64::INFINITY, 0.0), |best, e| if e.0 < best.0 { e } else { best })
}

fn crossing_parity(points: &[Complex64], p: Complex64) -> bool {
    let n = points.len();
    let mut odd = false;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if x > p.re {
                odd = !odd;
            }
        }
    }
    odd
}

/// First pair of non-adjacent intersecting edges of a closed polygon.
fn self_intersection(points: &[Complex64]) -> Option<(usize, usize)> {
    let n = points.len();
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (points[j], points[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

impl SeparatingCurve {
    /// Distance from `w` to the curve, including both traces above the
    /// closing segment, and the length of the nearest edge.
    pub fn distance(&self, w: Complex64) -> (f64, f64) {
        let tail = |tr: &RayTrace| -> Vec<Complex64> {
            tr.samples
                .iter()
                .take_while(|r| r.t >= self.closure)
                .map(|r| r.z)
                .collect()
        };
        [tail(&self.lower_trace), tail(&self.upper_trace)]
            .iter()
            .map(|pts| polyline_distance(pts, w, false))
            .chain(std::iter::once(polyline_distance(&self.polyline, w, true)))
            .fold((f64::INFINITY, 0.0), |best, e| if e.0 < best.0 { e } else { best })
    }

    /// Which side of the curve `w` lies on. The bounded side is the wake: the
    /// closing segment joins the two rays across the addresses between them.
    pub fn side_of(&self, w: Complex64) -> Side {
        if self.distance(w).0 < self.margin {
            Side::OnCurve
        } else if crossing_parity(&self.polyline, w) {
            Side::Inside
        } else {
            Side::Outside
        }
    }
}

/// [`build_curve_with`] using the default configuration.
pub fn build_curve(pair: &CharacteristicPair, truncation: f64) -> Result<SeparatingCurve, SeparationError> {
    build_curve_with(pair, truncation, &SeparationConfig::default())
}

fn check_asymptotics(s: &ExternalAddress, t: f64, cfg: &SeparationConfig) -> Result<(), SeparationError> {
    let start = ParameterContinuation::start(s, t, &cfg.solver.trace)?;
    let z = start.trace().last().z;
    let target = Complex64::new(t, std::f64::consts::TAU * s.first() as f64);
    let d = (z - target).norm();
    if d >= cfg.asymptotic_tol {
        return Err(SeparationError::Precondition(format!(
            "G_{s}({t}) is {d:.3e} from {target}; truncation potential too small"
        )));
    }
    Ok(())
}

/// Traces both parameter rays of `pair` from `truncation` down to their
/// common parabolic root and closes them into a polygon.
pub fn build_curve_with(
    pair: &CharacteristicPair,
    truncation: f64,
    cfg: &SeparationConfig,
) -> Result<SeparatingCurve, SeparationError> {
    if !(truncation.is_finite() && truncation > 0.0) {
        return Err(SeparationError::Precondition(format!(
            "invalid truncation potential {truncation}"
        )));
    }
    check_asymptotics(pair.lower(), truncation, cfg)?;
    check_asymptotics(pair.upper(), truncation, cfg)?;
    let mut solver = cfg.solver.clone();
    solver.ray_t_hi = truncation;
    let sol = find_parabolic_root_with_traces(pair, &solver)?;
    let c = sol.root.c;
    let (l, u) = (&sol.lower_trace.samples, &sol.upper_trace.samples);
    let shared = l.len().min(u.len());
    let apart = (0..shared)
        .find(|&j| (l[j].z - u[j].z).norm() >= cfg.margin)
        .unwrap_or(shared - 1);
    let top = apart.saturating_sub(1);
    let mut polyline: Vec<Complex64> = l[top..].iter().map(|r| r.z).collect();
    polyline.push(c);
    polyline.extend(u[top..].iter().rev().map(|r| r.z));
    polyline.dedup();
    if let Some((first, second)) = self_intersection(&polyline) {
        return Err(SeparationError::NotSimple {
            pair: pair.to_string(),
            first,
            second,
        });
    }
    let closure = l[top].t;
    Ok(SeparatingCurve {
        pair: pair.clone(),
        lower_trace: sol.lower_trace,
        upper_trace: sol.upper_trace,
        landing: sol.root,
        truncation,
        closure,
        polyline,
        margin: cfg.margin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Separated,
    OnRay(ExternalAddress),
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Separated => f.write_str("separated"),
            Verdict::OnRay(s) => write!(f, "on-ray {s}"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

/// Outcome of testing one curve against the two parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTest {
    pub n: u32,
    pub pair: String,
    pub side_c0: Side,
    pub side_c: Side,
    pub distance_c0: f64,
    pub distance_c: f64,
    pub edge_c0: f64,
    pub edge_c: f64,
}

impl CurveTest {
    fn separates(&self, cfg: &SeparationConfig) -> bool {
        let clear = |d: f64, edge: f64| d >= cfg.margin.max(cfg.clearance_factor * edge);
        self.side_c0 != Side::OnCurve
            && self.side_c != Side::OnCurve
            && self.side_c0 != self.side_c
            && clear(self.distance_c0, self.edge_c0)
            && clear(self.distance_c, self.edge_c)
    }
}

#[derive(Clone, Debug)]
pub struct SeparationCertificate {
    pub combinatorics: Vec<ExternalAddress>,
    pub c0: SpecialParameter,
    pub c: Complex64,
    pub verdict: Verdict,
    /// Curve of the separating pair.
    pub curve: Option<SeparatingCurve>,
    /// Test of the separating pair.
    pub test: Option<CurveTest>,
    /// Every pair tested, in order.
    pub tested: Vec<CurveTest>,
    /// Distance from `c` to the traced rays of the Misiurewicz parameter.
    pub ray_distance: f64,
    pub margin: f64,
    pub n_max: u32,
    pub diagnostics: Vec<String>,
}

impl SeparationCertificate {
    /// `key: value` lines; `trace_files` names the files holding the two ray
    /// traces of the separating curve.
    pub fn to_text(&self, trace_files: Option<(&str, &str)>) -> String {
        let mut out = String::new();
        let line = |out: &mut String, k: &str, v: String| {
            let _ = writeln!(out, "{k}: {v}");
        };
        line(&mut out, "verdict", self.verdict.to_string());
        for s in &self.combinatorics {
            line(&mut out, "address", s.to_string());
        }
        line(&mut out, "c0", format!("{:?} {:?}", self.c0.c.re, self.c0.c.im));
        line(&mut out, "c0_residual", format!("{:e}", self.c0.residual));
        line(&mut out, "c", format!("{:?} {:?}", self.c.re, self.c.im));
        line(&mut out, "margin", format!("{:e}", self.margin));
        line(&mut out, "n_max", self.n_max.to_string());
        line(&mut out, "ray_distance", format!("{:e}", self.ray_distance));
        if let Some(t) = &self.test {
            line(&mut out, "n", t.n.to_string());
            line(&mut out, "pair", t.pair.clone());
            line(&mut out, "side_c0", t.side_c0.to_string());
            line(&mut out, "side_c", t.side_c.to_string());
            line(&mut out, "distance_c0", format!("{:e}", t.distance_c0));
            line(&mut out, "distance_c", format!("{:e}", t.distance_c));
            line(&mut out, "edge_c0", format!("{:e}", t.edge_c0));
            line(&mut out, "edge_c", format!("{:e}", t.edge_c));
        }
        if let Some(curve) = &self.curve {
            let root = &curve.landing;
            line(&mut out, "truncation", curve.truncation.to_string());
            line(&mut out, "closure", format!("{:e}", curve.closure));
            line(&mut out, "root", format!("{:?} {:?}", root.c.re, root.c.im));
            line(&mut out, "root_residual", format!("{:e}", root.residual));
            line(
                &mut out,
                "root_multiplier",
                format!("{:?} {:?}", root.multiplier.re, root.multiplier.im),
            );
            line(&mut out, "polyline_vertices", curve.polyline.len().to_string());
            if let Some((lo, hi)) = trace_files {
                line(&mut out, "lower_trace", lo.to_string());
                line(&mut out, "upper_trace", hi.to_string());
            }
        }
        for t in &self.tested {
            line(
                &mut out,
                "tested",
                format!(
                    "N={} {} c0={} c={} distance_c0={:e} distance_c={:e}",
                    t.n, t.pair, t.side_c0, t.side_c, t.distance_c0, t.distance_c
                ),
            );
        }
        for d in &self.diagnostics {
            line(&mut out, "note", d.clone());
        }
        out
    }
}

/// Distance from `c` to the parameter ray `G_s` landing at `c0`. Near the
/// closest point the trace is refined until its edges there are shorter
/// than the margin or than the distance itself.
fn ray_distance(
    s: &ExternalAddress,
    c: Complex64,
    c0: Complex64,
    truncation: f64,
    cfg: &SeparationConfig,
) -> Result<f64, SeparationError> {
    let trace = trace_parameter_ray(s, cfg.ray_t_min, truncation, &cfg.solver.trace)?;
    let mut samples: Vec<(f64, Complex64)> = trace.samples.iter().map(|r| (r.t, r.z)).collect();
    samples.push((0.0, c0));
    loop {
        let (i, d, edge) = (0..samples.len() - 1)
            .map(|i| {
                let (a, b) = (samples[i].1, samples[i + 1].1);
                (i, point_segment_distance(c, a, b), (b - a).norm())
            })
            .fold((0, f64::INFINITY, 0.0), |best, e| if e.1 < best.1 { e } else { best });
        if edge <= cfg.margin || d >= cfg.margin.max(edge) {
            return Ok(d);
        }
        let (t_hi, t_lo) = (samples[i].0, samples[i + 1].0);
        let t_lo = if t_lo == 0.0 { t_hi * 0.1 } else { t_lo };
        if t_hi - t_lo <= t_hi * 1e-9 {
            return Ok(d);
        }
        let mut cont = ParameterContinuation::start(s, t_hi, &cfg.solver.trace)?;
        cont.refine_spacing(8.0);
        cont.advance(t_lo)?;
        let fresh: Vec<(f64, Complex64)> = cont
            .trace()
            .samples
            .iter()
            .skip(1)
            .filter(|r| r.t > samples[i + 1].0)
            .map(|r| (r.t, r.z))
            .collect();
        if fresh.is_empty() {
            return Ok(d);
        }
        samples.splice(i + 1..i + 1, fresh);
    }
}

/// Tries to separate `c` from the Misiurewicz parameter of `m` by the curves
/// of approximating characteristic pairs at `ε = 2^{-N}`, `N` from
/// `cfg.n_min` to `n_max`.
pub fn verify_fiber_separation(
    m: &MisiurewiczCombinatorics,
    c: Complex64,
    n_max: u32,
    cfg: &SeparationConfig,
) -> Result<SeparationCertificate, SeparationError> {
    let s = m.addresses();
    let c0 = find_misiurewicz_parameter(&s[0], m.preperiod(), postsingular_period(&s[0])?, &cfg.solver)?;
    if (c - c0.c).norm() <= cfg.exclusion_radius {
        return Err(SeparationError::Precondition(format!(
            "{c} is within {:e} of the Misiurewicz parameter {}",
            cfg.exclusion_radius, c0.c
        )));
    }
    let truncation = cfg.truncation.max(c.re + 5.0).max(c0.c.re + 5.0);
    let mut certificate = SeparationCertificate {
        combinatorics: s.to_vec(),
        c0: c0.clone(),
        c,
        verdict: Verdict::Inconclusive,
        curve: None,
        test: None,
        tested: Vec::new(),
        ray_distance: f64::INFINITY,
        margin: cfg.margin,
        n_max,
        diagnostics: Vec::new(),
    };

    let distances: Vec<Result<f64, SeparationError>> = s
        .par_iter()
        .map(|a| ray_distance(a, c, c0.c, truncation, cfg))
        .collect();
    for (a, d) in s.iter().zip(distances) {
        let d = d?;
        certificate.ray_distance = certificate.ray_distance.min(d);
        if d < cfg.margin {
            certificate.verdict = Verdict::OnRay(a.clone());
            return Ok(certificate);
        }
    }

    let mut tried: HashMap<String, Option<(SeparatingCurve, CurveTest)>> = HashMap::new();
    for n in cfg.n_min.max(1)..=n_max {
        let approx = match approximate_misiurewicz_with(m, n, &cfg.budget) {
            Ok(r) => r,
            Err(e @ ApproximationError::SearchExhausted { .. }) => {
                certificate.diagnostics.push(format!("N={n}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let fresh: Vec<&CharacteristicPair> = approx
            .pairs()
            .into_iter()
            .filter(|p| !tried.contains_key(&p.to_string()))
            .collect();
        let built: Vec<Result<SeparatingCurve, SeparationError>> =
            fresh.par_iter().map(|p| build_curve_with(p, truncation, cfg)).collect();
        for (p, curve) in fresh.iter().zip(built) {
            let entry = match curve {
                Ok(curve) => {
                    let (distance_c0, edge_c0) = curve.distance(c0.c);
                    let (distance_c, edge_c) = curve.distance(c);
                    let test = CurveTest {
                        n,
                        pair: p.to_string(),
                        side_c0: curve.side_of(c0.c),
                        side_c: curve.side_of(c),
                        distance_c0,
                        distance_c,
                        edge_c0,
                        edge_c,
                    };
                    Some((curve, test))
                }
                Err(e) => {
                    certificate.diagnostics.push(format!("N={n} {p}: {e}"));
                    None
                }
            };
            tried.insert(p.to_string(), entry);
        }
        for p in approx.pairs() {
            if let Some(Some((curve, test))) = tried.get(&p.to_string()) {
                if test.separates(cfg) {
                    certificate.verdict = Verdict::Separated;
                    certificate.curve = Some(curve.clone());
                    certificate.test = Some(test.clone());
                    certificate.tested.push(test.clone());
                    return Ok(certificate);
                }
                if test.n == n {
                    certificate.tested.push(test.clone());
                }
            }
        }
    }
    certificate
        .diagnostics
        .push(format!("{} pairs tried up to N={n_max}", tried.len()));
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parity_of_square() {
        let sq = [z(0.0, 0.0), z(1.0, 0.0), z(1.0, 1.0), z(0.0, 1.0)];
        assert!(crossing_parity(&sq, z(0.5, 0.5)));
        assert!(!crossing_parity(&sq, z(1.5, 0.5)));
        assert!(!crossing_parity(&sq, z(0.5, -0.5)));
    }

    #[test]
    fn detects_bow_tie() {
        let bow = [z(0.0, 0.0), z(1.0, 1.0), z(1.0, 0.0), z(0.0, 1.0)];
        assert!(self_intersection(&bow).is_some());
        let sq = [z(0.0, 0.0), z(1.0, 0.0), z(1.0, 1.0), z(0.0, 1.0)];
        assert!(self_intersection(&sq).is_none());
    }

    #[test]
    fn distances() {
        let line = [z(0.0, 0.0), z(2.0, 0.0)];
        let (d, edge) = polyline_distance(&line, z(1.0, 1.0), false);
        assert!((d - 1.0).abs() < 1e-15 && (edge - 2.0).abs() < 1e-15);
        assert!((polyline_distance(&line, z(3.0, 0.0), false).0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn satellite_curve() {
        let pair = CharacteristicPair::new("| 0 1".parse().unwrap(), "| 1 0".parse().unwrap()).unwrap();
        let curve = build_curve(&pair, 20.0).unwrap();
        let root = z(1.0, std::f64::consts::PI);
        assert!((curve.landing.c - root).norm() < 1e-8);
        assert_eq!(curve.side_of(curve.landing.c), Side::OnCurve);
        assert_eq!(curve.side_of(z(20.0, 40.0)), Side::Outside);
        assert_eq!(curve.side_of(z(0.0, 0.0)), Side::Outside);
    }

    #[test]
    fn small_truncation_is_rejected() {
        let pair = CharacteristicPair::new("| 0 1".parse().unwrap(), "| 1 0".parse().unwrap()).unwrap();
        let err = build_curve(&pair, 0.3).unwrap_err();
        assert!(err.is_precondition(), "{err}");
    }
}
