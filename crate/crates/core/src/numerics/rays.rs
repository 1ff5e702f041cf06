use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::chain::{potential_ladder, BranchAtlas, LevelRecord, PullbackFailure};
use super::{NumericsError, TraceConfig};
use crate::combinatorics::ExternalAddress;

/// Which curve a [`RayTrace`] samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RayKind {
    /// Dynamic ray `g^c_s` in the plane of `f_c`.
    Dynamic(Complex64),
    /// Parameter ray `G_s`.
    Parameter,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySample {
    pub t: f64,
    pub z: Complex64,
    /// `|f_c(z(t)) − z_{σs}(F(t))|` for dynamic rays, `|g^c_s(t) − c|` for
    /// parameter rays.
    pub residual: f64,
}

/// Where and why a trace stopped before reaching its lowest potential.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub t: f64,
    pub reason: String,
}

/// A ray sampled at strictly decreasing potentials.
#[derive(Clone, Debug, PartialEq)]
pub struct RayTrace {
    pub kind: RayKind,
    pub address: ExternalAddress,
    pub samples: Vec<RaySample>,
    /// Set when the singular orbit appears to escape; the ray may not exist
    /// down to the requested potential.
    pub escaping_caveat: bool,
    pub truncated: Option<Truncation>,
}

impl RayTrace {
    pub fn last(&self) -> &RaySample {
        self.samples.last().expect("traces hold at least one sample")
    }

    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    /// Point at potential `t`, interpolated linearly in `ln t` between the
    /// neighbouring samples.
    pub fn point_at(&self, t: f64) -> Option<Complex64> {
        let s = &self.samples;
        for w in s.windows(2) {
            let (hi, lo) = (&w[0], &w[1]);
            if t <= hi.t && t >= lo.t {
                if hi.t == lo.t {
                    return Some(hi.z);
                }
                let u = (hi.t.ln() - t.ln()) / (hi.t.ln() - lo.t.ln());
                return Some(hi.z + (lo.z - hi.z) * u);
            }
        }
        s.iter().find(|x| x.t == t).map(|x| x.z)
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.z).collect()
    }

    /// Line-oriented text export: a `#` header followed by
    /// `t re(z) im(z) residual` per sample.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.kind {
            RayKind::Dynamic(c) => {
                let _ = writeln!(out, "# kind: dynamic");
                let _ = writeln!(out, "# c: {:?} {:?}", c.re, c.im);
            }
            RayKind::Parameter => {
                let _ = writeln!(out, "# kind: parameter");
            }
        }
        let _ = writeln!(out, "# address: {}", self.address);
        let _ = writeln!(out, "# escaping_caveat: {}", self.escaping_caveat);
        if let Some(tr) = &self.truncated {
            let _ = writeln!(out, "# truncated: {:?} {}", tr.t, tr.reason);
        }
        let _ = writeln!(out, "# t re im residual");
        for s in &self.samples {
            let _ = writeln!(out, "{:?} {:?} {:?} {:e}", s.t, s.z.re, s.z.im, s.residual);
        }
        out
    }

    /// Inverse of [`RayTrace::to_text`].
    pub fn from_text(text: &str) -> Result<Self, NumericsError> {
        let bad = |why: String| NumericsError::Parse(why);
        let mut kind = None;
        let mut c = None;
        let mut address = None;
        let mut escaping_caveat = false;
        let mut truncated = None;
        let mut samples = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let Some((key, value)) = h.split_once(':') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "kind" => kind = Some(value.to_string()),
                    "c" => {
                        let v: Vec<f64> = value
                            .split_whitespace()
                            .map(|x| x.parse().map_err(|_| bad(format!("bad parameter `{value}`"))))
                            .collect::<Result<_, _>>()?;
                        if v.len() != 2 {
                            return Err(bad(format!("bad parameter `{value}`")));
                        }
                        c = Some(Complex64::new(v[0], v[1]));
                    }
                    "address" => address = Some(value.parse::<ExternalAddress>()?),
                    "escaping_caveat" => escaping_caveat = value == "true",
                    "truncated" => {
                        let (t, reason) = value.split_once(' ').unwrap_or((value, ""));
                        let t = t.parse().map_err(|_| bad(format!("bad truncation `{value}`")))?;
                        truncated = Some(Truncation {
                            t,
                            reason: reason.to_string(),
                        });
                    }
                    _ => {}
                }
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| bad(format!("bad sample line `{line}`"))))
                .collect::<Result<_, _>>()?;
            if v.len() != 4 {
                return Err(bad(format!("expected 4 columns in `{line}`")));
            }
            samples.push(RaySample {
                t: v[0],
                z: Complex64::new(v[1], v[2]),
                residual: v[3],
            });
        }
        let kind = match kind.as_deref() {
            Some("dynamic") => RayKind::Dynamic(c.ok_or_else(|| bad("missing parameter".into()))?),
            Some("parameter") => RayKind::Parameter,
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        Ok(RayTrace {
            kind,
            address: address.ok_or_else(|| bad("missing address".into()))?,
            samples,
            escaping_caveat,
            truncated,
        })
    }
}

/// Potentials from `t_hi` down to `t_lo`: geometric with the configured ratio,
/// never stepping by more than `max_step`, ending exactly at `t_lo`.
pub fn potential_grid(t_hi: f64, t_lo: f64, cfg: &TraceConfig) -> Vec<f64> {
    let mut grid = vec![t_hi];
    let mut t = t_hi;
    while t > t_lo {
        let next = (t * cfg.ratio).max(t - cfg.max_step);
        t = if next <= t_lo * (1.0 + 1e-12) { t_lo } else { next };
        grid.push(t);
    }
    grid
}

/// Whether the singular orbit `c, f_c(c), …` passes `Re z > 50` within 200 steps.
pub fn singular_orbit_escapes(c: Complex64) -> bool {
    let mut z = c;
    for _ in 0..200 {
        if z.re > 50.0 {
            return true;
        }
        z = z.exp() + c;
    }
    false
}

fn check_range(t_lo: f64, t_hi: f64) -> Result<(), NumericsError> {
    if !(t_lo > 0.0 && t_hi > t_lo && t_hi.is_finite()) {
        return Err(NumericsError::Precondition(format!(
            "potential range must satisfy 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    Ok(())
}

fn failure_error(f: PullbackFailure, t: f64, partial: Option<Box<RayTrace>>) -> NumericsError {
    match f {
        PullbackFailure::BranchCut => NumericsError::BranchCut { t, partial },
        PullbackFailure::Collision => NumericsError::PostsingularCollision { t, partial },
        PullbackFailure::NonFinite => NumericsError::Divergence { t, partial },
    }
}

/// Continuation of one dynamic ray through decreasing potentials.
struct DynamicTracer {
    atlas: BranchAtlas,
    records: Vec<LevelRecord>,
}

impl DynamicTracer {
    fn new(s: &ExternalAddress, cfg: &TraceConfig) -> Self {
        DynamicTracer {
            atlas: BranchAtlas::new(s, cfg.strip_potential, cfg.bucket_width),
            records: Vec::new(),
        }
    }

    fn step(&mut self, c: Complex64, t: f64, cfg: &TraceConfig) -> Result<Complex64, PullbackFailure> {
        let ladder = potential_ladder(t, cfg.t_big);
        let pb = self
            .atlas
            .pullback(c, &ladder, cfg.collision_radius, false, Some(&mut self.records))?;
        self.atlas.remember(&self.records);
        Ok(pb.z)
    }

    fn warm_up(&mut self, c: Complex64, t_hi: f64, cfg: &TraceConfig) -> Result<(), PullbackFailure> {
        if t_hi < cfg.strip_potential {
            for t in potential_grid(cfg.strip_potential, t_hi, cfg) {
                self.step(c, t, cfg)?;
            }
        }
        Ok(())
    }
}

/// Traces the dynamic ray `g^c_s` on `[t_lo, t_hi]` by backward iteration of
/// `f_c(z) = e^z + c`.
///
/// Each sample records the functional-equation residual against an
/// independently continued trace of `σs` at potential `F(t)`.
pub fn trace_dynamic_ray(
    c: Complex64,
    s: &ExternalAddress,
    t_lo: f64,
    t_hi: f64,
    cfg: &TraceConfig,
) -> Result<RayTrace, NumericsError> {
    check_range(t_lo, t_hi)?;
    check_exponential(s)?;
    let grid = potential_grid(t_hi, t_lo, cfg);
    let mut main = DynamicTracer::new(s, cfg);
    let sigma = s.shift();
    let mut companion = DynamicTracer::new(&sigma, cfg);
    let mut trace = RayTrace {
        kind: RayKind::Dynamic(c),
        address: s.clone(),
        samples: Vec::with_capacity(grid.len()),
        escaping_caveat: singular_orbit_escapes(c),
        truncated: None,
    };
    if let Err(f) = main.warm_up(c, t_hi, cfg) {
        return Err(failure_error(f, t_hi, None));
    }
    if cfg.companion_residuals {
        if let Err(f) = companion.warm_up(c, t_hi.exp_m1(), cfg) {
            return Err(failure_error(f, t_hi, None));
        }
    }
    for &t in &grid {
        let z = match main.step(c, t, cfg) {
            Ok(z) => z,
            Err(f) => return finish_partial(trace, f, t),
        };
        let residual = if cfg.companion_residuals {
            match companion.step(c, t.exp_m1(), cfg) {
                Ok(w) => (z.exp() + c - w).norm(),
                Err(_) => f64::NAN,
            }
        } else {
            0.0
        };
        trace.samples.push(RaySample { t, z, residual });
    }
    Ok(trace)
}

fn finish_partial(mut trace: RayTrace, f: PullbackFailure, t: f64) -> Result<RayTrace, NumericsError> {
    let reason = format!("{f:?}");
    trace.truncated = Some(Truncation { t, reason });
    if trace.samples.len() >= 2 {
        Err(failure_error(f, t, Some(Box::new(trace))))
    } else {
        Err(failure_error(f, t, None))
    }
}

fn check_exponential(s: &ExternalAddress) -> Result<(), NumericsError> {
    if s.alphabet() != crate::combinatorics::Alphabet::ExponentialIntegers {
        return Err(NumericsError::Precondition(format!(
            "ray tracing needs an exponential address, got alphabet {}",
            s.alphabet()
        )));
    }
    Ok(())
}

/// Evaluates `g^c_s(t)` for a single parameter, continuing the ray down from
/// large potential.
pub fn dynamic_ray_point(
    c: Complex64,
    s: &ExternalAddress,
    t: f64,
    cfg: &TraceConfig,
) -> Result<Complex64, NumericsError> {
    let mut cfg = cfg.clone();
    cfg.companion_residuals = false;
    let tr = trace_dynamic_ray(c, s, t, t.max(cfg.strip_potential) + 1.0, &cfg)?;
    Ok(tr.last().z)
}

/// State of a parameter ray continuation.
pub(crate) struct ParameterTracer {
    atlas: BranchAtlas,
    records: Vec<LevelRecord>,
}

pub(crate) struct ParameterSolve {
    pub c: Complex64,
    pub residual: f64,
}

impl ParameterTracer {
    pub fn new(s: &ExternalAddress, cfg: &TraceConfig) -> Self {
        ParameterTracer {
            atlas: BranchAtlas::new(s, cfg.strip_potential, cfg.bucket_width),
            records: Vec::new(),
        }
    }

    fn evaluate(
        &self,
        c: Complex64,
        ladder: &[f64],
        cfg: &TraceConfig,
    ) -> Result<(Complex64, Complex64), PullbackFailure> {
        match cfg.derivative {
            Derivative::Analytic => {
                let pb = self.atlas.pullback(c, ladder, cfg.collision_radius, true, None)?;
                Ok((pb.z - c, pb.dz_dc.expect("requested") - 1.0))
            }
            Derivative::CentralDifference => {
                let g = self.atlas.pullback(c, ladder, cfg.collision_radius, false, None)?.z;
                let h = cfg.fd_step * (1.0 + c.norm());
                let gp = self.atlas.pullback(c + h, ladder, cfg.collision_radius, false, None)?.z;
                let gm = self.atlas.pullback(c - h, ladder, cfg.collision_radius, false, None)?.z;
                Ok((g - c, (gp - gm) / (2.0 * h) - 1.0))
            }
        }
    }

    /// Damped Newton on `g^c_s(t) − c = 0` from `seed`: steps are halved
    /// until `|g − c|` decreases. On success the branch memory is updated from
    /// the converged pullback.
    ///
    /// The residual is accepted below `parameter_residual_tol` or below the
    /// rounding floor `|∂_c(g − c)| · ulp(c)` set by the conditioning.
    pub fn solve(&mut self, t: f64, seed: Complex64, cfg: &TraceConfig) -> Option<ParameterSolve> {
        let ladder = potential_ladder(t, cfg.t_big);
        let mut c = seed;
        let (mut g, mut dg) = self.evaluate(c, &ladder, cfg).ok()?;
        let mut converged = false;
        let mut slope = 1.0;
        for _ in 0..cfg.newton_max_iter {
            if dg.norm() == 0.0 || !dg.re.is_finite() {
                return None;
            }
            slope = dg.norm();
            let full = g / dg;
            let full = if full.norm() > cfg.max_newton_step {
                full * (cfg.max_newton_step / full.norm())
            } else {
                full
            };
            let small = full.norm() <= cfg.newton_step_tol * (1.0 + c.norm());
            let mut lambda = 1.0;
            loop {
                let trial = c - full * lambda;
                if let Ok((gt, dgt)) = self.evaluate(trial, &ladder, cfg) {
                    if small || gt.norm() < g.norm() {
                        c = trial;
                        (g, dg) = (gt, dgt);
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-12 {
                    return None;
                }
            }
            if small {
                converged = true;
                break;
            }
        }
        if !converged {
            return None;
        }
        let pb = self
            .atlas
            .pullback(c, &ladder, cfg.collision_radius, false, Some(&mut self.records))
            .ok()?;
        let residual = (pb.z - c).norm();
        let floor = 64.0 * f64::EPSILON * (1.0 + c.norm()) * slope;
        if residual.is_nan() || residual > cfg.parameter_residual_tol.max(floor) {
            return None;
        }
        self.atlas.remember(&self.records);
        Some(ParameterSolve { c, residual })
    }
}

/// How the derivative of `c ↦ g^c_s(t)` is obtained in parameter Newton steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    /// Central differences with step `fd_step · (1 + |c|)`.
    CentralDifference,
    /// Differentiating the pullback recursion `z_k = log(z_{k+1} − c) + 2πi m_k`.
    Analytic,
}

/// Newton continuation of a parameter ray towards smaller potentials.
pub(crate) struct ParameterContinuation {
    tracer: ParameterTracer,
    trace: RayTrace,
    prev: Option<(f64, Complex64)>,
    last: Option<(f64, Complex64)>,
    cfg: TraceConfig,
}

impl ParameterContinuation {
    /// Starts the continuation at large potential and advances it to `t_hi`,
    /// which becomes the first recorded sample.
    pub fn start(s: &ExternalAddress, t_hi: f64, cfg: &TraceConfig) -> Result<Self, NumericsError> {
        check_exponential(s)?;
        if !(t_hi > 0.0 && t_hi.is_finite()) {
            return Err(NumericsError::Precondition(format!("invalid potential {t_hi}")));
        }
        let mut cont = ParameterContinuation {
            tracer: ParameterTracer::new(s, cfg),
            trace: RayTrace {
                kind: RayKind::Parameter,
                address: s.clone(),
                samples: Vec::new(),
                escaping_caveat: false,
                truncated: None,
            },
            prev: None,
            last: None,
            cfg: cfg.clone(),
        };
        let start = t_hi.max(cfg.strip_potential);
        let mut warm = potential_grid(start, t_hi, cfg);
        warm.pop();
        for t in warm {
            cont.step(t, false)?;
        }
        cont.step(t_hi, true)?;
        Ok(cont)
    }

    fn step(&mut self, t: f64, keep: bool) -> Result<(), NumericsError> {
        let s1 = TAU * self.trace.address.first() as f64;
        let seed = match (self.prev, self.last) {
            (Some((t0, c0)), Some((t1, c1))) => c1 + (c1 - c0) * ((t - t1) / (t1 - t0)),
            (None, Some((t1, c1))) => c1 + (t - t1),
            _ => Complex64::new(t, s1),
        };
        match self.tracer.solve(t, seed, &self.cfg) {
            Some(sol) => {
                self.prev = self.last;
                self.last = Some((t, sol.c));
                if keep {
                    self.trace.samples.push(RaySample {
                        t,
                        z: sol.c,
                        residual: sol.residual,
                    });
                }
                Ok(())
            }
            None => {
                let mut partial = self.trace.clone();
                partial.truncated = Some(Truncation {
                    t,
                    reason: "Newton did not converge".into(),
                });
                let partial = (partial.samples.len() >= 2).then(|| Box::new(partial));
                Err(NumericsError::NewtonDivergence { t, partial })
            }
        }
    }

    /// Continues down to `t_lo`, recording samples on the configured grid.
    pub fn advance(&mut self, t_lo: f64) -> Result<(), NumericsError> {
        let from = self.last.map(|(t, _)| t).unwrap_or(t_lo);
        if t_lo >= from {
            return Ok(());
        }
        let grid = potential_grid(from, t_lo, &self.cfg);
        for t in grid.into_iter().skip(1) {
            self.step(t, true)?;
        }
        Ok(())
    }

    pub fn trace(&self) -> &RayTrace {
        &self.trace
    }

    /// Samples further advances `factor` times more densely.
    pub fn refine_spacing(&mut self, factor: f64) {
        self.cfg = self.cfg.refined(factor);
    }

    pub fn into_trace(self) -> RayTrace {
        self.trace
    }
}

/// Traces the parameter ray `G_s` on `[t_lo, t_hi]`: for each potential the
/// parameter `c` with `g^c_s(t) = c` is found by Newton's method, continuing
/// from `c ≈ t + 2πi s_1` at large potential.
pub fn trace_parameter_ray(
    s: &ExternalAddress,
    t_lo: f64,
    t_hi: f64,
    cfg: &TraceConfig,
) -> Result<RayTrace, NumericsError> {
    check_range(t_lo, t_hi)?;
    let mut cont = ParameterContinuation::start(s, t_hi, cfg)?;
    cont.advance(t_lo)?;
    Ok(cont.into_trace())
}

/// `true` iff the distance from the trace to `p` is non-increasing over the
/// last quartile of samples and the final distance is below `tol`.
pub fn verify_landing(tr: &RayTrace, p: Complex64, tol: f64) -> bool {
    let n = tr.samples.len();
    if n < 4 {
        return false;
    }
    let tail = &tr.samples[n - (n / 4).max(2)..];
    let d: Vec<f64> = tail.iter().map(|s| (s.z - p).norm()).collect();
    let monotone = d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-13);
    monotone && d[d.len() - 1] < tol
}
