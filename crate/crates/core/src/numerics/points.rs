use num_complex::Complex64;
use rayon::prelude::*;

use super::rays::{trace_dynamic_ray, verify_landing, ParameterContinuation, RayTrace};
use super::{NumericsError, TraceConfig};
use crate::combinatorics::{defined_itinerary, words, CharacteristicPair, ExternalAddress};

/// Settings of the periodic-point and special-parameter solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub trace: TraceConfig,
    /// Residual accepted by the Newton solvers.
    pub tol: f64,
    /// Potential at which ray traces feeding the solvers start.
    pub ray_t_hi: f64,
    /// Lowest potential of dynamic traces used to seed and check landing.
    pub landing_t: f64,
    /// Final distance accepted when checking that a dynamic ray lands.
    pub landing_tol: f64,
    /// Potential at which the parameter ray first seeds the Misiurewicz solver.
    pub seed_t: f64,
    /// Lowest seed potential tried by the Misiurewicz solver.
    pub seed_t_min: f64,
    /// Roots from successive seeds closer than this are accepted.
    pub seed_agreement: f64,
    /// Potential at which the two parameter rays seed the parabolic solver.
    pub parabolic_seed_t: f64,
    /// Final distance accepted when checking that a parameter ray lands.
    pub parameter_landing_tol: f64,
    /// Parameter rays are continued down to at most this potential when
    /// checking that they land.
    pub parameter_landing_t_min: f64,
    /// Largest accepted distance between the two seeds of a parabolic solve.
    pub seed_gap: f64,
    pub newton_max_iter: usize,
    /// Newton steps are clipped to this length.
    pub max_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            trace: TraceConfig::default(),
            tol: 1e-10,
            ray_t_hi: 20.0,
            landing_t: 1e-3,
            landing_tol: 1e-2,
            seed_t: 0.2,
            seed_t_min: 1e-3,
            seed_agreement: 1e-9,
            parabolic_seed_t: 0.01,
            parameter_landing_tol: 1e-4,
            parameter_landing_t_min: 1e-7,
            seed_gap: 0.5,
            newton_max_iter: 100,
            max_step: 0.5,
        }
    }
}

/// A periodic point of `f_c` with the multiplier of its return map.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicPoint {
    pub c: Complex64,
    pub z: Complex64,
    /// Period of the address whose ray lands at `z`; `z` is fixed by `f_c^period`.
    pub period: usize,
    /// Exact period of `z`, a divisor of `period`.
    pub orbit_period: usize,
    /// `(f_c^period)′(z)`.
    pub multiplier: Complex64,
    /// `|f_c^period(z) − z|`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    Misiurewicz {
        preperiod: usize,
        period: usize,
    },
    /// Root of a wake: a parabolic orbit of period `orbit_period` whose
    /// multiplier is a root of unity of order `ray_period / orbit_period`.
    Parabolic {
        orbit_period: usize,
        ray_period: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecialParameter {
    pub kind: SpecialKind,
    pub c: Complex64,
    /// Residual of the defining equations.
    pub residual: f64,
    pub witnesses: Vec<ExternalAddress>,
    /// Postsingular periodic point `f_c^k(c)`, or the parabolic point.
    pub point: Complex64,
    /// Multiplier of the postsingular cycle, or `(f_c^{ray_period})′` at the
    /// parabolic point.
    pub multiplier: Complex64,
}

/// Parabolic root together with the parameter ray traces landing there.
#[derive(Clone, Debug)]
pub struct ParabolicSolution {
    pub root: SpecialParameter,
    pub lower_trace: RayTrace,
    pub upper_trace: RayTrace,
}

/// `f_c^n(z)`.
pub fn iterate(c: Complex64, z: Complex64, n: usize) -> Complex64 {
    (0..n).fold(z, |w, _| w.exp() + c)
}

/// Orbit `z_0 = z, …, z_n` of `f_c` with `∂z_j/∂z` and `∂z_j/∂c`.
pub fn orbit_with_derivatives(
    c: Complex64,
    z: Complex64,
    n: usize,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let mut zs = Vec::with_capacity(n + 1);
    let mut dz = Vec::with_capacity(n + 1);
    let mut dc = Vec::with_capacity(n + 1);
    let (mut w, mut a, mut b) = (z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..n {
        zs.push(w);
        dz.push(a);
        dc.push(b);
        let e = w.exp();
        a *= e;
        b = e * b + 1.0;
        w = e + c;
    }
    zs.push(w);
    dz.push(a);
    dc.push(b);
    (zs, dz, dc)
}

fn clip(step: Complex64, max: f64) -> Complex64 {
    let n = step.norm();
    if n > max {
        step * (max / n)
    } else {
        step
    }
}

/// One-dimensional complex Newton iteration; `f` returns value and derivative.
fn newton(
    mut f: impl FnMut(Complex64) -> (Complex64, Complex64),
    seed: Complex64,
    max_iter: usize,
    max_step: f64,
    tol: f64,
) -> Option<Complex64> {
    let mut x = seed;
    for _ in 0..max_iter {
        let (v, d) = f(x);
        if !(v.re.is_finite() && v.im.is_finite() && d.re.is_finite() && d.im.is_finite()) || d.norm() == 0.0 {
            return None;
        }
        let step = clip(v / d, max_step);
        x -= step;
        if step.norm() <= 1e-15 * (1.0 + x.norm()) || (v.norm() <= tol * 1e-3 && step.norm() <= tol) {
            return Some(x);
        }
    }
    let (v, _) = f(x);
    (v.norm() <= tol).then_some(x)
}

/// Value, first and second derivative of `f_c^n` at `z`.
fn return_map(c: Complex64, z: Complex64, n: usize) -> (Complex64, Complex64, Complex64) {
    let (mut w, mut d1, mut d2) = (z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..n {
        let e = w.exp();
        d2 = e * (d1 * d1 + d2);
        d1 *= e;
        w = e + c;
    }
    (w, d1, d2)
}

fn exact_period(c: Complex64, z: Complex64, n: usize, tol: f64) -> usize {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (iterate(c, z, d) - z).norm() <= tol.max(1e-9) * (1.0 + z.norm()))
        .unwrap_or(n)
}

/// Landing point of the periodic dynamic ray `g^c_s`, refined by Newton's
/// method on `f_c^n(z) = z` from the end of the traced ray.
pub fn find_periodic_point(
    c: Complex64,
    s: &ExternalAddress,
    cfg: &SolverConfig,
) -> Result<PeriodicPoint, NumericsError> {
    if !s.is_periodic() {
        return Err(NumericsError::NotPeriodic(s.to_string()));
    }
    let n = s.period_len();
    let mut tcfg = cfg.trace.clone();
    tcfg.companion_residuals = false;
    let trace = trace_dynamic_ray(c, s, cfg.landing_t, cfg.ray_t_hi, &tcfg)?;
    let seed = trace.last().z;
    let g = |z: Complex64| {
        let (w, d1, _) = return_map(c, z, n);
        (w - z, d1 - 1.0)
    };
    let mut z = newton(g, seed, cfg.newton_max_iter, cfg.max_step, cfg.tol)
        .ok_or_else(|| NumericsError::NoConvergence(format!("periodic point of {s} at c = {c}")))?;
    let (w, d1, _) = return_map(c, z, n);
    let mut residual = (w - z).norm();
    if (d1 - 1.0).norm() < 1e-3 {
        let h = |x: Complex64| {
            let (_, d1, d2) = return_map(c, x, n);
            (d1 - 1.0, d2)
        };
        if let Some(zp) = newton(h, z, cfg.newton_max_iter, cfg.max_step, 1e-14) {
            let rp = (iterate(c, zp, n) - zp).norm();
            if rp <= residual.max(cfg.tol) {
                z = zp;
                residual = rp;
            }
        }
    }
    let (_, multiplier, _) = return_map(c, z, n);
    if multiplier.norm() < 1.0 - cfg.tol.max(1e-6) {
        return Err(NumericsError::AttractingContradiction(multiplier.norm()));
    }
    if !verify_landing(&trace, z, cfg.landing_tol) {
        return Err(NumericsError::LandingNotVerified {
            distance: (seed - z).norm(),
        });
    }
    Ok(PeriodicPoint {
        c,
        z,
        period: n,
        orbit_period: exact_period(c, z, n, cfg.tol),
        multiplier,
        residual,
    })
}

/// Period `m` of the cycle on which the rays of the Misiurewicz address `s`
/// eventually land: the least `j ≥ 1` such that `σ^{k+j} s` and `σ^k s` have
/// the same itinerary relative to `s`.
pub fn postsingular_period(s: &ExternalAddress) -> Result<usize, NumericsError> {
    if !s.is_strictly_preperiodic() {
        return Err(NumericsError::Precondition(format!("{s} is not strictly preperiodic")));
    }
    let k = s.preperiod_len();
    let base = defined_itinerary(&s.shift_by(k), s)?;
    for j in 1..=s.period_len() {
        if defined_itinerary(&s.shift_by(k + j), s)? == base {
            return Ok(j);
        }
    }
    Ok(s.period_len())
}

/// Solves `f_c^{k+m}(c) = f_c^k(c)` by Newton's method seeded on the
/// parameter ray `G_s`, then checks that the dynamic ray `g^c_s` lands at the
/// singular value `c`.
///
/// The seed potential starts at `cfg.seed_t` and is halved down to
/// `cfg.seed_t_min` until Newton's method returns the same root from two
/// successive seeds.
pub fn find_misiurewicz_parameter(
    s: &ExternalAddress,
    k: usize,
    m: usize,
    cfg: &SolverConfig,
) -> Result<SpecialParameter, NumericsError> {
    if !s.is_strictly_preperiodic() {
        return Err(NumericsError::Precondition(format!("{s} is not strictly preperiodic")));
    }
    if s.preperiod_len() != k || m == 0 || !s.period_len().is_multiple_of(m) {
        return Err(NumericsError::Precondition(format!(
            "{s} has preperiod {} and period {}, incompatible with k = {k}, m = {m}",
            s.preperiod_len(),
            s.period_len()
        )));
    }
    let h = |c: Complex64| {
        let (zs, dz, dc) = orbit_with_derivatives(c, c, k + m);
        // The orbit starts at z_0 = c, so both partial derivatives contribute.
        let total = |j: usize| dc[j] + dz[j];
        (zs[k + m] - zs[k], total(k + m) - total(k))
    };
    let mut cont = ParameterContinuation::start(s, cfg.ray_t_hi, &cfg.trace)?;
    let mut t = cfg.seed_t.min(cfg.ray_t_hi);
    let mut previous: Option<Complex64> = None;
    let c = loop {
        cont.advance(t)?;
        let root = newton(h, cont.trace().last().z, cfg.newton_max_iter, cfg.max_step, cfg.tol);
        if let (Some(a), Some(b)) = (root, previous) {
            if (a - b).norm() <= cfg.seed_agreement {
                break a;
            }
        }
        previous = root;
        if t <= cfg.seed_t_min {
            return Err(NumericsError::NoConvergence(format!(
                "Misiurewicz parameter of {s}: roots from seeds down to t = {t} disagree"
            )));
        }
        t = (t * 0.5).max(cfg.seed_t_min);
    };
    let (zs, _, _) = orbit_with_derivatives(c, c, k + m);
    let residual = (zs[k + m] - zs[k]).norm();
    let multiplier = zs[k..k + m]
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z.exp());
    if multiplier.norm() <= 1.0 + 1e-9 {
        return Err(NumericsError::WrongBasin(format!(
            "postsingular cycle of c = {c} is not repelling (|multiplier| = {})",
            multiplier.norm()
        )));
    }
    let mut tcfg = cfg.trace.clone();
    tcfg.companion_residuals = false;
    let witness = trace_dynamic_ray(c, s, cfg.landing_t, cfg.ray_t_hi, &tcfg)?;
    if !verify_landing(&witness, c, cfg.landing_tol) {
        return Err(NumericsError::WrongBasin(format!(
            "dynamic ray of {s} ends at distance {} from c = {c}",
            (witness.last().z - c).norm()
        )));
    }
    Ok(SpecialParameter {
        kind: SpecialKind::Misiurewicz {
            preperiod: k,
            period: m,
        },
        c,
        residual,
        witnesses: vec![s.clone()],
        point: zs[k],
        multiplier,
    })
}

/// Solves `f_c^n(z) = z`, `((f_c^n)′(z))^q = 1` for `(c, z)` by Newton's
/// method, where `n` is the orbit period and `q·n` the period of the pair.
fn solve_parabolic_system(
    c0: Complex64,
    z0: Complex64,
    n: usize,
    q: usize,
    cfg: &SolverConfig,
) -> Option<(Complex64, Complex64)> {
    let (mut c, mut z) = (c0, z0);
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..cfg.newton_max_iter {
        let (zs, dz, dc) = orbit_with_derivatives(c, z, n);
        let d = dz[n];
        let sum_dz: Complex64 = dz[..n].iter().sum();
        let sum_dc: Complex64 = dc[..n].iter().sum();
        let dq = d.powu(q as u32);
        let f1 = zs[n] - z;
        let f2 = dq - one;
        // ∂D/∂z = D Σ ∂z_j/∂z, ∂D/∂c = D Σ ∂z_j/∂c
        let j11 = d - one;
        let j12 = dc[n];
        let j21 = dq * (q as f64) * sum_dz;
        let j22 = dq * (q as f64) * sum_dc;
        let det = j11 * j22 - j12 * j21;
        if det.norm() == 0.0 || !det.re.is_finite() {
            return None;
        }
        let step_z = (f1 * j22 - j12 * f2) / det;
        let step_c = (j11 * f2 - j21 * f1) / det;
        let len = (step_z.norm_sqr() + step_c.norm_sqr()).sqrt();
        let scale = if len > cfg.max_step { cfg.max_step / len } else { 1.0 };
        z -= step_z * scale;
        c -= step_c * scale;
        if len <= 1e-15 * (1.0 + c.norm() + z.norm()) {
            break;
        }
    }
    let (zs, dz, _) = orbit_with_derivatives(c, z, n);
    let ok = (zs[n] - z).norm() <= cfg.tol && (dz[n].powu(q as u32) - one).norm() <= cfg.tol;
    ok.then_some((c, z))
}

/// Parabolic parameter at which the parameter rays of a characteristic pair
/// land, together with both traces.
pub fn find_parabolic_root_with_traces(
    pair: &CharacteristicPair,
    cfg: &SolverConfig,
) -> Result<ParabolicSolution, NumericsError> {
    let period = pair.period();
    let n = pair.orbit_period();
    let q = period / n;
    let mut lower = ParameterContinuation::start(pair.lower(), cfg.ray_t_hi, &cfg.trace)?;
    let mut upper = ParameterContinuation::start(pair.upper(), cfg.ray_t_hi, &cfg.trace)?;
    lower.advance(cfg.parabolic_seed_t)?;
    upper.advance(cfg.parabolic_seed_t)?;
    let (cl, cu) = (lower.trace().last().z, upper.trace().last().z);
    let gap = (cl - cu).norm();
    if gap > cfg.seed_gap {
        return Err(NumericsError::SeedDisagreement { gap });
    }
    let c_seed = (cl + cu) * 0.5;
    let mut tcfg = cfg.trace.clone();
    tcfg.companion_residuals = false;
    let dynamic = trace_dynamic_ray(c_seed, pair.lower(), cfg.landing_t, cfg.ray_t_hi, &tcfg)?;
    let z_seed = dynamic.last().z;
    let (c, z) = solve_parabolic_system(c_seed, z_seed, n, q, cfg)
        .ok_or_else(|| NumericsError::NoConvergence(format!("parabolic root of {pair}")))?;
    let (zs, dz, _) = orbit_with_derivatives(c, z, n);
    let residual = (zs[n] - z).norm().max((dz[n].powu(q as u32) - 1.0).norm());
    let multiplier = dz[n].powu(q as u32);

    for cont in [&mut lower, &mut upper] {
        let mut t = cfg.parabolic_seed_t;
        loop {
            let d = (cont.trace().last().z - c).norm();
            if d < cfg.parameter_landing_tol || t <= cfg.parameter_landing_t_min {
                break;
            }
            t = (t * 0.1).max(cfg.parameter_landing_t_min);
            cont.advance(t)?;
        }
        if !verify_landing(cont.trace(), c, cfg.parameter_landing_tol) {
            return Err(NumericsError::LandingNotVerified {
                distance: (cont.trace().last().z - c).norm(),
            });
        }
    }
    Ok(ParabolicSolution {
        root: SpecialParameter {
            kind: SpecialKind::Parabolic {
                orbit_period: n,
                ray_period: period,
            },
            c,
            residual,
            witnesses: vec![pair.lower().clone(), pair.upper().clone()],
            point: z,
            multiplier,
        },
        lower_trace: lower.into_trace(),
        upper_trace: upper.into_trace(),
    })
}

/// Parabolic parameter at which the parameter rays of a characteristic pair land.
pub fn find_parabolic_root(pair: &CharacteristicPair, cfg: &SolverConfig) -> Result<SpecialParameter, NumericsError> {
    Ok(find_parabolic_root_with_traces(pair, cfg)?.root)
}

/// One solved candidate of [`misiurewicz_search`].
#[derive(Clone, Debug)]
pub struct MisiurewiczCandidate {
    pub address: ExternalAddress,
    pub parameter: SpecialParameter,
    pub distance: f64,
}

/// Solves the Misiurewicz parameter of every strictly preperiodic address
/// with entries in `symbols`, preperiod `1..=max_preperiod` and period
/// `1..=max_period`, and returns the successful solves sorted by distance to
/// `target`. The postsingular period is read off the address combinatorially.
pub fn misiurewicz_search(
    symbols: &[i64],
    max_preperiod: usize,
    max_period: usize,
    target: Complex64,
    cfg: &SolverConfig,
) -> Vec<MisiurewiczCandidate> {
    let mut addresses = Vec::new();
    for k in 1..=max_preperiod {
        for p in 1..=max_period {
            for pre in words(symbols, k) {
                for per in words(symbols, p) {
                    let Ok(a) = ExternalAddress::exp(&pre, &per) else {
                        continue;
                    };
                    if a.preperiod_len() == k && a.period_len() == p {
                        addresses.push(a);
                    }
                }
            }
        }
    }
    let mut found: Vec<MisiurewiczCandidate> = addresses
        .par_iter()
        .filter_map(|a| {
            let m = postsingular_period(a).ok()?;
            let parameter = find_misiurewicz_parameter(a, a.preperiod_len(), m, cfg).ok()?;
            let distance = (parameter.c - target).norm();
            Some(MisiurewiczCandidate {
                address: a.clone(),
                parameter,
                distance,
            })
        })
        .collect();
    found.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then_with(|| x.address.cmp(&y.address))
    });
    found
}
