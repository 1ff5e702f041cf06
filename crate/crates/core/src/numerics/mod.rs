//! Floating-point realization of rays and special parameters of
//! `f_c(z) = e^z + c`.

mod chain;
mod points;
mod rays;

use thiserror::Error;

use crate::combinatorics::CombinatoricsError;

pub use chain::strip_index;
pub use points::{
    find_misiurewicz_parameter, find_parabolic_root, find_parabolic_root_with_traces, find_periodic_point, iterate,
    misiurewicz_search, orbit_with_derivatives, postsingular_period, MisiurewiczCandidate, ParabolicSolution,
    PeriodicPoint, SolverConfig, SpecialKind, SpecialParameter,
};
pub(crate) use rays::ParameterContinuation;
pub use rays::{
    dynamic_ray_point, potential_grid, singular_orbit_escapes, trace_dynamic_ray, trace_parameter_ray, verify_landing,
    Derivative, RayKind, RaySample, RayTrace, Truncation,
};

/// Sampling and continuation settings shared by all ray tracers.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceConfig {
    /// Geometric ratio between consecutive potentials.
    pub ratio: f64,
    /// Largest allowed decrease of the potential between samples.
    pub max_step: f64,
    /// Backward iteration starts at the first `F^K(t) ≥ t_big`.
    pub t_big: f64,
    /// Above this potential inverse branches follow the strip of the address
    /// entry; below it they follow the remembered ray.
    pub strip_potential: f64,
    /// Width of the log-potential buckets of the branch memory.
    pub bucket_width: f64,
    /// Pullbacks passing closer than this to the singular value fail.
    pub collision_radius: f64,
    /// Record residuals against an independent trace of the shifted address.
    pub companion_residuals: bool,
    pub derivative: Derivative,
    /// Relative finite-difference step for parameter derivatives.
    pub fd_step: f64,
    pub newton_max_iter: usize,
    /// Relative Newton step size accepted as converged.
    pub newton_step_tol: f64,
    /// Newton steps are clipped to this length.
    pub max_newton_step: f64,
    /// Largest accepted `|g^c_s(t) − c|` on parameter rays.
    pub parameter_residual_tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            ratio: 0.9,
            max_step: 1.0,
            t_big: 1e12,
            strip_potential: 40.0,
            bucket_width: 0.05,
            collision_radius: 1e-12,
            companion_residuals: true,
            derivative: Derivative::Analytic,
            fd_step: 1e-7,
            newton_max_iter: 60,
            newton_step_tol: 1e-12,
            max_newton_step: 1.0,
            parameter_residual_tol: 1e-8,
        }
    }
}

impl TraceConfig {
    /// The same settings with the sample spacing refined `factor` times.
    pub fn refined(&self, factor: f64) -> Self {
        let mut cfg = self.clone();
        cfg.ratio = self.ratio.powf(1.0 / factor);
        cfg.max_step = self.max_step / factor;
        cfg
    }
}

#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("pullback hit the branch cut at potential {t}")]
    BranchCut { t: f64, partial: Option<Box<RayTrace>> },
    #[error("backward iteration diverged at potential {t}")]
    Divergence { t: f64, partial: Option<Box<RayTrace>> },
    #[error("ray met the singular orbit at potential {t}")]
    PostsingularCollision { t: f64, partial: Option<Box<RayTrace>> },
    #[error("Newton iteration diverged at potential {t}")]
    NewtonDivergence { t: f64, partial: Option<Box<RayTrace>> },
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("address {0} is not periodic")]
    NotPeriodic(String),
    #[error("ray lands at an attracting point (|multiplier| = {0})")]
    AttractingContradiction(f64),
    #[error("solution failed the witness check: {0}")]
    WrongBasin(String),
    #[error("parameter ray endpoints differ by {gap}")]
    SeedDisagreement { gap: f64 },
    #[error("trace does not land at the computed point (distance {distance})")]
    LandingNotVerified { distance: f64 },
    #[error("cannot parse trace: {0}")]
    Parse(String),
}

impl NumericsError {
    /// The partial trace carried by a truncated continuation, if any.
    pub fn partial_trace(&self) -> Option<&RayTrace> {
        match self {
            NumericsError::BranchCut { partial, .. }
            | NumericsError::Divergence { partial, .. }
            | NumericsError::PostsingularCollision { partial, .. }
            | NumericsError::NewtonDivergence { partial, .. } => partial.as_deref(),
            _ => None,
        }
    }

    /// Whether the failure is a violated input condition rather than a
    /// solver failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            NumericsError::Precondition(_) | NumericsError::Combinatorics(_) | NumericsError::NotPeriodic(_)
        )
    }
}
