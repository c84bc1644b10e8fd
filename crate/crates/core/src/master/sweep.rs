use num_complex::Complex64;
use rayon::prelude::*;

use super::reduced::reduced_dim;
use super::{observables, reduced_steady_state, solve_steady_state_with, SolverOptions, SteadyStateObservables};
use crate::model::DEFAULT_MAX_DIM;
use crate::{Error, FockConfig, Result, SystemParams};

/// Which Hilbert space the steady state is computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    /// Reduced model when `h = 0`, full model otherwise.
    #[default]
    Auto,
    Full,
    Reduced,
}

/// Photon cutoff policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Start at `max(3, ceil(2|E_p|^2/kappa^2) + 2)` and double until converged.
    #[default]
    Auto,
    /// Fixed cutoff per mode.
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub method: Method,
    pub truncation: Truncation,
    /// Largest relative change between successive truncations that counts as converged.
    pub tolerance: f64,
    /// Cap on the Hilbert-space dimension.
    pub max_dim: usize,
    pub workers: usize,
    pub solver: SolverOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            truncation: Truncation::Auto,
            tolerance: 5e-3,
            max_dim: DEFAULT_MAX_DIM,
            workers: 1,
            solver: SolverOptions::default(),
        }
    }
}

/// Observables at the accepted truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedSolution {
    pub observables: SteadyStateObservables,
    /// Photon cutoff per mode.
    pub cutoff: usize,
    pub dim: usize,
    pub method: Method,
    /// Relative change against the previous (half) cutoff; `None` for fixed truncation.
    pub change: Option<f64>,
}

fn resolve(method: Method, params: &SystemParams) -> Method {
    match method {
        Method::Auto if params.h == 0.0 => Method::Reduced,
        Method::Auto => Method::Full,
        m => m,
    }
}

fn dim_for(method: Method, n: usize) -> usize {
    match method {
        Method::Reduced => reduced_dim(n),
        _ => FockConfig::symmetric(n).dim(),
    }
}

fn solve_at(params: &SystemParams, method: Method, n: usize, opts: &SweepOptions) -> Result<SteadyStateObservables> {
    match method {
        Method::Reduced => Ok(reduced_steady_state(params, n, &opts.solver, opts.max_dim)?.observables),
        _ => {
            let fock = FockConfig::symmetric(n);
            let rho = solve_steady_state_with(params, fock, &opts.solver, opts.max_dim)?;
            observables(&rho, params, fock)
        }
    }
}

/// Initial cutoff `max(3, ceil(2|E_p|^2/kappa^2) + 2)`.
pub fn initial_cutoff(params: &SystemParams) -> usize {
    let ratio = params.drive.norm_sqr() / params.kappa().powi(2);
    ((2.0 * ratio).ceil() as usize + 2).max(3)
}

/// Steady-state observables with the configured truncation policy.
///
/// With automatic truncation the cutoff doubles until every observable changes
/// by less than `tolerance`; the result at the finer cutoff is returned.
pub fn solve_auto(params: &SystemParams, opts: &SweepOptions) -> Result<TruncatedSolution> {
    let method = resolve(opts.method, params);
    match opts.truncation {
        Truncation::Fixed(n) => {
            let observables = solve_at(params, method, n, opts)?;
            Ok(TruncatedSolution { observables, cutoff: n, dim: dim_for(method, n), method, change: None })
        }
        Truncation::Auto => {
            let mut n = initial_cutoff(params);
            let dim = dim_for(method, n);
            if dim > opts.max_dim {
                return Err(Error::TruncationCap { dim, cap: opts.max_dim });
            }
            let mut coarse = solve_at(params, method, n, opts)?;
            loop {
                let next = 2 * n;
                let dim = dim_for(method, next);
                if dim > opts.max_dim {
                    return Err(Error::TruncationCap { dim, cap: opts.max_dim });
                }
                let fine = solve_at(params, method, next, opts)?;
                let change = coarse.max_relative_change(&fine);
                if change < opts.tolerance {
                    return Ok(TruncatedSolution {
                        observables: fine,
                        cutoff: next,
                        dim,
                        method,
                        change: Some(change),
                    });
                }
                log::debug!("cutoff {next}: relative change {change:.3e}, doubling");
                coarse = fine;
                n = next;
            }
        }
    }
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub result: Result<TruncatedSolution>,
}

fn run_grid<F>(values: &[f64], opts: &SweepOptions, point: F) -> Result<Vec<SweepPoint>>
where
    F: Fn(f64) -> SystemParams + Sync,
{
    if opts.workers == 0 {
        return Err(Error::InvalidParameter("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| values.par_iter().map(|&x| SweepPoint { x, result: solve_auto(&point(x), opts) }).collect()))
}

/// Sweeps a real, positive `g_tw` (angular).
pub fn sweep_coupling(params: &SystemParams, g_values: &[f64], opts: &SweepOptions) -> Result<Vec<SweepPoint>> {
    run_grid(g_values, opts, |g| params.with_coupling(Complex64::new(g, 0.0)))
}

/// Sweeps the drive magnitude `E_p` (angular, real phase).
pub fn sweep_drive(params: &SystemParams, ep_values: &[f64], opts: &SweepOptions) -> Result<Vec<SweepPoint>> {
    run_grid(ep_values, opts, |e| params.with_drive(Complex64::new(e, 0.0)))
}

/// Sweeps the cavity detuning with the atom-cavity offset `delta_a - delta_c` held fixed.
pub fn spectrum_strong_drive(params: &SystemParams, detunings: &[f64], opts: &SweepOptions) -> Result<Vec<SweepPoint>> {
    let offset = params.delta_a - params.delta_c;
    run_grid(detunings, opts, |d| SystemParams { delta_c: d, delta_a: d + offset, ..*params })
}

/// Smallest drive in `(0, e_max]` at which `T_F` exceeds `threshold`, located by
/// a uniform scan followed by bisection.
pub fn saturation_onset(params: &SystemParams, threshold: f64, e_max: f64, opts: &SweepOptions) -> Result<f64> {
    const SCAN: usize = 40;
    let grid: Vec<f64> = (1..=SCAN).map(|k| e_max * k as f64 / SCAN as f64).collect();
    let points = sweep_drive(params, &grid, opts)?;
    let t_f = |e: f64| solve_auto(&params.with_drive(Complex64::new(e, 0.0)), opts).map(|s| s.observables.t_f);
    let mut lo = 0.0;
    for p in points {
        let sol = p.result?;
        if sol.observables.t_f > threshold {
            let mut hi = p.x;
            while hi - lo > 1e-4 * hi {
                let mid = 0.5 * (lo + hi);
                if t_f(mid)? > threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        lo = p.x;
    }
    Err(Error::Regime(format!("T_F stays below {threshold} up to the largest drive scanned")))
}
