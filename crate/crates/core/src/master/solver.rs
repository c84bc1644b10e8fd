use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use super::DensityOperator;
use crate::model::{build_liouvillian_capped, DEFAULT_MAX_DIM};
use crate::{ComplexOperator, Error, FockConfig, Result, SystemParams};

/// How the null space of the Liouvillian is found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Sparse LU first, then time evolution if the residual is too large.
    #[default]
    Auto,
    Direct,
    TimeEvolution,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub strategy: Strategy,
    /// Accept when `|L rho| <= residual_tol * |L|_F * |rho|`.
    pub residual_tol: f64,
    /// Step budget of the time-evolution fallback.
    pub max_steps: usize,
    pub refinement_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { strategy: Strategy::Auto, residual_tol: 1e-10, max_steps: 200_000, refinement_steps: 2 }
    }
}

/// Steady state of the full model with default options.
pub fn solve_steady_state(params: &SystemParams, fock: FockConfig) -> Result<DensityOperator> {
    solve_steady_state_with(params, fock, &SolverOptions::default(), DEFAULT_MAX_DIM)
}

pub fn solve_steady_state_with(
    params: &SystemParams,
    fock: FockConfig,
    options: &SolverOptions,
    max_dim: usize,
) -> Result<DensityOperator> {
    let l = build_liouvillian_capped(params, fock, max_dim)?;
    steady_state_of(&l, fock.dim(), options)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn relative_residual(l: &ComplexOperator, l_norm: f64, x: &[Complex64]) -> f64 {
    norm(&l.apply(x)) / (l_norm * norm(x))
}

/// Trace-one null vector of the superoperator `l` acting on `dim x dim` matrices.
pub fn steady_state_of(l: &ComplexOperator, dim: usize, options: &SolverOptions) -> Result<DensityOperator> {
    if l.dim() != dim * dim {
        return Err(Error::InvalidParameter(format!(
            "superoperator of size {} does not act on {dim}x{dim} matrices",
            l.dim()
        )));
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let l_norm = l.frobenius_norm();
    let accept = |rho: DensityOperator| -> Result<DensityOperator> {
        let residual = relative_residual(l, l_norm, rho.as_vec());
        if residual <= options.residual_tol {
            Ok(rho)
        } else {
            Err(Error::NonConvergence { residual })
        }
    };
    match options.strategy {
        Strategy::Direct => accept(direct(l, dim, options)?),
        Strategy::TimeEvolution => {
            time_evolution(l, l_norm, DensityOperator::basis_state(dim, 0), options).and_then(accept)
        }
        Strategy::Auto => {
            let start = match direct(l, dim, options) {
                Ok(rho) => match accept(rho.clone()) {
                    Ok(rho) => return Ok(rho),
                    Err(e) => {
                        log::debug!("direct steady-state solve rejected ({e}); time-evolving");
                        rho
                    }
                },
                Err(e) => {
                    log::debug!("direct steady-state solve failed ({e}); time-evolving");
                    DensityOperator::basis_state(dim, 0)
                }
            };
            time_evolution(l, l_norm, start, options).and_then(accept)
        }
    }
}

/// Sparse LU of `L` with its first row replaced by the trace functional.
fn direct(l: &ComplexOperator, dim: usize, options: &SolverOptions) -> Result<DensityOperator> {
    let one = Complex64::new(1.0, 0.0);
    let trace_row: Vec<(usize, Complex64)> = (0..dim).map(|i| (i + i * dim, one)).collect();
    let system = l.with_row(0, &trace_row);
    let lu = system.to_faer()?.sp_lu().map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let n = system.dim();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[0] = one;

    let solve = |b: &[Complex64]| -> Vec<Complex64> {
        let col = Mat::<Complex64>::from_fn(n, 1, |i, _| b[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut x = solve(&rhs);
    for _ in 0..options.refinement_steps {
        let ax = system.apply(&x);
        let r: Vec<Complex64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = solve(&r);
        x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Factorization("non-finite solution".into()));
    }
    DensityOperator::from_column_major(dim, x)
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates `d rho/dt = L rho` with adaptive Dormand–Prince steps until the
/// relative residual meets the tolerance.
fn time_evolution(
    l: &ComplexOperator,
    l_norm: f64,
    start: DensityOperator,
    options: &SolverOptions,
) -> Result<DensityOperator> {
    let dim = start.dim();
    let (atol, rtol) = (1e-13, 1e-11);
    let mut y = start.as_vec().to_vec();
    let n = y.len();
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    k[0] = l.apply(&y);
    let mut h = 0.1 / l.max_abs().max(f64::MIN_POSITIVE);
    let mut best = f64::INFINITY;
    let mut stage = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..options.max_steps {
        for s in 1..7 {
            for (i, v) in stage.iter_mut().enumerate() {
                *v = y[i] + h * (0..s).map(|j| k[j][i] * A[s - 1][j]).sum::<Complex64>();
            }
            k[s] = l.apply(&stage);
        }
        // stage holds the 5th-order solution after the last stage
        let mut err: f64 = 0.0;
        for i in 0..n {
            let e: Complex64 = (0..7).map(|j| k[j][i] * E[j]).sum::<Complex64>() * h;
            let scale = atol + rtol * y[i].norm().max(stage[i].norm());
            err = err.max(e.norm() / scale);
        }
        if err <= 1.0 {
            y.copy_from_slice(&stage);
            k.swap(0, 6);
            let residual = norm(&k[0]) / (l_norm * norm(&y));
            best = best.min(residual);
            if residual <= options.residual_tol {
                return DensityOperator::from_column_major(dim, y);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::NonConvergence { residual: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::observables;
    use crate::model::ModeOperators;

    fn params() -> SystemParams {
        SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_coupling_mhz(30.0).with_drive_mhz(8.0)
    }

    #[test]
    fn undriven_system_relaxes_to_ground() {
        let p = params().with_drive_mhz(0.0);
        let fock = FockConfig::symmetric(3);
        let rho = solve_steady_state(&p, fock).unwrap();
        let ground = DensityOperator::basis_state(fock.dim(), fock.index(0, 0, false));
        let diff = rho.as_vec().iter().zip(ground.as_vec()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn direct_and_time_evolution_agree() {
        let p = params();
        let fock = FockConfig::symmetric(3);
        let direct = solve_steady_state_with(
            &p,
            fock,
            &SolverOptions { strategy: Strategy::Direct, ..Default::default() },
            DEFAULT_MAX_DIM,
        )
        .unwrap();
        let evolved = solve_steady_state_with(
            &p,
            fock,
            &SolverOptions { strategy: Strategy::TimeEvolution, residual_tol: 1e-9, ..Default::default() },
            DEFAULT_MAX_DIM,
        )
        .unwrap();
        let diff = direct.as_vec().iter().zip(evolved.as_vec()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn state_is_physical() {
        let p = params().with_coupling(Complex64::new(mhz_val(20.0), mhz_val(15.0))).with_detunings_mhz(3.0, -2.0);
        let p = SystemParams { h: mhz_val(4.0), ..p };
        let fock = FockConfig::new(4, 3);
        let rho = solve_steady_state(&p, fock).unwrap();
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue().unwrap() > -1e-8);
        let ops = ModeOperators::new(fock);
        let obs = observables(&rho, &p, fock).unwrap();
        assert!(obs.a_mean.norm_sqr() <= obs.n_a + 1e-12);
        assert!(obs.b_mean.norm_sqr() <= obs.n_b + 1e-12);
        assert!((rho.expectation(&(&ops.sigma_minus.adjoint() * &ops.sigma_minus)).re - obs.p_exc).abs() < 1e-12);
    }

    fn mhz_val(x: f64) -> f64 {
        crate::units::mhz(x)
    }

    #[test]
    fn rejects_mismatched_superoperator() {
        let l = ComplexOperator::identity(10);
        assert!(steady_state_of(&l, 3, &SolverOptions::default()).is_err());
    }
}
