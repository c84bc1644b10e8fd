//! Exact single-mode reduction for `h = 0`.
//!
//! Without backscattering the atom couples only to the mode
//! `c = (g a + g* b) / (sqrt(2) |g|)`. Its orthogonal partner
//! `d = (g a - g* b) / (sqrt(2) |g|)` is an undriven-by-the-atom damped cavity
//! mode and relaxes to a coherent state `delta = -i eps / (kappa + i dC)`, with
//! `eps = E_p g / (sqrt(2) |g|)`. The steady state factorizes as
//! `rho_{c,atom} ⊗ |delta><delta|`, where `rho_{c,atom}` solves
//!
//! ```text
//! H = dA s+s- + dC c+c + (eps* c + eps c+) + sqrt(2)|g| (c+ s- + s+ c)
//! ```
//!
//! with dissipators `kappa D[c] + (gamma/2) D[s-]`. Normally ordered moments of
//! `a = u (c + d)` and `b = w (c - d)` follow by replacing `d` with `delta`.

use num_complex::Complex64;

use super::{observables_with, steady_state_of, DensityOperator, SolverOptions, SteadyStateObservables};
use crate::model::liouvillian;
use crate::{ComplexOperator, Error, Result, SystemParams};

/// Steady state of the coupled mode and the atom, with the full observables.
#[derive(Clone, Debug)]
pub struct ReducedSolution {
    /// State on `c ⊗ atom`, atom index fastest.
    pub rho: DensityOperator,
    pub n_c: usize,
    /// Coherent amplitude of the decoupled mode.
    pub delta: Complex64,
    pub observables: SteadyStateObservables,
}

/// Hilbert-space dimension `2 (n_c + 1)` of the reduced model.
pub fn reduced_dim(n_c: usize) -> usize {
    2 * (n_c + 1)
}

pub fn reduced_steady_state(
    params: &SystemParams,
    n_c: usize,
    options: &SolverOptions,
    max_dim: usize,
) -> Result<ReducedSolution> {
    params.validate()?;
    if params.h != 0.0 {
        return Err(Error::Regime(format!("mode reduction requires h = 0, got h = {}", params.h)));
    }
    let dim = reduced_dim(n_c);
    if n_c == 0 {
        return Err(Error::InvalidParameter("photon cutoff must be at least 1".into()));
    }
    if dim > max_dim {
        return Err(Error::DimensionOverflow { dim, cap: max_dim });
    }
    let g = params.g_tw;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (u, w) = if g.norm() > 0.0 {
        (g.conj() / g.norm() * s, g / g.norm() * s)
    } else {
        (Complex64::new(s, 0.0), Complex64::new(s, 0.0))
    };
    let eps = params.drive * w;
    let kappa = params.kappa();
    let delta = Complex64::new(0.0, -1.0) * eps / Complex64::new(kappa, params.delta_c);

    let c = ComplexOperator::annihilation(n_c).kron(&ComplexOperator::identity(2));
    let sigma = ComplexOperator::identity(n_c + 1).kron(&ComplexOperator::sigma_minus());
    let (cd, sp) = (c.adjoint(), sigma.adjoint());
    let coupling = std::f64::consts::SQRT_2 * g.norm();
    let terms = [
        &(&sp * &sigma) * params.delta_a,
        &(&cd * &c) * params.delta_c,
        &(&c * eps.conj()) + &(&cd * eps),
        &(&(&cd * &sigma) + &(&sp * &c)) * coupling,
    ];
    let h = terms.iter().fold(ComplexOperator::zeros(dim), |acc, t| &acc + t);
    let l = liouvillian(&h, &[(kappa, &c), (0.5 * params.gamma, &sigma)]);
    let rho = steady_state_of(&l, dim, options)?;

    let id = ComplexOperator::identity(dim);
    let a = &(&c + &(&id * delta)) * u;
    let b = &(&c - &(&id * delta)) * w;
    let observables = observables_with(&rho, params, &a, &b, &sigma)?;
    Ok(ReducedSolution { rho, n_c, delta, observables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::{observables, solve_steady_state};
    use crate::FockConfig;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-12)
    }

    #[test]
    fn matches_full_model() {
        let cases = [
            SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_coupling_mhz(40.0).with_drive_mhz(15.0),
            SystemParams::from_mhz(20.0, 3.0, 0.0, 5.2)
                .with_coupling(Complex64::new(crate::units::mhz(25.0), crate::units::mhz(-10.0)))
                .with_drive(Complex64::new(crate::units::mhz(6.0), crate::units::mhz(8.0)))
                .with_detunings_mhz(7.0, -4.0),
        ];
        for p in cases {
            let n = 5;
            let full_fock = FockConfig::symmetric(n);
            let full = observables(&solve_steady_state(&p, full_fock).unwrap(), &p, full_fock).unwrap();
            let red = reduced_steady_state(&p, 3 * n, &SolverOptions::default(), 20_000).unwrap().observables;
            // The full model truncates a and b separately; agreement is limited by its cutoff.
            assert!(close(full.t_f, red.t_f, 2e-3) || (full.t_f - red.t_f).abs() < 1e-6, "{} {}", full.t_f, red.t_f);
            assert!(close(full.t_b, red.t_b, 2e-3), "{} {}", full.t_b, red.t_b);
            assert!(close(full.p_exc, red.p_exc, 2e-3));
            assert!((full.a_mean - red.a_mean).norm() < 2e-3 * red.a_mean.norm());
            assert!((full.b_mean - red.b_mean).norm() < 2e-3 * red.b_mean.norm().max(1e-3));
        }
    }

    #[test]
    fn without_atom_field_is_coherent() {
        let p = SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_drive_mhz(20.0).with_detunings_mhz(0.0, 5.0);
        let sol = reduced_steady_state(&p, 20, &SolverOptions::default(), 20_000).unwrap();
        let expected = Complex64::new(0.0, -1.0) * p.drive / Complex64::new(p.kappa(), p.delta_c);
        assert!((sol.observables.a_mean - expected).norm() < 1e-9 * expected.norm());
        assert!(sol.observables.b_mean.norm() < 1e-12);
        assert!((sol.observables.g2_ff.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_scattering() {
        let p = SystemParams { h: 1.0, ..SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_drive_mhz(1.0) };
        assert!(matches!(reduced_steady_state(&p, 4, &SolverOptions::default(), 100), Err(Error::Regime(_))));
    }
}
