//! Full quantum steady states of the Lindblad master equation
//!
//! `d rho/dt = -i[H, rho] + kappa D[a] rho + kappa D[b] rho + (gamma/2) D[s-] rho`
//!
//! on a truncated Fock basis, and the output-field observables derived from them.
//!
//! The fiber outputs are `a_out = -a_in + sqrt(2 kappa_ex) a` and
//! `b_out = sqrt(2 kappa_ex) b`. The input is a coherent state with
//! `<a_in> = -i E_p / sqrt(2 kappa_ex)`, so every normally ordered output moment
//! equals the moment of the system operators
//!
//! ```text
//! X_F = sqrt(2 kappa_ex) (a + i E_p / (2 kappa_ex)),   X_B = sqrt(2 kappa_ex) b
//! ```
//!
//! giving `T = <X+ X> / |a_in|^2` and `g2(0) = <X+ X+ X X> / <X+ X>^2`. Both
//! are evaluated as `Tr(M rho M+)`, which is exact on the truncated space
//! because `M` only lowers photon numbers.

mod reduced;
mod solver;
mod sweep;

use num_complex::Complex64;

use crate::model::{ModeOperators, SystemParams};
use crate::{ComplexOperator, Error, FockConfig, Result};

pub use reduced::{reduced_steady_state, ReducedSolution};
pub use solver::{solve_steady_state, solve_steady_state_with, steady_state_of, SolverOptions, Strategy};
pub use sweep::{
    saturation_onset, solve_auto, spectrum_strong_drive, sweep_coupling, sweep_drive, Method, SweepOptions, SweepPoint,
    TruncatedSolution, Truncation,
};

/// Relative output flux below which `g2(0)` is reported as undefined.
pub const G2_FLUX_FLOOR: f64 = 1e-12;

/// Density matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityOperator {
    /// Wraps column-major `entries`, Hermitizing and normalizing the trace.
    pub fn from_column_major(dim: usize, mut entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim || dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "density matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for j in 0..dim {
            for i in 0..j {
                let avg = 0.5 * (entries[i + j * dim] + entries[j + i * dim].conj());
                entries[i + j * dim] = avg;
                entries[j + i * dim] = avg.conj();
            }
            entries[j + j * dim].im = 0.0;
        }
        let trace: f64 = (0..dim).map(|i| entries[i + i * dim].re).sum();
        if !(trace.abs() > 0.0) || !trace.is_finite() {
            return Err(Error::NonConvergence { residual: f64::INFINITY });
        }
        entries.iter_mut().for_each(|v| *v /= trace);
        Ok(Self { dim, entries })
    }

    /// Pure state `|k><k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        entries[k + k * dim] = Complex64::new(1.0, 0.0);
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i + j * self.dim]
    }

    /// Column-stacked `vec(rho)`.
    pub fn as_vec(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.dim {
            for i in 0..=j {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue (dense Hermitian eigensolver).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let m = faer::Mat::<Complex64>::from_fn(self.dim, self.dim, |i, j| self.get(i, j));
        let eig = m.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// `Tr(O rho)`.
    pub fn expectation(&self, op: &ComplexOperator) -> Complex64 {
        op.iter().map(|(i, j, v)| v * self.get(j, i)).sum()
    }

    /// `Tr(M rho M+)`, real and non-negative for a valid state.
    pub fn sandwich(&self, m: &ComplexOperator) -> f64 {
        let d = self.dim;
        let mut m_rho = vec![Complex64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let col = m.apply(&self.entries[j * d..(j + 1) * d]);
            m_rho[j * d..(j + 1) * d].copy_from_slice(&col);
        }
        m.iter().map(|(i, j, v)| m_rho[i + j * d] * v.conj()).sum::<Complex64>().re
    }

    /// Photon-number distribution of the first mode for a product basis
    /// `mode ⊗ rest` where `rest` has dimension `inner`.
    pub fn mode_distribution(&self, inner: usize) -> Vec<f64> {
        let levels = self.dim / inner;
        (0..levels).map(|n| (0..inner).map(|k| self.get(n * inner + k, n * inner + k).re).sum()).collect()
    }
}

/// Steady-state expectation values and normalized output statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateObservables {
    pub a_mean: Complex64,
    pub b_mean: Complex64,
    pub normal_a_mean: Complex64,
    pub normal_b_mean: Complex64,
    pub n_a: f64,
    pub n_b: f64,
    pub p_exc: f64,
    pub t_f: f64,
    pub t_b: f64,
    /// `None` when the forward flux is below [`G2_FLUX_FLOOR`] of the input.
    pub g2_ff: Option<f64>,
    pub g2_bb: Option<f64>,
}

impl SteadyStateObservables {
    /// Largest relative difference between the reported real observables.
    pub fn max_relative_change(&self, other: &Self) -> f64 {
        const FLOOR: f64 = 1e-6;
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(FLOOR);
        let opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (Some(x), Some(y)) => rel(x, y),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        [
            rel(self.t_f, other.t_f),
            rel(self.t_b, other.t_b),
            rel(self.n_a, other.n_a),
            rel(self.n_b, other.n_b),
            rel(self.p_exc, other.p_exc),
            rel(self.a_mean.norm(), other.a_mean.norm()),
            rel(self.b_mean.norm(), other.b_mean.norm()),
            opt(self.g2_ff, other.g2_ff),
            opt(self.g2_bb, other.g2_bb),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Observables of a full-model state on `a ⊗ b ⊗ atom`.
pub fn observables(rho: &DensityOperator, params: &SystemParams, fock: FockConfig) -> Result<SteadyStateObservables> {
    if rho.dim() != fock.dim() {
        return Err(Error::InvalidParameter(format!(
            "state dimension {} does not match truncation dimension {}",
            rho.dim(),
            fock.dim()
        )));
    }
    let ops = ModeOperators::new(fock);
    observables_with(rho, params, &ops.a, &ops.b, &ops.sigma_minus)
}

/// Observables given operator representations of `a`, `b` and `s-` (which may
/// include c-number shifts) acting on the space of `rho`.
pub(crate) fn observables_with(
    rho: &DensityOperator,
    params: &SystemParams,
    a: &ComplexOperator,
    b: &ComplexOperator,
    sigma: &ComplexOperator,
) -> Result<SteadyStateObservables> {
    let input = params.input_flux();
    if !(input > 0.0) {
        return Err(Error::InvalidParameter(
            "output fluxes are normalized by the input; drive must be non-zero".into(),
        ));
    }
    let kex = params.kappa_ex;
    let root = (2.0 * kex).sqrt();
    let id = ComplexOperator::identity(rho.dim());
    let shift = Complex64::new(0.0, 1.0) * params.drive / (2.0 * kex);
    let x_f = &(a + &(&id * shift)) * root;
    let x_b = b * root;

    let g2 = |x: &ComplexOperator, flux: f64| {
        if flux < G2_FLUX_FLOOR * input {
            None
        } else {
            Some(rho.sandwich(&x.matmul(x)) / (flux * flux))
        }
    };
    let flux_f = rho.sandwich(&x_f);
    let flux_b = rho.sandwich(&x_b);
    let a_mean = rho.expectation(a);
    let b_mean = rho.expectation(b);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(SteadyStateObservables {
        a_mean,
        b_mean,
        normal_a_mean: (a_mean + b_mean) * s,
        normal_b_mean: (a_mean - b_mean) * s,
        n_a: rho.sandwich(a),
        n_b: rho.sandwich(b),
        p_exc: rho.sandwich(sigma),
        t_f: flux_f / input,
        t_b: flux_b / input,
        g2_ff: g2(&x_f, flux_f),
        g2_bb: g2(&x_b, flux_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_liouvillian;
    use crate::units::mhz;

    #[test]
    fn hermitizes_and_normalizes() {
        let raw = vec![
            Complex64::new(2.0, 0.1),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, -0.3),
            Complex64::new(2.0, 0.0),
        ];
        let rho = DensityOperator::from_column_major(2, raw).unwrap();
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.hermiticity_error() < 1e-15);
        assert!((rho.get(1, 0) - Complex64::new(0.125, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn basis_state_expectations() {
        let fock = FockConfig::symmetric(2);
        let ops = ModeOperators::new(fock);
        let k = fock.index(1, 2, true);
        let rho = DensityOperator::basis_state(fock.dim(), k);
        assert!((rho.sandwich(&ops.a) - 1.0).abs() < 1e-14);
        assert!((rho.sandwich(&ops.b) - 2.0).abs() < 1e-14);
        assert!((rho.sandwich(&ops.sigma_minus) - 1.0).abs() < 1e-14);
        assert!((rho.min_eigenvalue().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn liouvillian_has_single_null_vector_at_small_truncation() {
        let params = SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_coupling_mhz(20.0).with_drive_mhz(10.0);
        let l = build_liouvillian(&params, FockConfig::symmetric(2)).unwrap();
        let dense = l.to_dense();
        let n = l.dim();
        let m = faer::Mat::<Complex64>::from_fn(n, n, |i, j| dense[i + j * n]);
        let eig = m.eigenvalues().unwrap();
        let scale = mhz(1.0);
        let zeros = eig.iter().filter(|z| z.norm() < 1e-8 * scale).count();
        assert_eq!(zeros, 1);
        assert!(eig.iter().all(|z| z.re < 1e-8 * scale));
    }

    #[test]
    fn relative_change_metric() {
        let base = SteadyStateObservables {
            a_mean: Complex64::new(0.0, -1.0),
            b_mean: Complex64::new(0.0, 1.0),
            normal_a_mean: Complex64::default(),
            normal_b_mean: Complex64::default(),
            n_a: 1.0,
            n_b: 1.0,
            p_exc: 0.1,
            t_f: 0.01,
            t_b: 0.9,
            g2_ff: Some(10.0),
            g2_bb: Some(1.0),
        };
        let mut other = base;
        other.t_f = 0.0101;
        assert!((base.max_relative_change(&other) - 0.0099).abs() < 1e-3);
        other.g2_ff = None;
        assert_eq!(base.max_relative_change(&other), f64::INFINITY);
    }
}
