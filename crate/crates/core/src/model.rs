//! Physical parameters, Hilbert-space operators, the Hamiltonian and the
//! Lindblad generator of the atom + two-mode microtoroid system.
//!
//! The composite space is ordered `mode a ⊗ mode b ⊗ atom`, with the atom
//! index fastest (`|g> = 0`, `|e> = 1`). Density matrices are vectorized by
//! column stacking, `vec(rho)[i + j * dim] = rho[i][j]`, so that
//! `vec(A rho B) = (B^T ⊗ A) vec(rho)`.

use num_complex::Complex64;

use crate::operator::ComplexOperator;
use crate::units::mhz;
use crate::{Error, Result};

/// Default cap on the composite Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 20_000;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Rates, detunings, coupling and drive of the system, in rad/us.
///
/// `delta_a = omega_A - omega_p` and `delta_c = omega_C - omega_p` are measured
/// in the frame rotating at the probe frequency. `gamma` is the full
/// spontaneous emission rate; the field rates `kappa_ex`, `kappa_i` are
/// amplitude decay rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub kappa_ex: f64,
    pub kappa_i: f64,
    pub h: f64,
    pub gamma: f64,
    pub g_tw: Complex64,
    pub delta_a: f64,
    pub delta_c: f64,
    pub drive: Complex64,
}

impl SystemParams {
    /// Undriven, uncoupled, resonant system from rates quoted as `value / 2pi` in MHz.
    pub fn from_mhz(kappa_ex: f64, kappa_i: f64, h: f64, gamma: f64) -> Self {
        Self {
            kappa_ex: mhz(kappa_ex),
            kappa_i: mhz(kappa_i),
            h: mhz(h),
            gamma: mhz(gamma),
            g_tw: Complex64::new(0.0, 0.0),
            delta_a: 0.0,
            delta_c: 0.0,
            drive: Complex64::new(0.0, 0.0),
        }
    }

    /// Sets a real coupling `g_tw / 2pi` in MHz (atom at `sin(kx) = 0`).
    pub fn with_coupling_mhz(self, g_tw: f64) -> Self {
        self.with_coupling(re(mhz(g_tw)))
    }

    pub fn with_coupling(mut self, g_tw: Complex64) -> Self {
        self.g_tw = g_tw;
        self
    }

    /// Sets a real drive `E_p / 2pi` in MHz.
    pub fn with_drive_mhz(self, drive: f64) -> Self {
        self.with_drive(re(mhz(drive)))
    }

    pub fn with_drive(mut self, drive: Complex64) -> Self {
        self.drive = drive;
        self
    }

    /// Sets both detunings from values quoted in MHz.
    pub fn with_detunings_mhz(mut self, delta_a: f64, delta_c: f64) -> Self {
        self.delta_a = mhz(delta_a);
        self.delta_c = mhz(delta_c);
        self
    }

    /// Total field decay rate `kappa = kappa_i + kappa_ex`.
    pub fn kappa(&self) -> f64 {
        self.kappa_ex + self.kappa_i
    }

    /// Cooperativity `|g_tw|^2 / (kappa gamma)`; `None` when `gamma = 0` or `kappa = 0`.
    pub fn cooperativity(&self) -> Option<f64> {
        let denom = self.kappa() * self.gamma;
        (denom > 0.0).then(|| self.g_tw.norm_sqr() / denom)
    }

    /// Coherent amplitude of the fiber input, `<a_in,ex> = -i E_p / sqrt(2 kappa_ex)`.
    pub fn input_amplitude(&self) -> Complex64 {
        -I * self.drive / (2.0 * self.kappa_ex).sqrt()
    }

    /// Input photon flux `|E_p|^2 / (2 kappa_ex)`, photons per us.
    pub fn input_flux(&self) -> f64 {
        self.drive.norm_sqr() / (2.0 * self.kappa_ex)
    }

    /// Checks signs and finiteness of every field.
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("kappa_ex", self.kappa_ex),
            ("kappa_i", self.kappa_i),
            ("h", self.h),
            ("gamma", self.gamma),
            ("delta_a", self.delta_a),
            ("delta_c", self.delta_c),
            ("g_tw.re", self.g_tw.re),
            ("g_tw.im", self.g_tw.im),
            ("drive.re", self.drive.re),
            ("drive.im", self.drive.im),
        ];
        if let Some((name, _)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} is not finite")));
        }
        for (name, v) in [("kappa_ex", self.kappa_ex), ("kappa_i", self.kappa_i), ("gamma", self.gamma)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus `kappa > 0`, required by every cavity computation.
    pub fn validate_cavity(&self) -> Result<()> {
        self.validate()?;
        if self.kappa() <= 0.0 {
            return Err(Error::InvalidParameter("kappa = kappa_ex + kappa_i must be positive".into()));
        }
        Ok(())
    }
}

/// Fock-space truncation (largest photon number kept) of the two modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockConfig {
    pub n_a: usize,
    pub n_b: usize,
}

impl FockConfig {
    pub fn new(n_a: usize, n_b: usize) -> Self {
        Self { n_a, n_b }
    }

    pub fn symmetric(n: usize) -> Self {
        Self { n_a: n, n_b: n }
    }

    /// Default truncation `ceil(4 max(1, |E_p|^2 / kappa^2))` for both modes.
    pub fn default_for(params: &SystemParams) -> Self {
        let ratio = params.drive.norm_sqr() / params.kappa().powi(2);
        Self::symmetric((4.0 * ratio.max(1.0)).ceil() as usize)
    }

    /// Composite dimension `(n_a + 1)(n_b + 1) * 2`.
    pub fn dim(&self) -> usize {
        (self.n_a + 1) * (self.n_b + 1) * 2
    }

    /// Rejects truncations below one photon and dimensions above `max_dim`.
    pub fn check(&self, max_dim: usize) -> Result<()> {
        if self.n_a < 1 || self.n_b < 1 {
            return Err(Error::InvalidParameter(format!(
                "Fock truncations must be at least 1, got ({}, {})",
                self.n_a, self.n_b
            )));
        }
        let dim = self.dim();
        if dim > max_dim {
            return Err(Error::DimensionOverflow { dim, cap: max_dim });
        }
        Ok(())
    }

    /// Position of `|n_a, n_b, atom>` in the composite basis.
    pub fn index(&self, n_a: usize, n_b: usize, excited: bool) -> usize {
        (n_a * (self.n_b + 1) + n_b) * 2 + usize::from(excited)
    }
}

/// Traveling-wave coupling `g0 exp(-alpha_ev r) exp(i k x)`.
pub fn coupling_amplitude(g0_tw: f64, r: f64, x: f64, alpha_ev: f64, k: f64) -> Complex64 {
    Complex64::from_polar(g0_tw * (-alpha_ev * r).exp(), k * x)
}

/// Couplings `(g_A, g_B) = sqrt(2) (Re g_tw, Im g_tw)` of the standing-wave
/// normal modes `A = (a + b)/sqrt(2)` and `B = (a - b)/sqrt(2)`.
pub fn normal_mode_couplings(g_tw: Complex64) -> (f64, f64) {
    let s = std::f64::consts::SQRT_2;
    (s * g_tw.re, s * g_tw.im)
}

/// The operators `a`, `b` and `sigma^-` embedded in the composite space.
#[derive(Clone, Debug)]
pub struct ModeOperators {
    pub fock: FockConfig,
    pub a: ComplexOperator,
    pub b: ComplexOperator,
    pub sigma_minus: ComplexOperator,
}

impl ModeOperators {
    pub fn new(fock: FockConfig) -> Self {
        let id_a = ComplexOperator::identity(fock.n_a + 1);
        let id_b = ComplexOperator::identity(fock.n_b + 1);
        let id_atom = ComplexOperator::identity(2);
        let a = ComplexOperator::annihilation(fock.n_a).kron(&id_b).kron(&id_atom);
        let b = id_a.kron(&ComplexOperator::annihilation(fock.n_b)).kron(&id_atom);
        let sigma_minus = id_a.kron(&id_b).kron(&ComplexOperator::sigma_minus());
        Self { fock, a, b, sigma_minus }
    }

    pub fn dim(&self) -> usize {
        self.fock.dim()
    }

    /// `A = (a + b)/sqrt(2)`.
    pub fn normal_a(&self) -> ComplexOperator {
        &(&self.a + &self.b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `B = (a - b)/sqrt(2)`.
    pub fn normal_b(&self) -> ComplexOperator {
        &(&self.a - &self.b) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Hamiltonian in the probe frame:
///
/// `H = dA s+s- + dC (a+a + b+b) + h (a+b + b+a) + (E* a + E a+)
///    + (g* a+ s- + g s+ a) + (g b+ s- + g* s+ b)`.
pub fn build_hamiltonian(params: &SystemParams, fock: FockConfig) -> Result<ComplexOperator> {
    build_hamiltonian_capped(params, fock, DEFAULT_MAX_DIM)
}

pub fn build_hamiltonian_capped(params: &SystemParams, fock: FockConfig, max_dim: usize) -> Result<ComplexOperator> {
    params.validate()?;
    fock.check(max_dim)?;
    Ok(hamiltonian_from(params, &ModeOperators::new(fock)))
}

pub(crate) fn hamiltonian_from(p: &SystemParams, ops: &ModeOperators) -> ComplexOperator {
    let (a, b, sm) = (&ops.a, &ops.b, &ops.sigma_minus);
    let (ad, bd, sp) = (a.adjoint(), b.adjoint(), sm.adjoint());
    let g = p.g_tw;
    let terms = [
        &(&sp * sm) * p.delta_a,
        &(&(&ad * a) + &(&bd * b)) * p.delta_c,
        &(&(&ad * b) + &(&bd * a)) * p.h,
        &(a * p.drive.conj()) + &(&ad * p.drive),
        &(&(&ad * sm) * g.conj()) + &(&(&sp * a) * g),
        &(&(&bd * sm) * g) + &(&(&sp * b) * g.conj()),
    ];
    terms.iter().fold(ComplexOperator::zeros(ops.dim()), |acc, t| &acc + t)
}

/// Normal-mode form of the Hamiltonian on `A ⊗ B ⊗ atom`:
///
/// `H' = dA s+s- + (dC + h) A+A + (dC - h) B+B + (E* A + E A+)/sqrt2
///     + (E* B + E B+)/sqrt2 + gA (A+ s- + s+ A) - i gB (B+ s- - s+ B)`.
///
/// The truncation fields `n_a`, `n_b` of `fock` refer to `A` and `B` here.
pub fn build_normal_mode_hamiltonian(params: &SystemParams, fock: FockConfig) -> Result<ComplexOperator> {
    params.validate()?;
    fock.check(DEFAULT_MAX_DIM)?;
    let ops = ModeOperators::new(fock);
    let (na, nb, sm) = (&ops.a, &ops.b, &ops.sigma_minus);
    let (nad, nbd, sp) = (na.adjoint(), nb.adjoint(), sm.adjoint());
    let (g_a, g_b) = normal_mode_couplings(params.g_tw);
    let e = params.drive * std::f64::consts::FRAC_1_SQRT_2;
    let terms = [
        &(&sp * sm) * params.delta_a,
        &(&nad * na) * (params.delta_c + params.h),
        &(&nbd * nb) * (params.delta_c - params.h),
        &(na * e.conj()) + &(&nad * e),
        &(nb * e.conj()) + &(&nbd * e),
        &(&(&nad * sm) + &(&sp * na)) * g_a,
        &(&(&nbd * sm) - &(&sp * nb)) * (-I * g_b),
    ];
    Ok(terms.iter().fold(ComplexOperator::zeros(ops.dim()), |acc, t| &acc + t))
}

/// Vectorized Lindblad generator `L rho = -i[H, rho] + sum_k rate_k D[O_k] rho`
/// with `D[O] rho = 2 O rho O+ - O+O rho - rho O+O`, column-stacked.
pub fn liouvillian(hamiltonian: &ComplexOperator, dissipators: &[(f64, &ComplexOperator)]) -> ComplexOperator {
    let d = hamiltonian.dim();
    let id = ComplexOperator::identity(d);
    let mut gen = &(&id.kron(hamiltonian) - &hamiltonian.transpose().kron(&id)) * (-I);
    for &(rate, op) in dissipators {
        if rate == 0.0 {
            continue;
        }
        let ndag_n = &op.adjoint() * op;
        let jump = &op.conj().kron(op) * 2.0;
        let anti = &id.kron(&ndag_n) + &ndag_n.transpose().kron(&id);
        gen = &gen + &(&(&jump - &anti) * rate);
    }
    gen
}

/// Lindblad generator `-i[H,.] + kappa D[a] + kappa D[b] + (gamma/2) D[sigma^-]`
/// as a `dim^2 x dim^2` superoperator.
pub fn build_liouvillian(params: &SystemParams, fock: FockConfig) -> Result<ComplexOperator> {
    build_liouvillian_capped(params, fock, DEFAULT_MAX_DIM)
}

pub fn build_liouvillian_capped(params: &SystemParams, fock: FockConfig, max_dim: usize) -> Result<ComplexOperator> {
    params.validate_cavity()?;
    fock.check(max_dim)?;
    let ops = ModeOperators::new(fock);
    let h = hamiltonian_from(params, &ops);
    let kappa = params.kappa();
    Ok(liouvillian(&h, &[(kappa, &ops.a), (kappa, &ops.b), (0.5 * params.gamma, &ops.sigma_minus)]))
}
