//! Weak-drive analysis, where the atom behaves as a third harmonic oscillator.
//!
//! The mean amplitudes obey
//!
//! ```text
//! d<a>/dt = -(kappa + i dC) <a> - i h <b> - i E - i g* <s>
//! d<b>/dt = -(kappa + i dC) <b> - i h <a>       - i g  <s>
//! d<s>/dt = -(gamma/2 + i dA) <s> - i g <a> - i g* <b>
//! ```
//!
//! whose stationary solution gives the fiber transmission `T_F` and
//! reflection `T_B`. With `h = 0` the same equations in frequency space give
//! the transfer coefficients of every output channel.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::model::SystemParams;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const SINGULAR_RATIO: f64 = 1e-14;

/// Stationary mean fields and normalized fiber fluxes in the linear regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSteadyState {
    pub a_ss: Complex64,
    pub b_ss: Complex64,
    pub sigma_ss: Complex64,
    pub a_out_ex: Complex64,
    pub b_out_ex: Complex64,
    pub t_f: f64,
    pub t_b: f64,
}

impl LinearSteadyState {
    /// `<A> = (<a> + <b>)/sqrt(2)`.
    pub fn normal_a(&self) -> Complex64 {
        (self.a_ss + self.b_ss) * FRAC_1_SQRT_2
    }

    /// `<B> = (<a> - <b>)/sqrt(2)`.
    pub fn normal_b(&self) -> Complex64 {
        (self.a_ss - self.b_ss) * FRAC_1_SQRT_2
    }
}

fn check_singular(context: &'static str, denom: Complex64, scale: f64) -> Result<()> {
    if !(denom.norm() >= SINGULAR_RATIO * scale) || denom.norm() == 0.0 {
        return Err(Error::SingularDenominator { context, magnitude: denom.norm() });
    }
    Ok(())
}

/// Response `(<a>, <b>, <s>)` to drive `drive`.
fn mean_fields(p: &SystemParams, drive: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    let atom = Complex64::new(0.5 * p.gamma, p.delta_a);
    let cav = Complex64::new(p.kappa(), p.delta_c);
    let g = p.g_tw;
    let g2 = g.norm_sqr();
    let coupled = cav * atom + g2;
    let left = I * p.h * atom + g.conj() * g.conj();
    let right = I * p.h * atom + g * g;
    let denom = left * right - coupled * coupled;
    let scale = (left.norm() * right.norm()).max(coupled.norm_sqr());
    check_singular("steady-state amplitude", atom, p.gamma.abs() + p.delta_a.abs() + p.kappa())?;
    check_singular("steady-state amplitude", denom, scale)?;
    check_singular("steady-state amplitude", coupled, cav.norm() * atom.norm() + g2)?;

    let a = I * drive * atom * coupled / denom;
    let b = -right / coupled * a;
    let sigma = -I * (g * a + g.conj() * b) / atom;
    Ok((a, b, sigma))
}

/// Stationary amplitudes, output fields and normalized fluxes.
///
/// Requires `kappa_ex > 0` (the fiber defines the normalization) and a
/// non-vanishing atomic denominator `gamma/2 + i delta_a`.
pub fn linear_steady_state(params: &SystemParams) -> Result<LinearSteadyState> {
    params.validate_cavity()?;
    if params.kappa_ex <= 0.0 {
        return Err(Error::InvalidParameter("kappa_ex must be positive to normalize fiber fluxes".into()));
    }
    let root = (2.0 * params.kappa_ex).sqrt();
    let (a_ss, b_ss, sigma_ss) = mean_fields(params, params.drive)?;
    let a_out_ex = I * params.drive / root + root * a_ss;
    let b_out_ex = root * b_ss;

    // Fluxes from the unit-drive response so that they stay defined at E_p = 0.
    let unit = Complex64::new(1.0, 0.0);
    let (a1, b1, _) = mean_fields(params, unit)?;
    let a_in = -I * unit / root;
    let t_f = ((I * unit / root + root * a1) / a_in).norm_sqr();
    let t_b = (root * b1 / a_in).norm_sqr();
    Ok(LinearSteadyState { a_ss, b_ss, sigma_ss, a_out_ex, b_out_ex, t_f, t_b })
}

/// Empty-cavity fluxes at `dC = ±h`:
///
/// `T_F = [(1 - 2 kex/k)^2 + (4h^2/k^2)(1 - kex/k)^2] / (1 + 4h^2/k^2)`,
/// `T_B = (kex/k)^2 (4h^2/k^2) / (1 + 4h^2/k^2)`.
pub fn limit_no_atom(params: &SystemParams) -> (f64, f64) {
    let k = params.kappa();
    let x = params.kappa_ex / k;
    let s = 4.0 * params.h * params.h / (k * k);
    let t_f = ((1.0 - 2.0 * x).powi(2) + s * (1.0 - x).powi(2)) / (1.0 + s);
    let t_b = x * x * s / (1.0 + s);
    (t_f, t_b)
}

/// Large-coupling asymptotics `T_F ≈ (k_i/k)^2`, `T_B ≈ (k_ex/k)^2`, valid for
/// `|g_tw| >> {kappa, gamma, h, |dC|}` at the resonance `dC = h cos(2kx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrongAtomLimit {
    pub t_f: f64,
    pub t_b: f64,
    /// Cavity detuning `h cos(2kx)` at which the asymptotic values apply.
    pub resonant_delta_c: f64,
}

pub fn limit_strong_atom(params: &SystemParams, x: f64, k: f64) -> StrongAtomLimit {
    let kappa = params.kappa();
    StrongAtomLimit {
        t_f: (params.kappa_i / kappa).powi(2),
        t_b: (params.kappa_ex / kappa).powi(2),
        resonant_delta_c: params.h * (2.0 * k * x).cos(),
    }
}

/// One point of a transmission/reflection spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub delta_c: f64,
    pub t_f: f64,
    pub t_b: f64,
}

/// Linear spectrum over cavity detunings, with `delta_a = delta_c + atom_cavity_offset`
/// (`omega_A - omega_C`). `atom_present = false` sets `g_tw = 0`.
pub fn spectrum(
    params: &SystemParams,
    detunings: &[f64],
    atom_present: bool,
    atom_cavity_offset: f64,
) -> Result<Vec<SpectrumPoint>> {
    detunings
        .iter()
        .map(|&delta_c| {
            let mut p = *params;
            p.delta_c = delta_c;
            p.delta_a = delta_c + atom_cavity_offset;
            if !atom_present {
                p.g_tw = Complex64::new(0.0, 0.0);
            }
            linear_steady_state(&p).map(|ss| SpectrumPoint { delta_c, t_f: ss.t_f, t_b: ss.t_b })
        })
        .collect()
}

/// Frequency-resolved output amplitudes per unit input amplitude, for `h = 0`.
///
/// `t_ex`, `t_i`: forward fiber and forward intrinsic-loss channels;
/// `r_ex`, `r_i`: backward fiber and backward loss channels; `s`: atomic
/// emission into free space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferCoefficients {
    pub t_ex: Complex64,
    pub t_i: Complex64,
    pub r_ex: Complex64,
    pub r_i: Complex64,
    pub s: Complex64,
}

impl TransferCoefficients {
    /// Total output flux per unit input flux; 1 for a passive lossless accounting.
    pub fn flux_sum(&self) -> f64 {
        [self.t_ex, self.t_i, self.r_ex, self.r_i, self.s].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Transfer coefficients at sideband frequency `omega` (relative to the probe).
pub fn transfer_coefficients(params: &SystemParams, omega: f64) -> Result<TransferCoefficients> {
    params.validate_cavity()?;
    if params.h != 0.0 {
        return Err(Error::Regime(format!("transfer coefficients are derived for h = 0, got h = {}", params.h)));
    }
    let cav = Complex64::new(params.kappa(), params.delta_c - omega);
    let atom = Complex64::new(0.5 * params.gamma, params.delta_a - omega);
    let g = params.g_tw;
    let g2 = g.norm_sqr();
    let denom = cav * atom + 2.0 * g2;
    check_singular("transfer coefficient", denom, cav.norm() * atom.norm() + 2.0 * g2)?;

    let kex = params.kappa_ex;
    let ki = params.kappa_i;
    let mix = 2.0 * (ki * kex).sqrt();
    let pass = (cav * atom + g2) / denom;
    let turn = g * g / denom;
    Ok(TransferCoefficients {
        t_ex: -1.0 + 2.0 * kex / cav * pass,
        t_i: mix / cav * pass,
        r_ex: -2.0 * kex / cav * turn,
        r_i: -mix / cav * turn,
        s: -I * g * (2.0 * kex * params.gamma).sqrt() / denom,
    })
}

/// Transfer coefficients with the atom decoupled (`g_tw = 0`).
pub fn transfer_coefficients_no_atom(params: &SystemParams, omega: f64) -> Result<TransferCoefficients> {
    transfer_coefficients(&params.with_coupling(Complex64::new(0.0, 0.0)), omega)
}

/// Column of the field-amplitude table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableColumn {
    NoAtom,
    LargeCoupling,
}

impl TableColumn {
    pub fn label(self) -> &'static str {
        match self {
            TableColumn::NoAtom => "g_tw=0",
            TableColumn::LargeCoupling => "g_tw_large",
        }
    }
}

/// One comparison between an exact linear amplitude and its overcoupled-regime approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub quantity: &'static str,
    pub column: TableColumn,
    pub computed: Complex64,
    pub expected: Complex64,
    /// `|computed - expected|` relative to `max(|expected|, natural scale of the row)`.
    pub relative_error: f64,
}

impl TableEntry {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.relative_error <= tolerance
    }
}

/// Evaluates the approximate field-amplitude table for strong overcoupling.
///
/// The operating point is forced to `omega_A = omega_C`, `sin(kx) = 0`
/// (real `g_tw = |params.g_tw|`) and `dC = dA = h`, i.e. probing at the
/// uncoupled normal mode. Both the empty-cavity and the large-coupling columns
/// are evaluated from the exact linear steady state.
pub fn table_one(params: &SystemParams) -> Result<Vec<TableEntry>> {
    let drive = params.drive;
    let kex = params.kappa_ex;
    let a_in = params.input_amplitude();
    let mut base = *params;
    base.g_tw = Complex64::new(params.g_tw.norm(), 0.0);
    base.delta_c = params.h;
    base.delta_a = params.h;

    let zero = Complex64::new(0.0, 0.0);
    let cavity_scale = drive.norm() / (2.0 * kex);
    let normal_scale = drive.norm() * FRAC_1_SQRT_2 / kex;
    let output_scale = a_in.norm();

    let mut entries = Vec::with_capacity(12);
    for column in [TableColumn::NoAtom, TableColumn::LargeCoupling] {
        let p = match column {
            TableColumn::NoAtom => base.with_coupling(zero),
            TableColumn::LargeCoupling => base,
        };
        let ss = linear_steady_state(&p)?;
        let expected: [Complex64; 6] = match column {
            TableColumn::NoAtom => {
                [-I * drive / kex, zero, -I * drive * FRAC_1_SQRT_2 / kex, -I * drive * FRAC_1_SQRT_2 / kex, a_in, zero]
            }
            TableColumn::LargeCoupling => {
                [-I * drive / (2.0 * kex), I * drive / (2.0 * kex), zero, -I * drive * FRAC_1_SQRT_2 / kex, zero, -a_in]
            }
        };
        let rows = [
            ("<a>_ss", ss.a_ss, cavity_scale),
            ("<b>_ss", ss.b_ss, cavity_scale),
            ("<A>_ss", ss.normal_a(), normal_scale),
            ("<B>_ss", ss.normal_b(), normal_scale),
            ("<a_out,ex>_ss", ss.a_out_ex, output_scale),
            ("<b_out,ex>_ss", ss.b_out_ex, output_scale),
        ];
        for ((quantity, computed, scale), expected) in rows.into_iter().zip(expected) {
            let relative_error = (computed - expected).norm() / expected.norm().max(scale);
            entries.push(TableEntry { quantity, column, computed, expected, relative_error });
        }
    }
    Ok(entries)
}
