//! Optical bistability of the atom-coupled normal mode and the saturation budget.
//!
//! With `h = 0`, resonant detunings and real `g_tw`, the driven normal mode
//! `A = (a + b)/sqrt(2)` obeys the familiar absorptive bistability equation
//!
//! ```text
//! |Y| = |X| (1 + 4C / (1 + 2|X|^2)),   X = <A>/sqrt(n),  Y = i E_p / (kappa sqrt(2n))
//! ```
//!
//! with saturation photon number `n = gamma^2/(8 g_tw^2)` and cooperativity
//! `C = g_tw^2/(kappa gamma)`.

use crate::model::SystemParams;
use crate::units::flux_to_power;
use crate::{Error, Result};

/// One point of the bistability curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BistabilityPoint {
    pub x_mag: f64,
    pub y_mag: f64,
    /// `|<A>|` in photon-amplitude units.
    pub a_mag: f64,
    /// Drive magnitude (angular) that produces `y_mag`.
    pub ep: f64,
}

/// Scales of the bistability problem for a given parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BistabilityScales {
    pub cooperativity: f64,
    pub saturation_photons: f64,
    /// `kappa sqrt(2n)`, converting `|Y|` into a drive.
    pub drive_per_y: f64,
}

impl BistabilityScales {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate_cavity()?;
        let g = params.g_tw;
        if !(params.gamma > 0.0) {
            return Err(Error::Regime("bistability curve requires gamma > 0".into()));
        }
        if !(g.re > 0.0) || g.im.abs() > 1e-12 * g.norm() {
            return Err(Error::Regime("bistability curve requires real positive g_tw".into()));
        }
        if params.h != 0.0 || params.delta_a != 0.0 || params.delta_c != 0.0 {
            return Err(Error::Regime("bistability curve requires h = 0 and zero detunings".into()));
        }
        let kappa = params.kappa();
        let n = params.gamma * params.gamma / (8.0 * g.re * g.re);
        Ok(Self {
            cooperativity: g.re * g.re / (kappa * params.gamma),
            saturation_photons: n,
            drive_per_y: kappa * (2.0 * n).sqrt(),
        })
    }

    pub fn point(&self, x_mag: f64) -> BistabilityPoint {
        let y_mag = bistability_y(self.cooperativity, x_mag);
        BistabilityPoint { x_mag, y_mag, a_mag: x_mag * self.saturation_photons.sqrt(), ep: self.drive_per_y * y_mag }
    }
}

/// `|Y|(|X|)` at cooperativity `c`.
pub fn bistability_y(c: f64, x: f64) -> f64 {
    x * (1.0 + 4.0 * c / (1.0 + 2.0 * x * x))
}

/// `d|Y|/d|X|` at cooperativity `c`.
pub fn bistability_slope(c: f64, x: f64) -> f64 {
    let u = 1.0 + 2.0 * x * x;
    1.0 + 4.0 * c * (1.0 - 2.0 * x * x) / (u * u)
}

/// Evaluates the curve on `x_grid` (values of `|X|`).
pub fn bistability_curve(params: &SystemParams, x_grid: &[f64]) -> Result<Vec<BistabilityPoint>> {
    let scales = BistabilityScales::new(params)?;
    x_grid
        .iter()
        .map(|&x| {
            if x >= 0.0 {
                Ok(scales.point(x))
            } else {
                Err(Error::InvalidParameter(format!("|X| must be non-negative, got {x}")))
            }
        })
        .collect()
}

/// Turning points of the S-shaped curve.
///
/// The lower branch ends at the local maximum of `|Y|` (small `|X|`), the upper
/// branch at the local minimum (large `|X|`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurningPoints {
    pub ep_upper: f64,
    pub ep_lower: f64,
    pub x_upper: f64,
    pub x_lower: f64,
    /// Large-cooperativity estimates of the same four quantities.
    pub asymptotic: AsymptoticTurningPoints,
}

/// `|X| ≈ sqrt(2C)` with `E_p = sqrt(2 kappa gamma)`, and `|X| ≈ 1/sqrt(2)` with `E_p ≈ g_tw/sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticTurningPoints {
    pub ep_upper: f64,
    pub ep_lower: f64,
    pub x_upper: f64,
    pub x_lower: f64,
}

/// Exact turning points.
///
/// Setting the slope to zero gives `u^2 - 4Cu + 8C = 0` for `u = 1 + 2|X|^2`,
/// so stationary points exist only for `C > 2`.
pub fn turning_points(params: &SystemParams) -> Result<TurningPoints> {
    let scales = BistabilityScales::new(params)?;
    let c = scales.cooperativity;
    if c <= 2.0 {
        return Err(Error::NoTurningPoints { cooperativity: c });
    }
    let root = (c * c - 2.0 * c).sqrt();
    let u_hi = 2.0 * c + 2.0 * root;
    // Stable form of 2C - 2 sqrt(C^2 - 2C).
    let u_lo = 8.0 * c / u_hi;
    let x_upper = ((u_hi - 1.0) / 2.0).sqrt();
    let x_lower = ((u_lo - 1.0) / 2.0).sqrt();
    let g = params.g_tw.re;
    Ok(TurningPoints {
        ep_upper: scales.point(x_upper).ep,
        ep_lower: scales.point(x_lower).ep,
        x_upper,
        x_lower,
        asymptotic: AsymptoticTurningPoints {
            ep_upper: (2.0 * params.kappa() * params.gamma).sqrt(),
            ep_lower: g / std::f64::consts::SQRT_2,
            x_upper: (2.0 * c).sqrt(),
            x_lower: std::f64::consts::FRAC_1_SQRT_2,
        },
    })
}

/// Input photon flux at which the atom saturates, `g_tw^2 / (4 kappa_ex)`.
pub fn saturation_flux(g_tw: f64, kappa_ex: f64) -> f64 {
    g_tw * g_tw / (4.0 * kappa_ex)
}

/// Optical power (W) of the saturation flux at `wavelength_m`.
pub fn saturation_power(g_tw: f64, kappa_ex: f64, wavelength_m: f64) -> f64 {
    flux_to_power(saturation_flux(g_tw, kappa_ex), wavelength_m)
}

/// Photon number and bandwidth check for a Gaussian pulse whose peak flux is
/// `flux_fraction` of the saturation flux.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseBudget {
    pub n_bar: f64,
    /// `(2.35/t_p) / (2 kappa_ex)`; small means narrowband.
    pub bandwidth_ratio: f64,
    /// `bandwidth_ratio < 1/10`.
    pub bandwidth_ok: bool,
}

pub fn pulse_budget(g_tw: f64, kappa_ex: f64, t_p: f64, flux_fraction: f64) -> Result<PulseBudget> {
    if !(t_p > 0.0) {
        return Err(Error::InvalidParameter(format!("pulse width must be positive, got {t_p}")));
    }
    let n_bar = flux_fraction * saturation_flux(g_tw, kappa_ex) * (2.0 * std::f64::consts::PI).sqrt() * t_p;
    let bandwidth_ratio = (2.35 / t_p) / (2.0 * kappa_ex);
    Ok(PulseBudget { n_bar, bandwidth_ratio, bandwidth_ok: bandwidth_ratio < 0.1 })
}

/// Pulse width scale `2.35/(2 kappa_ex)` that `t_p` must greatly exceed.
pub fn bandwidth_limit(kappa_ex: f64) -> f64 {
    2.35 / (2.0 * kappa_ex)
}
