//! Gaussian coherent-state pulses through the linear system and the fidelity
//! of entangled-path coherent-state preparation.
//!
//! The input pulse `<a_in(t)> = -(i E_p / sqrt(2 kappa_ex)) exp(-t^2 / 4 t_p^2)`
//! has spectrum `-i E_p t_p / sqrt(kappa_ex) exp(-w^2 t_p^2)` and mean photon
//! number `|alpha|^2 = E_p^2 t_p sqrt(pi/2) / kappa_ex`. Every output channel
//! stays in a coherent state whose spectrum is the input spectrum multiplied by
//! the channel's transfer coefficient, so photon numbers and state overlaps are
//! frequency integrals weighted by `|a_in(w)|^2`.
//!
//! With the atom in `|g>` the pulse is (ideally) reflected into the backward
//! fiber mode; with the atom in the uncoupled state `|g'>` it is transmitted.
//! Starting from `(|g> + |g'>)/sqrt(2)` the target is
//! `(|g'>|alpha>_F|0>_B + |g>|0>_F|-alpha>_B)/sqrt(2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linear::{transfer_coefficients, TransferCoefficients};
use crate::model::SystemParams;
use crate::quadrature::{integrate_with_breakpoints, QuadratureOptions};
use crate::semiclassical::saturation_flux;
use crate::{Error, Result};

const REL_TOL: f64 = 1e-8;

/// Gaussian input pulse: width `t_p` (flux FWHM `2.35 t_p`) and mean photon number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPulseSpec {
    pub t_p: f64,
    pub alpha_sq: f64,
}

impl GaussianPulseSpec {
    pub fn new(t_p: f64, alpha_sq: f64) -> Result<Self> {
        if !(t_p > 0.0) || !(alpha_sq >= 0.0) || !alpha_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse needs t_p > 0 and finite |alpha|^2 >= 0, got t_p = {t_p}, |alpha|^2 = {alpha_sq}"
            )));
        }
        Ok(Self { t_p, alpha_sq })
    }

    /// Pulse with peak drive `drive` (angular) coupled through `kappa_ex`.
    pub fn from_drive(drive: f64, t_p: f64, kappa_ex: f64) -> Result<Self> {
        Self::new(t_p, drive * drive * t_p * (PI / 2.0).sqrt() / kappa_ex)
    }

    /// Peak drive `E_p` producing this photon number.
    pub fn drive_amplitude(&self, kappa_ex: f64) -> f64 {
        (self.alpha_sq * kappa_ex / (self.t_p * (PI / 2.0).sqrt())).sqrt()
    }

    /// Input spectral amplitude `<a_in(w)>`.
    pub fn spectrum(&self, omega: f64, kappa_ex: f64) -> Complex64 {
        let e = self.drive_amplitude(kappa_ex);
        Complex64::new(0.0, -e * self.t_p / kappa_ex.sqrt()) * (-(omega * self.t_p).powi(2)).exp()
    }

    /// `|<a_in(w)>|^2`; integrates to `alpha_sq` and is independent of `kappa_ex`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.alpha_sq * (2.0 / PI).sqrt() * self.t_p * (-2.0 * (omega * self.t_p).powi(2)).exp()
    }

    /// Input field `<a_in(t)>`.
    pub fn time_amplitude(&self, t: f64, kappa_ex: f64) -> Complex64 {
        let e = self.drive_amplitude(kappa_ex);
        Complex64::new(0.0, -e / (2.0 * kappa_ex).sqrt()) * (-t * t / (4.0 * self.t_p * self.t_p)).exp()
    }

    /// Input photon flux at the pulse peak, `E_p^2 / (2 kappa_ex)`.
    pub fn peak_flux(&self) -> f64 {
        self.alpha_sq / ((2.0 * PI).sqrt() * self.t_p)
    }
}

/// Mean photon numbers in every output channel.
///
/// Unsubscripted fields are for the atom in `|g>`; the `0` fields for the
/// uncoupled state `|g'>`, where the backward and free-space channels are empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelAmplitudes {
    pub alpha_ex_sq: f64,
    pub alpha_i_sq: f64,
    pub beta_ex_sq: f64,
    pub beta_i_sq: f64,
    pub eta_sq: f64,
    pub alpha_ex0_sq: f64,
    pub alpha_i0_sq: f64,
}

impl ChannelAmplitudes {
    pub fn total(&self) -> f64 {
        self.alpha_ex_sq + self.alpha_i_sq + self.beta_ex_sq + self.beta_i_sq + self.eta_sq
    }

    pub fn total_uncoupled(&self) -> f64 {
        self.alpha_ex0_sq + self.alpha_i0_sq
    }
}

/// Frequency window and subdivision points for the spectral integrals.
struct Spectral<'a> {
    params: &'a SystemParams,
    pulse: GaussianPulseSpec,
    points: Vec<f64>,
}

impl<'a> Spectral<'a> {
    fn new(params: &'a SystemParams, pulse: GaussianPulseSpec) -> Result<Self> {
        params.validate_cavity()?;
        if !(params.kappa_ex > 0.0) {
            return Err(Error::InvalidParameter("pulse propagation needs kappa_ex > 0".into()));
        }
        transfer_coefficients(params, 0.0)?;
        let g = params.g_tw.norm();
        if g > 0.0 && pulse.peak_flux() > 0.5 * saturation_flux(g, params.kappa_ex) {
            log::warn!(
                "pulse peak flux {:.3e}/us exceeds half the saturation flux; linear propagation is unreliable",
                pulse.peak_flux()
            );
        }
        let w = window(params, pulse.t_p);
        let mut points = vec![-w, w, 0.0, params.delta_a, params.delta_c];
        for k in 1..=8 {
            let x = k as f64 / pulse.t_p;
            points.extend([x, -x]);
        }
        let centre = 0.5 * (params.delta_a + params.delta_c);
        let split = std::f64::consts::SQRT_2 * g;
        points.extend([centre + split, centre - split]);
        points.retain(|x| x.abs() <= w);
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * w);
        Ok(Self { params, pulse, points })
    }

    fn coefficients(&self, omega: f64) -> TransferCoefficients {
        transfer_coefficients(self.params, omega).expect("denominator cannot vanish once kappa > 0 is validated")
    }

    fn coefficients_no_atom(&self, omega: f64) -> TransferCoefficients {
        let p = self.params.with_coupling(Complex64::new(0.0, 0.0));
        transfer_coefficients(&p, omega).expect("empty-cavity coefficients are regular")
    }

    fn real<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let opts = QuadratureOptions { rel_tol: REL_TOL, abs_tol: 1e-14 * self.pulse.alpha_sq, ..Default::default() };
        let r = integrate_with_breakpoints(|w| f(w) * self.pulse.spectral_density(w), &self.points, opts)?;
        Ok(r.value)
    }

    fn complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<Complex64> {
        let opts = QuadratureOptions { rel_tol: REL_TOL, abs_tol: 1e-14 * self.pulse.alpha_sq, ..Default::default() };
        let r = integrate_with_breakpoints(|w| f(w) * self.pulse.spectral_density(w), &self.points, opts)?;
        Ok(r.value)
    }
}

/// Half-width `max(8/t_p, 4(|g_tw| + kappa))` of the frequency window.
pub fn window(params: &SystemParams, t_p: f64) -> f64 {
    (8.0 / t_p).max(4.0 * (params.g_tw.norm() + params.kappa()))
}

/// Photon numbers per output channel for both atomic states. Requires `h = 0`.
pub fn channel_amplitudes(params: &SystemParams, pulse: GaussianPulseSpec) -> Result<ChannelAmplitudes> {
    let s = Spectral::new(params, pulse)?;
    Ok(ChannelAmplitudes {
        alpha_ex_sq: s.real(|w| s.coefficients(w).t_ex.norm_sqr())?,
        alpha_i_sq: s.real(|w| s.coefficients(w).t_i.norm_sqr())?,
        beta_ex_sq: s.real(|w| s.coefficients(w).r_ex.norm_sqr())?,
        beta_i_sq: s.real(|w| s.coefficients(w).r_i.norm_sqr())?,
        eta_sq: s.real(|w| s.coefficients(w).s.norm_sqr())?,
        alpha_ex0_sq: s.real(|w| s.coefficients_no_atom(w).t_ex.norm_sqr())?,
        alpha_i0_sq: s.real(|w| s.coefficients_no_atom(w).t_i.norm_sqr())?,
    })
}

/// Output channel for time-domain reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Input,
    /// Forward fiber output, atom in `|g>`.
    ForwardG,
    /// Forward fiber output, atom in `|g'>`.
    ForwardG0,
    /// Backward fiber output, atom in `|g>`.
    BackwardG,
}

/// Default frequency step `1/(20 t_p)` of the inverse transform.
pub fn default_resolution(pulse: &GaussianPulseSpec) -> f64 {
    1.0 / (20.0 * pulse.t_p)
}

/// Output photon flux `|<c_out(t)>|^2` at the requested times, from a
/// trapezoidal inverse Fourier transform on a uniform grid with step `d_omega`.
///
/// `d_omega` must not exceed `1/(20 t_p)`, and the span of `times` must stay
/// below `1/d_omega`.
pub fn output_pulse_time_domain(
    params: &SystemParams,
    pulse: GaussianPulseSpec,
    channel: Channel,
    times: &[f64],
    d_omega: f64,
) -> Result<Vec<f64>> {
    let limit = default_resolution(&pulse);
    if !(d_omega > 0.0 && d_omega <= limit) {
        return Err(Error::InvalidParameter(format!("frequency step {d_omega} must lie in (0, {limit}]")));
    }
    let (lo, hi) = times.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    if !times.is_empty() && hi - lo > 1.0 / d_omega {
        return Err(Error::GridResolution { window: hi - lo, limit: 1.0 / d_omega });
    }
    let s = Spectral::new(params, pulse)?;
    let w = window(params, pulse.t_p);
    let n = (w / d_omega).ceil() as i64;
    let kex = params.kappa_ex;
    let samples: Vec<(f64, Complex64)> = (-n..=n)
        .map(|k| {
            let omega = k as f64 * d_omega;
            let weight = if k.abs() == n { 0.5 } else { 1.0 };
            let coef = match channel {
                Channel::Input => Complex64::new(1.0, 0.0),
                Channel::ForwardG => s.coefficients(omega).t_ex,
                Channel::ForwardG0 => s.coefficients_no_atom(omega).t_ex,
                Channel::BackwardG => s.coefficients(omega).r_ex,
            };
            (omega, coef * pulse.spectrum(omega, kex) * weight * d_omega)
        })
        .collect();
    let norm = 1.0 / (2.0 * PI).sqrt();
    Ok(times
        .iter()
        .map(|&t| {
            let amp: Complex64 = samples.iter().map(|&(omega, c)| c * Complex64::from_polar(1.0, -omega * t)).sum();
            (amp * norm).norm_sqr()
        })
        .collect())
}

/// Product of the loss-channel overlaps between the two atomic branches,
/// `<alpha_i0|alpha_i> <0|beta_i> <0|eta>`.
pub fn overlap_factor_xi(params: &SystemParams, pulse: GaussianPulseSpec) -> Result<Complex64> {
    let s = Spectral::new(params, pulse)?;
    overlap_xi(&s)
}

fn overlap_xi(s: &Spectral<'_>) -> Result<Complex64> {
    let exponent = s.complex(|w| {
        let t = s.coefficients(w);
        let t0 = s.coefficients_no_atom(w);
        Complex64::new(t.t_i.norm_sqr() + t0.t_i.norm_sqr() + t.r_i.norm_sqr() + t.s.norm_sqr(), 0.0)
            - 2.0 * t0.t_i.conj() * t.t_i
    })?;
    Ok((-0.5 * exponent).exp())
}

/// The four state overlaps entering the fidelity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityTerms {
    pub fidelity: f64,
    /// `<0|alpha_ex>` (real).
    pub vacuum_forward: f64,
    /// `<-alpha|beta_ex>`.
    pub reflected: Complex64,
    /// `<alpha|alpha_ex0>`.
    pub transmitted: Complex64,
    pub xi: Complex64,
}

/// Fidelity of the prepared atom–field state with the ideal entangled target,
/// with every overlap evaluated by frequency integration.
pub fn fidelity_exact(params: &SystemParams, pulse: GaussianPulseSpec) -> Result<FidelityTerms> {
    let s = Spectral::new(params, pulse)?;
    let alpha_ex_sq = s.real(|w| s.coefficients(w).t_ex.norm_sqr())?;
    let vacuum_forward = (-0.5 * alpha_ex_sq).exp();
    let reflected = (-0.5
        * s.complex(|w| {
            let r = s.coefficients(w).r_ex;
            1.0 + r.norm_sqr() + 2.0 * r
        })?)
    .exp();
    let transmitted = (-0.5
        * s.complex(|w| {
            let t = s.coefficients_no_atom(w).t_ex;
            1.0 + t.norm_sqr() - 2.0 * t
        })?)
    .exp();
    let xi = overlap_xi(&s)?;
    let first = vacuum_forward.powi(2) * reflected.norm_sqr();
    let second = transmitted.norm_sqr();
    let cross = (xi * vacuum_forward * reflected * transmitted.conj()).re;
    let fidelity = (0.25 * first + 0.25 * second + 0.5 * cross).clamp(0.0, 1.0);
    Ok(FidelityTerms { fidelity, vacuum_forward, reflected, transmitted, xi })
}

/// Narrowband decay constants of the approximate fidelity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayConstants {
    /// Imperfect reflection (`|g>`) per photon.
    pub gamma1: f64,
    /// Imperfect transmission (`|g'>`) per photon.
    pub gamma2: f64,
    /// Which-path information leaked into loss channels per photon.
    pub gamma3: f64,
}

impl DecayConstants {
    pub fn new(params: &SystemParams) -> Self {
        let kappa = params.kappa();
        let x = params.kappa_ex / kappa;
        let loss = params.kappa_i / kappa;
        let c4 = match params.cooperativity() {
            Some(c) => 4.0 * c,
            None => 0.0,
        };
        let d = c4 + 1.0;
        Self {
            gamma1: (1.0 - x * (c4 + 2.0) / d).powi(2) + (1.0 - x * c4 / d).powi(2),
            gamma2: 4.0 * loss * loss,
            gamma3: x * (c4 / d).powi(2) * loss + x * c4 / (d * d),
        }
    }
}

/// Approximate fidelity for long pulses (`kappa t_p >> 1`).
pub fn fidelity_approx(params: &SystemParams, alpha_sq: f64) -> f64 {
    let d = DecayConstants::new(params);
    0.25 * (-d.gamma1 * alpha_sq).exp()
        + 0.25 * (-d.gamma2 * alpha_sq).exp()
        + 0.5 * (-0.5 * (d.gamma1 + d.gamma2 + 2.0 * d.gamma3) * alpha_sq).exp()
}

/// Fidelity of the reflected branch alone, exact and narrowband.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionFidelity {
    pub exact: f64,
    pub approx: f64,
}

pub fn reflection_fidelity(params: &SystemParams, pulse: GaussianPulseSpec) -> Result<ReflectionFidelity> {
    let terms = fidelity_exact(params, pulse)?;
    Ok(ReflectionFidelity {
        exact: terms.vacuum_forward.powi(2) * terms.reflected.norm_sqr(),
        approx: (-DecayConstants::new(params).gamma1 * pulse.alpha_sq).exp(),
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use crate::units::mhz;

    fn fig8() -> (SystemParams, GaussianPulseSpec) {
        let p = SystemParams::from_mhz(50.0, 0.5, 0.0, 5.2).with_coupling_mhz(100.0);
        (p, GaussianPulseSpec::new(0.159, 20.0).unwrap())
    }

    fn fig7(g: f64) -> SystemParams {
        SystemParams::from_mhz(30.0, 0.5, 0.0, 5.2).with_coupling_mhz(g)
    }

    #[test]
    fn parseval_in_both_domains() {
        let pulse = GaussianPulseSpec::new(0.2, 7.0).unwrap();
        let kex = mhz(30.0);
        let opts = QuadratureOptions { rel_tol: 1e-12, ..Default::default() };
        let freq = integrate(|w| pulse.spectrum(w, kex).norm_sqr(), -40.0 / pulse.t_p, 40.0 / pulse.t_p, opts).unwrap();
        let time =
            integrate(|t| pulse.time_amplitude(t, kex).norm_sqr(), -40.0 * pulse.t_p, 40.0 * pulse.t_p, opts).unwrap();
        assert!((freq.value / 7.0 - 1.0).abs() < 1e-8);
        assert!((time.value / 7.0 - 1.0).abs() < 1e-8);
        let density = integrate(|w| pulse.spectral_density(w), -40.0, 40.0, opts).unwrap();
        assert!((density.value / 7.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn drive_round_trip() {
        let kex = mhz(50.0);
        let pulse = GaussianPulseSpec::from_drive(mhz(28.0), 0.159, kex).unwrap();
        assert!((pulse.drive_amplitude(kex) / mhz(28.0) - 1.0).abs() < 1e-12);
        assert!((pulse.peak_flux() - mhz(28.0).powi(2) / (2.0 * kex)).abs() < 1e-9 * pulse.peak_flux());
        // 28 MHz drive is the |alpha|^2 ≈ 20 pulse of the switching example
        assert!((pulse.alpha_sq - 19.63).abs() < 0.01);
    }

    #[test]
    fn without_atom_only_forward_channels() {
        let (p, pulse) = fig8();
        let p = p.with_coupling(Complex64::new(0.0, 0.0));
        let c = channel_amplitudes(&p, pulse).unwrap();
        assert_eq!(c.beta_ex_sq, 0.0);
        assert_eq!(c.eta_sq, 0.0);
        assert!((c.total_uncoupled() / 20.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fig8_channel_photon_numbers() {
        let (p, pulse) = fig8();
        let c = channel_amplitudes(&p, pulse).unwrap();
        assert!((c.alpha_ex0_sq - 19.2).abs() < 0.1, "{}", c.alpha_ex0_sq);
        assert!((c.beta_ex_sq - 19.3).abs() < 0.1, "{}", c.beta_ex_sq);
        assert!((c.alpha_ex_sq - 0.0017).abs() < 0.0005, "{}", c.alpha_ex_sq);
        assert!((c.total() / 20.0 - 1.0).abs() < 1e-6);
        assert!((c.total_uncoupled() / 20.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn narrowband_limit() {
        let p = fig7(100.0);
        let t_p = 500.0 / p.kappa();
        let pulse = GaussianPulseSpec::new(t_p, 10.0).unwrap();
        let c = channel_amplitudes(&p, pulse).unwrap();
        let t0 = transfer_coefficients(&p, 0.0).unwrap();
        // |t_ex(0)|^2 ~ 1e-4, so compare on the scale of the pulse
        assert!(
            (c.alpha_ex_sq - t0.t_ex.norm_sqr() * 10.0).abs() < 1e-5 * 10.0,
            "{} {}",
            c.alpha_ex_sq,
            t0.t_ex.norm_sqr() * 10.0
        );
        assert!((c.beta_ex_sq - t0.r_ex.norm_sqr() * 10.0).abs() < 1e-4 * c.beta_ex_sq);
    }

    #[test]
    fn xi_limits() {
        let (p, _) = fig8();
        let vacuum = GaussianPulseSpec::new(0.159, 0.0).unwrap();
        assert_eq!(overlap_factor_xi(&p, vacuum).unwrap(), Complex64::new(1.0, 0.0));
        let lossless = SystemParams { kappa_i: 0.0, gamma: 1e-9, ..p };
        let xi = overlap_factor_xi(&lossless, GaussianPulseSpec::new(0.159, 20.0).unwrap()).unwrap();
        assert!((xi.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn xi_matches_gamma3_estimate() {
        let (p, pulse) = fig8();
        let xi = overlap_factor_xi(&p, pulse).unwrap();
        let estimate = -DecayConstants::new(&p).gamma3 * pulse.alpha_sq;
        assert!((xi.norm().ln() / estimate - 1.0).abs() < 0.1, "{} vs {}", xi.norm().ln(), estimate);
    }

    #[test]
    fn fig8_fidelity() {
        let (p, pulse) = fig8();
        let f = fidelity_exact(&p, pulse).unwrap();
        assert!((f.fidelity - 0.85).abs() < 0.01, "{}", f.fidelity);
        assert!((f.fidelity - 0.8516).abs() < 5e-4);
    }

    #[test]
    fn vacuum_pulse_is_perfect() {
        let (p, _) = fig8();
        let pulse = GaussianPulseSpec::new(0.159, 0.0).unwrap();
        assert_eq!(fidelity_exact(&p, pulse).unwrap().fidelity, 1.0);
        assert_eq!(fidelity_approx(&p, 0.0), 1.0);
        let r = reflection_fidelity(&p, pulse).unwrap();
        assert_eq!((r.exact, r.approx), (1.0, 1.0));
    }

    #[test]
    fn fig7_fidelity_above_085() {
        for g in [50.0, 100.0, 150.0] {
            let f = fidelity_exact(&fig7(g), GaussianPulseSpec::new(0.318, 10.0).unwrap()).unwrap();
            assert!(f.fidelity > 0.85, "g = {g}: {}", f.fidelity);
        }
    }

    #[test]
    fn approximation_tracks_exact_fidelity() {
        for g in [50.0, 100.0, 150.0] {
            let p = fig7(g);
            for alpha_sq in [0.0, 5.0, 10.0, 20.0, 35.0, 50.0] {
                let exact = fidelity_exact(&p, GaussianPulseSpec::new(0.318, alpha_sq).unwrap()).unwrap().fidelity;
                assert!((exact - fidelity_approx(&p, alpha_sq)).abs() < 0.02);
            }
        }
    }

    #[test]
    fn long_pulses_converge_to_approximation() {
        let p = fig7(100.0);
        let pulse = GaussianPulseSpec::new(1000.0 / p.kappa(), 20.0).unwrap();
        let exact = fidelity_exact(&p, pulse).unwrap().fidelity;
        assert!((exact - fidelity_approx(&p, 20.0)).abs() < 1e-3);
    }

    #[test]
    fn large_cooperativity_form() {
        let p = SystemParams::from_mhz(1000.0, 0.01, 0.0, 0.001).with_coupling_mhz(1e4);
        let d = DecayConstants::new(&p);
        let alpha_sq = 1.0;
        assert!(d.gamma1 * alpha_sq < 1e-3 && d.gamma2 * alpha_sq < 1e-3);
        let simple = 0.5 * (1.0 + (-d.gamma3 * alpha_sq).exp());
        assert!((fidelity_approx(&p, alpha_sq) - simple).abs() < 1e-3);
    }

    #[test]
    fn decay_constants_closed_forms() {
        let p = fig7(100.0);
        let d = DecayConstants::new(&p);
        let (kex, ki, k) = (30.0, 0.5, 30.5);
        let c = 100.0f64.powi(2) / (k * 5.2);
        let g1 = (1.0 - kex / k * (4.0 * c + 2.0) / (4.0 * c + 1.0)).powi(2)
            + (1.0 - kex / k * (4.0 * c) / (4.0 * c + 1.0)).powi(2);
        let g3 = kex / k * (4.0 * c / (4.0 * c + 1.0)).powi(2) * (ki / k + 1.0 / (4.0 * c));
        assert!((d.gamma1 - g1).abs() < 1e-12);
        assert!((d.gamma2 - 4.0 * (ki / k).powi(2)).abs() < 1e-15);
        assert!((d.gamma3 - g3).abs() < 1e-12);
    }

    #[test]
    fn reflection_fidelity_fig7() {
        for g in [100.0, 150.0] {
            let p = fig7(g);
            let r = reflection_fidelity(&p, GaussianPulseSpec::new(0.318, 50.0).unwrap()).unwrap();
            assert!(r.approx >= 0.97, "g = {g}: {}", r.approx);
            assert!((r.exact - r.approx).abs() < 0.01);
        }
        let ideal = (-2.0 * (0.5f64 / 30.5).powi(2) * 50.0).exp();
        assert!(ideal >= 0.97);
    }

    #[test]
    fn ideal_reflection_overlap_is_one() {
        // r_ex -> -1 at w = 0 makes the reflected overlap integrand vanish
        let p = SystemParams::from_mhz(1000.0, 0.0, 0.0, 1e-6).with_coupling_mhz(1e5);
        let r = transfer_coefficients(&p, 0.0).unwrap().r_ex;
        assert!((1.0 + r.norm_sqr() + 2.0 * r).norm() < 1e-6);
        let pulse = GaussianPulseSpec::new(1.0, 5.0).unwrap();
        let f = fidelity_exact(&p, pulse).unwrap();
        assert!((f.reflected.norm() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn fidelity_decreases_with_photon_number() {
        let p = fig7(50.0);
        let mut last = 1.0;
        for alpha_sq in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let f = fidelity_exact(&p, GaussianPulseSpec::new(0.318, alpha_sq).unwrap()).unwrap();
            assert!(f.fidelity <= last + 1e-12);
            assert!((0.0..=1.0).contains(&f.fidelity));
            let r = reflection_fidelity(&p, GaussianPulseSpec::new(0.318, alpha_sq).unwrap()).unwrap();
            assert!((r.exact - 4.0 * 0.25 * f.vacuum_forward.powi(2) * f.reflected.norm_sqr()).abs() < 1e-12);
            last = f.fidelity;
        }
    }

    #[test]
    fn channel_sum_rule_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..8 {
            let p = SystemParams::from_mhz(
                rng.gen_range(5.0..100.0),
                rng.gen_range(0.0..5.0),
                0.0,
                rng.gen_range(1.0..10.0),
            )
            .with_coupling(Complex64::from_polar(mhz(rng.gen_range(0.0..150.0)), rng.gen_range(0.0..6.3)))
            .with_detunings_mhz(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let pulse = GaussianPulseSpec::new(rng.gen_range(0.05..1.0), rng.gen_range(0.1..50.0)).unwrap();
            let c = channel_amplitudes(&p, pulse).unwrap();
            assert!((c.total() / pulse.alpha_sq - 1.0).abs() < 1e-6);
            assert!((c.total_uncoupled() / pulse.alpha_sq - 1.0).abs() < 1e-6);
        }
    }

    fn times(pulse: &GaussianPulseSpec) -> Vec<f64> {
        (-120..=120).map(|k| k as f64 * pulse.t_p / 20.0).collect()
    }

    #[test]
    fn empty_cavity_transmits_shape() {
        let p = fig7(0.0);
        let pulse = GaussianPulseSpec::new(200.0 / p.kappa(), 10.0).unwrap();
        let ts = times(&pulse);
        let d = default_resolution(&pulse);
        let input = output_pulse_time_domain(&p, pulse, Channel::Input, &ts, d).unwrap();
        let out = output_pulse_time_domain(&p, pulse, Channel::ForwardG0, &ts, d).unwrap();
        let gain = transfer_coefficients(&p, 0.0).unwrap().t_ex.norm_sqr();
        let peak = pulse.peak_flux();
        for ((t, i), o) in ts.iter().zip(&input).zip(&out) {
            let exact = pulse.time_amplitude(*t, p.kappa_ex).norm_sqr();
            assert!((i - exact).abs() < 1e-6 * peak);
            assert!((o / gain - i).abs() < 0.01 * peak);
        }
    }

    #[test]
    fn fig8_output_pulses() {
        let (p, pulse) = fig8();
        let ts = times(&pulse);
        let d = default_resolution(&pulse);
        let input = output_pulse_time_domain(&p, pulse, Channel::Input, &ts, d).unwrap();
        let back = output_pulse_time_domain(&p, pulse, Channel::BackwardG, &ts, d).unwrap();
        let fwd = output_pulse_time_domain(&p, pulse, Channel::ForwardG, &ts, d).unwrap();
        let peak_in = input.iter().cloned().fold(0.0, f64::max);
        let peak_back = back.iter().cloned().fold(0.0, f64::max);
        assert!((peak_back / peak_in - 1.0).abs() < 0.05);
        let dot: f64 = input.iter().zip(&back).map(|(a, b)| a * b).sum();
        let overlap = dot / (input.iter().map(|a| a * a).sum::<f64>() * back.iter().map(|b| b * b).sum::<f64>()).sqrt();
        assert!(overlap > 0.99);
        assert!(fwd.iter().cloned().fold(0.0, f64::max) < 1e-3 * peak_in);
    }

    #[test]
    fn time_window_is_limited_by_resolution() {
        let (p, pulse) = fig8();
        let d = default_resolution(&pulse);
        let r = output_pulse_time_domain(&p, pulse, Channel::Input, &[-15.0 * pulse.t_p, 15.0 * pulse.t_p], d);
        assert!(matches!(r, Err(Error::GridResolution { .. })));
        assert!(output_pulse_time_domain(&p, pulse, Channel::Input, &[0.0], 2.0 * d).is_err());
    }

    #[test]
    fn scattering_is_out_of_regime() {
        let (p, pulse) = fig8();
        let p = SystemParams { h: 1.0, ..p };
        assert!(matches!(channel_amplitudes(&p, pulse), Err(Error::Regime(_))));
    }
}
