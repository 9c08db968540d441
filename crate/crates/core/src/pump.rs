//! Gaussian pump beam: direct-space envelope, Fourier spectrum with the
//! per-dimension normalization, spectral widths, the factorized pump volume
//! factor, and the validity check for treating the pump as nearly plane-wave.

use crate::dispersion::DispersionScales;
use crate::phasematch::{Dimension, SpectralPoint};

/// Pump at the crystal: waist (um), duration (fs), dimensionless gain.
/// Peak amplitude is normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig {
    pub sigma_um: f64,
    pub tau_fs: f64,
    pub gain: f64,
}

impl PumpConfig {
    pub fn new(sigma_um: f64, tau_fs: f64, gain: f64) -> Self {
        assert!(
            sigma_um > 0.0 && tau_fs > 0.0 && gain > 0.0,
            "pump waist, duration and gain must be positive"
        );
        PumpConfig {
            sigma_um,
            tau_fs,
            gain,
        }
    }

    /// The low-gain treatment assumes g well below 1.
    pub fn high_gain(&self) -> bool {
        self.gain > 0.1
    }

    /// Spectral width in q: delta_q = 2/sigma (rad/um).
    pub fn delta_q(&self) -> f64 {
        2.0 / self.sigma_um
    }

    /// Spectral width in Omega: delta_omega = 2/tau (rad/fs).
    pub fn delta_omega(&self) -> f64 {
        2.0 / self.tau_fs
    }

    /// Direct-space envelope exp(-(x^2+y^2)/sigma^2 - t^2/tau^2).
    pub fn envelope(&self, x_um: f64, y_um: f64, t_fs: f64) -> f64 {
        let s2 = self.sigma_um * self.sigma_um;
        let t2 = self.tau_fs * self.tau_fs;
        (-(x_um * x_um + y_um * y_um) / s2 - t_fs * t_fs / t2).exp()
    }

    /// Fourier spectrum of the envelope at the pump point w_p, with the
    /// 1/(2pi)^{D/2} convention folded in:
    /// 1D tau/sqrt(2), 2D sigma^2/2, 3D sigma^2 tau/2^{3/2}, each times the
    /// Gaussian exp(-q_p^2 sigma^2/4 - Omega_p^2 tau^2/4).
    pub fn spectrum(&self, w_p: &SpectralPoint) -> f64 {
        self.spectrum_peak(w_p.dim) * self.spectrum_shape(w_p)
    }

    /// Peak value of the spectrum (w_p = 0) in the given dimension.
    pub fn spectrum_peak(&self, dim: Dimension) -> f64 {
        let mut peak = 1.0;
        if dim.has_q() {
            peak *= self.sigma_um * self.sigma_um / 2.0;
        }
        if dim.has_omega() {
            peak *= self.tau_fs / std::f64::consts::SQRT_2;
        }
        peak
    }

    /// The Gaussian shape factor alone (1 at w_p = 0).
    pub fn spectrum_shape(&self, w_p: &SpectralPoint) -> f64 {
        let s2 = self.sigma_um * self.sigma_um;
        let t2 = self.tau_fs * self.tau_fs;
        (-w_p.q2() * s2 / 4.0 - w_p.omega * w_p.omega * t2 / 4.0).exp()
    }

    /// Pump volume factor of the factorized Schmidt number:
    /// [int |A_p|^2 dxi]^2 / int |A_p|^4 dxi over the model's coordinates.
    /// 1D tau*sqrt(pi), 2D pi*sigma^2, 3D pi^{3/2}*sigma^2*tau.
    pub fn pump_factor(&self, dim: Dimension) -> f64 {
        let pi = std::f64::consts::PI;
        let mut p = 1.0;
        if dim.has_q() {
            p *= pi * self.sigma_um * self.sigma_um;
        }
        if dim.has_omega() {
            p *= pi.sqrt() * self.tau_fs;
        }
        p
    }
}

/// Whether the pump varies slowly enough, in space and time, for the
/// factorized (nearly-plane-wave) treatment to hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpwpaReport {
    /// tau_p / tau_GVM.
    pub temporal_margin: f64,
    /// sigma_p / l_walkoff.
    pub spatial_margin: f64,
    /// Both margins clear the hard floor (1.5).
    pub satisfied: bool,
    /// Satisfied, but some margin is below the comfortable factor (4).
    pub marginal: bool,
    /// Pump-to-phase-matching bandwidth ratio
    /// beta = delta_q^2 * delta_omega / (q0^2 * omega0).
    pub beta: f64,
}

/// Margins below this floor invalidate the factorized treatment outright.
pub const NPWPA_FLOOR: f64 = 1.5;
/// Margins below this are satisfied but flagged marginal.
pub const NPWPA_COMFORT: f64 = 4.0;

pub fn npwpa_check(pump: &PumpConfig, scales: &DispersionScales) -> NpwpaReport {
    let temporal_margin = pump.tau_fs / scales.tau_gvm;
    let spatial_margin = pump.sigma_um / scales.l_walkoff;
    let worst = temporal_margin.min(spatial_margin);
    let beta = pump.delta_q() * pump.delta_q() * pump.delta_omega()
        / (scales.q0 * scales.q0 * scales.omega0);
    NpwpaReport {
        temporal_margin,
        spatial_margin,
        satisfied: worst >= NPWPA_FLOOR,
        marginal: worst < NPWPA_COMFORT,
        beta,
    }
}
