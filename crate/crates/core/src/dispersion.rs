//! Crystal configuration and every derived phase-matching scale: signal and
//! pump wavevectors, group velocities and dispersions, the diffraction and
//! GVD bandwidth scales q0 / Omega0, the collinear mismatch, group-velocity
//! mismatch time and lateral walk-off.
//!
//! Internal units are micrometers, femtoseconds and radians throughout
//! (c = 0.299792458 um/fs). Angular frequencies are rad/fs; multiply by 1e15
//! for rad/s when reporting.

use crate::sellmeier::{SellmeierError, SellmeierSet};
use thiserror::Error;

/// Speed of light in um/fs.
pub const C_UM_PER_FS: f64 = 0.299792458;

/// Central-difference step for frequency derivatives (rad/fs); equals
/// 1e12 rad/s. Well inside the smooth regime of the Sellmeier fits: halving
/// it moves k'' by under 0.1% (tested below).
pub const FD_OMEGA_STEP: f64 = 1e-3;

/// Central-difference step for the walk-off angle derivative (rad).
pub const FD_THETA_STEP: f64 = 1e-4;

/// Hard cap on frequency offsets: |Omega| < 0.9 * omega_p/2 keeps signal
/// wavelengths finite; the Sellmeier window is the binding constraint well
/// before that.
pub const OMEGA_CAP_FRACTION: f64 = 0.9;

#[derive(Debug, Error)]
pub enum DispersionError {
    #[error(transparent)]
    Sellmeier(#[from] SellmeierError),
    #[error("evanescent mode: |q| = {q_mag:.6} exceeds k = {k_mag:.6} rad/um")]
    Evanescent { q_mag: f64, k_mag: f64 },
    #[error("frequency offset {omega:.4} rad/fs beyond the domain cap {cap:.4} rad/fs")]
    FrequencyCap { omega: f64, cap: f64 },
    #[error(
        "collinear solve: required pump index {required:.6} outside the reachable bracket \
         [{lo:.6}, {hi:.6}] (principal extraordinary to ordinary at lambda_p)"
    )]
    AngleUnreachable { required: f64, lo: f64, hi: f64 },
    #[error("invalid crystal config: {0}")]
    InvalidConfig(String),
}

/// How the crystal is tuned: either the pump propagation angle from the
/// optic axis, or the collinear mismatch Delta0*l_c directly (the angle is
/// then derived).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tuning {
    AngleDeg(f64),
    /// Delta0 * l_c in radians; 0 means collinear phase matching.
    CollinearMismatch(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalConfig {
    pub length_mm: f64,
    pub lambda_p_nm: f64,
    pub tuning: Tuning,
    pub sellmeier: SellmeierSet,
}

impl CrystalConfig {
    /// The reference crystal used throughout: 4 mm BBO pumped at 527 nm.
    pub fn bbo_4mm_527(tuning: Tuning) -> Self {
        CrystalConfig {
            length_mm: 4.0,
            lambda_p_nm: 527.0,
            tuning,
            sellmeier: crate::sellmeier::KATO,
        }
    }

    fn validate(&self) -> Result<(), DispersionError> {
        if !(self.length_mm > 0.0) {
            return Err(DispersionError::InvalidConfig(format!(
                "crystal length must be positive, got {} mm",
                self.length_mm
            )));
        }
        let lam_p = self.lambda_p_nm * 1e-3;
        let (lo, hi) = self.sellmeier.window_um;
        if !(lam_p >= lo && lam_p <= hi) {
            return Err(DispersionError::InvalidConfig(format!(
                "pump wavelength {lam_p} um outside Sellmeier window [{lo}, {hi}] um"
            )));
        }
        Ok(())
    }
}

/// Everything derived from a crystal config. Wavenumbers in rad/um, times in
/// fs, lengths in um; `omega0` is rad/fs (multiply by 1e15 for rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionScales {
    /// Signal wavenumber at degeneracy.
    pub k_s: f64,
    /// Signal inverse group velocity dk/dOmega (fs/um).
    pub k_s_prime: f64,
    /// Signal group-velocity dispersion (fs^2/um).
    pub k_s_dprime: f64,
    /// Pump wavenumber along its propagation axis.
    pub k_p: f64,
    pub k_p_prime: f64,
    pub k_p_dprime: f64,
    /// Diffraction bandwidth scale sqrt(k_s/l_c) (rad/um).
    pub q0: f64,
    /// GVD bandwidth scale 1/sqrt(k_s''*l_c) (rad/fs).
    pub omega0: f64,
    /// Collinear mismatch (2k_s - k_p)*l_c (rad).
    pub delta0_lc: f64,
    /// Group-velocity mismatch time (k_p' - k_s')*l_c (fs).
    pub tau_gvm: f64,
    /// Lateral walk-off length rho*l_c (um).
    pub l_walkoff: f64,
    /// Walk-off coefficient rho = -(1/k_p) dk_p/dtheta (rad).
    pub rho: f64,
    /// Pump angle from the optic axis (rad).
    pub theta_p: f64,
    /// Crystal length (um).
    pub l_c: f64,
    /// Pump angular frequency (rad/fs).
    pub omega_p: f64,
}

impl DispersionScales {
    pub fn omega0_rad_per_s(&self) -> f64 {
        self.omega0 * 1e15
    }
}

/// Exact-dispersion evaluator bound to one crystal config and pump angle.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion {
    set: SellmeierSet,
    pub theta_p: f64,
    pub l_c: f64,
    /// Pump carrier angular frequency (rad/fs).
    pub omega_p: f64,
    /// Walk-off coefficient at theta_p (rad); filled by `derive_scales`.
    pub rho: f64,
}

impl Dispersion {
    fn lambda_of(&self, omega: f64) -> f64 {
        2.0 * std::f64::consts::PI * C_UM_PER_FS / omega
    }

    fn check_cap(&self, omega_offset: f64) -> Result<(), DispersionError> {
        let cap = OMEGA_CAP_FRACTION * self.omega_p / 2.0;
        if omega_offset.abs() >= cap {
            return Err(DispersionError::FrequencyCap {
                omega: omega_offset,
                cap,
            });
        }
        Ok(())
    }

    /// Ordinary signal wavenumber magnitude at frequency offset Omega from
    /// degeneracy (rad/fs).
    pub fn k_signal(&self, omega_offset: f64) -> Result<f64, DispersionError> {
        self.check_cap(omega_offset)?;
        let om = self.omega_p / 2.0 + omega_offset;
        let lam = self.lambda_of(om);
        Ok(self.set.n_ordinary(lam)? * om / C_UM_PER_FS)
    }

    /// Extraordinary pump wavenumber magnitude at offset Omega_p from the
    /// carrier, along theta_p.
    pub fn k_pump(&self, omega_offset: f64) -> Result<f64, DispersionError> {
        let om = self.omega_p + omega_offset;
        let lam = self.lambda_of(om);
        Ok(self.set.n_extraordinary(lam, self.theta_p)? * om / C_UM_PER_FS)
    }

    /// Longitudinal signal wavevector sqrt(k_s^2 - |q|^2), non-paraxial.
    pub fn kz_signal(&self, qx: f64, qy: f64, omega: f64) -> Result<f64, DispersionError> {
        let k = self.k_signal(omega)?;
        let q2 = qx * qx + qy * qy;
        if q2 > k * k {
            return Err(DispersionError::Evanescent {
                q_mag: q2.sqrt(),
                k_mag: k,
            });
        }
        Ok((k * k - q2).sqrt())
    }

    /// Longitudinal pump wavevector with first-order walk-off and the
    /// paraxial transverse correction:
    /// k_pz = k_p(Omega_p) - rho*q_px - |q_p|^2 / (2 k_p(Omega_p)).
    pub fn kz_pump(&self, qpx: f64, qpy: f64, omega_p: f64) -> Result<f64, DispersionError> {
        let k = self.k_pump(omega_p)?;
        Ok(k - self.rho * qpx - (qpx * qpx + qpy * qpy) / (2.0 * k))
    }
}

/// Solve the pump angle that realizes a requested collinear mismatch.
///
/// The uniaxial index ellipse inverts in closed form:
/// sin^2(theta) = (n_p^-2 - n_o^-2) / (n_e^-2 - n_o^-2). An unreachable
/// index errors with the reachable bracket.
fn solve_angle(
    set: &SellmeierSet,
    lambda_p: f64,
    omega_p: f64,
    k_s: f64,
    l_c: f64,
    delta0_lc: f64,
) -> Result<f64, DispersionError> {
    let k_p_target = 2.0 * k_s - delta0_lc / l_c;
    let n_p = k_p_target * C_UM_PER_FS / omega_p;
    let n_o = set.n_ordinary(lambda_p)?;
    let n_e = set.n_extraordinary_principal(lambda_p)?;
    let s2 = (n_p.powi(-2) - n_o.powi(-2)) / (n_e.powi(-2) - n_o.powi(-2));
    if !(0.0..=1.0).contains(&s2) {
        return Err(DispersionError::AngleUnreachable {
            required: n_p,
            lo: n_e,
            hi: n_o,
        });
    }
    Ok(s2.sqrt().asin())
}

/// Derive every scale from a crystal config. Also returns the bound
/// exact-dispersion evaluator (with the walk-off coefficient filled in).
pub fn derive_scales(cfg: &CrystalConfig) -> Result<(DispersionScales, Dispersion), DispersionError> {
    cfg.validate()?;
    let l_c = cfg.length_mm * 1e3;
    let lambda_p = cfg.lambda_p_nm * 1e-3;
    let omega_p = 2.0 * std::f64::consts::PI * C_UM_PER_FS / lambda_p;
    let lambda_s = 2.0 * lambda_p;

    let k_s0 = cfg.sellmeier.n_ordinary(lambda_s)? * (omega_p / 2.0) / C_UM_PER_FS;

    let theta_p = match cfg.tuning {
        Tuning::AngleDeg(deg) => deg.to_radians(),
        Tuning::CollinearMismatch(d0lc) => {
            solve_angle(&cfg.sellmeier, lambda_p, omega_p, k_s0, l_c, d0lc)?
        }
    };

    let mut disp = Dispersion {
        set: cfg.sellmeier,
        theta_p,
        l_c,
        omega_p,
        rho: 0.0,
    };

    // Signal frequency derivatives by central differences.
    let h = FD_OMEGA_STEP;
    let ks_m = disp.k_signal(-h)?;
    let ks_0 = disp.k_signal(0.0)?;
    let ks_p = disp.k_signal(h)?;
    let k_s_prime = (ks_p - ks_m) / (2.0 * h);
    let k_s_dprime = (ks_p - 2.0 * ks_0 + ks_m) / (h * h);

    let kp_m = disp.k_pump(-h)?;
    let kp_0 = disp.k_pump(0.0)?;
    let kp_p = disp.k_pump(h)?;
    let k_p_prime = (kp_p - kp_m) / (2.0 * h);
    let k_p_dprime = (kp_p - 2.0 * kp_0 + kp_m) / (h * h);

    // Walk-off: rho = -(1/k_p) dk_p/dtheta. Positive for a negative uniaxial
    // crystal below 90 degrees.
    let dt = FD_THETA_STEP;
    let n_hi = cfg.sellmeier.n_extraordinary(lambda_p, theta_p + dt)?;
    let n_lo = cfg.sellmeier.n_extraordinary(lambda_p, theta_p - dt)?;
    let dk_dtheta = (n_hi - n_lo) * omega_p / C_UM_PER_FS / (2.0 * dt);
    let rho = -dk_dtheta / kp_0;
    disp.rho = rho;

    let scales = DispersionScales {
        k_s: ks_0,
        k_s_prime,
        k_s_dprime,
        k_p: kp_0,
        k_p_prime,
        k_p_dprime,
        q0: (ks_0 / l_c).sqrt(),
        omega0: 1.0 / (k_s_dprime * l_c).sqrt(),
        delta0_lc: (2.0 * ks_0 - kp_0) * l_c,
        tau_gvm: (k_p_prime - k_s_prime) * l_c,
        l_walkoff: rho * l_c,
        rho,
        theta_p,
        l_c,
        omega_p,
    };
    Ok((scales, disp))
}
