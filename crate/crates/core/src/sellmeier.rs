//! Empirical Sellmeier refractive-index models for beta barium borate (BBO),
//! a negative uniaxial crystal.
//!
//! Both shipped coefficient sets use the single-resonance form
//! n^2(lambda) = A + B/(lambda^2 - C) - D*lambda^2 with lambda in
//! micrometers. The Kato set reproduces the phase-matching angles and
//! bandwidth scales this crate validates against; Eimerl is provided as an
//! alternative since published BBO fits disagree at the third decimal.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SellmeierError {
    #[error("wavelength {lambda_um} um outside transparency window [{lo}, {hi}] um")]
    OutOfWindow { lambda_um: f64, lo: f64, hi: f64 },
}

/// Coefficients of n^2 = A + B/(lambda^2 - C) - D*lambda^2, lambda in um.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellmeierCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SellmeierCoeffs {
    /// n^2 at wavelength `lambda_um`, no window check.
    fn n_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        self.a + self.b / (l2 - self.c) - self.d * l2
    }
}

/// A pair of ordinary / principal-extraordinary index models with a declared
/// transparency window. Outside the window the fit is unvalidated and
/// evaluation errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellmeierSet {
    pub name: &'static str,
    pub ordinary: SellmeierCoeffs,
    pub extraordinary: SellmeierCoeffs,
    /// [lo, hi] in micrometers.
    pub window_um: (f64, f64),
}

/// Kato's BBO fit (the compilation most nonlinear-optics handbooks quote).
pub const KATO: SellmeierSet = SellmeierSet {
    name: "kato",
    ordinary: SellmeierCoeffs {
        a: 2.7359,
        b: 0.01878,
        c: 0.01822,
        d: 0.01354,
    },
    extraordinary: SellmeierCoeffs {
        a: 2.3753,
        b: 0.01224,
        c: 0.01667,
        d: 0.01516,
    },
    window_um: (0.4, 1.6),
};

/// Eimerl's BBO fit; differs from Kato in the third decimal of the indices.
pub const EIMERL: SellmeierSet = SellmeierSet {
    name: "eimerl",
    ordinary: SellmeierCoeffs {
        a: 2.7405,
        b: 0.0184,
        c: 0.0179,
        d: 0.0155,
    },
    extraordinary: SellmeierCoeffs {
        a: 2.3730,
        b: 0.0128,
        c: 0.0156,
        d: 0.0044,
    },
    window_um: (0.4, 1.6),
};

impl SellmeierSet {
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "kato" => Some(KATO),
            "eimerl" => Some(EIMERL),
            _ => None,
        }
    }

    fn check_window(&self, lambda_um: f64) -> Result<(), SellmeierError> {
        let (lo, hi) = self.window_um;
        if lambda_um < lo || lambda_um > hi || !lambda_um.is_finite() {
            return Err(SellmeierError::OutOfWindow {
                lambda_um,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// Ordinary index n_o(lambda).
    pub fn n_ordinary(&self, lambda_um: f64) -> Result<f64, SellmeierError> {
        self.check_window(lambda_um)?;
        Ok(self.ordinary.n_squared(lambda_um).sqrt())
    }

    /// Principal extraordinary index n_e(lambda) (propagation normal to the
    /// optic axis).
    pub fn n_extraordinary_principal(&self, lambda_um: f64) -> Result<f64, SellmeierError> {
        self.check_window(lambda_um)?;
        Ok(self.extraordinary.n_squared(lambda_um).sqrt())
    }

    /// Extraordinary index at angle `theta` (radians) from the optic axis:
    /// the uniaxial index ellipse 1/n^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
    pub fn n_extraordinary(&self, lambda_um: f64, theta: f64) -> Result<f64, SellmeierError> {
        self.check_window(lambda_um)?;
        let no2 = self.ordinary.n_squared(lambda_um);
        let ne2 = self.extraordinary.n_squared(lambda_um);
        let (s, c) = theta.sin_cos();
        Ok(1.0 / (c * c / no2 + s * s / ne2).sqrt())
    }
}
