//! Schmidt number K = N^2/B of the two-photon state, by three routes:
//! Monte Carlo of the exact pair of integrals, deterministic quadrature of
//! the factorized (nearly-plane-wave-pump) formula, and the closed-form box
//! approximation. Plus the bandwidth-factorizability table and the pump-
//! focusing (beta) sweep.

use crate::dispersion::{derive_scales, CrystalConfig, DispersionError, DispersionScales};
use crate::mc::{self, McError, McEstimate, McParams, Proposal, SamplerSpec};
use crate::phasematch::{
    box_volume, pm_volume, pm_volume_quartic, BandwidthLimits, Dimension, PhaseMatchError,
    PhaseMatchModel, QuadraticCoeffs, SpectralPoint, Surrogate, DEFAULT_ALPHA,
};
use crate::pump::{npwpa_check, NpwpaReport, PumpConfig};
use crate::quad::sinc;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchmidtError {
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    PhaseMatch(#[from] PhaseMatchError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("Monte Carlo needs a finite spectral cutoff omega_max in this model")]
    SpectralCutoffRequired,
    #[error("the closed-form path needs the quadratic mismatch model")]
    AnalyticNeedsQuadratic,
    #[error("pair-correlation normalization consistent with zero ({value:.3e} +/- {std_err:.3e}); increase samples")]
    NormalizationZero { value: f64, std_err: f64 },
}

/// Which mismatch function drives V.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchForm {
    Exact,
    Quadratic,
}

/// Evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    McExact,
    NpwpaIntegral,
    AnalyticBox,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::McExact => "mc_exact",
            Method::NpwpaIntegral => "npwpa_integral",
            Method::AnalyticBox => "analytic_box",
        })
    }
}

/// Replacement for V in the biphoton amplitude; the hooks give states with
/// independently known Schmidt numbers for validation. The Monte Carlo route
/// consumes any kernel; the quadrature route additionally honors `One`
/// (both weighted volumes collapse to the region volume). The closed-form
/// route and the `GaussianRel` quadrature case evaluate the physical model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VKernel {
    /// The physical gain profile from the mismatch model.
    Model,
    /// V = 1 everywhere: the amplitude is the pump spectrum on a box.
    One,
    /// V = exp(-((Omega1-Omega2)/2)^2 / c^2): a Gaussian in the difference
    /// frequency, making psi a two-Gaussian state with K = (1+r^2)/(2r),
    /// r = c*tau_p.
    GaussianRel { c: f64 },
}

/// Full description of one Schmidt-number evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub dim: Dimension,
    pub crystal: CrystalConfig,
    pub form: MismatchForm,
    pub pump: PumpConfig,
    /// Collected region; q_max = inf is replaced by a covering surrogate.
    pub limits: BandwidthLimits,
    pub alpha: f64,
    pub kernel: VKernel,
}

impl ModelSpec {
    pub fn new(
        dim: Dimension,
        crystal: CrystalConfig,
        form: MismatchForm,
        pump: PumpConfig,
        limits: BandwidthLimits,
    ) -> Self {
        ModelSpec {
            dim,
            crystal,
            form,
            pump,
            limits,
            alpha: DEFAULT_ALPHA,
            kernel: VKernel::Model,
        }
    }

    pub fn with_kernel(mut self, kernel: VKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!(alpha > 0.0);
        self.alpha = alpha;
        self
    }

    /// Derive scales, build the mismatch model and resolve infinite cutoffs.
    pub fn prepare(&self) -> Result<Prepared, SchmidtError> {
        let (scales, disp) = derive_scales(&self.crystal)?;
        let coeffs = QuadraticCoeffs::from_scales(&scales);
        let pm = match self.form {
            MismatchForm::Exact => PhaseMatchModel::Exact(disp),
            MismatchForm::Quadratic => PhaseMatchModel::Quadratic(coeffs),
        };
        let mut limits = self.limits;
        if self.dim.has_q() && !limits.q_max.is_finite() {
            limits.q_max = surrogate_q_max(&scales, &limits, self.dim, self.alpha);
        }
        Ok(Prepared {
            dim: self.dim,
            scales,
            pm,
            coeffs,
            pump: self.pump,
            limits,
            alpha: self.alpha,
            kernel: self.kernel,
            npwpa: npwpa_check(&self.pump, &scales),
        })
    }
}

/// "No spatial cutoff": a disk radius past which the quadratic-model sinc^2
/// volume has converged to better than 1e-3, namely three times the largest
/// radius the phase-matched band reaches inside the spectral window.
fn surrogate_q_max(
    scales: &DispersionScales,
    limits: &BandwidthLimits,
    dim: Dimension,
    alpha: f64,
) -> f64 {
    let ob2 = if dim.has_omega() && limits.omega_max.is_finite() {
        let ob = limits.omega_max / scales.omega0;
        ob * ob
    } else {
        0.0
    };
    let band = alpha.max(ob2 + scales.delta0_lc.max(0.0));
    3.0 * band.sqrt() * scales.q0
}

/// A ModelSpec with scales derived and cutoffs made concrete.
#[derive(Debug, Clone, Copy)]
pub struct Prepared {
    pub dim: Dimension,
    pub scales: DispersionScales,
    pub pm: PhaseMatchModel,
    pub coeffs: QuadraticCoeffs,
    pub pump: PumpConfig,
    pub limits: BandwidthLimits,
    pub alpha: f64,
    pub kernel: VKernel,
    pub npwpa: NpwpaReport,
}

impl Prepared {
    /// V(w1, w2): model gain profile or a test kernel. Non-propagating
    /// (evanescent / out-of-window) arguments give 0.
    pub fn v_pair(&self, w1: &SpectralPoint, w2: &SpectralPoint) -> Complex64 {
        match self.kernel {
            VKernel::Model => match self.pm.delta(w1, w2) {
                Ok(d) => {
                    let h = d / 2.0;
                    Complex64::new(h.cos(), h.sin()) * sinc(h)
                }
                Err(_) => Complex64::ZERO,
            },
            VKernel::One => Complex64::ONE,
            VKernel::GaussianRel { c } => {
                let x = (w1.omega - w2.omega) / 2.0;
                Complex64::new((-x * x / (c * c)).exp(), 0.0)
            }
        }
    }

    /// The pair amplitude up to the constant g/(2pi)^{3/2}:
    /// psi'(w1, w2) = A_p_tilde(w1+w2) * V(w1, w2).
    pub fn biphoton_amplitude(&self, w1: &SpectralPoint, w2: &SpectralPoint) -> Complex64 {
        self.v_pair(w1, w2) * self.pump.spectrum(&w1.add(w2))
    }
}

/// Outcome of any evaluation route. N and B carry arbitrary (relative)
/// units: the constant g^2/(2pi)^3 is dropped, so only ratios are physical.
#[derive(Debug, Clone, Copy)]
pub struct SchmidtResult {
    pub k: f64,
    pub k_err: f64,
    pub n_rel: Option<f64>,
    pub n_err: Option<f64>,
    pub b_rel: Option<f64>,
    pub b_err: Option<f64>,
    pub method: Method,
    pub dim: Dimension,
    pub npwpa: NpwpaReport,
    pub seed: Option<u64>,
}

fn signal_proposals(dim: Dimension, limits: &BandwidthLimits, out: &mut Vec<Proposal>) {
    if dim.has_q() {
        out.push(Proposal::Disk {
            radius: limits.q_max,
        });
    }
    if dim.has_omega() {
        out.push(Proposal::Uniform {
            lo: -limits.omega_max,
            hi: limits.omega_max,
        });
    }
}

/// Proposals for the free signal point w1. Under the physical kernel the
/// gain product confines |q1| to the phase-matched reach sqrt(alpha + d0 +
/// obar_max^2) (in q0 units) while the collected disk can be several times
/// wider, so the q-components take a covering Gaussian instead of the
/// uniform disk; the non-compact support means the caller must apply the
/// region indicator explicitly. Returns true when that check is required.
fn w1_proposals(p: &Prepared, out: &mut Vec<Proposal>) -> bool {
    if p.kernel != VKernel::Model || !p.dim.has_q() {
        signal_proposals(p.dim, &p.limits, out);
        return false;
    }
    let ob2 = if p.dim.has_omega() {
        let ob = p.limits.omega_max / p.scales.omega0;
        ob * ob
    } else {
        0.0
    };
    let reach = (p.alpha + p.scales.delta0_lc.max(0.0) + ob2).sqrt() + 3.0;
    let std = (reach * p.scales.q0).min(p.limits.q_max) / std::f64::consts::SQRT_2;
    out.push(Proposal::Gaussian { std });
    out.push(Proposal::Gaussian { std });
    if p.dim.has_omega() {
        out.push(Proposal::Uniform {
            lo: -p.limits.omega_max,
            hi: p.limits.omega_max,
        });
    }
    true
}

/// Gaussian proposals matched to the 1/e half-widths of |A_p_tilde|^2:
/// sqrt(2)/sigma_p per transverse component, sqrt(2)/tau_p in frequency.
fn pump_proposals(dim: Dimension, pump: &PumpConfig, out: &mut Vec<Proposal>) {
    if dim.has_q() {
        let std = std::f64::consts::SQRT_2 / pump.sigma_um;
        out.push(Proposal::Gaussian { std });
        out.push(Proposal::Gaussian { std });
    }
    if dim.has_omega() {
        out.push(Proposal::Gaussian {
            std: std::f64::consts::SQRT_2 / pump.tau_fs,
        });
    }
}

/// Proposals for the pair-correlation shift delta. The integrand confines
/// delta to the overlap of the pump spectrum and the gain band, so each
/// component takes the narrower of the pump width and the natural mismatch
/// width; the weight stays unbiased under any full-support proposal.
fn delta_proposals(
    dim: Dimension,
    pump: &PumpConfig,
    scales: &DispersionScales,
    out: &mut Vec<Proposal>,
) {
    if dim.has_q() {
        let std = (std::f64::consts::SQRT_2 / pump.sigma_um).min(scales.q0);
        out.push(Proposal::Gaussian { std });
        out.push(Proposal::Gaussian { std });
    }
    if dim.has_omega() {
        let std = (std::f64::consts::SQRT_2 / pump.tau_fs).min(scales.omega0);
        out.push(Proposal::Gaussian { std });
    }
}

fn read_point(dim: Dimension, u: &[f64]) -> SpectralPoint {
    match dim {
        Dimension::One => SpectralPoint::one_d(u[0]),
        Dimension::Two => SpectralPoint::two_d(u[0], u[1]),
        Dimension::Three => SpectralPoint::three_d(u[0], u[1], u[2]),
    }
}

fn require_finite_limits(p: &Prepared) -> Result<(), SchmidtError> {
    if p.dim.has_omega() && !p.limits.omega_max.is_finite() {
        return Err(SchmidtError::SpectralCutoffRequired);
    }
    Ok(())
}

/// Monte Carlo estimate of N' = int over R^2 of |psi'(w1, w2)|^2.
/// w1 is drawn uniformly over the collected region, the pump point
/// w_p = w1 + w2 from Gaussians matched to the pump spectrum.
pub fn estimate_n(spec: &ModelSpec, params: &McParams) -> Result<McEstimate, SchmidtError> {
    let p = spec.prepare()?;
    estimate_n_prepared(&p, params)
}

fn estimate_n_prepared(p: &Prepared, params: &McParams) -> Result<McEstimate, SchmidtError> {
    require_finite_limits(p)?;
    let nc = p.dim.count();
    let mut coords = Vec::new();
    let check_w1 = w1_proposals(p, &mut coords);
    pump_proposals(p.dim, &p.pump, &mut coords);
    let sampler = SamplerSpec::new(coords);
    let prepared = *p;
    let f = move |u: &[f64]| -> f64 {
        let w1 = read_point(prepared.dim, &u[..nc]);
        if check_w1 && !prepared.limits.contains(&w1) {
            return 0.0;
        }
        let wp = read_point(prepared.dim, &u[nc..2 * nc]);
        let w2 = wp.sub(&w1);
        if !prepared.limits.contains(&w2) {
            return 0.0;
        }
        prepared.biphoton_amplitude(&w1, &w2).norm_sqr()
    };
    Ok(mc::estimate(
        f,
        &sampler,
        params.n_samples,
        params.seed,
        params.shards,
    )?)
}

/// Monte Carlo estimate of B' (the squared pair-correlation integral) in the
/// variables (w1, w_p, w_p', delta): w1 uniform over the collected region,
/// the three pump-like variables Gaussian. Returns (real, imaginary)
/// estimates sharing sample points; B is real, so the imaginary part is a
/// consistency diagnostic.
pub fn estimate_b(
    spec: &ModelSpec,
    params: &McParams,
) -> Result<(McEstimate, McEstimate), SchmidtError> {
    let p = spec.prepare()?;
    estimate_b_prepared(&p, params)
}

fn estimate_b_prepared(
    p: &Prepared,
    params: &McParams,
) -> Result<(McEstimate, McEstimate), SchmidtError> {
    require_finite_limits(p)?;
    let nc = p.dim.count();
    let mut coords = Vec::new();
    let check_w1 = w1_proposals(p, &mut coords);
    pump_proposals(p.dim, &p.pump, &mut coords); // w_p
    pump_proposals(p.dim, &p.pump, &mut coords); // w_p'
    delta_proposals(p.dim, &p.pump, &p.scales, &mut coords);
    let sampler = SamplerSpec::new(coords);
    let prepared = *p;
    let f = move |u: &[f64], out: &mut [f64; 2]| {
        out[0] = 0.0;
        out[1] = 0.0;
        let dim = prepared.dim;
        let w1 = read_point(dim, &u[..nc]);
        if check_w1 && !prepared.limits.contains(&w1) {
            return;
        }
        let wp = read_point(dim, &u[nc..2 * nc]);
        let wp2 = read_point(dim, &u[2 * nc..3 * nc]);
        let dl = read_point(dim, &u[3 * nc..4 * nc]);
        // The four signal arguments of the psi' product; all must be inside
        // the collected region.
        let w2 = wp.sub(&w1);
        let w1s = w1.sub(&dl);
        let w2s = wp2.sub(&w1).add(&dl);
        let lim = &prepared.limits;
        if !lim.contains(&w2) || !lim.contains(&w1s) || !lim.contains(&w2s) {
            return;
        }
        let pump = &prepared.pump;
        let a4 = pump.spectrum(&wp)
            * pump.spectrum(&wp2)
            * pump.spectrum(&wp.sub(&dl))
            * pump.spectrum(&wp2.add(&dl));
        // psi(w1,w2) psi*(w1s,w2) psi(w1s,w2s) psi*(w1,w2s), pump part
        // already collected in a4.
        let z = prepared.v_pair(&w1, &w2)
            * prepared.v_pair(&w1s, &w2).conj()
            * prepared.v_pair(&w1s, &w2s)
            * prepared.v_pair(&w1, &w2s).conj();
        out[0] = a4 * z.re;
        out[1] = a4 * z.im;
    };
    let [re, im] = mc::estimate_multi(f, &sampler, params.n_samples, params.seed, params.shards)?;
    Ok((re, im))
}

/// K = N^2/B by Monte Carlo; the relative errors combine in quadrature
/// (2 N_rel_err, B_rel_err).
pub fn schmidt_mc(spec: &ModelSpec, params: &McParams) -> Result<SchmidtResult, SchmidtError> {
    let p = spec.prepare()?;
    let n = estimate_n_prepared(&p, params)?;
    let (b, _b_im) = estimate_b_prepared(&p, params)?;
    if b.consistent_with_zero() || n.consistent_with_zero() {
        let worst = if b.consistent_with_zero() { &b } else { &n };
        return Err(SchmidtError::NormalizationZero {
            value: worst.value,
            std_err: worst.std_err,
        });
    }
    let k = n.value * n.value / b.value;
    let rel = (2.0 * n.rel_err()).hypot(b.rel_err());
    Ok(SchmidtResult {
        k,
        k_err: k * rel,
        n_rel: Some(n.value),
        n_err: Some(n.std_err),
        b_rel: Some(b.value),
        b_err: Some(b.std_err),
        method: Method::McExact,
        dim: p.dim,
        npwpa: p.npwpa,
        seed: Some(params.seed),
    })
}

/// Factorized-pump Schmidt number by deterministic quadrature:
/// K = P_D * [int |V|^2 dw]^2 / ((2pi)^D int |V|^4 dw) over the collected
/// region, with P_D the closed-form pump factor.
pub fn schmidt_npwpa_integral(spec: &ModelSpec) -> Result<SchmidtResult, SchmidtError> {
    let p = spec.prepare()?;
    let (v2, v4) = if p.kernel == VKernel::One {
        // |V| = 1: both weighted volumes are the region volume itself.
        let vol = p.limits.volume(p.dim);
        if !vol.is_finite() {
            return Err(SchmidtError::SpectralCutoffRequired);
        }
        (vol, vol)
    } else {
        (
            pm_volume(&p.pm, p.dim, &p.limits, Surrogate::Sinc2)?,
            pm_volume_quartic(&p.pm, p.dim, &p.limits)?,
        )
    };
    let d = p.dim.count() as i32;
    let k = p.pump.pump_factor(p.dim) * v2 * v2 / ((2.0 * PI).powi(d) * v4);
    Ok(SchmidtResult {
        k,
        k_err: 0.0,
        n_rel: None,
        n_err: None,
        b_rel: None,
        b_err: None,
        method: Method::NpwpaIntegral,
        dim: p.dim,
        npwpa: p.npwpa,
        seed: None,
    })
}

/// Closed-form box approximation: K = P_D * Vol{|Delta| < alpha} / (2pi)^D,
/// exact piecewise in the cutoffs. Reduces to the printed single-cutoff
/// branches (small-bandwidth growth, large-bandwidth behavior) in their
/// regimes at the default alpha.
pub fn schmidt_analytic(spec: &ModelSpec) -> Result<SchmidtResult, SchmidtError> {
    if spec.form != MismatchForm::Quadratic {
        return Err(SchmidtError::AnalyticNeedsQuadratic);
    }
    let p = spec.prepare()?;
    let k = analytic_box_k(&p.pump, &p.coeffs, p.dim, &p.limits, p.alpha);
    Ok(SchmidtResult {
        k,
        k_err: 0.0,
        n_rel: None,
        n_err: None,
        b_rel: None,
        b_err: None,
        method: Method::AnalyticBox,
        dim: p.dim,
        npwpa: p.npwpa,
        seed: None,
    })
}

/// The box-approximation Schmidt number from raw quadratic coefficients.
pub fn analytic_box_k(
    pump: &PumpConfig,
    coeffs: &QuadraticCoeffs,
    dim: Dimension,
    limits: &BandwidthLimits,
    alpha: f64,
) -> f64 {
    let vol = box_volume(coeffs, dim, limits, alpha);
    pump.pump_factor(dim) * vol / (2.0 * PI).powi(dim.count() as i32)
}

/// One row of the bandwidth-factorizability table.
#[derive(Debug, Clone, Copy)]
pub struct GapRow {
    /// Common normalized cutoff: omega_max/om0 = q_max/q0.
    pub bandwidth: f64,
    pub k_3d: f64,
    pub k_product: f64,
    /// k_3d / k_product: 1 where the 3D state factorizes into 2D x 1D.
    pub ratio: f64,
}

/// Sweep the joint cutoffs omega_max/om0 = q_max/q0 and compare the full 3D
/// Schmidt number against the product of the 1D and 2D models' numbers,
/// all on the closed-form box path.
pub fn factorizability_gap(
    spec: &ModelSpec,
    bandwidths: &[f64],
) -> Result<Vec<GapRow>, SchmidtError> {
    if spec.form != MismatchForm::Quadratic {
        return Err(SchmidtError::AnalyticNeedsQuadratic);
    }
    let p = spec.prepare()?;
    let mut rows = Vec::with_capacity(bandwidths.len());
    for &bw in bandwidths {
        let limits = BandwidthLimits::new(bw * p.scales.q0, bw * p.scales.omega0);
        let k_3d = analytic_box_k(&p.pump, &p.coeffs, Dimension::Three, &limits, p.alpha);
        let k_2d = analytic_box_k(&p.pump, &p.coeffs, Dimension::Two, &limits, p.alpha);
        let k_1d = analytic_box_k(&p.pump, &p.coeffs, Dimension::One, &limits, p.alpha);
        let k_product = k_2d * k_1d;
        rows.push(GapRow {
            bandwidth: bw,
            k_3d,
            k_product,
            ratio: k_3d / k_product,
        });
    }
    Ok(rows)
}

/// One row of the pump-focusing sweep.
#[derive(Debug, Clone, Copy)]
pub struct BetaRow {
    pub beta: f64,
    pub k: f64,
    pub k_err: f64,
    /// The factorized 1/beta reference curve (valid for beta << 1).
    pub k_analytic: f64,
    pub seed: u64,
}

/// Pump realizing a given bandwidth ratio beta = delta_q^2 delta_omega /
/// (q0^2 om0) with the focusing split equally: delta_q^2 = sqrt(beta) q0^2
/// and delta_omega = sqrt(beta) om0.
pub fn pump_for_beta(beta: f64, scales: &DispersionScales, gain: f64) -> PumpConfig {
    assert!(beta > 0.0);
    let sigma = 2.0 / (beta.powf(0.25) * scales.q0);
    let tau = 2.0 / (beta.sqrt() * scales.omega0);
    PumpConfig::new(sigma, tau, gain)
}

/// K(beta) by Monte Carlo over a beta grid, each point on its own derived
/// seed, with the closed-form box value attached for comparison.
pub fn beta_sweep(
    spec: &ModelSpec,
    betas: &[f64],
    params: &McParams,
) -> Result<Vec<BetaRow>, SchmidtError> {
    let mut rows = Vec::with_capacity(betas.len());
    for (i, &beta) in betas.iter().enumerate() {
        let p0 = spec.prepare()?;
        let pump = pump_for_beta(beta, &p0.scales, spec.pump.gain);
        let point = ModelSpec { pump, ..*spec };
        let seed = mc::point_seed(params.seed, i as u64);
        let point_params = McParams { seed, ..*params };
        let result = schmidt_mc(&point, &point_params)?;
        let analytic = schmidt_analytic(&ModelSpec {
            form: MismatchForm::Quadratic,
            ..point
        })?;
        rows.push(BetaRow {
            beta,
            k: result.k,
            k_err: result.k_err,
            k_analytic: analytic.k,
            seed,
        });
    }
    Ok(rows)
}
