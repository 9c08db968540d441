//! Brute-force Schmidt-number reference: sample the pair amplitude on a
//! dense square (w1, w2) grid, fold the quadrature step into the matrix,
//! and read K off the singular-value spectrum. Dense SVD caps the grid at
//! side 4096, which covers 1D and small 2D cross-checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub const MAX_SIDE: usize = 4096;
pub const MIN_SIDE: usize = 8;
/// Largest boundary-to-peak amplitude ratio accepted as "contained".
pub const BOUNDARY_FRACTION: f64 = 1e-3;
/// Minimum grid nodes across the narrowest 1/e feature of |psi|.
pub const MIN_POINTS_PER_WIDTH: usize = 8;
/// Relative change under which a resolution ladder counts as converged.
pub const CONVERGENCE_TOL: f64 = 5e-3;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid side {side} exceeds the dense-SVD cap {MAX_SIDE}")]
    TooLarge { side: usize },
    #[error("grid side {side} below the minimum {MIN_SIDE}")]
    TooSmall { side: usize },
    #[error(
        "amplitude not contained: boundary peak {boundary:.3e} vs interior peak {peak:.3e} \
         (needs ratio < {BOUNDARY_FRACTION:.0e}); widen the grid bounds"
    )]
    BoundaryMass { boundary: f64, peak: f64 },
    #[error(
        "grid too coarse: narrowest 1/e feature spans {points} nodes, \
         need >= {MIN_POINTS_PER_WIDTH}; refine the grid"
    )]
    TooCoarse { points: usize },
    #[error("amplitude is identically zero on the grid")]
    AllZero,
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("resolution ladder invalid: {0}")]
    BadLadder(String),
}

/// Pair amplitude sampled on a uniform square grid over [lo, hi]^2,
/// endpoints included. For physical amplitudes |M_ij| = |M_ji|, but the
/// grid also accepts asymmetric test functions, so that is not enforced.
#[derive(Debug, Clone)]
pub struct AmplitudeGrid {
    lo: f64,
    hi: f64,
    values: DMatrix<Complex64>,
}

impl AmplitudeGrid {
    /// Sample psi(w1, w2) on an n x n grid. Row index runs over w1.
    pub fn sample<F>(lo: f64, hi: f64, n: usize, psi: F) -> Result<Self, OracleError>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        if n > MAX_SIDE {
            return Err(OracleError::TooLarge { side: n });
        }
        if n < MIN_SIDE {
            return Err(OracleError::TooSmall { side: n });
        }
        assert!(lo < hi, "grid needs lo < hi");
        let h = (hi - lo) / (n - 1) as f64;
        let node = |i: usize| lo + h * i as f64;
        let values = DMatrix::from_fn(n, n, |i, j| psi(node(i), node(j)));
        Ok(AmplitudeGrid { lo, hi, values })
    }

    pub fn side(&self) -> usize {
        self.values.nrows()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.side() - 1) as f64
    }

    fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm_sqr())).sqrt()
    }

    fn boundary_peak(&self) -> f64 {
        let n = self.side();
        let mut m = 0.0f64;
        for i in 0..n {
            for &(r, c) in &[(i, 0), (i, n - 1), (0, i), (n - 1, i)] {
                m = m.max(self.values[(r, c)].norm_sqr());
            }
        }
        m.sqrt()
    }

    /// Nodes across the narrowest 1/e feature of |psi| through its peak,
    /// probed along the two axes and both diagonals. A direction whose
    /// profile never drops below peak/e spans the grid and is ignored.
    fn narrowest_feature_nodes(&self, peak: f64) -> usize {
        let n = self.side() as isize;
        let (mut pi, mut pj) = (0isize, 0isize);
        let mut best = -1.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = self.values[(i as usize, j as usize)].norm_sqr();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        let thresh = (peak / std::f64::consts::E).powi(2);
        let mut narrowest = usize::MAX;
        for (di, dj) in [(1isize, 0isize), (0, 1), (1, 1), (1, -1)] {
            let mut count = 1usize;
            let mut crossed = true;
            for sign in [1isize, -1] {
                let (mut i, mut j) = (pi + sign * di, pj + sign * dj);
                loop {
                    if i < 0 || j < 0 || i >= n || j >= n {
                        crossed = false;
                        break;
                    }
                    if self.values[(i as usize, j as usize)].norm_sqr() < thresh {
                        break;
                    }
                    count += 1;
                    i += sign * di;
                    j += sign * dj;
                }
            }
            if crossed {
                narrowest = narrowest.min(count);
            }
        }
        narrowest
    }

    fn check_resolved(&self) -> Result<(), OracleError> {
        let peak = self.peak();
        if peak == 0.0 {
            return Err(OracleError::AllZero);
        }
        let boundary = self.boundary_peak();
        if boundary >= BOUNDARY_FRACTION * peak {
            return Err(OracleError::BoundaryMass { boundary, peak });
        }
        let points = self.narrowest_feature_nodes(peak);
        if points < MIN_POINTS_PER_WIDTH {
            return Err(OracleError::TooCoarse { points });
        }
        Ok(())
    }

    /// The matrix with the quadrature step folded in symmetrically
    /// (sqrt(step) per side), so singular values approximate the continuous
    /// Schmidt spectrum.
    fn weighted(&self) -> DMatrix<Complex64> {
        let h = Complex64::new(self.step(), 0.0);
        &self.values * h
    }
}

/// Schmidt number from the singular values s_i of the weighted matrix:
/// with lambda_i = s_i^2, K = (sum lambda)^2 / sum lambda^2.
pub fn grid_schmidt(grid: &AmplitudeGrid) -> Result<f64, OracleError> {
    grid.check_resolved()?;
    let m = grid.weighted();
    let svd = nalgebra::SVD::try_new(m, false, false, f64::EPSILON, 1000)
        .ok_or(OracleError::SvdFailed)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for s in svd.singular_values.iter() {
        let lambda = s * s;
        sum += lambda;
        sum_sq += lambda * lambda;
    }
    Ok(sum * sum / sum_sq)
}

/// The same K = N^2/B without any decomposition: N = ||M||_F^2 and
/// B = ||M M^dagger||_F^2 by direct summation. Algebraically identical to
/// the singular-value route; kept separate as a cross-check.
pub fn grid_schmidt_direct(grid: &AmplitudeGrid) -> Result<f64, OracleError> {
    grid.check_resolved()?;
    let m = grid.weighted();
    let n: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let gram = &m * m.adjoint();
    let b: f64 = gram.iter().map(|z| z.norm_sqr()).sum();
    Ok(n * n / b)
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub side: usize,
    pub k: f64,
    /// |K_i - K_{i-1}| / K_i; None on the first row.
    pub rel_change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Last relative change below the tolerance.
    pub converged: bool,
    /// Change magnitudes non-increasing along the ladder; false flags a
    /// ladder that is not settling.
    pub monotone: bool,
}

/// Evaluate the oracle over a geometric ladder of grid sides and report the
/// change per step.
pub fn grid_convergence<F>(
    psi: F,
    lo: f64,
    hi: f64,
    sides: &[usize],
) -> Result<ConvergenceReport, OracleError>
where
    F: Fn(f64, f64) -> Complex64,
{
    if sides.len() < 3 {
        return Err(OracleError::BadLadder(format!(
            "need at least 3 resolutions, got {}",
            sides.len()
        )));
    }
    let r0 = sides[1] as f64 / sides[0] as f64;
    for w in sides.windows(2) {
        let r = w[1] as f64 / w[0] as f64;
        if w[1] <= w[0] || (r / r0 - 1.0).abs() > 0.01 {
            return Err(OracleError::BadLadder(format!(
                "sides {:?} are not a geometric progression",
                sides
            )));
        }
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(sides.len());
    for &side in sides {
        let grid = AmplitudeGrid::sample(lo, hi, side, &psi)?;
        let k = grid_schmidt(&grid)?;
        let rel_change = rows.last().map(|prev| (k - prev.k).abs() / k.abs());
        rows.push(ConvergenceRow {
            side,
            k,
            rel_change,
        });
    }
    let changes: Vec<f64> = rows.iter().filter_map(|r| r.rel_change).collect();
    let (converged, monotone) = ladder_flags(&changes);
    Ok(ConvergenceReport {
        rows,
        converged,
        monotone,
    })
}

/// Converged: last change under tolerance. Monotone: change magnitudes
/// non-increasing (tiny changes at the numerical floor are exempt).
fn ladder_flags(changes: &[f64]) -> (bool, bool) {
    let converged = changes.last().is_some_and(|&c| c < CONVERGENCE_TOL);
    let floor = 1e-12;
    let monotone = changes
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] < floor);
    (converged, monotone)
}
