//! Default tolerances and the derived tolerances used when a matrix comes
//! out of numerical integration rather than from user input.

/// Clustering radius for algebraic decisions on user-supplied matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Local relative error bound of the transport integrator.
pub const DEFAULT_RTOL: f64 = 1e-10;

/// Truncation order of gauge series and semisimplified connections.
pub const DEFAULT_DEGREE: usize = 25;

/// Random trials for witness searches.
pub const DEFAULT_TRIALS: usize = 64;

/// Smallest accepted `sigma_min / sigma_max` for a witness to count as invertible.
pub const INVERTIBLE_RCOND: f64 = 1e-7;

/// Clustering radius for a monodromy matrix obtained by integration at `rtol`.
///
/// A Jordan block of size `k` perturbed by `delta` splits its eigenvalue by
/// roughly `delta^(1/k)`; the block size is at most `n`.
pub fn monodromy_tol(rtol: f64, n: usize) -> f64 {
    let k = n.max(1) as f64;
    (10.0 * rtol).powf(1.0 / k).clamp(DEFAULT_TOL, 1e-2)
}

/// Tolerance for residual checks on quantities assembled from integrated
/// monodromies (validation of computed data, gauge residuals).
pub fn derived_tol(rtol: f64) -> f64 {
    (1e4 * rtol).max(1e-6)
}
