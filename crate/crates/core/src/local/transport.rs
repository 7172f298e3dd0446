//! Parallel transport by Taylor-series analytic continuation.
//!
//! Both the local model `z Y' = A(z) Y` and global Fuchsian systems
//! `Y' = sum_i A_i/(z - d_i) Y` are written as `p(z) Y' = Q(z) Y` with
//! polynomial `p` whose zeros are the singular points. At each step the
//! local fundamental solution is expanded at the current point and summed
//! along a chord that stays inside half its disk of convergence.

use num_complex::Complex64;

use super::connection::PolyConnection;
use super::path::PathSpec;
use crate::error::{Error, Result};
use crate::linalg::{check_matrix, identity, poly_from_roots, CMatrix};

const MAX_ORDER: usize = 200;
const MAX_STEPS: usize = 1_000_000;

/// `p(z) Y' = Q(z) Y`.
#[derive(Debug, Clone)]
pub(crate) struct RationalSystem {
    p: Vec<Complex64>,
    q: Vec<CMatrix>,
    singular: Vec<Complex64>,
}

impl RationalSystem {
    pub(crate) fn from_connection(conn: &PolyConnection) -> Self {
        RationalSystem {
            p: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            q: conn.coeffs().to_vec(),
            singular: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// `Y' = sum_i A_i / (z - d_i) Y`, cleared of denominators.
    pub(crate) fn fuchsian(poles: &[Complex64], residues: &[CMatrix]) -> Result<Self> {
        let first = residues
            .first()
            .ok_or_else(|| Error::InvalidInput("system needs at least one pole".into()))?;
        let n = check_matrix(first, "residue")?;
        if poles.len() != residues.len() {
            return Err(Error::InvalidInput(format!(
                "{} poles but {} residues",
                poles.len(),
                residues.len()
            )));
        }
        let m = poles.len();
        let mut q = vec![CMatrix::zeros(n, n); m.max(1)];
        for (i, a) in residues.iter().enumerate() {
            if check_matrix(a, "residue")? != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.nrows(),
                });
            }
            let others: Vec<Complex64> = poles
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != i)
                .map(|(_, &d)| d)
                .collect();
            for (k, c) in poly_from_roots(&others).into_iter().enumerate() {
                q[k] += a * c;
            }
        }
        Ok(RationalSystem {
            p: poly_from_roots(poles),
            q,
            singular: poles.to_vec(),
        })
    }

    fn dim(&self) -> usize {
        self.q[0].nrows()
    }

    fn degree(&self) -> usize {
        (self.p.len().max(self.q.len())) - 1
    }

    fn distance_to_singular(&self, z: Complex64) -> f64 {
        self.singular
            .iter()
            .map(|d| (z - d).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Coefficients of `f(c + s)` in powers of `s` (repeated synthetic division).
fn taylor_shift<T>(coeffs: &[T], c: Complex64) -> Vec<T>
where
    T: Clone + std::ops::AddAssign<T> + std::ops::Mul<Complex64, Output = T>,
{
    let mut a = coeffs.to_vec();
    let d = a.len().saturating_sub(1);
    for k in 0..d {
        for j in (k..d).rev() {
            let next = a[j + 1].clone() * c;
            a[j] += next;
        }
    }
    a
}

/// Fundamental solution from `zc` to `zc + delta`, normalized to `I` at `zc`.
/// `None` when the series does not settle within `MAX_ORDER` terms.
fn taylor_step(p_hat: &[Complex64], q_hat: &[CMatrix], delta: Complex64, rtol: f64, min_order: usize) -> Option<CMatrix> {
    let n = q_hat[0].nrows();
    let p0 = p_hat[0];
    let mut dpow = delta;
    let qd: Vec<CMatrix> = q_hat
        .iter()
        .map(|q| {
            let v = q * dpow;
            dpow *= delta;
            v
        })
        .collect();
    let mut dpow = Complex64::new(1.0, 0.0);
    let pd: Vec<Complex64> = p_hat
        .iter()
        .map(|&p| {
            let v = p * dpow;
            dpow *= delta;
            v
        })
        .collect();

    let mut z: Vec<CMatrix> = vec![identity(n)];
    let mut sum = identity(n);
    for k in 0..MAX_ORDER {
        let mut next = CMatrix::zeros(n, n);
        for (j, qj) in qd.iter().enumerate().take(k + 1) {
            next += qj * &z[k - j];
        }
        for (j, &pj) in pd.iter().enumerate().skip(1).take(k + 1) {
            if k + 1 >= j {
                next -= &z[k + 1 - j] * (pj * (k + 1 - j) as f64);
            }
        }
        next /= p0 * (k + 1) as f64;
        if !next.iter().all(|x| x.is_finite()) {
            return None;
        }
        sum += &next;
        let small = |m: &CMatrix| m.norm() <= 0.1 * rtol * sum.norm();
        let done = k + 1 >= min_order && small(&next) && small(&z[k]);
        z.push(next);
        if done {
            return Some(sum);
        }
    }
    None
}

/// One recorded point of a sampled transport.
#[derive(Debug, Clone)]
pub struct TransportSample {
    /// Path parameter in `[0, 1]`, uniform across pieces.
    pub param: f64,
    pub z: Complex64,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone)]
pub struct Transport {
    pub matrix: CMatrix,
    pub steps: usize,
    pub samples: Vec<TransportSample>,
}

pub(crate) fn transport_system(sys: &RationalSystem, path: &PathSpec, rtol: f64, record: bool) -> Result<Transport> {
    if !(rtol > 0.0) {
        return Err(Error::InvalidInput(format!("rtol must be positive, got {rtol}")));
    }
    let n = sys.dim();
    let segments = path.segments()?;
    let mut total = identity(n);
    let mut steps = 0usize;
    let mut samples = Vec::new();
    let count = segments.len().max(1) as f64;
    let min_order = sys.degree() + 2;

    if record {
        if let Some(s) = segments.first() {
            samples.push(TransportSample {
                param: 0.0,
                z: s.point(0.0),
                matrix: total.clone(),
            });
        }
    }

    for (idx, seg) in segments.iter().enumerate() {
        let speed = seg.speed_bound();
        let breaks = seg.breakpoints();
        let mut t = 0.0;
        while t < 1.0 {
            let zc = seg.point(t);
            let r = sys.distance_to_singular(zc);
            if r < 1e-9 * (1.0 + zc.norm()) {
                return Err(Error::PathThroughSingularity { z: zc });
            }
            let next_break = breaks.iter().copied().find(|&b| b > t + 1e-15).unwrap_or(1.0);
            let p_hat = taylor_shift(&sys.p, zc);
            let q_hat = taylor_shift(&sys.q, zc);
            let b_norm = q_hat[0].norm() / p_hat[0].norm();
            let mut h_max = 0.5 * r;
            if b_norm > 0.0 {
                h_max = h_max.min(2.0 / b_norm);
            }
            let mut dt = if speed > 0.0 { h_max / speed } else { 1.0 };
            loop {
                let t_next = (t + dt).min(next_break);
                let delta = seg.point(t_next) - zc;
                if let Some(phi) = taylor_step(&p_hat, &q_hat, delta, rtol, min_order) {
                    total = phi * &total;
                    t = t_next;
                    break;
                }
                dt *= 0.5;
                if dt * speed < 1e-14 * (1.0 + zc.norm()) {
                    return Err(Error::StepFailure { z: zc, rtol });
                }
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepFailure { z: zc, rtol });
            }
            if !total.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { context: "transport" });
            }
            if record {
                samples.push(TransportSample {
                    param: (idx as f64 + t) / count,
                    z: seg.point(t),
                    matrix: total.clone(),
                });
            }
        }
    }
    Ok(Transport {
        matrix: total,
        steps,
        samples,
    })
}

/// Transport matrix `T` with `s(end) = T s(start)` for solutions of
/// `z ds/dz = A(z) s`.
pub fn transport(conn: &PolyConnection, path: &PathSpec, rtol: f64) -> Result<CMatrix> {
    Ok(transport_system(&RationalSystem::from_connection(conn), path, rtol, false)?.matrix)
}

/// As [`transport`], also returning the partial transports after every step.
pub fn transport_sampled(conn: &PolyConnection, path: &PathSpec, rtol: f64) -> Result<Transport> {
    transport_system(&RationalSystem::from_connection(conn), path, rtol, true)
}
