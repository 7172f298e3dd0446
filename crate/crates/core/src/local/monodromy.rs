use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use super::connection::{residue, PolyConnection};
use super::path::{PathPiece, PathSpec};
use super::transport::transport;
use crate::error::Result;
use crate::jordan::multiplicative_jc;
use crate::linalg::{
    conjugacy_test, identity, inverse, mat_exp, nilpotent_exp, nilpotent_log, random, CMatrix, ConjugacyVerdict, TWO_PI_I,
};
use crate::tolerance::{derived_tol, monodromy_tol};

/// Transport around the counterclockwise unit circle based at 1.
pub fn monodromy(conn: &PolyConnection, rtol: f64) -> Result<CMatrix> {
    transport(conn, &PathSpec::unit_circle(), rtol)
}

/// `F M(1) F^{-1}` with `F` the transport along [`PathSpec::standard`].
pub fn monodromy_at(conn: &PolyConnection, z0: Complex64, rtol: f64) -> Result<CMatrix> {
    let m = monodromy(conn, rtol)?;
    conjugate_to(conn, &m, z0, rtol)
}

fn conjugate_to(conn: &PolyConnection, x: &CMatrix, z0: Complex64, rtol: f64) -> Result<CMatrix> {
    let f = transport(conn, &PathSpec::standard(z0), rtol)?;
    Ok(&f * x * inverse(&f)?)
}

/// Unipotent part of the monodromy at 1 and its logarithm.
fn unipotent_log(conn: &PolyConnection, rtol: f64) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let m = monodromy(conn, rtol)?;
    let jc = multiplicative_jc(&m, monodromy_tol(rtol, conn.dim()))?;
    let log = nilpotent_log(&jc.mu, derived_tol(rtol))?;
    Ok((m, jc.mu, log))
}

#[derive(Debug, Clone)]
pub struct Semisimplification {
    pub conn_s: PolyConnection,
    pub mu: CMatrix,
    pub monodromy: CMatrix,
    /// Taylor coefficients of `log M_u(z)` through the output degree.
    pub log_mu_coeffs: Vec<CMatrix>,
    /// Relative size of the last coefficient when it exceeds `1e-6`.
    pub truncation_warning: Option<f64>,
}

/// `A(z) - log(M_u(z)) / (2 pi i)` through degree `out_degree`, with the
/// coefficients of `log M_u(z)` recovered by a discrete Fourier transform
/// of samples on `|z| = 1/2`.
pub fn semisimplify(conn: &PolyConnection, out_degree: usize, rtol: f64) -> Result<Semisimplification> {
    let (m, mu, log1) = unipotent_log(conn, rtol)?;
    let k = 2 * (out_degree + 1);
    let r = 0.5;
    let omega = Complex64::from_polar(1.0, TAU / k as f64);

    // Frames at z_j = r omega^j, built by stepping around the circle.
    let mut frame = transport(conn, &PathSpec::standard(Complex64::new(r, 0.0)), rtol)?;
    let mut samples = Vec::with_capacity(k);
    for j in 0..k {
        samples.push(&frame * &log1 * inverse(&frame)?);
        if j + 1 < k {
            let arc = PathSpec::single(PathPiece::Circle {
                center: Complex64::new(0.0, 0.0),
                radius: r,
                start_angle: TAU * j as f64 / k as f64,
                turns: 1.0 / k as f64,
            });
            frame = transport(conn, &arc, rtol)? * frame;
        }
    }

    let n = conn.dim();
    let mut log_mu_coeffs = Vec::with_capacity(out_degree + 1);
    for deg in 0..=out_degree {
        let mut c = CMatrix::zeros(n, n);
        for (j, s) in samples.iter().enumerate() {
            c += s * omega.powi(-((j * deg) as i32));
        }
        log_mu_coeffs.push(c / Complex64::new(k as f64 * r.powi(deg as i32), 0.0));
    }

    let coeffs: Vec<CMatrix> = log_mu_coeffs
        .iter()
        .enumerate()
        .map(|(deg, c)| conn.coeff(deg) - c / TWO_PI_I)
        .collect();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let last = coeffs.last().map_or(0.0, |c| c.norm());
    let truncation_warning = (out_degree > 0 && last > 1e-6 * max).then(|| last / max);
    Ok(Semisimplification {
        conn_s: PolyConnection::new(coeffs)?,
        mu,
        monodromy: m,
        log_mu_coeffs,
        truncation_warning,
    })
}

/// `sigma` and `Phi` of the untwisting cocycle for one connection.
struct Cocycle<'a> {
    conn: &'a PolyConnection,
    log1: CMatrix,
    rtol: f64,
}

impl<'a> Cocycle<'a> {
    fn new(conn: &'a PolyConnection, rtol: f64) -> Result<Self> {
        let (_, _, log1) = unipotent_log(conn, rtol)?;
        Ok(Cocycle { conn, log1, rtol })
    }

    /// `exp(-lambda/(2 pi i) log M_u(e^lambda z))`.
    fn sigma(&self, lambda: Complex64, z: Complex64) -> Result<CMatrix> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Ok(identity(self.conn.dim()));
        }
        let log = conjugate_to(self.conn, &self.log1, lambda.exp() * z, self.rtol)?;
        Ok(nilpotent_exp(&(log * (-lambda / TWO_PI_I))))
    }

    fn phi(&self, lambda: Complex64, w: Complex64) -> Result<CMatrix> {
        transport(self.conn, &PathSpec::single(PathPiece::Arrow { lambda, z: w }), self.rtol)
    }

    fn residual(&self, lambda: Complex64, mu: Complex64, z: Complex64) -> Result<f64> {
        let w = lambda.exp() * z;
        let p = self.phi(mu, w)?;
        let lhs = self.sigma(mu, w)? * &p * self.sigma(lambda, z)?;
        let rhs = self.sigma(mu + lambda, z)? * &p;
        Ok((lhs - &rhs).norm() / rhs.norm().max(1.0))
    }
}

/// Largest relative residual of the cocycle identity
/// `sigma(mu, e^l z) Phi(mu, e^l z) sigma(l, z) = sigma(mu + l, z) Phi(mu, e^l z)`
/// over random `|l|, |mu| <= 1` and `0.3 <= |z| <= 1`.
pub fn verify_cocycle(conn: &PolyConnection, sample_count: usize, seed: u64, rtol: f64) -> Result<f64> {
    let cocycle = Cocycle::new(conn, rtol)?;
    let mut rng = random::rng(seed);
    let disk = |rng: &mut random::SeededRng| loop {
        let c = random::complex_unit(rng);
        if c.norm() <= 1.0 {
            return c;
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..sample_count {
        let lambda = disk(&mut rng);
        let mu = disk(&mut rng);
        let z = Complex64::from_polar(rng.gen_range(0.3..=1.0), rng.gen_range(-PI..PI));
        worst = worst.max(cocycle.residual(lambda, mu, z)?);
    }
    Ok(worst)
}

/// Cocycle residual at one explicit groupoid triple.
pub fn cocycle_residual_at(conn: &PolyConnection, lambda: Complex64, mu: Complex64, z: Complex64, rtol: f64) -> Result<f64> {
    Cocycle::new(conn, rtol)?.residual(lambda, mu, z)
}

#[derive(Debug, Clone)]
pub struct Linearizability {
    pub linearizable: bool,
    pub verdict: ConjugacyVerdict,
    pub monodromy: CMatrix,
}

/// Whether the monodromy is conjugate to `exp(2 pi i A_0)`.
pub fn linearizability(conn: &PolyConnection, rtol: f64) -> Result<Linearizability> {
    let m = monodromy(conn, rtol)?;
    let target = mat_exp(&(residue(conn) * TWO_PI_I))?;
    let verdict = conjugacy_test(&m, &target, monodromy_tol(rtol, conn.dim()))?;
    Ok(Linearizability {
        linearizable: verdict.is_equal_class(),
        verdict,
        monodromy: m,
    })
}
