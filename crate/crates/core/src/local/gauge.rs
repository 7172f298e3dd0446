use num_complex::Complex64;

use super::connection::{poly_eval, poly_euler_derivative, residue, PolyConnection};
use super::monodromy::{monodromy, semisimplify, Semisimplification};
use crate::classification::MonodromyDatum;
use crate::error::{Error, Result};
use crate::linalg::{identity, unvec, vec_of, CMatrix};
use crate::tolerance::derived_tol;

const RESIDUAL_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeMode {
    /// Gauge the connection itself to its constant residue connection.
    LinearizeToResidue,
    /// Semisimplify first, then linearize the semisimplified connection.
    SemisimpleStrict { rtol: f64 },
}

/// Kernel dimension met at a resonant order of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonantChoice {
    pub order: usize,
    pub kernel_dim: usize,
}

/// `g(z) = sum_k g_k z^k` with `z g' = A(z) g - g A_0`.
#[derive(Debug, Clone)]
pub struct GaugeSeries {
    pub coeffs: Vec<CMatrix>,
    pub order: usize,
    pub resonant_choices: Vec<ResonantChoice>,
    /// Largest defining residual over the check circle `|z| = 1/2`.
    pub residual: f64,
}

impl GaugeSeries {
    pub fn eval(&self, z: Complex64) -> CMatrix {
        poly_eval(&self.coeffs, z)
    }
}

/// Solves `(k - ad A_0) g_k = sum_{j=1}^{min(k,d)} A_j g_{k-j}` for
/// `k = 1..=order` with `g_0 = I`, using minimal-norm solutions at resonant
/// orders.
pub fn poincare_gauge(conn: &PolyConnection, order: usize, mode: GaugeMode, tol: f64) -> Result<GaugeSeries> {
    Ok(poincare_gauge_detailed(conn, order, mode, tol)?.0)
}

fn poincare_gauge_detailed(
    conn: &PolyConnection,
    order: usize,
    mode: GaugeMode,
    tol: f64,
) -> Result<(GaugeSeries, Option<Semisimplification>)> {
    let (target, tol, ss) = match mode {
        GaugeMode::LinearizeToResidue => (conn.clone(), tol, None),
        GaugeMode::SemisimpleStrict { rtol } => {
            let ss = semisimplify(conn, order, rtol)?;
            (ss.conn_s.clone(), tol.max(derived_tol(rtol)), Some(ss))
        }
    };
    let g = recursion(&target, order, tol)?;
    Ok((g, ss))
}

fn recursion(conn: &PolyConnection, order: usize, tol: f64) -> Result<GaugeSeries> {
    let n = conn.dim();
    let a0 = residue(conn);
    let id = identity(n);
    // vec([A_0, X]) = (I (x) A_0 - A_0^T (x) I) vec(X)
    let ad = id.kronecker(&a0) - a0.transpose().kronecker(&id);
    let big_id = identity(n * n);
    let mut coeffs = vec![id.clone()];
    let mut resonant_choices = Vec::new();

    for k in 1..=order {
        let mut rhs = CMatrix::zeros(n, n);
        for j in 1..=k.min(conn.degree()) {
            rhs += conn.coeff(j) * &coeffs[k - j];
        }
        let b = vec_of(&rhs);
        let l = &big_id * Complex64::new(k as f64, 0.0) - &ad;
        let svd = crate::linalg::svd(&l);
        let threshold = tol * svd.max();
        let kernel_dim = svd.s.iter().filter(|&&s| s <= threshold).count();
        let x = svd.solve(&b, threshold);
        if kernel_dim > 0 {
            let residual = (&l * &x - &b).norm();
            if residual > tol * b.norm().max(1.0) {
                return Err(Error::ResonantObstruction { order: k, residual });
            }
            resonant_choices.push(ResonantChoice { order: k, kernel_dim });
        }
        coeffs.push(unvec(&x, n));
    }

    let mut residual: f64 = 0.0;
    for j in 0..RESIDUAL_POINTS {
        let z = Complex64::from_polar(0.5, std::f64::consts::TAU * j as f64 / RESIDUAL_POINTS as f64);
        let g = poly_eval(&coeffs, z);
        let zdg = poly_euler_derivative(&coeffs, z);
        let ag = conn.eval(z) * &g;
        let r = (zdg - &ag + &g * &a0).norm() / ag.norm().max(1.0);
        residual = residual.max(r);
    }
    if residual > tol {
        return Err(Error::TruncationFailure { order, residual });
    }
    Ok(GaugeSeries {
        coeffs,
        order,
        resonant_choices,
        residual,
    })
}

/// Full output of the functor to monodromy data.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub datum: MonodromyDatum,
    pub gauge: GaugeSeries,
    pub semisimplification: Semisimplification,
}

/// `(M, h, A)` with `M` the monodromy, `A` the residue and `h = g(1)` for the
/// strict linearization `g` of the semisimplified connection.
pub fn functor_l(conn: &PolyConnection, rtol: f64, degree: usize) -> Result<LocalData> {
    let (gauge, ss) = poincare_gauge_detailed(conn, degree, GaugeMode::SemisimpleStrict { rtol }, derived_tol(rtol))?;
    let semisimplification = ss.expect("strict mode semisimplifies");
    let h = gauge.eval(Complex64::new(1.0, 0.0));
    let m = monodromy(conn, rtol)?;
    Ok(LocalData {
        datum: MonodromyDatum::new(m, h, residue(conn))?,
        gauge,
        semisimplification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, elementary, mat_exp, TWO_PI_I};

    #[test]
    fn constant_connection_has_identity_gauge() {
        let conn = PolyConnection::constant(diag_real(&[1.0, 0.0])).unwrap();
        let g = poincare_gauge(&conn, 10, GaugeMode::LinearizeToResidue, 1e-9).unwrap();
        for (k, c) in g.coeffs.iter().enumerate() {
            let expected = if k == 0 { identity(2) } else { CMatrix::zeros(2, 2) };
            assert!((c - expected).norm() < 1e-15);
        }
        assert_eq!(g.resonant_choices, vec![ResonantChoice { order: 1, kernel_dim: 1 }]);
    }

    #[test]
    fn non_resonant_gauge_exists() {
        let conn = PolyConnection::new(vec![diag_real(&[1.0 / 3.0, 0.0]), elementary(2, 0, 1)]).unwrap();
        let g = poincare_gauge(&conn, 20, GaugeMode::LinearizeToResidue, 1e-9).unwrap();
        assert!(g.residual < 1e-8);
        assert!(g.resonant_choices.is_empty());
    }

    #[test]
    fn resonant_obstruction_at_first_order() {
        let conn = PolyConnection::new(vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1)]).unwrap();
        match poincare_gauge(&conn, 10, GaugeMode::LinearizeToResidue, 1e-9) {
            Err(Error::ResonantObstruction { order, .. }) => assert_eq!(order, 1),
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn strict_mode_on_resonant_example() {
        let conn = PolyConnection::new(vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1)]).unwrap();
        let g = poincare_gauge(&conn, 25, GaugeMode::SemisimpleStrict { rtol: 1e-10 }, 1e-9).unwrap();
        assert!(g.residual < 1e-6);
    }

    #[test]
    fn functor_l_of_constant_connection() {
        let a0 = CMatrix::from_row_slice(2, 2, &[c64(0.25, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(-0.5, 0.1)]);
        let conn = PolyConnection::constant(a0.clone()).unwrap();
        let d = functor_l(&conn, 1e-10, 25).unwrap().datum;
        assert!((&d.m - mat_exp(&(&a0 * TWO_PI_I)).unwrap()).norm() < 1e-9);
        assert!((&d.h - identity(2)).norm() < 1e-7);
        assert_eq!(d.a, a0);
    }
}
