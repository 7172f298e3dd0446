use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_matrix, CMatrix};

/// The connection `z ds/dz = A(z) s` with `A(z) = sum_k A_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyConnection {
    coeffs: Vec<CMatrix>,
}

impl PolyConnection {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput("connection needs at least one coefficient".into()))?;
        let n = check_matrix(first, "connection coefficient")?;
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for c in &coeffs {
            if check_matrix(c, "connection coefficient")? != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.nrows(),
                });
            }
        }
        Ok(PolyConnection { coeffs })
    }

    pub fn constant(a0: CMatrix) -> Result<Self> {
        Self::new(vec![a0])
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    /// `A_k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> CMatrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim(), self.dim()))
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        poly_eval(&self.coeffs, z)
    }

    /// Drops trailing coefficients with norm at most `threshold`, keeping `A_0`.
    pub fn trimmed(&self, threshold: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= threshold) {
            coeffs.pop();
        }
        PolyConnection { coeffs }
    }
}

/// `A_0 = A(0)`.
pub fn residue(conn: &PolyConnection) -> CMatrix {
    conn.coeffs[0].clone()
}

/// Horner evaluation of a matrix polynomial.
pub fn poly_eval(coeffs: &[CMatrix], z: Complex64) -> CMatrix {
    let n = coeffs.first().map_or(0, |c| c.nrows());
    coeffs
        .iter()
        .rev()
        .fold(CMatrix::zeros(n, n), |acc, c| acc * z + c)
}

/// `z d/dz` of a matrix polynomial, evaluated at `z`.
pub fn poly_euler_derivative(coeffs: &[CMatrix], z: Complex64) -> CMatrix {
    let n = coeffs.first().map_or(0, |c| c.nrows());
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(CMatrix::zeros(n, n), |acc, (k, c)| acc * z + c * Complex64::new(k as f64, 0.0))
}

pub fn poly_mul(a: &[CMatrix], b: &[CMatrix]) -> Vec<CMatrix> {
    let n = a[0].nrows();
    let mut out = vec![CMatrix::zeros(n, n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Gauge action `g A g^{-1} + z g' g^{-1}` for a polynomial gauge whose
/// inverse is also polynomial.
pub fn gauge_transform(conn: &PolyConnection, g: &[CMatrix], g_inv: &[CMatrix]) -> Result<PolyConnection> {
    let n = conn.dim();
    if g.is_empty() || g_inv.is_empty() {
        return Err(Error::InvalidInput("empty gauge series".into()));
    }
    let zg: Vec<CMatrix> = g
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::new(k as f64, 0.0))
        .collect();
    let mut out = poly_mul(&poly_mul(g, conn.coeffs()), g_inv);
    for (k, c) in poly_mul(&zg, g_inv).into_iter().enumerate() {
        if k >= out.len() {
            out.push(CMatrix::zeros(n, n));
        }
        out[k] += c;
    }
    PolyConnection::new(out).map(|c| c.trimmed(1e-14 * c.coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, elementary, identity};

    #[test]
    fn residue_is_constant_term() {
        let conn = PolyConnection::new(vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1)]).unwrap();
        assert_eq!(residue(&conn), diag_real(&[1.0, 0.0]));
        let c = PolyConnection::constant(diag_real(&[0.5, 2.0])).unwrap();
        assert_eq!(residue(&c), diag_real(&[0.5, 2.0]));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(PolyConnection::new(vec![identity(2), identity(3)]).is_err());
        assert!(PolyConnection::new(vec![]).is_err());
    }

    #[test]
    fn gauge_by_constant_is_conjugation() {
        let conn = PolyConnection::new(vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1)]).unwrap();
        let g = identity(2) + elementary(2, 1, 0);
        let gi = identity(2) - elementary(2, 1, 0);
        let t = gauge_transform(&conn, std::slice::from_ref(&g), std::slice::from_ref(&gi)).unwrap();
        for k in 0..2 {
            assert!((t.coeff(k) - &g * conn.coeff(k) * &gi).norm() < 1e-14);
        }
    }

    #[test]
    fn gauge_of_trivial_connection() {
        // g = I + z E12 has inverse I - z E12; z g' g^{-1} = z E12.
        let conn = PolyConnection::constant(CMatrix::zeros(2, 2)).unwrap();
        let t = gauge_transform(
            &conn,
            &[identity(2), elementary(2, 0, 1)],
            &[identity(2), -elementary(2, 0, 1)],
        )
        .unwrap();
        assert_eq!(t.degree(), 1);
        assert!((t.coeff(1) - elementary(2, 0, 1)).norm() < 1e-15);
        assert!((t.eval(c64(0.5, 0.0)) - elementary(2, 0, 1) * c64(0.5, 0.0)).norm() < 1e-15);
    }
}
