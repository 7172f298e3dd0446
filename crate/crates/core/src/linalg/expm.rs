//! Matrix exponential and logarithm of a unipotent matrix.

use num_complex::Complex64;

use super::{check_matrix, identity, CMatrix};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * Complex64::new(s, 0.0)
}

/// `exp(m)` by scaling and squaring with a degree-13 Pade approximant.
pub fn mat_exp(m: &CMatrix) -> Result<CMatrix> {
    let n = check_matrix(m, "mat_exp")?;
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = one_norm(m);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::NonFinite { context: "mat_exp" });
    }
    let a = scaled(m, 0.5f64.powi(s));
    let b = &PADE13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u = &a
        * (&a6 * u_inner
            + scaled(&a6, b[7])
            + scaled(&a4, b[5])
            + scaled(&a2, b[3])
            + scaled(&id, b[1]));
    let v_inner = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * v_inner + scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]) + scaled(&id, b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or(Error::Singular { context: "mat_exp denominator" })?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !super::is_finite(&r) {
        return Err(Error::NonFinite { context: "mat_exp" });
    }
    Ok(r)
}

/// `log(u)` for unipotent `u`, as the terminating series in `u - I`.
///
/// Refuses with `NotUnipotent` when `(u - I)^n` is not negligible.
pub fn nilpotent_log(u: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = check_matrix(u, "nilpotent_log")?;
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let x = u - identity(n);
    let scale = x.norm().max(1.0);
    let mut power = x.clone();
    let mut out = CMatrix::zeros(n, n);
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += scaled(&power, sign / k as f64);
        power = &power * &x;
    }
    let residual = super::mat_pow(&x, n).norm();
    if residual > tol * scale.powi(n as i32) {
        return Err(Error::NotUnipotent { residual });
    }
    Ok(out)
}

/// `exp(m)` for nilpotent `m` as a terminating series (exact up to rounding).
pub fn nilpotent_exp(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = identity(n);
    let mut term = identity(n);
    for k in 1..=n {
        term = &term * m * Complex64::new(1.0 / k as f64, 0.0);
        out += &term;
    }
    out
}
