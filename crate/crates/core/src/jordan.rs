//! Additive and multiplicative Jordan-Chevalley decompositions, and the
//! splitting of a semisimple matrix into real and imaginary parts.

use crate::error::{Error, Result};
use crate::linalg::{c64, check_matrix, spectral_decompose, CMatrix, SpectralData};

/// `x = s + n` with `s` semisimple, `n` nilpotent and `[s, n] = 0`.
#[derive(Debug, Clone)]
pub struct AdditiveJC {
    pub s: CMatrix,
    pub n: CMatrix,
    /// Spectral data of the input; `s` has the same projectors.
    pub spectral: SpectralData,
}

/// `m = ms mu` with `ms` semisimple, `mu` unipotent and `ms mu = mu ms`.
#[derive(Debug, Clone)]
pub struct MultiplicativeJC {
    pub ms: CMatrix,
    pub mu: CMatrix,
    pub spectral: SpectralData,
}

/// `s = a + i b` with `a`, `b` commuting and real semisimple.
#[derive(Debug, Clone)]
pub struct RealImagSplit {
    pub a: CMatrix,
    pub b: CMatrix,
}

pub fn additive_jc(x: &CMatrix, tol: f64) -> Result<AdditiveJC> {
    check_matrix(x, "additive_jc")?;
    let spectral = spectral_decompose(x, tol)?;
    let s = spectral.semisimple_part();
    let n = x - &s;
    Ok(AdditiveJC { s, n, spectral })
}

pub fn multiplicative_jc(m: &CMatrix, tol: f64) -> Result<MultiplicativeJC> {
    check_matrix(m, "multiplicative_jc")?;
    let spectral = spectral_decompose(m, tol)?;
    if spectral.clusters.iter().any(|c| c.eigenvalue.norm() <= tol) {
        return Err(Error::Singular {
            context: "multiplicative_jc",
        });
    }
    let ms = spectral.semisimple_part();
    let ms_inv = spectral.spectral_function(|z| z.inv());
    let mu = ms_inv * m;
    Ok(MultiplicativeJC { ms, mu, spectral })
}

pub fn real_imag_split(s: &CMatrix, tol: f64) -> Result<RealImagSplit> {
    check_matrix(s, "real_imag_split")?;
    let spectral = spectral_decompose(s, tol)?;
    let residual = (s - spectral.semisimple_part()).norm();
    if residual > tol * s.norm().max(1.0) {
        return Err(Error::NotSemisimple { residual });
    }
    Ok(real_imag_from_spectral(&spectral))
}

pub(crate) fn real_imag_from_spectral(spectral: &SpectralData) -> RealImagSplit {
    RealImagSplit {
        a: spectral.spectral_function(|z| c64(z.re, 0.0)),
        b: spectral.spectral_function(|z| c64(z.im, 0.0)),
    }
}
