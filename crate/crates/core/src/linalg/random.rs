//! Seeded random matrices. Every randomized routine in the crate draws from
//! a `ChaCha8Rng` built from an explicit seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{identity, CMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with real and imaginary parts uniform in `[-1, 1)`.
pub fn complex_unit<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Entries uniform in the unit square, rescaled to Frobenius norm `norm`.
pub fn complex_matrix<R: Rng>(rng: &mut R, n: usize, norm: f64) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| complex_unit(rng));
    let f = m.norm();
    if f == 0.0 {
        m
    } else {
        m * Complex64::new(norm / f, 0.0)
    }
}

/// Real matrix with entries uniform in `[-1, 1)`.
pub fn real_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
}

/// `I + scale * X` with `X` random: invertible with condition number close
/// to one for small `scale`.
pub fn near_identity<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    identity(n) + complex_matrix(rng, n, scale)
}

/// Random strictly upper-triangular matrix with entries in the unit square.
pub fn strictly_upper<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if j > i {
            complex_unit(rng)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
