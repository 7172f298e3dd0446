//! Seeded constructions with known answers: matrices with prescribed Jordan
//! structure, valid monodromy data, gauge transforms of constant connections
//! and random Fuchsian systems.

use num_complex::Complex64;
use rand::Rng;

use crate::classification::MonodromyDatum;
use crate::error::Result;
use crate::global::FuchsianSystem;
use crate::linalg::{diag_real, elementary, identity, inverse, mat_exp, random, CMatrix, TWO_PI_I};
use crate::local::{gauge_transform, PolyConnection};

/// `X = P J P^{-1}` together with the parts `S = P D P^{-1}` and
/// `N = P (J - D) P^{-1}` read off the construction.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub x: CMatrix,
    pub s: CMatrix,
    pub n: CMatrix,
}

/// Jordan blocks of the given sizes, block `k` with eigenvalue
/// `eigenvalues[k]`, conjugated by `I + scale * R` for random `R`.
pub fn jordan_matrix<R: Rng>(rng: &mut R, eigenvalues: &[Complex64], blocks: &[usize], scale: f64) -> Result<Constructed> {
    let n: usize = blocks.iter().sum();
    let mut d = CMatrix::zeros(n, n);
    let mut j = CMatrix::zeros(n, n);
    let mut start = 0;
    for (&lambda, &size) in eigenvalues.iter().zip(blocks) {
        for i in start..start + size {
            d[(i, i)] = lambda;
            if i + 1 < start + size {
                j[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        start += size;
    }
    let p = random::near_identity(rng, n, scale);
    let p_inv = inverse(&p)?;
    let s = &p * &d * &p_inv;
    let nil = &p * &j * &p_inv;
    Ok(Constructed { x: &s + &nil, s, n: nil })
}

/// `diag(1, 0) + c z E12`.
pub fn resonant_family(c: Complex64) -> PolyConnection {
    PolyConnection::new(vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1) * c]).expect("2x2 coefficients")
}

/// Gauge transform of the constant connection `a0` by `g = I + z X` with
/// `X` nilpotent, so that `g^{-1}` is polynomial. Returns the connection and
/// `g(1)`.
pub fn gauge_of_constant<R: Rng>(rng: &mut R, a0: &CMatrix) -> Result<(PolyConnection, CMatrix)> {
    let n = a0.nrows();
    let p = random::near_identity(rng, n, 0.5);
    let x = &p * random::strictly_upper(rng, n) * inverse(&p)?;
    let g = vec![identity(n), x.clone()];
    let mut g_inv = vec![identity(n)];
    let mut power = identity(n);
    for k in 1..n {
        power = &power * &x;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        g_inv.push(&power * Complex64::new(sign, 0.0));
    }
    let conn = gauge_transform(&PolyConnection::constant(a0.clone())?, &g, &g_inv)?;
    Ok((conn, identity(n) + x))
}

/// A valid datum in dimension `n` whose residue has integer eigenvalue gaps
/// up to `max_weight`, with random positive-weight nilpotent parts and a
/// random representative `h`. Semisimple residues are also conjugated by a
/// random matrix.
pub fn valid_datum<R: Rng>(rng: &mut R, n: usize, max_weight: i64) -> Result<MonodromyDatum> {
    let bases = [Complex64::new(0.2, 0.1), Complex64::new(-0.35, 0.0), Complex64::new(0.05, -0.3)];
    let base_count = rng.gen_range(1..=bases.len().min(n));
    let mut s: Vec<Complex64> = (0..n)
        .map(|_| bases[rng.gen_range(0..base_count)] + rng.gen_range(0..=max_weight) as f64)
        .collect();
    s.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    // Entries (i, j), i < j, with s_i - s_j a nonnegative integer: strictly
    // upper triangular, hence nilpotent, and of integer weight.
    let mut n_all = CMatrix::zeros(n, n);
    let mut n_zero = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let gap = s[i] - s[j];
            if gap.im.abs() < 1e-12 && (gap.re - gap.re.round()).abs() < 1e-12 && gap.re > -0.5 && rng.gen_bool(0.7) {
                let v = random::complex_unit(rng);
                n_all[(i, j)] = v;
                if gap.re.round() == 0.0 {
                    n_zero[(i, j)] = v;
                }
            }
        }
    }
    let s_mat = crate::linalg::diag(&s);
    let a = &s_mat + &n_zero;
    let m_prime = mat_exp(&(&s_mat * TWO_PI_I))? * mat_exp(&(&n_all * TWO_PI_I))?;

    // A defective residue stays triangular: conjugating it would split its
    // eigenvalues by about eps^(1/k), far beyond the default clustering tol.
    let p = if n_zero.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        random::near_identity(rng, n, 0.4)
    } else {
        identity(n)
    };
    let p_inv = inverse(&p)?;
    let h = random::near_identity(rng, n, 0.4);
    let a = &p * a * &p_inv;
    let m = &h * (&p * m_prime * &p_inv) * inverse(&h)?;
    MonodromyDatum::new(m, h, a)
}

/// `m` poles near the vertices of a regular polygon of radius 1 and
/// residues of norm `norm`.
pub fn fuchsian_system<R: Rng>(rng: &mut R, m: usize, n: usize, norm: f64) -> Result<FuchsianSystem> {
    let poles: Vec<Complex64> = (0..m)
        .map(|k| {
            Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64) + random::complex_unit(rng) * 0.2
        })
        .collect();
    let residues = (0..m).map(|_| random::complex_matrix(rng, n, norm)).collect();
    FuchsianSystem::new(poles, residues, None)
}
