//! Seeded inputs for the pipeline benchmarks.

use levelt_core::generate;
use levelt_core::linalg::{c64, random, CMatrix};
use levelt_core::{FuchsianSystem, MonodromyDatum, PolyConnection};

pub const SEED: u64 = 2024;

/// Random cubic connection in dimension `n` with coefficients of norm 0.8.
pub fn cubic_connection(n: usize) -> PolyConnection {
    let mut rng = random::rng(SEED + n as u64);
    let coeffs = (0..4).map(|_| random::complex_matrix(&mut rng, n, 0.8)).collect();
    PolyConnection::new(coeffs).expect("square coefficients")
}

pub fn resonant_connection() -> PolyConnection {
    generate::resonant_family(c64(1.0, 0.0))
}

pub fn random_matrix(n: usize) -> CMatrix {
    random::complex_matrix(&mut random::rng(SEED), n, 3.0)
}

/// A valid datum and a random element of its orbit.
pub fn datum_pair(n: usize) -> (MonodromyDatum, MonodromyDatum) {
    let mut rng = random::rng(SEED);
    let d = generate::valid_datum(&mut rng, n, 2).expect("generator succeeds");
    let g = levelt_core::classification::random_group_element(&mut rng, &d.a, 0.5, 1e-9).expect("group element");
    let e = d.act(&g).expect("invertible element");
    (d, e)
}

pub fn system(m: usize, n: usize) -> FuchsianSystem {
    generate::fuchsian_system(&mut random::rng(SEED), m, n, 0.8).expect("generator succeeds")
}
