//! Flat logarithmic connections over GL(n, C): Jordan-Chevalley data, weight
//! gradings, numerical monodromy, the functors between connections and
//! monodromy data, equivalence of data and Fuchsian systems on the sphere.

// `!(x > t)` comparisons are meant to be true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classification;
pub mod error;
pub mod generate;
pub mod global;
pub mod grading;
pub mod jordan;
pub mod linalg;
pub mod local;
pub mod tolerance;

pub use classification::{
    datum_invariants, equivalent, functor_r, validate_datum, DatumInvariants, DatumReport, Equivalence,
    MonodromyDatum,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use global::{
    assemble_global_datum, global_monodromy, loop_generators, residue_at_infinity, FuchsianSystem, GlobalMonodromy,
    GlobalReport, HSearch, LoopGenerators, PoleReport,
};
pub use grading::{chi, grade, membership, resonance_basis, Group, LeviVariant, ResidualCheck, WeightGrading};
pub use jordan::{additive_jc, multiplicative_jc, real_imag_split, AdditiveJC, MultiplicativeJC, RealImagSplit};
pub use linalg::{c64, conjugacy_test, mat_exp, CMatrix, ConjugacyVerdict};
pub use local::{
    functor_l, linearizability, monodromy, poincare_gauge, residue, semisimplify, transport, verify_cocycle,
    GaugeMode, Linearizability, LocalData, PathPiece, PathSpec, PolyConnection,
};
pub use tolerance::{derived_tol, monodromy_tol, DEFAULT_DEGREE, DEFAULT_RTOL, DEFAULT_TOL, DEFAULT_TRIALS};
