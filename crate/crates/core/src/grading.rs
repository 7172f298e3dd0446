//! The ad(S)-weight decomposition of gl(n) and the structures built on it:
//! the resonance algebra u_N(S), parabolic subalgebras, the Levi projection
//! chi, group membership tests and the intertwiner algebra V(A).
//!
//! All computations happen in the eigenbasis delivered by
//! [`spectral_decompose`]; every matrix handed back is in the original
//! coordinates.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_matrix, column_stack, commutator, identity, inverse, is_invertible, mat_exp, null_space,
    singular_values, spectral::cluster_labels, spectral_decompose, vec_of, CMatrix,
    SpectralData, TWO_PI_I,
};

/// One ad(S)-eigenvalue together with the cluster pairs `(i, j)` with
/// `lambda_i - lambda_j = value`.
#[derive(Debug, Clone)]
pub struct Weight {
    pub value: Complex64,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct WeightGrading {
    pub s: CMatrix,
    pub eigenvalues: Vec<Complex64>,
    pub weights: Vec<Weight>,
    pub tol: f64,
    basis: CMatrix,
    dual: CMatrix,
    ranges: Vec<Range<usize>>,
}

/// Position of a weight relative to the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegerClass {
    Integer(i64),
    NonInteger,
}

/// Nearest-integer test with the refusal band `(tol, 2 tol]`.
pub fn classify_integer(w: Complex64, tol: f64) -> Result<IntegerClass> {
    let k = w.re.round();
    let d = (w - Complex64::new(k, 0.0)).norm();
    if d <= tol {
        Ok(IntegerClass::Integer(k as i64))
    } else if d <= 2.0 * tol {
        Err(Error::ClusterAmbiguity {
            a: w,
            b: Complex64::new(k, 0.0),
            distance: d,
            tol,
        })
    } else {
        Ok(IntegerClass::NonInteger)
    }
}

/// Sign of the real part with the refusal band `(tol, 2 tol]` around zero.
fn real_sign(w: Complex64, tol: f64) -> Result<i8> {
    let r = w.re;
    if r.abs() <= tol {
        Ok(0)
    } else if r.abs() <= 2.0 * tol {
        Err(Error::ClusterAmbiguity {
            a: w,
            b: Complex64::new(0.0, w.im),
            distance: r.abs(),
            tol,
        })
    } else {
        Ok(if r > 0.0 { 1 } else { -1 })
    }
}

/// Grading of gl(n) by ad(S) for semisimple `s`.
pub fn grade(s: &CMatrix, tol: f64) -> Result<WeightGrading> {
    check_matrix(s, "grade")?;
    let spectral = spectral_decompose(s, tol)?;
    let residual = (s - spectral.semisimple_part()).norm();
    if residual > tol * s.norm().max(1.0) {
        return Err(Error::NotSemisimple { residual });
    }
    WeightGrading::from_spectral(&spectral)
}

impl WeightGrading {
    /// Grading by the semisimple part of the matrix behind `spectral`.
    pub fn from_spectral(spectral: &SpectralData) -> Result<Self> {
        let eigenvalues = spectral.eigenvalues();
        let k = eigenvalues.len();
        let mut diffs = Vec::with_capacity(k * k);
        let mut pairs = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                diffs.push(eigenvalues[i] - eigenvalues[j]);
                pairs.push((i, j));
            }
        }
        let (labels, means) = cluster_labels(&diffs, spectral.tol)?;
        let mut weights: Vec<Weight> = means
            .into_iter()
            .map(|value| Weight {
                value,
                pairs: Vec::new(),
            })
            .collect();
        for (p, l) in pairs.into_iter().zip(labels) {
            weights[l].pairs.push(p);
        }
        // The zero weight is exactly zero.
        for w in &mut weights {
            if w.pairs.iter().any(|(i, j)| i == j) {
                w.value = Complex64::new(0.0, 0.0);
            }
        }
        Ok(WeightGrading {
            s: spectral.semisimple_part(),
            eigenvalues,
            weights,
            tol: spectral.tol,
            basis: spectral.basis().clone(),
            dual: spectral.dual().clone(),
            ranges: spectral.clusters.iter().map(|c| c.range()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn weight_values(&self) -> Vec<Complex64> {
        self.weights.iter().map(|w| w.value).collect()
    }

    fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.dual * x * &self.basis
    }

    fn to_standard_basis(&self, x: &CMatrix) -> CMatrix {
        &self.basis * x * &self.dual
    }

    /// Sum of the components whose weight index satisfies `keep`.
    fn masked(&self, x: &CMatrix, keep: impl Fn(usize) -> bool) -> CMatrix {
        let xt = self.to_eigenbasis(x);
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (k, w) in self.weights.iter().enumerate() {
            if !keep(k) {
                continue;
            }
            for &(i, j) in &w.pairs {
                let (ri, rj) = (&self.ranges[i], &self.ranges[j]);
                let block = xt.view((ri.start, rj.start), (ri.len(), rj.len()));
                out.view_mut((ri.start, rj.start), (ri.len(), rj.len())).copy_from(&block);
            }
        }
        self.to_standard_basis(&out)
    }

    /// Basis columns spanning the `i`-th eigenspace of `S`.
    pub(crate) fn cluster_basis(&self, i: usize) -> CMatrix {
        let r = &self.ranges[i];
        self.basis.columns(r.start, r.len()).into_owned()
    }

    /// Rows of the dual basis matching [`Self::cluster_basis`].
    pub(crate) fn cluster_dual(&self, i: usize) -> CMatrix {
        let r = &self.ranges[i];
        self.dual.rows(r.start, r.len()).into_owned()
    }

    fn index_of(&self, w: Complex64) -> Option<usize> {
        self.weights.iter().position(|x| (x.value - w).norm() <= self.tol)
    }

    /// `sum_{lambda_i - lambda_j = w} P_i X P_j`; zero if `w` is not a weight.
    pub fn weight_component(&self, x: &CMatrix, w: Complex64) -> CMatrix {
        match self.index_of(w) {
            Some(k) => self.masked(x, |i| i == k),
            None => CMatrix::zeros(self.dim(), self.dim()),
        }
    }

    /// All components, in the order of [`Self::weights`].
    pub fn components(&self, x: &CMatrix) -> Vec<(Complex64, CMatrix)> {
        (0..self.weights.len())
            .map(|k| (self.weights[k].value, self.masked(x, |i| i == k)))
            .collect()
    }

    /// Sum of the components whose weight satisfies `pred`.
    pub fn select(&self, x: &CMatrix, pred: impl Fn(Complex64) -> bool) -> CMatrix {
        self.masked(x, |k| pred(self.weights[k].value))
    }

    fn integer_classes(&self) -> Result<Vec<IntegerClass>> {
        self.weights
            .iter()
            .map(|w| classify_integer(w.value, self.tol))
            .collect()
    }

    fn sign_classes(&self) -> Result<Vec<i8>> {
        self.weights.iter().map(|w| real_sign(w.value, self.tol)).collect()
    }

    /// Components at integer weights `k`, sorted by `k`, and the sum of all
    /// non-integer components.
    pub fn integer_split(&self, x: &CMatrix) -> Result<(Vec<(i64, CMatrix)>, CMatrix)> {
        let classes = self.integer_classes()?;
        let mut ints: Vec<(i64, usize)> = classes
            .iter()
            .enumerate()
            .filter_map(|(k, c)| match c {
                IntegerClass::Integer(v) => Some((*v, k)),
                IntegerClass::NonInteger => None,
            })
            .collect();
        ints.sort();
        let parts = ints
            .iter()
            .map(|&(v, k)| (v, self.masked(x, |i| i == k)))
            .collect();
        let rest = self.masked(x, |k| classes[k] == IntegerClass::NonInteger);
        Ok((parts, rest))
    }

    /// Elementary root vectors `v_a w_b^T` for all pairs in weights
    /// satisfying `keep`, in original coordinates.
    fn root_vectors(&self, keep: impl Fn(usize) -> bool) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for (k, w) in self.weights.iter().enumerate() {
            if !keep(k) {
                continue;
            }
            for &(i, j) in &w.pairs {
                for a in self.ranges[i].clone() {
                    for b in self.ranges[j].clone() {
                        out.push(self.basis.column(a) * self.dual.row(b));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubalgebraLabel {
    Resonance,
    Parabolic,
    UnipotentRadical,
    Centralizer,
    Intertwiner,
}

#[derive(Debug, Clone)]
pub struct SubalgebraBasis {
    pub label: SubalgebraLabel,
    pub basis: Vec<CMatrix>,
}

impl SubalgebraBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Distance from `x` to the span, relative to `max(1, ||x||)`.
    pub fn projection_residual(&self, x: &CMatrix) -> f64 {
        let v = vec_of(x);
        if self.basis.is_empty() {
            return v.norm() / v.norm().max(1.0);
        }
        let b = column_stack(&self.basis);
        let svd = crate::linalg::svd(&b);
        let coeffs = svd.solve(&v, 1e-12 * svd.max());
        let r = &v - column_stack(&self.basis) * coeffs;
        r.norm() / v.norm().max(1.0)
    }

    /// Largest projection residual of `op(b_i, b_j)` over all basis pairs.
    pub fn closure_residual(&self, op: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.projection_residual(&op(a, b)));
            }
        }
        worst
    }

    /// `sum c_k b_k`.
    pub fn combine(&self, coeffs: &[Complex64]) -> CMatrix {
        let n = self.basis.first().map_or(0, |b| b.nrows());
        self.basis
            .iter()
            .zip(coeffs)
            .fold(CMatrix::zeros(n, n), |acc, (b, &c)| acc + b * c)
    }

    /// Numerical rank of the basis, for independence checks.
    pub fn rank(&self, threshold: f64) -> usize {
        if self.basis.is_empty() {
            return 0;
        }
        singular_values(&column_stack(&self.basis))
            .into_iter()
            .filter(|&s| s > threshold)
            .count()
    }
}

/// Span of the components at positive integer weights, and whether it is
/// nonzero.
pub fn resonance_basis(s: &CMatrix, tol: f64) -> Result<(SubalgebraBasis, bool)> {
    resonance_from_grading(&grade(s, tol)?)
}

pub fn resonance_from_grading(g: &WeightGrading) -> Result<(SubalgebraBasis, bool)> {
    let classes = g.integer_classes()?;
    let basis = g.root_vectors(|k| matches!(classes[k], IntegerClass::Integer(v) if v >= 1));
    let resonant = !basis.is_empty();
    Ok((
        SubalgebraBasis {
            label: SubalgebraLabel::Resonance,
            basis,
        },
        resonant,
    ))
}

fn real_semisimple_grading(a: &CMatrix, tol: f64) -> Result<WeightGrading> {
    check_matrix(a, "parabolic_data")?;
    let spectral = spectral_decompose(a, tol)?;
    let residual = (a - spectral.semisimple_part()).norm();
    if residual > tol * a.norm().max(1.0) {
        return Err(Error::NotSemisimple { residual });
    }
    let imag = spectral
        .clusters
        .iter()
        .map(|c| c.eigenvalue.im.abs())
        .fold(0.0, f64::max);
    if imag > tol {
        return Err(Error::NotRealSemisimple { residual: imag });
    }
    WeightGrading::from_spectral(&spectral)
}

/// Lie P(a) (weights with nonnegative real part) and Lie U(a) (positive).
pub fn parabolic_data(a: &CMatrix, tol: f64) -> Result<(SubalgebraBasis, SubalgebraBasis)> {
    let g = real_semisimple_grading(a, tol)?;
    let signs = g.sign_classes()?;
    Ok((
        SubalgebraBasis {
            label: SubalgebraLabel::Parabolic,
            basis: g.root_vectors(|k| signs[k] >= 0),
        },
        SubalgebraBasis {
            label: SubalgebraLabel::UnipotentRadical,
            basis: g.root_vectors(|k| signs[k] > 0),
        },
    ))
}

/// Which grading and which weights are allowed when applying chi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeviVariant {
    /// Grading by semisimple `S`; allowed weights are the nonnegative
    /// integers (the group `C(S) ⋉ U_N(S)`).
    Resonance,
    /// Grading by real semisimple `a`; allowed weights have nonnegative real
    /// part (the parabolic `P(a)`).
    Parabolic,
}

fn forbidden_mask(g: &WeightGrading, variant: LeviVariant) -> Result<Vec<bool>> {
    match variant {
        LeviVariant::Resonance => Ok(g
            .integer_classes()?
            .into_iter()
            .map(|c| !matches!(c, IntegerClass::Integer(v) if v >= 0))
            .collect()),
        LeviVariant::Parabolic => Ok(g.sign_classes()?.into_iter().map(|s| s < 0).collect()),
    }
}

fn grading_for(s_or_a: &CMatrix, variant: LeviVariant, tol: f64) -> Result<WeightGrading> {
    match variant {
        LeviVariant::Resonance => grade(s_or_a, tol),
        LeviVariant::Parabolic => real_semisimple_grading(s_or_a, tol),
    }
}

/// Levi projection: the weight-zero component of `m`, after checking that
/// `m` has no forbidden components.
pub fn chi(s_or_a: &CMatrix, m: &CMatrix, variant: LeviVariant, tol: f64) -> Result<CMatrix> {
    let g = grading_for(s_or_a, variant, tol)?;
    chi_graded(&g, m, variant)
}

pub fn chi_graded(g: &WeightGrading, m: &CMatrix, variant: LeviVariant) -> Result<CMatrix> {
    check_matrix(m, "chi")?;
    let forbidden = forbidden_mask(g, variant)?;
    let residual = g.masked(m, |k| forbidden[k]).norm() / m.norm().max(1.0);
    if residual > g.tol {
        return Err(Error::NotInParabolic { residual });
    }
    Ok(g.weight_component(m, Complex64::new(0.0, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Centralizer of `S`.
    CentralizerS,
    /// Centralizer of `exp(2 pi i S)`.
    CentralizerExp,
    Parabolic,
    UnipotentRadical,
    /// `C(S) ⋉ U_N(S)`.
    ResonanceGroup,
}

/// Outcome of a residual comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualCheck {
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

impl ResidualCheck {
    pub fn new(residual: f64, threshold: f64) -> Self {
        ResidualCheck {
            passed: residual <= threshold,
            residual,
            threshold,
        }
    }
}

/// Membership of `m` in `group`, with the relative residual compared to `tol`.
pub fn membership(s_or_a: &CMatrix, m: &CMatrix, group: Group, tol: f64) -> Result<ResidualCheck> {
    check_matrix(m, "membership")?;
    let scale = m.norm().max(1.0);
    let residual = match group {
        Group::CentralizerS => commutator(m, s_or_a).norm() / (m.norm() * s_or_a.norm()).max(1.0),
        Group::CentralizerExp => {
            let e = mat_exp(&(s_or_a * TWO_PI_I))?;
            commutator(m, &e).norm() / (m.norm() * e.norm()).max(1.0)
        }
        Group::Parabolic | Group::UnipotentRadical => {
            let g = real_semisimple_grading(s_or_a, tol)?;
            let signs = g.sign_classes()?;
            let mut r = g.masked(m, |k| signs[k] < 0).norm();
            if group == Group::UnipotentRadical {
                let m0 = g.weight_component(m, Complex64::new(0.0, 0.0));
                r = r.max((m0 - identity(m.nrows())).norm());
            }
            r / scale
        }
        Group::ResonanceGroup => {
            let g = grade(s_or_a, tol)?;
            let forbidden = forbidden_mask(&g, LeviVariant::Resonance)?;
            g.masked(m, |k| forbidden[k]).norm() / scale
        }
    };
    let mut check = ResidualCheck::new(residual, tol);
    if group != Group::UnipotentRadical && !is_invertible(m) {
        check.passed = false;
    }
    Ok(check)
}

/// `c(A) ⊕ u_N(S)` with `S` the semisimple part of `a`: the associative
/// algebra whose invertible elements form `C(A) ⋉ U_N(S)`.
pub fn intertwiner_algebra(a: &CMatrix, tol: f64) -> Result<SubalgebraBasis> {
    let spectral = spectral_decompose(a, tol)?;
    let g = WeightGrading::from_spectral(&spectral)?;
    intertwiner_from_grading(a, &g)
}

pub fn intertwiner_from_grading(a: &CMatrix, g: &WeightGrading) -> Result<SubalgebraBasis> {
    let n = check_matrix(a, "intertwiner_algebra")?;
    let id = identity(n);
    let k = a.transpose().kronecker(&id) - id.kronecker(a);
    let threshold = g.tol * a.norm().max(1.0);
    let mut basis: Vec<CMatrix> = null_space(&k, threshold)
        .into_iter()
        .map(|v| crate::linalg::unvec(&v, n))
        // Elements of c(A) commute with S; drop the rounding-level
        // components outside weight zero.
        .map(|x| g.weight_component(&x, Complex64::new(0.0, 0.0)))
        .collect();
    let (res, _) = resonance_from_grading(g)?;
    basis.extend(res.basis);
    Ok(SubalgebraBasis {
        label: SubalgebraLabel::Intertwiner,
        basis,
    })
}

/// The centralizer `c(A)` alone.
pub fn centralizer_algebra(a: &CMatrix, tol: f64) -> Result<SubalgebraBasis> {
    let n = check_matrix(a, "centralizer_algebra")?;
    let id = identity(n);
    let k = a.transpose().kronecker(&id) - id.kronecker(a);
    let basis = null_space(&k, tol * a.norm().max(1.0))
        .into_iter()
        .map(|v| crate::linalg::unvec(&v, n))
        .collect();
    Ok(SubalgebraBasis {
        label: SubalgebraLabel::Centralizer,
        basis,
    })
}

/// Whether `h^{-1} ms h = exp(2 pi i s)` within `tol ||ms||`.
pub fn strict_reduction_predicate(h: &CMatrix, ms: &CMatrix, s: &CMatrix, tol: f64) -> Result<ResidualCheck> {
    let h_inv = inverse(h)?;
    let e = mat_exp(&(s * TWO_PI_I))?;
    let residual = (&h_inv * ms * h - e).norm();
    Ok(ResidualCheck::new(residual, tol * ms.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, elementary, random};

    fn contains_elementary(b: &SubalgebraBasis, n: usize, i: usize, j: usize) -> bool {
        b.projection_residual(&elementary(n, i, j)) < 1e-12
    }

    #[test]
    fn weights_of_two_level_diagonal() {
        let g = grade(&diag_real(&[1.0, 0.0]), 1e-9).unwrap();
        let mut w: Vec<f64> = g.weight_values().iter().map(|z| z.re).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![-1.0, 0.0, 1.0]);
        let x = CMatrix::from_fn(2, 2, |i, j| c64((i * 2 + j + 1) as f64, 0.0));
        let x1 = g.weight_component(&x, c64(1.0, 0.0));
        assert!((x1 - elementary(2, 0, 1) * c64(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn scalar_has_single_weight() {
        let g = grade(&(identity(3) * c64(0.3, 1.0)), 1e-9).unwrap();
        assert_eq!(g.weights.len(), 1);
        let mut r = random::rng(0);
        let x = random::complex_matrix(&mut r, 3, 1.0);
        assert!((g.weight_component(&x, c64(0.0, 0.0)) - &x).norm() < 1e-14);
    }

    #[test]
    fn completeness_for_three_levels() {
        let g = grade(&diag_real(&[2.0, 1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(g.weights.len(), 5);
        let mut r = random::rng(2);
        let x = random::complex_matrix(&mut r, 3, 3.0);
        let sum = g.components(&x).into_iter().fold(CMatrix::zeros(3, 3), |a, (_, c)| a + c);
        assert!((sum - x).norm() < 1e-10);
    }

    #[test]
    fn resonance_examples() {
        let (b, res) = resonance_basis(&diag_real(&[1.0, 0.0]), 1e-9).unwrap();
        assert!(res && b.dim() == 1 && contains_elementary(&b, 2, 0, 1));
        let (b, res) = resonance_basis(&diag_real(&[1.0 / 3.0, 0.0]), 1e-9).unwrap();
        assert!(!res && b.is_empty());
        let (b, _) = resonance_basis(&diag_real(&[2.0, 1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(b.dim(), 3);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert!(contains_elementary(&b, 3, i, j));
        }
    }

    #[test]
    fn near_integer_weight_is_refused() {
        let s = diag_real(&[1.0 + 1.5e-9, 0.0]);
        assert!(matches!(resonance_basis(&s, 1e-9), Err(Error::ClusterAmbiguity { .. })));
    }

    #[test]
    fn parabolic_examples() {
        let (p, u) = parabolic_data(&diag_real(&[1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(p.dim(), 3);
        assert!(contains_elementary(&p, 2, 0, 1) && !contains_elementary(&p, 2, 1, 0));
        assert!(u.dim() == 1 && contains_elementary(&u, 2, 0, 1));

        let (p, u) = parabolic_data(&CMatrix::zeros(3, 3), 1e-9).unwrap();
        assert_eq!((p.dim(), u.dim()), (9, 0));

        let (_, u) = parabolic_data(&diag_real(&[1.0, 1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(u.dim(), 2);
        assert!(contains_elementary(&u, 3, 0, 2) && contains_elementary(&u, 3, 1, 2));
    }

    #[test]
    fn parabolic_rejects_complex_spectrum() {
        let a = crate::linalg::diag(&[c64(1.0, 1.0), c64(0.0, 0.0)]);
        assert!(matches!(parabolic_data(&a, 1e-9), Err(Error::NotRealSemisimple { .. })));
    }

    #[test]
    fn chi_examples() {
        let s = diag_real(&[1.0, 0.0]);
        let m = CMatrix::from_row_slice(2, 2, &[c64(2.0, 0.0), c64(5.0, 0.0), c64(0.0, 0.0), c64(3.0, 0.0)]);
        let c = chi(&s, &m, LeviVariant::Resonance, 1e-9).unwrap();
        assert!((c - diag_real(&[2.0, 3.0])).norm() < 1e-14);
        let c = chi(&s, &m, LeviVariant::Parabolic, 1e-9).unwrap();
        assert!((c - diag_real(&[2.0, 3.0])).norm() < 1e-14);

        let m = identity(2) + elementary(2, 0, 1) * TWO_PI_I;
        assert!((chi(&s, &m, LeviVariant::Resonance, 1e-9).unwrap() - identity(2)).norm() < 1e-14);

        let low = identity(2) + elementary(2, 1, 0);
        assert!(matches!(
            chi(&s, &low, LeviVariant::Resonance, 1e-9),
            Err(Error::NotInParabolic { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let s = diag_real(&[1.0 / 3.0, 0.0]);
        let e = mat_exp(&(&s * TWO_PI_I)).unwrap();
        assert!(membership(&s, &e, Group::CentralizerS, 1e-9).unwrap().passed);

        let a = diag_real(&[1.0, 0.0]);
        let low = identity(2) + elementary(2, 1, 0);
        assert!(!membership(&a, &low, Group::Parabolic, 1e-9).unwrap().passed);

        let up = identity(2) + elementary(2, 0, 1);
        assert!(membership(&a, &up, Group::ResonanceGroup, 1e-9).unwrap().passed);
        assert!(membership(&a, &up, Group::UnipotentRadical, 1e-9).unwrap().passed);
        assert!(!membership(&s, &up, Group::ResonanceGroup, 1e-9).unwrap().passed);
        assert!(!membership(&s, &up, Group::CentralizerExp, 1e-9).unwrap().passed);
    }

    #[test]
    fn intertwiner_examples() {
        let v = intertwiner_algebra(&diag_real(&[1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(v.dim(), 3);
        assert!(contains_elementary(&v, 2, 0, 1) && !contains_elementary(&v, 2, 1, 0));

        assert_eq!(intertwiner_algebra(&CMatrix::zeros(2, 2), 1e-9).unwrap().dim(), 4);

        let v = intertwiner_algebra(&diag_real(&[2.0, 1.0, 0.0]), 1e-9).unwrap();
        assert_eq!(v.dim(), 6);
        assert_eq!(v.rank(1e-9), 6);
        assert!(v.closure_residual(|a, b| a * b) < 1e-10);
    }

    #[test]
    fn strict_reduction_examples() {
        let s = diag_real(&[1.0, 0.0]);
        let e = mat_exp(&(&s * TWO_PI_I)).unwrap();
        assert!(strict_reduction_predicate(&identity(2), &e, &s, 1e-9).unwrap().passed);
        let bad = &e * diag_real(&[2.0, 0.5]);
        assert!(!strict_reduction_predicate(&identity(2), &bad, &s, 1e-9).unwrap().passed);

        let s = diag_real(&[0.25, 0.0]);
        let mut r = random::rng(9);
        let q = random::near_identity(&mut r, 2, 0.5);
        let ms = &q * mat_exp(&(&s * TWO_PI_I)).unwrap() * inverse(&q).unwrap();
        assert!(strict_reduction_predicate(&q, &ms, &s, 1e-9).unwrap().passed);
    }
}
