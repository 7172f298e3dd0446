//! Fuchsian systems `dY/dz = sum_i A_i / (z - d_i) Y` on the punctured
//! sphere: keyhole loop generators, the global monodromy representation and
//! per-pole monodromy data.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::classification::{validate_datum, DatumReport, MonodromyDatum};
use crate::error::{Error, Result};
use crate::linalg::{
    char_poly, check_matrix, conjugacy_test_seeded, identity, inverse, mat_exp, CMatrix, ConjugacyVerdict,
    TWO_PI_I,
};
use crate::local::{functor_l, transport_system, PathPiece, PathSpec, PolyConnection, RationalSystem, Transport};
use crate::tolerance::{derived_tol, monodromy_tol, DEFAULT_TRIALS};

/// Keyhole radii below this are refused.
const RADIUS_FLOOR: f64 = 1e-6;
/// Candidate directions in the basepoint search.
const BASEPOINT_CANDIDATES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianSystem {
    pub poles: Vec<Complex64>,
    pub residues: Vec<CMatrix>,
    pub basepoint: Complex64,
}

impl FuchsianSystem {
    /// Validates the poles and residues; picks a basepoint when none is given.
    pub fn new(poles: Vec<Complex64>, residues: Vec<CMatrix>, basepoint: Option<Complex64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidInput("system needs at least one pole".into()));
        }
        if poles.len() != residues.len() {
            return Err(Error::InvalidInput(format!(
                "{} poles but {} residues",
                poles.len(),
                residues.len()
            )));
        }
        if poles.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { context: "poles" });
        }
        let n = check_matrix(&residues[0], "residue")?;
        for a in &residues {
            if check_matrix(a, "residue")? != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.nrows(),
                });
            }
        }
        for i in 0..poles.len() {
            for j in 0..i {
                if poles[i] == poles[j] {
                    return Err(Error::DegenerateGeometry(format!("pole {} is repeated", poles[i])));
                }
            }
        }
        let basepoint = match basepoint {
            Some(x) => {
                if !x.is_finite() {
                    return Err(Error::NonFinite { context: "basepoint" });
                }
                if poles.contains(&x) {
                    return Err(Error::DegenerateGeometry(format!("basepoint {x} is a pole")));
                }
                x
            }
            None => default_basepoint(&poles),
        };
        Ok(FuchsianSystem {
            poles,
            residues,
            basepoint,
        })
    }

    pub fn dim(&self) -> usize {
        self.residues[0].nrows()
    }

    pub(crate) fn rational(&self) -> Result<RationalSystem> {
        RationalSystem::fuchsian(&self.poles, &self.residues)
    }
}

/// `-sum_i A_i`.
pub fn residue_at_infinity(sys: &FuchsianSystem) -> CMatrix {
    let n = sys.dim();
    -sys.residues.iter().fold(CMatrix::zeros(n, n), |acc, a| acc + a)
}

fn centroid(points: &[Complex64]) -> Complex64 {
    points.iter().sum::<Complex64>() / points.len() as f64
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Smallest distance from a segment `x0 -> d_i` to any other pole, and from
/// the outward ray segment to any pole.
fn clearance(poles: &[Complex64], x0: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &d) in poles.iter().enumerate() {
        best = best.min((x0 - d).norm());
        for (j, &e) in poles.iter().enumerate() {
            if i != j {
                best = best.min(segment_distance(e, x0, d));
            }
        }
    }
    let (far, _, _) = outer_geometry(poles, x0);
    for &d in poles {
        best = best.min(segment_distance(d, x0, far));
    }
    best
}

/// Deterministic search over a ring around the poles for the basepoint with
/// the largest clearance.
fn default_basepoint(poles: &[Complex64]) -> Complex64 {
    let c = centroid(poles);
    let spread = poles.iter().map(|d| (d - c).norm()).fold(0.0, f64::max);
    let radius = if spread == 0.0 { 1.0 } else { 1.5 * spread };
    let mut best = (f64::NEG_INFINITY, c + radius);
    for k in 0..BASEPOINT_CANDIDATES {
        let x = c + Complex64::from_polar(radius, TAU * k as f64 / BASEPOINT_CANDIDATES as f64);
        let score = clearance(poles, x);
        if score > best.0 {
            best = (score, x);
        }
    }
    best.1
}

/// Far point on the ray from the centroid through `x0`, the outward unit
/// direction and the radius of the circle at infinity.
fn outer_geometry(poles: &[Complex64], x0: Complex64) -> (Complex64, Complex64, f64) {
    let c = centroid(poles);
    let u = if x0 == c {
        Complex64::new(1.0, 0.0)
    } else {
        (x0 - c) / (x0 - c).norm()
    };
    let spread = poles.iter().map(|d| (d - c).norm()).fold(0.0, f64::max);
    let radius = (2.0 * (x0 - c).norm()).max(2.0 * spread + 1.0);
    (c + u * radius, u, radius)
}

/// One keyhole: segment from the basepoint to the circle, the circle
/// counterclockwise, and back.
#[derive(Debug, Clone)]
pub struct Keyhole {
    pub pole_index: usize,
    pub radius: f64,
    /// Point where the approach path meets the circle.
    pub entry: Complex64,
    /// Straight path from the basepoint to `entry`.
    pub approach: PathSpec,
    pub path: PathSpec,
}

#[derive(Debug, Clone)]
pub struct LoopGenerators {
    pub basepoint: Complex64,
    /// Keyholes in input pole order.
    pub loops: Vec<Keyhole>,
    /// Pole indices sorted by `arg((d_i - x0) / (c - x0))`, `c` the
    /// centroid; `M_inf M_{order[m-1]} ... M_{order[0]} = I`.
    pub order: Vec<usize>,
    /// Clockwise circle around all poles, reached along the ray from the
    /// centroid through the basepoint.
    pub infinity: PathSpec,
}

pub fn loop_generators(sys: &FuchsianSystem) -> Result<LoopGenerators> {
    let x0 = sys.basepoint;
    let poles = &sys.poles;
    let clear = clearance(poles, x0);
    if clear < RADIUS_FLOOR {
        return Err(Error::DegenerateGeometry(format!(
            "basepoint {x0} sees a pole within {clear:.2e} of another pole's approach path"
        )));
    }
    let mut loops = Vec::with_capacity(poles.len());
    for (i, &d) in poles.iter().enumerate() {
        let nearest = poles
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &e)| (e - d).norm())
            .fold((x0 - d).norm(), f64::min);
        let radius = nearest / 3.0;
        if radius < RADIUS_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "keyhole radius {radius:.2e} around {d} is below {RADIUS_FLOOR:.0e}"
            )));
        }
        let dir = (x0 - d) / (x0 - d).norm();
        let entry = d + dir * radius;
        let approach = PathSpec::single(PathPiece::Polyline(vec![x0, entry]));
        let path = PathSpec::new(vec![
            PathPiece::Polyline(vec![x0, entry]),
            PathPiece::Circle {
                center: d,
                radius,
                start_angle: dir.arg(),
                turns: 1.0,
            },
            PathPiece::Polyline(vec![entry, x0]),
        ]);
        loops.push(Keyhole {
            pole_index: i,
            radius,
            entry,
            approach,
            path,
        });
    }

    let (far, u, big) = outer_geometry(poles, x0);
    let c = centroid(poles);
    let key = |d: Complex64| {
        let a = ((d - x0) / -u).arg();
        if a <= -PI {
            a + TAU
        } else {
            a
        }
    };
    let mut order: Vec<usize> = (0..poles.len()).collect();
    order.sort_by(|&a, &b| key(poles[a]).total_cmp(&key(poles[b])));

    let infinity = PathSpec::new(vec![
        PathPiece::Polyline(vec![x0, far]),
        PathPiece::Circle {
            center: c,
            radius: big,
            start_angle: u.arg(),
            turns: -1.0,
        },
        PathPiece::Polyline(vec![far, x0]),
    ]);
    Ok(LoopGenerators {
        basepoint: x0,
        loops,
        order,
        infinity,
    })
}

/// Transport of the system along any path avoiding the poles.
pub fn system_transport(sys: &FuchsianSystem, path: &PathSpec, rtol: f64, record: bool) -> Result<Transport> {
    transport_system(&sys.rational()?, path, rtol, record)
}

#[derive(Debug, Clone)]
pub struct GlobalMonodromy {
    pub generators: LoopGenerators,
    /// `M_i`, in input pole order.
    pub monodromies: Vec<CMatrix>,
    pub m_infinity: CMatrix,
    /// `||M_inf M_{order[m-1]} ... M_{order[0]} - I||`.
    pub product_residual: f64,
    /// Integrator tolerance of the returned matrices; at most the requested
    /// `rtol`.
    pub rtol_used: f64,
}

/// Smallest integrator tolerance tried when tightening for the product relation.
const RTOL_FLOOR: f64 = 1e-14;

/// Monodromies around each pole and around infinity. The product relation
/// amplifies integration error by the norms of the `M_i`, so the loops are
/// integrated again at `rtol / 10, rtol / 100, ...` (down to 1e-14) until
/// the relation holds within `10 rtol`.
pub fn global_monodromy(sys: &FuchsianSystem, rtol: f64) -> Result<GlobalMonodromy> {
    let generators = loop_generators(sys)?;
    let mut step = rtol;
    loop {
        let g = global_monodromy_at(sys, &generators, step)?;
        if g.product_residual < 10.0 * rtol || step / 10.0 < RTOL_FLOOR {
            return Ok(g);
        }
        step /= 10.0;
    }
}

fn global_monodromy_at(sys: &FuchsianSystem, generators: &LoopGenerators, rtol: f64) -> Result<GlobalMonodromy> {
    let generators = generators.clone();
    let rational = sys.rational()?;
    let monodromies = generators
        .loops
        .iter()
        .map(|l| transport_system(&rational, &l.path, rtol, false).map(|t| t.matrix))
        .collect::<Result<Vec<_>>>()?;
    let m_infinity = transport_system(&rational, &generators.infinity, rtol, false)?.matrix;
    let product = generators
        .order
        .iter()
        .fold(identity(sys.dim()), |acc, &i| &monodromies[i] * acc);
    let product_residual = (&m_infinity * product - identity(sys.dim())).norm();
    Ok(GlobalMonodromy {
        generators,
        monodromies,
        m_infinity,
        product_residual,
        rtol_used: rtol,
    })
}

/// How the torsor representative `h_i` of a pole was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum HSearch {
    /// `h_i` conjugates `exp(2 pi i A_i)` to `M_i`.
    Conjugacy,
    /// `h_i` transported from the local strict linearization at the pole.
    LocalGauge,
    /// No representative passed validation; not fatal for the report.
    CompatibilitySearchFailure { reason: String },
}

#[derive(Debug, Clone)]
pub struct PoleReport {
    pub index: usize,
    pub pole: Complex64,
    pub residue: CMatrix,
    pub monodromy: CMatrix,
    /// Largest coefficient gap between the characteristic polynomials of
    /// `M_i` and `exp(2 pi i A_i)`, relative to the largest coefficient.
    pub char_poly_residual: f64,
    pub spectral_compatible: bool,
    pub search: HSearch,
    pub datum: Option<MonodromyDatum>,
    pub validation: Option<DatumReport>,
}

#[derive(Debug, Clone)]
pub struct GlobalReport {
    pub monodromy: GlobalMonodromy,
    pub residue_at_infinity: CMatrix,
    pub poles: Vec<PoleReport>,
    /// Tolerance used for checks on integrated monodromies.
    pub check_tol: f64,
}

impl GlobalReport {
    pub fn all_compatible(&self) -> bool {
        self.poles
            .iter()
            .all(|p| p.spectral_compatible && p.validation.is_some_and(|v| v.passed()))
    }
}

fn char_poly_gap(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let pa = char_poly(a)?;
    let pb = char_poly(b)?;
    let scale = pb.iter().map(|c| c.norm()).fold(1.0, f64::max);
    Ok(pa.iter().zip(&pb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale)
}

/// The connection near pole `i` in the coordinate `u = (z - d_i) / w`,
/// `w = r e^{i phi}` pointing at the keyhole entry: `u dY/du = B(u) Y` with
/// `B(u) = A_i - sum_{j != i} A_j sum_{k >= 1} (w u / (d_j - d_i))^k`,
/// truncated at `degree`.
pub fn local_connection_at(sys: &FuchsianSystem, i: usize, w: Complex64, degree: usize) -> Result<PolyConnection> {
    let n = sys.dim();
    let mut coeffs = vec![CMatrix::zeros(n, n); degree + 1];
    coeffs[0] = sys.residues[i].clone();
    for (j, (&e, a)) in sys.poles.iter().zip(&sys.residues).enumerate() {
        if j == i {
            continue;
        }
        let ratio = w / (e - sys.poles[i]);
        let mut p = ratio;
        for c in coeffs.iter_mut().skip(1) {
            *c -= a * p;
            p *= ratio;
        }
    }
    PolyConnection::new(coeffs)
}

pub fn assemble_global_datum(sys: &FuchsianSystem, rtol: f64, tol: f64, degree: usize) -> Result<GlobalReport> {
    let monodromy = global_monodromy(sys, rtol)?;
    let n = sys.dim();
    let check_tol = derived_tol(rtol).max(tol);
    let cluster_tol = monodromy_tol(rtol, n).max(tol);
    let rational = sys.rational()?;
    let mut poles = Vec::with_capacity(sys.poles.len());
    for (i, keyhole) in monodromy.generators.loops.iter().enumerate() {
        let a = sys.residues[i].clone();
        let m = monodromy.monodromies[i].clone();
        let target = mat_exp(&(&a * TWO_PI_I))?;
        let char_poly_residual = char_poly_gap(&m, &target)?;

        let mut found: Option<(HSearch, MonodromyDatum, DatumReport)> = None;
        let mut reasons = Vec::new();
        let accept = |h: CMatrix, how: HSearch, reasons: &mut Vec<String>| -> Result<Option<_>> {
            let d = MonodromyDatum::new(m.clone(), h, a.clone())?;
            let report = validate_datum(&d, check_tol)?;
            if report.passed() {
                Ok(Some((how, d, report)))
            } else {
                reasons.push(report.summary());
                Ok(None)
            }
        };
        match conjugacy_test_seeded(&target, &m, cluster_tol, 0, DEFAULT_TRIALS) {
            Ok(ConjugacyVerdict::EqualClass { witness, .. }) => {
                found = accept(witness, HSearch::Conjugacy, &mut reasons)?;
            }
            Ok(ConjugacyVerdict::Distinct { reason }) => {
                reasons.push(format!("monodromy is not conjugate to exp(2 pi i A): {reason}"))
            }
            Ok(ConjugacyVerdict::EqualClassNoWitness) => {
                reasons.push("conjugacy classes agree but no intertwiner was found".to_string())
            }
            Err(e) => reasons.push(e.to_string()),
        }
        if found.is_none() {
            let w = keyhole.entry - sys.poles[i];
            let local = local_connection_at(sys, i, w, degree)
                .and_then(|conn| functor_l(&conn, rtol, degree))
                .and_then(|data| {
                    let f = transport_system(&rational, &keyhole.approach, rtol, false)?.matrix;
                    Ok(inverse(&f)? * data.datum.h)
                });
            match local {
                Ok(h) => found = accept(h, HSearch::LocalGauge, &mut reasons)?,
                Err(e) => reasons.push(format!("local gauge route: {e}")),
            }
        }
        let (search, datum, validation) = match found {
            Some((how, d, r)) => (how, Some(d), Some(r)),
            None => (
                HSearch::CompatibilitySearchFailure {
                    reason: reasons.join(" | "),
                },
                None,
                None,
            ),
        };
        poles.push(PoleReport {
            index: i,
            pole: sys.poles[i],
            residue: a,
            monodromy: m,
            char_poly_residual,
            spectral_compatible: char_poly_residual <= check_tol,
            search,
            datum,
            validation,
        });
    }
    Ok(GlobalReport {
        residue_at_infinity: residue_at_infinity(sys),
        monodromy,
        poles,
        check_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag_real, elementary, random};
    use crate::local::monodromy as local_monodromy;

    fn circle_points(l: &Keyhole) -> Vec<Complex64> {
        let PathPiece::Circle { center, radius, .. } = l.path.pieces[1] else {
            panic!("keyhole has no circle");
        };
        (0..64)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / 64.0))
            .collect()
    }

    #[test]
    fn residue_at_infinity_sums() {
        let a = diag_real(&[0.5, 0.2]);
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0)], vec![a.clone()], None).unwrap();
        assert_eq!(residue_at_infinity(&sys), -a.clone());
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0), c64(1.0, 0.0)], vec![a.clone(), -a], None).unwrap();
        assert_eq!(residue_at_infinity(&sys), CMatrix::zeros(2, 2));
    }

    #[test]
    fn default_basepoint_for_one_pole() {
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0)], vec![diag_real(&[0.5])], None).unwrap();
        assert_eq!(sys.basepoint, c64(1.0, 0.0));
        let g = loop_generators(&sys).unwrap();
        assert_eq!(g.loops.len(), 1);
        assert!((g.loops[0].radius - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn keyholes_are_disjoint() {
        let sys = FuchsianSystem::new(
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![diag_real(&[0.1]), diag_real(&[0.2])],
            Some(c64(0.0, 1.0)),
        )
        .unwrap();
        let g = loop_generators(&sys).unwrap();
        let (a, b) = (circle_points(&g.loops[0]), circle_points(&g.loops[1]));
        let gap = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x - y).norm()))
            .fold(f64::INFINITY, f64::min);
        assert!(gap > 0.1);
    }

    #[test]
    fn collinear_basepoint_is_degenerate() {
        let sys = FuchsianSystem::new(
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![diag_real(&[0.1]), diag_real(&[0.2])],
            Some(c64(2.0, 0.0)),
        )
        .unwrap();
        assert!(matches!(loop_generators(&sys), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn one_pole_matches_local() {
        let a = CMatrix::from_row_slice(2, 2, &[c64(0.3, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(-0.1, 0.2)]);
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0)], vec![a.clone()], None).unwrap();
        let g = global_monodromy(&sys, 1e-10).unwrap();
        let local = local_monodromy(&PolyConnection::constant(a.clone()).unwrap(), 1e-10).unwrap();
        assert!((&g.monodromies[0] - &local).norm() < 1e-9);
        assert!((&g.monodromies[0] - mat_exp(&(&a * TWO_PI_I)).unwrap()).norm() < 1e-9);
        assert!(g.product_residual < 1e-9);
    }

    #[test]
    fn scalar_two_pole_system_is_abelian() {
        let sys = FuchsianSystem::new(
            vec![c64(-1.0, 0.0), c64(1.0, 0.5)],
            vec![diag(&[c64(0.3, 0.1)]), diag(&[c64(-0.7, 0.0)])],
            None,
        )
        .unwrap();
        let g = global_monodromy(&sys, 1e-10).unwrap();
        for (m, a) in g.monodromies.iter().zip(&sys.residues) {
            assert!((m[(0, 0)] - (a[(0, 0)] * TWO_PI_I).exp()).norm() < 1e-9);
        }
        let expected = (-(c64(0.3, 0.1) + c64(-0.7, 0.0)) * TWO_PI_I).exp();
        assert!((g.m_infinity[(0, 0)] - expected).norm() < 1e-9);
        assert!(g.product_residual < 1e-9);
    }

    use crate::linalg::diag;

    #[test]
    fn product_relation_on_random_systems() {
        let mut rng = random::rng(11);
        for m in 2..=4 {
            let poles: Vec<Complex64> = (0..m)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / m as f64) + random::complex_unit(&mut rng) * 0.2)
                .collect();
            let residues = (0..m).map(|_| random::complex_matrix(&mut rng, 2, 0.6)).collect();
            let sys = FuchsianSystem::new(poles, residues, None).unwrap();
            let g = global_monodromy(&sys, 1e-10).unwrap();
            assert!(g.product_residual < 1e-8, "m = {m}: {:e}", g.product_residual);
        }
    }

    #[test]
    fn resonant_single_pole_datum() {
        let a = diag_real(&[1.0, 0.0]);
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0)], vec![a.clone()], None).unwrap();
        let r = assemble_global_datum(&sys, 1e-10, 1e-9, 25).unwrap();
        let p = &r.poles[0];
        assert_eq!(p.search, HSearch::Conjugacy);
        assert!((&p.monodromy - identity(2)).norm() < 1e-9);
        assert!(r.all_compatible());
    }

    #[test]
    fn non_resonant_single_pole_datum() {
        let a = diag_real(&[1.0 / 3.0, 0.0]);
        let sys = FuchsianSystem::new(vec![c64(0.0, 0.0)], vec![a.clone()], None).unwrap();
        let r = assemble_global_datum(&sys, 1e-10, 1e-9, 25).unwrap();
        let d = r.poles[0].datum.as_ref().unwrap();
        assert!((&d.m - mat_exp(&(&a * TWO_PI_I)).unwrap()).norm() < 1e-8);
        assert!((&d.h - identity(2)).norm() < 1e-8);
        let v = r.poles[0].validation.unwrap();
        assert!(v.support.residual < 1e-8 && v.chi.residual < 1e-8 && v.semisimple.residual < 1e-8);
    }

    #[test]
    fn nilpotent_residues_give_unipotent_monodromy() {
        let sys = FuchsianSystem::new(
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![elementary(2, 0, 1), elementary(2, 1, 0) * c64(0.5, 0.0)],
            None,
        )
        .unwrap();
        let r = assemble_global_datum(&sys, 1e-10, 1e-9, 25).unwrap();
        for p in &r.poles {
            assert!(p.spectral_compatible, "{}", p.char_poly_residual);
            assert!(p.datum.is_some(), "{:?}", p.search);
        }
    }

    #[test]
    fn gauge_route_on_non_linearizable_pole() {
        // z = 0 carries diag(1, 0) and the second pole adds the E12 term
        // that makes the local monodromy non-trivial.
        let sys = FuchsianSystem::new(
            vec![c64(0.0, 0.0), c64(2.0, 0.0)],
            vec![diag_real(&[1.0, 0.0]), elementary(2, 0, 1) * c64(-2.0, 0.0)],
            None,
        )
        .unwrap();
        let r = assemble_global_datum(&sys, 1e-10, 1e-9, 25).unwrap();
        let p = &r.poles[0];
        assert!((&p.monodromy - identity(2)).norm() > 1.0);
        assert_eq!(p.search, HSearch::LocalGauge);
        assert!(p.validation.unwrap().passed());
    }
}
