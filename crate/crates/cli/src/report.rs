//! Serializable reports and their plain-text rendering.

use std::fmt::Write;

use levelt_core::linalg::CMatrix;
use levelt_core::{DatumReport, ResidualCheck};
use levelt_core::Complex64;
use serde::Serialize;

use crate::format::{matrix_to_json, pair, ConnectionFile, DatumFile, MatrixJson, Pair, SystemFile};

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub tol: f64,
    pub monodromy_tol: f64,
    pub derived_tol: f64,
    pub degree: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub value: Pair,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl From<ResidualCheck> for Check {
    fn from(c: ResidualCheck) -> Self {
        Check {
            residual: c.residual,
            threshold: c.threshold,
            passed: c.passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub support: Check,
    pub chi: Check,
    pub semisimple: Check,
    pub passed: bool,
}

impl From<DatumReport> for Validation {
    fn from(r: DatumReport) -> Self {
        Validation {
            support: r.support.into(),
            chi: r.chi.into(),
            semisimple: r.semisimple.into(),
            passed: r.passed(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueSection {
    pub matrix: MatrixJson,
    pub eigenvalues: Vec<Eigenvalue>,
    pub semisimple: MatrixJson,
    pub nilpotent: MatrixJson,
    pub resonant: bool,
    pub resonance_dim: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromySection {
    pub matrix: MatrixJson,
    /// `|det M - exp(2 pi i tr A_0)| / |exp(2 pi i tr A_0)|`.
    pub det_residual: f64,
    /// Characteristic polynomial gap to `exp(2 pi i A_0)`.
    pub char_poly_residual: f64,
    pub rtol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearizabilitySection {
    pub linearizable: bool,
    pub verdict: String,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeSection {
    pub order: usize,
    pub residual: f64,
    /// `[order, kernel dimension]` at each resonant order.
    pub resonant_orders: Vec<[usize; 2]>,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: ConnectionFile,
    pub tolerances: Tolerances,
    pub residue: ResidueSection,
    pub monodromy: MonodromySection,
    pub linearizability: LinearizabilitySection,
    pub gauge: GaugeSection,
    pub datum: DatumFile,
    pub validation: Validation,
    pub validation_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationFailureReport {
    pub error: &'static str,
    pub validation: Validation,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_alignment: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleSection {
    pub index: usize,
    pub pole: Pair,
    pub monodromy: MatrixJson,
    pub char_poly_residual: f64,
    pub spectral_compatible: bool,
    pub search: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalSection {
    pub input: SystemFile,
    pub tolerances: Tolerances,
    pub check_tol: f64,
    pub basepoint: Pair,
    /// Pole indices in the order of the product relation.
    pub order: Vec<usize>,
    pub residue_at_infinity: MatrixJson,
    pub m_infinity: MatrixJson,
    pub product_residual: f64,
    /// Integrator tolerance at which the product relation was met.
    pub rtol_used: f64,
    pub poles: Vec<PoleSection>,
    pub all_compatible: bool,
}

pub fn eigenvalues(list: &[(Complex64, usize)]) -> Vec<Eigenvalue> {
    list.iter()
        .map(|&(v, m)| Eigenvalue {
            value: pair(v),
            multiplicity: m,
        })
        .collect()
}

pub fn mat(m: &CMatrix) -> MatrixJson {
    matrix_to_json(m)
}

fn fmt_complex(z: Pair) -> String {
    let sign = if z[1] < 0.0 { '-' } else { '+' };
    format!("{:.6} {} {:.6}i", z[0], sign, z[1].abs())
}

fn fmt_matrix(out: &mut String, name: &str, m: &MatrixJson) {
    let _ = writeln!(out, "{name}:");
    for row in m {
        let cells: Vec<String> = row.iter().map(|&z| format!("{:>28}", fmt_complex(z))).collect();
        let _ = writeln!(out, "  [{}]", cells.join(""));
    }
}

fn fmt_check(out: &mut String, name: &str, c: &Check) {
    let _ = writeln!(
        out,
        "  {name:<12} {:>10.3e}  (threshold {:.1e})  {}",
        c.residual,
        c.threshold,
        if c.passed { "pass" } else { "FAIL" }
    );
}

pub fn fmt_validation(out: &mut String, v: &Validation) {
    let _ = writeln!(out, "validation: {}", if v.passed { "pass" } else { "FAIL" });
    fmt_check(out, "support", &v.support);
    fmt_check(out, "chi", &v.chi);
    fmt_check(out, "semisimple", &v.semisimple);
}

impl AnalysisReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let t = &self.tolerances;
        let _ = writeln!(
            s,
            "connection: n = {}, degree = {}",
            self.input.n,
            self.input.coefficients.iter().map(|c| c.power).max().unwrap_or(0)
        );
        let _ = writeln!(
            s,
            "tolerances: rtol {:.1e}, tol {:.1e}, monodromy tol {:.1e}, derived tol {:.1e}, degree {}",
            t.rtol, t.tol, t.monodromy_tol, t.derived_tol, t.degree
        );
        let _ = writeln!(s);
        fmt_matrix(&mut s, "residue A0", &self.residue.matrix);
        let _ = writeln!(s, "eigenvalues:");
        for e in &self.residue.eigenvalues {
            let _ = writeln!(s, "  {}  (multiplicity {})", fmt_complex(e.value), e.multiplicity);
        }
        let _ = writeln!(
            s,
            "resonant: {} (dim u_N(S) = {})",
            if self.residue.resonant { "yes" } else { "no" },
            self.residue.resonance_dim
        );
        let _ = writeln!(s);
        fmt_matrix(&mut s, "monodromy M", &self.monodromy.matrix);
        let _ = writeln!(
            s,
            "det residual {:.3e}, char-poly residual {:.3e}",
            self.monodromy.det_residual, self.monodromy.char_poly_residual
        );
        let _ = writeln!(
            s,
            "linearizable: {} ({})",
            if self.linearizability.linearizable { "yes" } else { "NO" },
            self.linearizability.verdict
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "gauge: order {}, residual {:.3e}, resonant orders {:?}",
            self.gauge.order, self.gauge.residual, self.gauge.resonant_orders
        );
        fmt_matrix(&mut s, "h", &self.datum.h);
        fmt_validation(&mut s, &self.validation);
        s
    }
}

impl EquivReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", self.verdict);
        if let Some(w) = &self.witness {
            fmt_matrix(&mut s, "witness", w);
        }
        if let Some(g) = &self.residue_alignment {
            fmt_matrix(&mut s, "residue alignment", g);
        }
        if let Some(r) = self.residual {
            let _ = writeln!(s, "residual: {r:.3e}");
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(s, "reason: {r}");
        }
        let _ = writeln!(s, "seed {}, trials {}, tol {:.1e}", self.seed, self.trials, self.tol);
        s
    }
}

impl GlobalSection {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "system: n = {}, {} poles, basepoint {}",
            self.input.n,
            self.poles.len(),
            fmt_complex(self.basepoint)
        );
        let _ = writeln!(s, "product order: {:?}", self.order);
        let _ = writeln!(
            s,
            "product relation residual: {:.3e} (integrated at rtol {:.0e})",
            self.product_residual, self.rtol_used
        );
        fmt_matrix(&mut s, "residue at infinity", &self.residue_at_infinity);
        fmt_matrix(&mut s, "M_inf", &self.m_infinity);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>5}  {:>30}  {:>12}  {:>10}  search", "pole", "location", "char-poly", "datum");
        for p in &self.poles {
            let datum = match &p.validation {
                Some(v) if v.passed => "valid",
                Some(_) => "invalid",
                None => "none",
            };
            let _ = writeln!(
                s,
                "{:>5}  {:>30}  {:>12.3e}  {:>10}  {}",
                p.index,
                fmt_complex(p.pole),
                p.char_poly_residual,
                datum,
                p.search
            );
        }
        for p in &self.poles {
            let _ = writeln!(s);
            fmt_matrix(&mut s, &format!("M_{}", p.index), &p.monodromy);
            if let Some(d) = &p.datum {
                fmt_matrix(&mut s, &format!("h_{}", p.index), &d.h);
            }
            if let Some(v) = &p.validation {
                fmt_validation(&mut s, v);
            }
            if let Some(f) = &p.failure {
                let _ = writeln!(s, "search failed: {f}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "all compatible: {}", if self.all_compatible { "yes" } else { "no" });
        s
    }
}
