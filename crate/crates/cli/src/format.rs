//! JSON file formats. Matrices are row-major arrays of `[re, im]` pairs.

use std::fmt;
use std::path::Path;

use levelt_core::linalg::CMatrix;
use levelt_core::{FuchsianSystem, MonodromyDatum, PolyConnection};
use levelt_core::Complex64;
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];
pub type MatrixJson = Vec<Vec<Pair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientJson {
    pub power: usize,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    pub n: usize,
    pub coefficients: Vec<CoefficientJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub poles: Vec<Pair>,
    pub residues: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: MatrixJson,
    pub h: MatrixJson,
    #[serde(rename = "A")]
    pub a: MatrixJson,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormatError {
    Io { path: String, message: String },
    /// Malformed JSON or a field of the wrong type.
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed JSON that does not describe a valid object.
    Schema(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            FormatError::Syntax { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            FormatError::Schema(m) => write!(f, "schema error: {m}"),
        }
    }
}

impl std::error::Error for FormatError {}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn matrix_from_json(m: &MatrixJson, n: usize, what: &str) -> Result<CMatrix, FormatError> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        let cols = m.first().map_or(0, |r| r.len());
        return Err(FormatError::Schema(format!("{what} is {}x{cols}, expected {n}x{n}", m.len())));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(FormatError::Schema(format!("{what} has non-finite entries")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex(m[i][j])))
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

fn check_n(n: usize) -> Result<(), FormatError> {
    if n == 0 {
        Err(FormatError::Schema("n must be positive".into()))
    } else {
        Ok(())
    }
}

impl ConnectionFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: Self = parse(text)?;
        f.to_connection()?;
        Ok(f)
    }

    pub fn to_connection(&self) -> Result<PolyConnection, FormatError> {
        check_n(self.n)?;
        let degree = self
            .coefficients
            .iter()
            .map(|c| c.power)
            .max()
            .ok_or_else(|| FormatError::Schema("coefficients must not be empty".into()))?;
        let mut coeffs: Vec<Option<CMatrix>> = vec![None; degree + 1];
        for c in &self.coefficients {
            if coeffs[c.power].is_some() {
                return Err(FormatError::Schema(format!("power {} appears twice", c.power)));
            }
            coeffs[c.power] = Some(matrix_from_json(&c.matrix, self.n, &format!("coefficient of power {}", c.power))?);
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.unwrap_or_else(|| CMatrix::zeros(self.n, self.n)))
            .collect();
        PolyConnection::new(coeffs).map_err(|e| FormatError::Schema(e.to_string()))
    }

    /// Nonzero coefficients; the residue is always written.
    pub fn from_connection(conn: &PolyConnection) -> Self {
        ConnectionFile {
            n: conn.dim(),
            coefficients: conn
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(k, c)| *k == 0 || c.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
                .map(|(power, c)| CoefficientJson {
                    power,
                    matrix: matrix_to_json(c),
                })
                .collect(),
        }
    }
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: Self = parse(text)?;
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), FormatError> {
        check_n(self.n)?;
        if self.poles.len() != self.residues.len() {
            return Err(FormatError::Schema(format!(
                "{} poles but {} residues",
                self.poles.len(),
                self.residues.len()
            )));
        }
        if self.poles.is_empty() {
            return Err(FormatError::Schema("poles must not be empty".into()));
        }
        for (i, r) in self.residues.iter().enumerate() {
            matrix_from_json(r, self.n, &format!("residues[{i}]"))?;
        }
        if self.poles.iter().chain(self.basepoint.iter()).flatten().any(|x| !x.is_finite()) {
            return Err(FormatError::Schema("non-finite coordinate".into()));
        }
        Ok(())
    }

    /// Geometry problems (repeated poles, basepoint on a pole) surface as
    /// core errors.
    pub fn to_system(&self) -> Result<Result<FuchsianSystem, levelt_core::Error>, FormatError> {
        self.check()?;
        let residues = self
            .residues
            .iter()
            .enumerate()
            .map(|(i, r)| matrix_from_json(r, self.n, &format!("residues[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FuchsianSystem::new(
            self.poles.iter().map(|&p| complex(p)).collect(),
            residues,
            self.basepoint.map(complex),
        ))
    }

    pub fn from_system(sys: &FuchsianSystem) -> Self {
        SystemFile {
            n: sys.dim(),
            poles: sys.poles.iter().map(|&p| pair(p)).collect(),
            residues: sys.residues.iter().map(matrix_to_json).collect(),
            basepoint: Some(pair(sys.basepoint)),
        }
    }
}

impl DatumFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: Self = parse(text)?;
        f.to_datum()?;
        Ok(f)
    }

    pub fn to_datum(&self) -> Result<MonodromyDatum, FormatError> {
        check_n(self.n)?;
        let m = matrix_from_json(&self.m, self.n, "M")?;
        let h = matrix_from_json(&self.h, self.n, "h")?;
        let a = matrix_from_json(&self.a, self.n, "A")?;
        MonodromyDatum::new(m, h, a).map_err(|e| FormatError::Schema(e.to_string()))
    }

    pub fn from_datum(d: &MonodromyDatum) -> Self {
        DatumFile {
            n: d.dim(),
            m: matrix_to_json(&d.m),
            h: matrix_to_json(&d.h),
            a: matrix_to_json(&d.a),
        }
    }
}

/// Indented JSON with a trailing newline. Arrays of scalars and arrays of
/// such arrays (matrix rows) stay on one line.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn is_flat(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &serde_json::Value, indent: usize) {
    use serde_json::Value;
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_flat) && items.iter().all(|x| !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("value serializes").replace(',', ", "));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("value serializes")),
    }
}
