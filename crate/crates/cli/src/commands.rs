//! The four subcommands. Each returns its full output and exit code; nothing
//! is printed until the command has finished.

use std::path::{Path, PathBuf};

use levelt_core::grading::resonance_basis;
use levelt_core::linalg::{char_poly, TWO_PI_I};
use levelt_core::local::functor_l;
use levelt_core::{
    additive_jc, assemble_global_datum, derived_tol, equivalent, functor_r, linearizability, mat_exp,
    monodromy_tol, residue, validate_datum, ConjugacyVerdict, Equivalence, Error, HSearch, PolyConnection,
};
use levelt_core::Complex64;

use crate::format::{pair, read_file, to_json, ConnectionFile, DatumFile, FormatError, SystemFile};
use crate::report::{
    eigenvalues, fmt_validation, mat, AnalysisReport, EquivReport, GaugeSection, GlobalSection, LinearizabilitySection,
    MonodromySection, PoleSection, ResidueSection, Tolerances, Validation, ValidationFailureReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_REFUSAL: i32 = 3;
pub const EXIT_INEQUIVALENT: i32 = 4;
pub const EXIT_UNDECIDED: i32 = 5;

#[derive(Debug, Clone)]
pub struct Settings {
    pub rtol: f64,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub json: bool,
    pub degree: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            rtol: levelt_core::DEFAULT_RTOL,
            tol: levelt_core::DEFAULT_TOL,
            seed: 0,
            trials: levelt_core::DEFAULT_TRIALS,
            json: false,
            degree: levelt_core::DEFAULT_DEGREE,
        }
    }
}

impl Settings {
    fn tolerances(&self, n: usize) -> Tolerances {
        Tolerances {
            rtol: self.rtol,
            tol: self.tol,
            monodromy_tol: monodromy_tol(self.rtol, n).max(self.tol),
            derived_tol: derived_tol(self.rtol).max(self.tol),
            degree: self.degree,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        for (name, v) in [("rtol", self.rtol), ("tol", self.tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("--{name} must be a positive number, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Command {
    Analyze { file: PathBuf },
    NormalForm { datum: PathBuf, output: Option<PathBuf> },
    Equiv { first: PathBuf, second: PathBuf },
    Global { system: PathBuf, samples: Option<PathBuf> },
}

/// Everything a run produces. Files are written only on success.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            code: EXIT_OK,
            stdout,
            ..Output::default()
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Output {
            code,
            stderr,
            ..Output::default()
        }
    }
}

enum Failure {
    Format(FormatError),
    Core(Error),
    Invalid(Validation, f64),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Format(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn failure_output(f: Failure, json: bool) -> Output {
    match f {
        Failure::Format(e) => Output::fail(EXIT_PARSE, format!("error: {e}\n")),
        Failure::Core(e) if e.is_numerical_refusal() => {
            Output::fail(EXIT_REFUSAL, format!("numerical refusal: {e}\n"))
        }
        Failure::Core(e) => Output::fail(EXIT_VALIDATION, format!("error: {e}\n")),
        Failure::Invalid(v, tol) => {
            let stdout = if json {
                to_json(&ValidationFailureReport {
                    error: "validation",
                    validation: v,
                    tol,
                })
            } else {
                let mut s = String::new();
                fmt_validation(&mut s, &v);
                s
            };
            Output {
                code: EXIT_VALIDATION,
                stdout,
                stderr: "error: datum failed validation\n".into(),
                files: Vec::new(),
            }
        }
    }
}

pub fn run(command: &Command, settings: &Settings) -> Output {
    if let Err(e) = settings.check() {
        return Output::fail(EXIT_PARSE, format!("error: {e}\n"));
    }
    let result = match command {
        Command::Analyze { file } => analyze(file, settings),
        Command::NormalForm { datum, output } => normal_form(datum, output.as_deref(), settings),
        Command::Equiv { first, second } => equiv(first, second, settings),
        Command::Global { system, samples } => global(system, samples.as_deref(), settings),
    };
    result.unwrap_or_else(|f| failure_output(f, settings.json))
}

fn render<T: serde::Serialize>(json: bool, report: &T, text: impl FnOnce() -> String) -> String {
    if json {
        to_json(report)
    } else {
        text()
    }
}

fn analyze(path: &Path, s: &Settings) -> Result<Output, Failure> {
    let file = ConnectionFile::parse(&read_file(path)?)?;
    let conn: PolyConnection = file.to_connection()?;
    let n = conn.dim();
    let tolerances = s.tolerances(n);
    let a0 = residue(&conn);

    let jc = additive_jc(&a0, s.tol)?;
    let (res, resonant) = resonance_basis(&jc.s, s.tol)?;
    let lin = linearizability(&conn, s.rtol)?;
    let m = lin.monodromy.clone();
    let target = mat_exp(&(&a0 * TWO_PI_I))?;
    let det_target = (a0.trace() * TWO_PI_I).exp();
    let det_residual = (m.determinant() - det_target).norm() / det_target.norm();
    let pm = char_poly(&m)?;
    let pt = char_poly(&target)?;
    let scale = pt.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let char_poly_residual = pm.iter().zip(&pt).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale;
    let verdict = match &lin.verdict {
        ConjugacyVerdict::EqualClass { residual, .. } => format!("conjugate to exp(2 pi i A0), witness residual {residual:.3e}"),
        ConjugacyVerdict::EqualClassNoWitness => "same conjugacy invariants, no witness found".into(),
        ConjugacyVerdict::Distinct { reason } => reason.clone(),
    };

    let local = functor_l(&conn, s.rtol, s.degree)?;
    let validation_tol = tolerances.derived_tol;
    let validation: Validation = validate_datum(&local.datum, validation_tol)?.into();

    let report = AnalysisReport {
        input: file,
        residue: ResidueSection {
            matrix: mat(&a0),
            eigenvalues: eigenvalues(
                &jc.spectral
                    .clusters
                    .iter()
                    .map(|c| (c.eigenvalue, c.multiplicity))
                    .collect::<Vec<_>>(),
            ),
            semisimple: mat(&jc.s),
            nilpotent: mat(&jc.n),
            resonant,
            resonance_dim: res.dim(),
            tol: s.tol,
        },
        monodromy: MonodromySection {
            matrix: mat(&m),
            det_residual,
            char_poly_residual,
            rtol: s.rtol,
        },
        linearizability: LinearizabilitySection {
            linearizable: lin.linearizable,
            verdict,
            tol: tolerances.monodromy_tol,
        },
        gauge: GaugeSection {
            order: local.gauge.order,
            residual: local.gauge.residual,
            resonant_orders: local
                .gauge
                .resonant_choices
                .iter()
                .map(|c| [c.order, c.kernel_dim])
                .collect(),
            tol: validation_tol,
        },
        datum: DatumFile::from_datum(&local.datum),
        validation,
        validation_tol,
        tolerances,
    };
    Ok(Output::ok(render(s.json, &report, || report.text())))
}

fn normal_form(path: &Path, output: Option<&Path>, s: &Settings) -> Result<Output, Failure> {
    let file = DatumFile::parse(&read_file(path)?)?;
    let d = file.to_datum()?;
    let report = validate_datum(&d, s.tol)?;
    if !report.passed() {
        return Err(Failure::Invalid(report.into(), s.tol));
    }
    let conn = functor_r(&d, s.tol)?;
    let text = to_json(&ConnectionFile::from_connection(&conn));
    Ok(match output {
        Some(p) => Output {
            code: EXIT_OK,
            stdout: String::new(),
            stderr: String::new(),
            files: vec![(p.to_path_buf(), text)],
        },
        None => Output::ok(text),
    })
}

fn equiv(first: &Path, second: &Path, s: &Settings) -> Result<Output, Failure> {
    let d1 = DatumFile::parse(&read_file(first)?)?.to_datum()?;
    let d2 = DatumFile::parse(&read_file(second)?)?.to_datum()?;
    for d in [&d1, &d2] {
        let r = validate_datum(d, s.tol)?;
        if !r.passed() {
            return Err(Failure::Invalid(r.into(), s.tol));
        }
    }
    let verdict = equivalent(&d1, &d2, s.trials, s.seed, s.tol)?;
    let mut report = EquivReport {
        verdict: verdict.label(),
        witness: None,
        residue_alignment: None,
        residual: None,
        reason: None,
        seed: s.seed,
        trials: s.trials,
        tol: s.tol,
    };
    let code = match verdict {
        Equivalence::Equivalent {
            witness,
            residue_alignment,
            residual,
        } => {
            report.witness = Some(mat(&witness));
            report.residue_alignment = Some(mat(&residue_alignment));
            report.residual = Some(residual);
            EXIT_OK
        }
        Equivalence::InequivalentCertified { reason } => {
            report.reason = Some(reason);
            EXIT_INEQUIVALENT
        }
        Equivalence::Undecided { reason } => {
            report.reason = Some(reason);
            EXIT_UNDECIDED
        }
    };
    let mut out = Output::ok(render(s.json, &report, || report.text()));
    out.code = code;
    Ok(out)
}

/// CSV of a sampled transport: `theta` (path parameter in `[0, 1]`), then
/// real and imaginary parts of each entry in row-major order.
fn samples_csv(t: &levelt_core::local::Transport, n: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["theta".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_{}_{}", i + 1, j + 1));
            header.push(format!("im_{}_{}", i + 1, j + 1));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for sample in &t.samples {
        let mut row = vec![format!("{}", sample.param)];
        for i in 0..n {
            for j in 0..n {
                let z: Complex64 = sample.matrix[(i, j)];
                row.push(format!("{}", z.re));
                row.push(format!("{}", z.im));
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn global(path: &Path, samples: Option<&Path>, s: &Settings) -> Result<Output, Failure> {
    let file = SystemFile::parse(&read_file(path)?)?;
    let sys = file.to_system()??;
    let n = sys.dim();
    let report = assemble_global_datum(&sys, s.rtol, s.tol, s.degree)?;
    let poles = report
        .poles
        .iter()
        .map(|p| {
            let (search, failure) = match &p.search {
                HSearch::Conjugacy => ("conjugacy", None),
                HSearch::LocalGauge => ("local-gauge", None),
                HSearch::CompatibilitySearchFailure { reason } => ("failed", Some(reason.clone())),
            };
            PoleSection {
                index: p.index,
                pole: pair(p.pole),
                monodromy: mat(&p.monodromy),
                char_poly_residual: p.char_poly_residual,
                spectral_compatible: p.spectral_compatible,
                search,
                failure,
                datum: p.datum.as_ref().map(DatumFile::from_datum),
                validation: p.validation.map(Validation::from),
            }
        })
        .collect();
    let section = GlobalSection {
        input: file,
        tolerances: s.tolerances(n),
        check_tol: report.check_tol,
        basepoint: pair(sys.basepoint),
        order: report.monodromy.generators.order.clone(),
        residue_at_infinity: mat(&report.residue_at_infinity),
        m_infinity: mat(&report.monodromy.m_infinity),
        product_residual: report.monodromy.product_residual,
        rtol_used: report.monodromy.rtol_used,
        all_compatible: report.all_compatible(),
        poles,
    };
    let mut out = Output::ok(render(s.json, &section, || section.text()));
    if let Some(dir) = samples {
        for l in &report.monodromy.generators.loops {
            let t = levelt_core::global::system_transport(&sys, &l.path, report.monodromy.rtol_used, true)?;
            out.files
                .push((dir.join(format!("pole_{}.csv", l.pole_index)), samples_csv(&t, n)));
        }
    }
    Ok(out)
}
