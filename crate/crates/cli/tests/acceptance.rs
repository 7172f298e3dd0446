//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

// `!(x > t)` comparisons are meant to be true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::Command;

use levelt_core::generate;
use levelt_core::linalg::{
    c64, diag, diag_real, elementary, identity, inverse, mat_pow, random, CMatrix, SpectralData, TWO_PI_I,
};
use levelt_core::*;
use rand::Rng;

const RTOL: f64 = 1e-10;

type Outcome = std::result::Result<String, String>;

/// Worst value seen for one named quantity, checked against a bound.
struct Worst {
    name: &'static str,
    bound: f64,
    value: f64,
    at: String,
}

impl Worst {
    fn new(name: &'static str, bound: f64) -> Self {
        Worst { name, bound, value: 0.0, at: String::new() }
    }

    fn record(&mut self, value: f64, at: impl FnOnce() -> String) {
        if !(value <= self.value) {
            self.value = value;
            self.at = at();
        }
    }

    fn ok(&self) -> bool {
        self.value <= self.bound
    }

    fn line(&self) -> String {
        if self.ok() {
            format!("{} {:.1e} <= {:.0e}", self.name, self.value, self.bound)
        } else {
            format!("{} {:.1e} > {:.0e} at {}", self.name, self.value, self.bound, self.at)
        }
    }
}

fn summarize(checks: &[&Worst], extra: &str) -> Outcome {
    let text: Vec<String> = checks.iter().map(|w| w.line()).collect();
    let mut text = text.join("; ");
    if !extra.is_empty() {
        text = format!("{extra}; {text}");
    }
    if checks.iter().all(|w| w.ok()) {
        Ok(text)
    } else {
        Err(text)
    }
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn err<E: std::fmt::Display>(ctx: impl std::fmt::Display) -> impl FnOnce(E) -> String {
    move |e| format!("{ctx}: {e}")
}

/// `||prod_i (s - lambda_i)|| / prod_i max(1, ||s - lambda_i||)`: zero iff
/// the minimal polynomial of `s` has simple roots `lambda_i`.
fn diagonalizability_residual(s: &CMatrix, lambdas: &[Complex64]) -> f64 {
    let n = s.nrows();
    let mut prod = identity(n);
    let mut scale = 1.0;
    for &l in lambdas {
        let f = s - identity(n) * l;
        scale *= f.norm().max(1.0);
        prod *= f;
    }
    prod.norm() / scale
}

fn cluster_values(sd: &SpectralData) -> Vec<Complex64> {
    sd.clusters.iter().map(|c| c.eigenvalue).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = random::rng(1001);
    let grid = [c64(0.5, 0.0), c64(-1.0, 0.5), c64(0.0, 1.5), c64(-0.8, -0.7), c64(1.2, -0.3)];
    let mut recomp = Worst::new("recomposition", 1e-8);
    let mut comm = Worst::new("commutation", 1e-8);
    let mut nil = Worst::new("nilpotency/unipotency", 1e-8);
    let mut diagz = Worst::new("diagonalizability", 1e-8);
    let mut expjc = Worst::new("exp(JC) vs JC(exp)", 1e-7);
    for k in 0..200 {
        let n = [2, 3, 4, 6][k % 4];
        // Even cases: generic matrices. Odd cases: prescribed Jordan blocks
        // of size at most 3, which split by about eps^(1/3) and need a
        // correspondingly wider clustering radius.
        let (x, tol) = if k % 2 == 0 {
            let norm = rng.gen_range(0.5..5.0);
            (random::complex_matrix(&mut rng, n, norm), 1e-9)
        } else {
            let mut blocks = Vec::new();
            let mut left = n;
            while left > 0 {
                let b = rng.gen_range(1..=left.min(3));
                blocks.push(b);
                left -= b;
            }
            let ev: Vec<Complex64> = (0..blocks.len()).map(|i| grid[(i + k) % grid.len()]).collect();
            let c = generate::jordan_matrix(&mut rng, &ev, &blocks, 0.3).map_err(err("jordan_matrix"))?;
            let f = c.x.norm();
            let x = if f > 5.0 { c.x * c64(5.0 / f, 0.0) } else { c.x };
            (x, 1e-4)
        };
        let at = || format!("case {k} (n = {n})");
        let scale = x.norm().max(1.0);

        let jc = additive_jc(&x, tol).map_err(err(at()))?;
        recomp.record((&jc.s + &jc.n - &x).norm() / scale, at);
        comm.record((&jc.s * &jc.n - &jc.n * &jc.s).norm() / (scale * scale), at);
        nil.record(mat_pow(&jc.n, n).norm() / scale.powi(n as i32), at);
        diagz.record(diagonalizability_residual(&jc.s, &cluster_values(&jc.spectral)), at);

        let m = mat_exp(&x).map_err(err(at()))?;
        let mjc = multiplicative_jc(&m, tol).map_err(err(at()))?;
        let mscale = m.norm().max(1.0);
        recomp.record((&mjc.ms * &mjc.mu - &m).norm() / mscale, at);
        comm.record(
            (&mjc.ms * &mjc.mu - &mjc.mu * &mjc.ms).norm() / (mjc.ms.norm() * mjc.mu.norm()).max(1.0),
            at,
        );
        let u = &mjc.mu - identity(n);
        nil.record(mat_pow(&u, n).norm() / u.norm().max(1.0).powi(n as i32), at);
        diagz.record(diagonalizability_residual(&mjc.ms, &cluster_values(&mjc.spectral)), at);

        let exp_s = mat_exp(&jc.s).map_err(err(at()))?;
        let exp_n = mat_exp(&jc.n).map_err(err(at()))?;
        expjc.record(rel(&exp_s, &mjc.ms).max(rel(&exp_n, &mjc.mu)), at);
    }
    summarize(&[&recomp, &comm, &nil, &diagz, &expjc], "200 matrices")
}

fn criterion_2() -> Outcome {
    let mut rng = random::rng(1002);
    // Pairwise gaps of at least 1.1, so that z^w <= 10^-6.6 at z = 10^-6
    // for every positive weight w.
    let levels = [-1.2, 0.0, 1.1, 2.5];
    let mut complete = Worst::new("completeness", 1e-9);
    let mut weight_eq = Worst::new("weight equation", 1e-9);
    let mut mult = Worst::new("chi multiplicativity", 1e-9);
    let mut idem = Worst::new("chi idempotence", 1e-9);
    let mut limit = Worst::new("chi vs limit", 1e-5);
    let z: f64 = 1e-6;
    for k in 0..100 {
        let n = 2 + k % 3;
        let d: Vec<f64> = (0..n).map(|_| levels[rng.gen_range(0..levels.len())]).collect();
        let p = random::near_identity(&mut rng, n, 0.5);
        let p_inv = inverse(&p).map_err(err("inverse"))?;
        let a = &p * diag_real(&d) * &p_inv;
        let at = || format!("case {k}, a = diag{d:?}");

        let g = grade(&a, 1e-9).map_err(err(at()))?;
        let x = random::complex_matrix(&mut rng, n, 2.0);
        let comps = g.components(&x);
        let sum = comps.iter().fold(CMatrix::zeros(n, n), |acc, (_, c)| acc + c);
        complete.record(rel(&sum, &x), at);
        for (w, c) in &comps {
            let r = (&a * c - c * &a - c * *w).norm() / (x.norm() * a.norm().max(1.0));
            weight_eq.record(r, at);
        }

        // Random elements of P(a): nonnegative weights d_i - d_j >= 0 in the
        // eigenbasis of a.
        let parabolic = |rng: &mut random::SeededRng| {
            let inner = CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c64(1.5, 0.0) + random::complex_unit(rng) * 0.5
                } else if d[i] >= d[j] {
                    random::complex_unit(rng)
                } else {
                    c64(0.0, 0.0)
                }
            });
            (&p * &inner * &p_inv, inner)
        };
        let (g1, inner1) = parabolic(&mut rng);
        let (g2, _) = parabolic(&mut rng);
        let chi_of = |m: &CMatrix| chi(&a, m, LeviVariant::Parabolic, 1e-9);
        let c1 = chi_of(&g1).map_err(err(at()))?;
        let c2 = chi_of(&g2).map_err(err(at()))?;
        let c12 = chi_of(&(&g1 * &g2)).map_err(err(at()))?;
        mult.record(rel(&c12, &(&c1 * &c2)), at);
        idem.record(rel(&chi_of(&c1).map_err(err(at()))?, &c1), at);

        // z^a g z^-a in the eigenbasis of a: entry (i, j) scales by
        // z^(d_i - d_j).
        let scaled = CMatrix::from_fn(n, n, |i, j| inner1[(i, j)] * z.powf(d[i] - d[j]));
        let lim = &p * scaled * &p_inv;
        limit.record((&lim - &c1).norm() / g1.norm(), at);
    }
    summarize(&[&complete, &weight_eq, &mult, &idem, &limit], "100 cases")
}

fn criterion_3() -> Outcome {
    let mut rng = random::rng(1003);
    let mut constant = Worst::new("constant connections", 1e-8);
    for k in 0..20 {
        let n = 1 + k % 3;
        // exp(2 pi i A0) from the eigen-decomposition used to build A0.
        let ev: Vec<Complex64> = (0..n).map(|_| random::complex_unit(&mut rng)).collect();
        let p = random::near_identity(&mut rng, n, 0.5);
        let p_inv = inverse(&p).map_err(err("inverse"))?;
        let a0 = &p * diag(&ev) * &p_inv;
        let expected = &p * diag(&ev.iter().map(|l| (TWO_PI_I * l).exp()).collect::<Vec<_>>()) * &p_inv;
        let conn = PolyConnection::constant(a0).map_err(err("constant"))?;
        let m = monodromy(&conn, RTOL).map_err(err(format!("constant case {k}")))?;
        constant.record(rel(&m, &expected), || format!("constant case {k}"));
    }
    let mut resonant = Worst::new("resonant family", 1e-7);
    for c in [c64(1.0, 0.0), c64(-2.0, 0.0), c64(0.0, 1.0)] {
        let m = monodromy(&generate::resonant_family(c), RTOL).map_err(err(format!("c = {c}")))?;
        let expected = identity(2) + elementary(2, 0, 1) * (TWO_PI_I * c);
        resonant.record((m - expected).norm(), || format!("c = {c}"));
    }
    summarize(&[&constant, &resonant], "")
}

fn criterion_4() -> Outcome {
    let mut rng = random::rng(1004);
    let resonant_residues = [
        diag_real(&[1.0, 0.0]),
        diag_real(&[2.0, 1.0, 0.0]),
        diag_real(&[1.0, 0.0, 0.0]),
        diag(&[c64(0.5, 0.2), c64(-0.5, 0.2)]),
    ];
    let mut wrong = Vec::new();
    for k in 0..50 {
        let a0 = if k % 2 == 0 {
            random::complex_matrix(&mut rng, 2 + k % 3, 1.0)
        } else {
            resonant_residues[(k / 2) % resonant_residues.len()].clone()
        };
        let (conn, _) = generate::gauge_of_constant(&mut rng, &a0).map_err(err("gauge_of_constant"))?;
        let lin = linearizability(&conn, RTOL).map_err(err(format!("gauge case {k}")))?;
        if !lin.linearizable {
            wrong.push(format!("gauge case {k}"));
        }
    }
    for c in [c64(1.0, 0.0), c64(-2.0, 0.0), c64(0.0, 1.0), c64(0.01, 0.0)] {
        let lin = linearizability(&generate::resonant_family(c), RTOL).map_err(err(format!("c = {c}")))?;
        if lin.linearizable {
            wrong.push(format!("resonant c = {c}"));
        }
    }
    if wrong.is_empty() {
        Ok("54/54 verdicts correct".into())
    } else {
        Err(format!("wrong verdicts: {}", wrong.join(", ")))
    }
}

fn criterion_5() -> Outcome {
    let mut rng = random::rng(1005);
    let mut conj = Worst::new("h M(R(d)) h^-1 vs M", 1e-6);
    let mut residue_mismatch = Vec::new();
    let mut invariant_mismatch = Vec::new();
    for k in 0..100 {
        let n = 1 + k % 4;
        let max_weight = (k / 4 % 4) as i64;
        let d = generate::valid_datum(&mut rng, n, max_weight).map_err(err("valid_datum"))?;
        let at = || format!("datum {k} (n = {n}, weights <= {max_weight})");
        let conn = functor_r(&d, 1e-9).map_err(err(at()))?;
        if residue(&conn) != d.a {
            residue_mismatch.push(at());
        }
        // The Levelt form has monodromy M' = h^-1 M h at the basepoint 1.
        let m = monodromy(&conn, RTOL).map_err(err(at()))?;
        let h_inv = inverse(&d.h).map_err(err(at()))?;
        conj.record(rel(&(&d.h * &m * &h_inv), &d.m), at);

        let back = functor_l(&conn, RTOL, DEFAULT_DEGREE).map_err(err(at()))?;
        let inv_back = datum_invariants(&back.datum, 1e-6).map_err(err(at()))?;
        let inv = datum_invariants(&d, 1e-6).map_err(err(at()))?;
        if !inv_back.agrees_with(&inv, 1e-6) {
            invariant_mismatch.push(format!("{}: {} vs {}", at(), inv_back.describe(), inv.describe()));
        }
    }
    let mut text = summarize(&[&conj], "100 data");
    for (label, list) in [("residue differs", &residue_mismatch), ("invariants differ", &invariant_mismatch)] {
        if !list.is_empty() {
            let msg = format!("{label}: {}", list.join("; "));
            text = Err(match text {
                Ok(t) | Err(t) => format!("{t}; {msg}"),
            });
        }
    }
    text
}

fn criterion_6() -> Outcome {
    let mut rng = random::rng(1006);
    let mut conns: Vec<(String, PolyConnection)> = [c64(1.0, 0.0), c64(-2.0, 0.0), c64(0.0, 1.0)]
        .into_iter()
        .map(|c| (format!("resonant c = {c}"), generate::resonant_family(c)))
        .collect();
    for k in 0..4 {
        let a0 = if k % 2 == 0 { diag_real(&[1.0, 0.0]) } else { random::complex_matrix(&mut rng, 3, 1.0) };
        let (conn, _) = generate::gauge_of_constant(&mut rng, &a0).map_err(err("gauge_of_constant"))?;
        conns.push((format!("gauge case {k}"), conn));
    }
    for k in 0..3 {
        let coeffs = (0..3).map(|_| random::complex_matrix(&mut rng, 2, 0.8)).collect();
        conns.push((format!("random degree-2 case {k}"), PolyConnection::new(coeffs).map_err(err("new"))?));
    }
    let mut worst = Worst::new("cocycle residual", 100.0 * RTOL);
    for (seed, (name, conn)) in conns.iter().enumerate() {
        let r = verify_cocycle(conn, 20, seed as u64, RTOL).map_err(err(name))?;
        worst.record(r, || name.clone());
    }
    summarize(&[&worst], "10 connections x 20 triples")
}

fn criterion_7() -> Outcome {
    let family = [c64(0.0, 0.0), c64(1.0, 0.0), c64(-2.0, 0.0), c64(0.0, 1.0), c64(0.5, 0.5), c64(3.0, 0.0)];
    let datum = |c: Complex64| {
        MonodromyDatum::new(
            identity(2) + elementary(2, 0, 1) * (TWO_PI_I * c),
            identity(2),
            diag_real(&[1.0, 0.0]),
        )
    };
    let mut wrong = Vec::new();
    let mut undecided = 0;
    let mut count = 0;
    for seed in 0..10u64 {
        for &c1 in &family {
            for &c2 in &family {
                let d1 = datum(c1).map_err(err("datum"))?;
                let d2 = datum(c2).map_err(err("datum"))?;
                let verdict = equivalent(&d1, &d2, DEFAULT_TRIALS, seed, DEFAULT_TOL).map_err(err("equivalent"))?;
                let expected = if (c1.norm() == 0.0) == (c2.norm() == 0.0) { "equivalent" } else { "inequivalent" };
                count += 1;
                if verdict.label() == "undecided" {
                    undecided += 1;
                }
                if verdict.label() != expected {
                    wrong.push(format!("seed {seed}, c = {c1} vs {c2}: {}", verdict.label()));
                }
            }
        }
    }
    let text = format!("{count} verdicts over 10 seeds, {} wrong, {undecided} undecided", wrong.len());
    if wrong.is_empty() && undecided == 0 {
        Ok(text)
    } else {
        Err(format!("{text}: {}", wrong.join("; ")))
    }
}

fn criterion_8() -> Outcome {
    let mut rng = random::rng(1008);
    let mut product = Worst::new("product residual", 1e-8);
    let mut charpoly = Worst::new("char-poly residual", 1e-6);
    let mut one_pole = Worst::new("one-pole vs local", 1e-8);
    let mut incompatible = Vec::new();
    for k in 0..30 {
        let m = 1 + k % 4;
        let n = 1 + (k / 4) % 3;
        let sys = generate::fuchsian_system(&mut rng, m, n, 0.8).map_err(err("fuchsian_system"))?;
        let at = || format!("system {k} (m = {m}, n = {n})");
        let report = assemble_global_datum(&sys, RTOL, DEFAULT_TOL, DEFAULT_DEGREE).map_err(err(at()))?;
        product.record(report.monodromy.product_residual, at);
        for p in &report.poles {
            charpoly.record(p.char_poly_residual, at);
            if !p.spectral_compatible {
                incompatible.push(format!("{} pole {}", at(), p.index));
            }
        }
        if m == 1 {
            let conn = PolyConnection::constant(sys.residues[0].clone()).map_err(err(at()))?;
            let local = monodromy(&conn, RTOL).map_err(err(at()))?;
            one_pole.record(rel(&report.monodromy.monodromies[0], &local), at);
        }
    }
    let text = summarize(&[&product, &charpoly, &one_pole], "30 systems");
    if incompatible.is_empty() {
        text
    } else {
        Err(format!("{}; not spectrally compatible: {}", text.unwrap_or_else(|e| e), incompatible.join(", ")))
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

fn levelt(args: &[&str]) -> std::result::Result<Run, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_levelt"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    Ok(Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
    })
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(err("tempdir"))?;
    let p = |name: &str| fixture(name).to_string_lossy().into_owned();
    let nf_out = dir.path().join("normal_form.json").to_string_lossy().into_owned();
    let samples = dir.path().join("samples").to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["analyze".into(), p("resonant.json")],
        vec!["--json".into(), "analyze".into(), p("constant_third.json")],
        vec!["normal-form".into(), p("datum_resonant.json"), "-o".into(), nf_out.clone()],
        vec!["--seed".into(), "3".into(), "equiv".into(), p("datum_resonant.json"), p("datum_resonant_scaled.json")],
        vec!["--json".into(), "--seed".into(), "3".into(), "equiv".into(), p("datum_resonant.json"), p("datum_trivial_resonant.json")],
        vec!["global".into(), p("system_two_pole.json"), "--samples".into(), samples.clone()],
    ];
    let read_outputs = || -> Vec<Vec<u8>> {
        let mut files = vec![std::fs::read(&nf_out).unwrap_or_default()];
        if let Ok(entries) = std::fs::read_dir(&samples) {
            let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
            paths.sort();
            files.extend(paths.iter().map(|p| std::fs::read(p).unwrap_or_default()));
        }
        files
    };
    let mut first = Vec::new();
    for args in &runs {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        first.push(levelt(&a)?);
    }
    let files_first = read_outputs();
    let mut problems = Vec::new();
    for (args, r1) in runs.iter().zip(&first) {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let r2 = levelt(&a)?;
        if r1.stdout != r2.stdout || r1.code != r2.code {
            problems.push(format!("output differs between runs of {}", args.join(" ")));
        }
    }
    if read_outputs() != files_first {
        problems.push("written files differ between runs".into());
    }
    if files_first.len() < 3 {
        problems.push("normal-form or sample files missing".into());
    }

    let golden: Vec<(Vec<String>, i32)> = vec![
        (vec!["analyze".into(), p("malformed.json")], 1),
        (vec!["analyze".into(), p("missing.json")], 1),
        (vec!["normal-form".into(), p("datum_invalid.json")], 2),
        (vec!["analyze".into(), p("ambiguous.json")], 3),
        (vec!["analyze".into(), p("resonant.json")], 0),
        (vec!["equiv".into(), p("datum_resonant.json"), p("datum_trivial_resonant.json")], 4),
    ];
    for (args, expected) in golden {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = levelt(&a)?;
        if r.code != expected {
            problems.push(format!("{}: exit {} instead of {expected}", args.join(" "), r.code));
        }
    }
    if problems.is_empty() {
        Ok(format!("{} commands byte-identical across runs, exit codes 0/1/2/3/4 as specified", runs.len()))
    } else {
        Err(problems.join("; "))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("Jordan-Chevalley", criterion_1),
        ("grading and chi", criterion_2),
        ("local monodromy oracle", criterion_3),
        ("linearizability", criterion_4),
        ("roundtrip R then L", criterion_5),
        ("cocycle identity", criterion_6),
        ("equivalence on diag(1,0) family", criterion_7),
        ("global systems", criterion_8),
        ("CLI determinism and exit codes", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let label = format!("{} {}", k + 1, name);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = std::time::Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {label}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {label}: FAIL ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
