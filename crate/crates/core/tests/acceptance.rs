//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Runs without the libtest harness so the result lines are always printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use burnside_core::algebra::{algebra_closure, division_degree};
use burnside_core::burnside::{
    check_burnside_general_field, check_spectra_descent, semigroup_closure, verify_report, Status, Verdict, Witness,
    DEFAULT_CAP,
};
use burnside_core::modstruct::{
    exhaustive_search, find_invariant_subspace, norton_search, triangularize_family, verify_verdict,
    IrreducibilityVerdict, NotTriangularizable, VerdictStatus, DEFAULT_BUDGET,
};
use burnside_core::quat::{
    nilpotent_span_decomposition, real_representation, verify_decomposition, QuaternionMatrix,
};
use burnside_core::{ExactMatrix, FieldDescriptor, Quaternion};
use common::*;
use num_rational::BigRational;
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(format!("{took:.2?}"))
    }
}

fn small_fields() -> Vec<FieldDescriptor> {
    vec![gf(2), gf(3), FieldDescriptor::rationals()]
}

fn matrix_unit_semigroups() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for f in small_fields() {
        for n in 2..=4 {
            let gens = matrix_units(&f, n);
            let report = check_burnside_general_field(&gens, DEFAULT_CAP, 0, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let tag = format!("{f}, n = {n}");
            ensure!(report.closure.complete, "{tag}: closure incomplete");
            ensure!(report.closure.elements == n * n + 1, "{tag}: {} elements", report.closure.elements);
            ensure!(report.hypotheses[0].status == Status::Holds, "{tag}: hypothesis {}", report.hypotheses[0].status);
            ensure!(
                report.conclusion.data.irreducibility == VerdictStatus::Irreducible,
                "{tag}: {}",
                report.conclusion.data.irreducibility
            );
            let closure = semigroup_closure(&gens, DEFAULT_CAP).unwrap();
            let oracle_dim = span_dim(&f, &closure.elements);
            ensure!(
                report.conclusion.data.algebra_dim == n * n && oracle_dim == n * n,
                "{tag}: dim {} (oracle {oracle_dim})",
                report.conclusion.data.algebra_dim
            );
            ensure!(report.verdict == Verdict::TheoremInstanceVerified, "{tag}: verdict {}", report.verdict);
            let problems = verify_report(&report).map_err(|e| e.to_string())?;
            ensure!(problems.is_empty(), "{tag}: report recheck {problems:?}");
            cases += 1;
        }
    }
    let time = within(start, Duration::from_secs(5))?;
    Ok(format!("{cases} instances verified in {time}"))
}

fn gf4_copy() -> Outcome {
    let w = omega();
    let report = check_burnside_general_field(std::slice::from_ref(&w), DEFAULT_CAP, 0, DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    let data = &report.conclusion.data;
    ensure!(data.irreducibility == VerdictStatus::Irreducible, "irreducibility {}", data.irreducibility);
    ensure!(data.algebra_dim == 2 && data.n_squared == 4, "dim {}", data.algebra_dim);
    let h = &report.hypotheses[0];
    ensure!(h.status == Status::Fails, "hypothesis {}", h.status);
    match &h.witness {
        Some(Witness::Element { matrix, .. }) => ensure!(*matrix == w.to_strings(), "witness {matrix:?}"),
        other => return Err(format!("witness {other:?}")),
    }
    ensure!(eigenvalue_count(&w) == 0, "omega has an eigenvalue in GF(2)");
    ensure!(report.verdict == Verdict::HypothesisFails, "verdict {}", report.verdict);
    Ok("irreducible, dim 2, witness omega, HypothesisFails".into())
}

fn division_degrees() -> Outcome {
    let q = FieldDescriptor::rationals();
    let cases = [
        ("M_2(Q)", matrix_units(&q, 2), 1usize),
        ("GF(4) in M_2(GF(2))", vec![omega()], 2),
        ("H in M_4(Q)", quaternion_form(), 4),
    ];
    let mut seen = Vec::new();
    for (name, gens, expected) in cases {
        let f = gens[0].field().clone();
        let n = gens[0].rows();
        let alg = algebra_closure(&gens, true).map_err(|e| e.to_string())?;
        ensure!(
            find_invariant_subspace(&gens, 0, DEFAULT_BUDGET).map_err(|e| e.to_string())?.is_irreducible(),
            "{name}: not certified irreducible"
        );
        let d = division_degree(&alg, true).map_err(|e| e.to_string())?;
        let oracle = centralizer_dim(&f, alg.basis());
        ensure!(d.r == expected && oracle == expected, "{name}: r = {} (oracle {oracle}), expected {expected}", d.r);
        ensure!(alg.dim() * d.r == n * n && n % d.r == 0, "{name}: dim {} with r = {}", alg.dim(), d.r);
        ensure!(d.dim_check, "{name}: dimension check");
        seen.push(format!("r={}", d.r));
    }
    Ok(seen.join(", "))
}

/// Generators `E_{σ0 σ1}, …, E_{σ(n-1) σ0}` for a random cyclic order σ; they
/// generate every matrix unit.
fn cyclic_units(f: &FieldDescriptor, n: usize, rng: &mut impl Rng) -> Vec<ExactMatrix> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    (0..n).map(|i| ExactMatrix::unit(f, n, order[i], order[(i + 1) % n])).collect()
}

fn descents() -> Outcome {
    let start = Instant::now();
    let mut successes = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    for (sub_q, ext_q) in [(2, 4), (3, 9)] {
        let sub = gf(sub_q);
        let k = gf(ext_q);
        for n in 2..=3 {
            let mut rng = rng(1000 * ext_q + n as u64);
            for trial in 0..100 {
                total += 1;
                let q = random_invertible(&sub, n, &mut rng);
                let rational: Vec<ExactMatrix> = cyclic_units(&sub, n, &mut rng).iter().map(|g| conjugate(g, &q)).collect();
                let p = random_invertible(&k, n, &mut rng);
                let gens: Vec<ExactMatrix> = rational
                    .iter()
                    .map(|g| conjugate(&embed(&k, &sub, g), &p))
                    .collect();
                match descent_case(&gens, &sub, trial) {
                    Ok(()) => successes += 1,
                    Err(e) => failures.push(format!("({sub}, {k}) n = {n} #{trial}: {e}")),
                }
            }
        }
    }
    ensure!(failures.is_empty(), "{successes}/{total}; first failure {}", failures[0]);
    let time = within(start, Duration::from_secs(60))?;
    Ok(format!("{successes}/{total} in {time}"))
}

fn descent_case(gens: &[ExactMatrix], sub: &FieldDescriptor, seed: usize) -> Result<(), String> {
    let k = gens[0].field().clone();
    let n = gens[0].rows();
    let out = check_spectra_descent(gens, sub, DEFAULT_CAP, seed as u64, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let report = &out.report;
    ensure!(report.hypotheses.iter().all(|h| h.status == Status::Holds), "hypotheses {:?}", report.hypotheses);
    ensure!(report.conclusion.data.algebra_dim_subfield == Some(n * n), "F-dimension {:?}", report.conclusion.data.algebra_dim_subfield);
    ensure!(report.verdict == Verdict::TheoremInstanceVerified, "verdict {}", report.verdict);
    let sim = out.similarity.ok_or("no similarity")?;
    let closure = semigroup_closure(gens, DEFAULT_CAP).unwrap();
    let mut pulled = Vec::new();
    for s in &closure.elements {
        let c = conjugate(s, &sim.p);
        let mut entries = Vec::with_capacity(n * n);
        for x in c.entries() {
            entries.push(pull_back(&k, sub, x).ok_or_else(|| format!("entry {} of P⁻¹SP outside F", k.format_scalar(x)))?);
        }
        pulled.push(ExactMatrix::new(sub, n, n, entries).unwrap());
    }
    ensure!(span_dim(sub, &pulled) == n * n, "conjugated F-span has dimension {}", span_dim(sub, &pulled));
    Ok(())
}

fn random_quaternion_matrix(n: usize, rng: &mut impl Rng) -> QuaternionMatrix {
    let mut coef = || {
        let num = rng.random_range(-9i64..=9);
        let den = rng.random_range(1i64..=4);
        BigRational::new(num.into(), den.into())
    };
    QuaternionMatrix::from_fn(n, |_, _| Quaternion::new(coef(), coef(), coef(), coef()))
}

fn quaternion_decompositions() -> Outcome {
    let start = Instant::now();
    let mut terms = 0;
    for n in 2..=4 {
        let mut rng = rng(77 + n as u64);
        for trial in 0..100 {
            let x = random_quaternion_matrix(n, &mut rng);
            let dec = nilpotent_span_decomposition(&x).map_err(|e| format!("n = {n} #{trial}: {e}"))?;
            ensure!(dec.reconstruct() == x, "n = {n} #{trial}: reconstruction differs");
            for t in &dec.terms {
                ensure!(t.matrix.mul(&t.matrix).is_zero(), "n = {n} #{trial}: {:?} does not square to zero", t.pattern);
                let r = real_representation(&t.matrix);
                ensure!((&r * &r).is_zero(), "n = {n} #{trial}: real form does not square to zero");
            }
            ensure!(verify_decomposition(&x, &dec), "n = {n} #{trial}: verifier rejects");
            terms += dec.terms.len();
        }
    }
    let example = QuaternionMatrix::parse(&[vec!["i", "j"], vec!["-j", "i"]]).unwrap();
    ensure!(example.mul(&example).is_zero(), "[[i, j], [-j, i]] does not square to zero");
    let time = within(start, Duration::from_secs(30))?;
    Ok(format!("300 matrices, {terms} square-zero terms, [[i, j], [-j, i]]² = 0, {time}"))
}

/// Random generators, or block upper triangular ones conjugated at random so
/// that reducible families are common.
fn random_family(f: &FieldDescriptor, rng: &mut impl Rng) -> Vec<ExactMatrix> {
    let n = rng.random_range(1..=3);
    let count = rng.random_range(1..=3);
    if n > 1 && rng.random_bool(0.5) {
        let split = rng.random_range(1..n);
        let q = random_invertible(f, n, rng);
        (0..count)
            .map(|_| {
                let m = ExactMatrix::from_fn(f, n, n, |i, j| if i >= split && j < split { f.zero() } else { f.random(rng) });
                conjugate(&m, &q)
            })
            .collect()
    } else {
        (0..count).map(|_| random_matrix(f, n, rng)).collect()
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng(6);
    let (mut irreducible, mut reducible) = (0, 0);
    for trial in 0..100 {
        let f = gf(if trial % 2 == 0 { 2 } else { 3 });
        let gens = random_family(&f, &mut rng);
        let norton = norton_search(&gens, trial, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let exhaustive = exhaustive_search(&gens).map_err(|e| e.to_string())?;
        ensure!(
            !matches!(norton, IrreducibilityVerdict::Inconclusive { .. }),
            "#{trial}: Norton inconclusive over {f}"
        );
        ensure!(
            norton.is_irreducible() == exhaustive.is_irreducible(),
            "#{trial}: Norton {} vs exhaustive {} over {f}",
            norton.status(),
            exhaustive.status()
        );
        ensure!(verify_verdict(&gens, &norton).map_err(|e| e.to_string())?, "#{trial}: witness fails recheck");
        if norton.is_irreducible() {
            irreducible += 1;
        } else {
            reducible += 1;
        }
    }
    Ok(format!("100 families ({irreducible} irreducible, {reducible} reducible), 0 disagreements, 0 inconclusive"))
}

fn no_counterexamples() -> Outcome {
    const CAP: usize = 2000;
    let start = Instant::now();
    let mut rng = rng(7);
    let (mut complete, mut skipped) = (0, 0);
    let mut verdicts = std::collections::BTreeMap::new();
    while complete < 1000 {
        let f = gf(if rng.random_bool(0.5) { 2 } else { 3 });
        let n = rng.random_range(1..=3);
        let count = rng.random_range(1..=3);
        let gens: Vec<ExactMatrix> = (0..count).map(|_| random_matrix(&f, n, &mut rng)).collect();
        let report = check_burnside_general_field(&gens, CAP, complete as u64, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        if !report.closure.complete {
            skipped += 1;
            continue;
        }
        complete += 1;
        ensure!(
            report.verdict != Verdict::CounterexampleCandidate,
            "counterexample candidate over {f}: {:?}",
            report.input.generators
        );
        let closure = semigroup_closure(&gens, CAP).unwrap();
        let oracle_holds = closure.elements.iter().all(|m| eigenvalue_count(m) == n);
        let h1 = report.hypotheses[0].status;
        ensure!(oracle_holds == (h1 == Status::Holds), "hypothesis {h1} but eigenvalue oracle says {oracle_holds}");
        *verdicts.entry(report.verdict.to_string()).or_insert(0) += 1;
    }
    let time = within(start, Duration::from_secs(300))?;
    Ok(format!("{complete} complete closures ({skipped} over cap skipped), verdicts {verdicts:?}, {time}"))
}

fn triangularization() -> Outcome {
    let fields = vec![gf(2), gf(3), gf(4), FieldDescriptor::rationals()];
    for f in &fields {
        let mut rng = rng(8 + f.order().unwrap_or(0));
        for trial in 0..100 {
            let n = rng.random_range(1..=4);
            let count = rng.random_range(1..=3);
            let q = random_invertible(f, n, &mut rng);
            let gens: Vec<ExactMatrix> =
                (0..count).map(|_| conjugate(&random_upper_triangular(f, n, &mut rng), &q)).collect();
            let t = triangularize_family(&gens)
                .map_err(|e| e.to_string())?
                .map_err(|e| format!("{f} #{trial}: {e}"))?;
            ensure!(t.chain.verify(&gens), "{f} #{trial}: chain not invariant");
            for g in &gens {
                ensure!(conjugate(g, &t.p).is_upper_triangular(), "{f} #{trial}: P⁻¹AP not upper triangular");
            }
        }
    }
    for f in small_fields() {
        for n in 2..=4 {
            match triangularize_family(&matrix_units(&f, n)).map_err(|e| e.to_string())? {
                Err(NotTriangularizable::NoCommonEigenvector { .. }) => {}
                Err(other) => return Err(format!("{f}, n = {n}: unexpected {other}")),
                Ok(_) => return Err(format!("{f}, n = {n}: matrix units triangularized")),
            }
        }
    }
    Ok(format!("{} fields x 100 families triangularized, 9 matrix-unit families rejected", fields.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("matrix-unit semigroups verify the theorem", matrix_unit_semigroups),
        ("GF(4) copy fails the hypothesis", gf4_copy),
        ("division degree r with dim = n²/r", division_degrees),
        ("descent to the subfield", descents),
        ("quaternion square-zero decomposition", quaternion_decompositions),
        ("Norton agrees with exhaustive search", oracle_equivalence),
        ("no counterexample candidates", no_counterexamples),
        ("triangularization soundness", triangularization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {}  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
