//! Python bindings. Every entry point takes the text of a family file and
//! returns the machine report as a JSON string.

use burnside_core::burnside::{check_burnside_general_field, check_spectra_descent, verify_report, TheoremReport, DEFAULT_CAP};
use burnside_core::family::{parse_family, FamilyFile};
use burnside_core::modstruct::{composition_series, triangularize_family, ChopError, DEFAULT_BUDGET, DEFAULT_SEED};
use burnside_core::quat::{nilpotent_span_decomposition, DecompositionReport};
use burnside_core::report::{analyze as analyze_family, AnalysisReport, ChainReport, TriangularizeReport};
use burnside_core::{Error, ExactMatrix, FieldDescriptor};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::StructureViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn field_family(text: &str) -> PyResult<(FamilyFile, Vec<ExactMatrix>)> {
    let file = parse_family(text).map_err(py_err)?;
    let gens = file
        .field_matrices()
        .ok_or_else(|| PyValueError::new_err("expected a field file, not a quaternion file"))?
        .to_vec();
    Ok((file, gens))
}

/// Field, subfield, size and count of a family file, as a tuple.
#[pyfunction]
fn describe(text: &str) -> PyResult<(Option<String>, Option<String>, usize, usize)> {
    let file = parse_family(text).map_err(py_err)?;
    let count = match (file.field_matrices(), file.quaternion_matrices()) {
        (Some(m), _) => m.len(),
        (_, Some(m)) => m.len(),
        _ => 0,
    };
    Ok((
        file.field.as_ref().map(ToString::to_string),
        file.subfield.as_ref().map(ToString::to_string),
        file.n(),
        count,
    ))
}

#[pyfunction]
#[pyo3(signature = (text, cap = DEFAULT_CAP, seed = DEFAULT_SEED, budget = DEFAULT_BUDGET))]
fn analyze(text: &str, cap: usize, seed: u64, budget: usize) -> PyResult<String> {
    let (_, gens) = field_family(text)?;
    Ok(analyze_family(&gens, cap, seed, budget).map_err(py_err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (text, cap = DEFAULT_CAP, seed = DEFAULT_SEED, budget = DEFAULT_BUDGET))]
fn burnside_check(text: &str, cap: usize, seed: u64, budget: usize) -> PyResult<String> {
    let (_, gens) = field_family(text)?;
    Ok(check_burnside_general_field(&gens, cap, seed, budget).map_err(py_err)?.to_json())
}

/// `subfield` overrides the one named in the file.
#[pyfunction]
#[pyo3(signature = (text, subfield = None, cap = DEFAULT_CAP, seed = DEFAULT_SEED, budget = DEFAULT_BUDGET))]
fn descent_check(text: &str, subfield: Option<&str>, cap: usize, seed: u64, budget: usize) -> PyResult<String> {
    let (file, gens) = field_family(text)?;
    let sub = match (subfield, file.subfield) {
        (Some(spec), _) => FieldDescriptor::parse(spec).map_err(py_err)?,
        (None, Some(sub)) => sub,
        (None, None) => return Err(PyValueError::new_err("no subfield given")),
    };
    let out = check_spectra_descent(&gens, &sub, cap, seed, budget).map_err(py_err)?;
    Ok(out.report.to_json())
}

#[pyfunction]
fn triangularize(text: &str) -> PyResult<String> {
    let (_, gens) = field_family(text)?;
    let result = triangularize_family(&gens).map_err(py_err)?;
    Ok(TriangularizeReport::new(&gens, &result).to_json())
}

#[pyfunction]
#[pyo3(signature = (text, seed = DEFAULT_SEED, budget = DEFAULT_BUDGET))]
fn chop(text: &str, seed: u64, budget: usize) -> PyResult<String> {
    let (_, gens) = field_family(text)?;
    let params = burnside_core::burnside::Parameters { cap: DEFAULT_CAP, seed, budget };
    let report = match composition_series(&gens, seed, budget) {
        Ok(series) => ChainReport::new(&gens, params, &series, &[]),
        Err(ChopError::Incomplete(c)) => ChainReport::new(&gens, params, &c.partial, &c.unresolved),
        Err(ChopError::Invalid(e)) => return Err(py_err(e)),
    };
    Ok(report.to_json())
}

/// A JSON list with one decomposition per matrix in the file.
#[pyfunction]
fn quat_decompose(text: &str) -> PyResult<String> {
    let file = parse_family(text).map_err(py_err)?;
    let mats = file
        .quaternion_matrices()
        .ok_or_else(|| PyValueError::new_err("expected a quaternion file"))?;
    let reports = mats
        .iter()
        .map(|x| nilpotent_span_decomposition(x).map(|d| DecompositionReport::new(x, &d)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    Ok(serde_json::to_string_pretty(&reports).expect("reports serialize"))
}

/// Rechecks a machine report of the given kind (`theorem`, `analysis`,
/// `triangularize`, `chain` or `decomposition`) and lists what is wrong.
#[pyfunction]
fn verify(kind: &str, report: &str) -> PyResult<Vec<String>> {
    let problems = match kind {
        "theorem" => verify_report(&TheoremReport::from_json(report).map_err(py_err)?),
        "analysis" => AnalysisReport::from_json(report).map_err(py_err)?.verify(),
        "triangularize" => TriangularizeReport::from_json(report).map_err(py_err)?.verify(),
        "chain" => ChainReport::from_json(report).map_err(py_err)?.verify(),
        "decomposition" => {
            let r: DecompositionReport =
                serde_json::from_str(report).map_err(|e| PyValueError::new_err(e.to_string()))?;
            r.verify().map(|ok| if ok { vec![] } else { vec!["decomposition does not reconstruct".to_string()] })
        }
        other => return Err(PyValueError::new_err(format!("unknown report kind `{other}`"))),
    };
    problems.map_err(py_err)
}

#[pymodule]
fn burnside(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(burnside_check, m)?)?;
    m.add_function(wrap_pyfunction!(descent_check, m)?)?;
    m.add_function(wrap_pyfunction!(triangularize, m)?)?;
    m.add_function(wrap_pyfunction!(chop, m)?)?;
    m.add_function(wrap_pyfunction!(quat_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
