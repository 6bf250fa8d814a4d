//! Semigroup closure and the two theorem checkers: irreducible versus
//! absolutely irreducible for semigroups of triangularizable matrices, and
//! descent of such semigroups with spectra in a subfield.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    algebra_closure, algebra_closure_over, construct_similarity_to_full, division_degree, verify_similarity,
    AlgebraBasis, Similarity,
};
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::linalg::{splits_with_roots, ExactMatrix, Subspace};
use crate::modstruct::{find_invariant_subspace, is_reducibility_witness, IrreducibilityVerdict, VerdictStatus};

pub const DEFAULT_CAP: usize = 10_000;

/// Closures up to this size get a full product table.
pub const PRODUCT_TABLE_LIMIT: usize = 1024;

/// The multiplicative semigroup generated by a family, possibly truncated.
#[derive(Clone, Debug)]
pub struct SemigroupClosure {
    /// Distinct elements in order of discovery: generators first, then
    /// products by increasing word length.
    pub elements: Vec<ExactMatrix>,
    pub complete: bool,
    pub cap: usize,
    /// `product_table[i][j]` is the index of `elements[i] * elements[j]`.
    pub product_table: Option<Vec<Vec<usize>>>,
}

pub fn semigroup_closure(generators: &[ExactMatrix], cap: usize) -> Result<SemigroupClosure> {
    let first = generators.first().ok_or_else(|| Error::EmptyInput("no generators".into()))?;
    let n = first.rows();
    if generators.iter().any(|g| g.field() != first.field() || g.rows() != n || g.cols() != n) {
        return Err(Error::shape("generators must be square matrices of one size over one field"));
    }
    if cap == 0 {
        return Err(Error::PreconditionViolated("cap must be positive".into()));
    }
    let mut elements: Vec<ExactMatrix> = Vec::new();
    let mut index: HashMap<ExactMatrix, usize> = HashMap::new();
    let mut complete = true;
    for g in generators {
        if !index.contains_key(g) {
            if elements.len() == cap {
                complete = false;
                break;
            }
            index.insert(g.clone(), elements.len());
            elements.push(g.clone());
        }
    }
    // Right multiplication by generators reaches every word.
    let mut k = 0;
    'outer: while complete && k < elements.len() {
        for g in generators {
            let p = &elements[k] * g;
            if !index.contains_key(&p) {
                if elements.len() == cap {
                    complete = false;
                    break 'outer;
                }
                index.insert(p.clone(), elements.len());
                elements.push(p);
            }
        }
        k += 1;
    }
    let product_table = if complete && elements.len() <= PRODUCT_TABLE_LIMIT {
        let mut table = Vec::with_capacity(elements.len());
        for a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for b in &elements {
                let i = *index
                    .get(&(a * b))
                    .ok_or_else(|| Error::StructureViolation("semigroup closure is not closed".into()))?;
                row.push(i);
            }
            table.push(row);
        }
        Some(table)
    } else {
        None
    };
    Ok(SemigroupClosure {
        elements,
        complete,
        cap,
        product_table,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Fails,
    Unverified,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of checking that every element is triangularizable.
#[derive(Clone, Debug)]
pub struct ElementCheck {
    pub status: Status,
    pub witness: Option<ExactMatrix>,
    pub reason: Option<String>,
    pub checked: usize,
}

pub fn all_elements_triangularizable(s: &SemigroupClosure) -> Result<ElementCheck> {
    for m in &s.elements {
        let split = splits_with_roots(&m.char_poly()?)?;
        if !split.splits {
            return Ok(ElementCheck {
                status: Status::Fails,
                witness: Some(m.clone()),
                reason: Some(format!("characteristic polynomial has the factor {} without roots", split.cofactor)),
                checked: s.elements.len(),
            });
        }
    }
    Ok(ElementCheck {
        status: if s.complete { Status::Holds } else { Status::Unverified },
        witness: None,
        reason: None,
        checked: s.elements.len(),
    })
}

/// Every element has its whole spectrum, with multiplicity, in the embedded
/// subfield.
pub fn all_spectra_in_subfield(s: &SemigroupClosure, sub: &FieldDescriptor) -> Result<ElementCheck> {
    for m in &s.elements {
        let k = m.field();
        let split = splits_with_roots(&m.char_poly()?)?;
        let reason = if !split.splits {
            Some(format!("characteristic polynomial has the factor {} without roots", split.cofactor))
        } else {
            split
                .roots
                .iter()
                .find(|r| !k.in_subfield(sub, r).unwrap_or(false))
                .map(|r| format!("eigenvalue {} is not in {sub}", k.format_scalar(r)))
        };
        if reason.is_some() {
            return Ok(ElementCheck {
                status: Status::Fails,
                witness: Some(m.clone()),
                reason,
                checked: s.elements.len(),
            });
        }
    }
    Ok(ElementCheck {
        status: if s.complete { Status::Holds } else { Status::Unverified },
        witness: None,
        reason: None,
        checked: s.elements.len(),
    })
}

pub type Grid = Vec<Vec<String>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    TheoremInstanceVerified,
    HypothesisFails,
    CounterexampleCandidate,
    Incomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    Burnside,
    SpectraDescent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A semigroup element violating a hypothesis.
    Element { matrix: Grid, reason: String },
    /// A proper nonzero invariant subspace, by echelon basis rows.
    Subspace { basis: Grid },
    /// The kind of irreducibility certificate found.
    Certificate { certificate: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConclusionData {
    pub irreducibility: VerdictStatus,
    pub irreducibility_witness: Option<Witness>,
    /// Dimension of the algebra over the field of the entries.
    pub algebra_dim: usize,
    /// Dimension over the subfield (descent check only).
    pub algebra_dim_subfield: Option<usize>,
    pub n_squared: usize,
    /// Dimension of the commutant of an irreducible algebra.
    pub division_degree: Option<usize>,
    pub traces_in_subfield: Option<bool>,
    pub traces_nonzero: Option<bool>,
    /// Columns conjugating the subfield algebra onto the full matrix algebra.
    pub similarity: Option<Grid>,
    pub similarity_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub name: String,
    pub status: Status,
    pub data: ConclusionData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportInput {
    pub field: String,
    pub subfield: Option<String>,
    pub n: usize,
    pub generators: Vec<Grid>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub cap: usize,
    pub seed: u64,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureSummary {
    pub elements: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremKind,
    pub input: ReportInput,
    pub parameters: Parameters,
    pub closure: ClosureSummary,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Conclusion,
    pub verdict: Verdict,
}

fn grid(m: &ExactMatrix) -> Grid {
    m.to_strings()
}

fn subspace_witness(s: &Subspace) -> Witness {
    Witness::Subspace { basis: s.to_strings() }
}

pub(crate) fn verdict_witness(v: &IrreducibilityVerdict) -> Option<Witness> {
    use crate::modstruct::Certificate;
    match v {
        IrreducibilityVerdict::Reducible(s) => Some(subspace_witness(s)),
        IrreducibilityVerdict::Irreducible(c) => Some(Witness::Certificate {
            certificate: match c {
                Certificate::Trivial => "trivial",
                Certificate::Norton { .. } => "norton",
                Certificate::SymmetricCommutant => "symmetric_commutant",
                Certificate::Exhaustive { .. } => "exhaustive",
            }
            .into(),
        }),
        IrreducibilityVerdict::Inconclusive { .. } => None,
    }
}

fn hypothesis(name: &str, check: &ElementCheck) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        status: check.status,
        witness: check.witness.as_ref().map(|m| Witness::Element {
            matrix: grid(m),
            reason: check.reason.clone().unwrap_or_default(),
        }),
    }
}

fn input_record(generators: &[ExactMatrix], subfield: Option<&FieldDescriptor>) -> ReportInput {
    ReportInput {
        field: generators[0].field().to_string(),
        subfield: subfield.map(ToString::to_string),
        n: generators[0].rows(),
        generators: generators.iter().map(grid).collect(),
    }
}

pub const BURNSIDE_HYPOTHESIS: &str = "every element triangularizable";
pub const BURNSIDE_CONCLUSION: &str = "irreducible iff algebra is all of M_n";
pub const DESCENT_SPECTRA: &str = "every element has its spectrum in the subfield";
pub const DESCENT_IRREDUCIBLE: &str = "irreducible over the field of entries";
pub const DESCENT_CONCLUSION: &str = "similar to a spanning subset of M_n(subfield)";

/// Checks one instance of: a semigroup of triangularizable matrices is
/// irreducible exactly when its algebra is all of `M_n(F)`.
pub fn check_burnside_general_field(generators: &[ExactMatrix], cap: usize, seed: u64, budget: usize) -> Result<TheoremReport> {
    let closure = semigroup_closure(generators, cap)?;
    let n = generators[0].rows();
    let h1 = all_elements_triangularizable(&closure)?;
    let verdict_c1 = find_invariant_subspace(generators, seed, budget)?;
    let alg = algebra_closure(generators, false)?;
    let full = alg.dim() == n * n;
    let division = if verdict_c1.is_irreducible() && alg.contains_identity() {
        Some(division_degree(&alg, true)?.r)
    } else {
        None
    };
    let conclusion_status = match &verdict_c1 {
        IrreducibilityVerdict::Inconclusive { .. } => Status::Unverified,
        v if v.is_irreducible() == full => Status::Holds,
        _ => Status::Fails,
    };
    let verdict = combine(&[h1.status], conclusion_status);
    Ok(TheoremReport {
        theorem: TheoremKind::Burnside,
        input: input_record(generators, None),
        parameters: Parameters { cap, seed, budget },
        closure: ClosureSummary {
            elements: closure.elements.len(),
            complete: closure.complete,
        },
        hypotheses: vec![hypothesis(BURNSIDE_HYPOTHESIS, &h1)],
        conclusion: Conclusion {
            name: BURNSIDE_CONCLUSION.into(),
            status: conclusion_status,
            data: ConclusionData {
                irreducibility: verdict_c1.status(),
                irreducibility_witness: verdict_witness(&verdict_c1),
                algebra_dim: alg.dim(),
                algebra_dim_subfield: None,
                n_squared: n * n,
                division_degree: division,
                traces_in_subfield: None,
                traces_nonzero: None,
                similarity: None,
                similarity_error: None,
            },
        },
        verdict,
    })
}

fn combine(hypotheses: &[Status], conclusion: Status) -> Verdict {
    if hypotheses.contains(&Status::Fails) {
        Verdict::HypothesisFails
    } else if hypotheses.contains(&Status::Unverified) || conclusion == Status::Unverified {
        Verdict::Incomplete
    } else if conclusion == Status::Holds {
        Verdict::TheoremInstanceVerified
    } else {
        Verdict::CounterexampleCandidate
    }
}

/// Outcome of the descent check, with the similarity when one was built.
#[derive(Clone, Debug)]
pub struct DescentOutcome {
    pub report: TheoremReport,
    pub similarity: Option<Similarity>,
    pub subfield_algebra: Option<AlgebraBasis>,
}

/// Checks one instance of: an irreducible semigroup in `M_n(K)` of
/// triangularizable matrices with spectra in F is conjugate over K into
/// `M_n(F)`, where its F-span is everything.
pub fn check_spectra_descent(
    generators: &[ExactMatrix],
    subfield: &FieldDescriptor,
    cap: usize,
    seed: u64,
    budget: usize,
) -> Result<DescentOutcome> {
    let first = generators.first().ok_or_else(|| Error::EmptyInput("no generators".into()))?;
    let k = first.field().clone();
    k.check_tower(subfield)?;
    let n = first.rows();
    let closure = semigroup_closure(generators, cap)?;
    let h1 = all_spectra_in_subfield(&closure, subfield)?;
    let verdict_c1 = find_invariant_subspace(generators, seed, budget)?;
    let h2 = Hypothesis {
        name: DESCENT_IRREDUCIBLE.into(),
        status: match &verdict_c1 {
            IrreducibilityVerdict::Irreducible(_) => Status::Holds,
            IrreducibilityVerdict::Reducible(_) => Status::Fails,
            IrreducibilityVerdict::Inconclusive { .. } => Status::Unverified,
        },
        witness: verdict_witness(&verdict_c1),
    };
    let alg_k = algebra_closure(generators, false)?;
    let alg_f = algebra_closure_over(subfield, generators, false)?;
    let traces: Vec<Scalar> = closure.elements.iter().map(ExactMatrix::trace).collect();
    let traces_in_subfield = traces.iter().all(|t| k.in_subfield(subfield, t).unwrap_or(false));
    let traces_nonzero = traces.iter().any(|t| !k.is_zero(t));
    let dims_ok = alg_f.dim() == n * n && alg_k.dim() == n * n;

    let (similarity, similarity_error) = if dims_ok {
        match construct_similarity_to_full(&alg_f, seed) {
            Ok(sim) if verify_similarity(&alg_f, &sim) => (Some(sim), None),
            Ok(_) => (None, Some("constructed similarity failed verification".to_string())),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let conclusion_status = if !dims_ok || !traces_in_subfield || !traces_nonzero {
        Status::Fails
    } else if similarity.is_some() {
        Status::Holds
    } else {
        Status::Unverified
    };
    let hypotheses = vec![hypothesis(DESCENT_SPECTRA, &h1), h2];
    let verdict = combine(&hypotheses.iter().map(|h| h.status).collect::<Vec<_>>(), conclusion_status);
    let report = TheoremReport {
        theorem: TheoremKind::SpectraDescent,
        input: input_record(generators, Some(subfield)),
        parameters: Parameters { cap, seed, budget },
        closure: ClosureSummary {
            elements: closure.elements.len(),
            complete: closure.complete,
        },
        hypotheses,
        conclusion: Conclusion {
            name: DESCENT_CONCLUSION.into(),
            status: conclusion_status,
            data: ConclusionData {
                irreducibility: verdict_c1.status(),
                irreducibility_witness: verdict_witness(&verdict_c1),
                algebra_dim: alg_k.dim(),
                algebra_dim_subfield: Some(alg_f.dim()),
                n_squared: n * n,
                division_degree: None,
                traces_in_subfield: Some(traces_in_subfield),
                traces_nonzero: Some(traces_nonzero),
                similarity: similarity.as_ref().map(|s| grid(&s.p)),
                similarity_error,
            },
        },
        verdict,
    };
    Ok(DescentOutcome {
        report,
        similarity,
        subfield_algebra: Some(alg_f),
    })
}

fn parse_grid(field: &FieldDescriptor, g: &Grid) -> Result<ExactMatrix> {
    ExactMatrix::parse(field, g)
}

/// Rechecks every witness and claim in a report from its serialized form
/// alone: failing elements fail, invariant subspaces are invariant, algebra
/// dimensions recompute, and the similarity conjugates the subfield algebra
/// into `M_n(F)`. Returns a list of problems, empty when the report holds up.
pub fn verify_report(report: &TheoremReport) -> Result<Vec<String>> {
    let field = FieldDescriptor::parse(&report.input.field)?;
    let generators = report
        .input
        .generators
        .iter()
        .map(|g| parse_grid(&field, g))
        .collect::<Result<Vec<_>>>()?;
    let n = report.input.n;
    let mut problems = Vec::new();
    if generators.iter().any(|g| g.rows() != n || g.cols() != n) {
        problems.push("generator shape does not match n".into());
        return Ok(problems);
    }
    let subfield = report.input.subfield.as_deref().map(FieldDescriptor::parse).transpose()?;

    for h in &report.hypotheses {
        if let Some(Witness::Element { matrix, .. }) = &h.witness {
            let m = parse_grid(&field, matrix)?;
            let split = splits_with_roots(&m.char_poly()?)?;
            let fails = match (&subfield, h.name.as_str()) {
                (Some(sub), DESCENT_SPECTRA) => {
                    !split.splits || split.roots.iter().any(|r| !field.in_subfield(sub, r).unwrap_or(false))
                }
                _ => !split.splits,
            };
            if !fails {
                problems.push(format!("witness for '{}' satisfies the hypothesis", h.name));
            }
        }
    }
    let data = &report.conclusion.data;
    if let Some(Witness::Subspace { basis }) = &data.irreducibility_witness {
        let rows = basis
            .iter()
            .map(|r| r.iter().map(|t| field.parse_scalar(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let s = Subspace::span(&field, n, rows);
        if !is_reducibility_witness(&generators, &s) {
            problems.push("reducibility witness is not a proper invariant subspace holding an orbit".into());
        }
    }
    let alg = algebra_closure(&generators, false)?;
    if alg.dim() != data.algebra_dim {
        problems.push(format!("algebra dimension is {}, report says {}", alg.dim(), data.algebra_dim));
    }
    if let (Some(sub), Some(dim_f)) = (&subfield, data.algebra_dim_subfield) {
        let alg_f = algebra_closure_over(sub, &generators, false)?;
        if alg_f.dim() != dim_f {
            problems.push(format!("subfield algebra dimension is {}, report says {dim_f}", alg_f.dim()));
        }
        if let Some(p) = &data.similarity {
            let p = parse_grid(&field, p)?;
            match p.inverse() {
                Err(_) => problems.push("similarity is singular".into()),
                Ok(p_inv) => {
                    let conj: Vec<ExactMatrix> = alg_f.basis().iter().map(|b| &(&p_inv * b) * &p).collect();
                    let rational = conj.iter().all(|c| c.entries().all(|x| field.in_subfield(sub, x).unwrap_or(false)));
                    let spans = AlgebraBasis::span(sub, &field, n, &conj)?.dim() == n * n;
                    if !(rational && spans) {
                        problems.push("similarity does not conjugate onto M_n(subfield)".into());
                    }
                }
            }
        }
    }
    Ok(problems)
}

impl TheoremReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            token: String::new(),
            message: e.to_string(),
        })
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let title = match self.theorem {
            TheoremKind::Burnside => "irreducibility vs absolute irreducibility",
            TheoremKind::SpectraDescent => "descent to the subfield of spectra",
        };
        out.push_str(&format!("check: {title}\n"));
        out.push_str(&format!("field: {}", self.input.field));
        if let Some(s) = &self.input.subfield {
            out.push_str(&format!(", subfield: {s}"));
        }
        out.push_str(&format!(", n = {}, {} generator(s)\n", self.input.n, self.input.generators.len()));
        out.push_str(&format!(
            "semigroup: {} element(s), {}\n",
            self.closure.elements,
            if self.closure.complete { "complete" } else { "truncated at cap" }
        ));
        for h in &self.hypotheses {
            out.push_str(&format!("hypothesis '{}': {}\n", h.name, h.status));
            if let Some(Witness::Element { matrix, reason }) = &h.witness {
                out.push_str(&format!("  witness {}: {reason}\n", render_grid(matrix)));
            }
        }
        let d = &self.conclusion.data;
        out.push_str(&format!("irreducibility: {}\n", d.irreducibility));
        match &d.irreducibility_witness {
            Some(Witness::Subspace { basis }) => out.push_str(&format!("  invariant subspace spanned by {}\n", render_grid(basis))),
            Some(Witness::Certificate { certificate }) => out.push_str(&format!("  certificate: {certificate}\n")),
            _ => {}
        }
        out.push_str(&format!("algebra dimension: {} (n^2 = {})\n", d.algebra_dim, d.n_squared));
        if let Some(df) = d.algebra_dim_subfield {
            out.push_str(&format!("algebra dimension over subfield: {df}\n"));
        }
        if let Some(r) = d.division_degree {
            out.push_str(&format!("division degree: {r}\n"));
        }
        if let (Some(a), Some(b)) = (d.traces_in_subfield, d.traces_nonzero) {
            out.push_str(&format!("traces in subfield: {a}, some trace nonzero: {b}\n"));
        }
        if let Some(p) = &d.similarity {
            out.push_str(&format!("similarity P: {}\n", render_grid(p)));
        }
        if let Some(e) = &d.similarity_error {
            out.push_str(&format!("similarity not found: {e}\n"));
        }
        out.push_str(&format!("conclusion '{}': {}\n", self.conclusion.name, self.conclusion.status));
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

pub fn render_grid(g: &Grid) -> String {
    let rows: Vec<String> = g.iter().map(|r| r.join(", ")).collect();
    format!("[{}]", rows.join("; "))
}
