//! Serialized reports for the structural commands. Each report can be
//! rechecked from its serialized form alone.

use serde::{Deserialize, Serialize};

use crate::algebra::{algebra_closure, algebra_closure_in, division_degree, min_rank_search};
use crate::burnside::{
    all_elements_triangularizable, render_grid, semigroup_closure, verdict_witness, ClosureSummary, Grid, Parameters,
    Status, Witness,
};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::linalg::{splits_with_roots, ExactMatrix, Subspace};
use crate::modstruct::{
    find_invariant_subspace, is_reducibility_witness, quotient, restrict, triangularize_family, CompositionSeries,
    InvariantChain, IrreducibilityVerdict, NotTriangularizable, Triangularization, VerdictStatus,
};

/// Attempts made by the minimal-rank search in [`analyze`].
const MIN_RANK_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub field: String,
    pub n: usize,
    pub generators: Vec<Grid>,
}

impl FamilyRecord {
    pub fn new(generators: &[ExactMatrix]) -> Self {
        FamilyRecord {
            field: generators[0].field().to_string(),
            n: generators[0].rows(),
            generators: generators.iter().map(ExactMatrix::to_strings).collect(),
        }
    }

    pub fn parse(&self) -> Result<(FieldDescriptor, Vec<ExactMatrix>)> {
        let field = FieldDescriptor::parse(&self.field)?;
        let gens = self
            .generators
            .iter()
            .map(|g| ExactMatrix::parse(&field, g))
            .collect::<Result<Vec<_>>>()?;
        if gens.is_empty() || gens.iter().any(|g| g.rows() != self.n || g.cols() != self.n) {
            return Err(Error::shape(format!("generators must be {0}×{0}", self.n)));
        }
        Ok((field, gens))
    }
}

fn parse_subspace(field: &FieldDescriptor, n: usize, basis: &Grid) -> Result<Subspace> {
    let rows = basis
        .iter()
        .map(|r| r.iter().map(|t| field.parse_scalar(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::shape(format!("subspace vectors must have length {n}")));
    }
    Ok(Subspace::span(field, n, rows))
}

fn to_json<T: Serialize>(t: &T) -> String {
    serde_json::to_string_pretty(t).expect("reports serialize")
}

fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        token: String::new(),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    NonSplitting { matrix: usize, factor: String },
    NoCommonEigenvector { level: usize, dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TriangularizeOutcome {
    /// The first k columns of `p` span the k-th subspace of the chain.
    Triangularized { p: Grid },
    NotTriangularizable { reason: String, obstruction: Obstruction },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularizeReport {
    pub family: FamilyRecord,
    pub outcome: TriangularizeOutcome,
}

impl TriangularizeReport {
    pub fn new(generators: &[ExactMatrix], result: &std::result::Result<Triangularization, NotTriangularizable>) -> Self {
        let outcome = match result {
            Ok(t) => TriangularizeOutcome::Triangularized { p: t.p.to_strings() },
            Err(e) => TriangularizeOutcome::NotTriangularizable {
                reason: e.to_string(),
                obstruction: match e {
                    NotTriangularizable::NonSplitting { matrix, factor } => Obstruction::NonSplitting {
                        matrix: *matrix,
                        factor: factor.to_string(),
                    },
                    NotTriangularizable::NoCommonEigenvector { level, dim } => Obstruction::NoCommonEigenvector {
                        level: *level,
                        dim: *dim,
                    },
                },
            },
        };
        TriangularizeReport {
            family: FamilyRecord::new(generators),
            outcome,
        }
    }

    pub fn is_triangularized(&self) -> bool {
        matches!(self.outcome, TriangularizeOutcome::Triangularized { .. })
    }

    /// Problems found on recheck; empty when the report holds up. A missing
    /// common eigenvector is rechecked by running the triangularization again
    /// on the recorded generators.
    pub fn verify(&self) -> Result<Vec<String>> {
        let (field, gens) = self.family.parse()?;
        let mut problems = Vec::new();
        match &self.outcome {
            TriangularizeOutcome::Triangularized { p } => {
                let p = ExactMatrix::parse(&field, p)?;
                match p.inverse() {
                    Err(_) => problems.push("P is singular".into()),
                    Ok(p_inv) => {
                        for (i, g) in gens.iter().enumerate() {
                            if !(&(&p_inv * g) * &p).is_upper_triangular() {
                                problems.push(format!("generator {i} is not upper triangular after conjugation"));
                            }
                        }
                    }
                }
            }
            TriangularizeOutcome::NotTriangularizable { obstruction, .. } => match obstruction {
                Obstruction::NonSplitting { matrix, .. } => match gens.get(*matrix) {
                    None => problems.push(format!("no generator {matrix}")),
                    Some(g) => {
                        if splits_with_roots(&g.char_poly()?)?.splits {
                            problems.push(format!("characteristic polynomial of generator {matrix} splits"));
                        }
                    }
                },
                Obstruction::NoCommonEigenvector { .. } => {
                    if triangularize_family(&gens)?.is_ok() {
                        problems.push("family is triangularizable".into());
                    }
                }
            },
        }
        Ok(problems)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        from_json(s)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("field: {}, n = {}, {} generator(s)\n", self.family.field, self.family.n, self.family.generators.len());
        match &self.outcome {
            TriangularizeOutcome::Triangularized { p } => {
                out.push_str("triangularizable\n");
                out.push_str(&format!("basis (columns of P): {}\n", render_grid(p)));
            }
            TriangularizeOutcome::NotTriangularizable { reason, .. } => {
                out.push_str(&format!("not triangularizable: {reason}\n"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub family: FamilyRecord,
    pub parameters: Parameters,
    /// False when some block could not be decided within the budget.
    pub complete: bool,
    /// Echelon bases, from the zero subspace to the whole space.
    pub subspaces: Vec<Grid>,
    pub quotient_dims: Vec<usize>,
    pub unresolved: Vec<usize>,
}

impl ChainReport {
    pub fn new(generators: &[ExactMatrix], parameters: Parameters, series: &CompositionSeries, unresolved: &[usize]) -> Self {
        ChainReport {
            family: FamilyRecord::new(generators),
            parameters,
            complete: unresolved.is_empty(),
            subspaces: series.chain.subspaces.iter().map(Subspace::to_strings).collect(),
            quotient_dims: series.chain.quotient_dims.clone(),
            unresolved: unresolved.to_vec(),
        }
    }

    /// Problems found on recheck. The chain must be invariant and strictly
    /// increasing. Each resolved block of dimension above one must not be
    /// shown reducible by a fresh search.
    pub fn verify(&self) -> Result<Vec<String>> {
        let (field, gens) = self.family.parse()?;
        let n = self.family.n;
        let subspaces = self
            .subspaces
            .iter()
            .map(|b| parse_subspace(&field, n, b))
            .collect::<Result<Vec<_>>>()?;
        let chain = InvariantChain::from_subspaces(n, subspaces);
        let mut problems = Vec::new();
        if !chain.verify(&gens) {
            problems.push("subspaces do not form an invariant chain from 0 to the whole space".into());
            return Ok(problems);
        }
        if chain.quotient_dims != self.quotient_dims {
            problems.push("quotient dimensions do not match the subspaces".into());
        }
        if self.complete != self.unresolved.is_empty() {
            problems.push("completeness flag disagrees with the unresolved blocks".into());
        }
        for (i, w) in chain.subspaces.windows(2).enumerate() {
            if self.unresolved.contains(&i) || w[1].dim() - w[0].dim() < 2 {
                continue;
            }
            let upper = restrict(&gens, &w[1]);
            let lower_coords = w[0].basis().iter().map(|v| w[1].coordinates(v).expect("nested"));
            let lower = Subspace::span(&field, w[1].dim(), lower_coords);
            let block = quotient(&upper, &lower);
            let p = &self.parameters;
            if find_invariant_subspace(&block, p.seed, p.budget)?.is_reducible() {
                problems.push(format!("block {i} is reducible"));
            }
        }
        Ok(problems)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        from_json(s)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("field: {}, n = {}, {} generator(s)\n", self.family.field, self.family.n, self.family.generators.len());
        out.push_str(&format!(
            "composition series{}: quotient dimensions {:?}\n",
            if self.complete { "" } else { " (incomplete)" },
            self.quotient_dims
        ));
        for (i, s) in self.subspaces.iter().enumerate().skip(1).take(self.subspaces.len().saturating_sub(2)) {
            out.push_str(&format!("  V{i} spanned by {}\n", render_grid(s)));
        }
        if !self.unresolved.is_empty() {
            out.push_str(&format!("undecided blocks: {:?}\n", self.unresolved));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub family: FamilyRecord,
    pub parameters: Parameters,
    pub closure: ClosureSummary,
    pub elements_triangularizable: Status,
    pub algebra_dim: usize,
    pub unital_algebra_dim: usize,
    pub n_squared: usize,
    pub irreducibility: VerdictStatus,
    pub irreducibility_witness: Option<Witness>,
    pub absolutely_irreducible: bool,
    /// Centralizer dimension of the unital algebra, when irreducible.
    pub division_degree: Option<usize>,
    /// Smallest nonzero rank seen in the unital algebra.
    pub min_rank_seen: Option<usize>,
    pub triangularizable: bool,
}

/// Everything the library can say about one family at once.
pub fn analyze(generators: &[ExactMatrix], cap: usize, seed: u64, budget: usize) -> Result<AnalysisReport> {
    let closure = semigroup_closure(generators, cap)?;
    let elements = all_elements_triangularizable(&closure)?;
    let n = generators[0].rows();
    let alg = algebra_closure(generators, false)?;
    let unital = algebra_closure(generators, true)?;
    let verdict = find_invariant_subspace(generators, seed, budget)?;
    let division = match verdict {
        IrreducibilityVerdict::Irreducible(_) => Some(division_degree(&unital, true)?.r),
        _ => None,
    };
    Ok(AnalysisReport {
        family: FamilyRecord::new(generators),
        parameters: Parameters { cap, seed, budget },
        closure: ClosureSummary {
            elements: closure.elements.len(),
            complete: closure.complete,
        },
        elements_triangularizable: elements.status,
        algebra_dim: alg.dim(),
        unital_algebra_dim: unital.dim(),
        n_squared: n * n,
        irreducibility: verdict.status(),
        irreducibility_witness: verdict_witness(&verdict),
        absolutely_irreducible: alg.dim() == n * n,
        division_degree: division,
        min_rank_seen: min_rank_search(&unital, seed, MIN_RANK_ATTEMPTS),
        triangularizable: triangularize_family(generators)?.is_ok(),
    })
}

impl AnalysisReport {
    /// An irreducible family whose elements are all triangularizable but
    /// whose algebra is not everything.
    pub fn is_counterexample_candidate(&self) -> bool {
        self.irreducibility == VerdictStatus::Irreducible
            && self.elements_triangularizable == Status::Holds
            && !self.absolutely_irreducible
    }

    /// Recomputes the dimensions and triangularizability and rechecks any
    /// invariant-subspace witness.
    pub fn verify(&self) -> Result<Vec<String>> {
        let (field, gens) = self.family.parse()?;
        let n = self.family.n;
        let mut problems = Vec::new();
        let alg = algebra_closure(&gens, false)?;
        let unital = algebra_closure_in(&field, &field, n, &gens, true)?;
        if alg.dim() != self.algebra_dim || unital.dim() != self.unital_algebra_dim {
            problems.push("algebra dimensions differ on recomputation".into());
        }
        if self.absolutely_irreducible != (alg.dim() == n * n) {
            problems.push("absolute irreducibility flag disagrees with the algebra dimension".into());
        }
        if let Some(Witness::Subspace { basis }) = &self.irreducibility_witness {
            if !is_reducibility_witness(&gens, &parse_subspace(&field, n, basis)?) {
                problems.push("reducibility witness is not a proper invariant subspace holding an orbit".into());
            }
        }
        if let Some(r) = self.division_degree {
            if division_degree(&unital, false)?.r != r {
                problems.push("division degree differs on recomputation".into());
            }
        }
        if triangularize_family(&gens)?.is_ok() != self.triangularizable {
            problems.push("triangularizability differs on recomputation".into());
        }
        Ok(problems)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        from_json(s)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("field: {}, n = {}, {} generator(s)\n", self.family.field, self.family.n, self.family.generators.len());
        out.push_str(&format!(
            "semigroup: {} element(s), {}\n",
            self.closure.elements,
            if self.closure.complete { "complete" } else { "truncated at cap" }
        ));
        out.push_str(&format!("every element triangularizable: {}\n", self.elements_triangularizable));
        out.push_str(&format!(
            "algebra dimension: {} ({} with identity, n^2 = {})\n",
            self.algebra_dim, self.unital_algebra_dim, self.n_squared
        ));
        out.push_str(&format!("irreducibility: {}\n", self.irreducibility));
        if let Some(Witness::Subspace { basis }) = &self.irreducibility_witness {
            out.push_str(&format!("  invariant subspace spanned by {}\n", render_grid(basis)));
        }
        out.push_str(&format!("absolutely irreducible: {}\n", self.absolutely_irreducible));
        if let Some(r) = self.division_degree {
            out.push_str(&format!("division degree: {r}\n"));
        }
        if let Some(r) = self.min_rank_seen {
            out.push_str(&format!("smallest nonzero rank seen: {r}\n"));
        }
        out.push_str(&format!("simultaneously triangularizable: {}\n", self.triangularizable));
        out
    }
}
