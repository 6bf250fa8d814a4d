//! The natural module F^n of a matrix family: spinning, irreducibility
//! testing, composition series and simultaneous triangularization.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{algebra_closure_in, centralizer, AlgebraBasis};
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::linalg::factor::{candidate_factors, is_irreducible, splits_with_roots};
use crate::linalg::{EchelonBasis, ExactMatrix, Polynomial, Subspace};

pub const DEFAULT_BUDGET: usize = 64;
pub const DEFAULT_SEED: u64 = 0;

/// Largest total number of proper nonzero subspaces enumerated by the
/// exhaustive search.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

/// Kernels with at most this many vectors are spun point by point.
const PROJECTIVE_LIMIT: u128 = 4096;

/// Smallest subspace containing `v` and invariant under every generator.
pub fn spin(field: &FieldDescriptor, v: &[Scalar], generators: &[ExactMatrix]) -> Result<Subspace> {
    if v.iter().all(|x| field.is_zero(x)) {
        return Err(Error::ZeroVector);
    }
    let n = v.len();
    for g in generators {
        if g.rows() != n || g.cols() != n {
            return Err(Error::shape(format!("{}×{} generator acting on vectors of length {n}", g.rows(), g.cols())));
        }
    }
    let mut basis = EchelonBasis::new(field, n);
    let mut queue = vec![v.to_vec()];
    basis.insert(v.to_vec());
    let mut k = 0;
    while k < queue.len() && !basis.is_full() {
        for g in generators {
            let w = g.mul_vec(&queue[k]);
            if basis.insert(w.clone()) {
                queue.push(w);
            }
        }
        k += 1;
    }
    let span = basis.into_subspace();
    debug_assert!(span.is_invariant_under(generators));
    Ok(span)
}

/// Why a family was certified irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `n = 1`.
    Trivial,
    /// An algebra element `theta` and an irreducible `factor` with
    /// `nullity factor(theta) = deg factor`, a vector of that kernel whose
    /// spin is everything, and likewise for the transposed family.
    Norton {
        theta: ExactMatrix,
        factor: Polynomial,
        kernel_vector: Vec<Scalar>,
        transposed_vector: Vec<Scalar>,
    },
    /// Over ℚ: the algebra is closed under transposition, so the module is
    /// semisimple, and the only symmetric matrices commuting with it are
    /// scalars, so no orthogonal projection onto a summand exists.
    SymmetricCommutant,
    /// Every proper nonzero subspace was tested.
    Exhaustive { subspaces_checked: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrreducibilityVerdict {
    Irreducible(Certificate),
    /// A proper invariant subspace holding the orbit of some nonzero vector.
    /// Nonzero unless n = 1 and every generator is zero.
    Reducible(Subspace),
    Inconclusive { rounds: usize },
}

impl IrreducibilityVerdict {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, IrreducibilityVerdict::Irreducible(_))
    }

    pub fn is_reducible(&self) -> bool {
        matches!(self, IrreducibilityVerdict::Reducible(_))
    }

    pub fn status(&self) -> VerdictStatus {
        match self {
            IrreducibilityVerdict::Irreducible(_) => VerdictStatus::Irreducible,
            IrreducibilityVerdict::Reducible(_) => VerdictStatus::Reducible,
            IrreducibilityVerdict::Inconclusive { .. } => VerdictStatus::Inconclusive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictStatus {
    Irreducible,
    Reducible,
    Inconclusive,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

struct Family<'a> {
    field: FieldDescriptor,
    n: usize,
    generators: &'a [ExactMatrix],
    transposed: Vec<ExactMatrix>,
}

impl<'a> Family<'a> {
    fn new(generators: &'a [ExactMatrix]) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::EmptyInput("no generators".into()))?;
        let field = first.field().clone();
        let n = first.rows();
        for g in generators {
            if g.field() != &field {
                return Err(Error::MixedField {
                    left: g.field().to_string(),
                    right: field.to_string(),
                });
            }
            if g.rows() != n || g.cols() != n {
                return Err(Error::shape(format!("expected {n}×{n}, got {}×{}", g.rows(), g.cols())));
            }
        }
        Ok(Family {
            field,
            n,
            generators,
            transposed: generators.iter().map(ExactMatrix::transpose).collect(),
        })
    }

    /// In dimension one the orbit of a nonzero vector is everything unless
    /// the whole family is zero.
    fn one_dimensional(&self) -> IrreducibilityVerdict {
        if self.generators.iter().all(ExactMatrix::is_zero) {
            IrreducibilityVerdict::Reducible(Subspace::zero(&self.field, 1))
        } else {
            IrreducibilityVerdict::Irreducible(Certificate::Trivial)
        }
    }

    fn algebra(&self) -> AlgebraBasis {
        algebra_closure_in(&self.field, &self.field, self.n, self.generators, true).expect("validated family")
    }
}

/// Decides irreducibility: Norton rounds first, then exhaustive enumeration
/// over small finite fields, then commutant-based arguments over ℚ.
pub fn find_invariant_subspace(generators: &[ExactMatrix], seed: u64, budget: usize) -> Result<IrreducibilityVerdict> {
    let family = Family::new(generators)?;
    if family.n == 1 {
        return Ok(family.one_dimensional());
    }
    let algebra = family.algebra();
    let verdict = norton_rounds(&family, &algebra, seed, budget)?;
    if !matches!(verdict, IrreducibilityVerdict::Inconclusive { .. }) {
        return Ok(verdict);
    }
    if exhaustive_feasible(&family.field, family.n) {
        return exhaustive_search(generators);
    }
    if family.field.is_rationals() {
        if let Some(v) = commutant_search(&family, &algebra, seed)? {
            return Ok(v);
        }
    }
    Ok(verdict)
}

/// The Norton procedure alone, without any fallback.
pub fn norton_search(generators: &[ExactMatrix], seed: u64, budget: usize) -> Result<IrreducibilityVerdict> {
    let family = Family::new(generators)?;
    if family.n == 1 {
        return Ok(family.one_dimensional());
    }
    let algebra = family.algebra();
    norton_rounds(&family, &algebra, seed, budget)
}

fn norton_rounds(family: &Family, algebra: &AlgebraBasis, seed: u64, budget: usize) -> Result<IrreducibilityVerdict> {
    let f = &family.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fixed = family.generators.iter().chain(algebra.basis()).cloned();
    for _ in 0..budget {
        let theta = fixed.next().unwrap_or_else(|| {
            let coeffs: Vec<Scalar> = (0..algebra.dim()).map(|_| f.random(&mut rng)).collect();
            algebra.combine(&coeffs)
        });
        if let Some(v) = norton_round(family, &theta)? {
            return Ok(v);
        }
    }
    Ok(IrreducibilityVerdict::Inconclusive { rounds: budget })
}

fn norton_round(family: &Family, theta: &ExactMatrix) -> Result<Option<IrreducibilityVerdict>> {
    let f = &family.field;
    let mut factors = candidate_factors(&theta.char_poly()?)?;
    factors.sort_by(|a, b| a.poly.canonical_cmp(&b.poly));
    for cand in factors {
        let m = cand.poly.eval_matrix(theta)?;
        let kernel = m.kernel();
        if kernel.is_zero() {
            continue;
        }
        let mut witnesses = Vec::new();
        let mut first_full = None;
        for w in kernel_points(f, &kernel) {
            let s = spin(f, &w, family.generators)?;
            if s.is_full() {
                first_full.get_or_insert(w);
            } else {
                witnesses.push(s);
            }
        }
        let kernel_t = m.transpose().kernel();
        let mut first_full_t = None;
        for w in kernel_points(f, &kernel_t) {
            let s = spin(f, &w, &family.transposed)?;
            if s.is_full() {
                first_full_t.get_or_insert(w);
            } else {
                witnesses.push(s.annihilator());
            }
        }
        if let Some(best) = witnesses.into_iter().min() {
            assert!(best.is_proper_nonzero() && best.is_invariant_under(family.generators));
            return Ok(Some(IrreducibilityVerdict::Reducible(best)));
        }
        let deg = cand.poly.degree().unwrap_or(0);
        if cand.irreducible && kernel.dim() == deg {
            let (Some(w), Some(wt)) = (first_full, first_full_t) else {
                continue;
            };
            return Ok(Some(IrreducibilityVerdict::Irreducible(Certificate::Norton {
                theta: theta.clone(),
                factor: cand.poly,
                kernel_vector: w,
                transposed_vector: wt,
            })));
        }
    }
    Ok(None)
}

/// Basis vectors of a kernel, followed (when the field is small enough) by
/// every normalized vector of it.
fn kernel_points(f: &FieldDescriptor, kernel: &Subspace) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = kernel.basis().to_vec();
    let k = kernel.dim();
    let Some(q) = f.order() else {
        return out;
    };
    if k < 2 || (q as u128).checked_pow(k as u32).is_none_or(|c| c > PROJECTIVE_LIMIT) {
        return out;
    }
    let elems: Vec<Scalar> = f.elements().collect();
    for lead in 0..k {
        // coefficient vectors (0, .., 0, 1, *, .., *)
        let tail = k - lead - 1;
        let mut idx = vec![0usize; tail];
        loop {
            let mut c = vec![f.zero(); k];
            c[lead] = f.one();
            for (t, &i) in idx.iter().enumerate() {
                c[lead + 1 + t] = elems[i].clone();
            }
            if idx.iter().any(|&i| i != 0) {
                out.push(kernel.combine(&c));
            }
            let mut pos = 0;
            while pos < tail {
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == tail {
                break;
            }
        }
    }
    out
}

/// Number of `d`-dimensional subspaces of GF(q)^n.
pub fn gaussian_binomial(q: u64, n: usize, d: usize) -> u128 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        let a = q.checked_pow((n - i) as u32).map(|x| x - 1);
        let b = q.checked_pow((i + 1) as u32).map(|x| x - 1);
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(x), Some(y)) => {
                num = x;
                den = y;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn exhaustive_feasible(f: &FieldDescriptor, n: usize) -> bool {
    let Some(q) = f.order() else {
        return false;
    };
    (1..n).all(|d| gaussian_binomial(q, n, d) <= EXHAUSTIVE_LIMIT)
}

/// Tests every proper nonzero subspace of GF(q)^n for invariance, by
/// increasing dimension. Returns the least invariant subspace of the smallest
/// dimension, so the answer is canonical.
pub fn exhaustive_search(generators: &[ExactMatrix]) -> Result<IrreducibilityVerdict> {
    let family = Family::new(generators)?;
    let (f, n) = (&family.field, family.n);
    if !exhaustive_feasible(f, n) {
        return Err(Error::NotApplicable(format!("exhaustive search over {f} in dimension {n}")));
    }
    if n == 1 {
        return Ok(family.one_dimensional());
    }
    let elems: Vec<Scalar> = f.elements().collect();
    let mut checked: u128 = 0;
    for d in 1..n {
        let mut best: Option<Subspace> = None;
        for_each_rref(f, &elems, n, d, &mut |rows, pivots| {
            checked += 1;
            let invariant = generators.iter().all(|g| {
                rows.iter().all(|r| {
                    let w = g.mul_vec(r);
                    in_rref_span(f, rows, pivots, &w)
                })
            });
            if invariant {
                let s = Subspace::span(f, n, rows.iter().cloned());
                if best.as_ref().is_none_or(|b| s < *b) {
                    best = Some(s);
                }
            }
        });
        if let Some(s) = best {
            return Ok(IrreducibilityVerdict::Reducible(s));
        }
    }
    Ok(IrreducibilityVerdict::Irreducible(Certificate::Exhaustive { subspaces_checked: checked }))
}

fn in_rref_span(f: &FieldDescriptor, rows: &[Vec<Scalar>], pivots: &[usize], w: &[Scalar]) -> bool {
    let mut r = w.to_vec();
    for (row, &p) in rows.iter().zip(pivots) {
        if f.is_zero(&r[p]) {
            continue;
        }
        let c = r[p].clone();
        for (x, y) in r.iter_mut().zip(row) {
            *x = f.sub(x, &f.mul(&c, y));
        }
    }
    r.iter().all(|x| f.is_zero(x))
}

/// Calls `visit` on every reduced row echelon basis of a `d`-dimensional
/// subspace of GF(q)^n.
fn for_each_rref(
    f: &FieldDescriptor,
    elems: &[Scalar],
    n: usize,
    d: usize,
    visit: &mut dyn FnMut(&[Vec<Scalar>], &[usize]),
) {
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        let is_pivot = |c: usize, pivots: &[usize]| pivots.contains(&c);
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| ((pivots[r] + 1)..n).map(move |c| (r, c)))
            .filter(|&(_, c)| !is_pivot(c, &pivots))
            .collect();
        let mut idx = vec![0usize; free.len()];
        let mut rows = vec![vec![f.zero(); n]; d];
        for (r, &p) in pivots.iter().enumerate() {
            rows[r][p] = f.one();
        }
        loop {
            for (k, &(r, c)) in free.iter().enumerate() {
                rows[r][c] = elems[idx[k]].clone();
            }
            visit(&rows, &pivots);
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
        // next pivot combination in lexicographic order
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < n - d + i {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Over ℚ: look for invariant subspaces as kernels of polynomials in
/// commuting matrices, and certify irreducibility from a transpose-closed
/// algebra with scalar symmetric commutant.
fn commutant_search(family: &Family, algebra: &AlgebraBasis, seed: u64) -> Result<Option<IrreducibilityVerdict>> {
    let f = &family.field;
    let comm = centralizer(algebra);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<ExactMatrix> = comm.basis().to_vec();
    for _ in 0..8 {
        let coeffs: Vec<Scalar> = (0..comm.dim()).map(|_| f.random(&mut rng)).collect();
        candidates.push(comm.combine(&coeffs));
    }
    let mut witnesses = Vec::new();
    for x in candidates.iter().filter(|x| !x.is_scalar()) {
        for cand in candidate_factors(&x.char_poly()?)? {
            let m = cand.poly.eval_matrix(x)?;
            for s in [m.kernel(), m.transpose().kernel().annihilator()] {
                if s.is_proper_nonzero() && s.is_invariant_under(family.generators) {
                    witnesses.push(s);
                }
            }
        }
    }
    if let Some(best) = witnesses.into_iter().min() {
        return Ok(Some(IrreducibilityVerdict::Reducible(best)));
    }
    if symmetric_commutant_certifies(family.generators)? {
        return Ok(Some(IrreducibilityVerdict::Irreducible(Certificate::SymmetricCommutant)));
    }
    Ok(None)
}

/// The ℚ-only certificate: `Alg` is closed under transposition and its
/// symmetric commutant is one-dimensional.
pub fn symmetric_commutant_certifies(generators: &[ExactMatrix]) -> Result<bool> {
    let family = Family::new(generators)?;
    if !family.field.is_rationals() {
        return Ok(false);
    }
    let algebra = family.algebra();
    if !algebra.basis().iter().all(|b| algebra.contains(&b.transpose())) {
        return Ok(false);
    }
    let comm = centralizer(&algebra);
    Ok(symmetric_part_dim(&comm) == 1)
}

fn symmetric_part_dim(comm: &AlgebraBasis) -> usize {
    // X = Σ c_i B_i with X = Xᵀ: solve Σ c_i (B_i - B_iᵀ) = 0.
    let f = comm.coeff_field();
    let n = comm.n();
    let d = comm.dim();
    let skew: Vec<ExactMatrix> = comm.basis().iter().map(|b| b - &b.transpose()).collect();
    let system = ExactMatrix::from_fn(f, n * n, d, |row, col| skew[col].flatten()[row].clone());
    system.nullity()
}

/// A proper invariant subspace containing the orbit `Alg·x` of a nonzero x.
/// The orbit of x lies in any invariant subspace through x, and the zero
/// subspace qualifies when the generators share a kernel vector.
pub fn is_reducibility_witness(generators: &[ExactMatrix], s: &Subspace) -> bool {
    let Some(first) = generators.first() else {
        return false;
    };
    let n = first.rows();
    if s.ambient() != n || s.is_full() || !s.is_invariant_under(generators) {
        return false;
    }
    if !s.is_zero() {
        return true;
    }
    let stacked: Vec<Scalar> = generators.iter().flat_map(|g| g.flatten().iter().cloned()).collect();
    ExactMatrix::new(first.field(), n * generators.len(), n, stacked).is_ok_and(|m| m.nullity() > 0)
}

/// Rechecks a verdict without trusting how it was produced.
pub fn verify_verdict(generators: &[ExactMatrix], verdict: &IrreducibilityVerdict) -> Result<bool> {
    let family = Family::new(generators)?;
    let f = &family.field;
    Ok(match verdict {
        IrreducibilityVerdict::Reducible(s) => is_reducibility_witness(generators, s),
        IrreducibilityVerdict::Inconclusive { .. } => true,
        IrreducibilityVerdict::Irreducible(cert) => match cert {
            Certificate::Trivial => family.n == 1 && generators.iter().any(|g| !g.is_zero()),
            Certificate::Exhaustive { .. } => exhaustive_search(generators)?.is_irreducible(),
            Certificate::SymmetricCommutant => symmetric_commutant_certifies(generators)?,
            Certificate::Norton {
                theta,
                factor,
                kernel_vector,
                transposed_vector,
            } => {
                let algebra = family.algebra();
                let m = factor.eval_matrix(theta)?;
                algebra.contains(theta)
                    && is_irreducible(factor)? == Some(true)
                    && m.nullity() == factor.degree().unwrap_or(0)
                    && m.mul_vec(kernel_vector).iter().all(|x| f.is_zero(x))
                    && m.transpose().mul_vec(transposed_vector).iter().all(|x| f.is_zero(x))
                    && spin(f, kernel_vector, generators)?.is_full()
                    && spin(f, transposed_vector, &family.transposed)?.is_full()
            }
        },
    })
}

/// A strictly increasing chain of invariant subspaces from 0 to F^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantChain {
    pub n: usize,
    pub subspaces: Vec<Subspace>,
    pub quotient_dims: Vec<usize>,
}

impl InvariantChain {
    /// Records the quotient dimensions; call [`verify`](Self::verify) to check the chain.
    pub fn from_subspaces(n: usize, subspaces: Vec<Subspace>) -> Self {
        let quotient_dims = subspaces.windows(2).map(|w| w[1].dim() - w[0].dim()).collect();
        InvariantChain {
            n,
            subspaces,
            quotient_dims,
        }
    }

    /// True when every quotient is one-dimensional.
    pub fn is_maximal(&self) -> bool {
        self.quotient_dims.iter().all(|&d| d == 1)
    }

    pub fn block_count(&self) -> usize {
        self.quotient_dims.len()
    }

    /// Strictly increasing from 0 to F^n, and invariant under `generators`.
    pub fn verify(&self, generators: &[ExactMatrix]) -> bool {
        let (Some(first), Some(last)) = (self.subspaces.first(), self.subspaces.last()) else {
            return false;
        };
        first.is_zero()
            && last.is_full()
            && last.ambient() == self.n
            && self
                .subspaces
                .windows(2)
                .all(|w| w[0].dim() < w[1].dim() && w[1].contains_subspace(&w[0]))
            && self.subspaces.iter().all(|s| s.is_invariant_under(generators))
            && self.quotient_dims == self.subspaces.windows(2).map(|w| w[1].dim() - w[0].dim()).collect::<Vec<_>>()
    }
}

/// A composition series with the action on each quotient, in the basis
/// given by the free columns of the lower subspace.
#[derive(Clone, Debug)]
pub struct CompositionSeries {
    pub chain: InvariantChain,
    pub quotient_actions: Vec<Vec<ExactMatrix>>,
}

/// A chop that stopped because some block could not be decided. The chain
/// is still a valid invariant chain; the blocks listed in `unresolved` may
/// be reducible.
#[derive(Clone, Debug)]
pub struct ChopIncomplete {
    pub partial: CompositionSeries,
    pub unresolved: Vec<usize>,
}

impl fmt::Display for ChopIncomplete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "composition series incomplete: blocks {:?} undecided", self.unresolved)
    }
}

impl std::error::Error for ChopIncomplete {}

#[derive(Clone, Debug)]
pub enum ChopError {
    Incomplete(ChopIncomplete),
    Invalid(Error),
}

impl From<Error> for ChopError {
    fn from(e: Error) -> Self {
        ChopError::Invalid(e)
    }
}

impl fmt::Display for ChopError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChopError::Incomplete(c) => c.fmt(f),
            ChopError::Invalid(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for ChopError {}

/// Action of each generator on an invariant subspace, in the coordinates of
/// its echelon basis.
pub fn restrict(generators: &[ExactMatrix], sub: &Subspace) -> Vec<ExactMatrix> {
    let f = sub.field();
    let k = sub.dim();
    generators
        .iter()
        .map(|g| {
            let cols: Vec<Vec<Scalar>> = sub
                .basis()
                .iter()
                .map(|b| sub.coordinates(&g.mul_vec(b)).expect("subspace is invariant"))
                .collect();
            ExactMatrix::from_fn(f, k, k, |i, j| cols[j][i].clone())
        })
        .collect()
}

/// Action on `F^n / sub`, in the basis of unit vectors at the free columns.
pub fn quotient(generators: &[ExactMatrix], sub: &Subspace) -> Vec<ExactMatrix> {
    let f = sub.field();
    let free = sub.free_columns();
    let k = free.len();
    let n = sub.ambient();
    generators
        .iter()
        .map(|g| {
            let cols: Vec<Vec<Scalar>> = free
                .iter()
                .map(|&c| {
                    let mut e = vec![f.zero(); n];
                    e[c] = f.one();
                    let r = sub.reduce(&g.mul_vec(&e));
                    free.iter().map(|&i| r[i].clone()).collect()
                })
                .collect();
            ExactMatrix::from_fn(f, k, k, |i, j| cols[j][i].clone())
        })
        .collect()
}

struct Chop {
    /// Subspaces strictly between 0 and the whole space, ascending.
    inner: Vec<Subspace>,
    actions: Vec<Vec<ExactMatrix>>,
    unresolved: Vec<usize>,
}

fn chop(field: &FieldDescriptor, n: usize, generators: &[ExactMatrix], seed: u64, budget: usize) -> Result<Chop> {
    // A one-dimensional block cannot be split further, zero action or not.
    let verdict = if n == 1 {
        IrreducibilityVerdict::Irreducible(Certificate::Trivial)
    } else {
        find_invariant_subspace(generators, seed, budget)?
    };
    match verdict {
        IrreducibilityVerdict::Irreducible(_) => Ok(Chop {
            inner: Vec::new(),
            actions: vec![generators.to_vec()],
            unresolved: Vec::new(),
        }),
        IrreducibilityVerdict::Inconclusive { .. } => Ok(Chop {
            inner: Vec::new(),
            actions: vec![generators.to_vec()],
            unresolved: vec![0],
        }),
        IrreducibilityVerdict::Reducible(u) => {
            let lower = chop(field, u.dim(), &restrict(generators, &u), seed, budget)?;
            let upper = chop(field, n - u.dim(), &quotient(generators, &u), seed, budget)?;
            let free = u.free_columns();
            let mut inner: Vec<Subspace> = lower
                .inner
                .iter()
                .map(|s| Subspace::span(field, n, s.basis().iter().map(|c| u.combine(c))))
                .collect();
            inner.push(u.clone());
            for s in &upper.inner {
                let lifted = s.basis().iter().map(|c| {
                    let mut v = vec![field.zero(); n];
                    for (x, &i) in c.iter().zip(&free) {
                        v[i] = x.clone();
                    }
                    v
                });
                inner.push(Subspace::span(field, n, u.basis().iter().cloned().chain(lifted)));
            }
            let offset = lower.actions.len();
            let mut unresolved = lower.unresolved;
            unresolved.extend(upper.unresolved.iter().map(|i| i + offset));
            let mut actions = lower.actions;
            actions.extend(upper.actions);
            Ok(Chop {
                inner,
                actions,
                unresolved,
            })
        }
    }
}

/// Composition series of F^n under the family by recursive chopping, using
/// the canonical invariant subspace chosen by the irreducibility engine at
/// each step.
pub fn composition_series(generators: &[ExactMatrix], seed: u64, budget: usize) -> std::result::Result<CompositionSeries, ChopError> {
    let family = Family::new(generators)?;
    let (f, n) = (&family.field, family.n);
    let c = chop(f, n, generators, seed, budget)?;
    let mut subspaces = vec![Subspace::zero(f, n)];
    subspaces.extend(c.inner);
    subspaces.push(Subspace::full(f, n));
    let series = CompositionSeries {
        chain: InvariantChain::from_subspaces(n, subspaces),
        quotient_actions: c.actions,
    };
    debug_assert!(series.chain.verify(generators));
    if c.unresolved.is_empty() {
        Ok(series)
    } else {
        Err(ChopError::Incomplete(ChopIncomplete {
            partial: series,
            unresolved: c.unresolved,
        }))
    }
}

/// Why a family admits no simultaneous triangularization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotTriangularizable {
    /// Generator `matrix` has a characteristic polynomial with the factor
    /// `factor` that has no roots in the field.
    NonSplitting { matrix: usize, factor: Polynomial },
    /// After peeling off `level` common eigenvectors, the family acting on
    /// the remaining quotient of dimension `dim` has none.
    NoCommonEigenvector { level: usize, dim: usize },
}

impl fmt::Display for NotTriangularizable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotTriangularizable::NonSplitting { matrix, factor } => {
                write!(f, "characteristic polynomial of matrix {matrix} has the factor {factor} without roots")
            }
            NotTriangularizable::NoCommonEigenvector { level, dim } => {
                write!(f, "no common eigenvector at level {level} (quotient of dimension {dim})")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Triangularization {
    pub chain: InvariantChain,
    /// Columns form a basis in which every generator is upper triangular.
    pub p: ExactMatrix,
}

pub fn triangularize_family(generators: &[ExactMatrix]) -> Result<std::result::Result<Triangularization, NotTriangularizable>> {
    let family = Family::new(generators)?;
    let (f, n) = (&family.field, family.n);
    let mut eigenvalues = Vec::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        let s = splits_with_roots(&g.char_poly()?)?;
        if !s.splits {
            return Ok(Err(NotTriangularizable::NonSplitting {
                matrix: i,
                factor: s.cofactor,
            }));
        }
        let mut roots = s.roots;
        roots.dedup();
        eigenvalues.push(roots);
    }
    let columns = match peel(f, generators.to_vec(), &eigenvalues, 0)? {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let p = ExactMatrix::from_fn(f, n, n, |i, j| columns[j][i].clone());
    let p_inv = p.inverse()?;
    for g in generators {
        if !(&(&p_inv * g) * &p).is_upper_triangular() {
            return Err(Error::StructureViolation("triangularizing basis failed verification".into()));
        }
    }
    let subspaces = (0..=n)
        .map(|k| Subspace::span(f, n, columns[..k].iter().cloned()))
        .collect();
    Ok(Ok(Triangularization {
        chain: InvariantChain::from_subspaces(n, subspaces),
        p,
    }))
}

/// Columns of a triangularizing basis for the family acting on F^d.
fn peel(
    f: &FieldDescriptor,
    generators: Vec<ExactMatrix>,
    eigenvalues: &[Vec<Scalar>],
    level: usize,
) -> Result<std::result::Result<Vec<Vec<Scalar>>, NotTriangularizable>> {
    let d = generators[0].rows();
    let Some(v) = common_eigenvector(f, &generators, eigenvalues, 0, Subspace::full(f, d)) else {
        return Ok(Err(NotTriangularizable::NoCommonEigenvector { level, dim: d }));
    };
    if d == 1 {
        return Ok(Ok(vec![v]));
    }
    // Quotient by span{v}, using the unit vectors off its pivot as a basis.
    let pivot = v.iter().position(|x| !f.is_zero(x)).expect("nonzero eigenvector");
    let rest: Vec<usize> = (0..d).filter(|&i| i != pivot).collect();
    let line = Subspace::span(f, d, [v.clone()]);
    let quotient_gens: Vec<ExactMatrix> = generators
        .iter()
        .map(|g| {
            let cols: Vec<Vec<Scalar>> = rest
                .iter()
                .map(|&c| {
                    let mut e = vec![f.zero(); d];
                    e[c] = f.one();
                    let r = line.reduce(&g.mul_vec(&e));
                    rest.iter().map(|&i| r[i].clone()).collect()
                })
                .collect();
            ExactMatrix::from_fn(f, d - 1, d - 1, |i, j| cols[j][i].clone())
        })
        .collect();
    let sub_columns = match peel(f, quotient_gens, eigenvalues, level + 1)? {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let mut columns = vec![v];
    for c in sub_columns {
        let mut w = vec![f.zero(); d];
        for (x, &i) in c.iter().zip(&rest) {
            w[i] = x.clone();
        }
        columns.push(w);
    }
    Ok(Ok(columns))
}

/// Depth-first search over eigenvalue choices, generator by generator in
/// input order and eigenvalues ascending.
fn common_eigenvector(
    f: &FieldDescriptor,
    generators: &[ExactMatrix],
    eigenvalues: &[Vec<Scalar>],
    idx: usize,
    space: Subspace,
) -> Option<Vec<Scalar>> {
    if space.is_zero() {
        return None;
    }
    if idx == generators.len() {
        return space.basis().first().cloned();
    }
    let g = &generators[idx];
    let d = g.rows();
    if g.is_scalar() {
        return common_eigenvector(f, generators, eigenvalues, idx + 1, space);
    }
    for lambda in &eigenvalues[idx] {
        let shifted = g - &ExactMatrix::scalar(f, d, lambda.clone());
        let eig = shifted.kernel().intersection(&space);
        if let Some(v) = common_eigenvector(f, generators, eigenvalues, idx + 1, eig) {
            return Some(v);
        }
    }
    None
}
