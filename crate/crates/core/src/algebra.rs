//! Matrix algebras: closure, centralizer, division degree, the left regular
//! representation and conjugation onto a full matrix algebra.
//!
//! An [`AlgebraBasis`] has a coefficient field F and an entry field K with
//! F ≤ K a supported tower. Matrices over K are flattened to F-coordinates
//! entry by entry, using the power basis of K over the prime field when
//! F ≠ K.

use std::fmt;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::linalg::{factor::splits_with_roots, EchelonBasis, ExactMatrix, Polynomial, Subspace};

/// Random combinations tried by [`construct_similarity_to_full`] after the
/// basis elements themselves.
pub const SIMILARITY_ATTEMPTS: usize = 512;

/// A subspace of `M_n(K)` over F with a canonical basis.
#[derive(Clone)]
pub struct AlgebraBasis {
    coeff_field: FieldDescriptor,
    entry_field: FieldDescriptor,
    n: usize,
    basis: Vec<ExactMatrix>,
    flat: Subspace,
    multiplication_closed: bool,
    contains_identity: bool,
    constants: OnceLock<Vec<Vec<Vec<Scalar>>>>,
}

impl PartialEq for AlgebraBasis {
    fn eq(&self, other: &Self) -> bool {
        self.coeff_field == other.coeff_field && self.entry_field == other.entry_field && self.flat == other.flat
    }
}

impl Eq for AlgebraBasis {}

impl fmt::Debug for AlgebraBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraBasis(dim {} over {} in M_{}({}))",
            self.dim(),
            self.coeff_field,
            self.n,
            self.entry_field
        )
    }
}

impl AlgebraBasis {
    /// The F-span of `matrices`, canonicalized, with its closure flags
    /// computed.
    pub fn span(coeff_field: &FieldDescriptor, entry_field: &FieldDescriptor, n: usize, matrices: &[ExactMatrix]) -> Result<Self> {
        entry_field.check_tower(coeff_field)?;
        for m in matrices {
            check_shape(m, entry_field, n)?;
        }
        let width = n * n * entry_field.check_tower(coeff_field)?;
        let flat = Subspace::span(
            coeff_field,
            width,
            matrices.iter().map(|m| flatten(coeff_field, entry_field, m)),
        );
        Ok(Self::from_flat(coeff_field, entry_field, n, flat))
    }

    fn from_flat(coeff_field: &FieldDescriptor, entry_field: &FieldDescriptor, n: usize, flat: Subspace) -> Self {
        let basis: Vec<ExactMatrix> = flat
            .basis()
            .iter()
            .map(|v| unflatten(coeff_field, entry_field, n, v))
            .collect();
        let identity = ExactMatrix::identity(entry_field, n);
        let contains_identity = flat.contains(&flatten(coeff_field, entry_field, &identity));
        let multiplication_closed = basis
            .iter()
            .all(|a| basis.iter().all(|b| flat.contains(&flatten(coeff_field, entry_field, &(a * b)))));
        AlgebraBasis {
            coeff_field: coeff_field.clone(),
            entry_field: entry_field.clone(),
            n,
            basis,
            flat,
            multiplication_closed,
            contains_identity,
            constants: OnceLock::new(),
        }
    }

    pub fn coeff_field(&self) -> &FieldDescriptor {
        &self.coeff_field
    }

    pub fn entry_field(&self) -> &FieldDescriptor {
        &self.entry_field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ExactMatrix] {
        &self.basis
    }

    pub fn multiplication_closed(&self) -> bool {
        self.multiplication_closed
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// Whether the whole of `M_n(F)` (inside `M_n(K)`) is spanned.
    pub fn is_full(&self) -> bool {
        self.dim() == self.n * self.n
    }

    pub fn contains(&self, m: &ExactMatrix) -> bool {
        m.field() == &self.entry_field
            && m.rows() == self.n
            && m.cols() == self.n
            && self.flat.contains(&flatten(&self.coeff_field, &self.entry_field, m))
    }

    /// Coordinates of `m` in the canonical basis.
    pub fn coordinates(&self, m: &ExactMatrix) -> Option<Vec<Scalar>> {
        if !self.contains(m) {
            return None;
        }
        self.flat.coordinates(&flatten(&self.coeff_field, &self.entry_field, m))
    }

    /// `Σ c_i b_i` with coefficients in F.
    pub fn combine(&self, coeffs: &[Scalar]) -> ExactMatrix {
        unflatten(&self.coeff_field, &self.entry_field, self.n, &self.flat.combine(coeffs))
    }

    /// `c[i][j]` holds the coordinates of `b_i b_j`. Only meaningful for a
    /// multiplication-closed basis; computed once.
    pub fn structure_constants(&self) -> &[Vec<Vec<Scalar>>] {
        self.constants.get_or_init(|| {
            self.basis
                .iter()
                .map(|a| {
                    self.basis
                        .iter()
                        .map(|b| {
                            self.coordinates(&(a * b))
                                .unwrap_or_else(|| vec![self.coeff_field.zero(); self.dim()])
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// The same matrices, spanned over the entry field instead.
    pub fn over_entry_field(&self) -> AlgebraBasis {
        if self.coeff_field == self.entry_field {
            return self.clone();
        }
        AlgebraBasis::span(&self.entry_field, &self.entry_field, self.n, &self.basis).expect("same shapes")
    }

    /// Basis matrices as grids of literals.
    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        self.basis.iter().map(ExactMatrix::to_strings).collect()
    }
}

fn check_shape(m: &ExactMatrix, field: &FieldDescriptor, n: usize) -> Result<()> {
    if m.field() != field {
        return Err(Error::MixedField {
            left: m.field().to_string(),
            right: field.to_string(),
        });
    }
    if m.rows() != n || m.cols() != n {
        return Err(Error::shape(format!("expected {n}×{n}, got {}×{}", m.rows(), m.cols())));
    }
    Ok(())
}

/// F-coordinates of a matrix over K: entries row-major, each expanded to its
/// digits when F is the prime field of a proper extension K.
pub fn flatten(coeff_field: &FieldDescriptor, entry_field: &FieldDescriptor, m: &ExactMatrix) -> Vec<Scalar> {
    if coeff_field == entry_field {
        return m.flatten().to_vec();
    }
    let deg = entry_field.degree();
    let mut out = Vec::with_capacity(m.flatten().len() * deg);
    for x in m.flatten() {
        let mut d = entry_field.digits(x);
        d.resize(deg, 0);
        out.extend(d.into_iter().map(Scalar::Finite));
    }
    out
}

pub fn unflatten(coeff_field: &FieldDescriptor, entry_field: &FieldDescriptor, n: usize, v: &[Scalar]) -> ExactMatrix {
    if coeff_field == entry_field {
        return ExactMatrix::from_flat(entry_field, n, v.to_vec());
    }
    let deg = entry_field.degree();
    let data = v
        .chunks(deg)
        .map(|chunk| {
            let digits: Vec<u64> = chunk
                .iter()
                .map(|s| match s {
                    Scalar::Finite(d) => *d,
                    Scalar::Rational(_) => unreachable!("finite tower"),
                })
                .collect();
            entry_field.from_digits(&digits)
        })
        .collect();
    ExactMatrix::from_flat(entry_field, n, data)
}

/// The algebra generated by `generators` (and `I` if requested) over their
/// own field. With no generators use [`algebra_closure_in`].
pub fn algebra_closure(generators: &[ExactMatrix], include_identity: bool) -> Result<AlgebraBasis> {
    let Some(first) = generators.first() else {
        return Err(Error::EmptyInput("no generators".into()));
    };
    algebra_closure_in(first.field(), first.field(), first.rows(), generators, include_identity)
}

/// The F-algebra generated by matrices over K, for a supported tower F ≤ K.
pub fn algebra_closure_over(
    coeff_field: &FieldDescriptor,
    generators: &[ExactMatrix],
    include_identity: bool,
) -> Result<AlgebraBasis> {
    let Some(first) = generators.first() else {
        return Err(Error::EmptyInput("no generators".into()));
    };
    algebra_closure_in(coeff_field, first.field(), first.rows(), generators, include_identity)
}

/// General form of the closure with the ambient `M_n(K)` given explicitly,
/// so the generator list may be empty when the identity is included.
pub fn algebra_closure_in(
    coeff_field: &FieldDescriptor,
    entry_field: &FieldDescriptor,
    n: usize,
    generators: &[ExactMatrix],
    include_identity: bool,
) -> Result<AlgebraBasis> {
    if generators.is_empty() && !include_identity {
        return Err(Error::EmptyInput("no generators".into()));
    }
    for g in generators {
        check_shape(g, entry_field, n)?;
    }
    let width = n * n * entry_field.check_tower(coeff_field)?;
    let mut echelon = EchelonBasis::new(coeff_field, width);
    let mut elems: Vec<ExactMatrix> = Vec::new();
    let offer = |m: ExactMatrix, echelon: &mut EchelonBasis, elems: &mut Vec<ExactMatrix>| {
        if echelon.insert(flatten(coeff_field, entry_field, &m)) {
            elems.push(m);
        }
    };
    if include_identity {
        offer(ExactMatrix::identity(entry_field, n), &mut echelon, &mut elems);
    }
    for g in generators {
        offer(g.clone(), &mut echelon, &mut elems);
    }
    let mut k = 0;
    while k < elems.len() && !echelon.is_full() {
        for j in 0..=k {
            let left = &elems[k] * &elems[j];
            let right = &elems[j] * &elems[k];
            offer(left, &mut echelon, &mut elems);
            offer(right, &mut echelon, &mut elems);
        }
        k += 1;
    }
    let basis = AlgebraBasis::from_flat(coeff_field, entry_field, n, echelon.into_subspace());
    debug_assert!(basis.multiplication_closed);
    Ok(basis)
}

/// `{X : XB = BX for all B in A}`, over the entry field of `A`.
pub fn centralizer(a: &AlgebraBasis) -> AlgebraBasis {
    let k = &a.entry_field;
    let n = a.n;
    let nn = n * n;
    // Row (b, i, j) of the system: (XB - BX)_{ij} as a linear form in X.
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(a.dim() * nn);
    for b in &a.basis {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![k.zero(); nn];
                for l in 0..n {
                    // (XB)_{ij} = Σ_l X_{il} B_{lj}
                    row[i * n + l] = k.add(&row[i * n + l], b.get(l, j));
                    // (BX)_{ij} = Σ_l B_{il} X_{lj}
                    row[l * n + j] = k.sub(&row[l * n + j], b.get(i, l));
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        Subspace::full(k, nn)
    } else {
        ExactMatrix::from_rows(k, rows).expect("rectangular system").kernel()
    };
    let mats: Vec<ExactMatrix> = kernel
        .basis()
        .iter()
        .map(|v| ExactMatrix::from_flat(k, n, v.clone()))
        .collect();
    AlgebraBasis::span(k, k, n, &mats).expect("same shapes")
}

/// The degree `r` of the division algebra of an irreducible algebra, and the
/// consistency check `dim A · r = n²` with `r | n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisionDegree {
    pub r: usize,
    pub dim_check: bool,
}

pub fn division_degree(a: &AlgebraBasis, assume_irreducible: bool) -> Result<DivisionDegree> {
    if !a.contains_identity {
        return Err(Error::PreconditionViolated("algebra must contain the identity".into()));
    }
    let a = a.over_entry_field();
    let r = centralizer(&a).dim();
    let n = a.n;
    let dim_check = a.dim() * r == n * n && n % r == 0;
    if assume_irreducible && !dim_check {
        return Err(Error::StructureViolation(format!(
            "irreducible algebra of dimension {} in M_{n} has centralizer of dimension {r}",
            a.dim()
        )));
    }
    Ok(DivisionDegree { r, dim_check })
}

/// Smallest nonzero rank seen among basis elements and `attempts` seeded
/// random combinations. An upper bound for the minimal rank in `A`.
pub fn min_rank_search(a: &AlgebraBasis, seed: u64, attempts: usize) -> Option<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = &a.coeff_field;
    let random = (0..attempts).map(|_| {
        let coeffs: Vec<Scalar> = (0..a.dim()).map(|_| f.random(&mut rng)).collect();
        a.combine(&coeffs)
    });
    a.basis
        .iter()
        .cloned()
        .chain(random.collect::<Vec<_>>())
        .map(|m| m.rank())
        .filter(|&r| r > 0)
        .min()
}

/// Matrices `[L_B]` of left multiplication by each basis element, in the
/// basis of `A`. Multiplicativity is checked on all basis pairs.
pub fn left_regular_representation(a: &AlgebraBasis) -> Result<Vec<ExactMatrix>> {
    if !a.multiplication_closed || !a.contains_identity {
        return Err(Error::PreconditionViolated("left regular representation needs a unital algebra".into()));
    }
    let f = &a.coeff_field;
    let d = a.dim();
    let c = a.structure_constants();
    let reps: Vec<ExactMatrix> = (0..d)
        .map(|i| ExactMatrix::from_fn(f, d, d, |row, col| c[i][col][row].clone()))
        .collect();
    let combine = |coeffs: &[Scalar]| {
        coeffs.iter().zip(&reps).fold(ExactMatrix::zeros(f, d, d), |acc, (x, l)| {
            if f.is_zero(x) {
                acc
            } else {
                &acc + &l.scale(x)
            }
        })
    };
    for i in 0..d {
        for j in 0..d {
            if &reps[i] * &reps[j] != combine(&c[i][j]) {
                return Err(Error::StructureViolation(format!(
                    "left regular representation is not multiplicative on basis pair ({i}, {j})"
                )));
            }
        }
    }
    Ok(reps)
}

/// An invertible `P` over K and matrix units `e_ij ∈ A` with
/// `P⁻¹ e_ij P = E_ij`.
#[derive(Clone, Debug)]
pub struct Similarity {
    pub p: ExactMatrix,
    /// `units[i * n + j] = e_ij`.
    pub units: Vec<ExactMatrix>,
}

/// Conjugates an F-algebra `A ⊆ M_n(K)` of F-dimension n² onto `M_n(F)`.
///
/// Searches `A` for an element with a simple eigenvalue λ in F, takes the
/// rank-one idempotent `e = g(S)/g(λ)` with `g = χ_S/(x - λ)`, and uses an
/// F-basis `a_j` of the left ideal `A e` to build the columns `a_j x` of `P`
/// from a vector `x` spanning the range of `e`.
pub fn construct_similarity_to_full(a: &AlgebraBasis, seed: u64) -> Result<Similarity> {
    let n = a.n;
    if a.dim() != n * n {
        return Err(Error::PreconditionViolated(format!(
            "algebra has dimension {} over {}, need {}",
            a.dim(),
            a.coeff_field,
            n * n
        )));
    }
    if n == 1 {
        let one = ExactMatrix::identity(&a.entry_field, 1);
        return Ok(Similarity {
            p: one.clone(),
            units: vec![one],
        });
    }
    let f = &a.coeff_field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = a.basis.clone().into_iter();
    let mut random_left = SIMILARITY_ATTEMPTS;
    loop {
        let s = match candidates.next() {
            Some(s) => s,
            None if random_left > 0 => {
                random_left -= 1;
                let coeffs: Vec<Scalar> = (0..a.dim()).map(|_| f.random(&mut rng)).collect();
                a.combine(&coeffs)
            }
            None => {
                return Err(Error::SearchExhausted {
                    what: "element with a simple eigenvalue in the coefficient field".into(),
                    attempts: a.dim() + SIMILARITY_ATTEMPTS,
                })
            }
        };
        if let Some(sim) = similarity_from(a, &s)? {
            return Ok(sim);
        }
    }
}

fn similarity_from(a: &AlgebraBasis, s: &ExactMatrix) -> Result<Option<Similarity>> {
    let k = &a.entry_field;
    let f = &a.coeff_field;
    let n = a.n;
    let chi = s.char_poly()?;
    let roots = splits_with_roots(&chi)?.roots;
    let simple = roots.iter().find(|r| {
        roots.iter().filter(|x| x == r).count() == 1 && k.in_subfield(f, r).unwrap_or(false)
    });
    let Some(lambda) = simple else {
        return Ok(None);
    };
    let g = chi.exact_div(&Polynomial::linear(k, lambda))?;
    let scale = k.inv(&g.eval(lambda))?;
    let e = g.eval_matrix(s)?.scale(&scale);
    if !a.contains(&e) || e.rank() != 1 {
        return Ok(None);
    }
    let Some(col) = (0..n).find(|&j| e.column(j).iter().any(|x| !k.is_zero(x))) else {
        return Ok(None);
    };
    let x = e.column(col);

    // F-basis of the left ideal A·e, starting with e itself.
    let width = n * n * k.check_tower(f)?;
    let mut ideal = EchelonBasis::new(f, width);
    let mut gens = Vec::with_capacity(n);
    for m in std::iter::once(e.clone()).chain(a.basis.iter().map(|b| b * &e)) {
        if ideal.insert(flatten(f, k, &m)) {
            gens.push(m);
        }
    }
    if gens.len() != n {
        return Ok(None);
    }
    let columns: Vec<Vec<Scalar>> = gens.iter().map(|m| m.mul_vec(&x)).collect();
    let p = ExactMatrix::from_fn(k, n, n, |i, j| columns[j][i].clone());
    let Ok(p_inv) = p.inverse() else {
        return Ok(None);
    };
    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = &(&p * &ExactMatrix::unit(k, n, i, j)) * &p_inv;
            if !a.contains(&u) {
                return Ok(None);
            }
            units.push(u);
        }
    }
    Ok(Some(Similarity { p, units }))
}

/// Rechecks a similarity against its defining properties: `P` invertible,
/// `P⁻¹ e_ij P = E_ij`, every `e_ij ∈ A`, and `P⁻¹ B P` has entries in F for
/// each basis element `B`.
pub fn verify_similarity(a: &AlgebraBasis, sim: &Similarity) -> bool {
    let k = &a.entry_field;
    let f = &a.coeff_field;
    let n = a.n;
    let Ok(p_inv) = sim.p.inverse() else {
        return false;
    };
    if sim.units.len() != n * n {
        return false;
    }
    let units_ok = (0..n).all(|i| {
        (0..n).all(|j| {
            let u = &sim.units[i * n + j];
            a.contains(u) && &(&p_inv * u) * &sim.p == ExactMatrix::unit(k, n, i, j)
        })
    });
    let rational = a.basis.iter().all(|b| {
        (&(&p_inv * b) * &sim.p)
            .entries()
            .all(|x| k.in_subfield(f, x).unwrap_or(false))
    });
    units_ok && rational
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(field: &FieldDescriptor, rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(field, rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect())
            .unwrap()
    }

    fn omega() -> ExactMatrix {
        m(&FieldDescriptor::prime(2).unwrap(), &[&[0, 1], &[1, 1]])
    }

    #[test]
    fn closure_examples() {
        let q = FieldDescriptor::rationals();
        let e12 = ExactMatrix::unit(&q, 2, 0, 1);
        let e21 = ExactMatrix::unit(&q, 2, 1, 0);
        let full = algebra_closure(&[e12.clone(), e21.clone()], true).unwrap();
        assert_eq!(full.dim(), 4);
        assert!(full.multiplication_closed() && full.contains_identity());

        let scalars = algebra_closure_in(&q, &q, 3, &[], true).unwrap();
        assert_eq!(scalars.dim(), 1);
        assert!(scalars.contains(&ExactMatrix::identity(&q, 3)));

        let copy = algebra_closure(&[omega()], true).unwrap();
        assert_eq!(copy.dim(), 2);
        assert!(algebra_closure_in(&q, &q, 2, &[], false).is_err());
    }

    #[test]
    fn closure_is_idempotent() {
        let copy = algebra_closure(&[omega()], true).unwrap();
        let again = algebra_closure(copy.basis(), true).unwrap();
        assert_eq!(copy.basis(), again.basis());
    }

    #[test]
    fn centralizer_examples() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let full = algebra_closure(&[ExactMatrix::unit(&f2, 2, 0, 1), ExactMatrix::unit(&f2, 2, 1, 0)], true).unwrap();
        assert_eq!(centralizer(&full).dim(), 1);
        let copy = algebra_closure(&[omega()], true).unwrap();
        let c = centralizer(&copy);
        assert_eq!(c.dim(), 2);
        assert_eq!(c, copy);
        assert_eq!(centralizer(&algebra_closure_in(&f2, &f2, 3, &[], true).unwrap()).dim(), 9);
        assert_eq!(centralizer(&centralizer(&full)), full);
    }

    #[test]
    fn division_degrees() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let full = algebra_closure(&[ExactMatrix::unit(&f2, 2, 0, 1), ExactMatrix::unit(&f2, 2, 1, 0)], true).unwrap();
        assert_eq!(division_degree(&full, true).unwrap(), DivisionDegree { r: 1, dim_check: true });
        let copy = algebra_closure(&[omega()], true).unwrap();
        assert_eq!(division_degree(&copy, true).unwrap(), DivisionDegree { r: 2, dim_check: true });
        // upper triangular 2×2 matrices: reducible, and the count fails
        let tri = algebra_closure(&[ExactMatrix::unit(&f2, 2, 0, 1), ExactMatrix::unit(&f2, 2, 0, 0)], true).unwrap();
        assert_eq!(tri.dim(), 3);
        assert!(!division_degree(&tri, false).unwrap().dim_check);
        assert!(matches!(division_degree(&tri, true), Err(Error::StructureViolation(_))));
        assert_eq!(min_rank_search(&full, 0, 8), Some(1));
        assert_eq!(min_rank_search(&copy, 0, 8), Some(2));
    }

    #[test]
    fn left_regular_examples() {
        let q = FieldDescriptor::rationals();
        assert_eq!(left_regular_representation(&algebra_closure_in(&q, &q, 2, &[], true).unwrap()).unwrap(), vec![ExactMatrix::identity(&q, 1)]);

        let full = algebra_closure(&[ExactMatrix::unit(&q, 2, 0, 1), ExactMatrix::unit(&q, 2, 1, 0)], true).unwrap();
        let reps = left_regular_representation(&full).unwrap();
        let id = full.coordinates(&ExactMatrix::identity(&q, 2)).unwrap();
        let l_id = id.iter().zip(&reps).fold(ExactMatrix::zeros(&q, 4, 4), |acc, (c, l)| &acc + &l.scale(c));
        assert_eq!(l_id, ExactMatrix::identity(&q, 4));

        let f2 = FieldDescriptor::prime(2).unwrap();
        let copy = algebra_closure(&[omega()], true).unwrap();
        // canonical basis of span{I, ω} is {[1 1; 1 0] = I + ω, ω}; read [L_ω] in it
        let reps = left_regular_representation(&copy).unwrap();
        let coords = copy.coordinates(&omega()).unwrap();
        let l_omega = coords.iter().zip(&reps).fold(ExactMatrix::zeros(&f2, 2, 2), |acc, (c, l)| &acc + &l.scale(c));
        assert_eq!(l_omega.char_poly().unwrap().to_string(), "x^2+x+1");
    }

    #[test]
    fn similarity_over_extension() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let f4 = FieldDescriptor::finite(2, 2).unwrap();
        let gens: Vec<ExactMatrix> = vec![ExactMatrix::unit(&f4, 2, 0, 1), ExactMatrix::unit(&f4, 2, 1, 0)];
        let a = algebra_closure_over(&f2, &gens, true).unwrap();
        assert_eq!(a.dim(), 4);
        let sim = construct_similarity_to_full(&a, 0).unwrap();
        assert!(verify_similarity(&a, &sim));

        let q = ExactMatrix::parse(&f4, &[vec!["t", "1"], vec!["0", "t+1"]]).unwrap();
        let qi = q.inverse().unwrap();
        let conj: Vec<ExactMatrix> = gens.iter().map(|g| &(&q * g) * &qi).collect();
        let a = algebra_closure_over(&f2, &conj, true).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.basis().iter().any(|b| b.entries().any(|x| !f4.in_subfield(&f2, x).unwrap())));
        let sim = construct_similarity_to_full(&a, 0).unwrap();
        assert!(verify_similarity(&a, &sim));
        let p_inv = sim.p.inverse().unwrap();
        let back: Vec<ExactMatrix> = a.basis().iter().map(|b| &(&p_inv * b) * &sim.p).collect();
        let std = AlgebraBasis::span(&f2, &f4, 2, &back).unwrap();
        assert_eq!(std.dim(), 4);
        assert!(back.iter().all(|b| b.entries().all(|x| f4.in_subfield(&f2, x).unwrap())));
    }

    #[test]
    fn similarity_degenerate_and_rejected() {
        let q = FieldDescriptor::rationals();
        let one = algebra_closure_in(&q, &q, 1, &[], true).unwrap();
        let sim = construct_similarity_to_full(&one, 0).unwrap();
        assert_eq!(sim.p, ExactMatrix::identity(&q, 1));
        assert_eq!(sim.units.len(), 1);
        assert!(matches!(
            construct_similarity_to_full(&algebra_closure_in(&q, &q, 2, &[], true).unwrap(), 0),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn matrix_units_over_gf2_n3() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let gens: Vec<ExactMatrix> = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| ExactMatrix::unit(&f2, 3, i, j))
            .collect();
        let a = algebra_closure(&gens, false).unwrap();
        assert!(a.is_full());
        let sim = construct_similarity_to_full(&a, 0).unwrap();
        assert!(verify_similarity(&a, &sim));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let prod = &sim.units[i * 3 + j] * &sim.units[k * 3 + l];
                        let expect = if j == k { sim.units[i * 3 + l].clone() } else { ExactMatrix::zeros(&f2, 3, 3) };
                        assert_eq!(prod, expect);
                    }
                }
            }
        }
    }
}
