use std::cmp::Ordering;
use std::fmt;

use super::ExactMatrix;
use crate::field::{FieldDescriptor, Scalar};

/// Incrementally grown basis in semi-echelon form.
///
/// Each stored row has a pivot entry equal to one, and zeros at the pivots of
/// all rows inserted before it. Reducing a vector against the rows in
/// insertion order therefore clears every pivot position.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: FieldDescriptor,
    len: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: &FieldDescriptor, len: usize) -> Self {
        EchelonBasis {
            field: field.clone(),
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.len
    }

    /// Subtracts the stored rows from `v` so that it vanishes on every pivot.
    pub fn reduce(&self, v: &mut [Scalar]) {
        let f = &self.field;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&v[pc]) {
                continue;
            }
            let c = v[pc].clone();
            for j in pc..self.len {
                if !f.is_zero(&row[j]) {
                    v[j] = f.sub(&v[j], &f.mul(&c, &row[j]));
                }
            }
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Reduces `v` and stores the residual if it is nonzero. Returns whether
    /// the dimension grew.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        debug_assert_eq!(v.len(), self.len);
        self.reduce(&mut v);
        self.push_reduced(v)
    }

    /// Stores an already reduced vector; zero vectors are ignored.
    pub fn push_reduced(&mut self, mut v: Vec<Scalar>) -> bool {
        let f = &self.field;
        let Some(pc) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[pc]).expect("pivot is nonzero");
        for x in v.iter_mut().skip(pc) {
            *x = f.mul(x, &inv);
        }
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }

    /// Canonical reduced row-echelon form of the span.
    pub fn into_subspace(self) -> Subspace {
        let EchelonBasis {
            field,
            len,
            rows,
            pivots,
        } = self;
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&i| pivots[i]);
        let mut rows: Vec<Vec<Scalar>> = order.iter().map(|&i| rows[i].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|&i| pivots[i]).collect();
        for r in (0..rows.len()).rev() {
            let pc = pivots[r];
            let (above, rest) = rows.split_at_mut(r);
            let pivot_row = &rest[0];
            for other in above.iter_mut() {
                if field.is_zero(&other[pc]) {
                    continue;
                }
                let c = other[pc].clone();
                for j in pc..len {
                    if !field.is_zero(&pivot_row[j]) {
                        other[j] = field.sub(&other[j], &field.mul(&c, &pivot_row[j]));
                    }
                }
            }
        }
        Subspace {
            field,
            ambient: len,
            rows,
            pivots,
        }
    }
}

/// A subspace of `F^n`, stored as its reduced row-echelon basis.
///
/// The representation is canonical: equal subspaces have identical rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: FieldDescriptor,
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &FieldDescriptor, ambient: usize) -> Self {
        EchelonBasis::new(field, ambient).into_subspace()
    }

    pub fn full(field: &FieldDescriptor, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Subspace {
            field: field.clone(),
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span<I>(field: &FieldDescriptor, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut basis = EchelonBasis::new(field, ambient);
        for v in vectors {
            basis.insert(v);
            if basis.is_full() {
                break;
            }
        }
        basis.into_subspace()
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn is_proper_nonzero(&self) -> bool {
        !self.is_zero() && !self.is_full()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns that are not pivots; the corresponding unit vectors span a
    /// complement.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&j| !is_pivot[j]).collect()
    }

    /// Residual of `v` modulo the subspace; it vanishes on every pivot.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&w[pc]) {
                continue;
            }
            let c = w[pc].clone();
            for j in pc..self.ambient {
                if !f.is_zero(&row[j]) {
                    w[j] = f.sub(&w[j], &f.mul(&c, &row[j]));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.contains(v).then(|| self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Whether `A v` stays inside the subspace for every generator `A`.
    pub fn is_invariant_under(&self, generators: &[ExactMatrix]) -> bool {
        generators
            .iter()
            .all(|g| self.rows.iter().all(|r| self.contains(&g.mul_vec(r))))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(&self.field, self.ambient, self.rows.iter().chain(&other.rows).cloned())
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(&self.field, self.ambient);
        }
        // x = Σ a_i u_i lies in `other` iff Σ a_i residual(u_i) = 0.
        let residuals: Vec<Vec<Scalar>> = self.rows.iter().map(|u| other.reduce(u)).collect();
        let k = self.rows.len();
        let system = ExactMatrix::from_fn(&self.field, self.ambient, k, |i, j| residuals[j][i].clone());
        let combos = system.kernel();
        Subspace::span(
            &self.field,
            self.ambient,
            combos.basis().iter().map(|a| self.combine(a)),
        )
    }

    /// `Σ a_i b_i` over the echelon basis.
    pub fn combine(&self, a: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.ambient];
        for (c, row) in a.iter().zip(&self.rows) {
            if f.is_zero(c) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o = f.mul_add(o, c, x);
            }
        }
        out
    }

    /// `{ v : u · v = 0 for all u in self }`
    pub fn annihilator(&self) -> Subspace {
        match self.basis_matrix() {
            None => Subspace::full(&self.field, self.ambient),
            Some(m) => m.kernel(),
        }
    }

    /// Basis rows as a `dim × n` matrix; `None` for the zero subspace.
    pub fn basis_matrix(&self) -> Option<ExactMatrix> {
        if self.rows.is_empty() {
            return None;
        }
        Some(ExactMatrix::from_rows(&self.field, self.rows.clone()).expect("rows are well formed"))
    }

    pub fn to_echelon(&self) -> EchelonBasis {
        EchelonBasis {
            field: self.field.clone(),
            len: self.ambient,
            rows: self.rows.clone(),
            pivots: self.pivots.clone(),
        }
    }

    /// Basis rows rendered with the field's literal syntax.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| self.field.format_scalar(x)).collect())
            .collect()
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by dimension, then lexicographically on echelon rows.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.rows.len().cmp(&other.rows.len()))
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {}: {:?})", self.dim(), self.ambient, self.to_strings())
    }
}

/// Right kernel of the matrix whose rows are given in reduced echelon form.
pub(crate) fn kernel_from_rref(field: &FieldDescriptor, rref: &Subspace) -> Subspace {
    let n = rref.ambient();
    let free = rref.free_columns();
    let vectors = free.iter().map(|&fc| {
        let mut v = vec![field.zero(); n];
        v[fc] = field.one();
        for (row, &pc) in rref.basis().iter().zip(rref.pivots()) {
            v[pc] = field.neg(&row[fc]);
        }
        v
    });
    Subspace::span(field, n, vectors)
}
