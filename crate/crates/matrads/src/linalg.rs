//! Exact sparse linear algebra over GF(2) and the rationals.
//!
//! Everything here is deterministic: vectors and matrices store entries in
//! `BTreeMap`s, echelon reduction always pivots on the lowest-index column,
//! and particular solutions set all free variables to zero. Determinism is
//! load-bearing: transfer manifests are diffed byte-for-byte in tests.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Scalar operations needed by the elimination routines.
///
/// Implementations must be exact; `inv` is only ever called on values for
/// which `is_zero` returned false.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Canonical image of an integer, used by model builders and tests.
    fn from_int(n: i64) -> Self {
        let mut acc = Self::zero();
        let step = if n >= 0 { Self::one() } else { Self::one().neg() };
        for _ in 0..n.unsigned_abs() {
            acc = acc.add(&step);
        }
        acc
    }

    /// Plain-text rendering for manifests ("1", "0", "-3/2", ...).
    fn render(&self) -> String;
}

/// The two-element field.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf2(pub bool);

impl fmt::Debug for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(self.0))
    }
}

impl Field for Gf2 {
    fn zero() -> Self {
        Gf2(false)
    }
    fn one() -> Self {
        Gf2(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        Gf2(self.0 ^ rhs.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn mul(&self, rhs: &Self) -> Self {
        Gf2(self.0 & rhs.0)
    }
    fn inv(&self) -> Self {
        debug_assert!(self.0, "inverse of zero in GF(2)");
        *self
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn from_int(n: i64) -> Self {
        Gf2(n.rem_euclid(2) == 1)
    }
    fn render(&self) -> String {
        if self.0 { "1".into() } else { "0".into() }
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else if self.is_negative() {
            format!("-{}/{}", self.numer().magnitude(), self.denom().magnitude())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("not a complex: composite differential is nonzero")]
    NotAComplex,
    #[error("not a cycle: the vector has nonzero boundary")]
    NotACycle,
    #[error("vector lies outside the span of the stored cycles")]
    OutsideSpan,
}

/// Sparse vector with a fixed ambient dimension. Stored entries are nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector<F: Field> {
    dim: usize,
    entries: BTreeMap<usize, F>,
}

impl<F: Field> Vector<F> {
    pub fn zero(dim: usize) -> Self {
        Vector { dim, entries: BTreeMap::new() }
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zero(dim);
        v.set(index, F::one());
        v
    }

    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut v = Self::zero(dim);
        for (i, c) in entries {
            v.add_to(i, &c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> F {
        self.entries.get(&index).cloned().unwrap_or_else(F::zero)
    }

    pub fn set(&mut self, index: usize, value: F) {
        assert!(index < self.dim, "vector index {index} out of range {}", self.dim);
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_to(&mut self, index: usize, value: &F) {
        let sum = self.get(index).add(value);
        self.set(index, sum);
    }

    /// self += c * other
    pub fn add_scaled(&mut self, c: &F, other: &Vector<F>) {
        assert_eq!(self.dim, other.dim, "vector dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (i, v) in &other.entries {
            self.add_to(*i, &c.mul(v));
        }
    }

    pub fn add(&self, other: &Vector<F>) -> Vector<F> {
        let mut out = self.clone();
        out.add_scaled(&F::one(), other);
        out
    }

    pub fn sub(&self, other: &Vector<F>) -> Vector<F> {
        let mut out = self.clone();
        out.add_scaled(&F::one().neg(), other);
        out
    }

    pub fn scale(&self, c: &F) -> Vector<F> {
        let mut out = Self::zero(self.dim);
        out.add_scaled(c, self);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &F)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    /// Lowest nonzero index, if any.
    pub fn leading(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }
}

impl<F: Field> fmt::Debug for Vector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[dim {}:", self.dim)?;
        for (i, v) in &self.entries {
            write!(f, " {i}:{v:?}")?;
        }
        write!(f, "]")
    }
}

/// Row-major sparse matrix. Stored entries are nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, F>>,
}

impl<F: Field> SparseMatrix<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.data[row].get(&col).cloned().unwrap_or_else(F::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: F) {
        assert!(row < self.rows && col < self.cols, "index ({row},{col}) out of range");
        if value.is_zero() {
            self.data[row].remove(&col);
        } else {
            self.data[row].insert(col, value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &F) {
        let sum = self.get(row, col).add(value);
        self.set(row, col, sum);
    }

    pub fn row_vector(&self, row: usize) -> Vector<F> {
        Vector { dim: self.cols, entries: self.data[row].clone() }
    }

    pub fn col_vector(&self, col: usize) -> Vector<F> {
        let mut v = Vector::zero(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if let Some(c) = row.get(&col) {
                v.set(r, c.clone());
            }
        }
        v
    }

    pub fn transpose(&self) -> SparseMatrix<F> {
        let mut out = Self::zero(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out.set(*c, r, v.clone());
            }
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix<F>) -> SparseMatrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, row) in other.data.iter().enumerate() {
            for (c, v) in row {
                out.add_to(r, *c, v);
            }
        }
        out
    }

    pub fn scale(&self, c: &F) -> SparseMatrix<F> {
        let mut out = Self::zero(self.rows, self.cols);
        for (r, row) in self.data.iter().enumerate() {
            for (col, v) in row {
                out.set(r, *col, c.mul(v));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vector<F>) -> Vector<F> {
        assert_eq!(self.cols, v.dim, "matrix-vector shape mismatch");
        let mut out = Vector::zero(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = F::zero();
            for (c, m) in row {
                acc = acc.add(&m.mul(&v.get(*c)));
            }
            out.set(r, acc);
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix<F>) -> SparseMatrix<F> {
        assert_eq!(self.cols, other.rows, "matrix-matrix shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    out.add_to(r, *c, &a.mul(b));
                }
            }
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }
}

impl<F: Field> fmt::Debug for SparseMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:?} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Origin tag for echelon rows inside [`Homology`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tag {
    Boundary,
    Rep(usize),
}

/// Forward-reduced echelon accumulator keyed by pivot column.
struct Echelon<F: Field> {
    dim: usize,
    rows: BTreeMap<usize, (Vector<F>, Tag)>,
}

impl<F: Field> Echelon<F> {
    fn new(dim: usize) -> Self {
        Echelon { dim, rows: BTreeMap::new() }
    }

    /// Reduce `v` against the stored rows. Returns the remainder and, when
    /// `trace` is set, the coefficient used on each row, keyed by pivot.
    fn reduce(&self, v: &Vector<F>, trace: bool) -> (Vector<F>, BTreeMap<usize, F>) {
        let mut rem = v.clone();
        let mut used = BTreeMap::new();
        loop {
            let Some(lead) = rem.leading() else { break };
            let Some((row, _)) = self.rows.get(&lead) else { break };
            // row has a unit leading entry by construction
            let c = rem.get(lead);
            rem.add_scaled(&c.neg(), row);
            if trace {
                used.insert(lead, c);
            }
        }
        // sweep interior columns that have pivots but were not leading
        let pivots: Vec<usize> = self
            .rows
            .range(rem.leading().unwrap_or(self.dim)..)
            .map(|(p, _)| *p)
            .collect();
        for p in pivots {
            let c = rem.get(p);
            if c.is_zero() {
                continue;
            }
            let row = &self.rows[&p].0;
            rem.add_scaled(&c.neg(), row);
            if trace {
                let prev = used.remove(&p).unwrap_or_else(F::zero);
                let total = prev.add(&c);
                if !total.is_zero() {
                    used.insert(p, total);
                }
            }
        }
        (rem, used)
    }

    /// Insert `v`; returns the stored (normalized) row if it added rank.
    fn insert(&mut self, v: &Vector<F>, tag: Tag) -> Option<Vector<F>> {
        let (rem, _) = self.reduce(v, false);
        let lead = rem.leading()?;
        let normalized = rem.scale(&rem.get(lead).inv());
        self.rows.insert(lead, (normalized.clone(), tag));
        Some(normalized)
    }
}

/// A choice of basis for `ker(d_out) / im(d_in)`, with enough retained
/// state to express any cycle in that basis afterwards.
pub struct Homology<F: Field> {
    dim: usize,
    table: Echelon<F>,
    reps: Vec<Vector<F>>,
    d_out: SparseMatrix<F>,
}

impl<F: Field> fmt::Debug for Homology<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Homology(dim {}, rank {})", self.dim, self.reps.len())
    }
}

impl<F: Field> Homology<F> {
    pub fn reps(&self) -> &[Vector<F>] {
        &self.reps
    }

    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Express the class of a cycle `v` in the stored representative basis.
    ///
    /// The returned vector `c` satisfies `v = (boundary) + sum c_i * reps[i]`
    /// exactly, not merely up to homology.
    pub fn coset_reduce(&self, v: &Vector<F>) -> Result<Vector<F>, LinalgError> {
        if v.dim() != self.dim {
            return Err(LinalgError::Dimension(format!(
                "cycle has dim {}, chain group has dim {}",
                v.dim(),
                self.dim
            )));
        }
        if !self.d_out.mul_vec(v).is_zero() {
            return Err(LinalgError::NotACycle);
        }
        let (rem, used) = self.table.reduce(v, true);
        if !rem.is_zero() {
            return Err(LinalgError::OutsideSpan);
        }
        let mut coeffs = Vector::zero(self.reps.len());
        for (pivot, c) in used {
            if let (_, Tag::Rep(i)) = self.table.rows[&pivot] {
                coeffs.add_to(i, &c);
            }
        }
        Ok(coeffs)
    }
}

/// Homology of the three-term complex `src --d_in--> mid --d_out--> dst`.
///
/// Fails with [`LinalgError::NotAComplex`] unless `d_out * d_in = 0`.
/// Representatives are deterministic: boundaries are echelonized first
/// (columns of `d_in` in index order), then kernel basis vectors of `d_out`
/// are folded in; each one that adds rank becomes a representative.
pub fn homology_basis<F: Field>(
    d_in: &SparseMatrix<F>,
    d_out: &SparseMatrix<F>,
) -> Result<Homology<F>, LinalgError> {
    if d_in.rows() != d_out.cols() {
        return Err(LinalgError::Dimension(format!(
            "d_in maps into dim {}, d_out maps out of dim {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(LinalgError::NotAComplex);
    }
    let dim = d_in.rows();
    let mut table = Echelon::new(dim);
    for c in 0..d_in.cols() {
        table.insert(&d_in.col_vector(c), Tag::Boundary);
    }
    let mut reps = Vec::new();
    for k in kernel_basis(d_out) {
        let tag = Tag::Rep(reps.len());
        if let Some(stored) = table.insert(&k, tag) {
            reps.push(stored);
        }
    }
    Ok(Homology { dim, table, reps, d_out: d_out.clone() })
}

/// Deterministic kernel basis of `a`, one vector per free column in
/// ascending column order.
pub fn kernel_basis<F: Field>(a: &SparseMatrix<F>) -> Vec<Vector<F>> {
    let mut ech = Echelon::new(a.cols());
    for r in 0..a.rows() {
        ech.insert(&a.row_vector(r), Tag::Boundary);
    }
    let mut basis = Vec::new();
    for free in 0..a.cols() {
        if ech.rows.contains_key(&free) {
            continue;
        }
        let mut k = Vector::unit(a.cols(), free);
        // back-substitute pivot variables in descending pivot order
        for (&pivot, (row, _)) in ech.rows.range(..free).rev() {
            let mut acc = F::zero();
            for (c, coef) in row.iter() {
                if c > pivot {
                    acc = acc.add(&coef.mul(&k.get(c)));
                }
            }
            k.set(pivot, acc.neg());
        }
        basis.push(k);
    }
    basis
}

/// Deterministic particular solution of `a x = b`: echelonize the augmented
/// rows, fail on inconsistency, set free variables to zero, back-substitute.
pub fn rref_solve<F: Field>(a: &SparseMatrix<F>, b: &Vector<F>) -> Result<Vector<F>, LinalgError> {
    if a.rows() != b.dim() {
        return Err(LinalgError::Dimension(format!(
            "matrix has {} rows, rhs has dim {}",
            a.rows(),
            b.dim()
        )));
    }
    let n = a.cols();
    let mut ech = Echelon::new(n + 1);
    for r in 0..a.rows() {
        let mut aug = Vector::zero(n + 1);
        for (c, v) in a.row_vector(r).iter() {
            aug.set(c, v.clone());
        }
        aug.set(n, b.get(r));
        ech.insert(&aug, Tag::Boundary);
    }
    if ech.rows.contains_key(&n) {
        return Err(LinalgError::Inconsistent);
    }
    let mut x = Vector::zero(n);
    for (&pivot, (row, _)) in ech.rows.iter().rev() {
        let mut acc = row.get(n);
        for (c, coef) in row.iter() {
            if c > pivot && c < n {
                acc = acc.sub(&coef.mul(&x.get(c)));
            }
        }
        x.set(pivot, acc);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn gf2_arithmetic() {
        let one = Gf2::one();
        assert_eq!(one.add(&one), Gf2::zero());
        assert_eq!(one.mul(&one), one);
        assert_eq!(one.neg(), one);
        assert_eq!(Gf2::from_int(7), one);
        assert_eq!(Gf2::from_int(-2), Gf2::zero());
    }

    #[test]
    fn rational_render() {
        assert_eq!(q(3).render(), "3");
        let half = q(1).mul(&q(2).inv());
        assert_eq!(half.render(), "1/2");
        assert_eq!(half.neg().render(), "-1/2");
    }

    #[test]
    fn solve_prefers_lowest_pivot() {
        // x + y = 1 has the deterministic solution (1, 0)
        let a = SparseMatrix::from_rows(vec![vec![q(1), q(1)]]);
        let b = Vector::from_entries(1, [(0, q(1))]);
        let x = rref_solve(&a, &b).unwrap();
        assert_eq!(x.get(0), q(1));
        assert_eq!(x.get(1), q(0));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = SparseMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)]]);
        let b = Vector::from_entries(2, [(0, q(1)), (1, q(3))]);
        assert_eq!(rref_solve(&a, &b), Err(LinalgError::Inconsistent));
    }

    #[test]
    fn solve_back_substitutes() {
        // x + 2y = 5, 3y = 6  =>  y = 2, x = 1
        let a = SparseMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(0), q(3)]]);
        let b = Vector::from_entries(2, [(0, q(5)), (1, q(6))]);
        let x = rref_solve(&a, &b).unwrap();
        assert_eq!(x.get(0), q(1));
        assert_eq!(x.get(1), q(2));
    }

    #[test]
    fn kernel_over_both_fields() {
        let a = SparseMatrix::from_rows(vec![vec![q(1), q(1)]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].get(0), q(-1));
        assert_eq!(k[0].get(1), q(1));

        let a2 = SparseMatrix::from_rows(vec![vec![Gf2(true), Gf2(true)]]);
        let k2 = kernel_basis(&a2);
        assert_eq!(k2.len(), 1);
        assert_eq!(k2[0].get(0), Gf2(true));
        assert_eq!(k2[0].get(1), Gf2(true));
    }

    /// Interval complex: vertices a, b and edges e, f, both with boundary
    /// b - a. One component, one independent loop e - f.
    fn circle() -> (SparseMatrix<Q>, SparseMatrix<Q>) {
        let d_edges =
            SparseMatrix::from_rows(vec![vec![q(-1), q(-1)], vec![q(1), q(1)]]);
        (d_edges, SparseMatrix::zero(0, 2))
    }

    #[test]
    fn homology_of_doubled_interval() {
        let (d1, d0) = circle();
        // H_0: vertices modulo image of d1
        let h0 = homology_basis(&d1, &d0).unwrap();
        assert_eq!(h0.rank(), 1);
        // H_1: kernel of d1 with no boundaries entering
        let h1 = homology_basis(&SparseMatrix::zero(2, 0), &d1).unwrap();
        assert_eq!(h1.rank(), 1);
        let loop_class = h1.reps()[0].clone();
        assert_eq!(loop_class.get(0), q(1));
        assert_eq!(loop_class.get(1), q(-1));

        // coset reduction: 3e - 3f reduces to 3 * rep
        let v = Vector::from_entries(2, [(0, q(3)), (1, q(-3))]);
        let c = h1.coset_reduce(&v).unwrap();
        assert_eq!(c.get(0), q(3));

        // boundaries reduce to zero coefficients
        let b = d1.col_vector(0);
        let c0 = h0.coset_reduce(&b).unwrap();
        assert!(c0.is_zero());
    }

    #[test]
    fn homology_rejects_non_complexes() {
        let d_in = SparseMatrix::from_rows(vec![vec![q(1)], vec![q(0)]]);
        let d_out = SparseMatrix::from_rows(vec![vec![q(1), q(0)]]);
        assert_eq!(homology_basis(&d_in, &d_out).unwrap_err(), LinalgError::NotAComplex);
    }

    #[test]
    fn coset_reduce_rejects_non_cycles() {
        let (d1, _) = circle();
        let h0 = homology_basis(&SparseMatrix::zero(2, 0), &d1).unwrap();
        let not_cycle = Vector::unit(2, 0);
        assert_eq!(h0.coset_reduce(&not_cycle).unwrap_err(), LinalgError::NotACycle);
    }

    #[test]
    fn matrix_algebra_round_trips() {
        let m = SparseMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]);
        let id = SparseMatrix::identity(2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(m.transpose().transpose(), m);
        let v = Vector::from_entries(2, [(0, q(1)), (1, q(1))]);
        let mv = m.mul_vec(&v);
        assert_eq!(mv.get(0), q(3));
        assert_eq!(mv.get(1), q(7));
    }
}
