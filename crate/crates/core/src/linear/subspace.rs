//! Subspaces in canonical reduced-row-echelon form, linear maps, and quotients.
//!
//! Two subspaces of the same ambient space are equal exactly when their
//! stored RREF rows are equal, so `==` is subspace equality.

use crate::arith::field::Field;
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;

/// A finite-dimensional k-vector space with labelled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSpace {
    labels: Vec<String>,
}

impl VectorSpace {
    pub fn new(labels: Vec<String>) -> Self {
        VectorSpace { labels }
    }

    /// `k^n` with basis `e0, e1, ...`.
    pub fn standard(n: usize) -> Self {
        Self::with_prefix("e", n)
    }

    pub fn with_prefix(prefix: &str, n: usize) -> Self {
        VectorSpace {
            labels: (0..n).map(|i| format!("{prefix}{i}")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Basis of `self ⊗_k other`, ordered row-major in the factor bases.
    pub fn tensor(&self, other: &VectorSpace) -> VectorSpace {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}⊗{b}"));
            }
        }
        VectorSpace { labels }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<F: Field> {
    pub domain: VectorSpace,
    pub codomain: VectorSpace,
    pub matrix: Matrix<F>,
}

impl<F: Field> LinearMap<F> {
    pub fn new(domain: VectorSpace, codomain: VectorSpace, matrix: Matrix<F>) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} does not map a {}-dim space to a {}-dim space",
                matrix.rows(),
                matrix.cols(),
                domain.dim(),
                codomain.dim()
            )));
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.matrix.apply(v)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn kernel(&self) -> Subspace<F> {
        let f = self.matrix.field();
        let mut s = Subspace::zero(f, self.domain.dim());
        for v in self.matrix.kernel() {
            s.insert(&v);
        }
        s
    }

    pub fn image(&self) -> Subspace<F> {
        let f = self.matrix.field();
        let mut s = Subspace::zero(f, self.codomain.dim());
        for c in 0..self.matrix.cols() {
            s.insert(&self.matrix.column(c));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace {
            field: field.clone(),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let mut s = Self::zero(field, ambient);
        for i in 0..ambient {
            let mut v = vec![field.zero(); ambient];
            v[i] = field.one();
            s.rows.push(v);
            s.pivots.push(i);
        }
        s
    }

    pub fn span<'a, I>(field: &F, ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Vec<F::Elem>>,
        F::Elem: 'a,
    {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} in a {ambient}-dimensional space",
                    v.len()
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its component in this subspace along the pivot coordinates.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let coef = v[p].clone();
            if f.is_zero(&coef) {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                if !f.is_zero(r) {
                    *o = f.sub(o, &f.mul(&coef, r));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Adds `v` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length does not match ambient dimension");
        let f = self.field.clone();
        let mut r = self.reduce(v);
        let Some(lead) = r.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&r[lead]).expect("nonzero");
        for x in r.iter_mut().skip(lead) {
            if !f.is_zero(x) {
                *x = f.mul(x, &inv);
            }
        }
        let nz: Vec<usize> = (lead..self.ambient).filter(|&c| !f.is_zero(&r[c])).collect();
        for row in self.rows.iter_mut() {
            let coef = row[lead].clone();
            if f.is_zero(&coef) {
                continue;
            }
            for &c in &nz {
                row[c] = f.sub(&row[c], &f.mul(&coef, &r[c]));
            }
        }
        let at = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(at, lead);
        self.rows.insert(at, r);
        true
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same_ambient(other)?;
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(v);
        }
        Ok(s)
    }

    /// `self ∩ other`: combinations of `other`'s basis whose residues modulo
    /// `self` cancel.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same_ambient(other)?;
        let f = &self.field;
        let residues: Vec<Vec<F::Elem>> = other.rows.iter().map(|w| self.reduce(w)).collect();
        let system = Matrix::from_columns(f, self.ambient, &residues);
        let mut out = Self::zero(f, self.ambient);
        for coeffs in system.kernel() {
            let mut v = vec![f.zero(); self.ambient];
            for (c, w) in coeffs.iter().zip(&other.rows) {
                if f.is_zero(c) {
                    continue;
                }
                for (o, x) in v.iter_mut().zip(w) {
                    f.add_mul(o, c, x);
                }
            }
            out.insert(&v);
        }
        Ok(out)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|v| other.contains(v))
    }

    pub fn basis_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(&self.field, self.rows.clone(), self.ambient).expect("rows have ambient length")
    }

    fn check_same_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of {}- and {}-dimensional spaces",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Slot {
    Free(usize),
    Pivot(usize),
}

/// `ambient / kernel`, with basis the non-pivot coordinates of the kernel's
/// RREF form. The section sends quotient basis vector `t` to the standard
/// ambient basis vector `free[t]`.
#[derive(Clone, Debug)]
pub struct Quotient<F: Field> {
    space: VectorSpace,
    ambient: VectorSpace,
    kernel: Subspace<F>,
    free: Vec<usize>,
    slots: Vec<Slot>,
    // For each kernel row: the negated row restricted to free coordinates, sparse.
    pivot_images: Vec<Vec<(usize, F::Elem)>>,
}

impl<F: Field> Quotient<F> {
    pub fn new(ambient: VectorSpace, kernel: Subspace<F>) -> Result<Self> {
        if kernel.ambient() != ambient.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subspace of a {}-dim space in a {}-dim ambient",
                kernel.ambient(),
                ambient.dim()
            )));
        }
        let f = kernel.field().clone();
        let mut slots = vec![Slot::Free(0); ambient.dim()];
        for (r, &p) in kernel.pivots().iter().enumerate() {
            slots[p] = Slot::Pivot(r);
        }
        let mut free = Vec::new();
        for (c, slot) in slots.iter_mut().enumerate() {
            if let Slot::Free(t) = slot {
                *t = free.len();
                free.push(c);
            }
        }
        let pivot_images = kernel
            .rows()
            .iter()
            .map(|row| {
                free.iter()
                    .enumerate()
                    .filter(|(_, &c)| !f.is_zero(&row[c]))
                    .map(|(t, &c)| (t, f.neg(&row[c])))
                    .collect()
            })
            .collect();
        let space = VectorSpace::new(free.iter().map(|&c| ambient.labels()[c].clone()).collect());
        Ok(Quotient {
            space,
            ambient,
            kernel,
            free,
            slots,
            pivot_images,
        })
    }

    /// The identity quotient of `ambient` by zero.
    pub fn trivial(field: &F, ambient: VectorSpace) -> Self {
        let n = ambient.dim();
        Self::new(ambient, Subspace::zero(field, n)).expect("dimensions agree")
    }

    pub fn space(&self) -> &VectorSpace {
        &self.space
    }
    pub fn ambient(&self) -> &VectorSpace {
        &self.ambient
    }
    pub fn kernel(&self) -> &Subspace<F> {
        &self.kernel
    }
    pub fn dim(&self) -> usize {
        self.free.len()
    }
    pub fn ambient_dim(&self) -> usize {
        self.slots.len()
    }

    /// Ambient index of the standard vector lifting quotient basis vector `t`.
    pub fn lift_index(&self, t: usize) -> usize {
        self.free[t]
    }

    pub fn lift(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.kernel.field();
        let mut out = vec![f.zero(); self.ambient_dim()];
        for (t, x) in v.iter().enumerate() {
            out[self.free[t]] = x.clone();
        }
        out
    }

    /// `out += scalar * project(e_c)`.
    pub fn accumulate_unit(&self, out: &mut [F::Elem], c: usize, scalar: &F::Elem) {
        let f = self.kernel.field();
        if f.is_zero(scalar) {
            return;
        }
        match self.slots[c] {
            Slot::Free(t) => out[t] = f.add(&out[t], scalar),
            Slot::Pivot(r) => {
                for (t, x) in &self.pivot_images[r] {
                    f.add_mul(&mut out[*t], scalar, x);
                }
            }
        }
    }

    pub fn project(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.ambient_dim());
        let f = self.kernel.field();
        let mut out = vec![f.zero(); self.dim()];
        for (c, x) in v.iter().enumerate() {
            self.accumulate_unit(&mut out, c, x);
        }
        out
    }

    pub fn projection(&self) -> LinearMap<F> {
        let f = self.kernel.field();
        let cols: Vec<Vec<F::Elem>> = (0..self.ambient_dim())
            .map(|c| {
                let mut out = vec![f.zero(); self.dim()];
                self.accumulate_unit(&mut out, c, &f.one());
                out
            })
            .collect();
        LinearMap {
            domain: self.ambient.clone(),
            codomain: self.space.clone(),
            matrix: Matrix::from_columns(f, self.dim(), &cols),
        }
    }

    /// Matrix of the quotient map induced by `map: ambient -> target`, after
    /// checking that `map` kills the kernel.
    pub fn descend(&self, map: &Matrix<F>) -> Result<Matrix<F>> {
        if map.cols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch("map domain is not the ambient space".into()));
        }
        for row in self.kernel.rows() {
            if map.apply(row).iter().any(|x| !self.kernel.field().is_zero(x)) {
                return Err(Error::DimensionMismatch(
                    "map does not vanish on the kernel of the quotient".into(),
                ));
            }
        }
        let cols: Vec<Vec<F::Elem>> = self.free.iter().map(|&c| map.column(c)).collect();
        Ok(Matrix::from_columns(self.kernel.field(), map.rows(), &cols))
    }
}

/// The quotient `ambient / u` and its canonical projection.
pub fn quotient_map<F: Field>(ambient: &VectorSpace, u: &Subspace<F>) -> Result<(VectorSpace, LinearMap<F>)> {
    let q = Quotient::new(ambient.clone(), u.clone())?;
    Ok((q.space.clone(), q.projection()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::Rationals;

    fn v(xs: &[i64]) -> Vec<num_rational::BigRational> {
        xs.iter().map(|&x| Rationals.from_i64(x)).collect()
    }

    #[test]
    fn span_examples() {
        let q = Rationals;
        assert_eq!(Subspace::span(&q, 3, std::iter::empty()).unwrap().rank(), 0);
        assert_eq!(
            Subspace::span(&q, 3, &[v(&[1, 0, 0]), v(&[1, 1, 0])]).unwrap().rank(),
            2
        );
        assert_eq!(
            Subspace::span(&q, 3, &[v(&[1, 0, 0]), v(&[2, 0, 0])]).unwrap().rank(),
            1
        );
        assert!(Subspace::span(&q, 3, &[v(&[1, 0])]).is_err());
    }

    #[test]
    fn canonical_form_is_order_independent() {
        let q = Rationals;
        let a = Subspace::span(&q, 3, &[v(&[1, 2, 3]), v(&[0, 1, 1])]).unwrap();
        let b = Subspace::span(&q, 3, &[v(&[1, 3, 4]), v(&[2, 4, 6])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intersect_examples() {
        let q = Rationals;
        let u = Subspace::span(&q, 3, &[v(&[1, 2, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(u.intersect(&u).unwrap(), u);
        let e1 = Subspace::span(&q, 2, &[v(&[1, 0])]).unwrap();
        let e2 = Subspace::span(&q, 2, &[v(&[0, 1])]).unwrap();
        assert_eq!(e1.intersect(&e2).unwrap().rank(), 0);
        let a = Subspace::span(&q, 3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = Subspace::span(&q, 3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(
            a.intersect(&b).unwrap(),
            Subspace::span(&q, 3, &[v(&[0, 1, 0])]).unwrap()
        );
        assert!(a.intersect(&e1).is_err());
    }

    #[test]
    fn quotient_examples() {
        let q = Rationals;
        let amb = VectorSpace::standard(3);
        let (s, p) = quotient_map(&amb, &Subspace::zero(&q, 3)).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(p.matrix.is_identity());

        let e1 = Subspace::span(&q, 3, &[v(&[1, 0, 0])]).unwrap();
        let (s, p) = quotient_map(&amb, &e1).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(p.apply(&v(&[1, 0, 0])).iter().all(|x| x == &q.zero()));
        assert_eq!(p.kernel(), e1);

        let (s, _) = quotient_map(&amb, &Subspace::full(&q, 3)).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn section_then_projection_is_identity() {
        let q = Rationals;
        let u = Subspace::span(&q, 4, &[v(&[1, 1, 0, 2]), v(&[0, 0, 1, -1])]).unwrap();
        let quo = Quotient::new(VectorSpace::standard(4), u).unwrap();
        for t in 0..quo.dim() {
            let mut e = vec![q.zero(); quo.dim()];
            e[t] = q.one();
            assert_eq!(quo.project(&quo.lift(&e)), e);
        }
    }
}
