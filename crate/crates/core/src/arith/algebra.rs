//! Finite-dimensional associative algebras given by structure constants.
//!
//! Being a division ring is not checked up front; `inv` solves a linear
//! system and reports `ZeroDivisorDetected` with the offending element when
//! the left-multiplication matrix is singular. Scalars from the ground field
//! act through `unit`, so they commute with everything by construction.

use std::fmt;

use crate::arith::field::Field;
use crate::arith::poly;
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;

#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement<F: Field> {
    pub coords: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for AlgebraElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement{:?}", self.coords)
    }
}

impl<F: Field> AlgebraElement<F> {
    pub fn new(coords: Vec<F::Elem>) -> Self {
        AlgebraElement { coords }
    }
}

#[derive(Clone, PartialEq)]
pub struct DivisionAlgebra<F: Field> {
    field: F,
    name: String,
    dim: usize,
    // c[(i * dim + j) * dim + l]: coefficient of e_l in e_i * e_j
    constants: Vec<F::Elem>,
    unit: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for DivisionAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DivisionAlgebra({}, dim {} over {})",
            self.name,
            self.dim,
            self.field.name()
        )
    }
}

impl<F: Field> DivisionAlgebra<F> {
    /// Validates associativity on all basis triples and that `unit` is a
    /// two-sided identity on every basis element.
    pub fn new(
        field: &F,
        name: impl Into<String>,
        constants: Vec<Vec<Vec<F::Elem>>>,
        unit: Vec<F::Elem>,
    ) -> Result<Self> {
        let dim = unit.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        let mut flat = Vec::with_capacity(dim * dim * dim);
        for (i, row) in constants.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidAlgebra(format!(
                    "structure constants row {i} has wrong length"
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::InvalidAlgebra(format!("product e{i}*e{j} has wrong length")));
                }
                flat.extend(v);
            }
        }
        if flat.len() != dim * dim * dim {
            return Err(Error::InvalidAlgebra("structure constants have wrong shape".into()));
        }
        let alg = DivisionAlgebra {
            field: field.clone(),
            name: name.into(),
            dim,
            constants: flat,
            unit,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// The ground field itself as a one-dimensional algebra.
    pub fn base(field: &F) -> Self {
        DivisionAlgebra {
            field: field.clone(),
            name: field.name(),
            dim: 1,
            constants: vec![field.one()],
            unit: vec![field.one()],
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            let ei = self.basis_coords(i);
            if self.mul_coords(&self.unit, &ei) != ei || self.mul_coords(&ei, &self.unit) != ei {
                return Err(Error::InvalidAlgebra(format!("unit does not act as identity on e{i}")));
            }
            for j in 0..n {
                let ij = self.mul_coords(&ei, &self.basis_coords(j));
                for l in 0..n {
                    let el = self.basis_coords(l);
                    let left = self.mul_coords(&ij, &el);
                    let right = self.mul_coords(&ei, &self.mul_coords(&self.basis_coords(j), &el));
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "associativity fails on basis triple (e{i}, e{j}, e{l})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit_coords(&self) -> &[F::Elem] {
        &self.unit
    }
    pub fn unit(&self) -> AlgebraElement<F> {
        AlgebraElement::new(self.unit.clone())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn constant(&self, i: usize, j: usize, l: usize) -> &F::Elem {
        &self.constants[(i * self.dim + j) * self.dim + l]
    }

    pub fn basis_coords(&self, i: usize) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement<F> {
        AlgebraElement::new(self.basis_coords(i))
    }

    pub fn mul_coords(&self, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                let xy = f.mul(x, y);
                for (l, o) in out.iter_mut().enumerate() {
                    f.add_mul(o, &xy, self.constant(i, j, l));
                }
            }
        }
        out
    }

    pub fn mul(&self, a: &AlgebraElement<F>, b: &AlgebraElement<F>) -> AlgebraElement<F> {
        AlgebraElement::new(self.mul_coords(&a.coords, &b.coords))
    }

    /// Matrix of `x ↦ a·x`.
    pub fn left_mul_matrix(&self, a: &[F::Elem]) -> Matrix<F> {
        let cols: Vec<Vec<F::Elem>> = (0..self.dim)
            .map(|j| self.mul_coords(a, &self.basis_coords(j)))
            .collect();
        Matrix::from_columns(&self.field, self.dim, &cols)
    }

    /// Matrix of `x ↦ x·a`.
    pub fn right_mul_matrix(&self, a: &[F::Elem]) -> Matrix<F> {
        let cols: Vec<Vec<F::Elem>> = (0..self.dim)
            .map(|i| self.mul_coords(&self.basis_coords(i), a))
            .collect();
        Matrix::from_columns(&self.field, self.dim, &cols)
    }

    pub fn inv_coords(&self, a: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let zero_divisor = || Error::ZeroDivisorDetected {
            witness: a.iter().map(|x| self.field.format(x)).collect(),
        };
        let x = self.left_mul_matrix(a).solve(&self.unit).ok_or_else(zero_divisor)?;
        if self.mul_coords(a, &x) != self.unit || self.mul_coords(&x, a) != self.unit {
            return Err(zero_divisor());
        }
        Ok(x)
    }

    pub fn inv(&self, a: &AlgebraElement<F>) -> Result<AlgebraElement<F>> {
        Ok(AlgebraElement::new(self.inv_coords(&a.coords)?))
    }

    pub fn is_zero_coords(&self, a: &[F::Elem]) -> bool {
        a.iter().all(|x| self.field.is_zero(x))
    }
}

/// `base[t]/(minpoly)` with power basis `1, t, ..., t^(d-1)`. Coefficients are
/// listed constant term first and the polynomial must be monic.
pub fn make_extension_field<F: Field>(field: &F, minpoly: &[F::Elem]) -> Result<DivisionAlgebra<F>> {
    let d = minpoly.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::InvalidAlgebra(
            "minimal polynomial must have degree at least 1".into(),
        ));
    }
    if !field.is_one(&minpoly[d]) {
        return Err(Error::InvalidAlgebra("minimal polynomial must be monic".into()));
    }
    if let Some(factor) = field.find_factor(minpoly)? {
        return Err(Error::ReducibleMinpoly(format!(
            "{}: {factor}",
            poly::describe(field, minpoly)
        )));
    }
    // t^k for k < 2d - 1, reduced modulo the minimal polynomial.
    let mut powers: Vec<Vec<F::Elem>> = Vec::with_capacity(2 * d);
    for k in 0..(2 * d - 1) {
        let v = if k < d {
            let mut v = vec![field.zero(); d];
            v[k] = field.one();
            v
        } else {
            let prev = &powers[k - 1];
            // t * prev, then replace t^d by -(c_0 + ... + c_{d-1} t^{d-1})
            let top = prev[d - 1].clone();
            let mut v = vec![field.zero(); d];
            v[1..d].clone_from_slice(&prev[..d - 1]);
            for (i, c) in minpoly.iter().take(d).enumerate() {
                v[i] = field.sub(&v[i], &field.mul(&top, c));
            }
            v
        };
        powers.push(v);
    }
    let constants = (0..d)
        .map(|i| (0..d).map(|j| powers[i + j].clone()).collect())
        .collect();
    let mut unit = vec![field.zero(); d];
    unit[0] = field.one();
    let name = format!("{}[t]/({})", field.name(), poly::describe(field, minpoly));
    DivisionAlgebra::new(field, name, constants, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::{PrimeField, Rationals};

    #[test]
    fn degree_one_quotient_is_the_base_field() {
        let q = Rationals;
        let alg = make_extension_field(&q, &[q.from_i64(-1), q.one()]).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(alg.mul(&alg.unit(), &alg.unit()), alg.unit());
    }

    #[test]
    fn reducible_and_malformed_minpolys_are_rejected() {
        let q = Rationals;
        let r = make_extension_field(&q, &[q.from_i64(-4), q.zero(), q.one()]);
        assert!(matches!(r, Err(Error::ReducibleMinpoly(_))));
        assert!(make_extension_field(&q, &[q.one(), q.from_i64(2)]).is_err());
        assert!(make_extension_field(&q, &[q.one()]).is_err());
        let f5 = PrimeField::new(5).unwrap();
        // t^2 - 4 = (t - 2)(t + 2) over GF(5)
        assert!(matches!(
            make_extension_field(&f5, &[1, 0, 1]),
            Err(Error::ReducibleMinpoly(_))
        ));
    }

    #[test]
    fn inverse_of_unit_is_unit() {
        let f = PrimeField::new(7).unwrap();
        let l = make_extension_field(&f, &[4, 0, 1]).unwrap(); // t^2 - 3
        assert_eq!(l.inv(&l.unit()).unwrap(), l.unit());
    }

    #[test]
    fn singular_algebra_reports_its_witness() {
        // k x k with componentwise product: (1,0) is a zero divisor
        let q = Rationals;
        let z = q.zero();
        let o = q.one();
        let constants = vec![
            vec![vec![o.clone(), z.clone()], vec![z.clone(), z.clone()]],
            vec![vec![z.clone(), z.clone()], vec![z.clone(), o.clone()]],
        ];
        let alg = DivisionAlgebra::new(&q, "k×k", constants, vec![o.clone(), o.clone()]).unwrap();
        match alg.inv(&alg.basis_element(0)) {
            Err(Error::ZeroDivisorDetected { witness }) => assert_eq!(witness, vec!["1", "0"]),
            other => panic!("expected a zero divisor, got {other:?}"),
        }
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let q = Rationals;
        let z = q.zero();
        let o = q.one();
        // e1*e1 = e0 + e1 breaks nothing; make e1*e1 = e1 but e0 not a unit on the right
        let constants = vec![
            vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]],
            vec![vec![o.clone(), z.clone()], vec![o.clone(), z.clone()]],
        ];
        assert!(DivisionAlgebra::new(&q, "bad", constants, vec![o, z]).is_err());
    }
}
