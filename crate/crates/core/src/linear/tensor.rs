//! Tensor products over a division algebra, realized as quotients of the
//! k-tensor space by the balancing relations `(m·d)⊗n − m⊗(d·n)`.

use crate::arith::algebra::DivisionAlgebra;
use crate::arith::field::Field;
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::subspace::{Quotient, Subspace, VectorSpace};

/// One side of a module structure: `actions[d]` is the matrix by which basis
/// element `d` of `algebra` acts.
#[derive(Clone, Copy)]
pub struct ModuleView<'a, F: Field> {
    pub algebra: &'a DivisionAlgebra<F>,
    pub space: &'a VectorSpace,
    pub actions: &'a [Matrix<F>],
}

impl<'a, F: Field> ModuleView<'a, F> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// `M ⊗_D N` together with the projection from `M ⊗_k N`.
#[derive(Clone, Debug)]
pub struct TensorProduct<F: Field> {
    pub quotient: Quotient<F>,
    pub left_dim: usize,
    pub right_dim: usize,
}

impl<F: Field> TensorProduct<F> {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Ambient index of the pure tensor `e_a ⊗ e_b`.
    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        a * self.right_dim + b
    }

    /// Ambient pair `(a, b)` whose pure tensor lifts quotient basis vector `t`.
    pub fn lift_pair(&self, t: usize) -> (usize, usize) {
        let c = self.quotient.lift_index(t);
        (c / self.right_dim, c % self.right_dim)
    }

    /// Action on the quotient induced by `x ↦ act·x` on the left factor.
    /// Only meaningful when `act` commutes with the balancing action.
    pub fn induced_left(&self, act: &Matrix<F>) -> Matrix<F> {
        self.induced(
            |a, b, f, out| {
                for x in 0..self.left_dim {
                    let c = act.get(x, a);
                    if !f.is_zero(c) {
                        self.quotient.accumulate_unit(out, self.pair_index(x, b), c);
                    }
                }
            },
            act.field(),
        )
    }

    /// Action on the quotient induced by `act` on the right factor.
    pub fn induced_right(&self, act: &Matrix<F>) -> Matrix<F> {
        self.induced(
            |a, b, f, out| {
                for y in 0..self.right_dim {
                    let c = act.get(y, b);
                    if !f.is_zero(c) {
                        self.quotient.accumulate_unit(out, self.pair_index(a, y), c);
                    }
                }
            },
            act.field(),
        )
    }

    fn induced(&self, image: impl Fn(usize, usize, &F, &mut Vec<F::Elem>), f: &F) -> Matrix<F> {
        let cols: Vec<Vec<F::Elem>> = (0..self.dim())
            .map(|t| {
                let (a, b) = self.lift_pair(t);
                let mut out = vec![f.zero(); self.dim()];
                image(a, b, f, &mut out);
                out
            })
            .collect();
        Matrix::from_columns(f, self.dim(), &cols)
    }

    /// Projection of the pure tensor `x ⊗ y` given in factor coordinates.
    pub fn project_pure(&self, x: &[F::Elem], y: &[F::Elem], f: &F) -> Vec<F::Elem> {
        let mut out = vec![f.zero(); self.dim()];
        for (a, xa) in x.iter().enumerate() {
            if f.is_zero(xa) {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if !f.is_zero(yb) {
                    self.quotient
                        .accumulate_unit(&mut out, self.pair_index(a, b), &f.mul(xa, yb));
                }
            }
        }
        out
    }
}

/// `right ⊗_D left`, where `right` carries a right D-action and `left` a left
/// D-action.
pub fn tensor_over_division_ring<F: Field>(
    right: ModuleView<'_, F>,
    left: ModuleView<'_, F>,
) -> Result<TensorProduct<F>> {
    if right.algebra != left.algebra {
        return Err(Error::ActionMismatch(format!(
            "right factor is over {} but left factor is over {}",
            right.algebra.name(),
            left.algebra.name()
        )));
    }
    let d = right.algebra;
    let f = d.field();
    if right.actions.len() != d.dim() || left.actions.len() != d.dim() {
        return Err(Error::ActionMismatch(
            "one action matrix per algebra basis element expected".into(),
        ));
    }
    let (m, n) = (right.dim(), left.dim());
    let ambient = right.space.tensor(left.space);
    let mut relations = Subspace::zero(f, m * n);
    for (r_act, l_act) in right.actions.iter().zip(left.actions) {
        if r_act.is_identity() && l_act.is_identity() {
            continue;
        }
        for a in 0..m {
            for b in 0..n {
                let mut v = vec![f.zero(); m * n];
                for x in 0..m {
                    let c = r_act.get(x, a);
                    if !f.is_zero(c) {
                        v[x * n + b] = f.add(&v[x * n + b], c);
                    }
                }
                for y in 0..n {
                    let c = l_act.get(y, b);
                    if !f.is_zero(c) {
                        v[a * n + y] = f.sub(&v[a * n + y], c);
                    }
                }
                relations.insert(&v);
            }
        }
    }
    Ok(TensorProduct {
        quotient: Quotient::new(ambient, relations)?,
        left_dim: m,
        right_dim: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::algebra::make_extension_field;
    use crate::arith::field::Rationals;

    #[test]
    fn over_the_base_field_nothing_is_identified() {
        let q = Rationals;
        let k = DivisionAlgebra::base(&q);
        let s2 = VectorSpace::standard(2);
        let s3 = VectorSpace::standard(3);
        let id2 = [Matrix::identity(&q, 2)];
        let id3 = [Matrix::identity(&q, 3)];
        let t = tensor_over_division_ring(
            ModuleView {
                algebra: &k,
                space: &s2,
                actions: &id2,
            },
            ModuleView {
                algebra: &k,
                space: &s3,
                actions: &id3,
            },
        )
        .unwrap();
        assert_eq!(t.dim(), 6);
        assert!(t.quotient.projection().matrix.is_identity());
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let q = Rationals;
        let k = DivisionAlgebra::base(&q);
        let l = make_extension_field(&q, &[q.from_i64(-2), q.zero(), q.one()]).unwrap();
        let s = VectorSpace::standard(2);
        let acts_l: Vec<_> = (0..2).map(|i| l.right_mul_matrix(&l.basis_coords(i))).collect();
        let acts_k = [Matrix::identity(&q, 2)];
        let r = tensor_over_division_ring(
            ModuleView {
                algebra: &l,
                space: &s,
                actions: &acts_l,
            },
            ModuleView {
                algebra: &k,
                space: &s,
                actions: &acts_k,
            },
        );
        assert!(matches!(r, Err(Error::ActionMismatch(_))));
    }
}
