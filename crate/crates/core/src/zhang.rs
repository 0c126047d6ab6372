//! Zhang's algebra `k⟨x_1, …, x_n⟩/(b)` and its Hilbert function by brute
//! force in `V^{⊗m}`.
//!
//! The constructor uses `b = Σ_i x_i ⊗ σ(x_{n+1-i})`; `from_relation` takes
//! any nonzero `b` for other index conventions.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::field::Field;
use crate::bimodule::Bimodule;
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::subspace::Subspace;
use crate::ncsym::{BuildOptions, Window, ZAlgebraWindow};

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct ZhangAlgebra<F: Field> {
    field: F,
    n: usize,
    sigma: Option<Matrix<F>>,
    /// Coefficient of `x_a ⊗ x_b` at index `a * n + b` (zero-based).
    relation: Vec<F::Elem>,
}

impl<F: Field> ZhangAlgebra<F> {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn sigma(&self) -> Option<&Matrix<F>> {
        self.sigma.as_ref()
    }
    pub fn relation(&self) -> &[F::Elem] {
        &self.relation
    }

    /// Nonzero terms of the relation as `(coefficient, a, b)` with one-based indices.
    pub fn relation_terms(&self) -> Vec<(String, usize, usize)> {
        self.relation
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(k, c)| (self.field.format(c), k / self.n + 1, k % self.n + 1))
            .collect()
    }
}

pub fn build_zhang<F: Field>(field: &F, n: usize, sigma: &Matrix<F>) -> Result<ZhangAlgebra<F>> {
    if n < 2 {
        return Err(Error::InvalidAlgebra(format!("Zhang algebra needs n ≥ 2, got {n}")));
    }
    if sigma.rows() != n || sigma.cols() != n {
        return Err(Error::DimensionMismatch(format!("sigma must be {n}x{n}")));
    }
    if sigma.rank() < n {
        return Err(Error::SingularSigma);
    }
    let mut relation = vec![field.zero(); n * n];
    for i in 0..n {
        // σ(x_{n-1-i}) is column n-1-i of sigma
        for r in 0..n {
            relation[i * n + r] = field.add(&relation[i * n + r], sigma.get(r, n - 1 - i));
        }
    }
    Ok(ZhangAlgebra {
        field: field.clone(),
        n,
        sigma: Some(sigma.clone()),
        relation,
    })
}

pub fn from_relation<F: Field>(field: &F, n: usize, relation: Vec<F::Elem>) -> Result<ZhangAlgebra<F>> {
    if n < 2 || relation.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "relation must have {} coefficients",
            n * n
        )));
    }
    if relation.iter().all(|c| field.is_zero(c)) {
        return Err(Error::InvalidAlgebra("relation is zero".into()));
    }
    Ok(ZhangAlgebra {
        field: field.clone(),
        n,
        sigma: None,
        relation,
    })
}

fn check_budget(n: usize, m: usize, budget: u128) -> Result<()> {
    let needed = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// `dim A_m` for `m = 0..=m_max`, refusing when `n^{m_max}` exceeds `budget`.
pub fn zhang_hilbert<F: Field>(z: &ZhangAlgebra<F>, m_max: usize, budget: u128) -> Result<Vec<usize>> {
    check_budget(z.n, m_max, budget)?;
    (0..=m_max)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&m| Ok(degree_dim(z, m)))
        .collect()
}

fn degree_dim<F: Field>(z: &ZhangAlgebra<F>, m: usize) -> usize {
    let n = z.n;
    let total = n.pow(m as u32);
    if m < 2 {
        return total;
    }
    let f = &z.field;
    let mut ideal = Subspace::zero(f, total);
    for a in 0..=m - 2 {
        let c = m - 2 - a;
        let (na, nc) = (n.pow(a as u32), n.pow(c as u32));
        for prefix in 0..na {
            for suffix in 0..nc {
                let mut v = vec![f.zero(); total];
                for (rb, coef) in z.relation.iter().enumerate() {
                    if !f.is_zero(coef) {
                        v[(prefix * n * n + rb) * nc + suffix] = coef.clone();
                    }
                }
                ideal.insert(&v);
            }
        }
    }
    total - ideal.rank()
}

/// `d_{m+1} = n·d_m − d_{m−1}` for every `m ≥ 1` covered by `dims`.
pub fn satisfies_recurrence(n: usize, dims: &[usize]) -> bool {
    dims.windows(3)
        .all(|w| (n * w[1]) as i128 - w[0] as i128 == w[2] as i128)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub m_max: usize,
    pub zhang: Vec<usize>,
    pub ncsym: Vec<usize>,
    pub equal: bool,
    pub zhang_recurrence: bool,
    pub ncsym_recurrence: bool,
    pub passed: bool,
}

/// Compares the Zhang Hilbert function with `kdim A_{0,m}` of the
/// noncommutative symmetric algebra of `k^n`.
pub fn compare_p1n<F: Field>(
    field: &F,
    n: usize,
    m_max: usize,
    sigma: &Matrix<F>,
    budget: u128,
) -> Result<CompareReport> {
    let z = build_zhang(field, n, sigma)?;
    let zhang = zhang_hilbert(&z, m_max, budget)?;
    check_budget(n, m_max, budget)?;
    let window = Window::new(0, m_max.max(2) as i64);
    let w = ZAlgebraWindow::build(Bimodule::vector_space(field, n), window, BuildOptions::default())?;
    let mut ncsym = w.dim_table()?.row(0);
    ncsym.truncate(m_max + 1);
    let equal = zhang == ncsym;
    let zhang_recurrence = satisfies_recurrence(n, &zhang);
    let ncsym_recurrence = satisfies_recurrence(n, &ncsym);
    Ok(CompareReport {
        n,
        m_max,
        passed: equal && zhang_recurrence && ncsym_recurrence,
        zhang,
        ncsym,
        equal,
        zhang_recurrence,
        ncsym_recurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::{PrimeField, Rationals};

    #[test]
    fn constructor_expansion() {
        let q = Rationals;
        let z = build_zhang(&q, 2, &Matrix::identity(&q, 2)).unwrap();
        assert_eq!(z.relation_terms(), vec![("1".into(), 1, 2), ("1".into(), 2, 1)]);
        let z = build_zhang(&q, 3, &Matrix::identity(&q, 3)).unwrap();
        assert_eq!(
            z.relation_terms(),
            vec![("1".into(), 1, 3), ("1".into(), 2, 2), ("1".into(), 3, 1)]
        );
        let singular = Matrix::from_i64(&q, &[&[1, 2], &[2, 4]]);
        assert!(matches!(build_zhang(&q, 2, &singular), Err(Error::SingularSigma)));
    }

    #[test]
    fn hilbert_functions() {
        let q = Rationals;
        let z2 = build_zhang(&q, 2, &Matrix::identity(&q, 2)).unwrap();
        assert_eq!(zhang_hilbert(&z2, 4, DEFAULT_BUDGET).unwrap(), vec![1, 2, 3, 4, 5]);
        let z3 = build_zhang(&q, 3, &Matrix::identity(&q, 3)).unwrap();
        assert_eq!(zhang_hilbert(&z3, 4, DEFAULT_BUDGET).unwrap(), vec![1, 3, 8, 21, 55]);
        let f7 = PrimeField::new(7).unwrap();
        let raw = from_relation(&f7, 3, vec![1, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap(); // x1 x1
        assert_eq!(zhang_hilbert(&raw, 2, DEFAULT_BUDGET).unwrap()[2], 8);
    }

    #[test]
    fn budget_is_enforced() {
        let q = Rationals;
        let z = build_zhang(&q, 5, &Matrix::identity(&q, 5)).unwrap();
        assert!(matches!(
            zhang_hilbert(&z, 20, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn recurrence_helper() {
        assert!(satisfies_recurrence(3, &[1, 3, 8, 21, 55, 144]));
        assert!(!satisfies_recurrence(3, &[1, 3, 9]));
    }
}
