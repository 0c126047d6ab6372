//! The noncommutative symmetric algebra of a bimodule as a Z-algebra on a
//! finite index window.
//!
//! `T_ij` is built left-associated, `T_{i,j+1} = T_ij ⊗_{S_j} M^{j*}`, with
//! every balanced quotient applied as it is formed, so each basis vector of
//! `T_ij` is the image of a pure tensor of basis vectors. `R_ij ⊆ T_ij` is the
//! two-sided ideal generated by the `Q_s`, and `A_ij = T_ij / R_ij`.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::algebra::DivisionAlgebra;
use crate::arith::field::Field;
use crate::bimodule::{
    check_forbidden_type, check_two_periodic, require_two_periodic, Bimodule, CanonicalQ, DualTower, PeriodicityEntry,
    TypeReport,
};
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::subspace::{Quotient, Subspace, VectorSpace};
use crate::linear::tensor::{tensor_over_division_ring, ModuleView, TensorProduct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub i_min: i64,
    pub i_max: i64,
    /// Largest `j - i` for which `A_ij` is built.
    pub max_degree: usize,
}

impl Window {
    pub fn new(i_min: i64, i_max: i64) -> Self {
        Window {
            i_min,
            i_max,
            max_degree: (i_max - i_min).max(0) as usize,
        }
    }

    pub fn with_max_degree(mut self, d: usize) -> Self {
        self.max_degree = d;
        self
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.i_min <= i && i <= j && j <= self.i_max && (j - i) as usize <= self.max_degree
    }

    /// All `(i, j)` with `A_ij` built, in index order.
    pub fn cells(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for i in self.i_min..=self.i_max {
            for j in i..=self.i_max {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Skip the forbidden-type refusal. Only for negative controls.
    pub allow_forbidden: bool,
}

struct TSpace<F: Field> {
    space: VectorSpace,
    /// `T_{i,j-1} ⊗ M^{(j-1)*}` when `j ≥ i + 2`.
    step: Option<TensorProduct<F>>,
    left: Vec<Matrix<F>>,
    right: Vec<Matrix<F>>,
}

impl<F: Field> TSpace<F> {
    fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// One component `A_ij = T_ij / R_ij` with its `S_i`-`S_j` actions.
#[derive(Clone, Debug)]
pub struct Component<F: Field> {
    pub i: i64,
    pub j: i64,
    pub r: Subspace<F>,
    pub a: Quotient<F>,
    pub left: Vec<Matrix<F>>,
    pub right: Vec<Matrix<F>>,
}

impl<F: Field> Component<F> {
    pub fn kdim(&self) -> usize {
        self.a.dim()
    }
    pub fn tdim(&self) -> usize {
        self.a.ambient_dim()
    }
}

pub struct ZAlgebraWindow<F: Field> {
    tower: Arc<DualTower<F>>,
    window: Window,
    type_report: TypeReport,
    periodicity: Vec<PeriodicityEntry>,
    modules: BTreeMap<i64, Arc<Bimodule<F>>>,
    qs: BTreeMap<i64, Arc<CanonicalQ<F>>>,
    t: BTreeMap<(i64, i64), TSpace<F>>,
    comps: BTreeMap<(i64, i64), Component<F>>,
    mults: RwLock<BTreeMap<(i64, i64, i64), Arc<Matrix<F>>>>,
}

fn unit_vec<F: Field>(f: &F, n: usize, k: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[k] = f.one();
    v
}

/// Matrix of the action induced on `q` by `act` on its ambient, after checking
/// that `act` preserves the kernel.
fn quotient_action<F: Field>(q: &Quotient<F>, act: &Matrix<F>) -> Result<Matrix<F>> {
    let f = act.field();
    if act.is_identity() {
        return Ok(Matrix::identity(f, q.dim()));
    }
    let n = q.ambient_dim();
    let cols: Vec<Vec<F::Elem>> = (0..n)
        .map(|c| {
            let mut out = vec![f.zero(); q.dim()];
            for x in 0..n {
                q.accumulate_unit(&mut out, x, act.get(x, c));
            }
            out
        })
        .collect();
    q.descend(&Matrix::from_columns(f, q.dim(), &cols))
        .map_err(|_| Error::NotWellDefined("relations are not stable under the algebra action".into()))
}

impl<F: Field> ZAlgebraWindow<F> {
    pub fn build(m: Bimodule<F>, window: Window, opts: BuildOptions) -> Result<Self> {
        Self::build_with_tower(Arc::new(DualTower::new(m)), window, opts)
    }

    pub fn build_with_tower(tower: Arc<DualTower<F>>, window: Window, opts: BuildOptions) -> Result<Self> {
        if window.i_max - window.i_min < 2 || window.max_degree < 2 {
            return Err(Error::WindowTooSmall(format!(
                "window [{}, {}] with degree cap {} cannot hold a relation space",
                window.i_min, window.i_max, window.max_degree
            )));
        }
        let base = tower.base();
        let type_report = check_forbidden_type(&base);
        if type_report.forbidden && !opts.allow_forbidden {
            return Err(Error::ForbiddenType(type_report.left_rank, type_report.right_rank));
        }
        let periodicity = check_two_periodic(&tower, window.i_min, window.i_max)?;
        require_two_periodic(&periodicity)?;
        let mut modules = BTreeMap::new();
        for i in window.i_min..=window.i_max + 1 {
            modules.insert(i, tower.module(i)?);
        }
        let mut qs = BTreeMap::new();
        for i in window.i_min..=window.i_max - 2 {
            qs.insert(i, tower.canonical_q(i)?);
        }
        let mut z = ZAlgebraWindow {
            tower,
            window,
            type_report,
            periodicity,
            modules,
            qs,
            t: BTreeMap::new(),
            comps: BTreeMap::new(),
            mults: RwLock::new(BTreeMap::new()),
        };
        let top = window.max_degree.min((window.i_max - window.i_min) as usize) as i64;
        for d in 0..=top {
            let starts: Vec<i64> = (window.i_min..=window.i_max - d).collect();
            let built = starts
                .par_iter()
                .map(|&i| z.build_t(i, i + d))
                .collect::<Result<Vec<_>>>()?;
            for (i, t) in starts.iter().zip(built) {
                z.t.insert((*i, i + d), t);
            }
        }
        for d in 0..=top {
            let starts: Vec<i64> = (window.i_min..=window.i_max - d).collect();
            let built = starts
                .par_iter()
                .map(|&i| z.build_component(i, i + d))
                .collect::<Result<Vec<_>>>()?;
            for (i, c) in starts.iter().zip(built) {
                z.comps.insert((*i, i + d), c);
            }
        }
        Ok(z)
    }

    pub fn window(&self) -> Window {
        self.window
    }
    pub fn tower(&self) -> &Arc<DualTower<F>> {
        &self.tower
    }
    pub fn type_report(&self) -> &TypeReport {
        &self.type_report
    }
    pub fn periodicity(&self) -> &[PeriodicityEntry] {
        &self.periodicity
    }
    pub fn field(&self) -> &F {
        self.modules[&self.window.i_min].field()
    }

    /// `M^{i*}`; available for `i` in the window and one step beyond.
    pub fn module(&self, i: i64) -> Result<&Arc<Bimodule<F>>> {
        self.modules
            .get(&i)
            .ok_or_else(|| Error::OutOfWindow(format!("M^{{{i}*}} outside window")))
    }

    /// The diagonal algebra `S_i`.
    pub fn diagonal(&self, i: i64) -> Result<&DivisionAlgebra<F>> {
        Ok(self.module(i)?.left_alg())
    }

    pub fn canonical_q(&self, i: i64) -> Result<&Arc<CanonicalQ<F>>> {
        self.qs
            .get(&i)
            .ok_or_else(|| Error::OutOfWindow(format!("Q_{i} needs indices up to {}", i + 2)))
    }

    pub fn component(&self, i: i64, j: i64) -> Result<&Component<F>> {
        self.comps
            .get(&(i, j))
            .ok_or_else(|| Error::OutOfWindow(format!("A_({i},{j}) outside window")))
    }

    /// `kdim A_ij`, zero below the diagonal.
    pub fn kdim(&self, i: i64, j: i64) -> Result<usize> {
        if j < i {
            return Ok(0);
        }
        Ok(self.component(i, j)?.kdim())
    }

    fn tspace(&self, i: i64, j: i64) -> &TSpace<F> {
        &self.t[&(i, j)]
    }

    fn build_t(&self, i: i64, j: i64) -> Result<TSpace<F>> {
        if i == j {
            let s = self.diagonal(i)?;
            return Ok(TSpace {
                space: VectorSpace::with_prefix("s", s.dim()),
                step: None,
                left: (0..s.dim()).map(|k| s.left_mul_matrix(&s.basis_coords(k))).collect(),
                right: (0..s.dim()).map(|k| s.right_mul_matrix(&s.basis_coords(k))).collect(),
            });
        }
        if j == i + 1 {
            let m = self.module(i)?;
            return Ok(TSpace {
                space: m.space().clone(),
                step: None,
                left: m.left_action().to_vec(),
                right: m.right_action().to_vec(),
            });
        }
        let m = self.module(j - 1)?;
        let (step, prev_left) = if j == i + 2 {
            (
                self.canonical_q(i)?.tensor.clone(),
                self.module(i)?.left_action().to_vec(),
            )
        } else {
            let prev = self.tspace(i, j - 1);
            let view = ModuleView {
                algebra: self.diagonal(j - 1)?,
                space: &prev.space,
                actions: &prev.right,
            };
            (tensor_over_division_ring(view, m.left_view())?, prev.left.clone())
        };
        Ok(TSpace {
            space: step.quotient.space().clone(),
            left: prev_left.iter().map(|a| step.induced_left(a)).collect(),
            right: m.right_action().iter().map(|a| step.induced_right(a)).collect(),
            step: Some(step),
        })
    }

    /// `x ⊗ e_b ∈ T_{i,j+1}` for `x ∈ T_ij` and basis vector `b` of `M^{j*}`.
    fn append(&self, i: i64, j: i64, x: &[F::Elem], b: usize) -> Vec<F::Elem> {
        let f = self.field();
        if i == j {
            let m = &self.modules[&i];
            return m.left_act(x).column(b);
        }
        let step = self
            .tspace(i, j + 1)
            .step
            .as_ref()
            .expect("step exists above degree one");
        let mut out = vec![f.zero(); step.dim()];
        for (a, xa) in x.iter().enumerate() {
            if !f.is_zero(xa) {
                step.quotient.accumulate_unit(&mut out, step.pair_index(a, b), xa);
            }
        }
        out
    }

    /// Concatenation of basis vector `u` of `T_ij` with basis vector `v` of `T_jl`.
    fn concat_basis(&self, i: i64, j: i64, l: i64, u: usize, v: usize) -> Vec<F::Elem> {
        if i == j {
            return self.tspace(i, l).left[u].column(v);
        }
        if j == l {
            return self.tspace(i, j).right[v].column(u);
        }
        let f = self.field();
        if l == j + 1 {
            return self.append(i, j, &unit_vec(f, self.tspace(i, j).dim(), u), v);
        }
        let (a, b) = self
            .tspace(j, l)
            .step
            .as_ref()
            .expect("step exists above degree one")
            .lift_pair(v);
        let w = self.concat_basis(i, j, l - 1, u, a);
        self.append(i, l - 1, &w, b)
    }

    fn concat_vec(&self, i: i64, j: i64, l: i64, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let mut out = vec![f.zero(); self.tspace(i, l).dim()];
        for (u, xu) in x.iter().enumerate() {
            if f.is_zero(xu) {
                continue;
            }
            for (v, yv) in y.iter().enumerate() {
                if f.is_zero(yv) {
                    continue;
                }
                let c = f.mul(xu, yv);
                for (o, w) in out.iter_mut().zip(self.concat_basis(i, j, l, u, v)) {
                    f.add_mul(o, &c, &w);
                }
            }
        }
        out
    }

    fn build_component(&self, i: i64, j: i64) -> Result<Component<F>> {
        let f = self.field();
        let t = self.tspace(i, j);
        let mut r = Subspace::zero(f, t.dim());
        if j == i + 2 {
            r = self.canonical_q(i)?.q.clone();
        } else if j > i + 2 {
            let prev = self.component(i, j - 1)?;
            let nb = self.module(j - 1)?.kdim();
            for row in prev.r.rows() {
                for b in 0..nb {
                    r.insert(&self.append(i, j - 1, row, b));
                }
            }
            let q = &self.canonical_q(j - 2)?.q;
            let n = self.tspace(i, j - 2).dim();
            for u in 0..n {
                let e = unit_vec(f, n, u);
                for row in q.rows() {
                    r.insert(&self.concat_vec(i, j - 2, j, &e, row));
                }
            }
        }
        let a = Quotient::new(t.space.clone(), r.clone())?;
        let left = t.left.iter().map(|m| quotient_action(&a, m)).collect::<Result<_>>()?;
        let right = t.right.iter().map(|m| quotient_action(&a, m)).collect::<Result<_>>()?;
        Ok(Component {
            i,
            j,
            r,
            a,
            left,
            right,
        })
    }

    /// Multiplication `A_ij ⊗_k A_jl → A_il`; column `p * dim A_jl + q` is the
    /// product of basis vectors `p` and `q`. Built from concatenation in `T`
    /// after checking that the relations are sent to zero.
    pub fn mult(&self, i: i64, j: i64, l: i64) -> Result<Arc<Matrix<F>>> {
        if let Some(m) = self.mults.read().expect("lock").get(&(i, j, l)) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.compute_mult(i, j, l)?);
        Ok(self.mults.write().expect("lock").entry((i, j, l)).or_insert(m).clone())
    }

    fn compute_mult(&self, i: i64, j: i64, l: i64) -> Result<Matrix<F>> {
        let f = self.field();
        let (cij, cjl, cil) = (self.component(i, j)?, self.component(j, l)?, self.component(i, l)?);
        let (tu, tv) = (cij.tdim(), cjl.tdim());
        // mu[u][v] = projection of e_u · e_v into A_il
        let mu: Vec<Vec<Vec<F::Elem>>> = (0..tu)
            .map(|u| {
                (0..tv)
                    .map(|v| cil.a.project(&self.concat_basis(i, j, l, u, v)))
                    .collect()
            })
            .collect();
        let zero = |v: &[F::Elem]| v.iter().all(|x| f.is_zero(x));
        let combine = |terms: &mut dyn Iterator<Item = (&F::Elem, &Vec<F::Elem>)>| {
            let mut acc = vec![f.zero(); cil.kdim()];
            for (c, w) in terms {
                for (o, x) in acc.iter_mut().zip(w) {
                    f.add_mul(o, c, x);
                }
            }
            acc
        };
        for row in cij.r.rows() {
            for v in 0..tv {
                if !zero(&combine(&mut row.iter().enumerate().map(|(u, c)| (c, &mu[u][v])))) {
                    return Err(Error::NotWellDefined(format!(
                        "R_({i},{j}) ⊗ T_({j},{l}) leaves R_({i},{l})"
                    )));
                }
            }
        }
        for row in cjl.r.rows() {
            for mu_u in &mu {
                if !zero(&combine(&mut row.iter().zip(mu_u.iter()))) {
                    return Err(Error::NotWellDefined(format!(
                        "T_({i},{j}) ⊗ R_({j},{l}) leaves R_({i},{l})"
                    )));
                }
            }
        }
        let (dp, dq) = (cij.kdim(), cjl.kdim());
        let mut cols = Vec::with_capacity(dp * dq);
        for p in 0..dp {
            for q in 0..dq {
                cols.push(mu[cij.a.lift_index(p)][cjl.a.lift_index(q)].clone());
            }
        }
        Ok(Matrix::from_columns(f, cil.kdim(), &cols))
    }

    /// Product of `x ∈ A_ij` and `y ∈ A_jl`.
    pub fn multiply(&self, i: i64, j: i64, l: i64, x: &[F::Elem], y: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let f = self.field();
        let m = self.mult(i, j, l)?;
        let mut out = vec![f.zero(); m.rows()];
        let dq = y.len();
        for (p, xp) in x.iter().enumerate() {
            if f.is_zero(xp) {
                continue;
            }
            for (q, yq) in y.iter().enumerate() {
                if f.is_zero(yq) {
                    continue;
                }
                let c = f.mul(xp, yq);
                let col = p * dq + q;
                for (r, o) in out.iter_mut().enumerate() {
                    f.add_mul(o, &c, m.get(r, col));
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `y ↦ x·y` from `A_jl` to `A_il` for basis vector `p` of `A_ij`.
    pub fn left_mult_by(&self, i: i64, j: i64, l: i64, p: usize) -> Result<Matrix<F>> {
        let m = self.mult(i, j, l)?;
        let dq = self.kdim(j, l)?;
        let cols: Vec<Vec<F::Elem>> = (0..dq).map(|q| m.column(p * dq + q)).collect();
        Ok(Matrix::from_columns(self.field(), m.rows(), &cols))
    }

    /// Matrix of `x ↦ x·y` from `A_ij` to `A_il` for `y ∈ A_jl`.
    pub fn right_mult_by(&self, i: i64, j: i64, l: i64, y: &[F::Elem]) -> Result<Matrix<F>> {
        let dp = self.kdim(i, j)?;
        let f = self.field();
        let cols = (0..dp)
            .map(|p| self.multiply(i, j, l, &unit_vec(f, dp, p), y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(f, self.kdim(i, l)?, &cols))
    }

    /// `A_ij ⊗_{S_j} M^{j*}`.
    pub fn tensor_with_module(&self, i: i64, j: i64) -> Result<TensorProduct<F>> {
        let c = self.component(i, j)?;
        let m = self.module(j)?;
        let view = ModuleView {
            algebra: self.diagonal(j)?,
            space: c.a.space(),
            actions: &c.right,
        };
        tensor_over_division_ring(view, m.left_view())
    }

    /// Multiplication `A_ij ⊗_{S_j} M^{j*} → A_{i,j+1}` on the balanced tensor.
    pub fn mult_descended(&self, i: i64, j: i64, tensor: &TensorProduct<F>) -> Result<Matrix<F>> {
        let f = self.field();
        let m = self.mult(i, j, j + 1)?;
        // ambient index p * dim M^{j*} + v matches the column order of `mult`
        let cols: Vec<Vec<F::Elem>> = (0..tensor.quotient.ambient_dim()).map(|c| m.column(c)).collect();
        tensor.quotient.descend(&Matrix::from_columns(f, m.rows(), &cols))
    }

    /// `Q_j` as a left `S_j`-module: its basis (rows in `T_{j,j+2}`) and action matrices.
    fn q_module(&self, j: i64) -> Result<(VectorSpace, Vec<Matrix<F>>)> {
        let f = self.field();
        let q = &self.canonical_q(j)?.q;
        let t = self.tspace(j, j + 2);
        let acts = t
            .left
            .iter()
            .map(|a| {
                let cols = q
                    .rows()
                    .iter()
                    .map(|row| {
                        q.coords(&a.apply(row))
                            .ok_or_else(|| Error::NotWellDefined(format!("Q_{j} is not an S_{j}-submodule")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Matrix::from_columns(f, q.rank(), &cols))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((VectorSpace::with_prefix("q", q.rank()), acts))
    }

    /// The two maps of `0 → A_ij ⊗ Q_j → A_{i,j+1} ⊗ M^{(j+1)*} → A_{i,j+2} → 0`.
    pub fn euler_maps(&self, i: i64, j: i64) -> Result<EulerMaps<F>> {
        if i > j || !self.window.contains(i, j + 2) {
            return Err(Error::OutOfWindow(format!("Euler complex at ({i},{j})")));
        }
        let f = self.field();
        let cij = self.component(i, j)?;
        let (qspace, qacts) = self.q_module(j)?;
        let aview = ModuleView {
            algebra: self.diagonal(j)?,
            space: cij.a.space(),
            actions: &cij.right,
        };
        let left = tensor_over_division_ring(
            aview,
            ModuleView {
                algebra: self.diagonal(j)?,
                space: &qspace,
                actions: &qacts,
            },
        )?;
        let middle = self.tensor_with_module(i, j + 1)?;
        let qt = self.canonical_q(j)?;
        let n = self.module(j + 1)?.kdim();
        let du = self.module(j)?.kdim();
        let lifts: Vec<Vec<F::Elem>> = qt.q.rows().iter().map(|r| qt.tensor.quotient.lift(r)).collect();
        let mut cols = Vec::with_capacity(left.quotient.ambient_dim());
        for p in 0..cij.kdim() {
            for lift in &lifts {
                let mut out = vec![f.zero(); middle.dim()];
                for (uv, x) in lift.iter().enumerate() {
                    if f.is_zero(x) {
                        continue;
                    }
                    let (u, v) = (uv / n, uv % n);
                    let ax = self.multiply(i, j, j + 1, &unit_vec(f, cij.kdim(), p), &unit_vec(f, du, u))?;
                    for (c, y) in ax.iter().enumerate() {
                        if !f.is_zero(y) {
                            middle
                                .quotient
                                .accumulate_unit(&mut out, middle.pair_index(c, v), &f.mul(x, y));
                        }
                    }
                }
                cols.push(out);
            }
        }
        let alpha = left
            .quotient
            .descend(&Matrix::from_columns(f, middle.dim(), &cols))
            .map_err(|_| Error::NotWellDefined(format!("Euler left map at ({i},{j})")))?;
        let beta = self.mult_descended(i, j + 1, &middle)?;
        Ok(EulerMaps {
            left,
            middle,
            alpha,
            beta,
        })
    }

    pub fn verify_euler(&self, i: i64, j: i64) -> Result<EulerReport> {
        let maps = self.euler_maps(i, j)?;
        let dims = [maps.left.dim(), maps.middle.dim(), maps.beta.rows()];
        let composite_zero = maps.beta.mul(&maps.alpha)?.is_zero();
        let left_rank = maps.alpha.rank();
        let right_rank = maps.beta.rank();
        let left_injective = left_rank == dims[0];
        let right_surjective = right_rank == dims[2];
        let exact = composite_zero && dims[1] == left_rank + right_rank;
        Ok(EulerReport {
            i,
            j,
            dims,
            left_rank,
            right_rank,
            composite_zero,
            left_injective,
            right_surjective,
            exact,
            passed: composite_zero && left_injective && right_surjective && exact,
        })
    }

    /// `R_{i,j+1} ⊗ M^{(j+1)*} ∩ T_ij ⊗ Q_j = R_ij ⊗ Q_j` inside `T_{i,j+2}`.
    pub fn verify_intersection_identity(&self, i: i64, j: i64) -> Result<IntersectionReport> {
        if i > j || !self.window.contains(i, j + 2) {
            return Err(Error::OutOfWindow(format!("intersection identity at ({i},{j})")));
        }
        let f = self.field();
        let dim = self.tspace(i, j + 2).dim();
        let q = &self.canonical_q(j)?.q;
        let mut first = Subspace::zero(f, dim);
        let nb = self.module(j + 1)?.kdim();
        for row in self.component(i, j + 1)?.r.rows() {
            for b in 0..nb {
                first.insert(&self.append(i, j + 1, row, b));
            }
        }
        let mut second = Subspace::zero(f, dim);
        let n = self.tspace(i, j).dim();
        for u in 0..n {
            let e = unit_vec(f, n, u);
            for row in q.rows() {
                second.insert(&self.concat_vec(i, j, j + 2, &e, row));
            }
        }
        let mut rhs = Subspace::zero(f, dim);
        for r in self.component(i, j)?.r.rows() {
            for row in q.rows() {
                rhs.insert(&self.concat_vec(i, j, j + 2, r, row));
            }
        }
        let lhs = first.intersect(&second)?;
        Ok(IntersectionReport {
            i,
            j,
            lhs_rank: lhs.rank(),
            rhs_rank: rhs.rank(),
            passed: lhs == rhs,
        })
    }

    /// Kernel of `A_{i,j+1} → Hom_k(A_{j+1,j+2}, A_{i,j+2})`.
    pub fn verify_right_cancellation(&self, i: i64, j: i64) -> Result<CancellationReport> {
        if i > j + 1 || !self.window.contains(i, j + 2) {
            return Err(Error::OutOfWindow(format!("right cancellation at ({i},{j})")));
        }
        let f = self.field();
        let src = self.kdim(i, j + 1)?;
        let ny = self.kdim(j + 1, j + 2)?;
        let mut stacked = Matrix::zeros(f, 0, src);
        for s in 0..ny {
            stacked = stacked.vstack(&self.right_mult_by(i, j + 1, j + 2, &unit_vec(f, ny, s))?)?;
        }
        let kernel_dim = src - stacked.rank();
        Ok(CancellationReport {
            i,
            j,
            source_dim: src,
            kernel_dim,
            passed: kernel_dim == 0,
        })
    }

    /// Injectivity of `v ↦ v·g` on `M^{j*}` for basis and seeded random `g`.
    pub fn verify_zero_divisor_property(&self, j: i64, trials: usize, seed: u64) -> Result<ZeroDivisorReport> {
        if !self.window.contains(j, j + 2) {
            return Err(Error::OutOfWindow(format!("zero-divisor check at {j}")));
        }
        let f = self.field();
        let right_rank = self.module(j)?.right_rank();
        if right_rank < 2 {
            return Ok(ZeroDivisorReport {
                j,
                right_rank,
                status: CheckStatus::HypothesisNotMet,
                entries: Vec::new(),
            });
        }
        let dv = self.kdim(j, j + 1)?;
        let ng = self.kdim(j + 1, j + 2)?;
        let mut gs: Vec<(String, Vec<F::Elem>)> = (0..ng).map(|b| (format!("basis {b}"), unit_vec(f, ng, b))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = 0;
        while t < trials {
            let g: Vec<F::Elem> = (0..ng).map(|_| f.random(&mut rng)).collect();
            if g.iter().all(|x| f.is_zero(x)) {
                continue;
            }
            gs.push((format!("trial {t}"), g));
            t += 1;
        }
        let entries = gs
            .into_iter()
            .map(|(label, g)| {
                let rank = self.right_mult_by(j, j + 1, j + 2, &g)?.rank();
                Ok(ZeroDivisorEntry {
                    g: label,
                    rank,
                    injective: rank == dv,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let status = if entries.iter().all(|e| e.injective) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Ok(ZeroDivisorReport {
            j,
            right_rank,
            status,
            entries,
        })
    }

    pub fn dim_table(&self) -> Result<DimTable> {
        let mut rows = Vec::new();
        for (i, j) in self.window.cells() {
            let kdim = self.kdim(i, j)?;
            let (di, dj) = (self.diagonal(i)?.dim(), self.diagonal(j)?.dim());
            rows.push(DimRow {
                i,
                j,
                kdim,
                left_rank: kdim / di,
                right_rank: kdim / dj,
                ranks_consistent: kdim % di == 0 && kdim % dj == 0,
            });
        }
        let mut euler_identity = Vec::new();
        for (i, j) in self.window.cells() {
            if !self.window.contains(i, j + 2) {
                continue;
            }
            let middle = self.kdim(i, j + 1)? * self.module(j + 1)?.kdim() / self.diagonal(j + 1)?.dim();
            let left = self.kdim(i, j)? * self.canonical_q(j)?.q.rank() / self.diagonal(j)?.dim();
            let target = self.kdim(i, j + 2)?;
            euler_identity.push(EulerDimRow {
                i,
                j,
                target,
                middle,
                left,
                passed: middle >= left && target == middle - left,
            });
        }
        Ok(DimTable { rows, euler_identity })
    }

    /// `(a·b)·c = a·(b·c)` on all basis triples of composable components.
    pub fn check_associativity(&self) -> Result<Vec<InvariantEntry>> {
        let w = self.window;
        let mut quads = Vec::new();
        for (i, m) in w.cells() {
            for j in i..=m {
                for l in j..=m {
                    quads.push((i, j, l, m));
                }
            }
        }
        quads
            .par_iter()
            .map(|&(i, j, l, m)| {
                let f = self.field();
                let ab = self.mult(i, j, l)?;
                let bc = self.mult(j, l, m)?;
                let (da, db, dc) = (self.kdim(i, j)?, self.kdim(j, l)?, self.kdim(l, m)?);
                let mut ok = true;
                'outer: for a in 0..da {
                    for b in 0..db {
                        let x = ab.column(a * db + b);
                        for c in 0..dc {
                            let lhs = self.multiply(i, l, m, &x, &unit_vec(f, dc, c))?;
                            let rhs = self.multiply(i, j, m, &unit_vec(f, da, a), &bc.column(b * dc + c))?;
                            if lhs != rhs {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                }
                Ok(InvariantEntry {
                    location: vec![i, j, l, m],
                    passed: ok,
                })
            })
            .collect()
    }

    /// Surjectivity of `A_ij ⊗ A_{j,j+1} → A_{i,j+1}`.
    pub fn check_generation(&self) -> Result<Vec<InvariantEntry>> {
        let mut out = Vec::new();
        for (i, j) in self.window.cells() {
            if !self.window.contains(i, j + 1) {
                continue;
            }
            let rank = self.mult(i, j, j + 1)?.rank();
            out.push(InvariantEntry {
                location: vec![i, j],
                passed: rank == self.kdim(i, j + 1)?,
            });
        }
        Ok(out)
    }

    /// `rightrank A_{i-2,j} = rightrank A_{i,j+2}` wherever both are built.
    pub fn check_right_rank_periodicity(&self) -> Result<Vec<InvariantEntry>> {
        let mut out = Vec::new();
        for (i, j) in self.window.cells() {
            if !self.window.contains(i - 2, j) || !self.window.contains(i, j + 2) {
                continue;
            }
            let a = self.kdim(i - 2, j)? / self.diagonal(j)?.dim();
            let b = self.kdim(i, j + 2)? / self.diagonal(j + 2)?.dim();
            out.push(InvariantEntry {
                location: vec![i, j],
                passed: a == b,
            });
        }
        Ok(out)
    }

    /// `A_{i,i+1}` is `M^{i*}` with the identity projection and `A_ii` is `S_i`.
    pub fn check_low_degrees(&self) -> Result<Vec<InvariantEntry>> {
        let mut out = Vec::new();
        for (i, j) in self.window.cells() {
            let c = self.component(i, j)?;
            let ok = match j - i {
                0 => c.kdim() == self.diagonal(i)?.dim(),
                1 => c.r.rank() == 0 && c.a.projection().matrix.is_identity(),
                _ => continue,
            };
            out.push(InvariantEntry {
                location: vec![i, j],
                passed: ok,
            });
        }
        Ok(out)
    }
}

pub struct EulerMaps<F: Field> {
    pub left: TensorProduct<F>,
    pub middle: TensorProduct<F>,
    pub alpha: Matrix<F>,
    pub beta: Matrix<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    HypothesisNotMet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub i: i64,
    pub j: i64,
    pub dims: [usize; 3],
    pub left_rank: usize,
    pub right_rank: usize,
    pub composite_zero: bool,
    pub left_injective: bool,
    pub right_surjective: bool,
    pub exact: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub i: i64,
    pub j: i64,
    pub lhs_rank: usize,
    pub rhs_rank: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CancellationReport {
    pub i: i64,
    pub j: i64,
    pub source_dim: usize,
    pub kernel_dim: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroDivisorEntry {
    pub g: String,
    pub rank: usize,
    pub injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroDivisorReport {
    pub j: i64,
    pub right_rank: usize,
    pub status: CheckStatus,
    pub entries: Vec<ZeroDivisorEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimRow {
    pub i: i64,
    pub j: i64,
    pub kdim: usize,
    pub left_rank: usize,
    pub right_rank: usize,
    pub ranks_consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerDimRow {
    pub i: i64,
    pub j: i64,
    pub target: usize,
    pub middle: usize,
    pub left: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimTable {
    pub rows: Vec<DimRow>,
    pub euler_identity: Vec<EulerDimRow>,
}

impl DimTable {
    pub fn kdim(&self, i: i64, j: i64) -> Option<usize> {
        self.rows.iter().find(|r| r.i == i && r.j == j).map(|r| r.kdim)
    }

    /// `kdim A_{i,i+m}` for `m = 0, 1, ...` as far as built.
    pub fn row(&self, i: i64) -> Vec<usize> {
        self.rows.iter().filter(|r| r.i == i).map(|r| r.kdim).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantEntry {
    pub location: Vec<i64>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::algebra::make_extension_field;
    use crate::arith::field::Rationals;
    use crate::bimodule::Side;

    fn quartic_module() -> Bimodule<Rationals> {
        let q = Rationals;
        let l = make_extension_field(&q, &[q.from_i64(-2), q.zero(), q.zero(), q.zero(), q.one()]).unwrap();
        Bimodule::from_algebra(&l, Side::Right)
    }

    #[test]
    fn plane_dimensions_match_monomial_count() {
        let z = ZAlgebraWindow::build(
            Bimodule::vector_space(&Rationals, 2),
            Window::new(0, 5),
            BuildOptions::default(),
        )
        .unwrap();
        assert_eq!(z.dim_table().unwrap().row(0), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn three_variables_follow_the_recurrence() {
        let z = ZAlgebraWindow::build(
            Bimodule::vector_space(&Rationals, 3),
            Window::new(0, 4),
            BuildOptions::default(),
        )
        .unwrap();
        assert_eq!(z.dim_table().unwrap().row(0), vec![1, 3, 8, 21, 55]);
    }

    #[test]
    fn quartic_dimensions() {
        let z = ZAlgebraWindow::build(quartic_module(), Window::new(0, 4), BuildOptions::default()).unwrap();
        assert_eq!(z.dim_table().unwrap().row(0)[..4], [1, 4, 3, 8]);
        assert!(z.verify_euler(0, 1).unwrap().passed);
        assert!(z.verify_right_cancellation(0, 0).unwrap().passed);
        assert!(z.verify_right_cancellation(0, 1).unwrap().passed);
        assert_eq!(
            z.verify_zero_divisor_property(0, 3, 1).unwrap().status,
            CheckStatus::HypothesisNotMet
        );
        assert_eq!(
            z.verify_zero_divisor_property(1, 3, 1).unwrap().status,
            CheckStatus::Pass
        );
    }

    #[test]
    fn euler_and_intersection_on_small_examples() {
        let z = ZAlgebraWindow::build(
            Bimodule::vector_space(&Rationals, 2),
            Window::new(0, 4),
            BuildOptions::default(),
        )
        .unwrap();
        let e = z.verify_euler(0, 0).unwrap();
        assert_eq!(e.dims, [1, 4, 3]);
        assert!(e.passed);
        let s = z.verify_intersection_identity(0, 0).unwrap();
        assert!(s.passed && s.lhs_rank == 0);
        assert!(z.verify_intersection_identity(0, 1).unwrap().passed);
        let z3 = ZAlgebraWindow::build(
            Bimodule::vector_space(&Rationals, 3),
            Window::new(0, 4),
            BuildOptions::default(),
        )
        .unwrap();
        let e = z3.verify_euler(0, 0).unwrap();
        assert_eq!((e.dims[0], e.dims[2]), (1, 8));
        assert!(z3.verify_intersection_identity(0, 2).unwrap().passed);
    }

    #[test]
    fn forbidden_and_small_windows_are_refused() {
        let q = Rationals;
        let r = ZAlgebraWindow::build(
            Bimodule::vector_space(&q, 1),
            Window::new(0, 4),
            BuildOptions::default(),
        );
        assert!(matches!(r, Err(Error::ForbiddenType(1, 1))));
        let r = ZAlgebraWindow::build(
            Bimodule::vector_space(&q, 2),
            Window::new(0, 1),
            BuildOptions::default(),
        );
        assert!(matches!(r, Err(Error::WindowTooSmall(_))));
        assert!(ZAlgebraWindow::build(
            Bimodule::vector_space(&q, 1),
            Window::new(0, 4),
            BuildOptions { allow_forbidden: true }
        )
        .is_ok());
    }

    #[test]
    fn invariants_hold_for_the_plane() {
        let z = ZAlgebraWindow::build(
            Bimodule::vector_space(&Rationals, 2),
            Window::new(-1, 3),
            BuildOptions::default(),
        )
        .unwrap();
        assert!(z.check_associativity().unwrap().iter().all(|e| e.passed));
        assert!(z.check_generation().unwrap().iter().all(|e| e.passed));
        assert!(z.check_right_rank_periodicity().unwrap().iter().all(|e| e.passed));
        assert!(z.check_low_degrees().unwrap().iter().all(|e| e.passed));
        assert!(z.dim_table().unwrap().euler_identity.iter().all(|e| e.passed));
    }
}
