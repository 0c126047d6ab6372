//! Bimodules over pairs of division algebras, their duals, and the tower of
//! iterated duals.
//!
//! Vectors are columns. A left action matrix sends `v` to `a·v`; a right
//! action matrix sends `v` to `v·c`, so the matrix of `c1·c2` is
//! `R(c2) * R(c1)`.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::algebra::DivisionAlgebra;
use crate::arith::field::Field;
use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::subspace::{Subspace, VectorSpace};
use crate::linear::tensor::{tensor_over_division_ring, ModuleView, TensorProduct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bimodule<F: Field> {
    left: DivisionAlgebra<F>,
    right: DivisionAlgebra<F>,
    space: VectorSpace,
    left_action: Vec<Matrix<F>>,
    right_action: Vec<Matrix<F>>,
}

impl<F: Field> Bimodule<F> {
    pub fn new(
        left: DivisionAlgebra<F>,
        right: DivisionAlgebra<F>,
        space: VectorSpace,
        left_action: Vec<Matrix<F>>,
        right_action: Vec<Matrix<F>>,
    ) -> Result<Self> {
        let m = Bimodule {
            left,
            right,
            space,
            left_action,
            right_action,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let d = self.kdim();
        let bad = |msg: String| Err(Error::InvalidBimodule(msg));
        if self.left.field() != self.right.field() {
            return bad("left and right algebras live over different fields".into());
        }
        for (side, alg, acts) in [
            ("left", &self.left, &self.left_action),
            ("right", &self.right, &self.right_action),
        ] {
            if acts.len() != alg.dim() {
                return bad(format!(
                    "{side} action needs {} matrices, got {}",
                    alg.dim(),
                    acts.len()
                ));
            }
            if acts.iter().any(|a| a.rows() != d || a.cols() != d) {
                return bad(format!("{side} action matrices must be {d}x{d}"));
            }
            if !d.is_multiple_of(alg.dim()) {
                return Err(Error::NotFree(format!(
                    "k-dimension {d} is not a multiple of dim {} of the {side} algebra",
                    alg.dim()
                )));
            }
        }
        let id = Matrix::identity(self.field(), d);
        if self.left_act(self.left.unit_coords()) != id || self.right_act(self.right.unit_coords()) != id {
            return bad("unit does not act as the identity".into());
        }
        for a in 0..self.left.dim() {
            for b in 0..self.left.dim() {
                let ab = self
                    .left
                    .mul_coords(&self.left.basis_coords(a), &self.left.basis_coords(b));
                if self.left_act(&ab) != self.left_action[a].mul(&self.left_action[b])? {
                    return bad(format!("left action is not multiplicative on (e{a}, e{b})"));
                }
            }
        }
        for a in 0..self.right.dim() {
            for b in 0..self.right.dim() {
                let ab = self
                    .right
                    .mul_coords(&self.right.basis_coords(a), &self.right.basis_coords(b));
                if self.right_act(&ab) != self.right_action[b].mul(&self.right_action[a])? {
                    return bad(format!("right action is not multiplicative on (e{a}, e{b})"));
                }
            }
        }
        for (a, la) in self.left_action.iter().enumerate() {
            for (c, rc) in self.right_action.iter().enumerate() {
                if la.mul(rc)? != rc.mul(la)? {
                    return bad(format!("left e{a} and right e{c} actions do not commute"));
                }
            }
        }
        Ok(())
    }

    /// `k^n` over `(k, k)`.
    pub fn vector_space(field: &F, n: usize) -> Self {
        let k = DivisionAlgebra::base(field);
        let id = Matrix::identity(field, n);
        Bimodule {
            left: k.clone(),
            right: k,
            space: VectorSpace::standard(n),
            left_action: vec![id.clone()],
            right_action: vec![id],
        }
    }

    /// The algebra `d` as a `(k, d)`-bimodule (`Side::Right`) or a
    /// `(d, k)`-bimodule (`Side::Left`).
    pub fn from_algebra(d: &DivisionAlgebra<F>, side: Side) -> Self {
        let f = d.field();
        let k = DivisionAlgebra::base(f);
        let n = d.dim();
        let id = vec![Matrix::identity(f, n)];
        let space = VectorSpace::with_prefix("t^", n);
        match side {
            Side::Right => Bimodule {
                left: k,
                right: d.clone(),
                space,
                left_action: id,
                right_action: (0..n).map(|i| d.right_mul_matrix(&d.basis_coords(i))).collect(),
            },
            Side::Left => Bimodule {
                left: d.clone(),
                right: k,
                space,
                left_action: (0..n).map(|i| d.left_mul_matrix(&d.basis_coords(i))).collect(),
                right_action: id,
            },
        }
    }

    /// `b ⊗_k c` as a `(b, c)`-bimodule with the outer actions.
    pub fn outer(b: &DivisionAlgebra<F>, c: &DivisionAlgebra<F>) -> Self {
        let f = b.field();
        let (ib, ic) = (Matrix::identity(f, b.dim()), Matrix::identity(f, c.dim()));
        let space = VectorSpace::with_prefix("b", b.dim()).tensor(&VectorSpace::with_prefix("c", c.dim()));
        Bimodule {
            left: b.clone(),
            right: c.clone(),
            space,
            left_action: (0..b.dim())
                .map(|i| b.left_mul_matrix(&b.basis_coords(i)).kron(&ic))
                .collect(),
            right_action: (0..c.dim())
                .map(|i| ib.kron(&c.right_mul_matrix(&c.basis_coords(i))))
                .collect(),
        }
    }

    pub fn field(&self) -> &F {
        self.left.field()
    }
    pub fn left_alg(&self) -> &DivisionAlgebra<F> {
        &self.left
    }
    pub fn right_alg(&self) -> &DivisionAlgebra<F> {
        &self.right
    }
    pub fn space(&self) -> &VectorSpace {
        &self.space
    }
    pub fn kdim(&self) -> usize {
        self.space.dim()
    }
    pub fn left_action(&self) -> &[Matrix<F>] {
        &self.left_action
    }
    pub fn right_action(&self) -> &[Matrix<F>] {
        &self.right_action
    }
    pub fn left_rank(&self) -> usize {
        self.kdim() / self.left.dim()
    }
    pub fn right_rank(&self) -> usize {
        self.kdim() / self.right.dim()
    }

    pub fn left_act(&self, a: &[F::Elem]) -> Matrix<F> {
        combine(self.field(), self.kdim(), &self.left_action, a)
    }

    pub fn right_act(&self, c: &[F::Elem]) -> Matrix<F> {
        combine(self.field(), self.kdim(), &self.right_action, c)
    }

    pub fn left_view(&self) -> ModuleView<'_, F> {
        ModuleView {
            algebra: &self.left,
            space: &self.space,
            actions: &self.left_action,
        }
    }

    pub fn right_view(&self) -> ModuleView<'_, F> {
        ModuleView {
            algebra: &self.right,
            space: &self.space,
            actions: &self.right_action,
        }
    }

    pub fn with_labels(mut self, space: VectorSpace) -> Self {
        assert_eq!(space.dim(), self.kdim());
        self.space = space;
        self
    }

    /// The same bimodule in the basis given by the columns of `p`.
    pub fn rebase(&self, p: &Matrix<F>) -> Result<Self> {
        let pinv = p
            .inverse()
            .ok_or_else(|| Error::DimensionMismatch("change of basis matrix is singular".into()))?;
        let conj = |a: &Matrix<F>| pinv.mul(a)?.mul(p);
        Ok(Bimodule {
            left: self.left.clone(),
            right: self.right.clone(),
            space: self.space.clone(),
            left_action: self.left_action.iter().map(conj).collect::<Result<_>>()?,
            right_action: self.right_action.iter().map(conj).collect::<Result<_>>()?,
        })
    }

    /// Rebase by a seeded random invertible matrix.
    pub fn random_rebase(&self, seed: u64) -> Result<(Self, Matrix<F>)> {
        let p = random_invertible(self.field(), self.kdim(), seed);
        Ok((self.rebase(&p)?, p))
    }
}

fn combine<F: Field>(f: &F, d: usize, mats: &[Matrix<F>], coords: &[F::Elem]) -> Matrix<F> {
    let mut out = Matrix::zeros(f, d, d);
    for (m, c) in mats.iter().zip(coords) {
        if !f.is_zero(c) {
            out = out.add(&m.scale(c)).expect("same shape");
        }
    }
    out
}

pub fn random_invertible<F: Field>(f: &F, n: usize, seed: u64) -> Matrix<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| f.random(&mut rng)).collect()).collect();
        let m = Matrix::from_rows(f, rows, n).expect("square");
        if m.rank() == n {
            return m;
        }
    }
}

/// A dual bimodule with its functionals made explicit. Basis element `k` of
/// `module` is the k-linear map `functionals[k]` from the original bimodule
/// into the acting algebra.
#[derive(Clone, Debug)]
pub struct Dual<F: Field> {
    pub module: Bimodule<F>,
    functionals: Vec<Matrix<F>>,
    free: Vec<usize>,
}

impl<F: Field> Dual<F> {
    pub fn functional(&self, k: usize) -> &Matrix<F> {
        &self.functionals[k]
    }

    pub fn functionals(&self) -> &[Matrix<F>] {
        &self.functionals
    }

    /// Coordinates of a functional in the dual basis; fails if the matrix is
    /// not a module homomorphism.
    pub fn coords(&self, phi: &Matrix<F>) -> Result<Vec<F::Elem>> {
        let f = self.module.field();
        let cols = phi.cols();
        let flat = |r: usize, c: usize| phi.get(r, c).clone();
        let coords: Vec<F::Elem> = self.free.iter().map(|&i| flat(i / cols, i % cols)).collect();
        let mut back = Matrix::zeros(f, phi.rows(), cols);
        for (c, psi) in coords.iter().zip(&self.functionals) {
            back = back.add(&psi.scale(c))?;
        }
        if &back != phi {
            return Err(Error::DimensionMismatch(
                "functional is not a module homomorphism".into(),
            ));
        }
        Ok(coords)
    }
}

/// Solves for all `X` (`target_dim x d`) with `X * src[s] = dst[s] * X`.
fn intertwiners<F: Field>(
    f: &F,
    d: usize,
    t: usize,
    src: &[Matrix<F>],
    dst: &[Matrix<F>],
) -> (Vec<Matrix<F>>, Vec<usize>) {
    let unknowns = t * d;
    let mut rows = Vec::new();
    for (a, b) in src.iter().zip(dst) {
        for r in 0..t {
            for s in 0..d {
                let mut eq = vec![f.zero(); unknowns];
                for u in 0..d {
                    let c = a.get(u, s);
                    if !f.is_zero(c) {
                        eq[r * d + u] = f.add(&eq[r * d + u], c);
                    }
                }
                for u in 0..t {
                    let c = b.get(r, u);
                    if !f.is_zero(c) {
                        eq[u * d + s] = f.sub(&eq[u * d + s], c);
                    }
                }
                rows.push(eq);
            }
        }
    }
    let system = Matrix::from_rows(f, rows, unknowns).expect("uniform rows");
    let (_, pivots) = system.rref();
    let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
    let maps = system
        .kernel()
        .into_iter()
        .map(|v| Matrix::from_rows(f, v.chunks(d.max(1)).map(|c| c.to_vec()).collect(), d).expect("shape"))
        .collect();
    (maps, free)
}

fn dual_actions<F: Field>(
    functionals: &[Matrix<F>],
    free: &[usize],
    act: impl Fn(&Matrix<F>) -> Matrix<F>,
    f: &F,
) -> Matrix<F> {
    let n = functionals.len();
    let cols: Vec<Vec<F::Elem>> = functionals
        .iter()
        .map(|psi| {
            let img = act(psi);
            let c = img.cols();
            free.iter().map(|&i| img.get(i / c, i % c).clone()).collect()
        })
        .collect();
    Matrix::from_columns(f, n, &cols)
}

/// `N^* = Hom_C(N, C)` for a `B`-`C` bimodule `N`, as a `C`-`B` bimodule with
/// `(c·ψ·b)(n) = c·ψ(b·n)`.
pub fn right_dual<F: Field>(n: &Bimodule<F>) -> Result<Dual<F>> {
    let f = n.field();
    let c = n.right_alg();
    let rho: Vec<Matrix<F>> = (0..c.dim()).map(|i| c.right_mul_matrix(&c.basis_coords(i))).collect();
    let (functionals, free) = intertwiners(f, n.kdim(), c.dim(), n.right_action(), &rho);
    if functionals.len() != n.kdim() {
        return Err(Error::NotFree(format!(
            "right dual has k-dimension {} but the module has {}",
            functionals.len(),
            n.kdim()
        )));
    }
    let left_action = (0..c.dim())
        .map(|i| {
            let lam = c.left_mul_matrix(&c.basis_coords(i));
            dual_actions(&functionals, &free, |psi| lam.mul(psi).expect("shape"), f)
        })
        .collect();
    let right_action = n
        .left_action()
        .iter()
        .map(|lb| dual_actions(&functionals, &free, |psi| psi.mul(lb).expect("shape"), f))
        .collect();
    let module = Bimodule::new(
        c.clone(),
        n.left_alg().clone(),
        VectorSpace::with_prefix("ψ", functionals.len()),
        left_action,
        right_action,
    )?;
    Ok(Dual {
        module,
        functionals,
        free,
    })
}

/// `^*N = Hom_B(N, B)` for a `B`-`C` bimodule `N`, as a `C`-`B` bimodule with
/// `(c·φ·b)(n) = φ(n·c)·b`.
pub fn left_dual<F: Field>(n: &Bimodule<F>) -> Result<Dual<F>> {
    let f = n.field();
    let b = n.left_alg();
    let lam: Vec<Matrix<F>> = (0..b.dim()).map(|i| b.left_mul_matrix(&b.basis_coords(i))).collect();
    let (functionals, free) = intertwiners(f, n.kdim(), b.dim(), n.left_action(), &lam);
    if functionals.len() != n.kdim() {
        return Err(Error::NotFree(format!(
            "left dual has k-dimension {} but the module has {}",
            functionals.len(),
            n.kdim()
        )));
    }
    let left_action = n
        .right_action()
        .iter()
        .map(|rc| dual_actions(&functionals, &free, |phi| phi.mul(rc).expect("shape"), f))
        .collect();
    let right_action = (0..b.dim())
        .map(|i| {
            let rho = b.right_mul_matrix(&b.basis_coords(i));
            dual_actions(&functionals, &free, |phi| rho.mul(phi).expect("shape"), f)
        })
        .collect();
    let module = Bimodule::new(
        n.right_alg().clone(),
        b.clone(),
        VectorSpace::with_prefix("φ", functionals.len()),
        left_action,
        right_action,
    )?;
    Ok(Dual {
        module,
        functionals,
        free,
    })
}

/// Matrix of `n ↦ (f ↦ f(n))` from `N` into `outer`, where `inner` is a dual
/// of `N` and `outer` is a dual of `inner.module`.
fn evaluation<F: Field>(n: &Bimodule<F>, inner: &Dual<F>, outer: &Dual<F>) -> Result<Matrix<F>> {
    let f = n.field();
    let cols = (0..n.kdim())
        .map(|s| {
            let values: Vec<Vec<F::Elem>> = inner.functionals().iter().map(|phi| phi.column(s)).collect();
            let t = inner.functionals().first().map_or(0, |m| m.rows());
            outer.coords(&Matrix::from_columns(f, t, &values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(f, outer.module.kdim(), &cols))
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleDualCertificate {
    pub map: &'static str,
    pub kdim: usize,
    pub rank: usize,
    pub equivariant: bool,
}

impl DoubleDualCertificate {
    pub fn passed(&self) -> bool {
        self.rank == self.kdim && self.equivariant
    }
}

fn certify<F: Field>(
    map: &'static str,
    n: &Bimodule<F>,
    e: &Matrix<F>,
    target: &Bimodule<F>,
) -> Result<DoubleDualCertificate> {
    let mut equivariant =
        target.kdim() == n.kdim() && target.left_alg() == n.left_alg() && target.right_alg() == n.right_alg();
    if equivariant {
        for (a, b) in n.left_action().iter().zip(target.left_action()) {
            equivariant &= e.mul(a)? == b.mul(e)?;
        }
        for (a, b) in n.right_action().iter().zip(target.right_action()) {
            equivariant &= e.mul(a)? == b.mul(e)?;
        }
    }
    Ok(DoubleDualCertificate {
        map,
        kdim: n.kdim(),
        rank: e.rank(),
        equivariant,
    })
}

/// Certificates that `N → (^*N)^*` and `N → ^*(N^*)` are bimodule isomorphisms.
pub fn double_dual_certificates<F: Field>(n: &Bimodule<F>) -> Result<[DoubleDualCertificate; 2]> {
    let ld = left_dual(n)?;
    let rd_of_ld = right_dual(&ld.module)?;
    let e1 = evaluation(n, &ld, &rd_of_ld)?;
    let rd = right_dual(n)?;
    let ld_of_rd = left_dual(&rd.module)?;
    let e2 = evaluation(n, &rd, &ld_of_rd)?;
    Ok([
        certify("N -> (*N)*", n, &e1, &rd_of_ld.module)?,
        certify("N -> *(N*)", n, &e2, &ld_of_rd.module)?,
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleBasis<F: Field> {
    pub side: Side,
    pub elements: Vec<Vec<F::Elem>>,
}

/// A basis of `n` over the algebra acting on `side`. Standard basis vectors
/// are taken in order whenever they leave the module span of those already
/// chosen; over a division algebra this gives a free basis.
pub fn extract_basis<F: Field>(n: &Bimodule<F>, side: Side) -> Result<ModuleBasis<F>> {
    let f = n.field();
    let d = n.kdim();
    let acts = match side {
        Side::Left => n.left_action(),
        Side::Right => n.right_action(),
    };
    let mut span = Subspace::zero(f, d);
    let mut elements = Vec::new();
    for t in 0..d {
        let mut e = vec![f.zero(); d];
        e[t] = f.one();
        if span.contains(&e) {
            continue;
        }
        for a in acts {
            span.insert(&a.apply(&e));
        }
        elements.push(e);
    }
    let alg_dim = acts.len();
    if span.rank() != d || elements.len() * alg_dim != d {
        return Err(Error::NotFree(format!(
            "{} elements over an algebra of dim {alg_dim} do not freely span a {d}-dim module",
            elements.len()
        )));
    }
    Ok(ModuleBasis { side, elements })
}

/// A right basis `{φ_l}` of `N` and the left basis `{φ_l^*}` of `N^*` with
/// `φ_l^*(φ_s) = δ_ls`.
#[derive(Clone, Debug)]
pub struct DualBasisPair<F: Field> {
    pub basis: ModuleBasis<F>,
    /// Coordinates in `N^*` (the module of the dual passed in).
    pub dual_basis: ModuleBasis<F>,
    /// `pairing[l][s]` holds the coordinates of `φ_l^*(φ_s)` in the right algebra.
    pub pairing: Vec<Vec<Vec<F::Elem>>>,
}

impl<F: Field> DualBasisPair<F> {
    pub fn pairing_is_identity(&self, c: &DivisionAlgebra<F>) -> bool {
        let f = c.field();
        self.pairing.iter().enumerate().all(|(l, row)| {
            row.iter().enumerate().all(|(s, v)| {
                if l == s {
                    v.as_slice() == c.unit_coords()
                } else {
                    v.iter().all(|x| f.is_zero(x))
                }
            })
        })
    }
}

pub fn dual_basis_pair<F: Field>(n: &Bimodule<F>, dual: &Dual<F>) -> Result<DualBasisPair<F>> {
    let f = n.field();
    let c = n.right_alg();
    let basis = extract_basis(n, Side::Right)?;
    let dc = c.dim();
    let mut cols = Vec::with_capacity(n.kdim());
    for phi in &basis.elements {
        for r in n.right_action() {
            cols.push(r.apply(phi));
        }
    }
    let g = Matrix::from_columns(f, n.kdim(), &cols);
    let ginv = g
        .inverse()
        .ok_or_else(|| Error::MissingDualBasis("translates of the right basis are dependent".into()))?;
    let mut dual_elems = Vec::with_capacity(basis.elements.len());
    let mut pairing = Vec::with_capacity(basis.elements.len());
    for l in 0..basis.elements.len() {
        let rows: Vec<Vec<F::Elem>> = (0..dc).map(|t| ginv.row(l * dc + t).to_vec()).collect();
        let psi = Matrix::from_rows(f, rows, n.kdim())?;
        pairing.push(basis.elements.iter().map(|phi| psi.apply(phi)).collect());
        dual_elems.push(
            dual.coords(&psi)
                .map_err(|e| Error::MissingDualBasis(format!("dual functional {l}: {e}")))?,
        );
    }
    Ok(DualBasisPair {
        basis,
        dual_basis: ModuleBasis {
            side: Side::Left,
            elements: dual_elems,
        },
        pairing,
    })
}

/// The canonical element `ω_i = Σ φ_l ⊗ φ_l^*` and the relation space `Q_i`,
/// both inside the balanced tensor `M^{i*} ⊗_{S_{i+1}} M^{(i+1)*}`.
#[derive(Clone, Debug)]
pub struct CanonicalQ<F: Field> {
    pub tensor: TensorProduct<F>,
    /// `ω_i` in the k-tensor `M^{i*} ⊗_k M^{(i+1)*}`.
    pub omega_ktensor: Vec<F::Elem>,
    pub omega: Vec<F::Elem>,
    /// `{s·ω_i}` for the basis `s` of `S_i`, projected.
    pub orbit: Vec<Vec<F::Elem>>,
    pub q: Subspace<F>,
    pub central: bool,
    pub pairing_ok: bool,
}

struct TowerCache<F: Field> {
    modules: BTreeMap<i64, Arc<Bimodule<F>>>,
    right_duals: BTreeMap<i64, Arc<Dual<F>>>,
    left_duals: BTreeMap<i64, Arc<Dual<F>>>,
    transports: BTreeMap<i64, Arc<Matrix<F>>>,
    qs: BTreeMap<i64, Arc<CanonicalQ<F>>>,
}

/// `M^{i*}` for all integers `i`, computed on demand and cached. Positive
/// indices use right duals, negative ones left duals.
pub struct DualTower<F: Field> {
    cache: RwLock<TowerCache<F>>,
}

impl<F: Field> DualTower<F> {
    pub fn new(m: Bimodule<F>) -> Self {
        let mut modules = BTreeMap::new();
        modules.insert(0, Arc::new(m));
        DualTower {
            cache: RwLock::new(TowerCache {
                modules,
                right_duals: BTreeMap::new(),
                left_duals: BTreeMap::new(),
                transports: BTreeMap::new(),
                qs: BTreeMap::new(),
            }),
        }
    }

    pub fn base(&self) -> Arc<Bimodule<F>> {
        self.cache.read().expect("lock").modules[&0].clone()
    }

    fn cached<T>(
        &self,
        i: i64,
        pick: impl Fn(&TowerCache<F>) -> &BTreeMap<i64, Arc<T>>,
        pick_mut: impl Fn(&mut TowerCache<F>) -> &mut BTreeMap<i64, Arc<T>>,
        compute: impl FnOnce() -> Result<T>,
    ) -> Result<Arc<T>> {
        if let Some(v) = pick(&self.cache.read().expect("lock")).get(&i) {
            return Ok(v.clone());
        }
        let v = Arc::new(compute()?);
        Ok(pick_mut(&mut self.cache.write().expect("lock"))
            .entry(i)
            .or_insert(v)
            .clone())
    }

    /// `M^{i*}`, an `S_i`-`S_{i+1}` bimodule.
    pub fn module(&self, i: i64) -> Result<Arc<Bimodule<F>>> {
        self.cached(
            i,
            |c| &c.modules,
            |c| &mut c.modules,
            || {
                Ok(if i > 0 {
                    self.right_dual(i - 1)?.module.clone()
                } else {
                    self.left_dual(i + 1)?.module.clone()
                })
            },
        )
    }

    /// The right dual of `M^{i*}` with its functionals. For `i ≥ 0` its module
    /// is `M^{(i+1)*}` itself.
    pub fn right_dual(&self, i: i64) -> Result<Arc<Dual<F>>> {
        self.cached(
            i,
            |c| &c.right_duals,
            |c| &mut c.right_duals,
            || right_dual(&*self.module(i)?),
        )
    }

    pub fn left_dual(&self, i: i64) -> Result<Arc<Dual<F>>> {
        self.cached(
            i,
            |c| &c.left_duals,
            |c| &mut c.left_duals,
            || left_dual(&*self.module(i)?),
        )
    }

    /// The isomorphism `M^{(i+1)*} → (M^{i*})^*`: the identity for `i ≥ 0`,
    /// evaluation for `i < 0`.
    pub fn transport(&self, i: i64) -> Result<Arc<Matrix<F>>> {
        self.cached(
            i,
            |c| &c.transports,
            |c| &mut c.transports,
            || {
                let next = self.module(i + 1)?;
                if i >= 0 {
                    return Ok(Matrix::identity(next.field(), next.kdim()));
                }
                evaluation(&next, &*self.left_dual(i + 1)?, &*self.right_dual(i)?)
            },
        )
    }

    /// Dual basis pair of `M^{i*}` with the dual basis in `M^{(i+1)*}` coordinates.
    pub fn dual_basis(&self, i: i64) -> Result<DualBasisPair<F>> {
        let n = self.module(i)?;
        let rd = self.right_dual(i)?;
        let mut pair = dual_basis_pair(&n, &rd)?;
        if i < 0 {
            let e = self.transport(i)?;
            for v in pair.dual_basis.elements.iter_mut() {
                *v = e
                    .solve(v)
                    .ok_or_else(|| Error::MissingDualBasis(format!("evaluation at index {i} is not onto")))?;
            }
        }
        Ok(pair)
    }

    pub fn canonical_q(&self, i: i64) -> Result<Arc<CanonicalQ<F>>> {
        self.cached(i, |c| &c.qs, |c| &mut c.qs, || self.compute_q(i))
    }

    fn compute_q(&self, i: i64) -> Result<CanonicalQ<F>> {
        let a = self.module(i)?;
        let b = self.module(i + 1)?;
        let f = a.field().clone();
        let pair = self.dual_basis(i)?;
        let pairing_ok = pair.pairing_is_identity(a.right_alg());
        let tensor = tensor_over_division_ring(a.right_view(), b.left_view())?;
        let n = b.kdim();
        let mut omega_ktensor = vec![f.zero(); a.kdim() * n];
        for (phi, dual) in pair.basis.elements.iter().zip(&pair.dual_basis.elements) {
            for (x, px) in phi.iter().enumerate() {
                for (y, dy) in dual.iter().enumerate() {
                    f.add_mul(&mut omega_ktensor[x * n + y], px, dy);
                }
            }
        }
        let omega = tensor.quotient.project(&omega_ktensor);
        let s = a.left_alg();
        if s != b.right_alg() {
            return Err(Error::ActionMismatch(format!("S_{i} and S_{} differ", i + 2)));
        }
        let mut q = Subspace::zero(&f, tensor.dim());
        let mut orbit = Vec::with_capacity(s.dim());
        let mut central = omega.iter().any(|x| !f.is_zero(x));
        for (l, r) in a.left_action().iter().zip(b.right_action()) {
            let left = tensor.induced_left(l).apply(&omega);
            central &= left == tensor.induced_right(r).apply(&omega);
            q.insert(&left);
            orbit.push(left);
        }
        Ok(CanonicalQ {
            tensor,
            omega_ktensor,
            omega,
            orbit,
            q,
            central,
            pairing_ok,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub left_rank: usize,
    pub right_rank: usize,
    pub unordered: (usize, usize),
    pub forbidden: bool,
}

pub fn check_forbidden_type<F: Field>(m: &Bimodule<F>) -> TypeReport {
    let (l, r) = (m.left_rank(), m.right_rank());
    let unordered = (l.min(r), l.max(r));
    TypeReport {
        left_rank: l,
        right_rank: r,
        unordered,
        forbidden: matches!(unordered, (1, 1) | (1, 2) | (1, 3)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicityEntry {
    pub index: i64,
    pub left_rank: usize,
    pub next_right_rank: usize,
    pub passed: bool,
}

/// Pairs `(left rank of M^{i*}, right rank of M^{(i+1)*})` by index.
pub fn check_two_periodic_ranks(ranks: &[(i64, usize, usize)]) -> Vec<PeriodicityEntry> {
    ranks
        .iter()
        .map(|&(index, left_rank, next_right_rank)| PeriodicityEntry {
            index,
            left_rank,
            next_right_rank,
            passed: left_rank == next_right_rank,
        })
        .collect()
}

pub fn check_two_periodic<F: Field>(tower: &DualTower<F>, lo: i64, hi: i64) -> Result<Vec<PeriodicityEntry>> {
    let ranks = (lo..=hi)
        .map(|i| Ok((i, tower.module(i)?.left_rank(), tower.module(i + 1)?.right_rank())))
        .collect::<Result<Vec<_>>>()?;
    Ok(check_two_periodic_ranks(&ranks))
}

/// First failing entry as an error.
pub fn require_two_periodic(entries: &[PeriodicityEntry]) -> Result<()> {
    match entries.iter().find(|e| !e.passed) {
        Some(e) => Err(Error::NotTwoPeriodic {
            index: e.index,
            left_rank: e.left_rank,
            next_right_rank: e.next_right_rank,
        }),
        None => Ok(()),
    }
}
