use ::ncsym::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-20i64..20, 1i64..9).prop_map(|(n, d)| q(n, d))
}

fn qmatrix(rows: &[Vec<i64>]) -> Matrix<Rationals> {
    let f = Rationals;
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_rows(
        &f,
        rows.iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect(),
        cols,
    )
    .unwrap()
}

fn matrix_strategy(max_r: usize, max_c: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-2i64..=2, c), r))
}

/// Multiplication in `Q[t]/(t^4 - 2)` done by hand on integer coefficients.
fn quartic_product(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut full = [0i64; 7];
    for i in 0..4 {
        for j in 0..4 {
            full[i + j] += a[i] * b[j];
        }
    }
    for k in (4..7).rev() {
        full[k - 4] += 2 * full[k];
        full[k] = 0;
    }
    full[..4].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
        let f = Rationals;
        prop_assert_eq!(f.mul(&f.add(&a, &b), &c), f.add(&f.mul(&a, &c), &f.mul(&b, &c)));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
        if !f.is_zero(&a) {
            prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        } else {
            prop_assert!(f.inv(&a).is_none());
        }
        prop_assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
    }

    #[test]
    fn prime_field_matches_integer_residues(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101]), x in -500i64..500, y in -500i64..500) {
        let f = PrimeField::new(p).unwrap();
        let r = |v: i128| v.rem_euclid(p as i128) as u64;
        let (a, b) = (f.from_i64(x), f.from_i64(y));
        prop_assert_eq!(a, r(x as i128));
        prop_assert_eq!(f.add(&a, &b), r(x as i128 + y as i128));
        prop_assert_eq!(f.sub(&a, &b), r(x as i128 - y as i128));
        prop_assert_eq!(f.mul(&a, &b), r(x as i128 * y as i128));
        if a != 0 {
            prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
    }

    #[test]
    fn quartic_extension_matches_polynomial_product(a in prop::collection::vec(-4i64..=4, 4), b in prop::collection::vec(-4i64..=4, 4)) {
        let f = Rationals;
        let l = make_extension_field(&f, &[f.from_i64(-2), f.zero(), f.zero(), f.zero(), f.one()]).unwrap();
        let lift = |v: &[i64]| v.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>();
        prop_assert_eq!(l.mul_coords(&lift(&a), &lift(&b)), lift(&quartic_product(&a, &b)));
        if a.iter().any(|&x| x != 0) {
            let inv = l.inv_coords(&lift(&a)).unwrap();
            prop_assert_eq!(l.mul_coords(&lift(&a), &inv), l.unit_coords().to_vec());
        }
    }

    #[test]
    fn rank_plus_nullity(rows in matrix_strategy(5, 6)) {
        let m = qmatrix(&rows);
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|x| Rationals.is_zero(x)));
        }
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn matrix_product_is_associative(a in matrix_strategy(3, 3), seed in 0u64..1000) {
        let f = Rationals;
        let a = qmatrix(&a);
        let b = ::ncsym::bimodule::random_invertible(&f, a.cols(), seed);
        let c = ::ncsym::bimodule::random_invertible(&f, a.cols(), seed + 1);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let binv = b.inverse().unwrap();
        prop_assert!(b.mul(&binv).unwrap().is_identity());
    }

    #[test]
    fn quotient_recovers_its_kernel(gens in matrix_strategy(4, 6), probe in prop::collection::vec(-3i64..=3, 6)) {
        let f = Rationals;
        let n = gens[0].len();
        let vecs: Vec<Vec<BigRational>> = gens.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect();
        let k = Subspace::span(&f, n, &vecs).unwrap();
        let quot = Quotient::new(VectorSpace::standard(n), k.clone()).unwrap();
        prop_assert_eq!(quot.dim(), n - k.rank());
        for v in &vecs {
            prop_assert!(quot.project(v).iter().all(|x| f.is_zero(x)));
        }
        let p: Vec<BigRational> = probe[..n].iter().map(|&x| f.from_i64(x)).collect();
        let image_zero = quot.project(&p).iter().all(|x| f.is_zero(x));
        prop_assert_eq!(image_zero, k.contains(&p));
        let back = quot.project(&quot.lift(&quot.project(&p)));
        prop_assert_eq!(back, quot.project(&p));
    }

    #[test]
    fn tensor_over_base_field_multiplies_dimensions(a in 1usize..5, b in 1usize..5) {
        let f = Rationals;
        let (m, n) = (Bimodule::vector_space(&f, a), Bimodule::vector_space(&f, b));
        let t = tensor_over_division_ring(m.right_view(), n.left_view()).unwrap();
        prop_assert_eq!(t.dim(), a * b);
    }
}

#[test]
fn tensor_over_an_extension_divides_by_its_degree() {
    let f = PrimeField::new(7).unwrap();
    let l = make_extension_field(&f, &[4, 0, 1]).unwrap();
    let right = Bimodule::outer(&l, &l);
    let left = Bimodule::outer(&l, &l);
    let t = tensor_over_division_ring(right.right_view(), left.left_view()).unwrap();
    assert_eq!(t.dim(), 4 * 4 / 2);
    let k = DivisionAlgebra::base(&f);
    let other = Bimodule::outer(&k, &k);
    assert!(matches!(
        tensor_over_division_ring(right.right_view(), other.left_view()),
        Err(Error::ActionMismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dimensions_survive_basis_change(seed in 0u64..10_000, which in 0usize..3) {
        let f = Rationals;
        let m = match which {
            0 => Bimodule::vector_space(&f, 2),
            1 => Bimodule::vector_space(&f, 3),
            _ => {
                let l = make_extension_field(&f, &[f.from_i64(-2), f.zero(), f.zero(), f.zero(), f.one()]).unwrap();
                Bimodule::from_algebra(&l, Side::Right)
            }
        };
        let (rebased, _) = m.random_rebase(seed).unwrap();
        let w = Window::new(-1, 3);
        let a = ZAlgebraWindow::build(m, w, BuildOptions::default()).unwrap().dim_table().unwrap();
        let b = ZAlgebraWindow::build(rebased, w, BuildOptions::default()).unwrap().dim_table().unwrap();
        prop_assert_eq!(a.rows.iter().map(|r| r.kdim).collect::<Vec<_>>(), b.rows.iter().map(|r| r.kdim).collect::<Vec<_>>());
    }

    #[test]
    fn multiplication_is_bilinear(x in prop::collection::vec(-3i64..=3, 2), y in prop::collection::vec(-3i64..=3, 2), z in prop::collection::vec(-3i64..=3, 3)) {
        let f = Rationals;
        let w = ZAlgebraWindow::build(Bimodule::vector_space(&f, 2), Window::new(0, 3), BuildOptions::default()).unwrap();
        let lift = |v: &[i64]| v.iter().map(|&a| f.from_i64(a)).collect::<Vec<_>>();
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = w.multiply(0, 1, 3, &lift(&sum), &lift(&z)).unwrap();
        let a = w.multiply(0, 1, 3, &lift(&x), &lift(&z)).unwrap();
        let b = w.multiply(0, 1, 3, &lift(&y), &lift(&z)).unwrap();
        let rhs: Vec<BigRational> = a.iter().zip(&b).map(|(p, q)| f.add(p, q)).collect();
        prop_assert_eq!(lhs, rhs);
    }
}
