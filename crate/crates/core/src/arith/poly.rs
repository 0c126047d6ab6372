//! Bounded factor searches for minimal polynomials.
//!
//! Polynomials are coefficient vectors, constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::field::{Field, PrimeField};
use crate::error::{Error, Result};

/// Largest |coefficient| for which divisor enumeration is attempted.
const DIVISOR_LIMIT: u64 = 1 << 40;
/// Largest number of candidate monic factors tried over a prime field.
const CANDIDATE_LIMIT: u128 = 50_000_000;

pub(crate) fn describe<F: Field>(field: &F, poly: &[F::Elem]) -> String {
    let terms: Vec<String> = poly
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(i, c)| match i {
            0 => field.format(c),
            1 => format!("({})t", field.format(c)),
            _ => format!("({})t^{i}", field.format(c)),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Searches for a nontrivial factor of a monic rational polynomial of degree
/// at most 4: rational roots first, then integer quadratic pairs for quartics.
pub(crate) fn rational_factor(poly: &[BigRational]) -> Result<Option<String>> {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return Ok(None);
    }
    if deg > 4 {
        return Err(Error::UnsupportedMinpoly(format!(
            "degree {deg} over Q; irreducibility is only decided up to degree 4 (use a prime field)"
        )));
    }
    let ints = primitive_integer_poly(poly);
    if let Some(root) = rational_root(&ints)? {
        return Ok(Some(format!("rational root {root}")));
    }
    if deg == 4 {
        if let Some((g, h)) = quadratic_pair(&ints)? {
            return Ok(Some(format!("factors {g:?} * {h:?}")));
        }
    }
    Ok(None)
}

fn primitive_integer_poly(poly: &[BigRational]) -> Vec<BigInt> {
    let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = poly
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .abs()
        .to_u64()
        .filter(|&v| v <= DIVISOR_LIMIT)
        .ok_or_else(|| Error::UnsupportedMinpoly(format!("coefficient {n} too large for divisor search")))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out.sort();
    Ok(out)
}

fn eval(poly: &[BigInt], x: &BigRational) -> BigRational {
    poly.iter().rev().fold(BigRational::zero(), |acc, c| {
        acc * x + BigRational::from_integer(c.clone())
    })
}

fn rational_root(poly: &[BigInt]) -> Result<Option<BigRational>> {
    if poly[0].is_zero() {
        return Ok(Some(BigRational::zero()));
    }
    let lead = poly.last().expect("nonempty");
    for p in divisors(&poly[0])? {
        for q in divisors(lead)? {
            for sign in [1, -1] {
                let x = BigRational::new(BigInt::from(sign) * &p, q.clone());
                if eval(poly, &x).is_zero() {
                    return Ok(Some(x));
                }
            }
        }
    }
    Ok(None)
}

fn mul_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Integer quadratics `g * h = f` for a primitive quartic `f` (Gauss's lemma
/// makes integer factors sufficient). The middle coefficient of `g` is bounded
/// by the Knuth/Mignotte estimate `||f||_2 + |lc(f)|`.
fn quadratic_pair(f: &[BigInt]) -> Result<Option<(Vec<BigInt>, Vec<BigInt>)>> {
    let sign = if f[4].is_negative() { -1 } else { 1 };
    let f: Vec<BigInt> = f.iter().map(|c| c * sign).collect();
    let norm_sq: BigInt = f.iter().map(|c| c * c).sum();
    let bound = norm_sq.sqrt() + BigInt::one() + &f[4];
    let bound = bound
        .to_i64()
        .ok_or_else(|| Error::UnsupportedMinpoly("coefficients too large".into()))?;
    for a1 in divisors(&f[4])? {
        let a2 = &f[4] / &a1;
        for c1 in divisors(&f[0])? {
            for c1 in [c1.clone(), -c1] {
                let c2 = &f[0] / &c1;
                for b1 in -bound..=bound {
                    let b1 = BigInt::from(b1);
                    let num = &f[3] - &b1 * &a2;
                    if !(&num % &a1).is_zero() {
                        continue;
                    }
                    let b2 = num / &a1;
                    let g = vec![c1.clone(), b1.clone(), a1.clone()];
                    let h = vec![c2.clone(), b2, a2.clone()];
                    if mul_poly(&g, &h) == f {
                        return Ok(Some((g, h)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Exhaustive search for a monic factor of degree `1..=deg/2` over GF(p).
pub(crate) fn prime_field_factor(field: &PrimeField, poly: &[u64]) -> Result<Option<String>> {
    let deg = poly.len() - 1;
    let p = field.modulus() as u128;
    let total: u128 = (1..=deg / 2).map(|k| p.pow(k as u32)).sum();
    if total > CANDIDATE_LIMIT {
        return Err(Error::UnsupportedMinpoly(format!(
            "exhaustive factor search over {} would try {total} candidates",
            field.name()
        )));
    }
    for k in 1..=deg / 2 {
        let count = field.modulus().pow(k as u32);
        for code in 0..count {
            let mut cand = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                cand.push(c % field.modulus());
                c /= field.modulus();
            }
            cand.push(1);
            if divides(field, &cand, poly) {
                return Ok(Some(format!("monic factor {}", describe(field, &cand))));
            }
        }
    }
    Ok(None)
}

fn divides(field: &PrimeField, divisor: &[u64], poly: &[u64]) -> bool {
    let mut rem = poly.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().expect("nonempty");
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for (i, c) in divisor.iter().enumerate() {
                rem[shift + i] = field.sub(&rem[shift + i], &field.mul(&lead, c));
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
    }

    #[test]
    fn quartic_two_is_irreducible_over_q() {
        assert!(rational_factor(&q(&[-2, 0, 0, 0, 1])).unwrap().is_none());
    }

    #[test]
    fn quartic_with_quadratic_factors_is_caught() {
        // (t^2 + 1)(t^2 - 3) has no rational roots
        assert!(rational_factor(&q(&[-3, 0, -2, 0, 1])).unwrap().is_some());
        // (t^2 + t + 1)(t^2 - t + 2)
        let f = mul_poly(&[1.into(), 1.into(), 1.into()], &[2.into(), (-1).into(), 1.into()]);
        let f: Vec<BigRational> = f.into_iter().map(BigRational::from_integer).collect();
        assert!(rational_factor(&f).unwrap().is_some());
    }

    #[test]
    fn cubic_root_found() {
        assert!(rational_factor(&q(&[-8, 0, 0, 1])).unwrap().is_some());
        assert!(rational_factor(&q(&[-2, 0, 0, 1])).unwrap().is_none());
    }

    #[test]
    fn degree_five_over_q_is_unsupported() {
        assert!(rational_factor(&q(&[-2, 0, 0, 0, 0, 1])).is_err());
    }

    #[test]
    fn prime_field_search() {
        let f = PrimeField::new(5).unwrap();
        assert!(prime_field_factor(&f, &[3, 0, 1]).unwrap().is_none()); // t^2 - 2
        assert!(prime_field_factor(&f, &[1, 0, 1]).unwrap().is_some()); // t^2 + 1 = (t-2)(t+2)
                                                                        // t^4 + 2 over GF(5) has no roots; check it agrees with a brute-force quadratic search
        let quartic = [2, 0, 0, 0, 1];
        let found = prime_field_factor(&f, &quartic).unwrap().is_some();
        let mut brute = false;
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let g = [a, b, 1u64];
                        let h = [c, d, 1u64];
                        let mut prod = [0u64; 5];
                        for i in 0..3 {
                            for j in 0..3 {
                                prod[i + j] = (prod[i + j] + g[i] * h[j]) % 5;
                            }
                        }
                        brute |= prod == quartic;
                    }
                }
            }
        }
        assert_eq!(found, brute);
    }
}
