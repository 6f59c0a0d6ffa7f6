//! Exact integer number theory used by the field layer.
//!
//! Everything here is desk-scale: factorization is trial division below
//! [`TRIAL_DIVISION_BOUND`], and the quadratic-field routines in
//! [`quadratic`] and [`forms`] are bounded by [`forms::MAX_D`].

pub mod forms;
pub mod quadratic;

use crate::error::{Error, Result};

pub use forms::{class_numbers, ClassData, DyadicOrder};
pub use quadratic::{fundamental_unit, unit_signature_span, QuadInt, QuadUnit, SignSpan, SignVector};

/// Largest input accepted by [`squarefree_part`] and friends.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000_000_000;

/// 2-adic valuation of `n >= 1`.
pub fn nu2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::NonPositive(0));
    }
    Ok(n.trailing_zeros())
}

/// The 2-part `2^{nu2(n)}` of `n >= 1`.
pub fn two_part(n: u64) -> Result<u64> {
    nu2(n).map(|e| 1u64 << e)
}

fn two_part_u128(n: u128) -> u128 {
    debug_assert!(n > 0);
    1u128 << n.trailing_zeros()
}

/// `(q^m - 1)_2` for odd `q >= 3` and `m >= 1`.
///
/// Odd `m` gives `(q - 1)_2`; even `m = 2m'` gives `(q^2 - 1)_2 (m')_2`.
pub fn val2_q_power(q: u64, m: u64) -> Result<u64> {
    if q.is_multiple_of(2) || q < 3 {
        return Err(Error::EvenQ(q));
    }
    if m == 0 {
        return Err(Error::NonPositive(0));
    }
    let q = u128::from(q);
    let value = if m % 2 == 1 {
        two_part_u128(q - 1)
    } else {
        two_part_u128(q * q - 1) * two_part_u128(u128::from(m / 2))
    };
    u64::try_from(value).map_err(|_| Error::BoundExceeded {
        what: "2-part of q^m - 1".into(),
        bound: u128::from(u64::MAX),
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The first twelve prime bases are a witness
/// set for every `n < 3.3 * 10^24`, which covers all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub squarefree: bool,
    /// Prime factors with multiplicity, ascending.
    pub factors: Vec<u64>,
}

impl Factorization {
    pub fn distinct(&self) -> Vec<u64> {
        let mut d = self.factors.clone();
        d.dedup();
        d
    }
}

pub fn factorize(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::NonPositive(0));
    }
    if n > TRIAL_DIVISION_BOUND {
        return Err(Error::BoundExceeded {
            what: format!("trial division of {n}"),
            bound: u128::from(TRIAL_DIVISION_BOUND),
        });
    }
    let mut factors = Vec::new();
    let mut n = n;
    while n.is_multiple_of(2) {
        factors.push(2);
        n /= 2;
    }
    let mut p = 3;
    while p * p <= n {
        while n.is_multiple_of(p) {
            factors.push(p);
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        factors.push(n);
    }
    Ok(factors)
}

pub fn squarefree_part(n: u64) -> Result<Factorization> {
    let factors = factorize(n)?;
    let squarefree = factors.windows(2).all(|w| w[0] != w[1]);
    Ok(Factorization { squarefree, factors })
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    squarefree_part(n).map(|f| f.squarefree)
}

pub fn euler_phi(m: u64) -> Result<u64> {
    let f = squarefree_part(m)?;
    Ok(f.distinct().iter().fold(m, |acc, p| acc / p * (p - 1)))
}

/// If `m = p^k` with `p` an odd prime, returns `(p, k)`.
pub fn odd_prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 3 || m.is_multiple_of(2) {
        return None;
    }
    let f = factorize(m).ok()?;
    let p = f[0];
    f.iter().all(|&x| x == p).then_some((p, f.len() as u32))
}

/// Whether `g` generates `(Z/m)^*` for an odd prime power `m`.
pub fn is_primitive_root(g: i64, m: u64) -> Result<bool> {
    if odd_prime_power(m).is_none() {
        return Err(Error::BadModulus(m));
    }
    let g = g.rem_euclid(m as i64) as u64;
    if num_integer::gcd(g, m) != 1 {
        return Ok(false);
    }
    let phi = euler_phi(m)?;
    Ok(squarefree_part(phi)?
        .distinct()
        .iter()
        .all(|&p| pow_mod(g, phi / p, m) != 1))
}

/// `m` and `(m - 1) / 2` both prime.
pub fn is_sophie_germain_type(m: u64) -> bool {
    m >= 5 && m % 2 == 1 && is_prime(m) && is_prime((m - 1) / 2)
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn isqrt(n: u64) -> u64 {
    isqrt_u128(u128::from(n)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `(q^m - 1)_2` by exponentiation modulo 2^128; exact as long as the
    /// true answer is below 2^128.
    fn val2_oracle(q: u64, m: u64) -> u64 {
        let r = u128::from(q).wrapping_pow(m as u32).wrapping_sub(1);
        1u64 << r.trailing_zeros()
    }

    #[test]
    fn nu2_and_two_part() {
        assert_eq!(nu2(8).unwrap(), 3);
        assert_eq!(two_part(80).unwrap(), 16);
        assert_eq!(two_part(7).unwrap(), 1);
        assert_eq!(nu2(0), Err(Error::NonPositive(0)));
        assert_eq!(two_part(0), Err(Error::NonPositive(0)));
    }

    #[test]
    fn val2_examples() {
        assert_eq!(val2_q_power(5, 4).unwrap(), 16);
        assert_eq!(val2_q_power(3, 3).unwrap(), 2);
        assert_eq!(val2_q_power(3, 4).unwrap(), 16);
        assert_eq!(val2_q_power(4, 2), Err(Error::EvenQ(4)));
        assert_eq!(val2_q_power(1, 2), Err(Error::EvenQ(1)));
        assert_eq!(val2_q_power(3, 0), Err(Error::NonPositive(0)));
    }

    #[test]
    fn val2_sweep_against_oracle() {
        for q in (3..=99).step_by(2) {
            for m in 1..=64 {
                assert_eq!(val2_q_power(q, m).unwrap(), val2_oracle(q, m), "q={q} m={m}");
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(3));
        assert!(!is_prime(561));
        assert!(is_prime(179));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 2..20_000u64 {
            let trial = (2..).take_while(|p| p * p <= n).all(|p| n % p != 0);
            assert_eq!(is_prime(n), trial, "n={n}");
        }
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(
            squarefree_part(34).unwrap(),
            Factorization {
                squarefree: true,
                factors: vec![2, 17]
            }
        );
        assert_eq!(
            squarefree_part(12).unwrap(),
            Factorization {
                squarefree: false,
                factors: vec![2, 2, 3]
            }
        );
        assert_eq!(
            squarefree_part(2).unwrap(),
            Factorization {
                squarefree: true,
                factors: vec![2]
            }
        );
        assert!(matches!(
            squarefree_part(TRIAL_DIVISION_BOUND + 1),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn primitive_roots_and_sophie_germain() {
        assert!(is_primitive_root(2, 5).unwrap());
        assert!(!is_primitive_root(2, 7).unwrap());
        assert!(is_primitive_root(2, 9).unwrap());
        assert!(is_primitive_root(2, 11).unwrap());
        assert_eq!(is_primitive_root(2, 15), Err(Error::BadModulus(15)));
        assert_eq!(is_primitive_root(2, 8), Err(Error::BadModulus(8)));
        for m in [5, 11, 59, 83, 107, 179] {
            assert!(is_sophie_germain_type(m), "m={m}");
        }
        assert!(!is_sophie_germain_type(13));
        assert_eq!(euler_phi(9).unwrap(), 6);
        assert_eq!(euler_phi(11).unwrap(), 10);
    }

    proptest! {
        #[test]
        fn val2_matches_oracle_random(q in (1u64..5000).prop_map(|x| 2 * x + 1), m in 1u64..40) {
            prop_assert_eq!(val2_q_power(q, m).unwrap(), val2_oracle(q, m));
        }

        #[test]
        fn factorization_multiplies_back(n in 1u64..1_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.iter().product::<u64>(), n);
            prop_assert!(f.iter().all(|&p| is_prime(p)));
        }
    }
}
