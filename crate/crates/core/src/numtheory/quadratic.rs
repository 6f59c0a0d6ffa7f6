//! Elements and units of real quadratic fields `Q(sqrt d)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::isqrt;
use crate::error::{Error, Result};

/// Longest continued-fraction period [`fundamental_unit`] will follow.
pub const MAX_PERIOD: usize = 200_000;

/// `(x + y sqrt d) / denom` with `denom` 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadInt {
    #[serde(serialize_with = "ser_bigint")]
    pub x: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub y: BigInt,
    pub denom: u8,
    pub d: u64,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl QuadInt {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, denom: u8, d: u64) -> Result<Self> {
        let (x, y) = (x.into(), y.into());
        let ok = match denom {
            1 => true,
            2 => d % 4 == 1 && (&x - &y).is_even(),
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "({x} + {y} sqrt {d}) / {denom} is not an algebraic integer representation"
            )));
        }
        Ok(Self::normalized(x, y, denom, d))
    }

    fn normalized(x: BigInt, y: BigInt, denom: u8, d: u64) -> Self {
        if denom == 2 && x.is_even() && y.is_even() {
            QuadInt {
                x: x / 2,
                y: y / 2,
                denom: 1,
                d,
            }
        } else {
            QuadInt { x, y, denom, d }
        }
    }

    pub fn integer(n: i64, d: u64) -> Self {
        QuadInt {
            x: n.into(),
            y: BigInt::zero(),
            denom: 1,
            d,
        }
    }

    pub fn norm(&self) -> BigInt {
        let num = &self.x * &self.x - BigInt::from(self.d) * &self.y * &self.y;
        let den = BigInt::from(self.denom) * BigInt::from(self.denom);
        debug_assert!((&num % &den).is_zero());
        num / den
    }

    pub fn conjugate(&self) -> Self {
        QuadInt {
            x: self.x.clone(),
            y: -&self.y,
            denom: self.denom,
            d: self.d,
        }
    }

    pub fn neg(&self) -> Self {
        QuadInt {
            x: -&self.x,
            y: -&self.y,
            denom: self.denom,
            d: self.d,
        }
    }

    pub fn mul(&self, other: &QuadInt) -> QuadInt {
        assert_eq!(self.d, other.d, "mixing quadratic fields");
        let d = BigInt::from(self.d);
        let x = &self.x * &other.x + &d * &self.y * &other.y;
        let y = &self.x * &other.y + &self.y * &other.x;
        let mut denom = u32::from(self.denom) * u32::from(other.denom);
        let (mut x, mut y) = (x, y);
        while denom > 2 || (denom == 2 && x.is_even() && y.is_even()) {
            x /= 2;
            y /= 2;
            denom /= 2;
        }
        QuadInt {
            x,
            y,
            denom: denom as u8,
            d: self.d,
        }
    }

    /// Exact sign of `x + y sqrt d` (the first real embedding).
    pub fn sign(&self) -> Ordering {
        signed_sqrt_sum(&self.x, &self.y, self.d)
    }

    /// Signs under both real embeddings, `sqrt d -> +sqrt d` first.
    pub fn sign_vector(&self) -> SignVector {
        SignVector::new(self.sign() == Ordering::Less, self.conjugate().sign() == Ordering::Less)
    }

    /// `log2` of the value for `x, y >= 0`, accurate to about 1e-12.
    pub fn log2_positive(&self) -> f64 {
        assert!(!self.x.is_negative() && !self.y.is_negative());
        let shift = self.x.bits().max(self.y.bits()).saturating_sub(60);
        let top = |v: &BigInt| u64::try_from(&(v >> shift)).expect("60 bits") as f64;
        let v = top(&self.x) + top(&self.y) * (self.d as f64).sqrt();
        v.log2() + shift as f64 - f64::from(self.denom).log2()
    }
}

fn signed_sqrt_sum(x: &BigInt, y: &BigInt, d: u64) -> Ordering {
    let sx = x.sign();
    let sy = y.sign();
    use num_bigint::Sign::*;
    match (sx, sy) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
        (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
        _ => {
            // Opposite signs: compare x^2 with d y^2; d is not a square.
            let lhs = x * x;
            let rhs = BigInt::from(d) * y * y;
            let x_wins = lhs > rhs;
            match (sx == Plus, x_wins) {
                (true, true) | (false, false) => Ordering::Greater,
                _ => Ordering::Less,
            }
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.y.is_zero() {
            self.x.to_string()
        } else {
            let ymag = self.y.abs();
            let ys = if ymag.is_one() { String::new() } else { ymag.to_string() };
            let op = if self.y.is_negative() { "-" } else { "+" };
            if self.x.is_zero() {
                let lead = if self.y.is_negative() { "-" } else { "" };
                format!("{lead}{ys}sqrt{}", self.d)
            } else {
                format!("{} {op} {ys}sqrt{}", self.x, self.d)
            }
        };
        if self.denom == 1 {
            f.write_str(&body)
        } else {
            write!(f, "({body})/{}", self.denom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadUnit {
    pub value: QuadInt,
    pub norm: i8,
}

impl QuadUnit {
    pub fn verify_norm(&self) -> bool {
        self.value.norm() == BigInt::from(self.norm)
    }
}

/// Continued-fraction state for `(p + sqrt dd) / q` with `q | dd - p^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CfState {
    p: i128,
    q: i128,
}

impl CfState {
    fn step(self, dd: i128, s: i128) -> (i128, CfState) {
        let a = (self.p + s).div_euclid(self.q);
        let p = a * self.q - self.p;
        let q = (dd - p * p) / self.q;
        (a, CfState { p, q })
    }
}

/// Fundamental unit `> 1` of the maximal order of `Q(sqrt d)`.
///
/// Expands `sqrt d` (or `(1 + sqrt d)/2` when `d = 1 mod 4`) and reads the
/// unit off the period matrix of the purely periodic tail.
pub fn fundamental_unit(d: u64) -> Result<QuadUnit> {
    if d < 2 || !super::is_squarefree(d)? {
        return Err(Error::InvalidArgument(format!("{d} is not a squarefree integer >= 2")));
    }
    let dd = i128::from(d);
    let s = i128::from(isqrt(d));
    let start = if d % 4 == 1 {
        CfState { p: 1, q: 2 }
    } else {
        CfState { p: 0, q: 1 }
    };
    let (_, first) = start.step(dd, s);

    // Bottom row (C, D) of M = prod [[a_i, 1], [1, 0]] over one period.
    let (mut c, mut dm) = (BigInt::zero(), BigInt::one());
    let mut state = first;
    let mut len = 0usize;
    loop {
        let (a, next) = state.step(dd, s);
        let next_c = &c * BigInt::from(a) + &dm;
        dm = std::mem::replace(&mut c, next_c);
        len += 1;
        state = next;
        if state == first {
            break;
        }
        if len >= MAX_PERIOD {
            return Err(Error::BoundExceeded {
                what: format!("continued fraction period for d = {d}"),
                bound: MAX_PERIOD as u128,
            });
        }
    }

    // unit = C xi_1 + D with xi_1 = (P + sqrt d) / Q.
    let p1 = BigInt::from(first.p);
    let q1 = BigInt::from(first.q);
    let num_x = &c * &p1 + &dm * &q1;
    let num_y = c;
    let value = if d % 4 == 1 {
        let (x, rx) = (&num_x * BigInt::from(2)).div_rem(&q1);
        let (y, ry) = (&num_y * BigInt::from(2)).div_rem(&q1);
        debug_assert!(rx.is_zero() && ry.is_zero());
        QuadInt::normalized(x, y, 2, d)
    } else {
        let (x, rx) = num_x.div_rem(&q1);
        let (y, ry) = num_y.div_rem(&q1);
        debug_assert!(rx.is_zero() && ry.is_zero());
        QuadInt::normalized(x, y, 1, d)
    };
    let norm = if len % 2 == 1 { -1 } else { 1 };
    let unit = QuadUnit { value, norm };
    debug_assert!(unit.verify_norm());
    Ok(unit)
}

/// An element of `(Z/2)^2`: bit 0 is "negative at the first embedding",
/// bit 1 "negative at the second".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignVector(u8);

impl SignVector {
    pub const POSITIVE: SignVector = SignVector(0);

    pub fn new(neg_first: bool, neg_second: bool) -> Self {
        SignVector(u8::from(neg_first) | (u8::from(neg_second) << 1))
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

/// Signs multiply, so the group law on sign vectors is XOR.
impl std::ops::Add for SignVector {
    type Output = SignVector;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, other: SignVector) -> SignVector {
        SignVector(self.0 ^ other.0)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |neg: bool| if neg { '-' } else { '+' };
        write!(f, "({},{})", c(self.0 & 1 == 1), c(self.0 & 2 == 2))
    }
}

/// A subgroup of `(Z/2)^2`, stored as its set of members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignSpan(u8);

impl SignSpan {
    pub fn generated_by(gens: impl IntoIterator<Item = SignVector>) -> SignSpan {
        let mut members: u8 = 1;
        for g in gens {
            let mut next = members;
            for v in 0..4u8 {
                if members & (1 << v) != 0 {
                    next |= 1 << (v ^ g.0);
                }
            }
            members = next;
        }
        SignSpan(members)
    }

    pub fn contains(&self, v: SignVector) -> bool {
        self.0 & (1 << v.0) != 0
    }

    pub fn is_full(&self) -> bool {
        self.0 == 0b1111
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> Vec<SignVector> {
        (0..4u8).filter(|v| self.0 & (1 << v) != 0).map(SignVector).collect()
    }
}

impl fmt::Display for SignSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Span of the signatures of `-1`, the fundamental unit of `Q(sqrt d)` and
/// the supplied extra generators (typically dyadic S-units).
pub fn unit_signature_span(d: u64, generators: &[QuadInt]) -> Result<SignSpan> {
    let eps = fundamental_unit(d)?;
    let minus_one = QuadInt::integer(-1, d);
    Ok(SignSpan::generated_by(
        std::iter::once(minus_one.sign_vector())
            .chain(std::iter::once(eps.value.sign_vector()))
            .chain(generators.iter().map(QuadInt::sign_vector)),
    ))
}
