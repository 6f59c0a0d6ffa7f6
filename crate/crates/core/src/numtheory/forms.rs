//! Class numbers of real quadratic fields from cycles of reduced
//! indefinite binary quadratic forms, plus the class of the dyadic prime.

use std::collections::BTreeSet;

use serde::Serialize;

use super::quadratic::{fundamental_unit, QuadInt};
use super::{is_squarefree, isqrt, isqrt_u128};
use crate::error::{Error, Result};

/// Largest `d` accepted by [`class_numbers`].
pub const MAX_D: u64 = 1_000_000;

/// Largest `|y|` the dyadic norm search will scan before giving up.
pub const DYADIC_SEARCH_CAP: u64 = 5_000_000;

/// How 2 decomposes in `O_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    Ramified,
    Split,
    Inert,
}

impl Splitting {
    pub fn of(d: u64) -> Splitting {
        match d % 8 {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    }

    pub fn prime_count(self) -> u32 {
        match self {
            Splitting::Split => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum DyadicOrder {
    /// `generator` spans the principal ideal `p^order` for a dyadic prime `p`.
    Known { order: u64, generator: QuadInt },
    /// No generator with `|y| <= bound` exists; the class order is
    /// still open.
    Unknown { bound: u64 },
}

impl DyadicOrder {
    pub fn order(&self) -> Option<u64> {
        match self {
            DyadicOrder::Known { order, .. } => Some(*order),
            DyadicOrder::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassData {
    pub d: u64,
    pub discriminant: u64,
    pub h: u64,
    pub h_narrow: u64,
    pub splitting: Splitting,
    pub dyadic_class_order: DyadicOrder,
}

pub fn discriminant(d: u64) -> u64 {
    if d % 4 == 1 {
        d
    } else {
        4 * d
    }
}

/// A form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// All reduced forms of discriminant `disc`:
/// `0 < b < sqrt(disc)` and `sqrt(disc) - b < 2|a| < sqrt(disc) + b`.
pub fn reduced_forms(disc: u64) -> Vec<Form> {
    let s = isqrt(disc) as i64;
    let disc = disc as i64;
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let ac = (b * b - disc) / 4;
        let m = -ac;
        let mut a = 1i64;
        while a * a <= m {
            if m % a == 0 {
                for abs_a in [a, m / a] {
                    if 2 * abs_a + b > s && 2 * abs_a - b <= s {
                        for sa in [abs_a, -abs_a] {
                            out.push(Form { a: sa, b, c: ac / sa });
                        }
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    out.dedup();
    out.retain(|f| num_integer::gcd(num_integer::gcd(f.a, f.b), f.c) == 1);
    out
}

/// Neighbour of a reduced form in its cycle: `(c, b', ...)` with
/// `b' = -b mod 2|c|` and `sqrt(disc) - 2|c| < b' < sqrt(disc)`.
pub fn rho(f: Form, disc: u64) -> Form {
    let s = isqrt(disc) as i64;
    let m = 2 * f.c.abs();
    let b = s - (s + f.b).rem_euclid(m);
    Form {
        a: f.c,
        b,
        c: (b * b - disc as i64) / (4 * f.c),
    }
}

/// Number of cycles of reduced forms; this is the narrow class number.
pub fn count_cycles(disc: u64) -> u64 {
    let forms = reduced_forms(disc);
    let mut seen = BTreeSet::new();
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        while seen.insert(g) {
            g = rho(g, disc);
        }
    }
    cycles
}

pub fn class_numbers(d: u64) -> Result<ClassData> {
    if d > MAX_D {
        return Err(Error::BoundExceeded {
            what: format!("class number of Q(sqrt {d})"),
            bound: MAX_D.into(),
        });
    }
    if d < 2 || !is_squarefree(d)? {
        return Err(Error::InvalidArgument(format!("{d} is not a squarefree integer >= 2")));
    }
    let disc = discriminant(d);
    let h_narrow = count_cycles(disc);
    let eps = fundamental_unit(d)?;
    let h = if eps.norm == -1 { h_narrow } else { h_narrow / 2 };
    let splitting = Splitting::of(d);
    let log2_eps = eps.value.log2_positive();
    let dyadic_class_order = dyadic_order(d, h, splitting, log2_eps);
    Ok(ClassData {
        d,
        discriminant: disc,
        h,
        h_narrow,
        splitting,
        dyadic_class_order,
    })
}

/// Smallest `k` such that a dyadic prime to the `k` is principal.
///
/// Any generator can be moved by a power of the fundamental unit `e` into
/// `sqrt(2^k / e) <= alpha < sqrt(2^k e)`, which forces
/// `|Y| <= 2 sqrt(2^k e / d)` in `alpha = (X + Y sqrt d) / 2`.
/// The search is therefore complete until that bound passes
/// [`DYADIC_SEARCH_CAP`].
fn dyadic_order(d: u64, h: u64, splitting: Splitting, log2_eps: f64) -> DyadicOrder {
    if splitting == Splitting::Inert {
        return DyadicOrder::Known {
            order: 1,
            generator: QuadInt::integer(2, d),
        };
    }
    let half = d % 4 == 1;
    for k in 1..=h.min(120) as u32 {
        let log2_bound = 1.0 + 0.5 * (f64::from(k) + log2_eps - (d as f64).log2());
        let bound = 2f64.powf(log2_bound).ceil() + 1.0;
        if bound > DYADIC_SEARCH_CAP as f64 {
            return DyadicOrder::Unknown {
                bound: DYADIC_SEARCH_CAP,
            };
        }
        if let Some(g) = search_norm(d, k, bound as u64, half, splitting) {
            return DyadicOrder::Known {
                order: u64::from(k),
                generator: g,
            };
        }
    }
    // The order divides h, so reaching this point means h exceeded the
    // loop ceiling.
    DyadicOrder::Unknown {
        bound: DYADIC_SEARCH_CAP,
    }
}

/// An element `(X + Y sqrt d)/2` with `X^2 - d Y^2 = +-4 * 2^k`, primitive
/// at 2 when 2 splits.
fn search_norm(d: u64, k: u32, y_bound: u64, half: bool, splitting: Splitting) -> Option<QuadInt> {
    let four_n = 4u128 << k;
    let dd = u128::from(d);
    for y in 0..=y_bound {
        // With d != 1 mod 4, X and Y are both even.
        if !half && y % 2 == 1 {
            continue;
        }
        let dy2 = dd * u128::from(y) * u128::from(y);
        let candidates = [dy2.checked_add(four_n), dy2.checked_sub(four_n)];
        for t in candidates.into_iter().flatten() {
            let x = isqrt_u128(t);
            if x * x != t {
                continue;
            }
            let (x, y) = (x as u64, y);
            if !half && x % 2 == 1 {
                continue;
            }
            if half && (x + y) % 2 == 1 {
                continue;
            }
            if splitting == Splitting::Split && x % 2 == 0 && y % 2 == 0 && (x / 2 + y / 2) % 2 == 0 {
                // Divisible by 2 in O_F, so the ideal is not a pure prime power.
                continue;
            }
            let (x, y) = (i64::try_from(x).ok()?, i64::try_from(y).ok()?);
            let g = if half {
                QuadInt::new(x, y, 2, d)
            } else {
                QuadInt::new(x / 2, y / 2, 1, d)
            };
            return g.ok();
        }
    }
    None
}
