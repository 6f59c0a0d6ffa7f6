//! Truncated integer power series in `u`, and the parity computation
//! showing that `q^4 psi^q - 1` applied to `lambda^1` is not a
//! realification.
//!
//! The full expression carries a factor `(1-u)^(-q)`. Its constant term
//! is 1, so it is a unit in `Z[[u]]` and does not change which
//! coefficients are odd; only the polynomial bracket is expanded.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncSeries {
    #[serde(serialize_with = "as_strings")]
    coeffs: Vec<BigInt>,
}

fn as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl TruncSeries {
    pub fn zero(n: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigInt::zero(); n + 1],
        }
    }

    pub fn constant(c: impl Into<BigInt>, n: usize) -> Self {
        let mut s = TruncSeries::zero(n);
        s.coeffs[0] = c.into();
        s
    }

    /// Pads or truncates `coeffs` to degree `n`.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>, n: usize) -> Self {
        coeffs.resize(n + 1, BigInt::zero());
        TruncSeries { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Highest nonzero index, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn same_truncation(&self, other: &TruncSeries) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch(self.truncation(), other.truncation()));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.same_truncation(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncSeries { coeffs })
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.same_truncation(other)?;
        let n = self.truncation();
        let mut out = TruncSeries::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    /// `(1-u)^e` through degree `n`, from the binomial theorem.
    pub fn binomial_power(e: u64, n: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(n);
        let mut c = BigInt::one();
        for i in 0..=n.min(e as usize) {
            out.coeffs[i] = if i % 2 == 0 { c.clone() } else { -c.clone() };
            c = c * (e - i as u64) / (i as u64 + 1);
        }
        out
    }

    /// `1 + u + u^2 + ...` through degree `n`.
    pub fn geometric(n: usize) -> TruncSeries {
        TruncSeries {
            coeffs: vec![BigInt::one(); n + 1],
        }
    }

    pub fn reduce_mod2(&self) -> Vec<u8> {
        self.coeffs.iter().map(|c| u8::from(c.is_odd())).collect()
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c < &BigInt::zero() { "-" } else { "+" };
            let mag = c.magnitude();
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("u")?,
                (1, false) => write!(f, "{mag}u")?,
                (_, true) => write!(f, "u^{i}")?,
                (_, false) => write!(f, "{mag}u^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn check_q(q: u64) -> Result<()> {
    if q.is_multiple_of(2) || q < 3 {
        return Err(Error::EvenQ(q));
    }
    Ok(())
}

/// `q^4 (1-u)^(2q) - (1-u)^(q+1) + (q^4-1)(1-u)^q - (1-u)^(q-1) + q^4`.
pub fn bracket(q: u64, n: usize) -> Result<TruncSeries> {
    check_q(q)?;
    let need = 2 * q as usize;
    if n < need {
        return Err(Error::TruncationTooSmall { got: n, need });
    }
    let q4 = BigInt::from(q).pow(4);
    let p = |e: u64| TruncSeries::binomial_power(e, n);
    p(2 * q)
        .scale(&q4)
        .add(&p(q + 1).neg())?
        .add(&p(q).scale(&(&q4 - 1)))?
        .add(&p(q - 1).neg())?
        .add(&TruncSeries::constant(q4, n))
}

/// True when the `u^(2q)` coefficient of the bracket is odd.
pub fn check_obstruction(q: u64) -> Result<bool> {
    let b = bracket(q, 2 * q as usize)?;
    Ok(b.coeff(2 * q as usize).is_odd())
}
