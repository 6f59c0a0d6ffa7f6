//! Finitely generated abelian groups up to odd torsion.
//!
//! Every group in the tables is a free part plus a finite 2-group, so a group
//! is stored as a rank together with the sorted multiset of its cyclic
//! 2-power torsion orders. Equality of [`FgAb2`] values is isomorphism.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z^rank` plus cyclic summands `Z/t` with each `t` a power of two, `t >= 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawGroup")]
pub struct FgAb2 {
    rank: u32,
    torsion: Vec<u64>,
}

#[derive(Deserialize)]
struct RawGroup {
    rank: u32,
    torsion: Vec<u64>,
}

impl TryFrom<RawGroup> for FgAb2 {
    type Error = Error;

    fn try_from(raw: RawGroup) -> Result<Self> {
        FgAb2::new(raw.rank, raw.torsion)
    }
}

impl FgAb2 {
    /// Builds a group, sorting the torsion orders. Orders of 1 are dropped.
    pub fn new(rank: u32, mut torsion: Vec<u64>) -> Result<Self> {
        torsion.retain(|&t| t != 1);
        if let Some(bad) = torsion.iter().find(|t| !t.is_power_of_two()) {
            return Err(Error::InvalidGroup(format!("torsion order {bad} is not a power of 2")));
        }
        torsion.sort_unstable();
        Ok(FgAb2 { rank, torsion })
    }

    pub fn zero() -> Self {
        FgAb2::default()
    }

    pub fn free(rank: u32) -> Self {
        FgAb2 {
            rank,
            torsion: Vec::new(),
        }
    }

    /// The integers `Z`.
    pub fn z() -> Self {
        FgAb2::free(1)
    }

    /// `Z/order`. `order` must be a power of two; `Z/1` is the zero group.
    pub fn cyclic(order: u64) -> Self {
        assert!(order.is_power_of_two(), "cyclic order {order} is not a power of 2");
        if order == 1 {
            return FgAb2::zero();
        }
        FgAb2 {
            rank: 0,
            torsion: vec![order],
        }
    }

    /// `(Z/2)^count`.
    pub fn elementary(count: u32) -> Self {
        n_copies(count, &FgAb2::cyclic(2))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// `log2` of the order of the torsion subgroup.
    pub fn torsion_log2(&self) -> u32 {
        self.torsion.iter().map(|t| t.trailing_zeros()).sum()
    }

    pub fn direct_sum(&self, other: &FgAb2) -> FgAb2 {
        let mut torsion = Vec::with_capacity(self.torsion.len() + other.torsion.len());
        torsion.extend_from_slice(&self.torsion);
        torsion.extend_from_slice(&other.torsion);
        torsion.sort_unstable();
        FgAb2 {
            rank: self.rank + other.rank,
            torsion,
        }
    }

    /// The complement of `other` as a direct summand, if `other`'s summands
    /// all occur in `self`.
    pub fn remove_summand(&self, other: &FgAb2) -> Option<FgAb2> {
        let rank = self.rank.checked_sub(other.rank)?;
        let mut torsion = self.torsion.clone();
        for t in &other.torsion {
            let pos = torsion.iter().position(|x| x == t)?;
            torsion.remove(pos);
        }
        Some(FgAb2 { rank, torsion })
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            rank: self.rank,
            torsion: self.torsion.clone(),
        }
    }
}

/// Structured form of a group: `{"rank": r, "torsion": [t1, t2, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupJson {
    pub rank: u32,
    pub torsion: Vec<u64>,
}

impl Add for FgAb2 {
    type Output = FgAb2;

    fn add(self, rhs: FgAb2) -> FgAb2 {
        self.direct_sum(&rhs)
    }
}

impl<'a> Add<&'a FgAb2> for &'a FgAb2 {
    type Output = FgAb2;

    fn add(self, rhs: &'a FgAb2) -> FgAb2 {
        self.direct_sum(rhs)
    }
}

impl std::iter::Sum for FgAb2 {
    fn sum<I: Iterator<Item = FgAb2>>(iter: I) -> FgAb2 {
        iter.fold(FgAb2::zero(), |acc, g| acc + g)
    }
}

pub fn direct_sum(a: &FgAb2, b: &FgAb2) -> FgAb2 {
    a.direct_sum(b)
}

pub fn n_copies(k: u32, g: &FgAb2) -> FgAb2 {
    let mut torsion = Vec::with_capacity(g.torsion.len() * k as usize);
    for _ in 0..k {
        torsion.extend_from_slice(&g.torsion);
    }
    torsion.sort_unstable();
    FgAb2 {
        rank: g.rank * k,
        torsion,
    }
}

/// Necessary conditions for a short exact sequence `0 -> a -> b -> c -> 0`:
/// ranks add, `|tors a|` divides `|tors b|`, and `|tors b|` divides
/// `|tors a| * |tors c|`.
pub fn ses_consistent(a: &FgAb2, b: &FgAb2, c: &FgAb2) -> bool {
    let (ta, tb, tc) = (a.torsion_log2(), b.torsion_log2(), c.torsion_log2());
    b.rank == a.rank + c.rank && ta <= tb && tb <= ta + tc
}

/// Consecutive terms of an exact sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactWindow {
    pub groups: Vec<FgAb2>,
    /// The window is flanked by zero groups on both sides.
    pub bounded: bool,
}

impl ExactWindow {
    pub fn bounded(groups: Vec<FgAb2>) -> Self {
        ExactWindow { groups, bounded: true }
    }

    /// One full period of a periodic (unbounded) long exact sequence.
    pub fn period(groups: Vec<FgAb2>) -> Self {
        ExactWindow { groups, bounded: false }
    }

    /// Alternating rank sum, first term counted with `+`.
    pub fn euler_rank(&self) -> i64 {
        alternating(self.groups.iter().map(|g| i64::from(g.rank)))
    }

    /// Alternating sum of `log2 |torsion|`, first term counted with `+`.
    pub fn euler_order_log2(&self) -> i64 {
        alternating(self.groups.iter().map(|g| i64::from(g.torsion_log2())))
    }
}

fn alternating(values: impl Iterator<Item = i64>) -> i64 {
    values.enumerate().map(|(i, v)| if i % 2 == 0 { v } else { -v }).sum()
}

/// Necessary conditions for exactness of a window.
///
/// Bounded windows of finite groups must have alternating order product 1.
/// Bounded windows with free parts, and periodic windows, are only checked
/// for a vanishing alternating rank sum: without the maps the torsion of a
/// mixed window is not determined.
pub fn exact_window_check(w: &ExactWindow) -> Result<bool> {
    if w.groups.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if !w.bounded {
        return Ok(w.euler_rank() == 0);
    }
    if w.groups.iter().all(FgAb2::is_finite) {
        Ok(w.euler_order_log2() == 0)
    } else {
        Ok(w.euler_rank() == 0)
    }
}

pub fn format_group(g: &FgAb2) -> String {
    g.to_string()
}

pub fn group_to_json(g: &FgAb2) -> GroupJson {
    g.to_json()
}

impl fmt::Display for FgAb2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let t = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|&&x| x == t).count();
            if run == 1 {
                parts.push(format!("Z/{t}"));
            } else {
                parts.push(format!("(Z/{t})^{run}"));
            }
            i += run;
        }
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for FgAb2 {
    type Err = Error;

    /// Parses the text produced by `Display`, e.g. `Z^2 + (Z/2)^3 + Z/16`.
    /// Repeated summands such as `Z/2 + Z/2` are accepted too.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(FgAb2::zero());
        }
        let bad = || Error::InvalidGroup(format!("cannot parse group {s:?}"));
        let mut acc = FgAb2::zero();
        for term in s.split('+') {
            let term = term.trim();
            let (base, power) = match term.rsplit_once('^') {
                Some((b, p)) => (b.trim(), p.trim().parse::<u32>().map_err(|_| bad())?),
                None => (term, 1),
            };
            let base = base
                .strip_prefix('(')
                .and_then(|b| b.strip_suffix(')'))
                .unwrap_or(base)
                .trim();
            let summand = if base == "Z" {
                FgAb2::z()
            } else if let Some(order) = base.strip_prefix("Z/") {
                let order: u64 = order.trim().parse().map_err(|_| bad())?;
                FgAb2::new(0, vec![order])?
            } else if base == "0" {
                FgAb2::zero()
            } else {
                return Err(bad());
            };
            acc = acc + n_copies(power, &summand);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> FgAb2 {
        s.parse().unwrap()
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(direct_sum(&FgAb2::z(), &FgAb2::cyclic(2)), g("Z + Z/2"));
        let x = g("Z^3 + Z/8");
        assert_eq!(direct_sum(&FgAb2::zero(), &x), x);
        assert_eq!(
            direct_sum(&g("Z + Z/2"), &g("Z + Z/16")),
            FgAb2::new(2, vec![16, 2]).unwrap()
        );
    }

    #[test]
    fn n_copies_examples() {
        assert_eq!(n_copies(3, &FgAb2::cyclic(2)), FgAb2::new(0, vec![2, 2, 2]).unwrap());
        assert_eq!(n_copies(0, &FgAb2::z()), FgAb2::zero());
        assert_eq!(n_copies(2, &g("Z + Z/2")), FgAb2::new(2, vec![2, 2]).unwrap());
    }

    #[test]
    fn ses_examples() {
        assert!(ses_consistent(&g("Z^2"), &g("Z^2 + Z/2"), &g("(Z/2)^3")));
        let x = g("Z + Z/4");
        assert!(ses_consistent(&FgAb2::zero(), &x, &x));
        assert!(!ses_consistent(&FgAb2::cyclic(4), &FgAb2::cyclic(2), &FgAb2::zero()));
    }

    #[test]
    fn window_examples() {
        let z2 = FgAb2::cyclic(2);
        let w = ExactWindow::bounded(vec![FgAb2::zero(), z2.clone(), g("(Z/2)^2"), z2.clone(), FgAb2::zero()]);
        assert!(exact_window_check(&w).unwrap());

        let w = ExactWindow::bounded(vec![
            FgAb2::zero(),
            FgAb2::z(),
            FgAb2::free(2),
            FgAb2::z(),
            FgAb2::zero(),
        ]);
        assert!(exact_window_check(&w).unwrap());

        let w = ExactWindow::bounded(vec![FgAb2::zero(), z2.clone(), z2.clone(), z2, FgAb2::zero()]);
        assert!(!exact_window_check(&w).unwrap());
    }

    #[test]
    fn empty_window_is_an_error() {
        assert_eq!(
            exact_window_check(&ExactWindow::bounded(vec![])),
            Err(Error::EmptyWindow)
        );
    }

    #[test]
    fn formatting() {
        assert_eq!(format_group(&g("Z^2 + Z/2")), "Z^2 + Z/2");
        assert_eq!(format_group(&FgAb2::zero()), "0");
        assert_eq!(format_group(&FgAb2::new(0, vec![2, 2, 16]).unwrap()), "(Z/2)^2 + Z/16");
        assert_eq!(format_group(&FgAb2::z()), "Z");
        let j = group_to_json(&FgAb2::cyclic(16));
        assert_eq!(j.rank, 0);
        assert_eq!(j.torsion, vec![16]);
    }

    #[test]
    fn json_shape_and_validation() {
        let json = serde_json::to_string(&g("Z^2 + Z/16 + Z/2")).unwrap();
        assert_eq!(json, r#"{"rank":2,"torsion":[2,16]}"#);
        let back: FgAb2 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g("Z^2 + Z/2 + Z/16"));
        assert!(serde_json::from_str::<FgAb2>(r#"{"rank":0,"torsion":[6]}"#).is_err());
    }

    #[test]
    fn rejects_odd_torsion() {
        assert!(FgAb2::new(0, vec![3]).is_err());
        assert!("Z/12".parse::<FgAb2>().is_err());
        assert!("Q".parse::<FgAb2>().is_err());
    }

    #[test]
    fn remove_summand() {
        assert_eq!(g("Z^2 + Z/2 + Z/8").remove_summand(&g("Z + Z/2")), Some(g("Z + Z/8")));
        assert_eq!(g("Z/2").remove_summand(&g("Z/4")), None);
        assert_eq!(g("Z/2").remove_summand(&g("Z")), None);
    }

    fn arb_group() -> impl Strategy<Value = FgAb2> {
        (0u32..5, prop::collection::vec(1u32..8, 0..6))
            .prop_map(|(rank, exps)| FgAb2::new(rank, exps.into_iter().map(|e| 1u64 << e).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn sum_is_associative_and_commutative(a in arb_group(), b in arb_group(), c in arb_group()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!(&a + &FgAb2::zero(), a.clone());
        }

        #[test]
        fn split_sequences_pass(a in arb_group(), c in arb_group()) {
            prop_assert!(ses_consistent(&a, &(&a + &c), &c));
        }

        #[test]
        fn identity_windows(gr in arb_group()) {
            let id = ExactWindow::bounded(vec![FgAb2::zero(), gr.clone(), gr.clone(), FgAb2::zero()]);
            prop_assert!(exact_window_check(&id).unwrap());
            let single = ExactWindow::bounded(vec![FgAb2::zero(), gr.clone(), FgAb2::zero()]);
            prop_assert_eq!(exact_window_check(&single).unwrap(), gr.is_zero());
        }

        #[test]
        fn display_parse_roundtrip(gr in arb_group()) {
            prop_assert_eq!(gr.to_string().parse::<FgAb2>().unwrap(), gr);
        }
    }
}
