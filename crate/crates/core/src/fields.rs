//! Totally real number fields: descriptions, invariants, the 2-regularity
//! decision, and the choice of the residue-field prime `q`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::forms::Splitting;
use crate::numtheory::quadratic::{QuadInt, SignSpan};
use crate::numtheory::{
    class_numbers, euler_phi, fundamental_unit, is_prime, is_primitive_root, is_sophie_germain_type, is_squarefree,
    odd_prime_power, unit_signature_span, DyadicOrder,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Rationals,
    RealQuadratic {
        d: u64,
    },
    /// Maximal real subfield of `Q(zeta_{2^b})`.
    MaxRealCyclo2 {
        b: u32,
    },
    /// Maximal real subfield of `Q(zeta_m)`, `m` an odd prime power.
    MaxRealCycloOdd {
        m: u64,
    },
    /// A field known only through its invariants.
    Generic {
        r: u32,
        a: u32,
        c: u32,
        claim: GenericClaim,
    },
}

/// What the caller asserts about a generic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericClaim {
    #[default]
    None,
    Regular(bool),
    /// Dyadic prime count, `Pic(R_F)` odd, units of independent signs.
    Invariants {
        dyadic_count: u32,
        pic_odd: bool,
        units_indep_signs: bool,
    },
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::RealQuadratic { d } => {
                if d < 2 || !is_squarefree(d)? {
                    return Err(Error::InvalidSpec(format!(
                        "Q(sqrt {d}): d must be squarefree and >= 2"
                    )));
                }
                Ok(())
            }
            FieldSpec::MaxRealCyclo2 { b } => {
                if !(2..=32).contains(&b) {
                    return Err(Error::InvalidSpec(format!("Q(zeta 2^{b})+: need 2 <= b <= 32")));
                }
                Ok(())
            }
            FieldSpec::MaxRealCycloOdd { m } => {
                if odd_prime_power(m).is_none() {
                    return Err(Error::InvalidSpec(format!(
                        "Q(zeta {m})+: m must be an odd prime power"
                    )));
                }
                Ok(())
            }
            FieldSpec::Generic { r, a, .. } => {
                if r == 0 || !(2..=62).contains(&a) {
                    return Err(Error::InvalidSpec(format!(
                        "generic field needs r >= 1 and 2 <= a <= 62 (got r={r}, a={a})"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, FieldSpec::Generic { .. })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FieldSpec::Rationals => f.write_str("Q"),
            FieldSpec::RealQuadratic { d } => write!(f, "Q(sqrt {d})"),
            FieldSpec::MaxRealCyclo2 { b } => write!(f, "Q(zeta 2^{b})+"),
            FieldSpec::MaxRealCycloOdd { m } => write!(f, "Q(zeta {m})+"),
            FieldSpec::Generic { r, a, c, claim } => {
                write!(f, "generic r={r} a={a}")?;
                if c != 0 {
                    write!(f, " c={c}")?;
                }
                match claim {
                    GenericClaim::None => Ok(()),
                    GenericClaim::Regular(true) => f.write_str(" regular"),
                    GenericClaim::Regular(false) => f.write_str(" irregular"),
                    GenericClaim::Invariants {
                        dyadic_count,
                        pic_odd,
                        units_indep_signs,
                    } => write!(
                        f,
                        " dyadic={dyadic_count} pic={} signs={}",
                        if pic_odd { "odd" } else { "even" },
                        if units_indep_signs { "full" } else { "partial" }
                    ),
                }
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("cannot parse field {s:?}"));
        let trimmed = s.trim();
        if let Some(rest) = trimmed.strip_prefix("generic") {
            return parse_generic(rest)
                .ok_or_else(bad)
                .and_then(|f| f.validate().map(|_| f));
        }
        let compact: String = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
        let spec = if compact == "Q" {
            FieldSpec::Rationals
        } else if let Some(inner) = compact.strip_prefix("Q(sqrt").and_then(|t| t.strip_suffix(')')) {
            FieldSpec::RealQuadratic { d: num(inner)? }
        } else if let Some(inner) = compact.strip_prefix("Q(zeta").and_then(|t| t.strip_suffix(")+")) {
            match inner.strip_prefix("2^") {
                Some(b) => FieldSpec::MaxRealCyclo2 {
                    b: u32::try_from(num(b)?).map_err(|_| bad())?,
                },
                None => FieldSpec::MaxRealCycloOdd { m: num(inner)? },
            }
        } else {
            return Err(bad());
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_generic(rest: &str) -> Option<FieldSpec> {
    let (mut r, mut a, mut c) = (None, None, 0u32);
    let mut claim = GenericClaim::None;
    let (mut dyadic, mut pic, mut signs) = (None, None, None);
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("r", v)) => r = Some(v.parse().ok()?),
            Some(("a", v)) => a = Some(v.parse().ok()?),
            Some(("c", v)) => c = v.parse().ok()?,
            Some(("dyadic", v)) => dyadic = Some(v.parse().ok()?),
            Some(("pic", "odd")) => pic = Some(true),
            Some(("pic", "even")) => pic = Some(false),
            Some(("signs", "full")) => signs = Some(true),
            Some(("signs", "partial")) => signs = Some(false),
            None if tok == "regular" => claim = GenericClaim::Regular(true),
            None if tok == "irregular" => claim = GenericClaim::Regular(false),
            _ => return None,
        }
    }
    match (dyadic, pic, signs) {
        (None, None, None) => {}
        (Some(dyadic_count), Some(pic_odd), Some(units_indep_signs)) => {
            if claim != GenericClaim::None {
                return None;
            }
            claim = GenericClaim::Invariants {
                dyadic_count,
                pic_odd,
                units_indep_signs,
            };
        }
        _ => return None,
    }
    Some(FieldSpec::Generic { r: r?, a: a?, c, claim })
}

pub fn real_embeddings(spec: &FieldSpec) -> Result<u32> {
    spec.validate()?;
    Ok(match *spec {
        FieldSpec::Rationals => 1,
        FieldSpec::RealQuadratic { .. } => 2,
        FieldSpec::MaxRealCyclo2 { b } => 1 << (b - 2),
        FieldSpec::MaxRealCycloOdd { m } => (euler_phi(m)? / 2) as u32,
        FieldSpec::Generic { r, .. } => r,
    })
}

pub fn complex_pairs(spec: &FieldSpec) -> u32 {
    match *spec {
        FieldSpec::Generic { c, .. } => c,
        _ => 0,
    }
}

/// `a_F`: `log2` of the number of 2-power roots of unity in `F(sqrt -1)`.
pub fn a_param(spec: &FieldSpec) -> Result<u32> {
    spec.validate()?;
    Ok(match *spec {
        FieldSpec::Rationals | FieldSpec::MaxRealCycloOdd { .. } => 2,
        FieldSpec::RealQuadratic { d } => {
            if d == 2 {
                3
            } else {
                2
            }
        }
        FieldSpec::MaxRealCyclo2 { b } => b,
        FieldSpec::Generic { a, .. } => a,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub regular: bool,
    pub reason: String,
}

impl Verdict {
    fn yes(reason: impl Into<String>) -> Self {
        Verdict {
            regular: true,
            reason: reason.into(),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Verdict {
            regular: false,
            reason: reason.into(),
        }
    }
}

/// The fast criteria: exact for quadratic fields, sufficient-only for odd
/// cyclotomic ones (anything outside the known list is reported as not
/// certified), and the caller's word for generic fields.
pub fn is_two_regular(spec: &FieldSpec) -> Result<Verdict> {
    spec.validate()?;
    Ok(match *spec {
        FieldSpec::Rationals => Verdict::yes("rational field"),
        FieldSpec::MaxRealCyclo2 { .. } => Verdict::yes("maximal real subfield of a 2-power cyclotomic field"),
        FieldSpec::RealQuadratic { d } => quadratic_criterion(d),
        FieldSpec::MaxRealCycloOdd { m } => {
            if !is_primitive_root(2, m)? {
                return Err(Error::NotPrimitiveRoot(m));
            }
            let phi = euler_phi(m)?;
            if m == 29 {
                Verdict::no("m = 29 is excluded from the phi(m) <= 66 list")
            } else if phi <= 66 {
                Verdict::yes(format!("phi({m}) = {phi} <= 66"))
            } else if is_sophie_germain_type(m) && m % 8 != 7 {
                Verdict::yes(format!("{m} and {} are prime, {m} != 7 (mod 8)", (m - 1) / 2))
            } else {
                Verdict::no("outside the certified list (phi(m) <= 66 or Sophie Germain type)")
            }
        }
        FieldSpec::Generic { c, claim, .. } => {
            if c > 0 {
                return Ok(Verdict::no("not totally real (c > 0)"));
            }
            match claim {
                GenericClaim::None => Verdict::no("no regularity claim supplied"),
                GenericClaim::Regular(true) => Verdict::yes("caller-supplied claim"),
                GenericClaim::Regular(false) => Verdict::no("caller-supplied claim"),
                GenericClaim::Invariants {
                    dyadic_count,
                    pic_odd,
                    units_indep_signs,
                } => match first_failure(dyadic_count, pic_odd, units_indep_signs) {
                    None => Verdict::yes("caller-supplied invariants"),
                    Some(why) => Verdict::no(why),
                },
            }
        }
    })
}

fn quadratic_criterion(d: u64) -> Verdict {
    let good_prime = |p: u64| is_prime(p) && (p % 8 == 3 || p % 8 == 5);
    if d == 2 {
        Verdict::yes("d = 2")
    } else if good_prime(d) {
        Verdict::yes(format!("d = {d} is a prime = +-3 (mod 8)"))
    } else if d.is_multiple_of(2) && good_prime(d / 2) {
        Verdict::yes(format!("d = 2 * {} with {} a prime = +-3 (mod 8)", d / 2, d / 2))
    } else {
        Verdict::no(format!("{d} is not 2, p or 2p with p a prime = +-3 (mod 8)"))
    }
}

pub const REASON_DYADIC: &str = "2 has more than one dyadic prime";
pub const REASON_PIC: &str = "Pic(R_F) has even order";
pub const REASON_SIGNS: &str = "R_F has no units of independent signs";

fn first_failure(dyadic_count: u32, pic_odd: bool, signs: bool) -> Option<&'static str> {
    if dyadic_count != 1 {
        Some(REASON_DYADIC)
    } else if !pic_odd {
        Some(REASON_PIC)
    } else if !signs {
        Some(REASON_SIGNS)
    } else {
        None
    }
}

/// The Bokstedt squares are cartesian exactly for 2-regular fields.
pub fn bokstedt_cartesian(spec: &FieldSpec) -> Result<bool> {
    is_two_regular(spec).map(|v| v.regular)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldInvariants {
    pub r: u32,
    pub c: u32,
    pub a_f: u32,
    pub dyadic_count: Option<u32>,
    pub pic_odd: Option<bool>,
    pub units_indep_signs: Option<bool>,
    pub narrow_pic_odd: Option<bool>,
    pub two_regular: bool,
    pub reasons: Vec<String>,
}

impl FieldInvariants {
    /// Whether the stored parts agree with the verdict.
    pub fn is_coherent(&self) -> bool {
        if !self.two_regular {
            return true;
        }
        self.dyadic_count.is_none_or(|n| n == 1)
            && self.pic_odd != Some(false)
            && self.units_indep_signs != Some(false)
            && self.narrow_pic_odd != Some(false)
    }
}

/// Number of primes of `Q(sqrt d)` above 2, by factoring the minimal
/// polynomial `x^2 + c1 x + c0` of a generator of `O_F` over `F_2`.
pub fn dyadic_prime_count(d: u64) -> u32 {
    let (c1, c0) = if d % 4 == 1 { (1, ((d - 1) / 4) % 2) } else { (0, d % 2) };
    let roots: Vec<u64> = (0..2).filter(|x| (x * x + c1 * x + c0) % 2 == 0).collect();
    match (roots.len(), c1) {
        // Two distinct linear factors.
        (2, 1) => 2,
        // A square (x + c0)^2, or irreducible.
        _ => 1,
    }
}

/// Decides 2-regularity of `Q(sqrt d)` from first principles: the number of
/// dyadic primes, the parity of `Pic(R_F)`, and the signs of the
/// generators of `R_F^x`. Also computes the narrow Picard parity as an
/// independent second route.
pub fn two_regular_oracle(d: u64) -> Result<FieldInvariants> {
    FieldSpec::RealQuadratic { d }.validate()?;
    let cd = class_numbers(d)?;
    let dyadic_count = dyadic_prime_count(d);
    debug_assert_eq!(dyadic_count, cd.splitting.prime_count());
    let eps = fundamental_unit(d)?;

    let (order, generators) = match &cd.dyadic_class_order {
        DyadicOrder::Known { order, generator } => {
            let mut gens = vec![generator.clone()];
            if cd.splitting == Splitting::Split {
                gens.push(generator.conjugate());
            }
            (Some(*order), gens)
        }
        DyadicOrder::Unknown { .. } => (None, Vec::new()),
    };

    // Pic(R_F) = Cl(O_F) / <dyadic classes>; 2 = p p' makes the two
    // dyadic classes inverse to each other.
    let pic_odd = match order {
        Some(k) => Some((cd.h / k) % 2 == 1),
        None if cd.h % 2 == 1 => Some(true),
        None => None,
    };
    let span = unit_signature_span(d, &generators)?;
    let units_indep_signs = if span.is_full() {
        Some(true)
    } else if order.is_some() {
        Some(false)
    } else {
        None
    };
    let narrow_pic_odd = match &cd.dyadic_class_order {
        DyadicOrder::Known { order, generator } => {
            let units = SignSpan::generated_by([QuadInt::integer(-1, d).sign_vector(), eps.value.sign_vector()]);
            let narrow_order = if units.contains(generator.sign_vector()) {
                *order
            } else {
                2 * order
            };
            Some((cd.h_narrow / narrow_order) % 2 == 1)
        }
        DyadicOrder::Unknown { .. } => None,
    };

    let mut reasons = Vec::new();
    if dyadic_count != 1 {
        reasons.push(REASON_DYADIC.to_string());
    }
    if pic_odd == Some(false) {
        reasons.push(REASON_PIC.to_string());
    }
    if units_indep_signs == Some(false) {
        reasons.push(REASON_SIGNS.to_string());
    }
    let two_regular = match (dyadic_count, pic_odd, units_indep_signs) {
        (1, Some(true), Some(true)) => true,
        _ if !reasons.is_empty() => false,
        _ => {
            return Err(Error::Undecided(format!(
                "dyadic class order of Q(sqrt {d}) not found below the search cap"
            )))
        }
    };
    if two_regular {
        reasons.push("unique dyadic prime, Pic(R_F) odd, units of independent signs".into());
    }
    Ok(FieldInvariants {
        r: 2,
        c: 0,
        a_f: a_param(&FieldSpec::RealQuadratic { d })?,
        dyadic_count: Some(dyadic_count),
        pic_odd,
        units_indep_signs,
        narrow_pic_odd,
        two_regular,
        reasons,
    })
}

/// Invariants of any spec, running the oracle where one exists.
pub fn invariants(spec: &FieldSpec) -> Result<FieldInvariants> {
    if let FieldSpec::RealQuadratic { d } = *spec {
        return two_regular_oracle(d);
    }
    let verdict = is_two_regular(spec)?;
    let known = verdict.regular.then_some(true);
    let dyadic_count = match *spec {
        FieldSpec::Generic {
            claim: GenericClaim::Invariants { dyadic_count, .. },
            ..
        } => Some(dyadic_count),
        // 2 is totally ramified in Q(zeta_{2^b}), and inert in Q(zeta_m)
        // when it is a primitive root mod m.
        FieldSpec::Generic { .. } => known.map(|_| 1),
        _ => Some(1),
    };
    let (pic_odd, units_indep_signs) = match *spec {
        FieldSpec::Generic {
            claim:
                GenericClaim::Invariants {
                    pic_odd,
                    units_indep_signs,
                    ..
                },
            ..
        } => (Some(pic_odd), Some(units_indep_signs)),
        _ => (known, known),
    };
    Ok(FieldInvariants {
        r: real_embeddings(spec)?,
        c: complex_pairs(spec),
        a_f: a_param(spec)?,
        dyadic_count,
        pic_odd,
        units_indep_signs,
        narrow_pic_odd: known,
        two_regular: verdict.regular,
        reasons: vec![verdict.reason],
    })
}

/// `q` prime, `q = +-1 (mod 2^a)`, `q != +-1 (mod 2^(a+1))`.
pub fn is_admissible_for_a(q: u64, a: u32) -> bool {
    if q < 3 || !is_prime(q) || a >= 63 {
        return false;
    }
    let m = 1u64 << a;
    let m2 = m << 1;
    let pm1 = |x: u64, n: u64| x % n == 1 || x % n == n - 1;
    pm1(q, m) && !pm1(q, m2)
}

/// Congruence-admissibility of `q` for `spec`. The Galois generation
/// condition behind it is not modelled.
pub fn is_admissible_q(q: u64, spec: &FieldSpec) -> Result<bool> {
    Ok(is_admissible_for_a(q, a_param(spec)?))
}

pub fn find_q_for_a(a: u32) -> Result<u64> {
    if !(2..=40).contains(&a) {
        return Err(Error::InvalidArgument(format!("a = {a} outside 2..=40")));
    }
    let m = 1u64 << a;
    // Candidates are m - 1 and m + 1 modulo 2m, i.e. +-1 mod m but not mod 2m.
    let mut base = 0u64;
    loop {
        for q in [base + m - 1, base + m + 1] {
            if is_admissible_for_a(q, a) {
                return Ok(q);
            }
        }
        base += 2 * m;
    }
}

/// Smallest congruence-admissible prime for `spec`.
pub fn find_q(spec: &FieldSpec) -> Result<u64> {
    find_q_for_a(a_param(spec)?)
}

/// The two numbers the tables depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldParams {
    pub r: u32,
    pub a: u32,
}

impl FieldParams {
    pub fn new(r: u32, a: u32) -> Result<Self> {
        if r == 0 || !(2..=62).contains(&a) {
            return Err(Error::InvalidArgument(format!(
                "need r >= 1, 2 <= a <= 62 (got r={r}, a={a})"
            )));
        }
        Ok(FieldParams { r, a })
    }

    /// Parameters of a 2-regular field; anything else is refused.
    pub fn for_spec(spec: &FieldSpec) -> Result<Self> {
        let verdict = is_two_regular(spec)?;
        if !verdict.regular {
            return Err(Error::NotTwoRegular {
                field: spec.to_string(),
                reason: verdict.reason,
            });
        }
        FieldParams::new(real_embeddings(spec)?, a_param(spec)?)
    }
}
