//! Cross-checks between the tables.
//!
//! Only isomorphism classes are compared. The connecting maps of the
//! long exact sequences are not modelled, so those checks are necessary
//! conditions (rank sums, order telescoping, short exact sequences).

use serde::Serialize;

use crate::abgroup::{exact_window_check, n_copies, ses_consistent, ExactWindow, FgAb2};
use crate::error::{Error, Result};
use crate::fields::{find_q_for_a, is_admissible_for_a, FieldParams, FieldSpec};
use crate::tables::{k_fq, ko, kq_top, ku, t, w, Base, Eps, TableSet, STANDARD};

pub const REPORT_HEADER: &str =
    "These checks compare group isomorphism classes only; passing certifies consistency, not correctness.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub n: i64,
    pub parameters: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    fn pass(name: impl Into<String>, details: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            details: details.into(),
            counterexample: None,
        }
    }

    fn fail(name: impl Into<String>, details: impl Into<String>, cx: Counterexample) -> Self {
        CheckReport {
            name: name.into(),
            passed: false,
            details: details.into(),
            counterexample: Some(cx),
        }
    }
}

/// Everything a check needs from the field: `r`, `a_F` and the prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Setting {
    pub params: FieldParams,
    pub q: u64,
}

impl Setting {
    pub fn new(params: FieldParams, q: u64) -> Result<Self> {
        if !is_admissible_for_a(q, params.a) {
            return Err(Error::InadmissibleQ {
                q,
                field: format!("a_F = {}", params.a),
            });
        }
        Ok(Setting { params, q })
    }

    pub fn for_spec(spec: &FieldSpec, q: u64) -> Result<Self> {
        let params = FieldParams::for_spec(spec)?;
        Setting::new(params, q).map_err(|e| match e {
            Error::InadmissibleQ { q, .. } => Error::InadmissibleQ {
                q,
                field: spec.to_string(),
            },
            e => e,
        })
    }

    fn describe(&self) -> String {
        format!("r={}, a_F={}, q={}", self.params.r, self.params.a, self.q)
    }
}

fn check_n_max(n_max: i64) -> Result<()> {
    if n_max < 8 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 8, got {n_max}")));
    }
    Ok(())
}

/// Compares two group-valued functions over `n_lo..=n_hi`.
fn compare(
    name: &str,
    s: &Setting,
    n_lo: i64,
    n_hi: i64,
    lhs: impl Fn(i64) -> Result<FgAb2>,
    rhs: impl Fn(i64) -> Result<FgAb2>,
) -> Result<CheckReport> {
    for n in n_lo..=n_hi {
        let (expected, actual) = (lhs(n)?, rhs(n)?);
        if expected != actual {
            let cx = Counterexample {
                n,
                parameters: s.describe(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            };
            return Ok(CheckReport::fail(name, format!("mismatch at n = {n}"), cx));
        }
    }
    Ok(CheckReport::pass(
        name,
        format!("equal for {n_lo} <= n <= {n_hi} ({})", s.describe()),
    ))
}

pub fn check_splittings(spec: &FieldSpec, q: u64, n_max: i64) -> Result<Vec<CheckReport>> {
    splittings_with(&STANDARD, &Setting::for_spec(spec, q)?, n_max)
}

pub fn splittings_with(tables: &TableSet, s: &Setting, n_max: i64) -> Result<Vec<CheckReport>> {
    check_n_max(n_max)?;
    let p = s.params;
    let extra = p.r - 1;
    let mut out = vec![
        compare(
            "splitting (a) KQ+ = KQbar+ + (r-1)KO",
            s,
            0,
            n_max,
            |n| tables.kq_rf(n, Eps::Plus, p),
            |n| Ok(tables.kq_bar(n, Eps::Plus, s.q)? + n_copies(extra, &ko(n)?)),
        )?,
        compare(
            "splitting (b) KQ- = KQbar- + (r-1)KO[6]",
            s,
            0,
            n_max,
            |n| tables.kq_rf(n, Eps::Minus, p),
            |n| Ok(tables.kq_bar(n, Eps::Minus, s.q)? + n_copies(extra, &ko(n + 6)?)),
        )?,
        compare(
            "splitting (c) V+ = Vbar+ + 2(r-1)KO",
            s,
            0,
            n_max,
            |n| tables.v_rf(n, Eps::Plus, p),
            |n| Ok(tables.v_bar(n, Eps::Plus)? + n_copies(2 * extra, &ko(n)?)),
        )?,
        compare(
            "splitting (d) V- = Vbar- + (r-1)KU",
            s,
            0,
            n_max,
            |n| tables.v_rf(n, Eps::Minus, p),
            |n| Ok(tables.v_bar(n, Eps::Minus)? + n_copies(extra, &ku(n)?)),
        )?,
        compare(
            "splitting (e) K = Kbar + (r-1)KO[-1]",
            s,
            1,
            n_max,
            |n| tables.k_rf(n, p),
            |n| Ok(tables.k_bar(n, p.a)? + n_copies(extra, &ko(n - 1)?)),
        )?,
    ];
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Alternating rank sum of a periodic long exact sequence
/// `... -> A_n -> B_n -> C_n -> A_{n-1} -> ...` over `n_lo..n_lo+8`.
fn rank_euler(name: &str, s: &Setting, n_lo: i64, terms: impl Fn(i64) -> Result<[FgAb2; 3]>) -> Result<CheckReport> {
    let mut groups = Vec::with_capacity(24);
    for n in (n_lo..n_lo + 8).rev() {
        groups.extend(terms(n)?);
    }
    let window = ExactWindow::period(groups);
    let sum = window.euler_rank();
    let name = format!("{name}, n in {n_lo}..{}", n_lo + 7);
    if exact_window_check(&window)? {
        Ok(CheckReport::pass(name, "alternating rank sum is 0"))
    } else {
        let cx = Counterexample {
            n: n_lo,
            parameters: s.describe(),
            expected: "0".into(),
            actual: sum.to_string(),
        };
        Ok(CheckReport::fail(name, "alternating rank sum is nonzero", cx))
    }
}

fn ses_report(name: &str, s: &Setting, n: i64, a: FgAb2, b: FgAb2, c: FgAb2) -> Option<CheckReport> {
    if ses_consistent(&a, &b, &c) {
        return None;
    }
    let cx = Counterexample {
        n,
        parameters: s.describe(),
        expected: "0 -> A -> B -> C -> 0 possible".into(),
        actual: format!("A = {a}, B = {b}, C = {c}"),
    };
    Some(CheckReport::fail(
        name,
        format!("short exact sequence impossible at n = {n}"),
        cx,
    ))
}

pub fn check_les(spec: &FieldSpec, q: u64) -> Result<Vec<CheckReport>> {
    les_with(&STANDARD, &Setting::for_spec(spec, q)?, 16)
}

pub fn les_with(tables: &TableSet, s: &Setting, n_max: i64) -> Result<Vec<CheckReport>> {
    check_n_max(n_max)?;
    let p = s.params;
    let r = p.r;
    let q = s.q;
    let mut out = Vec::new();
    // Start at 0 to see the delta terms, then at 8 for the stable range.
    for n_lo in [0, 8] {
        for eps in Eps::BOTH {
            out.push(rank_euler(&format!("MV rank sum KQ eps={eps}"), s, n_lo, |n| {
                Ok([
                    tables.kq_rf(n, eps, p)?,
                    tables.kq_fq(n, eps, q)? + n_copies(r, &kq_top(n, eps, Base::Real)?),
                    n_copies(r, &kq_top(n, eps, Base::Complex)?),
                ])
            })?);
            out.push(rank_euler(&format!("V -> KQ -> K rank sum eps={eps}"), s, n_lo, |n| {
                Ok([tables.v_rf(n, eps, p)?, tables.kq_rf(n, eps, p)?, tables.k_rf(n, p)?])
            })?);
        }
        out.push(rank_euler("MV rank sum K", s, n_lo, |n| {
            Ok([
                tables.k_rf(n, p)?,
                k_fq(n, q)? + n_copies(r, &ko(n)?),
                n_copies(r, &ku(n)?),
            ])
        })?);
        out.push(rank_euler("vertical rank sum KQbar-", s, n_lo, |n| {
            Ok([
                ko(n + 6)?,
                tables.kq_bar(n, Eps::Minus, q)?,
                tables.kq_fq(n, Eps::Minus, q)?,
            ])
        })?);
    }
    // The horizontal sequence is one of periodic spectra; the delta term at
    // n = 0 belongs to the connective cover, so only the stable range is used.
    out.push(rank_euler("horizontal rank sum KQbar-", s, 8, |n| {
        Ok([ko(n + 5)?, tables.kq_bar(n, Eps::Minus, q)?, ku(n + 4)?])
    })?);

    for k in 0..=(n_max - 7) / 8 {
        let n = 8 * k + 3;
        let chase = ExactWindow::bounded(vec![
            tables.kq_bar(n + 2, Eps::Minus, q)?,
            tables.kq_fq(n + 2, Eps::Minus, q)?,
            ko(n + 7)?,
            tables.kq_bar(n + 1, Eps::Minus, q)?,
            tables.kq_fq(n + 1, Eps::Minus, q)?,
            ko(n + 6)?,
            tables.kq_bar(n, Eps::Minus, q)?,
            tables.kq_fq(n, Eps::Minus, q)?,
        ]);
        let name = format!("finite window KQbar- n = {n}");
        out.push(window_report(&name, s, n, &chase)?);
        let n = 8 * k + 7;
        let iso = ExactWindow::bounded(vec![tables.kq_bar(n, Eps::Minus, q)?, tables.kq_fq(n, Eps::Minus, q)?]);
        out.push(window_report(&format!("finite window KQbar- n = {n}"), s, n, &iso)?);
    }

    let ses_family = |name: &str, f: &dyn Fn(i64) -> Result<[FgAb2; 3]>| -> Result<CheckReport> {
        for n in 0..=n_max {
            let [a, b, c] = f(n)?;
            if let Some(bad) = ses_report(name, s, n, a, b, c) {
                return Ok(bad);
            }
        }
        Ok(CheckReport::pass(name, format!("consistent for 0 <= n <= {n_max}")))
    };
    out.push(ses_family("SES KQbar+ -> KO + KO + KQFq+ -> KO", &|n| {
        Ok([
            tables.kq_bar(n, Eps::Plus, q)?,
            ko(n)? + ko(n)? + tables.kq_fq(n, Eps::Plus, q)?,
            ko(n)?,
        ])
    })?);
    out.push(ses_family("SES KO[4] -> Vbar- -> KO[2]", &|n| {
        Ok([ko(n + 4)?, tables.v_bar(n, Eps::Minus)?, ko(n + 2)?])
    })?);

    let k1 = [FgAb2::free(r), tables.k_rf(1, p)?, FgAb2::elementary(r) + k_fq(1, q)?];
    let cowitt = FgAb2::free(r) + FgAb2::cyclic(2);
    let rows = [
        ("SES K_1 units", k1),
        (
            "SES coWitt top row",
            [FgAb2::free(r), cowitt.clone(), FgAb2::elementary(r + 1)],
        ),
        (
            "SES coWitt bottom row",
            [FgAb2::free(r), cowitt, FgAb2::elementary(r) + FgAb2::cyclic(2)],
        ),
    ];
    for (name, [a, b, c]) in rows {
        out.push(ses_report(name, s, 1, a, b, c).unwrap_or_else(|| CheckReport::pass(name, "consistent")));
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

fn window_report(name: &str, s: &Setting, n: i64, w: &ExactWindow) -> Result<CheckReport> {
    if exact_window_check(w)? {
        return Ok(CheckReport::pass(name, "alternating order product is 1"));
    }
    let shown: Vec<String> = w.groups.iter().map(ToString::to_string).collect();
    let cx = Counterexample {
        n,
        parameters: s.describe(),
        expected: "0".into(),
        actual: format!("log2 order sum {} over [{}]", w.euler_order_log2(), shown.join(", ")),
    };
    Ok(CheckReport::fail(name, "orders do not telescope", cx))
}

pub fn check_t_w(a_range: std::ops::RangeInclusive<u32>, n_max: i64) -> Result<CheckReport> {
    let name = "t_n = w_{(n+1)/2}";
    for a in a_range.clone() {
        let q = find_q_for_a(a)?;
        for n in (3..=n_max).step_by(4) {
            let (tn, wm) = (t(n, q)?, w(((n + 1) / 2) as u64, a)?);
            if tn != wm {
                let cx = Counterexample {
                    n,
                    parameters: format!("a={a}, q={q}"),
                    expected: wm.to_string(),
                    actual: tn.to_string(),
                };
                return Ok(CheckReport::fail(name, format!("t_{n} differs from w at a = {a}"), cx));
            }
        }
    }
    Ok(CheckReport::pass(
        name,
        format!(
            "a in {}..={}, n = 3 (mod 4) up to {n_max}",
            a_range.start(),
            a_range.end()
        ),
    ))
}

pub fn run_all(spec: &FieldSpec, q: u64, n_max: i64) -> Result<Vec<CheckReport>> {
    run_all_with(&STANDARD, &Setting::for_spec(spec, q)?, n_max)
}

pub fn run_all_with(tables: &TableSet, s: &Setting, n_max: i64) -> Result<Vec<CheckReport>> {
    check_n_max(n_max)?;
    let p = s.params;
    let q = s.q;
    let mut out = splittings_with(tables, s, n_max)?;
    out.extend(les_with(tables, s, n_max)?);
    out.push(compare(
        "KQbar+ = KQFq+ + KO",
        s,
        0,
        n_max,
        |n| tables.kq_bar(n, Eps::Plus, q),
        |n| Ok(tables.kq_fq(n, Eps::Plus, q)? + ko(n)?),
    )?);
    out.push(compare(
        "V+ = 2r KO",
        s,
        0,
        n_max,
        |n| tables.v_rf(n, Eps::Plus, p),
        |n| Ok(n_copies(2 * p.r, &ko(n)?)),
    )?);
    out.push(compare(
        "V+ has period 8",
        s,
        0,
        n_max,
        |n| tables.v_rf(n, Eps::Plus, p),
        |n| tables.v_rf(n + 8, Eps::Plus, p),
    )?);
    out.push(compare(
        "Kbar at n = 7 (mod 8) is K(F_q)",
        s,
        0,
        n_max / 8,
        |k| tables.k_bar(8 * k + 7, p.a),
        |k| k_fq(8 * k + 7, q),
    )?);
    out.push(compare(
        "Vbar- at n = 0 (mod 8) is Kbar at n + 1",
        s,
        0,
        n_max / 8,
        |k| tables.v_bar(8 * k, Eps::Minus),
        |k| tables.k_bar(8 * k + 1, p.a),
    )?);
    for eps in Eps::BOTH {
        let low = tables.low_dim(eps, p)?;
        out.push(compare(
            &format!("low degrees match KQ table eps={eps}"),
            s,
            0,
            1,
            |n| Ok(low[&n].clone()),
            |n| tables.kq_rf(n, eps, p),
        )?);
    }
    let a_hi = p.a.clamp(5, 40);
    out.push(check_t_w(2..=a_hi, n_max.max(8))?);
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::find_q;
    use crate::tables::{Column, Mutation};

    fn setting(r: u32, a: u32) -> Setting {
        Setting::new(FieldParams::new(r, a).unwrap(), find_q_for_a(a).unwrap()).unwrap()
    }

    #[test]
    fn rationals_pass_everything() {
        let reports = run_all(&FieldSpec::Rationals, 3, 64).unwrap();
        let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        let mut names: Vec<_> = reports.iter().map(|r| r.name.clone()).collect();
        names.sort();
        assert_eq!(names, reports.iter().map(|r| r.name.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn quadratic_two_passes() {
        let spec = FieldSpec::RealQuadratic { d: 2 };
        assert_eq!(find_q(&spec).unwrap(), 7);
        assert!(all_passed(&run_all(&spec, 7, 64).unwrap()));
    }

    #[test]
    fn irregular_and_inadmissible() {
        let bad = FieldSpec::RealQuadratic { d: 34 };
        assert!(matches!(run_all(&bad, 3, 64), Err(Error::NotTwoRegular { .. })));
        assert!(matches!(
            run_all(&FieldSpec::Rationals, 7, 64),
            Err(Error::InadmissibleQ { q: 7, .. })
        ));
        assert!(run_all(&FieldSpec::Rationals, 3, 7).is_err());
    }

    #[test]
    fn splitting_examples() {
        let s = setting(3, 2);
        let b = STANDARD.kq_bar(12, Eps::Minus, s.q).unwrap() + n_copies(2, &ko(18).unwrap());
        assert_eq!(b, "(Z/2)^3".parse().unwrap());
        assert_eq!(STANDARD.kq_rf(12, Eps::Minus, s.params).unwrap(), b);
        let s = setting(2, 2);
        let c = STANDARD.v_bar(1, Eps::Plus).unwrap() + n_copies(2, &ko(1).unwrap());
        assert_eq!(c, "(Z/2)^4".parse().unwrap());
        let e = STANDARD.k_bar(1, 2).unwrap() + ko(0).unwrap();
        assert_eq!(e, STANDARD.k_rf(1, s.params).unwrap());
        assert_eq!(e, "Z^2 + Z/2".parse().unwrap());
    }

    #[test]
    fn t_w_examples() {
        assert!(check_t_w(2..=5, 400).unwrap().passed);
        assert_eq!(t(3, 3).unwrap(), w(2, 2).unwrap());
        assert_eq!(t(7, 7).unwrap(), 32);
        assert_eq!(t(11, 5).unwrap(), w(6, 2).unwrap());
        // 5^6 - 1 = 15624 = 8 * 1953.
        assert_eq!(w(6, 2).unwrap(), 8);
    }

    #[test]
    fn les_examples() {
        let reports = check_les(&FieldSpec::Rationals, 3).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
        let mv = reports
            .iter()
            .find(|r| r.name.starts_with("MV rank sum KQ eps=+1, n in 0"))
            .unwrap();
        assert!(mv.passed);
    }

    #[test]
    fn failure_has_counterexample() {
        let bad = STANDARD.mutated(Column::KqMinus, 3, Mutation::DoubleCyclic).unwrap();
        let reports = run_all_with(&bad, &setting(1, 2), 16).unwrap();
        let failing: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
        assert!(!failing.is_empty());
        let cx = failing[0].counterexample.as_ref().unwrap();
        assert_eq!(cx.n, 3);
        assert_eq!(cx.actual, "Z/16");
        assert_eq!(cx.expected, "Z/32");
    }

    #[test]
    fn every_main_row_mutation_is_caught() {
        let s = setting(2, 2);
        for col in Column::MAIN {
            for residue in 0..8 {
                for m in Mutation::ALL {
                    let Some(bad) = STANDARD.mutated(col, residue, m) else {
                        continue;
                    };
                    assert!(
                        !all_passed(&run_all_with(&bad, &s, 16).unwrap()),
                        "{col} row {residue} {m:?} undetected"
                    );
                }
            }
        }
    }
}
