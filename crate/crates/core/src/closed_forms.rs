// SPDX-License-Identifier: Apache-2.0

//! Closed forms for negative-sign counts of aligned GHZ blocks, and the ten
//! pairwise difference expressions comparing three-, two- and one-block
//! states with the same number of qubits.
//!
//! Every printed expression is transcribed as written and evaluated exactly
//! (negative powers of two make some of them rational), next to a
//! recomputation from block counts. Mismatches are reported, never patched.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stabilizer::composite_count;

/// `sum_{k = 2 mod 4, k <= m} binomial(m, k)`.
pub fn c_binomial(m: usize) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::Domain(format!("block size must be at least 2, got {m}")));
    }
    let mb = BigUint::from(m);
    Ok((2..=m).step_by(4).map(|k| binomial(mb.clone(), BigUint::from(k))).sum())
}

/// Four-branch closed form selected by `m mod 4`.
pub fn c_cases(m: usize) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::Domain(format!("block size must be at least 2, got {m}")));
    }
    let p2 = |e: usize| BigInt::one() << e;
    let sign = |e: usize| {
        if e.is_multiple_of(2) {
            BigInt::one()
        } else {
            -BigInt::one()
        }
    };
    let value = match m % 4 {
        // m = 4x - 2
        2 => p2(m - 2),
        // m = 4x - 1
        3 => sign((m + 5) / 4) * p2((m - 3) / 2) + p2(m - 2),
        // m = 4x
        0 => sign((m + 4) / 4) * p2((m - 2) / 2) + p2(m - 2),
        // m = 4x + 1
        _ => sign(m.div_ceil(4)) * p2((m - 3) / 2) + p2(m - 2),
    };
    Ok(value.to_biguint().expect("closed form is non-negative"))
}

/// Which pair of states a case compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Three blocks of `m` against one block of `3m`.
    ThreeVsOne,
    /// Three blocks of `m` against two blocks of `3m/2`.
    ThreeVsTwo,
    /// Two blocks of `n` against one block of `2n`.
    TwoVsOne,
}

#[derive(Debug, Clone, Copy)]
struct CaseSpec {
    comparison: Comparison,
    /// Block size of the left-hand state as `a*x + b`.
    size: (i64, i64),
    min_x: i64,
}

const CASES: [CaseSpec; 10] = [
    CaseSpec {
        comparison: Comparison::ThreeVsOne,
        size: (4, -1),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::ThreeVsOne,
        size: (4, 1),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::ThreeVsTwo,
        size: (8, 2),
        min_x: 0,
    },
    CaseSpec {
        comparison: Comparison::ThreeVsTwo,
        size: (8, -2),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::ThreeVsTwo,
        size: (8, 4),
        min_x: 0,
    },
    CaseSpec {
        comparison: Comparison::ThreeVsTwo,
        size: (8, 0),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::TwoVsOne,
        size: (4, -2),
        min_x: 2,
    },
    CaseSpec {
        comparison: Comparison::TwoVsOne,
        size: (4, 0),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::TwoVsOne,
        size: (4, -1),
        min_x: 1,
    },
    CaseSpec {
        comparison: Comparison::TwoVsOne,
        size: (4, 1),
        min_x: 1,
    },
];

pub const CASE_IDS: std::ops::RangeInclusive<u8> = 1..=10;

pub fn case_min_x(case_id: u8) -> Result<i64> {
    case_spec(case_id).map(|c| c.min_x)
}

fn case_spec(case_id: u8) -> Result<CaseSpec> {
    CASE_IDS
        .contains(&case_id)
        .then(|| CASES[case_id as usize - 1])
        .ok_or_else(|| Error::Domain(format!("case id must be 1..=10, got {case_id}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub case_id: u8,
    pub x: i64,
    pub comparison: Comparison,
    /// `m` for cases 1-6, `n` for cases 7-10.
    pub block_size: usize,
    /// The simplified right-hand side as printed.
    #[serde(serialize_with = "ser_rational")]
    pub printed: BigRational,
    /// The expanded left-hand side as printed, when its exponents are integers.
    #[serde(serialize_with = "ser_opt_rational")]
    pub expanded: Option<BigRational>,
    /// Expanded form with `2^{4x+11}` read as `2^{4x+1}` (case 10 only).
    #[serde(serialize_with = "ser_opt_rational")]
    pub expanded_corrected: Option<BigRational>,
    /// Difference recomputed from per-block counts.
    #[serde(serialize_with = "ser_display")]
    pub recomputed: BigInt,
    pub positive: bool,
    pub printed_matches: bool,
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `base^e` for any integer exponent.
fn pw(base: i64, e: i64) -> BigRational {
    let b = int(base);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

fn p2(e: i64) -> BigRational {
    pw(2, e)
}

fn neg1(e: i64) -> BigRational {
    int(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `(-1)^{(x+1)/4}`, defined only when the exponent is an integer.
fn neg1_quarter(x: i64) -> Option<BigRational> {
    ((x + 1) % 4 == 0).then(|| neg1((x + 1) / 4))
}

fn printed_rhs(case_id: u8, x: i64) -> BigRational {
    let three = int(3);
    match case_id {
        1 => -three * p2(-7 + 6 * x) * (int(8) * neg1(x) + neg1(x) * p2(1 + 4 * x) + pw(4, 1 + x) - pw(64, x)),
        2 => -three * p2(-1 + 6 * x) * (pw(-16, x) + neg1(x) + pw(4, x) - pw(64, x)),
        3 => p2(1 + 12 * x) + pw(4, 1 + 12 * x) - neg1(x) * pw(8, 1 + 6 * x),
        4 => pw(4, -5 + 6 * x) * (int(32) + pw(4, 6 * x) - neg1(x) * pw(4, 2 + 3 * x)),
        5 => p2(5 + 12 * x) * (int(1) - three.clone() * p2(1 + 4 * x) + three * pw(4, 1 + 4 * x) + pw(8, 1 + 4 * x)),
        6 => pw(16, -1 + 4 * x) * (int(-12) + neg1(x) * p2(3 + 2 * x) - three * p2(1 + 4 * x) + pw(256, x)),
        7 => p2(-7 + 4 * x) * (int(-16) + pw(16, x)),
        8 => pw(8, -1 + 2 * x) * (int(-4) * neg1(x) + pw(4, x)),
        9 => p2(-5 + 4 * x) * (int(-4) - neg1(x) * pw(4, 1 + x) + pw(16, x)),
        10 => p2(-1 + 4 * x) * (int(-1) - neg1(x) * p2(1 + 2 * x) + pw(16, x)),
        _ => unreachable!("case id validated by caller"),
    }
}

/// Three-block composite `3c(t - c)^2 + c^3` as printed, with `t = 2^m`.
fn three_block(c: BigRational, t: BigRational) -> BigRational {
    let rest = t - c.clone();
    int(3) * c.clone() * rest.clone() * rest + c.clone() * c.clone() * c
}

/// Two-block composite `2c(t - c)` as printed.
fn two_block(c: BigRational, t: BigRational) -> BigRational {
    int(2) * c.clone() * (t - c)
}

/// Expanded left-hand side; `big_term_exp` overrides case 10's `4x+11`.
fn printed_lhs(case_id: u8, x: i64, big_term_exp: i64) -> Option<BigRational> {
    Some(match case_id {
        1 => {
            let s = neg1_quarter(x)?;
            let c = s * p2(2 * x - 2) + p2(4 * x - 3);
            three_block(c, p2(4 * x - 1)) - (neg1(3 * x) * p2(6 * x - 3) + p2(12 * x - 5))
        }
        2 => {
            let s = neg1_quarter(x)?;
            let c = s * p2(2 * x - 1) + p2(4 * x - 1);
            three_block(c, p2(4 * x + 1)) - (neg1(3 * x + 2) * p2(6 * x) + p2(12 * x + 1))
        }
        3 => {
            let c2 = neg1(3 * x + 2) * p2(6 * x) + p2(12 * x + 1);
            three_block(p2(8 * x), p2(8 * x + 2)) - two_block(c2, p2(12 * x + 3))
        }
        4 => {
            let c2 = neg1(3 * x) * p2(6 * x - 3) + p2(12 * x - 5);
            three_block(p2(8 * x - 4), p2(8 * x - 2)) - two_block(c2, p2(12 * x - 3))
        }
        5 => {
            let c1 = neg1(2 * x + 2) * p2(4 * x + 1) + p2(8 * x + 2);
            three_block(c1, p2(8 * x + 4)) - two_block(p2(12 * x + 4), p2(12 * x + 6))
        }
        6 => {
            let c1 = neg1(2 * x + 1) * p2(4 * x - 1) + p2(8 * x - 2);
            let c2 = neg1(3 * x + 1) * p2(6 * x - 1) + p2(12 * x - 2);
            three_block(c1, p2(8 * x)) - two_block(c2, p2(12 * x))
        }
        // The printed bracket is unbalanced; it is closed after 2^{4x-4}.
        7 => two_block(p2(4 * x - 4), p2(4 * x - 2)) - (neg1(2 * x) * p2(4 * x - 3) + p2(8 * x - 6)),
        8 => {
            let c = neg1(x + 1) * p2(2 * x - 1) + p2(4 * x - 2);
            two_block(c, p2(4 * x)) - (neg1(2 * x + 1) * p2(4 * x - 1) + p2(8 * x - 2))
        }
        9 => {
            let c = neg1(x + 1) * p2(2 * x - 2) + p2(4 * x - 3);
            two_block(c, p2(4 * x - 1)) - p2(8 * x - 4)
        }
        10 => {
            let c = neg1(x + 1) * p2(2 * x - 1) + p2(4 * x - 1);
            two_block(c, p2(big_term_exp)) - p2(8 * x)
        }
        _ => unreachable!("case id validated by caller"),
    })
}

fn composite_of(count: usize, m: usize) -> Result<BigUint> {
    let c = c_binomial(m)?;
    Ok(composite_count(&vec![(m, c); count]))
}

pub fn case_difference(case_id: u8, x: i64) -> Result<CaseResult> {
    let spec = case_spec(case_id)?;
    if x < spec.min_x {
        return Err(Error::Domain(format!(
            "case {case_id} is stated for x >= {}, got x = {x}",
            spec.min_x
        )));
    }
    let size = spec.size.0 * x + spec.size.1;
    let size = usize::try_from(size).map_err(|_| Error::Domain(format!("block size {size} is negative")))?;
    let (left, right) = match spec.comparison {
        Comparison::ThreeVsOne => (composite_of(3, size)?, composite_of(1, 3 * size)?),
        Comparison::ThreeVsTwo => (composite_of(3, size)?, composite_of(2, 3 * size / 2)?),
        Comparison::TwoVsOne => (composite_of(2, size)?, composite_of(1, 2 * size)?),
    };
    let recomputed = BigInt::from(left) - BigInt::from(right);
    let printed = printed_rhs(case_id, x);
    let expanded = printed_lhs(case_id, x, 4 * x + 11);
    let expanded_corrected = (case_id == 10).then(|| printed_lhs(case_id, x, 4 * x + 1)).flatten();
    let printed_matches = printed == BigRational::from_integer(recomputed.clone());
    Ok(CaseResult {
        case_id,
        x,
        comparison: spec.comparison,
        block_size: size,
        printed,
        expanded,
        expanded_corrected,
        positive: recomputed.is_positive(),
        recomputed,
        printed_matches,
    })
}

/// All cases for `x` from each case's lower bound up to `x_max`.
pub fn case_grid(x_max: i64) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for id in CASE_IDS {
        for x in case_min_x(id)?..=x_max {
            out.push(case_difference(id, x)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingReport {
    pub qubits: usize,
    #[serde(serialize_with = "ser_display")]
    pub three_blocks: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub two_blocks: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub one_block: BigUint,
    /// Whether `three_blocks > two_blocks > one_block` holds.
    pub ordered: bool,
}

pub fn ordering_report(q: usize) -> Result<OrderingReport> {
    if q < 6 || !q.is_multiple_of(6) {
        return Err(Error::Domain(format!(
            "qubit count must be a positive multiple of 6, got {q}"
        )));
    }
    let three = composite_of(3, q / 3)?;
    let two = composite_of(2, q / 2)?;
    let one = composite_of(1, q)?;
    Ok(OrderingReport {
        qubits: q,
        ordered: three > two && two > one,
        three_blocks: three,
        two_blocks: two,
        one_block: one,
    })
}
