// SPDX-License-Identifier: Apache-2.0

//! Bell operator `B = sum of all stabilizer-group elements`.
//!
//! A deterministic local assignment fixes a `±1` value for every
//! `(slot, observable)` pair. Each group element then evaluates to its sign
//! times the product of the values of its non-identity letters. The all-plus
//! assignment gives `2^n - 2C`; the true maximum over assignments can be
//! larger and is computed separately, exhaustively for small states and by
//! steepest-ascent local search otherwise.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Letter, I_POW};
use crate::stabilizer::{self, gray_sweep, packed_generators, partition_starts, EnumOptions, HyperState, XzWord};

/// Default cap on `3n` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_VARS: usize = 24;
/// Hard ceiling on `3n` for exhaustive search, even with an override.
pub const MAX_EXHAUSTIVE_VARS: usize = 40;
/// Largest `n` for which the term table used by the searches is built.
pub const TERM_TABLE_MAX_QUBITS: usize = 24;
pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Observable {
    X,
    Y,
    Z,
}

impl Observable {
    pub const ALL: [Observable; 3] = [Observable::X, Observable::Y, Observable::Z];

    fn index(self) -> usize {
        match self {
            Observable::X => 0,
            Observable::Y => 1,
            Observable::Z => 2,
        }
    }

    pub fn of_letter(l: Letter) -> Option<Observable> {
        match l {
            Letter::I => None,
            Letter::X => Some(Observable::X),
            Letter::Y => Some(Observable::Y),
            Letter::Z => Some(Observable::Z),
        }
    }
}

/// Predetermined `±1` values for X, Y and Z on each of `n <= 64` slots.
/// Bit `k` of a mask set means the value at slot `k` is `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    neg: [u64; 3],
}

impl Assignment {
    pub fn all_plus(n: usize) -> Self {
        assert!(n <= 64, "assignments cover at most 64 slots");
        Assignment { n, neg: [0; 3] }
    }

    /// Builds an assignment from one `[x, y, z]` row of `±1` values per slot.
    pub fn from_values(rows: &[[i8; 3]]) -> Result<Self> {
        let mut a = Assignment::all_plus(rows.len());
        for (slot, row) in rows.iter().enumerate() {
            for (obs, v) in Observable::ALL.iter().zip(row) {
                match v {
                    1 => {}
                    -1 => a.set(slot, *obs, -1),
                    other => return Err(Error::Domain(format!("assignment value {other} is not ±1"))),
                }
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, slot: usize, obs: Observable) -> i8 {
        assert!(slot < self.n);
        if self.neg[obs.index()] >> slot & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn set(&mut self, slot: usize, obs: Observable, value: i8) {
        assert!(slot < self.n);
        let bit = 1u64 << slot;
        if value < 0 {
            self.neg[obs.index()] |= bit;
        } else {
            self.neg[obs.index()] &= !bit;
        }
    }

    fn from_vars(n: usize, vars: u128) -> Self {
        let mut a = Assignment::all_plus(n);
        for slot in 0..n {
            for obs in Observable::ALL {
                if vars >> (3 * slot + obs.index()) & 1 == 1 {
                    a.set(slot, obs, -1);
                }
            }
        }
        a
    }
}

#[inline(always)]
fn term_value(w: XzWord, neg: &[u64; 3]) -> i64 {
    let flips = (neg[0] & w.x & !w.z) | (neg[1] & w.x & w.z) | (neg[2] & w.z & !w.x);
    let sign = if w.canonical_phase() == 2 { -1 } else { 1 };
    if flips.count_ones() % 2 == 1 {
        -sign
    } else {
        sign
    }
}

/// `<B>` under a deterministic assignment, in one Gray-code sweep.
pub fn bell_value(state: &HyperState, a: &Assignment) -> Result<i64> {
    bell_value_with(state, a, &EnumOptions::default())
}

pub fn bell_value_with(state: &HyperState, a: &Assignment, opts: &EnumOptions) -> Result<i64> {
    if a.n != state.n() {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: a.n,
        });
    }
    let gens = packed_generators(state, opts.guard_bits)?;
    let (low, starts) = partition_starts(&gens, opts.threads);
    let part = |start: XzWord| {
        let mut total = 0i64;
        gray_sweep(&gens, low, start, |w| total += term_value(w, &a.neg));
        total
    };
    if starts.len() == 1 {
        return Ok(part(starts[0]));
    }
    Ok(thread::scope(|s| {
        let handles: Vec<_> = starts.iter().map(|st| s.spawn(move || part(*st))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .sum()
    }))
}

/// QM expectation `2^n`. For `n <= 12` it is also recomputed as
/// `sum_S <v|S|v> / <v|v>` over the enumerated group.
pub fn qm_expectation(state: &HyperState) -> Result<u64> {
    let n = state.n();
    if n > 63 {
        return Err(Error::Capacity {
            what: "Bell operator qubit count",
            size: n,
            limit: 63,
        });
    }
    let expected = 1u64 << n;
    if n <= 12 {
        let support = stabilizer::support_indices(state)?;
        let norm = support.len() as i64;
        let mut sum = num_complex::Complex::new(0i64, 0);
        for el in stabilizer::enumerate_group(state)? {
            let (x, z) = (el.pauli.x_words()[0], el.pauli.z_words()[0]);
            let base = I_POW[(el.pauli.phase_exp() as usize + (x & z).count_ones() as usize) % 4];
            for j in &support {
                // <v| S |j> picks up amplitude only if j ^ x is in the support.
                if support.binary_search(&(j ^ x)).is_ok() {
                    let s = if (z & j).count_ones() % 2 == 1 { -1 } else { 1 };
                    sum += base * s;
                }
            }
        }
        if sum.im != 0 || sum.re != norm * expected as i64 {
            return Err(Error::Invariant(format!(
                "dense expectation {sum} / {norm} disagrees with 2^{n}"
            )));
        }
    }
    Ok(expected)
}

/// `2^n - 2C`: the Bell value under the all-plus assignment.
pub fn paper_lhvt_bound(state: &HyperState) -> Result<i64> {
    let c = stabilizer::count_negative(state)?;
    Ok((1i64 << state.n()) - 2 * c as i64)
}

/// `2^n - 2C` from an already computed negative count.
pub fn all_plus_bound(n: usize, negatives: u64) -> i64 {
    (1i64 << n) - 2 * negatives as i64
}

/// Every group element as the set of assignment variables it reads, plus its
/// sign. Variable `3 * slot + observable`.
struct TermTable {
    nvars: usize,
    terms: Vec<(u128, bool)>,
    /// Term indices touching each variable.
    incidence: Vec<Vec<u32>>,
}

impl TermTable {
    fn build(state: &HyperState) -> Result<Self> {
        let n = state.n();
        if n > TERM_TABLE_MAX_QUBITS {
            return Err(Error::Capacity {
                what: "local hidden variable search qubit count",
                size: n,
                limit: TERM_TABLE_MAX_QUBITS,
            });
        }
        let gens = packed_generators(state, TERM_TABLE_MAX_QUBITS)?;
        let mut terms = Vec::with_capacity(1 << n);
        gray_sweep(&gens, n, XzWord::IDENTITY, |w| {
            let mut vars = 0u128;
            for slot in 0..n {
                let (x, z) = (w.x >> slot & 1 == 1, w.z >> slot & 1 == 1);
                if let Some(obs) = Observable::of_letter(Letter::from_bits(x, z)) {
                    vars |= 1u128 << (3 * slot + obs.index());
                }
            }
            terms.push((vars, w.canonical_phase() == 2));
        });
        let nvars = 3 * n;
        let mut incidence = vec![Vec::new(); nvars];
        for (t, (vars, _)) in terms.iter().enumerate() {
            let mut rest = *vars;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                incidence[v].push(t as u32);
                rest &= rest - 1;
            }
        }
        Ok(TermTable {
            nvars,
            terms,
            incidence,
        })
    }

    fn values(&self, neg_vars: u128) -> Vec<i8> {
        self.terms
            .iter()
            .map(|(vars, negative)| {
                let odd = (vars & neg_vars).count_ones() % 2 == 1;
                if odd != *negative {
                    -1
                } else {
                    1
                }
            })
            .collect()
    }

    fn active_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|v| !self.incidence[*v].is_empty()).collect()
    }

    /// Flips variable `v`, returning the change in Bell value.
    #[inline]
    fn flip(&self, v: usize, vals: &mut [i8]) -> i64 {
        let mut s = 0i64;
        for t in &self.incidence[v] {
            let t = *t as usize;
            s += vals[t] as i64;
            vals[t] = -vals[t];
        }
        -2 * s
    }

    fn gain(&self, v: usize, vals: &[i8]) -> i64 {
        -2 * self.incidence[v].iter().map(|t| vals[*t as usize] as i64).sum::<i64>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvOptimum {
    pub value: i64,
    pub assignment: Assignment,
}

/// Exact maximum over all deterministic assignments.
///
/// Variables that no group element reads are fixed to `+1`. `max_vars` caps
/// `3n` (use [`DEFAULT_EXHAUSTIVE_VARS`] unless overriding).
pub fn lhvt_max_exhaustive(state: &HyperState, max_vars: usize, threads: usize) -> Result<LhvOptimum> {
    let nvars = 3 * state.n();
    let limit = max_vars.min(MAX_EXHAUSTIVE_VARS);
    if nvars > limit {
        return Err(Error::Capacity {
            what: "exhaustive assignment variable count",
            size: nvars,
            limit,
        });
    }
    let table = TermTable::build(state)?;
    let active = table.active_vars();
    let k = active.len();
    let high = (usize::BITS - 1 - threads.max(1).leading_zeros()) as usize;
    let high = high.min(k);
    let low = k - high;

    let search = |prefix: u64| -> (i64, u128) {
        let mut neg = 0u128;
        for h in 0..high {
            if prefix >> h & 1 == 1 {
                neg |= 1u128 << active[low + h];
            }
        }
        let mut vals = table.values(neg);
        let mut value: i64 = vals.iter().map(|v| *v as i64).sum();
        let (mut best, mut best_neg) = (value, neg);
        for step in 1u64..(1u64 << low) {
            let v = active[step.trailing_zeros() as usize];
            value += table.flip(v, &mut vals);
            neg ^= 1u128 << v;
            if value > best {
                best = value;
                best_neg = neg;
            }
        }
        (best, best_neg)
    };

    let results: Vec<(i64, u128)> = if high == 0 {
        vec![search(0)]
    } else {
        thread::scope(|s| {
            let search = &search;
            let handles: Vec<_> = (0..1u64 << high).map(|p| s.spawn(move || search(p))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };
    // Ties resolve to the lowest partition for determinism.
    let (value, neg) = results
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one partition");
    Ok(LhvOptimum {
        value,
        assignment: Assignment::from_vars(state.n(), neg),
    })
}

/// Steepest-ascent single-flip search with random restarts.
///
/// Restart 0 starts from the all-plus assignment, so the result is never
/// below `2^n - 2C`. The returned value is achieved by the returned
/// assignment, hence a lower bound on the true maximum.
pub fn lhvt_max_heuristic(state: &HyperState, seed: u64, restarts: usize, steps: usize) -> Result<LhvOptimum> {
    let table = TermTable::build(state)?;
    let active = table.active_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(i64, u128)> = None;
    for r in 0..restarts.max(1) {
        let mut neg = 0u128;
        if r > 0 {
            for v in &active {
                if rng.gen::<bool>() {
                    neg |= 1u128 << v;
                }
            }
        }
        let mut vals = table.values(neg);
        let mut value: i64 = vals.iter().map(|v| *v as i64).sum();
        for _ in 0..steps {
            let mut pick: Option<(i64, usize)> = None;
            for v in &active {
                let g = table.gain(*v, &vals);
                if pick.is_none_or(|(pg, _)| g > pg) {
                    pick = Some((g, *v));
                }
            }
            match pick {
                Some((g, v)) if g > 0 => {
                    value += table.flip(v, &mut vals);
                    neg ^= 1u128 << v;
                }
                _ => break,
            }
        }
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, neg));
        }
    }
    let (value, neg) = best.expect("at least one restart");
    Ok(LhvOptimum {
        value,
        assignment: Assignment::from_vars(state.n(), neg),
    })
}

pub fn default_steps(n: usize) -> usize {
    10 * 3 * n
}

/// `qm / bound` kept exact, with a two-decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub numerator: i64,
    pub denominator: i64,
    pub rendered: String,
}

impl Ratio {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        Ratio {
            numerator,
            denominator,
            rendered: render_ratio(numerator, denominator),
        }
    }
}

/// Rounds `num / den` half away from zero to two decimals.
pub fn render_ratio(num: i64, den: i64) -> String {
    if den == 0 {
        return "inf".into();
    }
    let (num, den) = if den < 0 {
        (-(num as i128), -(den as i128))
    } else {
        (num as i128, den as i128)
    };
    let scaled = num * 100;
    let mut q = scaled / den;
    let r = scaled % den;
    if 2 * r.abs() >= den {
        q += scaled.signum();
    }
    let sign = if q < 0 { "-" } else { "" };
    let q = q.abs();
    format!("{sign}{}.{:02}", q / 100, q % 100)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOptions {
    pub exhaustive: bool,
    pub max_exhaustive_vars: usize,
    pub seed: u64,
    pub restarts: usize,
    pub steps: Option<usize>,
    pub enumeration: EnumOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            exhaustive: false,
            max_exhaustive_vars: DEFAULT_EXHAUSTIVE_VARS,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            steps: None,
            enumeration: EnumOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BellReport {
    pub state: String,
    pub qubits: usize,
    pub qm_value: u64,
    pub negatives: u64,
    /// All-plus assignment value `2^n - 2C`.
    pub all_plus_value: i64,
    pub exhaustive_max: Option<i64>,
    pub heuristic_max: i64,
    pub violation_ratio_all_plus: Ratio,
}

pub fn report(state: &HyperState, opts: &ReportOptions) -> Result<BellReport> {
    let n = state.n();
    let qm_value = qm_expectation(state)?;
    let negatives = stabilizer::count_negative_with(state, &opts.enumeration)?;
    let all_plus_value = all_plus_bound(n, negatives);
    let exhaustive_max = if opts.exhaustive {
        Some(lhvt_max_exhaustive(state, opts.max_exhaustive_vars, opts.enumeration.threads)?.value)
    } else {
        None
    };
    let steps = opts.steps.unwrap_or_else(|| default_steps(n));
    let heuristic_max = lhvt_max_heuristic(state, opts.seed, opts.restarts, steps)?.value;
    if heuristic_max < all_plus_value {
        return Err(Error::Invariant("heuristic fell below the all-plus value".into()));
    }
    if let Some(ex) = exhaustive_max {
        if ex < heuristic_max || ex < all_plus_value {
            return Err(Error::Invariant("exhaustive maximum below a feasible value".into()));
        }
    }
    Ok(BellReport {
        state: state.to_string(),
        qubits: n,
        qm_value,
        negatives,
        all_plus_value,
        exhaustive_max,
        heuristic_max,
        violation_ratio_all_plus: Ratio::new(qm_value as i64, all_plus_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> HyperState {
        s.parse().unwrap()
    }

    /// Direct evaluation from enumerated strings, no packed masks.
    fn bell_value_naive(state: &HyperState, a: &Assignment) -> i64 {
        stabilizer::enumerate_group(state)
            .unwrap()
            .map(|el| {
                el.pauli
                    .letters()
                    .enumerate()
                    .filter_map(|(slot, l)| Observable::of_letter(l).map(|o| a.value(slot, o) as i64))
                    .product::<i64>()
                    * el.sign.as_i64()
            })
            .sum()
    }

    #[test]
    fn all_plus_gives_bound() {
        for s in ["2:00", "3:000", "4:0000,4:0101,4:0000", "6:000000,6:000000"] {
            let state = st(s);
            let c = stabilizer::count_negative(&state).unwrap();
            let v = bell_value(&state, &Assignment::all_plus(state.n())).unwrap();
            assert_eq!(v, (1i64 << state.n()) - 2 * c as i64);
        }
    }

    #[test]
    fn bell_block_hand_value() {
        let a = Assignment::from_values(&[[1, -1, 1], [1, 1, 1]]).unwrap();
        assert_eq!(bell_value(&st("2:00"), &a).unwrap(), 4);
    }

    #[test]
    fn sweep_matches_naive() {
        let state = st("3:010,2:00");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rows: Vec<[i8; 3]> = (0..5)
                .map(|_| [0; 3].map(|_: i8| if rng.gen::<bool>() { 1 } else { -1 }))
                .collect();
            let a = Assignment::from_values(&rows).unwrap();
            assert_eq!(bell_value(&state, &a).unwrap(), bell_value_naive(&state, &a));
            assert_eq!(
                bell_value_with(&state, &a, &EnumOptions::with_threads(4)).unwrap(),
                bell_value_naive(&state, &a)
            );
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            bell_value(&st("2:00"), &Assignment::all_plus(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exhaustive_small_states() {
        assert_eq!(lhvt_max_exhaustive(&st("2:00"), 24, 1).unwrap().value, 4);
        assert_eq!(lhvt_max_exhaustive(&st("3:000"), 24, 1).unwrap().value, 6);
        assert_eq!(lhvt_max_exhaustive(&st("3:000"), 24, 4).unwrap().value, 6);
        let opt = lhvt_max_exhaustive(&st("3:000"), 24, 1).unwrap();
        assert_eq!(bell_value(&st("3:000"), &opt.assignment).unwrap(), 6);
    }

    #[test]
    fn exhaustive_guard() {
        assert!(matches!(
            lhvt_max_exhaustive(&st("5:00000,4:0000"), DEFAULT_EXHAUSTIVE_VARS, 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn heuristic_small_states() {
        for seed in 0..5 {
            assert_eq!(lhvt_max_heuristic(&st("2:00"), seed, 1, 60).unwrap().value, 4);
            assert_eq!(lhvt_max_heuristic(&st("3:000"), seed, 4, 90).unwrap().value, 6);
        }
    }

    #[test]
    fn heuristic_is_achieved_and_deterministic() {
        let state = st("2:00,2:00");
        let a = lhvt_max_heuristic(&state, 11, 8, 120).unwrap();
        let b = lhvt_max_heuristic(&state, 11, 8, 120).unwrap();
        assert_eq!(a, b);
        assert_eq!(bell_value(&state, &a.assignment).unwrap(), a.value);
    }

    #[test]
    fn qm_values() {
        assert_eq!(qm_expectation(&HyperState::four_photon_twelve_qubit()).unwrap(), 4096);
        assert_eq!(qm_expectation(&st("2:00")).unwrap(), 4);
        assert_eq!(qm_expectation(&st("3:000")).unwrap(), 8);
    }

    #[test]
    fn ratio_rendering() {
        assert_eq!(render_ratio(4096, 1984), "2.06");
        assert_eq!(render_ratio(4096, 1024), "4.00");
        assert_eq!(render_ratio(4096, 388), "10.56");
        assert_eq!(render_ratio(4096, 64), "64.00");
        assert_eq!(render_ratio(1, 8), "0.13");
        assert_eq!(render_ratio(-1, 8), "-0.13");
        assert_eq!(render_ratio(5, 0), "inf");
    }

    #[test]
    fn table_states_report() {
        let r = report(
            &st("12:000000000000"),
            &ReportOptions {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.all_plus_value, 1984);
        assert_eq!(r.violation_ratio_all_plus.rendered, "2.06");
        let r = report(
            &st("6:000000,6:000000"),
            &ReportOptions {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.all_plus_value, 1024);
        assert_eq!(r.violation_ratio_all_plus.rendered, "4.00");
        let r = report(
            &HyperState::four_photon_twelve_qubit(),
            &ReportOptions {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.negatives, 2016);
        assert_eq!(r.all_plus_value, 64);
        assert_eq!(r.violation_ratio_all_plus.rendered, "64.00");
        assert!(r.heuristic_max >= 64);
    }
}
