// SPDX-License-Identifier: Apache-2.0

//! Report documents behind the command-line front end.
//!
//! Every report is a plain serializable struct (field order is the JSON key
//! order) and also implements [`Tabular`] for table and CSV output. Exact
//! numbers that may exceed 64 bits are carried as decimal strings.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::bell::{self, Ratio, ReportOptions};
use crate::closed_forms::{self, format_rational, CaseResult, OrderingReport};
use crate::error::{Error, Result};
use crate::photonic::{self, Scenario};
use crate::stabilizer::{self, EnumOptions, HyperState};

/// Header and rows of a flat rendering.
pub trait Tabular {
    fn headers(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// Inline `m:mask[:label],...` or the JSON form of a [`HyperState`].
pub fn parse_state_spec(text: &str) -> Result<HyperState> {
    let t = text.trim();
    if t.starts_with('{') {
        let parsed: HyperState = serde_json::from_str(t).map_err(|e| Error::Parse {
            pos: e.column().saturating_sub(1),
            msg: e.to_string(),
        })?;
        HyperState::new(parsed.blocks().to_vec())
    } else {
        t.parse()
    }
}

pub fn state_json(state: &HyperState) -> String {
    serde_json::to_string(state).expect("state serializes")
}

fn kv_rows(pairs: Vec<(&str, String)>) -> Vec<Vec<String>> {
    pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect()
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub state: String,
    pub qubits: usize,
    pub group_size: String,
    pub negatives_closed: String,
    /// `None` when the group exceeds the enumeration guard.
    pub negatives_enumerated: Option<u64>,
    pub enumeration_skipped: Option<String>,
    pub positives: String,
}

pub fn count_report(state: &HyperState, opts: &EnumOptions) -> Result<CountReport> {
    let n = state.n();
    let closed = stabilizer::count_negative_closed(state)?;
    let group = BigUint::from(1u8) << n;
    let (enumerated, skipped) = if n > opts.guard_bits {
        (
            None,
            Some(format!("2^{n} elements exceed the 2^{} guard", opts.guard_bits)),
        )
    } else {
        let c = stabilizer::count_negative_with(state, opts)?;
        if BigUint::from(c) != closed {
            return Err(Error::Invariant(format!(
                "enumerated count {c} differs from closed form {closed}"
            )));
        }
        (Some(c), None)
    };
    Ok(CountReport {
        state: state.to_string(),
        qubits: n,
        positives: (&group - &closed).to_string(),
        group_size: group.to_string(),
        negatives_closed: closed.to_string(),
        negatives_enumerated: enumerated,
        enumeration_skipped: skipped,
    })
}

impl Tabular for CountReport {
    fn headers(&self) -> Vec<&'static str> {
        vec!["field", "value"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        kv_rows(vec![
            ("state", self.state.clone()),
            ("qubits", self.qubits.to_string()),
            ("group_size", self.group_size.clone()),
            ("negatives_closed", self.negatives_closed.clone()),
            ("negatives_enumerated", opt(&self.negatives_enumerated)),
            ("enumeration_skipped", opt(&self.enumeration_skipped)),
            ("positives", self.positives.clone()),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCount {
    pub m: usize,
    pub parity_mask: String,
    pub dof_label: String,
    pub negatives: String,
    /// Both closed-form formulas; present for aligned blocks only.
    pub c_binomial: Option<String>,
    pub c_cases: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub state: String,
    pub qubits: usize,
    pub blocks: Vec<BlockCount>,
    pub negatives: String,
    pub all_plus_bound: String,
    pub ordering: Option<OrderingReport>,
}

pub fn closed_form_report(state: &HyperState, ordering_qubits: Option<usize>) -> Result<ClosedFormReport> {
    let mut blocks = Vec::new();
    for b in state.blocks() {
        let (cb, cc) = if b.is_aligned() {
            (
                Some(closed_forms::c_binomial(b.m())?.to_string()),
                Some(closed_forms::c_cases(b.m())?.to_string()),
            )
        } else {
            (None, None)
        };
        blocks.push(BlockCount {
            m: b.m(),
            parity_mask: b.mask_string(),
            dof_label: b.dof_label().to_string(),
            negatives: stabilizer::block_negative_count(b)?.to_string(),
            c_binomial: cb,
            c_cases: cc,
        });
    }
    let negatives = stabilizer::count_negative_closed(state)?;
    let group = num_bigint::BigInt::from(BigUint::from(1u8) << state.n());
    let bound: num_bigint::BigInt = group - num_bigint::BigInt::from(negatives.clone()) * 2u8;
    Ok(ClosedFormReport {
        state: state.to_string(),
        qubits: state.n(),
        blocks,
        negatives: negatives.to_string(),
        all_plus_bound: bound.to_string(),
        ordering: ordering_qubits.map(closed_forms::ordering_report).transpose()?,
    })
}

impl Tabular for ClosedFormReport {
    fn headers(&self) -> Vec<&'static str> {
        vec![
            "block",
            "m",
            "parity_mask",
            "dof_label",
            "negatives",
            "c_binomial",
            "c_cases",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                vec![
                    k.to_string(),
                    b.m.to_string(),
                    b.parity_mask.clone(),
                    b.dof_label.clone(),
                    b.negatives.clone(),
                    opt(&b.c_binomial),
                    opt(&b.c_cases),
                ]
            })
            .collect();
        let pad = |label: &str, value: String| {
            vec![
                label.to_string(),
                String::new(),
                String::new(),
                String::new(),
                value,
                String::new(),
                String::new(),
            ]
        };
        rows.push(pad("total", self.negatives.clone()));
        rows.push(pad("all_plus_bound", self.all_plus_bound.clone()));
        if let Some(o) = &self.ordering {
            rows.push(pad(
                &format!("ordering_q{}_three_blocks", o.qubits),
                o.three_blocks.to_string(),
            ));
            rows.push(pad(
                &format!("ordering_q{}_two_blocks", o.qubits),
                o.two_blocks.to_string(),
            ));
            rows.push(pad(
                &format!("ordering_q{}_one_block", o.qubits),
                o.one_block.to_string(),
            ));
            rows.push(pad(&format!("ordering_q{}_ordered", o.qubits), o.ordered.to_string()));
        }
        rows
    }
}

impl Tabular for bell::BellReport {
    fn headers(&self) -> Vec<&'static str> {
        vec!["field", "value"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        kv_rows(vec![
            ("state", self.state.clone()),
            ("qubits", self.qubits.to_string()),
            ("qm_value", self.qm_value.to_string()),
            ("negatives", self.negatives.to_string()),
            ("all_plus_value", self.all_plus_value.to_string()),
            ("exhaustive_max", opt(&self.exhaustive_max)),
            ("heuristic_max", self.heuristic_max.to_string()),
            (
                "violation_ratio_all_plus",
                self.violation_ratio_all_plus.rendered.clone(),
            ),
        ])
    }
}

/// One printed row: state label, inline spec, printed bound and printed ratio.
pub const TABLE1_PRINTED: [(&str, &str, i64, &str); 3] = [
    ("psi", "4:0000,4:0101,4:0000", 388, "10.56"),
    ("psi_prime", "6:000000,6:000000", 1024, "4.00"),
    ("psi_double_prime", "12:000000000000", 1984, "2.06"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub label: String,
    pub state: String,
    pub qm_value: u64,
    pub negatives_enumerated: u64,
    pub negatives_closed: String,
    pub printed_max_lhvt: i64,
    pub computed_bound: i64,
    /// Best assignment found by the seeded local search.
    pub heuristic_lower_bound: i64,
    pub printed_d: String,
    pub computed_d: Ratio,
    pub matches_printed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Report {
    pub seed: u64,
    pub restarts: usize,
    pub steps: usize,
    pub rows: Vec<Table1Row>,
}

pub fn table1(opts: &ReportOptions) -> Result<Table1Report> {
    let mut rows = Vec::new();
    let mut steps = 0;
    for (label, spec, printed_max, printed_d) in TABLE1_PRINTED {
        let state = parse_state_spec(spec)?;
        let n = state.n();
        steps = opts.steps.unwrap_or_else(|| bell::default_steps(n));
        let qm = bell::qm_expectation(&state)?;
        let enumerated = stabilizer::count_negative_with(&state, &opts.enumeration)?;
        let closed = stabilizer::count_negative_closed(&state)?;
        if BigUint::from(enumerated) != closed {
            return Err(Error::Invariant(format!(
                "{label}: enumerated count {enumerated} differs from closed form {closed}"
            )));
        }
        let bound = bell::all_plus_bound(n, enumerated);
        let heuristic = bell::lhvt_max_heuristic(&state, opts.seed, opts.restarts, steps)?.value;
        if heuristic < bound {
            return Err(Error::Invariant(format!(
                "{label}: heuristic fell below the all-plus value"
            )));
        }
        let computed_d = Ratio::new(qm as i64, bound);
        rows.push(Table1Row {
            label: label.to_string(),
            state: spec.to_string(),
            qm_value: qm,
            negatives_enumerated: enumerated,
            negatives_closed: closed.to_string(),
            printed_max_lhvt: printed_max,
            computed_bound: bound,
            heuristic_lower_bound: heuristic,
            printed_d: printed_d.to_string(),
            matches_printed: bound == printed_max && computed_d.rendered == printed_d,
            computed_d,
        });
    }
    Ok(Table1Report {
        seed: opts.seed,
        restarts: opts.restarts,
        steps,
        rows,
    })
}

impl Tabular for Table1Report {
    fn headers(&self) -> Vec<&'static str> {
        vec![
            "state",
            "spec",
            "qm_value",
            "negatives",
            "printed_max_lhvt",
            "computed_bound",
            "heuristic_lower_bound",
            "printed_d",
            "computed_d",
            "matches_printed",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    r.state.clone(),
                    r.qm_value.to_string(),
                    r.negatives_enumerated.to_string(),
                    r.printed_max_lhvt.to_string(),
                    r.computed_bound.to_string(),
                    r.heuristic_lower_bound.to_string(),
                    r.printed_d.clone(),
                    r.computed_d.rendered.clone(),
                    r.matches_printed.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasesReport {
    pub x_max: i64,
    pub rows: Vec<CaseResult>,
}

pub const CASES_HEADER: [&str; 10] = [
    "case_id",
    "x",
    "comparison",
    "block_size",
    "printed",
    "expanded",
    "expanded_corrected",
    "recomputed",
    "positive",
    "printed_matches",
];

pub fn cases_report(x_max: i64) -> Result<CasesReport> {
    Ok(CasesReport {
        x_max,
        rows: closed_forms::case_grid(x_max)?,
    })
}

impl Tabular for CasesReport {
    fn headers(&self) -> Vec<&'static str> {
        CASES_HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.case_id.to_string(),
                    r.x.to_string(),
                    serde_json::to_value(r.comparison)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    r.block_size.to_string(),
                    format_rational(&r.printed),
                    r.expanded.as_ref().map(format_rational).unwrap_or_default(),
                    r.expanded_corrected.as_ref().map(format_rational).unwrap_or_default(),
                    r.recomputed.to_string(),
                    r.positive.to_string(),
                    r.printed_matches.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadoutEntry {
    /// Qubit 0 first.
    pub outcome: String,
    pub probability: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulateReport {
    pub scenario: String,
    pub target: String,
    pub stage_probabilities: Vec<String>,
    pub p_success: String,
    pub final_terms: usize,
    pub fidelity: String,
    pub proportional: bool,
    pub readout: Vec<ReadoutEntry>,
    pub double_xpm: BTreeMap<String, bool>,
}

pub fn simulate_report(scenario: &Scenario, target: &HyperState) -> Result<SimulateReport> {
    let out = photonic::run_scenario(scenario)?;
    let fid = photonic::fidelity_to(&out.final_state, target)?;
    let readout = photonic::measurement_readout(&out.final_state)?
        .into_iter()
        .map(|(bits, p)| ReadoutEntry {
            outcome: photonic::format_outcome(bits),
            probability: p.to_string(),
        })
        .collect();
    let double_xpm = BTreeMap::from([
        (
            "qnd1".to_string(),
            photonic::double_xpm_equivalence(&photonic::qnd1_double_probe()),
        ),
        (
            "qnd2".to_string(),
            photonic::double_xpm_equivalence(&photonic::qnd2_double_probe()),
        ),
    ]);
    Ok(SimulateReport {
        scenario: scenario.name.clone(),
        target: target.to_string(),
        stage_probabilities: out.stage_probabilities.iter().map(ToString::to_string).collect(),
        p_success: out.p_success.to_string(),
        final_terms: out.final_state.len(),
        fidelity: fid.fidelity.to_string(),
        proportional: fid.proportional,
        readout,
        double_xpm,
    })
}

impl Tabular for SimulateReport {
    fn headers(&self) -> Vec<&'static str> {
        vec!["field", "value"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut pairs = vec![
            ("scenario", self.scenario.clone()),
            ("target", self.target.clone()),
            ("stage_probabilities", self.stage_probabilities.join(" ")),
            ("p_success", self.p_success.clone()),
            ("final_terms", self.final_terms.to_string()),
            ("fidelity", self.fidelity.clone()),
            ("proportional", self.proportional.to_string()),
        ];
        for (k, v) in &self.double_xpm {
            pairs.push((
                if k == "qnd1" {
                    "double_xpm_qnd1"
                } else {
                    "double_xpm_qnd2"
                },
                v.to_string(),
            ));
        }
        let mut rows = kv_rows(pairs);
        for e in &self.readout {
            rows.push(vec![format!("readout {}", e.outcome), e.probability.clone()]);
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_spec_forms() {
        let s = parse_state_spec("4:0000,4:0101,4:0000").unwrap();
        assert_eq!(s.blocks()[1].mask_string(), "0101");
        let json = state_json(&s);
        assert_eq!(parse_state_spec(&json).unwrap(), s);
        assert_eq!(parse_state_spec("12:000000000000").unwrap().n(), 12);
        assert!(matches!(parse_state_spec("4:1000"), Err(Error::Parse { .. })));
        assert!(parse_state_spec(r#"{"blocks":[]}"#).is_err());
    }

    #[test]
    fn count_for_twelve_qubit_state() {
        let r = count_report(&HyperState::four_photon_twelve_qubit(), &EnumOptions::default()).unwrap();
        assert_eq!(r.negatives_closed, "2016");
        assert_eq!(r.negatives_enumerated, Some(2016));
        assert_eq!(r.positives, "2080");
        let big = parse_state_spec("40:0000000000000000000000000000000000000000").unwrap();
        let r = count_report(&big, &EnumOptions::default()).unwrap();
        assert!(r.negatives_enumerated.is_none());
        assert!(r.enumeration_skipped.is_some());
    }

    #[test]
    fn closed_form_blocks() {
        let r = closed_form_report(&HyperState::four_photon_twelve_qubit(), Some(12)).unwrap();
        assert_eq!(r.blocks.len(), 3);
        assert_eq!(r.blocks[0].negatives, "6");
        assert_eq!(r.blocks[0].c_binomial.as_deref(), Some("6"));
        assert!(r.blocks[1].c_cases.is_none());
        assert_eq!(r.negatives, "2016");
        assert_eq!(r.all_plus_bound, "64");
        assert!(r.ordering.unwrap().ordered);
    }

    #[test]
    fn table1_rows() {
        let t = table1(&ReportOptions {
            restarts: 4,
            ..ReportOptions::default()
        })
        .unwrap();
        let row = |l: &str| t.rows.iter().find(|r| r.label == l).unwrap();
        assert_eq!(row("psi").computed_bound, 64);
        assert_eq!(row("psi").computed_d.rendered, "64.00");
        assert!(!row("psi").matches_printed);
        assert_eq!(row("psi_prime").computed_bound, 1024);
        assert!(row("psi_prime").matches_printed);
        assert_eq!(row("psi_double_prime").computed_d.rendered, "2.06");
        assert!(row("psi_double_prime").matches_printed);
        assert_eq!(t.rows().len(), 3);
    }

    #[test]
    fn cases_rows() {
        let r = cases_report(3).unwrap();
        assert_eq!(r.headers(), CASES_HEADER.to_vec());
        let case10: Vec<_> = r.rows().into_iter().filter(|row| row[0] == "10").collect();
        assert!(!case10.is_empty());
        assert!(case10.iter().all(|row| !row[6].is_empty()));
    }

    #[test]
    fn simulate_generation_scenario() {
        let r = simulate_report(
            &photonic::generation_scenario(),
            &HyperState::four_photon_twelve_qubit(),
        )
        .unwrap();
        assert_eq!(r.fidelity, "1");
        assert_eq!(r.p_success, "1/8");
        assert_eq!(r.readout.len(), 8);
        assert!(r.double_xpm.values().all(|v| *v));
    }
}
