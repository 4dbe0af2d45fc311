// SPDX-License-Identifier: Apache-2.0

//! Exact amplitude simulation of the four-photon generation protocol.
//!
//! Each photon carries a polarization, a frequency and a path label. Linear
//! elements (polarizing beam splitters, demultiplexers, multiplexers) relabel
//! paths; cross-Kerr nondemolition stages are ideal projective filters that
//! keep the terms whose summed phase multiplier equals the accepted value.
//! Amplitudes are Gaussian rationals, so every norm and fidelity is exact.
//!
//! Photon labels stay attached to the photon through the beam splitters. At
//! readout the photon found in output port `p'j` is read as photon `p`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stabilizer::{self, HyperState};

pub type Amplitude = Complex<Rational64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Photon {
    A,
    B,
    C,
    D,
}

impl Photon {
    pub const ALL: [Photon; 4] = [Photon::A, Photon::B, Photon::C, Photon::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }

    fn from_char(c: char) -> Option<Photon> {
        match c {
            'a' => Some(Photon::A),
            'b' => Some(Photon::B),
            'c' => Some(Photon::C),
            'd' => Some(Photon::D),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Polarization {
    H,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Frequency {
    W1,
    W2,
}

impl Frequency {
    fn other(self) -> Self {
        match self {
            Frequency::W1 => Frequency::W2,
            Frequency::W2 => Frequency::W1,
        }
    }
}

/// Path vocabulary: source modes `p1, p2`, demultiplexed modes `pij`
/// (source `i`, frequency `j`) and output modes `p'1, p'2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathKind {
    Source(u8),
    Split(u8, u8),
    Output(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub port: Photon,
    pub kind: PathKind,
}

impl Path {
    pub const fn new(port: Photon, kind: PathKind) -> Self {
        Path { port, kind }
    }

    pub fn is_output(&self) -> bool {
        matches!(self.kind, PathKind::Output(_))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.port.as_char();
        match self.kind {
            PathKind::Source(i) => write!(f, "{p}{i}"),
            PathKind::Split(i, j) => write!(f, "{p}{i}{j}"),
            PathKind::Output(i) => write!(f, "{p}'{i}"),
        }
    }
}

impl FromStr for Path {
    type Err = Error;

    /// Accepts `a1`, `b12`, `a'1` and `a′1`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownPath(s.to_string());
        let mut chars = s.chars();
        let port = chars.next().and_then(Photon::from_char).ok_or_else(unknown)?;
        let rest: String = chars.collect();
        let digit = |c: char| match c {
            '1' => Some(1u8),
            '2' => Some(2u8),
            _ => None,
        };
        let tail: Vec<char> = rest.chars().collect();
        let kind = match tail.as_slice() {
            [i] => PathKind::Source(digit(*i).ok_or_else(unknown)?),
            [i, j] if *i != '\'' && *i != '′' => {
                PathKind::Split(digit(*i).ok_or_else(unknown)?, digit(*j).ok_or_else(unknown)?)
            }
            ['\'' | '′', i] => PathKind::Output(digit(*i).ok_or_else(unknown)?),
            _ => return Err(unknown()),
        };
        Ok(Path { port, kind })
    }
}

impl Serialize for Path {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Path {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PhotonMode {
    pub photon: Photon,
    pub polarization: Polarization,
    pub frequency: Frequency,
    pub path: Path,
}

/// One joint mode tuple, indexed by photon.
pub type TermKey = [PhotonMode; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Source,
    Pbs,
    Qnd,
    Od,
    Om,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    terms: BTreeMap<TermKey, Amplitude>,
    stage: Stage,
}

fn amp_one() -> Amplitude {
    Complex::new(Rational64::one(), Rational64::zero())
}

fn norm_sqr(a: &Amplitude) -> Rational64 {
    a.re * a.re + a.im * a.im
}

impl AmplitudeState {
    pub fn terms(&self) -> &BTreeMap<TermKey, Amplitude> {
        &self.terms
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn squared_norm(&self) -> Rational64 {
        self.terms.values().map(norm_sqr).sum()
    }

    pub fn amplitude(&self, key: &TermKey) -> Amplitude {
        self.terms.get(key).cloned().unwrap_or_else(Amplitude::zero)
    }

    /// Every photon sits on an output path.
    pub fn is_final(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|m| m.path.is_output()))
    }

    fn from_terms(terms: BTreeMap<TermKey, Amplitude>, stage: Stage) -> Self {
        let terms = terms.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        AmplitudeState { terms, stage }
    }

    /// Relabels every photon mode; relabeling must be injective on terms.
    fn relabel(&self, stage: Stage, f: impl Fn(&PhotonMode) -> Path) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (key, amp) in &self.terms {
            let new_key = key.map(|m| PhotonMode { path: f(&m), ..m });
            if out.insert(new_key, *amp).is_some() {
                return Err(Error::Modeling(format!(
                    "two terms map onto the same mode tuple {}",
                    describe_key(&new_key)
                )));
            }
        }
        Ok(AmplitudeState::from_terms(out, stage))
    }
}

pub fn describe_key(key: &TermKey) -> String {
    key.iter()
        .map(|m| {
            format!(
                "{}:{:?},{},{}",
                m.photon.as_char(),
                m.polarization,
                match m.frequency {
                    Frequency::W1 => "w1",
                    Frequency::W2 => "w2",
                },
                m.path
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Two SPDC pairs `(HH+VV)(w1w2+w2w1)(a1b1+a2b2)` and the same for `c, d`,
/// unnormalized: 64 terms of amplitude 1.
pub fn spdc_initial() -> AmplitudeState {
    let mut terms = BTreeMap::new();
    let pols = [Polarization::H, Polarization::V];
    let freqs = [Frequency::W1, Frequency::W2];
    let pair = |first: Photon, second: Photon| {
        let mut out = Vec::new();
        for pol in pols {
            for f in freqs {
                for i in [1u8, 2] {
                    let mode = |photon: Photon, frequency| PhotonMode {
                        photon,
                        polarization: pol,
                        frequency,
                        path: Path::new(photon, PathKind::Source(i)),
                    };
                    out.push((mode(first, f), mode(second, f.other())));
                }
            }
        }
        out
    };
    for (a, b) in pair(Photon::A, Photon::B) {
        for (c, d) in pair(Photon::C, Photon::D) {
            terms.insert([a, b, c, d], amp_one());
        }
    }
    AmplitudeState::from_terms(terms, Stage::Source)
}

/// Polarizing beam splitter joining two input paths. A photon entering from
/// `inputs[k]` leaves through `outputs[k]` if H and `outputs[1 - k]` if V.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pbs {
    pub inputs: [Path; 2],
    pub outputs: [Path; 2],
}

pub fn apply_pbs(state: &AmplitudeState, pbs: &Pbs) -> Result<AmplitudeState> {
    state.relabel(Stage::Pbs, |m| match pbs.inputs.iter().position(|p| *p == m.path) {
        Some(k) => match m.polarization {
            Polarization::H => pbs.outputs[k],
            Polarization::V => pbs.outputs[1 - k],
        },
        None => m.path,
    })
}

/// Ideal nondemolition filter: keeps terms whose summed phase multiplier
/// equals `keep_total`. Paths absent from `shifts` contribute 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QndConfig {
    pub shifts: BTreeMap<Path, i64>,
    pub keep_total: i64,
}

impl QndConfig {
    pub fn total_shift<'a>(&self, paths: impl IntoIterator<Item = &'a Path>) -> i64 {
        paths
            .into_iter()
            .map(|p| self.shifts.get(p).copied().unwrap_or(0))
            .sum()
    }

    pub fn accepts<'a>(&self, paths: impl IntoIterator<Item = &'a Path>) -> bool {
        self.total_shift(paths) == self.keep_total
    }
}

/// Returns the post-selected state and its success probability.
pub fn apply_qnd(state: &AmplitudeState, cfg: &QndConfig) -> Result<(AmplitudeState, Rational64)> {
    let input_norm = state.squared_norm();
    let kept: BTreeMap<TermKey, Amplitude> = state
        .terms
        .iter()
        .filter(|(k, _)| cfg.accepts(k.iter().map(|m| &m.path)))
        .map(|(k, a)| (*k, *a))
        .collect();
    let out = AmplitudeState::from_terms(kept, Stage::Qnd);
    if out.is_empty() {
        return Err(Error::EmptyPostSelection(format!(
            "no term reaches total phase {}",
            cfg.keep_total
        )));
    }
    let p = out.squared_norm() / input_norm;
    Ok((out, p))
}

/// Optical demultiplexer: w1 goes to `outputs[0]`, w2 to `outputs[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Od {
    pub input: Path,
    pub outputs: [Path; 2],
}

pub fn apply_od(state: &AmplitudeState, od: &Od) -> Result<AmplitudeState> {
    state.relabel(Stage::Od, |m| {
        if m.path == od.input {
            match m.frequency {
                Frequency::W1 => od.outputs[0],
                Frequency::W2 => od.outputs[1],
            }
        } else {
            m.path
        }
    })
}

/// Optical multiplexer merging two paths into one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Om {
    pub inputs: [Path; 2],
    pub output: Path,
}

pub fn apply_om(state: &AmplitudeState, om: &Om) -> Result<AmplitudeState> {
    state.relabel(
        Stage::Om,
        |m| if om.inputs.contains(&m.path) { om.output } else { m.path },
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    Pbs(Pbs),
    Qnd(QndConfig),
    Od(Od),
    Om(Om),
}

/// Element list applied to [`spdc_initial`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub elements: Vec<Element>,
}

fn path(s: &str) -> Path {
    s.parse().expect("static path label")
}

fn shifts(pairs: &[(&str, i64)]) -> BTreeMap<Path, i64> {
    pairs.iter().map(|(p, v)| (path(p), *v)).collect()
}

/// QND1 on photons `a, c`: `a'1: 3, c'1: -2, a'2: 2, c'2: -1`, keep 1.
pub fn qnd1_config() -> QndConfig {
    QndConfig {
        shifts: shifts(&[("a'1", 3), ("c'1", -2), ("a'2", 2), ("c'2", -1)]),
        keep_total: 1,
    }
}

/// QND2 on photons `b, d`. The eight multipliers are listed against the
/// w1 modes first (`b11, b21, d11, d21`) and then the w2 modes; this is the
/// only ordering under which exactly the pairs `b11-d11, b12-d12, b21-d21,
/// b22-d22` sum to 1.
pub fn qnd2_config() -> QndConfig {
    QndConfig {
        shifts: shifts(&[
            ("b11", 2),
            ("b21", 4),
            ("d11", -1),
            ("d21", -3),
            ("b12", 3),
            ("b22", 5),
            ("d12", -2),
            ("d22", -4),
        ]),
        keep_total: 1,
    }
}

/// The full generation protocol: PBS stage, QND1, demultiplexers, QND2,
/// multiplexers.
pub fn generation_scenario() -> Scenario {
    let mut elements = vec![
        Element::Pbs(Pbs {
            inputs: [path("a1"), path("c1")],
            outputs: [path("a'1"), path("c'1")],
        }),
        Element::Pbs(Pbs {
            inputs: [path("a2"), path("c2")],
            outputs: [path("a'2"), path("c'2")],
        }),
        Element::Qnd(qnd1_config()),
    ];
    for p in ["b", "d"] {
        for i in ["1", "2"] {
            elements.push(Element::Od(Od {
                input: path(&format!("{p}{i}")),
                outputs: [path(&format!("{p}{i}1")), path(&format!("{p}{i}2"))],
            }));
        }
    }
    elements.push(Element::Qnd(qnd2_config()));
    for p in ["b", "d"] {
        for i in ["1", "2"] {
            elements.push(Element::Om(Om {
                inputs: [path(&format!("{p}{i}1")), path(&format!("{p}{i}2"))],
                output: path(&format!("{p}'{i}")),
            }));
        }
    }
    Scenario {
        name: "four-photon twelve-qubit generation".into(),
        elements,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub final_state: AmplitudeState,
    /// Product of all post-selection probabilities.
    pub p_success: Rational64,
    pub stage_probabilities: Vec<Rational64>,
}

pub fn run_scenario(scenario: &Scenario) -> Result<ProtocolOutcome> {
    let mut state = spdc_initial();
    let mut p_success = Rational64::one();
    let mut stage_probabilities = Vec::new();
    for el in &scenario.elements {
        state = match el {
            Element::Pbs(pbs) => apply_pbs(&state, pbs)?,
            Element::Od(od) => apply_od(&state, od)?,
            Element::Om(om) => apply_om(&state, om)?,
            Element::Qnd(cfg) => {
                let (next, p) = apply_qnd(&state, cfg)?;
                p_success *= p;
                stage_probabilities.push(p);
                next
            }
        };
    }
    Ok(ProtocolOutcome {
        final_state: state,
        p_success,
        stage_probabilities,
    })
}

pub fn run_protocol() -> Result<ProtocolOutcome> {
    run_scenario(&generation_scenario())
}

/// Qubit layout of a readout: polarization of photon `k` is qubit `k`,
/// frequency qubit `4 + k`, spatial qubit `8 + k`; H, w1 and path 1 read 0.
pub fn outcome_of(key: &TermKey) -> Result<u16> {
    let mut bits = 0u16;
    for port in Photon::ALL {
        let mut found = key.iter().filter(|m| m.path.port == port && m.path.is_output());
        let (m, extra) = (found.next(), found.next());
        let m = match (m, extra) {
            (Some(m), None) => m,
            _ => {
                return Err(Error::Modeling(format!(
                    "output port {} is not occupied by exactly one photon",
                    port.as_char()
                )))
            }
        };
        let k = port.index();
        let spatial = match m.path.kind {
            PathKind::Output(i) => i == 2,
            _ => unreachable!("filtered to outputs"),
        };
        bits |= ((m.polarization == Polarization::V) as u16) << k;
        bits |= ((m.frequency == Frequency::W2) as u16) << (4 + k);
        bits |= (spatial as u16) << (8 + k);
    }
    Ok(bits)
}

pub fn format_outcome(bits: u16) -> String {
    (0..12).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect()
}

/// Amplitudes on 12-qubit basis states, summing terms with equal readouts.
pub fn qubit_amplitudes(state: &AmplitudeState) -> Result<BTreeMap<u16, Amplitude>> {
    if !state.is_final() {
        return Err(Error::Modeling(format!(
            "readout needs every photon on an output path (stage {:?})",
            state.stage
        )));
    }
    let mut out: BTreeMap<u16, Amplitude> = BTreeMap::new();
    for (key, amp) in &state.terms {
        *out.entry(outcome_of(key)?).or_insert_with(Amplitude::zero) += amp;
    }
    out.retain(|_, a| !a.is_zero());
    Ok(out)
}

/// Detection probabilities over 12-bit outcomes.
pub fn measurement_readout(state: &AmplitudeState) -> Result<BTreeMap<u16, Rational64>> {
    let amps = qubit_amplitudes(state)?;
    let total: Rational64 = amps.values().map(norm_sqr).sum();
    Ok(amps.iter().map(|(k, a)| (*k, norm_sqr(a) / total)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FidelityCheck {
    pub fidelity: Rational64,
    /// The readout amplitudes are a scalar multiple of the target vector.
    pub proportional: bool,
}

/// Exact fidelity of a final state against the product GHZ state of `target`.
pub fn fidelity_to(state: &AmplitudeState, target: &HyperState) -> Result<FidelityCheck> {
    if target.n() != 12 {
        return Err(Error::DimensionMismatch {
            left: 12,
            right: target.n(),
        });
    }
    let amps = qubit_amplitudes(state)?;
    let support: BTreeSet<u16> = stabilizer::support_indices(target)?
        .into_iter()
        .map(|i| i as u16)
        .collect();
    let overlap: Amplitude = support
        .iter()
        .map(|k| amps.get(k).cloned().unwrap_or_else(Amplitude::zero))
        .sum();
    let state_norm: Rational64 = amps.values().map(norm_sqr).sum();
    let target_norm = Rational64::from_integer(support.len() as i64);
    let fidelity = norm_sqr(&overlap) / (state_norm * target_norm);
    let keys: BTreeSet<u16> = amps.keys().copied().collect();
    let proportional = keys == support && {
        let first = amps.values().next().cloned();
        amps.values().all(|a| Some(*a) == first)
    };
    Ok(FidelityCheck { fidelity, proportional })
}

/// Two probe beams with non-negative multipliers; accepted when both beams
/// accumulate the same phase, i.e. vacuum at one port of the recombining
/// beam splitter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleXpmConfig {
    pub upper: BTreeMap<Path, u32>,
    pub lower: BTreeMap<Path, u32>,
}

impl DoubleXpmConfig {
    pub fn accepts<'a>(&self, paths: impl IntoIterator<Item = &'a Path> + Clone) -> bool {
        let phase = |beam: &BTreeMap<Path, u32>| -> u64 {
            paths
                .clone()
                .into_iter()
                .map(|p| beam.get(p).copied().unwrap_or(0) as u64)
                .sum()
        };
        phase(&self.upper) == phase(&self.lower)
    }
}

/// A single-probe filter, its double-probe counterpart, and the paths each
/// participating photon may occupy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XpmPair {
    pub single: QndConfig,
    pub double: DoubleXpmConfig,
    pub domain: Vec<Vec<Path>>,
}

fn joint_configurations(domain: &[Vec<Path>]) -> Vec<Vec<Path>> {
    domain.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|prefix| {
                options.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(*p);
                    v
                })
            })
            .collect()
    })
}

pub fn single_accept_set(pair: &XpmPair) -> BTreeSet<Vec<Path>> {
    joint_configurations(&pair.domain)
        .into_iter()
        .filter(|c| pair.single.accepts(c.iter()))
        .collect()
}

pub fn double_accept_set(pair: &XpmPair) -> BTreeSet<Vec<Path>> {
    joint_configurations(&pair.domain)
        .into_iter()
        .filter(|c| pair.double.accepts(c.iter()))
        .collect()
}

pub fn double_xpm_equivalence(pair: &XpmPair) -> bool {
    single_accept_set(pair) == double_accept_set(pair)
}

fn beam(pairs: &[(&str, u32)]) -> BTreeMap<Path, u32> {
    pairs.iter().map(|(p, v)| (path(p), *v)).collect()
}

/// Double probe replacing QND1: `theta, 2theta` on `a'1, a'2` in one beam and
/// on `c'1, c'2` in the other. Either photon may reach any of the four ports.
pub fn qnd1_double_probe() -> XpmPair {
    let ports: Vec<Path> = ["a'1", "a'2", "c'1", "c'2"].iter().map(|p| path(p)).collect();
    XpmPair {
        single: qnd1_config(),
        double: DoubleXpmConfig {
            upper: beam(&[("a'1", 1), ("a'2", 2)]),
            lower: beam(&[("c'1", 1), ("c'2", 2)]),
        },
        domain: vec![ports.clone(), ports],
    }
}

/// Double probe replacing QND2: `theta..4theta` on `b11, b12, b21, b22` in one
/// beam and on the matching `d` modes in the other.
pub fn qnd2_double_probe() -> XpmPair {
    let modes = |p: &str| -> Vec<Path> {
        ["11", "12", "21", "22"]
            .iter()
            .map(|s| path(&format!("{p}{s}")))
            .collect()
    };
    XpmPair {
        single: qnd2_config(),
        double: DoubleXpmConfig {
            upper: beam(&[("b11", 1), ("b12", 2), ("b21", 3), ("b22", 4)]),
            lower: beam(&[("d11", 1), ("d12", 2), ("d21", 3), ("d22", 4)]),
        },
        domain: vec![modes("b"), modes("d")],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn mode(photon: Photon, polarization: Polarization, frequency: Frequency, p: &str) -> PhotonMode {
        PhotonMode {
            photon,
            polarization,
            frequency,
            path: path(p),
        }
    }

    fn single_photon_state(m: PhotonMode) -> AmplitudeState {
        // Other photons parked on unrelated source paths.
        let filler = |ph: Photon| mode(ph, Polarization::H, Frequency::W1, &format!("{}2", ph.as_char()));
        let mut key = Photon::ALL.map(filler);
        key[m.photon.index()] = m;
        AmplitudeState::from_terms(BTreeMap::from([(key, amp_one())]), Stage::Source)
    }

    #[test]
    fn path_labels_round_trip() {
        for s in ["a1", "a2", "a'1", "b12", "d22", "c'2"] {
            assert_eq!(path(s).to_string(), s);
        }
        assert_eq!("a′1".parse::<Path>().unwrap(), path("a'1"));
        for bad in ["e1", "a3", "a", "a'", "a123", "b1'"] {
            assert!(matches!(bad.parse::<Path>(), Err(Error::UnknownPath(_))), "{bad}");
        }
    }

    #[test]
    fn spdc_terms() {
        let s = spdc_initial();
        assert_eq!(s.len(), 64);
        let key = [
            mode(Photon::A, Polarization::H, Frequency::W1, "a1"),
            mode(Photon::B, Polarization::H, Frequency::W2, "b1"),
            mode(Photon::C, Polarization::H, Frequency::W1, "c1"),
            mode(Photon::D, Polarization::H, Frequency::W2, "d1"),
        ];
        assert_eq!(s.amplitude(&key), amp_one());
        assert!(s.terms().keys().all(|k| k[0].polarization == k[1].polarization));
        assert!(s.terms().values().all(|a| *a == amp_one()));
    }

    #[test]
    fn pbs_port_map() {
        let pbs = Pbs {
            inputs: [path("a1"), path("c1")],
            outputs: [path("a'1"), path("c'1")],
        };
        let h = apply_pbs(
            &single_photon_state(mode(Photon::A, Polarization::H, Frequency::W1, "a1")),
            &pbs,
        )
        .unwrap();
        assert_eq!(h.terms().keys().next().unwrap()[0].path, path("a'1"));
        let v = apply_pbs(
            &single_photon_state(mode(Photon::A, Polarization::V, Frequency::W1, "a1")),
            &pbs,
        )
        .unwrap();
        assert_eq!(v.terms().keys().next().unwrap()[0].path, path("c'1"));
        let s = spdc_initial();
        let out = apply_pbs(&s, &pbs).unwrap();
        assert_eq!(out.len(), s.len());
        assert_eq!(out.squared_norm(), s.squared_norm());
    }

    #[test]
    fn qnd1_keeps_matching_pairs() {
        let cfg = qnd1_config();
        let ok = |a: &str, c: &str| cfg.accepts([path(a), path(c)].iter());
        assert!(ok("a'1", "c'1"));
        assert!(ok("a'2", "c'2"));
        assert!(!ok("a'1", "c'2"));
        assert!(!ok("a'2", "c'1"));
        assert!(!ok("a'1", "a'1"));
    }

    #[test]
    fn qnd2_accepts_exactly_four_pairs() {
        let cfg = qnd2_config();
        let mut kept = Vec::new();
        for bi in ["11", "12", "21", "22"] {
            for di in ["11", "12", "21", "22"] {
                if cfg.accepts([path(&format!("b{bi}")), path(&format!("d{di}"))].iter()) {
                    kept.push((bi, di));
                }
            }
        }
        assert_eq!(kept, [("11", "11"), ("12", "12"), ("21", "21"), ("22", "22")]);
    }

    #[test]
    fn identity_qnd() {
        let s = spdc_initial();
        let (out, p) = apply_qnd(
            &s,
            &QndConfig {
                shifts: BTreeMap::new(),
                keep_total: 0,
            },
        )
        .unwrap();
        assert_eq!(out.terms(), s.terms());
        assert_eq!(p, Rational64::one());
    }

    #[test]
    fn unreachable_qnd_is_an_error() {
        let cfg = QndConfig {
            shifts: BTreeMap::new(),
            keep_total: 5,
        };
        assert!(matches!(
            apply_qnd(&spdc_initial(), &cfg),
            Err(Error::EmptyPostSelection(_))
        ));
    }

    #[test]
    fn od_and_om() {
        let od = Od {
            input: path("b1"),
            outputs: [path("b11"), path("b12")],
        };
        let s1 = apply_od(
            &single_photon_state(mode(Photon::B, Polarization::H, Frequency::W1, "b1")),
            &od,
        )
        .unwrap();
        assert_eq!(s1.terms().keys().next().unwrap()[1].path, path("b11"));
        let s2 = apply_od(
            &single_photon_state(mode(Photon::B, Polarization::H, Frequency::W2, "b1")),
            &od,
        )
        .unwrap();
        assert_eq!(s2.terms().keys().next().unwrap()[1].path, path("b12"));
        let om = Om {
            inputs: [path("b11"), path("b12")],
            output: path("b'1"),
        };
        assert_eq!(
            apply_om(&s1, &om).unwrap().terms().keys().next().unwrap()[1].path,
            path("b'1")
        );
        assert_eq!(
            apply_om(&s2, &om).unwrap().terms().keys().next().unwrap()[1].path,
            path("b'1")
        );
    }

    #[test]
    fn od_then_om_is_identity() {
        let s = spdc_initial();
        let od = Od {
            input: path("d2"),
            outputs: [path("d21"), path("d22")],
        };
        let om = Om {
            inputs: [path("d21"), path("d22")],
            output: path("d2"),
        };
        let back = apply_om(&apply_od(&s, &od).unwrap(), &om).unwrap();
        assert_eq!(back.terms(), s.terms());
    }

    #[test]
    fn om_collision_is_detected() {
        let one = single_photon_state(mode(Photon::B, Polarization::H, Frequency::W1, "b1"));
        let two = single_photon_state(mode(Photon::B, Polarization::H, Frequency::W1, "b2"));
        let mut terms = one.terms().clone();
        terms.extend(two.terms().clone());
        let both = AmplitudeState::from_terms(terms, Stage::Source);
        let om = Om {
            inputs: [path("b1"), path("b2")],
            output: path("b'1"),
        };
        assert!(matches!(apply_om(&both, &om), Err(Error::Modeling(_))));
        let spdc = spdc_initial();
        assert_eq!(apply_om(&spdc, &om).unwrap().len(), spdc.len());
    }

    #[test]
    fn protocol_output() {
        let out = run_protocol().unwrap();
        assert_eq!(out.final_state.len(), 8);
        assert!(out.final_state.is_final());
        assert_eq!(out.stage_probabilities, vec![r(1, 4), r(1, 2)]);
        let fid = fidelity_to(&out.final_state, &HyperState::four_photon_twelve_qubit()).unwrap();
        assert_eq!(fid.fidelity, Rational64::one());
        assert!(fid.proportional);
    }

    #[test]
    fn readout_distribution() {
        let out = run_protocol().unwrap();
        let dist = measurement_readout(&out.final_state).unwrap();
        assert_eq!(dist.len(), 8);
        assert!(dist.values().all(|p| *p == r(1, 8)));
        assert_eq!(dist.get(&0b0000_1010_0000), Some(&r(1, 8)));
        // H on photon a with V on photon b never occurs.
        assert!(dist.keys().all(|k| (k & 1) == ((k >> 1) & 1)));
    }

    #[test]
    fn readout_rejects_intermediate_state() {
        assert!(matches!(measurement_readout(&spdc_initial()), Err(Error::Modeling(_))));
    }

    #[test]
    fn double_xpm() {
        assert!(double_xpm_equivalence(&qnd1_double_probe()));
        assert!(double_xpm_equivalence(&qnd2_double_probe()));
        let accepted = single_accept_set(&qnd1_double_probe());
        assert_eq!(accepted.len(), 4);
        let mut degenerate = qnd1_double_probe();
        degenerate.double.upper = beam(&[("a'1", 1), ("a'2", 1), ("c'1", 1), ("c'2", 1)]);
        degenerate.double.lower = BTreeMap::new();
        assert!(double_accept_set(&degenerate).is_empty());
        assert!(!double_xpm_equivalence(&degenerate));
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = generation_scenario();
        let text = serde_json::to_string_pretty(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(text.contains("\"kind\": \"pbs\""));
        assert!(serde_json::from_str::<Scenario>(
            r#"{"name":"x","elements":[{"kind":"od","input":"q1","outputs":["b11","b12"]}]}"#
        )
        .is_err());
    }
}
