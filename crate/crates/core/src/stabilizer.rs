// SPDX-License-Identifier: Apache-2.0

//! Stabilizer groups of products of GHZ blocks.
//!
//! Each [`GhzBlock`] of `m` qubits with parity pattern `b` is the state
//! `|b> + |~b>`. It is stabilized by `X^{⊗m}` and by the nearest-neighbour
//! chain `Z_j Z_{j+1}`, the latter signed `-1` when bits `j` and `j+1` of `b`
//! differ. A [`HyperState`] is a tensor product of blocks, so its generators
//! are the block generators padded with identities, `n` in total.
//!
//! Group enumeration walks the `2^n` generator subsets in Gray-code order, so
//! each step is a single generator multiplication on packed `u64` masks.

use std::fmt;
use std::str::FromStr;
use std::thread;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::closed_forms;
use crate::error::{Error, Result};
use crate::pauli::{GaussInt, PauliString, Sign};

/// Default cap on `n` for full group enumeration.
pub const DEFAULT_GUARD_BITS: usize = 34;
/// Hard ceiling for the enumeration guard (subsets are tracked in a `u64`).
pub const MAX_GUARD_BITS: usize = 63;
/// Largest `n` for which [`state_vector`] materializes `2^n` amplitudes.
pub const STATE_VECTOR_MAX_QUBITS: usize = 24;
/// Masked blocks up to this size are counted by enumeration in
/// [`count_negative_closed`]; larger ones use the phase-sum formula.
const MASKED_BLOCK_ENUM_LIMIT: usize = 24;

pub const DOF_DEFAULT_LABELS: [&str; 3] = ["polarization", "frequency", "spatial"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GhzBlockRepr", into = "GhzBlockRepr")]
pub struct GhzBlock {
    parity: Vec<bool>,
    dof_label: String,
}

#[derive(Serialize, Deserialize)]
struct GhzBlockRepr {
    m: usize,
    parity_mask: String,
    dof_label: String,
}

impl TryFrom<GhzBlockRepr> for GhzBlock {
    type Error = Error;

    fn try_from(r: GhzBlockRepr) -> Result<Self> {
        let block = GhzBlock::from_mask_str(&r.parity_mask, r.dof_label)?;
        if block.m() != r.m {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("mask length {} does not match m = {}", block.m(), r.m),
            });
        }
        Ok(block)
    }
}

impl From<GhzBlock> for GhzBlockRepr {
    fn from(b: GhzBlock) -> Self {
        GhzBlockRepr {
            m: b.m(),
            parity_mask: b.mask_string(),
            dof_label: b.dof_label,
        }
    }
}

impl GhzBlock {
    /// An aligned block `|0..0> + |1..1>`.
    pub fn aligned(m: usize, dof_label: impl Into<String>) -> Result<Self> {
        GhzBlock::new(vec![false; m], dof_label)
    }

    pub fn new(parity: Vec<bool>, dof_label: impl Into<String>) -> Result<Self> {
        if parity.len() < 2 {
            return Err(Error::Domain(format!(
                "GHZ block needs at least 2 qubits, got {}",
                parity.len()
            )));
        }
        if parity[0] {
            return Err(Error::Domain("parity mask bit 0 must be 0".into()));
        }
        Ok(GhzBlock {
            parity,
            dof_label: dof_label.into(),
        })
    }

    /// Parses a mask such as `"0101"`; character `j` is qubit `j`.
    pub fn from_mask_str(mask: &str, dof_label: impl Into<String>) -> Result<Self> {
        let parity = mask
            .chars()
            .enumerate()
            .map(|(k, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    pos: k,
                    msg: format!("mask character `{other}` is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        GhzBlock::new(parity, dof_label)
    }

    pub fn m(&self) -> usize {
        self.parity.len()
    }

    pub fn parity(&self) -> &[bool] {
        &self.parity
    }

    pub fn is_aligned(&self) -> bool {
        self.parity.iter().all(|b| !b)
    }

    pub fn dof_label(&self) -> &str {
        &self.dof_label
    }

    pub fn mask_string(&self) -> String {
        self.parity.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperState {
    blocks: Vec<GhzBlock>,
}

impl HyperState {
    pub fn new(blocks: Vec<GhzBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Domain("a hyperentangled state needs at least one block".into()));
        }
        Ok(HyperState { blocks })
    }

    /// `count` aligned blocks of `m` qubits each.
    pub fn uniform(count: usize, m: usize) -> Result<Self> {
        let blocks = (0..count)
            .map(|k| GhzBlock::aligned(m, default_dof_label(k)))
            .collect::<Result<Vec<_>>>()?;
        HyperState::new(blocks)
    }

    /// Four photons in polarization, frequency and spatial mode, with the
    /// frequency block anti-correlated as `|w1 w2 w1 w2> + |w2 w1 w2 w1>`.
    pub fn four_photon_twelve_qubit() -> Self {
        HyperState {
            blocks: vec![
                GhzBlock::from_mask_str("0000", "polarization").unwrap(),
                GhzBlock::from_mask_str("0101", "frequency").unwrap(),
                GhzBlock::from_mask_str("0000", "spatial").unwrap(),
            ],
        }
    }

    pub fn blocks(&self) -> &[GhzBlock] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(GhzBlock::m).sum()
    }
}

pub fn default_dof_label(index: usize) -> String {
    DOF_DEFAULT_LABELS
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("dof{index}"))
}

impl fmt::Display for HyperState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", b.m(), b.mask_string())?;
        }
        Ok(())
    }
}

impl FromStr for HyperState {
    type Err = Error;

    /// Parses the compact form `m:mask[:label],m:mask[:label],...`,
    /// e.g. `4:0000,4:0101,4:0000`.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut offset = 0;
        for (k, part) in s.split(',').enumerate() {
            let pos_of = |local: usize| offset + local;
            let mut fields = part.splitn(3, ':');
            let m_text = fields.next().unwrap_or("");
            let m: usize = m_text.trim().parse().map_err(|_| Error::Parse {
                pos: pos_of(0),
                msg: format!("block size `{m_text}` is not a non-negative integer"),
            })?;
            let mask_start = m_text.len() + 1;
            let mask = fields.next().ok_or(Error::Parse {
                pos: pos_of(m_text.len()),
                msg: "expected `:` followed by a parity mask".into(),
            })?;
            let label = fields
                .next()
                .map(str::to_string)
                .unwrap_or_else(|| default_dof_label(k));
            if mask.len() != m {
                return Err(Error::Parse {
                    pos: pos_of(mask_start),
                    msg: format!("mask length {} does not match block size {m}", mask.len()),
                });
            }
            let block = GhzBlock::from_mask_str(mask, label).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse {
                    pos: pos_of(mask_start + pos),
                    msg,
                },
                Error::Domain(msg) => Error::Parse {
                    pos: pos_of(if m < 2 { 0 } else { mask_start }),
                    msg,
                },
                other => other,
            })?;
            blocks.push(block);
            offset += part.len() + 1;
        }
        HyperState::new(blocks)
    }
}

/// A signed, Hermitian group element and the generator subset producing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizerElement {
    pub pauli: PauliString,
    pub subset: u64,
    pub sign: Sign,
}

impl StabilizerElement {
    fn from_pauli(pauli: PauliString, subset: u64) -> Result<Self> {
        let sign = pauli.hermitian_sign()?;
        Ok(StabilizerElement { pauli, subset, sign })
    }
}

/// Generator strings for any `n`, ordered block by block: the X string first,
/// then the ZZ chain from the lowest slot up.
pub fn generator_strings(state: &HyperState) -> Vec<PauliString> {
    let n = state.n();
    let mut out = Vec::with_capacity(n);
    let mut base = 0;
    for block in state.blocks() {
        let m = block.m();
        let mut xs = PauliString::identity(n);
        for j in 0..m {
            xs.set_letter(base + j, crate::pauli::Letter::X);
        }
        out.push(xs);
        for j in 0..m - 1 {
            let mut zz = PauliString::identity(n);
            zz.set_letter(base + j, crate::pauli::Letter::Z);
            zz.set_letter(base + j + 1, crate::pauli::Letter::Z);
            let flipped = block.parity()[j] != block.parity()[j + 1];
            out.push(zz.with_phase(if flipped { 2 } else { 0 }));
        }
        base += m;
    }
    out
}

/// The `n` generators, generator `g` tagged with subset `1 << g`.
pub fn generators(state: &HyperState) -> Result<Vec<StabilizerElement>> {
    check_subset_width(state.n())?;
    generator_strings(state)
        .into_iter()
        .enumerate()
        .map(|(g, p)| StabilizerElement::from_pauli(p, 1 << g))
        .collect()
}

fn check_subset_width(n: usize) -> Result<()> {
    if n > 64 {
        return Err(Error::Capacity {
            what: "generator subset width",
            size: n,
            limit: 64,
        });
    }
    Ok(())
}

/// Ordered product of the generators selected by `subset`.
pub fn element_for_subset(state: &HyperState, subset: u64) -> Result<StabilizerElement> {
    let n = state.n();
    check_subset_width(n)?;
    if n < 64 && subset >> n != 0 {
        return Err(Error::Domain(format!("subset {subset:#x} has bits beyond n = {n}")));
    }
    let mut acc = PauliString::identity(n);
    for (g, gen) in generator_strings(state).iter().enumerate() {
        if subset >> g & 1 == 1 {
            acc = acc.multiply(gen)?;
        }
    }
    StabilizerElement::from_pauli(acc, subset)
}

/// Packed generator in `i^q X^x Z^z` form (not the canonical letter form).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct XzWord {
    pub x: u64,
    pub z: u64,
    pub q: u8,
}

impl XzWord {
    pub const IDENTITY: XzWord = XzWord { x: 0, z: 0, q: 0 };

    fn from_pauli(p: &PauliString) -> Self {
        let (x, z) = (p.x_words()[0], p.z_words()[0]);
        XzWord {
            x,
            z,
            q: ((p.phase_exp() as u32 + (x & z).count_ones()) % 4) as u8,
        }
    }

    #[inline(always)]
    pub fn mul(self, g: XzWord) -> XzWord {
        XzWord {
            x: self.x ^ g.x,
            z: self.z ^ g.z,
            q: (self.q + g.q + 2 * ((self.z & g.x).count_ones() & 1) as u8) & 3,
        }
    }

    /// Phase exponent of the canonical (Y = iXZ) letter form.
    #[inline(always)]
    pub fn canonical_phase(self) -> u8 {
        (self.q.wrapping_sub((self.x & self.z).count_ones() as u8)) & 3
    }
}

/// Enumeration limits and parallelism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub guard_bits: usize,
    pub threads: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            guard_bits: DEFAULT_GUARD_BITS,
            threads: 1,
        }
    }
}

impl EnumOptions {
    pub fn with_threads(threads: usize) -> Self {
        EnumOptions {
            threads: threads.max(1),
            ..EnumOptions::default()
        }
    }
}

pub(crate) fn packed_generators(state: &HyperState, guard_bits: usize) -> Result<Vec<XzWord>> {
    let n = state.n();
    let limit = guard_bits.min(MAX_GUARD_BITS);
    if n > limit {
        return Err(Error::Capacity {
            what: "group enumeration qubit count",
            size: n,
            limit,
        });
    }
    Ok(generator_strings(state).iter().map(XzWord::from_pauli).collect())
}

/// Visits every element of the subgroup spanned by `gens[..low]`, left
/// multiplied by `start`, in Gray-code order.
#[inline(always)]
pub(crate) fn gray_sweep(gens: &[XzWord], low: usize, start: XzWord, mut visit: impl FnMut(XzWord)) {
    let mut cur = start;
    visit(cur);
    let total: u64 = 1 << low;
    for k in 1..total {
        cur = cur.mul(gens[k.trailing_zeros() as usize]);
        visit(cur);
    }
}

/// Splits the subset space into `parts` (rounded down to a power of two)
/// partitions by fixing the high generator bits; returns `(low_bits, starts)`.
pub(crate) fn partition_starts(gens: &[XzWord], parts: usize) -> (usize, Vec<XzWord>) {
    let n = gens.len();
    let high = (usize::BITS - 1 - parts.max(1).leading_zeros()) as usize;
    let high = high.min(n);
    let low = n - high;
    let starts = (0..1u64 << high)
        .map(|p| {
            (0..high)
                .filter(|h| p >> h & 1 == 1)
                .fold(XzWord::IDENTITY, |acc, h| acc.mul(gens[low + h]))
        })
        .collect();
    (low, starts)
}

/// Gray-code iterator over all `2^n` group elements.
pub struct GroupIter {
    gens: Vec<XzWord>,
    n: usize,
    cur: XzWord,
    k: u64,
    total: u64,
}

impl Iterator for GroupIter {
    type Item = StabilizerElement;

    fn next(&mut self) -> Option<StabilizerElement> {
        if self.k >= self.total {
            return None;
        }
        if self.k > 0 {
            self.cur = self.cur.mul(self.gens[self.k.trailing_zeros() as usize]);
        }
        let subset = self.k ^ (self.k >> 1);
        self.k += 1;
        let phase = self.cur.canonical_phase();
        let sign = match phase {
            0 => Sign::Plus,
            2 => Sign::Minus,
            // Commuting Hermitian generators cannot produce an odd phase.
            _ => unreachable!("non-Hermitian stabilizer element"),
        };
        Some(StabilizerElement {
            pauli: PauliString::from_u64(self.n, self.cur.x, self.cur.z, phase),
            subset,
            sign,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.k) as usize;
        (left, Some(left))
    }
}

pub fn enumerate_group(state: &HyperState) -> Result<GroupIter> {
    enumerate_group_with(state, DEFAULT_GUARD_BITS)
}

pub fn enumerate_group_with(state: &HyperState, guard_bits: usize) -> Result<GroupIter> {
    let gens = packed_generators(state, guard_bits)?;
    let n = state.n();
    Ok(GroupIter {
        gens,
        n,
        cur: XzWord::IDENTITY,
        k: 0,
        total: 1 << n,
    })
}

pub fn count_negative(state: &HyperState) -> Result<u64> {
    count_negative_with(state, &EnumOptions::default())
}

/// Counts elements with sign `-1` by full enumeration, optionally split over
/// `opts.threads` partitions.
pub fn count_negative_with(state: &HyperState, opts: &EnumOptions) -> Result<u64> {
    let gens = packed_generators(state, opts.guard_bits)?;
    let (low, starts) = partition_starts(&gens, opts.threads);
    let count_part = |start: XzWord| {
        let mut neg = 0u64;
        let mut odd = 0u8;
        gray_sweep(&gens, low, start, |w| {
            let ph = w.canonical_phase();
            neg += (ph == 2) as u64;
            odd |= ph & 1;
        });
        (neg, odd)
    };
    let results: Vec<(u64, u8)> = if starts.len() == 1 {
        vec![count_part(starts[0])]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = starts.iter().map(|st| s.spawn(move || count_part(*st))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .collect()
        })
    };
    if results.iter().any(|(_, odd)| *odd != 0) {
        return Err(Error::Invariant("enumeration produced a non-Hermitian element".into()));
    }
    Ok(results.iter().map(|(c, _)| c).sum())
}

/// `C_total = (2^n - prod_k (2^{m_k} - 2 C_k)) / 2` from per-block counts.
///
/// An element is negative iff an odd number of its block factors are, so the
/// signed sum over the group factorizes over blocks.
pub fn composite_count(blocks: &[(usize, BigUint)]) -> BigUint {
    let n: usize = blocks.iter().map(|(m, _)| m).sum();
    let product = blocks.iter().fold(BigInt::one(), |acc, (m, c)| {
        let signed_sum = (BigInt::one() << *m) - BigInt::from(c.clone()) * 2;
        acc * signed_sum
    });
    let doubled: BigInt = (BigInt::one() << n) - product;
    let half: BigInt = doubled / 2;
    half.to_biguint().expect("negative count is non-negative")
}

/// Negative count of one block, without enumerating the composite group.
pub fn block_negative_count(block: &GhzBlock) -> Result<BigUint> {
    if block.is_aligned() {
        return closed_forms::c_binomial(block.m());
    }
    if block.m() <= MASKED_BLOCK_ENUM_LIMIT {
        let single = HyperState::new(vec![block.clone()])?;
        return Ok(BigUint::from(count_negative_with(
            &single,
            &EnumOptions {
                guard_bits: MASKED_BLOCK_ENUM_LIMIT,
                threads: 1,
            },
        )?));
    }
    Ok(masked_block_count(
        block.m(),
        block.parity().iter().filter(|b| **b).count(),
    ))
}

/// Negative count of a block of `m` qubits with `w` flipped bits.
///
/// Signed group sum: Z-only elements contribute `2^{m-1}` when `w = 0` and
/// cancel otherwise; X-string elements contribute `Re((1+i)^{m-w} (1-i)^w)`.
pub(crate) fn masked_block_count(m: usize, w: usize) -> BigUint {
    let one_plus_i = Complex::new(BigInt::one(), BigInt::one());
    let one_minus_i = Complex::new(BigInt::one(), -BigInt::one());
    let mut acc = Complex::new(BigInt::one(), BigInt::zero());
    for _ in 0..m - w {
        acc *= one_plus_i.clone();
    }
    for _ in 0..w {
        acc *= one_minus_i.clone();
    }
    let mut signed_sum = acc.re;
    if w == 0 {
        signed_sum += BigInt::one() << (m - 1);
    }
    let c: BigInt = ((BigInt::one() << m) - signed_sum) / 2;
    debug_assert!(!c.is_negative());
    c.to_biguint().expect("negative count is non-negative")
}

/// Closed-form negative count of the whole group.
pub fn count_negative_closed(state: &HyperState) -> Result<BigUint> {
    let per_block = state
        .blocks()
        .iter()
        .map(|b| Ok((b.m(), block_negative_count(b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(composite_count(&per_block))
}

/// Basis indices (slot `k` = bit `k`) carrying amplitude 1: every choice of
/// `b` or its complement per block, `2^blocks` in total.
pub fn support_indices(state: &HyperState) -> Result<Vec<u64>> {
    check_subset_width(state.n())?;
    let mut out = vec![0u64];
    let mut base = 0;
    for block in state.blocks() {
        let pattern = block
            .parity()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, bit)| acc | ((*bit as u64) << (base + k)));
        let full = ((1u64 << block.m()) - 1) << base;
        out = out.iter().flat_map(|i| [i | pattern, i | (pattern ^ full)]).collect();
        base += block.m();
    }
    out.sort_unstable();
    Ok(out)
}

/// Unnormalized product of the block states `|b_k> + |~b_k>`.
pub fn state_vector(state: &HyperState) -> Result<Vec<GaussInt>> {
    let n = state.n();
    if n > STATE_VECTOR_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "state vector qubit count",
            size: n,
            limit: STATE_VECTOR_MAX_QUBITS,
        });
    }
    let mut v = vec![Complex::new(0, 0); 1 << n];
    for idx in support_indices(state)? {
        v[idx as usize] = Complex::new(1, 0);
    }
    Ok(v)
}

/// Applies every group element to the state vector and checks it is fixed.
/// Returns the number of elements checked.
pub fn verify_eigenstate(state: &HyperState) -> Result<usize> {
    if state.n() > 12 {
        return Err(Error::Capacity {
            what: "dense eigenstate check qubit count",
            size: state.n(),
            limit: 12,
        });
    }
    let v = state_vector(state)?;
    let mut checked = 0;
    for el in enumerate_group(state)? {
        if el.pauli.apply_to_vector(&v)? != v {
            return Err(Error::Invariant(format!("{} does not stabilize the state", el.pauli)));
        }
        checked += 1;
    }
    Ok(checked)
}
