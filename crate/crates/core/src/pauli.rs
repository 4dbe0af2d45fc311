// SPDX-License-Identifier: Apache-2.0

//! Exact n-qubit Pauli strings with phase tracking.
//!
//! A [`PauliString`] stores one X bit and one Z bit per slot, packed 64 slots
//! per word, together with a phase exponent `k` so that the operator is
//! `i^k * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`. The slot letter for `(x, z) = (1, 1)`
//! is `Y = iXZ`, which makes the masks canonical and leaves the whole scalar in
//! `k`. With that convention `ZX = iY` and `XZ = -iY`.
//!
//! Dense matrices and state vectors use little-endian qubit order: slot `k`
//! is bit `k` of a basis index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};

/// Gaussian integer used for exact matrix and vector entries.
pub type GaussInt = Complex<i64>;

/// Largest qubit count accepted by [`PauliString::to_dense`].
pub const DENSE_MAX_QUBITS: usize = 14;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Powers of `i` as Gaussian integers, indexed by exponent mod 4.
pub(crate) const I_POW: [GaussInt; 4] = [
    Complex { re: 1, im: 0 },
    Complex { re: 0, im: 1 },
    Complex { re: -1, im: 0 },
    Complex { re: 0, im: -1 },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// The 2x2 matrix of this letter, row-major.
    pub fn matrix(self) -> [GaussInt; 4] {
        let o = Complex::new(0, 0);
        let one = Complex::new(1, 0);
        let i = Complex::new(0, 1);
        match self {
            Letter::I => [one, o, o, one],
            Letter::X => [o, one, one, o],
            Letter::Y => [o, -i, i, o],
            Letter::Z => [one, o, o, -one],
        }
    }
}

/// Sign of a Hermitian Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Builds a string from packed masks. Bits at or above `n` are cleared.
    pub fn from_words(n: usize, x: &[u64], z: &[u64], phase_exp: u8) -> Self {
        let mut p = PauliString::identity(n);
        for (dst, src) in p.x.iter_mut().zip(x) {
            *dst = *src;
        }
        for (dst, src) in p.z.iter_mut().zip(z) {
            *dst = *src;
        }
        p.phase = phase_exp & 3;
        p.mask_tail();
        p
    }

    /// Convenience constructor for strings of at most 64 qubits.
    pub fn from_u64(n: usize, x: u64, z: u64, phase_exp: u8) -> Self {
        assert!(n <= WORD_BITS, "from_u64 needs n <= 64");
        PauliString::from_words(n, &[x], &[z], phase_exp)
    }

    pub fn from_letters(letters: &[Letter], phase_exp: u8) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (k, l) in letters.iter().enumerate() {
            p.set_letter(k, *l);
        }
        p.phase = phase_exp & 3;
        p
    }

    fn mask_tail(&mut self) {
        let rem = self.n % WORD_BITS;
        if rem != 0 {
            let keep = (1u64 << rem) - 1;
            if let Some(last) = self.x.last_mut() {
                *last &= keep;
            }
            if let Some(last) = self.z.last_mut() {
                *last &= keep;
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, slot: usize) -> Letter {
        assert!(slot < self.n, "slot {slot} out of range for {} qubits", self.n);
        let (w, b) = (slot / WORD_BITS, slot % WORD_BITS);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set_letter(&mut self, slot: usize, letter: Letter) {
        assert!(slot < self.n, "slot {slot} out of range for {} qubits", self.n);
        let (w, b) = (slot / WORD_BITS, slot % WORD_BITS);
        let (x, z) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(move |k| self.letter(k))
    }

    pub fn with_phase(mut self, phase_exp: u8) -> Self {
        self.phase = phase_exp & 3;
        self
    }

    /// Operator product `self · other` with exact phase accumulation.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        // Convert both factors to i^q X^x Z^z form, multiply, convert back.
        let mut acc: i64 = self.phase as i64 + other.phase as i64;
        let mut out = PauliString::identity(self.n);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x, z) = (x1 ^ x2, z1 ^ z2);
            acc += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64;
            acc += 2 * (z1 & x2).count_ones() as i64;
            acc -= (x & z).count_ones() as i64;
            out.x[w] = x;
            out.z[w] = z;
        }
        out.phase = acc.rem_euclid(4) as u8;
        Ok(out)
    }

    /// Tensor product `self ⊗ other`; `other` occupies the higher slots.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.n + other.n);
        out.x[..self.x.len()].copy_from_slice(&self.x);
        out.z[..self.z.len()].copy_from_slice(&self.z);
        for slot in 0..other.n {
            out.set_letter(self.n + slot, other.letter(slot));
        }
        out.phase = (self.phase + other.phase) & 3;
        out
    }

    pub fn hermitian_sign(&self) -> Result<Sign> {
        match self.phase {
            0 => Ok(Sign::Plus),
            2 => Ok(Sign::Minus),
            k => Err(Error::NonHermitian { phase_exp: k }),
        }
    }

    /// Number of non-identity slots.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Symplectic inner product mod 2: `true` iff the strings anticommute.
    pub fn symplectic(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let ones: u32 = (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.symplectic(other).map(|anti| !anti)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|w| *w == 0)
    }

    /// Exact dense matrix, built as a Kronecker product of 2x2 letters.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        if self.n > DENSE_MAX_QUBITS {
            return Err(Error::Capacity {
                what: "dense operator qubit count",
                size: self.n,
                limit: DENSE_MAX_QUBITS,
            });
        }
        let mut acc = DenseOperator::scalar(I_POW[self.phase as usize]);
        for slot in 0..self.n {
            // Slot k is bit k of the index, so later slots are more significant.
            acc = DenseOperator::from_letter(self.letter(slot)).kron(&acc);
        }
        Ok(acc)
    }

    /// Applies the operator to a state vector of length `2^n`.
    pub fn apply_to_vector(&self, v: &[GaussInt]) -> Result<Vec<GaussInt>> {
        let dim = 1usize
            .checked_shl(self.n as u32)
            .filter(|_| self.n < usize::BITS as usize)
            .ok_or(Error::Capacity {
                what: "state vector qubit count",
                size: self.n,
                limit: usize::BITS as usize - 1,
            })?;
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.len().trailing_zeros() as usize,
            });
        }
        if self.n > WORD_BITS {
            return Err(Error::Capacity {
                what: "state vector qubit count",
                size: self.n,
                limit: WORD_BITS,
            });
        }
        let (x, z) = (
            self.x.first().copied().unwrap_or(0),
            self.z.first().copied().unwrap_or(0),
        );
        // Y = iXZ per slot, X^x Z^z |j> = (-1)^{z.j} |j ^ x>.
        let base = I_POW[(self.phase as usize + (x & z).count_ones() as usize) % 4];
        let mut out = vec![Complex::new(0, 0); dim];
        for (j, amp) in v.iter().enumerate() {
            if amp.re == 0 && amp.im == 0 {
                continue;
            }
            let sign = if (z & j as u64).count_ones() % 2 == 1 { -1 } else { 1 };
            out[j ^ x as usize] += base * amp * sign;
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-|i|+i|-i]` followed by letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body, offset) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest, 2)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest, 2)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest, 1)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest, 1)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest, 1)
        } else {
            (0, s, 0)
        };
        let letters = body
            .chars()
            .enumerate()
            .map(|(k, c)| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse {
                    pos: offset + k,
                    msg: format!("unexpected character `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters, phase))
    }
}

/// Exact square matrix with Gaussian-integer entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<GaussInt>,
}

impl DenseOperator {
    pub fn scalar(c: GaussInt) -> Self {
        DenseOperator {
            dim: 1,
            entries: vec![c],
        }
    }

    pub fn from_letter(l: Letter) -> Self {
        DenseOperator {
            dim: 2,
            entries: l.matrix().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> GaussInt {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[GaussInt] {
        &self.entries
    }

    /// `self ⊗ other`, with `self` acting on the more significant index bits.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let dim = self.dim * other.dim;
        let mut entries = vec![Complex::new(0, 0); dim * dim];
        for (ar, ac) in (0..self.dim).flat_map(|r| (0..self.dim).map(move |c| (r, c))) {
            let a = self.get(ar, ac);
            if a.re == 0 && a.im == 0 {
                continue;
            }
            for br in 0..other.dim {
                for bc in 0..other.dim {
                    entries[(ar * other.dim + br) * dim + ac * other.dim + bc] = a * other.get(br, bc);
                }
            }
        }
        DenseOperator { dim, entries }
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![Complex::new(0, 0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.re == 0 && a.im == 0 {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(DenseOperator { dim: d, entries })
    }

    pub fn mul_vec(&self, v: &[GaussInt]) -> Result<Vec<GaussInt>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect())
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let mut entries = vec![Complex::new(0, 0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        DenseOperator { dim: d, entries }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                let e = self.get(r, c);
                if r == c {
                    e == Complex::new(1, 0)
                } else {
                    e == Complex::new(0, 0)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn zx_is_i_y() {
        let r = p("Z").multiply(&p("X")).unwrap();
        assert_eq!(r, p("iY"));
        assert_eq!(r.phase_exp(), 1);
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("-iY"));
    }

    #[test]
    fn letters_square_to_identity() {
        for s in ["X", "Y", "Z", "I"] {
            let r = p(s).multiply(&p(s)).unwrap();
            assert!(r.is_identity_up_to_phase());
            assert_eq!(r.phase_exp(), 0);
        }
    }

    #[test]
    fn xxxx_times_zzii() {
        let r = p("XXXX").multiply(&p("ZZII")).unwrap();
        assert_eq!(r.to_string(), "-YYXX");
        assert_eq!(r.phase_exp(), 2);
    }

    #[test]
    fn multiply_rejects_mismatched_sizes() {
        assert_eq!(
            p("XX").multiply(&p("X")),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(p("X").tensor(&p("I")), p("XI"));
        assert_eq!(p("-YY").tensor(&p("XX")), p("-YYXX"));
        let r = p("IIII").tensor(&p("IIII"));
        assert_eq!(r, PauliString::identity(8));
        assert_eq!(r.phase_exp(), 0);
    }

    #[test]
    fn tensor_across_word_boundary() {
        let a = PauliString::from_letters(&[Letter::Y; 60], 1);
        let b = PauliString::from_letters(&[Letter::Z; 10], 2);
        let t = a.tensor(&b);
        assert_eq!(t.num_qubits(), 70);
        assert_eq!(t.letter(59), Letter::Y);
        assert_eq!(t.letter(60), Letter::Z);
        assert_eq!(t.letter(69), Letter::Z);
        assert_eq!(t.phase_exp(), 3);
        assert_eq!(t.weight(), 70);
    }

    #[test]
    fn hermitian_sign_cases() {
        assert_eq!(p("IIII").hermitian_sign(), Ok(Sign::Plus));
        assert_eq!(p("-YYXX").hermitian_sign(), Ok(Sign::Minus));
        assert_eq!(p("iY").hermitian_sign(), Err(Error::NonHermitian { phase_exp: 1 }));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(p("IIII").weight(), 0);
        assert_eq!(p("-YYXX").weight(), 4);
        assert_eq!(p("ZZII").weight(), 2);
    }

    #[test]
    fn dense_single_letters() {
        let x = p("X").to_dense().unwrap();
        let c = |re, im| Complex::new(re, im);
        assert_eq!(x.entries(), &[c(0, 0), c(1, 0), c(1, 0), c(0, 0)]);
        let y = p("Y").to_dense().unwrap();
        assert_eq!(y.entries(), &[c(0, 0), c(0, -1), c(0, 1), c(0, 0)]);
    }

    #[test]
    fn dense_capacity_guard() {
        let big = PauliString::identity(DENSE_MAX_QUBITS + 1);
        assert!(matches!(big.to_dense(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn parse_errors_report_position() {
        assert_eq!(
            "-XQ".parse::<PauliString>(),
            Err(Error::Parse {
                pos: 2,
                msg: "unexpected character `Q`".into()
            })
        );
    }

    #[test]
    fn print_forms() {
        for s in ["XYZ", "iXYZ", "-XYZ", "-iXYZ", "", "-"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+iX").to_string(), "iX");
        assert_eq!(p("+X").to_string(), "X");
    }

    #[test]
    fn apply_matches_dense_small() {
        let v: Vec<GaussInt> = (0..8).map(|k| Complex::new(k, 1 - k)).collect();
        for s in ["XYZ", "-iZZX", "YIY", "iIXI"] {
            let op = p(s);
            assert_eq!(
                op.apply_to_vector(&v).unwrap(),
                op.to_dense().unwrap().mul_vec(&v).unwrap()
            );
        }
    }
}
