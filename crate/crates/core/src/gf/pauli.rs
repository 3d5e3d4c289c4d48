use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use super::bitvec::BitVec;
use crate::error::{Error, Result};

/// Element of GF(4) = {0, 1, w, w̄}, with w̄ = w + 1 = w².
///
/// The two-bit encoding is `x + z*w`, so the Pauli map I→0, X→1, Z→w, Y→w̄
/// places the X-part in `x` and the Z-part in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gf4 {
    Zero,
    One,
    Omega,
    OmegaBar,
}

impl Gf4 {
    pub const ALL: [Gf4; 4] = [Gf4::Zero, Gf4::One, Gf4::Omega, Gf4::OmegaBar];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Gf4 {
        match (x, z) {
            (false, false) => Gf4::Zero,
            (true, false) => Gf4::One,
            (false, true) => Gf4::Omega,
            (true, true) => Gf4::OmegaBar,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Gf4::Zero => (false, false),
            Gf4::One => (true, false),
            Gf4::Omega => (false, true),
            Gf4::OmegaBar => (true, true),
        }
    }

    /// Conjugation (Frobenius squaring): swaps w and w̄.
    pub fn conj(self) -> Gf4 {
        match self {
            Gf4::Omega => Gf4::OmegaBar,
            Gf4::OmegaBar => Gf4::Omega,
            other => other,
        }
    }

    /// Absolute trace to GF(2): t + t². Zero on {0, 1}, one on {w, w̄}.
    pub fn trace(self) -> bool {
        matches!(self, Gf4::Omega | Gf4::OmegaBar)
    }

    pub fn pauli_char(self) -> char {
        match self {
            Gf4::Zero => 'I',
            Gf4::One => 'X',
            Gf4::Omega => 'Z',
            Gf4::OmegaBar => 'Y',
        }
    }

    pub fn from_pauli_char(c: char) -> Option<Gf4> {
        match c {
            'I' | '_' | '.' => Some(Gf4::Zero),
            'X' => Some(Gf4::One),
            'Z' => Some(Gf4::Omega),
            'Y' => Some(Gf4::OmegaBar),
            _ => None,
        }
    }

    /// Position in the fixed symbol order I < X < Y < Z used for tie-breaking.
    pub fn pauli_rank(self) -> u8 {
        match self {
            Gf4::Zero => 0,
            Gf4::One => 1,
            Gf4::OmegaBar => 2,
            Gf4::Omega => 3,
        }
    }
}

impl Add for Gf4 {
    type Output = Gf4;

    fn add(self, rhs: Gf4) -> Gf4 {
        let (a, b) = self.bits();
        let (c, d) = rhs.bits();
        Gf4::from_bits(a ^ c, b ^ d)
    }
}

impl Mul for Gf4 {
    type Output = Gf4;

    fn mul(self, rhs: Gf4) -> Gf4 {
        // (a + bw)(c + dw) = (ac + bd) + (ad + bc + bd)w, using w² = w + 1
        let (a, b) = self.bits();
        let (c, d) = rhs.bits();
        Gf4::from_bits((a & c) ^ (b & d), (a & d) ^ (b & c) ^ (b & d))
    }
}

/// An n-qubit Pauli operator modulo phase, i.e. a vector in GF(4)^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliVec {
    x: BitVec,
    z: BitVec,
}

impl PauliVec {
    pub fn identity(n: usize) -> Self {
        PauliVec {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn from_parts(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(PauliVec { x, z })
    }

    pub fn from_symbols(symbols: &[Gf4]) -> Self {
        let mut p = PauliVec::identity(symbols.len());
        for (i, &s) in symbols.iter().enumerate() {
            p.set(i, s);
        }
        p
    }

    /// Single-qubit operator `s` on qubit `q` (0-based).
    pub fn single(n: usize, q: usize, s: Gf4) -> Self {
        let mut p = PauliVec::identity(n);
        p.set(q, s);
        p
    }

    /// Same symbol `s` on every listed qubit.
    pub fn on_support(n: usize, qubits: &[usize], s: Gf4) -> Self {
        let mut p = PauliVec::identity(n);
        for &q in qubits {
            p.set(q, s);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn symbol(&self, i: usize) -> Gf4 {
        Gf4::from_bits(self.x.get(i), self.z.get(i))
    }

    pub fn symbols(&self) -> Vec<Gf4> {
        (0..self.len()).map(|i| self.symbol(i)).collect()
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: Gf4) {
        let (x, z) = s.bits();
        self.x.set(i, x);
        self.z.set(i, z);
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.x.get(i) || self.z.get(i))
            .collect()
    }

    /// Symplectic binary form `[x | z]` of length 2n.
    pub fn symplectic(&self) -> BitVec {
        BitVec::from_bits(self.x.iter().chain(self.z.iter()))
    }

    /// Trace inner product: 0 when the operators commute, 1 when they anticommute.
    pub fn trace_inner_product(&self, other: &PauliVec) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self.anticommutes(other))
    }

    /// Unchecked form of [`PauliVec::trace_inner_product`] for hot loops.
    #[inline]
    pub fn anticommutes(&self, other: &PauliVec) -> bool {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = 0u32;
        let xs = self.x.words().iter().zip(self.z.words());
        let ys = other.x.words().iter().zip(other.z.words());
        for ((x1, z1), (x2, z2)) in xs.zip(ys) {
            acc ^= ((x1 & z2) ^ (z1 & x2)).count_ones();
        }
        acc & 1 == 1
    }

    /// Lexicographic comparison under I < X < Y < Z, lowest qubit first.
    pub fn lex_cmp(&self, other: &PauliVec) -> std::cmp::Ordering {
        for i in 0..self.len().min(other.len()) {
            let o = self.symbol(i).pauli_rank().cmp(&other.symbol(i).pauli_rank());
            if o.is_ne() {
                return o;
            }
        }
        self.len().cmp(&other.len())
    }
}

impl AddAssign<&PauliVec> for PauliVec {
    /// Componentwise GF(4) addition, i.e. operator product up to phase.
    #[inline]
    fn add_assign(&mut self, rhs: &PauliVec) {
        self.x ^= &rhs.x;
        self.z ^= &rhs.z;
    }
}

impl Add<&PauliVec> for &PauliVec {
    type Output = PauliVec;

    fn add(self, rhs: &PauliVec) -> PauliVec {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl fmt::Display for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.symbol(i).pauli_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliVec {
    type Err = Error;

    /// Parses strings like "XYZI"; qubit 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| {
                Gf4::from_pauli_char(c)
                    .ok_or_else(|| Error::Parse(format!("invalid Pauli character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliVec::from_symbols(&symbols))
    }
}

/// Trace inner product of two Paulis; see [`PauliVec::trace_inner_product`].
pub fn trace_inner_product(x: &PauliVec, y: &PauliVec) -> Result<bool> {
    x.trace_inner_product(y)
}
