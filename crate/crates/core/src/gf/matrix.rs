use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bitvec::{words_for, BitVec};
use crate::error::{Error, Result};

/// Largest message length accepted by the exhaustive distance routines.
pub const MAX_ENUMERATION_ROWS: usize = 34;

/// Dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Reduced row echelon form of a matrix together with the row transform that
/// produced it: `reduced = transform * original`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub transform: BitMatrix,
    /// Pivot column of each of the first `rank` rows of `reduced`.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length. An empty
    /// row list needs the column count supplied separately, see [`BitMatrix::zeros`].
    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn from_rows_with_cols(rows: Vec<BitVec>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.data
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_bits((0..self.rows).map(|r| self.get(r, c)))
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.data[r].weight()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.data.iter().map(BitVec::weight).collect()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        self.data.iter().filter(|r| r.get(c)).count()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for row in &self.data {
            for c in row.ones() {
                w[c] += 1;
            }
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r] ^= &rhs.data[k];
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `m * self`.
    pub fn encode(&self, m: &BitVec) -> Result<BitVec> {
        if m.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: m.len(),
            });
        }
        let mut out = BitVec::zeros(self.cols);
        for i in m.ones() {
            out ^= &self.data[i];
        }
        Ok(out)
    }

    /// Matrix times column vector: bit `i` is `row_i . v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(BitVec::from_bits(self.data.iter().map(|r| r.dot(v))))
    }

    /// Columns `positions` of `self`, in the given order.
    pub fn select_columns(&self, positions: &[usize]) -> BitMatrix {
        let rows = self.data.iter().map(|r| r.select(positions)).collect();
        BitMatrix {
            rows: self.rows,
            cols: positions.len(),
            data: rows,
        }
    }

    /// Gauss-Jordan elimination on a copy. Pivots are chosen left to right,
    /// taking the first available row at or below the current one.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.data.clone();
        let mut trans: Vec<BitVec> = (0..self.rows).map(|i| BitVec::unit(self.rows, i)).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            trans.swap(next, p);
            let (pivot_row, pivot_trans) = (rows[next].clone(), trans[next].clone());
            for r in 0..self.rows {
                if r != next && rows[r].get(col) {
                    rows[r] ^= &pivot_row;
                    trans[r] ^= &pivot_trans;
                }
            }
            pivots.push(col);
            next += 1;
        }
        Echelon {
            reduced: BitMatrix {
                rows: self.rows,
                cols: self.cols,
                data: rows,
            },
            transform: BitMatrix {
                rows: self.rows,
                cols: self.rows,
                data: trans,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        // Plain elimination without tracking the transform.
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(col) {
                    *row ^= &pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Coefficients `c` with `c * self = v`, if `v` lies in the row space.
    pub fn solve_left(&self, v: &BitVec) -> Result<Option<BitVec>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self.echelon().solve_left(v))
    }

    pub fn in_row_space(&self, v: &BitVec) -> Result<bool> {
        Ok(self.solve_left(v)?.is_some())
    }

    fn require_full_row_rank(&self) -> Result<()> {
        let rank = self.rank();
        if rank < self.rows {
            return Err(Error::RankDeficient {
                rank,
                rows: self.rows,
            });
        }
        Ok(())
    }

    /// Parity-check matrix `H` with `H * self^T = 0` and `rank(H) = cols - rows`.
    pub fn parity_check(&self) -> Result<BitMatrix> {
        self.require_full_row_rank()?;
        let ech = self.echelon();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &ech.pivots {
                s[p] = true;
            }
            s
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut h = BitMatrix::zeros(free.len(), self.cols);
        for (t, &q) in free.iter().enumerate() {
            h.set(t, q, true);
            for (i, &p) in ech.pivots.iter().enumerate() {
                if ech.reduced.get(i, q) {
                    h.set(t, p, true);
                }
            }
        }
        Ok(h)
    }

    /// Minimum Hamming weight over all nonzero codewords of the row space,
    /// enumerated in Gray-code order (one row XOR per step).
    pub fn min_distance(&self) -> Result<usize> {
        self.require_full_row_rank()?;
        self.check_enumerable()?;
        let mut best = usize::MAX;
        self.gray_walk(|w| {
            if w < best {
                best = w;
            }
        });
        Ok(best)
    }

    /// Number of codewords of each weight `0..=cols`, by exhaustive enumeration.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        self.require_full_row_rank()?;
        self.check_enumerable()?;
        let mut dist = vec![0u64; self.cols + 1];
        dist[0] = 1;
        self.gray_walk(|w| dist[w] += 1);
        Ok(dist)
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.rows > MAX_ENUMERATION_ROWS {
            return Err(Error::InvalidParameter(format!(
                "exhaustive enumeration over 2^{} codewords is not supported (max 2^{MAX_ENUMERATION_ROWS})",
                self.rows
            )));
        }
        Ok(())
    }

    /// Visits the weight of every nonzero codeword `m * self`, `m != 0`.
    fn gray_walk<F: FnMut(usize)>(&self, mut visit: F) {
        let count: u64 = 1u64 << self.rows;
        match words_for(self.cols) {
            0 => (1..count).for_each(|_| visit(0)),
            1 => {
                let rows: Vec<u64> = self.data.iter().map(|r| r.words()[0]).collect();
                let mut cur = 0u64;
                for i in 1..count {
                    cur ^= rows[i.trailing_zeros() as usize];
                    visit(cur.count_ones() as usize);
                }
            }
            2 => {
                let rows: Vec<[u64; 2]> = self
                    .data
                    .iter()
                    .map(|r| [r.words()[0], r.words()[1]])
                    .collect();
                let mut cur = [0u64; 2];
                for i in 1..count {
                    let r = &rows[i.trailing_zeros() as usize];
                    cur[0] ^= r[0];
                    cur[1] ^= r[1];
                    visit((cur[0].count_ones() + cur[1].count_ones()) as usize);
                }
            }
            _ => {
                let mut cur = BitVec::zeros(self.cols);
                for i in 1..count {
                    cur ^= &self.data[i.trailing_zeros() as usize];
                    visit(cur.weight());
                }
            }
        }
    }

    /// Dense text form: one row per line of '0'/'1'.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for row in &self.data {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<BitVec>>>()?;
        BitMatrix::from_rows(rows)
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::Dimension(format!(
                "row counts differ: {} vs {}",
                self.rows, rhs.rows
            )));
        }
        let rows = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| BitVec::from_bits(a.iter().chain(b.iter())))
            .collect();
        BitMatrix::from_rows_with_cols(rows, self.cols + rhs.cols)
    }
}

impl Echelon {
    /// Coefficients `c` with `c * original = v`, or `None` outside the row space.
    pub fn solve_left(&self, v: &BitVec) -> Option<BitVec> {
        let mut residual = v.clone();
        let mut combo = BitVec::zeros(self.reduced.rows());
        for (i, &p) in self.pivots.iter().enumerate() {
            if residual.get(p) {
                residual ^= self.reduced.row(i);
                combo ^= self.transform.row(i);
            }
        }
        residual.is_zero().then_some(combo)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::from_text(s)
    }
}

#[derive(Serialize, Deserialize)]
struct BitMatrixJson {
    rows: usize,
    cols: usize,
    row_strings: Vec<String>,
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitMatrixJson {
            rows: self.rows,
            cols: self.cols,
            row_strings: self.data.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BitMatrixJson::deserialize(d)?;
        if raw.row_strings.len() != raw.rows {
            return Err(D::Error::custom(format!(
                "declared {} rows but found {}",
                raw.rows,
                raw.row_strings.len()
            )));
        }
        let rows = raw
            .row_strings
            .iter()
            .map(|s| s.parse::<BitVec>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        BitMatrix::from_rows_with_cols(rows, raw.cols).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> BitMatrix {
        "1001011\n0101101\n0010111".parse().unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(4, 5).rank(), 0);
        assert_eq!(hamming().rank(), 3);
        let dup: BitMatrix = "110\n110\n011".parse().unwrap();
        assert_eq!(dup.rank(), 2);
    }

    #[test]
    fn encode_examples() {
        let g = hamming();
        assert!(g.encode(&BitVec::zeros(3)).unwrap().is_zero());
        let all: BitVec = "111".parse().unwrap();
        assert_eq!(g.encode(&all).unwrap().to_string(), "1110001");
        for i in 0..3 {
            assert_eq!(&g.encode(&BitVec::unit(3, i)).unwrap(), g.row(i));
        }
        assert!(g.encode(&BitVec::zeros(4)).is_err());
    }

    #[test]
    fn hamming_distance_is_four() {
        assert_eq!(hamming().min_distance().unwrap(), 4);
        let dist = hamming().weight_distribution().unwrap();
        assert_eq!(dist.iter().sum::<u64>(), 8);
        assert_eq!(dist[4], 7);
    }

    #[test]
    fn min_distance_rejects_rank_deficient() {
        let dup: BitMatrix = "110\n110".parse().unwrap();
        assert!(matches!(
            dup.min_distance(),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
    }

    #[test]
    fn parity_check_of_systematic_generator() {
        // G = [I | A]  =>  H = [A^T | I]
        let a: BitMatrix = "101\n011".parse().unwrap();
        let g = BitMatrix::identity(2).hstack(&a).unwrap();
        let h = g.parity_check().unwrap();
        let expected = a.transpose().hstack(&BitMatrix::identity(3)).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn parity_check_hamming_and_rate_one() {
        let g = hamming();
        let h = g.parity_check().unwrap();
        assert_eq!((h.rows(), h.cols()), (4, 7));
        assert_eq!(h.rank(), 4);
        assert!(h.mul(&g.transpose()).unwrap().is_zero());

        let h1 = BitMatrix::identity(5).parity_check().unwrap();
        assert_eq!((h1.rows(), h1.cols()), (0, 5));
    }

    #[test]
    fn echelon_transform_reproduces_reduced_form() {
        let g: BitMatrix = "0110\n1100\n1010".parse().unwrap();
        let ech = g.echelon();
        assert_eq!(ech.transform.mul(&g).unwrap(), ech.reduced);
        assert_eq!(ech.rank(), 2);
        let v: BitVec = "1010".parse().unwrap();
        let c = ech.solve_left(&v).unwrap();
        assert_eq!(g.encode(&c).unwrap(), v);
        assert!(ech.solve_left(&"1000".parse().unwrap()).is_none());
    }

    #[test]
    fn text_and_json_forms() {
        let g = hamming();
        assert_eq!(BitMatrix::from_text(&g.to_text()).unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"row_strings\":[\"1001011\""));
        let back: BitMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"rows":2,"cols":3,"row_strings":["101"]}"#;
        assert!(serde_json::from_str::<BitMatrix>(bad).is_err());
    }
}
