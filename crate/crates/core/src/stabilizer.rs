//! Stabilizer codes: the rotated surface code family, syndromes, stabilizer
//! group membership and a bounded-weight lookup decoder for qubit errors.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{BitMatrix, BitVec, Echelon, Gf4, PauliVec};
use crate::util::binomial;

/// Default cap on lookup-table entries.
pub const DEFAULT_TABLE_CAP: usize = 5_000_000;

#[derive(Clone, Debug)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    generators: Vec<PauliVec>,
    logical_x: PauliVec,
    logical_z: PauliVec,
    // Symplectic generator matrix in reduced form, for membership tests.
    group: Echelon,
}

impl StabilizerCode {
    /// Builds a code and checks the stabilizer-code invariants: commuting,
    /// independent generators and a valid logical pair.
    pub fn new(
        generators: Vec<PauliVec>,
        logical_x: PauliVec,
        logical_z: PauliVec,
    ) -> Result<Self> {
        let n = logical_x.len();
        for g in generators.iter().chain([&logical_z]) {
            if g.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
        }
        let code = Self::new_unchecked(generators, logical_x, logical_z)?;
        code.validate()?;
        Ok(code)
    }

    fn new_unchecked(
        generators: Vec<PauliVec>,
        logical_x: PauliVec,
        logical_z: PauliVec,
    ) -> Result<Self> {
        let n = logical_x.len();
        let symp = BitMatrix::from_rows_with_cols(
            generators.iter().map(PauliVec::symplectic).collect(),
            2 * n,
        )?;
        let l = generators.len();
        if l > n {
            return Err(Error::InvalidParameter(format!(
                "{l} generators on {n} qubits"
            )));
        }
        Ok(StabilizerCode {
            n,
            k: n - l,
            generators,
            logical_x,
            logical_z,
            group: symp.echelon(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.generators.iter().enumerate() {
            for (j, b) in self.generators.iter().enumerate().skip(i + 1) {
                if a.anticommutes(b) {
                    return Err(Error::InvalidParameter(format!(
                        "generators {i} and {j} anticommute"
                    )));
                }
            }
        }
        if self.group.rank() != self.generators.len() {
            return Err(Error::RankDeficient {
                rank: self.group.rank(),
                rows: self.generators.len(),
            });
        }
        for (name, op) in [("X", &self.logical_x), ("Z", &self.logical_z)] {
            if let Some(i) = self.generators.iter().position(|g| g.anticommutes(op)) {
                return Err(Error::InvalidParameter(format!(
                    "logical {name} anticommutes with generator {i}"
                )));
            }
        }
        if !self.logical_x.anticommutes(&self.logical_z) {
            return Err(Error::InvalidParameter(
                "logical X and Z commute".to_string(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of generators, ℓ = n - k.
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliVec] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliVec {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliVec {
        &self.logical_z
    }

    /// Rank of the ℓ×2n symplectic generator matrix.
    pub fn symplectic_rank(&self) -> usize {
        self.group.rank()
    }

    pub fn syndrome(&self, e: &PauliVec) -> Result<BitVec> {
        if e.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: e.len(),
            });
        }
        Ok(self.syndrome_unchecked(e))
    }

    #[inline]
    pub(crate) fn syndrome_unchecked(&self, e: &PauliVec) -> BitVec {
        let mut s = BitVec::zeros(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if g.anticommutes(e) {
                s.set(i, true);
            }
        }
        s
    }

    /// Whether `e` is (up to phase) an element of the stabilizer group.
    pub fn in_stabilizer_group(&self, e: &PauliVec) -> bool {
        e.len() == self.n && self.group.solve_left(&e.symplectic()).is_some()
    }

    /// A residual outside the stabilizer group counts as failure, including
    /// residuals that still carry a nonzero syndrome.
    pub fn is_logical_failure(&self, residual: &PauliVec) -> bool {
        !self.in_stabilizer_group(residual)
    }

    /// Max generator weight.
    pub fn max_generator_weight(&self) -> usize {
        self.generators.iter().map(PauliVec::weight).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> StabilizerCodeJson {
        StabilizerCodeJson {
            n: self.n,
            k: self.k,
            generators: self.generators.iter().map(ToString::to_string).collect(),
            logical_x: self.logical_x.to_string(),
            logical_z: self.logical_z.to_string(),
        }
    }

    pub fn from_json(json: &StabilizerCodeJson) -> Result<Self> {
        let generators = json
            .generators
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<PauliVec>>>()?;
        let code = Self::new(
            generators,
            json.logical_x.parse()?,
            json.logical_z.parse()?,
        )?;
        if code.n != json.n || code.k != json.k {
            return Err(Error::Parse(format!(
                "declared [[{}, {}]] but generators give [[{}, {}]]",
                json.n, json.k, code.n, code.k
            )));
        }
        Ok(code)
    }
}

/// JSON export form: Pauli strings over I/X/Y/Z, qubit 1 leftmost.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StabilizerCodeJson {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<String>,
    pub logical_x: String,
    pub logical_z: String,
}

/// Rotated surface code of odd distance `d` on a d×d grid of data qubits.
///
/// Qubit (r, c), 0-based, has index `r * d + c`. Bulk plaquettes on 2×2 cells
/// alternate X/Z in a checkerboard with X on even `row + col`; weight-2 X checks
/// sit on the top and bottom edges and weight-2 Z checks on the left and right
/// edges. Logical Z is Z on the first row, logical X is X on the first column.
pub fn build_rotated_surface_code(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "rotated surface code distance must be odd and >= 3, got {d}"
        )));
    }
    let n = d * d;
    let q = |r: usize, c: usize| r * d + c;
    let x_cell = |r: usize, c: usize| (r + c).is_multiple_of(2);
    let mut generators = Vec::with_capacity(n - 1);

    // Plaquettes indexed by the corner grid (i, j) in 0..=d, row-major.
    for i in 0..=d {
        for j in 0..=d {
            let interior_row = (1..d).contains(&i);
            let interior_col = (1..d).contains(&j);
            let check = if interior_row && interior_col {
                let (r, c) = (i - 1, j - 1);
                let support = [q(r, c), q(r, c + 1), q(r + 1, c), q(r + 1, c + 1)];
                let s = if x_cell(r, c) { Gf4::One } else { Gf4::Omega };
                Some((support.to_vec(), s))
            } else if (i == 0 || i == d) && interior_col {
                // Top / bottom: X check next to a Z-type cell.
                let cell_row = if i == 0 { 0 } else { d - 2 };
                (!x_cell(cell_row, j - 1)).then(|| {
                    let r = if i == 0 { 0 } else { d - 1 };
                    (vec![q(r, j - 1), q(r, j)], Gf4::One)
                })
            } else if (j == 0 || j == d) && interior_row {
                // Left / right: Z check next to an X-type cell.
                let cell_col = if j == 0 { 0 } else { d - 2 };
                x_cell(i - 1, cell_col).then(|| {
                    let c = if j == 0 { 0 } else { d - 1 };
                    (vec![q(i - 1, c), q(i, c)], Gf4::Omega)
                })
            } else {
                None
            };
            if let Some((support, s)) = check {
                generators.push(PauliVec::on_support(n, &support, s));
            }
        }
    }

    let row0: Vec<usize> = (0..d).map(|c| q(0, c)).collect();
    let col0: Vec<usize> = (0..d).map(|r| q(r, 0)).collect();
    let logical_z = PauliVec::on_support(n, &row0, Gf4::Omega);
    let logical_x = PauliVec::on_support(n, &col0, Gf4::One);
    StabilizerCode::new(generators, logical_x, logical_z)
}

/// Number of n-qubit Paulis of weight at most `t`.
pub fn pauli_count_up_to(n: usize, t: usize) -> u128 {
    (0..=t.min(n))
        .map(|w| binomial(n as u64, w as u64) * 3u128.pow(w as u32))
        .sum()
}

/// Visits every Pauli of weight exactly `w` on `n` qubits: supports in
/// lexicographic order, then labels X, Y, Z per site.
pub fn for_each_pauli_of_weight<F: FnMut(&PauliVec)>(n: usize, w: usize, mut f: F) {
    const LABELS: [Gf4; 3] = [Gf4::One, Gf4::OmegaBar, Gf4::Omega];
    let mut e = PauliVec::identity(n);
    if w == 0 {
        f(&e);
        return;
    }
    for support in (0..n).combinations(w) {
        for labels in (0..w).map(|_| LABELS).multi_cartesian_product() {
            for (&q, &s) in support.iter().zip(&labels) {
                e.set(q, s);
            }
            f(&e);
        }
        for &q in &support {
            e.set(q, Gf4::Zero);
        }
    }
}

/// Syndrome → minimum-weight correction, for all Paulis of weight ≤ `t`.
#[derive(Clone, Debug)]
pub struct QuantumLookupDecoder {
    table: HashMap<BitVec, PauliVec>,
    max_weight: usize,
}

impl QuantumLookupDecoder {
    pub fn build(code: &StabilizerCode, t: usize) -> Result<Self> {
        Self::build_with_cap(code, t, DEFAULT_TABLE_CAP)
    }

    pub fn build_with_cap(code: &StabilizerCode, t: usize, cap: usize) -> Result<Self> {
        let n = code.n();
        if t >= n {
            return Err(Error::InvalidParameter(format!(
                "decoder weight {t} must be below the qubit count {n}"
            )));
        }
        let needed = pauli_count_up_to(n, t);
        if needed > cap as u128 {
            return Err(Error::TableTooLarge { needed, cap });
        }
        let mut table: HashMap<BitVec, PauliVec> = HashMap::new();
        for w in 0..=t {
            for_each_pauli_of_weight(n, w, |e| {
                let s = code.syndrome_unchecked(e);
                match table.get_mut(&s) {
                    // Lower weights were inserted first; only same-weight ties compete.
                    Some(cur) if cur.weight() == w && e.lex_cmp(cur).is_lt() => *cur = e.clone(),
                    Some(_) => {}
                    None => {
                        table.insert(s, e.clone());
                    }
                }
            });
        }
        Ok(QuantumLookupDecoder {
            table,
            max_weight: t,
        })
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Correction for `syndrome`, or `None` when no error of weight ≤ t produces it.
    pub fn decode(&self, syndrome: &BitVec) -> Option<&PauliVec> {
        self.table.get(syndrome)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BitVec, &PauliVec)> {
        self.table.iter()
    }
}

pub fn build_quantum_lookup_decoder(
    code: &StabilizerCode,
    t: usize,
) -> Result<QuantumLookupDecoder> {
    QuantumLookupDecoder::build(code, t)
}
