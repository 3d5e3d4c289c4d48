//! Syndrome-measurement (SM) codes.
//!
//! An SM code is a classical `[n_sm, ℓ, d_sm]` code whose ℓ×n_sm generator
//! selects, column by column, which stabilizer generators are multiplied
//! together into one measured stabilizer-group element. Measuring all n_sm
//! elements yields the SM encoding of the length-ℓ syndrome, so measurement
//! errors can be corrected with a decoder for the classical code.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{BitMatrix, BitVec, PauliVec};
use crate::stabilizer::StabilizerCode;
use crate::util::{binomial, next_combination};

/// Default cap on SM lookup-table entries.
pub const DEFAULT_SM_TABLE_CAP: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct SmCode {
    gen: BitMatrix,
    parity: BitMatrix,
    distance: usize,
    column_weights: Vec<usize>,
    // Message recovery: s = c[pivots] * recover.
    pivots: Vec<usize>,
    recover: BitMatrix,
}

impl SmCode {
    /// Wraps an ℓ×n_sm generator. The distance is computed by exhaustive
    /// enumeration, so ℓ must stay small (see [`crate::gf::MAX_ENUMERATION_ROWS`]).
    pub fn new(gen: BitMatrix) -> Result<Self> {
        let parity = gen.parity_check()?;
        let distance = gen.min_distance()?;
        let ech = gen.echelon();
        Ok(SmCode {
            column_weights: gen.col_weights(),
            parity,
            distance,
            pivots: ech.pivots.clone(),
            recover: ech.transform,
            gen,
        })
    }

    pub fn gen(&self) -> &BitMatrix {
        &self.gen
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Number of encoded syndrome bits, ℓ.
    pub fn l(&self) -> usize {
        self.gen.rows()
    }

    pub fn n_sm(&self) -> usize {
        self.gen.cols()
    }

    pub fn column_weights(&self) -> &[usize] {
        &self.column_weights
    }

    pub fn max_column_weight(&self) -> usize {
        self.column_weights.iter().copied().max().unwrap_or(0)
    }

    /// Largest number of errors guaranteed correctable, ⌊(d−1)/2⌋.
    pub fn correctable(&self) -> usize {
        self.distance.saturating_sub(1) / 2
    }

    pub fn encode(&self, s: &BitVec) -> Result<BitVec> {
        self.gen.encode(s)
    }

    /// Syndrome of a received word under the cached parity-check matrix.
    pub fn parity_syndrome(&self, word: &BitVec) -> Result<BitVec> {
        self.parity.mul_vec(word)
    }

    pub fn is_codeword(&self, word: &BitVec) -> bool {
        word.len() == self.n_sm()
            && self.parity.row_vecs().iter().all(|h| !h.dot(word))
    }

    /// Message read off the pivot positions. Exact for codewords; for other
    /// words it is the message of the codeword agreeing on the pivots.
    pub fn recover_message(&self, word: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.l());
        for (i, &p) in self.pivots.iter().enumerate() {
            if word.get(p) {
                s ^= self.recover.row(i);
            }
        }
        s
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn to_json(&self) -> SmCodeJson {
        SmCodeJson {
            l: self.l(),
            n_sm: self.n_sm(),
            rows: self.gen.row_vecs().iter().map(ToString::to_string).collect(),
            distance: self.distance,
        }
    }

    pub fn from_json(json: &SmCodeJson) -> Result<Self> {
        let rows = json
            .rows
            .iter()
            .map(|r| r.parse())
            .collect::<Result<Vec<BitVec>>>()?;
        let code = SmCode::new(BitMatrix::from_rows_with_cols(rows, json.n_sm)?)?;
        if code.l() != json.l {
            return Err(Error::Parse(format!(
                "declared l = {} but found {} rows",
                json.l,
                code.l()
            )));
        }
        if code.distance != json.distance {
            return Err(Error::Parse(format!(
                "declared distance {} but computed {}",
                json.distance, code.distance
            )));
        }
        Ok(code)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SmCodeJson {
    pub l: usize,
    pub n_sm: usize,
    pub rows: Vec<String>,
    pub distance: usize,
}

/// `r`-fold repetition of each of `l` syndrome bits: row i covers columns
/// `i*r .. i*r + r`.
pub fn repetition_sm_code(l: usize, r: usize) -> Result<SmCode> {
    if l == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!(
            "repetition code needs l, r >= 1 (got {l}, {r})"
        )));
    }
    let mut gen = BitMatrix::zeros(l, l * r);
    for i in 0..l {
        for c in i * r..(i + 1) * r {
            gen.set(i, c, true);
        }
    }
    SmCode::new(gen)
}

/// Largest possible distance of an R×C generator with column weight w_C:
/// ⌊C·w_C / R⌋, the average row weight.
pub fn d_max_bound(rows: usize, cols: usize, col_weight: usize) -> usize {
    assert!(rows > 0, "d_max_bound needs at least one row");
    cols * col_weight / rows
}

/// Exact rational `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Smallest admissible ratio C/(d·ℓ) against d-fold repetition that still
/// allows d_max ≥ d with column weight w_C: 1/w_C.
pub fn min_improvement_factor(col_weight: usize) -> Ratio {
    assert!(col_weight >= 1, "column weight must be positive");
    Ratio {
        num: 1,
        den: col_weight,
    }
}

/// Fewest measurements an SM code of column weight w_C can use while
/// keeping d_max ≥ d: ⌈d·ℓ / w_C⌉.
pub fn min_measurement_count(d: usize, l: usize, col_weight: usize) -> usize {
    (d * l).div_ceil(col_weight)
}

/// The n_sm stabilizer-group elements selected by the columns of an SM code.
#[derive(Clone, Debug)]
pub struct MeasuredStabilizerSet {
    elements: Vec<PauliVec>,
    column_weights: Vec<usize>,
    max_generator_weight: usize,
}

impl MeasuredStabilizerSet {
    pub fn elements(&self) -> &[PauliVec] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weight_profile(&self) -> Vec<usize> {
        self.elements.iter().map(PauliVec::weight).collect()
    }

    /// Per-element weight bound: column weight times max generator weight.
    pub fn weight_bounds(&self) -> Vec<usize> {
        self.column_weights
            .iter()
            .map(|w| w * self.max_generator_weight)
            .collect()
    }

    /// Measured syndrome: commutation of each element with the qubit error,
    /// flipped where `meas_error` is set.
    pub fn measured_syndrome(&self, qubit_error: &PauliVec, meas_error: &BitVec) -> Result<BitVec> {
        if meas_error.len() != self.elements.len() {
            return Err(Error::LengthMismatch {
                expected: self.elements.len(),
                got: meas_error.len(),
            });
        }
        if let Some(e) = self.elements.first() {
            if e.len() != qubit_error.len() {
                return Err(Error::LengthMismatch {
                    expected: e.len(),
                    got: qubit_error.len(),
                });
            }
        }
        Ok(self.measured_syndrome_unchecked(qubit_error, meas_error))
    }

    #[inline]
    pub(crate) fn measured_syndrome_unchecked(
        &self,
        qubit_error: &PauliVec,
        meas_error: &BitVec,
    ) -> BitVec {
        let mut out = meas_error.clone();
        if !qubit_error.is_identity() {
            for (k, el) in self.elements.iter().enumerate() {
                if el.anticommutes(qubit_error) {
                    out.flip(k);
                }
            }
        }
        out
    }

    pub fn to_audit(&self) -> Vec<MeasuredElementJson> {
        self.elements
            .iter()
            .map(|e| MeasuredElementJson {
                pauli: e.to_string(),
                weight: e.weight(),
            })
            .collect()
    }
}

/// Audit record for one measured element.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MeasuredElementJson {
    pub pauli: String,
    pub weight: usize,
}

/// Element k is the product of the generators selected by column k of `gen`.
pub fn encode_generators(generators: &[PauliVec], gen: &BitMatrix) -> Result<Vec<PauliVec>> {
    if gen.rows() != generators.len() {
        return Err(Error::Dimension(format!(
            "SM generator has {} rows but the code has {} stabilizer generators",
            gen.rows(),
            generators.len()
        )));
    }
    let n = generators.first().map_or(0, PauliVec::len);
    let mut elements = vec![PauliVec::identity(n); gen.cols()];
    for (i, g) in generators.iter().enumerate() {
        for k in gen.row(i).ones() {
            elements[k] += g;
        }
    }
    Ok(elements)
}

pub fn encode_stabilizers(code: &StabilizerCode, sm: &SmCode) -> Result<MeasuredStabilizerSet> {
    Ok(MeasuredStabilizerSet {
        elements: encode_generators(code.generators(), sm.gen())?,
        column_weights: sm.column_weights().to_vec(),
        max_generator_weight: code.max_generator_weight(),
    })
}

pub fn stabilizer_weight_profile(ms: &MeasuredStabilizerSet) -> Vec<usize> {
    ms.weight_profile()
}

/// Bounded-distance decoder: parity syndrome → lightest measurement-error
/// pattern of weight ≤ t producing it.
#[derive(Clone, Debug)]
pub struct SmLookupDecoder {
    table: HashMap<BitVec, BitVec>,
    max_weight: usize,
}

impl SmLookupDecoder {
    pub fn build(sm: &SmCode, t: usize) -> Result<Self> {
        Self::build_with_cap(sm, t, DEFAULT_SM_TABLE_CAP)
    }

    /// Patterns are enumerated by weight, then as index sets in
    /// lexicographic order; the first pattern to claim a syndrome keeps it.
    pub fn build_with_cap(sm: &SmCode, t: usize, cap: usize) -> Result<Self> {
        let n = sm.n_sm();
        let t = t.min(n);
        let needed: u128 = (0..=t).map(|w| binomial(n as u64, w as u64)).sum();
        if needed > cap as u128 {
            return Err(Error::TableTooLarge { needed, cap });
        }
        let columns: Vec<BitVec> = (0..n).map(|c| sm.parity().column(c)).collect();
        let r = sm.parity().rows();
        let mut table = HashMap::with_capacity(needed as usize);
        table.insert(BitVec::zeros(r), BitVec::zeros(n));
        for w in 1..=t {
            let mut idx: Vec<usize> = (0..w).collect();
            loop {
                let mut syn = BitVec::zeros(r);
                for &i in &idx {
                    syn ^= &columns[i];
                }
                table
                    .entry(syn)
                    .or_insert_with(|| BitVec::from_indices(n, &idx));
                if !next_combination(&mut idx, n) {
                    break;
                }
            }
        }
        Ok(SmLookupDecoder {
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

    pub fn lookup(&self, parity_syndrome: &BitVec) -> Option<&BitVec> {
        self.table.get(parity_syndrome)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BitVec, &BitVec)> {
        self.table.iter()
    }
}

pub fn build_sm_lookup_decoder(sm: &SmCode, t: usize) -> Result<SmLookupDecoder> {
    SmLookupDecoder::build(sm, t)
}

/// Output of SM decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// Recovered length-ℓ syndrome.
    pub syndrome: BitVec,
    /// False when the parity syndrome was not in the table.
    pub ok: bool,
}

/// Bounded-distance decoding of a measured length-n_sm syndrome. On a table
/// miss the syndrome is read from the pivot positions of the raw word and
/// `ok` is false.
pub fn decode_measured(sm: &SmCode, dec: &SmLookupDecoder, measured: &BitVec) -> Result<Decoded> {
    if measured.len() != sm.n_sm() {
        return Err(Error::LengthMismatch {
            expected: sm.n_sm(),
            got: measured.len(),
        });
    }
    Ok(decode_bounded(sm, dec, measured))
}

#[inline]
pub(crate) fn decode_bounded(sm: &SmCode, dec: &SmLookupDecoder, measured: &BitVec) -> Decoded {
    let p = sm.parity.mul_vec(measured).expect("length checked");
    match dec.lookup(&p) {
        Some(err) => {
            let corrected = measured ^ err;
            Decoded {
                syndrome: sm.recover_message(&corrected),
                ok: sm.is_codeword(&corrected),
            }
        }
        None => Decoded {
            syndrome: sm.recover_message(measured),
            ok: false,
        },
    }
}

/// Minimum-weight decoding by information-set enumeration over pairwise
/// disjoint information sets.
///
/// For each information set I with systematic generator G_I, candidates are
/// the codewords `(r_I + e_I) G_I` for patterns e_I of increasing weight j.
/// With m disjoint sets, any error of weight w meets some set in at most
/// ⌊w/m⌋ positions, so once level j is exhausted on every set the best
/// candidate of weight B is provably minimal whenever ⌊(B−1)/m⌋ ≤ j. The
/// search stops there or at `order`, whichever comes first; up to that point
/// the result is an exact minimum-weight (maximum-likelihood) decision.
#[derive(Clone, Debug)]
pub struct InfoSetDecoder {
    n: usize,
    sets: Vec<InfoSet>,
    order: usize,
}

#[derive(Clone, Debug)]
struct InfoSet {
    positions: Vec<usize>,
    // Rows of the systematic generator, packed into u128.
    rows: Vec<u128>,
}

/// Largest block length supported by [`InfoSetDecoder`].
pub const INFO_SET_MAX_LEN: usize = 128;

fn pack(v: &BitVec) -> u128 {
    let w = v.words();
    let lo = w.first().copied().unwrap_or(0) as u128;
    let hi = w.get(1).copied().unwrap_or(0) as u128;
    lo | (hi << 64)
}

fn unpack(x: u128, len: usize) -> BitVec {
    BitVec::from_words(len, vec![x as u64, (x >> 64) as u64])
}

impl InfoSetDecoder {
    pub fn new(sm: &SmCode, order: usize) -> Result<Self> {
        let n = sm.n_sm();
        let l = sm.l();
        if n > INFO_SET_MAX_LEN {
            return Err(Error::InvalidParameter(format!(
                "information-set decoding supports n_sm <= {INFO_SET_MAX_LEN}, got {n}"
            )));
        }
        let mut sets = Vec::new();
        let mut remaining: Vec<usize> = (0..n).collect();
        loop {
            let sub = sm.gen().select_columns(&remaining);
            let ech = sub.echelon();
            if ech.rank() < l {
                break;
            }
            let positions: Vec<usize> = ech.pivots.iter().map(|&p| remaining[p]).collect();
            let sys = ech.transform.mul(sm.gen())?;
            sets.push(InfoSet {
                rows: sys.row_vecs().iter().map(pack).collect(),
                positions: positions.clone(),
            });
            remaining.retain(|c| !positions.contains(c));
            if l == 0 {
                break;
            }
        }
        if sets.is_empty() {
            return Err(Error::RankDeficient { rank: 0, rows: l });
        }
        Ok(InfoSetDecoder { n, sets, order })
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Returns the decoded codeword for a received word.
    pub fn decode_codeword(&self, received: &BitVec) -> BitVec {
        let r = pack(received);
        let m = self.sets.len();
        let mut best_err = u128::MAX;
        let mut best_w = usize::MAX;
        let bases: Vec<u128> = self
            .sets
            .iter()
            .map(|set| {
                let mut cw = 0u128;
                for (i, &p) in set.positions.iter().enumerate() {
                    if (r >> p) & 1 == 1 {
                        cw ^= set.rows[i];
                    }
                }
                r ^ cw
            })
            .collect();
        for j in 0..=self.order {
            for (set, &base) in self.sets.iter().zip(&bases) {
                search_level(&set.rows, base, j, 0, &mut best_w, &mut best_err);
            }
            if best_w != usize::MAX && (best_w.saturating_sub(1)) / m <= j {
                break;
            }
        }
        unpack(r ^ best_err, self.n)
    }
}

fn search_level(
    rows: &[u128],
    acc: u128,
    remaining: usize,
    start: usize,
    best_w: &mut usize,
    best_err: &mut u128,
) {
    if remaining == 0 {
        let w = acc.count_ones() as usize;
        if w < *best_w {
            *best_w = w;
            *best_err = acc;
        }
        return;
    }
    for i in start..=rows.len().saturating_sub(remaining) {
        search_level(rows, acc ^ rows[i], remaining - 1, i + 1, best_w, best_err);
    }
}

/// How the simulator turns a measured length-n_sm syndrome into a length-ℓ
/// syndrome.
#[derive(Clone, Debug)]
pub enum SmDecoder {
    /// Table lookup; misses fall back to the raw pivot estimate.
    Bounded(SmLookupDecoder),
    /// Table lookup; misses go to minimum-weight information-set search.
    MinWeight(SmLookupDecoder, InfoSetDecoder),
}

impl SmDecoder {
    pub fn table(&self) -> &SmLookupDecoder {
        match self {
            SmDecoder::Bounded(t) | SmDecoder::MinWeight(t, _) => t,
        }
    }

    pub fn decode(&self, sm: &SmCode, measured: &BitVec) -> Decoded {
        let hit = decode_bounded(sm, self.table(), measured);
        match self {
            SmDecoder::MinWeight(_, isd) if !hit.ok => {
                let cw = isd.decode_codeword(measured);
                Decoded {
                    syndrome: sm.recover_message(&cw),
                    ok: false,
                }
            }
            _ => hit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Gf4;

    fn hamming() -> BitMatrix {
        "1001011\n0101101\n0010111".parse().unwrap()
    }

    #[test]
    fn bound_examples() {
        assert_eq!(d_max_bound(24, 60, 3), 7);
        assert_eq!(d_max_bound(24, 120, 1), 5);
        assert_eq!(d_max_bound(5, 7, 2), 2);
        assert_eq!(min_improvement_factor(5), Ratio { num: 1, den: 5 });
        assert_eq!(min_improvement_factor(1).as_f64(), 1.0);
        assert_eq!(min_measurement_count(5, 24, 3), 40);
    }

    #[test]
    fn repetition_parameters() {
        let rep = repetition_sm_code(24, 5).unwrap();
        assert_eq!((rep.n_sm(), rep.l(), rep.distance()), (120, 24, 5));
        let one = repetition_sm_code(1, 1).unwrap();
        assert_eq!(one.gen(), &BitMatrix::identity(1));
        assert_eq!(one.distance(), 1);
        assert!(repetition_sm_code(0, 3).is_err());
    }

    #[test]
    fn hamming_table_one_products() {
        // S_i = Z on qubit i, so a product's support is exactly its column.
        let gens: Vec<PauliVec> = (0..3).map(|i| PauliVec::single(3, i, Gf4::Omega)).collect();
        let elements = encode_generators(&gens, &hamming()).unwrap();
        let supports: Vec<Vec<usize>> = elements.iter().map(PauliVec::support).collect();
        assert_eq!(
            supports,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![1, 2],
                vec![0, 2],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn identity_sm_code_keeps_generators() {
        let gens: Vec<PauliVec> = ["XXI", "IZZ"].iter().map(|s| s.parse().unwrap()).collect();
        let el = encode_generators(&gens, &BitMatrix::identity(2)).unwrap();
        assert_eq!(el, gens);
        let all_ones: BitMatrix = "1\n1".parse().unwrap();
        let el = encode_generators(&gens, &all_ones).unwrap();
        assert_eq!(el[0].to_string(), "XYZ");
        assert!(encode_generators(&gens, &BitMatrix::identity(3)).is_err());
    }

    #[test]
    fn lookup_decoder_on_hamming() {
        let sm = SmCode::new(hamming()).unwrap();
        let dec = SmLookupDecoder::build(&sm, 1).unwrap();
        assert_eq!(dec.len(), 8);
        for (syn, pat) in dec.entries() {
            assert_eq!(&sm.parity_syndrome(pat).unwrap(), syn);
            assert!(pat.weight() <= 1);
        }
        let s: BitVec = "101".parse().unwrap();
        let cw = sm.encode(&s).unwrap();
        let d = decode_measured(&sm, &dec, &cw).unwrap();
        assert_eq!(d, Decoded { syndrome: s.clone(), ok: true });
        for k in 0..7 {
            let mut noisy = cw.clone();
            noisy.flip(k);
            assert_eq!(decode_measured(&sm, &dec, &noisy).unwrap().syndrome, s);
        }
        assert!(decode_measured(&sm, &dec, &BitVec::zeros(6)).is_err());
    }

    #[test]
    fn table_miss_reports_not_ok() {
        let sm = repetition_sm_code(2, 5).unwrap();
        let dec = SmLookupDecoder::build(&sm, 1).unwrap();
        let noisy = BitVec::from_indices(10, &[0, 1]);
        let d = decode_measured(&sm, &dec, &noisy).unwrap();
        assert!(!d.ok);
        assert_eq!(d.syndrome, sm.recover_message(&noisy));
    }

    #[test]
    fn table_cap_is_enforced() {
        let sm = repetition_sm_code(4, 5).unwrap();
        assert!(matches!(
            SmLookupDecoder::build_with_cap(&sm, 3, 100),
            Err(Error::TableTooLarge { .. })
        ));
    }

    #[test]
    fn info_set_decoder_majority_on_repetition() {
        let sm = repetition_sm_code(3, 5).unwrap();
        let isd = InfoSetDecoder::new(&sm, 3).unwrap();
        assert_eq!(isd.num_sets(), 5);
        // Three flips in block 0 and two in block 2: majority decoding.
        let noisy = BitVec::from_indices(15, &[0, 1, 2, 10, 11]);
        let cw = isd.decode_codeword(&noisy);
        assert_eq!(sm.recover_message(&cw).to_string(), "100");
    }

    #[test]
    fn weight_bounds_and_audit() {
        let gens: Vec<PauliVec> = ["ZZII", "IZZI", "IIZZ"].iter().map(|s| s.parse().unwrap()).collect();
        let code_like = encode_generators(&gens, &hamming()).unwrap();
        assert_eq!(code_like[6].to_string(), "ZIIZ");
        let sm = SmCode::new(hamming()).unwrap();
        let ms = MeasuredStabilizerSet {
            elements: code_like,
            column_weights: sm.column_weights().to_vec(),
            max_generator_weight: 2,
        };
        for (w, b) in ms.weight_profile().iter().zip(ms.weight_bounds()) {
            assert!(*w <= b);
        }
        assert_eq!(ms.to_audit()[0].weight, 2);
    }

    #[test]
    fn json_round_trip() {
        let sm = SmCode::new(hamming()).unwrap();
        let json = sm.to_json();
        assert_eq!(json.distance, 4);
        let back = SmCode::from_json(&json).unwrap();
        assert_eq!(back.gen(), sm.gen());
        let mut bad = json.clone();
        bad.distance = 3;
        assert!(SmCode::from_json(&bad).is_err());
    }
}
