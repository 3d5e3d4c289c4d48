//! Exact arithmetic over GF(2) and GF(4).
//!
//! Bit vectors and matrices are packed into `u64` words. Paulis use the
//! `(X-part, Z-part)` two-bit encoding of GF(4), under which the trace inner
//! product is the symplectic form.

mod bitvec;
mod matrix;
mod pauli;

pub use bitvec::{BitVec, Ones};
pub use matrix::{BitMatrix, Echelon, MAX_ENUMERATION_ROWS};
pub use pauli::{trace_inner_product, Gf4, PauliVec};

/// Rank of `m` over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// `m * g`, the row vector `m` encoded by generator `g`.
pub fn encode_message(m: &BitVec, g: &BitMatrix) -> crate::Result<BitVec> {
    g.encode(m)
}

/// Minimum distance of the code generated by the rows of `g`.
pub fn min_distance(g: &BitMatrix) -> crate::Result<usize> {
    g.min_distance()
}

/// A parity-check matrix for the code generated by `g`.
pub fn parity_check_of(g: &BitMatrix) -> crate::Result<BitMatrix> {
    g.parity_check()
}
