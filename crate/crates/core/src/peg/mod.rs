//! Protograph design by progressive edge growth and quasi-cyclic lifting.

mod lift;
mod protograph;

pub use lift::{
    circulant, expand, format_poly_matrix, lifted_girth, parse_poly_fixture, parse_poly_matrix,
    qc_peg_shifts, PolyFixture, QcLift,
};
pub use protograph::{peg_protograph, peg_protograph_with_checks, DegreeSequence, Protograph};

use crate::error::Result;
use crate::gf::BitMatrix;

/// The six built-in 24×60 lifted generators, as `(name, text)`.
pub const BUILTIN_FIXTURES: [(&str, &str); 6] = [
    ("h2x5_1", include_str!("../../fixtures/h2x5_1.txt")),
    ("h2x5_2", include_str!("../../fixtures/h2x5_2.txt")),
    ("h4x10_1", include_str!("../../fixtures/h4x10_1.txt")),
    ("h4x10_2", include_str!("../../fixtures/h4x10_2.txt")),
    ("h6x15", include_str!("../../fixtures/h6x15.txt")),
    ("h8x20", include_str!("../../fixtures/h8x20.txt")),
];

/// Parses every built-in fixture.
pub fn builtin_fixtures() -> Result<Vec<(&'static str, PolyFixture)>> {
    BUILTIN_FIXTURES
        .iter()
        .map(|(name, text)| Ok((*name, parse_poly_fixture(text)?)))
        .collect()
}

/// Full construction: PEG protograph, greedy shift selection, expansion.
pub fn construct(
    n_c: usize,
    n_v: usize,
    ds: &DegreeSequence,
    n: usize,
    seed: u64,
) -> Result<(Protograph, QcLift, BitMatrix)> {
    let proto = peg_protograph(n_c, n_v, ds, n, seed)?;
    let lift = qc_peg_shifts(&proto, n, seed)?;
    let m = lift.expand();
    Ok((proto, lift, m))
}
