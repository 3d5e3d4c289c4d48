//! LDGM syndrome-measurement codes for QLDPC stabilizer codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf`]: packed GF(2) vectors and matrices, GF(4) Paulis and the trace
//!   inner product.
//! * [`stabilizer`]: rotated surface codes, syndromes, stabilizer-group
//!   membership and a lookup decoder for qubit errors.
//! * [`sm_code`]: syndrome-measurement codes: encoding generators into
//!   measured stabilizer-group elements, weight bounds, the repetition
//!   baseline and measurement-error decoding.
//! * [`peg`]: protograph design by progressive edge growth and quasi-cyclic
//!   lifting into LDGM generator matrices.
//! * [`sim`]: importance-sampling Monte Carlo under phenomenological noise.
//! * [`cli`]: the command implementations behind the `ldgm-sm` binary.

pub mod cli;
pub mod error;
pub mod gf;
pub mod peg;
pub mod sim;
pub mod sm_code;
pub mod stabilizer;
pub mod util;

pub use error::{Error, Result};
