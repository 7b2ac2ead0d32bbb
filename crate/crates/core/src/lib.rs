//! Exact construction and enumeration of the primitive irreducible
//! representations of `SL_2(o_r)` for finite quotients `o_r` of 2-adic rings
//! and of `F_q[[t]]` with `q` even.
//!
//! The crate is organised bottom-up:
//!
//! * [`chain_ring`] — arithmetic in `Z/2^r`, Galois rings and `F_q[t]/t^r`;
//! * [`linalg`] — 2x2 matrices, companion forms, centralizers, congruence
//!   subgroups and trace-pairing characters;
//! * [`orbits`] — orbits of cyclic characters of `K^l` under conjugation;
//! * [`extension`] — the sets `h^j` and the extension sets `E`;
//! * [`clifford`] — stabilizers, the subgroup `M_A`, irreducible blocks,
//!   primitive tables and zeta polynomials;
//! * [`brute_force`] — an independent character-table oracle.

pub mod brute_force;
pub mod chain_ring;
pub mod clifford;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod orbits;

pub use chain_ring::{ResidueField, Ring, RingElem, RingKind, RingSpec};
pub use error::{Error, Result};
pub use linalg::{CyclicTriple, GroupKind, Mat2};
