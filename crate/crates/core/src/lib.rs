//! Certification of a unique primitive point above j(E) from the mod-m₀
//! image of an elliptic curve's Galois representation.

pub mod certifier;
pub mod exec;
pub mod grouptab;
pub mod harness;
pub mod modarith;
pub mod orbitcalc;
pub mod primitive;
