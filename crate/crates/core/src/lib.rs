//! Degeneracy bounds for homogeneous topological order, made concrete.
//!
//! The crate builds a two-colored cellulation of a triangulated closed
//! manifold out of its second barycentric subdivision, turns it into an
//! `A ⊔ B ⊔ C` partition of the qudits of a lattice model, checks that `A`
//! and `B` are correctable for a stabilizer code, and certifies
//! `log₂ D ≤ |C|` together with an exact entropic verification.
//!
//! Module map:
//!
//! - [`gf2`]: bit-packed GF(2) vectors and matrices (rank, solve, nullspace).
//! - [`simplicial`]: closed-manifold complexes, boundary maps, Betti numbers,
//!   barycentric subdivision and the subdivision chain map.
//! - [`manifolds`]: built-in triangulations (sphere, tori, genus-g, Klein bottle, RP²).
//! - [`layout`]: qudit positions, metrics and neighborhoods.
//! - [`bipartition`]: defect chain, partner matching, red/blue coloring,
//!   checkerboard cellulation, verification and the A/B/C partition.
//! - [`stabilizer`]: symplectic Pauli operators, stabilizer codes and model constructions.
//! - [`correctability`]: cleaning-lemma test, dense Knill–Laflamme check, sweeps, certificates.
//! - [`entropy`]: stabilizer entropies, the entropic inequality chain and the approximate bound.

pub mod bipartition;
pub mod correctability;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod layout;
pub mod manifolds;
pub mod mesh_io;
pub mod simplicial;
pub mod stabilizer;

pub use error::{Error, Result};
pub use exec::Exec;
pub use gf2::{BitMatrix, BitVector};
