//! Matrads, biassociahedra, and bimultiplihedra.
//!
//! This crate builds the combinatorial machinery behind A-infinity
//! bialgebras and their morphisms:
//!
//! * leveled-tree and ordered-partition models of permutahedra, with the
//!   projections to associahedra and multiplihedra ([`permutahedron`]),
//! * matrix monomials over the generators `t(m,n)` / `f(m,n)`, their
//!   tensor-product composition, and the admissible-class enumerators that
//!   index the cells of the biassociahedra `KK` and bimultiplihedra `JJ`
//!   ([`monomial`], [`diagonal`], [`bimultiplihedron`]),
//! * evaluation of cell monomials on graded modules, structure and morphism
//!   checks, and transfer of A-infinity bialgebra structure across a
//!   homology isomorphism ([`ainfinity`], [`transfer`], [`models`]).
//!
//! Everything is exact: scalars are GF(2) or arbitrary-precision rationals,
//! and every enumeration is deterministic so that serialized output is
//! byte-stable across runs.

pub mod diagonal;
pub mod linalg;
pub mod monomial;
pub mod permutahedron;
