//! Derivations of group rings ℂ[G] and characters of the adjoint-action groupoid.

pub mod analysis;
pub mod character;
pub mod derivation;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod ring;
pub mod specs;

pub use character::{Character, Homomorphism, Potential, Tabulated, TabulatedDomain};
pub use derivation::{Derivation, EndomorphismSpec, Provenance};
pub use error::{Error, Result};
pub use group::{
    Ball, ClassPartition, ElementOrder, Group, GroupElement, GroupKind, GroupSpec, Letter,
};
pub use groupoid::Morphism;
pub use ring::{NormSpec, RingElement};
pub use specs::{parse_character, DerivationSpec};
