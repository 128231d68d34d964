//! Constructive density-uniform many-one reductions between computable
//! subsets of ℕ.
//!
//! A set `A ⊆ ℕ` has prefix density `ρ_n(A) = #{k < n : k ∈ A} / n`; its
//! asymptotic density is the limit of `ρ_n(A)` when that limit exists. A
//! total function is *uniform* when the preimage of every density-0 set
//! again has density 0, and `A` is *generically m-reducible* to `B` when
//! some uniform total computable `f` satisfies `x ∈ A ⟺ f(x) ∈ B` for
//! every `x`.
//!
//! This crate builds such reductions explicitly for decidable membership
//! predicates: whenever neither `B` nor its complement is negligible (the
//! caller supplies exact rational density bounds ε), [`reductions::generic_reduce`]
//! produces a total evaluable function reducing any computable `A` to `B`.
//! The construction goes through three stages:
//!
//! * a rank map sending the k-th element of `A` to `2k` and the k-th
//!   non-element to `2k + 1` ([`reductions::rank_reduce_to_evens`]),
//! * interval partitions of ℕ in which `B` keeps density above ε, paired
//!   with fast-growing blocks that are mapped cyclically onto the
//!   `B`-elements of each interval ([`reductions::range_into`]),
//! * a parity dispatch combining a map into `B` with a map into its
//!   complement ([`reductions::reduce_evens_to`]), composed with the rank
//!   map.
//!
//! Everything density-related is exact rational arithmetic over big
//! integers; floating point appears only in informational CSV columns.
//! [`verify`] checks the m-reduction property exhaustively on finite
//! prefixes and tracks preimage densities of negligible sets, and
//! [`cli`] exposes the whole pipeline as a command-line tool.

pub mod cli;
pub mod density;
pub mod reductions;
pub mod sets;
pub mod verify;

pub use sets::ComputableSet;
