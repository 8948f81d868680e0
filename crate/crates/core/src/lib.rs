//! Symbolic consistency and stability checking for Boolean evolution systems.
//!
//! A Boolean evolution system is a set of three-valued variables (true,
//! false, unknown) rewritten by guarded assignment rules. This crate parses
//! such systems, compiles them into a BDD-encoded transition system and
//! decides whether the rules can conflict and whether every evolution
//! settles, producing shortest counterexample traces when they do not.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bdd;
pub mod ctl;
pub mod dsl;
pub mod encode;
pub mod engine;
pub mod sim;

pub use bdd::{Bdd, BddManager};
pub use dsl::{parse_bes, Bes, Guard, Rule, TriState, Truth, VarDecl, VarKind};
pub use encode::{build_ts, SymbolicTs};
pub use engine::{full_check, CheckOptions, CheckReport};
