//! Optimal spinor selectivity for quaternion orders over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! * [`numthy`]: integers, square classes, Hilbert symbols, quadratic orders.
//! * [`quat`]: quaternion algebras, lattices in Hermite normal form, orders and ideals.
//! * [`localorder`]: residue rings `O/p^k O`, Eichler invariants, local embedding
//!   numbers and local norm groups.
//! * [`spinor`]: spinor genus field, spinor class group, selectivity and the
//!   relative-conductor formula.
//! * [`definite`]: exhaustive enumeration in definite algebras and exact checks of
//!   the trace formulas.
//! * [`hunt`]: search for orders whose spinor genus field contains a given
//!   quadratic field.

pub mod error;
pub mod numthy;
pub mod quat;
pub mod localorder;
pub mod spinor;
pub mod definite;
pub mod hunt;
pub mod corpus;

pub use error::{Error, Result};
