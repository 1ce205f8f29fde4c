//! Integer and rational utilities, square classes of local fields, quadratic
//! symbols and orders in imaginary quadratic fields.

mod arith;
mod quadorder;
mod squareclass;
mod symbols;

pub use arith::*;
pub use quadorder::{quad_class_number, QuadOrder};
pub use squareclass::{local_norm_group, SquareClass, SquareClassSubgroup};
pub use symbols::{hilbert_symbol, hilbert_symbol_int, kronecker_symbol, legendre, Place};
