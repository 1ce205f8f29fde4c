//! Quaternion algebras `(a, b | Q)`, rank-4 lattices in Hermite normal form,
//! orders and right ideals.

mod algebra;
mod lattice;
mod order;

pub use algebra::{conj, make_algebra, QuatElement, RatQuatAlgebra};
pub use lattice::QuatLattice;
pub use order::{
    conjugate_lattice, eichler_order, generate_order, lattice_nrd, lattice_product, left_order_of,
    order_closure_check, residue_vectors, right_order_of, QuatOrder, RightIdeal,
};
