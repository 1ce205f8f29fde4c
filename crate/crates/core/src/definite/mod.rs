//! Exhaustive enumeration in definite algebras: short vectors, unit groups,
//! right ideal classes, global embedding numbers and the trace formulas.

mod classes;
mod embed;
mod enumerate;
mod trace;

pub use classes::{
    class_set, mass_target, neighbors, reduce_ideal, ClassRep, ClassSet, ClassSetSummary, DEFAULT_PRIMES_CAP,
};

pub use embed::{conjugation_orbits, global_embed_count, optimal_images};
pub use enumerate::{
    ideals_equivalent, is_principal, principal_generator, short_vectors, shortest_vector, unit_group, ShortVector,
    UnitGroup,
};
pub use trace::{
    dpinf_experiment, local_side, local_side_with, verify_spinor_trace_formula, verify_spinor_trace_formula_with,
    verify_trace_formula, verify_trace_formula_with, DpinfReport, LocalSide,
    SpinorClassRow, SpinorTraceReport, TraceReport,
};
