//! Shift constructions that force rank concentration: the per-layer ℓ_h
//! targets, the sparse base case, the invertibility-preserving evaluation,
//! and the layered map τ₀.

mod schedule;
mod shift_map;
mod sparse;
mod tau;

pub use schedule::{ell_schedule, EllSchedule};
pub use shift_map::{Projection, ShiftMap, ShiftTerm};
pub use sparse::{
    check_sparse_shift, low_support_points, preserve_invertibility_alpha,
    preserve_invertibility_alpha_nonzero, sparse_shift, sparse_shift_ell, sparse_shift_weights,
};
pub use tau::{
    build_tau, build_tau_for, low_support_basis, truncate, verify_basis_change,
    verify_tau_concentration, BasisChange, DetCheck, LayerRecord, TauConstruction,
};
