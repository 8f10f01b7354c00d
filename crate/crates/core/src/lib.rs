//! Symmetries, adjointness and conservation laws of first-order evolution
//! equations `u_t + f(t, x, u, u_x) = 0`.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`]: symbolic expressions over jet coordinates: parsing, printing,
//!   normalization, differentiation, evaluation and zero testing.
//! * [`jet`]: evolution equations, total derivatives, reduction on
//!   solutions and the adjoint equation.
//! * [`adjointness`]: (quasi-)self-adjointness classification.
//! * [`symmetry`]: determining equations and the Burgers generator catalog.
//! * [`conservation`]: conserved vectors and their symbolic certification.
//! * [`characteristics`]: exact pre-shock solutions of
//!   `u_t + a(u) u_x = 0` and numeric conservation checks.

pub mod adjointness;
pub mod characteristics;
pub mod conservation;
pub mod expr;
pub mod jet;
pub mod symmetry;

pub use expr::{parse, Expr, FunctionTable, Symbol, ZeroTestConfig, ZeroVerdict};
pub use jet::EvolutionSpec;
