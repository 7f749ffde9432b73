//! Two-step Laplace Adams–Bashforth time stepping for `u_t = F(u)` and the
//! Caputo problem `D^α u = F(u)`, with the finite-difference right-hand
//! sides, stability margins and reference solutions used to validate them.
//!
//! The fractional scheme only ever needs `F_n` and `F_{n-1}`: the memory of
//! the Caputo operator is folded into a pair of level-dependent weights (see
//! [`weights::delta_weights`]), so no history sum is carried along.

pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod reference;
pub mod spatial;
pub mod stability;
pub mod steppers;
pub mod weights;

pub use error::{Error, Result};
pub use mesh::{FieldState, SpaceTimeGrid, TimeGrid};
pub use steppers::{advance, Integrator, RhsEvaluator, SchemeKind};
pub use weights::{delta_weights, gamma_fn, StepWeights};
