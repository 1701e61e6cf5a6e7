//! Qutrit teleportation through amplitude-damping channels, with
//! weak-measurement and environment-assisted protection, and the two-phase
//! quantum Fisher information of the teleported state.
//!
//! Module map:
//! - [`tensor`]: dense complex matrices, Kronecker products, partial traces,
//!   Hermitian eigendecomposition.
//! - [`channels`]: Kraus sets, measurement operators, qutrit gates.
//! - [`teleport`]: resource preparation, the three-qutrit circuit, closed-form
//!   output states.
//! - [`metrology`]: QFIM and the independent/simultaneous variance bounds.
//! - [`schemes`]: closed-form `zeta` factors, optimal reversal strengths,
//!   success probabilities and the scheme comparison.
//! - [`optimize`]: golden-section search.

// `!(x > 0.0)` style guards are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod density;
pub mod error;
pub mod metrology;
pub mod optimize;
pub mod schemes;
pub mod teleport;
pub mod tensor;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, C64};
