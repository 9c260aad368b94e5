//! Convex-roof extended negativity (CREN) for bipartite quantum states.
//!
//! - [`linalg`]: dense complex kernel (eigen/singular values, partial transpose and trace).
//! - [`states`]: pure and mixed states, Schmidt decomposition, isotropic and Werner families.
//! - [`measures`]: negativity, closed-form CREN values, and the two-qubit concurrence.
//! - [`convexroof`]: variational upper bounds on CREN for arbitrary mixed states.
//! - [`cli`]: file formats and command implementations behind the `cren` binary.

pub mod cli;
pub mod convexroof;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod states;

pub use error::{Error, Result};
