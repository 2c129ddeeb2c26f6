//! Certified lower bounds to the three-tangle of mixed three-qubit states.
//!
//! The bound is obtained by bringing a state into its SL(2,C)⊗3 normal form,
//! orienting it by a local unitary, twirling it onto the two-parameter family
//! of GHZ-symmetric states, where the three-tangle is known in closed form,
//! and scaling by the trace of the normal form.

pub mod certify;
pub mod cli;
pub mod config;
pub mod error;
pub mod ghz_symmetric;
pub mod linalg;
pub mod normal_form;
pub mod pure_tangle;
pub mod sampling;
pub mod simplex;
pub mod states;
pub mod tomo;
pub mod twirl;
pub mod unitary_opt;

#[cfg(test)]
mod testutil;

pub use certify::{lower_bound, BoundReport, Verdict};
pub use config::{Config, NormalFormConfig, OptConfig};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, LocalOperator, PureState};
pub use unitary_opt::Criterion;
