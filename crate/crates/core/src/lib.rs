//! Quantum gate synthesis, state transfer, time-optimal control and
//! Hamiltonian identification posed as commutative polynomial optimization
//! problems.
//!
//! The pipeline is: a polynomial control ansatz feeds a truncated Magnus
//! expansion ([`magnus`]), whose exponential is approximated by a
//! Chebyshev-Bessel series ([`chebexp`]); the resulting matrix polynomials
//! are turned into real objectives and constraints ([`objective`]) and solved
//! by a moment/SOS relaxation plus local refinement ([`popsolve`]). The
//! [`oracle`] module propagates the Schrödinger equation directly and is
//! used to validate every surrogate.

pub mod chebexp;
pub mod error;
pub mod linalg;
pub mod magnus;
pub mod objective;
pub mod oracle;
pub mod poly;
pub mod popsolve;
pub mod systems;

pub use error::{Error, Result};
