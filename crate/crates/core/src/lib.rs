//! Exhaustive search for circulant best matrices of order `n = r^2 + r + 1`
//! by divide and conquer: an algebraic divide phase over compressed rows,
//! SAT instances per subproblem, and a CDCL solver whose theory callback
//! learns conflict clauses from power spectral density bounds. Verified
//! solutions are turned into skew Hadamard matrices of order `4n`.

pub mod cdcl;
pub mod cnf;
pub mod designs;
pub mod divide;
pub mod encode;
pub mod equivalence;
pub mod error;
pub mod exec;
pub mod formats;
pub mod search;
pub mod seqcore;

pub use error::{Error, Result};
pub use exec::Execution;
