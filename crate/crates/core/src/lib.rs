//! Interval portfolio selection.
//!
//! Expected returns are intervals; risk is the interval of mean
//! semi-absolute deviations below them. A risk constraint graded by a
//! satisfaction index `alpha` and a return weighting `lambda` turn the
//! interval program into an ordinary LP, solved here by a bounded simplex.
//!
//! - [`interval`]: interval arithmetic and comparison indices
//! - [`estimation`]: return intervals from history and forecasts
//! - [`model`]: the portfolio model and its LP
//! - [`lp`]: dense LP type and simplex solver
//! - [`sweep`]: `(alpha, lambda)` grids and monotonicity checks
//! - [`io`]: history/config files and output documents
//! - [`oracle`]: brute-force reference solvers for small instances

pub mod estimation;
pub mod interval;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod sweep;

pub use interval::Interval;
pub use model::{PortfolioProblem, PortfolioSolution};
