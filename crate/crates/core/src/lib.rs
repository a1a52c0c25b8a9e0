//! Stable marked reduction of hyperelliptic curves y^2 = f(x) over Q at an
//! odd prime p.
//!
//! Given the 2g+2 rational branch points and the leading coefficient of f,
//! this crate computes the stable marked genus-0 tree of the branch points,
//! decides the ramified degree-2 base extension, builds the dual graph of
//! the special fiber of the stable marked model of the curve (component
//! genera, thicknesses, reduced equations) and reports the reduction type
//! of the Jacobian. A separate atlas enumerates all combinatorial
//! reduction types per genus.

pub mod arith;
pub mod canon;
pub mod tree;
pub mod error;
pub mod fiber;
pub mod atlas;
pub mod selfcheck;

pub use arith::{OddPrime, Valuation};
pub use error::{Error, Result};
