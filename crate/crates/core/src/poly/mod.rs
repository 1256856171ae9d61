//! Truncated multivariate polynomials (jets) over an exact or floating field.

mod jet;
mod multi_index;
mod scalar;

pub use jet::{FloatJet, Jet, JetError, RationalJet};
pub use multi_index::MultiIndex;
pub use scalar::{parse_rational, rational_from_f64, CoeffKind, Scalar};
