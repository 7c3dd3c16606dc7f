//! Exact optimal transport in the plane and the square `[-1, 1]^2` under the
//! max metric `d_m(x, y) = max(|x1 - y1|, |x2 - y2|)`.
//!
//! Every algorithm is generic over [`Scalar`]: [`Rational`] gives exact
//! arithmetic, `f64` a fast path with fixed tolerances.
//!
//! ```
//! use maxwass::{q, wasserstein_pow, DiscreteMeasure, Exponent, Point2};
//!
//! let x = DiscreteMeasure::dirac(Point2::from_i64(2, 0));
//! let mu = DiscreteMeasure::from_pairs(vec![
//!     (Point2::from_i64(-2, -2), q(1, 5)),
//!     (Point2::new(q(1, 2), q(1, 2)), q(4, 5)),
//! ])?;
//! assert_eq!(wasserstein_pow(&x, &mu, Exponent::int(2))?, q(5, 1));
//! # Ok::<(), maxwass::Error>(())
//! ```

mod error;
pub mod geometry;
pub mod measure;
pub mod scalar;
pub mod transport;
pub mod verify;
pub mod wgeom;

pub use error::{Error, Result};
pub use geometry::{dm, DiagonalLine, Domain, MaxIsometry, Point2, Slope, SquareSymmetry};
pub use measure::{Atom, DiscreteMeasure, GridMeasure, KloecknerParam};
pub use scalar::{q, Exponent, Rational, Scalar};
pub use transport::{wasserstein, wasserstein_pow, Transport, TransportPlan};
pub use verify::{run_suite, summary_table, CheckReport, SuiteConfig, SUITES};
