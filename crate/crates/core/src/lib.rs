//! Multiple complete complementary codes over Z_N for odd N, and the
//! quasi-complementary sequence sets obtained by taking their union.
//!
//! The pipeline is small:
//!
//! 1. [`modarith`] factors N and builds the interleaving permutation π.
//! 2. [`codebook`] turns π into N×N phase matrices, one per `(k, m)`.
//! 3. [`correlation`] sums aperiodic correlations over the rows of two sets
//!    and runs the exhaustive checks (complementarity, the inter-family
//!    {0, N} dichotomy, δ_max).
//! 4. [`bounds`] compares δ_max against the Welch and Liu bounds.
//!
//! ```
//! use qcss::{codebook::Codebook, correlation::delta_max_scan};
//!
//! let book = Codebook::new(15).unwrap();
//! let qcss = book.build_qcss().unwrap();
//! assert_eq!(qcss.set_size(), 30);
//! let report = delta_max_scan(qcss.members(), 1e-6 * 15.0);
//! assert!((report.delta_max - 15.0).abs() < 1e-6 * 15.0);
//! ```

pub mod bounds;
pub mod codebook;
pub mod correlation;
pub mod error;
pub mod modarith;
pub mod par;

pub use codebook::{Codebook, FamilyKind, PhaseMatrix, SequenceFamily};
pub use error::{QcssError, Result};
pub use num_complex::Complex64;
pub use par::Execution;
