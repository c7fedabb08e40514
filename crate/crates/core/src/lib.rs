//! Exact arithmetic for statistics on conjugacy classes of colored permutation
//! groups.
//!
//! The group `S_{n,r}` is the wreath product `Z_r ≀ S_n`; its elements are
//! pairs `(ω, τ)` of a permutation of `[n]` and a coloring of the values, and
//! its conjugacy classes are indexed by r-tuples of integer partitions. For
//! `r = 2` this is the hyperoctahedral group `B_n` of signed permutations.
//!
//! The crate computes, entirely over big rationals:
//!
//! * group elements, cycle decompositions and cycle types ([`perm`]);
//! * conjugacy-class labels, centralizer orders, class sizes, class
//!   enumeration and exact uniform sampling ([`classes`]);
//! * partial colored permutations, indicator decompositions of statistics,
//!   and the span test behind the notion of statistic degree ([`statistics`]);
//! * moments of statistics on classes by brute force, by the acyclicity
//!   formula for classes without short cycles, and by closed forms for the
//!   classical `B_n` statistics, together with the order-invariant-extension
//!   polynomials ([`moments`]);
//! * descent generating functions `B_n(t)` and `B_{λ,μ}(t)`, their expansion
//!   and divisibility theorems, and exact standardized moments used to watch
//!   the central limit behaviour of descents ([`genfunc`]).
//!
//! Every formula has an enumeration oracle next to it in the test suite; the
//! `acceptance` integration test runs the full cross-validation matrix.
//!
//! ```
//! use wreath_stats::{classes, genfunc, moments, RPartition};
//!
//! // The class ((3),(5)) of B_8: one even 3-cycle, one odd 5-cycle.
//! let label = RPartition::parse("3;5")?;
//! assert_eq!(moments::mean_des_b(&label)?, wreath_stats::arith::rat(4, 1));
//! let poly = genfunc::class_descent_poly(&label)?;
//! assert_eq!(poly.eval_one(), label.class_size().into());
//! let sample = classes::sample_uniform(&label, 42);
//! assert_eq!(sample.cycle_type(), label);
//! # Ok::<(), wreath_stats::Error>(())
//! ```

pub mod arith;
pub mod classes;
pub mod error;
pub mod genfunc;
pub mod linalg;
pub mod moments;
pub mod perm;
pub mod poly;
pub mod statistics;

pub use classes::{ClassSummary, RPartition};
pub use error::{Error, Result};
pub use genfunc::{CltReport, CltSource};
pub use moments::{Method, MomentResult};
pub use perm::{ColoredCycle, ColoredPermutation};
pub use poly::ExactPolynomial;
pub use statistics::{Builtin, DegreeOutcome, Pcp, Statistic};

/// Default enumeration budget: number of element visits allowed before an
/// operation refuses to run (`Error::BudgetExceeded`).
pub const DEFAULT_BUDGET: u128 = 100_000_000;
