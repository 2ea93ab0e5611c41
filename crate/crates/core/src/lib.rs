//! Streaming sequence transformations for accelerating convergent
//! sequences and summing divergent series.
//!
//! Every transformation consumes partial sums s_0, s_1, ... one at a time
//! and keeps only the current counterdiagonal of its table. After each new
//! element it reports the entry with the largest order reachable from the
//! data seen so far.
//!
//! ```
//! use seqaccel::epsilon_aitken::EpsilonState;
//! use seqaccel::kernel::{Extend, SequencePoint};
//!
//! let mut eps = EpsilonState::<f64>::new();
//! let mut last = None;
//! for (n, s) in [1.0, 1.5, 1.75].into_iter().enumerate() {
//!     last = Some(eps.extend(&SequencePoint::new(n, s)).unwrap());
//! }
//! assert_eq!(last.unwrap().value, 2.0);
//! ```

pub mod epsilon_aitken;
pub mod interpolation;
pub mod kernel;
pub mod levin_like;
pub mod series_lab;
pub mod theta_like;

pub use kernel::{Accelerator, Error, Estimate, Extend, Real, SafeguardPolicy, SequencePoint};

#[cfg(feature = "binary128")]
pub use kernel::Quad;
