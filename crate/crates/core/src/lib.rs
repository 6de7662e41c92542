//! Finite inverse monoids and Boolean inverse monoids, their tight
//! groupoids of germs, the exact polytope of normalized invariant means,
//! and the matrix-model correspondence between means and traces, with
//! AF (Bratteli) and self-similar (odometer) families built in.
//!
//! All arithmetic is exact rational. The hot sweeps (closure rounds,
//! exhaustive axiom checks, trial batches) run data-parallel under the
//! default `parallel` feature and sequentially without it.

pub mod af;
pub mod cstar;
pub mod error;
pub mod exec;
pub mod germs;
pub mod json;
pub mod linalg;
pub mod means;
pub mod monoid;
pub mod pbij;
pub mod random;
pub mod ratio;
pub mod selfsim;

pub use error::{Error, Result};
