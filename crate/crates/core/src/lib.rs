//! Partition numbers as finite traces of singular moduli.
//!
//! p(n) is recovered as (24n-1)^(-1) times the sum of a weight-0 weak Maass
//! form over Heegner points of discriminant 1-24n. Around that formula the
//! crate checks the integrality statements numerically: the scaled orbit
//! polynomials, the A + B*C decomposition, Masser's description of C through
//! the classical modular polynomial, the 6-unit norms of j and beta, and the
//! explicit coset polynomials for A' and B.

pub mod appendix;
pub mod error;
pub mod maass;
pub mod matrix;
pub mod modpoly;
pub mod num;
pub mod qseries;
pub mod quadforms;
pub mod recognize;
pub mod sampling;

pub use error::{Error, Result};
pub use num::{AppComplex, PrecisionConfig};
