//! Numerics for the three-dimensional q-deformed Euclidean space.
//!
//! * [`qarith`]: q-numbers, q-Pochhammer symbols, basic hypergeometric
//!   series and the Jackson integral.
//! * [`qspecial`]: the q-deformed associated Legendre functions `Pᵐₗ`, their
//!   weighted form `P̃ᵐₗ`, recurrence and difference checks, and the
//!   orthonormality and completeness sums on the two-sided q-lattice.
//! * [`repspace`]: truncated matrix representations of the coordinate and
//!   angular momentum algebras, the relation verifier, coproducts and spectra.
//! * [`basistrans`]: coefficient tables between the tensor, angular momentum
//!   and `X³` eigenbases, with their certification.
//! * [`cli`]: the `qspace3` command-line front end.
//!
//! The `examples/` directory has one runnable program per capability.
//!
//! ```
//! use qspace3::{qspecial::p_lm, QContext};
//!
//! let ctx = QContext::new(1.5)?;
//! assert!((p_lm(1, 0, 0.3, &ctx)? - 0.3).abs() < 1e-15);
//! # Ok::<(), qspace3::Error>(())
//! ```

pub mod basistrans;
pub mod cli;
pub mod error;
pub mod qarith;
pub mod qspecial;
pub mod real;
pub mod repspace;
pub mod tridiag;

pub use error::{Error, Result};
pub use qarith::QContext;
