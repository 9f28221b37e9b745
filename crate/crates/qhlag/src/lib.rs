//! Exact computation in quantum homology rings presented by finite
//! multiplication tables, and the middle-dimensional invariants those rings
//! determine: cubic-relation coefficients and discriminants, sphere
//! constants, eigenvalues of multiplication by the anticanonical class,
//! ideals, group-ring refinements, and first-page spectral-sequence bounds.
//!
//! All arithmetic is exact rational arithmetic; results are certificates
//! that can be re-checked term by term.
//!
//! ```
//! use qhlag::presets::load_preset;
//! use qhlag::lagrangian::{cubic_coefficients, LagrangianDatum};
//! use qhlag::exactalg::rat;
//!
//! let ring = load_preset("M2").unwrap();
//! let r = ring.as_q().unwrap();
//! let class = r.parse_class_expr("E1-E2").unwrap();
//! let datum = LagrangianDatum::new(r, class.clone(), 2, None).unwrap();
//! let cert = cubic_coefficients(r, &datum, &class).unwrap();
//! assert_eq!(cert.sigma, rat(0));
//! assert_eq!(cert.tau, rat(5) / rat(4));
//! assert_eq!(cert.delta, rat(5));
//! ```

pub mod error;
pub mod exactalg;
pub mod expr;
pub mod lagrangian;
pub mod presets;
pub mod qhring;
pub mod quadalg;
pub mod refined;
pub mod specseq;

pub use error::{Error, Result};

// The guide chapters double as doc-tests: every code block in book/src is
// compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/coefficients.md")]
    mod coefficients {}
    #[doc = include_str!("../../../book/src/presentations.md")]
    mod presentations {}
    #[doc = include_str!("../../../book/src/cubic.md")]
    mod cubic {}
    #[doc = include_str!("../../../book/src/quadratic-algebras.md")]
    mod quadratic_algebras {}
    #[doc = include_str!("../../../book/src/refined.md")]
    mod refined {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
