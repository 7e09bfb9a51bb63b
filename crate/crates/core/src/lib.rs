//! Decoding workbench for variable-degree-3 quantum LDPC codes.
//!
//! The crate builds CSS codes from circulant descriptions, analyses their
//! harmful subgraphs (classical trapping sets and symmetric stabilizers) and
//! decodes X errors on `H_Z` with syndrome bit flipping, two-bit bit flipping
//! (TBF), collective ensembles of TBF decoders and a normalized min-sum
//! baseline. Monte-Carlo evaluation over the binary symmetric channel is
//! seeded per trial so results do not depend on the worker count.
//!
//! ```
//! use qldpc_tbf::code;
//!
//! let b1 = code::b1();
//! assert_eq!(b1.n, 882);
//! assert!(code::validate_css(&b1).passed());
//! ```

pub mod code;
pub mod collective;
pub mod decoders;
pub mod error;
pub mod gf2;
pub mod setgen;
pub mod sim;
pub mod tanner;
pub mod trapping;

pub use error::{Error, Result};
