//! Exact p-adic arithmetic and a gallery of pathological p-adic functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`]: elements of `Q_p` with tracked absolute precision, the norm
//!   `|.|_p`, the binomial power `(1+y)^alpha`, and a text format.
//! * [`families`]: finite independent families of subsets of the naturals and
//!   their Boolean cells.
//! * [`quotient`]: divided differences `Phi_r f` and probes that run witness
//!   sequences and record quotient traces.
//! * [`vanderput`]: the van der Put basis, coefficient extraction and the
//!   coefficient criteria for zero-derivative and Lipschitz functions.
//! * [`zoo`]: every function family of the gallery, with derivatives,
//!   witness generators and runnable claims.
//! * [`haar`]: Monte Carlo estimates under the Haar measure on `Z_p`.
//! * [`cli`]: the command-line front end used by the `padic-zoo` binary.


pub mod error;
pub mod families;
pub mod haar;
pub mod quotient;
pub mod vanderput;
pub mod zoo;
pub mod cli;

pub mod padic;




pub use error::{Error, Result};
pub use padic::{Norm, PadicNumber, Prime};
