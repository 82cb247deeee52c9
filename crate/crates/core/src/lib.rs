//! MDS self-dual codes from generalized Reed–Solomon codes.
//!
//! The crate is layered bottom-up:
//!
//! * [`gf`]: exact arithmetic in GF(p^e) with canonical representations;
//! * [`linalg`]: dense matrices and Gaussian elimination over those fields;
//! * [`grs`]: GRS and extended GRS codes, their generator matrices and duals;
//! * [`construct`]: the self-dual construction families;
//! * [`verify`]: brute-force checks that do not trust the constructions;
//! * [`cli`]: the `mds-selfdual` command-line front end.
//!
//! Hot loops (MDS subset enumeration, codeword enumeration, character-sum
//! counting, the square-difference search and sweeps) run on rayon when the
//! `parallel` feature is enabled and sequentially otherwise; see [`par`].

pub mod cli;
pub mod construct;
pub mod error;
pub mod gf;
pub mod grs;
pub mod linalg;
pub mod par;
pub mod verify;

pub use construct::{construct, ConstructionRequest, ConstructionResult, Family};
pub use error::{Error, Result};
pub use gf::{make_field, Felt, FieldCtx, FieldSpec};
pub use grs::GrsCode;
pub use linalg::Matrix;
pub use verify::{MdsMode, VerificationReport};
