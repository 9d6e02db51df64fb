//! The guide in `book/` as doc-tests: each chapter is the doc comment of an
//! empty module, so `cargo test --doc` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}
#[doc = include_str!("../../../book/src/normalization.md")]
pub mod normalization {}
#[doc = include_str!("../../../book/src/log-potential.md")]
pub mod log_potential {}
#[doc = include_str!("../../../book/src/mwu.md")]
pub mod mwu {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("../../../book/src/robust.md")]
pub mod robust {}
#[doc = include_str!("../../../book/src/linalg.md")]
pub mod linalg {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
