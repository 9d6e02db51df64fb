// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod logpot;
pub mod mwu;
pub mod normalize;
pub mod verify;
