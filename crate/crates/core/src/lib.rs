#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod data;
pub mod error;
pub mod experiment;
pub mod explain;
pub mod gam;
pub mod graph;
pub mod io;
pub mod mlp;
pub mod rank;
pub mod seed;

pub use error::{GamError, Result};
