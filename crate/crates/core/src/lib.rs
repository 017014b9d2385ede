pub mod atoms;
pub mod channel;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod experiment;
pub mod lp;
mod nnls;
pub mod omp;
pub mod order;
mod perm;

pub use error::{Error, Result};
