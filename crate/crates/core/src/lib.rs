pub mod bench;
pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod operator;
pub mod solver;
pub mod specfun;
pub mod weights;

pub use error::{FracLapError, Result};
