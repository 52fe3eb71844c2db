pub mod abelian;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod spectral;
pub mod structured;

pub use error::{Error, Result};
