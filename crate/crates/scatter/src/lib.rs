//! Isogeometric finite elements with prolate spheroidal infinite elements for
//! exterior Helmholtz and acoustic-structure scattering.

pub mod analytic;
pub mod assembly;
pub mod cli;
pub mod postprocess;
pub mod coords;
pub mod error;
pub mod linalg;
pub mod nurbs;
pub mod par;
pub mod specfun;

pub use error::{Result, ScatterError};
