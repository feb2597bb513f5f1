//! Certified enclosures of the capacity of band-limited additive colored
//! Gaussian noise channels, and a constructed family of noise spectra whose
//! capacity admits monotone computable lower bounds but no certified upper
//! bounds beyond a computable tail majorant.

pub mod computable;
pub mod dyadic;
pub mod elementary;
pub mod error;
pub mod enumerator;
pub mod interval;
pub mod lab;
pub mod machine;
pub mod spectrum;
pub mod waterpour;

pub use dyadic::{Dyadic, Round};
pub use error::{Error, Result};
pub use interval::Interval;
