//! Built-in systems with analytic derivatives.

mod brusselator;
mod cgl;
mod fhn;
mod linear;

pub use brusselator::{Brusselator, BrusselatorParams};
pub use cgl::{Cgl1d, Cgl2d, CglParams};
pub use fhn::{Fhn, FhnParams};
pub use linear::LinearSystem;

use alloc::string::ToString;

use crate::error::Error;

pub(crate) fn unknown(name: &str) -> Error {
    Error::UnknownControl(name.to_string())
}
