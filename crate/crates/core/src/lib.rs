//! Scattering poles of asymptotically hyperbolic metrics.

pub mod real;
pub mod gz;
pub mod normalform;
pub mod polescan;
pub mod radial;
pub mod ring;
pub mod special;
