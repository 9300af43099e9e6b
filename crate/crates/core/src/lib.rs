//! High-precision laboratory for the asymptotics of iterated real maps near
//! attractive fixed points.
//!
//! * [`numerics`]: the arbitrary-precision scalar [`BigReal`].
//! * [`powerseries`]: truncated Taylor series and local models of maps.
//! * [`asymseries`]: series in `ln(k)^j k^(-h/2)` with coefficients polynomial
//!   in a free constant `C`.
//! * [`matcher`]: order-by-order coefficient matching for gap-2 maps.
//! * [`orbit`]: sequential high-precision iteration with checkpoints.
//! * [`extractor`]: numerical recovery of `C` from a far orbit sample.
//! * [`thron`]: convergent products for geometric-rate limits.

pub mod asymseries;
pub mod error;
pub mod extractor;
pub mod matcher;
pub mod numerics;
pub mod orbit;
pub mod powerseries;
pub mod thron;

pub use error::{Error, Result};
pub use numerics::BigReal;
