pub mod acoustic;
pub mod circuit;
mod error;
pub mod lockin;
pub mod numeric;
pub mod presets;
pub mod sweep;
pub mod waveform;

pub use error::{Error, Result};
