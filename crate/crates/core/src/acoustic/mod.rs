//! Acoustic side of the link: the antenna's reflection coefficient, path
//! loss and time of flight, and a piston beam-field calculator.

mod beam;
mod medium;
mod reflection;

pub use beam::{beam_minus3db_width, piston_field, FieldGrid, FieldMap, RectAperture};
pub use medium::{attenuation_factor, time_of_flight, Medium};
pub use reflection::{
    reflection_coefficient, reflection_from_impedance, reflection_spectrum, ReflectionSpectrum,
};
