use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{front_face_impedance, LoadNetwork, PiezoStack};
use crate::error::{domain, Result};
use crate::numeric::par_map;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSpectrum {
    pub freqs: Vec<f64>,
    pub gamma: Vec<Complex64>,
}

impl ReflectionSpectrum {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| g.norm()).collect()
    }

    /// Grid frequency of minimum |Γ|.
    pub fn argmin(&self) -> f64 {
        let mags = self.magnitudes();
        let i = (0..mags.len()).min_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap_or(0);
        self.freqs[i]
    }
}

/// Pressure reflection coefficient between two mechanical impedances.
pub fn reflection_from_impedance(z_face: Complex64, z_medium: f64) -> Complex64 {
    (z_face - z_medium) / (z_face + z_medium)
}

/// Γ at the antenna's front face with the electrical port terminated by `load`.
pub fn reflection_coefficient(stack: &PiezoStack, load: &LoadNetwork, f: f64) -> Result<Complex64> {
    let z = front_face_impedance(stack, load, f)?;
    Ok(reflection_from_impedance(z, stack.medium_impedance()))
}

pub fn reflection_spectrum(stack: &PiezoStack, load: &LoadNetwork, freqs: &[f64]) -> Result<ReflectionSpectrum> {
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return domain("frequency grid must be strictly increasing");
    }
    let gamma = par_map(freqs, |_, &f| reflection_coefficient(stack, load, f))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ReflectionSpectrum {
        freqs: freqs.to_vec(),
        gamma,
    })
}
