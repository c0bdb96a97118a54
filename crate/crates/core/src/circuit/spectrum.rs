use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{par_map, parabolic_offset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceSpectrum {
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ImpedanceSpectrum {
    pub fn new(freqs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != values.len() {
            return domain("frequency and impedance vectors differ in length");
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return domain("frequency grid must be strictly increasing");
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return domain("impedance spectrum contains non-finite values");
        }
        Ok(Self { freqs, values })
    }

    /// Evaluate `model` on every grid frequency. Order-preserving, so a
    /// parallel evaluation is identical to a sequential one.
    pub fn evaluate<F>(freqs: &[f64], model: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync + Send,
    {
        let values = par_map(freqs, |_, &f| model(f)).into_iter().collect::<Result<Vec<_>>>()?;
        Self::new(freqs.to_vec(), values)
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// Frequency of maximum |Z|, refined by a parabola through log|Z| at the
/// grid maximum and its two neighbours.
pub fn find_antiresonance_numeric(spectrum: &ImpedanceSpectrum) -> Result<f64> {
    let mags = spectrum.magnitudes();
    let n = mags.len();
    if n < 3 {
        return domain("need at least three spectrum points");
    }
    let (imax, _) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if imax == 0 || imax == n - 1 {
        return Err(Error::Boundary(format!(
            "impedance maximum at grid edge ({:.1} Hz); widen the grid",
            spectrum.freqs[imax]
        )));
    }
    let off = parabolic_offset(mags[imax - 1].ln(), mags[imax].ln(), mags[imax + 1].ln());
    let f = &spectrum.freqs;
    Ok(if off >= 0.0 {
        f[imax] + off * (f[imax + 1] - f[imax])
    } else {
        f[imax] + off * (f[imax] - f[imax - 1])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn symmetric_triple_peaks_at_center() {
        let s = ImpedanceSpectrum::new(vec![1.0e6 - 100.0, 1.0e6, 1.0e6 + 100.0], real(&[3.0, 5.0, 3.0])).unwrap();
        assert_eq!(find_antiresonance_numeric(&s).unwrap(), 1.0e6);
    }

    #[test]
    fn edge_maximum_is_a_boundary_error() {
        let s = ImpedanceSpectrum::new(vec![1.0, 2.0, 3.0, 4.0], real(&[9.0, 5.0, 3.0, 1.0])).unwrap();
        assert!(matches!(find_antiresonance_numeric(&s), Err(Error::Boundary(_))));
        let s = ImpedanceSpectrum::new(vec![1.0, 2.0, 3.0, 4.0], real(&[1.0, 5.0, 6.0, 9.0])).unwrap();
        assert!(matches!(find_antiresonance_numeric(&s), Err(Error::Boundary(_))));
    }

    #[test]
    fn rejects_malformed_spectra() {
        assert!(ImpedanceSpectrum::new(vec![1.0, 1.0], real(&[1.0, 2.0])).is_err());
        assert!(ImpedanceSpectrum::new(vec![1.0], real(&[1.0, 2.0])).is_err());
        assert!(ImpedanceSpectrum::new(vec![1.0], real(&[f64::NAN])).is_err());
    }
}
