use serde::{Deserialize, Serialize};

use crate::acoustic::{attenuation_factor, Medium};
use crate::error::{domain, Error, Result};
use crate::numeric::parabolic_offset;

/// Cap on reported valley depth when the minimum is exactly zero.
const MAX_DEPTH_DB: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepMeta {
    /// Detected round-trip time of flight.
    pub tof: Option<f64>,
    /// One-way distance implied by `tof` and the medium sound speed.
    pub distance: Option<f64>,
    pub smoothed: bool,
    pub compensated: bool,
    /// Pulse-echo events spent acquiring the spectrum.
    pub pulse_count: usize,
    /// Volts per amplitude unit (receiver full scale when an ADC is used).
    pub volts_per_unit: f64,
    /// Excitation energy mostly outside the interrogator band.
    pub out_of_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpectrum {
    pub freqs: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub meta: SweepMeta,
}

impl SweepSpectrum {
    pub fn new(freqs: Vec<f64>, amplitudes: Vec<f64>, meta: SweepMeta) -> Result<Self> {
        if freqs.len() != amplitudes.len() || freqs.len() < 2 {
            return domain("spectrum needs at least two matching frequency/amplitude pairs");
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("spectrum frequencies must be strictly increasing");
        }
        let step = freqs[1] - freqs[0];
        if freqs.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-6 * step) {
            return domain("spectrum frequency step must be uniform");
        }
        if amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return domain("spectrum amplitudes must be finite and >= 0");
        }
        Ok(Self {
            freqs,
            amplitudes,
            meta,
        })
    }

    pub fn step(&self) -> f64 {
        self.freqs[1] - self.freqs[0]
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// 20·log10(max/min) over the whole span.
    pub fn ripple_db(&self) -> f64 {
        let max = self.amplitudes.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.amplitudes.iter().cloned().fold(f64::MAX, f64::min);
        depth_db(max, min)
    }
}

fn depth_db(max: f64, min: f64) -> f64 {
    if min <= 0.0 {
        return if max > 0.0 { MAX_DEPTH_DB } else { 0.0 };
    }
    (20.0 * (max / min).log10()).min(MAX_DEPTH_DB)
}

/// Gaussian smoothing in bins, kernel truncated at 4σ, mirrored edges.
pub fn smooth_spectrum(spectrum: &SweepSpectrum, sigma_bins: f64) -> Result<SweepSpectrum> {
    if !(sigma_bins.is_finite() && sigma_bins >= 0.0) {
        return domain(format!("sigma must be >= 0, got {sigma_bins}"));
    }
    if sigma_bins == 0.0 {
        return Ok(spectrum.clone());
    }
    let radius = (4.0 * sigma_bins).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma_bins * sigma_bins)).exp())
        .collect();
    let norm: f64 = raw.iter().sum();
    let kernel: Vec<f64> = raw.iter().map(|w| w / norm).collect();
    let n = spectrum.len() as isize;
    let reflect = |i: isize| -> usize {
        let period = 2 * n;
        let m = i.rem_euclid(period);
        (if m < n { m } else { period - 1 - m }) as usize
    };
    let amplitudes = (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, w)| w * spectrum.amplitudes[reflect(i + j as isize - radius)])
                .sum()
        })
        .collect();
    Ok(SweepSpectrum {
        freqs: spectrum.freqs.clone(),
        amplitudes,
        meta: SweepMeta {
            smoothed: true,
            ..spectrum.meta.clone()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Valley {
    pub frequency: f64,
    pub index: usize,
    /// 20·log10(max/min) of the spectrum.
    pub depth_db: f64,
    /// More than one bin shares the minimum value.
    pub ambiguous: bool,
}

/// Grid minimum refined by a parabola through its neighbours.
pub fn find_valley(spectrum: &SweepSpectrum) -> Result<Valley> {
    let a = &spectrum.amplitudes;
    let n = a.len();
    let min = a.iter().cloned().fold(f64::MAX, f64::min);
    let index = a.iter().position(|&v| v == min).expect("non-empty");
    let ambiguous = a.iter().filter(|&&v| v == min).count() > 1;
    if index < 2 || index + 2 >= n {
        return Err(Error::Boundary(format!(
            "spectrum minimum at bin {index} of {n} ({:.1} Hz) is too close to the sweep edge",
            spectrum.freqs[index]
        )));
    }
    let offset = parabolic_offset(a[index - 1], a[index], a[index + 1]);
    let max = a.iter().cloned().fold(f64::MIN, f64::max);
    Ok(Valley {
        frequency: spectrum.freqs[index] + offset * spectrum.step(),
        index,
        depth_db: depth_db(max, min),
        ambiguous,
    })
}

/// Undo the round-trip attenuation implied by the detected time of flight.
pub fn compensate_distance(spectrum: &SweepSpectrum, medium: &Medium) -> Result<SweepSpectrum> {
    let Some(tof) = spectrum.meta.tof else {
        return domain("spectrum carries no time of flight to compensate with");
    };
    let path = medium.sound_speed * tof;
    let amplitudes = spectrum
        .freqs
        .iter()
        .zip(&spectrum.amplitudes)
        .map(|(&f, &a)| Ok(a / attenuation_factor(medium, f, path)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSpectrum {
        freqs: spectrum.freqs.clone(),
        amplitudes,
        meta: SweepMeta {
            compensated: true,
            ..spectrum.meta.clone()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(amps: Vec<f64>) -> SweepSpectrum {
        let freqs = (0..amps.len()).map(|i| 2.2e6 + 500.0 * i as f64).collect();
        SweepSpectrum::new(freqs, amps, SweepMeta::default()).unwrap()
    }

    #[test]
    fn symmetric_v_gives_centre() {
        let s = spec(vec![9.0, 7.0, 5.0, 1.0, 5.0, 7.0, 9.0]);
        let v = find_valley(&s).unwrap();
        assert_eq!(v.frequency, 2.2e6 + 1500.0);
        assert!(!v.ambiguous);
        assert!((v.depth_db - 20.0 * 9f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn off_centre_parabola_is_recovered() {
        let f0 = 2.2e6 + 1720.0;
        let s = spec((0..9).map(|i| {
            let f = 2.2e6 + 500.0 * i as f64;
            1.0 + ((f - f0) / 1000.0).powi(2)
        }).collect());
        assert!((find_valley(&s).unwrap().frequency - f0).abs() < 1e-6);
    }

    #[test]
    fn edge_minimum_is_a_boundary_error() {
        let s = spec((0..10).map(|i| i as f64 + 1.0).collect());
        assert!(matches!(find_valley(&s), Err(Error::Boundary(_))));
        let s = spec(vec![3.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(find_valley(&s).is_err());
    }

    #[test]
    fn equal_minima_choose_lowest_and_flag() {
        let s = spec(vec![5.0, 4.0, 3.0, 1.0, 2.0, 1.0, 3.0, 4.0, 5.0]);
        let v = find_valley(&s).unwrap();
        assert_eq!(v.index, 3);
        assert!(v.ambiguous);
    }

    #[test]
    fn zero_sigma_is_identity_and_constants_survive() {
        let s = spec(vec![1.0, 3.0, 2.0, 5.0, 4.0]);
        assert_eq!(smooth_spectrum(&s, 0.0).unwrap(), s);
        let c = spec(vec![2.5; 40]);
        for sigma in [0.5, 2.0, 7.0, 30.0] {
            let out = smooth_spectrum(&c, sigma).unwrap();
            assert!(out.amplitudes.iter().all(|a| (a - 2.5).abs() < 1e-12));
            assert!(out.meta.smoothed);
        }
    }

    #[test]
    fn smoothing_white_noise_reduces_variance() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(10.0, 1.0).unwrap();
        let s = spec((0..200_000).map(|_| normal.sample(&mut rng)).collect());
        let sigma = 2.0;
        let out = smooth_spectrum(&s, sigma).unwrap();
        let var = |v: &[f64]| crate::numeric::std_dev(v).powi(2);
        let ratio = var(&out.amplitudes) / var(&s.amplitudes);
        let expect = 1.0 / (2.0 * sigma * std::f64::consts::PI.sqrt());
        assert!((ratio / expect - 1.0).abs() < 0.2, "{ratio} vs {expect}");
    }

    #[test]
    fn compensation_cases() {
        let mut s = spec(vec![1.0; 20]);
        assert!(compensate_distance(&s, &Medium::water()).is_err());
        s.meta.tof = Some(67e-6);
        let lossless = compensate_distance(&s, &Medium::water().lossless()).unwrap();
        assert_eq!(lossless.amplitudes, s.amplitudes);
        let tissue = compensate_distance(&s, &Medium::tissue()).unwrap();
        assert!(tissue.amplitudes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn malformed_spectra_are_rejected() {
        let m = SweepMeta::default();
        assert!(SweepSpectrum::new(vec![1.0, 2.0], vec![1.0], m.clone()).is_err());
        assert!(SweepSpectrum::new(vec![1.0, 2.0, 4.0], vec![1.0; 3], m.clone()).is_err());
        assert!(SweepSpectrum::new(vec![1.0, 2.0], vec![1.0, -1.0], m).is_err());
    }
}
