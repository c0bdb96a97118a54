use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniformly sampled real waveform; sample `i` is at `t0 + i / sample_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoTrace {
    pub sample_rate: f64,
    pub t0: f64,
    pub samples: Vec<f64>,
}

impl EchoTrace {
    pub fn new(sample_rate: f64, t0: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return domain(format!("sample rate must be > 0, got {sample_rate}"));
        }
        if samples.is_empty() {
            return domain("trace must contain at least one sample");
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return domain("trace contains non-finite samples");
        }
        Ok(Self {
            sample_rate,
            t0,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| gain * x).collect(),
            ..self.clone()
        }
    }

    /// Append `tail` seconds of zeros.
    pub fn padded(mut self, tail: f64) -> Self {
        let extra = (tail * self.sample_rate).round().max(0.0) as usize;
        self.samples.resize(self.samples.len() + extra, 0.0);
        self
    }

    /// Index range of samples within 1 % of the peak magnitude, first to last.
    pub fn support(&self) -> Option<std::ops::Range<usize>> {
        let thresh = 0.01 * self.peak();
        if thresh == 0.0 {
            return None;
        }
        let first = self.samples.iter().position(|x| x.abs() >= thresh)?;
        let last = self.samples.iter().rposition(|x| x.abs() >= thresh)?;
        Some(first..last + 1)
    }
}
