//! Labeled datasets, raw and booleanized, plus desk-scale generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tm::{booleanize, BoolSample, Thresholds};

/// Raw-valued samples with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl RawDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::config(format!(
                "{} samples but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if num_classes == 0 {
            return Err(Error::config("dataset needs at least one class"));
        }
        if let Some(first) = features.first() {
            let width = first.len();
            if features.iter().any(|row| row.len() != width) {
                return Err(Error::config("ragged feature rows"));
            }
        }
        if let Some(bad) = labels.iter().find(|l| **l >= num_classes) {
            return Err(Error::config(format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(RawDataset {
            features,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Feature values transposed into per-feature columns (for quantile
    /// threshold derivation).
    pub fn columns(&self) -> Vec<Vec<f64>> {
        let mut cols = vec![Vec::with_capacity(self.len()); self.num_features()];
        for row in &self.features {
            for (c, v) in row.iter().enumerate() {
                cols[c].push(*v);
            }
        }
        cols
    }

    pub fn booleanize(&self, thresholds: &Thresholds) -> Result<BoolDataset> {
        let samples = self
            .features
            .iter()
            .map(|row| booleanize(row, thresholds))
            .collect::<Result<Vec<_>>>()?;
        BoolDataset::new(samples, self.labels.clone(), self.num_classes)
    }
}

/// Booleanized samples with labels; every sample has the same literal count.
#[derive(Debug, Clone, PartialEq)]
pub struct BoolDataset {
    samples: Vec<BoolSample>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl BoolDataset {
    pub fn new(samples: Vec<BoolSample>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::config(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        if let Some(first) = samples.first() {
            let k = first.len();
            if samples.iter().any(|s| s.len() != k) {
                return Err(Error::config("samples disagree on literal count"));
            }
        }
        Ok(BoolDataset {
            samples,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn literal_count(&self) -> usize {
        self.samples.first().map_or(0, BoolSample::len)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn samples(&self) -> &[BoolSample] {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoolSample, usize)> {
        self.samples.iter().zip(self.labels.iter().copied())
    }
}

/// Generates the noisy XOR benchmark: `num_features` uniform bits, label =
/// XOR of the first two, training labels flipped with probability `noise`.
pub fn noisy_xor(num_features: usize, num_samples: usize, noise: f64, seed: u64) -> RawDataset {
    assert!(num_features >= 2, "noisy XOR needs at least two features");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(num_samples);
    let mut labels = Vec::with_capacity(num_samples);
    for _ in 0..num_samples {
        let bits: Vec<f64> = (0..num_features)
            .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
            .collect();
        let mut label = ((bits[0] as u8) ^ (bits[1] as u8)) as usize;
        if noise > 0.0 && rng.random::<f64>() < noise {
            label ^= 1;
        }
        features.push(bits);
        labels.push(label);
    }
    RawDataset::new(features, labels, 2).expect("generator produces a consistent dataset")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_generator_is_deterministic() {
        let a = noisy_xor(8, 64, 0.4, 42);
        let b = noisy_xor(8, 64, 0.4, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn xor_labels_match_when_noise_free() {
        let data = noisy_xor(8, 256, 0.0, 3);
        for (row, label) in data.features().iter().zip(data.labels()) {
            let expect = ((row[0] as u8) ^ (row[1] as u8)) as usize;
            assert_eq!(*label, expect);
        }
    }

    #[test]
    fn booleanize_passthrough_doubles_width() {
        let data = noisy_xor(8, 16, 0.0, 3);
        let booled = data
            .booleanize(&Thresholds::binary_passthrough(8))
            .unwrap();
        assert_eq!(booled.literal_count(), 16);
    }

    #[test]
    fn label_out_of_range_rejected() {
        let err = RawDataset::new(vec![vec![0.0]], vec![5], 2);
        assert!(err.is_err());
    }
}
