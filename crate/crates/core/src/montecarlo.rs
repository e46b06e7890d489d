//! Seeded variation experiments.
//!
//! Reproduces the device characterization studies (cycle-to-cycle walks,
//! device-to-device crossbar sampling, programming pulse-duration sweeps),
//! stress-tests the sense margin under variation, and measures end-to-end
//! accuracy with freshly sampled devices per trial. Every experiment is a
//! pure function of its spec; trials run on seed-derived RNG streams so
//! parallel execution cannot change a single bit of the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::crossbar::{
    infer_dataset, margin_analysis, AnalogConfig, CellBank, CrossbarSim, MarginReport, MarginSpec,
};
use crate::dataset::BoolDataset;
use crate::device::{
    program_cell, sample_d2d, step_c2c, Action, CellNominal, CellPower, DeviceInstance,
    ProgramPulse, VariationParams,
};
use crate::error::{Error, Result};
use crate::tm::{self, Model};

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    C2c,
    D2d,
    PulseSweep,
    Margin,
    Accuracy,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c2c" => Ok(ExperimentKind::C2c),
            "d2d" => Ok(ExperimentKind::D2d),
            "pulse-sweep" => Ok(ExperimentKind::PulseSweep),
            "margin" => Ok(ExperimentKind::Margin),
            "accuracy" => Ok(ExperimentKind::Accuracy),
            other => Err(Error::config(format!(
                "unknown experiment kind '{other}' \
                 (expected c2c | d2d | pulse-sweep | margin | accuracy)"
            ))),
        }
    }
}

/// Full description of one experiment. The seed is mandatory; nothing here
/// ever touches ambient entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// Monte Carlo trials (margin, accuracy).
    pub trials: u64,
    /// Switching cycles for the C2C walk.
    pub cycles: u64,
    /// Crossbar dimensions for D2D sampling.
    pub rows: usize,
    pub cols: usize,
    pub column_width: usize,
    pub variation: VariationParams,
    pub analog: AnalogConfig,
    /// Pulse widths for the sweep, in seconds.
    pub durations_s: Vec<f64>,
    pub histogram_bins: usize,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        let mut analog = AnalogConfig::default();
        if kind == ExperimentKind::Margin {
            // corner-analysis-informed sub-millivolt comparator offset
            analog.csa_offset_sigma_v = 1e-4;
        }
        ExperimentSpec {
            kind,
            seed,
            trials: 10_000,
            cycles: 1000,
            rows: 10,
            cols: 10,
            column_width: 32,
            variation: VariationParams::default(),
            analog,
            durations_s: (1..=20).map(|i| i as f64 * 5e-9).collect(),
            histogram_bins: 32,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials must be >= 1"));
        }
        if self.cycles == 0 {
            return Err(Error::config("cycles must be >= 1"));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::config("crossbar dimensions must be >= 1"));
        }
        if self.column_width == 0 {
            return Err(Error::config("column width must be >= 1"));
        }
        if self.histogram_bins == 0 {
            return Err(Error::config("histogram needs at least one bin"));
        }
        if self.kind == ExperimentKind::PulseSweep && self.durations_s.is_empty() {
            return Err(Error::config("pulse sweep needs at least one duration"));
        }
        self.variation.validate()
    }
}

/// Equal-width histogram with summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], bins: usize) -> Histogram {
        assert!(!samples.is_empty(), "histogram needs samples");
        assert!(bins >= 1, "histogram needs at least one bin");
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();

        let (edges, counts) = if min == max {
            // all samples identical: one bin widened around the value
            let pad = (min.abs() * 1e-9).max(1e-12);
            (vec![min - pad, max + pad], vec![samples.len() as u64])
        } else {
            let width = (max - min) / bins as f64;
            let edges: Vec<f64> = (0..=bins).map(|i| min + i as f64 * width).collect();
            let mut counts = vec![0u64; bins];
            for s in samples {
                let mut idx = ((s - min) / width) as usize;
                if idx >= bins {
                    idx = bins - 1;
                }
                counts[idx] += 1;
            }
            (edges, counts)
        };
        Histogram {
            edges,
            counts,
            mean,
            min,
            max,
            std,
        }
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative spread `(max - min) / mean`.
    pub fn relative_spread(&self) -> f64 {
        (self.max - self.min) / self.mean
    }
}

/// Cycle-to-cycle walk output.
#[derive(Debug, Clone, PartialEq)]
pub struct C2cReport {
    pub hrs: Histogram,
    pub lrs: Histogram,
    pub hrs_samples: Vec<f64>,
    pub lrs_samples: Vec<f64>,
    /// Largest per-step relative change observed in the walk.
    pub max_step_hrs: f64,
    pub max_step_lrs: f64,
}

/// Walks one device through `cycles` RESET-read / SET-read cycles, stepping
/// the resistances before each cycle, and histograms the read values.
pub fn run_c2c(spec: &ExperimentSpec) -> Result<C2cReport> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut device =
        DeviceInstance::new(spec.variation.lrs.mean_ohm, spec.variation.hrs.mean_ohm)?;
    let mut hrs_samples = Vec::with_capacity(spec.cycles as usize);
    let mut lrs_samples = Vec::with_capacity(spec.cycles as usize);
    let mut max_step_hrs = 0.0f64;
    let mut max_step_lrs = 0.0f64;
    for _ in 0..spec.cycles {
        let next = step_c2c(&device, &spec.variation, &mut rng);
        max_step_hrs =
            max_step_hrs.max((next.r_hrs_ohm - device.r_hrs_ohm).abs() / device.r_hrs_ohm);
        max_step_lrs =
            max_step_lrs.max((next.r_lrs_ohm - device.r_lrs_ohm).abs() / device.r_lrs_ohm);
        device = next;
        hrs_samples.push(device.r_hrs_ohm);
        lrs_samples.push(device.r_lrs_ohm);
    }
    Ok(C2cReport {
        hrs: Histogram::from_samples(&hrs_samples, spec.histogram_bins),
        lrs: Histogram::from_samples(&lrs_samples, spec.histogram_bins),
        hrs_samples,
        lrs_samples,
        max_step_hrs,
        max_step_lrs,
    })
}

/// Device-to-device sampling output.
#[derive(Debug, Clone, PartialEq)]
pub struct D2dReport {
    pub hrs: Histogram,
    pub lrs: Histogram,
    pub devices: Vec<DeviceInstance>,
}

/// Samples an independent device per crossbar cell (SET-all then RESET-all,
/// read at the literal-'0' voltage) and histograms both states.
pub fn run_d2d(spec: &ExperimentSpec) -> Result<D2dReport> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.rows * spec.cols;
    let devices = (0..n)
        .map(|_| sample_d2d(&spec.variation, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let hrs: Vec<f64> = devices.iter().map(|d| d.r_hrs_ohm).collect();
    let lrs: Vec<f64> = devices.iter().map(|d| d.r_lrs_ohm).collect();
    Ok(D2dReport {
        hrs: Histogram::from_samples(&hrs, spec.histogram_bins),
        lrs: Histogram::from_samples(&lrs, spec.histogram_bins),
        devices,
    })
}

/// One row of the pulse-duration sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRow {
    pub duration_s: f64,
    pub switched: bool,
    pub energy_j: f64,
    /// Resistance read back after the pulse.
    pub resistance_ohm: f64,
}

/// Applies a SET pulse of each duration to a fresh HRS device and records
/// whether it switched, the pulse energy, and the read-back resistance.
pub fn run_pulse_sweep(spec: &ExperimentSpec) -> Result<Vec<PulseRow>> {
    spec.validate()?;
    let power = CellPower::default();
    let mut rows = Vec::with_capacity(spec.durations_s.len());
    for (i, duration) in spec.durations_s.iter().copied().enumerate() {
        if duration <= 0.0 {
            rows.push(PulseRow {
                duration_s: duration,
                switched: false,
                energy_j: 0.0,
                resistance_ohm: spec.variation.hrs.mean_ohm,
            });
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let mut device =
            DeviceInstance::new(spec.variation.lrs.mean_ohm, spec.variation.hrs.mean_ohm)?;
        let event = program_cell(
            &mut device,
            Action::Include,
            &ProgramPulse::set(duration),
            &power,
            &spec.variation,
            &mut rng,
        )?;
        rows.push(PulseRow {
            duration_s: duration,
            switched: event.switched,
            energy_j: event.energy_j,
            resistance_ohm: if event.switched {
                device.r_lrs_ohm
            } else {
                device.r_hrs_ohm
            },
        });
    }
    Ok(rows)
}

/// Worst-case sense-margin stress under D2D variation and CSA offset.
pub fn run_margin_stress(spec: &ExperimentSpec) -> Result<MarginReport> {
    spec.validate()?;
    margin_analysis(
        &CellNominal::default(),
        &spec.variation,
        &MarginSpec {
            column_width: spec.column_width,
            r_sense_ohm: spec.analog.r_sense_ohm,
            ref_volt_v: None,
            csa_offset_sigma_v: spec.analog.csa_offset_sigma_v,
            trials: spec.trials,
            seed: spec.seed,
        },
    )
}

/// Accuracy distribution across device-sampling trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// Digital oracle accuracy on the same dataset.
    pub nominal_accuracy: f64,
    pub trial_accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// For each trial: fresh D2D devices for every cell, full-dataset crossbar
/// inference, accuracy recorded. Characterization output — the published
/// model accuracies are nominal, so there is no external ground truth here
/// beyond the digital oracle.
pub fn run_accuracy_under_variation(
    model: &Model,
    data: &BoolDataset,
    spec: &ExperimentSpec,
) -> Result<AccuracyReport> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::config("accuracy study needs a non-empty dataset"));
    }
    let mut analog = spec.analog;
    analog.column_width = spec.column_width;
    analog.ref_volt_v = AnalogConfig::midpoint_ref(
        spec.column_width,
        analog.r_sense_ohm,
        &CellNominal::default(),
    );
    let sim = CrossbarSim::new(model, analog)?;

    let correct = data
        .iter()
        .filter(|(sample, label)| tm::infer(sample, model).ok() == Some(*label))
        .count();
    let nominal_accuracy = correct as f64 / data.len() as f64;

    let trial_accuracies: Vec<f64> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(trial);
            let bank = CellBank::sample(sim.layout(), &spec.variation, &mut rng)?;
            let batch = infer_dataset(
                &sim,
                data,
                &bank,
                spec.seed.wrapping_add(trial).wrapping_add(1),
                false,
            )?;
            Ok(batch.accuracy(data.labels()))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = trial_accuracies.len() as f64;
    let mean = trial_accuracies.iter().sum::<f64>() / n;
    let var = trial_accuracies
        .iter()
        .map(|a| (a - mean).powi(2))
        .sum::<f64>()
        / n;
    let min = trial_accuracies.iter().copied().fold(f64::INFINITY, f64::min);
    let max = trial_accuracies
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AccuracyReport {
        nominal_accuracy,
        trial_accuracies,
        mean,
        std: var.sqrt(),
        min,
        max,
    })
}
