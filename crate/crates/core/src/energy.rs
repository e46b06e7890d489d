//! Energy, latency, and efficiency arithmetic.
//!
//! Converts per-datapoint event tallies into joules using the measured cell
//! powers, models the column evaluation schedule for latency, and computes
//! the TopJ^-1 (trillion TA operations per joule) metric and baseline
//! comparison ratios.

use serde::{Deserialize, Serialize};

use crate::device::{Action, CellPower};
use crate::error::{Error, Result};

/// Per-datapoint event tallies.
///
/// Counts are `f64` so the analytic mode can carry expected (fractional)
/// event counts for models too large to simulate cell by cell; simulation
/// always produces whole numbers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub include_lit0: f64,
    pub exclude_lit0: f64,
    pub include_lit1: f64,
    pub exclude_lit1: f64,
    pub program_include: f64,
    pub program_exclude: f64,
    pub csa_evals: f64,
}

impl EventCounts {
    pub fn add_read(&mut self, literal: bool, action: Action) {
        match (literal, action) {
            (false, Action::Include) => self.include_lit0 += 1.0,
            (false, Action::Exclude) => self.exclude_lit0 += 1.0,
            (true, Action::Include) => self.include_lit1 += 1.0,
            (true, Action::Exclude) => self.exclude_lit1 += 1.0,
        }
    }

    pub fn merge(&mut self, other: &EventCounts) {
        self.include_lit0 += other.include_lit0;
        self.exclude_lit0 += other.exclude_lit0;
        self.include_lit1 += other.include_lit1;
        self.exclude_lit1 += other.exclude_lit1;
        self.program_include += other.program_include;
        self.program_exclude += other.program_exclude;
        self.csa_evals += other.csa_evals;
    }

    pub fn scaled(&self, factor: f64) -> EventCounts {
        EventCounts {
            include_lit0: self.include_lit0 * factor,
            exclude_lit0: self.exclude_lit0 * factor,
            include_lit1: self.include_lit1 * factor,
            exclude_lit1: self.exclude_lit1 * factor,
            program_include: self.program_include * factor,
            program_exclude: self.program_exclude * factor,
            csa_evals: self.csa_evals * factor,
        }
    }

    pub fn total_reads(&self) -> f64 {
        self.include_lit0 + self.exclude_lit0 + self.include_lit1 + self.exclude_lit1
    }
}

/// Expected event counts for a model described only by aggregate statistics.
///
/// `literal_zero_fraction` is the fraction of literals reading '0'; the
/// complement structure of the literal vector pins it at exactly 0.5 for
/// thermometer-encoded inputs, but it is configurable because published
/// aggregate energies appear to assume other activation statistics.
pub fn analytic_counts(
    ta_cells: u64,
    includes: u64,
    csa_evals: u64,
    literal_zero_fraction: f64,
) -> Result<EventCounts> {
    if includes > ta_cells {
        return Err(Error::config(format!(
            "{includes} includes cannot exceed {ta_cells} cells"
        )));
    }
    if !(0.0..=1.0).contains(&literal_zero_fraction) {
        return Err(Error::config("literal-zero fraction must be in [0, 1]"));
    }
    let f = literal_zero_fraction;
    let includes = includes as f64;
    let excludes = (ta_cells - includes as u64) as f64;
    Ok(EventCounts {
        include_lit0: includes * f,
        exclude_lit0: excludes * f,
        include_lit1: includes * (1.0 - f),
        exclude_lit1: excludes * (1.0 - f),
        program_include: 0.0,
        program_exclude: 0.0,
        csa_evals: csa_evals as f64,
    })
}

/// Cell powers, per-evaluation CSA energy, and phase timings used to price
/// event counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTable {
    pub power: CellPower,
    /// Energy per CSA evaluation; defaults to 0 (no published figure), kept
    /// as a knob for sensitivity studies.
    pub csa_energy_j: f64,
    pub t_read_s: f64,
    pub t_sense_s: f64,
    pub t_discharge_s: f64,
}

impl Default for EnergyTable {
    fn default() -> Self {
        EnergyTable {
            power: CellPower::default(),
            csa_energy_j: 0.0,
            t_read_s: 35e-9,
            t_sense_s: 20e-9,
            t_discharge_s: 5e-9,
        }
    }
}

impl EnergyTable {
    pub fn validate(&self) -> Result<()> {
        let p = &self.power;
        for (name, value) in [
            ("program_exclude_w", p.program_exclude_w),
            ("program_include_w", p.program_include_w),
            ("read_include_lit0_w", p.read_include_lit0_w),
            ("read_exclude_lit0_w", p.read_exclude_lit0_w),
            ("csa_energy_j", self.csa_energy_j),
        ] {
            if value < 0.0 {
                return Err(Error::config(format!("{name} must be non-negative")));
            }
        }
        if p.read_include_lit0_w <= p.read_exclude_lit0_w {
            return Err(Error::config(
                "include x literal-'0' power must dominate exclude x literal-'0'",
            ));
        }
        if self.t_read_s <= 0.0 || self.t_sense_s <= 0.0 || self.t_discharge_s <= 0.0 {
            return Err(Error::config("phase timings must be positive"));
        }
        Ok(())
    }
}

/// Column evaluation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    /// Columns evaluated in parallel per step; `None` means all at once
    /// (one sense amplifier per column).
    pub parallelism: Option<u64>,
    /// One evaluation cycle: read pulse plus discharge spark (sensing
    /// overlaps the read).
    pub cycle_time_s: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            parallelism: None,
            cycle_time_s: 40e-9,
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self, t_read_s: f64) -> Result<()> {
        if self.parallelism == Some(0) {
            return Err(Error::config("parallelism must be >= 1"));
        }
        if self.cycle_time_s < t_read_s {
            return Err(Error::config(format!(
                "cycle time {} shorter than read pulse {}",
                self.cycle_time_s, t_read_s
            )));
        }
        Ok(())
    }
}

/// Energy of one datapoint: every tallied event priced at its power times
/// the read pulse width, plus the CSA evaluations.
pub fn datapoint_energy(counts: &EventCounts, table: &EnergyTable) -> f64 {
    let p = &table.power;
    let t = table.t_read_s;
    counts.include_lit0 * p.read_include_lit0_w * t
        + counts.exclude_lit0 * p.read_exclude_lit0_w * t
        + counts.program_include * p.program_include_w * t
        + counts.program_exclude * p.program_exclude_w * t
        + counts.csa_evals * table.csa_energy_j
}

/// Inference latency for one datapoint under the schedule.
pub fn datapoint_latency(num_columns: u64, schedule: &ScheduleConfig) -> f64 {
    if num_columns == 0 {
        return 0.0;
    }
    let parallelism = schedule.parallelism.unwrap_or(num_columns).max(1);
    let steps = num_columns.div_ceil(parallelism);
    steps as f64 * schedule.cycle_time_s
}

/// Trillion TA operations per joule: cells touched per datapoint divided by
/// the energy per datapoint, scaled to 10^12.
pub fn tops_per_joule(ta_count: u64, energy_per_datapoint_j: f64) -> Result<f64> {
    if energy_per_datapoint_j <= 0.0 {
        return Err(Error::UndefinedMetric(
            "energy per datapoint must be positive".into(),
        ));
    }
    Ok(ta_count as f64 / energy_per_datapoint_j / 1e12)
}

/// Energy reduction factor against a baseline implementation.
pub fn compare_baseline(energy_j: f64, baseline_energy_j: f64) -> Result<f64> {
    if energy_j <= 0.0 || baseline_energy_j <= 0.0 {
        return Err(Error::UndefinedMetric(
            "baseline comparison needs positive energies".into(),
        ));
    }
    Ok(baseline_energy_j / energy_j)
}

/// Aggregate efficiency figures for one dataset/model pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub dataset: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy_pct: Option<f64>,
    pub classes: u64,
    pub clauses_total: u64,
    pub ta_cells: u64,
    pub includes: u64,
    /// Include percentage of all TA cells (0-100).
    pub include_pct: f64,
    pub csa_count: u64,
    pub energy_per_datapoint_j: f64,
    pub latency_s: f64,
    pub tops_per_joule: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub baseline_energy_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub energy_reduction: Option<f64>,
}
