//! Human-readable run configuration.
//!
//! A TOML file with sections mirroring the simulator's parameter types; every
//! key is optional and falls back to the measured defaults. Keys carry unit
//! suffixes (`_ns`, `_kohm`, `_uw`, `_mv`) and are converted to SI on load.
//! All overrides are validated before any simulation starts.

use std::path::Path;

use serde::Deserialize;

use crate::crossbar::AnalogConfig;
use crate::device::{CellNominal, CellPower, StateVariation, VariationParams};
use crate::energy::{EnergyTable, ScheduleConfig};
use crate::error::{Error, Result};

pub const CONFIG_SCHEMA: &str = "sim-config/v1";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: Option<String>,
    #[serde(default)]
    pub analog: AnalogSection,
    #[serde(default)]
    pub variation: VariationSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub energy: EnergySection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalogSection {
    pub v_literal0: Option<f64>,
    pub v_literal1: Option<f64>,
    pub r_sense_ohm: Option<f64>,
    /// Omitted = midpoint rule for the resolved column width.
    pub ref_volt_mv: Option<f64>,
    pub column_width: Option<usize>,
    pub t_read_ns: Option<f64>,
    pub t_sense_ns: Option<f64>,
    pub t_discharge_ns: Option<f64>,
    pub csa_offset_sigma_mv: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationSection {
    #[serde(default)]
    pub hrs: StateSection,
    #[serde(default)]
    pub lrs: StateSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub mean_kohm: Option<f64>,
    pub min_kohm: Option<f64>,
    pub max_kohm: Option<f64>,
    pub sigma_kohm: Option<f64>,
    pub c2c_step_pct: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    /// Columns sensed per step; omitted = all in parallel.
    pub parallelism: Option<u64>,
    pub cycle_time_ns: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub program_exclude_uw: Option<f64>,
    pub program_include_uw: Option<f64>,
    pub include_lit0_uw: Option<f64>,
    pub exclude_lit0_uw: Option<f64>,
    pub csa_energy_fj: Option<f64>,
    /// Fraction of literals reading '0' for the analytic energy mode.
    pub literal_zero_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: Option<u64>,
    pub cycles: Option<u64>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub histogram_bins: Option<usize>,
    pub durations_ns: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn from_str(text: &str, file_name: &str) -> Result<ConfigFile> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::parse(file_name, None, e.to_string()))?;
        if let Some(schema) = &file.schema {
            if schema != CONFIG_SCHEMA {
                return Err(Error::parse(
                    file_name,
                    None,
                    format!("unsupported schema '{schema}', expected {CONFIG_SCHEMA}"),
                ));
            }
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        ConfigFile::from_str(&text, &path.display().to_string())
    }

    /// Applies the file on top of the defaults and validates everything.
    ///
    /// `column_width` and `parallelism` given on the command line win over
    /// the file.
    pub fn resolve(
        &self,
        column_width_override: Option<usize>,
        parallelism_override: Option<u64>,
    ) -> Result<Resolved> {
        let nominal = CellNominal::default();
        let w = column_width_override
            .or(self.analog.column_width)
            .unwrap_or(32);

        let mut analog = AnalogConfig::for_width(w, &nominal);
        let a = &self.analog;
        if let Some(v) = a.v_literal0 {
            analog.read_voltages.literal0_v = v;
        }
        if let Some(v) = a.v_literal1 {
            analog.read_voltages.literal1_v = v;
        }
        if let Some(r) = a.r_sense_ohm {
            analog.r_sense_ohm = r;
        }
        if let Some(t) = a.t_read_ns {
            analog.t_read_s = t * 1e-9;
        }
        if let Some(t) = a.t_sense_ns {
            analog.t_sense_s = t * 1e-9;
        }
        if let Some(t) = a.t_discharge_ns {
            analog.t_discharge_s = t * 1e-9;
        }
        if let Some(s) = a.csa_offset_sigma_mv {
            analog.csa_offset_sigma_v = s * 1e-3;
        }
        analog.ref_volt_v = match a.ref_volt_mv {
            Some(mv) => mv * 1e-3,
            None => AnalogConfig::midpoint_ref(w, analog.r_sense_ohm, &nominal),
        };
        analog.validate(&nominal)?;

        let defaults = VariationParams::default();
        let variation = VariationParams {
            hrs: resolve_state(&self.variation.hrs, &defaults.hrs),
            lrs: resolve_state(&self.variation.lrs, &defaults.lrs),
        };
        variation.validate()?;

        let mut schedule = ScheduleConfig::default();
        if let Some(p) = parallelism_override.or(self.schedule.parallelism) {
            schedule.parallelism = Some(p);
        }
        if let Some(t) = self.schedule.cycle_time_ns {
            schedule.cycle_time_s = t * 1e-9;
        }
        schedule.validate(analog.t_read_s)?;

        let e = &self.energy;
        let power = CellPower {
            program_exclude_w: e.program_exclude_uw.map_or(54.54e-6, |p| p * 1e-6),
            program_include_w: e.program_include_uw.map_or(215.1e-6, |p| p * 1e-6),
            read_include_lit0_w: e.include_lit0_uw.map_or(14.37e-6, |p| p * 1e-6),
            read_exclude_lit0_w: e.exclude_lit0_uw.map_or(0.3772e-6, |p| p * 1e-6),
        };
        let energy = EnergyTable {
            power,
            csa_energy_j: e.csa_energy_fj.map_or(0.0, |v| v * 1e-15),
            t_read_s: analog.t_read_s,
            t_sense_s: analog.t_sense_s,
            t_discharge_s: analog.t_discharge_s,
        };
        energy.validate()?;

        let literal_zero_fraction = e.literal_zero_fraction.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&literal_zero_fraction) {
            return Err(Error::config("literal_zero_fraction must be in [0, 1]"));
        }

        Ok(Resolved {
            analog,
            variation,
            schedule,
            energy,
            literal_zero_fraction,
            experiment: self.experiment.clone(),
        })
    }
}

fn resolve_state(section: &StateSection, default: &StateVariation) -> StateVariation {
    StateVariation {
        mean_ohm: section.mean_kohm.map_or(default.mean_ohm, |v| v * 1e3),
        min_ohm: section.min_kohm.map_or(default.min_ohm, |v| v * 1e3),
        max_ohm: section.max_kohm.map_or(default.max_ohm, |v| v * 1e3),
        sigma_ohm: section.sigma_kohm.map(|v| v * 1e3).or(default.sigma_ohm),
        c2c_step: section.c2c_step_pct.map_or(default.c2c_step, |v| v / 100.0),
    }
}

/// Fully validated simulation parameters.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub analog: AnalogConfig,
    pub variation: VariationParams,
    pub schedule: ScheduleConfig,
    pub energy: EnergyTable,
    pub literal_zero_fraction: f64,
    pub experiment: ExperimentSection,
}

impl Default for Resolved {
    fn default() -> Self {
        ConfigFile::default()
            .resolve(None, None)
            .expect("defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_defaults() {
        let resolved = ConfigFile::default().resolve(None, None).unwrap();
        assert_eq!(resolved.analog.column_width, 32);
        assert!((resolved.analog.ref_volt_v - 6.8275e-3).abs() < 1e-7);
        assert_eq!(resolved.variation.hrs.mean_ohm, 65.56e3);
        assert_eq!(resolved.schedule.parallelism, None);
    }

    #[test]
    fn overrides_apply_with_unit_conversion() {
        let text = r#"
            schema = "sim-config/v1"

            [analog]
            column_width = 8
            csa_offset_sigma_mv = 0.1

            [variation.hrs]
            mean_kohm = 70.0

            [schedule]
            parallelism = 4

            [energy]
            csa_energy_fj = 2.0
        "#;
        let file = ConfigFile::from_str(text, "test").unwrap();
        let resolved = file.resolve(None, None).unwrap();
        assert_eq!(resolved.analog.column_width, 8);
        assert!((resolved.analog.csa_offset_sigma_v - 1e-4).abs() < 1e-12);
        assert_eq!(resolved.variation.hrs.mean_ohm, 70e3);
        assert_eq!(resolved.schedule.parallelism, Some(4));
        assert!((resolved.energy.csa_energy_j - 2e-15).abs() < 1e-20);
        // reference recomputed for the narrower column
        assert!(resolved.analog.ref_volt_v < 6.8275e-3);
    }

    #[test]
    fn cli_width_wins_over_file() {
        let text = "[analog]\ncolumn_width = 8\n";
        let file = ConfigFile::from_str(text, "test").unwrap();
        let resolved = file.resolve(Some(4), None).unwrap();
        assert_eq!(resolved.analog.column_width, 4);
    }

    #[test]
    fn infeasible_width_rejected_at_load() {
        let file = ConfigFile::default();
        assert!(file.resolve(Some(64), None).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "[analog]\nnot_a_key = 1\n";
        assert!(ConfigFile::from_str(text, "test").is_err());
    }

    #[test]
    fn invalid_variation_rejected() {
        let text = "[variation.hrs]\nmin_kohm = 200.0\n";
        let file = ConfigFile::from_str(text, "test").unwrap();
        assert!(file.resolve(None, None).is_err());
    }
}
