//! Statistical 1T1R cell model.
//!
//! A cell stores one Tsetlin automaton action as a memristor state (LRS =
//! include, HRS = exclude) behind a select transistor. Reads drop a literal
//! voltage across the cell and produce a current; programming applies SET or
//! RESET pulses. Measured nominal currents, programming powers, and the
//! device-to-device / cycle-to-cycle resistance statistics are abstracted
//! into configurable distributions — there is no physical compact model here.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Literal read voltages: logic '0' reads at 0.2 V, logic '1' at 0 V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadVoltages {
    pub literal0_v: f64,
    pub literal1_v: f64,
}

impl Default for ReadVoltages {
    fn default() -> Self {
        ReadVoltages {
            literal0_v: 0.2,
            literal1_v: 0.0,
        }
    }
}

impl ReadVoltages {
    pub fn for_literal(&self, literal: bool) -> f64 {
        if literal {
            self.literal1_v
        } else {
            self.literal0_v
        }
    }
}

/// Trained automaton action held by a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Include,
    Exclude,
}

impl From<bool> for Action {
    fn from(include: bool) -> Self {
        if include {
            Action::Include
        } else {
            Action::Exclude
        }
    }
}

/// Minimum SET/RESET pulse width that actually switches the memristor.
pub const SWITCHING_THRESHOLD_S: f64 = 35e-9;

/// One measured operating point: read voltage, effective resistance, current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NominalRow {
    pub read_voltage_v: f64,
    pub resistance_ohm: f64,
    pub current_a: f64,
}

/// Nominal read behavior for the four (literal, action) combinations.
///
/// For literal '0' the stored resistance is the effective value `V / I`, so
/// the rows are Ohm's-law consistent. Literal '1' rows read at 0 V; their
/// currents are sub-threshold leakage and their resistances are the measured
/// memristor values at that operating point, kept as data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellNominal {
    pub include_lit0: NominalRow,
    pub exclude_lit0: NominalRow,
    pub include_lit1: NominalRow,
    pub exclude_lit1: NominalRow,
}

impl Default for CellNominal {
    fn default() -> Self {
        let i_include_lit0 = 76.07e-6;
        let i_exclude_lit0 = 1.89e-6;
        CellNominal {
            include_lit0: NominalRow {
                read_voltage_v: 0.2,
                resistance_ohm: 0.2 / i_include_lit0,
                current_a: i_include_lit0,
            },
            exclude_lit0: NominalRow {
                read_voltage_v: 0.2,
                resistance_ohm: 0.2 / i_exclude_lit0,
                current_a: i_exclude_lit0,
            },
            include_lit1: NominalRow {
                read_voltage_v: 0.0,
                resistance_ohm: 7.6e3,
                current_a: 137e-15,
            },
            exclude_lit1: NominalRow {
                read_voltage_v: 0.0,
                resistance_ohm: 33.6e3,
                current_a: 9.9e-15,
            },
        }
    }
}

impl CellNominal {
    pub fn row(&self, literal: bool, action: Action) -> &NominalRow {
        match (literal, action) {
            (false, Action::Include) => &self.include_lit0,
            (false, Action::Exclude) => &self.exclude_lit0,
            (true, Action::Include) => &self.include_lit1,
            (true, Action::Exclude) => &self.exclude_lit1,
        }
    }

    /// Nominal read current for a (literal, action) combination.
    pub fn current_a(&self, literal: bool, action: Action) -> f64 {
        self.row(literal, action).current_a
    }

    pub fn validate(&self) -> Result<()> {
        for row in [
            &self.include_lit0,
            &self.exclude_lit0,
            &self.include_lit1,
            &self.exclude_lit1,
        ] {
            if row.resistance_ohm <= 0.0 {
                return Err(Error::device("non-positive nominal resistance"));
            }
            if row.current_a < 0.0 {
                return Err(Error::device("negative nominal current"));
            }
        }
        for row in [&self.include_lit0, &self.exclude_lit0] {
            let ohm = row.read_voltage_v / row.resistance_ohm;
            if ((row.current_a - ohm) / row.current_a).abs() >= 0.02 {
                return Err(Error::device(
                    "literal-'0' row breaks Ohm's-law consistency (>2%)",
                ));
            }
        }
        if self.include_lit0.current_a < 10.0 * self.exclude_lit0.current_a {
            return Err(Error::device(
                "include/exclude current separation below 10x at literal '0'",
            ));
        }
        Ok(())
    }
}

/// Distribution of one resistive state: mean and hard range for the
/// device-to-device spread, plus the per-cycle relative step bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVariation {
    pub mean_ohm: f64,
    pub min_ohm: f64,
    pub max_ohm: f64,
    /// Gaussian sigma; `None` defaults to `(max - min) / 6`.
    pub sigma_ohm: Option<f64>,
    /// Cycle-to-cycle relative step bound (e.g. 0.05 for +/-5%).
    pub c2c_step: f64,
}

impl StateVariation {
    pub fn sigma(&self) -> f64 {
        self.sigma_ohm
            .unwrap_or((self.max_ohm - self.min_ohm) / 6.0)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.min_ohm <= 0.0 {
            return Err(Error::config(format!("{name}: min resistance must be positive")));
        }
        if self.min_ohm >= self.max_ohm {
            return Err(Error::config(format!(
                "{name}: degenerate range [{}, {}]",
                self.min_ohm, self.max_ohm
            )));
        }
        if self.mean_ohm < self.min_ohm || self.mean_ohm > self.max_ohm {
            return Err(Error::config(format!("{name}: mean outside range")));
        }
        if self.sigma().is_sign_negative() {
            return Err(Error::config(format!("{name}: negative sigma")));
        }
        if self.c2c_step < 0.0 {
            return Err(Error::config(format!("{name}: negative step bound")));
        }
        Ok(())
    }
}

/// Measured HRS/LRS statistics for the memristor stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationParams {
    pub hrs: StateVariation,
    pub lrs: StateVariation,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            hrs: StateVariation {
                mean_ohm: 65.56e3,
                min_ohm: 31e3,
                max_ohm: 155e3,
                sigma_ohm: None,
                c2c_step: 0.05,
            },
            lrs: StateVariation {
                mean_ohm: 1.64e3,
                min_ohm: 1.55e3,
                max_ohm: 1.67e3,
                sigma_ohm: None,
                c2c_step: 0.01,
            },
        }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        self.hrs.validate("hrs")?;
        self.lrs.validate("lrs")
    }

    /// Zero spread: every sampled device sits exactly at the means.
    pub fn zero_variance() -> Self {
        let mut p = VariationParams::default();
        p.hrs.sigma_ohm = Some(0.0);
        p.hrs.c2c_step = 0.0;
        p.lrs.sigma_ohm = Some(0.0);
        p.lrs.c2c_step = 0.0;
        p
    }

    /// Zero spread centered on the operating-point table resistances
    /// (`V / I` of the literal-'0' rows) instead of the raw-memristor
    /// statistics. The two disagree — the crossbar distributions were
    /// measured without the select transistor — so "nominal device" studies
    /// use this context and variation studies use [`Self::default`].
    pub fn table_nominal() -> Self {
        let nominal = CellNominal::default();
        let lrs = nominal.include_lit0.resistance_ohm;
        let hrs = nominal.exclude_lit0.resistance_ohm;
        VariationParams {
            hrs: StateVariation {
                mean_ohm: hrs,
                min_ohm: hrs * 0.98,
                max_ohm: hrs * 1.02,
                sigma_ohm: Some(0.0),
                c2c_step: 0.0,
            },
            lrs: StateVariation {
                mean_ohm: lrs,
                min_ohm: lrs * 0.98,
                max_ohm: lrs * 1.02,
                sigma_ohm: Some(0.0),
                c2c_step: 0.0,
            },
        }
    }
}

/// One sampled cell: its low and high resistive states plus the cumulative
/// cycle-to-cycle drift applied to each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceInstance {
    pub r_lrs_ohm: f64,
    pub r_hrs_ohm: f64,
    pub lrs_drift: f64,
    pub hrs_drift: f64,
}

impl DeviceInstance {
    pub fn new(r_lrs_ohm: f64, r_hrs_ohm: f64) -> Result<Self> {
        if r_lrs_ohm <= 0.0 || r_hrs_ohm <= 0.0 {
            return Err(Error::device("resistances must be strictly positive"));
        }
        if r_lrs_ohm >= r_hrs_ohm {
            return Err(Error::device(format!(
                "LRS {r_lrs_ohm} must stay below HRS {r_hrs_ohm}"
            )));
        }
        Ok(DeviceInstance {
            r_lrs_ohm,
            r_hrs_ohm,
            lrs_drift: 1.0,
            hrs_drift: 1.0,
        })
    }

    pub fn resistance_ohm(&self, action: Action) -> f64 {
        match action {
            Action::Include => self.r_lrs_ohm,
            Action::Exclude => self.r_hrs_ohm,
        }
    }

    /// Read current through this device.
    ///
    /// Literal '0' drops a real voltage across the cell and obeys Ohm's law
    /// with the sampled resistance; literal '1' reads at 0 V so the table's
    /// sub-threshold leakage is returned instead.
    pub fn current_a(
        &self,
        literal: bool,
        action: Action,
        voltages: &ReadVoltages,
        nominal: &CellNominal,
    ) -> f64 {
        let v = voltages.for_literal(literal);
        if v <= 0.0 {
            nominal.current_a(true, action)
        } else {
            v / self.resistance_ohm(action)
        }
    }
}

/// Read current for one cell under either the nominal table or a sampled
/// device.
pub fn cell_current(
    literal: bool,
    action: Action,
    device: Option<&DeviceInstance>,
    voltages: &ReadVoltages,
    nominal: &CellNominal,
) -> f64 {
    match device {
        Some(d) => d.current_a(literal, action, voltages, nominal),
        None => nominal.current_a(literal, action),
    }
}

/// Draws one device from the D2D distributions.
///
/// Gaussian draws are clamped to the configured ranges. (Rejection-style
/// truncation would inflate the HRS mean by ~3% because the measured range
/// sits asymmetrically around it; clamping keeps the sample mean on the
/// measured average.) If the configured ranges overlap and a draw comes out
/// inverted, the pair is swapped so LRS < HRS always holds.
pub fn sample_d2d<R: Rng + ?Sized>(params: &VariationParams, rng: &mut R) -> Result<DeviceInstance> {
    params.validate()?;
    let mut lrs = sample_state(&params.lrs, rng);
    let mut hrs = sample_state(&params.hrs, rng);
    if lrs >= hrs {
        std::mem::swap(&mut lrs, &mut hrs);
        if lrs >= hrs {
            hrs = lrs * (1.0 + 1e-9);
        }
    }
    DeviceInstance::new(lrs, hrs)
}

fn sample_state<R: Rng + ?Sized>(state: &StateVariation, rng: &mut R) -> f64 {
    let sigma = state.sigma();
    if sigma == 0.0 {
        return state.mean_ohm;
    }
    let normal = Normal::new(state.mean_ohm, sigma).expect("validated sigma");
    normal.sample(rng).clamp(state.min_ohm, state.max_ohm)
}

/// One cycle-to-cycle step: each resistance is multiplied by `(1 +/- u)` with
/// `u ~ U[0, step]` and an equiprobable sign, then clamped back into its
/// configured absolute range.
pub fn step_c2c<R: Rng + ?Sized>(
    device: &DeviceInstance,
    params: &VariationParams,
    rng: &mut R,
) -> DeviceInstance {
    let mut next = *device;
    let lrs_factor = step_factor(params.lrs.c2c_step, rng);
    let hrs_factor = step_factor(params.hrs.c2c_step, rng);
    next.r_lrs_ohm = (device.r_lrs_ohm * lrs_factor).clamp(params.lrs.min_ohm, params.lrs.max_ohm);
    next.r_hrs_ohm = (device.r_hrs_ohm * hrs_factor).clamp(params.hrs.min_ohm, params.hrs.max_ohm);
    if next.r_lrs_ohm >= next.r_hrs_ohm {
        // only reachable with overlapping configured ranges
        next.r_lrs_ohm = next.r_hrs_ohm * (1.0 - 1e-9);
    }
    next.lrs_drift *= next.r_lrs_ohm / device.r_lrs_ohm;
    next.hrs_drift *= next.r_hrs_ohm / device.r_hrs_ohm;
    next
}

fn step_factor<R: Rng + ?Sized>(bound: f64, rng: &mut R) -> f64 {
    if bound == 0.0 {
        return 1.0;
    }
    let u: f64 = rng.random::<f64>() * bound;
    if rng.random::<bool>() {
        1.0 + u
    } else {
        1.0 - u
    }
}

/// SET/RESET programming pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgramPulse {
    pub polarity: PulsePolarity,
    pub amplitude_v: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulsePolarity {
    /// Positive pulse, drives the cell toward LRS (include).
    Set,
    /// Negative pulse, drives the cell toward HRS (exclude).
    Reset,
}

impl ProgramPulse {
    /// Default 1 V SET pulse.
    pub fn set(duration_s: f64) -> Self {
        ProgramPulse {
            polarity: PulsePolarity::Set,
            amplitude_v: 1.0,
            duration_s,
        }
    }

    /// Default -2.5 V RESET pulse.
    pub fn reset(duration_s: f64) -> Self {
        ProgramPulse {
            polarity: PulsePolarity::Reset,
            amplitude_v: -2.5,
            duration_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_s <= 0.0 {
            return Err(Error::InvalidPulse("duration must be positive".into()));
        }
        match self.polarity {
            PulsePolarity::Set if self.amplitude_v <= 0.0 => Err(Error::InvalidPulse(
                "SET pulse needs a positive amplitude".into(),
            )),
            PulsePolarity::Reset if self.amplitude_v >= 0.0 => Err(Error::InvalidPulse(
                "RESET pulse needs a negative amplitude".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Per-cell power draw for reads and programming.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellPower {
    pub program_exclude_w: f64,
    pub program_include_w: f64,
    pub read_include_lit0_w: f64,
    pub read_exclude_lit0_w: f64,
}

impl Default for CellPower {
    fn default() -> Self {
        CellPower {
            program_exclude_w: 54.54e-6,
            program_include_w: 215.1e-6,
            read_include_lit0_w: 14.37e-6,
            read_exclude_lit0_w: 0.3772e-6,
        }
    }
}

/// Outcome of one programming pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgramEvent {
    pub switched: bool,
    pub energy_j: f64,
    pub duration_s: f64,
}

/// Applies a programming pulse driving the cell toward `target_action`.
///
/// The pulse polarity must match the requested transition (SET for include,
/// RESET for exclude). Switching is a sharp threshold at
/// [`SWITCHING_THRESHOLD_S`]; a successful switch perturbs the destination
/// state's resistance by one cycle-to-cycle step. Energy is drawn for the
/// full pulse whether or not the device switches.
pub fn program_cell<R: Rng + ?Sized>(
    device: &mut DeviceInstance,
    target_action: Action,
    pulse: &ProgramPulse,
    power: &CellPower,
    params: &VariationParams,
    rng: &mut R,
) -> Result<ProgramEvent> {
    pulse.validate()?;
    let expected = match target_action {
        Action::Include => PulsePolarity::Set,
        Action::Exclude => PulsePolarity::Reset,
    };
    if pulse.polarity != expected {
        return Err(Error::InvalidPulse(format!(
            "{:?} pulse cannot program {:?}",
            pulse.polarity, target_action
        )));
    }
    let p = match target_action {
        Action::Include => power.program_include_w,
        Action::Exclude => power.program_exclude_w,
    };
    let switched = pulse.duration_s >= SWITCHING_THRESHOLD_S;
    if switched {
        let stepped = step_c2c(device, params, rng);
        match target_action {
            Action::Include => {
                device.r_lrs_ohm = stepped.r_lrs_ohm;
                device.lrs_drift = stepped.lrs_drift;
            }
            Action::Exclude => {
                device.r_hrs_ohm = stepped.r_hrs_ohm;
                device.hrs_drift = stepped.hrs_drift;
            }
        }
    }
    Ok(ProgramEvent {
        switched,
        energy_j: p * pulse.duration_s,
        duration_s: pulse.duration_s,
    })
}

/// Energy of a single cell read: Table power for the (literal, action)
/// combination times the read pulse width. Literal '1' reads are ~0.
pub fn read_event_energy(literal: bool, action: Action, t_read_s: f64, power: &CellPower) -> f64 {
    let p = match (literal, action) {
        (false, Action::Include) => power.read_include_lit0_w,
        (false, Action::Exclude) => power.read_exclude_lit0_w,
        (true, _) => 0.0,
    };
    p * t_read_s
}
