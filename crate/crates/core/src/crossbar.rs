//! Crossbar inference path.
//!
//! Maps a trained model onto partial-clause columns, sums per-cell read
//! currents along each column line (ideal selectors, no sneak paths), senses
//! the column voltage against a reference, reconstructs full clauses as the
//! AND of their partials, and counts polarity votes into class sums. The
//! sense amplifier is a behavioral comparator with an optional Gaussian
//! input-referred offset; nothing here is simulated at transistor level.
//!
//! With nominal devices and zero offset the whole path must agree exactly
//! with the digital routines in [`crate::tm`] — that equivalence is the
//! main correctness oracle, so this module deliberately never calls the
//! digital clause evaluation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dataset::BoolDataset;
use crate::device::{
    sample_d2d, Action, CellNominal, DeviceInstance, ReadVoltages, VariationParams,
};
use crate::energy::EventCounts;
use crate::error::{Error, Result};
use crate::tm::{BoolSample, ClassSums, Model};

/// Analog operating point of the array: read voltages, column sense
/// resistor, CSA reference, column width, and phase timings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogConfig {
    pub read_voltages: ReadVoltages,
    pub r_sense_ohm: f64,
    /// CSA reference voltage. Defaults to the midpoint rule (see
    /// [`AnalogConfig::midpoint_ref`]).
    pub ref_volt_v: f64,
    /// Cells per partial-clause column (`W`).
    pub column_width: usize,
    pub t_read_s: f64,
    pub t_sense_s: f64,
    pub t_discharge_s: f64,
    /// Input-referred CSA offset sigma; 0 models an ideal comparator.
    pub csa_offset_sigma_v: f64,
}

impl Default for AnalogConfig {
    fn default() -> Self {
        AnalogConfig::for_width(32, &CellNominal::default())
    }
}

impl AnalogConfig {
    /// Config for column width `w` with the reference voltage at the
    /// midpoint of the worst-case decision band.
    pub fn for_width(w: usize, nominal: &CellNominal) -> Self {
        AnalogConfig {
            read_voltages: ReadVoltages::default(),
            r_sense_ohm: 100.0,
            ref_volt_v: AnalogConfig::midpoint_ref(w, 100.0, nominal),
            column_width: w,
            t_read_s: 35e-9,
            t_sense_s: 20e-9,
            t_discharge_s: 5e-9,
            csa_offset_sigma_v: 0.0,
        }
    }

    /// Midpoint reference: halfway between the worst-case all-exclude column
    /// voltage (`W` excludes at literal '0') and the weakest firing column
    /// (a single include at literal '0').
    pub fn midpoint_ref(w: usize, r_sense_ohm: f64, nominal: &CellNominal) -> f64 {
        let worst_exclude = w as f64 * nominal.current_a(false, Action::Exclude);
        let min_include = nominal.current_a(false, Action::Include);
        r_sense_ohm * (worst_exclude + min_include) / 2.0
    }

    /// Checks the decision band: the reference must sit strictly between the
    /// worst-case all-exclude column voltage and the weakest include column
    /// voltage under nominal devices. Fails for any `W` where the band is
    /// empty (e.g. 64 excludes out-draw one include).
    pub fn validate(&self, nominal: &CellNominal) -> Result<()> {
        if self.column_width == 0 {
            return Err(Error::config("column width must be >= 1"));
        }
        if self.r_sense_ohm <= 0.0 {
            return Err(Error::config("sense resistance must be positive"));
        }
        if self.read_voltages.literal0_v <= 0.0 {
            return Err(Error::config("literal-'0' read voltage must be positive"));
        }
        if self.t_read_s <= 0.0 || self.t_sense_s <= 0.0 || self.t_discharge_s <= 0.0 {
            return Err(Error::config("phase timings must be positive"));
        }
        if self.csa_offset_sigma_v < 0.0 {
            return Err(Error::config("CSA offset sigma must be non-negative"));
        }
        let floor = self.r_sense_ohm
            * self.column_width as f64
            * nominal.current_a(false, Action::Exclude);
        let ceiling = self.r_sense_ohm * nominal.current_a(false, Action::Include);
        if floor >= ceiling {
            return Err(Error::config(format!(
                "column width {} is infeasible: {} excludes out-draw one include \
                 ({:.4} mV >= {:.4} mV)",
                self.column_width,
                self.column_width,
                floor * 1e3,
                ceiling * 1e3
            )));
        }
        if self.ref_volt_v <= floor || self.ref_volt_v >= ceiling {
            return Err(Error::config(format!(
                "reference voltage {:.4} mV outside the decision band ({:.4}, {:.4}) mV",
                self.ref_volt_v * 1e3,
                floor * 1e3,
                ceiling * 1e3
            )));
        }
        Ok(())
    }
}

/// One partial-clause column: a contiguous literal slice of one clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub class: usize,
    pub clause: usize,
    pub partial: usize,
    pub literal_start: usize,
    pub literal_end: usize,
}

impl Column {
    pub fn width(&self) -> usize {
        self.literal_end - self.literal_start
    }
}

/// Assignment of every TA cell to a partial-clause column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    columns: Vec<Column>,
    column_width: usize,
    partials_per_clause: usize,
    num_classes: usize,
    clauses_per_class: usize,
    literal_count: usize,
}

impl Layout {
    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_width(&self) -> usize {
        self.column_width
    }

    pub fn partials_per_clause(&self) -> usize {
        self.partials_per_clause
    }

    pub fn column_index(&self, class: usize, clause: usize, partial: usize) -> usize {
        (class * self.clauses_per_class + clause) * self.partials_per_clause + partial
    }

    /// Flat device-bank index of a cell.
    pub fn cell_index(&self, class: usize, clause: usize, literal: usize) -> usize {
        (class * self.clauses_per_class + clause) * self.literal_count + literal
    }

    pub fn cell_count(&self) -> usize {
        self.num_classes * self.clauses_per_class * self.literal_count
    }
}

/// Splits each clause's `K` automata into `ceil(K / W)` contiguous columns.
pub fn map_model(model: &Model, column_width: usize) -> Result<Layout> {
    if column_width == 0 {
        return Err(Error::config("column width must be >= 1"));
    }
    let k = model.literal_count();
    let partials = k.div_ceil(column_width);
    let mut columns =
        Vec::with_capacity(model.num_classes() * model.clauses_per_class() * partials);
    for class in 0..model.num_classes() {
        for clause in 0..model.clauses_per_class() {
            for partial in 0..partials {
                let start = partial * column_width;
                let end = (start + column_width).min(k);
                columns.push(Column {
                    class,
                    clause,
                    partial,
                    literal_start: start,
                    literal_end: end,
                });
            }
        }
    }
    Ok(Layout {
        columns,
        column_width,
        partials_per_clause: partials,
        num_classes: model.num_classes(),
        clauses_per_class: model.clauses_per_class(),
        literal_count: k,
    })
}

/// Either the nominal operating-point table for every cell or per-cell
/// sampled devices.
#[derive(Debug, Clone)]
pub enum CellBank {
    Nominal,
    Sampled(Vec<DeviceInstance>),
}

impl CellBank {
    /// Samples one device per TA cell of `layout` from the D2D
    /// distributions.
    pub fn sample<R: Rng + ?Sized>(
        layout: &Layout,
        params: &VariationParams,
        rng: &mut R,
    ) -> Result<CellBank> {
        let devices = (0..layout.cell_count())
            .map(|_| sample_d2d(params, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(CellBank::Sampled(devices))
    }

    fn device(&self, cell: usize) -> Result<Option<&DeviceInstance>> {
        match self {
            CellBank::Nominal => Ok(None),
            CellBank::Sampled(devices) => devices
                .get(cell)
                .map(Some)
                .ok_or_else(|| Error::layout(format!("no device for cell {cell}"))),
        }
    }

    pub fn devices(&self) -> Option<&[DeviceInstance]> {
        match self {
            CellBank::Nominal => None,
            CellBank::Sampled(devices) => Some(devices),
        }
    }
}

/// CSA decision: fires iff the column voltage (plus input-referred offset)
/// exceeds the reference.
pub fn sense(current_a: f64, config: &AnalogConfig, offset_v: f64) -> bool {
    current_a * config.r_sense_ohm + offset_v > config.ref_volt_v
}

/// Full clause output: AND over its partial-clause bits.
pub fn full_clause_eval(partial_bits: &[bool]) -> Result<bool> {
    if partial_bits.is_empty() {
        return Err(Error::config("a clause needs at least one partial"));
    }
    Ok(partial_bits.iter().all(|b| *b))
}

/// Everything inferred from one datapoint, down to the raw column currents.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceTrace {
    pub column_currents_a: Vec<f64>,
    /// Raw comparator outputs, one per column.
    pub csa_bits: Vec<bool>,
    /// Partial-clause bits (the CSA outputs inverted).
    pub partial_bits: Vec<bool>,
    /// Reconstructed full-clause bits in `(class, clause)` order.
    pub clause_bits: Vec<bool>,
    pub class_sums: ClassSums,
    pub predicted: usize,
    pub counts: EventCounts,
}

/// Behavioral simulator for one mapped model.
#[derive(Debug, Clone)]
pub struct CrossbarSim<'m> {
    model: &'m Model,
    layout: Layout,
    nominal: CellNominal,
    config: AnalogConfig,
}

impl<'m> CrossbarSim<'m> {
    pub fn new(model: &'m Model, config: AnalogConfig) -> Result<Self> {
        let nominal = CellNominal::default();
        CrossbarSim::with_nominal(model, config, nominal)
    }

    pub fn with_nominal(
        model: &'m Model,
        config: AnalogConfig,
        nominal: CellNominal,
    ) -> Result<Self> {
        nominal.validate()?;
        config.validate(&nominal)?;
        let layout = map_model(model, config.column_width)?;
        Ok(CrossbarSim {
            model,
            layout,
            nominal,
            config,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn config(&self) -> &AnalogConfig {
        &self.config
    }

    pub fn nominal(&self) -> &CellNominal {
        &self.nominal
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    /// KCL sum of the selected column's cell currents. Only the selected
    /// column contributes (ideal selector); counts tally one read event per
    /// cell.
    pub fn column_current(
        &self,
        column: usize,
        sample: &BoolSample,
        bank: &CellBank,
        counts: &mut EventCounts,
    ) -> Result<f64> {
        let col = self
            .layout
            .columns
            .get(column)
            .ok_or_else(|| Error::layout(format!("column {column} out of range")))?;
        let actions = self.model.clause(col.class, col.clause).actions.bits();
        let literals = sample.literals();
        let mut total = 0.0;
        for literal_idx in col.literal_start..col.literal_end {
            let literal = literals[literal_idx];
            let action = Action::from(actions[literal_idx]);
            let cell = self.layout.cell_index(col.class, col.clause, literal_idx);
            let device = bank.device(cell)?;
            total += crate::device::cell_current(
                literal,
                action,
                device,
                &self.config.read_voltages,
                &self.nominal,
            );
            counts.add_read(literal, action);
        }
        Ok(total)
    }

    /// Evaluates one partial clause: the CSA fires when some included
    /// literal in the column reads '0', so the partial bit is the inverted
    /// comparator output. A fresh offset is drawn per evaluation.
    pub fn partial_clause_eval<R: Rng + ?Sized>(
        &self,
        column: usize,
        sample: &BoolSample,
        bank: &CellBank,
        rng: &mut R,
        counts: &mut EventCounts,
    ) -> Result<bool> {
        let current = self.column_current(column, sample, bank, counts)?;
        let offset = self.draw_offset(rng);
        counts.csa_evals += 1.0;
        Ok(!sense(current, &self.config, offset))
    }

    fn draw_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.config.csa_offset_sigma_v == 0.0 {
            0.0
        } else {
            Normal::new(0.0, self.config.csa_offset_sigma_v)
                .expect("validated sigma")
                .sample(rng)
        }
    }

    /// Full inference for one datapoint: every column evaluated, clauses
    /// reconstructed, polarity votes counted, argmax with lowest-index ties.
    pub fn infer<R: Rng + ?Sized>(
        &self,
        sample: &BoolSample,
        bank: &CellBank,
        rng: &mut R,
    ) -> Result<InferenceTrace> {
        if sample.len() != self.model.literal_count() {
            return Err(Error::config(format!(
                "sample has {} literals but model expects {}",
                sample.len(),
                self.model.literal_count()
            )));
        }
        let n_cols = self.layout.num_columns();
        let mut counts = EventCounts::default();
        let mut column_currents_a = Vec::with_capacity(n_cols);
        let mut csa_bits = Vec::with_capacity(n_cols);
        let mut partial_bits = Vec::with_capacity(n_cols);
        for column in 0..n_cols {
            let current = self.column_current(column, sample, bank, &mut counts)?;
            let offset = self.draw_offset(rng);
            let fired = sense(current, &self.config, offset);
            counts.csa_evals += 1.0;
            column_currents_a.push(current);
            csa_bits.push(fired);
            partial_bits.push(!fired);
        }

        let partials = self.layout.partials_per_clause;
        let mut clause_bits =
            Vec::with_capacity(self.model.num_classes() * self.model.clauses_per_class());
        let mut sums = vec![0i32; self.model.num_classes()];
        for (class, class_sum) in sums.iter_mut().enumerate() {
            for clause in 0..self.model.clauses_per_class() {
                let first = self.layout.column_index(class, clause, 0);
                let bit = full_clause_eval(&partial_bits[first..first + partials])?;
                clause_bits.push(bit);
                if bit {
                    *class_sum += self.model.clause(class, clause).polarity.sign();
                }
            }
        }
        let class_sums = ClassSums(sums);
        let predicted = class_sums.argmax();
        Ok(InferenceTrace {
            column_currents_a,
            csa_bits,
            partial_bits,
            clause_bits,
            class_sums,
            predicted,
            counts,
        })
    }
}

/// Batch inference result over a dataset.
#[derive(Debug, Clone)]
pub struct BatchResult {
    pub predictions: Vec<usize>,
    /// Event counts summed over the whole batch.
    pub total_counts: EventCounts,
    pub traces: Option<Vec<InferenceTrace>>,
}

impl BatchResult {
    pub fn accuracy(&self, labels: &[usize]) -> f64 {
        if self.predictions.is_empty() {
            return 0.0;
        }
        let correct = self
            .predictions
            .iter()
            .zip(labels)
            .filter(|(p, l)| p == l)
            .count();
        correct as f64 / self.predictions.len() as f64
    }
}

/// Runs crossbar inference over a dataset.
///
/// Each datapoint gets its own seed-derived RNG stream, so results are
/// identical no matter how the parallel iterator schedules the work.
pub fn infer_dataset(
    sim: &CrossbarSim,
    data: &BoolDataset,
    bank: &CellBank,
    seed: u64,
    keep_traces: bool,
) -> Result<BatchResult> {
    let traces: Vec<InferenceTrace> = data
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, sample)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sim.infer(sample, bank, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total_counts = EventCounts::default();
    for trace in &traces {
        total_counts.merge(&trace.counts);
    }
    let predictions = traces.iter().map(|t| t.predicted).collect();
    Ok(BatchResult {
        predictions,
        total_counts,
        traces: keep_traces.then_some(traces),
    })
}

/// Binomial point estimate with a 95% Wilson confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRate {
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ErrorRate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = if trials == 0 {
            0.0
        } else {
            failures as f64 / n
        };
        // Wilson score interval, z = 1.96; widened to contain the point
        // estimate at the 0/1 boundaries
        let z = 1.96f64;
        let (ci_low, ci_high) = if trials == 0 {
            (0.0, 1.0)
        } else {
            let z2 = z * z;
            let denom = 1.0 + z2 / n;
            let center = (p + z2 / (2.0 * n)) / denom;
            let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
            ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
        };
        ErrorRate {
            failures,
            trials,
            rate: p,
            ci_low,
            ci_high,
        }
    }
}

/// Sense-margin study parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginSpec {
    pub column_width: usize,
    pub r_sense_ohm: f64,
    /// Reference voltage; `None` applies the midpoint rule for the width.
    pub ref_volt_v: Option<f64>,
    pub csa_offset_sigma_v: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for MarginSpec {
    fn default() -> Self {
        MarginSpec {
            column_width: 32,
            r_sense_ohm: 100.0,
            ref_volt_v: None,
            csa_offset_sigma_v: 1e-4,
            trials: 10_000,
            seed: 1,
        }
    }
}

/// Outcome of [`margin_analysis`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub column_width: usize,
    /// `R_sense * (I_include - W * I_exclude)` under nominal devices.
    pub nominal_margin_v: f64,
    pub feasible: bool,
    pub ref_volt_v: f64,
    /// One-include worst case failing to fire.
    pub include_errors: ErrorRate,
    /// All-exclude worst case spuriously firing.
    pub exclude_errors: ErrorRate,
    /// Either decision failing in a trial.
    pub overall_errors: ErrorRate,
}

/// Analyzes the CSA decision margin for a column width.
///
/// The nominal margin comes straight from the table currents; the Monte
/// Carlo part samples per-trial devices and offsets, evaluating the two
/// worst cases: a lone include reading '0' against `W - 1` literal-'1'
/// cells, and a full column of excludes all reading '0'. Infeasible widths
/// (negative margin) are still simulated so the failure rate is visible.
pub fn margin_analysis(
    nominal: &CellNominal,
    variation: &VariationParams,
    spec: &MarginSpec,
) -> Result<MarginReport> {
    if spec.column_width == 0 {
        return Err(Error::config("column width must be >= 1"));
    }
    if spec.trials == 0 {
        return Err(Error::config("margin analysis needs at least one trial"));
    }
    variation.validate()?;
    let w = spec.column_width;
    let i_include = nominal.current_a(false, Action::Include);
    let i_exclude = nominal.current_a(false, Action::Exclude);
    let nominal_margin_v = spec.r_sense_ohm * (i_include - w as f64 * i_exclude);
    let ref_volt_v = spec
        .ref_volt_v
        .unwrap_or_else(|| AnalogConfig::midpoint_ref(w, spec.r_sense_ohm, nominal));

    let voltages = ReadVoltages::default();
    let exclude_leak = nominal.current_a(true, Action::Exclude);

    let results: Vec<(bool, bool)> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(trial);
            // worst case 1: one include at literal '0', W-1 excludes at '1'
            let include_device = sample_d2d(variation, &mut rng).expect("validated params");
            let include_current = voltages.literal0_v / include_device.r_lrs_ohm
                + (w - 1) as f64 * exclude_leak;
            // worst case 2: all excludes at literal '0'
            let mut exclude_current = 0.0;
            for _ in 0..w {
                let d = sample_d2d(variation, &mut rng).expect("validated params");
                exclude_current += voltages.literal0_v / d.r_hrs_ohm;
            }
            let offset_include = draw_offset(spec.csa_offset_sigma_v, &mut rng);
            let offset_exclude = draw_offset(spec.csa_offset_sigma_v, &mut rng);
            let include_fail =
                include_current * spec.r_sense_ohm + offset_include <= ref_volt_v;
            let exclude_fail =
                exclude_current * spec.r_sense_ohm + offset_exclude > ref_volt_v;
            (include_fail, exclude_fail)
        })
        .collect();

    let include_failures = results.iter().filter(|(inc, _)| *inc).count() as u64;
    let exclude_failures = results.iter().filter(|(_, exc)| *exc).count() as u64;
    let overall_failures = results.iter().filter(|(inc, exc)| *inc || *exc).count() as u64;

    Ok(MarginReport {
        column_width: w,
        nominal_margin_v,
        feasible: nominal_margin_v > 0.0,
        ref_volt_v,
        include_errors: ErrorRate::from_counts(include_failures, spec.trials),
        exclude_errors: ErrorRate::from_counts(exclude_failures, spec.trials),
        overall_errors: ErrorRate::from_counts(overall_failures, spec.trials),
    })
}

fn draw_offset<R: Rng + ?Sized>(sigma_v: f64, rng: &mut R) -> f64 {
    if sigma_v == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sigma_v).expect("non-negative sigma").sample(rng)
    }
}
