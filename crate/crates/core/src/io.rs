//! File formats: model documents, dataset CSV, baseline constants, and the
//! plot-ready CSV exports.
//!
//! Everything is plain structured text with schema-version tags. Writers are
//! deterministic — rerunning a command with the same inputs must reproduce
//! output files byte for byte, so nothing here emits timestamps or iterates
//! unordered maps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crossbar::{InferenceTrace, Layout, MarginReport};
use crate::dataset::RawDataset;
use crate::device::DeviceInstance;
use crate::energy::EnergyReport;
use crate::error::{Error, Result};
use crate::montecarlo::Histogram;
use crate::tm::{ActionVector, Clause, Model, Polarity, Thresholds};

pub const MODEL_SCHEMA: &str = "tm-model/v1";
pub const AGGREGATE_SCHEMA: &str = "aggregate/v1";
pub const BASELINES_SCHEMA: &str = "baselines/v1";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// model file

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema: String,
    num_classes: usize,
    clauses_per_class: usize,
    literal_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    thresholds: Option<Vec<Vec<f64>>>,
    classes: Vec<ClassEntry>,
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    polarities: Vec<i8>,
    /// One hex string per clause; bit `i` of the action vector is bit
    /// `i % 8` of byte `i / 8`.
    actions: Vec<String>,
}

fn hex_encode(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, bit) in bits.iter().enumerate() {
        if *bit {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").expect("writing to String cannot fail");
    }
    s
}

fn hex_decode(s: &str, literal_count: usize) -> std::result::Result<Vec<bool>, String> {
    let expected_bytes = literal_count.div_ceil(8);
    if s.len() != expected_bytes * 2 {
        return Err(format!(
            "action string has {} hex chars, expected {}",
            s.len(),
            expected_bytes * 2
        ));
    }
    let mut bits = vec![false; literal_count];
    for (byte_idx, chunk) in s.as_bytes().chunks(2).enumerate() {
        let text = std::str::from_utf8(chunk).map_err(|_| "non-ASCII hex".to_string())?;
        let byte = u8::from_str_radix(text, 16).map_err(|_| format!("bad hex byte '{text}'"))?;
        for bit_idx in 0..8 {
            let i = byte_idx * 8 + bit_idx;
            let set = byte & (1 << bit_idx) != 0;
            if i < literal_count {
                bits[i] = set;
            } else if set {
                return Err("padding bits beyond the literal count must be zero".to_string());
            }
        }
    }
    Ok(bits)
}

pub fn model_to_string(model: &Model) -> String {
    let mut classes = Vec::with_capacity(model.num_classes());
    for class in 0..model.num_classes() {
        let mut polarities = Vec::with_capacity(model.clauses_per_class());
        let mut actions = Vec::with_capacity(model.clauses_per_class());
        for j in 0..model.clauses_per_class() {
            let clause = model.clause(class, j);
            polarities.push(clause.polarity.sign() as i8);
            actions.push(hex_encode(clause.actions.bits()));
        }
        classes.push(ClassEntry {
            polarities,
            actions,
        });
    }
    let file = ModelFile {
        schema: MODEL_SCHEMA.to_string(),
        num_classes: model.num_classes(),
        clauses_per_class: model.clauses_per_class(),
        literal_count: model.literal_count(),
        thresholds: model.thresholds().map(|t| t.per_feature().to_vec()),
        classes,
    };
    toml::to_string(&file).expect("model serialization cannot fail")
}

pub fn write_model(path: &Path, model: &Model) -> Result<()> {
    write_string(path, &model_to_string(model))
}

pub fn model_from_str(text: &str, file_name: &str) -> Result<Model> {
    let file: ModelFile = toml::from_str(text)
        .map_err(|e| Error::parse(file_name, None, e.to_string()))?;
    if file.schema != MODEL_SCHEMA {
        return Err(Error::parse(
            file_name,
            None,
            format!("unsupported schema '{}', expected {MODEL_SCHEMA}", file.schema),
        ));
    }
    if file.classes.len() != file.num_classes {
        return Err(Error::parse(
            file_name,
            None,
            format!(
                "{} class entries but num_classes = {}",
                file.classes.len(),
                file.num_classes
            ),
        ));
    }
    let mut clauses = Vec::with_capacity(file.num_classes * file.clauses_per_class);
    for (class_idx, entry) in file.classes.iter().enumerate() {
        if entry.polarities.len() != file.clauses_per_class
            || entry.actions.len() != file.clauses_per_class
        {
            return Err(Error::parse(
                file_name,
                None,
                format!("class {class_idx} does not have {} clauses", file.clauses_per_class),
            ));
        }
        for (sign, action_hex) in entry.polarities.iter().zip(&entry.actions) {
            let bits = hex_decode(action_hex, file.literal_count)
                .map_err(|msg| Error::parse(file_name, None, msg))?;
            clauses.push(Clause {
                actions: ActionVector::new(bits),
                polarity: Polarity::from_sign(*sign)?,
            });
        }
    }
    let model = Model::new(
        file.num_classes,
        file.clauses_per_class,
        file.literal_count,
        clauses,
    )?;
    match file.thresholds {
        Some(t) => Ok(model.with_thresholds(Thresholds::new(t)?)),
        None => Ok(model),
    }
}

pub fn read_model(path: &Path) -> Result<Model> {
    model_from_str(&read_to_string(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// dataset CSV

/// Formats an f64 compactly but losslessly for CSV round trips.
fn fmt_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        // shortest representation that parses back to the same bits
        let mut s = format!("{v}");
        if s.parse::<f64>() != Ok(v) {
            s = format!("{v:e}");
        }
        s
    }
}

/// Rounds to `sig` significant digits for presentation columns, so unit
/// conversions do not leak float artifacts into the table.
fn fmt_sig(v: f64, sig: i32) -> String {
    if v == 0.0 || !v.is_finite() {
        return fmt_f64(v);
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(sig - 1 - mag);
    fmt_f64((v * scale).round() / scale)
}

pub fn dataset_to_csv(data: &RawDataset) -> String {
    let mut out = String::new();
    out.push_str("label");
    for f in 0..data.num_features() {
        write!(out, ",f{f}").expect("writing to String cannot fail");
    }
    out.push('\n');
    for (row, label) in data.features().iter().zip(data.labels()) {
        write!(out, "{label}").expect("writing to String cannot fail");
        for v in row {
            write!(out, ",{}", fmt_f64(*v)).expect("writing to String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, data: &RawDataset) -> Result<()> {
    write_string(path, &dataset_to_csv(data))
}

pub fn dataset_from_csv(text: &str, file_name: &str) -> Result<RawDataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(file_name, Some(1), "empty dataset file"))?;
    let mut cols = header.split(',');
    if cols.next() != Some("label") {
        return Err(Error::parse(
            file_name,
            Some(1),
            "first column must be 'label'",
        ));
    }
    let num_features = cols.count();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut max_label = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = Some(idx + 1);
        let mut fields = line.split(',');
        let label_text = fields
            .next()
            .ok_or_else(|| Error::parse(file_name, line_no, "missing label"))?;
        let label: usize = label_text
            .trim()
            .parse()
            .map_err(|_| Error::parse(file_name, line_no, format!("bad label '{label_text}'")))?;
        let row = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(file_name, line_no, format!("bad value '{f}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != num_features {
            return Err(Error::parse(
                file_name,
                line_no,
                format!("expected {num_features} features, found {}", row.len()),
            ));
        }
        max_label = max_label.max(label);
        features.push(row);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::parse(file_name, None, "dataset has no samples"));
    }
    RawDataset::new(features, labels, max_label + 1)
}

pub fn read_dataset(path: &Path) -> Result<RawDataset> {
    dataset_from_csv(&read_to_string(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// aggregate result files (simulate output, report input)

#[derive(Serialize, Deserialize)]
struct AggregateFile {
    schema: String,
    #[serde(flatten)]
    report: EnergyReport,
}

pub fn aggregate_to_string(report: &EnergyReport) -> String {
    let file = AggregateFile {
        schema: AGGREGATE_SCHEMA.to_string(),
        report: report.clone(),
    };
    toml::to_string(&file).expect("aggregate serialization cannot fail")
}

pub fn write_aggregate(path: &Path, report: &EnergyReport) -> Result<()> {
    write_string(path, &aggregate_to_string(report))
}

pub fn read_aggregate(path: &Path) -> Result<EnergyReport> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let file: AggregateFile =
        toml::from_str(&text).map_err(|e| Error::parse(&name, None, e.to_string()))?;
    if file.schema != AGGREGATE_SCHEMA {
        return Err(Error::parse(
            name,
            None,
            format!("unsupported schema '{}', expected {AGGREGATE_SCHEMA}", file.schema),
        ));
    }
    Ok(file.report)
}

// ---------------------------------------------------------------------------
// published baseline constants

/// Published per-dataset reference figures used for full-scale aggregate
/// runs and baseline comparison columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub name: String,
    pub accuracy_pct: f64,
    pub classes: u64,
    pub clauses_total: u64,
    pub ta_cells: u64,
    pub includes: u64,
    pub csas: u64,
    /// Digital CMOS implementation energy per datapoint.
    pub cmos_tm_energy_nj: f64,
    /// Published in-memory energy per datapoint for this architecture.
    pub energy_nj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSet {
    pub schema: String,
    #[serde(rename = "dataset")]
    pub datasets: Vec<BaselineRow>,
}

impl BaselineSet {
    pub fn find(&self, name: &str) -> Option<&BaselineRow> {
        self.datasets.iter().find(|d| d.name == name)
    }
}

pub fn read_baselines(path: &Path) -> Result<BaselineSet> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let set: BaselineSet =
        toml::from_str(&text).map_err(|e| Error::parse(&name, None, e.to_string()))?;
    if set.schema != BASELINES_SCHEMA {
        return Err(Error::parse(
            name,
            None,
            format!("unsupported schema '{}', expected {BASELINES_SCHEMA}", set.schema),
        ));
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// plot-ready CSV exports

pub fn layout_to_csv(layout: &Layout) -> String {
    let mut out = String::from("column_id,cell_slot,class,clause,literal_index\n");
    for (col_id, col) in layout.columns().iter().enumerate() {
        for (slot, literal) in (col.literal_start..col.literal_end).enumerate() {
            writeln!(out, "{col_id},{slot},{},{},{literal}", col.class, col.clause)
                .expect("writing to String cannot fail");
        }
    }
    out
}

pub fn devices_to_csv(devices: &[DeviceInstance]) -> String {
    let mut out = String::from("cell_id,r_lrs_ohm,r_hrs_ohm\n");
    for (id, d) in devices.iter().enumerate() {
        writeln!(out, "{id},{},{}", fmt_f64(d.r_lrs_ohm), fmt_f64(d.r_hrs_ohm))
            .expect("writing to String cannot fail");
    }
    out
}

pub fn histogram_to_csv(hist: &Histogram, unit: &str) -> String {
    let mut out = format!("bin_low_{unit},bin_high_{unit},count\n");
    for (i, count) in hist.counts.iter().enumerate() {
        writeln!(
            out,
            "{},{},{count}",
            fmt_f64(hist.edges[i]),
            fmt_f64(hist.edges[i + 1])
        )
        .expect("writing to String cannot fail");
    }
    writeln!(
        out,
        "# summary: n={} mean_{unit}={} min_{unit}={} max_{unit}={} std_{unit}={}",
        hist.total_count(),
        fmt_f64(hist.mean),
        fmt_f64(hist.min),
        fmt_f64(hist.max),
        fmt_f64(hist.std)
    )
    .expect("writing to String cannot fail");
    out
}

pub fn margin_to_csv(report: &MarginReport) -> String {
    let mut out = String::from(
        "case,failures_count,trials_count,error_rate,ci95_low,ci95_high\n",
    );
    for (case, rate) in [
        ("one_include_misses", &report.include_errors),
        ("all_exclude_fires", &report.exclude_errors),
        ("either", &report.overall_errors),
    ] {
        writeln!(
            out,
            "{case},{},{},{},{},{}",
            rate.failures,
            rate.trials,
            fmt_f64(rate.rate),
            fmt_f64(rate.ci_low),
            fmt_f64(rate.ci_high)
        )
        .expect("writing to String cannot fail");
    }
    writeln!(
        out,
        "# summary: column_width={} nominal_margin_mv={} ref_volt_mv={} feasible={}",
        report.column_width,
        fmt_f64(report.nominal_margin_v * 1e3),
        fmt_f64(report.ref_volt_v * 1e3),
        report.feasible
    )
    .expect("writing to String cannot fail");
    out
}

/// Structured text dump of one inference trace, for debugging and plotting.
pub fn trace_to_text(index: usize, label: Option<usize>, trace: &InferenceTrace) -> String {
    let mut out = String::new();
    write!(out, "datapoint {index}").expect("writing to String cannot fail");
    if let Some(label) = label {
        write!(out, " label={label}").expect("writing to String cannot fail");
    }
    writeln!(out, " predicted={}", trace.predicted).expect("writing to String cannot fail");
    out.push_str("  column_currents_uA:");
    for c in &trace.column_currents_a {
        write!(out, " {:.4}", c * 1e6).expect("writing to String cannot fail");
    }
    out.push('\n');
    out.push_str("  csa_bits: ");
    out.extend(trace.csa_bits.iter().map(|b| if *b { '1' } else { '0' }));
    out.push('\n');
    out.push_str("  partial_bits: ");
    out.extend(trace.partial_bits.iter().map(|b| if *b { '1' } else { '0' }));
    out.push('\n');
    out.push_str("  clause_bits: ");
    out.extend(trace.clause_bits.iter().map(|b| if *b { '1' } else { '0' }));
    out.push('\n');
    out.push_str("  class_sums:");
    for s in &trace.class_sums.0 {
        write!(out, " {s}").expect("writing to String cannot fail");
    }
    out.push('\n');
    out
}

/// Table-style merged report, column-compatible with the published
/// comparison table.
pub fn reports_to_csv(reports: &[EnergyReport]) -> String {
    let mut out = String::from(
        "dataset,accuracy_pct,classes_count,clauses_total_count,ta_cells_count,\
         includes_count,includes_pct,csas_count,baseline_energy_nj,energy_nj,\
         energy_reduction_ratio,tops_per_joule,latency_ns\n",
    );
    for r in reports {
        let accuracy = r
            .accuracy_pct
            .map(|a| fmt_f64((a * 100.0).round() / 100.0))
            .unwrap_or_default();
        let baseline = r
            .baseline_energy_j
            .map(|e| fmt_sig(e * 1e9, 6))
            .unwrap_or_default();
        let reduction = r
            .energy_reduction
            .map(|x| fmt_f64((x * 1000.0).round() / 1000.0))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{accuracy},{},{},{},{},{},{},{baseline},{},{reduction},{},{}",
            r.dataset,
            r.classes,
            r.clauses_total,
            r.ta_cells,
            r.includes,
            fmt_f64((r.include_pct * 100.0).round() / 100.0),
            r.csa_count,
            fmt_sig(r.energy_per_datapoint_j * 1e9, 6),
            fmt_f64((r.tops_per_joule * 10.0).round() / 10.0),
            fmt_sig(r.latency_s * 1e9, 6),
        )
        .expect("writing to String cannot fail");
    }
    out
}
