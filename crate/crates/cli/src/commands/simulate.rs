use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use boolcur::config::Resolved;
use boolcur::crossbar::{infer_dataset, CellBank, CrossbarSim};
use boolcur::dataset::BoolDataset;
use boolcur::energy::{
    analytic_counts, compare_baseline, datapoint_energy, datapoint_latency, tops_per_joule,
    EnergyReport,
};
use boolcur::error::{Error, Result};
use boolcur::io::{self, BaselineRow};
use boolcur::tm::{self, include_stats, Model, Thresholds};

use crate::SimulateArgs;

const DEFAULT_BASELINES: &str = "data/baselines.toml";

pub fn run(args: SimulateArgs) -> Result<()> {
    let config = super::load_config(args.config.as_deref())?;
    let resolved = config.resolve(args.column_width, args.parallelism)?;

    if let Some(name) = &args.paper_aggregates {
        return paper_aggregates(name, &args, &resolved);
    }

    // clap guarantees these are present outside --paper-aggregates mode
    let model_path = args.model.as_ref().expect("model path");
    let dataset_path = args.dataset.as_ref().expect("dataset path");
    super::require_file(model_path, "model")?;
    super::require_file(dataset_path, "dataset")?;

    let model = io::read_model(model_path)?;
    let raw = io::read_dataset(dataset_path)?;
    let thresholds = match model.thresholds() {
        Some(t) => t.clone(),
        None => Thresholds::binary_passthrough(raw.num_features()),
    };
    let data = raw.booleanize(&thresholds)?;
    if data.literal_count() != model.literal_count() {
        return Err(Error::config(format!(
            "dataset booleanizes to {} literals but the model expects {}",
            data.literal_count(),
            model.literal_count()
        )));
    }

    let name = args
        .name
        .clone()
        .unwrap_or_else(|| file_stem(dataset_path));

    let oracle_predictions: Vec<usize> = data
        .samples()
        .iter()
        .map(|s| tm::infer(s, &model))
        .collect::<Result<_>>()?;
    let oracle_accuracy = accuracy(&oracle_predictions, data.labels());

    if args.oracle {
        let csv = oracle_csv(&data, &oracle_predictions);
        io::write_string(&args.out.join("per_datapoint.csv"), &csv)?;
        println!("digital oracle accuracy: {:.4}", oracle_accuracy);
        println!("wrote {}", args.out.join("per_datapoint.csv").display());
        return Ok(());
    }

    let sim = CrossbarSim::new(&model, resolved.analog)?;
    let batch = infer_dataset(&sim, &data, &CellBank::Nominal, args.seed, true)?;
    let analog_accuracy = batch.accuracy(data.labels());
    let traces = batch.traces.as_ref().expect("traces kept");

    let n = data.len() as f64;
    let avg_counts = batch.total_counts.scaled(1.0 / n);
    let energy_j = datapoint_energy(&avg_counts, &resolved.energy);
    let columns = sim.layout().num_columns() as u64;
    let latency_s = datapoint_latency(columns, &resolved.schedule);
    let ta_cells = model.ta_cell_count() as u64;
    let topj = tops_per_joule(ta_cells, energy_j)?;
    let (includes, include_ratio) = include_stats(&model);

    let baseline = lookup_baseline(args.baselines.as_deref(), &name)?;
    let baseline_energy_j = baseline.as_ref().map(|row| row.cmos_tm_energy_nj * 1e-9);
    let reduction = baseline_energy_j
        .map(|b| compare_baseline(energy_j, b))
        .transpose()?;

    let report = EnergyReport {
        dataset: name,
        accuracy_pct: Some(analog_accuracy * 100.0),
        classes: model.num_classes() as u64,
        clauses_total: (model.num_classes() * model.clauses_per_class()) as u64,
        ta_cells,
        includes: includes as u64,
        include_pct: include_ratio * 100.0,
        csa_count: columns,
        energy_per_datapoint_j: energy_j,
        latency_s,
        tops_per_joule: topj,
        baseline_energy_j,
        energy_reduction: reduction,
    };

    let per_datapoint = per_datapoint_csv(&data, &batch, &resolved);
    io::write_string(&args.out.join("per_datapoint.csv"), &per_datapoint)?;
    io::write_aggregate(&args.out.join("aggregate.toml"), &report)?;
    io::write_string(&args.out.join("layout.csv"), &io::layout_to_csv(sim.layout()))?;
    if args.trace {
        let mut text = String::new();
        for (i, trace) in traces.iter().enumerate() {
            text.push_str(&io::trace_to_text(i, Some(data.labels()[i]), trace));
        }
        io::write_string(&args.out.join("traces.txt"), &text)?;
    }

    println!("digital oracle accuracy: {:.4}", oracle_accuracy);
    println!("crossbar accuracy:       {:.4}", analog_accuracy);
    if analog_accuracy != oracle_accuracy {
        println!("note: analog path diverged from the digital oracle");
    }
    println!("energy/datapoint: {:.4} nJ", energy_j * 1e9);
    println!("latency/datapoint: {:.1} ns", latency_s * 1e9);
    println!("TopJ^-1: {:.1}", topj);
    if let Some(r) = reduction {
        println!("energy reduction vs CMOS TM: {:.3}x", r);
    }
    println!("wrote {}", args.out.join("aggregate.toml").display());
    Ok(())
}

/// Reproduces the efficiency columns from published aggregate figures for
/// models too large to simulate cell by cell.
fn paper_aggregates(name: &str, args: &SimulateArgs, resolved: &Resolved) -> Result<()> {
    let path = args
        .baselines
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_BASELINES));
    super::require_file(&path, "baselines file")?;
    let set = io::read_baselines(&path)?;
    let row = set.find(name).ok_or_else(|| {
        Error::parse(
            path.display().to_string(),
            None,
            format!("no published row named '{name}'"),
        )
    })?;

    let w = resolved.analog.column_width as u64;
    let literals = row.ta_cells / row.clauses_total;
    let columns = row.clauses_total * literals.div_ceil(w);
    let counts = analytic_counts(
        row.ta_cells,
        row.includes,
        columns,
        resolved.literal_zero_fraction,
    )?;
    let analytic_energy_j = datapoint_energy(&counts, &resolved.energy);

    let energy_j = row.energy_nj * 1e-9;
    let topj = tops_per_joule(row.ta_cells, energy_j)?;
    let reduction = compare_baseline(energy_j, row.cmos_tm_energy_nj * 1e-9)?;
    let latency_s = datapoint_latency(columns, &resolved.schedule);

    let report = EnergyReport {
        dataset: row.name.clone(),
        accuracy_pct: Some(row.accuracy_pct),
        classes: row.classes,
        clauses_total: row.clauses_total,
        ta_cells: row.ta_cells,
        includes: row.includes,
        include_pct: row.includes as f64 * 100.0 / row.ta_cells as f64,
        csa_count: row.csas,
        energy_per_datapoint_j: energy_j,
        latency_s,
        tops_per_joule: topj,
        baseline_energy_j: Some(row.cmos_tm_energy_nj * 1e-9),
        energy_reduction: Some(reduction),
    };
    io::write_aggregate(&args.out.join("aggregate.toml"), &report)?;

    println!("dataset: {}", row.name);
    println!(
        "published energy/datapoint: {:.4} nJ -> TopJ^-1 {:.1}, reduction {:.3}x",
        row.energy_nj, topj, reduction
    );
    println!(
        "analytic event energy (literal-zero fraction {}): {:.4} nJ",
        resolved.literal_zero_fraction,
        analytic_energy_j * 1e9
    );
    println!(
        "column slots at W={w}: {columns} (published CSA count: {})",
        row.csas
    );
    println!("wrote {}", args.out.join("aggregate.toml").display());
    Ok(())
}

fn lookup_baseline(explicit: Option<&Path>, name: &str) -> Result<Option<BaselineRow>> {
    let path = match explicit {
        Some(p) => {
            super::require_file(p, "baselines file")?;
            p.to_path_buf()
        }
        None => {
            let default = PathBuf::from(DEFAULT_BASELINES);
            if !default.is_file() {
                return Ok(None);
            }
            default
        }
    };
    Ok(io::read_baselines(&path)?.find(name).cloned())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

fn accuracy(predictions: &[usize], labels: &[usize]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    let correct = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l)
        .count();
    correct as f64 / predictions.len() as f64
}

fn oracle_csv(data: &BoolDataset, predictions: &[usize]) -> String {
    let mut out = String::from("index,label,predicted,correct\n");
    for (i, (label, pred)) in data.labels().iter().zip(predictions).enumerate() {
        writeln!(out, "{i},{label},{pred},{}", (label == pred) as u8)
            .expect("writing to String cannot fail");
    }
    out
}

fn per_datapoint_csv(
    data: &BoolDataset,
    batch: &boolcur::crossbar::BatchResult,
    resolved: &Resolved,
) -> String {
    let traces = batch.traces.as_ref().expect("traces kept");
    let mut out = String::from(
        "index,label,predicted,correct,reads_include_lit0_count,reads_exclude_lit0_count,\
         reads_include_lit1_count,reads_exclude_lit1_count,csa_evals_count,energy_nj\n",
    );
    for (i, trace) in traces.iter().enumerate() {
        let label = data.labels()[i];
        let energy = datapoint_energy(&trace.counts, &resolved.energy);
        writeln!(
            out,
            "{i},{label},{},{},{},{},{},{},{},{}",
            trace.predicted,
            (trace.predicted == label) as u8,
            trace.counts.include_lit0,
            trace.counts.exclude_lit0,
            trace.counts.include_lit1,
            trace.counts.exclude_lit1,
            trace.counts.csa_evals,
            energy * 1e9,
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Re-exported for the montecarlo accuracy experiment.
pub fn load_model_and_data(model_path: &Path, dataset_path: &Path) -> Result<(Model, BoolDataset)> {
    super::require_file(model_path, "model")?;
    super::require_file(dataset_path, "dataset")?;
    let model = io::read_model(model_path)?;
    let raw = io::read_dataset(dataset_path)?;
    let thresholds = match model.thresholds() {
        Some(t) => t.clone(),
        None => Thresholds::binary_passthrough(raw.num_features()),
    };
    let data = raw.booleanize(&thresholds)?;
    if data.literal_count() != model.literal_count() {
        return Err(Error::config(format!(
            "dataset booleanizes to {} literals but the model expects {}",
            data.literal_count(),
            model.literal_count()
        )));
    }
    Ok((model, data))
}
