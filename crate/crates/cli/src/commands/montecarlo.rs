use std::fmt::Write as _;

use boolcur::error::{Error, Result};
use boolcur::io;
use boolcur::montecarlo::{
    run_accuracy_under_variation, run_c2c, run_d2d, run_margin_stress, run_pulse_sweep,
    ExperimentKind, ExperimentSpec,
};

use crate::MontecarloArgs;

pub fn run(args: MontecarloArgs) -> Result<()> {
    let kind: ExperimentKind = args
        .kind
        .parse()
        .map_err(|e: Error| Error::parse("--kind", None, e.to_string()))?;

    let config = super::load_config(args.config.as_deref())?;
    // margin studies deliberately probe infeasible widths, so the width
    // flag must not go through the analog-config feasibility check there
    let width_for_config = if kind == ExperimentKind::Margin {
        None
    } else {
        args.column_width
    };
    let resolved = config.resolve(width_for_config, None)?;

    let mut spec = ExperimentSpec::new(kind, args.seed);
    spec.variation = resolved.variation;
    let offset_default = spec.analog.csa_offset_sigma_v;
    spec.analog = resolved.analog;
    if kind == ExperimentKind::Margin && spec.analog.csa_offset_sigma_v == 0.0 {
        spec.analog.csa_offset_sigma_v = offset_default;
    }
    spec.column_width = args.column_width.unwrap_or(spec.analog.column_width);
    let exp = &resolved.experiment;
    if let Some(t) = args.trials.or(exp.trials) {
        spec.trials = t;
    }
    if let Some(c) = args.cycles.or(exp.cycles) {
        spec.cycles = c;
    }
    if let Some(r) = args.rows.or(exp.rows) {
        spec.rows = r;
    }
    if let Some(c) = args.cols.or(exp.cols) {
        spec.cols = c;
    }
    if let Some(b) = exp.histogram_bins {
        spec.histogram_bins = b;
    }
    if let Some(d) = &exp.durations_ns {
        spec.durations_s = d.iter().map(|ns| ns * 1e-9).collect();
    }
    spec.validate()?;

    match kind {
        ExperimentKind::C2c => {
            let report = run_c2c(&spec)?;
            io::write_string(
                &args.out.join("c2c_hrs.csv"),
                &io::histogram_to_csv(&report.hrs, "ohm"),
            )?;
            io::write_string(
                &args.out.join("c2c_lrs.csv"),
                &io::histogram_to_csv(&report.lrs, "ohm"),
            )?;
            let mut samples = String::from("cycle,r_hrs_ohm,r_lrs_ohm\n");
            for (i, (h, l)) in report
                .hrs_samples
                .iter()
                .zip(&report.lrs_samples)
                .enumerate()
            {
                writeln!(samples, "{i},{h},{l}").expect("writing to String cannot fail");
            }
            io::write_string(&args.out.join("c2c_samples.csv"), &samples)?;
            println!(
                "C2C over {} cycles: HRS mean {:.2} kOhm (spread {:.1}%), LRS mean {:.3} kOhm (spread {:.1}%)",
                spec.cycles,
                report.hrs.mean / 1e3,
                report.hrs.relative_spread() * 100.0,
                report.lrs.mean / 1e3,
                report.lrs.relative_spread() * 100.0
            );
            println!(
                "max per-step change: HRS {:.2}%, LRS {:.2}%",
                report.max_step_hrs * 100.0,
                report.max_step_lrs * 100.0
            );
        }
        ExperimentKind::D2d => {
            let report = run_d2d(&spec)?;
            io::write_string(
                &args.out.join("d2d_hrs.csv"),
                &io::histogram_to_csv(&report.hrs, "ohm"),
            )?;
            io::write_string(
                &args.out.join("d2d_lrs.csv"),
                &io::histogram_to_csv(&report.lrs, "ohm"),
            )?;
            io::write_string(
                &args.out.join("devices.csv"),
                &io::devices_to_csv(&report.devices),
            )?;
            println!(
                "D2D over {} devices: HRS mean {:.2} kOhm in [{:.1}, {:.1}], LRS mean {:.3} kOhm in [{:.3}, {:.3}]",
                report.devices.len(),
                report.hrs.mean / 1e3,
                report.hrs.min / 1e3,
                report.hrs.max / 1e3,
                report.lrs.mean / 1e3,
                report.lrs.min / 1e3,
                report.lrs.max / 1e3
            );
        }
        ExperimentKind::PulseSweep => {
            let rows = run_pulse_sweep(&spec)?;
            let mut csv = String::from("duration_ns,switched,energy_pj,resistance_ohm\n");
            for row in &rows {
                writeln!(
                    csv,
                    "{},{},{},{}",
                    row.duration_s * 1e9,
                    row.switched as u8,
                    row.energy_j * 1e12,
                    row.resistance_ohm
                )
                .expect("writing to String cannot fail");
            }
            io::write_string(&args.out.join("pulse_sweep.csv"), &csv)?;
            match rows.iter().find(|r| r.switched) {
                Some(first) => println!(
                    "first switching pulse: {:.0} ns ({:.3} pJ)",
                    first.duration_s * 1e9,
                    first.energy_j * 1e12
                ),
                None => println!("no pulse in the sweep switched the device"),
            }
        }
        ExperimentKind::Margin => {
            let report = run_margin_stress(&spec)?;
            io::write_string(&args.out.join("margin.csv"), &io::margin_to_csv(&report))?;
            println!(
                "W={}: nominal margin {:.3} mV ({}), ref {:.3} mV",
                report.column_width,
                report.nominal_margin_v * 1e3,
                if report.feasible { "feasible" } else { "infeasible" },
                report.ref_volt_v * 1e3
            );
            println!(
                "decision errors over {} trials: one-include {:.4} [{:.4}, {:.4}], all-exclude {:.4} [{:.4}, {:.4}]",
                report.overall_errors.trials,
                report.include_errors.rate,
                report.include_errors.ci_low,
                report.include_errors.ci_high,
                report.exclude_errors.rate,
                report.exclude_errors.ci_low,
                report.exclude_errors.ci_high
            );
        }
        ExperimentKind::Accuracy => {
            let (model_path, dataset_path) = match (&args.model, &args.dataset) {
                (Some(m), Some(d)) => (m, d),
                _ => {
                    return Err(Error::config(
                        "accuracy experiment needs --model and --dataset",
                    ))
                }
            };
            let (model, data) = super::simulate::load_model_and_data(model_path, dataset_path)?;
            let report = run_accuracy_under_variation(&model, &data, &spec)?;
            let mut csv = String::from("trial,accuracy\n");
            for (i, acc) in report.trial_accuracies.iter().enumerate() {
                writeln!(csv, "{i},{acc}").expect("writing to String cannot fail");
            }
            writeln!(
                csv,
                "# summary: nominal={} mean={} std={} min={} max={}",
                report.nominal_accuracy, report.mean, report.std, report.min, report.max
            )
            .expect("writing to String cannot fail");
            io::write_string(&args.out.join("accuracy.csv"), &csv)?;
            println!(
                "accuracy under variation ({} trials): mean {:.4} (std {:.4}), nominal {:.4}",
                spec.trials, report.mean, report.std, report.nominal_accuracy
            );
        }
    }
    Ok(())
}
