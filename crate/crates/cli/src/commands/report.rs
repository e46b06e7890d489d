use boolcur::energy::compare_baseline;
use boolcur::error::Result;
use boolcur::io;

use crate::ReportArgs;

pub fn run(args: ReportArgs) -> Result<()> {
    let baselines = match &args.baselines {
        Some(path) => {
            super::require_file(path, "baselines file")?;
            Some(io::read_baselines(path)?)
        }
        None => None,
    };

    let mut reports = Vec::with_capacity(args.inputs.len());
    for input in &args.inputs {
        super::require_file(input, "aggregate file")?;
        let mut report = io::read_aggregate(input)?;
        if report.baseline_energy_j.is_none() {
            if let Some(row) = baselines.as_ref().and_then(|set| set.find(&report.dataset)) {
                let baseline_j = row.cmos_tm_energy_nj * 1e-9;
                report.baseline_energy_j = Some(baseline_j);
                report.energy_reduction =
                    Some(compare_baseline(report.energy_per_datapoint_j, baseline_j)?);
            }
        }
        reports.push(report);
    }

    let csv = io::reports_to_csv(&reports);
    io::write_string(&args.out.join("report.csv"), &csv)?;
    print!("{csv}");
    println!("wrote {}", args.out.join("report.csv").display());
    Ok(())
}
