use boolcur::error::Result;
use boolcur::io;
use boolcur::tm::{include_stats, train_reference, Thresholds, TrainParams};

use crate::TrainArgs;

pub fn run(args: TrainArgs) -> Result<()> {
    super::require_file(&args.dataset, "dataset")?;
    let raw = io::read_dataset(&args.dataset)?;

    let thresholds = match args.quantile_levels {
        Some(levels) => Thresholds::from_quantiles(&raw.columns(), levels)?,
        None => {
            let binary = raw
                .features()
                .iter()
                .flatten()
                .all(|v| *v == 0.0 || *v == 1.0);
            if binary {
                Thresholds::binary_passthrough(raw.num_features())
            } else {
                Thresholds::from_quantiles(&raw.columns(), 4)?
            }
        }
    };
    let data = raw.booleanize(&thresholds)?;

    let params = TrainParams {
        clauses_per_class: args.clauses_per_class,
        specificity: args.specificity,
        threshold: args.threshold,
        states_per_action: args.states,
        epochs: args.epochs,
        seed: args.seed,
    };
    let model = train_reference(&data, &params)?.with_thresholds(thresholds);

    let path = args.out.join("model.toml");
    io::write_model(&path, &model)?;

    let (count, ratio) = include_stats(&model);
    println!("wrote {}", path.display());
    println!(
        "model: {} classes x {} clauses x {} literals = {} TA cells",
        model.num_classes(),
        model.clauses_per_class(),
        model.literal_count(),
        model.ta_cell_count()
    );
    println!("includes: {} ({:.2}%)", count, ratio * 100.0);
    Ok(())
}
