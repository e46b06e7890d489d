use boolcur::dataset::noisy_xor;
use boolcur::error::{Error, Result};
use boolcur::io;

use crate::DatasetArgs;

pub fn run(args: DatasetArgs) -> Result<()> {
    let data = match args.generator.as_str() {
        "noisy-xor" => {
            if args.features < 2 {
                return Err(Error::config("noisy-xor needs at least 2 features"));
            }
            if !(0.0..=1.0).contains(&args.noise) {
                return Err(Error::config("noise must be in [0, 1]"));
            }
            noisy_xor(args.features, args.samples, args.noise, args.seed)
        }
        other => {
            return Err(Error::parse(
                "generator",
                None,
                format!("unknown generator '{other}' (available: noisy-xor)"),
            ))
        }
    };
    io::write_dataset(&args.out_file, &data)?;
    println!(
        "wrote {} ({} samples, {} features)",
        args.out_file.display(),
        data.len(),
        data.num_features()
    );
    Ok(())
}
