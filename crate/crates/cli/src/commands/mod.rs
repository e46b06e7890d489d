pub mod dataset;
pub mod montecarlo;
pub mod report;
pub mod simulate;
pub mod train;

use std::path::Path;

use boolcur::config::ConfigFile;
use boolcur::error::{Error, Result};

/// Missing input files are input errors (exit 2), not I/O surprises.
pub fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::parse(
            path.display().to_string(),
            None,
            format!("{what} not found"),
        ))
    }
}

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => {
            require_file(p, "config file")?;
            ConfigFile::load(p)
        }
        None => Ok(ConfigFile::default()),
    }
}
