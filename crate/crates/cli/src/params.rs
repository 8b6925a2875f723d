//! Parameter file lookup.

use std::path::{Path, PathBuf};

use micromorph::IsotropicModuli;

use crate::CliError;

/// Directory searched for relative parameter files and for `default.params`.
pub const PARAM_DIR_ENV: &str = "MICROMORPH_PARAM_DIR";
pub const DEFAULT_FILE: &str = "default.params";

fn param_dir() -> Option<PathBuf> {
    std::env::var_os(PARAM_DIR_ENV).map(PathBuf::from)
}

/// Resolves a parameter path: as given, else relative to the parameter
/// directory.
pub fn resolve(path: &Path) -> Option<PathBuf> {
    if path.exists() {
        return Some(path.to_path_buf());
    }
    if path.is_relative() {
        let candidate = param_dir()?.join(path);
        if candidate.exists() {
            return Some(candidate);
        }
    }
    None
}

/// Loads the given file, or `default.params` from the parameter directory,
/// or the all-ones set when neither is available.
pub fn load(path: Option<&Path>) -> Result<IsotropicModuli, CliError> {
    let file =
        match path {
            Some(p) => Some(resolve(p).ok_or_else(|| {
                CliError::Io(format!("parameter file `{}` not found", p.display()))
            })?),
            None => param_dir()
                .map(|d| d.join(DEFAULT_FILE))
                .filter(|p| p.exists()),
        };
    match file {
        None => Ok(IsotropicModuli::ones()),
        Some(f) => {
            let text = std::fs::read_to_string(&f)
                .map_err(|e| CliError::Io(format!("{}: {e}", f.display())))?;
            Ok(IsotropicModuli::parse(&text)?)
        }
    }
}
