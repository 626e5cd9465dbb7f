use std::io::Write;
use std::path::{Path, PathBuf};

use super::error::{MlError, Result};
use super::model::{TrainedModel, MODEL_FORMAT_VERSION};

/// Directory of `<name>.model.json` files. Writes go through a temporary
/// file in the same directory and are renamed into place, so readers never
/// see a partial model.
#[derive(Debug, Clone)]
pub struct ModelStore {
    dir: PathBuf,
}

pub const MODEL_FILE_SUFFIX: &str = ".model.json";

pub fn validate_model_name(name: &str) -> Result<()> {
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        Ok(())
    } else {
        Err(MlError::ModelStore(format!("invalid model name {name:?}: use letters, digits, '_' and '-'")))
    }
}

impl ModelStore {
    pub fn new(dir: impl Into<PathBuf>) -> ModelStore {
        ModelStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, name: &str) -> Result<PathBuf> {
        validate_model_name(name)?;
        Ok(self.dir.join(format!("{name}{MODEL_FILE_SUFFIX}")))
    }

    pub fn save(&self, model: &TrainedModel) -> Result<PathBuf> {
        let path = self.path_for(&model.name)?;
        let err = |e: std::io::Error| MlError::ModelStore(format!("{}: {e}", path.display()));
        std::fs::create_dir_all(&self.dir).map_err(err)?;
        let json = serde_json::to_string_pretty(model).map_err(|e| MlError::ModelStore(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(err)?;
        tmp.write_all(json.as_bytes()).map_err(err)?;
        tmp.write_all(b"\n").map_err(err)?;
        tmp.persist(&path).map_err(|e| err(e.error))?;
        Ok(path)
    }

    pub fn load(&self, name: &str) -> Result<TrainedModel> {
        let path = self.path_for(name)?;
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(MlError::ModelNotFound(name.to_string())),
            Err(e) => return Err(MlError::ModelStore(format!("{}: {e}", path.display()))),
        };
        let model: TrainedModel =
            serde_json::from_str(&text).map_err(|e| MlError::ModelStore(format!("{}: {e}", path.display())))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(MlError::ModelStore(format!(
                "{}: format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                path.display(),
                model.format_version
            )));
        }
        Ok(model)
    }

    /// Names of stored models, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let entries = match std::fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(MlError::ModelStore(e.to_string())),
        };
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(MODEL_FILE_SUFFIX)).map(str::to_string))
            .collect();
        names.sort();
        Ok(names)
    }
}
