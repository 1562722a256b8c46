//! Versioned JSON model file.
//!
//! A model file stores the fitted model plus what is needed to replay the
//! preprocessing on new data: the input column names and the min-max scaler.
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! reloaded model reproduces fit-time predictions bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::AggregationModel;
use crate::error::{Error, Result};
use crate::ingest::MinMaxScaler;

pub const MODEL_FORMAT: &str = "aggeval-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    /// Input columns the model consumes, in order (after scaling drops).
    pub columns: Vec<String>,
    #[serde(default)]
    pub response: Option<String>,
    /// Scaler fitted on the training inputs; `None` when inputs were used unscaled.
    #[serde(default)]
    pub scaler: Option<MinMaxScaler<f64>>,
    pub model: AggregationModel<f64>,
}

impl ModelFile {
    pub fn new(
        model: AggregationModel<f64>,
        columns: Vec<String>,
        scaler: Option<MinMaxScaler<f64>>,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            columns,
            response: None,
            scaler,
            model,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unknown format '{}'", self.format)));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", self.version)));
        }
        if self.columns.len() != self.model.k() {
            return Err(Error::Model(format!(
                "{} column names for a model of arity {}",
                self.columns.len(),
                self.model.k()
            )));
        }
        if let Some(s) = &self.scaler {
            if s.kept.len() != self.model.k()
                || s.min.len() != s.kept.len()
                || s.max.len() != s.kept.len()
                || s.kept.iter().any(|&i| i >= s.source_columns.len())
            {
                return Err(Error::Model("scaler does not match model arity".into()));
            }
        }
        self.model.validate()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Model(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s).map_err(|e| Error::Model(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{fit, ApproachKind, FitConfig};
    use crate::ingest::Dataset;

    #[test]
    fn round_trip_is_bit_exact() {
        let d = Dataset::from_columns(
            &[
                vec![0.1, 0.7, 0.3, 0.9, 0.11],
                vec![0.2, 0.1, 0.8, 0.95, 0.4],
                vec![1.0 / 3.0, 0.5, 0.25, 0.0, 1.0],
            ],
            Some(vec![0.3, 0.4, 0.5, 0.9, 0.2]),
        )
        .unwrap();
        for kind in ApproachKind::ALL {
            let m = fit(kind, &d, &FitConfig::default()).unwrap();
            let file = ModelFile::new(m.clone(), d.column_names().to_vec(), None);
            let back = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
            assert_eq!(back.model, m);
            let a = m.predict_all(d.inputs()).unwrap();
            let b = back.model.predict_all(d.inputs()).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn rejects_wrong_format_and_tampered_weights() {
        let m = AggregationModel::regression(vec![0.25, 0.75]).unwrap();
        let file = ModelFile::new(m, vec!["a".into(), "b".into()], None);
        let json = file.to_json().unwrap();
        assert!(ModelFile::from_json(&json.replace(MODEL_FORMAT, "other")).is_err());
        assert!(ModelFile::from_json(&json.replace("0.75", "0.9")).is_err());
        assert!(ModelFile::from_json("{").is_err());
    }
}
