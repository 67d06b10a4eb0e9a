//! Persistent model artifacts.
//!
//! A [`ModelArtifact`] captures everything needed to re-apply a fitted
//! model to new data: the schema (with observed levels), the design
//! column descriptors, coefficients and likelihoods, binning specs, the
//! mining configuration and the seeds of the run. Files are JSON written
//! atomically (temp file + rename); numeric fields round-trip bit-exactly.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{BinningSpec, ColumnSchema, Dataset};
use crate::design::{DesignColumn, DesignKind, DesignMatrix};
use crate::error::{Error, Result};
use crate::logit::LogitFit;
use crate::rules::MiningConfig;

pub const FORMAT_VERSION: u32 = 1;

/// One named coefficient with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
}

/// Serializable design-column descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignColumnSpec {
    pub name: String,
    pub source: Option<String>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<String>,
}

impl DesignColumnSpec {
    fn from_design(col: &DesignColumn) -> DesignColumnSpec {
        let (kind, level) = match &col.kind {
            DesignKind::Intercept => ("intercept", None),
            DesignKind::Continuous => ("continuous", None),
            DesignKind::Flag => ("flag", None),
            DesignKind::Indicator { level } => ("indicator", Some(level.clone())),
        };
        DesignColumnSpec {
            name: col.name.clone(),
            source: col.source.clone(),
            kind: kind.to_string(),
            level,
        }
    }
}

/// Seeds recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub partition: i64,
    pub undersample: i64,
}

/// A persisted fitted model plus the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub tool_version: String,
    pub schema_fingerprint: String,
    pub schema: Vec<ColumnSchema>,
    pub target_labels: (String, String),
    pub design_columns: Vec<DesignColumnSpec>,
    pub coefficients: Vec<CoefficientEntry>,
    pub neg2ll_null: f64,
    pub neg2ll_model: f64,
    pub n_used: usize,
    pub iterations: usize,
    pub converged: bool,
    pub binning: Vec<BinningSpec>,
    pub mining: MiningConfig,
    pub seeds: SeedRecord,
    pub train_fraction: f64,
}

/// Stable hash of (name, role, levels) per column.
pub fn schema_fingerprint(schema: &[ColumnSchema], levels: &[Vec<String>]) -> String {
    let mut hasher = Sha256::new();
    for (col, spec) in schema.iter().enumerate() {
        hasher.update(spec.name.as_bytes());
        hasher.update([0x1f]);
        hasher.update(spec.role.name().as_bytes());
        hasher.update([0x1f]);
        let level_list: &[String] = spec
            .declared_levels
            .as_deref()
            .unwrap_or_else(|| levels.get(col).map(|v| v.as_slice()).unwrap_or(&[]));
        for level in level_list {
            hasher.update(level.as_bytes());
            hasher.update([0x1e]);
        }
        hasher.update([0x1d]);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn dataset_fingerprint(ds: &Dataset) -> String {
    let levels: Vec<Vec<String>> = (0..ds.schema().len())
        .map(|c| ds.level_labels(c).to_vec())
        .collect();
    schema_fingerprint(ds.schema(), &levels)
}

impl ModelArtifact {
    /// Builds an artifact from a fit and the dataset it was fitted on.
    /// The stored schema declares the observed levels so new data loads
    /// with identical level codes.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fit(
        ds: &Dataset,
        design: &DesignMatrix,
        fit: &LogitFit,
        neg2ll_null: f64,
        binning: Vec<BinningSpec>,
        mining: MiningConfig,
        seeds: SeedRecord,
        train_fraction: f64,
    ) -> Result<ModelArtifact> {
        let (neg, pos) = ds.target_labels().ok_or(Error::TargetNotEncoded)?;
        let schema: Vec<ColumnSchema> = ds
            .schema()
            .iter()
            .enumerate()
            .map(|(c, spec)| {
                let mut pinned = spec.clone();
                if pinned.declared_levels.is_none() && !ds.level_labels(c).is_empty() {
                    pinned.declared_levels = Some(ds.level_labels(c).to_vec());
                }
                pinned
            })
            .collect();
        let coefficients = fit
            .column_names
            .iter()
            .zip(fit.coefficients.iter().zip(fit.std_errors.iter()))
            .map(|(name, (&value, &std_error))| CoefficientEntry {
                name: name.clone(),
                value,
                std_error,
            })
            .collect();
        Ok(ModelArtifact {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_fingerprint: dataset_fingerprint(ds),
            schema,
            target_labels: (neg.to_string(), pos.to_string()),
            design_columns: design.columns.iter().map(DesignColumnSpec::from_design).collect(),
            coefficients,
            neg2ll_null,
            neg2ll_model: fit.neg2_log_likelihood,
            n_used: fit.n_used,
            iterations: fit.iterations,
            converged: fit.converged,
            binning,
            mining,
            seeds,
            train_fraction,
        })
    }

    /// Checks the stored fingerprint against a dataset's schema.
    pub fn validate_against(&self, ds: &Dataset) -> Result<()> {
        let found = dataset_fingerprint(ds);
        if found != self.schema_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.schema_fingerprint.clone(),
                found,
            });
        }
        Ok(())
    }

    /// Rebuilds the design matrix on new data from the stored column
    /// descriptors. Rows with missing cells in any used column are
    /// dropped; the surviving dataset row indices come back alongside.
    pub fn design_for(&self, ds: &Dataset, indices: &[usize]) -> Result<(DMatrix<f64>, Vec<usize>)> {
        let mut sources = Vec::new();
        for spec in &self.design_columns {
            let col = match &spec.source {
                Some(name) => Some(ds.column_index(name)?),
                None => None,
            };
            sources.push(col);
        }
        let rows: Vec<usize> = indices
            .iter()
            .copied()
            .filter(|&r| sources.iter().flatten().all(|&c| ds.value(r, c).is_some()))
            .collect();
        if rows.is_empty() {
            return Err(Error::EmptyDesign);
        }
        let mut values = DMatrix::zeros(rows.len(), self.design_columns.len());
        for (j, spec) in self.design_columns.iter().enumerate() {
            for (i, &row) in rows.iter().enumerate() {
                values[(i, j)] = match spec.kind.as_str() {
                    "intercept" => 1.0,
                    "continuous" | "flag" => ds.value(row, sources[j].unwrap()).unwrap(),
                    "indicator" => {
                        let col = sources[j].unwrap();
                        let level = spec.level.as_deref().ok_or_else(|| {
                            Error::BadArgument(format!(
                                "indicator column '{}' lacks a level",
                                spec.name
                            ))
                        })?;
                        let code = ds.value(row, col).unwrap() as usize;
                        let label = ds.level_labels(col).get(code - 1).map(|s| s.as_str());
                        f64::from(label == Some(level))
                    }
                    other => {
                        return Err(Error::BadArgument(format!(
                            "unknown design column kind '{other}'"
                        )))
                    }
                };
            }
        }
        Ok((values, rows))
    }

    /// Coefficient vector in design-column order.
    pub fn coefficient_values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.value).collect()
    }

    fn check_finite(&self) -> Result<()> {
        for entry in &self.coefficients {
            if !entry.value.is_finite() {
                return Err(Error::NonFiniteField(format!("coefficient {}", entry.name)));
            }
            if !entry.std_error.is_finite() {
                return Err(Error::NonFiniteField(format!("std error {}", entry.name)));
            }
        }
        for (name, v) in [
            ("neg2ll_null", self.neg2ll_null),
            ("neg2ll_model", self.neg2ll_model),
            ("train_fraction", self.train_fraction),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFiniteField(name.to_string()));
            }
        }
        Ok(())
    }
}

/// Writes the artifact as pretty JSON, atomically: the bytes land in a
/// temp file in the target directory which is then renamed over `path`,
/// so a failed save never leaves a partial file.
pub fn save_model<P: AsRef<Path>>(artifact: &ModelArtifact, path: P) -> Result<()> {
    artifact.check_finite()?;
    let path = path.as_ref();
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut bytes = serde_json::to_vec_pretty(artifact)
        .map_err(|e| Error::BadArgument(format!("artifact serialization failed: {e}")))?;
    bytes.push(b'\n');
    let mut tmp = match parent {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(&bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Reads and validates an artifact. Parse failures report the byte
/// offset of the problem.
pub fn load_model<P: AsRef<Path>>(path: P) -> Result<ModelArtifact> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let artifact: ModelArtifact = serde_json::from_str(&text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let offset = text
            .lines()
            .take(line.saturating_sub(1))
            .map(|l| l.len() + 1)
            .sum::<usize>()
            + column.saturating_sub(1);
        Error::ArtifactParse {
            offset,
            line,
            column,
            message: e.to_string(),
        }
    })?;
    if artifact.format_version != FORMAT_VERSION {
        return Err(Error::ArtifactVersion {
            expected: FORMAT_VERSION,
            found: artifact.format_version,
        });
    }
    Ok(artifact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{load_csv, ColumnRole};
    use crate::design::expand_design;
    use crate::logit::{fit_intercept_only, fit_logit_irls, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
    use std::io::Write as _;

    fn toy_fit() -> (Dataset, DesignMatrix, LogitFit) {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("g", ColumnRole::Nominal),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(
            b"x,g,class\n0.1,a,0\n0.9,b,1\n-0.4,a,0\n1.6,b,1\n-1.2,c,0\n0.7,a,1\n0.3,c,0\n1.1,b,1\n",
        )
        .unwrap();
        f.flush().unwrap();
        let ds = load_csv(f.path(), &schema)
            .unwrap()
            .encode_target("1", "0")
            .unwrap();
        let all: Vec<usize> = (0..8).collect();
        let design = expand_design(&ds, &all, &[]).unwrap();
        let y = ds.target_vector(&design.row_indices).unwrap();
        let fit = fit_logit_irls(&design, &y, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        (ds, design, fit)
    }

    fn artifact_for(ds: &Dataset, design: &DesignMatrix, fit: &LogitFit) -> ModelArtifact {
        let y = ds.target_vector(&design.row_indices).unwrap();
        let (base, _) = fit_intercept_only(&y).unwrap();
        ModelArtifact::from_fit(
            ds,
            design,
            fit,
            base.neg2_log_likelihood,
            Vec::new(),
            MiningConfig::default(),
            SeedRecord {
                partition: 1,
                undersample: 2,
            },
            0.679,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&artifact, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(artifact, back);
        for (a, b) in artifact.coefficients.iter().zip(back.coefficients.iter()) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        }
        assert_eq!(
            artifact.neg2ll_model.to_bits(),
            back.neg2ll_model.to_bits()
        );
    }

    #[test]
    fn file_lists_one_pair_per_coefficient() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&artifact, &path).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let coefs = json["coefficients"].as_array().unwrap();
        assert_eq!(coefs.len(), design.n_params());
        assert!(coefs.iter().all(|c| c["name"].is_string() && c["value"].is_number()));
    }

    #[test]
    fn unwritable_location_leaves_no_partial_file() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        let missing_dir = std::path::Path::new("/nonexistent-dir-for-save/model.json");
        assert!(save_model(&artifact, missing_dir).is_err());
        assert!(!missing_dir.exists());
    }

    #[test]
    fn truncated_file_reports_byte_offset() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&artifact, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        match load_model(&path) {
            Err(Error::ArtifactParse { offset, .. }) => assert!(offset > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mutated_schema_changes_fingerprint() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        artifact.validate_against(&ds).unwrap();

        // same data, one renamed column
        let mut schema2 = ds.schema().to_vec();
        schema2[0].name = "x_renamed".to_string();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(
            b"x_renamed,g,class\n0.1,a,0\n0.9,b,1\n-0.4,a,0\n1.6,b,1\n-1.2,c,0\n0.7,a,1\n0.3,c,0\n1.1,b,1\n",
        )
        .unwrap();
        f.flush().unwrap();
        let ds2 = load_csv(f.path(), &schema2)
            .unwrap()
            .encode_target("1", "0")
            .unwrap();
        assert!(matches!(
            artifact.validate_against(&ds2),
            Err(Error::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn rebuilt_design_matches_original() {
        let (ds, design, fit) = toy_fit();
        let artifact = artifact_for(&ds, &design, &fit);
        let (values, rows) = artifact.design_for(&ds, &design.row_indices).unwrap();
        assert_eq!(rows, design.row_indices);
        assert_eq!(values, design.values);
    }

    #[test]
    fn non_finite_fields_are_refused() {
        let (ds, design, mut fit) = toy_fit();
        fit.std_errors[0] = f64::NAN;
        let artifact = artifact_for(&ds, &design, &fit);
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            save_model(&artifact, dir.path().join("m.json")),
            Err(Error::NonFiniteField(_))
        ));
    }

    #[test]
    fn wrong_format_version_is_rejected() {
        let (ds, design, fit) = toy_fit();
        let mut artifact = artifact_for(&ds, &design, &fit);
        artifact.format_version = 99;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        // bypass save-side validation by writing directly
        std::fs::write(&path, serde_json::to_string(&artifact).unwrap()).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ArtifactVersion { found: 99, .. })
        ));
    }
}
