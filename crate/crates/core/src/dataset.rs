//! Tabular dataset handling: schema validation, CSV ingestion, target
//! encoding, train/test partitioning, class balancing, cross-tabulation
//! and equal-width discretization.
//!
//! A [`Dataset`] is immutable after load; every operation here is a pure
//! function of its inputs plus an explicit seed, so values can be shared
//! freely across threads.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role a column plays in the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Continuous,
    Nominal,
    Ordinal,
    Flag,
    Target,
}

impl ColumnRole {
    pub fn is_categorical(self) -> bool {
        matches!(self, ColumnRole::Nominal | ColumnRole::Ordinal | ColumnRole::Flag)
    }

    pub fn name(self) -> &'static str {
        match self {
            ColumnRole::Continuous => "continuous",
            ColumnRole::Nominal => "nominal",
            ColumnRole::Ordinal => "ordinal",
            ColumnRole::Flag => "flag",
            ColumnRole::Target => "target",
        }
    }
}

/// Declared shape of one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub role: ColumnRole,
    /// Optional ordered level labels for nominal/ordinal/flag columns.
    /// When present, data values must be drawn from this list; level codes
    /// follow its order. Flags take exactly two labels (false, true).
    pub declared_levels: Option<Vec<String>>,
}

impl ColumnSchema {
    pub fn new(name: &str, role: ColumnRole) -> Self {
        ColumnSchema {
            name: name.to_string(),
            role,
            declared_levels: None,
        }
    }

    pub fn with_levels(name: &str, role: ColumnRole, levels: &[&str]) -> Self {
        ColumnSchema {
            name: name.to_string(),
            role,
            declared_levels: Some(levels.iter().map(|s| s.to_string()).collect()),
        }
    }
}

/// Validates a schema: exactly one target, unique names, well-formed levels.
pub fn validate_schema(schema: &[ColumnSchema]) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for col in schema {
        if !seen.insert(col.name.as_str()) {
            return Err(Error::DuplicateColumn(col.name.clone()));
        }
    }
    let targets: Vec<usize> = schema
        .iter()
        .enumerate()
        .filter(|(_, c)| c.role == ColumnRole::Target)
        .map(|(i, _)| i)
        .collect();
    if targets.len() != 1 {
        return Err(Error::TargetCount(targets.len()));
    }
    for col in schema {
        if let Some(levels) = &col.declared_levels {
            if !col.role.is_categorical() && col.role != ColumnRole::Target {
                return Err(Error::BadDeclaredLevels {
                    column: col.name.clone(),
                    reason: format!("levels are not allowed on a {} column", col.role.name()),
                });
            }
            if levels.is_empty() {
                return Err(Error::BadDeclaredLevels {
                    column: col.name.clone(),
                    reason: "level list is empty".to_string(),
                });
            }
            let distinct: BTreeSet<&String> = levels.iter().collect();
            if distinct.len() != levels.len() {
                return Err(Error::BadDeclaredLevels {
                    column: col.name.clone(),
                    reason: "level labels are not unique".to_string(),
                });
            }
            if col.role == ColumnRole::Flag && levels.len() != 2 {
                return Err(Error::BadDeclaredLevels {
                    column: col.name.clone(),
                    reason: format!("flag columns take exactly 2 labels, got {}", levels.len()),
                });
            }
        }
    }
    Ok(targets[0])
}

/// Typed tabular records. Cells are numeric after encoding; `None` marks a
/// missing value. Categorical cells hold level codes 1..=L; flags hold 0/1;
/// the target holds level codes until [`Dataset::encode_target`] rewrites
/// them to 0/1.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Vec<ColumnSchema>,
    /// Column-major cell storage: `cells[col][row]`.
    cells: Vec<Vec<Option<f64>>>,
    /// Per-column level label tables; code k maps to `levels[col][k-1]`.
    /// Empty for continuous columns and for flags without declared labels.
    levels: Vec<Vec<String>>,
    n_rows: usize,
    target_index: usize,
    /// Set by `encode_target`: (negative label, positive label).
    target_labels: Option<(String, String)>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn target_name(&self) -> &str {
        &self.schema[self.target_index].name
    }

    /// (negative, positive) labels once the target has been encoded.
    pub fn target_labels(&self) -> Option<(&str, &str)> {
        self.target_labels
            .as_ref()
            .map(|(n, p)| (n.as_str(), p.as_str()))
    }

    pub fn is_target_encoded(&self) -> bool {
        self.target_labels.is_some()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::NoSuchColumn(name.to_string()))
    }

    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[col][row]
    }

    pub fn column(&self, col: usize) -> &[Option<f64>] {
        &self.cells[col]
    }

    /// Observed level labels of a categorical column (code k ↔ index k-1).
    pub fn level_labels(&self, col: usize) -> &[String] {
        &self.levels[col]
    }

    /// Human-readable label for a cell, used by cross-tabs and itemization.
    pub fn cell_label(&self, row: usize, col: usize) -> Option<String> {
        let v = self.cells[col][row]?;
        let schema = &self.schema[col];
        match schema.role {
            ColumnRole::Continuous => Some(format_number(v)),
            ColumnRole::Flag => {
                let idx = if v == 0.0 { 0 } else { 1 };
                match &self.levels[col] {
                    labels if labels.len() == 2 => Some(labels[idx].clone()),
                    _ => Some(if idx == 0 { "0" } else { "1" }.to_string()),
                }
            }
            ColumnRole::Nominal | ColumnRole::Ordinal => {
                let code = v as usize;
                self.levels[col].get(code - 1).cloned()
            }
            ColumnRole::Target => {
                if let Some((neg, pos)) = &self.target_labels {
                    Some(if v == 0.0 { neg.clone() } else { pos.clone() })
                } else {
                    let code = v as usize;
                    self.levels[col].get(code - 1).cloned()
                }
            }
        }
    }

    /// Encoded target values for the given rows.
    pub fn target_vector(&self, indices: &[usize]) -> Result<Vec<f64>> {
        if !self.is_target_encoded() {
            return Err(Error::TargetNotEncoded);
        }
        indices
            .iter()
            .map(|&i| {
                self.cells[self.target_index][i].ok_or_else(|| {
                    Error::BadArgument(format!("target value missing at row {i}"))
                })
            })
            .collect()
    }

    /// Counts of target classes (0, 1) among the given rows.
    pub fn class_counts(&self, indices: &[usize]) -> Result<(usize, usize)> {
        let y = self.target_vector(indices)?;
        let n1 = y.iter().filter(|&&v| v == 1.0).count();
        Ok((y.len() - n1, n1))
    }

    /// Rows among `indices` with no missing cell in any non-excluded
    /// predictor column. The target must be present as well.
    pub fn complete_case_indices(&self, indices: &[usize], exclude: &[String]) -> Vec<usize> {
        indices
            .iter()
            .copied()
            .filter(|&row| {
                self.schema.iter().enumerate().all(|(col, spec)| {
                    if spec.role != ColumnRole::Target && exclude.contains(&spec.name) {
                        true
                    } else {
                        self.cells[col][row].is_some()
                    }
                })
            })
            .collect()
    }

    /// Recode the target column so `negative_label` becomes 0 and
    /// `positive_label` becomes 1. Both labels must occur and no other
    /// label (or missing cell) may be present.
    pub fn encode_target(&self, positive_label: &str, negative_label: &str) -> Result<Dataset> {
        let t = self.target_index;
        let mut offending = Vec::new();
        let mut new_values = Vec::with_capacity(self.n_rows);
        let mut saw_pos = false;
        let mut saw_neg = false;
        for row in 0..self.n_rows {
            let label = self.cell_label(row, t);
            match label.as_deref() {
                Some(l) if l == negative_label => {
                    saw_neg = true;
                    new_values.push(Some(0.0));
                }
                Some(l) if l == positive_label => {
                    saw_pos = true;
                    new_values.push(Some(1.0));
                }
                _ => {
                    offending.push(row);
                    new_values.push(None);
                }
            }
        }
        if !offending.is_empty() {
            return Err(Error::TargetLabelMismatch {
                column: self.target_name().to_string(),
                negative: negative_label.to_string(),
                positive: positive_label.to_string(),
                rows: offending,
            });
        }
        if !saw_neg {
            return Err(Error::TargetLabelAbsent(negative_label.to_string()));
        }
        if !saw_pos {
            return Err(Error::TargetLabelAbsent(positive_label.to_string()));
        }
        let mut out = self.clone();
        out.cells[t] = new_values;
        out.levels[t] = Vec::new();
        out.target_labels = Some((negative_label.to_string(), positive_label.to_string()));
        Ok(out)
    }
}

/// Renders a float the way cells were parsed, without trailing zeros noise.
fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Orders level labels numerically when every label parses as a number,
/// lexicographically otherwise. Ties broken by the label text.
fn sort_level_labels(labels: &mut Vec<String>) {
    let numeric: Option<Vec<f64>> = labels
        .iter()
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    match numeric {
        Some(values) => {
            let mut pairs: Vec<(f64, String)> =
                values.into_iter().zip(labels.iter().cloned()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            *labels = pairs.into_iter().map(|(_, s)| s).collect();
        }
        None => labels.sort(),
    }
}

fn parse_flag(raw: &str) -> Option<f64> {
    match raw.to_ascii_lowercase().as_str() {
        "0" | "false" | "f" | "no" => Some(0.0),
        "1" | "true" | "t" | "yes" => Some(1.0),
        _ => None,
    }
}

/// Loads a CSV file against a declared schema.
///
/// Dialect: comma separator, first row is the header, `.` decimal mark,
/// empty field = missing. Header names must match the schema names in
/// order. Categorical cells are encoded to consecutive integer codes
/// starting at 1; level order follows `declared_levels` when present,
/// otherwise the observed labels sorted numerically (falling back to
/// lexicographic order for non-numeric labels).
pub fn load_csv<P: AsRef<Path>>(path: P, schema: &[ColumnSchema]) -> Result<Dataset> {
    let target_index = validate_schema(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;

    let headers = reader.headers()?.clone();
    if headers.len() != schema.len() {
        return Err(Error::HeaderWidth {
            expected: schema.len(),
            found: headers.len(),
        });
    }
    for (i, (field, col)) in headers.iter().zip(schema.iter()).enumerate() {
        if field != col.name {
            return Err(Error::HeaderMismatch {
                position: i,
                expected: col.name.clone(),
                found: field.to_string(),
            });
        }
    }

    let mut records = Vec::new();
    for record in reader.records() {
        records.push(record?);
    }
    let n_rows = records.len();

    // First pass: collect observed levels for columns without declared ones.
    let mut levels: Vec<Vec<String>> = Vec::with_capacity(schema.len());
    for (col, spec) in schema.iter().enumerate() {
        match spec.role {
            ColumnRole::Continuous => levels.push(Vec::new()),
            ColumnRole::Flag => {
                levels.push(spec.declared_levels.clone().unwrap_or_default())
            }
            ColumnRole::Nominal | ColumnRole::Ordinal | ColumnRole::Target => {
                if let Some(declared) = &spec.declared_levels {
                    levels.push(declared.clone());
                } else {
                    let mut observed: Vec<String> = records
                        .iter()
                        .map(|r| r[col].to_string())
                        .filter(|s| !s.is_empty())
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    sort_level_labels(&mut observed);
                    levels.push(observed);
                }
            }
        }
    }

    // Second pass: parse cells per role.
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(n_rows); schema.len()];
    for (row, record) in records.iter().enumerate() {
        for (col, spec) in schema.iter().enumerate() {
            let raw = &record[col];
            if raw.is_empty() {
                cells[col].push(None);
                continue;
            }
            let parsed = match spec.role {
                ColumnRole::Continuous => {
                    let v: f64 = raw.parse().map_err(|_| Error::ParseCell {
                        row,
                        column: spec.name.clone(),
                        value: raw.to_string(),
                        expected: "number".to_string(),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::ParseCell {
                            row,
                            column: spec.name.clone(),
                            value: raw.to_string(),
                            expected: "finite number".to_string(),
                        });
                    }
                    v
                }
                ColumnRole::Flag => {
                    if levels[col].len() == 2 {
                        match levels[col].iter().position(|l| l == raw) {
                            Some(idx) => idx as f64,
                            None => {
                                return Err(Error::UnknownLevel {
                                    row,
                                    column: spec.name.clone(),
                                    value: raw.to_string(),
                                })
                            }
                        }
                    } else {
                        parse_flag(raw).ok_or_else(|| Error::ParseCell {
                            row,
                            column: spec.name.clone(),
                            value: raw.to_string(),
                            expected: "flag (0/1, true/false, yes/no)".to_string(),
                        })?
                    }
                }
                ColumnRole::Nominal | ColumnRole::Ordinal | ColumnRole::Target => {
                    match levels[col].iter().position(|l| l == raw) {
                        Some(idx) => (idx + 1) as f64,
                        None => {
                            return Err(Error::UnknownLevel {
                                row,
                                column: spec.name.clone(),
                                value: raw.to_string(),
                            })
                        }
                    }
                }
            };
            cells[col].push(Some(parsed));
        }
    }

    Ok(Dataset {
        schema: schema.to_vec(),
        cells,
        levels,
        n_rows,
        target_index,
        target_labels: None,
    })
}

/// Disjoint train/test row-index split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionIndex {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: i64,
}

/// Splits rows into train/test with `|train| = round(fraction × n)`,
/// rounding half up. The assignment is a uniform random permutation fully
/// determined by `seed`.
pub fn partition(ds: &Dataset, train_fraction: f64, seed: i64) -> Result<PartitionIndex> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadFraction(train_fraction));
    }
    let n = ds.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let n_train = (train_fraction * n as f64 + 0.5).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    order.shuffle(&mut rng);
    let mut train: Vec<usize> = order[..n_train].to_vec();
    let mut test: Vec<usize> = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(PartitionIndex {
        train_indices: train,
        test_indices: test,
        seed,
    })
}

/// Balances classes by discarding majority-class rows down to the minority
/// count. All minority rows are retained; the majority subset is sampled
/// without replacement under `seed`. Returns sorted row indices.
pub fn undersample(ds: &Dataset, indices: &[usize], seed: i64) -> Result<Vec<usize>> {
    let y = ds.target_vector(indices)?;
    let mut class0: Vec<usize> = Vec::new();
    let mut class1: Vec<usize> = Vec::new();
    for (&idx, &v) in indices.iter().zip(y.iter()) {
        if v == 0.0 {
            class0.push(idx);
        } else {
            class1.push(idx);
        }
    }
    if class0.is_empty() {
        return Err(Error::SingleClass("all rows are class 1".to_string()));
    }
    if class1.is_empty() {
        return Err(Error::SingleClass("all rows are class 0".to_string()));
    }
    let (minority, mut majority) = if class0.len() <= class1.len() {
        (class0, class1)
    } else {
        (class1, class0)
    };
    let m = minority.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    majority.shuffle(&mut rng);
    majority.truncate(m);
    let mut out = minority;
    out.extend(majority);
    out.sort_unstable();
    Ok(out)
}

/// One level row of a cross-tabulation against the binary target.
#[derive(Debug, Clone, Serialize)]
pub struct CrossTabRow {
    pub level: String,
    pub negative_count: usize,
    pub positive_count: usize,
    /// Percentages of the grand total.
    pub negative_pct: f64,
    pub positive_pct: f64,
}

/// Cross-tabulation of a column against the encoded target.
#[derive(Debug, Clone, Serialize)]
pub struct CrossTab {
    pub by: String,
    pub rows: Vec<CrossTabRow>,
    pub n_rows: usize,
}

/// Tabulates target counts per level of `by`. Continuous columns require a
/// [`BinningSpec`]; categorical columns must not pass one.
pub fn summarize_crosstab(ds: &Dataset, by: &str, bins: Option<&BinningSpec>) -> Result<CrossTab> {
    if !ds.is_target_encoded() {
        return Err(Error::TargetNotEncoded);
    }
    let col = ds.column_index(by)?;
    let role = ds.schema()[col].role;
    if role == ColumnRole::Target {
        return Err(Error::WrongRole(by.to_string(), "predictor"));
    }
    let labels: Vec<String> = match role {
        ColumnRole::Continuous => {
            let spec = bins.ok_or_else(|| Error::UnbinnedContinuous(by.to_string()))?;
            if spec.column != by {
                return Err(Error::BadArgument(format!(
                    "binning spec is for column '{}', not '{}'",
                    spec.column, by
                )));
            }
            (0..spec.k_bins).map(|b| spec.bin_label(b)).collect()
        }
        ColumnRole::Flag => {
            let declared = ds.level_labels(col);
            if declared.len() == 2 {
                declared.to_vec()
            } else {
                vec!["0".to_string(), "1".to_string()]
            }
        }
        _ => ds.level_labels(col).to_vec(),
    };

    let mut neg = vec![0usize; labels.len()];
    let mut pos = vec![0usize; labels.len()];
    let mut missing = (0usize, 0usize);
    for row in 0..ds.n_rows() {
        let is_pos = ds.value(row, ds.target_index()) == Some(1.0);
        let slot = match ds.value(row, col) {
            None => None,
            Some(v) => match role {
                ColumnRole::Continuous => Some(bins.unwrap().bin_index(v)),
                ColumnRole::Flag => Some(if v == 0.0 { 0 } else { 1 }),
                _ => Some(v as usize - 1),
            },
        };
        match slot {
            Some(s) => {
                if is_pos {
                    pos[s] += 1;
                } else {
                    neg[s] += 1;
                }
            }
            None => {
                if is_pos {
                    missing.1 += 1;
                } else {
                    missing.0 += 1;
                }
            }
        }
    }

    let total = ds.n_rows() as f64;
    let mut rows: Vec<CrossTabRow> = labels
        .into_iter()
        .enumerate()
        .map(|(i, level)| CrossTabRow {
            level,
            negative_count: neg[i],
            positive_count: pos[i],
            negative_pct: 100.0 * neg[i] as f64 / total,
            positive_pct: 100.0 * pos[i] as f64 / total,
        })
        .collect();
    if missing.0 + missing.1 > 0 {
        rows.push(CrossTabRow {
            level: "(missing)".to_string(),
            negative_count: missing.0,
            positive_count: missing.1,
            negative_pct: 100.0 * missing.0 as f64 / total,
            positive_pct: 100.0 * missing.1 as f64 / total,
        });
    }
    Ok(CrossTab {
        by: by.to_string(),
        rows,
        n_rows: ds.n_rows(),
    })
}

/// Equal-width binning of a continuous column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub column: String,
    pub k_bins: usize,
    /// k_bins + 1 strictly increasing edges; edges[0] and edges[k] are the
    /// fitted column min and max.
    pub edges: Vec<f64>,
}

impl BinningSpec {
    /// Bin membership: lower-inclusive, upper-exclusive, except the final
    /// bin which includes the maximum. Out-of-range values clamp to the
    /// nearest bin.
    pub fn bin_index(&self, v: f64) -> usize {
        let k = self.k_bins;
        for b in (0..k).rev() {
            if v >= self.edges[b] {
                return b.min(k - 1);
            }
        }
        0
    }

    /// Label rendered as `lo ≤ name < hi` with three decimals.
    pub fn bin_label(&self, bin: usize) -> String {
        format!(
            "{:.3} ≤ {} < {:.3}",
            self.edges[bin],
            self.column,
            self.edges[bin + 1]
        )
    }
}

/// Splits the observed [min, max] of a continuous column into `k_bins`
/// equal-width intervals.
pub fn discretize_equal_width(ds: &Dataset, column: &str, k_bins: usize) -> Result<BinningSpec> {
    if k_bins < 2 {
        return Err(Error::BadBinCount(k_bins));
    }
    let col = ds.column_index(column)?;
    if ds.schema()[col].role != ColumnRole::Continuous {
        return Err(Error::WrongRole(column.to_string(), "continuous"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut distinct = BTreeSet::new();
    for v in ds.column(col).iter().flatten() {
        min = min.min(*v);
        max = max.max(*v);
        if distinct.len() < 2 {
            distinct.insert(v.to_bits());
        }
    }
    if distinct.len() < 2 {
        return Err(Error::DegenerateColumn(column.to_string()));
    }
    let width = (max - min) / k_bins as f64;
    let mut edges: Vec<f64> = (0..=k_bins).map(|i| min + i as f64 * width).collect();
    edges[k_bins] = max;
    Ok(BinningSpec {
        column: column.to_string(),
        k_bins,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    fn toy_schema() -> Vec<ColumnSchema> {
        vec![
            ColumnSchema::new("age", ColumnRole::Continuous),
            ColumnSchema::new("city", ColumnRole::Nominal),
            ColumnSchema::new("dyspnoea", ColumnRole::Flag),
            ColumnSchema::new("class", ColumnRole::Target),
        ]
    }

    fn toy_dataset() -> Dataset {
        let f = write_csv(
            "age,city,dyspnoea,class\n\
             30,0,1,Healthy\n\
             41,2,0,Mesothelioma\n\
             55,1,1,Mesothelioma\n\
             62,0,0,Healthy\n",
        );
        load_csv(f.path(), &toy_schema()).unwrap()
    }

    #[test]
    fn loads_rows_and_encodes_levels() {
        let ds = toy_dataset();
        assert_eq!(ds.n_rows(), 4);
        // city levels sorted numerically: 0,1,2 -> codes 1,2,3
        assert_eq!(ds.level_labels(1), &["0", "1", "2"]);
        assert_eq!(ds.value(1, 1), Some(3.0)); // city "2"
        assert_eq!(ds.value(2, 2), Some(1.0)); // dyspnoea true
    }

    #[test]
    fn empty_file_with_header_loads_zero_rows() {
        let f = write_csv("age,city,dyspnoea,class\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        assert_eq!(ds.n_rows(), 0);
    }

    #[test]
    fn unparseable_continuous_cell_names_row_and_column() {
        let f = write_csv("age,city,dyspnoea,class\nabc,0,1,Healthy\n");
        let err = load_csv(f.path(), &toy_schema()).unwrap_err();
        match err {
            Error::ParseCell { row, column, value, .. } => {
                assert_eq!(row, 0);
                assert_eq!(column, "age");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn header_mismatch_is_reported() {
        let f = write_csv("age,town,dyspnoea,class\n");
        let err = load_csv(f.path(), &toy_schema()).unwrap_err();
        assert!(matches!(err, Error::HeaderMismatch { position: 1, .. }));
    }

    #[test]
    fn duplicate_schema_column_rejected() {
        let mut schema = toy_schema();
        schema[1].name = "age".to_string();
        let f = write_csv("age,age,dyspnoea,class\n");
        let err = load_csv(f.path(), &schema).unwrap_err();
        assert!(matches!(err, Error::DuplicateColumn(_)));
    }

    #[test]
    fn schema_requires_exactly_one_target() {
        let schema = vec![ColumnSchema::new("a", ColumnRole::Continuous)];
        assert!(matches!(validate_schema(&schema), Err(Error::TargetCount(0))));
    }

    #[test]
    fn missing_cells_are_flagged() {
        let f = write_csv("age,city,dyspnoea,class\n,0,1,Healthy\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        assert_eq!(ds.value(0, 0), None);
        assert_eq!(ds.complete_case_indices(&[0], &[]), Vec::<usize>::new());
        assert_eq!(
            ds.complete_case_indices(&[0], &["age".to_string()]),
            vec![0]
        );
    }

    #[test]
    fn encode_target_recode_matches_paper_direction() {
        let ds = toy_dataset().encode_target("Mesothelioma", "Healthy").unwrap();
        assert_eq!(ds.value(0, 3), Some(0.0));
        assert_eq!(ds.value(1, 3), Some(1.0));
        assert_eq!(ds.target_labels(), Some(("Healthy", "Mesothelioma")));
    }

    #[test]
    fn encode_target_zero_one_identity_twice() {
        let f = write_csv("age,city,dyspnoea,class\n30,0,1,0\n41,1,0,1\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        let once = ds.encode_target("1", "0").unwrap();
        let twice = once.encode_target("1", "0").unwrap();
        for row in 0..ds.n_rows() {
            assert_eq!(once.value(row, 3), twice.value(row, 3));
        }
        assert_eq!(once.value(0, 3), Some(0.0));
        assert_eq!(once.value(1, 3), Some(1.0));
    }

    #[test]
    fn encode_target_third_label_lists_rows() {
        let f = write_csv(
            "age,city,dyspnoea,class\n30,0,1,Healthy\n41,1,0,Unknown\n50,0,0,Mesothelioma\n",
        );
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        let err = ds.encode_target("Mesothelioma", "Healthy").unwrap_err();
        match err {
            Error::TargetLabelMismatch { rows, .. } => assert_eq!(rows, vec![1]),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn encode_target_absent_label_is_error() {
        let f = write_csv("age,city,dyspnoea,class\n30,0,1,Healthy\n41,1,0,Healthy\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        let err = ds.encode_target("Mesothelioma", "Healthy").unwrap_err();
        assert!(matches!(err, Error::TargetLabelAbsent(_)));
    }

    #[test]
    fn partition_reproduces_table_sizes() {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let mut csv = String::from("x,class\n");
        for i in 0..324 {
            csv.push_str(&format!("{i},{}\n", if i % 3 == 0 { "1" } else { "0" }));
        }
        let f = write_csv(&csv);
        let ds = load_csv(f.path(), &schema).unwrap();
        for seed in [0, 1, 42, 20181106] {
            let p = partition(&ds, 0.679, seed).unwrap();
            assert_eq!(p.train_indices.len(), 220);
            assert_eq!(p.test_indices.len(), 104);
        }
    }

    #[test]
    fn partition_is_deterministic_and_seed_sensitive() {
        let ds = toy_dataset();
        let a = partition(&ds, 0.5, 7).unwrap();
        let b = partition(&ds, 0.5, 7).unwrap();
        assert_eq!(a, b);
        // different seeds give different index sets somewhere over a few tries
        let others: Vec<_> = (0..8).map(|s| partition(&ds, 0.5, s).unwrap()).collect();
        assert!(others.iter().any(|p| p.train_indices != a.train_indices));
        assert!(others.iter().all(|p| p.train_indices.len() == 2));
    }

    #[test]
    fn partition_rejects_tiny_or_degenerate_input() {
        let f = write_csv("age,city,dyspnoea,class\n30,0,1,Healthy\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        assert!(matches!(
            partition(&ds, 0.5, 0),
            Err(Error::TooFewRows { .. })
        ));
        let ds4 = toy_dataset();
        assert!(matches!(partition(&ds4, 0.0, 0), Err(Error::BadFraction(_))));
        assert!(matches!(partition(&ds4, 1.0, 0), Err(Error::BadFraction(_))));
    }

    fn labelled_dataset(n0: usize, n1: usize) -> Dataset {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let mut csv = String::from("x,class\n");
        for i in 0..n0 {
            csv.push_str(&format!("{i},0\n"));
        }
        for i in 0..n1 {
            csv.push_str(&format!("{},1\n", n0 + i));
        }
        let f = write_csv(&csv);
        load_csv(f.path(), &schema)
            .unwrap()
            .encode_target("1", "0")
            .unwrap()
    }

    #[test]
    fn undersample_balances_to_minority_count() {
        let ds = labelled_dataset(159, 61);
        let all: Vec<usize> = (0..ds.n_rows()).collect();
        let kept = undersample(&ds, &all, 3).unwrap();
        let (n0, n1) = ds.class_counts(&kept).unwrap();
        assert_eq!((n0, n1), (61, 61));
        // every minority row retained
        for row in 159..220 {
            assert!(kept.contains(&row));
        }
    }

    #[test]
    fn undersample_identity_when_balanced() {
        let ds = labelled_dataset(50, 50);
        let all: Vec<usize> = (0..100).collect();
        let kept = undersample(&ds, &all, 9).unwrap();
        assert_eq!(kept, all);
    }

    #[test]
    fn undersample_single_class_is_error() {
        let ds = labelled_dataset(10, 5);
        let only0: Vec<usize> = (0..10).collect();
        assert!(matches!(
            undersample(&ds, &only0, 1),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn crosstab_city_percentages_match_construction() {
        // City 0 carries 22 healthy / 9 positive out of 100 records.
        let schema = vec![
            ColumnSchema::new("city", ColumnRole::Nominal),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let mut csv = String::from("city,class\n");
        for _ in 0..22 {
            csv.push_str("0,0\n");
        }
        for _ in 0..9 {
            csv.push_str("0,1\n");
        }
        for i in 0..69 {
            csv.push_str(&format!("1,{}\n", if i < 40 { "0" } else { "1" }));
        }
        let f = write_csv(&csv);
        let ds = load_csv(f.path(), &schema)
            .unwrap()
            .encode_target("1", "0")
            .unwrap();
        let tab = summarize_crosstab(&ds, "city", None).unwrap();
        assert_eq!(tab.rows[0].negative_count, 22);
        assert_eq!(tab.rows[0].positive_count, 9);
        assert!((tab.rows[0].negative_pct - 22.0).abs() < 1e-12);
        assert!((tab.rows[0].positive_pct - 9.0).abs() < 1e-12);
        let total: usize = tab
            .rows
            .iter()
            .map(|r| r.negative_count + r.positive_count)
            .sum();
        assert_eq!(total, ds.n_rows());
        let pct: f64 = tab.rows.iter().map(|r| r.negative_pct + r.positive_pct).sum();
        assert!((pct - 100.0).abs() < 1e-9);
    }

    #[test]
    fn crosstab_single_level_column_is_total() {
        let schema = vec![
            ColumnSchema::new("g", ColumnRole::Nominal),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let f = write_csv("g,class\na,0\na,1\na,0\n");
        let ds = load_csv(f.path(), &schema)
            .unwrap()
            .encode_target("1", "0")
            .unwrap();
        let tab = summarize_crosstab(&ds, "g", None).unwrap();
        assert_eq!(tab.rows.len(), 1);
        assert!((tab.rows[0].negative_pct + tab.rows[0].positive_pct - 100.0).abs() < 1e-12);
    }

    #[test]
    fn crosstab_continuous_without_bins_is_error() {
        let ds = toy_dataset().encode_target("Mesothelioma", "Healthy").unwrap();
        assert!(matches!(
            summarize_crosstab(&ds, "age", None),
            Err(Error::UnbinnedContinuous(_))
        ));
    }

    #[test]
    fn equal_width_edges_and_membership() {
        let schema = vec![
            ColumnSchema::new("v", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let mut csv = String::from("v,class\n0,0\n10,1\n3.9,0\n4.0,1\n");
        csv.push_str("7.2,0\n");
        let f = write_csv(&csv);
        let ds = load_csv(f.path(), &schema).unwrap();
        let spec = discretize_equal_width(&ds, "v", 5).unwrap();
        assert_eq!(spec.edges, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(spec.bin_index(3.9), 1); // [2,4)
        assert_eq!(spec.bin_index(4.0), 2); // lower-inclusive edge
        assert_eq!(spec.bin_index(10.0), 4); // max goes to the last bin
        assert_eq!(spec.bin_label(1), "2.000 ≤ v < 4.000");
    }

    #[test]
    fn equal_width_rejects_constant_or_bad_k() {
        let schema = vec![
            ColumnSchema::new("v", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let f = write_csv("v,class\n5,0\n5,1\n");
        let ds = load_csv(f.path(), &schema).unwrap();
        assert!(matches!(
            discretize_equal_width(&ds, "v", 5),
            Err(Error::DegenerateColumn(_))
        ));
        assert!(matches!(
            discretize_equal_width(&ds, "v", 1),
            Err(Error::BadBinCount(1))
        ));
    }

    #[test]
    fn flag_accepts_text_variants() {
        let f = write_csv("age,city,dyspnoea,class\n30,0,true,0\n31,0,No,1\n");
        let ds = load_csv(f.path(), &toy_schema()).unwrap();
        assert_eq!(ds.value(0, 2), Some(1.0));
        assert_eq!(ds.value(1, 2), Some(0.0));
    }
}
