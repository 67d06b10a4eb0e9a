//! Expansion of typed dataset columns into a numeric regression design.
//!
//! Continuous columns pass through, flags become a single 0/1 column and
//! nominal/ordinal columns with L observed levels expand to L−1 indicator
//! columns against the first observed level. The leading column is always
//! the intercept.

use nalgebra::DMatrix;

use crate::dataset::{ColumnRole, Dataset};
use crate::error::{Error, Result};

/// What a design column encodes.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignKind {
    Intercept,
    Continuous,
    /// Indicator for one level of a categorical column; the level is the
    /// original label, so the column can be rebuilt on new data.
    Indicator { level: String },
    Flag,
}

/// One column of the design matrix.
#[derive(Debug, Clone)]
pub struct DesignColumn {
    pub name: String,
    /// Schema column the design column derives from; `None` for the intercept.
    pub source: Option<String>,
    pub kind: DesignKind,
}

/// Numeric design matrix with a leading all-ones intercept column.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub values: DMatrix<f64>,
    pub columns: Vec<DesignColumn>,
    /// Dataset rows backing each matrix row, in order.
    pub row_indices: Vec<usize>,
    /// Rows dropped because a predictor cell was missing.
    pub n_missing_dropped: usize,
    /// Columns dropped for having a single observed value, with a reason.
    pub dropped: Vec<String>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    /// Number of columns including the intercept.
    pub fn n_params(&self) -> usize {
        self.values.ncols()
    }

    /// Model degrees of freedom (parameters beyond the intercept); this is
    /// the df the omnibus test uses.
    pub fn model_df(&self) -> usize {
        self.n_params() - 1
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }
}

/// Expands the predictors of `ds` over the given rows into a design
/// matrix. The target is excluded automatically; `exclude` removes further
/// columns by name. Rows with a missing cell in any used predictor are
/// dropped and counted. Categorical columns with a single observed level
/// (and constant continuous/flag columns) are dropped with a note rather
/// than an error.
pub fn expand_design(ds: &Dataset, indices: &[usize], exclude: &[String]) -> Result<DesignMatrix> {
    let used: Vec<usize> = ds
        .schema()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.role != ColumnRole::Target && !exclude.contains(&c.name))
        .map(|(i, _)| i)
        .collect();

    let rows: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&row| {
            used.iter().all(|&c| ds.value(row, c).is_some())
                && ds.value(row, ds.target_index()).is_some()
        })
        .collect();
    let n_missing_dropped = indices.len() - rows.len();
    if rows.is_empty() {
        return Err(Error::EmptyDesign);
    }

    let mut columns = vec![DesignColumn {
        name: "(Intercept)".to_string(),
        source: None,
        kind: DesignKind::Intercept,
    }];
    let mut data: Vec<Vec<f64>> = vec![vec![1.0; rows.len()]];
    let mut dropped = Vec::new();

    for &c in &used {
        let spec = &ds.schema()[c];
        let cells: Vec<f64> = rows.iter().map(|&r| ds.value(r, c).unwrap()).collect();
        match spec.role {
            ColumnRole::Continuous | ColumnRole::Flag => {
                let first = cells[0];
                if cells.iter().all(|&v| v == first) {
                    dropped.push(format!("{} (constant over the selected rows)", spec.name));
                    continue;
                }
                columns.push(DesignColumn {
                    name: spec.name.clone(),
                    source: Some(spec.name.clone()),
                    kind: if spec.role == ColumnRole::Flag {
                        DesignKind::Flag
                    } else {
                        DesignKind::Continuous
                    },
                });
                data.push(cells);
            }
            ColumnRole::Nominal | ColumnRole::Ordinal => {
                let mut observed: Vec<usize> = cells.iter().map(|&v| v as usize).collect();
                observed.sort_unstable();
                observed.dedup();
                if observed.len() < 2 {
                    dropped.push(format!("{} (single observed level)", spec.name));
                    continue;
                }
                // Reference level is the first observed one.
                for &code in &observed[1..] {
                    let label = ds.level_labels(c)[code - 1].clone();
                    columns.push(DesignColumn {
                        name: format!("{}={}", spec.name, label),
                        source: Some(spec.name.clone()),
                        kind: DesignKind::Indicator { level: label },
                    });
                    data.push(
                        cells
                            .iter()
                            .map(|&v| if v as usize == code { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
            ColumnRole::Target => unreachable!(),
        }
    }

    let values = DMatrix::from_fn(rows.len(), columns.len(), |r, c| data[c][r]);
    Ok(DesignMatrix {
        values,
        columns,
        row_indices: rows,
        n_missing_dropped,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{load_csv, ColumnSchema};
    use std::io::Write;

    fn dataset_from(contents: &str, schema: &[ColumnSchema]) -> Dataset {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        load_csv(f.path(), schema)
            .unwrap()
            .encode_target("1", "0")
            .unwrap()
    }

    #[test]
    fn flag_becomes_single_column() {
        let schema = vec![
            ColumnSchema::new("sym", ColumnRole::Flag),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("sym,class\n1,0\n0,1\n1,1\n", &schema);
        let d = expand_design(&ds, &[0, 1, 2], &[]).unwrap();
        assert_eq!(d.n_params(), 2);
        assert_eq!(d.columns[1].name, "sym");
        assert_eq!(d.values.column(1).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn three_level_nominal_gets_two_indicators_with_reference_first() {
        let schema = vec![
            ColumnSchema::new("g", ColumnRole::Nominal),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("g,class\n1,0\n2,1\n3,1\n1,0\n", &schema);
        let d = expand_design(&ds, &[0, 1, 2, 3], &[]).unwrap();
        assert_eq!(d.n_params(), 3);
        assert_eq!(d.columns[1].name, "g=2");
        assert_eq!(d.columns[2].name, "g=3");
        // level-1 rows map to (0, 0)
        assert_eq!(d.values[(0, 1)], 0.0);
        assert_eq!(d.values[(0, 2)], 0.0);
        assert_eq!(d.values[(1, 1)], 1.0);
        assert_eq!(d.values[(2, 2)], 1.0);
    }

    #[test]
    fn single_level_categorical_dropped_with_note() {
        let schema = vec![
            ColumnSchema::new("g", ColumnRole::Nominal),
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("g,x,class\n1,0.5,0\n1,1.5,1\n", &schema);
        let d = expand_design(&ds, &[0, 1], &[]).unwrap();
        assert_eq!(d.n_params(), 2); // intercept + x
        assert_eq!(d.dropped.len(), 1);
        assert!(d.dropped[0].contains("g"));
    }

    #[test]
    fn missing_predictor_rows_are_dropped_and_counted() {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("x,class\n1,0\n,1\n3,1\n", &schema);
        let d = expand_design(&ds, &[0, 1, 2], &[]).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.n_missing_dropped, 1);
        assert_eq!(d.row_indices, vec![0, 2]);
    }

    #[test]
    fn excluding_every_row_is_an_error() {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("x,class\n,0\n,1\n", &schema);
        assert!(matches!(
            expand_design(&ds, &[0, 1], &[]),
            Err(Error::EmptyDesign)
        ));
    }

    #[test]
    fn exclude_list_removes_columns() {
        let schema = vec![
            ColumnSchema::new("x", ColumnRole::Continuous),
            ColumnSchema::new("z", ColumnRole::Continuous),
            ColumnSchema::new("class", ColumnRole::Target),
        ];
        let ds = dataset_from("x,z,class\n1,9,0\n2,8,1\n", &schema);
        let d = expand_design(&ds, &[0, 1], &["z".to_string()]).unwrap();
        assert_eq!(d.column_names(), vec!["(Intercept)", "x"]);
    }
}
