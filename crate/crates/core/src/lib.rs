//! Fits and diagnoses binary logistic regression models and mines
//! constrained association rules over clinical-style tabular data.
//!
//! The crate is organized around the analysis pipeline:
//!
//! - [`dataset`] — schema-validated CSV ingestion, target encoding,
//!   seeded train/test partitioning, under-sampling, cross-tabs and
//!   equal-width discretization.
//! - [`design`] — expansion of typed columns into a regression design
//!   matrix (indicator coding for categorical predictors).
//! - [`logit`] — maximum-likelihood logistic regression via
//!   Newton–Raphson / IRLS, with closed-form intercept-only fits, Wald
//!   statistics and probability prediction.
//! - [`diagnostics`] — classification tables, omnibus likelihood-ratio
//!   test, Cox & Snell / Nagelkerke pseudo-R², Hosmer–Lemeshow test,
//!   ROC AUC / GINI, per-predictor screening, and the chi-square tail
//!   probability underlying every p-value.
//! - [`rules`] — Apriori frequent-itemset mining and association-rule
//!   scoring (condition support, rule support, confidence, lift,
//!   deployability) under configurable constraints.
//! - [`report`] — report assembly and text/json/csv rendering.
//! - [`artifact`] — persistent model artifacts with atomic writes and
//!   bit-exact numeric round-trips.
//! - [`simulate`] — a seeded generator of clinical-style demo data.

pub mod artifact;
pub mod dataset;
pub mod design;
pub mod diagnostics;
pub mod error;
pub mod logit;
pub mod report;
pub mod rules;
pub mod simulate;

pub use artifact::{load_model, save_model, ModelArtifact};
pub use dataset::{
    discretize_equal_width, load_csv, partition, summarize_crosstab, undersample, BinningSpec,
    ColumnRole, ColumnSchema, CrossTab, Dataset, PartitionIndex,
};
pub use design::{expand_design, DesignColumn, DesignKind, DesignMatrix};
pub use diagnostics::{
    chi_square_survival, classification_table, hosmer_lemeshow, logistic_correlation_screen,
    omnibus_test, pseudo_r_squares, roc_auc_gini, ClassificationTable, PseudoR2, RocSummary,
    ScreenEntry, TestResult,
};
pub use error::{Error, Result};
pub use logit::{fit_intercept_only, fit_logit_irls, predict_prob, wald_statistics, LogitFit, WaldRow};
pub use report::{render_report, ReportDocument, ReportFormat};
pub use rules::{
    aggregate_rule_statistics, derive_rules, itemize_records, mine_frequent_itemsets, score_rule,
    select_rules, AssociationRule, Item, ItemCatalog, ItemKind, Itemset, MiningConfig,
    RuleAggregate, RuleMeasures, SortMeasure,
};
