//! Report assembly and rendering.
//!
//! A [`ReportDocument`] is an ordered list of titled tables whose cells
//! carry both the full-precision value and the string rendered for
//! display. Rendering is a pure function of the document, so identical
//! documents produce byte-identical output in every format.

use serde::Serialize;

use crate::dataset::CrossTab;
use crate::diagnostics::{ClassificationTable, PseudoR2, RocSummary, TestResult};
use crate::error::{Error, Result};
use crate::logit::WaldRow;
use crate::rules::{AssociationRule, MeasureStats, RuleAggregate};

/// Output encodings of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Underlying value of a report cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CellValue {
    Text(String),
    Int(i64),
    Num(f64),
}

/// One table cell: full-precision value plus its rendered form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub value: CellValue,
    pub rendered: String,
}

impl Cell {
    pub fn text<S: Into<String>>(s: S) -> Cell {
        let s = s.into();
        Cell {
            rendered: s.clone(),
            value: CellValue::Text(s),
        }
    }

    pub fn count(n: usize) -> Cell {
        Cell {
            value: CellValue::Int(n as i64),
            rendered: n.to_string(),
        }
    }

    /// Percentage rendered the way the source tables print them: rounded
    /// to one decimal, displayed with two ("72.30%" from 72.2727…).
    pub fn pct(v: f64) -> Cell {
        let rounded = (v * 10.0).round() / 10.0;
        Cell {
            value: CellValue::Num(v),
            rendered: format!("{rounded:.2}%"),
        }
    }

    /// Coefficient-style number at three decimals.
    pub fn coef(v: f64) -> Cell {
        Cell {
            value: CellValue::Num(v),
            rendered: format!("{v:.3}"),
        }
    }

    /// p-value at three decimals with a "< 0.001" floor.
    pub fn pvalue(v: f64) -> Cell {
        Cell {
            value: CellValue::Num(v),
            rendered: if v < 0.001 {
                "< 0.001".to_string()
            } else {
                format!("{v:.3}")
            },
        }
    }

    /// Rule-measure number at exactly two decimals (no percent sign).
    pub fn measure(v: f64) -> Cell {
        Cell {
            value: CellValue::Num(v),
            rendered: format!("{v:.2}"),
        }
    }
}

/// One titled table of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSection {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl TableSection {
    pub fn new(title: &str, headers: &[&str]) -> TableSection {
        TableSection {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

/// The full analysis report: a fixed sequence of sections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub sections: Vec<TableSection>,
}

/// Everything the report assembler needs. Rule fields are optional so a
/// fit-only report can still be assembled.
pub struct ReportInputs<'a> {
    pub included: usize,
    pub missing: usize,
    pub unselected: usize,
    pub target_encoding: (&'a str, &'a str),
    pub baseline_table: &'a ClassificationTable,
    pub baseline_wald: &'a WaldRow,
    pub omnibus: &'a TestResult,
    pub model_summary: &'a PseudoR2,
    pub model_iterations: usize,
    pub hosmer_lemeshow: &'a TestResult,
    pub train_table: &'a ClassificationTable,
    pub test_table: &'a ClassificationTable,
    pub train_roc: &'a RocSummary,
    pub test_roc: &'a RocSummary,
    pub rule_aggregate: Option<&'a RuleAggregate>,
    pub top_rules: &'a [AssociationRule],
    pub mining_records: usize,
}

fn classification_section(title: &str, table: &ClassificationTable) -> TableSection {
    let mut s = TableSection::new(title, &["Observed", "Predicted 0", "Predicted 1", "Percentage correct"]);
    s.push(vec![
        Cell::text("0"),
        Cell::count(table.true_negative),
        Cell::count(table.false_positive),
        Cell::pct(table.class0_pct),
    ]);
    s.push(vec![
        Cell::text("1"),
        Cell::count(table.false_negative),
        Cell::count(table.true_positive),
        Cell::pct(table.class1_pct),
    ]);
    s.push(vec![
        Cell::text("Overall Percentage"),
        Cell::text(""),
        Cell::text(""),
        Cell::pct(table.overall_pct),
    ]);
    s
}

fn measure_row(name: &str, stats: &MeasureStats) -> Vec<Cell> {
    vec![
        Cell::text(name),
        Cell::measure(stats.min),
        Cell::measure(stats.max),
        Cell::measure(stats.mean),
        Cell::measure(stats.std),
    ]
}

/// Assembles the report sections in their fixed order.
pub fn build_document(inputs: &ReportInputs<'_>) -> ReportDocument {
    let mut sections = Vec::new();

    let selected = inputs.included + inputs.missing;
    let total = selected + inputs.unselected;
    let pct_of = |n: usize, d: usize| {
        if d == 0 {
            0.0
        } else {
            100.0 * n as f64 / d as f64
        }
    };
    let mut case = TableSection::new("Case processing summary", &["Unweighted cases", "N", "Percent"]);
    case.push(vec![
        Cell::text("Selected cases: included in analysis"),
        Cell::count(inputs.included),
        Cell::pct(pct_of(inputs.included, selected)),
    ]);
    case.push(vec![
        Cell::text("Selected cases: missing"),
        Cell::count(inputs.missing),
        Cell::pct(pct_of(inputs.missing, selected)),
    ]);
    case.push(vec![
        Cell::text("Selected cases: total"),
        Cell::count(selected),
        Cell::pct(100.0),
    ]);
    case.push(vec![
        Cell::text("Unselected cases"),
        Cell::count(inputs.unselected),
        Cell::pct(pct_of(inputs.unselected, total)),
    ]);
    case.push(vec![
        Cell::text("Total"),
        Cell::count(total),
        Cell::pct(100.0),
    ]);
    sections.push(case);

    let mut enc = TableSection::new("Dependent variable encoding", &["Original value", "Internal value"]);
    enc.push(vec![Cell::text(inputs.target_encoding.0), Cell::count(0)]);
    enc.push(vec![Cell::text(inputs.target_encoding.1), Cell::count(1)]);
    sections.push(enc);

    sections.push(classification_section(
        "Classification table of the baseline model",
        inputs.baseline_table,
    ));

    let mut wald = TableSection::new(
        "Variables in the equation",
        &["", "B", "S.E.", "Wald", "df", "Sig.", "Exp(B)"],
    );
    let w = inputs.baseline_wald;
    wald.push(vec![
        Cell::text(&w.name),
        Cell::coef(w.b),
        Cell::coef(w.se),
        Cell::coef(w.wald),
        Cell::count(w.df),
        Cell::pvalue(w.sig),
        Cell::coef(w.exp_b),
    ]);
    sections.push(wald);

    let mut omni = TableSection::new(
        "Omnibus test of model coefficients",
        &["", "Chi-square", "df", "Sig."],
    );
    for label in ["Step", "Block", "Model"] {
        omni.push(vec![
            Cell::text(label),
            Cell::coef(inputs.omnibus.statistic),
            Cell::count(inputs.omnibus.df),
            Cell::pvalue(inputs.omnibus.sig),
        ]);
    }
    sections.push(omni);

    let mut summary = TableSection::new(
        "Model summary",
        &["-2 Log likelihood", "Cox and Snell R Square", "Nagelkerke R Square", "Iterations"],
    );
    summary.push(vec![
        Cell::coef(inputs.model_summary.neg2ll_model),
        Cell::coef(inputs.model_summary.cox_snell),
        Cell::coef(inputs.model_summary.nagelkerke),
        Cell::count(inputs.model_iterations),
    ]);
    sections.push(summary);

    let mut hl = TableSection::new("Hosmer and Lemeshow test", &["Chi-square", "df", "Sig."]);
    hl.push(vec![
        Cell::coef(inputs.hosmer_lemeshow.statistic),
        Cell::count(inputs.hosmer_lemeshow.df),
        Cell::pvalue(inputs.hosmer_lemeshow.sig),
    ]);
    sections.push(hl);

    sections.push(classification_section(
        "Classification table of the new model (training)",
        inputs.train_table,
    ));

    let mut cmp = TableSection::new(
        "Comparing training and testing classification accuracy",
        &["Partition", "Correct", "Correct %", "Wrong", "Wrong %", "Total"],
    );
    for (label, table) in [("Training", inputs.train_table), ("Testing", inputs.test_table)] {
        let n = table.n();
        let correct = table.correct();
        cmp.push(vec![
            Cell::text(label),
            Cell::count(correct),
            Cell::pct(100.0 * correct as f64 / n as f64),
            Cell::count(n - correct),
            Cell::pct(100.0 * (n - correct) as f64 / n as f64),
            Cell::count(n),
        ]);
    }
    sections.push(cmp);

    let mut eval = TableSection::new("Evaluation matrix", &["Partition", "AUC", "GINI"]);
    for (label, roc) in [("Training", inputs.train_roc), ("Testing", inputs.test_roc)] {
        eval.push(vec![
            Cell::text(label),
            Cell::coef(roc.auc),
            Cell::coef(roc.gini),
        ]);
    }
    sections.push(eval);

    let mut stats = TableSection::new(
        "Rule statistics",
        &["Measurements", "Minimum", "Maximum", "Mean", "Standard deviation"],
    );
    match inputs.rule_aggregate {
        Some(agg) => {
            stats.push(measure_row("Condition Support (%)", &agg.condition_support));
            stats.push(measure_row("Confidence (%)", &agg.confidence));
            stats.push(measure_row("Rule Support (%)", &agg.rule_support));
            stats.push(measure_row("Lift", &agg.lift));
            stats.push(measure_row("Deployability (%)", &agg.deployability));
            stats.push(vec![
                Cell::text("Number of Rules"),
                Cell::count(agg.n_rules),
                Cell::text(""),
                Cell::text(""),
                Cell::text(""),
            ]);
            stats.push(vec![
                Cell::text("Valid Events Data Source Records"),
                Cell::count(agg.n_records),
                Cell::text(""),
                Cell::text(""),
                Cell::text(""),
            ]);
        }
        None => stats.push(vec![
            Cell::text("no rules met constraints"),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
        ]),
    }
    sections.push(stats);

    let mut top = TableSection::new(
        "Top association rules sorted by confidence",
        &[
            "Condition",
            "Pred.",
            "Confidence (%)",
            "Condition Support (%)",
            "Rule Support (%)",
            "Lift",
            "Deployability (%)",
        ],
    );
    if inputs.top_rules.is_empty() {
        top.push(vec![
            Cell::text("no rules met constraints"),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
            Cell::text(""),
        ]);
    } else {
        for rule in inputs.top_rules {
            top.push(vec![
                Cell::text(&rule.condition_label),
                Cell::text(&rule.prediction_label),
                Cell::measure(rule.confidence_pct),
                Cell::measure(rule.condition_support_pct),
                Cell::measure(rule.rule_support_pct),
                Cell::measure(rule.lift),
                Cell::measure(rule.deployability_pct),
            ]);
        }
    }
    sections.push(top);
    let _ = inputs.mining_records;

    ReportDocument { sections }
}

/// Renders one table as aligned text with the title on top.
pub fn render_table_text(section: &TableSection, out: &mut String) {
    let mut widths: Vec<usize> = section.headers.iter().map(|h| h.chars().count()).collect();
    for row in &section.rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.rendered.chars().count());
        }
    }
    out.push_str(&section.title);
    out.push('\n');
    let line: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(line));
    out.push('\n');
    let write_row = |cells: Vec<&str>, out: &mut String| {
        let mut first = true;
        for (i, text) in cells.iter().enumerate() {
            if !first {
                out.push_str("  ");
            }
            first = false;
            out.push_str(text);
            let pad = widths[i].saturating_sub(text.chars().count());
            if i + 1 < cells.len() {
                out.push_str(&" ".repeat(pad));
            }
        }
        out.push('\n');
    };
    write_row(section.headers.iter().map(|h| h.as_str()).collect(), out);
    for row in &section.rows {
        write_row(row.iter().map(|c| c.rendered.as_str()).collect(), out);
    }
}

/// Renders the document to bytes in the requested format.
///
/// Text aligns each table; json nests sections by name with both the
/// full-precision value and the rendered string per cell; csv emits one
/// file-section per table separated by blank lines.
pub fn render_report(doc: &ReportDocument, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Text => {
            let mut out = String::new();
            for (i, section) in doc.sections.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                render_table_text(section, &mut out);
            }
            Ok(out.into_bytes())
        }
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(doc)
                .map_err(|e| Error::BadArgument(format!("json render failed: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => {
            let mut out = Vec::new();
            for (i, section) in doc.sections.iter().enumerate() {
                if i > 0 {
                    out.push(b'\n');
                }
                out.extend_from_slice(format!("# {}\n", section.title).as_bytes());
                let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
                writer
                    .write_record(&section.headers)
                    .and_then(|_| {
                        for row in &section.rows {
                            writer.write_record(row.iter().map(|c| c.rendered.as_str()))?;
                        }
                        Ok(())
                    })
                    .map_err(Error::Csv)?;
                let inner = writer
                    .into_inner()
                    .map_err(|e| Error::BadArgument(format!("csv render failed: {e}")))?;
                out.extend_from_slice(&inner);
            }
            Ok(out)
        }
    }
}

/// Renders a cross-tabulation as an aligned text table.
pub fn render_crosstab_text(tab: &CrossTab) -> String {
    let mut section = TableSection::new(
        &format!("Cross-tabulation of {} by outcome", tab.by),
        &[&tab.by, "Negative", "Positive", "Negative %", "Positive %"],
    );
    for row in &tab.rows {
        section.push(vec![
            Cell::text(&row.level),
            Cell::count(row.negative_count),
            Cell::count(row.positive_count),
            Cell::pct(row.negative_pct),
            Cell::pct(row.positive_pct),
        ]);
    }
    let mut out = String::new();
    render_table_text(&section, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::classification_table;

    fn baseline_inputs<'a>(
        table: &'a ClassificationTable,
        wald: &'a WaldRow,
        omnibus: &'a TestResult,
        summary: &'a PseudoR2,
        hl: &'a TestResult,
        roc: &'a RocSummary,
    ) -> ReportInputs<'a> {
        ReportInputs {
            included: 220,
            missing: 0,
            unselected: 104,
            target_encoding: ("Healthy", "Mesothelioma"),
            baseline_table: table,
            baseline_wald: wald,
            omnibus,
            model_summary: summary,
            model_iterations: 8,
            hosmer_lemeshow: hl,
            train_table: table,
            test_table: table,
            train_roc: roc,
            test_roc: roc,
            rule_aggregate: None,
            top_rules: &[],
            mining_records: 220,
        }
    }

    #[test]
    fn baseline_section_renders_published_percentage() {
        let mut y = vec![0.0; 159];
        y.extend(vec![1.0; 61]);
        let probs = vec![61.0 / 220.0; 220];
        let table = classification_table(&probs, &y, 0.5).unwrap();
        let wald = WaldRow {
            name: "Constant".into(),
            b: -0.958,
            se: 0.151,
            wald: 40.463,
            df: 1,
            sig: 2e-10,
            exp_b: 0.384,
        };
        let omnibus = TestResult {
            statistic: 78.919,
            df: 43,
            sig: 0.000_687,
        };
        let summary = PseudoR2 {
            neg2ll_model: 180.838,
            cox_snell: 0.301,
            nagelkerke: 0.435,
        };
        let hl = TestResult {
            statistic: 6.312,
            df: 8,
            sig: 0.612,
        };
        let roc = RocSummary::from_auc(0.844);
        let doc = build_document(&baseline_inputs(&table, &wald, &omnibus, &summary, &hl, &roc));
        let text = String::from_utf8(render_report(&doc, ReportFormat::Text).unwrap()).unwrap();
        assert!(text.contains("Overall Percentage"), "{text}");
        assert!(text.contains("72.30%"), "{text}");
        assert!(text.contains("-0.958"));
        assert!(text.contains("< 0.001"));
        assert!(text.contains("no rules met constraints"));
        // fixed section order
        let case = text.find("Case processing summary").unwrap();
        let enc = text.find("Dependent variable encoding").unwrap();
        let rules = text.find("Top association rules").unwrap();
        assert!(case < enc && enc < rules);
    }

    #[test]
    fn json_round_trip_preserves_numeric_values() {
        let doc = ReportDocument {
            sections: vec![TableSection {
                title: "t".into(),
                headers: vec!["a".into()],
                rows: vec![vec![Cell::coef(0.1234567890123), Cell::pct(72.27272727)]],
            }],
        };
        let bytes = render_report(&doc, ReportFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let cell = &parsed["sections"][0]["rows"][0][0];
        assert_eq!(cell["value"].as_f64().unwrap(), 0.1234567890123);
        let pct = &parsed["sections"][0]["rows"][0][1];
        assert_eq!(pct["value"].as_f64().unwrap(), 72.27272727);
        assert_eq!(pct["rendered"].as_str().unwrap(), "72.30%");
    }

    #[test]
    fn identical_documents_render_identically() {
        let doc = ReportDocument {
            sections: vec![TableSection {
                title: "x".into(),
                headers: vec!["h".into()],
                rows: vec![vec![Cell::measure(8.333333)]],
            }],
        };
        for format in [ReportFormat::Text, ReportFormat::Json, ReportFormat::Csv] {
            assert_eq!(
                render_report(&doc, format).unwrap(),
                render_report(&doc, format).unwrap()
            );
        }
    }

    #[test]
    fn unknown_format_token_is_error() {
        assert!(matches!(
            "html".parse::<ReportFormat>(),
            Err(Error::UnknownFormat(_))
        ));
    }

    #[test]
    fn percentage_rendering_matches_source_tables() {
        assert_eq!(Cell::pct(72.272727).rendered, "72.30%");
        assert_eq!(Cell::pct(81.363636).rendered, "81.40%");
        assert_eq!(Cell::pct(94.339622).rendered, "94.30%");
        assert_eq!(Cell::pct(47.540983).rendered, "47.50%");
        assert_eq!(Cell::measure(8.3333).rendered, "8.33");
        assert_eq!(Cell::pvalue(0.6123).rendered, "0.612");
        assert_eq!(Cell::pvalue(0.0004).rendered, "< 0.001");
    }

    #[test]
    fn csv_emits_one_section_per_table() {
        let doc = ReportDocument {
            sections: vec![
                TableSection {
                    title: "first".into(),
                    headers: vec!["a".into(), "b".into()],
                    rows: vec![vec![Cell::count(1), Cell::text("x,y")]],
                },
                TableSection {
                    title: "second".into(),
                    headers: vec!["c".into()],
                    rows: vec![],
                },
            ],
        };
        let bytes = render_report(&doc, ReportFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("# first\n"));
        assert!(text.contains("# second\n"));
        assert!(text.contains("\"x,y\""));
    }
}
