//! Constrained association-rule mining: record itemization, Apriori
//! frequent-itemset search, rule derivation and scoring by condition
//! support, rule support, confidence, lift and deployability.
//!
//! Percentages are kept at full precision; rounding happens at render
//! time only.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{BinningSpec, ColumnRole, Dataset};
use crate::error::{Error, Result};

/// What kind of value an item encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemKind {
    /// A flag column observed true; labelled by the bare column name.
    FlagTrue,
    /// One level of a categorical column (also a flag observed false when
    /// false values are itemized).
    CategoryLevel,
    /// One equal-width bin of a continuous column.
    NumericBin,
    /// One class of the target column.
    ClassLevel,
}

/// A single mineable item.
#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub id: u32,
    pub label: String,
    pub source: String,
    pub kind: ItemKind,
}

/// Itemized records: the dense item vocabulary, one item-id set per
/// record, and per-item occurrence bitmasks for fast support counting.
#[derive(Debug, Clone)]
pub struct ItemCatalog {
    pub items: Vec<Item>,
    pub transactions: Vec<Vec<u32>>,
    pub n_records: usize,
    masks: Vec<Vec<u64>>,
}

impl ItemCatalog {
    pub fn new(items: Vec<Item>, transactions: Vec<Vec<u32>>) -> ItemCatalog {
        let n_records = transactions.len();
        let words = n_records.div_ceil(64);
        let mut masks = vec![vec![0u64; words]; items.len()];
        for (record, txn) in transactions.iter().enumerate() {
            for &item in txn {
                masks[item as usize][record / 64] |= 1 << (record % 64);
            }
        }
        ItemCatalog {
            items,
            transactions,
            n_records,
            masks,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty() || self.n_records == 0
    }

    pub fn item_by_label(&self, label: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.label == label)
    }

    fn mask_of(&self, ids: &[u32]) -> Vec<u64> {
        let words = self.n_records.div_ceil(64);
        let mut acc = vec![u64::MAX; words];
        if words > 0 && self.n_records % 64 != 0 {
            acc[words - 1] = (1u64 << (self.n_records % 64)) - 1;
        }
        for &id in ids {
            for (w, m) in acc.iter_mut().zip(self.masks[id as usize].iter()) {
                *w &= m;
            }
        }
        acc
    }

    /// σ: number of transactions containing every item in `ids`. The
    /// empty itemset is contained in every transaction.
    pub fn support_count(&self, ids: &[u32]) -> u64 {
        self.mask_of(ids).iter().map(|w| w.count_ones() as u64).sum()
    }

    fn labels_of(&self, ids: &[u32]) -> String {
        ids.iter()
            .map(|&id| self.items[id as usize].label.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A sorted item-id set with its exact support count σ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Itemset {
    pub item_ids: Vec<u32>,
    pub support_count: u64,
}

/// The five rule measures, all on the 0–100 percent scale except lift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuleMeasures {
    pub condition_support_pct: f64,
    pub rule_support_pct: f64,
    pub confidence_pct: f64,
    pub lift: f64,
    pub deployability_pct: f64,
}

/// An X → Y implication with its measures.
#[derive(Debug, Clone, Serialize)]
pub struct AssociationRule {
    pub condition: Itemset,
    pub prediction: Itemset,
    pub condition_label: String,
    pub prediction_label: String,
    pub condition_support_pct: f64,
    pub rule_support_pct: f64,
    pub confidence_pct: f64,
    pub lift: f64,
    pub deployability_pct: f64,
}

impl AssociationRule {
    pub fn measure(&self, which: SortMeasure) -> f64 {
        match which {
            SortMeasure::Confidence => self.confidence_pct,
            SortMeasure::Lift => self.lift,
            SortMeasure::RuleSupport => self.rule_support_pct,
            SortMeasure::ConditionSupport => self.condition_support_pct,
            SortMeasure::Deployability => self.deployability_pct,
        }
    }
}

/// Measure by which rules are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortMeasure {
    Confidence,
    Lift,
    RuleSupport,
    ConditionSupport,
    Deployability,
}

impl std::str::FromStr for SortMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<SortMeasure> {
        match s {
            "confidence" => Ok(SortMeasure::Confidence),
            "lift" => Ok(SortMeasure::Lift),
            "rule_support" => Ok(SortMeasure::RuleSupport),
            "condition_support" => Ok(SortMeasure::ConditionSupport),
            "deployability" => Ok(SortMeasure::Deployability),
            other => Err(Error::BadArgument(format!(
                "unknown sort measure '{other}'"
            ))),
        }
    }
}

/// Mining constraints. Defaults mirror the published model settings:
/// at most 10 rules, 5% minimum condition and rule support, 10% minimum
/// confidence, minimum lift 2, up to 10 items per rule (6 in the
/// condition, 3 in the prediction), only true flag values itemized, no
/// conditionless rules, ranked by confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub max_rules: usize,
    pub min_condition_support_pct: f64,
    pub min_confidence_pct: f64,
    pub min_rule_support_pct: f64,
    pub min_lift: f64,
    pub max_items_per_rule: usize,
    pub max_items_per_condition: usize,
    pub max_items_per_prediction: usize,
    pub flags_true_only: bool,
    pub allow_conditionless: bool,
    /// Restrict prediction itemsets to target-class items.
    pub predictions_target_only: bool,
    pub sort_measure: SortMeasure,
}

impl Default for MiningConfig {
    fn default() -> MiningConfig {
        MiningConfig {
            max_rules: 10,
            min_condition_support_pct: 5.0,
            min_confidence_pct: 10.0,
            min_rule_support_pct: 5.0,
            min_lift: 2.0,
            max_items_per_rule: 10,
            max_items_per_condition: 6,
            max_items_per_prediction: 3,
            flags_true_only: true,
            allow_conditionless: false,
            predictions_target_only: true,
            sort_measure: SortMeasure::Confidence,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("min_condition_support_pct", self.min_condition_support_pct),
            ("min_confidence_pct", self.min_confidence_pct),
            ("min_rule_support_pct", self.min_rule_support_pct),
            ("min_lift", self.min_lift),
        ] {
            if !(v >= 0.0) {
                return Err(Error::BadArgument(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        if self.max_items_per_rule < 1
            || self.max_items_per_condition < 1
            || self.max_items_per_prediction < 1
        {
            return Err(Error::BadArgument(
                "item caps must be at least 1".to_string(),
            ));
        }
        if self.max_items_per_rule < self.max_items_per_condition {
            return Err(Error::BadArgument(
                "max_items_per_rule must be at least the condition cap".to_string(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// itemization
// ---------------------------------------------------------------------------

/// Converts records into transactions. Flag columns emit an item only
/// when true (unless `flags_true_only` is off, in which case false values
/// get their own item); categorical columns emit one item per level;
/// continuous columns emit their bin item and must appear in `bins`;
/// the target emits one class item per class. Columns named in `exclude`
/// are left out entirely, mirroring the design-matrix exclusions.
pub fn itemize_records(
    ds: &Dataset,
    indices: &[usize],
    bins: &[BinningSpec],
    flags_true_only: bool,
    exclude: &[String],
) -> Result<ItemCatalog> {
    if !ds.is_target_encoded() {
        return Err(Error::TargetNotEncoded);
    }
    let bin_by_column: BTreeMap<&str, &BinningSpec> =
        bins.iter().map(|b| (b.column.as_str(), b)).collect();

    let mut items: Vec<Item> = Vec::new();
    // per column: map from a discrete slot to the item id
    let mut slots: Vec<HashMap<i64, u32>> = vec![HashMap::new(); ds.schema().len()];

    for (col, spec) in ds.schema().iter().enumerate() {
        if spec.role != ColumnRole::Target && exclude.contains(&spec.name) {
            continue;
        }
        let mut push = |label: String, kind: ItemKind, slot: i64, slots: &mut Vec<HashMap<i64, u32>>| {
            let id = items.len() as u32;
            items.push(Item {
                id,
                label,
                source: spec.name.clone(),
                kind,
            });
            slots[col].insert(slot, id);
        };
        match spec.role {
            ColumnRole::Flag => {
                let true_label = spec.name.clone();
                push(true_label, ItemKind::FlagTrue, 1, &mut slots);
                if !flags_true_only {
                    push(
                        format!("{} = false", spec.name),
                        ItemKind::CategoryLevel,
                        0,
                        &mut slots,
                    );
                }
            }
            ColumnRole::Nominal | ColumnRole::Ordinal => {
                // only levels observed among the given rows become items
                let mut seen: Vec<i64> = indices
                    .iter()
                    .filter_map(|&r| ds.value(r, col))
                    .map(|v| v as i64)
                    .collect();
                seen.sort_unstable();
                seen.dedup();
                for code in seen {
                    let label = format!(
                        "{} = {}",
                        spec.name,
                        ds.level_labels(col)[code as usize - 1]
                    );
                    push(label, ItemKind::CategoryLevel, code, &mut slots);
                }
            }
            ColumnRole::Continuous => {
                let bin_spec = bin_by_column
                    .get(spec.name.as_str())
                    .ok_or_else(|| Error::UnbinnedContinuous(spec.name.clone()))?;
                let mut seen: Vec<i64> = indices
                    .iter()
                    .filter_map(|&r| ds.value(r, col))
                    .map(|v| bin_spec.bin_index(v) as i64)
                    .collect();
                seen.sort_unstable();
                seen.dedup();
                for b in seen {
                    push(bin_spec.bin_label(b as usize), ItemKind::NumericBin, b, &mut slots);
                }
            }
            ColumnRole::Target => {
                let (neg, pos) = ds.target_labels().unwrap_or(("0", "1"));
                push(neg.to_string(), ItemKind::ClassLevel, 0, &mut slots);
                push(pos.to_string(), ItemKind::ClassLevel, 1, &mut slots);
            }
        }
    }

    let mut transactions = Vec::with_capacity(indices.len());
    for &row in indices {
        let mut txn: Vec<u32> = Vec::new();
        for (col, spec) in ds.schema().iter().enumerate() {
            if spec.role != ColumnRole::Target && exclude.contains(&spec.name) {
                continue;
            }
            let Some(v) = ds.value(row, col) else { continue };
            let slot = match spec.role {
                ColumnRole::Flag | ColumnRole::Target => v as i64,
                ColumnRole::Nominal | ColumnRole::Ordinal => v as i64,
                ColumnRole::Continuous => {
                    bin_by_column[ds.schema()[col].name.as_str()].bin_index(v) as i64
                }
            };
            if let Some(&id) = slots[col].get(&slot) {
                txn.push(id);
            }
        }
        txn.sort_unstable();
        transactions.push(txn);
    }

    Ok(ItemCatalog::new(items, transactions))
}

// ---------------------------------------------------------------------------
// Apriori
// ---------------------------------------------------------------------------

fn meets_support(support: u64, n_records: usize, min_support_pct: f64) -> bool {
    support >= 1 && support as f64 * 100.0 >= min_support_pct * n_records as f64 - 1e-9
}

/// Level-wise Apriori search for all itemsets of size ≤ `max_size` whose
/// support 100·σ/N meets `min_support_pct`. Candidates are generated by
/// sorted-prefix joins and pruned by downward closure. Itemsets always
/// need at least one supporting transaction, whatever the threshold.
pub fn mine_frequent_itemsets(
    catalog: &ItemCatalog,
    min_support_pct: f64,
    max_size: usize,
) -> Result<Vec<Itemset>> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if !(0.0..=100.0).contains(&min_support_pct) {
        return Err(Error::BadArgument(format!(
            "min support must lie in [0, 100], got {min_support_pct}"
        )));
    }
    let mut all: Vec<Itemset> = Vec::new();
    if max_size == 0 {
        return Ok(all);
    }

    // level 1
    let mut current: Vec<(Vec<u32>, Vec<u64>)> = Vec::new();
    for item in &catalog.items {
        let ids = vec![item.id];
        let mask = catalog.mask_of(&ids);
        let support: u64 = mask.iter().map(|w| w.count_ones() as u64).sum();
        if meets_support(support, catalog.n_records, min_support_pct) {
            all.push(Itemset {
                item_ids: ids.clone(),
                support_count: support,
            });
            current.push((ids, mask));
        }
    }

    let mut size = 1usize;
    while size < max_size && current.len() > 1 {
        let frequent_here: HashSet<&[u32]> =
            current.iter().map(|(ids, _)| ids.as_slice()).collect();
        let mut next: Vec<(Vec<u32>, Vec<u64>)> = Vec::new();
        for i in 0..current.len() {
            for j in (i + 1)..current.len() {
                let (a, mask_a) = &current[i];
                let (b, _) = &current[j];
                if a[..size - 1] != b[..size - 1] {
                    continue;
                }
                let mut candidate = a.clone();
                candidate.push(b[size - 1]);
                // downward closure: every size-k subset must be frequent
                let mut closed = true;
                let mut subset = candidate.clone();
                for drop in 0..size.saturating_sub(1) {
                    subset.remove(drop);
                    if !frequent_here.contains(subset.as_slice()) {
                        closed = false;
                        break;
                    }
                    subset = candidate.clone();
                }
                if !closed {
                    continue;
                }
                let mut mask = mask_a.clone();
                for (w, m) in mask
                    .iter_mut()
                    .zip(catalog.masks[candidate[size] as usize].iter())
                {
                    *w &= m;
                }
                let support: u64 = mask.iter().map(|w| w.count_ones() as u64).sum();
                if meets_support(support, catalog.n_records, min_support_pct) {
                    all.push(Itemset {
                        item_ids: candidate.clone(),
                        support_count: support,
                    });
                    next.push((candidate, mask));
                }
            }
        }
        current = next;
        size += 1;
    }

    all.sort_by(|a, b| {
        a.item_ids
            .len()
            .cmp(&b.item_ids.len())
            .then_with(|| a.item_ids.cmp(&b.item_ids))
    });
    Ok(all)
}

// ---------------------------------------------------------------------------
// rule derivation & scoring
// ---------------------------------------------------------------------------

/// Exact measures for X → Y counted over the catalog. X and Y must be
/// disjoint and Y nonempty; a zero-support condition has no defined
/// confidence.
pub fn score_rule(
    condition: &[u32],
    prediction: &[u32],
    catalog: &ItemCatalog,
) -> Result<RuleMeasures> {
    if prediction.is_empty() {
        return Err(Error::EmptyInput("prediction itemset"));
    }
    if condition.iter().any(|id| prediction.contains(id)) {
        return Err(Error::BadArgument(
            "condition and prediction itemsets overlap".to_string(),
        ));
    }
    let n = catalog.n_records as f64;
    let sigma_x = catalog.support_count(condition);
    if sigma_x == 0 {
        return Err(Error::ZeroConditionSupport);
    }
    let union: Vec<u32> = {
        let mut u = condition.to_vec();
        u.extend_from_slice(prediction);
        u.sort_unstable();
        u
    };
    let sigma_xy = catalog.support_count(&union);
    let sigma_y = catalog.support_count(prediction);

    let condition_support_pct = 100.0 * sigma_x as f64 / n;
    let rule_support_pct = 100.0 * sigma_xy as f64 / n;
    let confidence_pct = 100.0 * sigma_xy as f64 / sigma_x as f64;
    let consequent_support_pct = 100.0 * sigma_y as f64 / n;
    let lift = if consequent_support_pct > 0.0 {
        confidence_pct / consequent_support_pct
    } else {
        0.0
    };
    Ok(RuleMeasures {
        condition_support_pct,
        rule_support_pct,
        confidence_pct,
        lift,
        deployability_pct: condition_support_pct - rule_support_pct,
    })
}

/// Splits every frequent itemset Z into condition/prediction pairs within
/// the configured caps and keeps the rules passing all four thresholds.
pub fn derive_rules(
    frequent: &[Itemset],
    catalog: &ItemCatalog,
    config: &MiningConfig,
) -> Result<Vec<AssociationRule>> {
    config.validate()?;
    let class_items: HashSet<u32> = catalog
        .items
        .iter()
        .filter(|i| i.kind == ItemKind::ClassLevel)
        .map(|i| i.id)
        .collect();

    let mut rules = Vec::new();
    for z in frequent {
        let k = z.item_ids.len();
        if k == 0 || k > config.max_items_per_rule {
            continue;
        }
        // enumerate prediction subsets Y ⊂ Z by bitmask
        for mask in 1u32..(1u32 << k) {
            let y_size = mask.count_ones() as usize;
            if y_size > config.max_items_per_prediction || y_size == k && !config.allow_conditionless
            {
                if y_size > config.max_items_per_prediction {
                    continue;
                }
            }
            let x_size = k - y_size;
            if x_size > config.max_items_per_condition {
                continue;
            }
            if x_size == 0 && !config.allow_conditionless {
                continue;
            }
            let mut condition = Vec::with_capacity(x_size);
            let mut prediction = Vec::with_capacity(y_size);
            for (bit, &id) in z.item_ids.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    prediction.push(id);
                } else {
                    condition.push(id);
                }
            }
            if config.predictions_target_only
                && !prediction.iter().all(|id| class_items.contains(id))
            {
                continue;
            }
            let measures = match score_rule(&condition, &prediction, catalog) {
                Ok(m) => m,
                Err(Error::ZeroConditionSupport) => continue,
                Err(e) => return Err(e),
            };
            let eps = 1e-9;
            if measures.condition_support_pct + eps < config.min_condition_support_pct
                || measures.rule_support_pct + eps < config.min_rule_support_pct
                || measures.confidence_pct + eps < config.min_confidence_pct
                || measures.lift + eps < config.min_lift
            {
                continue;
            }
            rules.push(AssociationRule {
                condition_label: catalog.labels_of(&condition),
                prediction_label: catalog.labels_of(&prediction),
                condition: Itemset {
                    support_count: catalog.support_count(&condition),
                    item_ids: condition,
                },
                prediction: Itemset {
                    support_count: catalog.support_count(&prediction),
                    item_ids: prediction,
                },
                condition_support_pct: measures.condition_support_pct,
                rule_support_pct: measures.rule_support_pct,
                confidence_pct: measures.confidence_pct,
                lift: measures.lift,
                deployability_pct: measures.deployability_pct,
            });
        }
    }
    Ok(rules)
}

/// Ranks rules by the configured measure (descending), breaking ties by
/// higher rule support, then fewer condition items, then label order, and
/// truncates to `max_rules`.
pub fn select_rules(mut rules: Vec<AssociationRule>, config: &MiningConfig) -> Vec<AssociationRule> {
    rules.sort_by(|a, b| {
        b.measure(config.sort_measure)
            .total_cmp(&a.measure(config.sort_measure))
            .then_with(|| b.rule_support_pct.total_cmp(&a.rule_support_pct))
            .then_with(|| a.condition.item_ids.len().cmp(&b.condition.item_ids.len()))
            .then_with(|| a.condition_label.cmp(&b.condition_label))
            .then_with(|| a.prediction_label.cmp(&b.prediction_label))
    });
    rules.truncate(config.max_rules);
    rules
}

// ---------------------------------------------------------------------------
// aggregate statistics
// ---------------------------------------------------------------------------

/// Minimum, maximum, mean and population standard deviation of one measure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeasureStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

fn measure_stats(values: &[f64]) -> MeasureStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeasureStats {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std: var.sqrt(),
    }
}

/// Per-measure summary over a rule list.
#[derive(Debug, Clone, Serialize)]
pub struct RuleAggregate {
    pub condition_support: MeasureStats,
    pub confidence: MeasureStats,
    pub rule_support: MeasureStats,
    pub lift: MeasureStats,
    pub deployability: MeasureStats,
    pub n_rules: usize,
    pub n_records: usize,
}

/// Summarizes the five measures over `rules`.
pub fn aggregate_rule_statistics(
    rules: &[AssociationRule],
    n_records: usize,
) -> Result<RuleAggregate> {
    if rules.is_empty() {
        return Err(Error::EmptyRuleList);
    }
    let collect = |f: fn(&AssociationRule) -> f64| -> Vec<f64> { rules.iter().map(f).collect() };
    Ok(RuleAggregate {
        condition_support: measure_stats(&collect(|r| r.condition_support_pct)),
        confidence: measure_stats(&collect(|r| r.confidence_pct)),
        rule_support: measure_stats(&collect(|r| r.rule_support_pct)),
        lift: measure_stats(&collect(|r| r.lift)),
        deployability: measure_stats(&collect(|r| r.deployability_pct)),
        n_rules: rules.len(),
        n_records,
    })
}
