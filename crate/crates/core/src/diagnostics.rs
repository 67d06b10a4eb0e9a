//! Model-evaluation statistics: chi-square tail probabilities,
//! classification tables, the omnibus likelihood-ratio test, Cox & Snell
//! and Nagelkerke pseudo-R², the Hosmer–Lemeshow calibration test,
//! ROC AUC / GINI, and the univariate predictor screen.

use serde::Serialize;

use crate::dataset::{ColumnRole, Dataset};
use crate::design::expand_design;
use crate::error::{Error, Result};
use crate::logit::{fit_intercept_only, fit_logit_irls, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};

// ---------------------------------------------------------------------------
// chi-square survival function
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function via the Lanczos approximation.
fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Regularized lower incomplete gamma P(a, x) by series expansion;
/// converges quickly for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..500 {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz's continued
/// fraction; converges quickly for x ≥ a + 1.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x - ln_gamma(a)).exp() * h
}

/// Upper-tail probability P(χ²_df > x) via the regularized incomplete
/// gamma function.
pub fn chi_square_survival(x: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::BadArgument("chi-square df must be positive".to_string()));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::BadArgument(format!(
            "chi-square statistic must be a nonnegative number, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let a = df as f64 / 2.0;
    let half_x = x / 2.0;
    let q = if half_x < a + 1.0 {
        1.0 - gamma_p_series(a, half_x)
    } else {
        gamma_q_continued_fraction(a, half_x)
    };
    Ok(q.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// classification table
// ---------------------------------------------------------------------------

/// Counts from thresholding predicted probabilities against observed 0/1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationTable {
    pub true_positive: usize,
    pub true_negative: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub threshold: f64,
    /// Correct percentage within observed class 0.
    pub class0_pct: f64,
    /// Correct percentage within observed class 1.
    pub class1_pct: f64,
    pub overall_pct: f64,
}

impl ClassificationTable {
    pub fn n(&self) -> usize {
        self.true_positive + self.true_negative + self.false_positive + self.false_negative
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }
}

/// Predicts 1 when p ≥ threshold and tabulates against `y`.
pub fn classification_table(
    probs: &[f64],
    y: &[f64],
    threshold: f64,
) -> Result<ClassificationTable> {
    if probs.is_empty() {
        return Err(Error::EmptyInput("probability vector"));
    }
    if probs.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities vs {} targets",
            probs.len(),
            y.len()
        )));
    }
    let (mut tp, mut tn, mut fp, mut fal_n) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &obs) in probs.iter().zip(y.iter()) {
        let predicted = p >= threshold;
        match (obs == 1.0, predicted) {
            (true, true) => tp += 1,
            (true, false) => fal_n += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let n = (tp + tn + fp + fal_n) as f64;
    let pct = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    };
    Ok(ClassificationTable {
        true_positive: tp,
        true_negative: tn,
        false_positive: fp,
        false_negative: fal_n,
        threshold,
        class0_pct: pct(tn, tn + fp),
        class1_pct: pct(tp, tp + fal_n),
        overall_pct: 100.0 * (tp + tn) as f64 / n,
    })
}

// ---------------------------------------------------------------------------
// omnibus test & pseudo-R²
// ---------------------------------------------------------------------------

/// A chi-square test outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: usize,
    pub sig: f64,
}

/// Likelihood-ratio chi-square comparing a fitted model to its baseline:
/// statistic = −2LL_null − −2LL_model on `df_added` degrees of freedom.
pub fn omnibus_test(neg2ll_null: f64, neg2ll_model: f64, df_added: usize) -> Result<TestResult> {
    if neg2ll_model > neg2ll_null {
        return Err(Error::NegativeLikelihoodRatio {
            null: neg2ll_null,
            model: neg2ll_model,
        });
    }
    if df_added == 0 {
        return Err(Error::BadArgument(
            "omnibus test needs at least one added parameter".to_string(),
        ));
    }
    let statistic = neg2ll_null - neg2ll_model;
    Ok(TestResult {
        statistic,
        df: df_added,
        sig: chi_square_survival(statistic, df_added)?,
    })
}

/// Cox & Snell and Nagelkerke pseudo-R².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoR2 {
    pub neg2ll_model: f64,
    pub cox_snell: f64,
    pub nagelkerke: f64,
}

/// cox_snell = 1 − exp(−(−2LL_null − −2LL_model)/n);
/// nagelkerke rescales it by its maximum 1 − exp(−(−2LL_null)/n).
pub fn pseudo_r_squares(neg2ll_null: f64, neg2ll_model: f64, n: usize) -> Result<PseudoR2> {
    if n == 0 {
        return Err(Error::EmptyInput("pseudo-R² sample size"));
    }
    if neg2ll_model > neg2ll_null {
        return Err(Error::NegativeLikelihoodRatio {
            null: neg2ll_null,
            model: neg2ll_model,
        });
    }
    let n = n as f64;
    let cox_snell = 1.0 - (-(neg2ll_null - neg2ll_model) / n).exp();
    let max = 1.0 - (-neg2ll_null / n).exp();
    let nagelkerke = if max > 0.0 { cox_snell / max } else { 0.0 };
    Ok(PseudoR2 {
        neg2ll_model,
        cox_snell,
        nagelkerke,
    })
}

// ---------------------------------------------------------------------------
// Hosmer–Lemeshow
// ---------------------------------------------------------------------------

/// Calibration chi-square over near-equal deciles of predicted risk. Rows
/// are sorted by probability; tied probabilities stay in the same group,
/// with earlier groups taking the extra records. Groups whose expected
/// count in either class is zero merge into their neighbour (logged).
/// df = effective groups − 2.
pub fn hosmer_lemeshow(probs: &[f64], y: &[f64], groups: usize) -> Result<TestResult> {
    if groups < 2 {
        return Err(Error::BadArgument(format!(
            "Hosmer–Lemeshow needs at least 2 groups, got {groups}"
        )));
    }
    let n = probs.len();
    if n < groups {
        return Err(Error::TooFewRows { need: groups, got: n });
    }
    if probs.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities vs {} targets",
            probs.len(),
            y.len()
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]).then(a.cmp(&b)));

    // Near-equal group sizes; the first n % groups groups take one extra.
    let base = n / groups;
    let extra = n % groups;
    let mut boundaries = Vec::with_capacity(groups);
    let mut cum = 0usize;
    for g in 0..groups {
        cum += base + usize::from(g < extra);
        boundaries.push(cum);
    }
    // Keep tied probabilities together by extending each boundary.
    for b in boundaries.iter_mut() {
        while *b < n && probs[order[*b]] == probs[order[*b - 1]] {
            *b += 1;
        }
    }
    boundaries.dedup();

    // (size, observed positives, expected positives) per nonempty group.
    let mut cells: Vec<(usize, f64, f64)> = Vec::new();
    let mut start = 0usize;
    for &end in &boundaries {
        if end > start {
            let mut obs1 = 0.0;
            let mut exp1 = 0.0;
            for &idx in &order[start..end] {
                obs1 += y[idx];
                exp1 += probs[idx];
            }
            cells.push((end - start, obs1, exp1));
            start = end;
        }
    }

    // Merge any group with a zero expected count in either class.
    let mut merged = 0usize;
    let mut i = 0usize;
    while i < cells.len() {
        let (size, _, exp1) = cells[i];
        let exp0 = size as f64 - exp1;
        if (exp1 == 0.0 || exp0 == 0.0) && cells.len() > 1 {
            let j = if i + 1 < cells.len() { i + 1 } else { i - 1 };
            cells[j].0 += size;
            cells[j].1 += cells[i].1;
            cells[j].2 += cells[i].2;
            cells.remove(i);
            merged += 1;
        } else {
            i += 1;
        }
    }
    if merged > 0 {
        log::warn!("hosmer_lemeshow merged {merged} group(s) with zero expected count");
    }

    let mut statistic = 0.0;
    for &(size, obs1, exp1) in &cells {
        let obs0 = size as f64 - obs1;
        let exp0 = size as f64 - exp1;
        if exp1 > 0.0 {
            statistic += (obs1 - exp1).powi(2) / exp1;
        }
        if exp0 > 0.0 {
            statistic += (obs0 - exp0).powi(2) / exp0;
        }
    }
    let df = cells.len().saturating_sub(2);
    let sig = if df == 0 {
        // χ² with zero df is a point mass at zero.
        if statistic > 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        chi_square_survival(statistic, df)?
    };
    Ok(TestResult { statistic, df, sig })
}

// ---------------------------------------------------------------------------
// ROC AUC / GINI
// ---------------------------------------------------------------------------

/// Area under the ROC curve and its GINI rescaling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocSummary {
    pub auc: f64,
    pub gini: f64,
}

impl RocSummary {
    /// gini = 2·auc − 1 by construction.
    pub fn from_auc(auc: f64) -> RocSummary {
        RocSummary {
            auc,
            gini: 2.0 * auc - 1.0,
        }
    }
}

/// AUC by the Mann–Whitney pair statistic: (concordant + 0.5·tied) /
/// (n₁·n₀), counting over all positive/negative score pairs.
pub fn roc_auc_gini(probs: &[f64], y: &[f64]) -> Result<RocSummary> {
    if probs.is_empty() {
        return Err(Error::EmptyInput("score vector"));
    }
    if probs.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores vs {} targets",
            probs.len(),
            y.len()
        )));
    }
    let mut pairs: Vec<(f64, bool)> = probs
        .iter()
        .zip(y.iter())
        .map(|(&p, &obs)| (p, obs == 1.0))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut concordant = 0u64;
    let mut tied = 0u64;
    let mut neg_below = 0u64;
    let mut n0 = 0u64;
    let mut n1 = 0u64;
    let mut i = 0usize;
    while i < pairs.len() {
        let mut j = i;
        let mut pos_here = 0u64;
        let mut neg_here = 0u64;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            if pairs[j].1 {
                pos_here += 1;
            } else {
                neg_here += 1;
            }
            j += 1;
        }
        concordant += pos_here * neg_below;
        tied += pos_here * neg_here;
        neg_below += neg_here;
        n0 += neg_here;
        n1 += pos_here;
        i = j;
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass(
            "ROC needs both classes among the scored rows".to_string(),
        ));
    }
    let auc = (concordant as f64 + 0.5 * tied as f64) / (n1 as f64 * n0 as f64);
    Ok(RocSummary::from_auc(auc))
}

// ---------------------------------------------------------------------------
// univariate predictor screen
// ---------------------------------------------------------------------------

/// Association strength of one predictor with the target.
#[derive(Debug, Clone, Serialize)]
pub struct ScreenEntry {
    pub predictor: String,
    /// sqrt of the univariate Nagelkerke R², clipped into [0, 1].
    pub score: f64,
    /// Set when the predictor (near-)perfectly reproduces the target and
    /// must leave the model.
    pub excluded: bool,
    pub note: Option<String>,
}

/// Score at or above which a predictor is flagged as excluded.
pub const SCREEN_EXCLUSION_SCORE: f64 = 0.999;

/// Fits a univariate logistic model per predictor and reports
/// score = sqrt(Nagelkerke R²). Perfect predictors score 1 and are
/// flagged excluded; zero-variance predictors score 0 with a note.
pub fn logistic_correlation_screen(ds: &Dataset, indices: &[usize]) -> Result<Vec<ScreenEntry>> {
    if !ds.is_target_encoded() {
        return Err(Error::TargetNotEncoded);
    }
    let mut entries = Vec::new();
    for spec in ds.schema() {
        if spec.role == ColumnRole::Target {
            continue;
        }
        let exclude: Vec<String> = ds
            .schema()
            .iter()
            .filter(|c| c.role != ColumnRole::Target && c.name != spec.name)
            .map(|c| c.name.clone())
            .collect();
        let entry = match expand_design(ds, indices, &exclude) {
            Err(_) => ScreenEntry {
                predictor: spec.name.clone(),
                score: 0.0,
                excluded: false,
                note: Some("no usable rows".to_string()),
            },
            Ok(design) if design.n_params() == 1 => ScreenEntry {
                predictor: spec.name.clone(),
                score: 0.0,
                excluded: false,
                note: Some("zero variance over the selected rows".to_string()),
            },
            Ok(design) => {
                let y = ds.target_vector(&design.row_indices)?;
                screen_one(spec.name.clone(), &design, &y)
            }
        };
        entries.push(entry);
    }
    Ok(entries)
}

fn screen_one(name: String, design: &crate::design::DesignMatrix, y: &[f64]) -> ScreenEntry {
    let baseline = match fit_intercept_only(y) {
        Ok((fit, _)) => fit.neg2_log_likelihood,
        Err(_) => {
            return ScreenEntry {
                predictor: name,
                score: 0.0,
                excluded: false,
                note: Some("single target class among usable rows".to_string()),
            }
        }
    };
    // A diverging fit (separation) is still informative here: its final
    // −2LL is near zero, which is exactly what scores a perfect predictor
    // at 1.000.
    let fit = match fit_logit_irls(design, y, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER) {
        Ok(fit) => fit,
        Err(e) => {
            return ScreenEntry {
                predictor: name,
                score: 0.0,
                excluded: false,
                note: Some(format!("fit failed: {e}")),
            }
        }
    };
    let model = fit.neg2_log_likelihood.min(baseline);
    let score = match pseudo_r_squares(baseline, model, y.len()) {
        Ok(r2) => r2.nagelkerke.max(0.0).sqrt().clamp(0.0, 1.0),
        Err(_) => 0.0,
    };
    ScreenEntry {
        predictor: name,
        score,
        excluded: score >= SCREEN_EXCLUSION_SCORE,
        note: None,
    }
}
