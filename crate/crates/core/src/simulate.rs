//! Seeded generator of clinical-style demo records.
//!
//! The public mesothelioma dataset this pipeline targets is not
//! redistributable here, so the repository ships a synthetic stand-in
//! with the same shape: 34 attributes plus a binary outcome, 324
//! records, one column ("diagnosis method") that leaks the outcome and
//! symptom flags that carry a real signal. The generator is fully
//! deterministic in its seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{ColumnRole, ColumnSchema};

/// Column roles of the mesothelioma-style table, in file order.
pub fn default_schema() -> Vec<ColumnSchema> {
    use ColumnRole::*;
    let spec: [(&str, ColumnRole); 35] = [
        ("age", Continuous),
        ("gender", Nominal),
        ("city", Nominal),
        ("asbestos exposure", Continuous),
        ("type of MM", Nominal),
        ("duration of asbestos exposure", Continuous),
        ("diagnosis method", Continuous),
        ("keep side", Nominal),
        ("cytology", Flag),
        ("duration of symptoms", Continuous),
        ("dyspnoea", Flag),
        ("ache on chest", Flag),
        ("weakness", Flag),
        ("habit of cigarette", Nominal),
        ("performance status", Flag),
        ("white blood", Continuous),
        ("cell count (WBC)", Continuous),
        ("hemoglobin (HGB)", Continuous),
        ("platelet count (PLT)", Continuous),
        ("sedimentation", Continuous),
        ("blood lactic dehydrogenise (LDH)", Continuous),
        ("alkaline phosphatise (ALP)", Continuous),
        ("total protein", Continuous),
        ("albumin", Continuous),
        ("glucose", Continuous),
        ("pleural lactic dehydrogenise", Continuous),
        ("pleural protein", Continuous),
        ("pleural albumin", Continuous),
        ("pleural glucose", Continuous),
        ("dead or not", Flag),
        ("pleural effusion", Flag),
        ("pleural thickness on tomography", Continuous),
        ("pleural level of acidity (pH)", Continuous),
        ("C-reactive protein (CRP)", Continuous),
        ("class of diagnosis", Target),
    ];
    spec.iter()
        .map(|(name, role)| ColumnSchema::new(name, *role))
        .collect()
}

pub const NEGATIVE_LABEL: &str = "Healthy";
pub const POSITIVE_LABEL: &str = "Mesothelioma";

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    mean + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn clipped(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64, decimals: i32) -> f64 {
    let v = normal(rng, mean, sd).clamp(lo, hi);
    let scale = 10f64.powi(decimals);
    (v * scale).round() / scale
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    rng.gen_range(0.0..1.0) < p
}

fn pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if draw < *w {
            return i;
        }
        draw -= w;
    }
    weights.len() - 1
}

/// One generated record, as CSV field strings in schema order.
pub type Record = Vec<String>;

/// Generates `n_rows` records. Roughly 30% of records are positive;
/// dyspnoea, weakness, asbestos exposure, WBC, glucose and pleural
/// albumin carry the bulk of the signal, and "diagnosis method" encodes
/// the class outright (so the screen excludes it, as in the source
/// analysis).
pub fn generate(n_rows: usize, seed: u64) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let positive = bernoulli(&mut rng, 0.296);
        let m = positive; // shorthand in the per-column parameters below
        let flag = |rng: &mut ChaCha8Rng, p_pos: f64, p_neg: f64| -> String {
            u8::from(bernoulli(rng, if m { p_pos } else { p_neg })).to_string()
        };

        let age = clipped(&mut rng, if m { 58.0 } else { 52.0 }, 12.0, 19.0, 85.0, 0);
        let gender = (1 + pick(&mut rng, &[0.41, 0.59])).to_string();
        let city = pick(
            &mut rng,
            &[0.14, 0.12, 0.12, 0.11, 0.10, 0.10, 0.11, 0.10, 0.10],
        )
        .to_string();
        let asbestos = clipped(&mut rng, if m { 28.0 } else { 14.0 }, 12.0, 0.0, 60.0, 1);
        let type_mm = (1 + pick(&mut rng, &[0.5, 0.3, 0.2])).to_string();
        let dur_asbestos = clipped(&mut rng, if m { 22.0 } else { 16.0 }, 9.0, 0.0, 50.0, 1);
        let diagnosis_method = if m { "2" } else { "1" }.to_string();
        let keep_side = pick(&mut rng, &[0.45, 0.45, 0.10]).to_string();
        let cytology = flag(&mut rng, 0.35, 0.20);
        let dur_symptoms = clipped(&mut rng, if m { 9.0 } else { 6.0 }, 4.0, 0.0, 24.0, 1);
        let dyspnoea = flag(&mut rng, 0.74, 0.28);
        let ache = flag(&mut rng, 0.55, 0.30);
        let weakness = flag(&mut rng, 0.72, 0.30);
        let cigarette = pick(&mut rng, &[0.40, 0.35, 0.25]).to_string();
        let performance = flag(&mut rng, 0.40, 0.25);
        let white_blood = clipped(&mut rng, if m { 8.9 } else { 8.1 }, 2.0, 3.0, 16.0, 2);
        let wbc = clipped(&mut rng, if m { 9.6 } else { 8.4 }, 2.3, 3.0, 18.0, 2);
        let hgb = clipped(&mut rng, if m { 12.1 } else { 13.2 }, 1.6, 8.0, 18.0, 1);
        let plt = clipped(&mut rng, if m { 348.0 } else { 305.0 }, 78.0, 120.0, 600.0, 0);
        let sedimentation = clipped(&mut rng, if m { 48.0 } else { 36.0 }, 18.0, 2.0, 110.0, 0);
        let ldh = clipped(&mut rng, if m { 232.0 } else { 208.0 }, 55.0, 90.0, 450.0, 0);
        let alp = clipped(&mut rng, 92.0, 28.0, 30.0, 220.0, 0);
        let total_protein = clipped(&mut rng, 7.1, 0.7, 4.5, 9.5, 1);
        let albumin = clipped(&mut rng, if m { 3.5 } else { 3.9 }, 0.5, 2.0, 5.5, 1);
        let glucose = clipped(&mut rng, if m { 88.0 } else { 106.0 }, 24.0, 45.0, 200.0, 0);
        let pleural_ldh = clipped(&mut rng, if m { 680.0 } else { 520.0 }, 240.0, 100.0, 2000.0, 0);
        let pleural_protein = clipped(&mut rng, 4.1, 1.0, 1.0, 7.5, 2);
        let pleural_albumin = clipped(&mut rng, if m { 2.15 } else { 2.95 }, 0.5, 0.9, 4.5, 2);
        let pleural_glucose = clipped(&mut rng, if m { 72.0 } else { 92.0 }, 26.0, 10.0, 180.0, 0);
        let dead = flag(&mut rng, 0.52, 0.30);
        let effusion = flag(&mut rng, 0.60, 0.35);
        let thickness = clipped(&mut rng, if m { 1.9 } else { 1.1 }, 0.8, 0.0, 5.0, 1);
        let ph = clipped(&mut rng, if m { 7.28 } else { 7.38 }, 0.08, 6.9, 7.6, 2);
        let crp = clipped(&mut rng, if m { 58.0 } else { 34.0 }, 26.0, 1.0, 180.0, 0);
        let class = if m { POSITIVE_LABEL } else { NEGATIVE_LABEL }.to_string();

        rows.push(vec![
            age.to_string(),
            gender,
            city,
            asbestos.to_string(),
            type_mm,
            dur_asbestos.to_string(),
            diagnosis_method,
            keep_side,
            cytology,
            dur_symptoms.to_string(),
            dyspnoea,
            ache,
            weakness,
            cigarette,
            performance,
            white_blood.to_string(),
            wbc.to_string(),
            hgb.to_string(),
            plt.to_string(),
            sedimentation.to_string(),
            ldh.to_string(),
            alp.to_string(),
            total_protein.to_string(),
            albumin.to_string(),
            glucose.to_string(),
            pleural_ldh.to_string(),
            pleural_protein.to_string(),
            pleural_albumin.to_string(),
            pleural_glucose.to_string(),
            dead,
            effusion,
            thickness.to_string(),
            ph.to_string(),
            crp.to_string(),
            class,
        ]);
    }
    rows
}

/// Renders the generated records as CSV text with the schema header.
pub fn to_csv(rows: &[Record]) -> String {
    let schema = default_schema();
    let mut out = String::new();
    out.push_str(
        &schema
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate(50, 9), generate(50, 9));
        assert_ne!(generate(50, 9), generate(50, 10));
    }

    #[test]
    fn generated_csv_loads_against_default_schema() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, to_csv(&generate(324, 20181106)).as_bytes()).unwrap();
        std::io::Write::flush(&mut f).unwrap();
        let ds = crate::dataset::load_csv(f.path(), &default_schema())
            .unwrap()
            .encode_target(POSITIVE_LABEL, NEGATIVE_LABEL)
            .unwrap();
        assert_eq!(ds.n_rows(), 324);
        let (n0, n1) = ds.class_counts(&(0..324).collect::<Vec<_>>()).unwrap();
        assert!(n0 > n1, "majority class should be healthy ({n0} vs {n1})");
        assert!(n1 > 60, "positives should be plentiful ({n1})");
    }
}
