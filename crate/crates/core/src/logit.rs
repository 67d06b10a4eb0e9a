//! Maximum-likelihood binary logistic regression.
//!
//! The full model is fitted by Newton–Raphson (equivalently IRLS) on the
//! Bernoulli log-likelihood; the intercept-only model has a closed form.
//! Standard errors come from the inverse observed information at the
//! optimum.

use nalgebra::{DMatrix, DVector};

use crate::design::DesignMatrix;
use crate::diagnostics::chi_square_survival;
use crate::error::{Error, Result};

/// Default relative change in −2LL below which the fit is converged
/// (0.001 percent).
pub const DEFAULT_TOLERANCE: f64 = 1e-5;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 20;
/// Coefficients beyond this magnitude are treated as diverging towards a
/// separated configuration.
const DIVERGENCE_BOUND: f64 = 25.0;

/// A fitted logistic model.
#[derive(Debug, Clone)]
pub struct LogitFit {
    /// Intercept first, then one entry per design column.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub neg2_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub n_used: usize,
    pub column_names: Vec<String>,
    pub warnings: Vec<String>,
}

/// One row of a variables-in-the-equation table.
#[derive(Debug, Clone)]
pub struct WaldRow {
    pub name: String,
    pub b: f64,
    pub se: f64,
    pub wald: f64,
    pub df: usize,
    pub sig: f64,
    pub exp_b: f64,
}

impl WaldRow {
    fn from_estimate(name: &str, b: f64, se: f64) -> Result<WaldRow> {
        let wald = (b / se) * (b / se);
        Ok(WaldRow {
            name: name.to_string(),
            b,
            se,
            wald,
            df: 1,
            sig: chi_square_survival(wald, 1)?,
            exp_b: b.exp(),
        })
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^eta), evaluated without overflow.
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

fn neg2_log_likelihood(eta: &DVector<f64>, y: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        ll += yi * eta[i] - softplus(eta[i]);
    }
    -2.0 * ll
}

fn check_binary(y: &[f64]) -> Result<(usize, usize)> {
    if y.is_empty() {
        return Err(Error::EmptyInput("target vector"));
    }
    let mut n0 = 0usize;
    let mut n1 = 0usize;
    for &v in y {
        if v == 0.0 {
            n0 += 1;
        } else if v == 1.0 {
            n1 += 1;
        } else {
            return Err(Error::BadArgument(format!(
                "target values must be 0 or 1, got {v}"
            )));
        }
    }
    if n0 == 0 {
        return Err(Error::SingleClass("all targets are 1".to_string()));
    }
    if n1 == 0 {
        return Err(Error::SingleClass("all targets are 0".to_string()));
    }
    Ok((n0, n1))
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix. On a non-positive pivot returns the offending column index,
/// which identifies the design column that is collinear with its
/// predecessors.
fn cholesky(h: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, usize> {
    let p = h.nrows();
    let mut l = DMatrix::zeros(p, p);
    for j in 0..p {
        let mut d = h[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d.is_finite() && d > h[(j, j)].abs() * 1e-12) {
            return Err(j);
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..p {
            let mut v = h[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / root;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let p = l.nrows();
    let mut z = DVector::zeros(p);
    for i in 0..p {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * z[k];
        }
        z[i] = v / l[(i, i)];
    }
    let mut x = DVector::zeros(p);
    for i in (0..p).rev() {
        let mut v = z[i];
        for k in (i + 1)..p {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

fn information_matrix(x: &DMatrix<f64>, probs: &DVector<f64>) -> DMatrix<f64> {
    let mut weighted = x.clone();
    for (i, mut row) in weighted.row_iter_mut().enumerate() {
        // The working weight is floored so a saturated record cannot zero
        // out the information matrix before the divergence guard trips.
        let w = (probs[i] * (1.0 - probs[i])).max(1e-10);
        row *= w;
    }
    x.transpose() * weighted
}

/// Closed-form intercept-only ("baseline") fit: α = ln(n₁/n₀),
/// SE = sqrt(1/n₁ + 1/n₀), −2LL = −2[n₁ ln(n₁/n) + n₀ ln(n₀/n)].
pub fn fit_intercept_only(targets: &[f64]) -> Result<(LogitFit, WaldRow)> {
    let (n0, n1) = check_binary(targets)?;
    let n = (n0 + n1) as f64;
    let alpha = (n1 as f64 / n0 as f64).ln();
    let se = (1.0 / n1 as f64 + 1.0 / n0 as f64).sqrt();
    let neg2ll = -2.0 * (n1 as f64 * (n1 as f64 / n).ln() + n0 as f64 * (n0 as f64 / n).ln());
    let fit = LogitFit {
        coefficients: vec![alpha],
        std_errors: vec![se],
        neg2_log_likelihood: neg2ll,
        iterations: 0,
        converged: true,
        n_used: n0 + n1,
        column_names: vec!["(Intercept)".to_string()],
        warnings: Vec::new(),
    };
    let row = WaldRow::from_estimate("Constant", alpha, se)?;
    Ok((fit, row))
}

/// Fits the model by Newton–Raphson, stopping when the relative change in
/// −2LL falls below `tolerance` or `max_iter` is reached. After the
/// likelihood criterion fires, up to three refinement steps drive the
/// score vector Xᵀ(y − p̂) to numerical zero so the reported optimum
/// satisfies the score equations.
pub fn fit_logit_irls(
    design: &DesignMatrix,
    y: &[f64],
    tolerance: f64,
    max_iter: usize,
) -> Result<LogitFit> {
    let x = &design.values;
    if x.ncols() == 0 || x.nrows() == 0 {
        return Err(Error::EmptyDesign);
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, target has {}",
            x.nrows(),
            y.len()
        )));
    }
    check_binary(y)?;
    if !(tolerance > 0.0) {
        return Err(Error::BadArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }

    let n = x.nrows();
    let p = x.ncols();
    let yv = DVector::from_column_slice(y);
    let gradient_floor = 1e-9 * (1.0 + n as f64);

    let mut beta = DVector::zeros(p);
    let mut eta = x * &beta;
    let mut prev = neg2_log_likelihood(&eta, y);
    let mut iterations = 0usize;
    let mut converged = false;
    let mut warnings = Vec::new();
    let mut polishing = false;
    let mut polish_left = 3usize;

    while iterations < max_iter.max(1) {
        let probs = eta.map(sigmoid);
        let gradient = x.transpose() * (&yv - &probs);
        if polishing {
            if gradient.amax() <= gradient_floor || polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        let info = information_matrix(x, &probs);
        let l = cholesky(&info)
            .map_err(|j| Error::SingularInformation(design.columns[j].name.clone()))?;
        let step = cholesky_solve(&l, &gradient);
        beta += &step;
        iterations += 1;

        if beta.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            warnings.push(
                "coefficients diverged beyond ±25: the classes are (quasi-)separated and the \
                 maximum-likelihood estimate does not exist"
                    .to_string(),
            );
            converged = false;
            eta = x * &beta;
            break;
        }

        eta = x * &beta;
        let current = neg2_log_likelihood(&eta, y);
        let relative = (prev - current).abs() / prev.abs().max(1e-10);
        prev = current;
        if !polishing && relative < tolerance {
            converged = true;
            polishing = true;
        }
    }
    if !converged && warnings.is_empty() {
        warnings.push(format!(
            "reached max_iter = {max_iter} before the −2LL change fell below {tolerance}"
        ));
    }

    let probs = eta.map(sigmoid);
    let info = information_matrix(x, &probs);
    let std_errors = match cholesky(&info) {
        Ok(l) => {
            let mut ses = vec![0.0; p];
            for j in 0..p {
                let mut e = DVector::zeros(p);
                e[j] = 1.0;
                ses[j] = cholesky_solve(&l, &e)[j].sqrt();
            }
            ses
        }
        Err(_) => {
            warnings.push("information matrix singular at the final estimate; standard errors unavailable".to_string());
            vec![f64::NAN; p]
        }
    };

    Ok(LogitFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        neg2_log_likelihood: prev,
        iterations,
        converged,
        n_used: n,
        column_names: design.column_names(),
        warnings,
    })
}

/// Per-row probabilities pᵢ = 1 / (1 + e^{−xᵢ·β}), clamped into (0, 1).
pub fn predict_prob(fit: &LogitFit, design: &DesignMatrix) -> Result<Vec<f64>> {
    if design.values.ncols() != fit.coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} columns, fit has {} coefficients",
            design.values.ncols(),
            fit.coefficients.len()
        )));
    }
    let beta = DVector::from_column_slice(&fit.coefficients);
    let eta = &design.values * beta;
    Ok(eta
        .iter()
        .map(|&e| sigmoid(e).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
        .collect())
}

/// Wald test rows, one per coefficient. Suppressed for non-converged fits.
pub fn wald_statistics(fit: &LogitFit) -> Result<Vec<WaldRow>> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    fit.coefficients
        .iter()
        .zip(fit.std_errors.iter())
        .zip(fit.column_names.iter())
        .map(|((&b, &se), name)| {
            let label = if name == "(Intercept)" { "Constant" } else { name };
            WaldRow::from_estimate(label, b, se)
        })
        .collect()
}
