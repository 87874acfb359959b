//! Binary-choice logistic regression, the sensitivity-analysis counterpart
//! of the linear log-odds model.
//!
//! The main pipeline regresses a confidence-derived logit; this mode instead
//! models the chosen option directly: P(choice = A) = sigmoid(x' beta),
//! fitted by iteratively reweighted least squares. It discards confidence
//! information, so it is reported alongside, never instead of, the linear
//! fit.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::dependent_columns;
use crate::error::EstimatorError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub column_names: Vec<String>,
    pub coefficients: DVector<f64>,
    /// Inverse Fisher information at the optimum.
    pub covariance: DMatrix<f64>,
    pub log_likelihood: f64,
    pub n_observations: usize,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 100;
const LL_TOL: f64 = 1e-10;

/// Fits `P(chose_a) = sigmoid(x' beta)` by Newton iterations.
///
/// Perfectly separated data drives coefficients toward infinity; iteration
/// then stops on the likelihood plateau and the huge standard errors make
/// the degeneracy visible rather than erroring out.
pub fn fit_logistic(
    x: &DMatrix<f64>,
    column_names: &[String],
    chose_a: &[bool],
) -> Result<LogisticFit, EstimatorError> {
    let n = x.nrows();
    let p = x.ncols();
    if n == 0 {
        return Err(EstimatorError::EmptyInput);
    }
    if chose_a.len() != n {
        return Err(EstimatorError::DimensionMismatch(format!(
            "{n} design rows but {} outcomes",
            chose_a.len()
        )));
    }
    if column_names.len() != p {
        return Err(EstimatorError::DimensionMismatch(format!(
            "{p} design columns but {} names",
            column_names.len()
        )));
    }
    if n <= p {
        return Err(EstimatorError::Estimability(format!(
            "{n} rows cannot identify {p} coefficients"
        )));
    }
    let dependent = dependent_columns(x);
    if !dependent.is_empty() {
        let names: Vec<&str> = dependent.iter().map(|&j| column_names[j].as_str()).collect();
        return Err(EstimatorError::Estimability(format!(
            "columns [{}] are linear combinations of earlier columns",
            names.join(", ")
        )));
    }

    let y: DVector<f64> = DVector::from_iterator(n, chose_a.iter().map(|&b| f64::from(b)));
    let mut beta = DVector::zeros(p);
    let mut ll_prev = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut trace = Vec::new();

    loop {
        iterations += 1;
        let eta = x * &beta;
        let mu = eta.map(|e| 1.0 / (1.0 + (-e).exp()));
        let ll = (0..n)
            .map(|i| {
                let m = mu[i].clamp(1e-300, 1.0 - 1e-16);
                if chose_a[i] { m.ln() } else { (1.0 - m).ln() }
            })
            .sum::<f64>();
        trace.push((iterations as f64, ll));

        // Fisher information X' diag(mu(1-mu)) X, with weights floored so a
        // separated fit stays solvable.
        let mut xtwx = DMatrix::zeros(p, p);
        for i in 0..n {
            let w = (mu[i] * (1.0 - mu[i])).max(1e-10);
            let xi = x.row(i).transpose();
            xtwx.ger(w, &xi, &xi, 1.0);
        }
        let chol = Cholesky::new(xtwx).ok_or_else(|| {
            EstimatorError::Estimability("Fisher information is not positive definite".into())
        })?;

        if (ll - ll_prev).abs() < LL_TOL {
            // beta is the point ll was evaluated at; chol holds its information.
            return Ok(LogisticFit {
                column_names: column_names.to_vec(),
                coefficients: beta,
                covariance: chol.inverse(),
                log_likelihood: ll,
                n_observations: n,
                iterations,
            });
        }
        if iterations >= MAX_ITERATIONS {
            trace.drain(..trace.len().saturating_sub(32));
            return Err(EstimatorError::NonConvergence {
                iterations: MAX_ITERATIONS,
                trace,
            });
        }
        let score = x.transpose() * (&y - &mu);
        beta += chol.solve(&score);
        ll_prev = ll;
    }
}
