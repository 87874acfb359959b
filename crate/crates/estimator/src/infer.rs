//! Wald contrasts and the boundary likelihood-ratio test.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::EstimatorError;
use crate::fit::FitResult;

/// A linear contrast of fitted coefficients with its t-test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastResult {
    pub estimate: f64,
    pub standard_error: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

/// Likelihood-ratio test of the random-intercept variance.
///
/// The variance sits on the boundary of its parameter space under the null,
/// so the reference distribution is the 50:50 mixture of a point mass at 0
/// and chi-squared(1); the plain chi-squared(1) p-value is also reported for
/// comparison with conventions that ignore the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub chi2: f64,
    pub p_mixture: f64,
    pub p_chi2_1: f64,
    /// True when the raw statistic was negative from rounding and clamped to 0.
    pub clamped_negative: bool,
}

/// Tests `c' beta = 0` with residual degrees of freedom `n - p`.
pub fn wald_contrast(fit: &FitResult, c: &[f64]) -> Result<ContrastResult, EstimatorError> {
    if c.len() != fit.n_params() {
        return Err(EstimatorError::InvalidContrast(format!(
            "contrast has {} entries, fit has {} coefficients",
            c.len(),
            fit.n_params()
        )));
    }
    if c.iter().all(|&v| v == 0.0) {
        return Err(EstimatorError::InvalidContrast(
            "all-zero contrast tests nothing".into(),
        ));
    }
    let cv = DVector::from_column_slice(c);
    let estimate = cv.dot(&fit.coefficients);
    let variance = cv.dot(&(&fit.covariance * &cv));
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(EstimatorError::InvalidContrast(format!(
            "contrast variance {variance} is not positive"
        )));
    }
    let standard_error = variance.sqrt();
    let t_statistic = estimate / standard_error;
    let degrees_of_freedom = fit.residual_df();
    let dist = StudentsT::new(0.0, 1.0, degrees_of_freedom).map_err(|err| {
        EstimatorError::InvalidContrast(format!(
            "t reference with {degrees_of_freedom} degrees of freedom: {err}"
        ))
    })?;
    let p_value = 2.0 * (1.0 - dist.cdf(t_statistic.abs()));
    Ok(ContrastResult {
        estimate,
        standard_error,
        t_statistic,
        degrees_of_freedom,
        p_value,
    })
}

/// Compares a random-intercept fit against its fixed-effects-only null.
///
/// Both fits must be restricted likelihoods of the same design over the same
/// observations, and the null must not itself carry a random intercept.
pub fn lrt_random_intercept(
    full: &FitResult,
    null: &FitResult,
) -> Result<LrtResult, EstimatorError> {
    if full.column_names != null.column_names {
        return Err(EstimatorError::MismatchedFits(
            "fixed-effects columns differ between full and null fits".into(),
        ));
    }
    if full.n_observations != null.n_observations {
        return Err(EstimatorError::MismatchedFits(format!(
            "full fit has {} observations, null has {}",
            full.n_observations, null.n_observations
        )));
    }
    if null.sigma2_intercept != 0.0 {
        return Err(EstimatorError::MismatchedFits(
            "null fit carries a nonzero random-intercept variance".into(),
        ));
    }
    let raw = 2.0 * (full.log_likelihood - null.log_likelihood);
    let (chi2, clamped_negative) = if raw < 0.0 { (0.0, true) } else { (raw, false) };
    let dist = ChiSquared::new(1.0).expect("chi-squared(1) is a valid distribution");
    let survival = 1.0 - dist.cdf(chi2);
    Ok(LrtResult {
        chi2,
        p_mixture: 0.5 * survival,
        p_chi2_1: survival,
        clamped_negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    fn toy_fit() -> FitResult {
        FitResult {
            column_names: vec!["a".into(), "b".into()],
            coefficients: DVector::from_column_slice(&[2.0, -1.0]),
            covariance: DMatrix::from_row_slice(2, 2, &[0.04, 0.01, 0.01, 0.09]),
            sigma2_residual: 1.0,
            sigma2_intercept: 0.0,
            log_likelihood: -10.0,
            n_observations: 102,
            n_subjects: 1,
            iterations: 0,
            at_boundary: false,
        }
    }

    #[test]
    fn unit_contrast_matches_covariance_diagonal() {
        let fit = toy_fit();
        let c = wald_contrast(&fit, &[1.0, 0.0]).unwrap();
        assert_eq!(c.estimate, 2.0);
        assert_eq!(c.standard_error, 0.04f64.sqrt());
        assert_eq!(c.degrees_of_freedom, 100.0);
        let c2 = wald_contrast(&fit, &[0.0, 1.0]).unwrap();
        assert_eq!(c2.standard_error, 0.09f64.sqrt());
    }

    #[test]
    fn difference_contrast_uses_the_covariance_cross_term() {
        let fit = toy_fit();
        let c = wald_contrast(&fit, &[1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(c.estimate, 3.0, epsilon = 1e-15);
        // var = 0.04 + 0.09 - 2*0.01 = 0.11
        assert_abs_diff_eq!(c.standard_error, 0.11f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.t_statistic, 3.0 / 0.11f64.sqrt(), epsilon = 1e-12);
        assert!(c.p_value < 1e-12);
    }

    #[test]
    fn known_t_quantile_reproduces_textbook_p_value() {
        // t = 2.0 with 10 df has two-sided p = 0.07339, a standard table entry.
        let mut fit = toy_fit();
        fit.n_observations = 12;
        fit.covariance = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let c = wald_contrast(&fit, &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c.t_statistic, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.p_value, 0.07339, epsilon = 1e-5);
    }

    #[test]
    fn degenerate_contrasts_are_rejected() {
        let fit = toy_fit();
        assert!(matches!(
            wald_contrast(&fit, &[0.0, 0.0]),
            Err(EstimatorError::InvalidContrast(_))
        ));
        assert!(matches!(
            wald_contrast(&fit, &[1.0]),
            Err(EstimatorError::InvalidContrast(_))
        ));
        let mut zero_var = fit;
        zero_var.covariance = DMatrix::zeros(2, 2);
        assert!(matches!(
            wald_contrast(&zero_var, &[1.0, 0.0]),
            Err(EstimatorError::InvalidContrast(_))
        ));
    }

    #[test]
    fn identical_fits_give_mixture_p_of_one_half() {
        let fit = toy_fit();
        let lrt = lrt_random_intercept(&fit, &fit).unwrap();
        assert_eq!(lrt.chi2, 0.0);
        assert_eq!(lrt.p_mixture, 0.5);
        assert_eq!(lrt.p_chi2_1, 1.0);
        assert!(!lrt.clamped_negative);
    }

    #[test]
    fn known_chi2_value_reproduces_textbook_p() {
        // chi2(1) upper tail at 3.841 is 0.05.
        let mut full = toy_fit();
        let null = toy_fit();
        full.log_likelihood = null.log_likelihood + 3.841459 / 2.0;
        let lrt = lrt_random_intercept(&full, &null).unwrap();
        assert_abs_diff_eq!(lrt.p_chi2_1, 0.05, epsilon = 1e-4);
        assert_abs_diff_eq!(lrt.p_mixture, 0.025, epsilon = 1e-4);
    }

    #[test]
    fn negative_noise_is_clamped_and_flagged() {
        let mut full = toy_fit();
        let null = toy_fit();
        full.log_likelihood = null.log_likelihood - 1e-9;
        let lrt = lrt_random_intercept(&full, &null).unwrap();
        assert_eq!(lrt.chi2, 0.0);
        assert!(lrt.clamped_negative);
        assert_eq!(lrt.p_mixture, 0.5);
    }

    #[test]
    fn mismatched_fits_are_rejected() {
        let full = toy_fit();
        let mut other_columns = toy_fit();
        other_columns.column_names = vec!["a".into(), "c".into()];
        assert!(matches!(
            lrt_random_intercept(&full, &other_columns),
            Err(EstimatorError::MismatchedFits(_))
        ));
        let mut other_n = toy_fit();
        other_n.n_observations = 50;
        assert!(matches!(
            lrt_random_intercept(&full, &other_n),
            Err(EstimatorError::MismatchedFits(_))
        ));
        let mut ri_null = toy_fit();
        ri_null.sigma2_intercept = 0.2;
        assert!(matches!(
            lrt_random_intercept(&full, &ri_null),
            Err(EstimatorError::MismatchedFits(_))
        ));
    }
}
