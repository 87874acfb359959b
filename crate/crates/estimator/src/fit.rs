//! Least-squares and random-intercept fits.
//!
//! Both fitters report the same restricted-likelihood scale so the boundary
//! likelihood-ratio test can compare them directly. With one grouping factor
//! and variance ratio `lambda = sigma2_intercept / sigma2_residual`, the
//! marginal covariance is `sigma2_residual * W(lambda)` where
//! `W = I + lambda * Z Z^T`, and the profiled restricted log-likelihood is
//!
//! ```text
//! ll(lambda) = -1/2 [ (n-p)(ln 2pi + ln s2 + 1)
//!                     + sum_k ln(1 + lambda n_k)
//!                     + ln |X^T W^-1 X| ],    s2 = rss_w / (n-p)
//! ```
//!
//! Ordinary least squares is the `lambda = 0` member of the family. The
//! random-intercept fit never forms `W` explicitly: `W^-1` acts on the
//! cross-products through per-group rank-one downdates, so each profile
//! evaluation costs `O(k p^2 + p^3)` regardless of `n`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::design::{check_full_rank, DesignData};
use crate::error::EstimatorError;

/// A fitted linear model, with or without a random intercept.
///
/// `covariance` is the fixed-effect covariance `sigma2 * (X^T W^-1 X)^-1`;
/// `log_likelihood` is restricted (REML), comparable across fits of the same
/// fixed-effects design and observation set only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub column_names: Vec<String>,
    pub coefficients: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub sigma2_residual: f64,
    pub sigma2_intercept: f64,
    pub log_likelihood: f64,
    pub n_observations: usize,
    pub n_subjects: usize,
    /// Golden-section iterations spent on the variance ratio; 0 when the
    /// optimum was taken directly from the search grid or the boundary.
    pub iterations: usize,
    /// True when `sigma2_intercept` was estimated at its boundary value 0.
    pub at_boundary: bool,
}

impl FitResult {
    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn residual_df(&self) -> f64 {
        (self.n_observations - self.n_params()) as f64
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        let j = self.column_names.iter().position(|c| c == name)?;
        Some(self.coefficients[j])
    }

    /// Standard error of coefficient `j` from the covariance diagonal.
    pub fn standard_error(&self, j: usize) -> f64 {
        self.covariance[(j, j)].max(0.0).sqrt()
    }

    /// Flat `term,estimate,std_error` CSV of the coefficients.
    pub fn coefficients_csv(&self) -> String {
        let mut out = String::from("term,estimate,std_error\n");
        for (j, name) in self.column_names.iter().enumerate() {
            out.push_str(&format!(
                "{name},{},{}\n",
                self.coefficients[j],
                self.standard_error(j)
            ));
        }
        out
    }
}

fn restricted_ll(n: usize, p: usize, sigma2: f64, logdet_w: f64, logdet_xtwx: f64) -> f64 {
    let df = (n - p) as f64;
    // Floor keeps the likelihood finite when the fixed effects interpolate y.
    let s2 = sigma2.max(f64::MIN_POSITIVE);
    -0.5 * (df * ((2.0 * PI).ln() + s2.ln() + 1.0) + logdet_w + logdet_xtwx)
}

/// Ordinary least squares via QR; the random-intercept variance is fixed at 0.
pub fn fit_ols(data: &DesignData) -> Result<FitResult, EstimatorError> {
    if data.n() == 0 {
        return Err(EstimatorError::EmptyInput);
    }
    check_full_rank(data)?;
    let (n, p) = (data.n(), data.p());

    let qr = data.x.clone().qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &data.y;
    let solve_failed =
        || EstimatorError::Estimability("triangular solve failed on a full-rank design".into());
    let coefficients = r.solve_upper_triangular(&qty).ok_or_else(solve_failed)?;

    let residuals = &data.y - &data.x * &coefficients;
    let sigma2 = residuals.norm_squared() / (n - p) as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(solve_failed)?;
    // Floor as in the mixed fit: interpolation gives tiny, not zero, errors.
    let covariance = (&r_inv * r_inv.transpose()) * sigma2.max(1e-300);
    // |X^T X| = prod r_ii^2 regardless of the QR sign convention.
    let logdet_xtx = 2.0 * r.diagonal().iter().map(|d| d.abs().ln()).sum::<f64>();

    Ok(FitResult {
        column_names: data.column_names.clone(),
        coefficients,
        covariance,
        sigma2_residual: sigma2,
        sigma2_intercept: 0.0,
        log_likelihood: restricted_ll(n, p, sigma2, 0.0, logdet_xtx),
        n_observations: n,
        n_subjects: data.n_groups(),
        iterations: 0,
        at_boundary: false,
    })
}

/// Cross-products that make a profile evaluation independent of `n`.
struct CrossProducts {
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
    group_x_sums: Vec<DVector<f64>>,
    group_y_sums: Vec<f64>,
    group_sizes: Vec<f64>,
    n: usize,
    p: usize,
}

impl CrossProducts {
    fn new(data: &DesignData) -> CrossProducts {
        let (n, p) = (data.n(), data.p());
        let k = data.n_groups();
        let xtx = data.x.transpose() * &data.x;
        let xty = data.x.transpose() * &data.y;
        let yty = data.y.norm_squared();
        let mut group_x_sums = vec![DVector::zeros(p); k];
        let mut group_y_sums = vec![0.0; k];
        let mut group_sizes = vec![0.0; k];
        for i in 0..n {
            let g = data.group_index[i];
            group_x_sums[g] += data.x.row(i).transpose();
            group_y_sums[g] += data.y[i];
            group_sizes[g] += 1.0;
        }
        CrossProducts { xtx, xty, yty, group_x_sums, group_y_sums, group_sizes, n, p }
    }
}

struct ProfilePoint {
    coefficients: DVector<f64>,
    a_chol: Cholesky<f64, Dyn>,
    sigma2: f64,
    ll: f64,
}

/// Solves the generalized least-squares problem at a fixed variance ratio.
fn profile(pre: &CrossProducts, lambda: f64) -> Result<ProfilePoint, EstimatorError> {
    let mut a = pre.xtx.clone();
    let mut b = pre.xty.clone();
    let mut y_quad = pre.yty;
    let mut logdet_w = 0.0;
    if lambda > 0.0 {
        for g in 0..pre.group_sizes.len() {
            let n_g = pre.group_sizes[g];
            let c = lambda / (1.0 + lambda * n_g);
            let s = &pre.group_x_sums[g];
            let t = pre.group_y_sums[g];
            a.ger(-c, s, s, 1.0);
            b.axpy(-c * t, s, 1.0);
            y_quad -= c * t * t;
            logdet_w += (1.0 + lambda * n_g).ln();
        }
    }

    let a_chol = Cholesky::new(a).ok_or_else(|| {
        EstimatorError::Estimability(format!(
            "weighted cross-product matrix is not positive definite at variance ratio {lambda}"
        ))
    })?;
    let coefficients = a_chol.solve(&b);
    let rss_w = (y_quad - coefficients.dot(&b)).max(0.0);
    let sigma2 = rss_w / (pre.n - pre.p) as f64;
    let logdet_a = 2.0 * a_chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let ll = restricted_ll(pre.n, pre.p, sigma2, logdet_w, logdet_a);
    Ok(ProfilePoint { coefficients, a_chol, sigma2, ll })
}

fn finish(
    data: &DesignData,
    point: ProfilePoint,
    lambda: f64,
    iterations: usize,
) -> FitResult {
    // The reported sigma2 stays as computed, but the covariance scale is
    // floored so an interpolating fit yields tiny positive standard errors
    // instead of exact zeros (which would be rounding artifacts).
    let mut covariance = point.a_chol.inverse() * point.sigma2.max(1e-300);
    // The inverse is symmetric in exact arithmetic; enforce it.
    covariance = (&covariance + covariance.transpose()) * 0.5;
    FitResult {
        column_names: data.column_names.clone(),
        coefficients: point.coefficients,
        covariance,
        sigma2_residual: point.sigma2,
        sigma2_intercept: lambda * point.sigma2,
        log_likelihood: point.ll,
        n_observations: data.n(),
        n_subjects: data.n_groups(),
        iterations,
        at_boundary: lambda == 0.0,
    }
}

const LL_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 500;

/// One-way random-intercept linear mixed model by profiled REML.
///
/// The variance ratio is bracketed on a geometric grid (0 plus 1e-6 * 4^j)
/// and refined by golden-section search; convergence is successive restricted
/// log-likelihoods differing by less than 1e-10. A boundary estimate of 0 is
/// a valid result. Non-convergence within 500 iterations is an error carrying
/// the recent (ratio, log-likelihood) trace.
pub fn fit_random_intercept(data: &DesignData) -> Result<FitResult, EstimatorError> {
    if data.n() == 0 {
        return Err(EstimatorError::EmptyInput);
    }
    check_full_rank(data)?;
    if data.n_groups() < 2 {
        return Err(EstimatorError::TooFewGroups(data.n_groups()));
    }

    let pre = CrossProducts::new(data);
    let base = profile(&pre, 0.0)?;

    // Fixed effects that interpolate y leave the profile flat in the ratio,
    // and the cross-product form computes rss by cancellation, so anything
    // below the cancellation floor (relative eps on y'y) is rounding noise:
    // report the boundary rather than chase it. DVs here are logits bounded
    // by the clamp, so a residual sd under ~1e-6 only arises from exact
    // generative identities, never from data.
    if base.sigma2 <= 1e-12 * (pre.yty / (pre.n - pre.p) as f64 + 1.0) {
        return Ok(finish(data, base, 0.0, 0));
    }

    let mut grid = vec![0.0];
    grid.extend((0..=31).map(|j| 1e-6 * 4f64.powi(j)));
    let mut best_idx = 0;
    let mut best_ll = base.ll;
    let mut grid_trace = vec![(0.0, base.ll)];
    for (idx, &lambda) in grid.iter().enumerate().skip(1) {
        let ll = profile(&pre, lambda).map_or(f64::NEG_INFINITY, |pt| pt.ll);
        grid_trace.push((lambda, ll));
        if ll > best_ll {
            best_ll = ll;
            best_idx = idx;
        }
    }
    if best_idx == 0 {
        return Ok(finish(data, base, 0.0, 0));
    }
    if best_idx == grid.len() - 1 {
        grid_trace.drain(..grid_trace.len().saturating_sub(32));
        return Err(EstimatorError::NonConvergence {
            iterations: 0,
            trace: grid_trace,
        });
    }

    // Golden-section refinement inside the bracketing grid cells.
    let eval = |lambda: f64| profile(&pre, lambda).map_or(f64::NEG_INFINITY, |pt| pt.ll);
    let golden: f64 = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (grid[best_idx - 1], grid[best_idx + 1]);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut trace = vec![(x1, f1), (x2, f2)];
    // Successive-iteration likelihoods stall by 0 whenever the newest point
    // loses to the retained one, so the 1e-10 improvement criterion is
    // applied over a 5-step window (interval shrink factor ~0.09): if five
    // shrinks buy less than the tolerance, the remaining gap to the max is
    // below it too.
    let mut best_history = vec![f1.max(f2)];
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            trace.drain(..trace.len().saturating_sub(32));
            return Err(EstimatorError::NonConvergence {
                iterations: MAX_ITERATIONS,
                trace,
            });
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = eval(x1);
            trace.push((x1, f1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = eval(x2);
            trace.push((x2, f2));
        }
        let best_now = f1.max(f2);
        best_history.push(best_now);
        let windowed_stall = best_history.len() > 5
            && (best_now - best_history[best_history.len() - 6]).abs() < LL_TOL;
        if windowed_stall || hi - lo <= 1e-12 * (1.0 + hi) {
            break;
        }
    }

    let lambda = if f1 >= f2 { x1 } else { x2 };
    let point = profile(&pre, lambda)?;
    Ok(finish(data, point, lambda, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    fn design(x: DMatrix<f64>, y: DVector<f64>, group_index: Vec<usize>) -> DesignData {
        let n_groups = group_index.iter().copied().max().map_or(0, |m| m + 1);
        DesignData {
            column_names: (0..x.ncols()).map(|j| format!("c{j}")).collect(),
            x,
            y,
            group_names: (0..n_groups).map(|g| format!("g{g}")).collect(),
            group_index,
        }
    }

    #[test]
    fn textbook_line_recovers_slope_and_intercept() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let y = DVector::from_column_slice(&[0.0, 1.0, 2.0]);
        let fit = fit_ols(&design(x, y, vec![0, 0, 0])).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], 1.0, epsilon = 1e-12);
        assert!(fit.sigma2_residual < 1e-24);
    }

    #[test]
    fn noiseless_recovery_is_exact_to_rounding() {
        // y = X beta* with beta* = (0.5, -1.25, 2.0)
        let n = 40;
        let mut x = DMatrix::zeros(n, 3);
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let a = (i as f64 * 0.37).sin();
            let b = (i as f64 * 0.11).cos();
            x[(i, 0)] = 1.0;
            x[(i, 1)] = a;
            x[(i, 2)] = b;
            y[i] = 0.5 - 1.25 * a + 2.0 * b;
        }
        let fit = fit_ols(&design(x, y, vec![0; n])).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[1], -1.25, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[2], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn ols_covariance_matches_closed_form_simple_regression() {
        // For x = (0,1,2) the closed-form (X^T X)^-1 is [[5/6,-1/2],[-1/2,1/2]].
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let y = DVector::from_column_slice(&[0.1, 0.9, 2.1]);
        let fit = fit_ols(&design(x, y, vec![0, 0, 0])).unwrap();
        let s2 = fit.sigma2_residual;
        assert_abs_diff_eq!(fit.covariance[(0, 0)], s2 * 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.covariance[(0, 1)], -s2 * 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.covariance[(1, 1)], s2 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficiency_is_an_error_naming_columns() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 4.0, 1.0, 3.0, 6.0, 1.0, 4.0, 8.0, 1.0, 5.0, 10.0]);
        let y = DVector::from_column_slice(&[1.0, 2.0, 3.0, 4.0]);
        let err = fit_ols(&design(x, y, vec![0; 4])).unwrap_err();
        match err {
            EstimatorError::Estimability(msg) => assert!(msg.contains("c2"), "{msg}"),
            other => panic!("expected Estimability, got {other:?}"),
        }
    }

    /// Deterministic xorshift so fixture data needs no RNG dependency here.
    struct Xs(u64);
    impl Xs {
        fn next_f64(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn gauss(&mut self) -> f64 {
            // Box-Muller; fine for test fixtures.
            let u = self.next_f64().max(1e-12);
            let v = self.next_f64();
            (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
        }
    }

    fn grouped_dataset(
        n_groups: usize,
        per_group: usize,
        group_sd: f64,
        resid_sd: f64,
        seed: u64,
    ) -> DesignData {
        let mut rng = Xs(seed | 1);
        let n = n_groups * per_group;
        let mut x = DMatrix::zeros(n, 2);
        let mut y = DVector::zeros(n);
        let mut group_index = Vec::with_capacity(n);
        let mut row = 0;
        for g in 0..n_groups {
            let offset = group_sd * rng.gauss();
            for _ in 0..per_group {
                let covariate = rng.next_f64() * 2.0 - 1.0;
                x[(row, 0)] = 1.0;
                x[(row, 1)] = covariate;
                y[row] = 0.3 + 0.9 * covariate + offset + resid_sd * rng.gauss();
                group_index.push(g);
                row += 1;
            }
        }
        design(x, y, group_index)
    }

    #[test]
    fn zero_group_variance_lands_on_the_boundary_and_matches_ols() {
        let data = grouped_dataset(8, 60, 0.0, 0.5, 99);
        let mixed = fit_random_intercept(&data).unwrap();
        let ols = fit_ols(&data).unwrap();
        assert!(mixed.at_boundary);
        assert_eq!(mixed.sigma2_intercept, 0.0);
        for j in 0..2 {
            assert_abs_diff_eq!(mixed.coefficients[j], ols.coefficients[j], epsilon = 1e-8);
        }
        assert_abs_diff_eq!(mixed.log_likelihood, ols.log_likelihood, epsilon = 1e-8);
    }

    #[test]
    fn strong_group_structure_is_recovered() {
        let data = grouped_dataset(20, 200, 0.7, 0.3, 1234);
        let fit = fit_random_intercept(&data).unwrap();
        assert!(!fit.at_boundary);
        // Generous bounds: 20 groups give a noisy variance estimate.
        assert!(fit.sigma2_intercept > 0.2 && fit.sigma2_intercept < 1.2, "{}", fit.sigma2_intercept);
        assert_abs_diff_eq!(fit.sigma2_residual, 0.09, epsilon = 0.02);
        assert_abs_diff_eq!(fit.coefficients[1], 0.9, epsilon = 0.05);
        assert!(fit.log_likelihood > fit_ols(&data).unwrap().log_likelihood);
    }

    #[test]
    fn single_group_is_a_precondition_error() {
        let data = grouped_dataset(1, 50, 0.0, 0.2, 7);
        assert!(matches!(
            fit_random_intercept(&data),
            Err(EstimatorError::TooFewGroups(1))
        ));
    }

    #[test]
    fn interpolating_fixed_effects_take_the_boundary_exit() {
        // y exactly linear in x: profile over the ratio is rounding noise.
        let n = 30;
        let mut x = DMatrix::zeros(n, 2);
        let mut y = DVector::zeros(n);
        let mut group_index = Vec::new();
        for i in 0..n {
            x[(i, 0)] = 1.0;
            x[(i, 1)] = i as f64;
            y[i] = 2.0 - 3.0 * i as f64;
            group_index.push(i % 3);
        }
        let fit = fit_random_intercept(&design(x, y, group_index)).unwrap();
        assert!(fit.at_boundary);
        assert_eq!(fit.sigma2_intercept, 0.0);
        assert!(fit.sigma2_residual < 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], -3.0, epsilon = 1e-9);
    }

    #[test]
    fn csv_export_lists_every_coefficient() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let y = DVector::from_column_slice(&[0.0, 1.0, 2.0]);
        let fit = fit_ols(&design(x, y, vec![0, 0, 0])).unwrap();
        let csv = fit.coefficients_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "term,estimate,std_error");
        assert!(lines[1].starts_with("c0,"));
        assert!(lines[2].starts_with("c1,"));
    }
}
