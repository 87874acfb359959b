//! Design matrices for the social-influence model.
//!
//! The full model uses reference coding with legal as the baseline task:
//! task indicator columns for medical and investment, the three evidence
//! terms, and every task-by-evidence interaction. A coefficient on a bare
//! evidence column is therefore the legal-task weight; the other tasks'
//! weights are sums of base and interaction coefficients.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use cascade_core::ScenarioId;

use crate::error::EstimatorError;
use crate::observation::ObservationRow;

/// Columns of the full three-task design, in matrix order.
pub const COLUMN_NAMES: [&str; 12] = [
    "intercept",
    "medical",
    "investment",
    "i_pi",
    "i_h",
    "i_ai",
    "medical:i_pi",
    "investment:i_pi",
    "medical:i_h",
    "investment:i_h",
    "medical:i_ai",
    "investment:i_ai",
];

/// Columns of the single-task submodel, in matrix order.
pub const TASK_COLUMN_NAMES: [&str; 4] = ["intercept", "i_pi", "i_h", "i_ai"];

/// A design matrix with its response and grouping bookkeeping.
///
/// `group_index[i]` indexes `group_names` for row `i`; groups are the
/// distinct subjects, sorted by name so construction is order-independent.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub column_names: Vec<String>,
    pub group_names: Vec<String>,
    pub group_index: Vec<usize>,
}

impl DesignData {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_groups(&self) -> usize {
        self.group_names.len()
    }
}

fn group_bookkeeping(rows: &[&ObservationRow]) -> (Vec<String>, Vec<usize>) {
    let names: BTreeSet<&str> = rows.iter().map(|row| row.subject.as_str()).collect();
    let index_of: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(i, name)| (*name, i)).collect();
    let group_names = names.iter().map(|name| name.to_string()).collect();
    let group_index = rows
        .iter()
        .map(|row| index_of[row.subject.as_str()])
        .collect();
    (group_names, group_index)
}

/// Builds the full 12-column design. Requires rows from all three tasks;
/// with a task absent its indicator column would be zero or collinear, so
/// callers with partial data use [`build_task_design`] instead.
pub fn build_design(rows: &[ObservationRow]) -> Result<DesignData, EstimatorError> {
    if rows.is_empty() {
        return Err(EstimatorError::EmptyInput);
    }
    let missing: Vec<ScenarioId> = ScenarioId::ALL
        .iter()
        .copied()
        .filter(|id| rows.iter().all(|row| row.scenario != *id))
        .collect();
    if !missing.is_empty() {
        return Err(EstimatorError::MissingTasks(missing));
    }

    let refs: Vec<&ObservationRow> = rows.iter().collect();
    let (group_names, group_index) = group_bookkeeping(&refs);
    let n = rows.len();
    let mut x = DMatrix::zeros(n, 12);
    let mut y = DVector::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let med = f64::from(row.scenario == ScenarioId::Medical);
        let inv = f64::from(row.scenario == ScenarioId::Investment);
        x[(i, 0)] = 1.0;
        x[(i, 1)] = med;
        x[(i, 2)] = inv;
        x[(i, 3)] = row.i_private;
        x[(i, 4)] = row.i_human;
        x[(i, 5)] = row.i_ai;
        x[(i, 6)] = med * row.i_private;
        x[(i, 7)] = inv * row.i_private;
        x[(i, 8)] = med * row.i_human;
        x[(i, 9)] = inv * row.i_human;
        x[(i, 10)] = med * row.i_ai;
        x[(i, 11)] = inv * row.i_ai;
        y[i] = row.y;
    }

    Ok(DesignData {
        x,
        y,
        column_names: COLUMN_NAMES.iter().map(|s| s.to_string()).collect(),
        group_names,
        group_index,
    })
}

/// Builds the 4-column single-task submodel from that task's rows only.
pub fn build_task_design(
    rows: &[ObservationRow],
    task: ScenarioId,
) -> Result<DesignData, EstimatorError> {
    let refs: Vec<&ObservationRow> = rows.iter().filter(|row| row.scenario == task).collect();
    if refs.is_empty() {
        return Err(EstimatorError::EmptyInput);
    }
    let (group_names, group_index) = group_bookkeeping(&refs);
    let n = refs.len();
    let mut x = DMatrix::zeros(n, 4);
    let mut y = DVector::zeros(n);
    for (i, row) in refs.iter().enumerate() {
        x[(i, 0)] = 1.0;
        x[(i, 1)] = row.i_private;
        x[(i, 2)] = row.i_human;
        x[(i, 3)] = row.i_ai;
        y[i] = row.y;
    }

    Ok(DesignData {
        x,
        y,
        column_names: TASK_COLUMN_NAMES.iter().map(|s| s.to_string()).collect(),
        group_names,
        group_index,
    })
}

/// Indices of columns that are numerically linear combinations of earlier
/// columns, found by modified Gram-Schmidt with reorthogonalization. A zero
/// column counts as dependent.
pub(crate) fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    const REL_TOL: f64 = 1e-8;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..x.ncols() {
        let original = x.column(j).into_owned();
        let scale = original.norm();
        if scale == 0.0 {
            dependent.push(j);
            continue;
        }
        let mut v = original;
        for _ in 0..2 {
            for u in &basis {
                let coeff = u.dot(&v);
                v.axpy(-coeff, u, 1.0);
            }
        }
        if v.norm() <= REL_TOL * scale {
            dependent.push(j);
        } else {
            let norm = v.norm();
            basis.push(v / norm);
        }
    }
    dependent
}

/// Error naming the dependent columns of `data`, or `Ok(())` at full rank.
pub(crate) fn check_full_rank(data: &DesignData) -> Result<(), EstimatorError> {
    if data.n() <= data.p() {
        return Err(EstimatorError::Estimability(format!(
            "{} rows cannot identify {} coefficients with a residual degree of freedom",
            data.n(),
            data.p()
        )));
    }
    let dependent = dependent_columns(&data.x);
    if dependent.is_empty() {
        return Ok(());
    }
    let names: Vec<&str> = dependent
        .iter()
        .map(|&j| data.column_names[j].as_str())
        .collect();
    Err(EstimatorError::Estimability(format!(
        "columns [{}] are linear combinations of earlier columns",
        names.join(", ")
    )))
}
