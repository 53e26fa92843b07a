//! Iterative random-forest imputation.
//!
//! Starts from a mean/mode fill, then sweeps the incomplete columns in
//! increasing-missingness order, fitting a forest per column on the rows
//! where it is observed and predicting its missing rows. After each sweep the
//! normalized squared change of numerical imputations (delta_num) and the
//! fraction of changed categorical imputations (delta_cat) are computed; the
//! loop stops when both increase relative to the previous sweep (types with
//! no imputed cells don't block the test) and returns the previous sweep's
//! completion, or runs through max_iter sweeps.

use crate::error::Result;
use crate::learners::{
    default_mtry, fit_forest, predict_forest_class, predict_forest_value, ForestParams,
};
use crate::rng::mix3;
use crate::table::{ColumnKind, DataTable, Value};

use super::{mean_mode_fill, DiagnosticRecord};

const MAX_DEPTH: usize = 30;
const MIN_LEAF_CLASSIFICATION: usize = 1;
const MIN_LEAF_REGRESSION: usize = 5;

pub(crate) fn missforest_impute(
    table: &DataTable,
    fit_rows: &[usize],
    n_trees: usize,
    max_iter: usize,
    seed: u64,
) -> Result<(DataTable, Vec<DiagnosticRecord>)> {
    let feature_cols = table.feature_cols();
    let mut targets: Vec<(usize, usize)> = feature_cols
        .iter()
        .map(|&c| (table.n_rows() - table.observed_count(c), c))
        .filter(|&(missing, _)| missing > 0)
        .collect();
    targets.sort_unstable();
    let targets: Vec<usize> = targets.into_iter().map(|(_, c)| c).collect();

    let num_cells: Vec<(usize, usize)> = imputed_cells(table, &targets, true);
    let cat_cells: Vec<(usize, usize)> = imputed_cells(table, &targets, false);

    let mut current = mean_mode_fill(table, fit_rows);
    let mut diagnostics = Vec::new();
    let mut prev_delta: Option<(Option<f64>, Option<f64>)> = None;

    for sweep in 1..=max_iter {
        let before = current.clone();
        for &target in &targets {
            let train_rows: Vec<usize> = fit_rows
                .iter()
                .copied()
                .filter(|&r| table.is_observed(r, target))
                .collect();
            let predictors: Vec<usize> = feature_cols
                .iter()
                .copied()
                .filter(|&c| c != target)
                .collect();
            let classification = matches!(
                table.schema()[target].kind,
                ColumnKind::Categorical { .. }
            );
            let params = ForestParams {
                n_trees,
                mtry: default_mtry(predictors.len()),
                min_leaf: if classification {
                    MIN_LEAF_CLASSIFICATION
                } else {
                    MIN_LEAF_REGRESSION
                },
                max_depth: MAX_DEPTH,
                seed: mix3(seed, sweep as u64, target as u64),
                bootstrap: true,
            };
            let model = fit_forest(&current, &train_rows, &predictors, target, params)?;
            for r in 0..table.n_rows() {
                if table.is_observed(r, target) {
                    continue;
                }
                let value = if classification {
                    Value::Cat(predict_forest_class(&model, &current, r).0)
                } else {
                    Value::Num(predict_forest_value(&model, &current, r))
                };
                current.set(r, target, value);
            }
        }

        let delta_num = delta_numerical(&current, &before, &num_cells);
        let delta_cat = delta_categorical(&current, &before, &cat_cells);
        if let Some(d) = delta_num {
            diagnostics.push(DiagnosticRecord {
                iteration: sweep,
                statistic: "missforest_delta_num".into(),
                value: d,
            });
        }
        if let Some(d) = delta_cat {
            diagnostics.push(DiagnosticRecord {
                iteration: sweep,
                statistic: "missforest_delta_cat".into(),
                value: d,
            });
        }

        if let Some((prev_num, prev_cat)) = prev_delta {
            let num_worse = match (delta_num, prev_num) {
                (Some(cur), Some(prev)) => cur > prev,
                _ => true, // absent type never blocks stopping
            };
            let cat_worse = match (delta_cat, prev_cat) {
                (Some(cur), Some(prev)) => cur > prev,
                _ => true,
            };
            if num_worse && cat_worse {
                // this sweep degraded both criteria; keep the previous state
                current = before;
                break;
            }
        }
        prev_delta = Some((delta_num, delta_cat));
    }
    Ok((current, diagnostics))
}

fn imputed_cells(table: &DataTable, targets: &[usize], numerical: bool) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for &c in targets {
        if table.schema()[c].kind.is_numerical() != numerical {
            continue;
        }
        for r in 0..table.n_rows() {
            if !table.is_observed(r, c) {
                cells.push((r, c));
            }
        }
    }
    cells
}

fn delta_numerical(
    current: &DataTable,
    before: &DataTable,
    cells: &[(usize, usize)],
) -> Option<f64> {
    if cells.is_empty() {
        return None;
    }
    let mut change = 0.0;
    let mut scale = 0.0;
    for &(r, c) in cells {
        let new = current.num(r, c).expect("imputed");
        let old = before.num(r, c).expect("imputed");
        change += (new - old) * (new - old);
        scale += new * new;
    }
    Some(if scale > 0.0 {
        change / scale
    } else if change > 0.0 {
        f64::INFINITY
    } else {
        0.0
    })
}

fn delta_categorical(
    current: &DataTable,
    before: &DataTable,
    cells: &[(usize, usize)],
) -> Option<f64> {
    if cells.is_empty() {
        return None;
    }
    let changed = cells
        .iter()
        .filter(|&&(r, c)| current.cat(r, c) != before.cat(r, c))
        .count();
    Some(changed as f64 / cells.len() as f64)
}
