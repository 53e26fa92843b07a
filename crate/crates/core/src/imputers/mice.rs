//! Multiple imputation by chained equations.
//!
//! Each of the m completions starts from a mean/mode fill and cycles through
//! the incomplete columns in increasing-missingness order, regressing each on
//! the current completion of the others: ridge for numerical targets,
//! one-vs-rest logistic for categorical targets. With noise on, numerical
//! imputations get a residual-sd Gaussian draw and categorical ones are
//! sampled from the predicted class probabilities; with noise off the cycle
//! is fully deterministic and every completion is identical.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Result;
use crate::learners::{
    fit_logistic, fit_ridge, predict_logistic, Encoding, LogisticParams,
};
use crate::rng::{mix2, stream};
use crate::table::{ColumnKind, DataTable, Value};

use super::{mean_mode_fill, DiagnosticRecord};

const RIDGE_L2: f64 = 1e-4;
const LOGISTIC_PARAMS: LogisticParams = LogisticParams {
    l2: 1e-4,
    max_iter: 25,
    tol: 1e-6,
};

pub(crate) fn mice_impute(
    table: &DataTable,
    fit_rows: &[usize],
    m: usize,
    iterations: usize,
    noise: bool,
    seed: u64,
) -> Result<(Vec<DataTable>, Vec<DiagnosticRecord>)> {
    let feature_cols = table.feature_cols();

    // incomplete columns, visited in increasing-missingness order
    let mut targets: Vec<(usize, usize)> = feature_cols
        .iter()
        .map(|&c| (table.n_rows() - table.observed_count(c), c))
        .filter(|&(missing, _)| missing > 0)
        .collect();
    targets.sort_unstable();
    let targets: Vec<usize> = targets.into_iter().map(|(_, c)| c).collect();

    let completions: Result<Vec<DataTable>> = (0..m)
        .into_par_iter()
        .map(|idx| single_chain(table, fit_rows, &targets, iterations, noise, mix2(seed, idx as u64)))
        .collect();
    let completions = completions?;
    let diagnostics = (0..m)
        .map(|idx| DiagnosticRecord {
            iteration: idx,
            statistic: "mice_cycles".into(),
            value: iterations as f64,
        })
        .collect();
    Ok((completions, diagnostics))
}

fn single_chain(
    table: &DataTable,
    fit_rows: &[usize],
    targets: &[usize],
    iterations: usize,
    noise: bool,
    seed: u64,
) -> Result<DataTable> {
    let feature_cols = table.feature_cols();
    let mut rng = stream(seed);
    let mut current = mean_mode_fill(table, fit_rows);

    for _cycle in 0..iterations {
        for &target in targets {
            let train_rows: Vec<usize> = fit_rows
                .iter()
                .copied()
                .filter(|&r| table.is_observed(r, target))
                .collect();
            let missing_rows: Vec<usize> = (0..table.n_rows())
                .filter(|&r| !table.is_observed(r, target))
                .collect();
            let predictors: Vec<usize> = feature_cols
                .iter()
                .copied()
                .filter(|&c| c != target)
                .collect();

            match &table.schema()[target].kind {
                ColumnKind::Numerical { .. } => {
                    let encoding = Encoding::fit(&current, &train_rows, &predictors);
                    let y: Vec<f64> = train_rows
                        .iter()
                        .map(|&r| current.num(r, target).expect("observed target"))
                        .collect();
                    let model = fit_ridge(&current, &train_rows, &encoding, &y, RIDGE_L2)?;
                    let residual_sd = {
                        let sse: f64 = train_rows
                            .iter()
                            .zip(&y)
                            .map(|(&r, &yr)| {
                                let e = model.decision(&current, r) - yr;
                                e * e
                            })
                            .sum();
                        (sse / train_rows.len() as f64).sqrt()
                    };
                    for &r in &missing_rows {
                        let mut pred = model.decision(&current, r);
                        if noise {
                            let draw: f64 = rng.sample(StandardNormal);
                            pred += residual_sd * draw;
                        }
                        current.set(r, target, Value::Num(pred));
                    }
                }
                ColumnKind::Categorical { .. } => {
                    let mut observed_classes: Vec<u32> = train_rows
                        .iter()
                        .map(|&r| current.cat(r, target).expect("observed target"))
                        .collect();
                    observed_classes.sort_unstable();
                    observed_classes.dedup();
                    if observed_classes.len() < 2 {
                        let only = observed_classes[0];
                        for &r in &missing_rows {
                            current.set(r, target, Value::Cat(only));
                        }
                        continue;
                    }
                    let model =
                        fit_logistic(&current, &train_rows, &predictors, target, LOGISTIC_PARAMS)?;
                    for &r in &missing_rows {
                        let (label, probs) = predict_logistic(&model, &current, r);
                        let pick = if noise {
                            sample_class(&probs, rng.random::<f64>())
                        } else {
                            label
                        };
                        current.set(r, target, Value::Cat(pick));
                    }
                }
            }
        }
    }
    Ok(current)
}

fn sample_class(probs: &[f64], u: f64) -> u32 {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (l, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = l;
            cum += p;
            if u < cum {
                return l as u32;
            }
        }
    }
    last_positive as u32
}
