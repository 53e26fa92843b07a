//! Gaussian/categorical naive Bayes with Laplace smoothing.

use crate::error::{Error, Result};
use crate::table::{ColumnKind, DataTable};

use super::argmax_tie_lowest;

const SD_FLOOR: f64 = 1e-9;
const LAPLACE_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
enum NbFeature {
    /// Per-class mean and (floored) standard deviation.
    Gaussian { mean: Vec<f64>, sd: Vec<f64> },
    /// Per-class, per-level log probability, Laplace-smoothed. Levels never
    /// seen within a class get the smoothed-zero count.
    Categorical { log_prob: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub feature_cols: Vec<usize>,
    pub target_col: usize,
    pub priors: Vec<f64>,
    feats: Vec<NbFeature>,
}

pub fn fit_nb(
    table: &DataTable,
    rows: &[usize],
    feature_cols: &[usize],
    target_col: usize,
) -> Result<NbModel> {
    if rows.is_empty() {
        return Err(Error::InvalidParam("empty training set".into()));
    }
    let n_classes = match &table.schema()[target_col].kind {
        ColumnKind::Categorical { levels } => levels.len(),
        ColumnKind::Numerical { .. } => {
            return Err(Error::InvalidParam("NB target must be categorical".into()))
        }
    };
    let mut class_rows: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for &r in rows {
        let c = table.cat(r, target_col).expect("observed target") as usize;
        class_rows[c].push(r);
    }
    let priors: Vec<f64> = class_rows
        .iter()
        .map(|cr| cr.len() as f64 / rows.len() as f64)
        .collect();

    let mut feats = Vec::with_capacity(feature_cols.len());
    for &col in feature_cols {
        match &table.schema()[col].kind {
            ColumnKind::Numerical { .. } => {
                let mut mean = vec![0.0; n_classes];
                let mut sd = vec![1.0; n_classes];
                for (c, cr) in class_rows.iter().enumerate() {
                    if cr.is_empty() {
                        continue; // prior 0; parameters never used
                    }
                    let n = cr.len() as f64;
                    let m = cr
                        .iter()
                        .map(|&r| table.num(r, col).expect("complete features"))
                        .sum::<f64>()
                        / n;
                    let var = cr
                        .iter()
                        .map(|&r| {
                            let d = table.num(r, col).expect("complete features") - m;
                            d * d
                        })
                        .sum::<f64>()
                        / n;
                    mean[c] = m;
                    sd[c] = var.sqrt().max(SD_FLOOR);
                }
                feats.push(NbFeature::Gaussian { mean, sd });
            }
            ColumnKind::Categorical { levels } => {
                let n_levels = levels.len();
                let mut log_prob = vec![vec![0.0; n_levels]; n_classes];
                for (c, cr) in class_rows.iter().enumerate() {
                    let mut counts = vec![0.0; n_levels];
                    for &r in cr {
                        counts[table.cat(r, col).expect("complete features") as usize] += 1.0;
                    }
                    let denom = cr.len() as f64 + LAPLACE_ALPHA * n_levels as f64;
                    for l in 0..n_levels {
                        log_prob[c][l] = ((counts[l] + LAPLACE_ALPHA) / denom).ln();
                    }
                }
                feats.push(NbFeature::Categorical { log_prob });
            }
        }
    }
    Ok(NbModel {
        feature_cols: feature_cols.to_vec(),
        target_col,
        priors,
        feats,
    })
}

/// Predicted label (argmax posterior, ties to the lowest class index) and the
/// normalized posterior over all classes.
pub fn predict_nb(model: &NbModel, table: &DataTable, row: usize) -> (u32, Vec<f64>) {
    let n_classes = model.priors.len();
    let mut log_post: Vec<f64> = model
        .priors
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect();
    for (fi, &col) in model.feature_cols.iter().enumerate() {
        match &model.feats[fi] {
            NbFeature::Gaussian { mean, sd } => {
                let x = table.num(row, col).expect("complete features");
                for c in 0..n_classes {
                    if log_post[c].is_finite() {
                        let z = (x - mean[c]) / sd[c];
                        log_post[c] +=
                            -0.5 * z * z - sd[c].ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
                    }
                }
            }
            NbFeature::Categorical { log_prob } => {
                let l = table.cat(row, col).expect("complete features") as usize;
                for c in 0..n_classes {
                    if log_post[c].is_finite() {
                        log_post[c] += log_prob[c][l];
                    }
                }
            }
        }
    }
    let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_post.iter().map(|&lp| (lp - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    (argmax_tie_lowest(&probs) as u32, probs)
}
