//! EM imputation under a multivariate Gaussian on the numerical block.
//!
//! E-step: per missing pattern, fill with the Gaussian conditional mean and
//! accumulate the conditional covariance correction; M-step: re-estimate
//! (mu, Sigma) from the completed scatter. Iterates until the parameter
//! change drops below `tol`. Categorical cells are filled afterwards by the
//! mode within the HEOM neighborhood (k = 5) of the EM-completed numerical
//! profile; with no numerical columns at all this degrades to the global
//! mode.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learners::linear::cholesky_with_jitter;
use crate::learners::HeomMetric;
use crate::table::{ColumnKind, ColumnRole, DataTable, Value};

use super::{observed_mode, DiagnosticRecord};

const NEIGHBOR_K: usize = 5;
const LN_2PI: f64 = 1.837877066409345;

/// Conditional mean of the missing coordinates given the observed ones under
/// N(mu, sigma). This is the exact computation the E-step performs (Cholesky
/// solve, with diagonal jitter only if plain factorization fails).
pub fn gaussian_conditional_mean(
    mu: &[f64],
    sigma: &DMatrix<f64>,
    observed: &[usize],
    missing: &[usize],
    x_obs: &[f64],
) -> Option<Vec<f64>> {
    if observed.is_empty() {
        return Some(missing.iter().map(|&m| mu[m]).collect());
    }
    let d_o = observed.len();
    let d_m = missing.len();
    let sigma_oo = DMatrix::from_fn(d_o, d_o, |i, j| sigma[(observed[i], observed[j])]);
    let sigma_om = DMatrix::from_fn(d_o, d_m, |i, j| sigma[(observed[i], missing[j])]);
    let chol = cholesky_with_jitter(&sigma_oo)?;
    let dev = DVector::from_fn(d_o, |i, _| x_obs[i] - mu[observed[i]]);
    let beta = chol.solve(&dev); // Sigma_oo^-1 (x_o - mu_o)
    Some(
        (0..d_m)
            .map(|j| mu[missing[j]] + sigma_om.column(j).dot(&beta))
            .collect(),
    )
}

struct PatternBlock {
    rows: Vec<usize>,
    observed: Vec<usize>,
    missing: Vec<usize>,
}

fn group_by_pattern(
    table: &DataTable,
    rows: &[usize],
    num_cols: &[usize],
) -> Vec<PatternBlock> {
    // BTreeMap keeps accumulation order deterministic
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for &r in rows {
        let key: Vec<bool> = num_cols.iter().map(|&c| table.is_observed(r, c)).collect();
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rows)| {
            let observed = (0..key.len()).filter(|&i| key[i]).collect();
            let missing = (0..key.len()).filter(|&i| !key[i]).collect();
            PatternBlock {
                rows,
                observed,
                missing,
            }
        })
        .collect()
}

/// Fitted Gaussian over the numerical feature columns of a holey table.
#[derive(Debug, Clone)]
pub struct GaussianEmFit {
    /// Numerical feature columns the fit covers, in table order.
    pub columns: Vec<usize>,
    pub mean: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// Observed-data log-likelihood at the start of each iteration.
    pub loglik_trace: Vec<f64>,
}

/// Maximum-likelihood (mu, Sigma) for the numerical feature block under
/// MCAR/MAR missingness, by EM over all rows.
pub fn fit_gaussian_em(table: &DataTable, max_iter: usize, tol: f64) -> Result<GaussianEmFit> {
    let num_cols: Vec<usize> = table
        .feature_cols()
        .into_iter()
        .filter(|&c| table.schema()[c].kind.is_numerical())
        .collect();
    if num_cols.is_empty() {
        return Err(Error::InvalidParam("no numerical feature columns".into()));
    }
    let all: Vec<usize> = (0..table.n_rows()).collect();
    let (mu, sigma, diagnostics) = run_em(table, &all, &num_cols, max_iter, tol)?;
    Ok(GaussianEmFit {
        columns: num_cols,
        mean: mu.iter().cloned().collect(),
        covariance: sigma,
        loglik_trace: diagnostics
            .iter()
            .filter(|d| d.statistic == "em_loglik")
            .map(|d| d.value)
            .collect(),
    })
}

fn run_em(
    table: &DataTable,
    fit_rows: &[usize],
    num_cols: &[usize],
    max_iter: usize,
    tol: f64,
) -> Result<(DVector<f64>, DMatrix<f64>, Vec<DiagnosticRecord>)> {
    let mut diagnostics = Vec::new();
    {
        let d = num_cols.len();
        let n = fit_rows.len() as f64;

        // init: observed means and a diagonal of observed variances
        let mut mu = DVector::zeros(d);
        let mut sigma = DMatrix::zeros(d, d);
        for (j, &c) in num_cols.iter().enumerate() {
            let vals: Vec<f64> = fit_rows.iter().filter_map(|&r| table.num(r, c)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var =
                vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / vals.len() as f64;
            mu[j] = mean;
            sigma[(j, j)] = var.max(1e-9);
        }

        let blocks = group_by_pattern(table, fit_rows, num_cols);
        for iter in 0..max_iter {
            let mut sum_x = DVector::zeros(d);
            let mut sum_xx = DMatrix::zeros(d, d);
            let mut loglik = 0.0;
            for block in &blocks {
                let d_o = block.observed.len();
                let d_m = block.missing.len();
                if d_o == 0 {
                    // fully missing rows carry the prior mean and covariance
                    for _ in &block.rows {
                        sum_x += &mu;
                        sum_xx += &mu * mu.transpose() + &sigma;
                    }
                    continue;
                }
                let sigma_oo =
                    DMatrix::from_fn(d_o, d_o, |i, j| sigma[(block.observed[i], block.observed[j])]);
                let chol = cholesky_with_jitter(&sigma_oo)
                    .ok_or_else(|| Error::InvalidParam("EM covariance is singular".into()))?;
                let logdet = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
                let (sigma_om, cond_cov) = if d_m > 0 {
                    let sigma_om = DMatrix::from_fn(d_o, d_m, |i, j| {
                        sigma[(block.observed[i], block.missing[j])]
                    });
                    let sigma_mm = DMatrix::from_fn(d_m, d_m, |i, j| {
                        sigma[(block.missing[i], block.missing[j])]
                    });
                    let b = chol.solve(&sigma_om); // Sigma_oo^-1 Sigma_om
                    let cond = &sigma_mm - sigma_om.transpose() * &b;
                    (Some((sigma_om, b)), Some(cond))
                } else {
                    (None, None)
                };

                for &r in &block.rows {
                    let dev = DVector::from_fn(d_o, |i, _| {
                        table
                            .num(r, num_cols[block.observed[i]])
                            .expect("observed by pattern")
                            - mu[block.observed[i]]
                    });
                    let alpha = chol.solve(&dev);
                    loglik += -0.5 * (d_o as f64 * LN_2PI + logdet + dev.dot(&alpha));

                    let mut x_hat = DVector::zeros(d);
                    for (i, &j) in block.observed.iter().enumerate() {
                        x_hat[j] = dev[i] + mu[j];
                    }
                    if let Some((sigma_om, _)) = &sigma_om {
                        for (i, &j) in block.missing.iter().enumerate() {
                            x_hat[j] = mu[j] + sigma_om.column(i).dot(&alpha);
                        }
                    }
                    sum_x += &x_hat;
                    sum_xx += &x_hat * x_hat.transpose();
                    if let Some(cond) = &cond_cov {
                        for (a, &ja) in block.missing.iter().enumerate() {
                            for (b, &jb) in block.missing.iter().enumerate() {
                                sum_xx[(ja, jb)] += cond[(a, b)];
                            }
                        }
                    }
                }
            }

            diagnostics.push(DiagnosticRecord {
                iteration: iter,
                statistic: "em_loglik".into(),
                value: loglik,
            });

            let new_mu = &sum_x / n;
            let new_sigma = &sum_xx / n - &new_mu * new_mu.transpose();
            let delta_mu = (&new_mu - &mu).amax();
            let delta_sigma = (&new_sigma - &sigma).amax();
            mu = new_mu;
            sigma = new_sigma;
            if delta_mu < tol && delta_sigma < tol {
                break;
            }
        }
        let iterations = diagnostics.len();
        diagnostics.push(DiagnosticRecord {
            iteration: iterations.saturating_sub(1),
            statistic: "em_iterations".into(),
            value: iterations as f64,
        });
        Ok((mu, sigma, diagnostics))
    }
}

pub(crate) fn em_impute(
    table: &DataTable,
    fit_rows: &[usize],
    max_iter: usize,
    tol: f64,
) -> Result<(DataTable, Vec<DiagnosticRecord>)> {
    let num_cols: Vec<usize> = table
        .feature_cols()
        .into_iter()
        .filter(|&c| table.schema()[c].kind.is_numerical())
        .collect();
    let mut completed = table.clone();
    let mut diagnostics = Vec::new();

    if !num_cols.is_empty() {
        let (mu, sigma, diag) = run_em(table, fit_rows, &num_cols, max_iter, tol)?;
        diagnostics = diag;

        // final conditional-mean fill for every row, fit subset or not
        let all_rows: Vec<usize> = (0..table.n_rows()).collect();
        let mu_slice: Vec<f64> = mu.iter().cloned().collect();
        for block in group_by_pattern(table, &all_rows, &num_cols) {
            if block.missing.is_empty() {
                continue;
            }
            for &r in &block.rows {
                let x_obs: Vec<f64> = block
                    .observed
                    .iter()
                    .map(|&j| table.num(r, num_cols[j]).expect("observed by pattern"))
                    .collect();
                let fill =
                    gaussian_conditional_mean(&mu_slice, &sigma, &block.observed, &block.missing, &x_obs)
                        .ok_or_else(|| Error::InvalidParam("EM covariance is singular".into()))?;
                for (i, &j) in block.missing.iter().enumerate() {
                    completed.set(r, num_cols[j], Value::Num(fill[i]));
                }
            }
        }
    }

    fill_categoricals(table, &mut completed, fit_rows, &num_cols)?;
    Ok((completed, diagnostics))
}

/// Mode within the k-nearest HEOM neighborhood of the completed numerical
/// profile; global mode when there is no numerical profile to measure on.
fn fill_categoricals(
    original: &DataTable,
    completed: &mut DataTable,
    fit_rows: &[usize],
    num_cols: &[usize],
) -> Result<()> {
    let cat_cols: Vec<usize> = original
        .feature_cols()
        .into_iter()
        .filter(|&c| {
            original.schema()[c].role == ColumnRole::Feature
                && matches!(original.schema()[c].kind, ColumnKind::Categorical { .. })
                && original.observed_count(c) < original.n_rows()
        })
        .collect();
    if cat_cols.is_empty() {
        return Ok(());
    }

    if num_cols.is_empty() {
        for &c in &cat_cols {
            let mode = observed_mode(original, c, fit_rows)
                .expect("all-missing columns rejected upstream");
            for r in 0..original.n_rows() {
                if !original.is_observed(r, c) {
                    completed.set(r, c, Value::Cat(mode));
                }
            }
        }
        return Ok(());
    }

    let metric = HeomMetric::over_columns(completed, num_cols);
    let snapshot = completed.clone();
    let incomplete: Vec<usize> = (0..original.n_rows())
        .filter(|&r| cat_cols.iter().any(|&c| !original.is_observed(r, c)))
        .collect();
    let updates: Result<Vec<Vec<(usize, usize, u32)>>> = incomplete
        .par_iter()
        .map(|&row| {
            let mut row_updates = Vec::new();
            let mut scored: Vec<(f64, usize)> = fit_rows
                .iter()
                .filter(|&&d| d != row)
                .map(|&d| (metric.distance(&snapshot, row, d), d))
                .collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            for &c in &cat_cols {
                if original.is_observed(row, c) {
                    continue;
                }
                let n_levels = original.schema()[c].kind.levels().len();
                let mut counts = vec![0usize; n_levels];
                let mut taken = 0;
                for &(_, d) in &scored {
                    if let Some(l) = original.cat(d, c) {
                        counts[l as usize] += 1;
                        taken += 1;
                        if taken == NEIGHBOR_K {
                            break;
                        }
                    }
                }
                if taken == 0 {
                    return Err(Error::NoDonors {
                        row,
                        column: original.schema()[c].name.clone(),
                    });
                }
                let mut best = 0;
                for (l, &cnt) in counts.iter().enumerate().skip(1) {
                    if cnt > counts[best] {
                        best = l;
                    }
                }
                row_updates.push((row, c, best as u32));
            }
            Ok(row_updates)
        })
        .collect();
    for (r, c, l) in updates?.into_iter().flatten() {
        completed.set(r, c, Value::Cat(l));
    }
    Ok(())
}
