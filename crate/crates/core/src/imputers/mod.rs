//! The six imputation engines behind a single contract: a pure function of
//! (table, spec) that fills every missing feature cell, never touches
//! observed cells, and never reads label or identifier columns.
//!
//! `impute_fit_on` restricts the statistics, donor pools, and models to a
//! training row subset while still filling the whole table; the evaluation
//! harness uses it to keep test rows out of the fitted state.

mod em;
mod mice;
mod missforest;

pub use em::{fit_gaussian_em, gaussian_conditional_mean, GaussianEmFit};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learners::HeomMetric;
use crate::rng::{cell_uniform, mix2};
use crate::table::{ColumnKind, DataTable, Value};

/// Salt separating the random imputer's per-cell stream from the amputation
/// stream when a caller reuses one seed for both.
const SALT_RANDOM_IMPUTE: u64 = 0x494D_5055_5445;

#[derive(Debug, Clone, PartialEq)]
pub enum ImputeMethod {
    MeanMode,
    Random,
    Knn { k: usize },
    Mice { m: usize, iterations: usize, noise: bool },
    Em { max_iter: usize, tol: f64 },
    MissForest { n_trees: usize, max_iter: usize },
}

impl ImputeMethod {
    /// CLI name -> method with its default hyperparameters.
    pub fn from_name(name: &str) -> Result<ImputeMethod> {
        Ok(match name {
            "mean_mode" => ImputeMethod::MeanMode,
            "random" => ImputeMethod::Random,
            "knn" => ImputeMethod::Knn { k: 5 },
            "mice" => ImputeMethod::Mice {
                m: 20,
                iterations: 10,
                noise: true,
            },
            "em" => ImputeMethod::Em {
                max_iter: 100,
                tol: 1e-4,
            },
            "missforest" => ImputeMethod::MissForest {
                n_trees: 100,
                max_iter: 10,
            },
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown imputation method {other:?}"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ImputeMethod::MeanMode => "mean_mode",
            ImputeMethod::Random => "random",
            ImputeMethod::Knn { .. } => "knn",
            ImputeMethod::Mice { .. } => "mice",
            ImputeMethod::Em { .. } => "em",
            ImputeMethod::MissForest { .. } => "missforest",
        }
    }

    /// Row label used in benchmark reports.
    pub fn display_name(&self) -> &'static str {
        match self {
            ImputeMethod::MeanMode => "Mean",
            ImputeMethod::Random => "Random",
            ImputeMethod::Knn { .. } => "KNN",
            ImputeMethod::Mice { .. } => "MICE",
            ImputeMethod::Em { .. } => "EM",
            ImputeMethod::MissForest { .. } => "RF",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParam(msg.into()));
        match self {
            ImputeMethod::Knn { k } if *k < 1 => bad("knn k must be >= 1"),
            ImputeMethod::Mice { m, iterations, .. } if *m < 1 || *iterations < 1 => {
                bad("mice m and iterations must be >= 1")
            }
            ImputeMethod::Em { max_iter, tol }
                if *max_iter < 1 || !tol.is_finite() || *tol <= 0.0 =>
            {
                bad("em needs max_iter >= 1 and tol > 0")
            }
            ImputeMethod::MissForest { n_trees, max_iter } if *n_trees < 1 || *max_iter < 1 => {
                bad("missforest needs n_trees >= 1 and max_iter >= 1")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputerSpec {
    pub method: ImputeMethod,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub iteration: usize,
    pub statistic: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationResult {
    /// One completion per table, m of them for MICE.
    pub completions: Vec<DataTable>,
    pub diagnostics: Vec<DiagnosticRecord>,
}

impl ImputationResult {
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("iteration,statistic,value\n");
        for d in &self.diagnostics {
            out.push_str(&format!("{},{},{}\n", d.iteration, d.statistic, d.value));
        }
        out
    }
}

/// Impute with models, donor pools, and statistics drawn from the whole table.
pub fn impute(table: &DataTable, spec: &ImputerSpec) -> Result<ImputationResult> {
    let all: Vec<usize> = (0..table.n_rows()).collect();
    impute_fit_on(table, spec, &all)
}

/// Impute with fitted state restricted to `fit_rows`; missing cells of every
/// row are filled. Errors with `all-missing-column` when a feature column has
/// no observed value among the fit rows.
pub fn impute_fit_on(
    table: &DataTable,
    spec: &ImputerSpec,
    fit_rows: &[usize],
) -> Result<ImputationResult> {
    spec.method.validate()?;
    let feature_cols = table.feature_cols();
    let offenders: Vec<String> = feature_cols
        .iter()
        .filter(|&&c| !fit_rows.iter().any(|&r| table.is_observed(r, c)))
        .map(|&c| table.schema()[c].name.clone())
        .collect();
    if !offenders.is_empty() {
        return Err(Error::AllMissingColumn { columns: offenders });
    }

    // nothing to do: every completion is the table itself
    if table.missing_feature_cells() == 0 {
        let m = match spec.method {
            ImputeMethod::Mice { m, .. } => m,
            _ => 1,
        };
        return Ok(ImputationResult {
            completions: vec![table.clone(); m],
            diagnostics: Vec::new(),
        });
    }

    match &spec.method {
        ImputeMethod::MeanMode => Ok(ImputationResult {
            completions: vec![mean_mode_fill(table, fit_rows)],
            diagnostics: Vec::new(),
        }),
        ImputeMethod::Random => Ok(ImputationResult {
            completions: vec![random_impute(
                table,
                fit_rows,
                mix2(spec.seed, SALT_RANDOM_IMPUTE),
            )],
            diagnostics: Vec::new(),
        }),
        ImputeMethod::Knn { k } => Ok(ImputationResult {
            completions: vec![knn_impute(table, fit_rows, *k)?],
            diagnostics: Vec::new(),
        }),
        ImputeMethod::Mice {
            m,
            iterations,
            noise,
        } => {
            let (completions, diagnostics) =
                mice::mice_impute(table, fit_rows, *m, *iterations, *noise, spec.seed)?;
            Ok(ImputationResult {
                completions,
                diagnostics,
            })
        }
        ImputeMethod::Em { max_iter, tol } => {
            let (completion, diagnostics) = em::em_impute(table, fit_rows, *max_iter, *tol)?;
            Ok(ImputationResult {
                completions: vec![completion],
                diagnostics,
            })
        }
        ImputeMethod::MissForest { n_trees, max_iter } => {
            let (completion, diagnostics) =
                missforest::missforest_impute(table, fit_rows, *n_trees, *max_iter, spec.seed)?;
            Ok(ImputationResult {
                completions: vec![completion],
                diagnostics,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

pub(crate) fn observed_mean(table: &DataTable, col: usize, rows: &[usize]) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for &r in rows {
        if let Some(x) = table.num(r, col) {
            sum += x;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Observed mode; ties resolved to the first level in schema order.
pub(crate) fn observed_mode(table: &DataTable, col: usize, rows: &[usize]) -> Option<u32> {
    let n_levels = table.schema()[col].kind.levels().len();
    let mut counts = vec![0usize; n_levels];
    let mut any = false;
    for &r in rows {
        if let Some(l) = table.cat(r, col) {
            counts[l as usize] += 1;
            any = true;
        }
    }
    if !any {
        return None;
    }
    let mut best = 0;
    for (l, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = l;
        }
    }
    Some(best as u32)
}

/// Column means/modes from `fit_rows` applied to every missing feature cell.
pub(crate) fn mean_mode_fill(table: &DataTable, fit_rows: &[usize]) -> DataTable {
    let mut out = table.clone();
    for c in table.feature_cols() {
        if table.observed_count(c) == table.n_rows() {
            continue;
        }
        let fill = match &table.schema()[c].kind {
            ColumnKind::Numerical { .. } => {
                Value::Num(observed_mean(table, c, fit_rows).expect("checked non-empty"))
            }
            ColumnKind::Categorical { .. } => {
                Value::Cat(observed_mode(table, c, fit_rows).expect("checked non-empty"))
            }
        };
        for r in 0..table.n_rows() {
            if !table.is_observed(r, c) {
                out.set(r, c, fill);
            }
        }
    }
    out
}

/// Uniform draws (with replacement) from each column's observed fit values;
/// the draw for cell (r, c) is a pure function of (seed, r, c).
fn random_impute(table: &DataTable, fit_rows: &[usize], seed: u64) -> DataTable {
    let mut out = table.clone();
    for c in table.feature_cols() {
        if table.observed_count(c) == table.n_rows() {
            continue;
        }
        let pool: Vec<Value> = fit_rows
            .iter()
            .filter_map(|&r| table.value(r, c))
            .collect();
        for r in 0..table.n_rows() {
            if !table.is_observed(r, c) {
                let u = cell_uniform(seed, r, c);
                let idx = ((u * pool.len() as f64) as usize).min(pool.len() - 1);
                out.set(r, c, pool[idx]);
            }
        }
    }
    out
}

/// HEOM nearest-donor imputation. Donors for column j are the fit rows
/// observed in j; distances are computed on the original (masked) table, so a
/// missing comparison contributes the HEOM penalty of 1.
///
/// Distances from a probe row are computed once and reused for every missing
/// column of that row; taking the first k donors observed in the target
/// column from the (distance, row id)-sorted candidates is exactly
/// `knn_query` restricted to that column.
fn knn_impute(table: &DataTable, fit_rows: &[usize], k: usize) -> Result<DataTable> {
    let metric = HeomMetric::over_features(table);
    let feature_cols = table.feature_cols();
    let incomplete: Vec<usize> = (0..table.n_rows())
        .filter(|&r| feature_cols.iter().any(|&c| !table.is_observed(r, c)))
        .collect();

    let updates: Result<Vec<Vec<(usize, usize, Value)>>> = incomplete
        .par_iter()
        .map(|&row| {
            let mut scored: Vec<(f64, usize)> = fit_rows
                .iter()
                .filter(|&&cand| cand != row)
                .map(|&cand| (metric.distance(table, row, cand), cand))
                .collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

            let mut row_updates = Vec::new();
            for &c in &feature_cols {
                if table.is_observed(row, c) {
                    continue;
                }
                let value = match &table.schema()[c].kind {
                    ColumnKind::Numerical { .. } => {
                        let mut sum = 0.0;
                        let mut taken = 0usize;
                        for &(_, d) in &scored {
                            if let Some(x) = table.num(d, c) {
                                sum += x;
                                taken += 1;
                                if taken == k {
                                    break;
                                }
                            }
                        }
                        if taken == 0 {
                            return Err(Error::NoDonors {
                                row,
                                column: table.schema()[c].name.clone(),
                            });
                        }
                        Value::Num(sum / taken as f64)
                    }
                    ColumnKind::Categorical { levels } => {
                        let mut counts = vec![0usize; levels.len()];
                        let mut taken = 0usize;
                        for &(_, d) in &scored {
                            if let Some(l) = table.cat(d, c) {
                                counts[l as usize] += 1;
                                taken += 1;
                                if taken == k {
                                    break;
                                }
                            }
                        }
                        if taken == 0 {
                            return Err(Error::NoDonors {
                                row,
                                column: table.schema()[c].name.clone(),
                            });
                        }
                        let mut best = 0;
                        for (l, &cnt) in counts.iter().enumerate().skip(1) {
                            if cnt > counts[best] {
                                best = l;
                            }
                        }
                        Value::Cat(best as u32)
                    }
                };
                row_updates.push((row, c, value));
            }
            Ok(row_updates)
        })
        .collect();

    let mut out = table.clone();
    for (r, c, v) in updates?.into_iter().flatten() {
        out.set(r, c, v);
    }
    Ok(out)
}
