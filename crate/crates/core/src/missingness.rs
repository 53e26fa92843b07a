//! Missingness injection (MCAR / MAR / MNAR), the synthetic mixed-type data
//! generator, and row partitioning into tracks.
//!
//! Per-cell randomness is derived counter-style from (seed, row, col), so an
//! injection is a pure function of (table, mechanism) regardless of execution
//! schedule.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::cross::TrackSet;
use crate::error::{Error, Result};
use crate::rng::{cell_uniform, stream};
use crate::table::{ColumnRole, ColumnSchema, DataTable, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismKind {
    /// Every feature cell is masked independently with probability `rate`.
    Mcar { rate: f64 },
    /// Cells of `target_col` are masked with probability proportional to the
    /// percentile rank of the row's `cond_col` value.
    Mar {
        target_col: String,
        cond_col: String,
        rate: f64,
    },
    /// Like MAR but ranked on the target column's own pre-masking value.
    Mnar { target_col: String, rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissingnessMechanism {
    pub kind: MechanismKind,
    pub seed: u64,
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
        return Err(Error::InvalidParam(format!(
            "missingness rate {rate} outside [0,1]"
        )));
    }
    Ok(())
}

/// Ordinal percentile ranks (ties broken by row id) of a fully observed
/// column, scaled to (0, 1].
fn percentile_ranks(table: &DataTable, col: usize) -> Vec<f64> {
    let n = table.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let va = table.value(a, col).expect("ranked column must be observed");
        let vb = table.value(b, col).expect("ranked column must be observed");
        let ord = match (va, vb) {
            (Value::Num(x), Value::Num(y)) => x.partial_cmp(&y).unwrap(),
            (Value::Cat(x), Value::Cat(y)) => x.cmp(&y),
            _ => unreachable!("mixed kinds in one column"),
        };
        ord.then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; n];
    for (pos, &row) in order.iter().enumerate() {
        ranks[row] = (pos + 1) as f64 / n as f64;
    }
    ranks
}

/// Inject missingness into the feature cells of a table. Observed values are
/// never altered and already-missing cells are never unmasked; label and
/// identifier columns are never masked.
pub fn inject(table: &DataTable, mech: &MissingnessMechanism) -> Result<DataTable> {
    let mut out = table.clone();
    match &mech.kind {
        MechanismKind::Mcar { rate } => {
            check_rate(*rate)?;
            for c in table.feature_cols() {
                for r in 0..table.n_rows() {
                    if out.is_observed(r, c) && cell_uniform(mech.seed, r, c) < *rate {
                        out.set_missing(r, c);
                    }
                }
            }
        }
        MechanismKind::Mar {
            target_col,
            cond_col,
            rate,
        } => {
            check_rate(*rate)?;
            if target_col == cond_col {
                return Err(Error::InvalidParam(
                    "MAR cond_col must differ from target_col".into(),
                ));
            }
            let target = table
                .column_index(target_col)
                .ok_or_else(|| Error::UnknownColumn(target_col.clone()))?;
            let cond = table
                .column_index(cond_col)
                .ok_or_else(|| Error::UnknownColumn(cond_col.clone()))?;
            if table.schema()[target].role != ColumnRole::Feature {
                return Err(Error::InvalidParam(format!(
                    "target column {target_col:?} is not a feature"
                )));
            }
            if (0..table.n_rows()).any(|r| !table.is_observed(r, cond)) {
                return Err(Error::InvalidParam(format!(
                    "MAR cond column {cond_col:?} has missing values"
                )));
            }
            mask_by_rank(&mut out, target, &percentile_ranks(table, cond), *rate, mech.seed);
        }
        MechanismKind::Mnar { target_col, rate } => {
            check_rate(*rate)?;
            let target = table
                .column_index(target_col)
                .ok_or_else(|| Error::UnknownColumn(target_col.clone()))?;
            if table.schema()[target].role != ColumnRole::Feature {
                return Err(Error::InvalidParam(format!(
                    "target column {target_col:?} is not a feature"
                )));
            }
            if (0..table.n_rows()).any(|r| !table.is_observed(r, target)) {
                return Err(Error::InvalidParam(format!(
                    "MNAR target column {target_col:?} must be complete before masking"
                )));
            }
            mask_by_rank(&mut out, target, &percentile_ranks(table, target), *rate, mech.seed);
        }
    }
    Ok(out)
}

/// Mask cell i of `col` with probability clamp(rate * r_i / mean(r), 0, 1).
fn mask_by_rank(out: &mut DataTable, col: usize, ranks: &[f64], rate: f64, seed: u64) {
    let n = ranks.len();
    if n == 0 {
        return;
    }
    let mean_rank = (n + 1) as f64 / (2.0 * n as f64);
    for (r, &rank) in ranks.iter().enumerate() {
        let p = (rate * rank / mean_rank).clamp(0.0, 1.0);
        if out.is_observed(r, col) && cell_uniform(seed, r, col) < p {
            out.set_missing(r, col);
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Generator spec for a correlated mixed-type table with a binary label.
/// All columns are derived from a shared equicorrelated latent Gaussian;
/// categorical columns are equal-mass quantile bins of their latent.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_rows: usize,
    pub n_numerical: usize,
    pub n_categorical: usize,
    pub levels_per_categorical: usize,
    pub correlation: f64,
    pub label_coefficients: Vec<f64>,
    pub label_noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let p = self.n_numerical + self.n_categorical;
        if self.n_rows == 0 || p == 0 {
            return Err(Error::InvalidParam(
                "synthetic table needs at least one row and one feature".into(),
            ));
        }
        if self.n_categorical > 0 && self.levels_per_categorical < 2 {
            return Err(Error::InvalidParam(
                "levels_per_categorical must be at least 2".into(),
            ));
        }
        if self.correlation.abs() > 0.99 {
            return Err(Error::InvalidParam(format!(
                "correlation {} outside [-0.99, 0.99]",
                self.correlation
            )));
        }
        if p > 1 && self.correlation <= -1.0 / (p as f64 - 1.0) {
            return Err(Error::InvalidParam(format!(
                "equicorrelation {} is infeasible for {p} features",
                self.correlation
            )));
        }
        if self.label_coefficients.len() != p {
            return Err(Error::InvalidParam(format!(
                "label_coefficients has length {}, expected {p}",
                self.label_coefficients.len()
            )));
        }
        if self.label_noise < 0.0 || !self.label_noise.is_finite() {
            return Err(Error::InvalidParam("label_noise must be >= 0".into()));
        }
        Ok(())
    }
}

/// Deterministically generate a complete table. Column layout:
/// `num_0..`, then `cat_0..`, then the binary `label`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<DataTable> {
    spec.validate()?;
    let p = spec.n_numerical + spec.n_categorical;

    let sigma = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { spec.correlation });
    let chol = Cholesky::new(sigma).ok_or_else(|| {
        Error::InvalidParam(format!(
            "equicorrelation {} is not positive definite for {p} features",
            spec.correlation
        ))
    })?;
    let lower = chol.l();

    let levels: Vec<String> = (0..spec.levels_per_categorical)
        .map(|i| format!("v{i}"))
        .collect();
    let level_refs: Vec<&str> = levels.iter().map(|s| s.as_str()).collect();
    let mut schema = Vec::with_capacity(p + 1);
    for j in 0..spec.n_numerical {
        schema.push(ColumnSchema::numerical(&format!("num_{j}"), ColumnRole::Feature));
    }
    for j in 0..spec.n_categorical {
        schema.push(ColumnSchema::categorical(
            &format!("cat_{j}"),
            &level_refs,
            ColumnRole::Feature,
        ));
    }
    schema.push(ColumnSchema::categorical("label", &["0", "1"], ColumnRole::Label));

    // equal-mass bin edges on the latent scale
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let edges: Vec<f64> = (1..spec.levels_per_categorical)
        .map(|k| normal.inverse_cdf(k as f64 / spec.levels_per_categorical as f64))
        .collect();

    let mut table = DataTable::with_rows(schema, spec.n_rows)?;
    let mut rng = stream(spec.seed);
    let mut eps = DVector::zeros(p);
    for r in 0..spec.n_rows {
        for j in 0..p {
            eps[j] = rng.sample(StandardNormal);
        }
        let z = &lower * &eps;
        let mut eta = 0.0;
        for j in 0..p {
            eta += spec.label_coefficients[j] * z[j];
            if j < spec.n_numerical {
                table.set(r, j, Value::Num(z[j]));
            } else {
                let level = edges.iter().filter(|&&e| z[j] > e).count() as u32;
                table.set(r, j, Value::Cat(level));
            }
        }
        let noise: f64 = rng.sample(StandardNormal);
        eta += spec.label_noise * noise;
        let prob = 1.0 / (1.0 + (-eta).exp());
        let u: f64 = rng.random();
        table.set(r, p, Value::Cat(if u < prob { 1 } else { 0 }));
    }
    table.derive_open_ranges();
    Ok(table)
}

// ---------------------------------------------------------------------------
// Track splitting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct TrackDef {
    pub rows: usize,
    pub observed_features: Vec<String>,
}

/// Contiguous row partition plus the feature subset each track observes.
/// File format: one track per line, `rows|feat1;feat2;...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSpec {
    pub tracks: Vec<TrackDef>,
}

impl TrackSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut tracks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (rows_str, feats) = line.split_once('|').ok_or_else(|| {
                Error::InvalidParam(format!("track line {}: expected rows|features", i + 1))
            })?;
            let rows = rows_str.trim().parse::<usize>().map_err(|_| {
                Error::InvalidParam(format!("track line {}: bad row count {rows_str:?}", i + 1))
            })?;
            let observed_features = feats
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string())
                .collect();
            tracks.push(TrackDef {
                rows,
                observed_features,
            });
        }
        if tracks.is_empty() {
            return Err(Error::InvalidParam("track spec has no tracks".into()));
        }
        Ok(TrackSpec { tracks })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.tracks {
            out.push_str(&format!("{}|{}\n", t.rows, t.observed_features.join(";")));
        }
        out
    }
}

/// Partition rows contiguously into tracks; features outside a track's
/// observed set become wholly missing in that track. All tracks keep the
/// union schema so they stay aligned by column name.
pub fn split_tracks(table: &DataTable, spec: &TrackSpec) -> Result<TrackSet> {
    let total: usize = spec.tracks.iter().map(|t| t.rows).sum();
    if total != table.n_rows() {
        return Err(Error::InvalidParam(format!(
            "track row counts sum to {total}, table has {} rows",
            table.n_rows()
        )));
    }
    let feature_cols = table.feature_cols();
    let mut tracks = Vec::with_capacity(spec.tracks.len());
    let mut start = 0;
    for def in &spec.tracks {
        let mut observed = vec![false; table.n_cols()];
        for name in &def.observed_features {
            let c = table
                .column_index(name)
                .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
            if table.schema()[c].role != ColumnRole::Feature {
                return Err(Error::InvalidParam(format!(
                    "track feature {name:?} is not a feature column"
                )));
            }
            observed[c] = true;
        }
        let rows: Vec<usize> = (start..start + def.rows).collect();
        let mut slice = table.select_rows(&rows);
        for &c in &feature_cols {
            if !observed[c] {
                for r in 0..slice.n_rows() {
                    slice.set_missing(r, c);
                }
            }
        }
        tracks.push(slice);
        start += def.rows;
    }
    TrackSet::from_aligned(tracks)
}
