//! From-scratch supervised learners used inside the model-based imputers and
//! as downstream benchmark classifiers, plus the HEOM distance and exact
//! nearest-neighbor search.

pub mod linear;
pub mod nb;
pub mod tree;

pub use linear::{
    fit_logistic, fit_ridge, predict_logistic, Encoding, LinearModel, LogisticClassifier,
    LogisticParams, RidgeModel,
};
pub use nb::{fit_nb, predict_nb, NbModel};
pub use tree::{
    default_mtry, fit_forest, fit_tree, predict_forest_class, predict_forest_value,
    predict_tree_class, predict_tree_value, ForestModel, ForestParams, TreeModel, TreeParams,
};

use crate::error::{Error, Result};
use crate::table::{ColumnKind, ColumnRole, DataTable, Value};

/// Index of the largest entry, lowest index on ties.
pub fn argmax_tie_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Heterogeneous Euclidean-Overlap Metric over a fixed column subset with
/// schema ranges resolved up front. Per column: 1 if either cell is missing;
/// otherwise overlap (0/1) for categoricals and range-normalized absolute
/// difference for numericals (0 when the range is empty or unknown).
pub struct HeomMetric {
    cols: Vec<usize>,
    inv_ranges: Vec<f64>, // 0.0 disables the column's contribution
}

impl HeomMetric {
    pub fn over_features(table: &DataTable) -> Self {
        Self::over_columns(table, &table.feature_cols())
    }

    pub fn over_columns(table: &DataTable, cols: &[usize]) -> Self {
        let inv_ranges = cols
            .iter()
            .map(|&c| match &table.schema()[c].kind {
                ColumnKind::Categorical { .. } => 0.0,
                kind => match kind.range() {
                    Some(r) if r > 0.0 => 1.0 / r,
                    _ => 0.0,
                },
            })
            .collect();
        HeomMetric {
            cols: cols.to_vec(),
            inv_ranges,
        }
    }

    pub fn distance(&self, table: &DataTable, a: usize, b: usize) -> f64 {
        let mut sum = 0.0;
        for (&c, &inv_range) in self.cols.iter().zip(&self.inv_ranges) {
            let d = match (table.value(a, c), table.value(b, c)) {
                (Some(Value::Num(x)), Some(Value::Num(y))) => (x - y).abs() * inv_range,
                (Some(Value::Cat(x)), Some(Value::Cat(y))) if x == y => 0.0,
                (Some(Value::Cat(_)), Some(Value::Cat(_))) => 1.0,
                _ => 1.0, // either cell missing
            };
            sum += d * d;
        }
        sum.sqrt()
    }
}

/// HEOM distance between two rows over the table's feature columns.
pub fn heom_distance(table: &DataTable, a: usize, b: usize) -> f64 {
    HeomMetric::over_features(table).distance(table, a, b)
}

/// Neighbors ordered by (distance, row id), at most k of them.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub neighbors: Vec<(usize, f64)>,
}

/// Exact k nearest candidates to `probe` by HEOM over the feature columns.
/// Candidates equal to the probe row are excluded; with `restrict_to`, only
/// candidates observed in that column qualify.
pub fn knn_query(
    table: &DataTable,
    candidates: &[usize],
    probe: usize,
    k: usize,
    restrict_to: Option<usize>,
) -> Result<NeighborResult> {
    let metric = HeomMetric::over_features(table);
    knn_query_with(table, &metric, candidates, probe, k, restrict_to)
}

/// `knn_query` against a prebuilt metric (hot path for imputers).
pub fn knn_query_with(
    table: &DataTable,
    metric: &HeomMetric,
    candidates: &[usize],
    probe: usize,
    k: usize,
    restrict_to: Option<usize>,
) -> Result<NeighborResult> {
    assert!(k >= 1, "k must be at least 1");
    let mut scored: Vec<(usize, f64)> = Vec::new();
    for &cand in candidates {
        if cand == probe {
            continue;
        }
        if let Some(col) = restrict_to {
            if !table.is_observed(cand, col) {
                continue;
            }
        }
        scored.push((cand, metric.distance(table, probe, cand)));
    }
    if scored.is_empty() {
        return Err(Error::NoDonors {
            row: probe,
            column: restrict_to
                .map(|c| table.schema()[c].name.clone())
                .unwrap_or_default(),
        });
    }
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(NeighborResult { neighbors: scored })
}

/// Majority vote over the k nearest labeled candidates; ties go to the lowest
/// class index. Returns the label and the vote fractions per label level.
pub fn knn_classify(
    table: &DataTable,
    candidates: &[usize],
    probe: usize,
    k: usize,
) -> Result<(u32, Vec<f64>)> {
    let label = table.label_col()?;
    if table.schema()[label].role != ColumnRole::Label {
        unreachable!();
    }
    let n_levels = table.schema()[label].kind.levels().len();
    let result = knn_query(table, candidates, probe, k, Some(label))?;
    let mut votes = vec![0.0; n_levels];
    for &(row, _) in &result.neighbors {
        let l = table.cat(row, label).expect("restricted to observed labels");
        votes[l as usize] += 1.0;
    }
    let total: f64 = votes.iter().sum();
    for v in votes.iter_mut() {
        *v /= total;
    }
    let label_idx = argmax_tie_lowest(&votes) as u32;
    Ok((label_idx, votes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{ColumnSchema, ColumnKind};
    use rand::Rng;

    fn mixed_table(rows: usize, seed: u64) -> DataTable {
        // 3 numerical (ranges derived), 2 categorical, 1 label; some cells missing
        let schema = vec![
            ColumnSchema::numerical("a", ColumnRole::Feature),
            ColumnSchema::numerical("b", ColumnRole::Feature),
            ColumnSchema::numerical("c", ColumnRole::Feature),
            ColumnSchema::categorical("d", &["x", "y", "z"], ColumnRole::Feature),
            ColumnSchema::categorical("e", &["p", "q"], ColumnRole::Feature),
            ColumnSchema::categorical("label", &["0", "1"], ColumnRole::Label),
        ];
        let mut t = DataTable::with_rows(schema, rows).unwrap();
        let mut rng = crate::rng::stream(seed);
        for r in 0..rows {
            for c in 0..3 {
                if rng.random::<f64>() > 0.15 {
                    t.set(r, c, Value::Num(rng.random::<f64>() * 10.0 - 5.0));
                }
            }
            for c in 3..5 {
                if rng.random::<f64>() > 0.15 {
                    let levels = t.schema()[c].kind.levels().len() as u32;
                    t.set(r, c, Value::Cat(rng.random_range(0..levels)));
                }
            }
            t.set(r, 5, Value::Cat(rng.random_range(0..2)));
        }
        t.derive_open_ranges();
        t
    }

    #[test]
    fn heom_zero_on_identical_complete_rows() {
        let mut t = mixed_table(4, 1);
        for c in 0..3 {
            t.set(0, c, Value::Num(1.0));
            t.set(1, c, Value::Num(1.0));
        }
        for c in 3..5 {
            t.set(0, c, Value::Cat(0));
            t.set(1, c, Value::Cat(0));
        }
        assert_eq!(heom_distance(&t, 0, 1), 0.0);
    }

    #[test]
    fn heom_all_mutually_missing_is_sqrt_d() {
        let schema = vec![
            ColumnSchema::numerical("a", ColumnRole::Feature),
            ColumnSchema::numerical("b", ColumnRole::Feature),
            ColumnSchema::numerical("c", ColumnRole::Feature),
        ];
        let t = DataTable::with_rows(schema, 2).unwrap();
        assert!((heom_distance(&t, 0, 1) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn heom_hand_computed_mixed_pair() {
        // numerical with range 10, categorical; a=(2,"x"), b=(7,"y")
        let schema = vec![
            ColumnSchema {
                name: "n".into(),
                kind: ColumnKind::Numerical {
                    min: Some(0.0),
                    max: Some(10.0),
                },
                role: ColumnRole::Feature,
            },
            ColumnSchema::categorical("c", &["x", "y"], ColumnRole::Feature),
        ];
        let mut t = DataTable::with_rows(schema, 2).unwrap();
        t.set(0, 0, Value::Num(2.0));
        t.set(0, 1, Value::Cat(0));
        t.set(1, 0, Value::Num(7.0));
        t.set(1, 1, Value::Cat(1));
        let d = heom_distance(&t, 0, 1);
        assert!((d - 1.25f64.sqrt()).abs() < 1e-12, "d = {d}");
        assert!((d - 1.1180).abs() < 1e-4);
    }

    #[test]
    fn heom_symmetry_and_nonnegativity() {
        let t = mixed_table(30, 2);
        for a in 0..30 {
            for b in 0..30 {
                let d = heom_distance(&t, a, b);
                assert!(d >= 0.0);
                assert_eq!(d, heom_distance(&t, b, a));
            }
        }
    }

    #[test]
    fn knn_query_matches_brute_force_oracle() {
        for seed in 0..30 {
            let t = mixed_table(50, 100 + seed);
            let candidates: Vec<usize> = (0..50).collect();
            for probe in [0usize, 7, 23] {
                let got = knn_query(&t, &candidates, probe, 5, None).unwrap();
                // oracle: full pairwise sort
                let mut all: Vec<(usize, f64)> = candidates
                    .iter()
                    .filter(|&&c| c != probe)
                    .map(|&c| (c, heom_distance(&t, probe, c)))
                    .collect();
                all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
                all.truncate(5);
                assert_eq!(got.neighbors, all, "seed {seed} probe {probe}");
            }
        }
    }

    #[test]
    fn knn_query_saturation_duplicates_and_errors() {
        let mut t = mixed_table(6, 3);
        // make row 2 a duplicate of row 0, fully observed
        for c in 0..3 {
            t.set(0, c, Value::Num(c as f64));
            t.set(2, c, Value::Num(c as f64));
        }
        for c in 3..5 {
            t.set(0, c, Value::Cat(1));
            t.set(2, c, Value::Cat(1));
        }
        let candidates: Vec<usize> = (0..6).collect();
        let res = knn_query(&t, &candidates, 0, 3, None).unwrap();
        assert_eq!(res.neighbors[0].0, 2);
        assert_eq!(res.neighbors[0].1, 0.0);

        // k larger than candidate count returns everything
        let res = knn_query(&t, &candidates, 0, 100, None).unwrap();
        assert_eq!(res.neighbors.len(), 5);

        // zero candidates -> no-donors
        assert!(matches!(
            knn_query(&t, &[], 0, 1, None),
            Err(Error::NoDonors { .. })
        ));
    }

    #[test]
    fn knn_classify_votes_and_breaks_ties_low() {
        let t = {
            let schema = vec![
                ColumnSchema::numerical("x", ColumnRole::Feature),
                ColumnSchema::categorical("label", &["0", "1"], ColumnRole::Label),
            ];
            let mut t = DataTable::with_rows(schema, 5).unwrap();
            let xs = [0.0, 0.1, 0.2, 5.0, 5.1];
            let ys = [1u32, 1, 0, 0, 1];
            for r in 0..5 {
                t.set(r, 0, Value::Num(xs[r]));
                t.set(r, 1, Value::Cat(ys[r]));
            }
            t.derive_open_ranges();
            t
        };
        let candidates: Vec<usize> = (0..5).collect();
        // probe row 2: neighbors {1,0,3} have labels {1,1,0} -> majority 1
        let (label, probs) = knn_classify(&t, &candidates, 2, 3).unwrap();
        assert_eq!(label, 1);
        assert!((probs[1] - 2.0 / 3.0).abs() < 1e-12);
        // k=1: rows 0 and 2 are equidistant from the probe; the lower row id
        // wins the tie and contributes its label
        let (label, _) = knn_classify(&t, &candidates, 1, 1).unwrap();
        assert_eq!(label, 1);
        // k=2 vote tie {0, 1} -> lowest class index
        let (label, _) = knn_classify(&t, &candidates, 3, 2).unwrap();
        assert_eq!(label, 0);
    }
}
