//! Cross-dataset imputation: align tracks under a union schema and fill
//! features that are wholly absent in one track from tracks where they are
//! observed, by imputing over the concatenated union table.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::imputers::{impute, DiagnosticRecord, ImputationResult, ImputerSpec};
use crate::table::{
    missingness_stats, ColumnKind, ColumnSchema, DataTable, MissingnessReport, TrackCounts, Value,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ObservedInTrack,
    AbsentInTrack,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ObservedInTrack => "observed-in-track",
            Provenance::AbsentInTrack => "absent-in-track",
        }
    }
}

/// Tracks sharing one union schema, with per-(track, column) provenance:
/// a column is absent-in-track exactly when it has zero observed cells there.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSet {
    tracks: Vec<DataTable>,
    union_schema: Vec<ColumnSchema>,
    provenance: Vec<Vec<Provenance>>,
}

impl TrackSet {
    /// Build from tracks that already share a schema (e.g. `split_tracks`).
    pub fn from_aligned(tracks: Vec<DataTable>) -> Result<TrackSet> {
        if tracks.is_empty() {
            return Err(Error::InvalidParam("track set has no tracks".into()));
        }
        let union_schema = tracks[0].schema().to_vec();
        for t in &tracks[1..] {
            if t.schema() != union_schema.as_slice() {
                return Err(Error::InvalidParam(
                    "tracks do not share the union schema".into(),
                ));
            }
        }
        let provenance = tracks
            .iter()
            .map(|t| {
                (0..t.n_cols())
                    .map(|c| {
                        if t.observed_count(c) == 0 {
                            Provenance::AbsentInTrack
                        } else {
                            Provenance::ObservedInTrack
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(TrackSet {
            tracks,
            union_schema,
            provenance,
        })
    }

    pub fn tracks(&self) -> &[DataTable] {
        &self.tracks
    }

    pub fn union_schema(&self) -> &[ColumnSchema] {
        &self.union_schema
    }

    pub fn provenance(&self, track: usize, col: usize) -> Provenance {
        self.provenance[track][col]
    }

    /// All tracks stacked in order; row order inside each track preserved.
    pub fn concatenate(&self) -> DataTable {
        let total: usize = self.tracks.iter().map(|t| t.n_rows()).sum();
        let mut out = DataTable::with_rows(self.union_schema.clone(), total)
            .expect("union schema already validated");
        let mut offset = 0;
        for t in &self.tracks {
            for r in 0..t.n_rows() {
                for c in 0..t.n_cols() {
                    if let Some(v) = t.value(r, c) {
                        out.set(offset + r, c, v);
                    }
                }
            }
            offset += t.n_rows();
        }
        out
    }

    /// Row ranges of each track inside the concatenated table.
    pub fn row_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.tracks.len());
        let mut offset = 0;
        for t in &self.tracks {
            ranges.push(offset..offset + t.n_rows());
            offset += t.n_rows();
        }
        ranges
    }

    /// Slice a completed concatenation back into per-track tables.
    pub fn split_completion(&self, completed: &DataTable) -> Vec<DataTable> {
        self.row_ranges()
            .into_iter()
            .map(|range| completed.select_rows(&range.collect::<Vec<usize>>()))
            .collect()
    }

    /// Missingness over the union table with both per-track accountings:
    /// single (within-track observed features only) and union (all features).
    pub fn missingness_report(&self) -> MissingnessReport {
        let concat = self.concatenate();
        let mut report = missingness_stats(&concat);
        let union_features = concat.feature_cols().len();
        let per_track = self
            .tracks
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let feature_cols = t.feature_cols();
                let observed_cols: Vec<usize> = feature_cols
                    .iter()
                    .copied()
                    .filter(|&c| t.observed_count(c) > 0)
                    .collect();
                let single_missing: usize = observed_cols
                    .iter()
                    .map(|&c| t.n_rows() - t.observed_count(c))
                    .sum();
                let union_missing: usize = feature_cols
                    .iter()
                    .map(|&c| t.n_rows() - t.observed_count(c))
                    .sum();
                let single_cells = t.n_rows() * observed_cols.len();
                let union_cells = t.n_rows() * union_features;
                TrackCounts {
                    track: i,
                    rows: t.n_rows(),
                    observed_features: observed_cols.len(),
                    single_missing,
                    single_fraction: if single_cells == 0 {
                        0.0
                    } else {
                        single_missing as f64 / single_cells as f64
                    },
                    union_missing,
                    union_fraction: if union_cells == 0 {
                        0.0
                    } else {
                        union_missing as f64 / union_cells as f64
                    },
                }
            })
            .collect();
        report.per_track = Some(per_track);
        report
    }

    /// CSV of (track, column, provenance flag).
    pub fn provenance_csv(&self) -> String {
        let mut out = String::from("track,column,flag\n");
        for (i, row) in self.provenance.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                writeln!(out, "{},{},{}", i, self.union_schema[c].name, p.as_str()).unwrap();
            }
        }
        out
    }
}

/// Merge same-named columns across tables into one union schema: kinds and
/// roles must agree, categorical vocabularies merge in first-seen order, and
/// every track is widened to the union with its absent columns wholly
/// missing.
pub fn align_tracks(tables: &[DataTable]) -> Result<TrackSet> {
    if tables.is_empty() {
        return Err(Error::InvalidParam("align_tracks needs tracks".into()));
    }
    let mut union: Vec<ColumnSchema> = Vec::new();
    for t in tables {
        for col in t.schema() {
            match union.iter_mut().find(|u| u.name == col.name) {
                None => union.push(col.clone()),
                Some(existing) => {
                    if existing.role != col.role {
                        return Err(Error::ColumnConflict {
                            column: col.name.clone(),
                            msg: format!(
                                "role {} conflicts with {}",
                                col.role.as_str(),
                                existing.role.as_str()
                            ),
                        });
                    }
                    match (&mut existing.kind, &col.kind) {
                        (
                            ColumnKind::Categorical { levels },
                            ColumnKind::Categorical { levels: other },
                        ) => {
                            for l in other {
                                if !levels.contains(l) {
                                    levels.push(l.clone());
                                }
                            }
                        }
                        (
                            ColumnKind::Numerical { min, max },
                            ColumnKind::Numerical {
                                min: other_min,
                                max: other_max,
                            },
                        ) => {
                            *min = match (*min, *other_min) {
                                (Some(a), Some(b)) => Some(a.min(b)),
                                _ => None,
                            };
                            *max = match (*max, *other_max) {
                                (Some(a), Some(b)) => Some(a.max(b)),
                                _ => None,
                            };
                        }
                        _ => {
                            return Err(Error::ColumnConflict {
                                column: col.name.clone(),
                                msg: "categorical in one track, numerical in another".into(),
                            })
                        }
                    }
                }
            }
        }
    }

    let mut widened = Vec::with_capacity(tables.len());
    for t in tables {
        let mut out = DataTable::with_rows(union.clone(), t.n_rows())?;
        for (src_c, col) in t.schema().iter().enumerate() {
            let dst_c = out.column_index(&col.name).expect("union contains column");
            // level indices remap through the merged vocabulary
            let remap: Option<Vec<u32>> = match (&col.kind, &union[dst_c].kind) {
                (ColumnKind::Categorical { levels }, ColumnKind::Categorical { levels: merged }) => {
                    Some(
                        levels
                            .iter()
                            .map(|l| {
                                merged.iter().position(|m| m == l).expect("merged level") as u32
                            })
                            .collect(),
                    )
                }
                _ => None,
            };
            for r in 0..t.n_rows() {
                match t.value(r, src_c) {
                    Some(Value::Cat(l)) => {
                        out.set(r, dst_c, Value::Cat(remap.as_ref().expect("categorical")[l as usize]))
                    }
                    Some(v) => out.set(r, dst_c, v),
                    None => {}
                }
            }
        }
        widened.push(out);
    }

    // open union ranges derive from the union of observed data
    let mut set = TrackSet::from_aligned(widened)?;
    let mut concat = set.concatenate();
    concat.derive_open_ranges();
    let derived = concat.schema().to_vec();
    for t in &mut set.tracks {
        for (c, schema) in derived.iter().enumerate() {
            t.schema_mut()[c].kind = schema.kind.clone();
        }
    }
    set.union_schema = derived;
    Ok(set)
}

/// Impute over the concatenated union table so donor rows and fitted models
/// span every track where a feature is observed. Per-track union missingness
/// is prepended to the diagnostics. Row order in the completions is
/// (track order, within-track order).
pub fn cross_impute(set: &TrackSet, spec: &ImputerSpec) -> Result<ImputationResult> {
    let concat = set.concatenate();
    let offenders: Vec<String> = concat
        .feature_cols()
        .into_iter()
        .filter(|&c| concat.observed_count(c) == 0)
        .map(|c| concat.schema()[c].name.clone())
        .collect();
    if !offenders.is_empty() {
        return Err(Error::AllMissingColumn { columns: offenders });
    }
    let report = set.missingness_report();
    let mut result = impute(&concat, spec)?;
    let mut diagnostics = Vec::new();
    if let Some(tracks) = &report.per_track {
        for t in tracks {
            diagnostics.push(DiagnosticRecord {
                iteration: t.track,
                statistic: "track_union_missing_fraction".into(),
                value: t.union_fraction,
            });
        }
    }
    diagnostics.append(&mut result.diagnostics);
    result.diagnostics = diagnostics;
    Ok(result)
}
