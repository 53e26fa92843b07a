//! Benchmark protocol: stratified k-fold cross-validated accuracy per
//! (imputer x classifier) cell against the list-wise-deletion baseline, plus
//! ground-truth imputation-error metrics on amputed data.
//!
//! Imputers never see the label column (they only touch feature columns by
//! construction) and, in the default fold-safe mode, are fitted per fold on
//! the training rows only. Per-cell failures are recorded in the report
//! rather than aborting the run.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::imputers::{impute_fit_on, ImputeMethod, ImputerSpec};
use crate::learners::{
    argmax_tie_lowest, default_mtry, fit_forest, fit_logistic, fit_nb, fit_tree, knn_classify,
    predict_forest_class, predict_logistic, predict_nb, predict_tree_class, ForestParams,
    LogisticParams, TreeParams,
};
use crate::rng::{mix2, mix3, stream};
use crate::table::{listwise_delete, ColumnKind, DataTable, Value};

const FOLD_SALT: u64 = 0x464F_4C44;

// ---------------------------------------------------------------------------
// Stratified folds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct FoldAssignment {
    pub fold_of_row: Vec<usize>,
    pub k: usize,
}

impl FoldAssignment {
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&r| self.fold_of_row[r] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&r| self.fold_of_row[r] != fold)
            .collect()
    }
}

/// Seeded per-class shuffle, then round-robin assignment with a running
/// offset so both fold sizes and per-class fold counts differ by at most one.
pub fn stratified_kfold(labels: &[u32], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidParam("k-fold needs k >= 2".into()));
    }
    let n_classes = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (r, &l) in labels.iter().enumerate() {
        per_class[l as usize].push(r);
    }
    for (class, rows) in per_class.iter().enumerate() {
        if !rows.is_empty() && rows.len() < k {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                count: rows.len(),
                k,
            });
        }
    }
    let mut fold_of_row = vec![0usize; labels.len()];
    let mut offset = 0usize;
    for (class, rows) in per_class.iter().enumerate() {
        let mut shuffled = rows.clone();
        shuffle(&mut shuffled, mix2(seed, class as u64));
        for (i, &r) in shuffled.iter().enumerate() {
            fold_of_row[r] = (offset + i) % k;
        }
        offset += rows.len();
    }
    Ok(FoldAssignment { fold_of_row, k })
}

fn shuffle(rows: &mut [usize], seed: u64) {
    use rand::Rng;
    let mut rng = stream(seed);
    for i in (1..rows.len()).rev() {
        let j = rng.random_range(0..=i);
        rows.swap(i, j);
    }
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Tree,
    Forest,
    Logistic,
    NaiveBayes,
    Knn,
}

impl ClassifierKind {
    pub fn from_name(name: &str) -> Result<ClassifierKind> {
        Ok(match name {
            "tree" => ClassifierKind::Tree,
            "forest" => ClassifierKind::Forest,
            "logistic" => ClassifierKind::Logistic,
            "nb" => ClassifierKind::NaiveBayes,
            "knn" => ClassifierKind::Knn,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown classifier {other:?}"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Tree => "tree",
            ClassifierKind::Forest => "forest",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::Knn => "knn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pooling {
    /// Train per MICE completion, average the predicted class probabilities.
    Probability,
    /// Pool the completions into one table cell-wise, then train once.
    ConsensusTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leakage {
    /// Impute per fold, fitted on training rows only.
    FoldSafe,
    /// Impute the full table once before folding (the common shortcut).
    WholeTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub folds: usize,
    pub seed: u64,
    pub pooling: Pooling,
    pub leakage: Leakage,
    pub forest_trees: usize,
    pub knn_k: usize,
    pub logistic_l2: f64,
    pub max_depth: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            folds: 5,
            seed: 0,
            pooling: Pooling::Probability,
            leakage: Leakage::FoldSafe,
            forest_trees: 100,
            knn_k: 5,
            logistic_l2: 1e-3,
            max_depth: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ImputerChoice {
    Deletion,
    Spec(ImputerSpec),
}

impl ImputerChoice {
    pub fn display_name(&self) -> &'static str {
        match self {
            ImputerChoice::Deletion => "Deletion",
            ImputerChoice::Spec(spec) => spec.method.display_name(),
        }
    }

    pub fn from_name(name: &str, seed: u64) -> Result<ImputerChoice> {
        if name == "deletion" {
            return Ok(ImputerChoice::Deletion);
        }
        Ok(ImputerChoice::Spec(ImputerSpec {
            method: ImputeMethod::from_name(name)?,
            seed,
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub per_fold: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl CellStats {
    fn from_folds(per_fold: Vec<f64>) -> CellStats {
        let n = per_fold.len() as f64;
        let mean = per_fold.iter().sum::<f64>() / n;
        let var = per_fold.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
        CellStats {
            per_fold,
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalCell {
    pub imputer: String,
    pub classifier: String,
    pub outcome: std::result::Result<CellStats, String>,
}

#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    pub cells: Vec<EvalCell>,
    pub metadata: Vec<(String, String)>,
}

impl EvalReport {
    pub fn merge(&mut self, other: EvalReport) {
        self.cells.extend(other.cells);
        self.metadata.extend(other.metadata);
    }

    pub fn cell(&self, imputer: &str, classifier: &str) -> Option<&EvalCell> {
        self.cells
            .iter()
            .find(|c| c.imputer == imputer && c.classifier == classifier)
    }

    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(|c| c.outcome.is_err())
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

fn label_levels(table: &DataTable, label: usize) -> Result<usize> {
    match &table.schema()[label].kind {
        ColumnKind::Categorical { levels } => Ok(levels.len()),
        ColumnKind::Numerical { .. } => Err(Error::InvalidParam(
            "label column must be categorical".into(),
        )),
    }
}

/// Benchmark one imputer (or the deletion baseline) against the classifiers.
pub fn evaluate(
    table: &DataTable,
    choice: &ImputerChoice,
    classifiers: &[ClassifierKind],
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let label = table.label_col()?;
    label_levels(table, label)?;
    if (0..table.n_rows()).any(|r| !table.is_observed(r, label)) {
        return Err(Error::InvalidParam("label column has missing cells".into()));
    }
    let name = choice.display_name().to_string();

    let all_failed = |msg: String| EvalReport {
        cells: classifiers
            .iter()
            .map(|c| EvalCell {
                imputer: name.clone(),
                classifier: c.name().to_string(),
                outcome: Err(msg.clone()),
            })
            .collect(),
        metadata: Vec::new(),
    };

    match choice {
        ImputerChoice::Deletion => match listwise_delete(table) {
            Err(e) => Ok(all_failed(e.to_string())),
            Ok(deleted) => score_completions(&[deleted], classifiers, opts, &name),
        },
        ImputerChoice::Spec(spec) => match opts.leakage {
            Leakage::WholeTable => {
                let all: Vec<usize> = (0..table.n_rows()).collect();
                match impute_fit_on(table, spec, &all) {
                    Err(e) => Ok(all_failed(e.to_string())),
                    Ok(result) => score_completions(&result.completions, classifiers, opts, &name),
                }
            }
            Leakage::FoldSafe => evaluate_fold_safe(table, spec, classifiers, opts, &name),
        },
    }
}

/// Score already-complete tables (one per completion) without further
/// imputation; used for the deletion baseline, whole-table mode, and
/// cross-imputation slices.
pub fn score_completions(
    completions: &[DataTable],
    classifiers: &[ClassifierKind],
    opts: &EvalOptions,
    imputer_name: &str,
) -> Result<EvalReport> {
    let table = &completions[0];
    let label = table.label_col()?;
    let labels: Vec<u32> = (0..table.n_rows())
        .map(|r| table.cat(r, label).expect("observed label"))
        .collect();
    let folds = match stratified_kfold(&labels, opts.folds, mix2(opts.seed, FOLD_SALT)) {
        Ok(f) => f,
        Err(e) => {
            return Ok(EvalReport {
                cells: classifiers
                    .iter()
                    .map(|c| EvalCell {
                        imputer: imputer_name.to_string(),
                        classifier: c.name().to_string(),
                        outcome: Err(e.to_string()),
                    })
                    .collect(),
                metadata: Vec::new(),
            })
        }
    };

    let mut per_classifier: Vec<std::result::Result<Vec<f64>, String>> =
        vec![Ok(Vec::new()); classifiers.len()];
    for fold in 0..opts.folds {
        let train = folds.train_rows(fold);
        let test = folds.test_rows(fold);
        for (ci, classifier) in classifiers.iter().enumerate() {
            if per_classifier[ci].is_err() {
                continue;
            }
            let seed = mix3(opts.seed, fold as u64, ci as u64);
            match train_and_score(completions, &train, &test, *classifier, seed, opts) {
                Ok(acc) => per_classifier[ci].as_mut().unwrap().push(acc),
                Err(msg) => per_classifier[ci] = Err(msg),
            }
        }
    }
    Ok(EvalReport {
        cells: classifiers
            .iter()
            .zip(per_classifier)
            .map(|(c, outcome)| EvalCell {
                imputer: imputer_name.to_string(),
                classifier: c.name().to_string(),
                outcome: outcome.map(CellStats::from_folds),
            })
            .collect(),
        metadata: Vec::new(),
    })
}

fn evaluate_fold_safe(
    table: &DataTable,
    spec: &ImputerSpec,
    classifiers: &[ClassifierKind],
    opts: &EvalOptions,
    imputer_name: &str,
) -> Result<EvalReport> {
    let label = table.label_col()?;
    let labels: Vec<u32> = (0..table.n_rows())
        .map(|r| table.cat(r, label).expect("observed label"))
        .collect();
    let all_failed = |msg: String| EvalReport {
        cells: classifiers
            .iter()
            .map(|c| EvalCell {
                imputer: imputer_name.to_string(),
                classifier: c.name().to_string(),
                outcome: Err(msg.clone()),
            })
            .collect(),
        metadata: Vec::new(),
    };
    let folds = match stratified_kfold(&labels, opts.folds, mix2(opts.seed, FOLD_SALT)) {
        Ok(f) => f,
        Err(e) => return Ok(all_failed(e.to_string())),
    };

    let mut per_classifier: Vec<std::result::Result<Vec<f64>, String>> =
        vec![Ok(Vec::new()); classifiers.len()];
    for fold in 0..opts.folds {
        let train = folds.train_rows(fold);
        let test = folds.test_rows(fold);
        // imputer state is fitted on the training rows only; a failed fold
        // (e.g. all-missing column within the fold) fails the whole row
        let fold_spec = ImputerSpec {
            method: spec.method.clone(),
            seed: mix2(spec.seed, fold as u64),
        };
        let completions = match impute_fit_on(table, &fold_spec, &train) {
            Ok(result) => result.completions,
            Err(e) => return Ok(all_failed(e.to_string())),
        };
        for (ci, classifier) in classifiers.iter().enumerate() {
            if per_classifier[ci].is_err() {
                continue;
            }
            let seed = mix3(opts.seed, fold as u64, ci as u64);
            match train_and_score(&completions, &train, &test, *classifier, seed, opts) {
                Ok(acc) => per_classifier[ci].as_mut().unwrap().push(acc),
                Err(msg) => per_classifier[ci] = Err(msg),
            }
        }
    }
    Ok(EvalReport {
        cells: classifiers
            .iter()
            .zip(per_classifier)
            .map(|(c, outcome)| EvalCell {
                imputer: imputer_name.to_string(),
                classifier: c.name().to_string(),
                outcome: outcome.map(CellStats::from_folds),
            })
            .collect(),
        metadata: Vec::new(),
    })
}

/// Cell-wise pool of MICE completions: numerical mean, categorical mode with
/// ties to the lowest level. Observed cells are identical across completions
/// and come through unchanged.
pub fn consensus_table(completions: &[DataTable]) -> DataTable {
    let mut out = completions[0].clone();
    if completions.len() == 1 {
        return out;
    }
    for c in out.feature_cols() {
        let n_levels = out.schema()[c].kind.levels().len();
        for r in 0..out.n_rows() {
            match &out.schema()[c].kind {
                ColumnKind::Numerical { .. } => {
                    let mean = completions
                        .iter()
                        .map(|t| t.num(r, c).expect("complete"))
                        .sum::<f64>()
                        / completions.len() as f64;
                    out.set(r, c, Value::Num(mean));
                }
                ColumnKind::Categorical { .. } => {
                    let mut counts = vec![0usize; n_levels];
                    for t in completions {
                        counts[t.cat(r, c).expect("complete") as usize] += 1;
                    }
                    let mut best = 0;
                    for (l, &cnt) in counts.iter().enumerate().skip(1) {
                        if cnt > counts[best] {
                            best = l;
                        }
                    }
                    out.set(r, c, Value::Cat(best as u32));
                }
            }
        }
    }
    out
}

/// Train the classifier on the train rows of each completion, average the
/// predicted class probabilities on the test rows, and return the accuracy of
/// argmax (ties to the lowest class index).
fn train_and_score(
    completions: &[DataTable],
    train: &[usize],
    test: &[usize],
    classifier: ClassifierKind,
    seed: u64,
    opts: &EvalOptions,
) -> std::result::Result<f64, String> {
    let pooled;
    let list: &[DataTable] = match opts.pooling {
        Pooling::ConsensusTable if completions.len() > 1 => {
            pooled = vec![consensus_table(completions)];
            &pooled
        }
        _ => completions,
    };

    let label = list[0].label_col().map_err(|e| e.to_string())?;
    let n_levels = label_levels(&list[0], label).map_err(|e| e.to_string())?;
    let mut prob_sums = vec![vec![0.0; n_levels]; test.len()];
    for completion in list {
        let probs = classify_probs(completion, train, test, classifier, seed, opts)
            .map_err(|e| e.to_string())?;
        for (sums, p) in prob_sums.iter_mut().zip(probs) {
            for (s, v) in sums.iter_mut().zip(p) {
                *s += v;
            }
        }
    }
    let m = list.len() as f64;
    let mut correct = 0usize;
    for (ti, &row) in test.iter().enumerate() {
        for s in prob_sums[ti].iter_mut() {
            *s /= m;
        }
        let predicted = argmax_tie_lowest(&prob_sums[ti]) as u32;
        if predicted == list[0].cat(row, label).expect("observed label") {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

fn classify_probs(
    table: &DataTable,
    train: &[usize],
    test: &[usize],
    classifier: ClassifierKind,
    seed: u64,
    opts: &EvalOptions,
) -> Result<Vec<Vec<f64>>> {
    let features = table.feature_cols();
    let label = table.label_col()?;
    match classifier {
        ClassifierKind::Tree => {
            let model = fit_tree(
                table,
                train,
                &features,
                label,
                TreeParams {
                    max_depth: opts.max_depth,
                    min_leaf: 1,
                    mtry: usize::MAX,
                    seed,
                },
            )?;
            Ok(test
                .iter()
                .map(|&r| predict_tree_class(&model, table, r).1)
                .collect())
        }
        ClassifierKind::Forest => {
            let model = fit_forest(
                table,
                train,
                &features,
                label,
                ForestParams {
                    n_trees: opts.forest_trees,
                    mtry: default_mtry(features.len()),
                    min_leaf: 1,
                    max_depth: opts.max_depth,
                    seed,
                    bootstrap: true,
                },
            )?;
            Ok(test
                .iter()
                .map(|&r| predict_forest_class(&model, table, r).1)
                .collect())
        }
        ClassifierKind::Logistic => {
            let model = fit_logistic(
                table,
                train,
                &features,
                label,
                LogisticParams {
                    l2: opts.logistic_l2,
                    ..LogisticParams::default()
                },
            )?;
            Ok(test
                .iter()
                .map(|&r| predict_logistic(&model, table, r).1)
                .collect())
        }
        ClassifierKind::NaiveBayes => {
            let model = fit_nb(table, train, &features, label)?;
            Ok(test
                .iter()
                .map(|&r| predict_nb(&model, table, r).1)
                .collect())
        }
        ClassifierKind::Knn => test
            .iter()
            .map(|&r| knn_classify(table, train, r, opts.knn_k).map(|(_, p)| p))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Imputation error against ground truth
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationErrorReport {
    /// RMSE over amputed numerical cells divided by the sd of their true
    /// values; absent when there are no such cells (or zero spread).
    pub nrmse: Option<f64>,
    pub n_numerical: usize,
    /// Fraction of amputed categorical cells imputed incorrectly.
    pub pfc: Option<f64>,
    pub n_categorical: usize,
}

/// Compare a completion against ground truth over the amputed cells.
pub fn imputation_error(
    completed: &DataTable,
    truth: &DataTable,
    amputed: &[(usize, usize)],
) -> Result<ImputationErrorReport> {
    if completed.n_rows() != truth.n_rows() || completed.n_cols() != truth.n_cols() {
        return Err(Error::InvalidParam(
            "completed and truth tables differ in shape".into(),
        ));
    }
    let mut sq_err = 0.0;
    let mut true_nums = Vec::new();
    let mut wrong = 0usize;
    let mut n_cat = 0usize;
    for &(r, c) in amputed {
        match truth.value(r, c) {
            Some(Value::Num(x)) => {
                let hat = completed.num(r, c).ok_or_else(|| {
                    Error::InvalidParam(format!("completed cell ({r},{c}) is missing"))
                })?;
                sq_err += (hat - x) * (hat - x);
                true_nums.push(x);
            }
            Some(Value::Cat(x)) => {
                let hat = completed.cat(r, c).ok_or_else(|| {
                    Error::InvalidParam(format!("completed cell ({r},{c}) is missing"))
                })?;
                if hat != x {
                    wrong += 1;
                }
                n_cat += 1;
            }
            None => {
                return Err(Error::InvalidParam(format!(
                    "truth is missing at amputed cell ({r},{c})"
                )))
            }
        }
    }
    let nrmse = if true_nums.is_empty() {
        None
    } else {
        let n = true_nums.len() as f64;
        let mean = true_nums.iter().sum::<f64>() / n;
        let sd = (true_nums.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
        (sd > 1e-15).then(|| (sq_err / n).sqrt() / sd)
    };
    Ok(ImputationErrorReport {
        nrmse,
        n_numerical: true_nums.len(),
        pfc: (n_cat > 0).then(|| wrong as f64 / n_cat as f64),
        n_categorical: n_cat,
    })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// Text: fixed-width grid, rows = imputers, columns = classifiers, per-row
/// maximum-accuracy cells marked with `*` (ties all marked). Csv: the summary
/// table, one row per cell.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_summary_csv(report),
    }
}

fn ordered_names<'a>(report: &'a EvalReport, key: fn(&'a EvalCell) -> &'a str) -> Vec<&'a str> {
    let mut names = Vec::new();
    for cell in &report.cells {
        let name = key(cell);
        if !names.contains(&name) {
            names.push(name);
        }
    }
    names
}

fn render_text(report: &EvalReport) -> String {
    let imputers = ordered_names(report, |c| &c.imputer);
    let classifiers = ordered_names(report, |c| &c.classifier);
    let mut out = String::new();
    for (k, v) in &report.metadata {
        writeln!(out, "# {k}={v}").unwrap();
    }
    let width = 16usize;
    let name_width = imputers
        .iter()
        .map(|n| n.len())
        .max()
        .unwrap_or(8)
        .max("imputer".len());
    write!(out, "{:<name_width$}", "imputer").unwrap();
    for c in &classifiers {
        write!(out, "{c:>width$}").unwrap();
    }
    out.push('\n');
    for imp in &imputers {
        let row: Vec<Option<&CellStats>> = classifiers
            .iter()
            .map(|c| report.cell(imp, c).and_then(|cell| cell.outcome.as_ref().ok()))
            .collect();
        let best = row
            .iter()
            .flatten()
            .map(|s| s.mean)
            .fold(f64::NEG_INFINITY, f64::max);
        write!(out, "{imp:<name_width$}").unwrap();
        for stats in row {
            let cell = match stats {
                Some(s) => {
                    let marker = if s.mean == best { "*" } else { "" };
                    format!("{marker}{:.3}\u{b1}{:.3}", s.mean, s.std)
                }
                None => "n/a".to_string(),
            };
            write!(out, "{cell:>width$}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// `imputer,classifier,mean,std,status`; numeric fields use the shortest
/// representation that round-trips exactly.
pub fn render_summary_csv(report: &EvalReport) -> String {
    let mut out = String::from("imputer,classifier,mean,std,status\n");
    for cell in &report.cells {
        match &cell.outcome {
            Ok(stats) => writeln!(
                out,
                "{},{},{},{},ok",
                csv_escape(&cell.imputer),
                csv_escape(&cell.classifier),
                stats.mean,
                stats.std
            )
            .unwrap(),
            Err(msg) => writeln!(
                out,
                "{},{},,,{}",
                csv_escape(&cell.imputer),
                csv_escape(&cell.classifier),
                csv_escape(msg)
            )
            .unwrap(),
        }
    }
    out
}

/// `imputer,classifier,fold,accuracy`, one row per evaluated fold.
pub fn render_folds_csv(report: &EvalReport) -> String {
    let mut out = String::from("imputer,classifier,fold,accuracy\n");
    for cell in &report.cells {
        if let Ok(stats) = &cell.outcome {
            for (fold, acc) in stats.per_fold.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    csv_escape(&cell.imputer),
                    csv_escape(&cell.classifier),
                    fold,
                    acc
                )
                .unwrap();
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub imputer: String,
    pub classifier: String,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub status: String,
}

/// Parse `render_summary_csv` output back; numeric fields reproduce exactly.
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::InvalidParam(format!("bad summary csv: {e}")))?;
        let parse = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::InvalidParam(format!("bad float {s:?}")))
            }
        };
        rows.push(SummaryRow {
            imputer: record[0].to_string(),
            classifier: record[1].to_string(),
            mean: parse(&record[2])?,
            std: parse(&record[3])?,
            status: record[4].to_string(),
        });
    }
    Ok(rows)
}
