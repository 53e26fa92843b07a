//! gapfill: generate, ampute, impute, and benchmark mixed-type tables.
//!
//! Every run writes a `run_config.txt` echo (sorted `key=value` lines) into
//! the output directory; feeding it back through `--config` reproduces the
//! run byte for byte. Exit codes: 0 ok, 2 bad configuration, 3 data/schema
//! errors, 4 degenerate data (unusable baseline, never-observed columns,
//! failed report cells), 5 internal errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use gapfill_core::cross::cross_impute;
use gapfill_core::error::Error as CoreError;
use gapfill_core::eval::{
    evaluate, render_folds_csv, render_report, render_summary_csv, score_completions,
    ClassifierKind, EvalOptions, EvalReport, ImputerChoice, Leakage, Pooling, ReportFormat,
};
use gapfill_core::imputers::{impute, ImputeMethod, ImputerSpec};
use gapfill_core::missingness::{
    generate_synthetic, inject, split_tracks, MechanismKind, MissingnessMechanism, SyntheticSpec,
    TrackSpec,
};
use gapfill_core::table::{
    load_csv, missingness_stats, save_with_schema, DataTable, MissingnessReport,
};

#[derive(Parser, Debug)]
#[command(
    name = "gapfill",
    about = "Missing-data toolkit: synthetic data, MCAR/MAR/MNAR amputation, six imputers, cross-dataset imputation, and a classification benchmark",
    after_help = "Commands: stats, generate, ampute, impute, evaluate, cross-eval.\n\
                  Any flag can also be supplied as a key=value line in --config;\n\
                  explicit flags override the file."
)]
struct Cli {
    /// stats | generate | ampute | impute | evaluate | cross-eval
    command: Option<String>,

    /// Key=value file supplying any of the long flags
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Master seed; required for stochastic commands
    #[arg(long)]
    seed: Option<u64>,

    /// Imputation method (impute): mean_mode | random | knn | mice | em | missforest
    #[arg(long)]
    method: Option<String>,
    /// Comma list of methods (evaluate, cross-eval); may include "deletion"
    #[arg(long)]
    methods: Option<String>,
    /// Comma list of classifiers: tree,forest,logistic,nb,knn
    #[arg(long)]
    classifiers: Option<String>,
    #[arg(long)]
    folds: Option<usize>,

    /// KNN neighbor count (imputer and classifier)
    #[arg(long)]
    k: Option<usize>,
    /// MICE completions
    #[arg(long)]
    m: Option<usize>,
    /// MICE cycles / EM max iterations / missForest max sweeps
    #[arg(long)]
    iterations: Option<usize>,
    /// Trees per forest in the missForest imputer
    #[arg(long)]
    trees: Option<usize>,
    /// EM convergence tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// MICE noise: on | off
    #[arg(long)]
    noise: Option<String>,

    /// MCAR cell-masking rate
    #[arg(long)]
    mcar: Option<f64>,
    /// MAR masking rate (needs --target-col and --cond-col)
    #[arg(long)]
    mar: Option<f64>,
    /// MNAR masking rate (needs --target-col)
    #[arg(long)]
    mnar: Option<f64>,
    #[arg(long)]
    target_col: Option<String>,
    #[arg(long)]
    cond_col: Option<String>,

    /// Track spec file: one `rows|feat1;feat2;...` line per track
    #[arg(long)]
    tracks: Option<PathBuf>,
    /// MICE pooling: probability | consensus-table
    #[arg(long)]
    pooling: Option<String>,
    /// fold-safe | whole-table
    #[arg(long)]
    leakage_mode: Option<String>,
    /// Cap internal parallelism
    #[arg(long)]
    threads: Option<usize>,

    /// Synthetic rows (generate)
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    num_cols: Option<usize>,
    #[arg(long)]
    cat_cols: Option<usize>,
    /// Levels per categorical column (generate)
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    correlation: Option<f64>,
    /// Comma list of label coefficients, or one value replicated
    #[arg(long)]
    label_coefs: Option<String>,
    #[arg(long)]
    label_noise: Option<f64>,

    /// Trees per forest classifier in evaluate/cross-eval
    #[arg(long)]
    classifier_trees: Option<usize>,
}

// ---------------------------------------------------------------------------
// RunConfig: one key=value map whether fed by flags or --config
// ---------------------------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "command",
    "input",
    "schema",
    "output-dir",
    "seed",
    "method",
    "methods",
    "classifiers",
    "folds",
    "k",
    "m",
    "iterations",
    "trees",
    "tol",
    "noise",
    "mcar",
    "mar",
    "mnar",
    "target-col",
    "cond-col",
    "tracks",
    "pooling",
    "leakage-mode",
    "threads",
    "rows",
    "num-cols",
    "cat-cols",
    "levels",
    "correlation",
    "label-coefs",
    "label-noise",
    "classifier-trees",
];

#[derive(Debug, Clone, Default)]
struct RunConfig {
    values: BTreeMap<String, String>,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn from_core(e: CoreError) -> CliError {
        let code = if e.is_degenerate_data() {
            4
        } else {
            match e {
                CoreError::InvalidParam(_) => 2,
                _ => 3,
            }
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError {
            code: 3,
            msg: format!("io error on {}: {e}", path.display()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

impl RunConfig {
    fn from_sources(cli: &Cli) -> CliResult<RunConfig> {
        let mut values = BTreeMap::new();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::config(format!(
                        "{} line {}: expected key=value",
                        path.display(),
                        i + 1
                    )));
                };
                let key = key.trim();
                if !KNOWN_KEYS.contains(&key) {
                    return Err(CliError::config(format!(
                        "{} line {}: unknown key {key:?}",
                        path.display(),
                        i + 1
                    )));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }

        // explicit flags override the config file
        let mut put = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                values.insert(key.to_string(), v);
            }
        };
        put("command", cli.command.clone());
        put("input", cli.input.as_ref().map(|p| p.display().to_string()));
        put("schema", cli.schema.as_ref().map(|p| p.display().to_string()));
        put(
            "output-dir",
            cli.output_dir.as_ref().map(|p| p.display().to_string()),
        );
        put("seed", cli.seed.map(|v| v.to_string()));
        put("method", cli.method.clone());
        put("methods", cli.methods.clone());
        put("classifiers", cli.classifiers.clone());
        put("folds", cli.folds.map(|v| v.to_string()));
        put("k", cli.k.map(|v| v.to_string()));
        put("m", cli.m.map(|v| v.to_string()));
        put("iterations", cli.iterations.map(|v| v.to_string()));
        put("trees", cli.trees.map(|v| v.to_string()));
        put("tol", cli.tol.map(|v| v.to_string()));
        put("noise", cli.noise.clone());
        put("mcar", cli.mcar.map(|v| v.to_string()));
        put("mar", cli.mar.map(|v| v.to_string()));
        put("mnar", cli.mnar.map(|v| v.to_string()));
        put("target-col", cli.target_col.clone());
        put("cond-col", cli.cond_col.clone());
        put("tracks", cli.tracks.as_ref().map(|p| p.display().to_string()));
        put("pooling", cli.pooling.clone());
        put("leakage-mode", cli.leakage_mode.clone());
        put("threads", cli.threads.map(|v| v.to_string()));
        put("rows", cli.rows.map(|v| v.to_string()));
        put("num-cols", cli.num_cols.map(|v| v.to_string()));
        put("cat-cols", cli.cat_cols.map(|v| v.to_string()));
        put("levels", cli.levels.map(|v| v.to_string()));
        put("correlation", cli.correlation.map(|v| v.to_string()));
        put("label-coefs", cli.label_coefs.clone());
        put("label-noise", cli.label_noise.map(|v| v.to_string()));
        put(
            "classifier-trees",
            cli.classifier_trees.map(|v| v.to_string()),
        );
        Ok(RunConfig { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key)
            .ok_or_else(|| CliError::config(format!("missing required --{key}")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|_| {
                CliError::config(format!("--{key}: cannot parse {s:?}"))
            }),
        }
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require_parse<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        self.require(key)?;
        Ok(self.parse(key)?.expect("checked present"))
    }

    fn path(&self, key: &str) -> CliResult<PathBuf> {
        Ok(PathBuf::from(self.require(key)?))
    }

    fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.get("output-dir").unwrap_or("."))
    }

    fn seed(&self) -> CliResult<u64> {
        self.require_parse("seed")
    }

    /// Sorted key=value echo; feeding it back via --config reproduces the run.
    fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn load_input(cfg: &RunConfig) -> CliResult<DataTable> {
    let input = cfg.path("input")?;
    let schema = cfg.path("schema")?;
    load_csv(&input, &schema).map_err(CliError::from_core)
}

fn write_echo(cfg: &RunConfig, dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_file(&dir.join("run_config.txt"), &cfg.echo())
}

fn parse_method_list(cfg: &RunConfig, seed: u64) -> CliResult<Vec<ImputerChoice>> {
    let list = cfg.require("methods")?;
    let mut out = Vec::new();
    for name in list.split(',').filter(|s| !s.is_empty()) {
        out.push(if name == "deletion" {
            ImputerChoice::Deletion
        } else {
            ImputerChoice::Spec(ImputerSpec {
                method: build_method(cfg, name)?,
                seed,
            })
        });
    }
    if out.is_empty() {
        return Err(CliError::config("--methods lists no methods"));
    }
    Ok(out)
}

/// Method by name with CLI hyperparameter overrides applied.
fn build_method(cfg: &RunConfig, name: &str) -> CliResult<ImputeMethod> {
    let base = ImputeMethod::from_name(name).map_err(CliError::from_core)?;
    Ok(match base {
        ImputeMethod::Knn { k } => ImputeMethod::Knn {
            k: cfg.parse_or("k", k)?,
        },
        ImputeMethod::Mice {
            m,
            iterations,
            noise,
        } => ImputeMethod::Mice {
            m: cfg.parse_or("m", m)?,
            iterations: cfg.parse_or("iterations", iterations)?,
            noise: match cfg.get("noise") {
                None => noise,
                Some("on") => true,
                Some("off") => false,
                Some(other) => {
                    return Err(CliError::config(format!(
                        "--noise must be on or off, got {other:?}"
                    )))
                }
            },
        },
        ImputeMethod::Em { max_iter, tol } => ImputeMethod::Em {
            max_iter: cfg.parse_or("iterations", max_iter)?,
            tol: cfg.parse_or("tol", tol)?,
        },
        ImputeMethod::MissForest { n_trees, max_iter } => ImputeMethod::MissForest {
            n_trees: cfg.parse_or("trees", n_trees)?,
            max_iter: cfg.parse_or("iterations", max_iter)?,
        },
        other => other,
    })
}

fn parse_classifiers(cfg: &RunConfig) -> CliResult<Vec<ClassifierKind>> {
    let list = cfg.require("classifiers")?;
    let mut out = Vec::new();
    for name in list.split(',').filter(|s| !s.is_empty()) {
        out.push(ClassifierKind::from_name(name).map_err(CliError::from_core)?);
    }
    if out.is_empty() {
        return Err(CliError::config("--classifiers lists no classifiers"));
    }
    Ok(out)
}

fn eval_options(cfg: &RunConfig, seed: u64) -> CliResult<EvalOptions> {
    let pooling = match cfg.get("pooling").unwrap_or("probability") {
        "probability" => Pooling::Probability,
        "consensus-table" => Pooling::ConsensusTable,
        other => {
            return Err(CliError::config(format!(
                "--pooling must be probability or consensus-table, got {other:?}"
            )))
        }
    };
    let leakage = match cfg.get("leakage-mode").unwrap_or("fold-safe") {
        "fold-safe" => Leakage::FoldSafe,
        "whole-table" => Leakage::WholeTable,
        other => {
            return Err(CliError::config(format!(
                "--leakage-mode must be fold-safe or whole-table, got {other:?}"
            )))
        }
    };
    Ok(EvalOptions {
        folds: cfg.parse_or("folds", 5)?,
        seed,
        pooling,
        leakage,
        forest_trees: cfg.parse_or("classifier-trees", 100)?,
        knn_k: cfg.parse_or("k", 5)?,
        ..EvalOptions::default()
    })
}

fn report_metadata(cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.values
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

fn missingness_csv(report: &MissingnessReport) -> String {
    let mut out = String::from("column,observed,missing\n");
    for c in &report.per_column {
        out.push_str(&format!("{},{},{}\n", c.name, c.observed, c.missing));
    }
    out
}

fn track_missingness_csv(report: &MissingnessReport) -> String {
    let mut out = String::from(
        "track,rows,observed_features,single_missing,single_fraction,union_missing,union_fraction\n",
    );
    if let Some(tracks) = &report.per_track {
        for t in tracks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t.track,
                t.rows,
                t.observed_features,
                t.single_missing,
                t.single_fraction,
                t.union_missing,
                t.union_fraction
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_stats(cfg: &RunConfig) -> CliResult<u8> {
    let table = load_input(cfg)?;
    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    let report = match cfg.get("tracks") {
        None => missingness_stats(&table),
        Some(path) => {
            let path = PathBuf::from(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let spec = TrackSpec::parse(&text).map_err(CliError::from_core)?;
            let set = split_tracks(&table, &spec).map_err(CliError::from_core)?;
            write_file(&dir.join("provenance.csv"), &set.provenance_csv())?;
            set.missingness_report()
        }
    };
    let text = report.render_text();
    print!("{text}");
    write_file(&dir.join("missingness.txt"), &text)?;
    write_file(&dir.join("missingness.csv"), &missingness_csv(&report))?;
    if report.per_track.is_some() {
        write_file(
            &dir.join("track_missingness.csv"),
            &track_missingness_csv(&report),
        )?;
    }
    Ok(0)
}

fn cmd_generate(cfg: &RunConfig) -> CliResult<u8> {
    let n_numerical: usize = cfg.parse_or("num-cols", 0)?;
    let n_categorical: usize = cfg.parse_or("cat-cols", 0)?;
    let p = n_numerical + n_categorical;
    let coefs = match cfg.get("label-coefs") {
        None => vec![0.5; p],
        Some(list) => {
            let parsed: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let parsed = parsed
                .map_err(|_| CliError::config(format!("--label-coefs: cannot parse {list:?}")))?;
            if parsed.len() == 1 {
                vec![parsed[0]; p]
            } else {
                parsed
            }
        }
    };
    let spec = SyntheticSpec {
        n_rows: cfg.require_parse("rows")?,
        n_numerical,
        n_categorical,
        levels_per_categorical: cfg.parse_or("levels", 3)?,
        correlation: cfg.parse_or("correlation", 0.0)?,
        label_coefficients: coefs,
        label_noise: cfg.parse_or("label-noise", 0.5)?,
        seed: cfg.seed()?,
    };
    let table = generate_synthetic(&spec).map_err(CliError::from_core)?;
    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    save_with_schema(&table, &dir.join("data.csv"), &dir.join("data.schema"))
        .map_err(CliError::from_core)?;
    println!(
        "generated {} rows x {} columns -> {}",
        table.n_rows(),
        table.n_cols(),
        dir.join("data.csv").display()
    );
    Ok(0)
}

fn cmd_ampute(cfg: &RunConfig) -> CliResult<u8> {
    let table = load_input(cfg)?;
    let seed = cfg.seed()?;
    let rates = [
        cfg.parse::<f64>("mcar")?,
        cfg.parse::<f64>("mar")?,
        cfg.parse::<f64>("mnar")?,
    ];
    let kind = match rates {
        [Some(rate), None, None] => MechanismKind::Mcar { rate },
        [None, Some(rate), None] => MechanismKind::Mar {
            target_col: cfg.require("target-col")?.to_string(),
            cond_col: cfg.require("cond-col")?.to_string(),
            rate,
        },
        [None, None, Some(rate)] => MechanismKind::Mnar {
            target_col: cfg.require("target-col")?.to_string(),
            rate,
        },
        _ => {
            return Err(CliError::config(
                "ampute needs exactly one of --mcar, --mar, --mnar",
            ))
        }
    };
    let masked = inject(&table, &MissingnessMechanism { kind, seed }).map_err(CliError::from_core)?;

    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    save_with_schema(&masked, &dir.join("amputed.csv"), &dir.join("amputed.schema"))
        .map_err(CliError::from_core)?;
    // true-mask sidecar: the cells this run masked, as (row, column-name)
    let mut mask = String::from("row,column\n");
    for c in 0..table.n_cols() {
        for r in 0..table.n_rows() {
            if table.is_observed(r, c) && !masked.is_observed(r, c) {
                mask.push_str(&format!("{},{}\n", r, table.schema()[c].name));
            }
        }
    }
    write_file(&dir.join("amputed_mask.csv"), &mask)?;
    let stats = missingness_stats(&masked);
    println!(
        "amputed -> {} ({} of {} feature cells missing)",
        dir.join("amputed.csv").display(),
        stats.total_missing,
        stats.total_missing + stats.total_observed
    );
    Ok(0)
}

fn cmd_impute(cfg: &RunConfig) -> CliResult<u8> {
    let table = load_input(cfg)?;
    let seed = cfg.seed()?;
    let method = build_method(cfg, cfg.require("method")?)?;
    let result = impute(&table, &ImputerSpec { method, seed }).map_err(CliError::from_core)?;

    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    gapfill_core::table::write_schema(table.schema(), &dir.join("completed.schema"))
        .map_err(CliError::from_core)?;
    for (i, completion) in result.completions.iter().enumerate() {
        let path = dir.join(format!("completed_{}.csv", i + 1));
        gapfill_core::table::save_csv(completion, &path).map_err(CliError::from_core)?;
    }
    write_file(&dir.join("diagnostics.csv"), &result.diagnostics_csv())?;
    println!(
        "imputed {} completion(s) -> {}",
        result.completions.len(),
        dir.display()
    );
    Ok(0)
}

fn cmd_evaluate(cfg: &RunConfig) -> CliResult<u8> {
    let table = load_input(cfg)?;
    let seed = cfg.seed()?;
    let choices = parse_method_list(cfg, seed)?;
    let classifiers = parse_classifiers(cfg)?;
    let opts = eval_options(cfg, seed)?;

    let mut report = EvalReport::default();
    for choice in &choices {
        let one = evaluate(&table, choice, &classifiers, &opts).map_err(CliError::from_core)?;
        report.merge(one);
    }
    report.metadata = report_metadata(cfg);

    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    let text = render_report(&report, ReportFormat::Text);
    print!("{text}");
    write_file(&dir.join("report.txt"), &text)?;
    write_file(&dir.join("summary.csv"), &render_summary_csv(&report))?;
    write_file(&dir.join("folds.csv"), &render_folds_csv(&report))?;
    Ok(if report.any_failed() { 4 } else { 0 })
}

fn cmd_cross_eval(cfg: &RunConfig) -> CliResult<u8> {
    let table = load_input(cfg)?;
    let seed = cfg.seed()?;
    let tracks_path = cfg.path("tracks")?;
    let text = std::fs::read_to_string(&tracks_path).map_err(|e| CliError::io(&tracks_path, e))?;
    let track_spec = TrackSpec::parse(&text).map_err(CliError::from_core)?;
    let set = split_tracks(&table, &track_spec).map_err(CliError::from_core)?;
    let choices = parse_method_list(cfg, seed)?;
    let classifiers = parse_classifiers(cfg)?;
    let opts = eval_options(cfg, seed)?;

    let dir = cfg.output_dir();
    write_echo(cfg, &dir)?;
    write_file(&dir.join("provenance.csv"), &set.provenance_csv())?;
    let missing_report = set.missingness_report();
    write_file(
        &dir.join("track_missingness.csv"),
        &track_missingness_csv(&missing_report),
    )?;

    let n_tracks = set.tracks().len();
    let mut pooled = EvalReport::default();
    let mut per_track: Vec<EvalReport> = vec![EvalReport::default(); n_tracks];
    for choice in &choices {
        match choice {
            ImputerChoice::Deletion => {
                let concat = set.concatenate();
                pooled.merge(
                    evaluate(&concat, choice, &classifiers, &opts).map_err(CliError::from_core)?,
                );
                for (i, track) in set.tracks().iter().enumerate() {
                    per_track[i].merge(
                        evaluate(track, choice, &classifiers, &opts)
                            .map_err(CliError::from_core)?,
                    );
                }
            }
            ImputerChoice::Spec(spec) => {
                let name = spec.method.display_name();
                match cross_impute(&set, spec) {
                    Err(e) => {
                        let msg = e.to_string();
                        let failed = |name: &str| EvalReport {
                            cells: classifiers
                                .iter()
                                .map(|c| gapfill_core::eval::EvalCell {
                                    imputer: name.to_string(),
                                    classifier: c.name().to_string(),
                                    outcome: Err(msg.clone()),
                                })
                                .collect(),
                            metadata: Vec::new(),
                        };
                        pooled.merge(failed(name));
                        for track_report in per_track.iter_mut() {
                            track_report.merge(failed(name));
                        }
                    }
                    Ok(result) => {
                        write_file(
                            &dir.join(format!("diagnostics_{}.csv", spec.method.name())),
                            &result.diagnostics_csv(),
                        )?;
                        pooled.merge(
                            score_completions(&result.completions, &classifiers, &opts, name)
                                .map_err(CliError::from_core)?,
                        );
                        // slice each completion back per track, keeping all m
                        // completions per track for pooling
                        let sliced: Vec<Vec<DataTable>> = result
                            .completions
                            .iter()
                            .map(|c| set.split_completion(c))
                            .collect();
                        for i in 0..n_tracks {
                            let track_completions: Vec<DataTable> =
                                sliced.iter().map(|s| s[i].clone()).collect();
                            per_track[i].merge(
                                score_completions(&track_completions, &classifiers, &opts, name)
                                    .map_err(CliError::from_core)?,
                            );
                        }
                    }
                }
            }
        }
    }

    pooled.metadata = report_metadata(cfg);
    let text = render_report(&pooled, ReportFormat::Text);
    print!("{text}");
    write_file(&dir.join("pooled_report.txt"), &text)?;
    write_file(&dir.join("pooled_summary.csv"), &render_summary_csv(&pooled))?;
    write_file(&dir.join("pooled_folds.csv"), &render_folds_csv(&pooled))?;
    let mut any_failed = pooled.any_failed();
    for (i, report) in per_track.iter().enumerate() {
        any_failed |= report.any_failed();
        write_file(
            &dir.join(format!("track_{i}_report.txt")),
            &render_report(report, ReportFormat::Text),
        )?;
        write_file(
            &dir.join(format!("track_{i}_summary.csv")),
            &render_summary_csv(report),
        )?;
        write_file(
            &dir.join(format!("track_{i}_folds.csv")),
            &render_folds_csv(report),
        )?;
    }
    Ok(if any_failed { 4 } else { 0 })
}

fn run() -> CliResult<u8> {
    let cli = Cli::parse();
    let cfg = RunConfig::from_sources(&cli)?;
    if let Some(n) = cfg.parse::<usize>("threads")? {
        // determinism never depends on the pool size; this only caps CPU use
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cfg.require("command")? {
        "stats" => cmd_stats(&cfg),
        "generate" => cmd_generate(&cfg),
        "ampute" => cmd_ampute(&cfg),
        "impute" => cmd_impute(&cfg),
        "evaluate" => cmd_evaluate(&cfg),
        "cross-eval" => cmd_cross_eval(&cfg),
        other => Err(CliError::config(format!(
            "unknown command {other:?}; expected stats, generate, ampute, impute, evaluate, or cross-eval"
        ))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
