//! CLI behavior: exit codes, artifact determinism, config-file equivalence,
//! and the benchmark grid shape.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gapfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapfill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn generate(dir: &Path, rows: usize, seed: u64) -> (PathBuf, PathBuf) {
    let out = gapfill(&[
        "generate",
        "--rows",
        &rows.to_string(),
        "--num-cols",
        "3",
        "--cat-cols",
        "2",
        "--correlation",
        "0.5",
        "--label-coefs",
        "0.8",
        "--seed",
        &seed.to_string(),
        "--output-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (dir.join("data.csv"), dir.join("data.schema"))
}

#[test]
fn config_errors_exit_2() {
    let out = gapfill(&["frobnicate"]);
    assert_eq!(code(&out), 2);

    let out = gapfill(&["impute"]); // missing everything
    assert_eq!(code(&out), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "command=impute\nbogus-key=1\n").unwrap();
    let out = gapfill(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // bad rate is a parameter error
    let (csv, schema) = generate(dir.path(), 30, 1);
    let out = gapfill(&[
        "ampute",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--mcar",
        "1.5",
        "--seed",
        "1",
        "--output-dir",
        dir.path().join("a").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn data_errors_exit_3() {
    let out = gapfill(&[
        "stats",
        "--input",
        "/nonexistent/x.csv",
        "--schema",
        "/nonexistent/x.schema",
    ]);
    assert_eq!(code(&out), 3);

    // unknown categorical level in the CSV
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let schema = dir.path().join("t.schema");
    std::fs::write(&csv, "c,label\nmaybe,0\n").unwrap();
    std::fs::write(&schema, "c|categorical|no;yes|feature\nlabel|categorical|0;1|label\n").unwrap();
    let out = gapfill(&[
        "stats",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("maybe"));
}

#[test]
fn degenerate_data_exits_4() {
    // a column that is never observed makes imputation impossible
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let schema = dir.path().join("t.schema");
    std::fs::write(&csv, "x,ghost,label\n1.0,,0\n2.0,,1\n3.0,,0\n4.0,,1\n").unwrap();
    std::fs::write(
        &schema,
        "x|numerical||feature\nghost|numerical||feature\nlabel|categorical|0;1|label\n",
    )
    .unwrap();
    let out = gapfill(&[
        "impute",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--method",
        "mean_mode",
        "--seed",
        "1",
        "--output-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("all-missing-column"));
}

#[test]
fn evaluate_with_unusable_deletion_exits_4_but_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    // every row misses one feature cell: deletion-empty, mean still works
    let csv = dir.path().join("t.csv");
    let schema = dir.path().join("t.schema");
    let mut text = String::from("a,b,label\n");
    for r in 0..40 {
        if r % 2 == 0 {
            text.push_str(&format!(",{}.0,{}\n", r, r % 2));
        } else {
            text.push_str(&format!("{}.0,,{}\n", r, r % 2));
        }
    }
    std::fs::write(&csv, text).unwrap();
    std::fs::write(
        &schema,
        "a|numerical||feature\nb|numerical||feature\nlabel|categorical|0;1|label\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = gapfill(&[
        "evaluate",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--methods",
        "deletion,mean_mode",
        "--classifiers",
        "tree,nb",
        "--folds",
        "3",
        "--seed",
        "2",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.contains("deletion-empty"));
    assert!(summary.contains("Mean,tree"));
    assert!(out_dir.join("report.txt").exists());
    assert!(out_dir.join("folds.csv").exists());
}

#[test]
fn ampute_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = generate(&dir.path().join("g"), 100, 7);
    for run in ["r1", "r2"] {
        let out = gapfill(&[
            "ampute",
            "--input",
            csv.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--mcar",
            "0.3",
            "--seed",
            "7",
            "--output-dir",
            dir.path().join(run).to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for file in ["amputed.csv", "amputed.schema", "amputed_mask.csv"] {
        let a = std::fs::read(dir.path().join("r1").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("r2").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn flags_and_config_file_produce_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = generate(&dir.path().join("g"), 60, 3);
    let flag_dir = dir.path().join("flags");
    let out = gapfill(&[
        "impute",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--method",
        "random",
        "--seed",
        "11",
        "--output-dir",
        flag_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let cfg_dir = dir.path().join("cfg");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "command=impute\ninput={}\nschema={}\nmethod=random\nseed=11\noutput-dir={}\n",
            csv.display(),
            schema.display(),
            cfg_dir.display()
        ),
    )
    .unwrap();
    let out = gapfill(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let a = std::fs::read(flag_dir.join("completed_1.csv")).unwrap();
    let b = std::fs::read(cfg_dir.join("completed_1.csv")).unwrap();
    assert_eq!(a, b);

    // flags override config values
    let over_dir = dir.path().join("override");
    let out = gapfill(&[
        "--config",
        cfg.to_str().unwrap(),
        "--output-dir",
        over_dir.to_str().unwrap(),
        "--method",
        "mean_mode",
    ]);
    assert_eq!(code(&out), 0);
    let echo = std::fs::read_to_string(over_dir.join("run_config.txt")).unwrap();
    assert!(echo.contains("method=mean_mode"));
}

#[test]
fn impute_mean_on_complete_table_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = generate(&dir.path().join("g"), 50, 5);
    let out_dir = dir.path().join("out");
    let out = gapfill(&[
        "impute",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--method",
        "mean_mode",
        "--seed",
        "1",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let input = std::fs::read(&csv).unwrap();
    let completed = std::fs::read(out_dir.join("completed_1.csv")).unwrap();
    assert_eq!(input, completed);
}

#[test]
fn evaluate_emits_the_full_method_by_classifier_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, schema) = generate(&dir.path().join("g"), 80, 9);
    let amp_dir = dir.path().join("a");
    let out = gapfill(&[
        "ampute",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--mcar",
        "0.15",
        "--seed",
        "4",
        "--output-dir",
        amp_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let out_dir = dir.path().join("out");
    let out = gapfill(&[
        "evaluate",
        "--input",
        amp_dir.join("amputed.csv").to_str().unwrap(),
        "--schema",
        amp_dir.join("amputed.schema").to_str().unwrap(),
        "--methods",
        "deletion,mean_mode,random,mice,em,knn,missforest",
        "--classifiers",
        "tree,forest,logistic,nb,knn",
        "--folds",
        "3",
        "--seed",
        "6",
        "--m",
        "2",
        "--iterations",
        "2",
        "--trees",
        "5",
        "--classifier-trees",
        "8",
        "--leakage-mode",
        "whole-table",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(code(&out) == 0 || code(&out) == 4, "{stderr}");
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    // 7 methods x 5 classifiers data rows after the header
    assert_eq!(summary.lines().count() - 1, 35, "{summary}");
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("RF"));
}
