//! Integration tests for the `tagnet` binary: exit codes, artifact layout
//! and pipeline composability.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn tagnet(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagnet"))
        .arg("--output-dir")
        .arg(out_dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/posts_200.jsonl")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = tagnet(
        dir.path(),
        &["ingest", "--input", fixture(), "--query", "greatbarrierreef"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("posts.jsonl").exists());
    assert!(dir.path().join("ingest_report.json").exists());

    let out = tagnet(
        dir.path(),
        &["graph", "--query", "greatbarrierreef", "--graphml", "--dot"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("graph.json").exists());
    assert!(dir.path().join("graph.graphml").exists());
    assert!(dir.path().join("graph.dot").exists());

    let out = tagnet(dir.path(), &["analyze"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("centrality.csv").exists());
    assert!(dir.path().join("communities.json").exists());
    assert!(dir.path().join("summary.txt").exists());

    let out = tagnet(dir.path(), &["plot", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("plot.svg").exists());
}

#[test]
fn missing_input_file_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = tagnet(dir.path(), &["ingest", "--input", "/no/such/file.jsonl"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/file.jsonl"));
}

#[test]
fn empty_post_file_gives_empty_graph_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("posts.jsonl"), "").unwrap();
    let out = tagnet(dir.path(), &["graph"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(dir.path().join("graph.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["vertices"].as_array().unwrap().len(), 0);
}

#[test]
fn bad_top_n_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("posts.jsonl"),
        r#"{"id":"1","platform":"instagram","hashtags":["a","b"]}"#,
    )
    .unwrap();
    let out = tagnet(dir.path(), &["graph", "--top-n", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_measure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("posts.jsonl"),
        r#"{"id":"1","platform":"instagram","hashtags":["a","b"]}"#,
    )
    .unwrap();
    assert_eq!(code(&tagnet(dir.path(), &["graph"])), 0);
    let out = tagnet(dir.path(), &["analyze", "--measures", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn edgeless_graph_analyze_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // a single one-hashtag post yields a vertex but no edges
    std::fs::write(
        dir.path().join("posts.jsonl"),
        r#"{"id":"1","platform":"instagram","hashtags":["solo"]}"#,
    )
    .unwrap();
    // note: min-hashtag filtering happens at ingest, not here
    assert_eq!(code(&tagnet(dir.path(), &["graph"])), 0);
    let out = tagnet(dir.path(), &["analyze"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn plot_without_analyze_outputs_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("posts.jsonl"),
        r#"{"id":"1","platform":"instagram","hashtags":["a","b"]}"#,
    )
    .unwrap();
    assert_eq!(code(&tagnet(dir.path(), &["graph"])), 0);
    let out = tagnet(dir.path(), &["plot"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn plot_bytes_are_deterministic_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("posts.jsonl"),
        concat!(
            r#"{"id":"1","platform":"instagram","hashtags":["a","b","c"]}"#,
            "\n",
            r#"{"id":"2","platform":"instagram","hashtags":["b","c","d"]}"#,
            "\n"
        ),
    )
    .unwrap();
    assert_eq!(code(&tagnet(dir.path(), &["graph"])), 0);
    assert_eq!(code(&tagnet(dir.path(), &["analyze"])), 0);
    assert_eq!(code(&tagnet(dir.path(), &["plot", "--seed", "7"])), 0);
    let first = std::fs::read(dir.path().join("plot.svg")).unwrap();
    assert_eq!(code(&tagnet(dir.path(), &["plot", "--seed", "7"])), 0);
    let second = std::fs::read(dir.path().join("plot.svg")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn query_flag_restricts_the_ingested_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.jsonl");
    std::fs::write(
        &input,
        concat!(
            r#"{"id":"1","platform":"instagram","hashtags":["reef","fish"]}"#,
            "\n",
            r#"{"id":"2","platform":"instagram","hashtags":["city","car"]}"#,
            "\n"
        ),
    )
    .unwrap();
    let out = tagnet(
        dir.path(),
        &["ingest", "--input", input.to_str().unwrap(), "--query", "reef"],
    );
    assert_eq!(code(&out), 0);
    let posts = std::fs::read_to_string(dir.path().join("posts.jsonl")).unwrap();
    assert_eq!(posts.lines().count(), 1);
    assert!(posts.contains("reef"));
}

#[test]
fn single_measure_analysis_emits_a_single_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("posts.jsonl"),
        r#"{"id":"1","platform":"instagram","hashtags":["a","b","c"]}"#,
    )
    .unwrap();
    assert_eq!(code(&tagnet(dir.path(), &["graph"])), 0);
    let out = tagnet(dir.path(), &["analyze", "--measures", "eigenvector"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("centrality.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "tag,eigenvector");
}

#[test]
fn kappa_on_identical_files_reports_1() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    let mut f = std::fs::File::create(&labels).unwrap();
    writeln!(f, "item_id,class_id").unwrap();
    for i in 0..10 {
        writeln!(f, "p{i},{}", 1 + i % 3).unwrap();
    }
    drop(f);
    let out = tagnet(
        dir.path(),
        &["kappa", labels.to_str().unwrap(), labels.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Cohen's kappa: 1.00000"), "{stdout}");
}

#[test]
fn kappa_with_mismatched_items_exits_2_listing_differences() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "item_id,class_id\nx,1\ny,2\n").unwrap();
    std::fs::write(&b, "item_id,class_id\nx,1\nz,2\n").unwrap();
    let out = tagnet(
        dir.path(),
        &["kappa", a.to_str().unwrap(), b.to_str().unwrap()],
    );
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains('y') && stderr.contains('z'), "{stderr}");
}

#[test]
fn constant_batches_stabilize_at_the_window_index() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    let mut f = std::fs::File::create(&labels).unwrap();
    writeln!(f, "item_id,class_id").unwrap();
    for i in 0..50 {
        // every batch of 10 has the same 50/50 split between classes 1 and 2
        writeln!(f, "p{i},{}", 1 + i % 2).unwrap();
    }
    drop(f);
    let out = tagnet(
        dir.path(),
        &["sample-curve", labels.to_str().unwrap(), "--batch-size", "10"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("stabilization index: 3"), "{stdout}");
    assert!(dir.path().join("curves.csv").exists());
}

#[test]
fn single_batch_cannot_stabilize() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    std::fs::write(&labels, "item_id,class_id\np0,1\np1,2\n").unwrap();
    let out = tagnet(dir.path(), &["sample-curve", labels.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("stabilization index: none"));
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.jsonl");
    std::fs::write(
        &input,
        concat!(
            r#"{"id":"1","platform":"instagram","hashtags":["reef","fish"]}"#,
            "\n",
            r#"{"id":"2","platform":"instagram","hashtags":["city","car"]}"#,
            "\n"
        ),
    )
    .unwrap();
    let config = dir.path().join("tagnet.toml");
    std::fs::write(
        &config,
        format!("[ingest]\ninput = [{:?}]\nquery = [\"reef\"]\n", input),
    )
    .unwrap();

    // config supplies input and query
    let out = tagnet(
        dir.path(),
        &["--config", config.to_str().unwrap(), "ingest"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let posts = std::fs::read_to_string(dir.path().join("posts.jsonl")).unwrap();
    assert_eq!(posts.lines().count(), 1);

    // a --query flag overrides the config query
    let out = tagnet(
        dir.path(),
        &[
            "--config",
            config.to_str().unwrap(),
            "ingest",
            "--query",
            "city",
        ],
    );
    assert_eq!(code(&out), 0);
    let posts = std::fs::read_to_string(dir.path().join("posts.jsonl")).unwrap();
    assert!(posts.contains("city") && !posts.contains("reef"));
}

#[test]
fn strict_mode_rejects_malformed_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.jsonl");
    std::fs::write(
        &input,
        concat!(
            r#"{"id":"1","platform":"instagram","hashtags":["a","b"]}"#,
            "\n",
            "{not json}\n"
        ),
    )
    .unwrap();
    // lenient: skipped with a report
    let out = tagnet(dir.path(), &["ingest", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"malformed_skipped\": 1"));
    // strict: hard error
    let out = tagnet(
        dir.path(),
        &["--strict", "ingest", "--input", input.to_str().unwrap()],
    );
    assert_eq!(code(&out), 2);
}
