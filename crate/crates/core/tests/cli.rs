//! End-to-end runs of the command line through `cli::run`.

use std::fs;
use std::path::Path;

use seclud::cli::run;
use seclud::cluster::read_assignment_csv;

fn arg(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn seclud(args: &[&str]) -> i32 {
    let mut argv = vec!["seclud"];
    argv.extend_from_slice(args);
    run(argv)
}

#[test]
fn pipeline_from_generation_to_bench() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = arg(&dir.path().join("corpus.jsonl"));
    let truth = arg(&dir.path().join("truth.csv"));
    let idx = arg(&dir.path().join("idx"));
    let clusters = arg(&dir.path().join("clusters.csv"));
    let report = arg(&dir.path().join("report.csv"));
    let compression = arg(&dir.path().join("compression.csv"));
    let plots = dir.path().join("plots");

    assert_eq!(
        seclud(&["gen", "--out", &corpus, "--truth", &truth, "--topics", "4", "--docs-per-topic", "150", "--seed", "2"]),
        0
    );
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 600);
    assert!(fs::read_to_string(&truth).unwrap().starts_with("doc_id,topic\n"));

    assert_eq!(seclud(&["index", "--in", &corpus, "--out", &idx, "--codec", "delta"]), 0);
    assert!(Path::new(&idx).join("index.scld").exists());

    assert_eq!(
        seclud(&["cluster", "--index", &idx, "--k", "8", "--algo", "topdown", "--seed", "7", "--out", &clusters]),
        0
    );
    let text = fs::read_to_string(&clusters).unwrap();
    assert!(text.starts_with("doc_id,cluster_id\n"));
    let (assign, k) = read_assignment_csv(text.as_bytes(), 600).unwrap();
    assert_eq!(assign.len(), 600);
    assert!((8..=16).contains(&k));

    // same seed, same clustering
    let again = arg(&dir.path().join("again.csv"));
    assert_eq!(
        seclud(&["cluster", "--index", &idx, "--k", "8", "--seed", "7", "--out", &again]),
        0
    );
    assert_eq!(fs::read_to_string(&again).unwrap(), text);

    assert_eq!(
        seclud(&["cluster", "--index", &idx, "--k", "4", "--algo", "multilevel", "--seed", "1", "--out", &again]),
        0
    );

    for variant in ["single", "percluster", "clusterindex", "reordered"] {
        assert_eq!(
            seclud(&["query", "--index", &idx, "--clusters", &clusters, "--variant", variant, "t0w1", "t0w2"]),
            0
        );
    }

    assert_eq!(
        seclud(&[
            "bench", "--index", &idx, "--clusters", &clusters, "--workload-seed", "7", "--queries", "500",
            "--repetitions", "1", "--out", &report, "--compression", &compression, "--plot-data",
            &arg(&plots), "--tc-values", "1,50", "--k", "4",
        ]),
        0
    );
    let report = fs::read_to_string(&report).unwrap();
    let mut lines = report.lines();
    assert!(lines.next().unwrap().starts_with("docs,frequent_terms,clusters,queries,repetitions,s_t,s_l,s_c"));
    assert!(lines.next().unwrap().starts_with("600,"));
    assert_eq!(fs::read_to_string(&compression).unwrap().lines().count(), 1 + 3 * 4);
    assert!(plots.join("tc_s_t.dat").exists());
    assert!(plots.join("speedups.dat").exists());

    assert_eq!(seclud(&["stats", "--index", &idx, "--clusters", &clusters]), 0);
}

#[test]
fn query_log_drives_probabilities_and_workload() {
    let dir = tempfile::tempdir().unwrap();
    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "apple banana\nbanana cherry\napple cherry\napple banana cherry\ndate\ndate apple\n").unwrap();
    let log = dir.path().join("log.txt");
    fs::write(&log, "apple banana\nbanana cherry\nsingle\napple zzz\napple apple\n").unwrap();
    let idx = arg(&dir.path().join("idx.scld"));
    let clusters = arg(&dir.path().join("c.csv"));
    assert_eq!(seclud(&["index", "--in", &arg(&docs), "--out", &idx]), 0);
    assert_eq!(
        seclud(&["cluster", "--index", &idx, "--k", "2", "--seed", "0", "--query-log", &arg(&log), "--out", &clusters]),
        0
    );
    assert_eq!(
        seclud(&[
            "bench", "--index", &idx, "--clusters", &clusters, "--query-log", &arg(&log), "--workload-seed", "0",
            "--repetitions", "1",
        ]),
        0
    );
}

#[test]
fn user_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = arg(&dir.path().join("missing"));
    assert_eq!(seclud(&["index", "--in", &missing, "--out", &arg(dir.path())]), 1);
    assert_eq!(seclud(&["cluster", "--index", &missing, "--out", "x.csv"]), 1);
    assert_eq!(seclud(&["index", "--unknown-flag"]), 1);

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\": \"0\", \"text\": \"ok\"}\nnot json\n").unwrap();
    assert_eq!(seclud(&["index", "--in", &arg(&bad), "--out", &arg(&dir.path().join("i"))]), 1);

    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "a b\nb c\n").unwrap();
    let idx = arg(&dir.path().join("idx"));
    assert_eq!(seclud(&["index", "--in", &arg(&docs), "--out", &idx]), 0);
    // more clusters than documents
    assert_eq!(seclud(&["cluster", "--index", &idx, "--k", "5", "--out", &arg(&dir.path().join("c.csv"))]), 1);
    // clustering file for another corpus
    let wrong = dir.path().join("wrong.csv");
    fs::write(&wrong, "doc_id,cluster_id\n0,0\n").unwrap();
    assert_eq!(seclud(&["query", "--index", &idx, "--clusters", &arg(&wrong), "--variant", "percluster", "a"]), 1);
    // non-single variants need a clustering
    assert_eq!(seclud(&["query", "--index", &idx, "--variant", "reordered", "a"]), 1);
    // a config file with an unknown key
    let config = dir.path().join("c.toml");
    fs::write(&config, "chi = 4\nbogus = 1\n").unwrap();
    assert_eq!(
        seclud(&["cluster", "--index", &idx, "--k", "2", "--config", &arg(&config), "--out", &arg(&dir.path().join("c.csv"))]),
        1
    );
}

// Other tests always pass explicit seeds, so changing the variable here
// cannot affect them.
#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::env::set_var("SECLUD_SEED", "11");
    assert_eq!(seclud(&["gen", "--out", &arg(&a), "--topics", "2", "--docs-per-topic", "20"]), 0);
    assert_eq!(seclud(&["gen", "--out", &arg(&b), "--topics", "2", "--docs-per-topic", "20", "--seed", "11"]), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    std::env::set_var("SECLUD_SEED", "not-a-number");
    assert_eq!(seclud(&["gen", "--out", &arg(&a), "--topics", "2", "--docs-per-topic", "20"]), 1);
    std::env::remove_var("SECLUD_SEED");
}
