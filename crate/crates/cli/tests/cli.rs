use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn imict(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imict"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: Output) -> String {
    assert!(
        o.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

const SOLVE: &str = r#"
[network]
name = "f1"
source = { kind = "supermarket", p = 1.0 }

[algorithm]
variant = "EVEA"
population_size = 20
max_generations = 15
init_size_range = [1, 4]
max_seeds = 10

[eval]
mc_samples = 10

[walk]
walk_length = 10
dims = 8
"#;

const BENCH: &str = r#"
repetitions = 1
master_seed = 5

[[networks]]
name = "f1"
source = { kind = "supermarket", p = 0.5 }

[eval]
mc_samples = 10

[walk]
walk_length = 10
dims = 8

[[algorithms]]
variant = "EVEA"
population_size = 10
max_generations = 4
init_size_range = [1, 3]
max_seeds = 6

[[algorithms]]
variant = "NSGA2"
population_size = 10
max_generations = 4
init_size_range = [1, 3]
max_seeds = 6
"#;

#[test]
fn supermarket_fixture_has_the_stated_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(imict(dir.path(), &["fixture", "figure1"]));
    let degree = |label: &str| -> usize {
        text.lines()
            .filter_map(|l| l.strip_prefix("# "))
            .map(|l| l.split_whitespace().collect::<Vec<_>>())
            .find(|f| f.len() == 3 && f[1] == label)
            .map(|f| f[2].parse().unwrap())
            .unwrap()
    };
    assert_eq!(
        [degree("A"), degree("B"), degree("D"), degree("E")],
        [2, 3, 2, 2]
    );
    let arcs = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(arcs, 13);

    ok(imict(
        dir.path(),
        &["fixture", "supermarket", "--output", "f1.json"],
    ));
    let info = ok(imict(dir.path(), &["graph", "info", "f1.json"]));
    assert!(info.contains("nodes: 10") && info.contains("arcs: 13"));
}

#[test]
fn hv_of_the_ideal_point_is_the_reference_box() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("n.csv"), "influence,cost,time\n0,0,0\n").unwrap();
    let v: f64 = ok(imict(dir.path(), &["hv", "n.csv", "--normalized"]))
        .trim()
        .parse()
        .unwrap();
    assert!((v - 1.331).abs() < 1e-12);

    fs::write(dir.path().join("far.csv"), "influence,cost,time\n2,0,0\n").unwrap();
    assert_eq!(
        imict(dir.path(), &["hv", "far.csv", "--normalized"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(imict(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(imict(dir.path(), &["hv", "--bogus"]).status.code(), Some(1));
    assert_eq!(imict(dir.path(), &["solve"]).status.code(), Some(1));
    assert_eq!(imict(dir.path(), &["--help"]).status.code(), Some(0));

    let missing = imict(dir.path(), &["graph", "info", "absent.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert_eq!(msg.matches("No such file").count(), 1, "{msg}");

    fs::write(dir.path().join("bad.toml"), "[network\n").unwrap();
    assert_eq!(
        imict(dir.path(), &["solve", "--config", "bad.toml"])
            .status
            .code(),
        Some(2)
    );
    fs::write(dir.path().join("g.txt"), "1 2\n2 x\n").unwrap();
    assert_eq!(
        imict(dir.path(), &["graph", "info", "g.txt"]).status.code(),
        Some(2)
    );
    let invalid = SOLVE.replace("population_size = 20", "population_size = 3");
    fs::write(dir.path().join("invalid.toml"), invalid).unwrap();
    assert_eq!(
        imict(dir.path(), &["solve", "--config", "invalid.toml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solve_with_the_same_seed_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("solve.toml"), SOLVE).unwrap();
    let a = ok(imict(
        dir.path(),
        &[
            "solve",
            "--config",
            "solve.toml",
            "--seed",
            "7",
            "--output",
            "a",
        ],
    ));
    let b = ok(imict(
        dir.path(),
        &[
            "solve",
            "--config",
            "solve.toml",
            "--seed",
            "7",
            "--output",
            "b",
            "--threads",
            "3",
        ],
    ));
    assert_eq!(a, b);
    let fa = fs::read(dir.path().join("a/front.csv")).unwrap();
    assert_eq!(fa, fs::read(dir.path().join("b/front.csv")).unwrap());
    assert!(String::from_utf8(fa).unwrap().starts_with("# config_hash="));

    let hv: f64 = ok(imict(dir.path(), &["hv", "a/front.csv"]))
        .trim()
        .parse()
        .unwrap();
    assert!(hv > 0.0 && hv <= 1.331);
}

#[test]
fn bench_writes_reports_and_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bench.toml"), BENCH).unwrap();
    let out = ok(imict(
        dir.path(),
        &["bench", "--config", "bench.toml", "--output", "run1"],
    ));
    assert!(out.contains("no test"), "{out}");
    let summary = fs::read_to_string(dir.path().join("run1/summary.csv")).unwrap();
    assert_eq!(summary.lines().filter(|l| l.starts_with("f1,")).count(), 2);
    let wilcoxon = fs::read_to_string(dir.path().join("run1/wilcoxon.csv")).unwrap();
    assert_eq!(wilcoxon.lines().count(), 2, "comment and header only");

    let again = ok(imict(
        dir.path(),
        &["bench", "--config", "bench.toml", "--output", "run1"],
    ));
    assert!(again.contains("0 executed, 2 reused"), "{again}");

    let replay = ok(imict(
        dir.path(),
        &[
            "bench",
            "--replay",
            "run1/manifest.json",
            "--output",
            "run2",
            "--threads",
            "2",
        ],
    ));
    assert!(replay.contains("replay identical"), "{replay}");

    let front = "run1/fronts/f1/evea/rep-0.csv";
    let hv: f64 = ok(imict(
        dir.path(),
        &[
            "hv",
            front,
            "--manifest",
            "run1/manifest.json",
            "--network",
            "f1",
        ],
    ))
    .trim()
    .parse()
    .unwrap();
    let recorded: f64 = fs::read_to_string(dir.path().join(front))
        .unwrap()
        .lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(hv, recorded);
}

#[test]
fn graph_sample_and_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    ok(imict(
        dir.path(),
        &["fixture", "supermarket", "--output", "f1.txt"],
    ));
    ok(imict(
        dir.path(),
        &[
            "graph",
            "sample",
            "f1.txt",
            "--directed",
            "--nodes",
            "5",
            "--seed",
            "1",
            "--output",
            "s.json",
        ],
    ));
    assert!(ok(imict(dir.path(), &["graph", "info", "s.json"])).contains("nodes: 5"));

    fs::write(
        dir.path().join("walk.toml"),
        "[walk]\nwalk_length = 10\ndims = 4\n",
    )
    .unwrap();
    let args = [
        "embed",
        "train",
        "f1.txt",
        "--config",
        "walk.toml",
        "--seed",
        "3",
        "--output",
        "f1.emb",
    ];
    let trained = ok(imict(dir.path(), &args));
    assert!(trained.contains("dims: 4"));
    let inspect = ok(imict(
        dir.path(),
        &[
            "embed", "inspect", "f1.emb", "f1.txt", "--node", "0", "--top", "3",
        ],
    ));
    assert!(inspect.contains("trained on: this graph"), "{inspect}");
    let fp = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("fingerprint"))
            .unwrap()
            .to_string()
    };
    assert_eq!(fp(&trained), fp(&inspect));
    assert_eq!(
        inspect
            .lines()
            .skip_while(|l| !l.starts_with("nearest"))
            .count(),
        4
    );
}

#[test]
fn datasets_lists_sources_without_downloading() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(imict(dir.path(), &["datasets"]));
    assert!(out.contains("ca-GrQc") && out.contains("https://"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
