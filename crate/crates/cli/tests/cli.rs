use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use soldiff_cli::{read_reports, Status};
use soldiff_fixtures::{Category, SIMPLE_STORAGE, SIMPLE_STORAGE_MODIFIED};

fn soldiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soldiff"))
        .args(args)
        .env_remove("SOLDIFF_RULES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn rows(path: &Path) -> Vec<soldiff_cli::DiffReport> {
    read_reports(fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn identical_files_give_an_empty_script() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.sol", SIMPLE_STORAGE);
    let o = soldiff(&["diff", &f, &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "<actions>\n</actions>\n");
    let o = soldiff(&["diff", &f, &f, "--format", "json"]);
    assert_eq!(stdout(&o), "[]\n");
    let o = soldiff(&["diff", &f, &f, "--format", "text"]);
    assert_eq!(stdout(&o), "");
}

#[test]
fn broken_after_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sol", SIMPLE_STORAGE);
    let b = write(
        dir.path(),
        "broken.sol",
        "contract C {\n    function f( {}\n}\n",
    );
    let o = soldiff(&["diff", &a, &b]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("{b}:2:")), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn unreadable_input_and_bad_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sol", SIMPLE_STORAGE);
    let missing = dir.path().join("missing.sol");
    assert_eq!(
        soldiff(&["diff", &a, missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        soldiff(&["diff", &a, &a, "--min-dice", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        soldiff(&["corpus", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn text_and_json_formats() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sol", SIMPLE_STORAGE);
    let b = write(dir.path(), "b.sol", SIMPLE_STORAGE_MODIFIED);
    let text = stdout(&soldiff(&["diff", &a, &b, "--format", "text"]));
    assert!(
        text.contains("update-node visibility: public [37,43] -> private\n"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 6);
    let json = stdout(&soldiff(&["diff", &a, &b, "--format", "json"]));
    assert_eq!(json.matches("\"kind\": \"update\"").count(), 6, "{json}");
    let unified = stdout(&soldiff(&["diff", &a, &b, "--format", "unified"]));
    assert!(
        unified.starts_with(&format!("--- {a}\n+++ {b}\n@@ ")),
        "{unified}"
    );
}

#[test]
fn dump_tree_prints_both_trees() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sol", "contract C { uint256 public x; }");
    let b = write(dir.path(), "b.sol", "contract C { uint256 private x; }");
    let out = stdout(&soldiff(&[
        "diff",
        &a,
        &b,
        "--dump-tree",
        "--format",
        "text",
    ]));
    assert!(out.starts_with("# grammar: tree-sitter-solidity"), "{out}");
    let lines: Vec<&str> = out.lines().map(str::trim_start).collect();
    assert!(lines.contains(&"visibility: public [21,27]"), "{out}");
    assert!(lines.contains(&"visibility: private [21,28]"), "{out}");
    assert!(
        out.ends_with("# script\nupdate-node visibility: public [21,27] -> private\n"),
        "{out}"
    );
    assert_eq!(
        stdout(&soldiff(&["--grammar-version"])),
        "tree-sitter-solidity 1.2.13\n"
    );
}

#[test]
fn rules_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.sol",
        "contract C { function f() public { g(1); } }",
    );
    let b = write(
        dir.path(),
        "b.sol",
        "contract C { function f() public { g(2); } }",
    );
    // The empty rule set keeps punctuation and unflattened literals.
    let rules = write(dir.path(), "empty.rules", "flatten:\nalias:\nignore:\n");
    let default = stdout(&soldiff(&["diff", &a, &b, "--format", "text"]));
    let flagged = stdout(&soldiff(&[
        "diff", &a, &b, "--format", "text", "--rules", &rules,
    ]));
    let from_env = Command::new(env!("CARGO_BIN_EXE_soldiff"))
        .args(["diff", &a, &b, "--format", "text"])
        .env("SOLDIFF_RULES", &rules)
        .output()
        .unwrap();
    assert_eq!(stdout(&from_env), flagged);
    let dump = stdout(&soldiff(&[
        "diff",
        &a,
        &b,
        "--dump-tree",
        "--rules",
        &rules,
    ]));
    assert!(dump.contains("(: ("), "{dump}");
    assert_eq!(default.lines().count(), 1, "{default}");
    assert_eq!(flagged.lines().count(), 1, "{flagged}");
    let bad = write(dir.path(), "bad.rules", "flatten:\nalias:\nx\n");
    let o = soldiff(&["diff", &a, &b, "--rules", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

fn identical_manifest(dir: &Path, n: usize) -> PathBuf {
    write(dir, "same.sol", SIMPLE_STORAGE);
    let mut m = String::from("pairId,before,after\n");
    for i in 0..n {
        m.push_str(&format!("id{i},same.sol,same.sol\n"));
    }
    PathBuf::from(write(dir, "manifest.csv", &m))
}

#[test]
fn identical_pairs_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = identical_manifest(dir.path(), 10);
    let out = dir.path().join("report.csv");
    let o = soldiff(&[
        "corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = rows(&out);
    assert_eq!(rows.len(), 10);
    assert!(rows
        .iter()
        .all(|r| r.status == Status::Ok && r.edit_distance == Some(0)));
    let ids: Vec<&str> = rows.iter().map(|r| r.pair_id.as_str()).collect();
    assert_eq!(ids, (0..10).map(|i| format!("id{i}")).collect::<Vec<_>>());
    assert!(
        stdout(&o).contains("success rate: 100.00%"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn corpus_to_stdout_with_timings() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = identical_manifest(dir.path(), 2);
    let o = soldiff(&["corpus", manifest.to_str().unwrap(), "--timings"]);
    assert!(o.status.success());
    let rows = read_reports(&o.stdout[..]).unwrap();
    assert!(rows.iter().all(|r| r.ms.is_some()));
    assert!(stderr(&o).contains("pairs: 2"));
}

#[test]
fn missing_files_and_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.sol", SIMPLE_STORAGE);
    let manifest = write(
        dir.path(),
        "manifest.csv",
        "pairId,before,after,category\nok,a.sol,a.sol,same\ngone,a.sol,nowhere.sol,lost\n",
    );
    let out = dir.path().join("r.csv");
    let o = soldiff(&["corpus", &manifest, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = rows(&out);
    assert_eq!(rows[1].status, Status::Missing);
    assert_eq!(rows[1].edit_distance, None);
    assert!(stdout(&o).contains("success rate: 50.00%"));

    let dup = write(
        dir.path(),
        "dup.csv",
        "pairId,before,after\nx,a.sol,a.sol\nx,a.sol,a.sol\n",
    );
    let o = soldiff(&["corpus", &dup]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("duplicate pairId"));
}

#[test]
fn verified_corpus_run() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = soldiff_fixtures::mutation_corpus(201, 40, 8);
    let manifest = soldiff_fixtures::write_corpus(dir.path(), &pairs).unwrap();
    let out = dir.path().join("r.csv");
    let o = soldiff(&[
        "corpus",
        manifest.to_str().unwrap(),
        "--verify",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = rows(&out);
    assert!(rows.iter().all(|r| r.is_ok()), "{rows:?}");
    for (r, p) in rows.iter().zip(&pairs) {
        assert_eq!(r.category.as_deref(), Some(p.category.as_str()));
        assert_eq!(r.mutation_count, Some(1));
        assert!(r.edit_distance.unwrap() > 0);
    }
}

#[test]
fn summarize_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "r.csv",
        "pairId,status,editDistance,inserts,deletes,updates,moves,lineEditDistance,ms,minHeight,minDice,maxRecoverySize,category,mutationCount\n\
         p,ok,6,1,0,5,0,4,,2,0.5,100,,\n",
    );
    let o = soldiff(&["summarize", &csv]);
    assert!(o.status.success());
    let table = stdout(&o);
    let row: Vec<&str> = table.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(
        row,
        ["all", "1", "1", "6.00", "6.00", "6", "4.00", "4.00", "4"]
    );

    let bad = write(dir.path(), "bad.csv", "pairId,status\np,ok\n");
    assert_eq!(soldiff(&["summarize", &bad]).status.code(), Some(1));
}

fn group_means(table: &str) -> Vec<(String, f64, f64)> {
    table
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (
                f[0].to_owned(),
                f[3].parse().unwrap(),
                f[6].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn mean_distance_grows_with_mutation_count() {
    let dir = tempfile::tempdir().unwrap();
    let categories = [
        Category::Literal,
        Category::Rename,
        Category::InsertFunction,
        Category::InsertStatement,
        Category::MoveFunction,
    ];
    let mut pairs = Vec::new();
    for n in 1..=4 {
        for mut p in soldiff_fixtures::pairs(300 + n as u64, 15, 12, &categories, n) {
            p.id = format!("m{n}-{}", p.id);
            pairs.push(p);
        }
    }
    let manifest = soldiff_fixtures::write_corpus(dir.path(), &pairs).unwrap();
    let out = dir.path().join("r.csv");
    assert!(soldiff(&[
        "corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let table = stdout(&soldiff(&[
        "summarize",
        out.to_str().unwrap(),
        "--group-by",
        "mutationCount",
    ]));
    let means = group_means(&table);
    assert_eq!(
        means.iter().map(|m| m.0.as_str()).collect::<Vec<_>>(),
        ["1", "2", "3", "4"]
    );
    assert!(means.windows(2).all(|w| w[0].1 <= w[1].1), "{table}");
}

#[test]
fn moves_beat_the_line_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let mut pairs = soldiff_fixtures::pairs(401, 20, 10, &[Category::MoveFunction], 1);
    pairs.extend(soldiff_fixtures::pairs(
        402,
        20,
        10,
        &[Category::Literal],
        1,
    ));
    for (i, p) in pairs.iter_mut().enumerate() {
        p.id = format!("q{i}");
    }
    let manifest = soldiff_fixtures::write_corpus(dir.path(), &pairs).unwrap();
    let out = dir.path().join("r.csv");
    assert!(soldiff(&[
        "corpus",
        manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let table = stdout(&soldiff(&[
        "summarize",
        out.to_str().unwrap(),
        "--group-by",
        "category",
    ]));
    let means = group_means(&table);
    let moves = means
        .iter()
        .find(|m| m.0 == "move_function")
        .expect("move group");
    assert_eq!(moves.1, 1.0, "{table}");
    assert!(moves.1 < moves.2, "{table}");
}
