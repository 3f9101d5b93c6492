use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const G1: &str = "# 4-cycle\n4 4\n0 1 1\n1 2 2\n2 3 1\n0 3 5\n";
const G6: &str = "7 8\n0 1 1\n1 2 1\n2 3 1\n3 4 1\n1 5 1\n5 2 3\n3 6 1\n6 2 3\n";

fn ftdo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftdo")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, graph: &Path, d: u32, name: &str) -> (PathBuf, Output) {
    let out = dir.path().join(name);
    let o = ftdo(&[
        "build",
        "-g",
        s(graph),
        "-d",
        &d.to_string(),
        "--seed",
        "3",
        "-o",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    (out, o)
}

#[test]
fn build_reports_entry_counts() {
    let dir = TempDir::new().unwrap();
    let g1 = write(&dir, "g1.txt", G1);
    let g6 = write(&dir, "g6.txt", G6);
    let (_, o) = build(&dir, &g1, 1, "g1.fto");
    assert!(stdout(&o).contains("entries: 1024\n"));
    let (_, o) = build(&dir, &g6, 1, "g6.fto");
    assert!(stdout(&o).contains("entries: 9604\n"));
    // budget above m: every subset of the 4 edges
    let (_, o) = build(&dir, &g1, 5, "g1d5.fto");
    assert!(stdout(&o).contains("failure sets: 16\n"));
}

#[test]
fn g1_queries() {
    let dir = TempDir::new().unwrap();
    let g1 = write(&dir, "g1.txt", G1);
    let (oracle, _) = build(&dir, &g1, 2, "g1.fto");
    let q = |extra: &[&str]| {
        let mut args = vec!["query", "-o", s(&oracle), "-s", "0", "-t", "2"];
        args.extend_from_slice(extra);
        let o = ftdo(&args);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
    };
    assert_eq!(q(&["--fail", "1-2"]), "6\n");
    assert_eq!(q(&[]), "3\n");
    assert_eq!(q(&["--fail", "1-2", "--fail", "2-3"]), "UNREACHABLE\n");
    assert_eq!(q(&["--fail", "2-1"]), "6\n");

    let v: serde_json::Value = serde_json::from_str(&q(&["--fail", "1-2", "--json"])).unwrap();
    assert_eq!(v["distance"], 6);
    assert!(v["lookups"].as_u64().unwrap() >= 1);
    assert!(v["depth"].as_u64().unwrap() >= 1);
}

#[test]
fn query_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let g1 = write(&dir, "g1.txt", G1);
    let (oracle, _) = build(&dir, &g1, 1, "g1.fto");
    let o = s(&oracle);
    for args in [
        vec!["query", "-o", o, "-s", "0", "-t", "2", "--fail", "0-2"],
        vec!["query", "-o", o, "-s", "0", "-t", "2", "--fail", "1-2", "--fail", "2-3"],
        vec!["query", "-o", o, "-s", "0", "-t", "7"],
        vec!["query", "-o", o, "-s", "0", "-t", "2", "--fail", "1x2"],
    ] {
        assert_eq!(ftdo(&args).status.code(), Some(2), "{args:?}");
    }
    let junk = write(&dir, "junk.fto", "not an oracle");
    assert_eq!(
        ftdo(&["query", "-o", s(&junk), "-s", "0", "-t", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn build_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g6 = write(&dir, "g6.txt", G6);
    let (a, oa) = build(&dir, &g6, 2, "a.fto");
    let (b, ob) = build(&dir, &g6, 2, "b.fto");
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(oa.stdout, ob.stdout);
}

#[test]
fn build_rejects_invalid_graphs() {
    let dir = TempDir::new().unwrap();
    for (i, text) in [
        "3 2\n0 1 1\n0 1 2\n",
        "3 1\n0 1 1\n",
        "2 1\n0 1 0\n",
        "2 1\n0 0 1\n",
        "x",
    ]
    .iter()
    .enumerate()
    {
        let g = write(&dir, &format!("bad{i}.txt"), text);
        let out = dir.path().join("o.fto");
        let o = ftdo(&["build", "-g", s(&g), "-d", "1", "-o", s(&out)]);
        assert_eq!(o.status.code(), Some(2), "{text:?}");
    }
    let g1 = write(&dir, "g1.txt", G1);
    let out = dir.path().join("o.fto");
    assert_eq!(
        ftdo(&["build", "-g", s(&g1), "-d", "0", "-o", s(&out)]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_examples_pass() {
    let dir = TempDir::new().unwrap();
    let g1 = write(&dir, "g1.txt", G1);
    let g6 = write(&dir, "g6.txt", G6);
    let r = dir.path().join("r.txt");
    let gen = ftdo(&[
        "gen",
        "--model",
        "gnm",
        "-n",
        "8",
        "-m",
        "12",
        "--wmax",
        "32",
        "--seed",
        "7",
        "-o",
        s(&r),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    for (g, d, extra) in [
        (&g1, "2", vec!["--exhaustive"]),
        (&g6, "1", vec![]),
        (&r, "2", vec![]),
        (&r, "3", vec!["--samples", "500", "--seed", "2"]),
    ] {
        let mut args = vec!["verify", "-g", s(g), "-d", d];
        args.extend(extra);
        let o = ftdo(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).ends_with("PASS\n"));
    }
    let o = ftdo(&["verify", "-g", s(&g1), "-d", "2", "--exhaustive"]);
    assert!(stdout(&o).contains("instances:          132\n"));
}

#[test]
fn gen_examples() {
    let dir = TempDir::new().unwrap();
    let out = |name: &str| dir.path().join(name);
    let run = |n: &str, m: &str, seed: &str, path: &Path| {
        ftdo(&[
            "gen",
            "--model",
            "gnm",
            "-n",
            n,
            "-m",
            m,
            "--wmax",
            "9",
            "--seed",
            seed,
            "-o",
            s(path),
        ])
    };
    assert_eq!(run("5", "4", "1", &out("tree.txt")).status.code(), Some(0));
    assert!(fs::read_to_string(out("tree.txt")).unwrap().starts_with("5 4\n"));

    run("8", "12", "7", &out("a.txt"));
    run("8", "12", "7", &out("b.txt"));
    assert_eq!(fs::read(out("a.txt")).unwrap(), fs::read(out("b.txt")).unwrap());

    let o = run("4", "7", "1", &out("c.txt"));
    assert_eq!(o.status.code(), Some(2));
    assert!(!out("c.txt").exists());
}

#[test]
fn bench_table_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g6 = write(&dir, "g6.txt", G6);
    let args = [
        "bench",
        "-g",
        s(&g6),
        "--dmin",
        "1",
        "--dmax",
        "2",
        "--queries",
        "50",
        "--seed",
        "4",
    ];
    let a = ftdo(&args);
    let b = ftdo(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    // header, column names, one row per budget
    assert_eq!(text.lines().count(), 4);
    let row: Vec<&str> = text.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(&row[..4], &["1", "8", "9", "9604"]);
    assert!(row[6].parse::<u64>().unwrap() >= 1, "max lookups at d=1");

    let bad = [
        "bench",
        "-g",
        s(&g6),
        "--dmin",
        "2",
        "--dmax",
        "1",
        "--queries",
        "5",
        "--seed",
        "4",
    ];
    assert_eq!(ftdo(&bad).status.code(), Some(2));
}
