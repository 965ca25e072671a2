mod common;

use bpweave::models;
use common::{bpweave, bpweave_env, project};

const FLAGS: &[(&str, &[&str])] = &[
    ("check", &[]),
    ("count", &["--max-depth"]),
    (
        "sample",
        &["-n", "--seed", "--uniform", "--max-depth", "--output"],
    ),
    (
        "ensemble",
        &[
            "--criteria",
            "--budget",
            "--seed",
            "--max-depth",
            "--output",
        ],
    ),
    (
        "analyze",
        &["--format", "--highlight", "--max-depth", "--output"],
    ),
    (
        "run",
        &[
            "--input",
            "--sample",
            "--adapter",
            "--seed",
            "--max-depth",
            "--workers",
            "--continue-on-failure",
            "--output",
        ],
    ),
];

fn help_text() -> String {
    let mut text = bpweave(["--help"]).stdout;
    for (cmd, _) in FLAGS {
        text.push_str(&format!("\n$ bpweave {cmd} --help\n"));
        text.push_str(&bpweave([cmd, &"--help"]).stdout);
    }
    text
}

#[test]
fn help_matches_golden_file() {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/help.txt");
    let text = help_text();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(golden, &text).unwrap();
    }
    assert_eq!(text, std::fs::read_to_string(golden).unwrap());
    for (cmd, flags) in FLAGS {
        let sub = bpweave([cmd, &"--help"]).stdout;
        for f in *flags {
            assert!(sub.contains(f), "`{cmd} --help` does not mention {f}");
        }
    }
}

#[test]
fn usage_errors() {
    let out = bpweave(["sample", "-n", "0", "."]);
    assert_eq!(out.code, 64);
    assert!(out.stdout.is_empty());
    assert_eq!(bpweave(["frobnicate"]).code, 64);
    assert_eq!(
        bpweave(["run", "."]).code,
        64,
        "run needs --input or --sample"
    );
    assert_eq!(bpweave(["--version"]).code, 0);
}

#[test]
fn dsl_errors_exit_2_with_locations() {
    let tmp = tempfile::tempdir().unwrap();
    let p = project(
        tmp.path(),
        "bad",
        &[("a.story", "story \"s\" {\n  request\n")],
    );
    let out = bpweave(["count".as_ref(), p.as_os_str()]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(
        out.stderr.contains("a.story:3:1: error[unexpected-eof]"),
        "{}",
        out.stderr
    );

    let empty = project(tmp.path(), "empty", &[]);
    assert_eq!(bpweave(["check".as_ref(), empty.as_os_str()]).code, 2);
    assert_eq!(bpweave(["check", "/no/such/project"]).code, 2);
}

#[test]
fn files_are_merged_in_name_order() {
    let tmp = tempfile::tempdir().unwrap();
    let p = project(
        tmp.path(),
        "split",
        &[
            ("b.story", r#"story "second" { request b }"#),
            ("a.story", r#"story "first" { request a }"#),
            ("notes.txt", "x"),
        ],
    );
    let out = bpweave(["check".as_ref(), p.as_os_str()]);
    assert_eq!(
        (out.code, out.stdout.as_str()),
        (0, "ok: 2 stories, 2 event names\n")
    );
    let dup = project(
        tmp.path(),
        "dup",
        &[
            ("a.story", r#"story "s" { request a }"#),
            ("b.story", r#"story "s" { request b }"#),
        ],
    );
    let out = bpweave(["check".as_ref(), dup.as_os_str()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("b.story"), "{}", out.stderr);
}

#[test]
fn warnings_do_not_fail_check() {
    let tmp = tempfile::tempdir().unwrap();
    let p = project(
        tmp.path(),
        "w",
        &[("m.story", r#"story "s" { waitFor nothing request a }"#)],
    );
    let out = bpweave(["check".as_ref(), p.as_os_str()]);
    assert_eq!(out.code, 0);
    assert!(
        out.stderr.contains("warning[unmatched-pattern]"),
        "{}",
        out.stderr
    );
}

#[test]
fn count_reports_cycles_and_truncation() {
    let tmp = tempfile::tempdir().unwrap();
    let lp = project(
        tmp.path(),
        "loop",
        &[("m.story", r#"story "s" { forever { request a } }"#)],
    );
    assert_eq!(
        bpweave(["count".as_ref(), lp.as_os_str()]).stdout,
        "cyclic (nodes: 1, edges: 1)\n"
    );
    let b = project(tmp.path(), "buttons", &[("m.story", models::BUTTONS)]);
    let out = bpweave([
        "count".as_ref(),
        "--max-depth".as_ref(),
        "2".as_ref(),
        b.as_os_str(),
    ]);
    assert_eq!(out.stdout, "truncated at depth 2 (nodes: 6, edges: 6)\n");
}

#[test]
fn node_budget_exit_8() {
    let tmp = tempfile::tempdir().unwrap();
    let b = project(
        tmp.path(),
        "b",
        &[
            ("m.story", models::BUTTONS),
            ("config.toml", "max_nodes = 10\n"),
        ],
    );
    assert_eq!(bpweave(["count".as_ref(), b.as_os_str()]).code, 8);
}

#[test]
fn sample_output_override_and_walks_on_cycles() {
    let tmp = tempfile::tempdir().unwrap();
    let lp = project(
        tmp.path(),
        "loop",
        &[("m.story", r#"story "s" { forever { request a } }"#)],
    );
    let out_file = tmp.path().join("out/walks.ndjson");
    let out = bpweave([
        "sample".as_ref(),
        "-n".as_ref(),
        "2".as_ref(),
        "--max-depth".as_ref(),
        "4".as_ref(),
        "-o".as_ref(),
        out_file.as_os_str(),
        lp.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("\"depth-capped\"")));
}

#[test]
fn ensemble_budget_one() {
    let tmp = tempfile::tempdir().unwrap();
    let b = project(tmp.path(), "b", &[("m.story", models::BUTTONS)]);
    let out = bpweave([
        "ensemble".as_ref(),
        "-c".as_ref(),
        "events".as_ref(),
        "--budget".as_ref(),
        "1".as_ref(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(
        std::fs::read_to_string(b.join("ensemble.ndjson"))
            .unwrap()
            .lines()
            .count(),
        1
    );
    assert!(
        out.stdout
            .starts_with("coverage ratio: 1.0 (2/2)\nmembers: 1\n"),
        "{}",
        out.stdout
    );
}

#[test]
fn ensemble_rejects_complexity() {
    let tmp = tempfile::tempdir().unwrap();
    let b = project(tmp.path(), "b", &[("m.story", models::BUTTONS)]);
    let out = bpweave([
        "ensemble".as_ref(),
        "-c".as_ref(),
        "complexity".as_ref(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 4);
    for c in ["events", "pairs", "triples", "edges", "diversity"] {
        assert!(out.stderr.contains(c));
    }
}

#[test]
fn analyze_frontier_and_highlight_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let b = project(tmp.path(), "b", &[("m.story", models::BUTTONS)]);
    let out = bpweave([
        "analyze".as_ref(),
        "--max-depth".as_ref(),
        "3".as_ref(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 0);
    let gv = std::fs::read_to_string(b.join("model.gv")).unwrap();
    assert!(gv.starts_with("digraph"));
    assert_eq!(gv.matches("style=dashed").count(), 4);

    let missing = tmp.path().join("nope.ndjson");
    let out = bpweave([
        "analyze".as_ref(),
        "--highlight".as_ref(),
        missing.as_os_str(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 2);
    let garbage = tmp.path().join("garbage.ndjson");
    std::fs::write(&garbage, "not json\n").unwrap();
    let out = bpweave([
        "analyze".as_ref(),
        "--highlight".as_ref(),
        garbage.as_os_str(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 2);

    let foreign = tmp.path().join("foreign.ndjson");
    std::fs::write(
        &foreign,
        "{\"events\":[{\"fields\":{},\"name\":\"zzz\"}],\"terminal\":\"completed\"}\n",
    )
    .unwrap();
    let out = bpweave([
        "analyze".as_ref(),
        "--highlight".as_ref(),
        foreign.as_os_str(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 0);
    assert!(
        out.stderr
            .contains("foreign.ndjson:1: scenario is not a run"),
        "{}",
        out.stderr
    );
}

#[cfg(unix)]
#[test]
fn pdf_renderer_errors() {
    use std::os::unix::fs::PermissionsExt;
    let tmp = tempfile::tempdir().unwrap();
    let b = project(
        tmp.path(),
        "b",
        &[
            ("m.story", models::BUTTONS),
            ("config.toml", "renderer = \"no-such-dot-xyz\"\n"),
        ],
    );
    let out = bpweave([
        "analyze".as_ref(),
        "-f".as_ref(),
        "pdf".as_ref(),
        b.as_os_str(),
    ]);
    assert_eq!(out.code, 5);
    assert!(out.stderr.contains("`renderer`"));

    let failing = project(
        tmp.path(),
        "f",
        &[
            ("m.story", models::BUTTONS),
            ("config.toml", "renderer = \"./broken-dot\"\n"),
            (
                "broken-dot",
                "#!/bin/sh\necho 'syntax error near line 1' >&2\nexit 1\n",
            ),
        ],
    );
    std::fs::set_permissions(
        failing.join("broken-dot"),
        std::fs::Permissions::from_mode(0o755),
    )
    .unwrap();
    let out = bpweave([
        "analyze".as_ref(),
        "-f".as_ref(),
        "pdf".as_ref(),
        failing.as_os_str(),
    ]);
    assert_eq!(out.code, 7);
    assert!(out.stderr.contains("syntax error near line 1"));

    let working = project(
        tmp.path(),
        "w",
        &[
            ("m.story", models::BUTTONS),
            ("config.toml", "renderer = \"./copy-dot\"\n"),
            ("copy-dot", "#!/bin/sh\ncat > \"$3\"\n"),
        ],
    );
    std::fs::set_permissions(
        working.join("copy-dot"),
        std::fs::Permissions::from_mode(0o755),
    )
    .unwrap();
    let out = bpweave([
        "analyze".as_ref(),
        "-f".as_ref(),
        "pdf".as_ref(),
        working.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(std::fs::metadata(working.join("model.pdf")).unwrap().len() > 0);
}

const SEARCH: &str = r#"
event Search(text) = [type_query(text: text), StartSearch]
story "search" { session A1 { request Search(text: "pizza") } }
"#;

#[test]
fn run_with_mock_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = project(tmp.path(), "ok", &[("m.story", SEARCH)]);
    let out = bpweave([
        "run".as_ref(),
        "--sample".as_ref(),
        "5".as_ref(),
        ok.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(ok.join("report.ndjson").exists() && ok.join("report.txt").exists());

    let bad = project(
        tmp.path(),
        "bad",
        &[
            ("m.story", SEARCH),
            (
                "config.toml",
                "tags = [\"smoke\"]\n[adapter.mock.verdicts]\nStartSearch = \"fail\"\n",
            ),
        ],
    );
    let out = bpweave([
        "run".as_ref(),
        "--sample".as_ref(),
        "4".as_ref(),
        bad.as_os_str(),
    ]);
    assert_eq!(out.code, 1);
    let report = std::fs::read_to_string(bad.join("report.ndjson")).unwrap();
    let groups: Vec<serde_json::Value> = report
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let smoke = groups.iter().find(|g| g["tag"] == "smoke").unwrap();
    assert_eq!(
        (
            smoke["n"].as_u64(),
            smoke["k"].as_u64(),
            smoke["p_hat"].as_f64()
        ),
        (Some(4), Some(4), Some(1.0))
    );
    let lo = smoke["wilson95"]["lo"].as_f64().unwrap();
    let z2 = 1.959964f64 * 1.959964;
    assert!((lo - 4.0 / (4.0 + z2)).abs() < 1e-9);
    assert_eq!(smoke["wilson95"]["hi"].as_f64(), Some(1.0));
    let table = std::fs::read_to_string(bad.join("report.txt")).unwrap();
    assert!(table.contains("StartSearch(session=A1) fail"), "{table}");
}

#[test]
fn run_from_file_and_adapter_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let p = project(
        tmp.path(),
        "p",
        &[
            ("m.story", SEARCH),
            (
                "config.toml",
                "[adapter.exec]\ncommand = \"no-such-sut-xyz\"\n",
            ),
        ],
    );
    assert_eq!(
        bpweave([
            "sample".as_ref(),
            "-n".as_ref(),
            "2".as_ref(),
            p.as_os_str()
        ])
        .code,
        0
    );
    let input = p.join("samples.ndjson");
    let out = bpweave([
        "run".as_ref(),
        "--input".as_ref(),
        input.as_os_str(),
        "--adapter".as_ref(),
        "exec".as_ref(),
        p.as_os_str(),
    ]);
    assert_eq!(out.code, 6);
    assert!(
        !p.join("report.ndjson").exists(),
        "nothing may be dispatched"
    );
    let out = bpweave([
        "run".as_ref(),
        "--input".as_ref(),
        input.as_os_str(),
        "--adapter".as_ref(),
        "http".as_ref(),
        p.as_os_str(),
    ]);
    assert_eq!(out.code, 6);
    let reports = tmp.path().join("reports");
    let out = bpweave_env(
        [
            "run".as_ref(),
            "--input".as_ref(),
            input.as_os_str(),
            "-o".as_ref(),
            reports.as_os_str(),
            p.as_os_str(),
        ],
        &[("SOURCE_DATE_EPOCH", "0")],
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    let header = std::fs::read_to_string(reports.join("report.ndjson")).unwrap();
    assert!(
        header.starts_with("{\"config\":{\"adapter\":\"mock\""),
        "{header}"
    );
    assert!(header
        .lines()
        .next()
        .unwrap()
        .contains("\"generated_at\":\"1970-01-01T00:00:00Z\""));
}

#[cfg(unix)]
#[test]
fn run_with_exec_adapter() {
    use std::os::unix::fs::PermissionsExt;
    let tmp = tempfile::tempdir().unwrap();
    let p = project(
        tmp.path(),
        "p",
        &[
            ("m.story", SEARCH),
            (
                "config.toml",
                "[adapter]\nkind = \"exec\"\n[adapter.exec]\ncommand = \"./sut.sh\"\ntimeout = 5\n",
            ),
            (
                "sut.sh",
                "#!/bin/sh\necho \"$1 $SESSION $TEXT\" >> \"$(dirname \"$0\")/calls.log\"\n",
            ),
        ],
    );
    std::fs::set_permissions(p.join("sut.sh"), std::fs::Permissions::from_mode(0o755)).unwrap();
    let out = bpweave([
        "run".as_ref(),
        "--sample".as_ref(),
        "1".as_ref(),
        p.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert_eq!(
        std::fs::read_to_string(p.join("calls.log")).unwrap(),
        "type_query A1 pizza\nStartSearch A1 \n"
    );
}

#[test]
fn analyze_depth_fifteen_on_a_deep_model() {
    let tmp = tempfile::tempdir().unwrap();
    let big = project(tmp.path(), "big", &[("m.story", &models::hot_cold(12))]);
    let out = bpweave([
        "analyze".as_ref(),
        "--max-depth".as_ref(),
        "15".as_ref(),
        big.as_os_str(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let gv = std::fs::read_to_string(big.join("model.gv")).unwrap();
    // nodes at depth 15 of a 12 x 12 interleaving lattice: i + j = 15 with i, j <= 12
    assert_eq!(gv.matches("style=dashed").count(), 10);
    assert!(!gv.contains("doublecircle"));
}
