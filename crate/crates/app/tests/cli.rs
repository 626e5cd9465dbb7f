use std::path::Path;
use std::process::Command;

use inquest::fixture::{generate, SCRIPT};
use inquest_app::cli::{run, EXIT_OK, EXIT_USER};

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["inquest"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dataset_add_list_describe_and_duplicate() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(120, 42).write(&dir.path().join("data")).unwrap();
    let manifest = dir.path().join("m.json");
    let m = s(&manifest);

    let (code, out, _) = cli(&["--manifest", m, "dataset", "list"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1, "header only: {out}");

    let (code, out, err) = cli(&[
        "--manifest",
        m,
        "dataset",
        "add",
        "ProthomAlo",
        s(&data.prothomalo),
        "--description",
        "news reports of incidents",
        "--geometry",
        s(&data.geometry),
        "--region-column",
        "district-tag",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out, "ProthomAlo: registered (120 rows)\n");

    let (code, _, err) =
        cli(&["--manifest", m, "dataset", "add", "ProthomAlo", s(&data.prothomalo), "--description", "again"]);
    assert_eq!(code, EXIT_USER);
    assert!(err.contains("already registered"), "{err}");

    let (code, out, _) = cli(&["--manifest", m, "dataset", "describe", "ProthomAlo"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("rows: 120") && out.contains("district-tag text") && out.contains("geometry: "), "{out}");

    let (code, _, _) = cli(&["--manifest", m, "dataset", "describe", "Nope"]);
    assert_eq!(code, EXIT_USER);
}

#[test]
fn mql_runs_displays_and_reports_carets() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(60, 42).write(&dir.path().join("data")).unwrap();
    let out_dir = dir.path().join("out");
    let q4 = "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;";
    let base = ["--manifest", s(&data.manifest), "--out", s(&out_dir)];
    let (code, first, err) = cli(&[&base[..], &["mql", q4]].concat());
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(first.contains("cluster over 60 rows"), "{first}");
    let svg = std::fs::read_to_string(out_dir.join("mql-1-cluster_scatter.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let (_, second, _) = cli(&[&base[..], &["mql", q4]].concat());
    assert_eq!(first, second);

    let (code, _, err) = cli(&[&base[..], &["mql", "GENERATE DISPLAY OF CLUSTER 3 FROM ProthomAlo;"]].concat());
    assert_eq!(code, EXIT_USER);
    assert!(err.contains('^') && err.contains("1 | "), "{err}");

    let (code, _, err) = cli(&[&base[..], &["mql", "GENERATE CLUSTER OF 3 FEATURES nope FROM ProthomAlo;"]].concat());
    assert_eq!(code, EXIT_USER);
    assert!(err.contains("nope") && err.contains('^'), "{err}");
}

#[test]
fn chat_script_writes_transcripts_and_survives_bad_turns() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(100, 42).write(&dir.path().join("data")).unwrap();
    let script = dir.path().join("script.txt");
    std::fs::write(&script, format!("# fixture questions\n{}\n\n{}\nsing me a song\n", SCRIPT[0], SCRIPT[1])).unwrap();
    let out_dir = dir.path().join("out");
    let (code, out, err) =
        cli(&["--manifest", s(&data.manifest), "--out", s(&out_dir), "chat", "--script", s(&script)]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = std::fs::read_to_string(out_dir.join("transcript.txt")).unwrap();
    assert!(out.starts_with(&text));
    assert_eq!(text.matches("# turn ").count(), 3);
    assert!(text.contains("error: map (unmappable_query)"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("transcript.json")).unwrap()).unwrap();
    assert_eq!(json["turns"].as_array().unwrap().len(), 3);
    let svgs = std::fs::read_dir(out_dir.join("artifacts/cli"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "svg")
        .count();
    assert_eq!(svgs, 2);

    std::fs::write(&script, "").unwrap();
    let empty_out = dir.path().join("empty");
    let (code, _, _) = cli(&["--manifest", s(&data.manifest), "--out", s(&empty_out), "chat", "--script", s(&script)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(empty_out.join("transcript.txt")).unwrap(), "");
}

#[test]
fn fixture_generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let (code, _, _) = cli(&["--seed", "42", "fixture", "generate", "--rows", "300", "--dir", s(d)]);
        assert_eq!(code, EXIT_OK);
    }
    for f in ["prothomalo.csv", "ngorep.csv", "truth.json", "districts.geojson"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = std::fs::read_to_string(a.join("prothomalo.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap().split(',').count(), 8);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_inquest");
    let dir = tempfile::tempdir().unwrap();
    let ok = Command::new(bin).args(["--out", s(dir.path()), "fixture", "generate", "--rows", "20"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let manifest = dir.path().join("manifest.json");
    let bad = Command::new(bin).args(["--manifest", s(&manifest), "mql", "GENERATE ;"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let llm = Command::new(bin)
        .env_remove("INQUEST_LLM_ENDPOINT")
        .args(["--manifest", s(&manifest), "--agent", "llm", "chat", "--script", s(&manifest)])
        .output()
        .unwrap();
    assert_eq!(llm.status.code(), Some(1));
}
