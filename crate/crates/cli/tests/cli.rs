use std::process::Command;

fn coarsekit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_coarsekit")).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    let s = space.to_str().unwrap();
    assert!(coarsekit(&["gen", r#"{"kind":"line","n":20}"#, "--space-out", s]).status.success());

    let cover = dir.path().join("cover.json");
    std::fs::write(&cover, r#"{"labels":[{"label":"A","members":[0,1,2,3,4,5,6,7,8,9,10]},{"label":"B","members":[9,10,11,12,13,14,15,16,17,18,19]}]}"#).unwrap();
    let c = cover.to_str().unwrap();
    let limited = coarsekit(&["dim", s, c, "--mode", "Ln", "--n", "1"]);
    assert_eq!(limited.status.code(), Some(3));
    let heuristic = coarsekit(&["dim", s, c, "--mode", "Ln", "--n", "1", "--heuristic"]);
    assert!(heuristic.status.success());
    assert!(String::from_utf8_lossy(&heuristic.stdout).contains("\"heuristic\""));
    assert!(coarsekit(&["dim", s, c, "--mode", "Ln", "--n", "1", "--exact-limit", "20"]).status.success());

    let missing = coarsekit(&["analyze", "/nonexistent/space.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/space.json"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"points":3,"metric":{"type":"matrix","rows":[[0,1,5],[1,0,1],[5,1,0]]}}"#).unwrap();
    let tri = coarsekit(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(tri.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&tri.stderr).contains("triangle"));
}

#[test]
fn global_space_flag_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    let out = dir.path().join("report.json");
    let s = space.to_str().unwrap();
    assert!(coarsekit(&["gen", r#"{"kind":"geometric","base":3,"count":5}"#, "--space-out", s]).status.success());
    let r =
        coarsekit(&["map", "--space", s, "--retract", "0,2,4", "--scales", "4,20,100", "-o", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["table"], serde_json::json!([0, 0, 2, 2, 4]));
}
