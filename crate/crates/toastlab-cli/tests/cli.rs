//! Exit-code contract and seed plumbing of the command-line surface.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toastlab"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toastlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap_or(-1)
}

fn generate(dir: &Path, dims: &str, topology: &str, extra: &[&str]) -> i32 {
    code(
        bin()
            .args([
                "generate", "--dims", dims, "--topology", topology, "--levels", "2", "--scale",
                "8", "--r", "1", "--seed", "7",
            ])
            .args(extra)
            .current_dir(dir),
    )
}

#[test]
fn usage_errors_are_64() {
    assert_eq!(code(bin().arg("generate")), 64);
    assert_eq!(code(bin().args(["generate", "--dims", "0"])), 64);
}

#[test]
fn missing_input_is_66() {
    let dir = tmp("missing");
    assert_eq!(
        code(bin().args(["verify", "toast", "--graph", "absent.json"]).current_dir(&dir)),
        66
    );
    assert_eq!(
        code(bin().args(["tree", "--graph", "absent.json"]).current_dir(&dir)),
        66
    );
}

#[test]
fn generation_failure_is_3() {
    let dir = tmp("genfail");
    let c = code(
        bin()
            .args([
                "generate", "--dims", "8,8", "--topology", "torus", "--levels", "5", "--scale",
                "8", "--r", "1", "--seed", "1",
            ])
            .current_dir(&dir),
    );
    assert_eq!(c, 3);
}

#[test]
fn verification_failures_are_2() {
    let dir = tmp("verify2");
    assert_eq!(generate(&dir, "16,16", "torus", &[]), 0);
    // orientation rejects odd-degree window graphs
    let wdir = tmp("window2");
    assert_eq!(generate(&wdir, "80,80", "window", &[]), 0);
    assert_eq!(code(bin().arg("orient").current_dir(&wdir)), 2);
    // tree on a full-cover torus toast has no escape
    assert_eq!(code(bin().arg("tree").current_dir(&dir)), 2);

    // tampered toast: drop a tile so T1 fails
    let toast = std::fs::read_to_string(dir.join("toast.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&toast).unwrap();
    let tiles = value["tiles"].as_array_mut().unwrap();
    tiles.pop();
    std::fs::write(dir.join("tampered.json"), value.to_string()).unwrap();
    assert_eq!(
        code(
            bin()
                .args(["verify", "toast", "--in", "tampered.json"])
                .current_dir(&dir)
        ),
        2
    );
}

#[test]
fn seed_env_fallback_matches_flag() {
    let with_flag = tmp("seed-flag");
    assert_eq!(generate(&with_flag, "16,16", "torus", &[]), 0);
    let with_env = tmp("seed-env");
    let c = code(
        bin()
            .args([
                "generate", "--dims", "16,16", "--topology", "torus", "--levels", "2", "--scale",
                "8", "--r", "1",
            ])
            .env("TOASTLAB_SEED", "7")
            .current_dir(&with_env),
    );
    assert_eq!(c, 0);
    assert_eq!(
        std::fs::read(with_flag.join("toast.json")).unwrap(),
        std::fs::read(with_env.join("toast.json")).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let one = tmp("threads-1");
    assert_eq!(generate(&one, "16,16", "torus", &["--threads", "1"]), 0);
    let four = tmp("threads-4");
    assert_eq!(generate(&four, "16,16", "torus", &["--threads", "4"]), 0);
    for name in ["toast.json", "levels.json", "report.json"] {
        assert_eq!(
            std::fs::read(one.join(name)).unwrap(),
            std::fs::read(four.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn oracle_subcommands_run() {
    let dir = tmp("oracle");
    assert_eq!(generate(&dir, "16,16", "torus", &[]), 0);
    assert_eq!(code(bin().args(["oracle", "matching"]).current_dir(&dir)), 0);
    std::fs::write(
        dir.join("small.json"),
        r#"{"topology":"explicit","vertex_count":4,"edges":[[0,1],[1,2],[2,3],[3,0]]}"#,
    )
    .unwrap();
    assert_eq!(
        code(
            bin()
                .args(["oracle", "parity", "--graph", "small.json", "--p", "0,1"])
                .current_dir(&dir)
        ),
        0
    );
    assert_eq!(
        code(
            bin()
                .args(["oracle", "kappa", "--dims", "17,17", "--max-size", "3", "--kappa-max", "3"])
                .current_dir(&dir)
        ),
        0
    );
}

#[test]
fn garbage_artifacts_fail_cleanly() {
    let dir = tmp("garbage");
    assert_eq!(generate(&dir, "16,16", "torus", &[]), 0);
    // out-of-range ids must produce a failing report, not a crash
    std::fs::write(dir.join("matching.json"), "[[0,999999]]").unwrap();
    assert_eq!(
        code(bin().args(["verify", "matching"]).current_dir(&dir)),
        2
    );
    std::fs::write(
        dir.join("orientation.json"),
        r#"[{"tail":123456,"head":123457}]"#,
    )
    .unwrap();
    assert_eq!(
        code(bin().args(["verify", "orientation"]).current_dir(&dir)),
        2
    );
    std::fs::write(dir.join("toast.json"), r#"{"tiles":[{"id":0,"level":1,"vertices":[999999]}],"flags":{"claims_connected":false,"claims_layered":false}}"#).unwrap();
    assert_eq!(code(bin().args(["verify", "toast"]).current_dir(&dir)), 2);
    std::fs::write(dir.join("bad.json"), "not json").unwrap();
    assert_eq!(
        code(bin().args(["verify", "toast", "--in", "bad.json"]).current_dir(&dir)),
        2
    );
}

#[test]
fn verify_folner_and_iso() {
    let dir = tmp("verify-folner");
    assert_eq!(
        code(
            bin()
                .args(["verify", "folner", "--d", "2", "--n", "40", "--epsilon", "0.25"])
                .current_dir(&dir)
        ),
        0
    );
    // a one-member family around the center of a window
    std::fs::write(
        dir.join("graph.json"),
        r#"{"dims":[21,21],"topology":"window"}"#,
    )
    .unwrap();
    std::fs::write(
        dir.join("family.json"),
        r#"{"members":[{"f":[220],"b_f":[178,198,199,200,218,219,220,221,222,240,241,242,262]}]}"#,
    )
    .unwrap();
    assert_eq!(
        code(bin().args(["verify", "iso"]).current_dir(&dir)),
        0
    );
}
