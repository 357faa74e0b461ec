use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kappa-lab"))
}

fn record(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn lists_the_registry() {
    let out = lab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "sl2-commutators",
        "fka-orders",
        "conserve-hyperplane",
        "branch-parseval",
        "ktype",
    ] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn fka_orders_for_three_halves() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab()
        .args(["fka-orders", "--a", "3/2", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let r = record(&out);
    assert_eq!(r["pass"], true);
    let order = r["metrics"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["name"] == "order_a_3_2")
        .unwrap();
    assert_eq!(order["value"], 6.0);
    assert!(dir.path().join("fka-orders.json").exists());
    assert!(dir.path().join("fka-orders_trace.csv").exists());
    assert!(dir.path().join("records.jsonl").exists());
}

#[test]
fn unknown_experiment_and_bad_flags() {
    let out = lab().arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lab().args(["energy", "--tol", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lab().args(["suite", "other"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_cache_env() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "experiment = \"semigroup-laws\"\nk = 0.5\na = \"3/2\"\ngrid = 32\nseed = 3\n",
    )
    .unwrap();
    let out = lab()
        .args(["semigroup-laws", "--config"])
        .arg(&cfg)
        .env("KAPPA_LAB_CACHE", &cache)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = record(&out);
    assert_eq!(r["params"]["modes"], 32);
    assert_eq!(r["params"]["seed"], 3);
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 2);
    // Warm cache gives the same numbers.
    let again = record(
        &lab()
            .args(["semigroup-laws", "--config"])
            .arg(&cfg)
            .env("KAPPA_LAB_CACHE", &cache)
            .output()
            .unwrap(),
    );
    assert_eq!(r["metrics"], again["metrics"]);
}

#[test]
fn tolerance_override_is_applied() {
    let out = lab()
        .args(["intertwining", "--tol", "1e-30"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(record(&out)["pass"], false);
}
