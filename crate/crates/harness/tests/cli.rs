use std::path::Path;
use std::process::{Command, Output};

fn sailcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sailcover")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("exp.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMALL: &str = "[grid]\nrows = 4\ncols = 4\n[planner]\nn_iter = 4\nworkers = 2\nrollouts_per_worker = 1\n";

#[test]
fn validate_config_prints_digest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = sailcover(&["--config", &cfg, "validate-config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let digest = text.trim().strip_prefix("ok ").unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nrows = 0\n");
    assert_eq!(sailcover(&["--config", &cfg, "validate-config"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "[grid]\nbogus = 1\n");
    assert_eq!(sailcover(&["--config", &cfg, "validate-config"]).status.code(), Some(2));
    let out = sailcover(&["run", "--method", "greedy", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_and_batch_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();
    let run = sailcover(&["--config", &cfg, "run", "--method", "base", "--seed", "3", "--out", out, "--emit-plots"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let batch = sailcover(&["--config", &cfg, "batch", "--methods", "base,mcts_k0", "--seeds", "1..2", "--out", out, "--jobs", "2"]);
    assert!(batch.status.success(), "{}", String::from_utf8_lossy(&batch.stderr));
    let digest_dir = std::fs::read_dir(&out_dir).unwrap().next().unwrap().unwrap().path();
    for f in ["config.toml", "summary.txt", "summary.csv", "summary.json", "plots/manifest.json", "base/3/record.json"] {
        assert!(digest_dir.join(f).exists(), "missing {f}");
    }
    for m in ["base", "mcts_k0"] {
        for s in ["1", "2"] {
            let run = digest_dir.join(m).join(s);
            for f in ["record.json", "trace.csv", "curve.csv", "fields.csv", "cov_stage0.pgm"] {
                assert!(run.join(f).exists(), "missing {m}/{s}/{f}");
            }
        }
    }
}

#[test]
fn fields_and_polar_check_print_csv() {
    let out = sailcover(&["fields", "--seed", "7", "--stages", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 100);
    let out = sailcover(&["polar-check", "--tws", "4", "--step", "30"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("twa_deg,boat_speed_mps"));
    assert_eq!(text.lines().count(), 1 + 7);
}

#[test]
fn starved_mission_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}[run]\nmax_stages = 1\n"));
    let out = sailcover(&["--config", &cfg, "run", "--method", "base", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
