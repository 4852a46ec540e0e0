//! End-to-end checks of the `trmoa` binary.

use std::path::Path;
use std::process::Command;

fn trmoa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trmoa"))
}

fn run_ok(cmd: &mut Command) -> String {
    let output = cmd.output().expect("binary runs");
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).unwrap()
}

fn gen_micro(dir: &Path, seed: u64) {
    run_ok(trmoa().args([
        "gen",
        "--alpha", "1.0",
        "--beta", "0.25",
        "--users", "80",
        "--boards", "8",
        "--tags", "12",
        "--tag-count-min", "3",
        "--tag-count-max", "8",
        "--t2", "7200",
        "--seed", &seed.to_string(),
        "--out", dir.to_str().unwrap(),
    ]));
}

#[test]
fn gen_run_and_oracle_guard() {
    let tmp = tempfile::tempdir().unwrap();
    let instance_dir = tmp.path().join("inst");
    gen_micro(&instance_dir, 3);
    for file in [
        "trajectories.csv",
        "affinities.csv",
        "billboards.csv",
        "slots.csv",
        "advertisers.csv",
        "params.txt",
    ] {
        assert!(instance_dir.join(file).exists(), "{file}");
    }

    let out = tmp.path().join("alloc.txt");
    run_ok(trmoa().args([
        "run",
        "--instance", instance_dir.to_str().unwrap(),
        "--algo", "bg",
        "--seed", "5",
        "--out", out.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# trmoa allocation v1"));
    assert!(text.contains("[totals]"));

    // 64 slots exceed the default oracle guard.
    let output = trmoa()
        .args([
            "oracle",
            "--instance", instance_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("guard rail"), "{stderr}");
}

#[test]
fn run_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let instance_dir = tmp.path().join("inst");
    gen_micro(&instance_dir, 9);
    let a = run_ok(trmoa().args([
        "run",
        "--instance", instance_dir.to_str().unwrap(),
        "--algo", "rls",
        "--seed", "17",
    ]));
    let b = run_ok(trmoa().args([
        "run",
        "--instance", instance_dir.to_str().unwrap(),
        "--algo", "rls",
        "--seed", "17",
    ]));
    assert_eq!(a, b);
}

#[test]
fn sweep_writes_results_and_summarize_reads_them() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = tmp.path().join("grid.txt");
    std::fs::write(
        &grid,
        "alpha=0.5,1.0\nbeta=0.25\nusers=80\nboards=8\ntags=12\n\
         tag_count_min=3\ntag_count_max=8\nt2=7200\nseeds=2\nalgos=rg,random\n",
    )
    .unwrap();
    let out = tmp.path().join("sweep");
    run_ok(trmoa().args([
        "sweep",
        "--grid", grid.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
        "--strict",
    ]));
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 2); // header + cells*algos*seeds
    assert!(out.join("timings.csv").exists());
    assert!(out.join("trace").read_dir().unwrap().count() == 8);

    let summary = run_ok(trmoa().args([
        "summarize",
        "--results", out.join("results.csv").to_str().unwrap(),
        "--timings", out.join("timings.csv").to_str().unwrap(),
    ]));
    assert!(summary.lines().count() == 1 + 2 * 2); // header + cells*algos
    assert!(summary.contains("beats_random"));
}

#[test]
fn ingest_builds_an_instance_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let trajectories = write(
        "t.csv",
        "user_id,lat,lon,t_start,t_end\nu1,40.75,-73.98,100,200\nu1,40.75,-73.98,1000,1100\n",
    );
    let affinities = write("a.csv", "user_id,tag_id,prob\nu1,coffee,0.5\n");
    let billboards = write("b.csv", "board_id,lat,lon\nb1,40.75,-73.98\n");
    let advertisers = write("ad.csv", "adv_id,demand,payment,tags\nacme,0.4,1,coffee\n");
    let out = tmp.path().join("inst");
    run_ok(trmoa().args([
        "ingest",
        "--trajectories", trajectories.to_str().unwrap(),
        "--affinities", affinities.to_str().unwrap(),
        "--billboards", billboards.to_str().unwrap(),
        "--advertisers", advertisers.to_str().unwrap(),
        "--t2", "3600",
        "--out", out.to_str().unwrap(),
    ]));
    // Bit-exact reload: runs on the ingested instance work end to end.
    run_ok(trmoa().args([
        "run",
        "--instance", out.to_str().unwrap(),
        "--algo", "random",
    ]));
}
