use std::path::Path;
use std::process::{Command, Output};

fn ddtrack(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddtrack"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ddtrack-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const HEADER: &str = "k,mode,ber_sim,ber_ana,mse_sim,mse_ana,p_emp,p_ana,q_emp,q_ana,E_k";

#[test]
fn analyze_is_deterministic_across_invocations() {
    let dir = tempdir("analyze");
    for out in ["a.csv", "b.csv"] {
        let result = ddtrack(
            &[
                "analyze",
                "--tx",
                "4",
                "--rx",
                "4",
                "--fdt",
                "0.004",
                "--ebn0-db",
                "5",
                "--out",
                out,
            ],
            &dir,
        );
        assert!(result.status.success(), "{result:?}");
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), HEADER);
    // k = 0 row plus 200 snapshots
    assert_eq!(lines.count(), 201);
    // simulation-only columns stay empty
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 11);
    assert_eq!(fields[2], "");
    assert_eq!(fields[4], "");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn simulate_same_seed_is_byte_identical() {
    let dir = tempdir("simulate");
    for out in ["a.csv", "b.csv"] {
        let result = ddtrack(
            &[
                "simulate", "--runs", "3", "--seed", "7", "--train", "5", "--data", "10", "--out",
                out,
            ],
            &dir,
        );
        assert!(result.status.success(), "{result:?}");
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);

    // a different seed changes the bytes
    let result = ddtrack(
        &[
            "simulate", "--runs", "3", "--seed", "8", "--train", "5", "--data", "10", "--out",
            "c.csv",
        ],
        &dir,
    );
    assert!(result.status.success());
    assert_ne!(a, std::fs::read(dir.join("c.csv")).unwrap());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn simulate_results_do_not_depend_on_thread_count() {
    let dir = tempdir("threads");
    for (threads, out) in [("1", "t1.csv"), ("4", "t4.csv")] {
        let result = ddtrack(
            &[
                "simulate",
                "--runs",
                "40",
                "--seed",
                "3",
                "--train",
                "4",
                "--data",
                "8",
                "--threads",
                threads,
                "--out",
                out,
            ],
            &dir,
        );
        assert!(result.status.success(), "{result:?}");
    }
    assert_eq!(
        std::fs::read(dir.join("t1.csv")).unwrap(),
        std::fs::read(dir.join("t4.csv")).unwrap()
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn compare_emits_gap_columns_and_summary() {
    let dir = tempdir("compare");
    let result = ddtrack(
        &[
            "compare", "--runs", "10", "--seed", "42", "--train", "5", "--data", "20", "--out",
            "cmp.csv",
        ],
        &dir,
    );
    assert!(result.status.success(), "{result:?}");
    let text = std::fs::read_to_string(dir.join("cmp.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("{HEADER},ber_gap_rel,mse_gap_rel")
    );
    assert_eq!(lines.count(), 26);
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("steady state"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_writes_one_file_per_point_plus_index() {
    let dir = tempdir("sweep");
    let result = ddtrack(
        &[
            "sweep",
            "--tx",
            "2,4",
            "--fdt",
            "0.004,0.01",
            "--ebn0-db",
            "5",
            "--runs",
            "2",
            "--train",
            "3",
            "--data",
            "5",
            "--out-dir",
            "grid",
        ],
        &dir,
    );
    assert!(result.status.success(), "{result:?}");
    let index = std::fs::read_to_string(dir.join("grid/index.csv")).unwrap();
    let rows: Vec<&str> = index.lines().collect();
    assert_eq!(rows[0], "file,tx,rx,fdt,ebn0_db,train,data,runs,seed");
    assert_eq!(rows.len(), 5); // header + 4 grid points
    for row in &rows[1..] {
        let file = row.split(',').next().unwrap();
        assert!(dir.join("grid").join(file).exists(), "missing {file}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_flags_exit_nonzero_with_message() {
    let dir = tempdir("invalid");
    let result = ddtrack(&["analyze", "--fdt", "0.7", "--out", "x.csv"], &dir);
    assert!(!result.status.success());
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("fdt"), "stderr: {stderr}");
    assert!(!dir.join("x.csv").exists());

    // unknown flag is rejected by the parser
    let result = ddtrack(&["analyze", "--no-such-flag"], &dir);
    assert!(!result.status.success());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn overloaded_configuration_warns_but_runs() {
    let dir = tempdir("overload");
    let result = ddtrack(
        &[
            "analyze", "--tx", "4", "--rx", "2", "--train", "3", "--data", "3", "--out", "o.csv",
        ],
        &dir,
    );
    assert!(result.status.success(), "{result:?}");
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("warning"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unwritable_output_path_fails_cleanly() {
    let dir = tempdir("unwritable");
    let result = ddtrack(
        &[
            "analyze",
            "--train",
            "2",
            "--data",
            "2",
            "--out",
            "no/such/dir/x.csv",
        ],
        &dir,
    );
    assert!(!result.status.success());
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("cannot write"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}
