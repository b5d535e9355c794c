use std::path::Path;
use std::process::Command;

use chaoswpt::cli::CSV_HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaoswpt"))
}

fn run(args: &[&str], dir: &Path, threads: &str) -> (i32, String) {
    let out = bin()
        .args(args)
        .current_dir(dir)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr),
    )
}

#[test]
fn run_writes_csv_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.cfg"),
        "# short fig6 run\nn_symbols = 2000\nbeta = 12   # divisors of 12\nm = inf\n",
    )
    .unwrap();
    let (code, msg) = run(
        &[
            "run",
            "fig6_srdcsk_betar",
            "--config",
            "exp.cfg",
            "--out",
            "f6.csv",
        ],
        dir.path(),
        "2",
    );
    assert_eq!(code, 0, "{msg}");
    assert!(msg.contains("max relative deviation"), "{msg}");
    let csv = std::fs::read_to_string(dir.path().join("f6.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r.len(), 17);
        assert_eq!(
            (r[0], r[3], r[5], r[6], r[8]),
            ("fig6_srdcsk_betar", "srdcsk", "inf", "12", "2000")
        );
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "beta = 20\nbeta_r = 3\n").unwrap();
    let (code, msg) = run(&["papr", "--config", "c.cfg"], dir.path(), "1");
    assert_eq!(code, 2);
    assert!(msg.contains("beta_r") && msg.contains("divide"), "{msg}");
    let (code, msg) = run(
        &[
            "papr",
            "--config",
            "c.cfg",
            "--beta-r",
            "4",
            "--n-symbols",
            "500",
        ],
        dir.path(),
        "1",
    );
    assert_eq!(code, 0, "{msg}");
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "beta = 4\nwarp = 9\n").unwrap();
    for args in [
        vec!["run", "custom", "--config", "bad.cfg"],
        vec!["run", "custom", "--m", "0.2"],
        vec!["run", "custom", "--n-symbols", "0"],
        vec!["run", "nope"],
        vec![
            "run",
            "custom",
            "--out",
            "/nonexistent/dir/x.csv",
            "--n-symbols",
            "10",
        ],
        vec!["sweep", "beta"],
        vec!["sweep", "warp", "--grid", "1"],
        vec!["papr", "--unknown-flag"],
    ] {
        let (code, msg) = run(&args, dir.path(), "1");
        assert_eq!(code, 2, "{args:?}: {msg}");
    }
    let (_, msg) = run(&["run", "custom", "--config", "bad.cfg"], dir.path(), "1");
    assert!(msg.contains("warp"), "{msg}");
}

#[test]
fn strict_flags_a_biased_generator() {
    // the quadratic map biases the fourth moment by several percent at beta = 25
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "custom",
        "--beta",
        "25",
        "--m",
        "inf",
        "--degree",
        "2",
        "--n-symbols",
        "1000000",
        "--out",
        "b.csv",
    ];
    let (code, msg) = run(&args, dir.path(), "1");
    assert_eq!(code, 0, "{msg}");
    assert!(msg.contains("1 outside tolerance"), "{msg}");
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict, dir.path(), "1").0, 1);
    let mut fixed = strict.clone();
    fixed[7] = "4";
    let (code, msg) = run(&fixed, dir.path(), "1");
    assert_eq!(code, 0, "{msg}");
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (threads, name) in [("1", "a.csv"), ("4", "b.csv"), ("1", "c.csv")] {
        let (code, msg) = run(
            &[
                "run",
                "fig4_modulation",
                "--n-symbols",
                "9000",
                "--seed",
                "17",
                "--grid",
                "2,9",
                "--out",
                name,
            ],
            dir.path(),
            threads,
        );
        assert_eq!(code, 0, "{msg}");
        outputs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn sweep_and_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (code, msg) = run(
        &[
            "sweep",
            "m",
            "--grid",
            "1,4,inf",
            "--n-symbols",
            "3000",
            "--out",
            "s.csv",
        ],
        dir.path(),
        "1",
    );
    assert_eq!(code, 0, "{msg}");
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let ms: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap())
        .collect();
    assert_eq!(ms, ["1", "4", "inf"]);

    let (code, msg) = run(
        &[
            "sweep",
            "beta_r",
            "--beta",
            "20",
            "--grid",
            "1,7",
            "--n-symbols",
            "500",
            "--out",
            "r.csv",
        ],
        dir.path(),
        "1",
    );
    assert_eq!(code, 2);
    assert!(msg.contains("does not divide"), "{msg}");
    assert_eq!(
        std::fs::read_to_string(dir.path().join("r.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );

    let (code, msg) = run(
        &[
            "sweep",
            "tones",
            "--grid",
            "2,4",
            "--n-symbols",
            "500",
            "--out",
            "t.csv",
        ],
        dir.path(),
        "1",
    );
    assert_eq!(code, 0, "{msg}");

    let (code, msg) = run(
        &["compare-multisine", "--n-symbols", "20000"],
        dir.path(),
        "1",
    );
    assert_eq!(code, 0, "{msg}");
    assert!(
        msg.contains("beta = N = 16") && msg.contains("m = 4"),
        "{msg}"
    );

    let (code, msg) = run(&["selftest", "--n-symbols", "50000"], dir.path(), "1");
    assert_eq!(code, 0, "{msg}");
    assert!(msg.contains("checks passed"), "{msg}");

    let (code, msg) = run(
        &["papr", "--beta", "8", "--n-symbols", "1000"],
        dir.path(),
        "1",
    );
    assert_eq!(code, 0, "{msg}");
    assert!(msg.contains("theoretical 32.0000"), "{msg}");
}
