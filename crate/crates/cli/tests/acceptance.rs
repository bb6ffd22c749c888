//! Acceptance gate for the binary: every subcommand must be byte
//! reproducible, meaning two runs with identical inputs emit identical
//! bytes, whether routed to stdout or to a file. Prints one [PASS]/[FAIL]
//! line.

use std::fs;
use std::process::Command;

fn run(args: &[&str], extra_env: &[(&str, &str)]) -> (Vec<u8>, bool) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sphcs"));
    cmd.args(args).env_remove("SPHCS_THREADS");
    for (key, value) in extra_env {
        cmd.env(key, value);
    }
    let out = cmd.output().expect("binary launches");
    (out.stdout, out.status.success())
}

#[test]
fn a9_every_command_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("study.cfg");
    fs::write(
        &config_path,
        "dim = 1\nx0 = 0.25\np0 = 0.1\nradii = 10,20,40\ngrid_points = 33\n",
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let invocations: Vec<Vec<&str>> = vec![
        vec!["kernel", "--dim", "3", "--tau", "0.2", "--theta-re", "0.4", "--theta-im", "0.1", "--oracle"],
        vec!["kernel", "--dim", "7", "--tau", "0.05", "--theta-re", "2.9", "--format", "json"],
        vec!["limit-study"],
        vec!["limit-study", "--config", config, "--format", "json"],
        vec!["remainder-study"],
        vec!["remainder-study", "--dim", "3", "--taus", "0.3,0.2,0.1,0.05", "--format", "json"],
        vec!["ratio-study"],
        vec!["ratio-study", "--dim", "5", "--format", "json"],
        vec!["width-study", "--radii", "200", "--p0", "0,0,0"],
        vec!["width-study", "--config", config],
        vec!["operator-check"],
        vec!["operator-check", "--alpha-im", "0.3", "--format", "csv"],
    ];

    let mut failures = Vec::new();
    let mut checked = 0;
    for args in &invocations {
        let (first, ok_a) = run(args, &[]);
        let (second, ok_b) = run(args, &[]);
        // a different worker count must not change the bytes either
        let (third, ok_c) = run(args, &[("SPHCS_THREADS", "2")]);
        if !(ok_a && ok_b && ok_c) {
            failures.push(format!("{args:?} did not exit cleanly"));
            continue;
        }
        if first != second {
            failures.push(format!("{args:?} differed between identical reruns"));
        }
        if first != third {
            failures.push(format!("{args:?} differed under SPHCS_THREADS=2"));
        }

        let file_a = dir.path().join(format!("a{checked}.out"));
        let file_b = dir.path().join(format!("b{checked}.out"));
        let mut with_out = args.clone();
        with_out.extend(["--out", file_a.to_str().unwrap()]);
        let (_, ok_fa) = run(&with_out, &[]);
        with_out.truncate(args.len());
        with_out.extend(["--out", file_b.to_str().unwrap()]);
        let (_, ok_fb) = run(&with_out, &[]);
        if !(ok_fa && ok_fb) {
            failures.push(format!("{args:?} failed with --out"));
            continue;
        }
        let bytes_a = fs::read(&file_a).unwrap();
        let bytes_b = fs::read(&file_b).unwrap();
        if bytes_a != bytes_b || bytes_a != first {
            failures.push(format!("{args:?} file output differed from stdout"));
        }
        checked += 1;
    }

    let ok = failures.is_empty();
    let tag = if ok { "PASS" } else { "FAIL" };
    let detail = if ok {
        format!(
            "{checked} invocations across all six subcommands reproduced identical \
             bytes over reruns, thread counts, and stdout/--out targets"
        )
    } else {
        failures.join("; ")
    };
    let line = format!("[{tag}] byte determinism: {detail}");
    println!("{line}");
    assert!(ok, "{line}");
}
