use std::io::Write;
use std::process::{Command, Output, Stdio};

use clap::CommandFactory;
use gp2rt_cli::Cli;

fn gp2rt(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gp2rt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn every_flag_is_documented_in_help() {
    let root = Cli::command();
    for sub in root.get_subcommands() {
        let name = sub.get_name();
        let out = gp2rt(&[name, "--help"], None);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let help = text(&out.stdout);
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(help.contains(&format!("--{long}")), "{name} --help lacks --{long}");
            } else if !arg.is_positional() {
                continue;
            } else {
                let id = arg.get_id().as_str().to_uppercase();
                assert!(help.contains(&id), "{name} --help lacks {id}");
            }
        }
    }
}

#[test]
fn readme_mentions_every_flag() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    for sub in Cli::command().get_subcommands() {
        assert!(readme.contains(&format!("gp2rt {}", sub.get_name())), "{}", sub.get_name());
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(readme.contains(&format!("--{long}")), "README lacks --{long}");
            }
        }
    }
}

#[test]
fn usage_errors_exit_64() {
    for args in [&["frob"][..], &["run"], &["run", "no-such-program"], &["gen", "hexagon", "4"], &["gen", "grid", "5"]] {
        let out = gp2rt(args, None);
        assert_eq!(out.status.code(), Some(64), "{args:?}: {}", text(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = gp2rt(&["run", "is-dag", "-"], Some("[ (1, 0) | (e1, 1, 9, 0) ]"));
    assert_eq!(out.status.code(), Some(64));
    assert!(text(&out.stderr).contains("input:1:"), "{}", text(&out.stderr));
}

#[test]
fn run_exit_codes_follow_the_outcome() {
    let out = gp2rt(&["run", "is-dag", "--gen", "list:6"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).starts_with("[ "));

    let out = gp2rt(&["run", "is-dag", "--gen", "cycle:6"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());

    let out = gp2rt(&["run", "is-dag", "--gen", "list:60", "--step-limit", "10"], None);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));

    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("div.gpr");
    std::fs::write(&prog, "d(i:int) [ (1, i) | ] => [ (1, i / 0) | ]\nMain = d").unwrap();
    let out = gp2rt(&["run", prog.to_str().unwrap(), "-"], Some("[ (1, 3) | ]"));
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
}

#[test]
fn run_reads_stdin_and_files() {
    let graph = "[ (1, 0 # grey) (2, 0 # grey) | (e1, 1, 2, 0) ]";
    let piped = gp2rt(&["run", "is-connected"], Some(graph));
    assert_eq!(piped.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.host");
    let output = dir.path().join("out.host");
    std::fs::write(&input, graph).unwrap();
    let out = gp2rt(&["run", "is-connected", input.to_str().unwrap(), "--out", output.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&output).unwrap(), piped.stdout);
}

#[test]
fn stats_go_to_stderr() {
    let out = gp2rt(&["run", "is-connected", "--gen", "star:5", "--stats"], None);
    assert_eq!(out.status.code(), Some(0));
    let err = text(&out.stderr);
    assert!(err.contains("rule.next_edge.calls = 11"), "{err}");
    assert!(!text(&out.stdout).contains("rule."));
}

#[test]
fn monitor_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // Same file stem as a shipped program, so its monitors apply.
    let prog = dir.path().join("is-dag.gpr");
    std::fs::write(&prog, "two(x, y:list) [ (1, x) (2, y) | ] => [ (1, x # blue) (2, y # blue) | ]\nMain = two").unwrap();
    let g = "[ (1(R), 0) (2(R), 0) | ]";
    let out = gp2rt(&["run", prog.to_str().unwrap(), "-"], Some(g));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let out = gp2rt(&["run", prog.to_str().unwrap(), "-", "--monitors"], Some(g));
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("root"), "{}", text(&out.stderr));
}

#[test]
fn gen_is_deterministic() {
    let a = gp2rt(&["gen", "rooted-cycle", "6", "--weights", "uniform:-5:5", "--seed", "11"], None);
    let b = gp2rt(&["gen", "rooted-cycle", "6", "--weights", "uniform:-5:5:seed11"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = gp2rt(&["gen", "rooted-cycle", "6", "--weights", "uniform:-5:5", "--seed", "12"], None);
    assert_ne!(a.stdout, c.stdout);
    let d = gp2rt(&["gen", "discrete", "3", "--unmarked"], None);
    assert_eq!(text(&d.stdout).trim(), "[ (1, empty) (2, empty) (3, empty) | ]");
}

#[test]
fn check_reports_counts_and_skips() {
    let out = gp2rt(&["check", "is-dag", "--cases", "40", "--monitors"], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let s = text(&out.stdout);
    assert!(s.contains("pass, 0 skipped"), "{s}");
    assert!(s.contains("monitor root-count:"), "{s}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("two-roots.host");
    std::fs::write(&bad, "[ (1(R), 0 # grey) (2(R), 0 # grey) | ]").unwrap();
    let out = gp2rt(&["check", "bellman-ford", "--cases", "5", "--input", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("1 skipped"), "{}", text(&out.stdout));
    assert!(text(&out.stderr).contains("two-roots.host: skipped"), "{}", text(&out.stderr));
}

#[test]
fn check_runs_on_legacy_store() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("cycle.host");
    std::fs::write(&bad, "[ (1, 0 # grey) (2, 0 # grey) | (e1, 1, 2, 0) (e2, 2, 1, 0) ]").unwrap();
    let out = gp2rt(&["check", "is-connected", "--cases", "3", "--mode", "legacy", "--input", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).starts_with("is-connected: "), "{}", text(&out.stdout));
}

#[test]
fn bench_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = gp2rt(
        &["bench", "is-dag", "--classes", "list,star", "--sizes", "50,100,200,400", "--reps", "1", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for f in ["is-dag-list-bucketed.csv", "is-dag-star-bucketed.dat", "is-dag.svg", "is-dag.manifest"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let manifest = std::fs::read_to_string(dir.path().join("is-dag.manifest")).unwrap();
    for key in ["program = is-dag", "mode = bucketed", "rng = ", "step_limit = ", "fit.list.slope = "] {
        assert!(manifest.contains(key), "{key}\n{manifest}");
    }
    let s = text(&out.stdout);
    assert!(s.contains("list") && s.contains("star"), "{s}");

    let out = gp2rt(&["bench", "is-dag", "--classes", "list", "--sizes", "50,100", "--reps", "1", "--out", dir.path().to_str().unwrap()], None);
    assert!(text(&out.stdout).contains("n/a"), "{}", text(&out.stdout));
}

#[test]
fn bench_rejects_descending_sizes() {
    let out = gp2rt(&["bench", "is-dag", "--sizes", "100,50"], None);
    assert_eq!(out.status.code(), Some(64));
}
