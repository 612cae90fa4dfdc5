use std::ffi::OsStr;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logibench"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run<S: AsRef<OsStr>>(args: &[S]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin<S: AsRef<OsStr>>(args: &[S], input: &[u8]) -> Output {
    let mut child =
        bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &[&str] = &[
    "gen", "-x", "11", "-y", "6", "-X", "4", "-Y", "2", "-p", "1", "-s", "16", "-P", "16", "-u", "16", "-H", "--prs",
    "1",
];

/// The small layout call with `robots` robots and as many orders.
fn small(robots: &str, seed: &str) -> Vec<String> {
    let mut args: Vec<String> = SMALL.iter().map(|s| s.to_string()).collect();
    args.extend(["-r", robots, "-o", robots, "--seed", seed].map(String::from));
    args
}

#[test]
fn help_snapshots() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots");
    for sub in ["", "gen", "check", "solve", "serve"] {
        let args: Vec<&str> = [sub, "--help"].into_iter().filter(|s| !s.is_empty()).collect();
        let o = run(&args);
        assert!(o.status.success());
        let got = stdout(&o);
        let name = if sub.is_empty() { "main" } else { sub };
        let path = dir.join(format!("{name}.help.txt"));
        if std::env::var_os("UPDATE_SNAPSHOTS").is_some() {
            std::fs::write(&path, &got).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap();
        assert_eq!(got, want, "help for {name:?} changed; rerun with UPDATE_SNAPSHOTS=1 to accept");
    }
}

#[test]
fn help_lists_every_flag_with_defaults() {
    let gen = stdout(&run(&["gen", "--help"]));
    for flag in ["-x ", "-y ", "-X ", "-Y ", "-p ", "-s ", "-r ", "-P ", "-u ", "-o ", "-H ", "-N ", "-I "] {
        assert!(gen.contains(flag), "{flag}");
    }
    for flag in ["--prs", "--threshold", "--seed", "--reach", "--template", "--out", "--batch"] {
        assert!(gen.contains(flag), "{flag}");
    }
    assert!(gen.contains("[default: 20]"));
    let solve = stdout(&run(&["solve", "--help"]));
    for flag in ["--domain", "--m-aligned", "--assign", "--positions", "--max-horizon", "--budget-ms", "--stats"] {
        assert!(solve.contains(flag), "{flag}");
    }
    assert!(solve.contains("[default: paired]") && solve.contains("[default: none]"));
}

#[test]
fn version_matches_header() {
    let o = run(&["--version"]);
    assert_eq!(stdout(&o).trim(), logibench::version_string());
}

#[test]
fn unknown_flags_are_rejected() {
    let o = run(&["gen", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_errors_exit_2() {
    let o = run_with_stdin(&["solve", "--domain", "M", "-"], b"init(object(node,1),value(at,(1,1)))");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
    let o = run(&["check", "--domain", "A", "/nonexistent.lp", "/nonexistent.lp"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unfilled_order_is_reported() {
    let inst = fixture("unfilled.lp");
    let plan = fixture("unfilled_plan.lp");
    let o = run(&["check", "--domain", "A", inst.to_str().unwrap(), plan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "err(goal,unfilledOrder,(3,3,1,11)).\n");
}

#[test]
fn check_json_report() {
    let inst = fixture("unfilled.lp");
    let plan = fixture("unfilled_plan.lp");
    let o = run(&["check", "--domain", "A", "--json", "--trace", inst.to_str().unwrap(), plan.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["valid"], false);
    assert_eq!(doc["diagnostics"][0]["text"], "order 3 still requires 1 unit of product 3 at final step 11");
    assert_eq!(doc["trace"].as_array().unwrap().len(), 12);
}

#[test]
fn check_horizon_override() {
    let inst = fixture("unfilled.lp");
    let plan = fixture("unfilled_plan.lp");
    let (i, p) = (inst.to_str().unwrap(), plan.to_str().unwrap());
    let o = run(&["check", "--domain", "A", "--horizon", "13", i, p]);
    assert_eq!(stdout(&o), "err(goal,unfilledOrder,(3,3,1,13)).\n");
    let o = run(&["check", "--domain", "A", "--horizon", "5", i, p]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_instance_needs_empty_plan() {
    let o = run(&["solve", "--domain", "M", "--max-horizon", "0", fixture("empty.lp").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn line_example_and_unsat_exit() {
    let path = fixture("line3x3.lp");
    let o = run(&["solve", "--domain", "M", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "occurs(object(robot,1),action(move,(1,0)),1).\noccurs(object(robot,1),action(move,(1,0)),2).\n"
    );
    let o = run(&["solve", "--domain", "M", "--max-horizon", "1", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn figure_call_cardinalities() {
    let args = [
        "gen", "-x", "19", "-y", "9", "-X", "5", "-Y", "2", "-p", "3", "-s", "45", "-r", "6", "-P", "180", "-u", "540",
        "-o", "12", "-H",
    ];
    let o = run(&args);
    assert!(o.status.success());
    let facts = logibench::facts_io::parse_facts(&stdout(&o)).unwrap();
    let inst = logibench::facts_io::build_instance(&facts).unwrap();
    assert_eq!(inst.nodes.len(), 171);
    assert_eq!(
        (inst.stations.len(), inst.shelves.len(), inst.robots.len(), inst.products().len(), inst.orders.len()),
        (3, 45, 6, 180, 12)
    );
    assert_eq!(inst.total_units(), 540);
    let header = &facts.header_comments;
    assert_eq!(header[0], logibench::version_string());
    assert!(header[1].starts_with("invocation: gen -x 19 -y 9 -X 5 -Y 2 -p 3 -s 45 -r 6 -P 180 -u 540 -o 12"));
}

#[test]
fn gen_writes_named_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = small("2", "5");
    args.extend(["-N".into(), "3".into(), "--out".into(), dir.path().to_str().unwrap().into()]);
    let o = run(&args);
    assert!(o.status.success());
    let listed: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(listed.len(), 3);
    assert!(listed[2].ends_with("x11_y6_n66_r2_s16_ps1_pr16_u16_o2_N003.lp"));
    assert!(Path::new(&listed[0]).exists());
}

#[test]
fn pipes_compose() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let gen = run(&small("2", seed));
        assert!(gen.status.success());
        let inst = dir.path().join(format!("inst{seed}.lp"));
        std::fs::write(&inst, &gen.stdout).unwrap();
        for domain in ["M", "C", "A"] {
            let solved = run_with_stdin(&["solve", "--domain", domain, "--m-aligned", "-"], &gen.stdout);
            assert!(solved.status.success(), "{}", String::from_utf8_lossy(&solved.stderr));
            let checked = run_with_stdin(
                &["check", "--domain", domain, "--m-aligned", inst.to_str().unwrap(), "-"],
                &solved.stdout,
            );
            assert_eq!(checked.status.code(), Some(0), "{}", stdout(&checked));
            assert!(checked.stdout.is_empty());
        }
    }
}

#[test]
fn stats_sidecar_and_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(&small("2", "4"));
    let inst = dir.path().join("inst.lp");
    std::fs::write(&inst, &gen.stdout).unwrap();
    let stats = dir.path().join("stats.json");
    let o = run(&[
        "solve",
        "--domain",
        "B",
        "--m-aligned",
        "--assign",
        "compute",
        "--positions",
        "split",
        "--stats",
        stats.to_str().unwrap(),
        inst.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert!(doc["expanded"].as_u64().unwrap() > 0);
    assert_eq!(doc["positions"], "split");
    assert!(doc["lower_bound"].as_u64().is_some());
    assert!(!doc["horizons"].as_array().unwrap().is_empty());
    let plan = dir.path().join("plan.lp");
    std::fs::write(&plan, &o.stdout).unwrap();
    let o = run(&["check", "--domain", "B", "--m-aligned", inst.to_str().unwrap(), plan.to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn batch_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.yaml");
    std::fs::write(
        &batch,
        "preset: {x: 11, y: 6, X: 4, Y: 2, p: 1, s: 16, P: 16, u: 16, H: true, prs: 1, N: 3, seed: 7}\n\
         variants:\n  - r2: {r: 2, o: 2}\n  - r5: {r: 5, o: 5}\noutput_dir: unused\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for run_dir in ["a", "b"] {
        let out = dir.path().join(run_dir);
        let o = run(&["gen", "--batch", batch.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let files: Vec<Vec<u8>> = stdout(&o).lines().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(files.len(), 6);
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}
