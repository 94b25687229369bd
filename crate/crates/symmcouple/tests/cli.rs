use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symmcouple::csv_io::{read_columns, step_from_str, step_to_string};
use symmcouple::dsl;
use symmcouple_core::constructs::build_phi_theorem6;
use symmcouple_core::decomp::{random_step, replay_family};
use symmcouple_core::runner::trial_rng;
use symmcouple_core::{StepFunction, Weight};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_symmcouple"));
    c.env_remove("SYMMCOUPLE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_x(dir: &Path, x: &StepFunction) -> String {
    let p = dir.join("x.csv");
    std::fs::write(&p, step_to_string(x)).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn csv_round_trip_on_random_functions() {
    let mut rng = trial_rng(11, 0);
    for _ in 0..200 {
        let x = random_step(&mut rng, 64, 20);
        assert_eq!(step_from_str(&step_to_string(&x)).unwrap(), x);
    }
}

#[test]
fn rearrange_output_reparses_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = trial_rng(3, 0);
    for _ in 0..5 {
        let x = random_step(&mut rng, 40, 10);
        let path = write_x(dir.path(), &x);
        let o = run(&["rearrange", "--x", &path]);
        assert!(o.status.success());
        assert_eq!(step_from_str(&stdout(&o)).unwrap(), x.rearrange());
    }
}

#[test]
fn norm_prints_exact_l2() {
    let dir = tempfile::tempdir().unwrap();
    let x = StepFunction::from_pieces(&[(0.25, 3.0), (0.5, 1.0), (1.0, 2.0)]).unwrap();
    let path = write_x(dir.path(), &x);
    let o = run(&["norm", "--space", "lp:p=2", "--x", &path]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(v, x.lp_norm(2.0));
}

#[test]
fn kfunc_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let x = StepFunction::from_pieces(&[(0.25, 3.0), (0.5, 1.0), (1.0, 2.0)]).unwrap();
    let path = write_x(dir.path(), &x);
    let o = run(&["kfunc", "--space", "lp:p=1", "--weight", "recip:depth=8", "--x", &path, "--hi-octaves", "4"]);
    assert!(o.status.success());
    let (ts, ks) = read_columns(o.stdout.as_slice(), ["t", "K"]).unwrap();
    assert_eq!(ts.len(), 35);
    assert_eq!(ts[0], (-30f64).exp2());
    let w = Weight::recip(8).unwrap();
    for (t, k) in ts.iter().zip(&ks) {
        let exact = symmcouple_core::kfunc::k_lp_weighted(1.0, &w, &x, *t);
        assert!((k - exact).abs() <= 1e-6 * exact, "t = {t}: {k} vs {exact}");
    }
}

#[test]
fn construct_phi_matches_builder() {
    let o = run(&["construct", "phi", "--weight", "recip", "--levels", "40"]);
    assert!(o.status.success());
    let (ks, ts) = read_columns(o.stdout.as_slice(), ["k", "t"]).unwrap();
    let b = build_phi_theorem6(&Weight::recip(30).unwrap(), 40).unwrap();
    assert_eq!(ts, b.t_levels);
    assert_eq!(ks.len(), 41);
}

#[test]
fn decomp_report_is_self_describing_and_replayable() {
    let o = run(&[
        "decomp-check", "--space", "lambda:phi=tlog", "--weight", "recip", "--p", "1", "--trials", "200", "--seed", "7",
        "--c", "4",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["decomp-check"]["space"], "lambda:phi=tlog");
    let r = &v["result"];
    assert_eq!(r["trials"], 200);
    assert_eq!(r["verdict"], "pass");
    let fam: Vec<StepFunction> = r["witnesses"]["max"]["family"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| step_from_str(s.as_str().unwrap()).unwrap())
        .collect();
    let space = dsl::parse_space("lambda:phi=tlog").unwrap();
    assert_eq!(replay_family(&space, 1.0, &fam).unwrap(), r["max_ratio"].as_f64().unwrap());
}

#[test]
fn escalation_curve_flags_power_half() {
    let o = run(&[
        "decomp-check", "--space", "lambda:phi=power:alpha=0.5", "--weight", "recip", "--p", "1", "--trials", "200",
        "--n", "2,4,8,16",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["escalates"], true);
    assert_eq!(v["result"]["curve"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let x = StepFunction::constant(1.0);
    let path = write_x(dir.path(), &x);
    assert_eq!(run(&["norm", "--space", "lp:p=1", "--x", &path]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    for bad in [
        &["norm", "--space", "lp:p=0.5", "--x", &path][..],
        &["norm", "--space", "lp:p=2,q=3", "--x", &path],
        &["norm", "--space", "lp:p=2", "--x", "/nonexistent.csv"],
        &["norm", "--space", "lp:p=2"],
        &["frobnicate"],
        &["indices", "--phi", "power:alpha=2"],
    ] {
        let o = run(bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["construct", "intervals", "--F", "orlicz-sinlog:p=6,c=0.447", "--p", "6", "--c", "2", "--K", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn threads_do_not_change_reports() {
    let args = ["decomp-check", "--space", "lambda:phi=tlog", "--weight", "recip", "--trials", "300", "--seed", "5"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let eight = run(&[&args[..], &["--threads", "8"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
    let env = bin().args(args).env("SYMMCOUPLE_THREADS", "3").output().unwrap();
    assert_eq!(env.stdout, one.stdout);
    let bad = bin().args(args).env("SYMMCOUPLE_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&["gallery", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let names: Vec<&str> = v["result"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["powerlog1", "sinlog", "iterated-log", "tlog-recip"]);
}
