use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_resonances"));
    c.env_remove("RESONANCES_CACHE_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn sds_writes_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("qnm.csv");
    let o = run(&["--no-cache", "sds", "--lmin", "1", "--lmax", "2", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("ell,re_lambda,im_lambda,mult,residual,accepted\n"));
    assert!(!text.contains('\r'));
    let fundamental = text
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("2,") && l.ends_with(",true"))
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .find(|f| (f[1].parse::<f64>().unwrap() - 0.38078).abs() < 1e-4);
    assert!(fundamental.is_some());
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(code(&run(&["sds", "--lambda", "0.5"])), 2);
    assert_eq!(code(&run(&["sds", "--n", "64", "--n-high", "70"])), 2);
    assert_eq!(code(&run(&["count", "--in", "/nonexistent.csv"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sds]\nmas = 1\n").unwrap();
    assert_eq!(code(&run(&["--config", p(&cfg), "lattice"])), 2);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[lattice]\nc = 0.5\nell_max = 3\nk_max = 0\n").unwrap();
    let o = run(&["--config", p(&cfg), "lattice", "--ell-max", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.contains(",7.5000000000000000e-1,-2.5000000000000000e-1,"));
}

#[test]
fn property_violations_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    let rows = "ell,re_lambda,im_lambda,mult,residual,accepted\n\
                2,3.8e-1,-7.9e-2,1,1e-14,true\n";
    std::fs::write(&csv, rows).unwrap();
    assert_eq!(code(&run(&["report", "--in", p(&csv)])), 4);
    let paired = format!("{rows}2,-3.8e-1,-7.9e-2,1,1e-14,true\n");
    std::fs::write(&csv, paired).unwrap();
    assert_eq!(code(&run(&["report", "--in", p(&csv)])), 0);
    let grow = "ell,re_lambda,im_lambda,mult,residual,accepted\n2,3.8e-1,7.9e-2,1,1e-14,true\n2,-3.8e-1,7.9e-2,1,1e-14,true\n";
    std::fs::write(&csv, grow).unwrap();
    assert_eq!(code(&run(&["report", "--in", p(&csv)])), 4);
}

#[test]
fn count_writes_svg_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let qnm = dir.path().join("qnm.csv");
    assert_eq!(code(&run(&["--no-cache", "sds", "--lmax", "6", "--out", p(&qnm)])), 0);
    let svg = dir.path().join("n_of_r.svg");
    let o = run(&["count", "--in", p(&qnm), "--rmax", "12", "--gamma", "3", "--svg", p(&svg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(svg.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["radii"].as_array().unwrap().len(), 48);
    let counts: Vec<u64> = side["counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]) && *counts.last().unwrap() > 0);
    assert_eq!(side["region"]["kind"], "strip");
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"curve\""));
    // the trusted strip is narrower than the requested one
    let o = run(&["count", "--in", p(&qnm), "--gamma", "3", "--trust-gamma", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn warm_cache_is_identical_and_fast() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let go = |out: &Path| {
        let t = Instant::now();
        let o = bin()
            .env("RESONANCES_CACHE_DIR", &cache)
            .args(["sds", "--lmax", "6", "--out", p(out)])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        t.elapsed()
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let cold = go(&a);
    let warm = go(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(warm * 10 <= cold, "cold {cold:?} warm {warm:?}");
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 1);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for t in ["1", "4"] {
        let csv = dir.path().join(format!("f{t}.csv"));
        let svg = dir.path().join(format!("f{t}.svg"));
        let o = run(&["--no-cache", "--threads", t, "funnel", "--m-max", "3", "--out", p(&csv), "--svg", p(&svg)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outs.push((std::fs::read(&csv).unwrap(), std::fs::read(&svg).unwrap()));
    }
    let seq = dir.path().join("seq.csv");
    assert_eq!(code(&run(&["--no-cache", "--sequential", "funnel", "--m-max", "3", "--out", p(&seq)])), 0);
    assert_eq!(outs[0], outs[1]);
    assert_eq!(std::fs::read(&seq).unwrap(), outs[0].0);
}

#[test]
fn symbols_pass_for_both_models() {
    for model in ["sds", "funnel"] {
        let o = run(&["symbols", "--model", model]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(doc.is_object());
    }
}

#[test]
fn empty_plots_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("lat.svg");
    let o = run(&["lattice", "--ell-max", "0", "--svg", p(&svg)]);
    assert_eq!(code(&o), 2);
    assert!(!svg.exists());
}
