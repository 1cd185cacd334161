use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-olct"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn zeros_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["zeros", "--order", "0", "--count", "3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let z: f64 = first[1].parse().unwrap();
    assert!((z - 2.404825557695773).abs() < 1e-14);
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn synth_transform_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("params.cfg"), "# LCT without offsets\na = 1\nb = 2\nc = -0.25\nd = 0.5\n").unwrap();
    let o = cli(&["synth", "--k", "1", "--j-spec", "3", "--seed", "7", "--out", "spec.csv"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(std::fs::read_to_string(d.join("spec.csv")).unwrap().contains("# seed=7"));

    let o = cli(&["reconstruct", "--mode", "theorem1", "--params", "params.cfg", "--spectrum", "spec.csv", "--zeros", "12", "--out", "rec.csv"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(d.join("rec.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,theta,Re(true),Im(true),Re(recon),Im(recon),abs_err"));
    let errs: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len(), 400);
    assert!(errs.iter().all(|e| *e < 1e-10));

    let o = cli(&["synth", "--k", "1", "--j-spec", "6", "--taper", "3", "--out", "tapered.csv"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = cli(&["transform", "--params", "params.cfg", "--spectrum", "tapered.csv", "--radius", "3", "--radii", "4", "--azimuths", "4", "--out", "F.csv"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(d.join("F.csv")).unwrap().lines().count(), 17);
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("exp.cfg"), "complexity_k = 0..2\nn = 10, 20\nseed = 3\n").unwrap();
    for out in ["a", "b"] {
        let o = cli(&["sweep", "--config", "exp.cfg", "--out", out, "--threads", "2"], d);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(d.join("a/complexity.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b/complexity.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 3 * 2 * 2);
}

#[test]
fn verify_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("exp.cfg"), "modes = theorem1, theorem2\nk = 1\nn = 10, 20\n").unwrap();
    let o = cli(&["verify", "--config", "exp.cfg", "--out", "res"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("fail: 0"));
    let general = std::fs::read_to_string(d.join("res/general.csv")).unwrap();
    assert!(general.contains("kernel=strict") && general.contains("kernel=reduced"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "unknown_key = 1\n").unwrap();
    let o = cli(&["sweep", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key"), "{}", stderr(&o));
}
