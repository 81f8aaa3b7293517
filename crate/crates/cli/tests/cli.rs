use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spatial-sir"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("run.cfg");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn checksums(dir: &Path) -> Vec<String> {
    read(dir, "manifest.txt").lines().filter(|l| l.starts_with("sha256.")).map(String::from).collect()
}

#[test]
fn solve_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "constants.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta,iota,kappa,gamma1,ell1,ell2,ell3,ell4,ell5,herd");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 100);
    let iota: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(iota.windows(2).all(|w| w[0] < w[1]));
    let two = rows.iter().find(|r| r[0] == "2").unwrap();
    assert!((two[1].parse::<f64>().unwrap() - 0.94).abs() < 0.005);
    assert!((two[9].parse::<f64>().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let one = rows.iter().find(|r| r[0] == "1").unwrap();
    assert_eq!((one[2], one[3]), ("", ""));
    let manifest = read(dir.path(), "manifest.txt");
    assert!(manifest.contains("sha256.constants.csv = "));
}

#[test]
fn shape_at_five_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[shape]\nthetas = 5\nsamples = 64\noverlay_t = 10\n";
    assert!(run(dir.path(), &["shape"], Some(cfg)).status.success());
    let text = read(dir.path(), "shape_theta5.csv");
    assert!(text.starts_with("phi,upsilon\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));
    assert_eq!(read(dir.path(), "overlay_theta5.csv").lines().count(), 65);
}

#[test]
fn config_errors_cite_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve"], Some("seed = 4\n[solve]\nlevels = 3\nthetamax = 2\n"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("thetamax"), "{err}");

    let out = run(dir.path(), &["solve"], Some("[solvee]\n"));
    assert_eq!(out.status.code(), Some(2));

    let out = run(dir.path(), &["simulate"], Some("[simulate]\ntheta = 9\nn = 1\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn simulate_is_reproducible() {
    let cfg = "seed = 42\n[simulate]\nn = 20\nt = 40\nic = point\ngamma = 0.5\nrecord = times\nrecord_times = 10, 40\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), &["simulate"], Some(cfg)).status.success());
    assert!(run(b.path(), &["simulate"], Some(cfg)).status.success());
    let sums = checksums(a.path());
    assert_eq!(sums, checksums(b.path()));
    assert_eq!(sums.len(), 11);
    let pgm = read(a.path(), "infected_t10.pgm");
    let mut tokens = pgm.split_whitespace();
    assert_eq!(tokens.next(), Some("P2"));
    let (w, h): (usize, usize) = (tokens.next().unwrap().parse().unwrap(), tokens.next().unwrap().parse().unwrap());
    assert_eq!(tokens.next(), Some("255"));
    let pixels: Vec<u32> = tokens.map(|t| t.parse().unwrap()).collect();
    assert_eq!(pixels.len(), w * h);
    assert!(pixels.iter().all(|&p| p <= 255));

    let c = tempfile::tempdir().unwrap();
    assert!(run(c.path(), &["simulate", "--seed", "43"], Some(cfg)).status.success());
    assert_ne!(sums, checksums(c.path()));
}

#[test]
fn subcritical_deterministic_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[det]\ntheta = 1\nic = line\ngamma = 1\nsteps = 20\nlayers = 2\nlayer_n = 300\nr_infinity = false\n";
    let out = run(dir.path(), &["det"], Some(cfg));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let layers = read(dir.path(), "layers.csv");
    let row = layers.lines().find(|l| l.starts_with("300,")).unwrap();
    let y1: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(y1 < 1e-6, "{y1}");
}

#[test]
fn delay_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[montecarlo]\ntask = delay\nn = 200\nsurvivors = 40\nt_max = 30\n";
    let out = run(dir.path(), &["montecarlo"], Some(cfg));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read(dir.path(), "delay_vs_ell.csv");
    assert!(table.starts_with("i,p_delay,ci95,ell_next\n0,"));
    assert!(read(dir.path(), "report.csv").starts_with("name,estimate,ci95,n\n"));
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["validate"], Some("[validate]\nseeds = 4000\n"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = read(dir.path(), "validate.csv");
    assert!(report.starts_with("check,result,detail\n"));
    assert!(!report.contains(",fail,"));
}
