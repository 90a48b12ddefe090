use std::path::Path;
use std::process::{Command, Output};

use rough_hilbert::cli_reports::{sha256_file, ErrorRecord, ExperimentConfig, Manifest, MANIFEST_NAME};

fn rough_hilbert(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rough-hilbert"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path) -> Manifest {
    serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_NAME)).unwrap()).unwrap()
}

fn assert_manifest_complete(out: &Path) {
    let m = manifest(out);
    let mut listed: Vec<String> = m.outputs.iter().map(|e| e.path.clone()).collect();
    for e in &m.outputs {
        let p = out.join(&e.path);
        assert_eq!(sha256_file(&p).unwrap(), e.sha256, "{}", e.path);
        assert_eq!(std::fs::metadata(&p).unwrap().len(), e.bytes);
    }
    let mut on_disk = Vec::new();
    for entry in walk(out) {
        let rel = entry.strip_prefix(out).unwrap().to_string_lossy().replace('\\', "/");
        if rel != MANIFEST_NAME {
            on_disk.push(rel);
        }
    }
    listed.sort();
    on_disk.sort();
    assert_eq!(listed, on_disk);
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn build_kernel_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["build-kernel", "--alpha", "1.5", "--M", "256"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert!(csv.lines().count() > 10);
    let m = manifest(dir.path());
    assert_eq!(m.subcommand, "build-kernel");
    assert_eq!(m.config.m, 256);
    assert_manifest_complete(dir.path());
}

#[test]
fn empty_census_range_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["count", "--M", "256", "--x-range", "50:10"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("census.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "only the header: {csv}");
    assert_manifest_complete(dir.path());
}

#[test]
fn census_rows_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["count", "--M", "512", "--x-range", "100:104"], dir.path());
    assert!(o.status.success());
    let seq = rough_hilbert::power_lattice::PowerSequence::new(1.5, 1024).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("census.csv")).unwrap();
    let mut n = 0;
    for (rec, x) in rdr.records().zip(100i64..) {
        let rec = rec.unwrap();
        let want = rough_hilbert::power_lattice::count_representations(&seq, x, (256, 1024)).unwrap();
        assert_eq!(rec[0].parse::<i64>().unwrap(), x);
        assert_eq!(rec[1].parse::<u64>().unwrap(), want);
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["build-kernel", "--alpha", "2.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let rec: ErrorRecord = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec.error, "config");
    assert_eq!(rec.exit_code, 2);
    let on_disk: ErrorRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("error.json")).unwrap()).unwrap();
    assert_eq!(on_disk.message, rec.message);

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"alpah": 1.5}"#).unwrap();
    let o = rough_hilbert(&["count", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_errors_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["resolvent", "--M-grid", "1024", "--budget-mb", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: ErrorRecord = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec.error, "budget");
}

#[test]
fn resolvent_residual_failure_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    // Three terms leave a residual far above the tolerance.
    let o = rough_hilbert(&["resolvent", "--M-grid", "256", "--terms", "3"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: ErrorRecord = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec.error, "residual_check");
}

#[test]
fn resolvent_passes_its_residual_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = rough_hilbert(&["resolvent", "--M-grid", "256"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("resolvent.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "identity_residual").unwrap();
    for rec in rdr.records() {
        assert!(rec.unwrap()[col].parse::<f64>().unwrap() <= 1e-6);
    }
    assert!(!dir.path().join("error.json").exists());
}

#[test]
fn config_file_round_trips_through_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.alpha = 1.25;
    cfg.m = 300;
    cfg.seed = 99;
    cfg.out = dir.path().join("run");
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rough-hilbert"))
        .args(["build-kernel", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(&cfg.out).config, cfg);
    // Flags override the file.
    let o = rough_hilbert(&["build-kernel", "--config", path.to_str().unwrap(), "--seed", "7"], &cfg.out);
    assert!(o.status.success());
    let m = manifest(&cfg.out);
    assert_eq!(m.config.seed, 7);
    assert_eq!(m.config.alpha, 1.25);
}
