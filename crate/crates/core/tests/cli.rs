use std::path::Path;
use std::process::{Command, Output};

fn qphe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qphe"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_value(text: &str, key: &str) -> Vec<f64> {
    let line = text.lines().find(|l| l.split_whitespace().next() == Some(key)).unwrap_or_else(|| panic!("no {key} in\n{text}"));
    line.split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect()
}

#[test]
fn circuit_probe_12_post_000() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["circuit", "--probe", "12", "--post", "000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("circuit_report.txt")).unwrap();
    assert_eq!(report_value(&report, "overlap_post"), vec![0.0, 0.0]);
    assert!((report_value(&report, "p_flip_given_post")[0] - 1.0).abs() < 1e-12);
    assert!((report_value(&report, "p_post")[0] - 0.125).abs() < 1e-12);
}

#[test]
fn circuit_without_probe_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["circuit", "--probe", "none"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(dir.path().join("circuit_probabilities.csv")).unwrap();
    let probs: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(probs.len(), 8);
    assert!(probs.iter().all(|p| (p - 0.125).abs() < 1e-12));
}

#[test]
fn circuit_five_particles() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["circuit", "--particles", "5", "--probe", "U24", "--post", "11111"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("circuit_report.txt")).unwrap();
    assert!((report_value(&report, "p_flip_given_post")[0] - 1.0).abs() < 1e-12);
}

#[test]
fn spectrum_signs() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["spectrum", "--stage", "pseudopure", "--stage", "u12", "--stage", "u23"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let signs = |stage: &str| out.lines().find(|l| l.starts_with(stage)).unwrap().split_whitespace().nth(1).unwrap().to_string();
    assert_eq!(signs("pseudopure"), "+0000000");
    assert_eq!(signs("u12"), "--++++--");
    assert_eq!(signs("u23"), "-++--++-");
    assert!(dir.path().join("spectrum_u12_rendered.csv").exists());
    assert!(!dir.path().join("spectrum_thermal.csv").exists());
}

#[test]
fn table_text_and_csv_agree() {
    for n in ["2", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = qphe(dir.path(), &["table", "--particles", n]);
        assert!(o.status.success());
        let text = std::fs::read_to_string(dir.path().join(format!("table_{n}.txt"))).unwrap();
        let rows = csv::Reader::from_path(dir.path().join(format!("table_{n}.csv"))).unwrap().records().count();
        assert_eq!(text.lines().count(), rows + 2);
        let csv_posts: Vec<String> = csv::Reader::from_path(dir.path().join(format!("table_{n}.csv"))).unwrap().records().map(|r| r.unwrap()[0].to_string()).collect();
        let text_posts: Vec<String> = text.lines().skip(2).map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
        assert_eq!(csv_posts, text_posts);
        // the all-same outcome never puts two particles in one path
        assert!(text.lines().nth(2).unwrap().contains("no two particles share a path"));
    }
}

#[test]
fn grape_identity_at_zero_duration() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["grape", "--target", "identity"]);
    assert!(o.status.success());
    let report = std::fs::read_to_string(dir.path().join("grape_identity_report.txt")).unwrap();
    assert_eq!(report_value(&report, "iterations"), vec![0.0]);
    assert!(report.contains("converged true"));
    assert!(dir.path().join("grape_identity_controls.csv").exists());
}

#[test]
fn grape_non_convergence_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["grape", "--target", "cnot1", "--segments", "10", "--max-iterations", "1", "--starts", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("grape_cnot1_report.txt").exists());
}

#[test]
fn sequence_verify_builtin_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = qphe(dir.path(), &["sequence-verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(dir.path().join("sequence_verify.csv")).unwrap().records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap() > 1.0 - 1e-9);
    }

    // the cnot1 sequence does not implement cnot2
    let seq = dir.path().join("cnot1_sequence.txt");
    let seq_arg = seq.to_str().unwrap();
    assert!(qphe(dir.path(), &["sequence-verify", "--target", "cnot1", "--sequence", seq_arg]).status.success());
    assert_eq!(qphe(dir.path(), &["sequence-verify", "--target", "cnot2", "--sequence", seq_arg]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qphe(dir.path(), &["circuit", "--probe", "9"]).status.code(), Some(1));
    assert_eq!(qphe(dir.path(), &["circuit", "--post", "0102"]).status.code(), Some(1));
    assert_eq!(qphe(dir.path(), &["grape", "--target", "toffoli"]).status.code(), Some(1));
    assert_eq!(qphe(dir.path(), &["spectrum", "--stage", "bogus"]).status.code(), Some(1));
    assert_eq!(qphe(dir.path(), &["frobnicate"]).status.code(), Some(1));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "probez = \"12\"\n").unwrap();
    assert_eq!(qphe(dir.path(), &["--config", cfg.to_str().unwrap(), "circuit"]).status.code(), Some(1));
    let missing = dir.path().join("missing.toml");
    assert_eq!(qphe(dir.path(), &["--system", missing.to_str().unwrap(), "spectrum"]).status.code(), Some(1));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "particles = 4\nprobe = \"13\"\npost = \"0000\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    assert!(qphe(dir.path(), &["--config", cfg, "circuit"]).status.success());
    let report = std::fs::read_to_string(dir.path().join("circuit_report.txt")).unwrap();
    assert!(report.starts_with("particles 4\nprobe U13\npost 0000\n"), "{report}");

    assert!(qphe(dir.path(), &["--config", cfg, "circuit", "--probe", "24"]).status.success());
    let report = std::fs::read_to_string(dir.path().join("circuit_report.txt")).unwrap();
    assert!(report.starts_with("particles 4\nprobe U24\n"), "{report}");
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert!(qphe(dir.path(), &["spectrum"]).status.success());
        assert!(qphe(dir.path(), &["circuit", "--probe", "23", "--post", "101"]).status.success());
        assert!(qphe(dir.path(), &["grape", "--target", "cnot2", "--segments", "10", "--max-iterations", "3", "--starts", "2", "--seed", "7"]).status.code() == Some(2));
    }
    for name in ["spectrum_u13.csv", "spectrum_mzi_rendered.csv", "circuit_probabilities.csv", "grape_cnot2_controls.csv", "grape_cnot2_log.csv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
