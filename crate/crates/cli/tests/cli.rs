use std::path::PathBuf;
use std::process::{Command, Output};

fn entangled(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangled"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn constructions() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../constructions")
}

#[test]
fn fig2_csv() {
    let out = entangled(&["bounds", "--fig2", "--Nmax", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("N,uncoded,random_linear,short_mds,entangled")
    );
    assert_eq!(lines.next(), Some("11,11,27,11,11"));
    assert_eq!(text.lines().last(), Some("30,28,27,23,11"));
    assert_eq!(text.lines().count(), 21);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: 0"));
}

#[test]
fn bounds_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let out = entangled(&[
        "bounds",
        "--p",
        "2",
        "--m",
        "1",
        "--n",
        "1",
        "--Nmax",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("N,uncoded,random_linear,short_mds,entangled,converse_linear,converse_nonlinear")
    );
    // entangled threshold meets the linear converse when n = 1
    assert_eq!(text.lines().nth(1), Some("3,3,4,3,3,3,2"));
}

#[test]
fn verify_small_example() {
    let out = entangled(&[
        "verify",
        "--p",
        "2",
        "--m",
        "1",
        "--n",
        "1",
        "--N",
        "5",
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(",3,3,10,10\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("10/10"));
}

#[test]
fn verify_below_threshold_fails() {
    let out = entangled(&[
        "verify",
        "--p",
        "2",
        "--m",
        "1",
        "--n",
        "1",
        "--N",
        "5",
        "--exhaustive",
        "--size",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(entangled(&["verify", "--p", "2"]).status.code(), Some(2));
    assert_eq!(
        entangled(&["verify", "--p", "2", "--m", "1", "--n", "1", "--N", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(entangled(&["--q", "12", "bounds"]).status.code(), Some(2));
    assert_eq!(
        entangled(&["validate-construction", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        entangled(&[
            "simulate",
            "--p",
            "1",
            "--m",
            "1",
            "--n",
            "1",
            "--N",
            "2",
            "--latency",
            "exp:1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn construction_files() {
    for name in ["strassen.json", "standard-2-2-2.json"] {
        let path = constructions().join(name);
        let out = entangled(&["validate-construction", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(stdout(&out).starts_with("valid:"));
    }
}

#[test]
fn broken_construction_rejected() {
    let text = std::fs::read_to_string(constructions().join("strassen.json")).unwrap();
    let broken = text.replacen("[[1, 0],[0, 0]]", "[[0, 0],[0, 0]]", 1);
    assert_ne!(text, broken);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, broken).unwrap();
    let out = entangled(&["validate-construction", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn improved_and_conv() {
    let out = entangled(&[
        "verify-improved",
        "--construction",
        "strassen",
        "--N",
        "15",
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(",13,105,105\n"));
    let out = entangled(&[
        "--q",
        "257",
        "conv",
        "--m",
        "3",
        "--n",
        "2",
        "--N",
        "6",
        "--len",
        "3",
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(",4,15,15\n"));
}

#[test]
fn fault_modes() {
    let base = [
        "fault", "--p", "2", "--m", "2", "--n", "1", "--N", "9", "--trials", "40",
    ];
    let run = |extra: &[&str]| entangled(&[&base[..], extra].concat());
    let out = run(&["--errors", "2", "--mode", "correct"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).lines().nth(1),
        Some("correct,9,5,2,2,40,40,0,0")
    );
    let out = run(&["--errors", "4", "--mode", "detect"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(",0\n"));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--scheme",
        "random-linear",
        "--p",
        "3",
        "--m",
        "3",
        "--n",
        "1",
        "--N",
        "30",
        "--trials",
        "20",
        "--seed",
        "4",
    ];
    let first = entangled(&args);
    let second = entangled(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
    let text = stdout(&first);
    assert_eq!(
        text.lines().next(),
        Some("trial,scheme,N,K,completion_time,waited,success")
    );
    assert_eq!(text.lines().count(), 21);
    assert!(String::from_utf8_lossy(&first.stderr).contains("seed: 4"));
}

#[test]
fn simulate_stragglers() {
    let out = entangled(&[
        "simulate",
        "--p",
        "3",
        "--m",
        "3",
        "--n",
        "1",
        "--N",
        "30",
        "--trials",
        "5",
        "--latency",
        "stragglers:19,10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        assert!(line.ends_with(",entangled,30,11,1,11,true"), "{line}");
    }
}
