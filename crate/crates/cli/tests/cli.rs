use std::path::Path;
use std::process::{Command, Output};

use plh_cli::RunConfig;
use plh_core::format::{parse_codebook, parse_generator_matrix};
use plh_core::harness::{read_results_csv, GapResult};

fn plh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = plh(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn complexity_prints_the_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let text = ok(&["complexity", "--out", path(&json)]);
    assert!(
        text.contains("standard         127               2           1"),
        "{text}"
    );
    assert!(
        text.contains("strategy1         59               2           0"),
        "{text}"
    );
    assert!(
        text.contains("strategy2        124              68           1"),
        "{text}"
    );
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["rows"][2]["multiplications"], 68);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--modcod",
        "6",
        "--decoder",
        "strategy1",
        "--alpha",
        "0.7",
        "--esn0",
        "5.13",
        "--trials",
        "100000",
        "--seed",
        "7",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let rows = read_results_csv(a.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].modcod, rows[0].trials, rows[0].seed), (6, 100_000, 7));
    assert_eq!(rows[0].param_value, Some(0.7));
}

#[test]
fn design_writes_matrices_and_codebook() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["design", "--out", path(dir.path())]);
    assert!(text.contains("N=39"), "{text}");
    let cb = parse_codebook(&std::fs::read_to_string(dir.path().join("codebook.txt")).unwrap()).unwrap();
    assert_eq!(cb.lengths(), vec![26, 48, 58, 64]);
    assert_eq!(cb.n(), 39);
    for len in [26, 48, 58, 64] {
        let g =
            parse_generator_matrix(&std::fs::read_to_string(dir.path().join(format!("genmatrix_L{len}.txt"))).unwrap())
                .unwrap();
        assert_eq!((g.k(), g.v()), (6, len));
    }
    // the written codebook drives a simulation
    let cb_path = dir.path().join("codebook.txt");
    let csv = ok(&[
        "simulate",
        "--codebook",
        path(&cb_path),
        "--modcod",
        "3",
        "--esn0",
        "10",
        "--trials",
        "500",
    ]);
    assert_eq!(read_results_csv(csv.as_bytes()).unwrap()[0].errors, 0);
}

#[test]
fn tiny_demo_design() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["design", "--k", "2", "--target-dmin", "2", "--out", path(dir.path())]);
    assert!(text.contains("d_min=2"), "{text}");
    let g = parse_generator_matrix(&std::fs::read_to_string(dir.path().join("genmatrix.txt")).unwrap()).unwrap();
    // exhaustive check over the four codewords
    let words = g.codewords();
    let mut d = usize::MAX;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let h = a.iter().zip(b.iter()).filter(|(x, y)| x != y).count();
            d = d.min(h.min(g.v() - h));
        }
    }
    assert!(d >= 2);
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        &["design"][..],
        &["simulate", "--trials", "0"],
        &["simulate", "--alpha", "-1"],
        &["simulate", "--modcod", "40", "--trials", "10"],
        &["sweep", "--decoder", "strategy2", "--params", "-0.5"],
        &["gap", "--target-cer", "2"],
        &["design", "--k", "3", "--out", "/tmp"],
        &["simulate", "--config", "/nonexistent/plh.toml"],
    ] {
        let out = plh(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&[
        "sweep",
        "--modcods",
        "1,6",
        "--esn0=-3,-2.5",
        "--decoder",
        "strategy2",
        "--params",
        "0.1,0.2",
        "--seed",
        "9",
        "--noise-var",
        "estimated",
        "--window",
        "1024",
        "--dump-config",
    ]);
    let cfg = RunConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.modcods, vec![1, 6]);
    assert_eq!(cfg.esn0, vec![-3.0, -2.5]);
    assert_eq!(cfg.seed, 9);
    let file = dir.path().join("run.toml");
    std::fs::write(&file, &text).unwrap();
    assert_eq!(ok(&["sweep", "--config", path(&file), "--dump-config"]), text);
    // flags override the file
    let again = ok(&["sweep", "--config", path(&file), "--seed", "10", "--dump-config"]);
    assert_eq!(RunConfig::from_toml(&again).unwrap().seed, 10);
}

#[test]
fn sweep_output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        ok(&[
            "sweep",
            "--modcods",
            "1,6",
            "--params",
            "0.3,1.0",
            "--esn0=-4,-2",
            "--trials",
            "3000",
            "--out",
            path(out),
            "--threads",
            "2",
        ]);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(read_results_csv(text.as_bytes()).unwrap().len(), 8);
}

#[test]
fn gap_reports_negative_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gaps.json");
    ok(&[
        "gap",
        "--decoder",
        "strategy2",
        "--beta",
        "0.2",
        "--target-cer",
        "1e-2",
        "--max-trials",
        "40000",
        "--out",
        path(&out),
    ]);
    let gaps: Vec<GapResult> = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(gaps.iter().map(|g| g.modcod_id).collect::<Vec<_>>(), [1, 2, 3, 6]);
    assert!(gaps.iter().all(|g| g.gap_db < 0.0), "{gaps:?}");
}
