mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use pclf::cli::{run, EXIT_ERROR, EXIT_NEGATIVE, EXIT_NOT_FOUND, EXIT_OK, EXIT_UNVERIFIED};
use pclf::corpus::write_corpus;
use pclf::graphs::LabeledGraph;
use pclf::lyapunov::{MatrixSetFile, PclfFile, Scale};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pclf(dir: &Path, args: &[&str]) -> Out {
    let mut full = vec!["pclf".to_string()];
    full.extend(args.iter().map(|a| {
        if [".graph", ".json", ".csv"]
            .iter()
            .any(|ext| a.ends_with(ext))
        {
            dir.join(a).display().to_string()
        } else {
            a.to_string()
        }
    }));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn corpus_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path()).unwrap();
    dir
}

fn write_system(
    dir: &Path,
    name: &str,
    matrices: Vec<Vec<f64>>,
    dim: usize,
    scale: Option<&str>,
) -> PathBuf {
    let file = MatrixSetFile {
        dim,
        matrices,
        scale: scale.map(|s| Scale::Expr(s.to_string())),
    };
    let path = dir.join(name);
    fs::write(&path, file.to_json()).unwrap();
    path
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn check_reports() {
    let d = corpus_dir();
    let r = pclf(d.path(), &["--json", "check", "g1.graph"]);
    assert_eq!(r.code, EXIT_OK);
    let v = json(&r.stdout);
    assert_eq!(v["path_complete"], true);
    assert_eq!(v["co_complete"], true);
    assert_eq!(v["complete"], false);

    let r = pclf(d.path(), &["--json", "check", "g0_2.graph"]);
    assert_eq!(json(&r.stdout)["complete"], true);

    let r = pclf(d.path(), &["check", "g1_minus_bb2.graph"]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert!(r.stdout.contains("path-complete: false"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let d = corpus_dir();
    fs::write(d.path().join("bad.graph"), "labels 2\nnode a\nedge a z 1\n").unwrap();
    let r = pclf(d.path(), &["check", "bad.graph"]);
    assert_eq!(r.code, EXIT_ERROR);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn pclf_search() {
    let d = corpus_dir();
    let r = pclf(
        d.path(),
        &[
            "pclf",
            "g1.graph",
            "eq11.json",
            "--gamma",
            "1",
            "--out",
            "found.json",
            "--diagnostics",
            "trace.csv",
        ],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("verified residual"));
    let file =
        PclfFile::from_json(&fs::read_to_string(d.path().join("found.json")).unwrap()).unwrap();
    assert!(file.residual.unwrap() <= 0.0);
    let trace = fs::read_to_string(d.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,residual,barrier_weight\n"));

    let r = pclf(
        d.path(),
        &["pclf", "g0_2.graph", "eq11.json", "--gamma", "1"],
    );
    assert_eq!(r.code, EXIT_NOT_FOUND);
    assert!(r.stdout.contains("residual"));

    let r = pclf(d.path(), &["pclf", "g0_1.graph", "eq11.json"]);
    assert_eq!(r.code, EXIT_ERROR);
}

// Mode 2 of this set has spectral radius 1.0728 before scaling, so after
// dividing by 1.05 no quadratic certificate exists on any graph at γ = 1.
#[test]
fn pclf_on_eq18_reports_not_found() {
    let d = corpus_dir();
    let r = pclf(d.path(), &["pclf", "g1.graph", "eq18.json", "--gamma", "1"]);
    assert_eq!(r.code, EXIT_NOT_FOUND);
}

#[test]
fn gamma_brackets() {
    let d = corpus_dir();
    write_system(d.path(), "half.json", vec![vec![0.5]], 1, None);
    fs::write(
        d.path().join("g0_1.graph"),
        LabeledGraph::common(1).unwrap().to_string(),
    )
    .unwrap();
    let r = pclf(
        d.path(),
        &[
            "--json",
            "gamma",
            "g0_1.graph",
            "half.json",
            "--tol",
            "1e-4",
        ],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r.stdout);
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    assert!(lo <= 0.5 && 0.5 <= hi && hi - lo <= 1e-4, "{lo} {hi}");

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let a = common::random_matrix(&mut rng, 3, 1.0);
    let rho = common::spectral_radius_by_char_poly(&a);
    write_system(d.path(), "rand.json", vec![a.concat()], 3, None);
    let r = pclf(
        d.path(),
        &[
            "--json",
            "gamma",
            "g0_1.graph",
            "rand.json",
            "--out",
            "hi.json",
        ],
    );
    let v = json(&r.stdout);
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    assert!(lo <= rho + 1e-9 && rho <= hi + 1e-9, "{lo} {rho} {hi}");
    assert!(d.path().join("hi.json").exists());

    let r = pclf(
        d.path(),
        &["gamma", "g1.graph", "eq11.json", "--out", "g1hi.json"],
    );
    assert!(r.stdout.contains("g1hi.json"));
    let hi = PclfFile::from_json(&fs::read_to_string(d.path().join("g1hi.json")).unwrap())
        .unwrap()
        .gamma;
    assert!(hi <= 1.0);
}

#[test]
fn clf_trajectories() {
    let d = corpus_dir();
    let r = pclf(
        d.path(),
        &[
            "--seed",
            "4",
            "clf",
            "g1.graph",
            "g1_eq11.pclf.json",
            "eq11.json",
            "--steps",
            "60",
        ],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 62);
    assert!(r.stderr.contains("monotone: true"));
    let again = pclf(
        d.path(),
        &[
            "--seed",
            "4",
            "clf",
            "g1.graph",
            "g1_eq11.pclf.json",
            "eq11.json",
            "--steps",
            "60",
        ],
    );
    assert_eq!(again.stdout, r.stdout);

    write_system(
        d.path(),
        "eq11_unscaled.json",
        vec![vec![1.3, 0.0, 1.0, 0.3], vec![-0.3, 1.0, 0.0, -1.3]],
        2,
        Some("1"),
    );
    let r = pclf(
        d.path(),
        &["clf", "g1.graph", "g1_eq11.pclf.json", "eq11_unscaled.json"],
    );
    assert_eq!(r.code, EXIT_UNVERIFIED);
    let r = pclf(
        d.path(),
        &[
            "--json",
            "clf",
            "g1.graph",
            "g1_eq11.pclf.json",
            "eq11_unscaled.json",
            "--skip-verify",
            "--word",
            "1",
            "--steps",
            "20",
            "--x0",
            "1,0",
            "--out",
            "traj.csv",
        ],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["monotone"], false);
    assert_eq!(v["verified"], false);

    let r = pclf(
        d.path(),
        &[
            "clf",
            "g1.graph",
            "g1_eq11.pclf.json",
            "eq11.json",
            "--word",
            "",
            "--x0",
            "1,-2",
        ],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 2);
    assert!(r.stdout.lines().nth(1).unwrap().starts_with("0,,"));
}

#[test]
fn compare_and_verify() {
    let d = corpus_dir();
    let r = pclf(
        d.path(),
        &["compare", "g2.graph", "g1.graph", "--out", "cert.json"],
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let r = pclf(
        d.path(),
        &["verify-cert", "g2.graph", "g1.graph", "cert.json"],
    );
    assert_eq!((r.code, r.stdout.trim()), (EXIT_OK, "valid"));

    let printed = r#"{"C": [["1","1","0"],["1","0","1"]], "K": {"1": [["1","0","1"],["0","1","1"]], "2": [["1","0","1"],["0","1","1"]]}}"#;
    fs::write(d.path().join("printed.json"), printed).unwrap();
    let r = pclf(
        d.path(),
        &["verify-cert", "g2.graph", "g1.graph", "printed.json"],
    );
    assert_eq!(r.code, EXIT_OK);
    fs::write(
        d.path().join("broken.json"),
        printed.replacen("\"1\",\"1\",\"0\"", "\"1\",\"0\",\"0\"", 1),
    )
    .unwrap();
    let r = pclf(
        d.path(),
        &["verify-cert", "g2.graph", "g1.graph", "broken.json"],
    );
    assert_eq!((r.code, r.stdout.trim()), (EXIT_UNVERIFIED, "invalid"));

    let r = pclf(d.path(), &["--json", "compare", "g0_2.graph", "g1.graph"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(json(&r.stdout)["result"], "certificate");

    let r = pclf(d.path(), &["compare", "g1.graph", "g0_2.graph"]);
    assert_eq!((r.code, r.stdout.as_str()), (EXIT_NEGATIVE, "none\n"));

    let r = pclf(d.path(), &["compare", "g1.graph", "g0_1.graph"]);
    assert_eq!(r.code, EXIT_ERROR);
}

#[test]
fn sweep_tables() {
    let d = corpus_dir();
    let r = pclf(d.path(), &["--json", "sweep16", "eq13.json"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(
        (v["feasible"].as_u64(), v["total"].as_u64()),
        (Some(0), Some(16))
    );

    let r = pclf(
        d.path(),
        &["--json", "sweep16", "eq11.json", "--sequential"],
    );
    assert!(json(&r.stdout)["feasible"].as_u64().unwrap() >= 1);

    write_system(
        d.path(),
        "half.json",
        vec![vec![0.5, 0.0, 0.0, 0.5]; 2],
        2,
        None,
    );
    let r = pclf(d.path(), &["sweep16", "half.json"]);
    assert!(
        r.stdout.ends_with("feasible at gamma 1: 16/16\n"),
        "{}",
        r.stdout
    );

    write_system(d.path(), "one.json", vec![vec![0.5]], 1, None);
    assert_eq!(pclf(d.path(), &["sweep16", "one.json"]).code, EXIT_ERROR);
}

#[test]
fn files_round_trip() {
    let d = corpus_dir();
    for name in ["g1.graph", "g2.graph", "g1_minus_bb2.graph"] {
        let text = fs::read_to_string(d.path().join(name)).unwrap();
        let g = LabeledGraph::parse(&text).unwrap();
        assert_eq!(LabeledGraph::parse(&g.to_string()).unwrap(), g);
    }
    let text = fs::read_to_string(d.path().join("g1_eq11.pclf.json")).unwrap();
    assert_eq!(PclfFile::from_json(&text).unwrap().to_json(), text);
}

#[test]
fn binary_exit_codes() {
    let d = corpus_dir();
    let bin = env!("CARGO_BIN_EXE_pclf");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .current_dir(d.path())
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&["check", "g1.graph"]), Some(EXIT_OK));
    assert_eq!(
        status(&["check", "g1_minus_bb2.graph"]),
        Some(EXIT_NEGATIVE)
    );
    assert_eq!(
        status(&["pclf", "g0_2.graph", "eq11.json"]),
        Some(EXIT_NOT_FOUND)
    );
    assert_eq!(status(&["bogus"]), Some(EXIT_ERROR));
}
