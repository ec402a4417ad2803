//! Graphs and systems from the worked examples, stored as they are printed:
//! matrices unscaled, with the multiplier α in the `scale` field.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graphs::LabeledGraph;
use crate::linalg::QuadraticForm;
use crate::lyapunov::{MatrixSetFile, Pclf, Scale, SwitchingSystem};

const G1: &str = "labels 2
node a
node b
edge a a 1
edge a b 1
edge b a 2
edge b b 2
";

const G1_MINUS_BB2: &str = "labels 2
node a
node b
edge a a 1
edge a b 1
edge b a 2
";

const G2: &str = "labels 2
node a
node b
node c
edge a b 1
edge a b 2
edge a c 1
edge a c 2
edge b a 1
edge c a 2
";

/// Graph names shipped by [`write_corpus`]. [`graph`] also accepts `g0_<M>` for any `M ≥ 1`.
pub const GRAPH_NAMES: &[&str] = &["g0_1", "g0_2", "g1", "g1_minus_bb2", "g2"];

pub const SYSTEM_NAMES: &[&str] = &["eq11", "eq13", "eq13_103", "eq18", "eq19", "eq19_swapped"];

pub fn graph_text(name: &str) -> Result<String> {
    match name {
        "g1" => Ok(G1.to_string()),
        "g1_minus_bb2" => Ok(G1_MINUS_BB2.to_string()),
        "g2" => Ok(G2.to_string()),
        _ => {
            let m = name
                .strip_prefix("g0_")
                .and_then(|m| m.parse::<usize>().ok())
                .filter(|&m| m >= 1)
                .ok_or_else(|| unknown("graph", name))?;
            Ok(LabeledGraph::common(m)?.to_string())
        }
    }
}

pub fn graph(name: &str) -> Result<LabeledGraph> {
    LabeledGraph::parse(&graph_text(name)?)
}

fn unknown(kind: &str, name: &str) -> Error {
    Error::InvalidArgument(format!("no {kind} named `{name}` in the corpus"))
}

fn set(dim: usize, matrices: &[&[f64]], scale: &str) -> MatrixSetFile {
    MatrixSetFile {
        dim,
        matrices: matrices.iter().map(|m| m.to_vec()).collect(),
        scale: Some(Scale::Expr(scale.to_string())),
    }
}

const EQ11: [&[f64]; 2] = [&[1.3, 0.0, 1.0, 0.3], &[-0.3, 1.0, 0.0, -1.3]];
const EQ13: [&[f64]; 2] = [
    &[0.3, 1.0, 0.0, 0.0, 0.6, 1.0, 0.0, 0.0, 0.7],
    &[0.3, 0.0, 0.0, -0.5, 0.7, 0.0, -0.2, -0.5, 0.7],
];
const EQ18: [&[f64]; 2] = [&[-0.5, -1.1, 0.9, 1.5], &[0.2, 1.0, 0.5, 0.5]];
const EQ19: [&[f64]; 2] = [&[0.0, -0.2, 0.8, 0.0], &[0.25, 0.4, 0.1, 0.3]];

pub fn system_file(name: &str) -> Result<MatrixSetFile> {
    Ok(match name {
        "eq11" => set(2, &EQ11, "1/1.4"),
        "eq13" => set(3, &EQ13, "1"),
        "eq13_103" => set(3, &EQ13, "1.03"),
        "eq18" => set(2, &EQ18, "1/1.05"),
        "eq19" => set(2, &EQ19, "1/0.55"),
        "eq19_swapped" => set(2, &[EQ19[1], EQ19[0]], "1/0.55"),
        _ => return Err(unknown("system", name)),
    })
}

pub fn system(name: &str) -> Result<SwitchingSystem> {
    system_file(name)?.to_system()
}

/// `diag(5, 1)` at `a` and `diag(1, 5)` at `b`: a certificate for `g1` on `eq11`.
pub fn g1_eq11_pclf() -> Pclf {
    Pclf::new(
        graph("g1").expect("corpus graph"),
        vec![
            QuadraticForm::diagonal(&[5.0, 1.0]),
            QuadraticForm::diagonal(&[1.0, 5.0]),
        ],
        1.0,
    )
    .expect("positive definite")
}

/// Writes `<name>.graph`, `<name>.json` and `g1_eq11.pclf.json` into `dir`.
pub fn write_corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for name in GRAPH_NAMES {
        let path = dir.join(format!("{name}.graph"));
        fs::write(&path, graph_text(name)?)?;
        written.push(path);
    }
    for name in SYSTEM_NAMES {
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, system_file(name)?.to_json())?;
        written.push(path);
    }
    let path = dir.join("g1_eq11.pclf.json");
    fs::write(&path, g1_eq11_pclf().to_file(None).to_json())?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures;

    #[test]
    fn graphs_match_fixtures_and_are_canonical() {
        assert_eq!(graph("g1").unwrap(), fixtures::g1());
        assert_eq!(graph("g2").unwrap(), fixtures::g2());
        assert_eq!(graph("g0_3").unwrap(), fixtures::g0(3));
        assert_eq!(
            graph("g1_minus_bb2").unwrap(),
            fixtures::g1().without_edge("b", "b", 2).unwrap()
        );
        for name in GRAPH_NAMES {
            assert_eq!(graph(name).unwrap().to_string(), graph_text(name).unwrap());
        }
        assert!(graph("g0_0").is_err());
        assert!(graph("g9").is_err());
    }

    #[test]
    fn systems_apply_their_scale() {
        let sys = system("eq11").unwrap();
        assert_eq!(sys.mode(1).unwrap().get(1, 0), 1.0 / 1.4);
        assert_eq!(system("eq13").unwrap().dim(), 3);
        assert_eq!(
            system("eq13_103").unwrap().mode(2).unwrap().get(2, 2),
            0.7 * 1.03
        );
        let sw = system("eq19_swapped").unwrap();
        assert_eq!(sw.matrices(), system("eq19").unwrap().swapped().matrices());
        for name in SYSTEM_NAMES {
            let file = system_file(name).unwrap();
            assert_eq!(MatrixSetFile::from_json(&file.to_json()).unwrap(), file);
        }
    }

    #[test]
    fn writes_stable_files() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let files = write_corpus(a.path()).unwrap();
        write_corpus(b.path()).unwrap();
        assert_eq!(files.len(), GRAPH_NAMES.len() + SYSTEM_NAMES.len() + 1);
        for f in files {
            let name = f.file_name().unwrap();
            assert_eq!(
                fs::read(&f).unwrap(),
                fs::read(b.path().join(name)).unwrap()
            );
        }
    }
}
