//! Comparing graphs: `𝒢 ≤ 𝒢'` certified by a nonnegative matrix `C` with
//! `U_{s'} = Σ_s C_{s',s} V_s`.
//!
//! The certificate `(C, K_1..K_M)` must satisfy, for every label σ,
//! `𝐒^σ(𝒢')C ≥ K_σ 𝐒^σ(𝒢)` and `𝐃^σ(𝒢')C ≤ K_σ 𝐃^σ(𝒢)`, with `C, K_σ ≥ 0`
//! and every row of `C` summing to at least one. All arithmetic here is exact.

mod gadget;
mod rational;
mod simplex;

pub use gadget::{synthesize_worst_case_vlfc, vector_inequalities_hold, WorstCaseVlfc};
pub use rational::{
    format_rational, integer, parse_rational, rational, to_f64, Rational, RationalMatrix,
};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::graphs::{Edge, LabeledGraph};
use crate::linalg::QuadraticForm;
use crate::lyapunov::Pclf;
use simplex::{find_feasible_point, is_farkas_witness, Inequality, LpResult};

/// Edge-source and edge-destination incidence for one label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorPair {
    pub label: usize,
    /// `|E_σ| × |S|`, row `e` marks the source of edge `e`.
    pub s_mat: Vec<Vec<u8>>,
    /// `|E_σ| × |S|`, row `e` marks the destination of edge `e`.
    pub d_mat: Vec<Vec<u8>>,
    pub edges: Vec<Edge>,
}

impl SelectorPair {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn source_matrix(&self, num_nodes: usize) -> RationalMatrix {
        RationalMatrix::from_selector(&self.s_mat, num_nodes)
    }

    pub fn destination_matrix(&self, num_nodes: usize) -> RationalMatrix {
        RationalMatrix::from_selector(&self.d_mat, num_nodes)
    }
}

pub fn selector_matrices(g: &LabeledGraph, label: usize) -> Result<SelectorPair> {
    if label == 0 || label > g.num_labels() {
        return Err(Error::InvalidLabel {
            label,
            max: g.num_labels(),
        });
    }
    let edges: Vec<Edge> = g.edges_with_label(label).copied().collect();
    let indicator = |node: usize| {
        let mut row = vec![0u8; g.num_nodes()];
        row[node] = 1;
        row
    };
    Ok(SelectorPair {
        label,
        s_mat: edges.iter().map(|e| indicator(e.source)).collect(),
        d_mat: edges.iter().map(|e| indicator(e.destination)).collect(),
        edges,
    })
}

/// `C` is `|S'| × |S|`; `K[σ-1]` is `|E'_σ| × |E_σ|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonCertificate {
    c: RationalMatrix,
    k: Vec<RationalMatrix>,
}

impl ComparisonCertificate {
    pub fn new(c: RationalMatrix, k: Vec<RationalMatrix>) -> Self {
        ComparisonCertificate { c, k }
    }

    pub fn c(&self) -> &RationalMatrix {
        &self.c
    }

    /// `K_σ` for a 1-based label.
    pub fn k(&self, label: usize) -> Option<&RationalMatrix> {
        label.checked_sub(1).and_then(|i| self.k.get(i))
    }

    pub fn num_labels(&self) -> usize {
        self.k.len()
    }

    /// `{"C": [["1","1/2"], ...], "K": {"1": [...], ...}}`, one matrix row per line.
    pub fn to_json(&self) -> String {
        let matrix = |m: &RationalMatrix, indent: &str| {
            let rows: Vec<String> = m
                .to_strings()
                .iter()
                .map(|r| format!("{indent}  {}", serde_json::to_string(r).expect("strings")))
                .collect();
            if rows.is_empty() {
                "[]".to_string()
            } else {
                format!("[\n{}\n{indent}]", rows.join(",\n"))
            }
        };
        let k: Vec<String> = self
            .k
            .iter()
            .enumerate()
            .map(|(i, m)| format!("    \"{}\": {}", i + 1, matrix(m, "    ")))
            .collect();
        format!(
            "{{\n  \"C\": {},\n  \"K\": {{\n{}\n  }}\n}}",
            matrix(&self.c, "  "),
            k.join(",\n")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let root = value
            .as_object()
            .ok_or_else(|| Error::Format("certificate must be a JSON object".into()))?;
        if let Some(key) = root.keys().find(|k| *k != "C" && *k != "K") {
            return Err(Error::Format(format!("unknown certificate field `{key}`")));
        }
        let c = matrix_from_value(root.get("C"), "C")?;
        let k_obj = root
            .get("K")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Format("missing object `K`".into()))?;
        let mut k = Vec::with_capacity(k_obj.len());
        for label in 1..=k_obj.len() {
            let key = label.to_string();
            if !k_obj.contains_key(&key) {
                return Err(Error::Format(format!(
                    "`K` must have keys 1..={}",
                    k_obj.len()
                )));
            }
            k.push(matrix_from_value(k_obj.get(&key), &format!("K.{key}"))?);
        }
        Ok(ComparisonCertificate { c, k })
    }
}

fn matrix_from_value(value: Option<&Value>, name: &str) -> Result<RationalMatrix> {
    let bad = || {
        Error::Format(format!(
            "`{name}` must be an array of arrays of \"p/q\" strings"
        ))
    };
    let rows = value.and_then(Value::as_array).ok_or_else(bad)?;
    let mut parsed = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row.as_array().ok_or_else(bad)?;
        parsed.push(
            cells
                .iter()
                .map(|c| c.as_str().ok_or_else(bad).and_then(parse_rational))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let cols = parsed.first().map_or(0, Vec::len);
    RationalMatrix::from_rows(parsed, cols)
}

fn check_same_labels(g: &LabeledGraph, g2: &LabeledGraph) -> Result<()> {
    if g.num_labels() != g2.num_labels() {
        return Err(Error::GraphLabelMismatch {
            premise: g.num_labels(),
            conclusion: g2.num_labels(),
        });
    }
    Ok(())
}

fn check_shape(m: &RationalMatrix, rows: usize, cols: usize) -> Result<()> {
    // an empty row list carries no column count
    let cols_ok = m.num_cols() == cols || (rows == 0 && m.num_cols() == 0);
    if m.num_rows() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: m.num_rows(),
        });
    }
    if !cols_ok {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: m.num_cols(),
        });
    }
    Ok(())
}

/// Exact check of nonnegativity, the row sums of `C`, and both matrix
/// inequalities for every label. `g` is the premise graph.
pub fn verify_comparison_certificate(
    g: &LabeledGraph,
    g2: &LabeledGraph,
    cert: &ComparisonCertificate,
) -> Result<bool> {
    check_same_labels(g, g2)?;
    if cert.num_labels() != g.num_labels() {
        return Err(Error::DimensionMismatch {
            expected: g.num_labels(),
            found: cert.num_labels(),
        });
    }
    check_shape(&cert.c, g2.num_nodes(), g.num_nodes())?;
    for label in 1..=g.num_labels() {
        let e = g.edges_with_label(label).count();
        let e2 = g2.edges_with_label(label).count();
        check_shape(&cert.k[label - 1], e2, e)?;
    }
    if !cert.c.is_nonnegative() || cert.k.iter().any(|k| !k.is_nonnegative()) {
        return Ok(false);
    }
    if (0..cert.c.num_rows()).any(|i| cert.c.row_sum(i) < integer(1)) {
        return Ok(false);
    }
    for label in 1..=g.num_labels() {
        let sel = selector_matrices(g, label)?;
        let sel2 = selector_matrices(g2, label)?;
        if sel2.num_edges() == 0 {
            continue;
        }
        let k = &cert.k[label - 1];
        let s2c = sel2.source_matrix(g2.num_nodes()).matmul(&cert.c)?;
        let d2c = sel2.destination_matrix(g2.num_nodes()).matmul(&cert.c)?;
        let ks = k.matmul(&sel.source_matrix(g.num_nodes()))?;
        let kd = k.matmul(&sel.destination_matrix(g.num_nodes()))?;
        if !s2c.dominates(&ks) || !kd.dominates(&d2c) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Multipliers proving that no certificate exists: a nonnegative
/// combination of the LP's inequalities that reads `0 ≥ positive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasWitness {
    /// Human-readable name of each LP inequality.
    pub constraints: Vec<String>,
    pub multipliers: Vec<Rational>,
}

impl FarkasWitness {
    /// Inequalities with a nonzero multiplier.
    pub fn support(&self) -> Vec<(&str, &Rational)> {
        self.constraints
            .iter()
            .zip(&self.multipliers)
            .filter(|(_, y)| *y != &integer(0))
            .map(|(c, y)| (c.as_str(), y))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum ComparisonOutcome {
    Certificate(ComparisonCertificate),
    Infeasible(FarkasWitness),
}

struct ComparisonLp {
    num_vars: usize,
    rows: Vec<Inequality>,
    names: Vec<String>,
    k_offsets: Vec<usize>,
    edge_counts: Vec<usize>,
}

fn build_lp(g: &LabeledGraph, g2: &LabeledGraph) -> Result<ComparisonLp> {
    let n = g.num_nodes();
    let n2 = g2.num_nodes();
    let c_var = |s2: usize, s: usize| s2 * n + s;
    let one = integer(1);
    let minus = integer(-1);
    let mut rows = Vec::new();
    let mut names = Vec::new();
    for s2 in 0..n2 {
        rows.push(Inequality {
            terms: (0..n).map(|s| (c_var(s2, s), one.clone())).collect(),
            rhs: one.clone(),
        });
        names.push(format!("row sum of C at {}", g2.node_name(s2)));
    }
    let mut offset = n2 * n;
    let mut k_offsets = Vec::new();
    let mut edge_counts = Vec::new();
    for label in 1..=g.num_labels() {
        let edges: Vec<Edge> = g.edges_with_label(label).copied().collect();
        let edges2: Vec<Edge> = g2.edges_with_label(label).copied().collect();
        let k_var = |e2: usize, e: usize| offset + e2 * edges.len() + e;
        for (i2, e2) in edges2.iter().enumerate() {
            let edge_name = format!(
                "({}, {}, {label})",
                g2.node_name(e2.source),
                g2.node_name(e2.destination)
            );
            for s in 0..n {
                // (𝐒'C)_{e',s} − (K𝐒)_{e',s} ≥ 0
                let mut terms = vec![(c_var(e2.source, s), one.clone())];
                terms.extend(
                    edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.source == s)
                        .map(|(i, _)| (k_var(i2, i), minus.clone())),
                );
                rows.push(Inequality {
                    terms,
                    rhs: integer(0),
                });
                names.push(format!(
                    "source inequality for {edge_name} at {}",
                    g.node_name(s)
                ));
                // (K𝐃)_{e',s} − (𝐃'C)_{e',s} ≥ 0
                let mut terms = vec![(c_var(e2.destination, s), minus.clone())];
                terms.extend(
                    edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.destination == s)
                        .map(|(i, _)| (k_var(i2, i), one.clone())),
                );
                rows.push(Inequality {
                    terms,
                    rhs: integer(0),
                });
                names.push(format!(
                    "destination inequality for {edge_name} at {}",
                    g.node_name(s)
                ));
            }
        }
        k_offsets.push(offset);
        edge_counts.push((edges2.len(), edges.len()));
        offset += edges2.len() * edges.len();
    }
    Ok(ComparisonLp {
        num_vars: offset,
        rows,
        names,
        k_offsets,
        edge_counts: edge_counts.into_iter().flat_map(|(a, b)| [a, b]).collect(),
    })
}

/// Solves the certificate LP exactly. `g` is the premise graph, whose
/// Lyapunov functions are combined into ones for `g2`.
pub fn solve_comparison_lp(g: &LabeledGraph, g2: &LabeledGraph) -> Result<ComparisonOutcome> {
    check_same_labels(g, g2)?;
    let lp = build_lp(g, g2)?;
    match find_feasible_point(lp.num_vars, &lp.rows) {
        LpResult::Feasible(x) => {
            let n = g.num_nodes();
            let n2 = g2.num_nodes();
            let c = RationalMatrix::from_rows(
                (0..n2).map(|i| x[i * n..(i + 1) * n].to_vec()).collect(),
                n,
            )?;
            let k = (0..g.num_labels())
                .map(|l| {
                    let (rows, cols) = (lp.edge_counts[2 * l], lp.edge_counts[2 * l + 1]);
                    let base = lp.k_offsets[l];
                    RationalMatrix::from_rows(
                        (0..rows)
                            .map(|r| x[base + r * cols..base + (r + 1) * cols].to_vec())
                            .collect(),
                        cols,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let cert = ComparisonCertificate { c, k };
            if !verify_comparison_certificate(g, g2, &cert)? {
                return Err(Error::Unverified(
                    "LP solution fails the exact check".into(),
                ));
            }
            Ok(ComparisonOutcome::Certificate(cert))
        }
        LpResult::Infeasible(y) => {
            if !is_farkas_witness(lp.num_vars, &lp.rows, &y) {
                return Err(Error::Unverified(
                    "infeasibility witness fails the exact check".into(),
                ));
            }
            Ok(ComparisonOutcome::Infeasible(FarkasWitness {
                constraints: lp.names,
                multipliers: y,
            }))
        }
    }
}

/// A verified certificate, or `None` when the LP is infeasible. `None` only
/// rules out certificates of this linear form.
pub fn find_comparison_certificate(
    g: &LabeledGraph,
    g2: &LabeledGraph,
) -> Result<Option<ComparisonCertificate>> {
    Ok(match solve_comparison_lp(g, g2)? {
        ComparisonOutcome::Certificate(c) => Some(c),
        ComparisonOutcome::Infeasible(_) => None,
    })
}

/// `U_{s'} = Σ_s C_{s',s} V_s`, a Lyapunov function for `g2` at the same rate.
pub fn apply_certificate(
    cert: &ComparisonCertificate,
    p: &Pclf,
    g2: &LabeledGraph,
) -> Result<Pclf> {
    if !verify_comparison_certificate(p.graph(), g2, cert)? {
        return Err(Error::Unverified(
            "comparison certificate does not hold for these graphs".into(),
        ));
    }
    let c = cert.c.to_f64_rows();
    let forms = c
        .iter()
        .map(|weights| QuadraticForm::combination(p.dim(), weights.iter().copied().zip(p.forms())))
        .collect::<Result<Vec<_>>>()?;
    Pclf::new(g2.clone(), forms, p.gamma())
}

/// `(Cλ⁰, Cλ¹, …)`: the value vectors seen by the combined functions.
pub fn combine_values(
    cert: &ComparisonCertificate,
    lambda: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>> {
    lambda.iter().map(|l| cert.c.apply(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures::{g0, g1, g2};
    use crate::lyapunov::fixtures::eq11;
    use crate::lyapunov::verify_pclf;

    fn ints(rows: &[&[i64]]) -> RationalMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RationalMatrix::from_integers(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols)
            .unwrap()
    }

    fn printed_certificate() -> ComparisonCertificate {
        let k = ints(&[&[1, 0, 1], &[0, 1, 1]]);
        ComparisonCertificate::new(ints(&[&[1, 1, 0], &[1, 0, 1]]), vec![k.clone(), k])
    }

    #[test]
    fn printed_selector_matrices() {
        let s = selector_matrices(&g1(), 1).unwrap();
        assert_eq!(s.s_mat, vec![vec![1, 0], vec![1, 0]]);
        assert_eq!(s.d_mat, vec![vec![1, 0], vec![0, 1]]);
        let s = selector_matrices(&g1(), 2).unwrap();
        assert_eq!(s.s_mat, vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(s.d_mat, vec![vec![1, 0], vec![0, 1]]);
        let s = selector_matrices(&g2(), 1).unwrap();
        assert_eq!(s.s_mat, vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(s.d_mat, vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let s = selector_matrices(&g2(), 2).unwrap();
        assert_eq!(s.s_mat, vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(s.d_mat, vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert!(selector_matrices(&g1(), 0).is_err());
        assert!(selector_matrices(&g1(), 3).is_err());
    }

    #[test]
    fn selector_columns_count_degrees() {
        for g in [g0(3), g1(), g2()] {
            let mut complete = true;
            let mut co_complete = true;
            for label in 1..=g.num_labels() {
                let s = selector_matrices(&g, label).unwrap();
                for node in 0..g.num_nodes() {
                    complete &= s.s_mat.iter().any(|r| r[node] == 1);
                    co_complete &= s.d_mat.iter().any(|r| r[node] == 1);
                }
                assert!(s.s_mat.iter().chain(&s.d_mat).all(|r| r
                    .iter()
                    .map(|&v| v as usize)
                    .sum::<usize>()
                    == 1));
            }
            assert_eq!(complete, g.is_complete());
            assert_eq!(co_complete, g.is_co_complete());
        }
    }

    #[test]
    fn printed_certificate_verifies() {
        let cert = printed_certificate();
        assert!(verify_comparison_certificate(&g2(), &g1(), &cert).unwrap());
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 2)] {
            let mut c = cert.c().clone();
            c.set(i, j, integer(0));
            let broken = ComparisonCertificate::new(c, cert.k.clone());
            assert!(
                !verify_comparison_certificate(&g2(), &g1(), &broken).unwrap(),
                "{i},{j}"
            );
        }
        // swapped roles give the wrong shapes
        assert!(verify_comparison_certificate(&g1(), &g2(), &cert).is_err());
    }

    #[test]
    fn identity_certificate_on_g0() {
        let one = ints(&[&[1]]);
        let cert = ComparisonCertificate::new(one.clone(), vec![one.clone(), one]);
        assert!(verify_comparison_certificate(&g0(2), &g0(2), &cert).unwrap());
        let p = Pclf::new(g0(2), vec![QuadraticForm::diagonal(&[2.0, 3.0])], 1.0).unwrap();
        let u = apply_certificate(&cert, &p, &g0(2)).unwrap();
        assert_eq!(u.forms(), p.forms());
    }

    #[test]
    fn lp_finds_g2_to_g1() {
        let cert = find_comparison_certificate(&g2(), &g1()).unwrap().unwrap();
        assert!(verify_comparison_certificate(&g2(), &g1(), &cert).unwrap());
    }

    #[test]
    fn lp_finds_g0_to_g1_and_rejects_g1_to_g0() {
        let cert = find_comparison_certificate(&g0(2), &g1()).unwrap().unwrap();
        assert_eq!(cert.c().num_rows(), 2);
        match solve_comparison_lp(&g1(), &g0(2)).unwrap() {
            ComparisonOutcome::Infeasible(w) => assert!(!w.support().is_empty()),
            ComparisonOutcome::Certificate(c) => panic!("unexpected {c:?}"),
        }
        assert!(matches!(
            find_comparison_certificate(&g0(1), &g1()),
            Err(Error::GraphLabelMismatch { .. })
        ));
    }

    #[test]
    fn example_construction() {
        let forms = vec![
            QuadraticForm::diagonal(&[1.0, 2.0]),
            QuadraticForm::diagonal(&[3.0, 4.0]),
            QuadraticForm::diagonal(&[5.0, 6.0]),
        ];
        let p = Pclf::new(g2(), forms, 1.0).unwrap();
        let u = apply_certificate(&printed_certificate(), &p, &g1()).unwrap();
        assert_eq!(u.forms()[0], QuadraticForm::diagonal(&[4.0, 6.0]));
        assert_eq!(u.forms()[1], QuadraticForm::diagonal(&[6.0, 8.0]));
        let bad = ComparisonCertificate::new(
            ints(&[&[0, 1, 0], &[1, 0, 1]]),
            printed_certificate().k.clone(),
        );
        assert!(matches!(
            apply_certificate(&bad, &p, &g1()),
            Err(Error::Unverified(_))
        ));
    }

    #[test]
    fn applied_g0_certificate_verifies_on_g1() {
        let cert = find_comparison_certificate(&g0(2), &g1()).unwrap().unwrap();
        let sys = eq11(1.0 / 1.4).scaled(0.7);
        let p = Pclf::new(g0(2), vec![QuadraticForm::identity(2)], 1.0).unwrap();
        assert!(verify_pclf(&p, &sys, 1e-9).unwrap().ok);
        let u = apply_certificate(&cert, &p, &g1()).unwrap();
        assert!(verify_pclf(&u, &sys, 1e-9).unwrap().ok);
    }

    #[test]
    fn json_round_trip() {
        let mut cert = printed_certificate();
        cert.c.set(0, 2, rational(1, 3));
        let text = cert.to_json();
        assert!(text.contains("\"1/3\""));
        assert_eq!(ComparisonCertificate::from_json(&text).unwrap(), cert);
        assert!(
            ComparisonCertificate::from_json(r#"{"C": [["1"]], "K": {"2": [["1"]]}}"#).is_err()
        );
        assert!(ComparisonCertificate::from_json(r#"{"C": [[1]], "K": {}}"#).is_err());
        assert!(ComparisonCertificate::from_json(r#"{"C": [["1"]], "K": {}, "x": 1}"#).is_err());
    }
}
