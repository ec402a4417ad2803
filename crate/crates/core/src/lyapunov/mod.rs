//! Path-complete Lyapunov functions: search, verification, the γ rate, and
//! the min-max common Lyapunov function built from the observer graph.

mod clf;
mod system;

pub use clf::{
    check_monotone_decrease, check_random_trajectories, eval_clf, extract_clf, min_max_step_check,
    random_state, random_word, simulate, write_trajectory_csv, MinMaxClf, MonotoneReport,
    StepInequality, Trajectory, DEFAULT_MONOTONE_SLACK,
};
pub use system::{MatrixSetFile, Scale, SwitchingSystem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{is_path_complete, LabeledGraph};
use crate::linalg::QuadraticForm;
use crate::sdp::{
    solve_feasibility_traced, verify_certificate, Feasibility, IterationRecord, LmiProblem,
    NotFound, SolverOptions, VerifyReport,
};

/// One positive definite quadratic form per graph node, for a given rate γ.
#[derive(Clone, Debug)]
pub struct Pclf {
    graph: LabeledGraph,
    forms: Vec<QuadraticForm>,
    gamma: f64,
}

impl Pclf {
    /// Forms are matched to nodes by declaration order and must be positive definite.
    pub fn new(graph: LabeledGraph, forms: Vec<QuadraticForm>, gamma: f64) -> Result<Self> {
        if forms.len() != graph.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_nodes(),
                found: forms.len(),
            });
        }
        let dim = forms[0].dim();
        if let Some(f) = forms.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        if let Some(i) = forms.iter().position(|f| !(f.min_eigenvalue() > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "form for node `{}` is not positive definite",
                graph.node_name(i)
            )));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidArgument("rate γ must be positive".into()));
        }
        Ok(Pclf {
            graph,
            forms,
            gamma,
        })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn form(&self, node: &str) -> Option<&QuadraticForm> {
        self.graph.node_index(node).map(|i| &self.forms[i])
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.forms[0].dim()
    }

    /// Only a path-complete graph turns the inequalities into a stability certificate.
    pub fn is_stability_certificate(&self) -> bool {
        is_path_complete(&self.graph)
    }

    /// Value of every node function at `x`.
    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forms.iter().map(|q| q.eval(x)).collect()
    }

    pub fn to_file(&self, residual: Option<f64>) -> PclfFile {
        PclfFile {
            dim: self.dim(),
            gamma: self.gamma,
            residual,
            forms: self
                .graph
                .nodes()
                .iter()
                .zip(&self.forms)
                .map(|(node, q)| NodeForm {
                    node: node.clone(),
                    matrix: q.rows(),
                })
                .collect(),
        }
    }
}

/// Checks `A_σᵀ Q_d A_σ ⪯ γ² Q_s` on every edge to within `tol`.
pub fn verify_pclf(p: &Pclf, sys: &SwitchingSystem, tol: f64) -> Result<VerifyReport> {
    check_labels(&p.graph, sys)?;
    let problem = LmiProblem::from_graph(&p.graph, sys.matrices(), p.gamma)?;
    verify_certificate(&problem, &p.forms, tol)
}

#[derive(Clone, Debug)]
pub enum PclfSearch {
    Found { pclf: Pclf, residual: f64 },
    NotFound(NotFound),
}

impl PclfSearch {
    pub fn pclf(&self) -> Option<&Pclf> {
        match self {
            PclfSearch::Found { pclf, .. } => Some(pclf),
            PclfSearch::NotFound(_) => None,
        }
    }

    pub fn into_pclf(self) -> Option<Pclf> {
        match self {
            PclfSearch::Found { pclf, .. } => Some(pclf),
            PclfSearch::NotFound(_) => None,
        }
    }
}

fn check_labels(graph: &LabeledGraph, sys: &SwitchingSystem) -> Result<()> {
    if graph.num_labels() != sys.num_modes() {
        return Err(Error::LabelMismatch {
            graph: graph.num_labels(),
            system: sys.num_modes(),
        });
    }
    Ok(())
}

/// Searches quadratic forms with `A_σᵀ Q_d A_σ ⪯ γ² Q_s` on every edge.
///
/// Graphs that are not path-complete are accepted; the result then reports
/// `is_stability_certificate() == false`.
pub fn find_pclf(
    graph: &LabeledGraph,
    sys: &SwitchingSystem,
    gamma: f64,
    opts: &SolverOptions,
) -> Result<PclfSearch> {
    find_pclf_traced(graph, sys, gamma, opts, |_| {})
}

/// As [`find_pclf`], reporting every solver iteration to `trace`.
pub fn find_pclf_traced(
    graph: &LabeledGraph,
    sys: &SwitchingSystem,
    gamma: f64,
    opts: &SolverOptions,
    trace: impl FnMut(&IterationRecord),
) -> Result<PclfSearch> {
    check_labels(graph, sys)?;
    let problem = LmiProblem::from_graph(graph, sys.matrices(), gamma)?;
    match solve_feasibility_traced(&problem, opts, trace)? {
        Feasibility::Found { certificate, .. } => {
            let residual = certificate.residual();
            let report = verify_certificate(&problem, certificate.forms(), opts.tol)?;
            if !report.ok {
                return Err(Error::Unverified(format!(
                    "solver output has residual {:e}",
                    report.residual
                )));
            }
            let pclf = Pclf::new(graph.clone(), certificate.into_forms(), gamma)?;
            Ok(PclfSearch::Found { pclf, residual })
        }
        Feasibility::NotFound(nf) => Ok(PclfSearch::NotFound(nf)),
    }
}

/// Rates below this are treated as zero by [`gamma_bisect`].
pub const MIN_GAMMA: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GammaBracket {
    /// Largest rate at which the solver found nothing (0 if never tried).
    pub lo: f64,
    /// Smallest rate with a verified certificate.
    pub hi: f64,
    pub certificate: Pclf,
    pub solves: usize,
}

/// Bisection on γ until `hi − lo ≤ tol·hi`.
///
/// `hi` always carries a verified certificate. `lo` is where the solver gave
/// up, which is a budget-bounded heuristic and not a proof of infeasibility.
/// The initial upper end `max ‖A_σ‖₂ + 1` is doubled until feasible.
pub fn gamma_bisect(
    graph: &LabeledGraph,
    sys: &SwitchingSystem,
    tol: f64,
    opts: &SolverOptions,
) -> Result<GammaBracket> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(
            "bisection tolerance must lie in (0, 1)".into(),
        ));
    }
    check_labels(graph, sys)?;
    let mut solves = 0;
    let mut hi = sys.max_spectral_norm() + 1.0;
    let mut certificate = None;
    for _ in 0..64 {
        solves += 1;
        if let Some(p) = find_pclf(graph, sys, hi, opts)?.into_pclf() {
            certificate = Some(p);
            break;
        }
        hi *= 2.0;
    }
    let mut certificate = certificate.ok_or_else(|| {
        Error::InvalidArgument("no feasible rate found while growing the bracket".into())
    })?;

    let mut lo = 0.0;
    while hi - lo > tol * hi && hi > MIN_GAMMA {
        let mid = 0.5 * (lo + hi);
        solves += 1;
        match find_pclf(graph, sys, mid, opts)? {
            PclfSearch::Found { pclf, .. } => {
                hi = mid;
                certificate = pclf;
            }
            PclfSearch::NotFound(_) => lo = mid,
        }
    }
    Ok(GammaBracket {
        lo,
        hi,
        certificate,
        solves,
    })
}

/// On-disk PCLF: node forms as nested row arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PclfFile {
    pub dim: usize,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub forms: Vec<NodeForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeForm {
    pub node: String,
    pub matrix: Vec<Vec<f64>>,
}

impl PclfFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    /// Attaches the forms to `graph`, matching them by node name.
    pub fn to_pclf(&self, graph: &LabeledGraph) -> Result<Pclf> {
        let mut forms = Vec::with_capacity(graph.num_nodes());
        for node in graph.nodes() {
            let entry = self
                .forms
                .iter()
                .find(|f| &f.node == node)
                .ok_or_else(|| Error::Format(format!("no form for node `{node}`")))?;
            if entry.matrix.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: entry.matrix.len(),
                });
            }
            let m = crate::linalg::SquareMatrix::from_rows(&entry.matrix)?;
            forms.push(QuadraticForm::from_matrix(&m)?);
        }
        if self.forms.len() != graph.num_nodes() {
            return Err(Error::Format("forms do not match the graph's nodes".into()));
        }
        Pclf::new(graph.clone(), forms, self.gamma)
    }
}
