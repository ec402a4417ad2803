//! Feasibility of Lyapunov-type linear matrix inequalities
//!
//! ```text
//! Aᵀ Q_d A ⪯ γ² Q_s     for every constraint (s, d, A, γ)
//! Q_s ⪰ I,  trace Q_s ≤ τ
//! ```
//!
//! with one symmetric unknown `Q_s` per node. The normalization `Q_s ⪰ I`
//! replaces strict positivity: the constraints are homogeneous in `Q`, so any
//! strictly feasible point can be rescaled onto it.
//!
//! A returned certificate is always re-verified from scratch with the
//! symmetric eigenvalue routine; a `NotFound` answer only means the solver
//! did not find a point within its budget.

mod barrier;

use std::io::Write;

use crate::error::{Error, Result};
use crate::graphs::LabeledGraph;
use crate::linalg::{QuadraticForm, SquareMatrix};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITERS: usize = 20_000;
/// Trace cap per unit of dimension: `τ = 10⁴·n`.
pub const DEFAULT_TRACE_CAP_PER_DIM: f64 = 1e4;

/// `Aᵀ Q_destination A ⪯ γ² Q_source`
#[derive(Clone, Debug)]
pub struct LmiConstraint {
    pub source: usize,
    pub destination: usize,
    pub matrix: SquareMatrix,
    pub gamma: f64,
}

#[derive(Clone, Debug)]
pub struct LmiProblem {
    dim: usize,
    num_nodes: usize,
    constraints: Vec<LmiConstraint>,
    trace_cap: f64,
}

impl LmiProblem {
    /// `trace_cap` defaults to `10⁴·dim`.
    pub fn new(
        dim: usize,
        num_nodes: usize,
        constraints: Vec<LmiConstraint>,
        trace_cap: Option<f64>,
    ) -> Result<Self> {
        if dim == 0 || num_nodes == 0 {
            return Err(Error::InvalidArgument(
                "an LMI problem needs a positive dimension and at least one node".into(),
            ));
        }
        let trace_cap = trace_cap.unwrap_or(DEFAULT_TRACE_CAP_PER_DIM * dim as f64);
        if !(trace_cap >= dim as f64) || !trace_cap.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "trace cap {trace_cap} must be finite and at least the dimension {dim}"
            )));
        }
        for c in &constraints {
            if c.matrix.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.matrix.dim(),
                });
            }
            if c.source >= num_nodes || c.destination >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "constraint refers to node {} but the problem has {num_nodes} nodes",
                    c.source.max(c.destination)
                )));
            }
            if !(c.gamma > 0.0) || !c.gamma.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "rate γ = {} must be positive",
                    c.gamma
                )));
            }
        }
        Ok(LmiProblem {
            dim,
            num_nodes,
            constraints,
            trace_cap,
        })
    }

    /// One constraint per graph edge `(s, d, σ)` with matrix `A_σ` and rate `gamma`.
    pub fn from_graph(graph: &LabeledGraph, matrices: &[SquareMatrix], gamma: f64) -> Result<Self> {
        if matrices.len() != graph.num_labels() {
            return Err(Error::LabelMismatch {
                graph: graph.num_labels(),
                system: matrices.len(),
            });
        }
        let dim = matrices.first().map(SquareMatrix::dim).unwrap_or(0);
        let constraints = graph
            .edges()
            .iter()
            .map(|e| LmiConstraint {
                source: e.source,
                destination: e.destination,
                matrix: matrices[e.label - 1].clone(),
                gamma,
            })
            .collect();
        Self::new(dim, graph.num_nodes(), constraints, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn constraints(&self) -> &[LmiConstraint] {
        &self.constraints
    }

    pub fn trace_cap(&self) -> f64 {
        self.trace_cap
    }

    fn check_forms(&self, forms: &[QuadraticForm]) -> Result<()> {
        if forms.len() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes,
                found: forms.len(),
            });
        }
        if let Some(f) = forms.iter().find(|f| f.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        Ok(())
    }

    /// Largest eigenvalue of `AᵀQ_dA − γ²Q_s` for each constraint.
    pub fn constraint_violations(&self, forms: &[QuadraticForm]) -> Result<Vec<f64>> {
        self.check_forms(forms)?;
        self.constraints
            .iter()
            .map(|c| {
                let lhs = forms[c.destination].pullback(&c.matrix)?;
                let gap = QuadraticForm::combination(
                    self.dim,
                    [(1.0, &lhs), (-c.gamma * c.gamma, &forms[c.source])],
                )?;
                Ok(gap.max_eigenvalue())
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Node matrices together with their independently recomputed residual.
#[derive(Clone, Debug)]
pub struct LmiCertificate {
    forms: Vec<QuadraticForm>,
    residual: f64,
}

impl LmiCertificate {
    /// The residual is the worst of `λ_max(AᵀQ_dA − γ²Q_s)` over constraints
    /// and `λ_max(I − Q_s)` over nodes.
    pub fn new(problem: &LmiProblem, forms: Vec<QuadraticForm>) -> Result<Self> {
        let edge = problem
            .constraint_violations(&forms)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let norm = forms
            .iter()
            .map(|q| 1.0 - q.min_eigenvalue())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(LmiCertificate {
            forms,
            residual: edge.max(norm),
        })
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn into_forms(self) -> Vec<QuadraticForm> {
        self.forms
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NotFound {
    pub iterations: usize,
    /// Residual of the last iterate.
    pub residual: f64,
    /// Solver estimate of the smallest achievable residual.
    pub lower_bound: f64,
}

#[derive(Clone, Debug)]
pub enum Feasibility {
    Found {
        certificate: LmiCertificate,
        iterations: usize,
    },
    NotFound(NotFound),
}

impl Feasibility {
    pub fn certificate(&self) -> Option<&LmiCertificate> {
        match self {
            Feasibility::Found { certificate, .. } => Some(certificate),
            Feasibility::NotFound(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Feasibility::Found { .. })
    }
}

/// One solver iteration, as written to the diagnostics stream.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Upper bound on the residual at the current iterate.
    pub residual: f64,
    pub barrier_weight: f64,
}

/// Writes iteration records as CSV with header `iteration,residual,barrier_weight`.
pub struct DiagnosticsCsv<W: Write> {
    out: W,
    header_written: bool,
}

impl<W: Write> DiagnosticsCsv<W> {
    pub fn new(out: W) -> Self {
        DiagnosticsCsv {
            out,
            header_written: false,
        }
    }

    pub fn record(&mut self, r: &IterationRecord) -> std::io::Result<()> {
        if !self.header_written {
            writeln!(self.out, "iteration,residual,barrier_weight")?;
            self.header_written = true;
        }
        writeln!(
            self.out,
            "{},{:e},{:e}",
            r.iteration, r.residual, r.barrier_weight
        )
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Searches for `Q_s` satisfying the problem's LMIs with residual at most `opts.tol`.
pub fn solve_feasibility(problem: &LmiProblem, opts: &SolverOptions) -> Result<Feasibility> {
    solve_feasibility_traced(problem, opts, |_| {})
}

/// As [`solve_feasibility`], reporting every iteration to `trace`.
pub fn solve_feasibility_traced(
    problem: &LmiProblem,
    opts: &SolverOptions,
    trace: impl FnMut(&IterationRecord),
) -> Result<Feasibility> {
    if !(opts.tol > 0.0) || !opts.tol.is_finite() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let outcome = barrier::minimize_residual(problem, opts, trace);
    let certificate = LmiCertificate::new(problem, outcome.forms)?;
    if certificate.residual() <= opts.tol {
        Ok(Feasibility::Found {
            certificate,
            iterations: outcome.iterations,
        })
    } else {
        Ok(Feasibility::NotFound(NotFound {
            iterations: outcome.iterations,
            residual: certificate.residual(),
            lower_bound: outcome.lower_bound,
        }))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    /// Worst `λ_max(AᵀQ_dA − γ²Q_s)` over constraints (−∞ without constraints).
    pub residual: f64,
    pub worst_constraint: Option<usize>,
    /// Smallest eigenvalue over all node matrices.
    pub min_form_eigenvalue: f64,
}

/// Checks every constraint's violation eigenvalue against `tol` and every
/// node matrix for positive definiteness.
pub fn verify_certificate(
    problem: &LmiProblem,
    forms: &[QuadraticForm],
    tol: f64,
) -> Result<VerifyReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(
            "tolerance must be nonnegative".into(),
        ));
    }
    let violations = problem.constraint_violations(forms)?;
    let (worst_constraint, residual) = violations.iter().copied().enumerate().fold(
        (None, f64::NEG_INFINITY),
        |(wi, wv), (i, v)| {
            if v > wv {
                (Some(i), v)
            } else {
                (wi, wv)
            }
        },
    );
    let min_form_eigenvalue = forms
        .iter()
        .map(QuadraticForm::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    Ok(VerifyReport {
        ok: residual <= tol && min_form_eigenvalue > 0.0,
        residual,
        worst_constraint,
        min_form_eigenvalue,
    })
}
