//! Min-max common Lyapunov functions and trajectory checks.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Pclf, SwitchingSystem};
use crate::error::{Error, Result};
use crate::graphs::{build_observer, LabeledGraph, NodeSet};
use crate::linalg::QuadraticForm;
use crate::parallel::Execution;

/// Default relative slack for monotonicity checks: `V(x(t+1)) ≤ (1 + 1e-9)·V(x(t))`.
pub const DEFAULT_MONOTONE_SLACK: f64 = 1e-9;

/// `V*(x) = min over subsets Q of max over s ∈ Q of V_s(x)`.
#[derive(Clone, Debug)]
pub struct MinMaxClf {
    graph: LabeledGraph,
    subsets: Vec<NodeSet>,
    forms: Vec<QuadraticForm>,
}

impl MinMaxClf {
    pub fn new(
        graph: LabeledGraph,
        subsets: Vec<NodeSet>,
        forms: Vec<QuadraticForm>,
    ) -> Result<Self> {
        if subsets.is_empty() || subsets.iter().any(NodeSet::is_empty) {
            return Err(Error::InvalidArgument("subsets must be nonempty".into()));
        }
        if forms.len() != graph.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_nodes(),
                found: forms.len(),
            });
        }
        if subsets
            .iter()
            .any(|s| s.members().iter().any(|&n| n >= graph.num_nodes()))
        {
            return Err(Error::InvalidArgument(
                "subset refers to an unknown node".into(),
            ));
        }
        Ok(MinMaxClf {
            graph,
            subsets,
            forms,
        })
    }

    pub fn subsets(&self) -> &[NodeSet] {
        &self.subsets
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.forms[0].dim()
    }

    /// Subsets rendered as `{a,b}`.
    pub fn subset_names(&self) -> Vec<String> {
        self.subsets
            .iter()
            .map(|s| s.display(&self.graph).to_string())
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let values = self
            .forms
            .iter()
            .map(|q| q.eval(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .subsets
            .iter()
            .map(|s| {
                s.members()
                    .iter()
                    .map(|&n| values[n])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min))
    }
}

/// Builds `V*` over the observer's node sets, in observer discovery order.
///
/// With `prune_supersets`, any subset that strictly contains another one is
/// dropped; its maximum can never be the smaller term, so `V*` is unchanged.
pub fn extract_clf(p: &Pclf, prune_supersets: bool) -> Result<MinMaxClf> {
    let observer = build_observer(p.graph());
    if !observer.is_complete() {
        return Err(Error::NotPathComplete);
    }
    let all = observer.nodes().to_vec();
    let subsets = if prune_supersets {
        all.iter()
            .filter(|s| !all.iter().any(|o| o != *s && o.is_subset(s)))
            .cloned()
            .collect()
    } else {
        all
    };
    MinMaxClf::new(p.graph().clone(), subsets, p.forms().to_vec())
}

pub fn eval_clf(c: &MinMaxClf, x: &[f64]) -> Result<f64> {
    c.eval(x)
}

/// States `x(0..=T)` under a switching word `σ(0..T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub word: Vec<usize>,
    pub states: Vec<Vec<f64>>,
}

pub fn simulate(sys: &SwitchingSystem, word: &[usize], x0: &[f64]) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: x0.len(),
        });
    }
    let mut states = Vec::with_capacity(word.len() + 1);
    states.push(x0.to_vec());
    for &label in word {
        let next = sys.mode(label)?.apply(states.last().expect("nonempty"))?;
        states.push(next);
    }
    Ok(Trajectory {
        word: word.to_vec(),
        states,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// First `t` with `V(x(t+1)) > (1 + slack)·V(x(t))`.
    pub first_violation: Option<usize>,
}

/// `V*(x(t+1)) ≤ V*(x(t)) + slack·V*(x(t))` for every step.
pub fn check_monotone_decrease(
    c: &MinMaxClf,
    traj: &Trajectory,
    slack: f64,
) -> Result<MonotoneReport> {
    let values = traj
        .states
        .iter()
        .map(|x| c.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let first_violation = values
        .windows(2)
        .position(|w| w[1] > w[0] + slack * w[0].abs());
    Ok(MonotoneReport {
        monotone: first_violation.is_none(),
        first_violation,
    })
}

/// Runs `count` random trajectories of `len` steps and checks `V*` on each.
/// Trajectory `i` is seeded with `seed + i`, so results do not depend on `exec`.
pub fn check_random_trajectories(
    clf: &MinMaxClf,
    sys: &SwitchingSystem,
    count: usize,
    len: usize,
    seed: u64,
    slack: f64,
    exec: Execution,
) -> Result<Vec<MonotoneReport>> {
    exec.map_indices(count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let word = random_word(&mut rng, sys.num_modes(), len);
        let x0 = random_state(&mut rng, sys.dim());
        check_monotone_decrease(clf, &simulate(sys, &word, &x0)?, slack)
    })
    .into_iter()
    .collect()
}

/// Which inequality a subset pair `(P, Q)` supports under label σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepInequality {
    /// Every `p ∈ P` has a σ-edge into `Q`: `min_Q V(A_σ x) ≤ min_P V(x)`.
    Min,
    /// Every `q ∈ Q` has a σ-edge from `P`: `max_Q V(A_σ x) ≤ max_P V(x)`.
    Max,
}

fn supported(
    graph: &LabeledGraph,
    from: &NodeSet,
    to: &NodeSet,
    label: usize,
) -> Vec<StepInequality> {
    let mut out = Vec::new();
    let left_total = from.members().iter().all(|&p| {
        to.members()
            .iter()
            .any(|&q| graph.contains_edge(p, q, label))
    });
    if left_total {
        out.push(StepInequality::Min);
    }
    let right_total = to.members().iter().all(|&q| {
        from.members()
            .iter()
            .any(|&p| graph.contains_edge(p, q, label))
    });
    if right_total {
        out.push(StepInequality::Max);
    }
    out
}

/// Samples `samples` Gaussian states and checks every min/max step
/// inequality that the edge pattern between `from` and `to` supports.
/// A sampled test helper, not a proof.
pub fn min_max_step_check(
    p: &Pclf,
    sys: &SwitchingSystem,
    from: &NodeSet,
    to: &NodeSet,
    label: usize,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::InvalidArgument("subsets must be nonempty".into()));
    }
    let kinds = supported(p.graph(), from, to, label);
    if kinds.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no edge pattern links {} to {} under label {label}",
            from.display(p.graph()),
            to.display(p.graph())
        )));
    }
    let a = sys.mode(label)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_state(&mut rng, p.dim());
        let before = p.values(&x)?;
        let after = p.values(&a.apply(&x)?)?;
        for kind in &kinds {
            let (lhs, rhs) = match kind {
                StepInequality::Min => (min_over(&after, to), min_over(&before, from)),
                StepInequality::Max => (max_over(&after, to), max_over(&before, from)),
            };
            if lhs > rhs + DEFAULT_MONOTONE_SLACK * rhs.abs() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn min_over(values: &[f64], set: &NodeSet) -> f64 {
    set.members()
        .iter()
        .map(|&n| values[n])
        .fold(f64::INFINITY, f64::min)
}

fn max_over(values: &[f64], set: &NodeSet) -> f64 {
    set.members()
        .iter()
        .map(|&n| values[n])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Standard normal state.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform word over labels `1..=num_labels`.
pub fn random_word(rng: &mut impl Rng, num_labels: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(1..=num_labels)).collect()
}

/// CSV with columns `t, sigma, x1..xn, V_<node>..., V_star`. Row `t` carries
/// the label applied to reach `t+1`; the last row leaves it empty.
pub fn write_trajectory_csv(
    out: &mut impl Write,
    clf: &MinMaxClf,
    traj: &Trajectory,
) -> Result<()> {
    let n = clf.dim();
    let mut header = vec!["t".to_string(), "sigma".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend(clf.graph().nodes().iter().map(|s| format!("V_{s}")));
    header.push("V_star".to_string());
    writeln!(out, "{}", header.join(","))?;
    for (t, x) in traj.states.iter().enumerate() {
        let mut row = vec![
            t.to_string(),
            traj.word.get(t).map(|l| l.to_string()).unwrap_or_default(),
        ];
        row.extend(x.iter().map(|v| format!("{v:e}")));
        for q in clf.forms() {
            row.push(format!("{:e}", q.eval(x)?));
        }
        row.push(format!("{:e}", clf.eval(x)?));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
