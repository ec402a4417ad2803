//! Log-barrier interior-point method for the residual-minimization form
//!
//! ```text
//! minimize t  subject to  γ²Q_s − AᵀQ_dA + tI ≻ 0,  Q_s − I + tI ≻ 0,  τ − tr Q_s > 0
//! ```
//!
//! The optimal `t` is the smallest achievable residual. Iteration stops early
//! once `t` drops below `−tol`, which already certifies feasibility with margin.

use super::{IterationRecord, LmiProblem, SolverOptions};
use crate::linalg::{cholesky, cholesky_inverse, solve_spd, QuadraticForm};

const BARRIER_GROWTH: f64 = 8.0;
const NEWTON_DECREMENT_TOL: f64 = 1e-10;
const GAP_REL_TOL: f64 = 1e-10;
const ARMIJO: f64 = 0.01;
const BACKTRACK: f64 = 0.5;

pub(super) struct Outcome {
    pub forms: Vec<QuadraticForm>,
    pub iterations: usize,
    pub lower_bound: f64,
}

/// `F(y) = F₀ + Σ y_k F_k` for a symmetric block, or `c(y) = c₀ + Σ y_k c_k`
/// for a scalar one.
enum Block {
    Matrix {
        size: usize,
        constant: Vec<f64>,
        terms: Vec<(usize, Vec<f64>)>,
    },
    Scalar {
        constant: f64,
        terms: Vec<(usize, f64)>,
    },
}

impl Block {
    fn degree(&self) -> usize {
        match self {
            Block::Matrix { size, .. } => *size,
            Block::Scalar { .. } => 1,
        }
    }
}

struct Layout {
    dim: usize,
    per_node: usize,
    num_nodes: usize,
}

impl Layout {
    fn num_vars(&self) -> usize {
        self.num_nodes * self.per_node + 1
    }

    fn t(&self) -> usize {
        self.num_nodes * self.per_node
    }

    /// `(variable, i, j)` for each upper-triangular entry of node `s`.
    fn entries(&self, s: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.dim;
        (0..n)
            .flat_map(move |i| (i..n).map(move |j| (i, j)))
            .enumerate()
            .map(move |(k, (i, j))| (s * self.per_node + k, i, j))
    }

    fn basis(&self, i: usize, j: usize) -> Vec<f64> {
        let n = self.dim;
        let mut e = vec![0.0; n * n];
        e[i * n + j] = 1.0;
        e[j * n + i] = 1.0;
        e
    }

    fn forms(&self, y: &[f64]) -> Vec<QuadraticForm> {
        let n = self.dim;
        (0..self.num_nodes)
            .map(|s| {
                let mut data = vec![0.0; n * n];
                for (k, i, j) in self.entries(s) {
                    data[i * n + j] = y[k];
                    data[j * n + i] = y[k];
                }
                QuadraticForm::from_symmetric_unchecked(n, data)
            })
            .collect()
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        e[i * n + i] = 1.0;
    }
    e
}

fn build_blocks(problem: &LmiProblem, layout: &Layout) -> Vec<Block> {
    let n = layout.dim;
    let t = layout.t();
    let mut blocks = Vec::new();

    for c in problem.constraints() {
        let g2 = c.gamma * c.gamma;
        let mut terms: Vec<(usize, Vec<f64>)> = Vec::new();
        for (k, i, j) in layout.entries(c.source) {
            terms.push((k, layout.basis(i, j).iter().map(|v| g2 * v).collect()));
        }
        for (k, i, j) in layout.entries(c.destination) {
            let e = QuadraticForm::from_symmetric_unchecked(n, layout.basis(i, j));
            let pulled = e.pullback(&c.matrix).expect("dimensions validated");
            match terms.iter_mut().find(|(v, _)| *v == k) {
                Some((_, m)) => m
                    .iter_mut()
                    .zip(pulled.as_slice())
                    .for_each(|(a, b)| *a -= b),
                None => terms.push((k, pulled.as_slice().iter().map(|v| -v).collect())),
            }
        }
        terms.push((t, identity(n)));
        blocks.push(Block::Matrix {
            size: n,
            constant: vec![0.0; n * n],
            terms,
        });
    }

    for s in 0..layout.num_nodes {
        let mut terms: Vec<(usize, Vec<f64>)> = layout
            .entries(s)
            .map(|(k, i, j)| (k, layout.basis(i, j)))
            .collect();
        terms.push((t, identity(n)));
        blocks.push(Block::Matrix {
            size: n,
            constant: identity(n).iter().map(|v| -v).collect(),
            terms,
        });
        let diag = layout
            .entries(s)
            .filter(|(_, i, j)| i == j)
            .map(|(k, _, _)| (k, -1.0))
            .collect();
        blocks.push(Block::Scalar {
            constant: problem.trace_cap(),
            terms: diag,
        });
    }
    blocks
}

fn matrix_value(size: usize, constant: &[f64], terms: &[(usize, Vec<f64>)], y: &[f64]) -> Vec<f64> {
    let mut f = constant.to_vec();
    for (k, fk) in terms {
        let yk = y[*k];
        if yk != 0.0 {
            f.iter_mut().zip(fk).for_each(|(a, b)| *a += yk * b);
        }
    }
    debug_assert_eq!(f.len(), size * size);
    f
}

fn scalar_value(constant: f64, terms: &[(usize, f64)], y: &[f64]) -> f64 {
    constant + terms.iter().map(|(k, c)| c * y[*k]).sum::<f64>()
}

/// Barrier value `−Σ log det F_b − Σ log c_b`, or `None` outside the domain.
fn barrier_value(blocks: &[Block], y: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for b in blocks {
        match b {
            Block::Matrix {
                size,
                constant,
                terms,
            } => {
                let f = matrix_value(*size, constant, terms, y);
                let l = cholesky(&f, *size)?;
                total -= 2.0 * (0..*size).map(|i| l[i * size + i].ln()).sum::<f64>();
            }
            Block::Scalar { constant, terms } => {
                let c = scalar_value(*constant, terms, y);
                if !(c > 0.0) {
                    return None;
                }
                total -= c.ln();
            }
        }
    }
    Some(total)
}

/// Gradient and Hessian of the barrier at an interior point.
fn derivatives(blocks: &[Block], y: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut grad = vec![0.0; m];
    let mut hess = vec![0.0; m * m];
    for b in blocks {
        match b {
            Block::Matrix {
                size,
                constant,
                terms,
            } => {
                let n = *size;
                let f = matrix_value(n, constant, terms, y);
                let l = cholesky(&f, n).expect("iterate is interior");
                let finv = cholesky_inverse(&l, n);
                // G_k = F⁻¹ F_k
                let gs: Vec<(usize, Vec<f64>)> = terms
                    .iter()
                    .map(|(k, fk)| {
                        let mut g = vec![0.0; n * n];
                        for i in 0..n {
                            for p in 0..n {
                                let a = finv[i * n + p];
                                if a == 0.0 {
                                    continue;
                                }
                                for j in 0..n {
                                    g[i * n + j] += a * fk[p * n + j];
                                }
                            }
                        }
                        (*k, g)
                    })
                    .collect();
                for (a, (ka, ga)) in gs.iter().enumerate() {
                    grad[*ka] -= (0..n).map(|i| ga[i * n + i]).sum::<f64>();
                    for (kb, gb) in &gs[a..] {
                        let mut tr = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                tr += ga[i * n + j] * gb[j * n + i];
                            }
                        }
                        hess[ka * m + kb] += tr;
                        if ka != kb {
                            hess[kb * m + ka] += tr;
                        }
                    }
                }
            }
            Block::Scalar { constant, terms } => {
                let c = scalar_value(*constant, terms, y);
                for (ka, ca) in terms {
                    grad[*ka] -= ca / c;
                    for (kb, cb) in terms {
                        hess[ka * m + kb] += ca * cb / (c * c);
                    }
                }
            }
        }
    }
    (grad, hess)
}

fn initial_point(problem: &LmiProblem, layout: &Layout) -> Vec<f64> {
    let n = layout.dim;
    let mut y = vec![0.0; layout.num_vars()];
    for s in 0..layout.num_nodes {
        for (k, i, j) in layout.entries(s) {
            if i == j {
                y[k] = 1.0;
            }
        }
    }
    // With every Q_s = I the edge blocks are (γ² + t)I − AᵀA.
    let mut worst = 0.0f64;
    for c in problem.constraints() {
        let gram = QuadraticForm::identity(n)
            .pullback(&c.matrix)
            .expect("validated");
        worst = worst.max(gram.max_eigenvalue() - c.gamma * c.gamma);
    }
    y[layout.t()] = worst + 1.0;
    y
}

pub(super) fn minimize_residual(
    problem: &LmiProblem,
    opts: &SolverOptions,
    mut trace: impl FnMut(&IterationRecord),
) -> Outcome {
    let n = problem.dim();
    let layout = Layout {
        dim: n,
        per_node: n * (n + 1) / 2,
        num_nodes: problem.num_nodes(),
    };
    let m = layout.num_vars();
    let t_idx = layout.t();
    let blocks = build_blocks(problem, &layout);
    let degree: usize = blocks.iter().map(Block::degree).sum();

    let mut y = initial_point(problem, &layout);
    let mut weight = 1.0;
    let mut iterations = 0;
    let mut lower_bound = f64::NEG_INFINITY;

    'outer: loop {
        // centering: Newton's method on weight·t + barrier
        loop {
            if iterations >= opts.max_iters {
                break 'outer;
            }
            let (mut grad, mut hess) = derivatives(&blocks, &y, m);
            grad[t_idx] += weight;
            let scale = (0..m).map(|i| hess[i * m + i]).fold(0.0, f64::max);
            // the objective is linear, so only the barrier contributes curvature
            for i in 0..m {
                hess[i * m + i] += 1e-14 * scale;
            }
            let Some(step) = solve_spd(&hess, m, &grad.iter().map(|g| -g).collect::<Vec<_>>())
            else {
                break 'outer;
            };
            let decrement: f64 = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
            if decrement / 2.0 <= NEWTON_DECREMENT_TOL {
                break;
            }

            let current = weight * y[t_idx] + barrier_value(&blocks, &y).expect("interior");
            let mut alpha = 1.0;
            let accepted = loop {
                let trial: Vec<f64> = y.iter().zip(&step).map(|(a, s)| a + alpha * s).collect();
                if let Some(b) = barrier_value(&blocks, &trial) {
                    if weight * trial[t_idx] + b <= current - ARMIJO * alpha * decrement {
                        break Some(trial);
                    }
                }
                alpha *= BACKTRACK;
                if alpha < 1e-14 {
                    break None;
                }
            };
            iterations += 1;
            let Some(next) = accepted else {
                // no further progress possible at this weight
                break;
            };
            y = next;
            trace(&IterationRecord {
                iteration: iterations,
                residual: y[t_idx],
                barrier_weight: weight,
            });
            if y[t_idx] < -opts.tol {
                break 'outer;
            }
        }

        let gap = degree as f64 / weight;
        let t = y[t_idx];
        lower_bound = lower_bound.max(t - gap);
        if lower_bound > opts.tol || t < -opts.tol {
            break;
        }
        if gap <= GAP_REL_TOL * t.abs().max(1.0) {
            break;
        }
        weight *= BARRIER_GROWTH;
    }

    Outcome {
        forms: layout.forms(&y),
        iterations,
        lower_bound,
    }
}
