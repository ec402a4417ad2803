//! The worst-case vector Lyapunov function: given target values `λ`, builds
//! a system and diagonal quadratic forms that realize exactly those values.

use num_traits::{One, Signed, Zero};

use super::rational::{to_f64, Rational, RationalMatrix};
use super::selector_matrices;
use crate::error::{Error, Result};
use crate::graphs::LabeledGraph;
use crate::linalg::{QuadraticForm, SquareMatrix};
use crate::lyapunov::SwitchingSystem;

/// `U_k(x) = Σ_i λ^i_k x_{i+1}²` on `ℝ^{M+1}`, with `u = e_1` and
/// `T_σ = e_{σ+1} e_1ᵀ`, so that `U(u) = λ⁰` and `U(T_σ u) = λ^σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorstCaseVlfc {
    /// `lambda[i][k]`: block `i ∈ 0..=M`, node `k`.
    lambda: Vec<Vec<Rational>>,
}

/// `lambda` holds `M + 1` blocks of `N` strictly positive values each.
pub fn synthesize_worst_case_vlfc(lambda: &[Vec<Rational>]) -> Result<WorstCaseVlfc> {
    if lambda.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two blocks (λ⁰ and one label)".into(),
        ));
    }
    let n = lambda[0].len();
    if n == 0 {
        return Err(Error::InvalidArgument("blocks must be nonempty".into()));
    }
    if let Some(b) = lambda.iter().find(|b| b.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if lambda.iter().flatten().any(|v| !v.is_positive()) {
        return Err(Error::InvalidArgument("λ must be strictly positive".into()));
    }
    Ok(WorstCaseVlfc {
        lambda: lambda.to_vec(),
    })
}

impl WorstCaseVlfc {
    pub fn num_labels(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn num_functions(&self) -> usize {
        self.lambda[0].len()
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[Vec<Rational>] {
        &self.lambda
    }

    pub fn point(&self) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.dim()];
        u[0] = Rational::one();
        u
    }

    pub fn transition(&self, label: usize) -> Result<RationalMatrix> {
        if label == 0 || label > self.num_labels() {
            return Err(Error::InvalidLabel {
                label,
                max: self.num_labels(),
            });
        }
        let mut t = RationalMatrix::zeros(self.dim(), self.dim());
        t.set(label, 0, Rational::one());
        Ok(t)
    }

    /// `U_k(x)`, exactly.
    pub fn eval(&self, k: usize, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self
            .lambda
            .iter()
            .zip(x)
            .map(|(block, xi)| &block[k] * xi * xi)
            .sum())
    }

    /// `(U_1(x), …, U_N(x))`.
    pub fn values(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        (0..self.num_functions()).map(|k| self.eval(k, x)).collect()
    }

    pub fn system(&self) -> Result<SwitchingSystem> {
        let matrices = (1..=self.num_labels())
            .map(|l| {
                let t = self.transition(l)?;
                SquareMatrix::from_rows(&t.to_f64_rows())
            })
            .collect::<Result<Vec<_>>>()?;
        SwitchingSystem::new(matrices)
    }

    pub fn forms(&self) -> Vec<QuadraticForm> {
        (0..self.num_functions())
            .map(|k| {
                let diag: Vec<f64> = self.lambda.iter().map(|b| to_f64(&b[k])).collect();
                QuadraticForm::diagonal(&diag)
            })
            .collect()
    }
}

/// `𝐃^σ λ^σ ≤ 𝐒^σ λ⁰` for every label: each edge `(s, d, σ)` has `λ^σ_d ≤ λ⁰_s`.
pub fn vector_inequalities_hold(g: &LabeledGraph, lambda: &[Vec<Rational>]) -> Result<bool> {
    if lambda.len() != g.num_labels() + 1 {
        return Err(Error::DimensionMismatch {
            expected: g.num_labels() + 1,
            found: lambda.len(),
        });
    }
    if let Some(b) = lambda.iter().find(|b| b.len() != g.num_nodes()) {
        return Err(Error::DimensionMismatch {
            expected: g.num_nodes(),
            found: b.len(),
        });
    }
    for label in 1..=g.num_labels() {
        let sel = selector_matrices(g, label)?;
        let n = g.num_nodes();
        let lhs = sel.destination_matrix(n).apply(&lambda[label])?;
        let rhs = sel.source_matrix(n).apply(&lambda[0])?;
        if lhs.iter().zip(&rhs).any(|(l, r)| l > r) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::rational::{integer, rational};
    use super::*;
    use crate::graphs::fixtures::g1;
    use crate::lyapunov::{verify_pclf, Pclf};

    #[test]
    fn single_label_single_function() {
        let v = synthesize_worst_case_vlfc(&[vec![integer(1)], vec![integer(1)]]).unwrap();
        assert_eq!(v.dim(), 2);
        assert_eq!(v.forms(), vec![QuadraticForm::identity(2)]);
        assert_eq!(v.point(), vec![integer(1), integer(0)]);
        let t = v.transition(1).unwrap();
        assert_eq!(
            t,
            RationalMatrix::from_integers(&[vec![0, 0], vec![1, 0]], 2).unwrap()
        );
        assert_eq!(v.eval(0, &v.point()).unwrap(), integer(1));
        assert_eq!(
            v.eval(0, &t.apply(&v.point()).unwrap()).unwrap(),
            integer(1)
        );
    }

    #[test]
    fn reconstruction_is_exact() {
        let lambda = vec![
            vec![rational(3, 7), integer(2)],
            vec![rational(1, 9), rational(5, 4)],
            vec![integer(8), rational(2, 3)],
        ];
        let v = synthesize_worst_case_vlfc(&lambda).unwrap();
        let u = v.point();
        assert_eq!(v.values(&u).unwrap(), lambda[0]);
        for label in 1..=2 {
            let tu = v.transition(label).unwrap().apply(&u).unwrap();
            assert_eq!(v.values(&tu).unwrap(), lambda[label]);
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(synthesize_worst_case_vlfc(&[vec![integer(1)]]).is_err());
        assert!(synthesize_worst_case_vlfc(&[vec![integer(1)], vec![integer(0)]]).is_err());
        assert!(
            synthesize_worst_case_vlfc(&[vec![integer(1)], vec![integer(1), integer(1)]]).is_err()
        );
    }

    #[test]
    fn admissible_lambda_gives_g1_pclf() {
        // λ¹_a, λ¹_b ≤ λ⁰_a and λ²_a, λ²_b ≤ λ⁰_b
        let lambda = vec![
            vec![integer(3), integer(2)],
            vec![integer(3), rational(1, 2)],
            vec![integer(2), integer(1)],
        ];
        assert!(vector_inequalities_hold(&g1(), &lambda).unwrap());
        let v = synthesize_worst_case_vlfc(&lambda).unwrap();
        let p = Pclf::new(g1(), v.forms(), 1.0).unwrap();
        assert!(verify_pclf(&p, &v.system().unwrap(), 1e-12).unwrap().ok);

        let mut bad = lambda.clone();
        bad[2][0] = integer(5);
        assert!(!vector_inequalities_hold(&g1(), &bad).unwrap());
        let v = synthesize_worst_case_vlfc(&bad).unwrap();
        let p = Pclf::new(g1(), v.forms(), 1.0).unwrap();
        assert!(!verify_pclf(&p, &v.system().unwrap(), 1e-12).unwrap().ok);
    }
}
